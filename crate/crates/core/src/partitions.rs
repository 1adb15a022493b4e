//! Set partitions of subsystem labels and coarse-graining along them.
//!
//! Subsystems are 0-based in code. The textual form (`"1|2|34"`) is 1-based
//! and limited to nine subsystems.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::SubsystemDims;
use crate::states::{DensityMatrix, PureState};

/// Largest `n` accepted by [`enumerate_partitions`].
pub const MAX_PARTITION_N: usize = 16;

/// A set partition of `{0, .., n-1}` in canonical form: every block ascending
/// and blocks ordered by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Canonicalizes `blocks`; rejects empty, overlapping or missing labels.
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::Domain("partition blocks must be nonempty".into()));
            }
            block.sort_unstable();
            for &k in block.iter() {
                if k >= n {
                    return Err(Error::Domain(format!("label {} outside 1..={n}", k + 1)));
                }
                if seen[k] {
                    return Err(Error::Domain(format!("label {} appears twice", k + 1)));
                }
                seen[k] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Domain(format!("label {} is not covered", missing + 1)));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Self { n, blocks })
    }

    /// Build from a restricted growth string (`rgs[i]` = block of label `i`).
    fn from_rgs(rgs: &[usize], m: usize) -> Self {
        let mut blocks = vec![Vec::new(); m];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        Self { n: rgs.len(), blocks }
    }

    /// The single-block partition `{0..n}`.
    pub fn whole(n: usize) -> Self {
        Self { n, blocks: vec![(0..n).collect()] }
    }

    /// The bipartition `cut | rest`.
    pub fn bipartition(n: usize, cut: &[usize]) -> Result<Self> {
        let rest: Vec<usize> = (0..n).filter(|k| !cut.contains(k)).collect();
        Self::new(n, vec![cut.to_vec(), rest])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks M.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Subsystem order that makes every block contiguous.
    pub fn subsystem_order(&self) -> Vec<usize> {
        self.blocks.iter().flatten().copied().collect()
    }

    /// Local dimensions of the coarse-grained factors.
    pub fn merged_dims(&self, dims: &SubsystemDims) -> Result<SubsystemDims> {
        self.check_dims(dims)?;
        SubsystemDims::with_limit(self.blocks.iter().map(|b| dims.subset_dim(b)).collect(), usize::MAX)
    }

    fn check_dims(&self, dims: &SubsystemDims) -> Result<()> {
        if dims.len() != self.n {
            return Err(Error::Domain(format!(
                "partition of {} labels applied to a {}-partite state",
                self.n,
                dims.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                if self.n <= 9 {
                    b.iter().map(|k| (k + 1).to_string()).collect::<String>()
                } else {
                    let labels: Vec<String> = b.iter().map(|k| (k + 1).to_string()).collect();
                    format!("{{{}}}", labels.join(","))
                }
            })
            .collect();
        f.write_str(&parts.join("|"))
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses the 1-based `"12|3|4"` form; `n` is the largest label.
    fn from_str(s: &str) -> Result<Self> {
        let perr = |msg: String| Error::Parse { line: 1, msg };
        let s = s.trim();
        if s.is_empty() {
            return Err(perr("empty partition string".into()));
        }
        let mut blocks = Vec::new();
        for part in s.split('|') {
            let mut block = Vec::new();
            for ch in part.chars() {
                match ch.to_digit(10) {
                    Some(d) if d >= 1 => block.push(d as usize - 1),
                    _ => return Err(perr(format!("unexpected character {ch:?} in {s:?}"))),
                }
            }
            if block.is_empty() {
                return Err(perr(format!("empty block in {s:?}")));
            }
            blocks.push(block);
        }
        let n = blocks.iter().flatten().max().map_or(0, |m| m + 1);
        Partition::new(n, blocks).map_err(|e| perr(format!("{s:?}: {e}")))
    }
}

/// Stirling number of the second kind, by the triangular recurrence.
pub fn stirling2(n: usize, m: usize) -> u128 {
    let mut row = vec![0u128; m + 1];
    row[0] = 1;
    for i in 1..=n {
        for k in (1..=m.min(i)).rev() {
            row[k] = k as u128 * row[k] + row[k - 1];
        }
        row[0] = 0;
    }
    row[m]
}

/// Every partition of `{0..n}` into exactly `m` blocks, in lexicographic
/// order of restricted growth strings.
pub fn enumerate_partitions(n: usize, m: usize) -> Result<Vec<Partition>> {
    if m == 0 || m > n {
        return Err(Error::Domain(format!("need 1 <= m <= n, got n = {n}, m = {m}")));
    }
    if n > MAX_PARTITION_N {
        return Err(Error::Domain(format!("n = {n} exceeds {MAX_PARTITION_N}")));
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    extend_rgs(&mut rgs, 1, 1, m, &mut out);
    Ok(out)
}

fn extend_rgs(rgs: &mut [usize], pos: usize, used: usize, m: usize, out: &mut Vec<Partition>) {
    let n = rgs.len();
    if pos == n {
        if used == m {
            out.push(Partition::from_rgs(rgs, m));
        }
        return;
    }
    // Not enough positions left to open the remaining blocks.
    if m - used > n - pos {
        return;
    }
    for b in 0..=used.min(m - 1) {
        rgs[pos] = b;
        let next_used = if b == used { used + 1 } else { used };
        extend_rgs(rgs, pos + 1, next_used, m, out);
    }
}

/// States that can be re-factored along a partition.
pub trait Multipartite: Sized {
    fn subsystem_dims(&self) -> &SubsystemDims;
    fn reorder(&self, order: &[usize]) -> Result<Self>;
    fn with_dims(self, dims: SubsystemDims) -> Result<Self>;
}

impl Multipartite for PureState {
    fn subsystem_dims(&self) -> &SubsystemDims {
        self.dims()
    }

    fn reorder(&self, order: &[usize]) -> Result<Self> {
        self.permute_subsystems(order)
    }

    fn with_dims(self, dims: SubsystemDims) -> Result<Self> {
        PureState::new(dims, self.amplitudes().to_vec())
    }
}

impl Multipartite for DensityMatrix {
    fn subsystem_dims(&self) -> &SubsystemDims {
        self.dims()
    }

    fn reorder(&self, order: &[usize]) -> Result<Self> {
        self.permute_subsystems(order)
    }

    fn with_dims(self, dims: SubsystemDims) -> Result<Self> {
        self.refactor(dims)
    }
}

/// Re-factor `state` so that each block of `p` is a single subsystem.
/// Non-contiguous blocks are made contiguous by permuting subsystems first.
pub fn coarse_grain<S: Multipartite>(state: &S, p: &Partition) -> Result<S> {
    let dims = p.merged_dims(state.subsystem_dims())?;
    let order = p.subsystem_order();
    state.reorder(&order)?.with_dims(dims)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rendered(n: usize, m: usize) -> Vec<String> {
        enumerate_partitions(n, m).unwrap().iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn four_into_three() {
        assert_eq!(
            rendered(4, 3),
            vec!["12|3|4", "13|2|4", "1|23|4", "14|2|3", "1|24|3", "1|2|34"]
        );
    }

    #[test]
    fn counts_for_five() {
        assert_eq!(enumerate_partitions(5, 3).unwrap().len(), 25);
        let five_four = rendered(5, 4);
        assert_eq!(five_four.len(), 10);
        assert!(five_four.contains(&"1|2|3|45".to_string()));
        assert!(five_four.contains(&"15|2|3|4".to_string()));
    }

    #[test]
    fn degenerate_sizes() {
        assert_eq!(rendered(3, 1), vec!["123"]);
        assert_eq!(rendered(3, 3), vec!["1|2|3"]);
        assert!(enumerate_partitions(3, 4).is_err());
        assert!(enumerate_partitions(3, 0).is_err());
    }

    #[test]
    fn stirling_values() {
        assert_eq!(stirling2(4, 3), 6);
        assert_eq!(stirling2(5, 3), 25);
        assert_eq!(stirling2(5, 4), 10);
        assert_eq!(stirling2(4, 2), 7);
        assert_eq!(stirling2(0, 0), 1);
        assert_eq!(stirling2(3, 0), 0);
    }

    #[test]
    fn parse_and_render() {
        let p: Partition = "14|2|3".parse().unwrap();
        assert_eq!(p.blocks(), &[vec![0, 3], vec![1], vec![2]]);
        assert_eq!(p.to_string(), "14|2|3");

        let q: Partition = "3|21|4".parse().unwrap();
        assert_eq!(q.to_string(), "12|3|4");

        let r = Partition::new(4, vec![vec![0], vec![1], vec![2, 3]]).unwrap();
        assert_eq!(r.to_string(), "1|2|34");

        assert!("1|1|2".parse::<Partition>().is_err());
        assert!("1||2".parse::<Partition>().is_err());
        assert!("1|3".parse::<Partition>().is_err());
        assert!("1|a".parse::<Partition>().is_err());
    }

    #[test]
    fn long_labels_render_with_braces() {
        let p = Partition::new(10, vec![(0..5).collect(), (5..10).collect()]).unwrap();
        assert_eq!(p.to_string(), "{1,2,3,4,5}|{6,7,8,9,10}");
    }
}
