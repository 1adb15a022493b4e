//! Concurrence of pure multipartite states.
//!
//! For an N-partite pure state
//!
//! ```text
//! C_N(psi) = 2^(1 - N/2) * sqrt( (2^N - 2) - sum_alpha Tr(rho_alpha^2) )
//! ```
//!
//! where `alpha` runs over every nonempty proper subset of subsystems. The
//! M-partition concurrence is the same functional applied after merging each
//! block of a partition into one subsystem, and the bipartite-cut concurrence
//! is `sqrt(2 (1 - Tr rho_cut^2))`.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, SubsystemDims};
use crate::partitions::{coarse_grain, enumerate_partitions, Partition};
use crate::states::{purity_from_offsets, DensityMatrix, PureState};

/// Negative radicands smaller than this in magnitude are rounding noise.
pub const RADICAND_CLAMP: f64 = 1e-12;

/// Square root that tolerates rounding-level negative arguments.
pub(crate) fn sqrt_clamped(x: f64) -> Result<f64> {
    if x < -RADICAND_CLAMP {
        return Err(Error::Numerical(format!("negative radicand {x:e}")));
    }
    Ok(x.max(0.0).sqrt())
}

/// Which functional produced a [`ConcurrenceValue`].
#[derive(Debug, Clone, PartialEq)]
pub enum Functional {
    /// Full N-partite concurrence over all subsystems.
    Full,
    /// Concurrence of the coarse-grained state along a partition.
    Partition(Partition),
    /// Bipartite concurrence across `cut | complement` (0-based labels).
    BipartiteCut(Vec<usize>),
    /// Two-qubit mixed-state value from the spin-flip formula.
    Wootters,
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Functional::Full => f.write_str("full"),
            Functional::Partition(p) => write!(f, "partition({p})"),
            Functional::BipartiteCut(c) => {
                let labels: Vec<String> = c.iter().map(|k| (k + 1).to_string()).collect();
                write!(f, "cut({{{}}})", labels.join(","))
            }
            Functional::Wootters => f.write_str("wootters"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceValue {
    pub value: f64,
    pub squared: f64,
    pub functional: Functional,
}

impl ConcurrenceValue {
    fn from_squared(squared: f64, functional: Functional) -> Result<Self> {
        let value = sqrt_clamped(squared)?;
        Ok(Self { value, squared: value * value, functional })
    }

    /// True for the single-block partition, whose concurrence is zero by
    /// definition.
    pub fn is_degenerate(&self) -> bool {
        matches!(&self.functional, Functional::Partition(p) if p.len() == 1)
    }
}

/// Precomputed index tables for evaluating `C_N` on many states over the same
/// dimensions.
#[derive(Debug, Clone)]
pub struct ConcurrencePlan {
    n: usize,
    total: usize,
    // (smaller side offsets, larger side offsets), one entry per nonempty
    // proper subset, in bitmask order.
    subsets: Vec<(Vec<usize>, Vec<usize>)>,
}

impl ConcurrencePlan {
    pub fn new(dims: &SubsystemDims) -> Self {
        let n = dims.len();
        let mut subsets = Vec::new();
        if n >= 2 {
            for mask in 1..(1usize << n) - 1 {
                let inside: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
                let outside: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 0).collect();
                let (small, large) = if dims.subset_dim(&inside) <= dims.subset_dim(&outside) {
                    (inside, outside)
                } else {
                    (outside, inside)
                };
                subsets.push((
                    linalg::subset_offsets(dims, &small),
                    linalg::subset_offsets(dims, &large),
                ));
            }
        }
        Self { n, total: dims.total(), subsets }
    }

    /// Number of subsystems.
    pub fn parties(&self) -> usize {
        self.n
    }

    /// `sum_alpha Tr(rho_alpha^2)` over all nonempty proper subsets.
    pub fn purity_sum(&self, amps: &[C64]) -> f64 {
        debug_assert_eq!(amps.len(), self.total);
        self.subsets
            .iter()
            .map(|(small, large)| purity_from_offsets(amps, small, large))
            .sum()
    }

    /// `C_N^2` of a normalized vector.
    pub fn squared(&self, amps: &[C64]) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let count = ((1u64 << self.n) - 2) as f64;
        let scale = 2f64.powf(2.0 - self.n as f64);
        (scale * (count - self.purity_sum(amps))).max(0.0)
    }

    /// `C_N` of a normalized vector, clamping rounding noise.
    pub fn value(&self, amps: &[C64]) -> f64 {
        self.squared(amps).sqrt()
    }

    /// Largest possible `C_N` for these dimensions' subsystem count with the
    /// purity lower bound 0 (a loose cap used for sanity checks).
    pub fn loose_maximum(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        2f64.powf(1.0 - self.n as f64 / 2.0) * (((1u64 << self.n) - 2) as f64).sqrt()
    }
}

/// `C_N` of a pure state via the sum over all reduced density matrices.
pub fn pure_concurrence_full(psi: &PureState) -> Result<ConcurrenceValue> {
    let n = psi.dims().len();
    if n < 2 {
        return Err(Error::Domain("concurrence needs at least two subsystems".into()));
    }
    let plan = ConcurrencePlan::new(psi.dims());
    let count = ((1u64 << n) - 2) as f64;
    let radicand = count - plan.purity_sum(psi.amplitudes());
    let squared = 2f64.powf(2.0 - n as f64) * radicand;
    if squared < -RADICAND_CLAMP {
        return Err(Error::Numerical(format!("negative C_N^2 = {squared:e}")));
    }
    ConcurrenceValue::from_squared(squared, Functional::Full)
}

/// One subset from each complementary pair: the smaller side, or the side
/// containing subsystem 0 on a tie.
pub fn representative_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..=n / 2 {
        for mask in 1usize..(1 << n) - 1 {
            if mask.count_ones() as usize != size {
                continue;
            }
            if 2 * size == n && mask & 1 == 0 {
                continue;
            }
            out.push((0..n).filter(|k| mask >> k & 1 == 1).collect());
        }
    }
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// `C_N^2` from linear entropies of one representative per complementary
/// pair: `C_N^2 = 2^(3-N) sum_rep (1 - Tr rho_rep^2)`. For four parties this
/// is `(1/2)(sum_i (1 - Tr rho_i^2) + sum_{i>1} (1 - Tr rho_{1i}^2))`.
pub fn pure_concurrence_sq_halved(psi: &PureState) -> Result<f64> {
    let n = psi.dims().len();
    if n < 2 {
        return Err(Error::Domain("concurrence needs at least two subsystems".into()));
    }
    let mut acc = 0.0;
    for s in representative_subsets(n) {
        acc += 1.0 - psi.reduced_purity(&s)?;
    }
    Ok(2f64.powf(3.0 - n as f64) * acc)
}

/// Concurrence of the state coarse-grained along `p`.
///
/// A single-block partition yields zero. For three blocks the result is
/// cross-checked against `C_3^2 = 3 - (Tr rho_A^2 + Tr rho_B^2 + Tr rho_C^2)`.
pub fn pure_concurrence_partition(psi: &PureState, p: &Partition) -> Result<ConcurrenceValue> {
    if p.n() != psi.dims().len() {
        return Err(Error::Domain(format!(
            "partition of {} labels for a {}-partite state",
            p.n(),
            psi.dims().len()
        )));
    }
    let functional = Functional::Partition(p.clone());
    if p.len() == 1 {
        return Ok(ConcurrenceValue { value: 0.0, squared: 0.0, functional });
    }
    let coarse = coarse_grain(psi, p)?;
    let full = pure_concurrence_full(&coarse)?;
    if p.len() == 3 {
        let sum: f64 = p
            .blocks()
            .iter()
            .map(|b| psi.reduced_purity(b))
            .sum::<Result<f64>>()?;
        let direct = 3.0 - sum;
        if (direct - full.squared).abs() > 1e-10 {
            return Err(Error::Numerical(format!(
                "tripartite identity mismatch for {p}: {} vs {direct}",
                full.squared
            )));
        }
    }
    Ok(ConcurrenceValue { functional, ..full })
}

/// `sqrt(2 (1 - Tr rho_cut^2))`.
pub fn pure_bipartite_concurrence(psi: &PureState, cut: &[usize]) -> Result<ConcurrenceValue> {
    let n = psi.dims().len();
    psi.dims().check_subset(cut)?;
    if cut.is_empty() || cut.len() == n {
        return Err(Error::Domain("cut must be a nonempty proper subset".into()));
    }
    let mut cut = cut.to_vec();
    cut.sort_unstable();
    let p = psi.reduced_purity(&cut)?;
    ConcurrenceValue::from_squared(2.0 * (1.0 - p), Functional::BipartiteCut(cut))
}

/// Mean of squared partition concurrences over all partitions into `m` blocks.
pub fn avg_partition_concurrence_sq(psi: &PureState, m: usize) -> Result<f64> {
    let n = psi.dims().len();
    if m < 2 || m > n {
        return Err(Error::Domain(format!("need 2 <= m <= N = {n}, got m = {m}")));
    }
    let parts = enumerate_partitions(n, m)?;
    let mut acc = 0.0;
    for p in &parts {
        acc += pure_concurrence_partition(psi, p)?.squared;
    }
    Ok(acc / parts.len() as f64)
}

/// Two-qubit concurrence `max(0, l1 - l2 - l3 - l4)` with `l_i` the
/// descending square roots of the eigenvalues of `rho (sy x sy) rho* (sy x sy)`.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<ConcurrenceValue> {
    if rho.dims().as_slice() != [2, 2] {
        return Err(Error::Domain(format!(
            "spin-flip formula needs dims (2,2), got {}",
            rho.dims()
        )));
    }
    // sy x sy is the real anti-diagonal matrix (0,0,0,-1; 0,0,1,0; 0,1,0,0; -1,0,0,0).
    let yy = ComplexMatrix::from_real(
        4,
        4,
        &[
            0.0, 0.0, 0.0, -1.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0,
        ],
    )?;
    // With rho = W W^dagger (columns sqrt(p_k) v_k), the l_i are the singular
    // values of the complex-symmetric matrix W^T (sy x sy) W.
    let (vals, vecs) = linalg::hermitian_eigen(rho.matrix())?;
    let cutoff = 1e-14 * vals[0].max(0.0);
    let kept: Vec<usize> = (0..4).filter(|&k| vals[k] > cutoff).collect();
    let w = ComplexMatrix::from_fn(4, kept.len(), |i, j| vecs.get(i, kept[j]) * vals[kept[j]].sqrt());
    let tau = &(&w.transpose() * &yy) * &w;
    let svd = tau
        .as_nalgebra()
        .clone()
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("SVD of the spin-flip overlap did not converge".into()))?;
    let mut lambdas: Vec<f64> = svd.singular_values.iter().copied().collect();
    lambdas.resize(4, 0.0);
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let value = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0);
    Ok(ConcurrenceValue { value, squared: value * value, functional: Functional::Wootters })
}

pub(crate) fn weighted_column(plan: &ConcurrencePlan, col: &[C64]) -> f64 {
    let p: f64 = col.iter().map(|z| z.norm_sqr()).sum();
    if p <= 1e-300 {
        return 0.0;
    }
    // C_N is homogeneous: sum_alpha Tr(rho_alpha^2) scales as p^2 for an
    // unnormalized vector of squared norm p.
    let count = ((1u64 << plan.parties()) - 2) as f64;
    let scale = 2f64.powf(2.0 - plan.parties() as f64);
    let sq = scale * (count - plan.purity_sum(col) / (p * p));
    p * sq.max(0.0).sqrt()
}
