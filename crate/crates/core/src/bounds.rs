//! Lower bounds on the concurrence of mixed multipartite states.
//!
//! Every bound is built from one bipartite ingredient: for a cut `S | S'` of
//! a mixed state, the positive-partial-transpose and realignment criteria give
//!
//! ```text
//! C_2(rho) >= sqrt(2 / (m (m - 1))) * (max(||rho^{T_S}||_1, ||R(rho)||_1) - 1),
//! m = min(d_S, d_S')
//! ```
//!
//! (clamped at zero). For pure inputs the exact cut concurrence replaces it.
//! On top of that sit the prior-art cut bounds ([`wang_lower`],
//! [`zhu_fei_lower`]) and the partition-averaged bounds
//! ([`thm1_lower_sq`], [`thm_general_lower_sq`], [`thm4_combined`]).
//!
//! Reports carry a [`Quantity`] tag: cut-based bounds are on `C`, the
//! partition-averaged bounds are on `C^2`. [`BoundReport::parties`] names the
//! party count whose normalization the value uses, so `parties == N` means the
//! value bounds the full `C_N` of the input.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::concurrence::{avg_partition_concurrence_sq, pure_bipartite_concurrence};
use crate::error::{Error, Result};
use crate::linalg::{self, Side};
use crate::partitions::{coarse_grain, enumerate_partitions, Partition};
use crate::states::{DensityMatrix, PureState};

/// Purity above `1 - PURE_TOL` routes an input through the exact pure-state
/// formulas.
pub const PURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundMethod {
    Caf,
    Wang,
    ZhuFei,
    Thm1,
    Thm2,
    Thm3,
    /// Partition average for `(N, m)` outside the three named cases.
    ThmGeneral,
    Thm4,
    ReferenceCurve,
}

impl BoundMethod {
    pub const ALL: [BoundMethod; 9] = [
        BoundMethod::Caf,
        BoundMethod::Wang,
        BoundMethod::ZhuFei,
        BoundMethod::Thm1,
        BoundMethod::Thm2,
        BoundMethod::Thm3,
        BoundMethod::ThmGeneral,
        BoundMethod::Thm4,
        BoundMethod::ReferenceCurve,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundMethod::Caf => "caf",
            BoundMethod::Wang => "wang",
            BoundMethod::ZhuFei => "zhu-fei",
            BoundMethod::Thm1 => "thm1",
            BoundMethod::Thm2 => "thm2",
            BoundMethod::Thm3 => "thm3",
            BoundMethod::ThmGeneral => "thm-general",
            BoundMethod::Thm4 => "thm4",
            BoundMethod::ReferenceCurve => "reference-curve",
        }
    }

    /// The quantity this method reports.
    pub fn quantity(self) -> Quantity {
        match self {
            BoundMethod::Caf | BoundMethod::Wang | BoundMethod::ZhuFei => Quantity::C,
            _ => Quantity::CSquared,
        }
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown bound method {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    C,
    CSquared,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::C => "C",
            Quantity::CSquared => "C-squared",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Cut(Vec<usize>),
    Partition(Partition),
    Partitions(Vec<Partition>),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Cut(c) => f.write_str(&render_cut(c)),
            Witness::Partition(p) => write!(f, "{p}"),
            Witness::Partitions(ps) => {
                let s: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                f.write_str(&s.join(" "))
            }
        }
    }
}

fn render_cut(c: &[usize]) -> String {
    let labels: Vec<String> = c.iter().map(|k| (k + 1).to_string()).collect();
    format!("{{{}}}", labels.join(","))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub method: BoundMethod,
    pub quantity: Quantity,
    pub value: f64,
    /// Party count of the concurrence normalization the value refers to.
    pub parties: usize,
    pub witness: Option<Witness>,
    pub params: BTreeMap<String, String>,
}

impl BoundReport {
    fn new(method: BoundMethod, value: f64, parties: usize) -> Self {
        Self {
            method,
            quantity: method.quantity(),
            value: value.max(0.0),
            parties,
            witness: None,
            params: BTreeMap::new(),
        }
    }

    fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// The bound expressed on `C`.
    pub fn as_concurrence(&self) -> f64 {
        match self.quantity {
            Quantity::C => self.value,
            Quantity::CSquared => self.value.sqrt(),
        }
    }

    /// The bound expressed on `C^2`.
    pub fn as_squared(&self) -> f64 {
        match self.quantity {
            Quantity::C => self.value * self.value,
            Quantity::CSquared => self.value,
        }
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{} over {} parties] = {:.17}",
            self.method, self.quantity, self.parties, self.value
        )?;
        if let Some(w) = &self.witness {
            write!(f, "\n  witness: {w}")?;
        }
        for (k, v) in &self.params {
            write!(f, "\n  {k}: {v}")?;
        }
        Ok(())
    }
}

/// Which criterion attained the maximum in [`caf_bipartite_lower`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    PartialTranspose,
    Realignment,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::PartialTranspose => "ppt",
            Criterion::Realignment => "realignment",
        })
    }
}

fn check_cut(n: usize, cut: &[usize]) -> Result<Vec<usize>> {
    let mut c = cut.to_vec();
    c.sort_unstable();
    c.dedup();
    if c.len() != cut.len() || c.iter().any(|&k| k >= n) {
        return Err(Error::Domain(format!("invalid cut {cut:?} for {n} subsystems")));
    }
    if c.is_empty() || c.len() == n {
        return Err(Error::Domain("cut must be a nonempty proper subset".into()));
    }
    Ok(c)
}

/// The two criterion norms and the resulting lower bound across one cut.
const NORM_SLACK: f64 = 1e-12;

fn caf_terms(rho: &DensityMatrix, cut: &[usize]) -> Result<(f64, f64, f64, usize)> {
    let n = rho.dims().len();
    let p = Partition::bipartition(n, cut)?;
    let bi = coarse_grain(rho, &p)?;
    let dims = bi.dims().clone();
    let m = dims.as_slice()[0].min(dims.as_slice()[1]);
    let pt = linalg::trace_norm(&linalg::partial_transpose(bi.matrix(), &dims, Side::Second)?)?;
    let re = linalg::trace_norm(&linalg::realign(bi.matrix(), &dims)?)?;
    let factor = (2.0 / (m * (m - 1)) as f64).sqrt();
    // Trace norms of separable states land at 1 + O(eps); treat that as 1.
    let excess = pt.max(re) - 1.0;
    let bound = if excess <= NORM_SLACK { 0.0 } else { factor * excess };
    Ok((pt, re, bound, m))
}

/// Lower bound on the bipartite concurrence across `cut | complement` from
/// the partial-transpose and realignment trace norms.
pub fn caf_bipartite_lower(rho: &DensityMatrix, cut: &[usize]) -> Result<BoundReport> {
    let cut = check_cut(rho.dims().len(), cut)?;
    let (pt, re, bound, m) = caf_terms(rho, &cut)?;
    let criterion = if pt >= re { Criterion::PartialTranspose } else { Criterion::Realignment };
    Ok(BoundReport::new(BoundMethod::Caf, bound, 2)
        .with_witness(Witness::Cut(cut))
        .param("criterion", criterion)
        .param("ppt-norm", format!("{pt:.17}"))
        .param("realignment-norm", format!("{re:.17}"))
        .param("m", m))
}

/// Bipartite-cut concurrence lower bound: exact for pure inputs, criterion
/// based otherwise.
fn cut_lower(rho: &DensityMatrix, pure: Option<&PureState>, cut: &[usize]) -> Result<f64> {
    match pure {
        Some(psi) => Ok(pure_bipartite_concurrence(psi, cut)?.value),
        None => Ok(caf_terms(rho, cut)?.2),
    }
}

/// Cuts `S | S'` with subsystem 0 in `S`: one per unordered bipartition.
fn cuts_containing_first(n: usize) -> Vec<Vec<usize>> {
    let full = (1usize << (n - 1)) - 1;
    (0..full)
        .map(|mask| {
            let mut s = vec![0];
            s.extend((1..n).filter(|k| mask >> (k - 1) & 1 == 1));
            s
        })
        .collect()
}

/// All proper cuts containing subsystem 0, ordered by size then labels.
fn all_cuts(n: usize) -> Vec<Vec<usize>> {
    let mut cuts = cuts_containing_first(n);
    cuts.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    cuts
}

fn pure_view(rho: &DensityMatrix) -> Option<PureState> {
    rho.as_pure(PURE_TOL)
}

/// Cut-size coefficient `2^((1-N)/2) sqrt(2^(N-M) + 2^M - 2)`.
pub fn zhu_fei_coefficient(n: usize, m: usize) -> f64 {
    2f64.powf((1.0 - n as f64) / 2.0) * (2f64.powi((n - m) as i32) + 2f64.powi(m as i32) - 2.0).sqrt()
}

fn require_parties(rho: &DensityMatrix, min: usize, what: &str) -> Result<usize> {
    let n = rho.dims().len();
    if n < min {
        return Err(Error::Domain(format!("{what} needs N >= {min}, got N = {n}")));
    }
    Ok(n)
}

/// `C_N >= 2^((3-N)/2) max_cut C_2(cut)`.
pub fn wang_lower(rho: &DensityMatrix) -> Result<BoundReport> {
    let n = require_parties(rho, 3, "wang bound")?;
    let pure = pure_view(rho);
    let coef = 2f64.powf((3.0 - n as f64) / 2.0);
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for cut in all_cuts(n) {
        let v = coef * cut_lower(rho, pure.as_ref(), &cut)?;
        if v > best.0 {
            best = (v, cut);
        }
    }
    Ok(BoundReport::new(BoundMethod::Wang, best.0, n)
        .with_witness(Witness::Cut(best.1))
        .param("route", route(&pure))
        .param("coefficient", format!("{coef:.17}")))
}

fn route(pure: &Option<PureState>) -> &'static str {
    if pure.is_some() {
        "exact-pure"
    } else {
        "ppt-realignment"
    }
}

/// `C_N >= max_M max_{|cut| = M} 2^((1-N)/2) sqrt(2^(N-M) + 2^M - 2) C_2(cut)`.
pub fn zhu_fei_lower(rho: &DensityMatrix) -> Result<BoundReport> {
    let n = require_parties(rho, 3, "zhu-fei bound")?;
    let pure = pure_view(rho);
    debug_assert!(n != 4 || {
        let c = [1, 2, 3].map(|m| zhu_fei_coefficient(4, m));
        (c[0] - 1.0).abs() < 1e-15 && (c[1] - 3f64.sqrt() / 2.0).abs() < 1e-15 && (c[2] - 1.0).abs() < 1e-15
    });
    let mut best = (f64::NEG_INFINITY, Vec::new(), 0);
    for cut in all_cuts(n) {
        let m = cut.len();
        let v = zhu_fei_coefficient(n, m) * cut_lower(rho, pure.as_ref(), &cut)?;
        if v > best.0 {
            best = (v, cut, m);
        }
    }
    Ok(BoundReport::new(BoundMethod::ZhuFei, best.0, n)
        .with_witness(Witness::Cut(best.1))
        .param("route", route(&pure))
        .param("M", best.2))
}

/// Three-party lower bound: the largest cut bound over the three
/// one-versus-rest cuts (all coefficients equal one at N = 3).
pub fn tripartite_lower(rho: &DensityMatrix) -> Result<BoundReport> {
    let n = rho.dims().len();
    if n != 3 {
        return Err(Error::Domain(format!("tripartite bound needs 3 factors, got {n}")));
    }
    Ok(zhu_fei_lower(rho)?.param("specialization", "N=3"))
}

fn partition_method(n: usize, m: usize) -> BoundMethod {
    match (n, m) {
        (4, 3) => BoundMethod::Thm1,
        (5, 3) => BoundMethod::Thm2,
        (5, 4) => BoundMethod::Thm3,
        _ => BoundMethod::ThmGeneral,
    }
}

fn recursion_path(m: usize) -> String {
    let mut steps: Vec<String> = (3..=m).rev().map(|k| format!("avg C{k}^2")).collect();
    steps.push("max-cut C2".into());
    steps.join(" <- ")
}

/// Four-party bound on `C_4^2`: the mean over the six tripartitions of the
/// squared tripartite lower bound.
pub fn thm1_lower_sq(rho: &DensityMatrix) -> Result<BoundReport> {
    let n = rho.dims().len();
    if n != 4 {
        return Err(Error::Domain(format!("thm1 needs 4 factors, got {n}")));
    }
    thm_general_lower_sq(rho, 3)
}

/// `C_N^2 >= (1/S(N,m)) sum_{partitions p into m blocks} C_m^2(rho_p)`, with
/// each term replaced by its own lower bound: the tripartite cut bound when
/// `m = 3`, or this same average one level down when `m > 3`.
pub fn thm_general_lower_sq(rho: &DensityMatrix, m: usize) -> Result<BoundReport> {
    let n = rho.dims().len();
    if m < 3 || m >= n {
        return Err(Error::Domain(format!("need 3 <= m < N = {n}, got m = {m}")));
    }
    let method = partition_method(n, m);
    let parts = enumerate_partitions(n, m)?;
    if let Some(psi) = pure_view(rho) {
        let v = avg_partition_concurrence_sq(&psi, m)?;
        return Ok(BoundReport::new(method, v, n)
            .with_witness(Witness::Partitions(parts))
            .param("route", "exact-pure")
            .param("m", m));
    }
    let mut acc = 0.0;
    let mut best = (f64::NEG_INFINITY, None);
    for p in &parts {
        let coarse = coarse_grain(rho, p)?;
        let term = if m == 3 {
            tripartite_lower(&coarse)?.as_squared()
        } else {
            thm_general_lower_sq(&coarse, m - 1)?.value
        };
        if term > best.0 {
            best = (term, Some(p.clone()));
        }
        acc += term;
    }
    let mut report = BoundReport::new(method, acc / parts.len() as f64, n)
        .with_witness(Witness::Partitions(parts))
        .param("route", "ppt-realignment")
        .param("m", m)
        .param("recursion", recursion_path(m));
    if let (v, Some(p)) = best {
        report = report.param("largest-term", format!("{p} = {v:.17}"));
    }
    Ok(report)
}

/// Mean over all bipartitions of `(coefficient(M) * C_2 lower bound)^2`, with
/// the cut-size coefficient of [`zhu_fei_coefficient`].
pub fn bipartition_average_sq(rho: &DensityMatrix) -> Result<f64> {
    let n = require_parties(rho, 2, "bipartition average")?;
    let pure = pure_view(rho);
    let parts = enumerate_partitions(n, 2)?;
    let mut acc = 0.0;
    for p in &parts {
        let cut = &p.blocks()[0];
        let v = zhu_fei_coefficient(n, cut.len()) * cut_lower(rho, pure.as_ref(), cut)?;
        acc += v * v;
    }
    Ok(acc / parts.len() as f64)
}

/// Weighted combination `sum_i s_i Ctilde_{N-i}^2` for `i = 1..N-2`.
///
/// The maximum written around each averaged term is taken as the identity.
/// The `m = 2` term is [`bipartition_average_sq`].
pub fn thm4_combined(rho: &DensityMatrix, weights: &[f64]) -> Result<BoundReport> {
    let n = require_parties(rho, 3, "thm4")?;
    if weights.len() != n - 2 {
        return Err(Error::Domain(format!(
            "thm4 needs {} weights for N = {n}, got {}",
            n - 2,
            weights.len()
        )));
    }
    if weights.iter().any(|w| w.is_nan() || *w < -1e-10) {
        return Err(Error::Domain(format!("weights must be nonnegative: {weights:?}")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("weights sum to {sum}, expected 1")));
    }
    let mut total = 0.0;
    let mut components = Vec::new();
    for (i, &w) in weights.iter().enumerate() {
        let m = n - 1 - i;
        if w <= 0.0 {
            components.push(format!("m={m}: skipped"));
            continue;
        }
        let term = if m == 2 {
            bipartition_average_sq(rho)?
        } else {
            thm_general_lower_sq(rho, m)?.value
        };
        components.push(format!("m={m}: {term:.17}"));
        total += w * term;
    }
    let ws: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
    Ok(BoundReport::new(BoundMethod::Thm4, total, n)
        .param("weights", ws.join(","))
        .param("components", components.join("; "))
        .param("max-interpretation", "identity")
        .param("m2-term", "mean over bipartitions of squared coefficient-scaled cut bounds"))
}

/// Piecewise reference values for the mixed four-qubit example, on `C^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceCurves {
    /// Partitions of type `12|3|4` and `1|2|34`.
    pub a: f64,
    /// Partitions of type `1|3|24`, `1|4|23`, `13|2|4`, `14|2|3`.
    pub b: f64,
    /// The six-partition average.
    pub combined: f64,
}

/// Reference curves at mixing weight `t`. Breakpoints at `t = 1/9` and
/// `t = 1/5`.
pub fn reference_curves(t: f64) -> Result<ReferenceCurves> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, 1]")));
    }
    let t2 = t * t;
    let (a, b, combined) = if t <= 1.0 / 9.0 {
        (0.0, 0.0, 0.0)
    } else if t <= 0.2 {
        let a = (81.0 * t2 - 18.0 * t + 1.0) / 192.0;
        (a, 0.0, (81.0 * t2 - 18.0 * t + 1.0) / 576.0)
    } else {
        (
            (181.0 * t2 - 58.0 * t + 5.0) / 192.0,
            (175.0 * t2 - 70.0 * t + 7.0) / 192.0,
            (531.0 * t2 - 198.0 * t + 19.0) / 576.0,
        )
    };
    Ok(ReferenceCurves { a, b, combined })
}

/// [`reference_curves`] as a report on `C_4^2`.
pub fn reference_curve_report(t: f64) -> Result<BoundReport> {
    let r = reference_curves(t)?;
    Ok(BoundReport::new(BoundMethod::ReferenceCurve, r.combined, 4)
        .param("t", t)
        .param("a", format!("{:.17}", r.a))
        .param("b", format!("{:.17}", r.b)))
}
