//! Dense complex linear algebra with multipartite index bookkeeping.
//!
//! Subsystem 0 is the most significant tensor factor: the flat index of the
//! multi-index `(i_0, ..., i_{N-1})` is `sum_k i_k * prod_{j>k} d_j`. Every
//! partial trace, permutation, partial transpose and realignment below uses
//! that layout.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default cap on the total Hilbert-space dimension.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Absolute max-entry tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Eigenvalues above this (negative) threshold are clamped to zero.
pub const PSD_CLAMP: f64 = -1e-10;

/// A dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{}) {:?}", self.rows(), self.cols(), self.0)
    }
}

impl ComplexMatrix {
    /// Build from entries listed row by row.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, entries)))
    }

    /// Real-valued convenience constructor, row-major.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_row_major(rows, cols, &c)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) })
    }

    /// Outer product `|v><v|`.
    pub fn projector(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.0[(i, j)] = z;
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch in max_abs_diff");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M - M^dagger|`, or infinity for non-square input.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                r = r.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        r
    }

    /// Check Hermiticity within [`HERMITIAN_TOL`] and return `(M + M^dagger)/2`.
    pub fn symmetrized(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "expected a square matrix, got {}x{}",
                self.rows(),
                self.cols()
            )));
        }
        let residual = self.hermiticity_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0)))
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Ordered local dimensions of a multipartite system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemDims(Vec<usize>);

impl SubsystemDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_limit(dims, DEFAULT_MAX_DIM)
    }

    /// Like [`SubsystemDims::new`] with an explicit cap on the total dimension.
    pub fn with_limit(dims: Vec<usize>, max_dim: usize) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Domain("at least one subsystem is required".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Domain(format!("local dimension {d} < 2")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total.saturating_mul(d);
            if total > max_dim {
                return Err(Error::SizeLimit { dim: total, max: max_dim });
            }
        }
        Ok(Self(dims))
    }

    /// `n` qubits.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Number of subsystems N.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total dimension D = prod d_i.
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Product of the local dimensions of `subset`.
    pub fn subset_dim(&self, subset: &[usize]) -> usize {
        subset.iter().map(|&k| self.0[k]).product()
    }

    /// Row-major strides: `stride[k] = prod_{j>k} d_j`.
    pub fn strides(&self) -> Vec<usize> {
        let n = self.0.len();
        let mut s = vec![1; n];
        for k in (0..n.saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.0[k + 1];
        }
        s
    }

    pub(crate) fn check_subset(&self, subset: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.len()];
        for &k in subset {
            if k >= self.len() {
                return Err(Error::Domain(format!(
                    "subsystem index {k} out of range for {} subsystems",
                    self.len()
                )));
            }
            if seen[k] {
                return Err(Error::Domain(format!("subsystem index {k} repeated")));
            }
            seen[k] = true;
        }
        Ok(())
    }
}

impl fmt::Display for SubsystemDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Flat offsets of every multi-index over `subset` (in ascending subsystem
/// order, first listed index most significant) within the full space.
pub(crate) fn subset_offsets(dims: &SubsystemDims, subset: &[usize]) -> Vec<usize> {
    let strides = dims.strides();
    let mut offsets = vec![0usize];
    for &k in subset {
        let d = dims.as_slice()[k];
        let mut next = Vec::with_capacity(offsets.len() * d);
        for &o in &offsets {
            for v in 0..d {
                next.push(o + v * strides[k]);
            }
        }
        offsets = next;
    }
    offsets
}

/// Complement of `subset` within `0..n`, ascending.
pub fn complement(n: usize, subset: &[usize]) -> Vec<usize> {
    (0..n).filter(|k| !subset.contains(k)).collect()
}

/// Kronecker product with the default size limit.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with_limit(a, b, DEFAULT_MAX_DIM)
}

pub fn kron_with_limit(a: &ComplexMatrix, b: &ComplexMatrix, max_dim: usize) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    match (rows, cols) {
        (Some(r), Some(c)) if r <= max_dim && c <= max_dim => {
            Ok(ComplexMatrix(a.0.kronecker(&b.0)))
        }
        (r, c) => Err(Error::SizeLimit {
            dim: r.unwrap_or(usize::MAX).max(c.unwrap_or(usize::MAX)),
            max: max_dim,
        }),
    }
}

fn check_state_shape(rho: &ComplexMatrix, dims: &SubsystemDims) -> Result<()> {
    let d = dims.total();
    if rho.rows() != d || rho.cols() != d {
        return Err(Error::Shape(format!(
            "matrix is {}x{} but dims {dims} require {d}x{d}",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(())
}

/// Reduced matrix on the subsystems in `keep`, ordered by ascending index.
pub fn partial_trace(rho: &ComplexMatrix, dims: &SubsystemDims, keep: &[usize]) -> Result<ComplexMatrix> {
    check_state_shape(rho, dims)?;
    if keep.is_empty() {
        return Err(Error::Domain(
            "keep set is empty; use ComplexMatrix::trace for the scalar trace".into(),
        ));
    }
    dims.check_subset(keep)?;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    let traced = complement(dims.len(), &keep);
    let kept_off = subset_offsets(dims, &keep);
    let traced_off = subset_offsets(dims, &traced);
    let dk = kept_off.len();
    let mut out = DMatrix::<C64>::zeros(dk, dk);
    for (a, &oa) in kept_off.iter().enumerate() {
        for (b, &ob) in kept_off.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &traced_off {
                acc += rho.0[(oa + t, ob + t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(ComplexMatrix(out))
}

/// For each flat index of the permuted space, the flat index in the original
/// space. New factor `k` is old factor `order[k]`.
pub fn permutation_index_map(dims: &SubsystemDims, order: &[usize]) -> Result<Vec<usize>> {
    if order.len() != dims.len() {
        return Err(Error::Domain(format!(
            "permutation of length {} for {} subsystems",
            order.len(),
            dims.len()
        )));
    }
    dims.check_subset(order)?;
    Ok(subset_offsets(dims, order))
}

/// Local dimensions after reordering factors by `order`.
pub fn permuted_dims(dims: &SubsystemDims, order: &[usize]) -> Result<SubsystemDims> {
    dims.check_subset(order)?;
    SubsystemDims::with_limit(order.iter().map(|&k| dims.as_slice()[k]).collect(), usize::MAX)
}

/// Reorder the tensor factors of a state vector.
pub fn permute_vector(v: &[C64], dims: &SubsystemDims, order: &[usize]) -> Result<Vec<C64>> {
    if v.len() != dims.total() {
        return Err(Error::Shape(format!("vector of length {} for dims {dims}", v.len())));
    }
    let map = permutation_index_map(dims, order)?;
    Ok(map.iter().map(|&i| v[i]).collect())
}

/// Reorder the tensor factors of an operator.
pub fn permute_matrix(m: &ComplexMatrix, dims: &SubsystemDims, order: &[usize]) -> Result<ComplexMatrix> {
    check_state_shape(m, dims)?;
    let map = permutation_index_map(dims, order)?;
    let d = map.len();
    Ok(ComplexMatrix::from_fn(d, d, |i, j| m.0[(map[i], map[j])]))
}

/// Which factor of a bipartite space an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

fn bipartite_factors(dims: &SubsystemDims) -> Result<(usize, usize)> {
    match dims.as_slice() {
        &[a, b] => Ok((a, b)),
        other => Err(Error::Domain(format!(
            "expected exactly two factors, got {}",
            other.len()
        ))),
    }
}

/// Partial transpose on one factor of a bipartite operator.
pub fn partial_transpose(rho: &ComplexMatrix, dims: &SubsystemDims, side: Side) -> Result<ComplexMatrix> {
    if !rho.is_square() {
        return Err(Error::Shape(format!("non-square input {}x{}", rho.rows(), rho.cols())));
    }
    let (da, db) = bipartite_factors(dims)?;
    check_state_shape(rho, dims)?;
    Ok(ComplexMatrix::from_fn(da * db, da * db, |r, c| {
        let (a, b) = (r / db, r % db);
        let (a2, b2) = (c / db, c % db);
        match side {
            Side::Second => rho.0[(a * db + b2, a2 * db + b)],
            Side::First => rho.0[(a2 * db + b, a * db + b2)],
        }
    }))
}

/// Realigned matrix `R(rho)_{(i,j),(k,l)} = rho_{(i,k),(j,l)}`, of shape
/// `dA^2 x dB^2`.
pub fn realign(rho: &ComplexMatrix, dims: &SubsystemDims) -> Result<ComplexMatrix> {
    let (da, db) = bipartite_factors(dims)?;
    check_state_shape(rho, dims)?;
    Ok(ComplexMatrix::from_fn(da * da, db * db, |r, c| {
        let (i, j) = (r / da, r % da);
        let (k, l) = (c / db, c % db);
        rho.0[(i * db + k, j * db + l)]
    }))
}

/// Inverse of [`realign`].
pub fn unrealign(r: &ComplexMatrix, dims: &SubsystemDims) -> Result<ComplexMatrix> {
    let (da, db) = bipartite_factors(dims)?;
    if r.rows() != da * da || r.cols() != db * db {
        return Err(Error::Shape(format!(
            "realigned matrix is {}x{}, expected {}x{}",
            r.rows(),
            r.cols(),
            da * da,
            db * db
        )));
    }
    Ok(ComplexMatrix::from_fn(da * db, da * db, |row, col| {
        let (i, k) = (row / db, row % db);
        let (j, l) = (col / db, col % db);
        r.0[(i * da + j, k * db + l)]
    }))
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    let svd = m
        .0
        .clone()
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| {
            Error::Numerical(format!(
                "SVD did not converge for a {}x{} matrix (max entry {:e})",
                m.rows(),
                m.cols(),
                m.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
            ))
        })?;
    Ok(svd.singular_values.iter().sum())
}

/// `Tr(rho^2)` as a real number.
pub fn purity(rho: &ComplexMatrix) -> Result<f64> {
    if !rho.is_square() {
        return Err(Error::Shape(format!("non-square input {}x{}", rho.rows(), rho.cols())));
    }
    let n = rho.rows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho.0[(i, j)] * rho.0[(j, i)];
        }
    }
    if acc.im.abs() > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual: acc.im.abs() });
    }
    Ok(acc.re)
}

/// Eigenvalues and eigenvectors of a Hermitian matrix, descending.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let h = m.symmetrized()?;
    let n = h.rows();
    let eig = h
        .0
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical(format!("Hermitian eigensolver did not converge ({n}x{n})")))?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = idx.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, idx[j])]);
    Ok((values, vectors))
}

/// Real spectrum of a Hermitian matrix, descending.
pub fn hermitian_eigvals(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(m).map(|(v, _)| v)
}

/// Hermitian positive-semidefinite square root.
pub fn psd_sqrt(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (vals, vecs) = hermitian_eigen(rho)?;
    if let Some(&bad) = vals.iter().find(|&&l| l < PSD_CLAMP) {
        return Err(Error::NotPsd { eigenvalue: bad });
    }
    let n = vals.len();
    let roots: Vec<f64> = vals.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let scaled = ComplexMatrix::from_fn(n, n, |i, j| vecs.get(i, j) * roots[j]);
    Ok(&scaled * &vecs.adjoint())
}
