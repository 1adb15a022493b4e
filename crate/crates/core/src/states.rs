//! Validated pure and mixed multipartite states, plus the constructors used
//! by the worked examples and the randomized audits.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, SubsystemDims};

/// Tolerance on the Euclidean norm of a pure state and on the trace of a
/// density matrix.
pub const NORM_TOL: f64 = 1e-10;

/// Identifier of the pseudo-random generator behind every seeded constructor.
pub const GENERATOR_ID: &str = "chacha20 (rand_chacha 0.3, rand_distr StandardNormal)";

/// The seeded generator used throughout the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian `(g1 + i g2)/sqrt(2)`.
pub fn complex_gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// A normalized state vector over a [`SubsystemDims`].
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: SubsystemDims,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Validates length and unit norm.
    pub fn new(dims: SubsystemDims, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::Shape(format!(
                "{} amplitudes for dims {dims} (D = {})",
                amplitudes.len(),
                dims.total()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("amplitudes must be finite".into()));
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Invariant {
                invariant: "unit norm",
                detail: format!("|psi| = {norm:.17}"),
            });
        }
        Ok(Self { dims, amplitudes })
    }

    /// Normalizes `amplitudes` first. Fails on the zero vector.
    pub fn normalized(dims: SubsystemDims, mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Domain("cannot normalize a zero or non-finite vector".into()));
        }
        amplitudes.iter_mut().for_each(|z| *z /= n);
        Self::new(dims, amplitudes)
    }

    /// Computational basis state `|index>`.
    pub fn basis(dims: SubsystemDims, index: usize) -> Result<Self> {
        let mut v = vec![C64::new(0.0, 0.0); dims.total()];
        if index >= v.len() {
            return Err(Error::Domain(format!("basis index {index} out of range")));
        }
        v[index] = C64::new(1.0, 0.0);
        Self::new(dims, v)
    }

    /// Tensor product `self (x) other`.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let mut d = self.dims.as_slice().to_vec();
        d.extend_from_slice(other.dims.as_slice());
        let dims = SubsystemDims::new(d)?;
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self::new(dims, amps)
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            matrix: self.projector(),
        }
    }

    /// Reorder tensor factors; new factor `k` is old factor `order[k]`.
    pub fn permute_subsystems(&self, order: &[usize]) -> Result<Self> {
        let amplitudes = linalg::permute_vector(&self.amplitudes, &self.dims, order)?;
        let dims = linalg::permuted_dims(&self.dims, order)?;
        Ok(Self { dims, amplitudes })
    }

    /// Purity of the reduction onto `keep`, computed from the amplitudes.
    ///
    /// Uses whichever of `keep` and its complement has the smaller Gram
    /// matrix; both give the same purity for a pure state.
    pub fn reduced_purity(&self, keep: &[usize]) -> Result<f64> {
        self.dims.check_subset(keep)?;
        let rest = linalg::complement(self.dims.len(), keep);
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        Ok(gram_purity(&self.amplitudes, &self.dims, &keep, &rest))
    }

    /// Apply a unitary to each subsystem.
    pub fn apply_local(&self, unitaries: &[ComplexMatrix]) -> Result<Self> {
        if unitaries.len() != self.dims.len() {
            return Err(Error::Domain(format!(
                "{} unitaries for {} subsystems",
                unitaries.len(),
                self.dims.len()
            )));
        }
        let mut op = ComplexMatrix::identity(1);
        for (u, &d) in unitaries.iter().zip(self.dims.as_slice()) {
            if u.rows() != d || u.cols() != d {
                return Err(Error::Shape(format!("{}x{} unitary on a {d}-level subsystem", u.rows(), u.cols())));
            }
            op = linalg::kron(&op, u)?;
        }
        let v = op.as_nalgebra() * nalgebra::DVector::from_column_slice(&self.amplitudes);
        Self::normalized(self.dims.clone(), v.iter().copied().collect())
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn gram_purity(amps: &[C64], dims: &SubsystemDims, a: &[usize], b: &[usize]) -> f64 {
    let (small, large) = if dims.subset_dim(a) <= dims.subset_dim(b) { (a, b) } else { (b, a) };
    let so = linalg::subset_offsets(dims, small);
    let lo = linalg::subset_offsets(dims, large);
    purity_from_offsets(amps, &so, &lo)
}

/// `sum |G_{ab}|^2` with `G_{ab} = sum_t psi[a+t] conj(psi[b+t])`.
pub(crate) fn purity_from_offsets(amps: &[C64], kept: &[usize], traced: &[usize]) -> f64 {
    let mut total = 0.0;
    for (i, &oa) in kept.iter().enumerate() {
        for &ob in &kept[i..] {
            let mut g = C64::new(0.0, 0.0);
            for &t in traced {
                g += amps[oa + t] * amps[ob + t].conj();
            }
            let w = if oa == ob { 1.0 } else { 2.0 };
            total += w * g.norm_sqr();
        }
    }
    total
}

/// A validated density matrix over a [`SubsystemDims`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: SubsystemDims,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity, then symmetrizes.
    pub fn new(dims: SubsystemDims, matrix: ComplexMatrix) -> Result<Self> {
        let d = dims.total();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::Shape(format!(
                "{}x{} matrix for dims {dims} (D = {d})",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let matrix = matrix.symmetrized().map_err(|e| match e {
            Error::NotHermitian { residual } => Error::Invariant {
                invariant: "Hermitian",
                detail: format!("max |M - M^dagger| = {residual:e}"),
            },
            other => other,
        })?;
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > NORM_TOL {
            return Err(Error::Invariant {
                invariant: "unit trace",
                detail: format!("Tr = {tr:.17}"),
            });
        }
        let ev = linalg::hermitian_eigvals(&matrix)?;
        let min = ev.last().copied().unwrap_or(0.0);
        if min < linalg::PSD_CLAMP {
            return Err(Error::Invariant {
                invariant: "positive semidefinite",
                detail: format!("minimum eigenvalue {min:e}"),
            });
        }
        Ok(Self { dims, matrix })
    }

    /// Maximally mixed state `I/D`.
    pub fn maximally_mixed(dims: SubsystemDims) -> Self {
        let d = dims.total();
        Self {
            matrix: ComplexMatrix::identity(d).scale(1.0 / d as f64),
            dims,
        }
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        linalg::purity(&self.matrix).expect("validated density matrix is Hermitian")
    }

    /// Reduced state on `keep`, ascending order.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut k = keep.to_vec();
        k.sort_unstable();
        let dims = SubsystemDims::with_limit(k.iter().map(|&i| self.dims.as_slice()[i]).collect(), usize::MAX)?;
        let matrix = linalg::partial_trace(&self.matrix, &self.dims, &k)?;
        Ok(DensityMatrix { dims, matrix })
    }

    /// Reorder tensor factors; new factor `k` is old factor `order[k]`.
    pub fn permute_subsystems(&self, order: &[usize]) -> Result<Self> {
        let matrix = linalg::permute_matrix(&self.matrix, &self.dims, order)?;
        let dims = linalg::permuted_dims(&self.dims, order)?;
        Ok(Self { dims, matrix })
    }

    /// Same matrix under a different factorization with equal total dimension.
    pub fn refactor(&self, dims: SubsystemDims) -> Result<Self> {
        if dims.total() != self.dims.total() {
            return Err(Error::Shape(format!("cannot refactor {} as {dims}", self.dims)));
        }
        Ok(Self { dims, matrix: self.matrix.clone() })
    }

    /// The state vector when `purity >= 1 - tol`, up to a global phase.
    pub fn as_pure(&self, tol: f64) -> Option<PureState> {
        if self.purity() < 1.0 - tol {
            return None;
        }
        let (_, vecs) = linalg::hermitian_eigen(&self.matrix).ok()?;
        let v: Vec<C64> = (0..vecs.rows()).map(|i| vecs.get(i, 0)).collect();
        PureState::normalized(self.dims.clone(), v).ok()
    }

    /// Tensor product `self (x) other`.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let mut d = self.dims.as_slice().to_vec();
        d.extend_from_slice(other.dims.as_slice());
        let dims = SubsystemDims::new(d)?;
        let matrix = linalg::kron(&self.matrix, &other.matrix)?;
        Ok(Self { dims, matrix })
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        psi.to_density()
    }
}

/// `cos(theta)|0...0> + sin(theta)|1...1>` on `n` qubits.
pub fn make_generalized_ghz(n: usize, theta: f64) -> Result<PureState> {
    if n < 2 {
        return Err(Error::Domain(format!("GHZ state needs n >= 2, got {n}")));
    }
    let dims = SubsystemDims::qubits(n)?;
    let mut v = vec![C64::new(0.0, 0.0); dims.total()];
    v[0] = C64::new(theta.cos(), 0.0);
    let last = v.len() - 1;
    v[last] = C64::new(theta.sin(), 0.0);
    PureState::normalized(dims, v)
}

/// `(|0000> + |0011> + |1100> + |1111>)/2`: a Bell pair on qubits (1,2)
/// times a Bell pair on qubits (3,4).
pub fn make_double_bell() -> PureState {
    let dims = SubsystemDims::qubits(4).expect("4 qubits fit");
    let mut v = vec![C64::new(0.0, 0.0); 16];
    for i in [0, 3, 12, 15] {
        v[i] = C64::new(0.5, 0.0);
    }
    PureState::new(dims, v).expect("normalized by construction")
}

/// `(1-t)/D * I + t |psi><psi|`.
pub fn make_isotropic_mixture(psi: &PureState, t: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("mixing weight t = {t} outside [0, 1]")));
    }
    let d = psi.dims().total();
    let noise = (1.0 - t) / d as f64;
    let p = psi.projector();
    let matrix = ComplexMatrix::from_fn(d, d, |i, j| {
        let diag = if i == j { noise } else { 0.0 };
        p.get(i, j) * t + diag
    });
    Ok(DensityMatrix { dims: psi.dims().clone(), matrix })
}

/// Haar-random pure state from normalized complex Gaussian amplitudes.
pub fn random_pure(dims: &SubsystemDims, seed: u64) -> PureState {
    random_pure_with(dims, &mut rng_from_seed(seed))
}

pub fn random_pure_with<R: rand::Rng + ?Sized>(dims: &SubsystemDims, rng: &mut R) -> PureState {
    loop {
        let v: Vec<C64> = (0..dims.total()).map(|_| complex_gaussian(rng)).collect();
        if let Ok(psi) = PureState::normalized(dims.clone(), v) {
            return psi;
        }
    }
}

/// Ginibre ensemble state `G G^dagger / Tr`, with `G` of shape `D x rank`.
pub fn random_density(dims: &SubsystemDims, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(dims, rank, &mut rng_from_seed(seed))
}

pub fn random_density_with<R: rand::Rng + ?Sized>(
    dims: &SubsystemDims,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let d = dims.total();
    if rank == 0 || rank > d {
        return Err(Error::Domain(format!("rank {rank} outside 1..={d}")));
    }
    let g = DMatrix::from_fn(d, rank, |_, _| complex_gaussian(rng));
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m /= C64::new(tr, 0.0);
    DensityMatrix::new(dims.clone(), ComplexMatrix::from_nalgebra(m))
}

/// Haar-random `d x d` unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` divided out.
pub fn random_unitary<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = DMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_nalgebra(q)
}

/// Fully product mixed state: a random local density matrix on each factor.
pub fn random_product_density(dims: &SubsystemDims, seed: u64) -> Result<DensityMatrix> {
    let mut rng = rng_from_seed(seed);
    let mut out: Option<DensityMatrix> = None;
    for &d in dims.as_slice() {
        let local_dims = SubsystemDims::new(vec![d])?;
        let local = random_density_with(&local_dims, d, &mut rng)?;
        out = Some(match out {
            None => local,
            Some(acc) => acc.tensor(&local)?,
        });
    }
    out.expect("at least one subsystem").refactor(dims.clone())
}
