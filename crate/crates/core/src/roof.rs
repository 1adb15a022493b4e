//! Upper bound on the convex-roof concurrence by searching over ensemble
//! decompositions.
//!
//! Write `rho = A A^dagger` with `A = [sqrt(l_1) v_1, ..., sqrt(l_r) v_r]`
//! from the eigendecomposition. For any `r x K` matrix `V` with orthonormal
//! rows, the columns `w_i` of `A V` satisfy `sum_i |w_i><w_i| = rho`, so
//! `sum_i |w_i|^2 C_N(w_i / |w_i|)` is an upper bound on `C_N(rho)`. The search
//! starts from the eigen-ensemble and from random isometries, then applies
//! small random two-column unitary rotations, keeping each one that lowers
//! the average.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::bounds::BoundReport;
use crate::concurrence::{weighted_column, ConcurrencePlan};
use crate::error::{Error, Result};
use crate::linalg;
use crate::states::{complex_gaussian, rng_from_seed, DensityMatrix};

/// Eigenvalues below this fraction of the largest are treated as zero.
const RANK_CUTOFF: f64 = 1e-12;

/// Sandwich tolerance on `C`.
pub const SANDWICH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct RoofOptions {
    /// Number of ensemble members; `None` means twice the numerical rank.
    pub ensemble_size: Option<usize>,
    /// Perturbation steps per restart.
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    pub initial_step: f64,
    pub final_step: f64,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            iterations: 2000,
            restarts: 20,
            seed: 42,
            initial_step: 0.5,
            final_step: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofEstimate {
    /// Smallest ensemble average found: an upper bound on `C_N(rho)`.
    pub value: f64,
    pub ensemble_size: usize,
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// The winning restart made no relative improvement above 1e-9 during
    /// its last tenth of iterations.
    pub converged: bool,
    /// Running best after every step, restarts concatenated in order.
    pub trajectory: Vec<f64>,
}

struct RestartResult {
    best: f64,
    trajectory: Vec<f64>,
    converged: bool,
}

/// Numerical rank of a density matrix.
pub fn numerical_rank(rho: &DensityMatrix) -> Result<usize> {
    let vals = linalg::hermitian_eigvals(rho.matrix())?;
    let top = vals[0].max(0.0);
    Ok(vals.iter().filter(|&&l| l > RANK_CUTOFF * top.max(1e-300)).count())
}

pub fn convex_roof_upper(rho: &DensityMatrix, opts: &RoofOptions) -> Result<RoofEstimate> {
    let (vals, vecs) = linalg::hermitian_eigen(rho.matrix())?;
    let top = vals[0].max(1e-300);
    let rank = vals.iter().filter(|&&l| l > RANK_CUTOFF * top).count();
    let ensemble_size = opts.ensemble_size.unwrap_or(2 * rank);
    if ensemble_size < rank {
        return Err(Error::Domain(format!(
            "ensemble size {ensemble_size} below numerical rank {rank}"
        )));
    }
    if opts.restarts == 0 {
        return Err(Error::Domain("at least one restart is required".into()));
    }
    let d = rho.dims().total();
    let a = DMatrix::from_fn(d, rank, |i, k| vecs.get(i, k) * vals[k].sqrt());
    let plan = ConcurrencePlan::new(rho.dims());

    let results: Vec<RestartResult> = (0..opts.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = restart_rng(opts.seed, restart);
            search(&plan, &a, ensemble_size, restart, opts, &mut rng)
        })
        .collect();

    let mut trajectory = Vec::with_capacity(opts.restarts * (opts.iterations + 1));
    let mut best = f64::INFINITY;
    let mut converged = false;
    for r in &results {
        for &v in &r.trajectory {
            best = best.min(v);
            trajectory.push(best);
        }
    }
    // Ties resolve to the lowest restart index.
    if let Some(winner) = results.iter().min_by(|x, y| x.best.total_cmp(&y.best)) {
        converged = winner.converged;
    }
    Ok(RoofEstimate {
        value: best.max(0.0),
        ensemble_size,
        iterations: opts.iterations,
        restarts: opts.restarts,
        seed: opts.seed,
        converged,
        trajectory,
    })
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha20Rng {
    let mut rng = rng_from_seed(seed);
    rng.set_stream(restart as u64);
    rng
}

/// `r x k` matrix with orthonormal rows: the adjoint of the Q factor of a
/// `k x r` complex Gaussian matrix.
fn random_coisometry(r: usize, k: usize, rng: &mut ChaCha20Rng) -> DMatrix<C64> {
    let g = DMatrix::from_fn(k, r, |_, _| complex_gaussian(rng));
    g.qr().q().adjoint()
}

fn search(
    plan: &ConcurrencePlan,
    a: &DMatrix<C64>,
    k: usize,
    restart: usize,
    opts: &RoofOptions,
    rng: &mut ChaCha20Rng,
) -> RestartResult {
    let r = a.ncols();
    let v = if restart == 0 {
        DMatrix::from_fn(r, k, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    } else {
        random_coisometry(r, k, rng)
    };
    let mut w = a * v;
    let mut terms: Vec<f64> = (0..k).map(|j| weighted_column(plan, w.column(j).as_slice())).collect();
    let mut current: f64 = terms.iter().sum();
    let mut running = current;
    let mut trajectory = Vec::with_capacity(opts.iterations + 1);
    trajectory.push(running);
    let mut last_improvement = 0usize;

    if k >= 2 {
        let d = w.nrows();
        let mut ci = vec![C64::new(0.0, 0.0); d];
        let mut cj = vec![C64::new(0.0, 0.0); d];
        let ratio = opts.final_step / opts.initial_step;
        for it in 0..opts.iterations {
            let frac = if opts.iterations > 1 { it as f64 / (opts.iterations - 1) as f64 } else { 1.0 };
            let step = opts.initial_step * ratio.powf(frac);
            let i = rng.gen_range(0..k);
            let mut j = rng.gen_range(0..k - 1);
            if j >= i {
                j += 1;
            }
            let theta: f64 = { let g: f64 = StandardNormal.sample(rng); step * g };
            let phi = step * PI * rng.gen_range(-1.0..1.0);
            let chi = rng.gen_range(-PI..PI);
            let (s, c) = theta.sin_cos();
            // W <- W U on columns (i, j), U = [[c e^{i phi}, s e^{i chi}], [-s e^{-i chi}, c e^{-i phi}]].
            let u00 = C64::from_polar(c, phi);
            let u01 = C64::from_polar(s, chi);
            let u10 = -C64::from_polar(s, -chi);
            let u11 = C64::from_polar(c, -phi);
            for row in 0..d {
                let (x, y) = (w[(row, i)], w[(row, j)]);
                ci[row] = x * u00 + y * u10;
                cj[row] = x * u01 + y * u11;
            }
            let ti = weighted_column(plan, &ci);
            let tj = weighted_column(plan, &cj);
            let candidate = current - terms[i] - terms[j] + ti + tj;
            if candidate < current {
                if current - candidate > 1e-9 * current.max(1e-12) {
                    last_improvement = it;
                }
                for row in 0..d {
                    w[(row, i)] = ci[row];
                    w[(row, j)] = cj[row];
                }
                terms[i] = ti;
                terms[j] = tj;
                // re-sum rather than accumulate differences
                current = terms.iter().sum();
                running = running.min(current);
            }
            trajectory.push(running);
        }
    }
    let best = trajectory.iter().copied().fold(f64::INFINITY, f64::min);
    let tail = opts.iterations - opts.iterations / 10;
    RestartResult { best, trajectory, converged: last_improvement < tail || opts.iterations == 0 }
}

/// Outcome of comparing a lower bound against a roof estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Sandwich {
    pub pass: bool,
    /// Lower bound on `C`.
    pub lower: f64,
    /// Upper bound on `C`.
    pub upper: f64,
    pub gap: f64,
}

/// Check `lower <= upper + 1e-6` on the full-state concurrence `C_N`.
pub fn sandwich(rho: &DensityMatrix, lower: &BoundReport, upper: &RoofEstimate) -> Result<Sandwich> {
    let n = rho.dims().len();
    if lower.parties != n {
        return Err(Error::Contract(format!(
            "{} reports a {}-party normalization but the state has {n} parties",
            lower.method, lower.parties
        )));
    }
    let lo = lower.as_concurrence();
    Ok(Sandwich {
        pass: lo <= upper.value + SANDWICH_TOL,
        lower: lo,
        upper: upper.value,
        gap: upper.value - lo,
    })
}
