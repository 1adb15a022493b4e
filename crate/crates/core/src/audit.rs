//! Randomized checks of the pure-state inequalities and identities behind
//! the bounds.

use std::fmt;

use crate::bounds::{thm1_lower_sq, wang_lower, zhu_fei_lower};
use crate::concurrence::{avg_partition_concurrence_sq, pure_concurrence_full, pure_concurrence_sq_halved};
use crate::error::Result;
use crate::linalg::SubsystemDims;
use crate::states::{random_density_with, random_product_density, random_pure_with, random_unitary, rng_from_seed};

#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfig {
    /// Trials for four-qubit suites; five-qubit and bipartite suites use half.
    pub trials: usize,
    pub seed: u64,
    /// Test hook: halves `C_N^2` before comparing, which must be caught.
    pub corrupt_normalization: bool,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self { trials: 1000, seed: 42, corrupt_normalization: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub samples: usize,
    pub max_violation: f64,
    pub tolerance: f64,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.max_violation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditSummary {
    pub properties: Vec<PropertyResult>,
}

impl AuditSummary {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::passed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }
}

impl fmt::Display for AuditSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.properties {
            writeln!(
                f,
                "{:<5} {:<34} samples={:<5} max_violation={:.3e} tol={:.0e}",
                if p.passed() { "PASS" } else { "FAIL" },
                p.name,
                p.samples,
                p.max_violation,
                p.tolerance
            )?;
        }
        Ok(())
    }
}

struct Tracker {
    name: &'static str,
    samples: usize,
    worst: f64,
    tolerance: f64,
}

impl Tracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, samples: 0, worst: 0.0, tolerance }
    }

    fn record(&mut self, violation: f64) {
        self.samples += 1;
        // NaN must count as a failure
        self.worst = if violation.is_nan() { f64::INFINITY } else { self.worst.max(violation) };
    }

    fn finish(self) -> PropertyResult {
        PropertyResult {
            name: self.name,
            samples: self.samples,
            max_violation: self.worst,
            tolerance: self.tolerance,
        }
    }
}

pub fn run_audit(cfg: &AuditConfig) -> Result<AuditSummary> {
    let mut rng = rng_from_seed(cfg.seed);
    let half = cfg.trials.div_ceil(2).max(1);
    let scale = if cfg.corrupt_normalization { 0.5 } else { 1.0 };

    let q4 = SubsystemDims::qubits(4)?;
    let q5 = SubsystemDims::qubits(5)?;

    let mut eq_four = Tracker::new("four-party halved identity", 1e-10);
    let mut thm1 = Tracker::new("C4^2 >= avg C3^2 (pure)", 1e-10);
    let mut lu = Tracker::new("local-unitary invariance", 1e-9);
    for _ in 0..cfg.trials {
        let psi = random_pure_with(&q4, &mut rng);
        let full = scale * pure_concurrence_full(&psi)?.squared;
        eq_four.record((full - pure_concurrence_sq_halved(&psi)?).abs());
        thm1.record(avg_partition_concurrence_sq(&psi, 3)? - full);
        let us: Vec<_> = (0..4).map(|_| random_unitary(2, &mut rng)).collect();
        let moved = psi.apply_local(&us)?;
        lu.record((pure_concurrence_full(&moved)?.value - pure_concurrence_full(&psi)?.value).abs());
    }

    let mut eq_five = Tracker::new("five-party halved identity", 1e-10);
    let mut thm2 = Tracker::new("C5^2 >= avg C3^2 (pure)", 1e-10);
    let mut thm3 = Tracker::new("C5^2 >= avg C4^2 (pure)", 1e-10);
    for _ in 0..half {
        let psi = random_pure_with(&q5, &mut rng);
        let full = scale * pure_concurrence_full(&psi)?.squared;
        eq_five.record((full - pure_concurrence_sq_halved(&psi)?).abs());
        thm2.record(avg_partition_concurrence_sq(&psi, 3)? - full);
        thm3.record(avg_partition_concurrence_sq(&psi, 4)? - full);
    }

    let mut subadd = Tracker::new("linear-entropy subadditivity", 1e-10);
    for dims in [vec![2, 3], vec![3, 3]] {
        let dims = SubsystemDims::new(dims)?;
        let total = dims.total();
        for k in 0..half {
            let rank = 1 + k % total;
            let rho = random_density_with(&dims, rank, &mut rng)?;
            let joint = 1.0 - rho.purity();
            let a = 1.0 - rho.reduce(&[0])?.purity();
            let b = 1.0 - rho.reduce(&[1])?.purity();
            subadd.record(joint - a - b);
        }
    }

    let mut separable = Tracker::new("bounds vanish on product states", 1e-9);
    for _ in 0..(cfg.trials / 10).max(1) {
        let seed: u64 = rand::Rng::gen(&mut rng);
        let rho = random_product_density(&q4, seed)?;
        let worst = [
            wang_lower(&rho)?.value,
            zhu_fei_lower(&rho)?.value,
            thm1_lower_sq(&rho)?.value,
        ]
        .into_iter()
        .fold(0.0, f64::max);
        separable.record(worst);
    }

    Ok(AuditSummary {
        properties: vec![
            eq_four.finish(),
            thm1.finish(),
            lu.finish(),
            eq_five.finish(),
            thm2.finish(),
            thm3.finish(),
            subadd.finish(),
            separable.finish(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_audit_passes() {
        let s = run_audit(&AuditConfig { trials: 20, seed: 3, corrupt_normalization: false }).unwrap();
        assert!(s.passed(), "{s}");
        assert_eq!(s.get("C4^2 >= avg C3^2 (pure)").unwrap().samples, 20);
        assert_eq!(s.get("C5^2 >= avg C4^2 (pure)").unwrap().samples, 10);
    }

    #[test]
    fn single_trial_runs() {
        let s = run_audit(&AuditConfig { trials: 1, ..AuditConfig::default() }).unwrap();
        assert!(s.passed(), "{s}");
        assert!(s.properties.iter().all(|p| p.samples >= 1));
    }

    #[test]
    fn corrupted_normalization_is_caught() {
        let s = run_audit(&AuditConfig { trials: 10, seed: 1, corrupt_normalization: true }).unwrap();
        assert!(!s.passed());
    }
}
