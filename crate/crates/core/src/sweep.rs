//! Parameter sweeps over the two worked examples, emitted as CSV.
//!
//! Rows are computed independently and always written in grid order, so
//! serial and parallel runs produce byte-identical output.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use crate::bounds::{
    reference_curves, thm1_lower_sq, thm_general_lower_sq, wang_lower, zhu_fei_lower, BoundMethod,
};
use crate::concurrence::pure_concurrence_full;
use crate::error::{Error, Result};
use crate::roof::{convex_roof_upper, RoofOptions};
use crate::states::{make_double_bell, make_generalized_ghz, make_isotropic_mixture};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Serial,
    #[default]
    Parallel,
}

/// Fixed 17-significant-digit scientific notation.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_value(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn grid(points: usize, hi: f64) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::Domain(format!("grid resolution must be >= 2, got {points}")));
    }
    let last = (points - 1) as f64;
    Ok((0..points).map(|k| if k + 1 == points { hi } else { hi * k as f64 / last }).collect())
}

fn map_rows<F>(xs: &[f64], par: Parallelism, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(usize, f64) -> Result<Vec<f64>> + Sync,
{
    match par {
        Parallelism::Serial => xs.iter().enumerate().map(|(k, &x)| f(k, x)).collect(),
        Parallelism::Parallel => xs.par_iter().enumerate().map(|(k, &x)| f(k, x)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GhzSweepConfig {
    pub n: usize,
    pub points: usize,
    pub parallelism: Parallelism,
}

impl Default for GhzSweepConfig {
    fn default() -> Self {
        Self { n: 4, points: 181, parallelism: Parallelism::default() }
    }
}

/// Generalized GHZ states over `theta` in `[0, pi/2]`.
///
/// Columns: `theta`, `exact` (`C_N`), the partition-average bound for
/// `m = N - 1` as `sqrt(C^2 bound)` (named `thm1` at N = 4), `zhu-fei`,
/// `wang`. All on `C`. At N = 3 the partition column is omitted.
pub fn ghz_sweep(cfg: &GhzSweepConfig) -> Result<Table> {
    if cfg.n < 3 {
        return Err(Error::Domain(format!("GHZ sweep needs n >= 3, got {}", cfg.n)));
    }
    let thetas = grid(cfg.points, FRAC_PI_2)?;
    let n = cfg.n;
    let mut header = vec!["theta".to_string(), "exact".to_string()];
    if n >= 4 {
        let method = match (n, n - 1) {
            (4, 3) => BoundMethod::Thm1,
            (5, 4) => BoundMethod::Thm3,
            _ => BoundMethod::ThmGeneral,
        };
        header.push(method.to_string());
    }
    header.push(BoundMethod::ZhuFei.to_string());
    header.push(BoundMethod::Wang.to_string());

    let rows = map_rows(&thetas, cfg.parallelism, |_, theta| {
        let psi = make_generalized_ghz(n, theta)?;
        let rho = psi.to_density();
        let mut row = vec![theta, pure_concurrence_full(&psi)?.value];
        if n >= 4 {
            row.push(thm_general_lower_sq(&rho, n - 1)?.as_concurrence());
        }
        row.push(zhu_fei_lower(&rho)?.value);
        row.push(wang_lower(&rho)?.value);
        Ok(row)
    })?;
    Ok(Table { header, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleSweepConfig {
    pub points: usize,
    /// Adds a `roof` column when set; row `k` uses seed `seed + k`.
    pub roof: Option<RoofOptions>,
    pub parallelism: Parallelism,
}

impl Default for ExampleSweepConfig {
    fn default() -> Self {
        Self { points: 201, roof: None, parallelism: Parallelism::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleSweep {
    pub table: Table,
    /// Smallest grid `t` with a strictly positive computed `thm1` value.
    pub onset: Option<f64>,
    /// `(t, computed, reference)` wherever the two differ by more than 1e-12.
    pub discrepancies: Vec<(f64, f64, f64)>,
}

impl ExampleSweep {
    pub fn summary(&self) -> String {
        let mut s = match self.onset {
            Some(t) => format!("detection onset: t = {t:.17}\n"),
            None => "detection onset: none on grid\n".to_string(),
        };
        if self.discrepancies.is_empty() {
            s.push_str("computed thm1 matches reference-curve on every row\n");
        } else {
            let worst = self
                .discrepancies
                .iter()
                .map(|(_, c, r)| (c - r).abs())
                .fold(0.0, f64::max);
            s.push_str(&format!(
                "computed thm1 differs from reference-curve on {} rows (max |diff| = {worst:.6e})\n",
                self.discrepancies.len()
            ));
        }
        s
    }
}

/// The isotropic double-Bell mixture over `t` in `[0, 1]`.
///
/// Columns, all on `C_4^2`: `t`, `thm1` (computed), `reference-curve`,
/// `wang`, `zhu-fei`, and optionally `roof` (squared upper bound).
pub fn example_sweep(cfg: &ExampleSweepConfig) -> Result<ExampleSweep> {
    let ts = grid(cfg.points, 1.0)?;
    let phi = make_double_bell();
    let mut header: Vec<String> = [
        "t",
        BoundMethod::Thm1.as_str(),
        BoundMethod::ReferenceCurve.as_str(),
        BoundMethod::Wang.as_str(),
        BoundMethod::ZhuFei.as_str(),
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    if cfg.roof.is_some() {
        header.push("roof".into());
    }
    let rows = map_rows(&ts, cfg.parallelism, |k, t| {
        let rho = make_isotropic_mixture(&phi, t)?;
        let mut row = vec![
            t,
            thm1_lower_sq(&rho)?.value,
            reference_curves(t)?.combined,
            wang_lower(&rho)?.as_squared(),
            zhu_fei_lower(&rho)?.as_squared(),
        ];
        if let Some(opts) = &cfg.roof {
            let opts = RoofOptions { seed: opts.seed.wrapping_add(k as u64), ..opts.clone() };
            let up = convex_roof_upper(&rho, &opts)?.value;
            row.push(up * up);
        }
        Ok(row)
    })?;
    let onset = rows.iter().find(|r| r[1] > 0.0).map(|r| r[0]);
    let discrepancies = rows
        .iter()
        .filter(|r| (r[1] - r[2]).abs() > 1e-12)
        .map(|r| (r[0], r[1], r[2]))
        .collect();
    Ok(ExampleSweep { table: Table { header, rows }, onset, discrepancies })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let g = grid(5, 1.0).unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(grid(1, 1.0).is_err());
    }

    #[test]
    fn csv_formatting() {
        assert_eq!(format_value(0.5), "5.0000000000000000e-1");
        let t = Table { header: vec!["t".into(), "x".into()], rows: vec![vec![0.0, 1.0]] };
        assert_eq!(t.to_csv(), "t,x\n0.0000000000000000e0,1.0000000000000000e0\n");
    }

    #[test]
    fn small_ghz_sweep() {
        let cfg = GhzSweepConfig { n: 4, points: 5, parallelism: Parallelism::Serial };
        let t = ghz_sweep(&cfg).unwrap();
        assert_eq!(t.header, vec!["theta", "exact", "thm1", "zhu-fei", "wang"]);
        assert_eq!(t.rows.len(), 5);
        assert!(t.rows[0][1..].iter().all(|&v| v.abs() < 1e-12));
        let three = ghz_sweep(&GhzSweepConfig { n: 3, points: 3, parallelism: Parallelism::Serial }).unwrap();
        assert_eq!(three.header, vec!["theta", "exact", "zhu-fei", "wang"]);
        assert!(ghz_sweep(&GhzSweepConfig { n: 2, ..cfg }).is_err());
    }
}
