use std::fs;
use std::path::PathBuf;

use clap::Args;
use concurrence_bounds::io::parse_state;
use concurrence_bounds::states::{make_double_bell, make_generalized_ghz, make_isotropic_mixture, PureState};
use concurrence_bounds::{DensityMatrix, Error, Result};

/// Where a state comes from: a builtin name or a state file.
#[derive(Args, Debug, Clone)]
pub struct StateArgs {
    /// Builtin state: `ghz<n>`, `double-bell` or `isotropic`.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    builtin: Option<String>,
    /// Read the state from a file instead.
    #[arg(long)]
    file: Option<PathBuf>,
    /// GHZ angle for `ghz<n>`.
    #[arg(long)]
    theta: Option<f64>,
    /// Mixing weight for `isotropic`.
    #[arg(long)]
    t: Option<f64>,
    /// Pure builtin mixed with white noise by `isotropic`.
    #[arg(long)]
    of: Option<String>,
}

impl StateArgs {
    pub fn load(&self) -> Result<DensityMatrix> {
        if let Some(path) = &self.file {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
            return Ok(parse_state(&text)?.to_density());
        }
        let name = self.builtin.as_deref().unwrap_or_default();
        if name == "isotropic" {
            let t = self.t.ok_or_else(|| Error::Domain("`isotropic` needs --t".into()))?;
            let base = self.of.as_deref().ok_or_else(|| Error::Domain("`isotropic` needs --of".into()))?;
            return make_isotropic_mixture(&self.pure(base)?, t);
        }
        Ok(self.pure(name)?.to_density())
    }

    fn pure(&self, name: &str) -> Result<PureState> {
        if name == "double-bell" {
            return Ok(make_double_bell());
        }
        if let Some(n) = name.strip_prefix("ghz") {
            let n: usize = n.parse().map_err(|_| Error::Domain(format!("bad GHZ size in {name:?}")))?;
            let theta = self.theta.ok_or_else(|| Error::Domain(format!("`{name}` needs --theta")))?;
            return make_generalized_ghz(n, theta);
        }
        Err(Error::Domain(format!(
            "unknown builtin {name:?}; expected ghz<n>, double-bell or isotropic"
        )))
    }

    /// `t` when the state is the noisy double-Bell example.
    pub fn isotropic_double_bell_t(&self) -> Option<f64> {
        match (self.builtin.as_deref(), self.of.as_deref()) {
            (Some("isotropic"), Some("double-bell")) => self.t,
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        if let Some(path) = &self.file {
            return path.display().to_string();
        }
        let mut s = self.builtin.clone().unwrap_or_default();
        if let Some(theta) = self.theta {
            s.push_str(&format!(" theta={theta}"));
        }
        if let Some(t) = self.t {
            s.push_str(&format!(" t={t}"));
        }
        if let Some(of) = &self.of {
            s.push_str(&format!(" of={of}"));
        }
        s
    }
}
