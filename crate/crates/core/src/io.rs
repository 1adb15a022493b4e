//! Plain-text state files.
//!
//! ```text
//! # comments and blank lines are ignored
//! dims 2 2 2 2
//! kind pure
//! 0 0.5 0
//! 3 0.5 0
//! ```
//!
//! Pure states list `index re im` for nonzero amplitudes. Mixed states list
//! `i j re im` for nonzero entries with `i <= j`; the lower triangle is the
//! Hermitian completion. Indices are 0-based flat indices with subsystem 1 as
//! the most significant factor.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, SubsystemDims};
use crate::states::{DensityMatrix, PureState};

/// A parsed state file.
#[derive(Debug, Clone, PartialEq)]
pub enum StateFile {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl StateFile {
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            StateFile::Pure(p) => p.to_density(),
            StateFile::Mixed(m) => m.clone(),
        }
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| perr(line, format!("cannot parse {what} from {tok:?}")))
}

pub fn parse_state(text: &str) -> Result<StateFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| perr(0, "missing `dims` line"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("dims") {
        return Err(perr(ln, "first line must be `dims d1 d2 ... dN`"));
    }
    let dims: Vec<usize> = toks
        .map(|t| parse_num(t, ln, "dimension"))
        .collect::<Result<_>>()?;
    let dims = SubsystemDims::new(dims).map_err(|e| perr(ln, e.to_string()))?;
    let d = dims.total();

    let (ln, kind_line) = lines.next().ok_or_else(|| perr(ln, "missing `kind` line"))?;
    let kind = match kind_line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["kind", "pure"] => "pure",
        ["kind", "mixed"] => "mixed",
        _ => return Err(perr(ln, "second line must be `kind pure` or `kind mixed`")),
    };

    if kind == "pure" {
        let mut amps = vec![C64::new(0.0, 0.0); d];
        for (ln, l) in lines {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 3 {
                return Err(perr(ln, "pure entries are `index re im`"));
            }
            let i: usize = parse_num(t[0], ln, "index")?;
            if i >= d {
                return Err(perr(ln, format!("index {i} out of range for D = {d}")));
            }
            amps[i] = C64::new(parse_num(t[1], ln, "real part")?, parse_num(t[2], ln, "imaginary part")?);
        }
        Ok(StateFile::Pure(PureState::new(dims, amps)?))
    } else {
        let mut m = ComplexMatrix::zeros(d, d);
        for (ln, l) in lines {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 4 {
                return Err(perr(ln, "mixed entries are `i j re im`"));
            }
            let i: usize = parse_num(t[0], ln, "row index")?;
            let j: usize = parse_num(t[1], ln, "column index")?;
            if i >= d || j >= d {
                return Err(perr(ln, format!("entry ({i},{j}) out of range for D = {d}")));
            }
            if i > j {
                return Err(perr(ln, format!("entry ({i},{j}) is below the diagonal")));
            }
            let z = C64::new(parse_num(t[2], ln, "real part")?, parse_num(t[3], ln, "imaginary part")?);
            m.set(i, j, z);
            if i != j {
                m.set(j, i, z.conj());
            }
        }
        Ok(StateFile::Mixed(DensityMatrix::new(dims, m)?))
    }
}

fn dims_line(dims: &SubsystemDims) -> String {
    let ds: Vec<String> = dims.as_slice().iter().map(|d| d.to_string()).collect();
    format!("dims {}\n", ds.join(" "))
}

pub fn write_pure(psi: &PureState) -> String {
    let mut s = dims_line(psi.dims());
    s.push_str("kind pure\n");
    for (i, z) in psi.amplitudes().iter().enumerate() {
        if z.norm() > 0.0 {
            let _ = writeln!(s, "{i} {:e} {:e}", z.re, z.im);
        }
    }
    s
}

pub fn write_mixed(rho: &DensityMatrix) -> String {
    let mut s = dims_line(rho.dims());
    s.push_str("kind mixed\n");
    let m = rho.matrix();
    for i in 0..m.rows() {
        for j in i..m.cols() {
            let z = m.get(i, j);
            if z.norm() > 0.0 {
                let _ = writeln!(s, "{i} {j} {:e} {:e}", z.re, z.im);
            }
        }
    }
    s
}
