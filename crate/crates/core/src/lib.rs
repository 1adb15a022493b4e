//! Concurrence of multipartite quantum states and partition-averaged lower
//! bounds for mixed states.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: dense complex matrices, partial trace, partial transpose,
//!   realignment, trace norm, Hermitian spectra.
//! - [`states`]: validated pure states and density matrices, example and
//!   random constructors.
//! - [`partitions`]: set partitions of subsystem labels and coarse-graining.
//! - [`concurrence`]: exact pure-state concurrences and the two-qubit
//!   spin-flip formula.
//! - [`bounds`]: mixed-state lower bounds.
//! - [`roof`]: an upper bound on the convex roof by decomposition search.
//! - [`io`], [`sweep`], [`audit`]: state files, CSV sweeps and randomized
//!   property audits used by the command-line tool.
//!
//! ```
//! use concurrence_bounds::{bounds, states};
//!
//! let psi = states::make_generalized_ghz(4, std::f64::consts::FRAC_PI_4).unwrap();
//! let rho = psi.to_density();
//! let thm1 = bounds::thm1_lower_sq(&rho).unwrap();
//! assert!((thm1.value - 1.5).abs() < 1e-12); // 6 sin^2 cos^2 at pi/4
//! ```

pub mod audit;
pub mod bounds;
pub mod concurrence;
pub mod error;
pub mod io;
pub mod linalg;
pub mod partitions;
pub mod roof;
pub mod states;
pub mod sweep;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, SubsystemDims};
pub use partitions::Partition;
pub use states::{DensityMatrix, PureState};

pub use num_complex::Complex64;

// The guide's Rust listings run as doctests of this crate.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/partitions.md")]
    mod partitions {}
    #[doc = include_str!("../../../book/src/concurrence.md")]
    mod concurrence {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/roof.md")]
    mod roof {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
