//! Analytic lower bounds of concurrence for N x N bipartite quantum states.
//!
//! The central quantity is the positive-map bound
//!
//! ```text
//! C(rho) >= sqrt(2 / (N (N - 1))) * (||(I_N ⊗ Φ) rho|| - (N - 1))
//! ```
//!
//! where Φ negates off-diagonal entries and sends `a_ii` to
//! `(N - 2) a_ii + a_{i+1, i+1}` (indices mod N). It is reported next to the
//! PPT and realignment bounds; all of them are available through the
//! [`criteria::Registry`].
//!
//! ```
//! use concurrence::bipartite::{density_from_pure, pure_from_schmidt, SchmidtVector};
//! use concurrence::bounds::phi_bound;
//!
//! let bell = SchmidtVector::new(vec![0.5f64.sqrt(); 2]).unwrap();
//! let rho = density_from_pure(&pure_from_schmidt(&bell));
//! assert!((phi_bound(&rho).unwrap() - 1.0).abs() < 1e-12);
//! ```

pub mod bipartite;
pub mod bounds;
pub mod criteria;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod selftest;
pub mod states;
pub mod sweep;

pub use bipartite::{DensityMatrix, PureState, SchmidtVector};
pub use bounds::{BoundReport, DETECTION_TOL};
pub use criteria::{Criterion, Registry, Subject};
pub use error::{Error, Result};
pub use linalg::{CMatrix, Spectrum, C64};
pub use states::{HouParams, ThetaSlice};
