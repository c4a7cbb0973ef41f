//! Noncommutative tori at finite truncation.
//!
//! * [`torus`]: the smooth algebra `C^inf(T^n_Theta)` as finitely supported
//!   Fourier coefficients with the twisted convolution product.
//! * [`clifford`] and [`spectral`]: gamma matrices, the truncated GNS
//!   representation, the Dirac operator and its commutators.
//! * [`covering`]: finite-fold coverings, their deck groups, the module
//!   inner product and the lifted Dirac operator.
//! * [`moyal`]: the Moyal plane in the matrix basis.
//! * [`oracles`]: slow, independent reference implementations.
//! * [`verify`]: the identity verification suite behind the CLI.

pub mod clifford;
pub mod covering;
pub mod error;
pub mod lattice;
pub mod moyal;
pub mod oracles;
pub mod spectral;
pub mod torus;
pub mod verify;

pub use clifford::{CMatrix, GammaSet};
pub use covering::{ConnectionValue, CoveringSpec, CoveringTower, DeckElement};
pub use error::{Error, Result};
pub use lattice::{LatticeIndex, SkewMatrix, TruncationWindow};
pub use moyal::{LadderSet, MoyalMatrix};
pub use num_complex::Complex64;
pub use spectral::{SpectrumReport, TruncatedOperator};
pub use torus::TorusElement;
