//! ξ-Bergman kernels, minimal L² integrals under ideal constraints, and
//! strong-openness effectiveness quantities on explicitly integrable domains.

pub mod bergman;
pub mod domains;
pub mod error;
pub mod ideals;
pub mod jets;
pub mod linalg;
pub mod quadrature;
pub mod scalar;
pub mod sop;
pub mod suites;

pub use error::{Error, Result};
pub use jets::{Functional, Jet, MultiIndex};
pub use scalar::{PiRational, Quantity, Scalar, C64, CQ};
