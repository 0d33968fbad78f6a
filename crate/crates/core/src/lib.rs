//! Magic-state production in a dissipative qubit.
//!
//! The crate covers a qubit with a non-Hermitian decay term, its
//! noise-averaged counterpart when the decay rate fluctuates, single noise
//! realizations integrated as Bloch-vector SDEs, and the stabilizer Renyi
//! entropy of the resulting states. All rates are in units of the hopping `J`.
//!
//! ```
//! use nhmagic::nh::{steady_sre, DqParams};
//! use nhmagic::magic::M2_H;
//!
//! let p = DqParams::real_hopping(2.0 * std::f64::consts::SQRT_2).unwrap();
//! assert!((steady_sre(&p).unwrap() - M2_H).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antidephasing;
pub mod cubic;
pub mod error;
pub mod magic;
pub mod nh;
pub mod qubit;
pub mod sde;
pub mod sweep;
pub mod verify;

pub use num_complex::Complex64;
pub use antidephasing::{Hopping, LiouvillianAnalysis, SdqParams};
pub use error::{Error, Result};
pub use nh::DqParams;
pub use qubit::{BlochVector, DensityMatrix, DensityMatrix2, PureState2};
