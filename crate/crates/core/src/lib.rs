//! Multigraded-Hankel moment matrices, their block Gaussian factorization,
//! the induced biorthogonal families of matrix polynomials and linear forms,
//! and machine-checked Christoffel–Darboux identities.
//!
//! Every numeric routine is generic over [`numerics::Scalar`], implemented
//! for exact rationals ([`numerics::Rational`]) and `f64`.
//!
//! Pipeline: [`weights`] → [`blockops::build_moment_matrix`] →
//! [`factorize::lu_factorize`] → [`families`] → [`cdkernel`]; the
//! [`harness`] module drives it from a JSON configuration.

pub mod blockops;
pub mod cdkernel;
pub mod check;
pub mod error;
pub mod factorize;
pub mod families;
pub mod harness;
pub mod numerics;
pub mod weights;

pub use check::CheckReport;
pub use error::{Error, Result};
pub use numerics::{Mat, Rational, Scalar, Tolerance};
