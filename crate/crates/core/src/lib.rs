//! Birkhoff-James orthogonality of matrices.
//!
//! `T ⊥_B W` means `|T + A| >= |T|` for every `A` in the subspace `W`. The
//! crate decides it with a machine-checkable artifact for either answer, and
//! adds distance-to-span computations, state lower bounds and a
//! numerical-radius variant. Every numeric routine is generic over
//! [`Real`] (`f32` or `f64`); the aliases below fix `f64`.

pub mod attainment;
pub mod certify;
pub mod distance;
pub mod error;
pub mod instances;
pub mod io;
pub mod linalg;
pub mod numrad;
pub mod optim;
pub mod oracle;
pub mod rng;
pub mod scalar;

pub use certify::{check_pair, check_subspace, CertifyConfig, Decision, Tolerances};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Field};
pub use scalar::{Cx, Real};

/// Double-precision matrix.
pub type Matrix = ComplexMatrix<f64>;
/// Double-precision subspace.
pub type Subspace = certify::SubspaceBasis<f64>;
/// Double-precision verdict.
pub type CheckVerdict = certify::Verdict<f64>;
/// Double-precision density certificate.
pub type Certificate = certify::OrthoCertificate<f64>;
/// Double-precision non-orthogonality witness.
pub type Witness = certify::NonOrthoWitness<f64>;
/// Double-precision complex scalar.
pub type Complex = Cx<f64>;
