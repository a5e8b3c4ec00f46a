//! Construction, verification and classification of Hermitian solutions
//! `T ∈ M_{n²}` of the Temperley–Lieb relations
//!
//! ```text
//! T* = T,  T² = Q T,  T12 T23 T12 = T12,  T23 T12 T23 = T23
//! ```
//!
//! together with Jones–Wenzl projectors in the induced tensor-space
//! representation and the Yang–Baxter R-matrices built from a solution.

pub mod catalog;
pub mod classify;
pub mod combinators;
pub mod error;
pub mod jw;
pub mod matrix;
pub mod par;
pub mod report;
pub mod subspace;
pub mod tensor;

pub use catalog::{Family, FamilyInstance};
pub use classify::{classify, ClassReport, TlClass};
pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, Tolerance};
pub use num_complex::Complex64;
pub use report::{Report, ReportSet};
pub use subspace::VSystem;
pub use tensor::{verify_all, TlSolution, DEFAULT_CAP};
