//! Inverse M-matrices, potentials and Hadamard functions.
//!
//! The crate decides membership in the classes ℳ⁻¹, 𝒫 and bi𝒫, recognizes
//! generalized ultrametric structure, checks Hadamard-function closure
//! results on concrete instances, computes the threshold τ(U) and runs the
//! backward inversion algorithm for filtered matrices.
//!
//! Indices are 0-based throughout the library.

pub mod classes;
pub mod filtered;
pub mod hadamard;
pub mod linalg;
pub mod random;
pub mod structure;
pub mod tau;

pub use classes::{classify, ClassReport, Verdict, Witness};
pub use linalg::{LinalgError, Matrix, Tolerance, Vector};
