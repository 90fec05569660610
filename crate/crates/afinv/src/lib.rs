//! Exact-arithmetic invariants of stationary AF-algebras and surface bundles.
//!
//! The pipeline goes from a hyperbolic integer matrix (or a vector of
//! periods) to Perron-Frobenius data in a real algebraic number field, the
//! Z-module spanned by the eigenvector, its coefficient order, the trace
//! bilinear form with determinant and signature, regular and Jacobi-Perron
//! continued fractions, and Bratteli diagrams. All arithmetic is exact.

pub mod bratteli;
pub mod error;
pub mod exactnum;
pub mod jacobiperron;
pub mod numberfield;
pub mod pfdata;
pub mod report;
pub mod torusbundle;
pub mod traceform;

pub use error::Error;
pub use exactnum::{BigRational, IntMatrix, IntPoly};
pub use numberfield::{FieldElement, NumberField, QuadraticSurd};
