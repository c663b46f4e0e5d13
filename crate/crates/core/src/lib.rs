//! Exact homotopy transfer of A∞-structures and formality certificates
//! obtained by inductively twisting away higher operations.
//!
//! Module map:
//! - [`coeff`]: exact scalars over Q, F_p and Z_(p)
//! - [`graded`]: graded modules, chain complexes, retractions onto homology
//! - [`dga`]: strict differential graded algebras
//! - [`ainfinity`]: the tensor-coalgebra calculus of A∞-structures and morphisms
//! - [`transfer`]: the transferred structure and its quasi-inverse morphisms
//! - [`formality`]: degree twisting, the inductive step and certificates
//! - [`oracle`]: independent checkers, fixtures and instance generators

pub mod ainfinity;
pub mod coeff;
pub mod dga;
pub mod formality;
pub mod graded;
pub mod matrix;
pub mod oracle;
pub mod sparse;
pub mod transfer;

pub use coeff::{Ring, Scalar};
pub use graded::{ChainComplex, GradedMap, GradedModule, Retraction};
pub use sparse::{Tensor, Vector};
