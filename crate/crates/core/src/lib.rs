//! Exact verification of BMW-type R-matrices, their idempotents, twists and the associated
//! quantum matrix algebras.

pub mod bmwrep;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod qma;
pub mod report;
pub mod rmatrix;
pub mod scalars;
pub mod tensorops;
pub mod twistmaps;

pub use error::{Error, Result};
pub use scalars::{AlgebraParams, Field, Fp, Rational};
pub use tensorops::TensorOperator;
