//! Optimal designs for bivariate regression models whose dependence is described by a copula.

pub mod cli;
pub mod copulas;
pub mod design;
pub mod experiments;
pub mod models;
mod error;
pub mod numerics;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision instantiations used by the outcome models.
pub type Copula = copulas::CopulaSpec<f64>;
pub type SymMatrix = numerics::SymMatrix<f64>;

/// Single-precision instantiations of the generic core.
pub type Copula32 = copulas::CopulaSpec<f32>;
pub type SymMatrix32 = numerics::SymMatrix<f32>;
