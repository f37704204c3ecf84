//! Shared numerical kernels: differentiation, quadrature, root finding and symmetric
//! linear algebra.

pub mod diff;
pub mod linalg;
pub mod normal;
pub mod quadrature;
pub mod roots;


pub use diff::{grad_fd, hessian_fd, jacobian_fd, DEFAULT_STEP};
pub use linalg::{inverse_pd, logdet_psd, schur_complement, schur_parts, Cholesky, Matrix, SymMatrix};
pub use quadrature::{
    integrate_2d, integrate_2d_checked, integrate_adaptive, tensor, Interval, QuadratureRule, Rect,
};
pub use roots::{find_root, golden_max};
