//! Self-contained numerical kernel: dual numbers, dense linear algebra,
//! derivatives, a damped Newton solver and quadrature on `[0, 1]`.

mod diff;
mod dual;
mod extended;
mod linalg;
mod newton;
mod quadrature;

use thiserror::Error;

pub use diff::{
    directional, grad, grad_fd, grad_fd_extended, grad_generic, hessian, jacobian,
    jacobian_generic, ScalarField, VectorField,
};
pub use dual::{Dual, Scalar};
pub use extended::DoubleDouble;
pub use linalg::{
    axpy, dist_inf, dot, dot_generic, lift, norm2, norm_inf, square_identity, square_mul,
    square_transpose, sub, trace_generic, values, Lu, Matrix,
};
pub use newton::{newton_solve, NewtonOptions, NewtonSolution, DEFAULT_TOLERANCE};
pub use quadrature::{integrate_quadrature, QuadratureRule};

/// Default central-difference step for derivative cross-checks.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum NumericsError {
    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular Jacobian at Newton iteration {iteration}")]
    SingularJacobian { iteration: usize },
    #[error("non-finite value encountered")]
    NonFinite,
}
