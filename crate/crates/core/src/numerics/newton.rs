//! Damped Newton iteration for square nonlinear systems.

use super::diff::{jacobian, VectorField};
use super::linalg::{axpy, norm_inf};
use super::NumericsError;

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_MAX_ITERATIONS: usize = 50;

/// Smallest backtracking step before the line search gives up.
const MIN_STEP: f64 = 1.0 / (1u64 << 30) as f64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Target for `‖F(x)‖∞`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSolution {
    pub x: Vec<f64>,
    /// Number of Newton updates applied.
    pub iterations: usize,
    /// Final `‖F(x)‖∞`.
    pub residual: f64,
}

/// Solve `F(x) = 0` from `x0`.
///
/// The Jacobian comes from forward-mode differentiation of `F`. Each update
/// is halved until `‖F‖²` decreases, down to a step of 2⁻³⁰.
pub fn newton_solve<F: VectorField>(
    f: &F,
    x0: &[f64],
    options: NewtonOptions,
) -> Result<NewtonSolution, NumericsError> {
    let mut x = x0.to_vec();
    for iteration in 0..=options.max_iterations {
        let (r, jac) = jacobian(f, &x)?;
        assert_eq!(r.len(), x.len(), "newton_solve needs a square system");
        let residual = norm_inf(&r);
        if residual <= options.tolerance {
            return Ok(NewtonSolution {
                x,
                iterations: iteration,
                residual,
            });
        }
        if iteration == options.max_iterations {
            return Err(NumericsError::NoConvergence {
                iterations: iteration,
                residual,
            });
        }
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let dx = jac
            .solve(&rhs)
            .ok_or(NumericsError::SingularJacobian { iteration })?;

        let merit = sum_sq(&r);
        let mut step = 1.0;
        loop {
            let trial = axpy(step, &dx, &x);
            let tr = f.eval(&trial);
            if tr.iter().all(|v| v.is_finite()) && sum_sq(&tr) < merit {
                x = trial;
                break;
            }
            step *= 0.5;
            if step < MIN_STEP {
                return Err(NumericsError::NoConvergence {
                    iterations: iteration,
                    residual,
                });
            }
        }
    }
    unreachable!("loop returns on the final iteration")
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Scalar;

    struct SquareMinusFour;
    impl VectorField for SquareMinusFour {
        fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
            vec![x[0] * x[0] - 4.0]
        }
    }

    struct IdentityMap;
    impl VectorField for IdentityMap {
        fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
            x.to_vec()
        }
    }

    struct SumProduct;
    impl VectorField for SumProduct {
        fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
            vec![x[0] + x[1] - 3.0, x[0] * x[1] - 2.0]
        }
    }

    struct Linear3;
    impl VectorField for Linear3 {
        fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
            vec![
                x[0] * 2.0 + x[1] - 1.0,
                x[1] * 3.0 - x[2] + 2.0,
                x[0] + x[2] * 4.0 - 0.5,
            ]
        }
    }

    struct Flat;
    impl VectorField for Flat {
        fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
            vec![x[0] * 0.0 + 1.0]
        }
    }

    struct NoRoot;
    impl VectorField for NoRoot {
        fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
            vec![x[0] * x[0] + 1.0]
        }
    }

    #[test]
    fn scalar_examples() {
        let s = newton_solve(&SquareMinusFour, &[3.0], NewtonOptions::default()).unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-12);
        let s = newton_solve(&IdentityMap, &[5.0], NewtonOptions::default()).unwrap();
        assert_eq!(s.x, vec![0.0]);
    }

    #[test]
    fn two_dimensional_quadratic() {
        let s = newton_solve(&SumProduct, &[2.5, 0.1], NewtonOptions::default()).unwrap();
        let (a, b) = (s.x[0], s.x[1]);
        let near = |x: f64, y: f64| (a - x).abs() < 1e-10 && (b - y).abs() < 1e-10;
        assert!(near(2.0, 1.0) || near(1.0, 2.0), "{:?}", s.x);
        assert!(s.residual <= 1e-12);
    }

    #[test]
    fn linear_system_takes_one_iteration() {
        let s = newton_solve(&Linear3, &[10.0, -7.0, 3.0], NewtonOptions::default()).unwrap();
        assert_eq!(s.iterations, 1);
    }

    #[test]
    fn singular_jacobian_reported() {
        let err = newton_solve(&Flat, &[0.0], NewtonOptions::default()).unwrap_err();
        assert_eq!(err, NumericsError::SingularJacobian { iteration: 0 });
    }

    #[test]
    fn no_root_reports_no_convergence() {
        let opts = NewtonOptions {
            tolerance: 1e-12,
            max_iterations: 20,
        };
        match newton_solve(&NoRoot, &[0.5], opts) {
            Err(NumericsError::NoConvergence { residual, .. }) => assert!(residual >= 1.0),
            Err(NumericsError::SingularJacobian { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
