//! Derivatives of generic models.
//!
//! Exact derivatives come from dual numbers. The finite-difference variants
//! exist as independent oracles for tests and never feed the solvers.

use super::dual::{Dual, Scalar};
use super::extended::DoubleDouble;
use super::linalg::{lift, Matrix};
use super::NumericsError;

/// Scalar-valued function of a vector, evaluable over any [`Scalar`].
pub trait ScalarField {
    fn eval<S: Scalar>(&self, x: &[S]) -> S;
}

/// Vector-valued function of a vector, evaluable over any [`Scalar`].
pub trait VectorField {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S>;
}

impl<F: ScalarField + ?Sized> ScalarField for &F {
    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        (**self).eval(x)
    }
}

impl<F: VectorField + ?Sized> VectorField for &F {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        (**self).eval(x)
    }
}

fn check_finite(v: &[f64]) -> Result<(), NumericsError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(NumericsError::NonFinite)
    }
}

/// Directional derivative of `f` at `x` along `direction`, in any scalar.
pub fn directional<S: Scalar, F: ScalarField>(f: &F, x: &[S], direction: &[S]) -> S {
    f.eval(&Dual::seed(x, direction)).eps
}

/// Gradient over any scalar (one dual pass per coordinate).
pub fn grad_generic<S: Scalar, F: ScalarField>(f: &F, x: &[S]) -> Vec<S> {
    (0..x.len())
        .map(|k| f.eval(&Dual::seed_axis(x, k)).eps)
        .collect()
}

/// Exact forward-mode gradient.
pub fn grad<F: ScalarField>(f: &F, x: &[f64]) -> Result<Vec<f64>, NumericsError> {
    let g = grad_generic(f, x);
    check_finite(&g)?;
    Ok(g)
}

/// Central-difference gradient in double precision.
pub fn grad_fd<F: ScalarField>(f: &F, x: &[f64], step: f64) -> Vec<f64> {
    central_difference::<f64, F>(f, x, step)
}

/// Central-difference gradient with the function evaluated in double-double
/// arithmetic, so the result carries only truncation error.
pub fn grad_fd_extended<F: ScalarField>(f: &F, x: &[f64], step: f64) -> Vec<f64> {
    central_difference::<DoubleDouble, F>(f, x, step)
}

fn central_difference<S: Scalar, F: ScalarField>(f: &F, x: &[f64], step: f64) -> Vec<f64> {
    let base: Vec<S> = lift(x);
    (0..x.len())
        .map(|k| {
            let mut plus = base.clone();
            let mut minus = base.clone();
            plus[k] += S::from_f64(step);
            minus[k] -= S::from_f64(step);
            ((f.eval(&plus) - f.eval(&minus)) / (2.0 * step)).value()
        })
        .collect()
}

/// Jacobian of a vector field over any scalar, as rows of outputs.
/// Also returns the primal value so callers need not re-evaluate.
pub fn jacobian_generic<S: Scalar, F: VectorField>(f: &F, x: &[S]) -> (Vec<S>, Vec<Vec<S>>) {
    let n = x.len();
    let mut value = Vec::new();
    let mut columns = Vec::with_capacity(n);
    for k in 0..n {
        let out = f.eval(&Dual::seed_axis(x, k));
        if k == 0 {
            value = out.iter().map(|d| d.re).collect();
        }
        columns.push(out.into_iter().map(|d| d.eps).collect::<Vec<_>>());
    }
    if n == 0 {
        value = f.eval(x);
    }
    let m = value.len();
    let rows = (0..m)
        .map(|r| columns.iter().map(|col| col[r]).collect())
        .collect();
    (value, rows)
}

/// Value and Jacobian matrix of a vector field.
pub fn jacobian<F: VectorField>(f: &F, x: &[f64]) -> Result<(Vec<f64>, Matrix), NumericsError> {
    let (value, rows) = jacobian_generic(f, x);
    check_finite(&value)?;
    let m = value.len();
    let mut jac = Matrix::zeros(m, x.len());
    for (r, row) in rows.iter().enumerate() {
        check_finite(row)?;
        for (c, &v) in row.iter().enumerate() {
            jac[(r, c)] = v;
        }
    }
    Ok((value, jac))
}

/// Exact Hessian via nested duals.
pub fn hessian<F: ScalarField>(f: &F, x: &[f64]) -> Result<Matrix, NumericsError> {
    let n = x.len();
    let mut h = Matrix::zeros(n, n);
    for i in 0..n {
        let inner: Vec<Dual<f64>> = Dual::seed_axis(x, i);
        for j in i..n {
            let outer: Vec<Dual<Dual<f64>>> = inner
                .iter()
                .enumerate()
                .map(|(k, &re)| Dual::new(re, Dual::from_f64(if k == j { 1.0 } else { 0.0 })))
                .collect();
            let v = f.eval(&outer).eps.eps;
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    check_finite(h.as_slice())?;
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct HalfNormSquared;
    impl ScalarField for HalfNormSquared {
        fn eval<S: Scalar>(&self, x: &[S]) -> S {
            x.iter().fold(S::zero(), |acc, &v| acc + v * v) * 0.5
        }
    }

    struct Constant;
    impl ScalarField for Constant {
        fn eval<S: Scalar>(&self, _x: &[S]) -> S {
            S::from_f64(4.2)
        }
    }

    struct SinTimes;
    impl ScalarField for SinTimes {
        fn eval<S: Scalar>(&self, x: &[S]) -> S {
            x[0].sin() * x[1]
        }
    }

    struct Smooth;
    impl ScalarField for Smooth {
        fn eval<S: Scalar>(&self, x: &[S]) -> S {
            (x[0] * 1.3).sin() * x[1].exp() + x[0] * x[1] * x[1] * x[2] - (x[2] * x[2] + 1.0).ln()
        }
    }

    struct Blowup;
    impl ScalarField for Blowup {
        fn eval<S: Scalar>(&self, x: &[S]) -> S {
            x[0].sqrt()
        }
    }

    #[test]
    fn gradient_examples() {
        assert_eq!(grad(&HalfNormSquared, &[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(grad(&Constant, &[3.0, -1.0, 2.0]).unwrap(), vec![0.0; 3]);
        assert_eq!(grad(&SinTimes, &[0.0, 3.0]).unwrap(), vec![3.0, 0.0]);
    }

    #[test]
    fn non_finite_gradient_is_an_error() {
        assert!(matches!(grad(&Blowup, &[0.0]), Err(NumericsError::NonFinite)));
    }

    #[test]
    fn central_difference_error_is_second_order() {
        let x = [0.3, -0.4, 0.8];
        let exact = grad(&Smooth, &x).unwrap();
        let e1 = grad_fd_extended(&Smooth, &x, 1e-4);
        let e2 = grad_fd_extended(&Smooth, &x, 1e-5);
        for k in 0..3 {
            let r = (e1[k] - exact[k]).abs() / (e2[k] - exact[k]).abs();
            assert!((60.0..=140.0).contains(&r), "component {k}: ratio {r}");
        }
        // The plain double-precision variant agrees at the 1e-8 level.
        let plain = grad_fd(&Smooth, &x, 1e-5);
        for k in 0..3 {
            assert!((plain[k] - exact[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn hessian_matches_hand_derivatives() {
        let h = hessian(&SinTimes, &[0.5, 2.0]).unwrap();
        assert!((h[(0, 0)] + 2.0 * 0.5f64.sin()).abs() < 1e-15);
        assert!((h[(0, 1)] - 0.5f64.cos()).abs() < 1e-15);
        assert_eq!(h[(1, 1)], 0.0);
    }

    struct Rosen;
    impl VectorField for Rosen {
        fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
            vec![x[0] * x[1], x[0].sin() + x[1] * 2.0, x[1] * x[1]]
        }
    }

    #[test]
    fn jacobian_rows_are_outputs() {
        let (v, j) = jacobian(&Rosen, &[0.0, 3.0]).unwrap();
        assert_eq!(v, vec![0.0, 6.0, 9.0]);
        assert_eq!(j.rows(), 3);
        assert_eq!(j.row(0), &[3.0, 0.0]);
        assert_eq!(j.row(1), &[1.0, 2.0]);
        assert_eq!(j.row(2), &[0.0, 6.0]);
    }
}
