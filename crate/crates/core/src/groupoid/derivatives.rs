//! Left- and right-invariant vector fields acting on functions on `G`.
//!
//! For `ξ ∈ A_{β(g)}G` the left-invariant field is
//! `←X[f](g) = d/dt|₀ f(g · exp(tξ))`, and for `ξ ∈ A_{α(g)}G` the
//! right-invariant field is `→X[f](g) = −d/dt|₀ f(exp(tξ)⁻¹ · g)`.
//! On the pair groupoid these reduce to `∂₁f·ξ` and `−∂₀f·ξ`; on a matrix
//! group the right field is `d/dt|₀ f(exp(tξ̂) g)`.

use super::{AlgebroidVector, Groupoid, GroupoidElement, GroupoidError, COMPOSABILITY_TOLERANCE};
use crate::numerics::{Dual, Scalar, ScalarField};

/// `g · exp(ξ)` with `exp(ξ)` based at `β(g)`.
pub fn left_flow<G: Groupoid, S: Scalar>(space: &G, g: &[S], xi: &[S]) -> Vec<S> {
    let q = space.target_chart(g);
    let e = space.exp_chart_generic(&q, xi);
    space.compose_chart(g, &e)
}

/// `exp(ξ)⁻¹ · g` with `exp(ξ)` based at `α(g)`.
pub fn right_flow<G: Groupoid, S: Scalar>(space: &G, g: &[S], xi: &[S]) -> Vec<S> {
    let q = space.source_chart(g);
    let e = space.exp_chart_generic(&q, xi);
    space.compose_chart(&space.inverse_chart(&e), g)
}

fn scaled_direction<S: Scalar>(xi: &[f64]) -> Vec<Dual<S>> {
    xi.iter()
        .map(|&x| Dual::new(S::zero(), S::from_f64(x)))
        .collect()
}

/// `←X[f](g)` over any scalar, without base-point validation.
pub fn left_derivative_generic<G, F, S>(space: &G, f: &F, g: &[S], xi: &[f64]) -> S
where
    G: Groupoid,
    F: ScalarField,
    S: Scalar,
{
    let gd: Vec<Dual<S>> = Dual::lift(g);
    let curve = left_flow(space, &gd, &scaled_direction::<S>(xi));
    f.eval(&curve).eps
}

/// `→X[f](g)` over any scalar, without base-point validation.
pub fn right_derivative_generic<G, F, S>(space: &G, f: &F, g: &[S], xi: &[f64]) -> S
where
    G: Groupoid,
    F: ScalarField,
    S: Scalar,
{
    let gd: Vec<Dual<S>> = Dual::lift(g);
    let curve = right_flow(space, &gd, &scaled_direction::<S>(xi));
    -f.eval(&curve).eps
}

fn check_base<G: Groupoid>(
    space: &G,
    expected: &[f64],
    xi: &AlgebroidVector,
) -> Result<(), GroupoidError> {
    if xi.coords.len() != space.rank() {
        return Err(GroupoidError::DimensionMismatch {
            expected: space.rank(),
            found: xi.coords.len(),
        });
    }
    if xi.base.coords().len() != expected.len() {
        return Err(GroupoidError::BasePointMismatch {
            gap: f64::INFINITY,
        });
    }
    let gap = crate::numerics::dist_inf(xi.base.coords(), expected);
    if !(gap <= COMPOSABILITY_TOLERANCE) {
        return Err(GroupoidError::BasePointMismatch { gap });
    }
    Ok(())
}

/// Left-invariant derivative of `f` at `g` along `ξ ∈ A_{β(g)}G`.
pub fn left_derivative<G: Groupoid, F: ScalarField>(
    space: &G,
    f: &F,
    g: &GroupoidElement,
    xi: &AlgebroidVector,
) -> Result<f64, GroupoidError> {
    space.check_element(g)?;
    check_base(space, &space.target_chart(g.coords()), xi)?;
    Ok(left_derivative_generic(space, f, g.coords(), &xi.coords))
}

/// Right-invariant derivative of `f` at `g` along `ξ ∈ A_{α(g)}G`.
pub fn right_derivative<G: Groupoid, F: ScalarField>(
    space: &G,
    f: &F,
    g: &GroupoidElement,
    xi: &AlgebroidVector,
) -> Result<f64, GroupoidError> {
    space.check_element(g)?;
    check_base(space, &space.source_chart(g.coords()), xi)?;
    Ok(right_derivative_generic(space, f, g.coords(), &xi.coords))
}

/// Chart components of the tangent vector `←X(g)` generated by `ξ`.
pub fn left_tangent<G: Groupoid, S: Scalar>(space: &G, g: &[S], xi: &[f64]) -> Vec<S> {
    let gd: Vec<Dual<S>> = Dual::lift(g);
    left_flow(space, &gd, &scaled_direction::<S>(xi))
        .into_iter()
        .map(|c| c.eps)
        .collect()
}

/// Chart components of the tangent vector `→X(g)` generated by `ξ`.
pub fn right_tangent<G: Groupoid, S: Scalar>(space: &G, g: &[S], xi: &[f64]) -> Vec<S> {
    let gd: Vec<Dual<S>> = Dual::lift(g);
    right_flow(space, &gd, &scaled_direction::<S>(xi))
        .into_iter()
        .map(|c| -c.eps)
        .collect()
}
