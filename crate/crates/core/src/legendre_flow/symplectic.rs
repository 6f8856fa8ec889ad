//! Symplecticity of the one-step map on `T*Q`.

use super::{flow_map, AlgebroidCovector, FlowError};
use crate::groupoid::Groupoid;
use crate::lagrangian::DiscreteLagrangian;
use crate::numerics::{hessian, Matrix};

/// Jacobian of `(q₀, p₀) ↦ (q₁, p₁)` at `μ = (q₀, p₀)`, by implicit
/// differentiation of `p₀ = −∂₀L_h(q₀, q₁)`, `p₁ = ∂₁L_h(q₀, q₁)` at the
/// converged step.
pub fn one_step_jacobian<L: DiscreteLagrangian>(
    lh: &L,
    mu: &AlgebroidCovector,
) -> Result<Matrix, FlowError> {
    let d = lh.space().vector_space_dim().ok_or(FlowError::NotPairInstance)?;
    let (g, _) = flow_map(lh, mu)?;
    let hess = hessian(lh, g.coords())?;
    let block = |r0: usize, c0: usize| {
        let mut m = Matrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = hess[(r0 + i, c0 + j)];
            }
        }
        m
    };
    let a = block(0, 0);
    let b = block(0, d);
    let c = block(d, d);
    let b_inv = b
        .inverse()
        .ok_or(FlowError::SingularJacobian { iteration: 0 })?;

    // dq₁ = −B⁻¹(A dq₀ + dp₀),  dp₁ = Bᵀ dq₀ + C dq₁.
    let dq1_dq0 = (&b_inv * &a).scale(-1.0);
    let dq1_dp0 = b_inv.scale(-1.0);
    let dp1_dq0 = b.transpose().add(&(&c * &dq1_dq0));
    let dp1_dp0 = &c * &dq1_dp0;

    let mut jac = Matrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            jac[(i, j)] = dq1_dq0[(i, j)];
            jac[(i, d + j)] = dq1_dp0[(i, j)];
            jac[(d + i, j)] = dp1_dq0[(i, j)];
            jac[(d + i, d + j)] = dp1_dp0[(i, j)];
        }
    }
    Ok(jac)
}

/// `‖JᵀΩJ − Ω‖∞` (largest entry) for the one-step map at `μ`.
pub fn symplecticity_defect<L: DiscreteLagrangian>(
    lh: &L,
    mu: &AlgebroidCovector,
) -> Result<f64, FlowError> {
    let jac = one_step_jacobian(lh, mu)?;
    let n = jac.rows();
    let d = n / 2;
    let mut omega = Matrix::zeros(n, n);
    for i in 0..d {
        omega[(i, d + i)] = 1.0;
        omega[(d + i, i)] = -1.0;
    }
    let pulled = &(&jac.transpose() * &omega) * &jac;
    Ok(pulled.sub(&omega).max_abs())
}
