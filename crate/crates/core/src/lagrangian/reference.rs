//! High-accuracy reference solutions of the continuous Euler–Lagrange
//! equations.

use serde::{Deserialize, Serialize};

use super::{ContinuousLagrangian, Joined, LagrangianError};
use crate::numerics::{hessian, Matrix};

/// Samples `(tₖ, q(tₖ), v(tₖ))` of a continuous trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTrajectory {
    pub times: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
}

impl ReferenceTrajectory {
    pub fn final_position(&self) -> &[f64] {
        self.positions.last().expect("trajectory has an initial sample")
    }

    pub fn final_velocity(&self) -> &[f64] {
        self.velocities.last().expect("trajectory has an initial sample")
    }
}

/// Integrate the Euler–Lagrange equations from `(q0, v0)` over `[0, T]`.
///
/// Systems with a closed-form solution are sampled exactly. Otherwise the
/// first-order system `q̇ = v`, `M(q,v) v̇ = ∂L/∂q − (∂²L/∂v∂q) v` is
/// advanced by classical fourth-order Runge–Kutta with `steps` steps.
pub fn reference_trajectory<L: ContinuousLagrangian>(
    lagrangian: &L,
    q0: &[f64],
    v0: &[f64],
    duration: f64,
    steps: usize,
) -> Result<ReferenceTrajectory, LagrangianError> {
    let d = lagrangian.dim();
    for x in [q0, v0] {
        if x.len() != d {
            return Err(LagrangianError::DimensionMismatch {
                expected: d,
                found: x.len(),
            });
        }
    }
    let steps = steps.max(1);
    let dt = duration / steps as f64;
    let mut out = ReferenceTrajectory {
        times: vec![0.0],
        positions: vec![q0.to_vec()],
        velocities: vec![v0.to_vec()],
    };

    if lagrangian.exact_solution(q0, v0, 0.0).is_some() {
        for k in 1..=steps {
            let t = k as f64 * dt;
            let (q, v) = lagrangian
                .exact_solution(q0, v0, t)
                .expect("exact solution available");
            out.times.push(t);
            out.positions.push(q);
            out.velocities.push(v);
        }
        return Ok(out);
    }

    let mut state = [q0, v0].concat();
    for k in 0..steps {
        let t = k as f64 * dt;
        let k1 = vector_field(lagrangian, &state, t)?;
        let k2 = vector_field(lagrangian, &shift(&state, &k1, 0.5 * dt), t + 0.5 * dt)?;
        let k3 = vector_field(lagrangian, &shift(&state, &k2, 0.5 * dt), t + 0.5 * dt)?;
        let k4 = vector_field(lagrangian, &shift(&state, &k3, dt), t + dt)?;
        for i in 0..state.len() {
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out.times.push((k + 1) as f64 * dt);
        out.positions.push(state[..d].to_vec());
        out.velocities.push(state[d..].to_vec());
    }
    Ok(out)
}

fn shift(x: &[f64], dx: &[f64], a: f64) -> Vec<f64> {
    x.iter().zip(dx).map(|(x, d)| x + a * d).collect()
}

fn vector_field<L: ContinuousLagrangian>(
    lagrangian: &L,
    state: &[f64],
    time: f64,
) -> Result<Vec<f64>, LagrangianError> {
    let d = lagrangian.dim();
    let joined = Joined { lagrangian };
    let hess = hessian(&joined, state)?;
    let grad_q = crate::numerics::grad(&joined, state)?;
    let v = &state[d..];
    let mut mass = Matrix::zeros(d, d);
    let mut rhs = vec![0.0; d];
    for i in 0..d {
        rhs[i] = grad_q[i];
        for j in 0..d {
            mass[(i, j)] = hess[(d + i, d + j)];
            rhs[i] -= hess[(d + i, j)] * v[j];
        }
    }
    let accel = mass
        .solve(&rhs)
        .ok_or(LagrangianError::SingularMassMatrix { time })?;
    Ok([v, &accel[..]].concat())
}
