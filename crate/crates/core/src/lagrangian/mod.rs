//! Continuous and discrete Lagrangians.
//!
//! The continuous side (`L: TQ → ℝ`, its Legendre transform and energy,
//! reference trajectories) serves as the measuring stick for integrator
//! error. The discrete side provides `L_h: G → ℝ` on the pair groupoid,
//! by quadrature of a continuous Lagrangian, and on `SO(3)` for the free
//! rigid body.

mod discrete;
mod reference;
mod systems;

use thiserror::Error;

use crate::groupoid::Groupoid;
use crate::numerics::{
    dot, grad_generic, newton_solve, Dual, NewtonOptions, NumericsError, Scalar, ScalarField,
    VectorField,
};

pub use discrete::{
    midpoint_discretize, rigid_body_lagrangian, trapezoid_discretize, DegenerateLagrangian,
    Discretization, QuadratureLagrangian, RigidBodyLagrangian,
};
pub use reference::{reference_trajectory, ReferenceTrajectory};
pub use systems::{ContinuousSystem, FreeParticle, Harmonic, Kepler, Pendulum};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LagrangianError {
    #[error("step size must be positive and finite, got {0}")]
    InvalidStepSize(f64),
    #[error("mass matrix ∂²L/∂v² is singular at t = {time}")]
    SingularMassMatrix { time: f64 },
    #[error("inertia matrix must be symmetric positive definite")]
    InvalidInertia,
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown system `{name}`; available: {}", SYSTEM_NAMES.join(", "))]
    UnknownSystem { name: String },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Names accepted by [`ContinuousSystem::from_name`] and the CLI.
pub const SYSTEM_NAMES: &[&str] = &[
    "harmonic",
    "pendulum",
    "kepler",
    "free",
    "rigid-body",
    "degenerate",
];

/// A Lagrangian `L(q, v)` on `TQ` with `Q = ℝᵈ`.
pub trait ContinuousLagrangian {
    fn dim(&self) -> usize;

    fn eval<S: Scalar>(&self, q: &[S], v: &[S]) -> S;

    /// Closed-form solution `(q(t), v(t))` of the Euler–Lagrange equations,
    /// when one is known.
    fn exact_solution(&self, _q0: &[f64], _v0: &[f64], _t: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        None
    }
}

/// A discrete Lagrangian `L_h` on a groupoid, evaluated through
/// [`ScalarField::eval`] on chart coordinates.
pub trait DiscreteLagrangian: ScalarField {
    type Space: Groupoid;

    fn space(&self) -> &Self::Space;

    fn step_size(&self) -> f64;

    /// The physically conserved diagnostic at a momentum-level state
    /// `(base, μ)`: the energy for mechanical systems on the pair groupoid,
    /// the Casimir `‖Π‖` on a group.
    fn conserved_quantity(&self, _base: &[f64], _momentum: &[f64]) -> Option<f64> {
        None
    }
}

/// `FL(q, v) = ∂L/∂v`.
pub fn legendre_continuous<L: ContinuousLagrangian>(lagrangian: &L, q: &[f64], v: &[f64]) -> Vec<f64> {
    legendre_generic(lagrangian, q, v)
}

fn legendre_generic<L: ContinuousLagrangian, S: Scalar>(lagrangian: &L, q: &[S], v: &[S]) -> Vec<S> {
    let qd: Vec<Dual<S>> = Dual::lift(q);
    (0..v.len())
        .map(|k| lagrangian.eval(&qd, &Dual::seed_axis(v, k)).eps)
        .collect()
}

/// `E(q, v) = FL(q, v)·v − L(q, v)`.
pub fn energy<L: ContinuousLagrangian>(lagrangian: &L, q: &[f64], v: &[f64]) -> f64 {
    dot(&legendre_continuous(lagrangian, q, v), v) - lagrangian.eval(q, v)
}

/// The energy function of a fixed Lagrangian.
#[derive(Debug, Clone, Copy)]
pub struct EnergyFunction<'a, L> {
    lagrangian: &'a L,
}

impl<'a, L: ContinuousLagrangian> EnergyFunction<'a, L> {
    pub fn new(lagrangian: &'a L) -> Self {
        Self { lagrangian }
    }

    pub fn eval(&self, q: &[f64], v: &[f64]) -> f64 {
        energy(self.lagrangian, q, v)
    }
}

struct LegendreResidual<'a, L> {
    lagrangian: &'a L,
    q: &'a [f64],
    p: &'a [f64],
}

impl<L: ContinuousLagrangian> VectorField for LegendreResidual<'_, L> {
    fn eval<S: Scalar>(&self, v: &[S]) -> Vec<S> {
        let q: Vec<S> = self.q.iter().map(|&x| S::from_f64(x)).collect();
        legendre_generic(self.lagrangian, &q, v)
            .into_iter()
            .zip(self.p)
            .map(|(a, &b)| a - b)
            .collect()
    }
}

/// Solve `FL(q, v) = p` for `v`, starting from `v = p`.
pub fn inverse_legendre<L: ContinuousLagrangian>(
    lagrangian: &L,
    q: &[f64],
    p: &[f64],
) -> Result<Vec<f64>, NumericsError> {
    let residual = LegendreResidual { lagrangian, q, p };
    Ok(newton_solve(&residual, p, NewtonOptions::default())?.x)
}

/// `H(q, p) = E(q, FL⁻¹(q, p))`.
pub fn hamiltonian<L: ContinuousLagrangian>(
    lagrangian: &L,
    q: &[f64],
    p: &[f64],
) -> Result<f64, NumericsError> {
    let v = inverse_legendre(lagrangian, q, p)?;
    Ok(energy(lagrangian, q, &v))
}

/// `∂L/∂q` at `(q, v)`.
pub fn configuration_gradient<L: ContinuousLagrangian, S: Scalar>(
    lagrangian: &L,
    q: &[S],
    v: &[S],
) -> Vec<S> {
    let vd: Vec<Dual<S>> = Dual::lift(v);
    (0..q.len())
        .map(|k| lagrangian.eval(&Dual::seed_axis(q, k), &vd).eps)
        .collect()
}

/// A [`ContinuousLagrangian`] seen as a scalar field on `[q, v]`.
pub(crate) struct Joined<'a, L> {
    pub lagrangian: &'a L,
}

impl<L: ContinuousLagrangian> ScalarField for Joined<'_, L> {
    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        let d = self.lagrangian.dim();
        self.lagrangian.eval(&x[..d], &x[d..])
    }
}

/// Exact gradient of `L` with respect to `[q, v]`.
pub fn state_gradient<L: ContinuousLagrangian>(lagrangian: &L, q: &[f64], v: &[f64]) -> Vec<f64> {
    grad_generic(&Joined { lagrangian }, &[q, v].concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_continuous(&Harmonic::new(1), &[1.0], &[2.0]), vec![2.0]);
        assert_eq!(legendre_continuous(&FreeParticle::new(1), &[3.0], &[0.0]), vec![0.0]);
        assert_eq!(legendre_continuous(&Pendulum, &[PI / 3.0], &[0.7]), vec![0.7]);
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(&Harmonic::new(1), &[1.0], &[0.0]), 0.5);
        assert_eq!(energy(&FreeParticle::new(1), &[-4.0], &[2.0]), 2.0);
        assert_eq!(energy(&Pendulum, &[0.0], &[1.0]), -0.5);
    }

    #[test]
    fn energy_is_legendre_pairing_minus_lagrangian() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let systems = [
            ContinuousSystem::Harmonic(Harmonic::new(1)),
            ContinuousSystem::Pendulum(Pendulum),
            ContinuousSystem::Kepler(Kepler),
        ];
        for sys in &systems {
            let e = EnergyFunction::new(sys);
            for _ in 0..100 {
                let d = sys.dim();
                let q: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let expected = dot(&legendre_continuous(sys, &q, &v), &v) - sys.eval(&q, &v);
                assert!((e.eval(&q, &v) - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn inverse_legendre_round_trip() {
        let v = inverse_legendre(&Pendulum, &[0.4], &[1.3]).unwrap();
        assert!((v[0] - 1.3).abs() < 1e-15);
        let h = hamiltonian(&Harmonic::new(1), &[1.0], &[1.0]).unwrap();
        assert!((h - 1.0).abs() < 1e-15);
    }

    #[test]
    fn configuration_gradient_of_pendulum() {
        let g = configuration_gradient(&Pendulum, &[0.3], &[2.0]);
        assert!((g[0] + 0.3f64.sin()).abs() < 1e-15);
        let full = state_gradient(&Pendulum, &[0.3], &[2.0]);
        assert_eq!(full[1], 2.0);
    }

    #[test]
    fn unknown_system_lists_registry() {
        let err = ContinuousSystem::from_name("lorenz").unwrap_err();
        let msg = err.to_string();
        for name in SYSTEM_NAMES {
            assert!(msg.contains(name));
        }
    }
}
