//! Built-in mechanical systems on `ℝᵈ`.

use serde::{Deserialize, Serialize};

use super::{ContinuousLagrangian, LagrangianError};
use crate::numerics::Scalar;

fn half_norm_sq<S: Scalar>(x: &[S]) -> S {
    x.iter().fold(S::zero(), |acc, &v| acc + v * v) * 0.5
}

/// `L = ½‖v‖² − ½‖q‖²`, unit frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Harmonic {
    dim: usize,
}

impl Harmonic {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl ContinuousLagrangian for Harmonic {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval<S: Scalar>(&self, q: &[S], v: &[S]) -> S {
        half_norm_sq(v) - half_norm_sq(q)
    }

    fn exact_solution(&self, q0: &[f64], v0: &[f64], t: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        let (s, c) = t.sin_cos();
        let q = q0.iter().zip(v0).map(|(&a, &b)| a * c + b * s).collect();
        let v = q0.iter().zip(v0).map(|(&a, &b)| -a * s + b * c).collect();
        Some((q, v))
    }
}

/// `L = ½v² + cos q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pendulum;

impl ContinuousLagrangian for Pendulum {
    fn dim(&self) -> usize {
        1
    }

    fn eval<S: Scalar>(&self, q: &[S], v: &[S]) -> S {
        v[0] * v[0] * 0.5 + q[0].cos()
    }
}

/// `L = ½‖v‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeParticle {
    dim: usize,
}

impl FreeParticle {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl ContinuousLagrangian for FreeParticle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval<S: Scalar>(&self, _q: &[S], v: &[S]) -> S {
        half_norm_sq(v)
    }

    fn exact_solution(&self, q0: &[f64], v0: &[f64], t: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        let q = q0.iter().zip(v0).map(|(&a, &b)| a + b * t).collect();
        Some((q, v0.to_vec()))
    }
}

/// Two unit masses in the plane under unit gravitational coupling,
/// `q = (x₁, y₁, x₂, y₂)` and `L = ½‖v‖² + 1/‖r₁ − r₂‖`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Kepler;

impl ContinuousLagrangian for Kepler {
    fn dim(&self) -> usize {
        4
    }

    fn eval<S: Scalar>(&self, q: &[S], v: &[S]) -> S {
        let dx = q[0] - q[2];
        let dy = q[1] - q[3];
        half_norm_sq(v) + (dx * dx + dy * dy).sqrt().recip()
    }
}

/// Closed set of continuous systems, for runtime selection by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContinuousSystem {
    Harmonic(Harmonic),
    Pendulum(Pendulum),
    Kepler(Kepler),
    FreeParticle(FreeParticle),
}

impl ContinuousSystem {
    /// Look up a system on `ℝᵈ` by registry name.
    pub fn from_name(name: &str) -> Result<Self, LagrangianError> {
        match name {
            "harmonic" => Ok(Self::Harmonic(Harmonic::new(1))),
            "pendulum" => Ok(Self::Pendulum(Pendulum)),
            "kepler" => Ok(Self::Kepler(Kepler)),
            "free" => Ok(Self::FreeParticle(FreeParticle::new(1))),
            _ => Err(LagrangianError::UnknownSystem {
                name: name.to_string(),
            }),
        }
    }
}

impl ContinuousLagrangian for ContinuousSystem {
    fn dim(&self) -> usize {
        match self {
            Self::Harmonic(l) => l.dim(),
            Self::Pendulum(l) => l.dim(),
            Self::Kepler(l) => l.dim(),
            Self::FreeParticle(l) => l.dim(),
        }
    }

    fn eval<S: Scalar>(&self, q: &[S], v: &[S]) -> S {
        match self {
            Self::Harmonic(l) => l.eval(q, v),
            Self::Pendulum(l) => l.eval(q, v),
            Self::Kepler(l) => l.eval(q, v),
            Self::FreeParticle(l) => l.eval(q, v),
        }
    }

    fn exact_solution(&self, q0: &[f64], v0: &[f64], t: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            Self::Harmonic(l) => l.exact_solution(q0, v0, t),
            Self::Pendulum(l) => l.exact_solution(q0, v0, t),
            Self::Kepler(l) => l.exact_solution(q0, v0, t),
            Self::FreeParticle(l) => l.exact_solution(q0, v0, t),
        }
    }
}
