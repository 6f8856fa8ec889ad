//! Discrete Lagrangians `L_h: G → ℝ`.

use serde::{Deserialize, Serialize};

use super::{hamiltonian, ContinuousLagrangian, DiscreteLagrangian, LagrangianError};
use crate::groupoid::{MatrixGroup, PairGroupoid};
use crate::numerics::{norm2, Matrix, Scalar, ScalarField};

/// One-step quadrature used to approximate `∫₀ʰ L dt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Discretization {
    /// `h·L((q₀+q₁)/2, (q₁−q₀)/h)`.
    Midpoint,
    /// `(h/2)[L(q₀, (q₁−q₀)/h) + L(q₁, (q₁−q₀)/h)]`.
    Trapezoid,
}

/// A continuous Lagrangian discretized on the pair groupoid.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureLagrangian<L> {
    lagrangian: L,
    h: f64,
    rule: Discretization,
    space: PairGroupoid,
}

fn check_step(h: f64) -> Result<(), LagrangianError> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(LagrangianError::InvalidStepSize(h))
    }
}

impl<L: ContinuousLagrangian> QuadratureLagrangian<L> {
    pub fn new(lagrangian: L, h: f64, rule: Discretization) -> Result<Self, LagrangianError> {
        check_step(h)?;
        let space = PairGroupoid::new(lagrangian.dim());
        Ok(Self {
            lagrangian,
            h,
            rule,
            space,
        })
    }

    pub fn continuous(&self) -> &L {
        &self.lagrangian
    }

    pub fn rule(&self) -> Discretization {
        self.rule
    }
}

/// `L_h(q₀, q₁) = h·L((q₀+q₁)/2, (q₁−q₀)/h)`.
pub fn midpoint_discretize<L: ContinuousLagrangian>(
    lagrangian: L,
    h: f64,
) -> Result<QuadratureLagrangian<L>, LagrangianError> {
    QuadratureLagrangian::new(lagrangian, h, Discretization::Midpoint)
}

/// `L_h(q₀, q₁) = (h/2)[L(q₀, (q₁−q₀)/h) + L(q₁, (q₁−q₀)/h)]`.
pub fn trapezoid_discretize<L: ContinuousLagrangian>(
    lagrangian: L,
    h: f64,
) -> Result<QuadratureLagrangian<L>, LagrangianError> {
    QuadratureLagrangian::new(lagrangian, h, Discretization::Trapezoid)
}

impl<L: ContinuousLagrangian> ScalarField for QuadratureLagrangian<L> {
    fn eval<S: Scalar>(&self, g: &[S]) -> S {
        let d = self.lagrangian.dim();
        let (q0, q1) = g.split_at(d);
        let v: Vec<S> = q0.iter().zip(q1).map(|(&a, &b)| (b - a) / self.h).collect();
        match self.rule {
            Discretization::Midpoint => {
                let mid: Vec<S> = q0.iter().zip(q1).map(|(&a, &b)| (a + b) * 0.5).collect();
                self.lagrangian.eval(&mid, &v) * self.h
            }
            Discretization::Trapezoid => {
                (self.lagrangian.eval(q0, &v) + self.lagrangian.eval(q1, &v)) * (0.5 * self.h)
            }
        }
    }
}

impl<L: ContinuousLagrangian> DiscreteLagrangian for QuadratureLagrangian<L> {
    type Space = PairGroupoid;

    fn space(&self) -> &PairGroupoid {
        &self.space
    }

    fn step_size(&self) -> f64 {
        self.h
    }

    fn conserved_quantity(&self, base: &[f64], momentum: &[f64]) -> Option<f64> {
        hamiltonian(&self.lagrangian, base, momentum).ok()
    }
}

/// Moser–Veselov free rigid body, `L_h(f) = −(1/h)·tr(f J_d)` on the
/// relative rotation `f ∈ SO(3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidBodyLagrangian {
    inertia: Vec<f64>,
    h: f64,
    space: MatrixGroup,
}

impl RigidBodyLagrangian {
    pub fn inertia(&self) -> &[f64] {
        &self.inertia
    }
}

/// Build the rigid-body discrete Lagrangian from a symmetric positive
/// definite 3×3 `J_d` (row-major).
pub fn rigid_body_lagrangian(inertia: &[f64], h: f64) -> Result<RigidBodyLagrangian, LagrangianError> {
    check_step(h)?;
    if inertia.len() != 9 {
        return Err(LagrangianError::DimensionMismatch {
            expected: 9,
            found: inertia.len(),
        });
    }
    let m = Matrix::from_row_slice(3, 3, inertia);
    let minors = [
        m[(0, 0)],
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        m.determinant(),
    ];
    if !m.is_symmetric(1e-14) || minors.iter().any(|&d| !(d > 0.0)) {
        return Err(LagrangianError::InvalidInertia);
    }
    Ok(RigidBodyLagrangian {
        inertia: inertia.to_vec(),
        h,
        space: MatrixGroup::so3(),
    })
}

impl ScalarField for RigidBodyLagrangian {
    fn eval<S: Scalar>(&self, f: &[S]) -> S {
        let mut tr = S::zero();
        for i in 0..3 {
            for j in 0..3 {
                tr += f[i * 3 + j] * self.inertia[j * 3 + i];
            }
        }
        -tr / self.h
    }
}

impl DiscreteLagrangian for RigidBodyLagrangian {
    type Space = MatrixGroup;

    fn space(&self) -> &MatrixGroup {
        &self.space
    }

    fn step_size(&self) -> f64 {
        self.h
    }

    fn conserved_quantity(&self, _base: &[f64], momentum: &[f64]) -> Option<f64> {
        Some(norm2(momentum))
    }
}

/// `L_h(q₀, q₁) = ½q₀² + ½q₁²` on `ℝ × ℝ`. Its mixed second derivative
/// vanishes, so neither Legendre transform is invertible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateLagrangian {
    h: f64,
    space: PairGroupoid,
}

impl DegenerateLagrangian {
    pub fn new(h: f64) -> Result<Self, LagrangianError> {
        check_step(h)?;
        Ok(Self {
            h,
            space: PairGroupoid::new(1),
        })
    }
}

impl ScalarField for DegenerateLagrangian {
    fn eval<S: Scalar>(&self, g: &[S]) -> S {
        (g[0] * g[0] + g[1] * g[1]) * 0.5
    }
}

impl DiscreteLagrangian for DegenerateLagrangian {
    type Space = PairGroupoid;

    fn space(&self) -> &PairGroupoid {
        &self.space
    }

    fn step_size(&self) -> f64 {
        self.h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::{FreeParticle, Harmonic, Pendulum};
    use crate::numerics::{grad, grad_fd_extended};

    #[derive(Clone, Copy)]
    struct Zero;
    impl ContinuousLagrangian for Zero {
        fn dim(&self) -> usize {
            1
        }
        fn eval<S: Scalar>(&self, q: &[S], _v: &[S]) -> S {
            q[0] * 0.0
        }
    }

    #[test]
    fn midpoint_examples() {
        let lh = midpoint_discretize(Harmonic::new(1), 0.1).unwrap();
        assert!((lh.eval(&[1.0, 1.0]) + 0.05).abs() < 1e-15);
        let zero = midpoint_discretize(Zero, 0.1).unwrap();
        assert_eq!(zero.eval(&[0.3, -2.0]), 0.0);
        let free = midpoint_discretize(FreeParticle::new(1), 0.25).unwrap();
        let v = 1.6;
        assert!((free.eval(&[0.4, 0.4 + 0.25 * v]) - 0.25 * 0.5 * v * v).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_examples() {
        let lh = trapezoid_discretize(Harmonic::new(1), 0.1).unwrap();
        assert!((lh.eval(&[1.0, 1.0]) + 0.05).abs() < 1e-15);
        let lh = trapezoid_discretize(Harmonic::new(1), 0.1).unwrap();
        // (h/2)[(½v² − ½q₀²) + (½v² − ½q₁²)] with v = 1, q₀ = 0, q₁ = 0.1.
        let expected = 0.05 * (0.5 + (0.5 - 0.005));
        assert!((lh.eval(&[0.0, 0.1]) - expected).abs() < 1e-15);
        let free = trapezoid_discretize(FreeParticle::new(1), 0.5).unwrap();
        assert!((free.eval(&[1.0, 2.0]) - 0.5 * 0.5 * 4.0).abs() < 1e-15);
    }

    #[test]
    fn midpoint_vanishes_linearly_on_the_diagonal() {
        let q = [0.7];
        let values: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&h| midpoint_discretize(Pendulum, h).unwrap().eval(&[q[0], q[0]]))
            .collect();
        assert!((values[0] / values[1] - 2.0).abs() < 1e-12);
        assert!((values[1] / values[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rigid_body_examples() {
        let id = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let jd = [1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0];
        let lh = rigid_body_lagrangian(&jd, 1.0).unwrap();
        assert_eq!(lh.eval(&id), -6.0);
        let lh = rigid_body_lagrangian(&jd, 0.5).unwrap();
        assert_eq!(lh.eval(&id), -12.0);
        let theta = 0.8;
        let lh = rigid_body_lagrangian(&id, 0.1).unwrap();
        let f: Vec<f64> = MatrixGroup::so3().exp(&[0.0, 0.0, theta]);
        assert!((lh.eval(&f) + (1.0 + 2.0 * theta.cos()) / 0.1).abs() < 1e-13);
    }

    #[test]
    fn rigid_body_rejects_bad_inertia() {
        let not_sym = [1.0, 0.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0];
        assert_eq!(
            rigid_body_lagrangian(&not_sym, 0.1),
            Err(LagrangianError::InvalidInertia)
        );
        let indefinite = [1.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 3.0];
        assert!(rigid_body_lagrangian(&indefinite, 0.1).is_err());
        assert!(matches!(
            midpoint_discretize(Pendulum, 0.0),
            Err(LagrangianError::InvalidStepSize(_))
        ));
    }

    #[test]
    fn dual_gradients_match_finite_differences() {
        let lh = midpoint_discretize(Pendulum, 0.1).unwrap();
        let g = [0.3, 0.42];
        let exact = grad(&lh, &g).unwrap();
        let fd = grad_fd_extended(&lh, &g, 1e-5);
        for k in 0..2 {
            assert!((exact[k] - fd[k]).abs() < 1e-8);
        }
        let rb = rigid_body_lagrangian(&[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0], 0.1).unwrap();
        let f: Vec<f64> = MatrixGroup::so3().exp(&[0.2, -0.1, 0.4]);
        let exact = grad(&rb, &f).unwrap();
        let fd = grad_fd_extended(&rb, &f, 1e-5);
        for k in 0..9 {
            assert!((exact[k] - fd[k]).abs() < 1e-8);
        }
    }
}
