//! The pair groupoid `ℝᵈ × ℝᵈ ⇉ ℝᵈ`.

use super::Groupoid;
use crate::numerics::Scalar;

/// Arrows are pairs `(q₀, q₁)` stored as `[q₀…, q₁…]`; the algebroid is
/// `TQ` with the standard basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairGroupoid {
    dim: usize,
}

impl PairGroupoid {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Chart coordinates of `(q₀, q₁)`.
    pub fn element(&self, q0: &[f64], q1: &[f64]) -> super::GroupoidElement {
        assert_eq!(q0.len(), self.dim, "dimension mismatch");
        assert_eq!(q1.len(), self.dim, "dimension mismatch");
        super::GroupoidElement::new([q0, q1].concat())
    }
}

impl Groupoid for PairGroupoid {
    fn base_dim(&self) -> usize {
        self.dim
    }

    fn chart_dim(&self) -> usize {
        2 * self.dim
    }

    fn rank(&self) -> usize {
        self.dim
    }

    fn source_chart<S: Scalar>(&self, g: &[S]) -> Vec<S> {
        g[..self.dim].to_vec()
    }

    fn target_chart<S: Scalar>(&self, g: &[S]) -> Vec<S> {
        g[self.dim..2 * self.dim].to_vec()
    }

    fn identity_chart<S: Scalar>(&self, q: &[S]) -> Vec<S> {
        [q, q].concat()
    }

    fn inverse_chart<S: Scalar>(&self, g: &[S]) -> Vec<S> {
        [&g[self.dim..2 * self.dim], &g[..self.dim]].concat()
    }

    fn compose_chart<S: Scalar>(&self, a: &[S], b: &[S]) -> Vec<S> {
        [&a[..self.dim], &b[self.dim..2 * self.dim]].concat()
    }

    fn exp_chart_generic<S: Scalar>(&self, q: &[S], xi: &[S]) -> Vec<S> {
        let moved: Vec<S> = q.iter().zip(xi).map(|(&a, &b)| a + b).collect();
        [q, &moved[..]].concat()
    }

    fn extrapolate(&self, g_prev: &[f64]) -> Vec<f64> {
        let (q0, q1) = g_prev.split_at(self.dim);
        let next: Vec<f64> = q0.iter().zip(q1).map(|(a, b)| 2.0 * b - a).collect();
        [q1, &next[..]].concat()
    }

    fn vector_space_dim(&self) -> Option<usize> {
        Some(self.dim)
    }
}
