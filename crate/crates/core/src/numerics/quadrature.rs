//! Fixed-order quadrature on the unit interval.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Nodes in `[0, 1]` with weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    degree: usize,
}

impl QuadratureRule {
    /// `points`-point Gauss–Legendre rule, exact to degree `2·points − 1`.
    pub fn gauss(points: usize) -> Self {
        assert!(points >= 1, "Gauss rule needs at least one point");
        let n = points;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            // Root of P_n on [-1, 1], refined from the Chebyshev-like guess.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes.push(0.5 * (x + 1.0));
            weights.push(1.0 / ((1.0 - x * x) * dp * dp));
        }
        // Ascending order.
        nodes.reverse();
        weights.reverse();
        Self {
            nodes,
            weights,
            degree: 2 * n - 1,
        }
    }

    pub fn midpoint() -> Self {
        Self {
            nodes: vec![0.5],
            weights: vec![1.0],
            degree: 1,
        }
    }

    pub fn trapezoid() -> Self {
        Self {
            nodes: vec![0.0, 1.0],
            weights: vec![0.5, 0.5],
            degree: 1,
        }
    }

    pub fn simpson() -> Self {
        Self {
            nodes: vec![0.0, 0.5, 1.0],
            weights: vec![1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0],
            degree: 3,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Highest polynomial degree integrated exactly.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `Σ wᵢ f(sᵢ)`.
    pub fn integrate<T>(&self, f: impl Fn(f64) -> T) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let mut terms = self.nodes.iter().zip(&self.weights).map(|(&s, &w)| f(s) * w);
        let first = terms.next().expect("quadrature rule has at least one node");
        terms.fold(first, |acc, t| acc + t)
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::gauss(2)
    }
}

/// Integrate a real function over `[0, 1]`.
pub fn integrate_quadrature(f: impl Fn(f64) -> f64, rule: &QuadratureRule) -> f64 {
    rule.integrate(f)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = if n == 0 {
        0.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p, dp)
}
