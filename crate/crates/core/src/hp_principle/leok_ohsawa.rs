//! The Leok–Ohsawa action on the pair groupoid over `ℝᵈ`.
//!
//! Composability and the endpoint constraints are enforced by multipliers
//! on point differences,
//!
//! ```text
//! Σₙ L_h(qₙ⁰, qₙ¹) + p₀·(q₁⁰ − q₀) + Σₙ pₙ·(qₙ₊₁⁰ − qₙ¹) + p_N·(q_N − q_N¹),
//! ```
//!
//! which needs a linear structure on `Q`. Every multiplier pairs with
//! "later point minus earlier point", so that critical points satisfy
//! `pₙ₋₁ = −∂₀L_h(qₙ⁰, qₙ¹)` and `pₙ = ∂₁L_h(qₙ⁰, qₙ¹)` for every `n`,
//! including the last.

use serde::{Deserialize, Serialize};

use super::HpError;
use crate::groupoid::Groupoid;
use crate::lagrangian::DiscreteLagrangian;
use crate::numerics::{grad_generic, newton_solve, NewtonOptions, Scalar, ScalarField, VectorField};

/// Fixed endpoints `(q₀, q_N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
}

impl Boundary {
    pub fn new(start: Vec<f64>, end: Vec<f64>) -> Self {
        Self { start, end }
    }
}

/// A point of the Leok–Ohsawa configuration space: arrow endpoints
/// `(qₙ⁰, qₙ¹)` for `n = 1, …, N` and multipliers `p₀, …, p_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeokOhsawaPoint {
    pub starts: Vec<Vec<f64>>,
    pub ends: Vec<Vec<f64>>,
    pub multipliers: Vec<Vec<f64>>,
}

impl LeokOhsawaPoint {
    pub fn segments(&self) -> usize {
        self.starts.len()
    }

    /// The junction points `qₙ¹` for `n = 1, …, N − 1`.
    pub fn interior_points(&self) -> Vec<Vec<f64>> {
        let n = self.segments();
        self.ends[..n.saturating_sub(1)].to_vec()
    }

    /// Flat layout `[q₁⁰, …, q_N⁰, q₁¹, …, q_N¹, p₀, …, p_N]`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.starts
            .iter()
            .chain(&self.ends)
            .chain(&self.multipliers)
            .flatten()
            .copied()
            .collect()
    }

    /// Inverse of [`to_vec`](Self::to_vec).
    pub fn from_vec(x: &[f64], segments: usize, d: usize) -> Self {
        let mut chunks = x.chunks(d).map(|c| c.to_vec());
        let starts = chunks.by_ref().take(segments).collect();
        let ends = chunks.by_ref().take(segments).collect();
        let multipliers = chunks.take(segments + 1).collect();
        Self {
            starts,
            ends,
            multipliers,
        }
    }
}

/// A critical point of the Leok–Ohsawa action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeokOhsawaSolution {
    pub point: LeokOhsawaPoint,
    pub iterations: usize,
    pub residual: f64,
}

/// The action as a scalar field on the flat layout of [`LeokOhsawaPoint`].
pub struct LeokOhsawaAction<'a, L> {
    lh: &'a L,
    boundary: &'a Boundary,
    segments: usize,
    d: usize,
}

impl<L: DiscreteLagrangian> ScalarField for LeokOhsawaAction<'_, L> {
    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        let (n, d) = (self.segments, self.d);
        let q0 = |k: usize| &x[k * d..(k + 1) * d];
        let q1 = |k: usize| &x[(n + k) * d..(n + k + 1) * d];
        let p = |k: usize| &x[(2 * n + k) * d..(2 * n + k + 1) * d];
        let pair = |a: &[S], b: &[S], c: &[S]| {
            a.iter()
                .zip(b)
                .zip(c)
                .fold(S::zero(), |acc, ((&pi, &bi), &ci)| acc + pi * (bi - ci))
        };
        let fixed = |v: &[f64]| v.iter().map(|&c| S::from_f64(c)).collect::<Vec<S>>();

        let mut total = S::zero();
        for k in 0..n {
            let g = [q0(k), q1(k)].concat();
            total += self.lh.eval(&g);
        }
        total += pair(p(0), q0(0), &fixed(&self.boundary.start));
        for k in 1..n {
            total += pair(p(k), q0(k), q1(k - 1));
        }
        total += pair(p(n), &fixed(&self.boundary.end), q1(n - 1));
        total
    }
}

struct Stationarity<'a, L>(LeokOhsawaAction<'a, L>);

impl<L: DiscreteLagrangian> VectorField for Stationarity<'_, L> {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        grad_generic(&self.0, x)
    }
}

impl<'a, L: DiscreteLagrangian> LeokOhsawaAction<'a, L> {
    pub fn new(lh: &'a L, boundary: &'a Boundary, segments: usize) -> Result<Self, HpError> {
        setup(lh, boundary, segments)
    }
}

fn setup<'a, L: DiscreteLagrangian>(
    lh: &'a L,
    boundary: &'a Boundary,
    segments: usize,
) -> Result<LeokOhsawaAction<'a, L>, HpError> {
    let d = lh
        .space()
        .vector_space_dim()
        .ok_or(HpError::NotVectorSpaceInstance)?;
    if segments == 0 {
        return Err(HpError::InvalidConfiguration(
            "need at least one segment".into(),
        ));
    }
    if boundary.start.len() != d || boundary.end.len() != d {
        return Err(HpError::InvalidConfiguration(format!(
            "boundary points must have dimension {d}"
        )));
    }
    Ok(LeokOhsawaAction {
        lh,
        boundary,
        segments,
        d,
    })
}

fn check_point(point: &LeokOhsawaPoint, d: usize) -> Result<(), HpError> {
    let n = point.segments();
    let shapes_ok = point.ends.len() == n
        && point.multipliers.len() == n + 1
        && point
            .starts
            .iter()
            .chain(&point.ends)
            .chain(&point.multipliers)
            .all(|v| v.len() == d);
    if shapes_ok {
        Ok(())
    } else {
        Err(HpError::InvalidConfiguration(format!(
            "expected {n} arrow pairs and {} multipliers of dimension {d}",
            n + 1
        )))
    }
}

/// Value of the Leok–Ohsawa action.
pub fn leok_ohsawa_action<L: DiscreteLagrangian>(
    lh: &L,
    point: &LeokOhsawaPoint,
    boundary: &Boundary,
) -> Result<f64, HpError> {
    let action = setup(lh, boundary, point.segments())?;
    check_point(point, action.d)?;
    Ok(action.eval(&point.to_vec()))
}

/// Gradient of the Leok–Ohsawa action, in the same layout as the point:
/// derivatives in `qₙ⁰`, then `qₙ¹`, then `pₙ`.
pub fn leok_ohsawa_gradient<L: DiscreteLagrangian>(
    lh: &L,
    point: &LeokOhsawaPoint,
    boundary: &Boundary,
) -> Result<LeokOhsawaPoint, HpError> {
    let action = setup(lh, boundary, point.segments())?;
    check_point(point, action.d)?;
    let g = grad_generic(&action, &point.to_vec());
    Ok(LeokOhsawaPoint::from_vec(&g, point.segments(), action.d))
}

/// Find a critical point with `segments` arrows by Newton's method on the
/// gradient, starting from the straight line between the endpoints with
/// zero multipliers.
pub fn leok_ohsawa_solve<L: DiscreteLagrangian>(
    lh: &L,
    boundary: &Boundary,
    segments: usize,
) -> Result<LeokOhsawaSolution, HpError> {
    let action = setup(lh, boundary, segments)?;
    let d = action.d;
    let node = |k: usize| -> Vec<f64> {
        let s = k as f64 / segments as f64;
        boundary
            .start
            .iter()
            .zip(&boundary.end)
            .map(|(a, b)| a + s * (b - a))
            .collect()
    };
    let guess = LeokOhsawaPoint {
        starts: (0..segments).map(node).collect(),
        ends: (1..=segments).map(node).collect(),
        multipliers: vec![vec![0.0; d]; segments + 1],
    };
    let system = Stationarity(action);
    let sol = newton_solve(&system, &guess.to_vec(), NewtonOptions::default())?;
    Ok(LeokOhsawaSolution {
        point: LeokOhsawaPoint::from_vec(&sol.x, segments, d),
        iterations: sol.iterations,
        residual: sol.residual,
    })
}
