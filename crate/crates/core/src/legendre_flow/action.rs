//! The discrete action sum over admissible sequences and its critical
//! points.

use super::{del_residual_generic, FlowError};
use crate::groupoid::{
    admissible_from_elements, element_values, move_junctions, AdmissibleSequence, Groupoid,
    GroupoidElement, PairGroupoid,
};
use crate::lagrangian::DiscreteLagrangian;
use crate::numerics::{newton_solve, Dual, NewtonOptions, Scalar, VectorField};

/// `S_h(g₁, …, g_N) = Σ L_h(gₙ)`.
pub fn action_sum<L: DiscreteLagrangian>(lh: &L, seq: &AdmissibleSequence) -> f64 {
    seq.elements().iter().map(|g| lh.eval(g.coords())).sum()
}

/// Directional derivative of the action sum along admissible variations.
///
/// `variations[j]` moves junction `j` (between `g_j` and `g_{j+1}`) by
/// `(g_j·exp(tξ), exp(tξ)⁻¹·g_{j+1})`, which keeps the sequence admissible
/// with the same composite. On the pair groupoid this is `δq_{j+1} = ξ`
/// with the outer endpoints held fixed.
pub fn action_differential<L: DiscreteLagrangian>(
    lh: &L,
    seq: &AdmissibleSequence,
    variations: &[Vec<f64>],
) -> Result<f64, FlowError> {
    let n = seq.len();
    if variations.len() + 1 != n {
        return Err(FlowError::VariationCount {
            expected: n - 1,
            found: variations.len(),
        });
    }
    let rank = lh.space().rank();
    if let Some(v) = variations.iter().find(|v| v.len() != rank) {
        return Err(FlowError::VariationCount {
            expected: rank,
            found: v.len(),
        });
    }
    let etas: Vec<Vec<Dual<f64>>> = variations
        .iter()
        .map(|v| v.iter().map(|&x| Dual::new(0.0, x)).collect())
        .collect();
    let moved = move_junctions(lh.space(), seq.elements(), &etas);
    let total = moved
        .iter()
        .fold(Dual::constant(0.0), |acc, g| acc + lh.eval(g));
    Ok(total.eps)
}

/// Straight-line initial guess `q_n = q₀ + (n/N)(q_N − q₀)` on the pair
/// groupoid.
pub fn linear_guess(
    space: &PairGroupoid,
    q_start: &[f64],
    q_end: &[f64],
    segments: usize,
) -> Result<AdmissibleSequence, FlowError> {
    let points: Vec<Vec<f64>> = (0..=segments)
        .map(|n| {
            let s = n as f64 / segments as f64;
            q_start
                .iter()
                .zip(q_end)
                .map(|(a, b)| a + s * (b - a))
                .collect()
        })
        .collect();
    let elements = points
        .windows(2)
        .map(|w| space.element(&w[0], &w[1]))
        .collect();
    admissible_from_elements(space, elements).map_err(FlowError::NotAdmissible)
}

struct BoundaryValueSystem<'a, L> {
    lh: &'a L,
    elements: &'a [GroupoidElement],
}

impl<L: DiscreteLagrangian> VectorField for BoundaryValueSystem<'_, L> {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let rank = self.lh.space().rank();
        let etas: Vec<Vec<S>> = x.chunks(rank).map(|c| c.to_vec()).collect();
        let moved = move_junctions(self.lh.space(), self.elements, &etas);
        moved
            .windows(2)
            .flat_map(|w| del_residual_generic(self.lh, &w[0], &w[1]))
            .collect()
    }
}

/// Solve the discrete Euler–Lagrange equations at every junction of an
/// admissible sequence with fixed composite, starting from `initial`.
pub fn solve_boundary_value<L: DiscreteLagrangian>(
    lh: &L,
    initial: &AdmissibleSequence,
) -> Result<AdmissibleSequence, FlowError> {
    let rank = lh.space().rank();
    let junctions = initial.len() - 1;
    if junctions == 0 {
        return Ok(initial.clone());
    }
    let system = BoundaryValueSystem {
        lh,
        elements: initial.elements(),
    };
    let sol = newton_solve(&system, &vec![0.0; rank * junctions], NewtonOptions::default())?;
    let etas: Vec<Vec<f64>> = sol.x.chunks(rank).map(|c| c.to_vec()).collect();
    let moved = element_values(&move_junctions(lh.space(), initial.elements(), &etas));
    let moved = moved
        .into_iter()
        .map(|g| lh.space().normalize(g))
        .collect::<Vec<_>>();
    crate::groupoid::check_admissible(lh.space(), &moved, initial.composite())
        .map_err(FlowError::NotAdmissible)
}
