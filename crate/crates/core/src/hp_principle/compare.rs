//! Agreement of the two-point boundary value problem across the DEL,
//! Hamilton–Pontryagin and Leok–Ohsawa formulations.

use serde::{Deserialize, Serialize};

use super::{
    construct_hp_solution, leok_ohsawa_solve, verify_theorem, Boundary, HpError, TheoremReport,
};
use crate::groupoid::{Groupoid, PairGroupoid};
use crate::lagrangian::DiscreteLagrangian;
use crate::legendre_flow::{linear_guess, solve_boundary_value};
use crate::numerics::dist_inf;

/// Interior points `q₁, …, q_{N−1}` from each formulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulationComparison {
    pub segments: usize,
    pub del: Vec<Vec<f64>>,
    pub hamilton_pontryagin: Vec<Vec<f64>>,
    pub leok_ohsawa: Vec<Vec<f64>>,
    pub theorem: TheoremReport,
    /// Largest pairwise distance between corresponding interior points.
    pub max_disagreement: f64,
}

/// Solve the boundary value problem `q(0) = start`, `q(N) = end` three
/// ways. The HP configuration is built over the DEL solution with `nodes`
/// samples per path and checked against `tol`.
pub fn compare_formulations<L: DiscreteLagrangian<Space = PairGroupoid>>(
    lh: &L,
    boundary: &Boundary,
    segments: usize,
    nodes: usize,
    tol: f64,
) -> Result<FormulationComparison, HpError> {
    let space = lh.space();
    if boundary.start.len() != space.dim() || boundary.end.len() != space.dim() {
        return Err(HpError::InvalidConfiguration(format!(
            "boundary points must have dimension {}",
            space.dim()
        )));
    }
    if segments == 0 {
        return Err(HpError::InvalidConfiguration(
            "need at least one segment".into(),
        ));
    }
    let guess = linear_guess(space, &boundary.start, &boundary.end, segments)?;
    let del_seq = solve_boundary_value(lh, &guess)?;
    let interior_targets = |elements: &[crate::groupoid::GroupoidElement]| -> Vec<Vec<f64>> {
        elements[..elements.len() - 1]
            .iter()
            .map(|g| space.target(g).coords().to_vec())
            .collect()
    };
    let del = interior_targets(del_seq.elements());

    let cfg = construct_hp_solution(lh, &del_seq, nodes)?;
    let theorem = verify_theorem(&cfg, lh, tol);
    let hamilton_pontryagin = interior_targets(&cfg.end_elements());

    let leok_ohsawa = leok_ohsawa_solve(lh, boundary, segments)?
        .point
        .interior_points();

    let mut max_disagreement = 0.0_f64;
    for k in 0..del.len() {
        let a = &del[k];
        let b = &hamilton_pontryagin[k];
        let c = &leok_ohsawa[k];
        max_disagreement = max_disagreement
            .max(dist_inf(a, b))
            .max(dist_inf(a, c))
            .max(dist_inf(b, c));
    }
    Ok(FormulationComparison {
        segments,
        del,
        hamilton_pontryagin,
        leok_ohsawa,
        theorem,
        max_disagreement,
    })
}
