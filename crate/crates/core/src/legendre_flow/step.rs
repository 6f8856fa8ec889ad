//! Two-step and one-step discrete evolution.

use serde::{Deserialize, Serialize};

use super::{
    legendre_minus, legendre_minus_generic, legendre_plus, AlgebroidCovector, FlowError,
};
use crate::groupoid::{composability_gap, left_flow, Groupoid, GroupoidElement};
use crate::lagrangian::DiscreteLagrangian;
use crate::numerics::{dist_inf, lift, newton_solve, norm_inf, NewtonOptions, Scalar, VectorField};

/// `η ↦ F⁻L_h(seed · exp(η)) − target`.
struct LegendreInversion<'a, L> {
    lh: &'a L,
    seed: &'a [f64],
    target: &'a [f64],
}

impl<L: DiscreteLagrangian> VectorField for LegendreInversion<'_, L> {
    fn eval<S: Scalar>(&self, eta: &[S]) -> Vec<S> {
        let seed: Vec<S> = lift(self.seed);
        let g = left_flow(self.lh.space(), &seed, eta);
        legendre_minus_generic(self.lh, &g)
            .into_iter()
            .zip(self.target)
            .map(|(a, &b)| a - b)
            .collect()
    }
}

/// Solve `F⁻L_h(g) = target` for `g = seed · exp(η)`. The source of the
/// result is the source of `seed`.
fn invert_legendre_minus<L: DiscreteLagrangian>(
    lh: &L,
    seed: &[f64],
    target: &[f64],
    options: NewtonOptions,
) -> Result<GroupoidElement, FlowError> {
    let space = lh.space();
    let system = LegendreInversion { lh, seed, target };
    let sol = newton_solve(&system, &vec![0.0; space.rank()], options)?;
    let g = left_flow(space, seed, &sol.x);
    Ok(space.normalize(GroupoidElement::new(g)))
}

/// One step of the two-step map `g_prev ↦ g_next` with
/// `F⁺L_h(g_prev) = F⁻L_h(g_next)` and `α(g_next) = β(g_prev)`.
pub fn del_step<L: DiscreteLagrangian>(
    lh: &L,
    g_prev: &GroupoidElement,
) -> Result<GroupoidElement, FlowError> {
    del_step_with(lh, g_prev, NewtonOptions::default())
}

pub fn del_step_with<L: DiscreteLagrangian>(
    lh: &L,
    g_prev: &GroupoidElement,
    options: NewtonOptions,
) -> Result<GroupoidElement, FlowError> {
    lh.space().check_element(g_prev)?;
    let target = legendre_plus(lh, g_prev).coords;
    let seed = lh.space().extrapolate(g_prev.coords());
    invert_legendre_minus(lh, &seed, &target, options)
}

/// `F⁺L_h ∘ (F⁻L_h)⁻¹`, starting Newton at the identity over `base(μ)`.
pub fn flow_map<L: DiscreteLagrangian>(
    lh: &L,
    mu: &AlgebroidCovector,
) -> Result<(GroupoidElement, AlgebroidCovector), FlowError> {
    let seed = lh.space().identity(&mu.base);
    flow_map_seeded(lh, mu, &seed, NewtonOptions::default())
}

/// [`flow_map`] from an explicit initial guess, whose source must be
/// `base(μ)`.
pub fn flow_map_seeded<L: DiscreteLagrangian>(
    lh: &L,
    mu: &AlgebroidCovector,
    seed: &GroupoidElement,
    options: NewtonOptions,
) -> Result<(GroupoidElement, AlgebroidCovector), FlowError> {
    let space = lh.space();
    space.check_element(seed)?;
    if mu.coords.len() != space.rank() {
        return Err(crate::groupoid::GroupoidError::DimensionMismatch {
            expected: space.rank(),
            found: mu.coords.len(),
        }
        .into());
    }
    let gap = space.source(seed).distance(&mu.base);
    if !(gap <= crate::groupoid::COMPOSABILITY_TOLERANCE) {
        return Err(crate::groupoid::GroupoidError::BasePointMismatch { gap }.into());
    }
    let g = invert_legendre_minus(lh, seed.coords(), &mu.coords, options)?;
    let next = legendre_plus(lh, &g);
    Ok((g, next))
}

/// Initial data for [`simulate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitialData {
    /// A momentum-level state `μ₀ ∈ A*G`; iterates the flow map.
    Momentum(AlgebroidCovector),
    /// The first arrow `g₁`; iterates the two-step map.
    Element(GroupoidElement),
}

/// A discrete evolution with its diagnostics.
///
/// Node arrays (`times`, `states`, `conserved`, `del_residuals`,
/// `composability_gaps`) have one entry per node `0..=steps`; arrow arrays
/// (`elements`, `momenta_minus`, `momenta_plus`) have one entry per step.
/// Arrow `n` (zero-based) carries node `n` to node `n + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub step_size: f64,
    pub times: Vec<f64>,
    pub elements: Vec<GroupoidElement>,
    pub momenta_minus: Vec<AlgebroidCovector>,
    pub momenta_plus: Vec<AlgebroidCovector>,
    pub states: Vec<AlgebroidCovector>,
    /// Energy or Casimir at each node; NaN where the system defines none.
    pub conserved: Vec<f64>,
    pub del_residuals: Vec<f64>,
    pub composability_gaps: Vec<f64>,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.elements.len()
    }

    /// Largest deviation of the conserved diagnostic from its initial value
    /// over nodes `0..=upto`.
    pub fn max_conserved_drift(&self, upto: usize) -> f64 {
        let c0 = self.conserved[0];
        self.conserved[..=upto.min(self.conserved.len() - 1)]
            .iter()
            .map(|c| (c - c0).abs())
            .fold(0.0, f64::max)
    }

    /// Attitudes `r₀ · g₁ ⋯ gₙ` for each node, normalized as they go.
    pub fn cumulative<G: Groupoid>(&self, space: &G, origin: &GroupoidElement) -> Vec<GroupoidElement> {
        let mut out = Vec::with_capacity(self.elements.len() + 1);
        let mut acc = origin.clone();
        out.push(acc.clone());
        for g in &self.elements {
            acc = space.normalize(GroupoidElement::new(
                space.compose_chart(acc.coords(), g.coords()),
            ));
            out.push(acc.clone());
        }
        out
    }
}

/// Run `steps` steps from `initial` with default solver options.
pub fn simulate<L: DiscreteLagrangian>(
    lh: &L,
    initial: &InitialData,
    steps: usize,
) -> Result<Trajectory, FlowError> {
    simulate_with(lh, initial, steps, NewtonOptions::default())
}

pub fn simulate_with<L: DiscreteLagrangian>(
    lh: &L,
    initial: &InitialData,
    steps: usize,
    options: NewtonOptions,
) -> Result<Trajectory, FlowError> {
    let space = lh.space();
    let mut elements: Vec<GroupoidElement> = Vec::with_capacity(steps);
    let mu0 = match initial {
        InitialData::Momentum(mu0) => {
            let mut mu = mu0.clone();
            let mut seed = space.identity(&mu.base);
            for n in 0..steps {
                let (g, next) =
                    flow_map_seeded(lh, &mu, &seed, options).map_err(|e| e.at_step(n + 1))?;
                seed = GroupoidElement::new(space.extrapolate(g.coords()));
                elements.push(g);
                mu = next;
            }
            mu0.clone()
        }
        InitialData::Element(g1) => {
            space.check_element(g1)?;
            if steps > 0 {
                elements.push(g1.clone());
            }
            for n in 1..steps {
                let g = del_step_with(lh, &elements[n - 1], options)
                    .map_err(|e| e.at_step(n + 1))?;
                elements.push(g);
            }
            legendre_minus(lh, g1)
        }
    };
    Ok(assemble(lh, mu0, elements))
}

fn assemble<L: DiscreteLagrangian>(
    lh: &L,
    mu0: AlgebroidCovector,
    elements: Vec<GroupoidElement>,
) -> Trajectory {
    let space = lh.space();
    let h = lh.step_size();
    let steps = elements.len();
    let momenta_minus: Vec<_> = elements.iter().map(|g| legendre_minus(lh, g)).collect();
    let momenta_plus: Vec<_> = elements.iter().map(|g| legendre_plus(lh, g)).collect();

    let mut states = Vec::with_capacity(steps + 1);
    states.push(mu0.clone());
    states.extend(momenta_plus.iter().cloned());

    let mut del_residuals = vec![0.0; steps + 1];
    let mut composability_gaps = vec![0.0; steps + 1];
    if steps > 0 {
        del_residuals[0] = mu0.distance(&momenta_minus[0]);
    }
    for n in 1..steps {
        del_residuals[n] = norm_inf(
            &momenta_plus[n - 1]
                .coords
                .iter()
                .zip(&momenta_minus[n].coords)
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        );
        composability_gaps[n] = composability_gap(space, &elements[n - 1..=n]);
    }

    let conserved = states
        .iter()
        .map(|s| {
            lh.conserved_quantity(s.base.coords(), &s.coords)
                .unwrap_or(f64::NAN)
        })
        .collect();
    let times = (0..=steps).map(|n| n as f64 * h).collect();

    Trajectory {
        step_size: h,
        times,
        elements,
        momenta_minus,
        momenta_plus,
        states,
        conserved,
        del_residuals,
        composability_gaps,
    }
}

/// Largest gap between the configuration sequences of two trajectories.
pub fn element_sequence_gap(a: &Trajectory, b: &Trajectory) -> f64 {
    if a.elements.len() != b.elements.len() {
        return f64::INFINITY;
    }
    a.elements
        .iter()
        .zip(&b.elements)
        .map(|(x, y)| dist_inf(x.coords(), y.coords()))
        .fold(0.0, f64::max)
}
