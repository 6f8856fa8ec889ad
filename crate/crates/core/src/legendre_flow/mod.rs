//! Discrete Legendre transforms and the discrete flow on `A*G`.
//!
//! Covectors on `G` are stored by their chart components (`μ = Σ μᵢ dgⁱ`).
//! The cotangent groupoid maps pair such a covector with the right- and
//! left-invariant tangent fields, `α̃(μ)·ξ = μ·→X_ξ(g)` and
//! `β̃(μ)·ξ = μ·←X_ξ(g)`, so that `F⁻L_h = α̃∘dL_h` and
//! `F⁺L_h = β̃∘dL_h`. On the pair groupoid with `μ = (p₀, p₁)` this gives
//! `α̃(μ) = (q₀, −p₀)` and `β̃(μ) = (q₁, p₁)`.

mod action;
mod step;
mod symplectic;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groupoid::{
    left_derivative_generic, left_tangent, right_derivative_generic, right_tangent, Groupoid,
    GroupoidElement, GroupoidError,
};
use crate::lagrangian::DiscreteLagrangian;
use crate::numerics::{dot, grad_generic, NumericsError, Scalar};

pub use crate::groupoid::AlgebroidCovector;
pub use action::{action_differential, action_sum, linear_guess, solve_boundary_value};
pub use step::{
    del_step, del_step_with, element_sequence_gap, flow_map, flow_map_seeded, simulate,
    simulate_with, InitialData, Trajectory,
};
pub use symplectic::{one_step_jacobian, symplecticity_defect};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular Jacobian at Newton iteration {iteration}: the discrete Legendre transform is not invertible here")]
    SingularJacobian { iteration: usize },
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("sequence is not admissible: {0}")]
    NotAdmissible(GroupoidError),
    #[error("expected {expected} variations, found {found}")]
    VariationCount { expected: usize, found: usize },
    #[error("operation requires the pair groupoid over a vector space")]
    NotPairInstance,
    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<FlowError>,
    },
}

impl From<NumericsError> for FlowError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::NoConvergence {
                iterations,
                residual,
            } => Self::NoConvergence {
                iterations,
                residual,
            },
            NumericsError::SingularJacobian { iteration } => Self::SingularJacobian { iteration },
            NumericsError::NonFinite => Self::NonFinite,
        }
    }
}

impl FlowError {
    pub(crate) fn at_step(self, step: usize) -> Self {
        Self::AtStep {
            step,
            source: Box::new(self),
        }
    }

    /// The error with any step annotation removed.
    pub fn root(&self) -> &FlowError {
        match self {
            Self::AtStep { source, .. } => source.root(),
            other => other,
        }
    }
}

/// A covector `μ ∈ T*_gG` in the chart of `G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CotangentElement {
    pub base: GroupoidElement,
    pub components: Vec<f64>,
}

impl CotangentElement {
    pub fn new(base: GroupoidElement, components: Vec<f64>) -> Self {
        Self { base, components }
    }

    /// The zero covector over `g`.
    pub fn zero(base: GroupoidElement) -> Self {
        let n = base.coords().len();
        Self {
            base,
            components: vec![0.0; n],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&c| c == 0.0)
    }
}

pub(crate) fn unit(rank: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; rank];
    e[k] = 1.0;
    e
}

/// `dL_h(g)` in chart components.
pub fn differential<L: DiscreteLagrangian>(lh: &L, g: &GroupoidElement) -> CotangentElement {
    CotangentElement::new(g.clone(), grad_generic(lh, g.coords()))
}

/// `α̃(μ) ∈ A*_{α(g)}G`.
pub fn cotangent_source<G: Groupoid>(space: &G, mu: &CotangentElement) -> AlgebroidCovector {
    let g = mu.base.coords();
    let coords = (0..space.rank())
        .map(|k| dot(&mu.components, &right_tangent(space, g, &unit(space.rank(), k))))
        .collect();
    AlgebroidCovector::new(space.source(&mu.base), coords)
}

/// `β̃(μ) ∈ A*_{β(g)}G`.
pub fn cotangent_target<G: Groupoid>(space: &G, mu: &CotangentElement) -> AlgebroidCovector {
    let g = mu.base.coords();
    let coords = (0..space.rank())
        .map(|k| dot(&mu.components, &left_tangent(space, g, &unit(space.rank(), k))))
        .collect();
    AlgebroidCovector::new(space.target(&mu.base), coords)
}

/// Components of `F⁻L_h(g)` over any scalar.
pub fn legendre_minus_generic<L: DiscreteLagrangian, S: Scalar>(lh: &L, g: &[S]) -> Vec<S> {
    let r = lh.space().rank();
    (0..r)
        .map(|k| right_derivative_generic(lh.space(), lh, g, &unit(r, k)))
        .collect()
}

/// Components of `F⁺L_h(g)` over any scalar.
pub fn legendre_plus_generic<L: DiscreteLagrangian, S: Scalar>(lh: &L, g: &[S]) -> Vec<S> {
    let r = lh.space().rank();
    (0..r)
        .map(|k| left_derivative_generic(lh.space(), lh, g, &unit(r, k)))
        .collect()
}

/// `F⁻L_h(g) ∈ A*_{α(g)}G`.
pub fn legendre_minus<L: DiscreteLagrangian>(lh: &L, g: &GroupoidElement) -> AlgebroidCovector {
    AlgebroidCovector::new(lh.space().source(g), legendre_minus_generic(lh, g.coords()))
}

/// `F⁺L_h(g) ∈ A*_{β(g)}G`.
pub fn legendre_plus<L: DiscreteLagrangian>(lh: &L, g: &GroupoidElement) -> AlgebroidCovector {
    AlgebroidCovector::new(lh.space().target(g), legendre_plus_generic(lh, g.coords()))
}

/// DEL residual over any scalar: `F⁺L_h(g_left) − F⁻L_h(g_right)`.
pub fn del_residual_generic<L: DiscreteLagrangian, S: Scalar>(
    lh: &L,
    g_left: &[S],
    g_right: &[S],
) -> Vec<S> {
    legendre_plus_generic(lh, g_left)
        .into_iter()
        .zip(legendre_minus_generic(lh, g_right))
        .map(|(a, b)| a - b)
        .collect()
}

/// `←X_k[L_h](g_left) − →X_k[L_h](g_right)` for each basis section.
pub fn del_residual<L: DiscreteLagrangian>(
    lh: &L,
    g_left: &GroupoidElement,
    g_right: &GroupoidElement,
) -> Result<Vec<f64>, FlowError> {
    let space = lh.space();
    space.check_element(g_left)?;
    space.check_element(g_right)?;
    let gap = space.target(g_left).distance(&space.source(g_right));
    if !(gap <= crate::groupoid::COMPOSABILITY_TOLERANCE) {
        return Err(GroupoidError::NotComposable { index: 1, gap }.into());
    }
    Ok(del_residual_generic(lh, g_left.coords(), g_right.coords()))
}
