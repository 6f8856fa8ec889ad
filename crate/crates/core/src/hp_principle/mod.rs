//! The discrete Hamilton–Pontryagin principle on paths in `T*G`.
//!
//! A configuration is a list of `N` paths `γₙ: [0, 1] → T*G`, each sampled
//! at nodes `0 = s₀ < … < s_{M−1} = 1`. Every path starts on the zero
//! section, and the arrows under the starting points form an admissible
//! sequence for a fixed composite. The action
//!
//! ```text
//! S̃_h = Σₙ [ ∫₀¹ L_h(π_G γₙ(s)) ds + ∫_{γₙ} θ̃ ]
//! ```
//!
//! is discretized with a quadrature rule on each segment of the linearly
//! interpolated arrow chart, and the line integral of the canonical
//! one-form `θ̃ = μ·dg` by the segment midpoint rule `Σ μ̄·Δg`.
//!
//! Covectors are canonical chart components. On the pair groupoid with
//! `μ = (μ₀, μ₁)` the one-form reads `μ₀·q⁰′ + μ₁·q¹′`, so the momenta
//! `p⁰ = −μ₀`, `p¹ = μ₁` recover the familiar `−p⁰·q⁰′ + p¹·q¹′`.
//!
//! The continuous stationary set is degenerate (any vertical path with the
//! right endpoint is stationary), so the principle is verified on the
//! explicit solution family `γₙ(s) = s·dL_h(gₙ)` rather than solved for.
//! The finite-dimensional Leok–Ohsawa action, which is nondegenerate, is
//! solved directly in [`leok_ohsawa_solve`].
//!
//! For `N = 1` the action is a Morse family generating the Lagrangian
//! submanifold `dL_h(G) ⊂ T*G`; nothing here depends on that view.

mod compare;
mod leok_ohsawa;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groupoid::{
    check_admissible, composability_gap, left_flow, right_flow, AdmissibleSequence, Groupoid,
    GroupoidElement, GroupoidError,
};
use crate::lagrangian::DiscreteLagrangian;
use crate::legendre_flow::{
    cotangent_source, cotangent_target, del_residual, differential, CotangentElement, FlowError,
};
use crate::numerics::{lift, norm_inf, Dual, NumericsError, QuadratureRule, Scalar};

pub use compare::{compare_formulations, FormulationComparison};
pub use leok_ohsawa::{
    leok_ohsawa_action, leok_ohsawa_gradient, leok_ohsawa_solve, Boundary, LeokOhsawaAction,
    LeokOhsawaPoint,
    LeokOhsawaSolution,
};

/// Largest DEL residual accepted by [`construct_hp_solution`].
pub const DEL_RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HpError {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("DEL residual {residual:e} at junction {junction} exceeds {DEL_RESIDUAL_TOLERANCE:e}")]
    ResidualTooLarge { junction: usize, residual: f64 },
    #[error("the Leok–Ohsawa action needs the pair groupoid over a vector space")]
    NotVectorSpaceInstance,
    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular Jacobian at Newton iteration {iteration}")]
    SingularJacobian { iteration: usize },
    #[error("non-finite value encountered")]
    NonFinite,
    #[error(transparent)]
    Flow(#[from] FlowError),
}

impl From<NumericsError> for HpError {
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

impl From<GroupoidError> for HpError {
    fn from(e: GroupoidError) -> Self {
        Self::Flow(FlowError::Groupoid(e))
    }
}

/// One path `γ: [0, 1] → T*G` sampled at increasing parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CotangentPathDiscretization {
    params: Vec<f64>,
    nodes: Vec<CotangentElement>,
}

impl CotangentPathDiscretization {
    /// Validate and build a path. Parameters must run strictly upward from
    /// 0 to 1, there must be at least two nodes, and the first covector
    /// must vanish.
    pub fn new(params: Vec<f64>, nodes: Vec<CotangentElement>) -> Result<Self, HpError> {
        if nodes.len() < 2 {
            return Err(HpError::InvalidConfiguration(format!(
                "a path needs at least 2 nodes, found {}",
                nodes.len()
            )));
        }
        if params.len() != nodes.len() {
            return Err(HpError::InvalidConfiguration(format!(
                "{} parameters for {} nodes",
                params.len(),
                nodes.len()
            )));
        }
        if params[0] != 0.0 || *params.last().expect("nonempty") != 1.0 {
            return Err(HpError::InvalidConfiguration(
                "node parameters must start at 0 and end at 1".into(),
            ));
        }
        if params.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(HpError::InvalidConfiguration(
                "node parameters must be strictly increasing".into(),
            ));
        }
        if !nodes[0].is_zero() {
            return Err(HpError::InvalidConfiguration(
                "the first node must lie on the zero section".into(),
            ));
        }
        if nodes
            .iter()
            .any(|n| n.components.len() != n.base.coords().len())
        {
            return Err(HpError::InvalidConfiguration(
                "covector and arrow chart dimensions differ".into(),
            ));
        }
        Ok(Self { params, nodes })
    }

    /// Nodes at `s = k/(M−1)`, `k = 0, …, M−1`.
    pub fn uniform(nodes: Vec<CotangentElement>) -> Result<Self, HpError> {
        let params = if nodes.len() < 2 {
            vec![0.0; nodes.len()]
        } else {
            uniform_params(nodes.len())
        };
        Self::new(params, nodes)
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn nodes(&self) -> &[CotangentElement] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Whether `γ(0)` lies on the zero section. Always true for a value
    /// built through [`CotangentPathDiscretization::new`].
    pub fn starts_on_zero_section(&self) -> bool {
        self.nodes[0].is_zero()
    }

    /// `γ(0)`.
    pub fn start(&self) -> &CotangentElement {
        &self.nodes[0]
    }

    /// `γ(1)`.
    pub fn end(&self) -> &CotangentElement {
        self.nodes.last().expect("at least two nodes")
    }
}

fn uniform_params(m: usize) -> Vec<f64> {
    let last = (m - 1) as f64;
    (0..m)
        .map(|k| if k + 1 == m { 1.0 } else { k as f64 / last })
        .collect()
}

/// Paths `γ₁, …, γ_N` whose starting arrows are admissible for a fixed
/// composite, with the quadrature rule used for the `L_h` integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpConfiguration {
    paths: Vec<CotangentPathDiscretization>,
    composite: GroupoidElement,
    rule: QuadratureRule,
}

impl HpConfiguration {
    pub fn new<G: Groupoid>(
        space: &G,
        paths: Vec<CotangentPathDiscretization>,
        composite: GroupoidElement,
        rule: QuadratureRule,
    ) -> Result<Self, HpError> {
        for path in &paths {
            for node in path.nodes() {
                space
                    .check_element(&node.base)
                    .map_err(|e| HpError::InvalidConfiguration(e.to_string()))?;
            }
        }
        let starts: Vec<GroupoidElement> = paths.iter().map(|p| p.start().base.clone()).collect();
        check_admissible(space, &starts, &composite).map_err(|e| {
            HpError::InvalidConfiguration(format!("initial arrows are not admissible: {e}"))
        })?;
        Ok(Self {
            paths,
            composite,
            rule,
        })
    }

    pub fn paths(&self) -> &[CotangentPathDiscretization] {
        &self.paths
    }

    pub fn composite(&self) -> &GroupoidElement {
        &self.composite
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// The projected endpoints `π_G(γₙ(1))`.
    pub fn end_elements(&self) -> Vec<GroupoidElement> {
        self.paths.iter().map(|p| p.end().base.clone()).collect()
    }

    /// The covector endpoints `μₙ = γₙ(1)`.
    pub fn end_covectors(&self) -> Vec<CotangentElement> {
        self.paths.iter().map(|p| p.end().clone()).collect()
    }

    /// A copy with covector endpoint `μₙ(1)` (zero-based `path`) scaled by
    /// `factor`.
    pub fn with_scaled_endpoint(&self, path: usize, factor: f64) -> Self {
        let mut out = self.clone();
        let end = out.paths[path].nodes.last_mut().expect("at least two nodes");
        for c in &mut end.components {
            *c *= factor;
        }
        out
    }

    /// A copy with `delta` added to covector component `component` of node
    /// `node` on `path`. Node 0 is left alone to keep the zero section.
    pub fn with_covector_offset(&self, path: usize, node: usize, component: usize, delta: f64) -> Self {
        let mut out = self.clone();
        if node > 0 {
            out.paths[path].nodes[node].components[component] += delta;
        }
        out
    }
}

/// Node values of a configuration lifted into a scalar type, laid out as
/// `[path][node][coordinate]`.
#[derive(Clone)]
struct LiftedNodes<S> {
    arrows: Vec<Vec<Vec<S>>>,
    covectors: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> LiftedNodes<S> {
    fn from_config(cfg: &HpConfiguration) -> Self {
        let arrows = cfg
            .paths
            .iter()
            .map(|p| p.nodes.iter().map(|n| lift(n.base.coords())).collect())
            .collect();
        let covectors = cfg
            .paths
            .iter()
            .map(|p| p.nodes.iter().map(|n| lift(&n.components)).collect())
            .collect();
        Self { arrows, covectors }
    }
}

fn path_action<L: DiscreteLagrangian, S: Scalar>(
    lh: &L,
    rule: &QuadratureRule,
    params: &[f64],
    g: &[Vec<S>],
    mu: &[Vec<S>],
) -> S {
    let mut total = S::zero();
    for k in 0..params.len() - 1 {
        let ds = params[k + 1] - params[k];
        let (a, b) = (&g[k], &g[k + 1]);
        let integral = rule.integrate(|tau| {
            let point: Vec<S> = a
                .iter()
                .zip(b)
                .map(|(&x, &y)| x * (1.0 - tau) + y * tau)
                .collect();
            lh.eval(&point)
        });
        total += integral * ds;
        for i in 0..a.len() {
            let mu_bar = (mu[k][i] + mu[k + 1][i]) * 0.5;
            total += mu_bar * (b[i] - a[i]);
        }
    }
    total
}

fn action_from_nodes<L: DiscreteLagrangian, S: Scalar>(
    lh: &L,
    cfg: &HpConfiguration,
    nodes: &LiftedNodes<S>,
) -> S {
    (0..cfg.paths.len()).fold(S::zero(), |acc, n| {
        acc + path_action(
            lh,
            &cfg.rule,
            &cfg.paths[n].params,
            &nodes.arrows[n],
            &nodes.covectors[n],
        )
    })
}

/// The discretized Hamilton–Pontryagin action `S̃_h`.
pub fn hp_action<L: DiscreteLagrangian>(cfg: &HpConfiguration, lh: &L) -> f64 {
    action_from_nodes(lh, cfg, &LiftedNodes::<f64>::from_config(cfg))
}

/// One direction tangent to the space of admissible configurations.
///
/// Arrow moves are expressed through the invariant flows, so that on a
/// constrained chart (such as rotation matrices) they stay on `G`. Indices
/// are zero-based; `junction j` sits between paths `j` and `j + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VariationDirection {
    /// A covector chart component at a node `s > 0`.
    Covector {
        path: usize,
        node: usize,
        component: usize,
    },
    /// `g ↦ g·exp(t eₖ)` at an interior node.
    LeftArrow {
        path: usize,
        node: usize,
        component: usize,
    },
    /// `g ↦ exp(t eₖ)⁻¹·g` at an interior node.
    RightArrow {
        path: usize,
        node: usize,
        component: usize,
    },
    /// Junction move of the starting arrows of paths `j`, `j + 1`, which
    /// keeps them admissible for the same composite.
    InitialJunction { junction: usize, component: usize },
    /// Junction move of the end arrows of paths `j`, `j + 1`.
    TerminalJunction { junction: usize, component: usize },
}

impl VariationDirection {
    /// The paths whose nodes this direction moves.
    pub fn paths(&self) -> (usize, Option<usize>) {
        match *self {
            Self::Covector { path, .. }
            | Self::LeftArrow { path, .. }
            | Self::RightArrow { path, .. } => (path, None),
            Self::InitialJunction { junction, .. } | Self::TerminalJunction { junction, .. } => {
                (junction, Some(junction + 1))
            }
        }
    }

    pub fn touches(&self, path: usize) -> bool {
        let (a, b) = self.paths();
        a == path || b == Some(path)
    }
}

/// A spanning set of admissible variation directions for a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationBasis {
    directions: Vec<VariationDirection>,
}

impl VariationBasis {
    /// All directions: covector components at every node after the first,
    /// left and right arrow moves at interior nodes, and junction moves at
    /// both ends of the paths.
    pub fn full<G: Groupoid>(space: &G, cfg: &HpConfiguration) -> Self {
        let rank = space.rank();
        let chart = space.chart_dim();
        let mut directions = Vec::new();
        for (path, p) in cfg.paths.iter().enumerate() {
            let m = p.node_count();
            for node in 1..m {
                for component in 0..chart {
                    directions.push(VariationDirection::Covector {
                        path,
                        node,
                        component,
                    });
                }
            }
            for node in 1..m - 1 {
                for component in 0..rank {
                    directions.push(VariationDirection::LeftArrow {
                        path,
                        node,
                        component,
                    });
                    directions.push(VariationDirection::RightArrow {
                        path,
                        node,
                        component,
                    });
                }
            }
        }
        for junction in 0..cfg.len().saturating_sub(1) {
            for component in 0..rank {
                directions.push(VariationDirection::InitialJunction {
                    junction,
                    component,
                });
                directions.push(VariationDirection::TerminalJunction {
                    junction,
                    component,
                });
            }
        }
        Self { directions }
    }

    pub fn from_directions(directions: Vec<VariationDirection>) -> Self {
        Self { directions }
    }

    /// The directions that move nodes of `path`.
    pub fn touching(&self, path: usize) -> Self {
        Self {
            directions: self
                .directions
                .iter()
                .copied()
                .filter(|d| d.touches(path))
                .collect(),
        }
    }

    pub fn directions(&self) -> &[VariationDirection] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Largest first-order change of the constraints (zero-section start,
    /// composability and product of the starting arrows) along any
    /// direction.
    pub fn max_constraint_violation<G: Groupoid>(&self, space: &G, cfg: &HpConfiguration) -> f64 {
        self.directions
            .iter()
            .map(|&d| {
                let nodes = perturbed(space, &LiftedNodes::from_config(cfg), d);
                linearized_constraints(space, cfg, &nodes)
            })
            .fold(0.0, f64::max)
    }
}

fn unit_dual(rank: usize, k: usize) -> Vec<Dual<f64>> {
    (0..rank)
        .map(|i| Dual::new(0.0, if i == k { 1.0 } else { 0.0 }))
        .collect()
}

fn perturbed<G: Groupoid>(
    space: &G,
    base: &LiftedNodes<Dual<f64>>,
    direction: VariationDirection,
) -> LiftedNodes<Dual<f64>> {
    let mut nodes = base.clone();
    let rank = space.rank();
    match direction {
        VariationDirection::Covector {
            path,
            node,
            component,
        } => nodes.covectors[path][node][component].eps = 1.0,
        VariationDirection::LeftArrow {
            path,
            node,
            component,
        } => {
            let g = &nodes.arrows[path][node];
            nodes.arrows[path][node] = left_flow(space, g, &unit_dual(rank, component));
        }
        VariationDirection::RightArrow {
            path,
            node,
            component,
        } => {
            let g = &nodes.arrows[path][node];
            nodes.arrows[path][node] = right_flow(space, g, &unit_dual(rank, component));
        }
        VariationDirection::InitialJunction {
            junction,
            component,
        } => {
            let eta = unit_dual(rank, component);
            let left = &nodes.arrows[junction][0];
            nodes.arrows[junction][0] = left_flow(space, left, &eta);
            let right = &nodes.arrows[junction + 1][0];
            nodes.arrows[junction + 1][0] = right_flow(space, right, &eta);
        }
        VariationDirection::TerminalJunction {
            junction,
            component,
        } => {
            let eta = unit_dual(rank, component);
            let last_left = nodes.arrows[junction].len() - 1;
            let left = &nodes.arrows[junction][last_left];
            nodes.arrows[junction][last_left] = left_flow(space, left, &eta);
            let last_right = nodes.arrows[junction + 1].len() - 1;
            let right = &nodes.arrows[junction + 1][last_right];
            nodes.arrows[junction + 1][last_right] = right_flow(space, right, &eta);
        }
    }
    nodes
}

fn linearized_constraints<G: Groupoid>(
    space: &G,
    cfg: &HpConfiguration,
    nodes: &LiftedNodes<Dual<f64>>,
) -> f64 {
    let mut worst = 0.0_f64;
    for mu in &nodes.covectors {
        for c in &mu[0] {
            worst = worst.max(c.eps.abs());
        }
    }
    let starts: Vec<&Vec<Dual<f64>>> = nodes.arrows.iter().map(|p| &p[0]).collect();
    for w in starts.windows(2) {
        let t = space.target_chart(w[0]);
        let s = space.source_chart(w[1]);
        for (a, b) in t.iter().zip(&s) {
            worst = worst.max((a.eps - b.eps).abs());
        }
    }
    let mut product = starts[0].clone();
    for g in &starts[1..] {
        product = space.compose_chart(&product, g);
    }
    debug_assert_eq!(product.len(), cfg.composite.coords().len());
    for c in &product {
        worst = worst.max(c.eps.abs());
    }
    worst
}

fn path_slope<L: DiscreteLagrangian>(
    lh: &L,
    cfg: &HpConfiguration,
    nodes: &LiftedNodes<Dual<f64>>,
    path: usize,
) -> f64 {
    path_action(
        lh,
        &cfg.rule,
        &cfg.paths[path].params,
        &nodes.arrows[path],
        &nodes.covectors[path],
    )
    .eps
}

/// Directional derivatives of [`hp_action`] along each basis direction,
/// by forward-mode differentiation.
pub fn hp_differential<L: DiscreteLagrangian>(
    cfg: &HpConfiguration,
    lh: &L,
    basis: &VariationBasis,
) -> Vec<f64> {
    let base = LiftedNodes::<Dual<f64>>::from_config(cfg);
    basis
        .directions
        .iter()
        .map(|&d| {
            let nodes = perturbed(lh.space(), &base, d);
            let (first, second) = d.paths();
            path_slope(lh, cfg, &nodes, first)
                + second.map_or(0.0, |n| path_slope(lh, cfg, &nodes, n))
        })
        .collect()
}

/// The explicit solution `γₙ(s) = (gₙ, s·dL_h(gₙ))` over a DEL sequence,
/// sampled at `nodes` uniformly spaced parameters and integrated with the
/// two-point Gauss rule.
pub fn construct_hp_solution<L: DiscreteLagrangian>(
    lh: &L,
    trajectory: &AdmissibleSequence,
    nodes: usize,
) -> Result<HpConfiguration, HpError> {
    construct_hp_solution_with(lh, trajectory, nodes, QuadratureRule::gauss(2))
}

pub fn construct_hp_solution_with<L: DiscreteLagrangian>(
    lh: &L,
    trajectory: &AdmissibleSequence,
    nodes: usize,
    rule: QuadratureRule,
) -> Result<HpConfiguration, HpError> {
    if nodes < 2 {
        return Err(HpError::InvalidConfiguration(format!(
            "a path needs at least 2 nodes, found {nodes}"
        )));
    }
    let elements = trajectory.elements();
    for (j, w) in elements.windows(2).enumerate() {
        let residual = norm_inf(&del_residual(lh, &w[0], &w[1])?);
        if !(residual <= DEL_RESIDUAL_TOLERANCE) {
            return Err(HpError::ResidualTooLarge {
                junction: j + 1,
                residual,
            });
        }
    }
    let params = uniform_params(nodes);
    let paths = elements
        .iter()
        .map(|g| {
            let dl = differential(lh, g);
            let samples = params
                .iter()
                .map(|&s| {
                    CotangentElement::new(
                        g.clone(),
                        dl.components.iter().map(|c| s * c).collect(),
                    )
                })
                .collect();
            CotangentPathDiscretization::new(params.clone(), samples)
        })
        .collect::<Result<Vec<_>, _>>()?;
    HpConfiguration::new(lh.space(), paths, trajectory.composite().clone(), rule)
}

/// Pass/fail of the three theorem conclusions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremPass {
    pub admissible: bool,
    pub legendre: bool,
    pub composable: bool,
}

/// Residuals of the three conclusions: (i) the endpoint arrows form an
/// admissible sequence, (ii) `μₙ(1) = dL_h(gₙ)`, (iii) the covector
/// endpoints are composable in `T*G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub admissible_gap: f64,
    pub legendre_residual: f64,
    pub composability_gap: f64,
    pub pass: TheoremPass,
}

impl TheoremReport {
    pub fn all_pass(&self) -> bool {
        self.pass.admissible && self.pass.legendre && self.pass.composable
    }
}

/// Check the theorem conclusions on a configuration, each against `tol`.
pub fn verify_theorem<L: DiscreteLagrangian>(
    cfg: &HpConfiguration,
    lh: &L,
    tol: f64,
) -> TheoremReport {
    let space = lh.space();
    let ends = cfg.end_elements();
    let product = space.product(&ends).expect("configuration has paths");
    let admissible_gap =
        composability_gap(space, &ends).max(space.element_distance(&product, &cfg.composite));

    let covectors = cfg.end_covectors();
    let legendre_residual = covectors
        .iter()
        .map(|mu| {
            let dl = differential(lh, &mu.base);
            mu.components
                .iter()
                .zip(&dl.components)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);

    let composability_gap = covectors
        .windows(2)
        .map(|w| cotangent_target(space, &w[0]).distance(&cotangent_source(space, &w[1])))
        .fold(0.0, f64::max);

    let within = |x: f64| x <= tol;
    TheoremReport {
        admissible_gap,
        legendre_residual,
        composability_gap,
        pass: TheoremPass {
            admissible: within(admissible_gap),
            legendre: within(legendre_residual),
            composable: within(composability_gap),
        },
    }
}

/// The singular Hamiltonian `H̃ = −L_h ∘ π_G`, constant on each fiber.
pub fn hamiltonian_htilde<L: DiscreteLagrangian>(lh: &L, mu: &CotangentElement) -> f64 {
    -lh.eval(mu.base.coords())
}

#[cfg(test)]
mod tests;
