//! Lie groupoids `G ⇉ Q` in explicit chart coordinates.
//!
//! A [`Groupoid`] exposes its structure maps (source, target, identity,
//! inverse, partial multiplication) and an exponential chart from the
//! algebroid `AG` into `G`, all generic over [`Scalar`] so that
//! discrete Lagrangians can be differentiated through them. Two instances
//! ship: [`PairGroupoid`] (`ℝᵈ × ℝᵈ ⇉ ℝᵈ`) and [`MatrixGroup`] (a matrix
//! Lie group over a single point).

mod axioms;
mod derivatives;
mod matrix_group;
mod pair;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{dist_inf, lift, values, Scalar};

pub use axioms::{axiom_residuals, random_axiom_suite, AxiomResiduals, AxiomSuiteReport};
pub use derivatives::{
    left_derivative, left_derivative_generic, left_flow, left_tangent, right_derivative,
    right_derivative_generic, right_flow, right_tangent,
};
pub use matrix_group::{so3_hat, so3_vee, MatrixGroup, MatrixGroupKind};
pub use pair::PairGroupoid;

/// Tolerance on `‖β(g) − α(g′)‖∞` for two elements to count as composable.
pub const COMPOSABILITY_TOLERANCE: f64 = 1e-10;

/// Orthogonality defect beyond which rotations are re-projected.
pub const REORTHONORMALIZE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GroupoidError {
    #[error("elements at index {index} are not composable (gap {gap:e})")]
    NotComposable { index: usize, gap: f64 },
    #[error("product of the sequence differs from the target element by {norm:e}")]
    ProductMismatch { norm: f64 },
    #[error("algebroid vector is based at the wrong point (gap {gap:e})")]
    BasePointMismatch { gap: f64 },
    #[error("expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty sequence")]
    EmptySequence,
    #[error("element violates the group constraint (defect {defect:e})")]
    ConstraintViolation { defect: f64 },
}

/// Chart coordinates of an arrow `g ∈ G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupoidElement(Vec<f64>);

impl GroupoidElement {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

/// A point `q ∈ Q` of the base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasePoint(Vec<f64>);

impl BasePoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    /// The unique point of a group viewed as a groupoid.
    pub fn point() -> Self {
        Self(Vec::new())
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn distance(&self, other: &BasePoint) -> f64 {
        if self.0.len() != other.0.len() {
            return f64::INFINITY;
        }
        dist_inf(&self.0, &other.0)
    }
}

/// An element `ξ ∈ A_qG`, in the fixed algebroid basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebroidVector {
    pub base: BasePoint,
    pub coords: Vec<f64>,
}

impl AlgebroidVector {
    pub fn new(base: BasePoint, coords: Vec<f64>) -> Self {
        Self { base, coords }
    }

    /// The `k`-th basis vector at `base`.
    pub fn basis(base: BasePoint, rank: usize, k: usize) -> Self {
        let mut coords = vec![0.0; rank];
        coords[k] = 1.0;
        Self { base, coords }
    }
}

/// A covector `μ ∈ A*_qG`, in the dual basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebroidCovector {
    pub base: BasePoint,
    pub coords: Vec<f64>,
}

impl AlgebroidCovector {
    pub fn new(base: BasePoint, coords: Vec<f64>) -> Self {
        Self { base, coords }
    }

    pub fn zero(base: BasePoint, rank: usize) -> Self {
        Self {
            base,
            coords: vec![0.0; rank],
        }
    }

    /// `max(‖Δbase‖∞, ‖Δμ‖∞)`.
    pub fn distance(&self, other: &AlgebroidCovector) -> f64 {
        if self.coords.len() != other.coords.len() {
            return f64::INFINITY;
        }
        self.base
            .distance(&other.base)
            .max(dist_inf(&self.coords, &other.coords))
    }
}

/// A Lie groupoid in chart coordinates.
///
/// The required methods are the raw structure maps on coordinate slices,
/// generic over the scalar type so they can carry dual numbers. They do no
/// validation. The provided methods wrap them with typed, checked
/// versions.
pub trait Groupoid {
    /// Dimension of the base `Q`.
    fn base_dim(&self) -> usize;
    /// Number of chart coordinates of an arrow.
    fn chart_dim(&self) -> usize;
    /// Rank of the algebroid `AG`.
    fn rank(&self) -> usize;

    fn source_chart<S: Scalar>(&self, g: &[S]) -> Vec<S>;
    fn target_chart<S: Scalar>(&self, g: &[S]) -> Vec<S>;
    fn identity_chart<S: Scalar>(&self, q: &[S]) -> Vec<S>;
    fn inverse_chart<S: Scalar>(&self, g: &[S]) -> Vec<S>;
    /// `a · b`, assuming `β(a) = α(b)`.
    fn compose_chart<S: Scalar>(&self, a: &[S], b: &[S]) -> Vec<S>;
    /// Time-one flow of `ξ ∈ A_qG` starting at the identity `ε(q)`.
    fn exp_chart_generic<S: Scalar>(&self, q: &[S], xi: &[S]) -> Vec<S>;

    /// Initial guess for the arrow following `g_prev` in a two-step
    /// iteration. Its source must be `β(g_prev)`.
    fn extrapolate(&self, g_prev: &[f64]) -> Vec<f64>;

    /// `Some(d)` when `G = ℝᵈ × ℝᵈ`, where point differences make sense.
    fn vector_space_dim(&self) -> Option<usize> {
        None
    }

    /// How far the coordinates are from satisfying the defining
    /// constraints of `G` (zero for unconstrained charts).
    fn constraint_defect(&self, _g: &[f64]) -> f64 {
        0.0
    }

    /// Pull coordinates back onto `G` after round-off drift.
    fn project(&self, g: &[f64]) -> Vec<f64> {
        g.to_vec()
    }

    /// Distance between two arrows in the chart.
    fn element_distance(&self, a: &GroupoidElement, b: &GroupoidElement) -> f64 {
        if a.coords().len() != b.coords().len() {
            return f64::INFINITY;
        }
        dist_inf(a.coords(), b.coords())
    }

    fn check_element(&self, g: &GroupoidElement) -> Result<(), GroupoidError> {
        if g.coords().len() != self.chart_dim() {
            return Err(GroupoidError::DimensionMismatch {
                expected: self.chart_dim(),
                found: g.coords().len(),
            });
        }
        Ok(())
    }

    fn source(&self, g: &GroupoidElement) -> BasePoint {
        BasePoint(self.source_chart(g.coords()))
    }

    fn target(&self, g: &GroupoidElement) -> BasePoint {
        BasePoint(self.target_chart(g.coords()))
    }

    fn identity(&self, q: &BasePoint) -> GroupoidElement {
        GroupoidElement(self.identity_chart(q.coords()))
    }

    fn inverse(&self, g: &GroupoidElement) -> GroupoidElement {
        GroupoidElement(self.inverse_chart(g.coords()))
    }

    /// Checked multiplication `g · h`.
    fn compose(
        &self,
        g: &GroupoidElement,
        h: &GroupoidElement,
    ) -> Result<GroupoidElement, GroupoidError> {
        self.check_element(g)?;
        self.check_element(h)?;
        let gap = self.target(g).distance(&self.source(h));
        if !(gap <= COMPOSABILITY_TOLERANCE) {
            return Err(GroupoidError::NotComposable { index: 0, gap });
        }
        Ok(GroupoidElement(self.compose_chart(g.coords(), h.coords())))
    }

    /// `exp(t ξ)` as an arrow with source `q`.
    fn exp_chart(&self, q: &BasePoint, xi: &AlgebroidVector, t: f64) -> GroupoidElement {
        let scaled: Vec<f64> = xi.coords.iter().map(|x| x * t).collect();
        GroupoidElement(self.exp_chart_generic(q.coords(), &scaled))
    }

    /// Re-project an element when its constraint defect exceeds
    /// [`REORTHONORMALIZE_THRESHOLD`].
    fn normalize(&self, g: GroupoidElement) -> GroupoidElement {
        if self.constraint_defect(g.coords()) > REORTHONORMALIZE_THRESHOLD {
            GroupoidElement(self.project(g.coords()))
        } else {
            g
        }
    }

    /// Product `g₁ ⋯ g_N` of a sequence, without composability checks.
    fn product(&self, elements: &[GroupoidElement]) -> Option<GroupoidElement> {
        let (first, rest) = elements.split_first()?;
        let mut acc = first.coords().to_vec();
        for g in rest {
            acc = self.compose_chart(&acc, g.coords());
        }
        Some(GroupoidElement(acc))
    }
}

/// Composable arrows `g₁, …, g_N` with product `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleSequence {
    elements: Vec<GroupoidElement>,
    composite: GroupoidElement,
}

impl AdmissibleSequence {
    pub fn elements(&self) -> &[GroupoidElement] {
        &self.elements
    }

    pub fn composite(&self) -> &GroupoidElement {
        &self.composite
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Largest composability gap `max ‖β(gₙ) − α(gₙ₊₁)‖∞` along a sequence.
pub fn composability_gap<G: Groupoid>(space: &G, elements: &[GroupoidElement]) -> f64 {
    elements
        .windows(2)
        .map(|w| space.target(&w[0]).distance(&space.source(&w[1])))
        .fold(0.0, f64::max)
}

/// Validate `seq` as an admissible sequence for `g`.
///
/// Reports the first non-composable junction (as the index of its second
/// element) before checking the product.
pub fn check_admissible<G: Groupoid>(
    space: &G,
    seq: &[GroupoidElement],
    g: &GroupoidElement,
) -> Result<AdmissibleSequence, GroupoidError> {
    if seq.is_empty() {
        return Err(GroupoidError::EmptySequence);
    }
    space.check_element(g)?;
    for el in seq {
        space.check_element(el)?;
    }
    for (i, w) in seq.windows(2).enumerate() {
        let gap = space.target(&w[0]).distance(&space.source(&w[1]));
        if !(gap <= COMPOSABILITY_TOLERANCE) {
            return Err(GroupoidError::NotComposable { index: i + 1, gap });
        }
    }
    let product = space.product(seq).expect("nonempty");
    let norm = space.element_distance(&product, g);
    if !(norm <= COMPOSABILITY_TOLERANCE) {
        return Err(GroupoidError::ProductMismatch { norm });
    }
    Ok(AdmissibleSequence {
        elements: seq.to_vec(),
        composite: g.clone(),
    })
}

/// Build an admissible sequence whose composite is its own product.
pub fn admissible_from_elements<G: Groupoid>(
    space: &G,
    seq: Vec<GroupoidElement>,
) -> Result<AdmissibleSequence, GroupoidError> {
    let product = space.product(&seq).ok_or(GroupoidError::EmptySequence)?;
    check_admissible(space, &seq, &product)
}

/// Apply admissibility-preserving junction moves to a sequence: for each
/// junction `j` between `g_j` and `g_{j+1}`, replace the pair by
/// `(g_j · exp(η_j), exp(η_j)⁻¹ · g_{j+1})`. The composite is unchanged.
pub fn move_junctions<G: Groupoid, S: Scalar>(
    space: &G,
    elements: &[GroupoidElement],
    etas: &[Vec<S>],
) -> Vec<Vec<S>> {
    assert_eq!(etas.len() + 1, elements.len(), "one move per junction");
    let mut out: Vec<Vec<S>> = elements.iter().map(|g| lift(g.coords())).collect();
    for (j, eta) in etas.iter().enumerate() {
        let left = left_flow(space, &out[j], eta);
        let right = right_flow(space, &out[j + 1], eta);
        out[j] = left;
        out[j + 1] = right;
    }
    out
}

/// Strip dual layers from a list of coordinate vectors.
pub fn element_values<S: Scalar>(elements: &[Vec<S>]) -> Vec<GroupoidElement> {
    elements
        .iter()
        .map(|g| GroupoidElement(values(g)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ScalarField;
    use proptest::prelude::*;

    fn max_gap(a: &GroupoidElement, b: &GroupoidElement) -> f64 {
        dist_inf(a.coords(), b.coords())
    }

    fn check_axioms<G: Groupoid>(space: &G, g: &GroupoidElement, h: &GroupoidElement, k: &GroupoidElement) {
        let a = space.source(g);
        let b = space.target(g);
        let left_id = space.compose(&space.identity(&a), g).unwrap();
        let right_id = space.compose(g, &space.identity(&b)).unwrap();
        let inv = space.compose(g, &space.inverse(g)).unwrap();
        assert!(max_gap(&left_id, g) < 1e-12);
        assert!(max_gap(&right_id, g) < 1e-12);
        assert!(max_gap(&inv, &space.identity(&a)) < 1e-12);
        let gh_k = space.compose(&space.compose(g, h).unwrap(), k).unwrap();
        let g_hk = space.compose(g, &space.compose(h, k).unwrap()).unwrap();
        assert!(max_gap(&gh_k, &g_hk) < 1e-12);
    }

    proptest! {
        #[test]
        fn pair_groupoid_axioms(q in proptest::collection::vec(-10.0..10.0f64, 12)) {
            let p = PairGroupoid::new(3);
            let g = p.element(&q[0..3], &q[3..6]);
            let h = p.element(&q[3..6], &q[6..9]);
            let k = p.element(&q[6..9], &q[9..12]);
            check_axioms(&p, &g, &h, &k);
        }

        #[test]
        fn so3_axioms(x in proptest::collection::vec(-3.0..3.0f64, 9)) {
            let s = MatrixGroup::so3();
            let g = GroupoidElement::new(s.exp(&x[0..3]));
            let h = GroupoidElement::new(s.exp(&x[3..6]));
            let k = GroupoidElement::new(s.exp(&x[6..9]));
            check_axioms(&s, &g, &h, &k);
        }

        #[test]
        fn junction_moves_preserve_the_composite(
            q in proptest::collection::vec(-2.0..2.0f64, 4),
            eta in proptest::collection::vec(-1.0..1.0f64, 6),
        ) {
            let p = PairGroupoid::new(1);
            let seq: Vec<_> = q.windows(2).map(|w| p.element(&w[0..1], &w[1..2])).collect();
            let moved = move_junctions(&p, &seq, &[vec![eta[0]], vec![eta[1]]]);
            let moved = element_values(&moved);
            let composite = p.product(&seq).unwrap();
            prop_assert!(check_admissible(&p, &moved, &composite).is_ok());

            let s = MatrixGroup::so3();
            let seq: Vec<_> = (0..3)
                .map(|i| GroupoidElement::new(s.exp(&[q[i], q[i + 1], 0.3 * q[i]])))
                .collect();
            let moved = move_junctions(&s, &seq, &[eta[0..3].to_vec(), eta[3..6].to_vec()]);
            let moved = element_values(&moved);
            let composite = s.product(&seq).unwrap();
            prop_assert!(check_admissible(&s, &moved, &composite).is_ok());
        }
    }

    // A cubic polynomial in the matrix entries with fixed coefficients.
    struct Polynomial(Vec<f64>);
    impl ScalarField for Polynomial {
        fn eval<S: Scalar>(&self, g: &[S]) -> S {
            let c = &self.0;
            let mut acc = S::zero();
            for i in 0..g.len() {
                let j = (i + 4) % g.len();
                let k = (i + 7) % g.len();
                acc += g[i] * c[i] + g[i] * g[j] * c[i + 9] + g[i] * g[j] * g[k] * c[i + 18];
            }
            acc
        }
    }

    struct LeftDerived<'a, G, F> {
        space: &'a G,
        f: &'a F,
        xi: Vec<f64>,
    }

    impl<G: Groupoid, F: ScalarField> ScalarField for LeftDerived<'_, G, F> {
        fn eval<S: Scalar>(&self, g: &[S]) -> S {
            left_derivative_generic(self.space, self.f, g, &self.xi)
        }
    }

    #[test]
    fn left_fields_respect_the_bracket() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let s = MatrixGroup::so3();
        for _ in 0..5 {
            let f = Polynomial((0..27).map(|_| rng.gen_range(-1.0..1.0)).collect());
            for _ in 0..5 {
                let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let g = s.exp(&x);
                for a in 0..3 {
                    for b in 0..3 {
                        let ea = AlgebroidVector::basis(BasePoint::point(), 3, a).coords;
                        let eb = AlgebroidVector::basis(BasePoint::point(), 3, b).coords;
                        let xa = LeftDerived { space: &s, f: &f, xi: eb.clone() };
                        let xb = LeftDerived { space: &s, f: &f, xi: ea.clone() };
                        let commutator = left_derivative_generic(&s, &xa, &g, &ea)
                            - left_derivative_generic(&s, &xb, &g, &eb);
                        let bracket = s.vee(&s.commutator(&s.hat(&ea), &s.hat(&eb)));
                        let direct = left_derivative_generic(&s, &f, &g, &bracket);
                        assert!((commutator - direct).abs() < 1e-10, "{commutator} vs {direct}");
                    }
                }
            }
        }
    }
}
