//! Residuals of the groupoid axioms, and a seeded random suite over the
//! built-in instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Groupoid, GroupoidElement, GroupoidError, MatrixGroup, PairGroupoid};

/// Largest chart discrepancy in each axiom for one composable triple.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AxiomResiduals {
    pub associativity: f64,
    pub identity: f64,
    pub inverse: f64,
}

impl AxiomResiduals {
    pub fn max(&self) -> f64 {
        self.associativity.max(self.identity).max(self.inverse)
    }

    fn merge(self, other: Self) -> Self {
        Self {
            associativity: self.associativity.max(other.associativity),
            identity: self.identity.max(other.identity),
            inverse: self.inverse.max(other.inverse),
        }
    }
}

/// Check `(gh)k = g(hk)`, `ε(α(g))·g = g = g·ε(β(g))` and
/// `g·g⁻¹ = ε(α(g))`, `g⁻¹·g = ε(β(g))` for a composable triple.
pub fn axiom_residuals<G: Groupoid>(
    space: &G,
    g: &GroupoidElement,
    h: &GroupoidElement,
    k: &GroupoidElement,
) -> Result<AxiomResiduals, GroupoidError> {
    let d = |a: &GroupoidElement, b: &GroupoidElement| space.element_distance(a, b);
    let a = space.source(g);
    let b = space.target(g);
    let (ea, eb) = (space.identity(&a), space.identity(&b));
    let inv = space.inverse(g);

    let gh_k = space.compose(&space.compose(g, h)?, k)?;
    let g_hk = space.compose(g, &space.compose(h, k)?)?;
    let identity = d(&space.compose(&ea, g)?, g).max(d(&space.compose(g, &eb)?, g));
    let inverse = d(&space.compose(g, &inv)?, &ea).max(d(&space.compose(&inv, g)?, &eb));
    Ok(AxiomResiduals {
        associativity: d(&gh_k, &g_hk),
        identity,
        inverse,
    })
}

/// Outcome of the random suite on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomSuiteReport {
    pub instance: String,
    pub cases: usize,
    pub residuals: AxiomResiduals,
}

/// `cases` random composable triples on the pair groupoid over `ℝ³`
/// (coordinates uniform in `[−10, 10]`) and on `SO(3)` (exponentials of
/// vectors uniform in `[−3, 3]³`), drawn from a ChaCha stream seeded with
/// `seed`.
pub fn random_axiom_suite(seed: u64, cases: usize) -> Result<Vec<AxiomSuiteReport>, GroupoidError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let pair = PairGroupoid::new(3);
    let mut pair_res = AxiomResiduals::default();
    for _ in 0..cases {
        let q: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..3).map(|_| rng.gen_range(-10.0..10.0)).collect())
            .collect();
        let g = pair.element(&q[0], &q[1]);
        let h = pair.element(&q[1], &q[2]);
        let k = pair.element(&q[2], &q[3]);
        pair_res = pair_res.merge(axiom_residuals(&pair, &g, &h, &k)?);
    }

    let so3 = MatrixGroup::so3();
    let mut so3_res = AxiomResiduals::default();
    for _ in 0..cases {
        let mut draw = || {
            let xi: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
            GroupoidElement::new(so3.exp(&xi))
        };
        let (g, h, k) = (draw(), draw(), draw());
        so3_res = so3_res.merge(axiom_residuals(&so3, &g, &h, &k)?);
    }

    Ok(vec![
        AxiomSuiteReport {
            instance: "pair-r3".into(),
            cases,
            residuals: pair_res,
        },
        AxiomSuiteReport {
            instance: "so3".into(),
            cases,
            residuals: so3_res,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_is_deterministic_and_tight() {
        let a = random_axiom_suite(3, 50).unwrap();
        let b = random_axiom_suite(3, 50).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert!(r.residuals.max() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn non_composable_triple_is_rejected() {
        let p = PairGroupoid::new(1);
        let g = p.element(&[0.0], &[1.0]);
        let h = p.element(&[2.0], &[3.0]);
        assert!(axiom_residuals(&p, &g, &h, &h).is_err());
    }
}
