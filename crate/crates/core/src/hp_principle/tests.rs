use proptest::prelude::*;

use super::*;
use crate::groupoid::{admissible_from_elements, MatrixGroup, PairGroupoid};
use crate::lagrangian::{
    midpoint_discretize, rigid_body_lagrangian, Harmonic, Pendulum, QuadratureLagrangian,
};
use crate::legendre_flow::{
    action_sum, legendre_minus, legendre_plus, simulate, AlgebroidCovector, InitialData,
};
use crate::numerics::{grad_generic, ScalarField};

const H: f64 = 0.1;

// q₂ from (q₀, q₁) for the midpoint harmonic oscillator, solved by hand.
fn harmonic_next(q0: f64, q1: f64, h: f64) -> f64 {
    ((2.0 - h * h / 2.0) * q1 - (1.0 + h * h / 4.0) * q0) / (1.0 + h * h / 4.0)
}

fn harmonic() -> QuadratureLagrangian<Harmonic> {
    midpoint_discretize(Harmonic::new(1), H).unwrap()
}

fn pendulum() -> QuadratureLagrangian<Pendulum> {
    midpoint_discretize(Pendulum, H).unwrap()
}

fn pair(q0: f64, q1: f64) -> GroupoidElement {
    GroupoidElement::new(vec![q0, q1])
}

/// `L_h ≡ c` on the pair groupoid over ℝ.
struct Constant(f64, PairGroupoid);

impl ScalarField for Constant {
    fn eval<S: Scalar>(&self, _g: &[S]) -> S {
        S::from_f64(self.0)
    }
}

impl DiscreteLagrangian for Constant {
    type Space = PairGroupoid;
    fn space(&self) -> &PairGroupoid {
        &self.1
    }
    fn step_size(&self) -> f64 {
        H
    }
}

fn del_sequence<L: DiscreteLagrangian>(lh: &L, g1: GroupoidElement, n: usize) -> AdmissibleSequence {
    let traj = simulate(lh, &InitialData::Element(g1), n).unwrap();
    admissible_from_elements(lh.space(), traj.elements).unwrap()
}

fn constant_paths(space: &PairGroupoid, points: &[f64], nodes: usize) -> HpConfiguration {
    let paths = points
        .windows(2)
        .map(|w| {
            let g = pair(w[0], w[1]);
            CotangentPathDiscretization::uniform(vec![CotangentElement::zero(g); nodes]).unwrap()
        })
        .collect();
    let composite = pair(points[0], *points.last().unwrap());
    HpConfiguration::new(space, paths, composite, QuadratureRule::gauss(2)).unwrap()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn path_invariants_are_enforced() {
    let g = pair(0.0, 1.0);
    let zero = CotangentElement::zero(g.clone());
    let off = CotangentElement::new(g.clone(), vec![1.0, 0.0]);
    assert!(CotangentPathDiscretization::new(vec![0.0], vec![zero.clone()]).is_err());
    assert!(CotangentPathDiscretization::new(vec![0.0, 1.0], vec![off.clone(), zero.clone()]).is_err());
    assert!(CotangentPathDiscretization::new(vec![0.0, 0.7], vec![zero.clone(), off.clone()]).is_err());
    assert!(
        CotangentPathDiscretization::new(vec![0.0, 0.6, 0.5, 1.0], vec![zero.clone(); 4]).is_err()
    );
    let path = CotangentPathDiscretization::new(vec![0.0, 1.0], vec![zero, off]).unwrap();
    assert!(path.starts_on_zero_section());
}

#[test]
fn configuration_requires_admissible_starts() {
    let space = PairGroupoid::new(1);
    let path = |a: f64, b: f64| {
        CotangentPathDiscretization::uniform(vec![CotangentElement::zero(pair(a, b)); 3]).unwrap()
    };
    let broken = HpConfiguration::new(
        &space,
        vec![path(0.0, 1.0), path(1.5, 2.0)],
        pair(0.0, 2.0),
        QuadratureRule::gauss(2),
    );
    assert!(matches!(broken, Err(HpError::InvalidConfiguration(_))));
    let wrong_composite = HpConfiguration::new(
        &space,
        vec![path(0.0, 1.0), path(1.0, 2.0)],
        pair(0.0, 3.0),
        QuadratureRule::gauss(2),
    );
    assert!(wrong_composite.is_err());
}

#[test]
fn constant_lagrangian_on_zero_section() {
    let space = PairGroupoid::new(1);
    let lh = Constant(0.7, space);
    let cfg = constant_paths(&space, &[0.0, 0.3, 1.1, 2.0], 4);
    assert!((hp_action(&cfg, &lh) - 3.0 * 0.7).abs() < 1e-15);
}

#[test]
fn zero_lagrangian_has_zero_differential() {
    let space = PairGroupoid::new(1);
    let lh = Constant(0.0, space);
    let cfg = constant_paths(&space, &[0.0, 0.3, 1.1], 5);
    let basis = VariationBasis::full(&space, &cfg);
    assert!(!basis.is_empty());
    assert!(hp_differential(&cfg, &lh, &basis).iter().all(|&d| d == 0.0));
}

#[test]
fn action_on_solution_equals_action_sum() {
    for (lh, g1) in [(harmonic(), pair(1.0, 1.0)), (harmonic(), pair(0.2, 0.5))] {
        let seq = del_sequence(&lh, g1, 4);
        for nodes in [2, 5, 20] {
            let cfg = construct_hp_solution(&lh, &seq, nodes).unwrap();
            assert!((hp_action(&cfg, &lh) - action_sum(&lh, &seq)).abs() < 1e-12);
        }
    }
    let lh = pendulum();
    let seq = del_sequence(&lh, pair(0.5, 0.55), 3);
    let cfg = construct_hp_solution(&lh, &seq, 7).unwrap();
    assert!((hp_action(&cfg, &lh) - action_sum(&lh, &seq)).abs() < 1e-12);
}

// A curved path: g(s) = g_a + sΔ + s(1−s)w in the chart, μ(s) = s·μ_b.
fn curved_path(nodes: usize) -> HpConfiguration {
    let space = PairGroupoid::new(1);
    let (ga, delta, w) = ([0.2, 0.9], [0.5, -0.3], [0.4, 0.8]);
    let mu_b = [0.6, -1.1];
    let params: Vec<f64> = (0..nodes).map(|k| k as f64 / (nodes - 1) as f64).collect();
    let samples = params
        .iter()
        .map(|&s| {
            let g: Vec<f64> = (0..2)
                .map(|i| ga[i] + s * delta[i] + s * (1.0 - s) * w[i])
                .collect();
            CotangentElement::new(GroupoidElement::new(g), mu_b.iter().map(|m| s * m).collect())
        })
        .collect();
    let path = CotangentPathDiscretization::new(params, samples).unwrap();
    let composite = path.start().base.clone();
    HpConfiguration::new(&space, vec![path], composite, QuadratureRule::gauss(2)).unwrap()
}

#[test]
fn curved_path_converges_at_second_order() {
    let lh = pendulum();
    let reference = hp_action(&curved_path(10_001), &lh);
    let errors: Vec<f64> = [11, 21, 41, 81]
        .iter()
        .map(|&m| (hp_action(&curved_path(m), &lh) - reference).abs())
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio} from {errors:?}");
    }
}

#[test]
fn differential_vanishes_on_solutions() {
    let lh = harmonic();
    let seq = del_sequence(&lh, pair(1.0, 1.0), 3);
    for nodes in [2, 5, 20] {
        let cfg = construct_hp_solution(&lh, &seq, nodes).unwrap();
        let basis = VariationBasis::full(lh.space(), &cfg);
        assert!(basis.max_constraint_violation(lh.space(), &cfg) < 1e-12);
        let d = hp_differential(&cfg, &lh, &basis);
        assert!(max_abs(&d) < 1e-8, "nodes {nodes}: {}", max_abs(&d));
    }
}

#[test]
fn perturbed_interior_covector_is_not_stationary() {
    let lh = pendulum();
    let seq = del_sequence(&lh, pair(0.3, 0.4), 3);
    let cfg = construct_hp_solution(&lh, &seq, 5).unwrap();
    let basis = VariationBasis::full(lh.space(), &cfg);
    for path in 0..cfg.len() {
        for node in 1..4 {
            for component in 0..2 {
                let bent = cfg.with_covector_offset(path, node, component, 1e-2);
                let d = hp_differential(&bent, &lh, &basis);
                assert!(max_abs(&d) > 1e-6, "path {path} node {node} component {component}");
            }
        }
    }
}

#[test]
fn free_terminal_arrow_is_not_an_admissible_direction() {
    // Moving one end arrow alone changes the action by dL_h(gₙ)·δg.
    let lh = harmonic();
    let seq = del_sequence(&lh, pair(1.0, 1.0), 2);
    let cfg = construct_hp_solution(&lh, &seq, 4).unwrap();
    let lone = VariationBasis::from_directions(vec![VariationDirection::Covector {
        path: 0,
        node: 3,
        component: 0,
    }]);
    assert!(max_abs(&hp_differential(&cfg, &lh, &lone)) < 1e-12);
    let g = &cfg.end_elements()[0];
    let dl = differential(&lh, g);
    let shifted = {
        let mut nodes = LiftedNodes::<Dual<f64>>::from_config(&cfg);
        nodes.arrows[0][3][1].eps = 1.0;
        action_from_nodes(&lh, &cfg, &nodes).eps
    };
    assert!((shifted - dl.components[1]).abs() < 1e-12);
}

#[test]
fn constructed_solution_examples() {
    let lh = harmonic();
    let seq = del_sequence(&lh, pair(1.0, 1.0), 3);
    let cfg = construct_hp_solution(&lh, &seq, 6).unwrap();
    for (mu, g) in cfg.end_covectors().iter().zip(seq.elements()) {
        assert_eq!(mu.components, differential(&lh, g).components);
        assert_eq!(&mu.base, g);
    }
    let ends = cfg.end_elements();
    assert!(composability_gap(lh.space(), &ends) < 1e-12);
    for w in cfg.end_covectors().windows(2) {
        let gap = cotangent_target(lh.space(), &w[0]).distance(&cotangent_source(lh.space(), &w[1]));
        assert!(gap < 1e-10);
    }
}

#[test]
fn construction_rejects_non_del_sequences() {
    let lh = harmonic();
    let space = *lh.space();
    let seq = admissible_from_elements(&space, vec![pair(1.0, 1.0), pair(1.0, 1.2)]).unwrap();
    let err = construct_hp_solution(&lh, &seq, 3).unwrap_err();
    assert!(matches!(err, HpError::ResidualTooLarge { junction: 1, .. }));
    let ok = del_sequence(&lh, pair(1.0, 1.0), 2);
    assert!(matches!(
        construct_hp_solution(&lh, &ok, 1),
        Err(HpError::InvalidConfiguration(_))
    ));
}

#[test]
fn verify_theorem_examples() {
    let lh = harmonic();
    let seq = del_sequence(&lh, pair(1.0, 1.0), 3);
    let cfg = construct_hp_solution(&lh, &seq, 5).unwrap();
    let report = verify_theorem(&cfg, &lh, 1e-9);
    assert!(report.all_pass(), "{report:?}");
    assert_eq!(report.legendre_residual, 0.0);

    let bent = cfg.with_scaled_endpoint(1, 1.01);
    let bad = verify_theorem(&bent, &lh, 1e-9);
    assert!(!bad.pass.legendre);
    assert!(bad.pass.admissible);
    let expected = 0.01 * max_abs(&differential(&lh, &seq.elements()[1]).components);
    assert!((bad.legendre_residual - expected).abs() < 1e-6 * expected);

    let single = del_sequence(&lh, pair(0.4, 0.1), 1);
    let one = verify_theorem(&construct_hp_solution(&lh, &single, 3).unwrap(), &lh, 1e-9);
    assert!(one.all_pass());
    assert_eq!(one.composability_gap, 0.0);
}

#[test]
fn legendre_residual_grows_linearly() {
    let lh = pendulum();
    let seq = del_sequence(&lh, pair(0.3, 0.35), 2);
    let cfg = construct_hp_solution(&lh, &seq, 3).unwrap();
    let r = |eps: f64| verify_theorem(&cfg.with_scaled_endpoint(0, 1.0 + eps), &lh, 1e-9).legendre_residual;
    let (r1, r2) = (r(1e-3), r(2e-3));
    assert!((r2 / r1 - 2.0).abs() < 1e-6);
}

#[test]
fn report_serializes_with_documented_keys() {
    let lh = harmonic();
    let seq = del_sequence(&lh, pair(1.0, 1.0), 2);
    let report = verify_theorem(&construct_hp_solution(&lh, &seq, 3).unwrap(), &lh, 1e-9);
    let json = serde_json::to_value(report).unwrap();
    for key in ["admissible_gap", "legendre_residual", "composability_gap"] {
        assert!(json[key].is_f64(), "{key}");
    }
    for key in ["admissible", "legendre", "composable"] {
        assert_eq!(json["pass"][key], serde_json::Value::Bool(true));
    }
}

#[test]
fn htilde_examples() {
    let lh = harmonic();
    let g = pair(1.0, 1.0);
    let on_fiber = CotangentElement::new(g.clone(), vec![3.0, -2.0]);
    let zero = CotangentElement::zero(g);
    assert!((hamiltonian_htilde(&lh, &zero) - 0.05).abs() < 1e-15);
    assert_eq!(hamiltonian_htilde(&lh, &on_fiber), hamiltonian_htilde(&lh, &zero));
    let nothing = Constant(0.0, PairGroupoid::new(1));
    assert_eq!(hamiltonian_htilde(&nothing, &on_fiber), 0.0);
}

#[test]
fn leok_ohsawa_two_steps_match_closed_form() {
    let lh = harmonic();
    let q2 = harmonic_next(1.0, 1.0, H);
    let sol = leok_ohsawa_solve(&lh, &Boundary::new(vec![1.0], vec![q2]), 2).unwrap();
    let p = &sol.point;
    assert!((p.ends[0][0] - 1.0).abs() < 1e-9);
    assert!((p.starts[1][0] - 1.0).abs() < 1e-9);
    assert_eq!(p.interior_points().len(), 1);
}

#[test]
fn leok_ohsawa_is_stationary_at_legendre_data() {
    for q1 in [1.0, 0.7, -0.2] {
        let lh = harmonic();
        let seq = del_sequence(&lh, pair(1.0, q1), 3);
        let els = seq.elements();
        let mut multipliers = vec![legendre_minus(&lh, &els[0]).coords];
        multipliers.extend(els.iter().map(|g| legendre_plus(&lh, g).coords));
        let point = LeokOhsawaPoint {
            starts: els.iter().map(|g| g.coords()[..1].to_vec()).collect(),
            ends: els.iter().map(|g| g.coords()[1..].to_vec()).collect(),
            multipliers,
        };
        let boundary = Boundary::new(vec![1.0], els[2].coords()[1..].to_vec());
        let grad = leok_ohsawa_gradient(&lh, &point, &boundary).unwrap();
        let all: Vec<f64> = grad
            .starts
            .iter()
            .chain(&grad.ends)
            .chain(&grad.multipliers)
            .flatten()
            .copied()
            .collect();
        assert!(max_abs(&all) < 1e-10);
    }
}

#[test]
fn leok_ohsawa_single_step_gives_legendre_transforms() {
    let lh = pendulum();
    let boundary = Boundary::new(vec![0.3], vec![0.45]);
    let sol = leok_ohsawa_solve(&lh, &boundary, 1).unwrap();
    let g = pair(0.3, 0.45);
    let p = &sol.point.multipliers;
    assert!((p[0][0] - legendre_minus(&lh, &g).coords[0]).abs() < 1e-12);
    assert!((p[1][0] - legendre_plus(&lh, &g).coords[0]).abs() < 1e-12);
    // −∂₀L_h and ∂₁L_h directly.
    let dl = grad_generic(&lh, g.coords());
    assert!((p[0][0] + dl[0]).abs() < 1e-12);
    assert!((p[1][0] - dl[1]).abs() < 1e-12);
}

#[test]
fn leok_ohsawa_action_value() {
    let lh = harmonic();
    let point = LeokOhsawaPoint {
        starts: vec![vec![1.0], vec![1.5]],
        ends: vec![vec![1.2], vec![2.0]],
        multipliers: vec![vec![1.0], vec![2.0], vec![3.0]],
    };
    let boundary = Boundary::new(vec![0.5], vec![1.0]);
    let expected = lh.eval(&[1.0, 1.2]) + lh.eval(&[1.5, 2.0]) + 1.0 * 0.5 + 2.0 * 0.3 - 3.0 * 1.0;
    let value = leok_ohsawa_action(&lh, &point, &boundary).unwrap();
    assert!((value - expected).abs() < 1e-14);
    let short = Boundary::new(vec![0.5, 0.0], vec![1.0]);
    assert!(leok_ohsawa_action(&lh, &point, &short).is_err());
}

#[test]
fn leok_ohsawa_rejects_groups() {
    let lh = rigid_body_lagrangian(&[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0], H).unwrap();
    let boundary = Boundary::new(vec![], vec![]);
    assert!(matches!(
        leok_ohsawa_solve(&lh, &boundary, 2),
        Err(HpError::NotVectorSpaceInstance)
    ));
}

#[test]
fn three_formulations_agree() {
    let q2 = harmonic_next(1.0, 1.0, H);
    for n in [2, 3, 5] {
        let c = compare_formulations(&harmonic(), &Boundary::new(vec![1.0], vec![q2]), n, 5, 1e-9)
            .unwrap();
        assert!(c.max_disagreement < 1e-8, "harmonic N={n}: {}", c.max_disagreement);
        assert!(c.theorem.all_pass());
        assert_eq!(c.del.len(), n - 1);
        let c = compare_formulations(&pendulum(), &Boundary::new(vec![0.2], vec![0.9]), n, 5, 1e-9)
            .unwrap();
        assert!(c.max_disagreement < 1e-8, "pendulum N={n}: {}", c.max_disagreement);
    }
}

#[test]
fn rigid_body_solution_is_stationary() {
    let lh = rigid_body_lagrangian(&[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0], H).unwrap();
    let mu = AlgebroidCovector::new(crate::groupoid::BasePoint::point(), vec![0.3, -0.2, 0.5]);
    let traj = simulate(&lh, &InitialData::Momentum(mu), 3).unwrap();
    let seq = admissible_from_elements(lh.space(), traj.elements).unwrap();
    let cfg = construct_hp_solution(&lh, &seq, 4).unwrap();
    assert!(verify_theorem(&cfg, &lh, 1e-9).all_pass());
    let basis = VariationBasis::full(lh.space(), &cfg);
    assert!(basis.max_constraint_violation(lh.space(), &cfg) < 1e-12);
    assert!(max_abs(&hp_differential(&cfg, &lh, &basis)) < 1e-8);
    let _: &MatrixGroup = lh.space();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn solutions_verify_and_match_action_sum(q0 in -1.5..1.5f64, q1 in -1.5..1.5f64, n in 1usize..5) {
        let lh = pendulum();
        let seq = del_sequence(&lh, pair(q0, q1), n);
        let cfg = construct_hp_solution(&lh, &seq, 4).unwrap();
        prop_assert!(verify_theorem(&cfg, &lh, 1e-9).all_pass());
        prop_assert!((hp_action(&cfg, &lh) - action_sum(&lh, &seq)).abs() < 1e-11);
        let basis = VariationBasis::full(lh.space(), &cfg);
        prop_assert!(max_abs(&hp_differential(&cfg, &lh, &basis)) < 1e-8);
    }
}
