//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::RunConfig;
use super::system::{
    build_system, continuous_of, pair_initial, rigid_initial, with_pair, PairSystem, System,
};
use super::CliError;
use crate::groupoid::{
    admissible_from_elements, random_axiom_suite, BasePoint, Groupoid, MatrixGroup,
};
use crate::hp_principle::{
    compare_formulations, construct_hp_solution, hp_differential, verify_theorem, Boundary,
    HpError, VariationBasis,
};
use crate::lagrangian::{
    inverse_legendre, reference_trajectory, DiscreteLagrangian, Discretization,
    QuadratureLagrangian,
};
use crate::legendre_flow::{
    simulate as run_flow, symplecticity_defect, AlgebroidCovector, InitialData, Trajectory,
};
use crate::numerics::dist_inf;

/// Environment variable capping the convergence sweep's worker threads.
pub const THREADS_ENV: &str = "GROUPOID_INT_THREADS";

/// Size of the covector kick used as the non-stationarity witness.
const WITNESS_KICK: f64 = 1e-2;
const WITNESS_THRESHOLD: f64 = 1e-6;
const CONSTRAINT_TOLERANCE: f64 = 1e-12;

pub(crate) fn numerical(e: impl Display) -> CliError {
    CliError::Numerical(e.to_string())
}

fn hp_failure(e: HpError) -> CliError {
    match e {
        HpError::InvalidConfiguration(msg) => CliError::Config(msg),
        HpError::NotVectorSpaceInstance => CliError::Config(e.to_string()),
        other => numerical(other),
    }
}

fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn io_failure(e: impl Display) -> CliError {
    CliError::Config(format!("write failed: {e}"))
}

/// Write a JSON document followed by a newline.
pub(crate) fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut w = open_output(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(io_failure)?;
    writeln!(w).map_err(io_failure)?;
    w.flush().map_err(io_failure)
}

fn num(x: f64) -> String {
    if x != 0.0 && x.is_finite() && (x.abs() < 1e-4 || x.abs() >= 1e15) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

// ---------------------------------------------------------------- simulate

pub fn simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let system = build_system(cfg, cfg.h)?;
    let (header, rows) = match &system {
        System::Pair(sys) => {
            let data = pair_initial(cfg, sys)?.data();
            let traj = with_pair!(sys, lh => run_flow(lh, &data, cfg.steps)).map_err(numerical)?;
            pair_rows(&traj, sys.dim())
        }
        System::RigidBody(lh) => {
            let (data, origin) = rigid_initial(cfg)?;
            let traj = run_flow(lh, &data, cfg.steps).map_err(numerical)?;
            let attitudes = traj.cumulative(lh.space(), &origin);
            rigid_rows(&traj, &attitudes)
        }
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(open_output(cfg.out.as_deref())?);
    w.write_record(&header).map_err(io_failure)?;
    for row in rows {
        w.write_record(&row).map_err(io_failure)?;
    }
    w.flush().map_err(io_failure)
}

fn diagnostics(traj: &Trajectory, n: usize) -> [String; 3] {
    [
        num(traj.conserved[n]),
        num(traj.del_residuals[n]),
        num(traj.composability_gaps[n]),
    ]
}

const DIAGNOSTIC_COLUMNS: [&str; 3] = ["energy_or_casimir", "del_residual", "composability_gap"];

fn pair_rows(traj: &Trajectory, d: usize) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["step".to_string(), "t".to_string()];
    header.extend((1..=d).map(|i| format!("q{i}")));
    header.extend((1..=d).map(|i| format!("p{i}")));
    header.extend(DIAGNOSTIC_COLUMNS.iter().map(|s| s.to_string()));
    let rows = (0..traj.states.len())
        .map(|n| {
            let state = &traj.states[n];
            let mut row = vec![n.to_string(), num(traj.times[n])];
            row.extend(state.base.coords().iter().map(|&x| num(x)));
            row.extend(state.coords.iter().map(|&x| num(x)));
            row.extend(diagnostics(traj, n));
            row
        })
        .collect();
    (header, rows)
}

fn rigid_rows(
    traj: &Trajectory,
    attitudes: &[crate::groupoid::GroupoidElement],
) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header: Vec<String> = ["step", "t", "w", "x", "y", "z", "pi1", "pi2", "pi3"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(DIAGNOSTIC_COLUMNS.iter().map(|s| s.to_string()));
    let rows = (0..traj.states.len())
        .map(|n| {
            let mut row = vec![n.to_string(), num(traj.times[n])];
            row.extend(MatrixGroup::quaternion(attitudes[n].coords()).iter().map(|&x| num(x)));
            row.extend(traj.states[n].coords.iter().map(|&x| num(x)));
            row.extend(diagnostics(traj, n));
            row
        })
        .collect();
    (header, rows)
}

// ------------------------------------------------------------- convergence

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRun {
    pub h: f64,
    pub steps: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub system: String,
    pub discretization: Discretization,
    pub final_time: f64,
    pub seed: u64,
    /// Global configuration error at the final time, keyed by step size.
    pub errors: BTreeMap<String, f64>,
    pub runs: Vec<ConvergenceRun>,
    /// Least-squares slope of `ln(error)` against `ln(h)`; absent for a
    /// single step size.
    pub slope: Option<f64>,
}

fn thread_count() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got `{s}`"
            ))),
        },
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

pub fn convergence(cfg: &RunConfig) -> Result<ConvergenceReport, CliError> {
    let Some(continuous) = continuous_of(cfg)? else {
        return Err(CliError::Config(format!(
            "system `{}` has no continuous reference solution",
            cfg.system
        )));
    };
    let rule = cfg.discretization.unwrap_or(Discretization::Midpoint);
    let System::Pair(probe) = build_system(cfg, cfg.h)? else {
        unreachable!("continuous systems live on the pair groupoid")
    };
    let init = pair_initial(cfg, &probe)?;
    let Some(p0) = init.p0.clone() else {
        return Err(CliError::Config(
            "convergence needs momentum initial data (q0, p0)".into(),
        ));
    };
    let hs = cfg.h_list.clone().unwrap_or_else(|| vec![cfg.h]);
    let mut plan = Vec::with_capacity(hs.len());
    for &h in &hs {
        let steps = (cfg.final_time / h).round();
        if !((steps * h - cfg.final_time).abs() <= 1e-9 * cfg.final_time) || steps < 1.0 {
            return Err(CliError::Config(format!(
                "h = {h} does not divide final_time = {}",
                cfg.final_time
            )));
        }
        plan.push((h, steps as usize));
    }

    let v0 = inverse_legendre(&continuous, &init.q0, &p0).map_err(numerical)?;
    let reference = reference_trajectory(
        &continuous,
        &init.q0,
        &v0,
        cfg.final_time,
        cfg.reference_steps,
    )
    .map_err(numerical)?;
    let q_ref = reference.final_position().to_vec();
    let data = InitialData::Momentum(AlgebroidCovector::new(BasePoint::new(init.q0.clone()), p0));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<ConvergenceRun, CliError>> = pool.install(|| {
        plan.par_iter()
            .map(|&(h, steps)| {
                let lh = QuadratureLagrangian::new(continuous, h, rule)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                let traj = run_flow(&lh, &data, steps).map_err(numerical)?;
                let q_end = traj.states[steps].base.coords();
                Ok(ConvergenceRun {
                    h,
                    steps,
                    error: dist_inf(q_end, &q_ref),
                })
            })
            .collect()
    });
    let runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let slope = loglog_slope(&runs.iter().map(|r| (r.h, r.error)).collect::<Vec<_>>());
    Ok(ConvergenceReport {
        system: cfg.system.clone(),
        discretization: rule,
        final_time: cfg.final_time,
        seed: cfg.seed,
        errors: runs.iter().map(|r| (format!("{}", r.h), r.error)).collect(),
        runs,
        slope,
    })
}

// ------------------------------------------------------------------ verify

/// Which verification suite to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum VerifyTarget {
    Hp,
    Symplectic,
    Groupoid,
    LeokOhsawa,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub system: String,
    pub seed: u64,
    pub checks: BTreeMap<String, Value>,
    pub pass: bool,
}

struct Check {
    report: Value,
    pass: bool,
}

impl Check {
    fn skipped(reason: &str) -> Self {
        Self {
            report: json!({ "skipped": reason }),
            pass: true,
        }
    }
}

pub fn verify(cfg: &RunConfig, target: VerifyTarget) -> Result<VerifyReport, CliError> {
    let system = build_system(cfg, cfg.h)?;
    let wants = |t: VerifyTarget| target == t || target == VerifyTarget::All;
    let explicit = target != VerifyTarget::All;
    let mut checks = BTreeMap::new();

    if wants(VerifyTarget::Hp) {
        let check = match &system {
            System::Pair(sys) => {
                let data = pair_initial(cfg, sys)?.data();
                with_pair!(sys, lh => hp_check(lh, &data, cfg))?
            }
            System::RigidBody(lh) => {
                let (data, _) = rigid_initial(cfg)?;
                hp_check(lh, &data, cfg)?
            }
        };
        checks.insert("hp".to_string(), check);
    }
    if wants(VerifyTarget::Symplectic) {
        let check = match &system {
            System::Pair(sys) => symplectic_check(sys, cfg)?,
            System::RigidBody(_) if explicit => {
                return Err(CliError::Config(
                    "the symplectic check needs a system on the pair groupoid".into(),
                ))
            }
            System::RigidBody(_) => Check::skipped("not a pair-groupoid system"),
        };
        checks.insert("symplectic".to_string(), check);
    }
    if wants(VerifyTarget::Groupoid) {
        checks.insert("groupoid".to_string(), groupoid_check(cfg)?);
    }
    if wants(VerifyTarget::LeokOhsawa) {
        let check = match &system {
            System::Pair(sys) => leok_ohsawa_check(sys, cfg)?,
            System::RigidBody(_) if explicit => {
                return Err(CliError::Config(HpError::NotVectorSpaceInstance.to_string()))
            }
            System::RigidBody(_) => Check::skipped("configuration space is not a vector space"),
        };
        checks.insert("leok-ohsawa".to_string(), check);
    }

    let pass = checks.values().all(|c| c.pass);
    Ok(VerifyReport {
        system: cfg.system.clone(),
        seed: cfg.seed,
        checks: checks.into_iter().map(|(k, c)| (k, c.report)).collect(),
        pass,
    })
}

fn hp_check<L: DiscreteLagrangian>(
    lh: &L,
    data: &InitialData,
    cfg: &RunConfig,
) -> Result<Check, CliError> {
    let tol = cfg.tolerances;
    let mut entries = Vec::new();
    let mut pass = true;
    for &n in &cfg.segments {
        let traj = run_flow(lh, data, n).map_err(numerical)?;
        let seq = admissible_from_elements(lh.space(), traj.elements).map_err(numerical)?;
        for &m in &cfg.nodes {
            let hp = construct_hp_solution(lh, &seq, m).map_err(hp_failure)?;
            let theorem = verify_theorem(&hp, lh, tol.theorem);
            let basis = VariationBasis::full(lh.space(), &hp);
            let violation = basis.max_constraint_violation(lh.space(), &hp);
            let max_differential = max_abs(&hp_differential(&hp, lh, &basis));

            let chart = lh.space().chart_dim();
            let mut witness: Option<f64> = None;
            for path in 0..hp.len() {
                let local = basis.touching(path);
                for node in 1..m.saturating_sub(1) {
                    for component in 0..chart {
                        let kicked = hp.with_covector_offset(path, node, component, WITNESS_KICK);
                        let response = max_abs(&hp_differential(&kicked, lh, &local));
                        witness = Some(witness.map_or(response, |w: f64| w.min(response)));
                    }
                }
            }

            let ok = theorem.all_pass()
                && max_differential < tol.differential
                && violation < CONSTRAINT_TOLERANCE
                && witness.is_none_or(|w| w > WITNESS_THRESHOLD);
            pass &= ok;
            entries.push(json!({
                "segments": n,
                "nodes": m,
                "theorem": theorem,
                "basis_size": basis.len(),
                "constraint_violation": violation,
                "max_differential": max_differential,
                "min_kicked_response": witness,
                "pass": ok,
            }));
        }
    }
    Ok(Check {
        report: json!({
            "theorem_tolerance": tol.theorem,
            "differential_tolerance": tol.differential,
            "witness_kick": WITNESS_KICK,
            "witness_threshold": WITNESS_THRESHOLD,
            "runs": entries,
            "pass": pass,
        }),
        pass,
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn symplectic_check(sys: &PairSystem, cfg: &RunConfig) -> Result<Check, CliError> {
    let init = pair_initial(cfg, sys)?;
    let (_, p_default, spread) = sys.defaults();
    let p_center = init.p0.clone().unwrap_or(p_default);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0_f64;
    for _ in 0..cfg.samples {
        let q: Vec<f64> = init
            .q0
            .iter()
            .map(|c| c + spread * rng.gen_range(-1.0..1.0))
            .collect();
        let p: Vec<f64> = p_center
            .iter()
            .map(|c| c + spread * rng.gen_range(-1.0..1.0))
            .collect();
        let mu = AlgebroidCovector::new(BasePoint::new(q), p);
        let defect = with_pair!(sys, lh => symplecticity_defect(lh, &mu)).map_err(numerical)?;
        worst = worst.max(defect);
    }
    let pass = worst < cfg.tolerances.symplectic;
    Ok(Check {
        report: json!({
            "samples": cfg.samples,
            "max_defect": worst,
            "tolerance": cfg.tolerances.symplectic,
            "pass": pass,
        }),
        pass,
    })
}

fn groupoid_check(cfg: &RunConfig) -> Result<Check, CliError> {
    let suites = random_axiom_suite(cfg.seed, cfg.samples).map_err(numerical)?;
    let pass = suites
        .iter()
        .all(|s| s.residuals.max() < cfg.tolerances.axioms);
    Ok(Check {
        report: json!({
            "instances": suites,
            "tolerance": cfg.tolerances.axioms,
            "pass": pass,
        }),
        pass,
    })
}

/// Endpoints for an `n`-step comparison: the configured boundary, or the
/// ends of an `n`-step DEL run from the initial data.
fn comparison_boundary(sys: &PairSystem, cfg: &RunConfig, n: usize) -> Result<Boundary, CliError> {
    if let Some(b) = &cfg.boundary {
        let d = sys.dim();
        if b.start.len() != d || b.end.len() != d {
            return Err(CliError::Config(format!(
                "boundary points must have dimension {d}"
            )));
        }
        return Ok(b.clone());
    }
    let data = pair_initial(cfg, sys)?.data();
    let traj = with_pair!(sys, lh => run_flow(lh, &data, n)).map_err(numerical)?;
    let d = sys.dim();
    let first = traj.elements.first().expect("n ≥ 1").coords();
    let last = traj.elements.last().expect("n ≥ 1").coords();
    Ok(Boundary::new(first[..d].to_vec(), last[d..].to_vec()))
}

fn leok_ohsawa_check(sys: &PairSystem, cfg: &RunConfig) -> Result<Check, CliError> {
    let nodes = cfg.nodes.iter().copied().max().unwrap_or(5);
    let mut comparisons = Vec::new();
    let mut pass = true;
    for &n in &cfg.segments {
        let boundary = comparison_boundary(sys, cfg, n)?;
        let c = with_pair!(sys, lh => compare_formulations(lh, &boundary, n, nodes, cfg.tolerances.theorem))
            .map_err(hp_failure)?;
        let ok = c.max_disagreement < cfg.tolerances.agreement && c.theorem.all_pass();
        pass &= ok;
        comparisons.push(json!({
            "boundary": boundary,
            "comparison": c,
            "pass": ok,
        }));
    }
    Ok(Check {
        report: json!({
            "tolerance": cfg.tolerances.agreement,
            "comparisons": comparisons,
            "pass": pass,
        }),
        pass,
    })
}

/// The formulation comparison on its own.
pub fn compare_leok_ohsawa(cfg: &RunConfig) -> Result<VerifyReport, CliError> {
    let System::Pair(sys) = build_system(cfg, cfg.h)? else {
        return Err(CliError::Config(HpError::NotVectorSpaceInstance.to_string()));
    };
    let check = leok_ohsawa_check(&sys, cfg)?;
    let pass = check.pass;
    let mut checks = BTreeMap::new();
    checks.insert("leok-ohsawa".to_string(), check.report);
    Ok(VerifyReport {
        system: cfg.system.clone(),
        seed: cfg.seed,
        checks,
        pass,
    })
}
