//! Runtime selection of a discrete system by registry name.

use super::config::RunConfig;
use super::CliError;
use crate::groupoid::{BasePoint, GroupoidElement, MatrixGroup};
use crate::lagrangian::{
    rigid_body_lagrangian, ContinuousLagrangian, ContinuousSystem, DegenerateLagrangian,
    Discretization, FreeParticle, Harmonic, Kepler, Pendulum, QuadratureLagrangian,
    RigidBodyLagrangian,
};
use crate::legendre_flow::{AlgebroidCovector, InitialData};

/// A discrete Lagrangian on the pair groupoid over `ℝᵈ`.
pub enum PairSystem {
    Mechanical(QuadratureLagrangian<ContinuousSystem>),
    Degenerate(DegenerateLagrangian),
}

pub enum System {
    Pair(PairSystem),
    RigidBody(RigidBodyLagrangian),
}

/// Run `$body` with `$lh` bound to the concrete Lagrangian of a
/// [`PairSystem`].
macro_rules! with_pair {
    ($sys:expr, $lh:ident => $body:expr) => {
        match $sys {
            $crate::cli::system::PairSystem::Mechanical($lh) => $body,
            $crate::cli::system::PairSystem::Degenerate($lh) => $body,
        }
    };
}
pub(crate) use with_pair;

const DEFAULT_BODY_MOMENTUM: [f64; 3] = [0.3, -0.2, 0.5];
const DEFAULT_INERTIA: [f64; 9] = [1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0];

fn continuous_system(cfg: &RunConfig) -> Result<Option<ContinuousSystem>, CliError> {
    let fixed = |name: &str, d: usize| match cfg.dim {
        None => Ok(()),
        Some(k) if k == d => Ok(()),
        Some(k) => Err(CliError::Config(format!(
            "system `{name}` has dimension {d}, config asks for {k}"
        ))),
    };
    let sys = match cfg.system.as_str() {
        "harmonic" => ContinuousSystem::Harmonic(Harmonic::new(cfg.dim.unwrap_or(1))),
        "free" => ContinuousSystem::FreeParticle(FreeParticle::new(cfg.dim.unwrap_or(1))),
        "pendulum" => {
            fixed("pendulum", 1)?;
            ContinuousSystem::Pendulum(Pendulum)
        }
        "kepler" => {
            fixed("kepler", 4)?;
            ContinuousSystem::Kepler(Kepler)
        }
        _ => return Ok(None),
    };
    Ok(Some(sys))
}

/// Build the discrete system named in `cfg` with step size `h`.
pub fn build_system(cfg: &RunConfig, h: f64) -> Result<System, CliError> {
    cfg.validate()?;
    if let Some(sys) = continuous_system(cfg)? {
        let rule = cfg.discretization.unwrap_or(Discretization::Midpoint);
        let lh = QuadratureLagrangian::new(sys, h, rule).map_err(|e| CliError::Config(e.to_string()))?;
        return Ok(System::Pair(PairSystem::Mechanical(lh)));
    }
    match cfg.system.as_str() {
        "rigid-body" => {
            let inertia = cfg.inertia.as_deref().unwrap_or(&DEFAULT_INERTIA);
            let lh = rigid_body_lagrangian(inertia, h).map_err(|e| CliError::Config(e.to_string()))?;
            Ok(System::RigidBody(lh))
        }
        "degenerate" => {
            let lh = DegenerateLagrangian::new(h).map_err(|e| CliError::Config(e.to_string()))?;
            Ok(System::Pair(PairSystem::Degenerate(lh)))
        }
        other => Err(CliError::Config(format!("unknown system `{other}`"))),
    }
}

/// The continuous Lagrangian behind a mechanical system, when there is one.
pub fn continuous_of(cfg: &RunConfig) -> Result<Option<ContinuousSystem>, CliError> {
    cfg.validate()?;
    continuous_system(cfg)
}

impl PairSystem {
    pub fn dim(&self) -> usize {
        match self {
            Self::Mechanical(lh) => lh.continuous().dim(),
            Self::Degenerate(_) => 1,
        }
    }

    /// Default `(q₀, p₀)` and the spread used for random states.
    pub fn defaults(&self) -> (Vec<f64>, Vec<f64>, f64) {
        match self {
            Self::Mechanical(lh) => match lh.continuous() {
                ContinuousSystem::Kepler(_) => {
                    let v = std::f64::consts::FRAC_1_SQRT_2;
                    (vec![0.5, 0.0, -0.5, 0.0], vec![0.0, v, 0.0, -v], 0.1)
                }
                sys => (vec![1.0; sys.dim()], vec![0.0; sys.dim()], 1.0),
            },
            Self::Degenerate(_) => (vec![1.0], vec![0.0], 1.0),
        }
    }
}

/// Resolved pair-system initial data.
pub struct PairInitial {
    pub q0: Vec<f64>,
    /// `Some` when given as a momentum.
    pub p0: Option<Vec<f64>>,
    /// `Some` when given as a first arrow.
    pub q1: Option<Vec<f64>>,
}

impl PairInitial {
    pub fn data(&self) -> InitialData {
        match (&self.p0, &self.q1) {
            (_, Some(q1)) => InitialData::Element(GroupoidElement::new(
                [self.q0.as_slice(), q1.as_slice()].concat(),
            )),
            (Some(p0), None) => {
                InitialData::Momentum(AlgebroidCovector::new(BasePoint::new(self.q0.clone()), p0.clone()))
            }
            (None, None) => unreachable!("resolved initial data has p0 or q1"),
        }
    }
}

pub fn pair_initial(cfg: &RunConfig, sys: &PairSystem) -> Result<PairInitial, CliError> {
    let init = &cfg.initial;
    if init.rotation.is_some() || init.momentum.is_some() {
        return Err(CliError::Config(
            "`rotation` and `momentum` apply to the rigid body only; use q0 with p0 or q1".into(),
        ));
    }
    if init.p0.is_some() && init.q1.is_some() {
        return Err(CliError::Config("give either p0 or q1, not both".into()));
    }
    let d = sys.dim();
    let (q_default, p_default, _) = sys.defaults();
    let check = |name: &str, v: &[f64]| {
        if v.len() == d {
            Ok(())
        } else {
            Err(CliError::Config(format!(
                "{name} has dimension {}, system `{}` needs {d}",
                v.len(),
                cfg.system
            )))
        }
    };
    let q0 = init.q0.clone().unwrap_or(q_default);
    check("q0", &q0)?;
    if let Some(q1) = &init.q1 {
        check("q1", q1)?;
        return Ok(PairInitial {
            q0,
            p0: None,
            q1: Some(q1.clone()),
        });
    }
    let p0 = init.p0.clone().unwrap_or(p_default);
    check("p0", &p0)?;
    Ok(PairInitial {
        q0,
        p0: Some(p0),
        q1: None,
    })
}

/// Body momentum and initial attitude for the rigid body.
pub fn rigid_initial(cfg: &RunConfig) -> Result<(InitialData, GroupoidElement), CliError> {
    let init = &cfg.initial;
    if init.q0.is_some() || init.p0.is_some() || init.q1.is_some() {
        return Err(CliError::Config(
            "the rigid body takes `momentum` and `rotation`, not q0/p0/q1".into(),
        ));
    }
    let momentum = init
        .momentum
        .clone()
        .unwrap_or_else(|| DEFAULT_BODY_MOMENTUM.to_vec());
    if momentum.len() != 3 {
        return Err(CliError::Config(format!(
            "momentum has dimension {}, the rigid body needs 3",
            momentum.len()
        )));
    }
    let rotation = match init.rotation.as_deref() {
        None => vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        Some(q) if q.len() == 4 => {
            let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(n > 0.0) {
                return Err(CliError::Config("rotation quaternion must be nonzero".into()));
            }
            MatrixGroup::rotation_from_quaternion([q[0] / n, q[1] / n, q[2] / n, q[3] / n])
        }
        Some(r) if r.len() == 9 => {
            let defect = rotation_defect(r);
            if !(defect < 1e-8) {
                return Err(CliError::Config(format!(
                    "rotation matrix is not in SO(3) (defect {defect:e})"
                )));
            }
            r.to_vec()
        }
        Some(r) => {
            return Err(CliError::Config(format!(
                "rotation needs 4 (quaternion) or 9 (matrix) entries, found {}",
                r.len()
            )))
        }
    };
    let mu = AlgebroidCovector::new(BasePoint::point(), momentum);
    Ok((InitialData::Momentum(mu), GroupoidElement::new(rotation)))
}

fn rotation_defect(r: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            let dot: f64 = (0..3).map(|k| r[k * 3 + i] * r[k * 3 + j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    let det = r[0] * (r[4] * r[8] - r[5] * r[7]) - r[1] * (r[3] * r[8] - r[5] * r[6])
        + r[2] * (r[3] * r[7] - r[4] * r[6]);
    if det > 0.0 {
        worst
    } else {
        f64::INFINITY
    }
}
