//! The JSON run configuration and its validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::hp_principle::Boundary;
use crate::lagrangian::{Discretization, SYSTEM_NAMES};

fn default_h() -> f64 {
    0.1
}

fn default_steps() -> usize {
    100
}

fn default_final_time() -> f64 {
    1.0
}

fn default_samples() -> usize {
    100
}

fn default_segments() -> Vec<usize> {
    vec![2, 3, 5]
}

fn default_nodes() -> Vec<usize> {
    vec![2, 5, 20]
}

fn default_reference_steps() -> usize {
    20_000
}

/// Initial data. Pair systems take `q0` with either `p0` (momentum) or
/// `q1` (first arrow); the rigid body takes a body momentum `momentum`
/// and an optional attitude `rotation`, either a unit quaternion
/// `[w, x, y, z]` or a row-major 3×3 matrix.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub q0: Option<Vec<f64>>,
    pub p0: Option<Vec<f64>>,
    pub q1: Option<Vec<f64>>,
    pub rotation: Option<Vec<f64>>,
    pub momentum: Option<Vec<f64>>,
}

/// Acceptance thresholds used by `verify` and `compare-leok-ohsawa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub theorem: f64,
    pub differential: f64,
    pub symplectic: f64,
    pub axioms: f64,
    pub agreement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            theorem: 1e-9,
            differential: 1e-8,
            symplectic: 1e-8,
            axioms: 1e-12,
            agreement: 1e-8,
        }
    }
}

/// Everything a run needs; every field but `system` has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: String,
    #[serde(default)]
    pub discretization: Option<Discretization>,
    /// Configuration dimension for `harmonic` and `free`.
    #[serde(default)]
    pub dim: Option<usize>,
    /// Row-major `J_d` for `rigid-body`; `diag(1, 2, 3)` when absent.
    #[serde(default)]
    pub inertia: Option<Vec<f64>>,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Step sizes for `convergence`; `[h]` when absent.
    #[serde(default)]
    pub h_list: Option<Vec<f64>>,
    #[serde(default = "default_final_time")]
    pub final_time: f64,
    #[serde(default = "default_reference_steps")]
    pub reference_steps: usize,
    /// Random states for `verify symplectic` and triples for `verify groupoid`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Path counts `N` for `verify hp` and the formulation comparison.
    #[serde(default = "default_segments")]
    pub segments: Vec<usize>,
    /// Node counts `M` per path for `verify hp`.
    #[serde(default = "default_nodes")]
    pub nodes: Vec<usize>,
    /// Fixed endpoints for the formulation comparison; generated from the
    /// initial data when absent.
    #[serde(default)]
    pub boundary: Option<Boundary>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// A configuration with every default filled in.
    pub fn for_system(system: &str) -> Self {
        serde_json::from_value(serde_json::json!({ "system": system }))
            .expect("defaults deserialize")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !SYSTEM_NAMES.contains(&self.system.as_str()) {
            return Err(CliError::Config(format!(
                "unknown system `{}`; available: {}",
                self.system,
                SYSTEM_NAMES.join(", ")
            )));
        }
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} must be positive and finite, got {x}")))
            }
        };
        positive("h", self.h)?;
        positive("final_time", self.final_time)?;
        for &h in self.h_list.iter().flatten() {
            positive("h_list entry", h)?;
        }
        if self.h_list.as_ref().is_some_and(|l| l.is_empty()) {
            return Err(CliError::Config("h_list must not be empty".into()));
        }
        if self.dim == Some(0) {
            return Err(CliError::Config("dim must be at least 1".into()));
        }
        if self.segments.contains(&0) {
            return Err(CliError::Config("segments must be at least 1".into()));
        }
        if self.nodes.iter().any(|&m| m < 2) {
            return Err(CliError::Config("nodes must be at least 2".into()));
        }
        let values = [
            self.initial.q0.as_deref(),
            self.initial.p0.as_deref(),
            self.initial.q1.as_deref(),
            self.initial.rotation.as_deref(),
            self.initial.momentum.as_deref(),
            self.inertia.as_deref(),
            self.boundary.as_ref().map(|b| b.start.as_slice()),
            self.boundary.as_ref().map(|b| b.end.as_slice()),
        ];
        if values.iter().flatten().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(CliError::Config("initial data must be finite".into()));
        }
        Ok(())
    }
}
