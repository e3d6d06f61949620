//! Single-source growth models launched from the corner `o`.

pub mod asm;
pub mod divisible;
pub mod idla;
pub mod rotor;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gasket::{GasketError, GasketGraph};

pub use asm::{sandpile_growth, AsmSolver, AsmState, BoundarySweep, Engine, NaiveSweep};
pub use divisible::{divisible_sandpile, Arithmetic, DivisibleState};
pub use idla::{idla, idla_ensemble, IdlaEnsemble, IdlaRun};
pub use rotor::{friedrich_levine, rotor_router, FlResult, InitialRotors, Mechanism, RotorSystem};

#[derive(Debug, Error)]
pub enum GrowthError {
    #[error(transparent)]
    Gasket(#[from] GasketError),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("hierarchical decomposition failed: {0}")]
    Hierarchy(String),
    #[error("iteration budget exhausted: {0}")]
    Budget(String),
    #[error("certificate check failed: {0}")]
    Certificate(String),
    #[error("invalid argument: {0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Sandpile,
    Divisible,
    Rotor,
    Idla,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Sandpile => "sandpile",
            Model::Divisible => "divisible",
            Model::Rotor => "rotor",
            Model::Idla => "idla",
        }
    }
}

/// Result of one growth run on a finite host graph.
///
/// `cluster` is the model's occupied set: the receiving set `S(m)` for the
/// sandpile, `D(m)` for the divisible sandpile, `σ(m)` for the rotor-router
/// and the visited set for IDLA. `fired` is the support of the odometer.
/// `in_radius` is the largest `r` with `B_o(r) ⊆ cluster` (−1 if empty) and
/// `out_radius` the largest distance of a cluster vertex (−1 if empty).
#[derive(Debug, Clone)]
pub struct GrowthOutcome {
    pub model: Model,
    pub m: u64,
    pub graph: Arc<GasketGraph>,
    pub cluster: Vec<u32>,
    pub fired: Vec<u32>,
    pub radius: Option<u32>,
    pub in_radius: i64,
    pub out_radius: i64,
    pub config: Vec<u64>,
    pub odometer: Vec<u64>,
    pub sink_trace: Vec<(u32, u64)>,
    pub seed: Option<u64>,
    pub divisible: Option<DivisibleState>,
    pub rotors: Option<RotorSystem>,
}

impl GrowthOutcome {
    pub fn record(&self) -> GrowthRecord {
        GrowthRecord {
            model: self.model,
            m: self.m,
            r: self.radius,
            in_radius: self.in_radius,
            out_radius: self.out_radius,
            sink_trace: self.sink_trace.clone(),
            seed: self.seed,
        }
    }
}

/// Serializable summary of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthRecord {
    pub model: Model,
    pub m: u64,
    pub r: Option<u32>,
    pub in_radius: i64,
    pub out_radius: i64,
    pub sink_trace: Vec<(u32, u64)>,
    pub seed: Option<u64>,
}

/// In- and out-radius of a vertex set; both are −1 for the empty set.
pub fn set_radii(g: &GasketGraph, set: &[u32]) -> (i64, i64) {
    if set.is_empty() {
        return (-1, -1);
    }
    let mut member = vec![false; g.num_vertices()];
    for &v in set {
        member[v as usize] = true;
    }
    let out = set.iter().map(|&v| g.dist(v) as i64).max().unwrap();
    let inner = (0..g.num_vertices())
        .filter(|&v| !member[v])
        .map(|v| g.dist(v as u32) as i64)
        .min()
        .map(|d| d - 1)
        .unwrap_or(out);
    (inner, out)
}

/// Whether `B_o(r) ⊆ set`; vacuous for negative `r`.
pub fn contains_ball(g: &GasketGraph, set: &[u32], r: i64) -> bool {
    if r < 0 {
        return true;
    }
    let mut member = vec![false; g.num_vertices()];
    for &v in set {
        member[v as usize] = true;
    }
    (0..g.num_vertices()).all(|v| g.dist(v as u32) as i64 > r || member[v])
}

/// Whether `set ⊆ B_o(r)`.
pub fn within_ball(g: &GasketGraph, set: &[u32], r: i64) -> bool {
    set.iter().all(|&v| g.dist(v) as i64 <= r)
}
