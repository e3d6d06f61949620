//! Exact sandpile algebra on sinked sub-gaskets.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gasket::{GasketError, GasketGraph, Sided, SinkSpec, SinkedGraph};

#[derive(Debug, Error)]
pub enum SandpileError {
    #[error(transparent)]
    Gasket(#[from] GasketError),
    #[error("toppling budget of {budget} firings exhausted; {unstable} vertices still unstable")]
    Budget { budget: u128, unstable: usize },
    #[error("configurations live on different sinked graphs")]
    GraphMismatch,
    #[error("chip vector has length {got}, expected {expected}")]
    Length { got: usize, expected: usize },
    #[error("configuration is not stable at vertex {0}")]
    Unstable(u32),
    #[error("unknown tile id `{0}`")]
    UnknownTile(String),
    #[error("malformed configuration CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

/// Chips on the vertices of a sinked graph. Entries at sinks are kept at 0.
#[derive(Debug, Clone)]
pub struct SandpileConfig {
    view: Arc<SinkedGraph>,
    chips: Vec<u64>,
}

impl PartialEq for SandpileConfig {
    fn eq(&self, other: &Self) -> bool {
        self.view.same_as(&other.view) && self.chips == other.chips
    }
}

impl Eq for SandpileConfig {}

impl SandpileConfig {
    pub fn zero(view: Arc<SinkedGraph>) -> Self {
        let chips = vec![0; view.len()];
        SandpileConfig { view, chips }
    }

    /// Wraps a chip vector indexed like `G_k`; sink entries are discarded.
    pub fn from_chips(view: Arc<SinkedGraph>, mut chips: Vec<u64>) -> Result<Self, SandpileError> {
        if chips.len() != view.len() {
            return Err(SandpileError::Length {
                got: chips.len(),
                expected: view.len(),
            });
        }
        for v in view.sinks() {
            chips[v as usize] = 0;
        }
        Ok(SandpileConfig { view, chips })
    }

    /// `deg − 1` on every non-sink vertex.
    pub fn max_stable(view: Arc<SinkedGraph>) -> Self {
        let chips = (0..view.len() as u32)
            .map(|v| {
                if view.is_sink(v) {
                    0
                } else {
                    view.threshold(v) as u64 - 1
                }
            })
            .collect();
        SandpileConfig { view, chips }
    }

    pub fn view(&self) -> &Arc<SinkedGraph> {
        &self.view
    }

    pub fn chips(&self) -> &[u64] {
        &self.chips
    }

    pub fn get(&self, v: u32) -> u64 {
        self.chips[v as usize]
    }

    pub fn set(&mut self, v: u32, c: u64) {
        if !self.view.is_sink(v) {
            self.chips[v as usize] = c;
        }
    }

    pub fn add(&mut self, v: u32, c: u64) {
        if !self.view.is_sink(v) {
            self.chips[v as usize] += c;
        }
    }

    pub fn total(&self) -> u64 {
        self.chips.iter().sum()
    }

    pub fn is_stable(&self) -> bool {
        self.first_unstable().is_none()
    }

    fn first_unstable(&self) -> Option<u32> {
        (0..self.chips.len() as u32).find(|&v| {
            !self.view.is_sink(v) && self.chips[v as usize] >= self.view.threshold(v) as u64
        })
    }

    /// Export as `i,j,chips` lines over non-sink vertices.
    pub fn to_csv(&self) -> String {
        let g = self.view.graph();
        let mut out = String::from("i,j,chips\n");
        for v in self.view.non_sinks() {
            let (i, j) = g.vertex(v).lattice();
            let _ = writeln!(out, "{i},{j},{}", self.chips[v as usize]);
        }
        out
    }

    pub fn from_csv(view: Arc<SinkedGraph>, text: &str) -> Result<Self, SandpileError> {
        let mut chips = vec![0u64; view.len()];
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if n == 0 || line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: &str| SandpileError::Csv {
                line: n + 1,
                reason: reason.to_string(),
            };
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 3 {
                return Err(err("expected three fields"));
            }
            let i: i32 = parts[0].parse().map_err(|_| err("bad i"))?;
            let j: i32 = parts[1].parse().map_err(|_| err("bad j"))?;
            let c: u64 = parts[2].parse().map_err(|_| err("bad chip count"))?;
            let v = view
                .graph()
                .index_ij(i, j)
                .filter(|&v| (v as usize) < view.len())
                .ok_or_else(|| err("vertex outside the graph"))?;
            chips[v as usize] = c;
        }
        SandpileConfig::from_chips(view, chips)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ToppleOrder {
    #[default]
    Lifo,
    Fifo,
    /// Uniformly random legal vertex at each step, from a seeded stream.
    Random(u64),
}

#[derive(Debug, Clone)]
pub struct StabilizationResult {
    pub config: SandpileConfig,
    pub odometer: Vec<u64>,
    /// Chips absorbed by each sink, in increasing vertex order.
    pub sink_absorbed: Vec<(u32, u64)>,
}

impl StabilizationResult {
    pub fn fired_set(&self) -> Vec<u32> {
        (0..self.odometer.len() as u32)
            .filter(|&v| self.odometer[v as usize] > 0)
            .collect()
    }

    /// Vertices that received at least one chip.
    pub fn received_set(&self) -> Vec<u32> {
        let view = self.config.view();
        (0..self.odometer.len() as u32)
            .filter(|&v| view.neighbors(v).any(|w| self.odometer[w as usize] > 0))
            .collect()
    }

    pub fn total_firings(&self) -> u64 {
        self.odometer.iter().sum()
    }

    pub fn absorbed_total(&self) -> u64 {
        self.sink_absorbed.iter().map(|&(_, c)| c).sum()
    }
}

/// Default firing budget: `64 × chips × |V|`.
pub fn default_budget(total_chips: u64, nv: usize) -> u128 {
    64u128 * (total_chips.max(1) as u128) * nv as u128
}

pub fn stabilize(c: &SandpileConfig) -> Result<StabilizationResult, SandpileError> {
    stabilize_with(c, ToppleOrder::Lifo, None)
}

/// Stabilizes `c`, firing `⌊chips/deg⌋` times per visit.
pub fn stabilize_with(
    c: &SandpileConfig,
    order: ToppleOrder,
    budget: Option<u128>,
) -> Result<StabilizationResult, SandpileError> {
    let view = c.view.clone();
    let nv = view.len();
    let budget = budget.unwrap_or_else(|| default_budget(c.total(), nv));
    let mut chips = c.chips.clone();
    let mut odo = vec![0u64; nv];
    let mut queued = vec![false; nv];
    let mut work: VecDeque<u32> = VecDeque::new();
    for v in 0..nv as u32 {
        if !view.is_sink(v) && chips[v as usize] >= view.threshold(v) as u64 {
            queued[v as usize] = true;
            work.push_back(v);
        }
    }
    let mut rng = match order {
        ToppleOrder::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut fired: u128 = 0;
    loop {
        let v = match (order, rng.as_mut()) {
            (ToppleOrder::Lifo, _) => work.pop_back(),
            (ToppleOrder::Fifo, _) => work.pop_front(),
            (_, Some(r)) => {
                if work.is_empty() {
                    None
                } else {
                    let k = r.gen_range(0..work.len());
                    work.swap_remove_back(k)
                }
            }
            _ => unreachable!(),
        };
        let Some(v) = v else { break };
        queued[v as usize] = false;
        let d = view.threshold(v) as u64;
        let k = chips[v as usize] / d;
        if k == 0 {
            continue;
        }
        fired += k as u128;
        if fired > budget {
            let unstable = (0..nv as u32)
                .filter(|&w| !view.is_sink(w) && chips[w as usize] >= view.threshold(w) as u64)
                .count();
            return Err(SandpileError::Budget { budget, unstable });
        }
        chips[v as usize] -= k * d;
        odo[v as usize] += k;
        for w in view.neighbors(v) {
            chips[w as usize] += k;
            if !view.is_sink(w)
                && !queued[w as usize]
                && chips[w as usize] >= view.threshold(w) as u64
            {
                queued[w as usize] = true;
                work.push_back(w);
            }
        }
    }
    let mut sink_absorbed = Vec::new();
    for s in view.sinks() {
        sink_absorbed.push((s, chips[s as usize]));
        chips[s as usize] = 0;
    }
    Ok(StabilizationResult {
        config: SandpileConfig { view, chips },
        odometer: odo,
        sink_absorbed,
    })
}

/// `a ⊕ b = (a + b)°` for a raw chip vector `b`.
pub fn add_and_stabilize(
    a: &SandpileConfig,
    b: &[u64],
) -> Result<StabilizationResult, SandpileError> {
    if b.len() != a.chips.len() {
        return Err(SandpileError::Length {
            got: b.len(),
            expected: a.chips.len(),
        });
    }
    let mut sum = a.clone();
    for (v, &x) in b.iter().enumerate() {
        sum.add(v as u32, x);
    }
    stabilize(&sum)
}

/// `a ⊕ b` for two configurations on the same sinked graph.
pub fn oplus(a: &SandpileConfig, b: &SandpileConfig) -> Result<StabilizationResult, SandpileError> {
    if !a.view.same_as(&b.view) {
        return Err(SandpileError::GraphMismatch);
    }
    add_and_stabilize(a, &b.chips)
}

/// Burning test: fire from the sinks; recurrent iff every vertex burns.
pub fn is_recurrent(c: &SandpileConfig) -> Result<bool, SandpileError> {
    if let Some(v) = c.first_unstable() {
        return Err(SandpileError::Unstable(v));
    }
    let view = &c.view;
    let nv = view.len();
    let mut unburnt: Vec<bool> = (0..nv as u32).map(|v| !view.is_sink(v)).collect();
    // Unburnt neighbours plus the threshold deficit from the larger host graph.
    let mut need: Vec<u64> = (0..nv as u32)
        .map(|v| {
            let inside = view.neighbors(v).count() as u64;
            let extra = view.threshold(v) as u64 - inside.min(view.threshold(v) as u64);
            view.neighbors(v).filter(|&w| unburnt[w as usize]).count() as u64 + extra
        })
        .collect();
    let mut stack: Vec<u32> = (0..nv as u32)
        .filter(|&v| unburnt[v as usize] && c.chips[v as usize] >= need[v as usize])
        .collect();
    let mut burnt = 0;
    while let Some(v) = stack.pop() {
        if !unburnt[v as usize] {
            continue;
        }
        unburnt[v as usize] = false;
        burnt += 1;
        for w in view.neighbors(v) {
            if unburnt[w as usize] {
                need[w as usize] -= 1;
                if c.chips[w as usize] >= need[w as usize] {
                    stack.push(w);
                }
            }
        }
    }
    Ok(burnt == view.non_sinks().len())
}

/// The identity of the sandpile group, `(σ_max + (σ_max − (2σ_max)°))°`.
pub fn identity_oracle(view: Arc<SinkedGraph>) -> Result<SandpileConfig, SandpileError> {
    let max = SandpileConfig::max_stable(view.clone());
    let twice: Vec<u64> = max.chips.iter().map(|&c| 2 * c).collect();
    let s = stabilize(&SandpileConfig::from_chips(view.clone(), twice)?)?;
    let diff: Vec<u64> = max
        .chips
        .iter()
        .zip(&s.config.chips)
        .map(|(&a, &b)| a + (a - b))
        .collect();
    Ok(stabilize(&SandpileConfig::from_chips(view, diff)?)?.config)
}

/// `base ⊕ ξ` with `ξ` uniform in `{0,…,3}` per non-sink vertex.
pub fn random_recurrent<R: Rng>(
    base: &SandpileConfig,
    rng: &mut R,
) -> Result<SandpileConfig, SandpileError> {
    let noise: Vec<u64> = (0..base.chips.len()).map(|_| rng.gen_range(0..4)).collect();
    Ok(add_and_stabilize(base, &noise)?.config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TileKind {
    /// `e_n`, identity on `G_n^(s)`.
    E,
    /// `e_n^(o)`, identity on `G_n^(o)`.
    EOrigin,
    /// `M_n = ((4·3^n − 2)1_o)°` on `G_n^(s)`.
    M,
    /// `ζ_n`, a cell with sink at `y` and cut corners `o`, `x`.
    Zeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TileId {
    pub kind: TileKind,
    pub level: u32,
}

impl TileId {
    pub fn new(kind: TileKind, level: u32) -> Self {
        TileId { kind, level }
    }
}

impl FromStr for TileId {
    type Err = SandpileError;

    /// Accepts `e_3`, `e_o_3`, `M_3` and `zeta_3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SandpileError::UnknownTile(s.to_string());
        let (name, level) = s.rsplit_once('_').ok_or_else(bad)?;
        let level: u32 = level.parse().map_err(|_| bad())?;
        let kind = match name {
            "e" => TileKind::E,
            "e_o" => TileKind::EOrigin,
            "M" | "m" => TileKind::M,
            "zeta" => TileKind::Zeta,
            _ => return Err(bad()),
        };
        if level == 0 {
            return Err(bad());
        }
        Ok(TileId { kind, level })
    }
}

// Values on G_1 in construction order: o, (1,0), (0,1), (2,0), (1,1), (0,2).
const E1: [u64; 6] = [0, 3, 3, 0, 0, 0];
const M1: [u64; 6] = [0, 3, 3, 1, 2, 1];
const ZETA1: [u64; 6] = [3, 2, 3, 0, 1, 0];

/// Corner permutation for one copy: source corner `k` (o, x, y) goes to
/// corner `p[k]` of the target cell.
type CornerMap = [usize; 3];

struct GlueRule {
    copies: [CornerMap; 3],
    /// Values at `x′ = (s,0)`, `y′ = (0,s)` and `(s,s)`.
    junctions: [u64; 3],
}

fn glue_rule(kind: TileKind) -> GlueRule {
    const ID: CornerMap = [0, 1, 2];
    match kind {
        TileKind::E => GlueRule {
            copies: [ID, [2, 0, 1], [1, 0, 2]],
            junctions: [3, 3, 0],
        },
        TileKind::M | TileKind::EOrigin => GlueRule {
            copies: [ID, ID, ID],
            junctions: [3, 3, 2],
        },
        TileKind::Zeta => GlueRule {
            copies: [ID, ID, ID],
            junctions: [2, 3, 1],
        },
    }
}

fn base_table(kind: TileKind) -> [u64; 6] {
    match kind {
        TileKind::E => E1,
        TileKind::M | TileKind::EOrigin => M1,
        TileKind::Zeta => ZETA1,
    }
}

/// Tile values on every vertex of `G_n` (corner values included: `M_n`
/// carries one chip at each of `x`, `y`).
pub fn tile_values(g: &GasketGraph, id: TileId) -> Result<Vec<u64>, SandpileError> {
    if id.level == 0 {
        return Err(SandpileError::UnknownTile(format!("{:?}_0", id.kind)));
    }
    if id.level > g.level() {
        return Err(GasketError::LevelOutOfRange {
            k: id.level,
            level: g.level(),
        }
        .into());
    }
    let rule = glue_rule(id.kind);
    let mut vals = vec![0u64; g.prefix_len(id.level)];
    vals[..6].copy_from_slice(&base_table(id.kind));
    for n in 1..id.level {
        let s = 1i32 << n;
        let len = g.prefix_len(n);
        let offsets = [(0, 0), (s, 0), (0, s)];
        let mut next = vals.clone();
        for (copy, &(dx, dy)) in offsets.iter().enumerate() {
            let p = rule.copies[copy];
            for v in 0..len as u32 {
                let c = g.vertex(v);
                let bary = [s - c.i - c.j, c.i, c.j];
                let mut t = [0i32; 3];
                for k in 0..3 {
                    t[p[k]] = bary[k];
                }
                let w = g
                    .index_ij(t[1] + dx, t[2] + dy)
                    .expect("copy lies inside G_{n+1}");
                next[w as usize] = vals[v as usize];
            }
        }
        for (k, &(i, j)) in [(s, 0), (0, s), (s, s)].iter().enumerate() {
            next[g.index_ij(i, j).unwrap() as usize] = rule.junctions[k];
        }
        vals = next;
    }
    Ok(vals)
}

/// The sinked graph a tile lives on.
pub fn tile_view(g: Arc<GasketGraph>, id: TileId) -> Result<SinkedGraph, SandpileError> {
    let n = id.level;
    Ok(match id.kind {
        TileKind::E | TileKind::M => SinkedGraph::new(g, n, SinkSpec::CornersXY)?,
        TileKind::EOrigin => SinkedGraph::new(g, n, SinkSpec::Origin)?,
        TileKind::Zeta => {
            let (x, _) = g.corners_at(n)?;
            SinkedGraph::new(g, n, SinkSpec::CornerY)?
                .with_threshold(0, 4)
                .with_threshold(x, 4)
        }
    })
}

/// The named tile as a configuration on its own sinked graph.
pub fn tile(id: TileId) -> Result<SandpileConfig, SandpileError> {
    let g = Arc::new(GasketGraph::build(id.level, Sided::One)?);
    tile_on(g, id)
}

pub fn tile_on(g: Arc<GasketGraph>, id: TileId) -> Result<SandpileConfig, SandpileError> {
    let vals = tile_values(&g, id)?;
    let view = Arc::new(tile_view(g, id)?);
    SandpileConfig::from_chips(view, vals)
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub sample: String,
    pub passed: bool,
    pub sink_counts: Vec<u64>,
    pub expected_sink_count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub level: u32,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check_periodic(
    eta: &SandpileConfig,
    add: &[(u32, u64)],
    expected: u64,
    identity: &str,
    sample: &str,
) -> Result<IdentityCheck, SandpileError> {
    let mut b = vec![0u64; eta.chips.len()];
    for &(v, c) in add {
        b[v as usize] += c;
    }
    let r = add_and_stabilize(eta, &b)?;
    let sink_counts: Vec<u64> = r.sink_absorbed.iter().map(|&(_, c)| c).collect();
    let passed = r.config == *eta && sink_counts.iter().all(|&c| c == expected);
    Ok(IdentityCheck {
        identity: identity.to_string(),
        sample: sample.to_string(),
        passed,
        sink_counts,
        expected_sink_count: expected,
    })
}

/// Checks `η ⊕ (2·3^n)1_o = η` on `G_n^(s)` and `η ⊕ 3^n(1_x + 1_y) = η`,
/// `η ⊕ 3^{n+1}1_x = η` on `G_n^(o)` for tiles and random recurrent samples.
pub fn verify_toppling_identities(
    n: u32,
    random_samples: usize,
    seed: u64,
) -> Result<IdentityReport, SandpileError> {
    let g = Arc::new(GasketGraph::build(n, Sided::One)?);
    let (x, y) = g.corners_at(n)?;
    let p = 3u64.pow(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let e = tile_on(g.clone(), TileId::new(TileKind::E, n))?;
    let m = SandpileConfig::from_chips(
        e.view.clone(),
        tile_values(&g, TileId::new(TileKind::M, n))?,
    )?;
    let mut side_s = vec![("e_n".to_string(), e.clone())];
    if is_recurrent(&m)? {
        side_s.push(("M_n".to_string(), m));
    }
    for k in 0..random_samples {
        side_s.push((format!("random#{k}"), random_recurrent(&e, &mut rng)?));
    }
    for (name, eta) in &side_s {
        checks.push(check_periodic(
            eta,
            &[(0, 2 * p)],
            p,
            "2·3^n·1_o on G_n^(s)",
            name,
        )?);
    }

    let eo = tile_on(g.clone(), TileId::new(TileKind::EOrigin, n))?;
    let mut side_o = vec![("e_n^(o)".to_string(), eo.clone())];
    for k in 0..random_samples {
        side_o.push((format!("random#{k}"), random_recurrent(&eo, &mut rng)?));
    }
    for (name, eta) in &side_o {
        checks.push(check_periodic(
            eta,
            &[(x, p), (y, p)],
            2 * p,
            "3^n·(1_x+1_y) on G_n^(o)",
            name,
        )?);
        checks.push(check_periodic(
            eta,
            &[(x, 3 * p)],
            3 * p,
            "3^(n+1)·1_x on G_n^(o)",
            name,
        )?);
    }
    Ok(IdentityReport { level: n, checks })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryBatch {
    pub interior: SandpileConfig,
    /// Chips left at `(x, y)`.
    pub boundary: [u64; 2],
    /// Chips sent out of `G_n` through `(x, y)`.
    pub emitted: [u64; 2],
    /// Whether the closed form was used.
    pub batched: bool,
}

/// Topples the cut points `x`, `y` of `G_n` together with all of `G_n^(s)`
/// `k` times. `interior` lives on `G_n^(s)` and `boundary` holds the chips
/// paused at `(x, y)`, each of which must be at least `2k + 2`. A recurrent
/// interior is left intact and each cut point loses `2k` net; otherwise the
/// rounds are replayed one at a time.
pub fn batch_topple_boundary(
    interior: &SandpileConfig,
    boundary: [u64; 2],
    k: u64,
) -> Result<BoundaryBatch, SandpileError> {
    let view = interior.view.clone();
    if view.spec() != SinkSpec::CornersXY {
        return Err(SandpileError::GraphMismatch);
    }
    if k > 0 && boundary.iter().any(|&b| b < 2 * k + 2) {
        return Err(SandpileError::Unstable(view.sinks()[0]));
    }
    if k == 0 {
        return Ok(BoundaryBatch {
            interior: interior.clone(),
            boundary,
            emitted: [0, 0],
            batched: true,
        });
    }
    if is_recurrent(interior)? {
        return Ok(BoundaryBatch {
            interior: interior.clone(),
            boundary: [boundary[0] - 2 * k, boundary[1] - 2 * k],
            emitted: [2 * k, 2 * k],
            batched: true,
        });
    }
    let (x, y) = view.graph().corners_at(view.level())?;
    let corners = [x, y];
    let mut cur = interior.clone();
    let mut bnd = boundary;
    let mut emitted = [0u64; 2];
    for _ in 0..k {
        for (c, &v) in corners.iter().enumerate() {
            if bnd[c] < 4 {
                continue;
            }
            bnd[c] -= 4;
            emitted[c] += 2;
            for w in view.neighbors(v) {
                cur.add(w, 1);
            }
        }
        let r = stabilize(&cur)?;
        for &(s, a) in &r.sink_absorbed {
            bnd[corners.iter().position(|&v| v == s).unwrap()] += a;
        }
        cur = r.config;
    }
    Ok(BoundaryBatch {
        interior: cur,
        boundary: bnd,
        emitted,
        batched: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view(n: u32, spec: SinkSpec) -> Arc<SinkedGraph> {
        Arc::new(SinkedGraph::standalone(n, spec).unwrap())
    }

    #[test]
    fn e1_matches_identity_oracle() {
        let e = tile(TileId::new(TileKind::E, 1)).unwrap();
        let oracle = identity_oracle(e.view().clone()).unwrap();
        assert_eq!(e, oracle);
    }

    #[test]
    fn two_e1_absorbs_three_per_sink() {
        let e = tile(TileId::new(TileKind::E, 1)).unwrap();
        let r = oplus(&e, &e).unwrap();
        assert_eq!(r.config, e);
        assert!(r.sink_absorbed.iter().all(|&(_, c)| c == 3));
    }

    #[test]
    fn zero_on_g1_is_not_recurrent() {
        let z = SandpileConfig::zero(view(1, SinkSpec::CornersXY));
        assert!(!is_recurrent(&z).unwrap());
        let m = SandpileConfig::max_stable(view(1, SinkSpec::CornersXY));
        assert!(is_recurrent(&m).unwrap());
    }

    #[test]
    fn unstable_input_is_rejected_by_burning() {
        let mut c = SandpileConfig::zero(view(1, SinkSpec::CornersXY));
        c.set(0, 5);
        assert!(matches!(is_recurrent(&c), Err(SandpileError::Unstable(0))));
    }

    #[test]
    fn tile_ids_parse() {
        assert_eq!(
            "e_3".parse::<TileId>().unwrap(),
            TileId::new(TileKind::E, 3)
        );
        assert_eq!(
            "e_o_2".parse::<TileId>().unwrap(),
            TileId::new(TileKind::EOrigin, 2)
        );
        assert_eq!(
            "zeta_4".parse::<TileId>().unwrap(),
            TileId::new(TileKind::Zeta, 4)
        );
        assert!("q_3".parse::<TileId>().is_err());
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let mut c = SandpileConfig::zero(view(1, SinkSpec::Origin));
        c.set(1, 1000);
        let r = stabilize_with(&c, ToppleOrder::Lifo, Some(10));
        assert!(matches!(r, Err(SandpileError::Budget { .. })));
    }
}
