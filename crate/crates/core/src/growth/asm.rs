//! Single-source abelian sandpile growth `(m·1_o)°` on the one-sided gasket.
//!
//! Two engines are provided. The naive engine topples on a large enough
//! `G_L`. The hierarchical engine follows the fundamental diagram: fill
//! `G_k^(s)` to find the boundary mass `m′`, then grow `m′ − 2` chips from each
//! cut point in the two outer copies. Periodic reductions use the toppling
//! identities of the sandpile group, with odometer shifts given by harmonic
//! extensions with integer corner data.

use std::collections::HashMap;
use std::sync::Arc;

use crate::gasket::{level_for_radius, GasketGraph, Sided, MAX_LEVEL};
use crate::growth::{GrowthError, GrowthOutcome, Model};

const NONE: u32 = u32::MAX;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize,
)]
pub enum Engine {
    Naive,
    #[default]
    Hierarchical,
}

/// Final chips and odometer of `(m·1_o)°` over every vertex of the host graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsmState {
    pub m: u64,
    pub chips: Vec<u64>,
    pub odometer: Vec<u64>,
}

/// Upper bound on `r_m` from the Rossin edge count, `r ≤ (3/4)m^{1/d_H} + 1`.
pub fn radius_upper_bound(m: u64) -> u64 {
    let dh = 3f64.ln() / 2f64.ln();
    (0.75 * (m as f64).powf(1.0 / dh)).ceil() as u64 + 1
}

/// Level of the smallest host graph that contains the cluster of `m` chips.
pub fn level_for_mass(m: u64) -> u32 {
    level_for_radius(radius_upper_bound(m) + 2).max(2)
}

/// Radius of the receiving set given the odometer.
pub fn radius_from_odometer(g: &GasketGraph, odometer: &[u64], m: u64) -> u32 {
    if m == 0 {
        return 0;
    }
    odometer
        .iter()
        .enumerate()
        .filter(|(_, &u)| u > 0)
        .flat_map(|(v, _)| g.neighbors(v as u32).iter().map(|&w| g.dist(w)))
        .max()
        .unwrap_or(0)
}

/// Incremental naive stabilization: chips are added at `o` in increasing
/// amounts, which by the abelian property equals stabilizing each total.
///
/// By default the sweep runs on the quotient by the mirror `(i, j) ↦ (j, i)`.
/// The configuration `m·1_o` is mirror symmetric, so a vertex and its mirror
/// image may always topple together. [`NaiveSweep::literal`] topples every
/// vertex of the host graph individually.
#[derive(Debug, Clone)]
pub struct NaiveSweep {
    graph: Arc<GasketGraph>,
    class: Vec<u32>,
    /// Per class: target class and chips sent to it by one toppling.
    adj: Vec<[(u32, u32); 4]>,
    dist: Vec<u32>,
    chips: Vec<u32>,
    odometer: Vec<u64>,
    m: u64,
    max_reached: Option<u32>,
    stack: Vec<u32>,
}

impl NaiveSweep {
    pub fn new(graph: Arc<GasketGraph>) -> Self {
        Self::build(graph, true)
    }

    pub fn literal(graph: Arc<GasketGraph>) -> Self {
        Self::build(graph, false)
    }

    fn build(graph: Arc<GasketGraph>, fold: bool) -> Self {
        let nv = graph.num_vertices();
        let rep = |v: u32| if fold { v.min(graph.mirror(v)) } else { v };
        let mut class = vec![NONE; nv];
        let mut reps = Vec::new();
        for v in 0..nv as u32 {
            if rep(v) == v {
                class[v as usize] = reps.len() as u32;
                reps.push(v);
            }
        }
        for v in 0..nv as u32 {
            class[v as usize] = class[rep(v) as usize];
        }
        let adj = reps
            .iter()
            .map(|&v| {
                let on_axis = graph.mirror(v) == v;
                let mut row = [(NONE, 0u32); 4];
                let mut n = 0;
                for &w in graph.neighbors(v) {
                    // A vertex on the axis topples alone and feeds both members
                    // of a mirror pair; a pair topples together and feeds an
                    // axis vertex twice.
                    let weight = match (fold, on_axis, graph.mirror(w) == w) {
                        (false, _, _) => 1,
                        (true, true, _) if rep(w) != w => continue,
                        (true, false, true) => 2,
                        _ => 1,
                    };
                    let c = class[w as usize];
                    match row[..n].iter_mut().find(|e| e.0 == c) {
                        Some(e) => e.1 += weight,
                        None => {
                            row[n] = (c, weight);
                            n += 1;
                        }
                    }
                }
                row
            })
            .collect();
        let dist = reps.iter().map(|&v| graph.dist(v)).collect();
        let k = reps.len();
        NaiveSweep {
            graph,
            class,
            adj,
            dist,
            chips: vec![0; k],
            odometer: vec![0; k],
            m: 0,
            max_reached: None,
            stack: Vec::new(),
        }
    }

    pub fn graph(&self) -> &Arc<GasketGraph> {
        &self.graph
    }

    pub fn mass(&self) -> u64 {
        self.m
    }

    /// Adds chips at `o` until the total is `m` and stabilizes.
    pub fn advance_to(&mut self, m: u64) -> Result<(), GrowthError> {
        if m < self.m {
            return Err(GrowthError::Usage(format!(
                "sweep is at {}, cannot go back to {m}",
                self.m
            )));
        }
        if m >= u32::MAX as u64 / 4 {
            return Err(GrowthError::Capacity(format!(
                "mass {m} too large for the naive engine"
            )));
        }
        // Class 0 is `o`, the only vertex with threshold 2.
        let threshold = |v: usize| if v == 0 { 2 } else { 4 };
        self.chips[0] += (m - self.m) as u32;
        self.m = m;
        self.stack.push(0);
        let mut far = self.max_reached.unwrap_or(0);
        let mut any = self.max_reached.is_some();
        while let Some(v) = self.stack.pop() {
            let v = v as usize;
            let d = threshold(v);
            let c = self.chips[v];
            if c < d {
                continue;
            }
            let k = c / d;
            self.chips[v] = c - k * d;
            if self.odometer[v] == 0 {
                any = true;
                for &(w, _) in &self.adj[v] {
                    if w != NONE {
                        far = far.max(self.dist[w as usize]);
                    }
                }
            }
            self.odometer[v] += k as u64;
            for &(w, weight) in &self.adj[v] {
                if w == NONE {
                    break;
                }
                let w = w as usize;
                let old = self.chips[w];
                let new = old + k * weight;
                self.chips[w] = new;
                let dw = threshold(w);
                if old < dw && new >= dw {
                    self.stack.push(w as u32);
                }
            }
        }
        if any {
            self.max_reached = Some(far);
        }
        let edge = 1u32 << self.graph.level();
        if any && far + 1 >= edge {
            return Err(GrowthError::Capacity(format!(
                "cluster of {m} chips reaches the corners of G_{}",
                self.graph.level()
            )));
        }
        Ok(())
    }

    /// `r_m` for the current mass.
    pub fn radius(&self) -> u32 {
        self.max_reached.unwrap_or(0)
    }

    pub fn state(&self) -> AsmState {
        AsmState {
            m: self.m,
            chips: self
                .class
                .iter()
                .map(|&c| self.chips[c as usize] as u64)
                .collect(),
            odometer: self
                .class
                .iter()
                .map(|&c| self.odometer[c as usize])
                .collect(),
        }
    }
}

/// Incremental stabilization of `m·1_o` on `G_k^(s)`, reporting the chips
/// absorbed by each of the two sinks.
#[derive(Debug, Clone)]
pub struct BoundarySweep {
    graph: Arc<GasketGraph>,
    nv: usize,
    sinks: (u32, u32),
    thresholds: Vec<i64>,
    chips: Vec<i64>,
    odometer: Vec<i64>,
    m: u64,
}

impl BoundarySweep {
    pub fn new(graph: Arc<GasketGraph>, k: u32) -> Result<Self, GrowthError> {
        let sinks = graph.corners_at(k)?;
        let nv = graph.prefix_len(k);
        let thresholds = prefix_thresholds(&graph, nv);
        Ok(BoundarySweep {
            graph,
            nv,
            sinks,
            thresholds,
            chips: vec![0; nv],
            odometer: vec![0; nv],
            m: 0,
        })
    }

    pub fn advance_to(&mut self, m: u64) -> Result<(), GrowthError> {
        if m < self.m {
            return Err(GrowthError::Usage(format!(
                "sweep is at {}, cannot go back to {m}",
                self.m
            )));
        }
        self.chips[0] += (m - self.m) as i64;
        self.m = m;
        let (x, y) = self.sinks;
        topple(
            &self.graph,
            self.nv,
            &self.thresholds,
            &[x, y],
            &mut self.chips,
            &mut self.odometer,
        );
        Ok(())
    }

    /// Chips absorbed by the sink `x`; by symmetry `y` absorbs the same.
    pub fn absorbed(&self) -> u64 {
        self.chips[self.sinks.0 as usize] as u64
    }

    /// Chips left on the non-sink vertices.
    pub fn retained(&self) -> u64 {
        self.m - 2 * self.absorbed()
    }
}

/// `r_m` for every `m ≤ m_max`, by one naive sweep.
pub fn radius_series(m_max: u64) -> Result<Vec<u32>, GrowthError> {
    let g = Arc::new(GasketGraph::build(level_for_mass(m_max), Sided::One)?);
    let mut sweep = NaiveSweep::new(g);
    let mut out = Vec::with_capacity(m_max as usize + 1);
    for m in 0..=m_max {
        sweep.advance_to(m)?;
        out.push(sweep.radius());
    }
    Ok(out)
}

#[derive(Clone)]
struct Cell {
    chips: Vec<i64>,
    odo: Vec<i64>,
    absorbed: i64,
}

/// Stabilized outer cells of one level at evenly spaced chip counts; any
/// other count is reached by adding the remaining chips to the nearest
/// checkpoint below it.
struct Checkpoints {
    step: i64,
    points: Vec<Cell>,
}

/// Sandpile growth solver bound to one host graph.
pub struct AsmSolver {
    graph: Arc<GasketGraph>,
    harmonic_cache: HashMap<(u32, [i64; 3]), Arc<Vec<i64>>>,
    thresholds: HashMap<u32, Arc<Vec<i64>>>,
    outer_cache: HashMap<u32, Checkpoints>,
}

impl AsmSolver {
    pub fn new(graph: Arc<GasketGraph>) -> Self {
        AsmSolver {
            graph,
            harmonic_cache: HashMap::new(),
            thresholds: HashMap::new(),
            outer_cache: HashMap::new(),
        }
    }

    /// A solver whose host graph holds the cluster of any mass up to `m_max`.
    pub fn for_mass(m_max: u64) -> Result<Self, GrowthError> {
        let level = level_for_mass(m_max);
        if level > MAX_LEVEL {
            return Err(GrowthError::Capacity(format!(
                "mass {m_max} needs level {level}"
            )));
        }
        Ok(Self::new(Arc::new(GasketGraph::build(level, Sided::One)?)))
    }

    pub fn graph(&self) -> &Arc<GasketGraph> {
        &self.graph
    }

    fn check_capacity(&self, m: u64) -> Result<(), GrowthError> {
        let need = level_for_mass(m);
        if need > self.graph.level() {
            return Err(GrowthError::Capacity(format!(
                "mass {m} needs a host graph of level {need}, have {}",
                self.graph.level()
            )));
        }
        Ok(())
    }

    pub fn solve(&mut self, m: u64, engine: Engine) -> Result<AsmState, GrowthError> {
        match engine {
            Engine::Naive => self.naive(m),
            Engine::Hierarchical => self.hierarchical(m),
        }
    }

    pub fn naive(&self, m: u64) -> Result<AsmState, GrowthError> {
        self.check_capacity(m)?;
        let mut sweep = NaiveSweep::literal(self.graph.clone());
        sweep.advance_to(m)?;
        Ok(sweep.state())
    }

    pub fn hierarchical(&mut self, m: u64) -> Result<AsmState, GrowthError> {
        self.check_capacity(m)?;
        let (chips, odo) = self.grow(m as i64)?;
        Ok(AsmState {
            m,
            chips: chips.into_iter().map(|c| c as u64).collect(),
            odometer: odo.into_iter().map(|u| u as u64).collect(),
        })
    }

    /// The pausing level `n` and boundary mass `m′` at each stage of the
    /// fundamental diagram, starting from `m` and continuing with `m′ − 2`.
    pub fn sink_trace(&mut self, m: u64, engine: Engine) -> Result<Vec<(u32, u64)>, GrowthError> {
        self.check_capacity(m)?;
        let mut out = Vec::new();
        let mut cur = m as i64;
        while cur >= 2 {
            let k = pause_level(cur);
            let mp = match engine {
                Engine::Hierarchical => self.fill(k, cur)?.absorbed,
                Engine::Naive => self.fill_naive(k, cur).absorbed,
            };
            out.push((k, mp as u64));
            if cur < 12 {
                break;
            }
            cur = mp - 2;
        }
        Ok(out)
    }

    /// Boundary mass `m′`: chips absorbed by each sink of `G_n^(s)` when `m`
    /// chips are stabilized from `o`, with `n` the pausing level of `m`.
    pub fn boundary_mass(&mut self, m: u64) -> Result<(u32, u64), GrowthError> {
        let k = pause_level(m as i64);
        if k > self.graph.level() {
            return Err(GrowthError::Capacity(format!(
                "pausing level {k} above host level"
            )));
        }
        Ok((k, self.fill(k, m as i64)?.absorbed as u64))
    }

    fn grow(&mut self, m: i64) -> Result<(Vec<i64>, Vec<i64>), GrowthError> {
        let g = self.graph.clone();
        let nv = g.num_vertices();
        if m < 12 {
            let mut chips = vec![0i64; nv];
            let mut odo = vec![0i64; nv];
            chips[0] = m;
            let mut thr = vec![4i64; nv];
            thr[0] = 2;
            topple(&g, nv, &thr, &[], &mut chips, &mut odo);
            return Ok((chips, odo));
        }
        let k = pause_level(m);
        let f = self.fill(k, m)?;
        let (tc, to) = self.grow(f.absorbed - 2)?;
        let nk = g.prefix_len(k);
        let h = 1i32 << k;
        let mut chips = vec![0i64; nv];
        let mut odo = vec![0i64; nv];
        for v in 0..nk {
            chips[v] = f.chips[v];
            odo[v] = f.odo[v] + to[0];
        }
        let xp = g.index_ij(h, 0).unwrap() as usize;
        let yp = g.index_ij(0, h).unwrap() as usize;
        chips[xp] = 2 + tc[0];
        chips[yp] = 2 + tc[0];
        odo[xp] = to[0];
        odo[yp] = to[0];
        let sx = g.shift_x(k);
        let sy = g.shift_y(k);
        for v in 1..nk {
            if tc[v] == 0 && to[v] == 0 {
                continue;
            }
            let xv = sx[v] as usize;
            let yv = sy[g.mirror(v as u32) as usize] as usize;
            chips[xv] += tc[v];
            odo[xv] += to[v];
            chips[yv] += tc[v];
            odo[yv] += to[v];
        }
        if (nk..nv).any(|v| tc[v] != 0 || to[v] != 0) {
            return Err(GrowthError::Hierarchy(format!(
                "tail of {} chips leaves its copy of G_{k}",
                f.absorbed - 2
            )));
        }
        Ok((chips, odo))
    }

    fn fill_naive(&self, k: u32, m: i64) -> Cell {
        let g = &self.graph;
        let nv = g.prefix_len(k);
        let (x, y) = g.corners_at(k).unwrap();
        let mut chips = vec![0i64; nv];
        let mut odo = vec![0i64; nv];
        chips[0] = m;
        let thr = prefix_thresholds(g, nv);
        topple(g, nv, &thr, &[x, y], &mut chips, &mut odo);
        let absorbed = chips[x as usize];
        debug_assert_eq!(absorbed, chips[y as usize]);
        chips[x as usize] = 0;
        chips[y as usize] = 0;
        Cell {
            chips,
            odo,
            absorbed,
        }
    }

    /// `(m·1_o)°` on `G_k^(s)`.
    fn fill(&mut self, k: u32, m: i64) -> Result<Cell, GrowthError> {
        let p3 = 3i64.pow(k);
        if k <= 1 || m < 4 * p3 {
            return Ok(self.fill_naive(k, m));
        }
        let p = (m - 4 * p3) / (2 * p3);
        let m0 = m - 2 * p * p3;
        let mut r = self.fill_core(k, m0)?;
        if p > 0 {
            let (x, y) = self.graph.corners_at(k).unwrap();
            if !recurrent(&self.graph, k, &[x, y], &r.chips) {
                return Err(GrowthError::Hierarchy(format!(
                    "fill of G_{k} with {m0} chips is not recurrent"
                )));
            }
            let w = self.harmonic(k, [5i64.pow(k), 0, 0]);
            for (u, &h) in r.odo.iter_mut().zip(w.iter()) {
                *u += p * h;
            }
            r.absorbed += p * p3;
        }
        Ok(r)
    }

    /// `(m0·1_o)°` on `G_k^(s)` for `4·3^k ≤ m0 < 6·3^k`, built from the bottom
    /// cell and the two symmetric outer cells.
    fn fill_core(&mut self, k: u32, m0: i64) -> Result<Cell, GrowthError> {
        let g = self.graph.clone();
        let b = self.fill(k - 1, m0)?;
        let h = 1i32 << (k - 1);
        let (xb, yb) = g.corners_at(k - 1).unwrap();
        if !recurrent(&g, k - 1, &[xb, yb], &b.chips) {
            return Err(GrowthError::Hierarchy(format!(
                "bottom cell of G_{k} with {m0} chips is not recurrent"
            )));
        }
        let q = self.outer_cell(k - 1, b.absorbed - 2)?;
        let nv = g.prefix_len(k);
        let nb = g.prefix_len(k - 1);
        let mut chips = vec![0i64; nv];
        let mut odo = vec![0i64; nv];
        let uo = q.odo[0];
        for v in 0..nb {
            chips[v] = b.chips[v];
            odo[v] = b.odo[v] + uo;
        }
        for c in [xb, yb] {
            chips[c as usize] = 2 + q.chips[0];
            odo[c as usize] = uo;
        }
        let sx = g.shift_x(k - 1);
        let sy = g.shift_y(k - 1);
        for v in 1..nb as u32 {
            let xv = sx[v as usize] as usize;
            let yv = sy[g.mirror(v) as usize] as usize;
            let qc = q.chips[v as usize];
            let qo = q.odo[v as usize];
            if v == yb {
                // (h, h) is shared by both outer cells.
                chips[xv] = 2 * qc;
                odo[xv] = qo;
            } else if v == xb {
                chips[xv] = 0;
                odo[xv] = 0;
                chips[yv] = 0;
                odo[yv] = 0;
            } else {
                chips[xv] = qc;
                odo[xv] = qo;
                chips[yv] = qc;
                odo[yv] = qo;
            }
        }
        debug_assert_eq!(
            g.vertex(sx[yb as usize]),
            crate::gasket::VertexId::new(h, h)
        );
        Ok(Cell {
            chips,
            odo,
            absorbed: q.absorbed,
        })
    }

    /// `n` chips from `o` on `G_j` with sink `x` and free corner `y` of
    /// threshold 2; this is one outer cell of `G_{j+1}` seen from its cut point.
    fn outer_cell(&mut self, j: u32, n: i64) -> Result<Cell, GrowthError> {
        let per = 3i64.pow(j + 1);
        if j <= 1 || n < 2 * per {
            return Ok(self.outer_cell_naive(j, n));
        }
        let (x, _) = self.graph.corners_at(j).unwrap();
        let mut n0 = n % per + per;
        let mut base = loop {
            if n0 > n {
                return Ok(self.outer_cell_naive(j, n));
            }
            let c = self.outer_cell_naive(j, n0);
            if recurrent(&self.graph, j, &[x], &c.chips) {
                break c;
            }
            n0 += per;
        };
        let q = (n - n0) / per;
        if q > 0 {
            let w = self.harmonic(j, [2 * 5i64.pow(j), 0, 5i64.pow(j)]);
            for (u, &h) in base.odo.iter_mut().zip(w.iter()) {
                *u += q * h;
            }
            base.absorbed += q * per;
        }
        Ok(base)
    }

    fn outer_cell_naive(&mut self, j: u32, n: i64) -> Cell {
        const DIRECT_LEVEL: u32 = 3;
        let nv = self.graph.prefix_len(j);
        if j <= DIRECT_LEVEL {
            let zero = Cell {
                chips: vec![0; nv],
                odo: vec![0; nv],
                absorbed: 0,
            };
            return self.add_to_outer(j, zero, n);
        }
        let step = 3i64.pow(j - DIRECT_LEVEL);
        let idx = (n / step) as usize;
        let mut cp = self.outer_cache.remove(&j).unwrap_or_else(|| Checkpoints {
            step,
            points: vec![Cell {
                chips: vec![0; nv],
                odo: vec![0; nv],
                absorbed: 0,
            }],
        });
        while cp.points.len() <= idx {
            let next = self.add_to_outer(j, cp.points.last().unwrap().clone(), cp.step);
            cp.points.push(next);
        }
        let base = cp.points[idx].clone();
        self.outer_cache.insert(j, cp);
        self.add_to_outer(j, base, n - idx as i64 * step)
    }

    /// Adds `k` chips at `o` of an outer cell and stabilizes.
    fn add_to_outer(&mut self, j: u32, mut cell: Cell, k: i64) -> Cell {
        if k == 0 {
            return cell;
        }
        let g = self.graph.clone();
        let nv = g.prefix_len(j);
        let (x, _) = g.corners_at(j).unwrap();
        let thr = self.prefix_thresholds(j);
        cell.chips[0] += k;
        topple(&g, nv, &thr, &[x], &mut cell.chips, &mut cell.odo);
        cell.absorbed += cell.chips[x as usize];
        cell.chips[x as usize] = 0;
        cell
    }

    fn prefix_thresholds(&mut self, k: u32) -> Arc<Vec<i64>> {
        let g = &self.graph;
        self.thresholds
            .entry(k)
            .or_insert_with(|| Arc::new(prefix_thresholds(g, g.prefix_len(k))))
            .clone()
    }

    /// Harmonic extension to `G_k` of the corner values `(o, x, y)`; every
    /// value is an integer when the corner data are multiples of `5^k`.
    fn harmonic(&mut self, k: u32, corners: [i64; 3]) -> Arc<Vec<i64>> {
        if let Some(h) = self.harmonic_cache.get(&(k, corners)) {
            return h.clone();
        }
        let g = &self.graph;
        let mut h = vec![0i64; g.prefix_len(k)];
        let s = 1i32 << k;
        harmonic_fill(g, &mut h, k, [(0, 0), (s, 0), (0, s)], corners);
        let h = Arc::new(h);
        self.harmonic_cache.insert((k, corners), h.clone());
        h
    }
}

fn harmonic_fill(g: &GasketGraph, h: &mut [i64], l: u32, p: [(i32, i32); 3], v: [i64; 3]) {
    for t in 0..3 {
        h[g.index_ij(p[t].0, p[t].1).unwrap() as usize] = v[t];
    }
    if l == 0 {
        return;
    }
    let mid = |a: (i32, i32), b: (i32, i32)| ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
    let f = |a: i64, b: i64, c: i64| {
        let n = 2 * a + 2 * b + c;
        debug_assert_eq!(n % 5, 0);
        n / 5
    };
    let (m01, m12, m20) = (mid(p[0], p[1]), mid(p[1], p[2]), mid(p[2], p[0]));
    let (v01, v12, v20) = (
        f(v[0], v[1], v[2]),
        f(v[1], v[2], v[0]),
        f(v[2], v[0], v[1]),
    );
    harmonic_fill(g, h, l - 1, [p[0], m01, m20], [v[0], v01, v20]);
    harmonic_fill(g, h, l - 1, [m01, p[1], m12], [v01, v[1], v12]);
    harmonic_fill(g, h, l - 1, [m20, m12, p[2]], [v20, v12, v[2]]);
}

/// Largest `k` with `4·3^k ≤ m`, or 0.
pub fn pause_level(m: i64) -> u32 {
    let mut k = 0;
    while 4 * 3i64.pow(k + 1) <= m {
        k += 1;
    }
    k
}

fn prefix_thresholds(g: &GasketGraph, nv: usize) -> Vec<i64> {
    (0..nv as u32)
        .map(|v| {
            g.neighbors(v)
                .iter()
                .filter(|&&w| (w as usize) < nv)
                .count() as i64
        })
        .collect()
}

/// Stabilizes on the first `nv` vertices; `sinks` collect chips and never fire.
fn topple(
    g: &GasketGraph,
    nv: usize,
    thr: &[i64],
    sinks: &[u32],
    chips: &mut [i64],
    odo: &mut [i64],
) {
    let mut is_sink = vec![false; nv];
    for &s in sinks {
        is_sink[s as usize] = true;
    }
    let mut queued = vec![false; nv];
    let mut stack: Vec<u32> = Vec::new();
    for v in 0..nv {
        if !is_sink[v] && chips[v] >= thr[v] {
            queued[v] = true;
            stack.push(v as u32);
        }
    }
    while let Some(v) = stack.pop() {
        let v = v as usize;
        queued[v] = false;
        let d = thr[v];
        let k = chips[v] / d;
        if k == 0 {
            continue;
        }
        chips[v] -= k * d;
        odo[v] += k;
        for &w in g.neighbors(v as u32) {
            let w = w as usize;
            if w >= nv {
                continue;
            }
            chips[w] += k;
            if !is_sink[w] && !queued[w] && chips[w] >= thr[w] {
                queued[w] = true;
                stack.push(w as u32);
            }
        }
    }
}

/// Burning test on `G_k` with the given sinks and prefix thresholds.
fn recurrent(g: &GasketGraph, k: u32, sinks: &[u32], chips: &[i64]) -> bool {
    let nv = g.prefix_len(k);
    let mut unburnt = vec![true; nv];
    for &s in sinks {
        unburnt[s as usize] = false;
    }
    let mut need = vec![0i64; nv];
    for v in 0..nv {
        if unburnt[v] {
            need[v] = g
                .neighbors(v as u32)
                .iter()
                .filter(|&&w| (w as usize) < nv && unburnt[w as usize])
                .count() as i64;
        }
    }
    let mut stack: Vec<usize> = (0..nv)
        .filter(|&v| unburnt[v] && chips[v] >= need[v])
        .collect();
    let mut burnt = 0;
    while let Some(v) = stack.pop() {
        if !unburnt[v] {
            continue;
        }
        unburnt[v] = false;
        burnt += 1;
        for &w in g.neighbors(v as u32) {
            let w = w as usize;
            if w < nv && unburnt[w] {
                need[w] -= 1;
                if chips[w] >= need[w] {
                    stack.push(w);
                }
            }
        }
    }
    burnt == nv - sinks.len()
}

/// Stabilizes `m·1_o` on a host graph sized for `m` and packages the result.
pub fn sandpile_growth(m: u64, engine: Engine) -> Result<GrowthOutcome, GrowthError> {
    let mut solver = AsmSolver::for_mass(m)?;
    let state = solver.solve(m, engine)?;
    let trace = solver.sink_trace(m, engine)?;
    Ok(outcome_from_state(solver.graph().clone(), state, trace))
}

pub fn outcome_from_state(
    g: Arc<GasketGraph>,
    state: AsmState,
    sink_trace: Vec<(u32, u64)>,
) -> GrowthOutcome {
    let r = radius_from_odometer(&g, &state.odometer, state.m);
    let fired: Vec<u32> = (0..g.num_vertices() as u32)
        .filter(|&v| state.odometer[v as usize] > 0)
        .collect();
    let cluster: Vec<u32> = if state.m == 0 {
        Vec::new()
    } else {
        (0..g.num_vertices() as u32)
            .filter(|&v| {
                v == 0
                    || g.neighbors(v)
                        .iter()
                        .any(|&w| state.odometer[w as usize] > 0)
            })
            .collect()
    };
    GrowthOutcome {
        model: Model::Sandpile,
        m: state.m,
        graph: g,
        cluster,
        fired,
        radius: Some(r),
        in_radius: r as i64,
        out_radius: r as i64,
        config: state.chips,
        odometer: state.odometer,
        sink_trace,
        seed: None,
        divisible: None,
        rotors: None,
    }
}
