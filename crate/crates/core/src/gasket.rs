//! Level-n Sierpinski gasket graphs on the triangular lattice.
//!
//! A vertex `(i, j)` sits at planar position `i·(1,0) + j·(1/2, √3/2)`. The
//! one-sided graph `G_n` occupies `i, j ≥ 0, i + j ≤ 2^n` with corners
//! `o = (0,0)`, `x = (2^n, 0)` and `y = (0, 2^n)`. Vertices are numbered in
//! construction order, so the first `|V(G_k)|` indices of `G_n` form `G_k`.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest level accepted by [`GasketGraph::build`].
pub const MAX_LEVEL: u32 = 12;

const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GasketError {
    #[error("level {level} exceeds the supported maximum {max}")]
    Capacity { level: u32, max: u32 },
    #[error("radius {r} exceeds 2^{level} = {max}")]
    RadiusOutOfRange { r: u32, level: u32, max: u32 },
    #[error("corner level {k} is above the graph level {level}")]
    LevelOutOfRange { k: u32, level: u32 },
}

/// Lattice address of a vertex. `mirrored` marks the reflected half of the
/// two-sided graph; the origin is never mirrored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId {
    pub i: i32,
    pub j: i32,
    pub mirrored: bool,
}

impl VertexId {
    pub const ORIGIN: VertexId = VertexId {
        i: 0,
        j: 0,
        mirrored: false,
    };

    pub fn new(i: i32, j: i32) -> Self {
        VertexId {
            i,
            j,
            mirrored: false,
        }
    }

    /// Planar position; the mirrored half is reflected through the vertical
    /// line at `o`.
    pub fn position(&self) -> (f64, f64) {
        let x = self.i as f64 + 0.5 * self.j as f64;
        let y = self.j as f64 * 3f64.sqrt() / 2.0;
        if self.mirrored {
            (-x, y)
        } else {
            (x, y)
        }
    }

    /// Lattice coordinates with the reflection applied, `(i, j) ↦ (−i−j, j)`.
    pub fn lattice(&self) -> (i32, i32) {
        if self.mirrored {
            (-self.i - self.j, self.j)
        } else {
            (self.i, self.j)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sided {
    One,
    Two,
}

impl Sided {
    pub fn name(&self) -> &'static str {
        match self {
            Sided::One => "one",
            Sided::Two => "two",
        }
    }
}

/// An immutable gasket graph with cached distances from `o`.
#[derive(Debug, Clone)]
pub struct GasketGraph {
    level: u32,
    sided: Sided,
    coords: Vec<VertexId>,
    adj: Vec<[u32; 4]>,
    deg: Vec<u8>,
    index: HashMap<VertexId, u32>,
    prefix: Vec<usize>,
    shift_x: Vec<Vec<u32>>,
    shift_y: Vec<Vec<u32>>,
    mirror: Vec<u32>,
    dist: Vec<u32>,
}

impl GasketGraph {
    /// Builds `G_n` by repeated triplication with exact coordinate dedup.
    pub fn build(level: u32, sided: Sided) -> Result<Self, GasketError> {
        if level > MAX_LEVEL {
            return Err(GasketError::Capacity {
                level,
                max: MAX_LEVEL,
            });
        }
        let mut coords: Vec<VertexId> = vec![
            VertexId::new(0, 0),
            VertexId::new(1, 0),
            VertexId::new(0, 1),
        ];
        let mut edges: Vec<(u32, u32)> = vec![(0, 1), (0, 2), (1, 2)];
        let mut index: HashMap<VertexId, u32> = coords
            .iter()
            .enumerate()
            .map(|(k, &c)| (c, k as u32))
            .collect();
        let mut prefix = vec![3usize];
        let mut shift_x = Vec::new();
        let mut shift_y = Vec::new();
        for lvl in 1..=level {
            let s = 1i32 << (lvl - 1);
            let base_len = coords.len();
            let base_edges = edges.len();
            for (dx, dy) in [(s, 0), (0, s)] {
                let mut map = Vec::with_capacity(base_len);
                for k in 0..base_len {
                    let c = VertexId::new(coords[k].i + dx, coords[k].j + dy);
                    let id = *index.entry(c).or_insert_with(|| {
                        coords.push(c);
                        (coords.len() - 1) as u32
                    });
                    map.push(id);
                }
                for e in 0..base_edges {
                    let (a, b) = edges[e];
                    edges.push((map[a as usize], map[b as usize]));
                }
                if dx > 0 {
                    shift_x.push(map);
                } else {
                    shift_y.push(map);
                }
            }
            prefix.push(coords.len());
        }
        let one = coords.len();
        let mirror: Vec<u32> = coords
            .iter()
            .map(|c| index[&VertexId::new(c.j, c.i)])
            .collect();
        if sided == Sided::Two {
            let mut mapped = vec![0u32; one];
            for k in 1..one {
                let c = VertexId {
                    mirrored: true,
                    ..coords[k]
                };
                index.insert(c, coords.len() as u32);
                mapped[k] = coords.len() as u32;
                coords.push(c);
            }
            let m = edges.len();
            for e in 0..m {
                let (a, b) = edges[e];
                edges.push((mapped[a as usize], mapped[b as usize]));
            }
        }
        let nv = coords.len();
        let mut adj = vec![[NONE; 4]; nv];
        let mut deg = vec![0u8; nv];
        for &(a, b) in &edges {
            let (a, b) = (a as usize, b as usize);
            adj[a][deg[a] as usize] = b as u32;
            deg[a] += 1;
            adj[b][deg[b] as usize] = a as u32;
            deg[b] += 1;
        }
        for (v, row) in adj.iter_mut().enumerate() {
            row[..deg[v] as usize].sort_unstable();
        }
        let dist = bfs(&adj, &deg, 0);
        Ok(GasketGraph {
            level,
            sided,
            coords,
            adj,
            deg,
            index,
            prefix,
            shift_x,
            shift_y,
            mirror,
            dist,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn sided(&self) -> Sided {
        self.sided
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn num_edges(&self) -> usize {
        self.deg.iter().map(|&d| d as usize).sum::<usize>() / 2
    }

    pub fn vertex(&self, v: u32) -> VertexId {
        self.coords[v as usize]
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.coords
    }

    pub fn index_of(&self, id: VertexId) -> Option<u32> {
        self.index.get(&id).copied()
    }

    /// Index of the unmirrored vertex `(i, j)`.
    pub fn index_ij(&self, i: i32, j: i32) -> Option<u32> {
        self.index_of(VertexId::new(i, j))
    }

    /// Sorted neighbour indices.
    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize][..self.deg[v as usize] as usize]
    }

    #[inline]
    pub fn degree(&self, v: u32) -> u32 {
        self.deg[v as usize] as u32
    }

    pub(crate) fn raw_adjacency(&self) -> &[[u32; 4]] {
        &self.adj
    }

    #[inline]
    pub fn dist(&self, v: u32) -> u32 {
        self.dist[v as usize]
    }

    pub fn distances(&self) -> &[u32] {
        &self.dist
    }

    /// `(o, x, y)` of the whole graph.
    pub fn corners(&self) -> (u32, u32, u32) {
        let (x, y) = self.corners_at(self.level).expect("own level");
        (0, x, y)
    }

    /// The corners `x_k = (2^k, 0)` and `y_k = (0, 2^k)` of the sub-gasket `G_k`.
    pub fn corners_at(&self, k: u32) -> Result<(u32, u32), GasketError> {
        if k > self.level {
            return Err(GasketError::LevelOutOfRange {
                k,
                level: self.level,
            });
        }
        let s = 1i32 << k;
        Ok((self.index_ij(s, 0).unwrap(), self.index_ij(0, s).unwrap()))
    }

    /// Number of vertices of `G_k`; these are the indices `0..prefix_len(k)`.
    pub fn prefix_len(&self, k: u32) -> usize {
        self.prefix[k as usize]
    }

    /// Translation `v ↦ v + (2^k, 0)` on `G_k`.
    pub(crate) fn shift_x(&self, k: u32) -> &[u32] {
        &self.shift_x[k as usize]
    }

    /// Translation `v ↦ v + (0, 2^k)` on `G_k`.
    pub(crate) fn shift_y(&self, k: u32) -> &[u32] {
        &self.shift_y[k as usize]
    }

    /// The reflection `(i, j) ↦ (j, i)` on the unmirrored half.
    pub fn mirror(&self, v: u32) -> u32 {
        self.mirror[v as usize]
    }

    /// Iterates edges `(a, b)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.coords.len() as u32).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .filter(move |&&b| b > a)
                .map(move |&b| (a, b))
        })
    }

    /// Closed metric ball `B_o(r)` and its inner boundary.
    pub fn ball(&self, r: u32) -> Result<BallSpec, GasketError> {
        let max = 1u32 << self.level;
        if r > max {
            return Err(GasketError::RadiusOutOfRange {
                r,
                level: self.level,
                max,
            });
        }
        let members: Vec<u32> = (0..self.coords.len() as u32)
            .filter(|&v| self.dist(v) <= r)
            .collect();
        let inner_boundary = members
            .iter()
            .copied()
            .filter(|&v| self.neighbors(v).iter().any(|&w| self.dist(w) > r))
            .collect();
        Ok(BallSpec {
            radius: r,
            members,
            inner_boundary,
        })
    }

    /// Membership mask of `B_o(r)`; negative radii give the empty set.
    pub fn ball_mask(&self, r: i64) -> Vec<bool> {
        self.dist.iter().map(|&d| (d as i64) <= r).collect()
    }

    /// The sphere `S_o(r)`.
    pub fn sphere(&self, r: u32) -> Vec<u32> {
        (0..self.coords.len() as u32)
            .filter(|&v| self.dist(v) == r)
            .collect()
    }

    /// Adjacency CSV: a header line then one `i1,j1,i2,j2` line per edge.
    pub fn edge_csv(&self) -> String {
        let mut out = format!("# level={} sided={}\n", self.level, self.sided.name());
        for (a, b) in self.edges() {
            let (i1, j1) = self.vertex(a).lattice();
            let (i2, j2) = self.vertex(b).lattice();
            let _ = writeln!(out, "{i1},{j1},{i2},{j2}");
        }
        out
    }
}

fn bfs(adj: &[[u32; 4]], deg: &[u8], src: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    let mut queue = VecDeque::new();
    dist[src] = 0;
    queue.push_back(src);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v][..deg[v] as usize] {
            let w = w as usize;
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// `|V(G_n)| = (3/2)(3^n + 1)`.
pub fn vertex_count(n: u32) -> u64 {
    3 * (3u64.pow(n) + 1) / 2
}

/// Smallest level `L` with `2^L ≥ r`.
pub fn level_for_radius(r: u64) -> u32 {
    let mut l = 0;
    while (1u64 << l) < r {
        l += 1;
    }
    l
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallSpec {
    pub radius: u32,
    pub members: Vec<u32>,
    pub inner_boundary: Vec<u32>,
}

impl BallSpec {
    /// `2·b̄ = 2|B| − |∂_I B|`, kept in half units so that `b̄(0) = 1/2` is exact.
    pub fn bbar_twice(&self) -> u64 {
        2 * self.members.len() as u64 - self.inner_boundary.len() as u64
    }

    /// `b̄ = |B| − |∂_I B|/2` when it is an integer.
    pub fn bbar(&self) -> Option<u64> {
        let t = self.bbar_twice();
        t.is_multiple_of(2).then_some(t / 2)
    }
}

/// Which corners of `G_k` act as sinks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SinkSpec {
    /// `∂G_k = {x, y}`, the graph `G_k^(s)`.
    CornersXY,
    /// `{o}`, the graph `G_k^(o)`.
    Origin,
    CornerX,
    CornerY,
}

/// The sub-gasket `G_k` of a built graph with a designated sink set and the
/// Dirichlet Laplacian `Δ′`.
#[derive(Debug, Clone)]
pub struct SinkedGraph {
    graph: Arc<GasketGraph>,
    level: u32,
    spec: SinkSpec,
    nv: usize,
    sink: Vec<bool>,
    threshold: Vec<u32>,
}

impl SinkedGraph {
    pub fn new(graph: Arc<GasketGraph>, level: u32, spec: SinkSpec) -> Result<Self, GasketError> {
        let (x, y) = graph.corners_at(level)?;
        let nv = graph.prefix_len(level);
        let mut sink = vec![false; nv];
        match spec {
            SinkSpec::CornersXY => {
                sink[x as usize] = true;
                sink[y as usize] = true;
            }
            SinkSpec::Origin => sink[0] = true,
            SinkSpec::CornerX => sink[x as usize] = true,
            SinkSpec::CornerY => sink[y as usize] = true,
        }
        let threshold = (0..nv as u32)
            .map(|v| {
                graph
                    .neighbors(v)
                    .iter()
                    .filter(|&&w| (w as usize) < nv)
                    .count() as u32
            })
            .collect();
        Ok(SinkedGraph {
            graph,
            level,
            spec,
            nv,
            sink,
            threshold,
        })
    }

    /// Builds `G_k` on its own and attaches the sinks.
    pub fn standalone(level: u32, spec: SinkSpec) -> Result<Self, GasketError> {
        Self::new(
            Arc::new(GasketGraph::build(level, Sided::One)?),
            level,
            spec,
        )
    }

    /// Overrides the toppling threshold of `v`, used for cells whose corners
    /// are cut points of a larger graph.
    pub fn with_threshold(mut self, v: u32, t: u32) -> Self {
        self.threshold[v as usize] = t;
        self
    }

    pub fn graph(&self) -> &Arc<GasketGraph> {
        &self.graph
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn spec(&self) -> SinkSpec {
        self.spec
    }

    /// Number of vertices of `G_k`, sinks included.
    pub fn len(&self) -> usize {
        self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.nv == 0
    }

    #[inline]
    pub fn is_sink(&self, v: u32) -> bool {
        self.sink[v as usize]
    }

    pub fn sinks(&self) -> Vec<u32> {
        (0..self.nv as u32)
            .filter(|&v| self.sink[v as usize])
            .collect()
    }

    pub fn non_sinks(&self) -> Vec<u32> {
        (0..self.nv as u32)
            .filter(|&v| !self.sink[v as usize])
            .collect()
    }

    #[inline]
    pub fn threshold(&self, v: u32) -> u32 {
        self.threshold[v as usize]
    }

    /// Neighbours of `v` inside `G_k`.
    #[inline]
    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        let nv = self.nv as u32;
        self.graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(move |&w| w < nv)
    }

    /// Entry `Δ′(a, b)` of the Dirichlet Laplacian on non-sink vertices.
    pub fn laplacian(&self, a: u32, b: u32) -> i64 {
        if a == b {
            -(self.threshold(a) as i64)
        } else if self.neighbors(a).any(|w| w == b) {
            1
        } else {
            0
        }
    }

    /// Structural equality; a built graph is determined by its level and sidedness.
    pub fn same_as(&self, other: &SinkedGraph) -> bool {
        let host = Arc::ptr_eq(&self.graph, &other.graph)
            || (self.graph.level() == other.graph.level()
                && self.graph.sided() == other.graph.sided());
        host && self.level == other.level
            && self.sink == other.sink
            && self.threshold == other.threshold
    }
}
