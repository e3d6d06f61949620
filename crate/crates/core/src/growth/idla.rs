//! Internal DLA from `o` and ensemble statistics.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gasket::{level_for_radius, GasketGraph, Sided, MAX_LEVEL};
use crate::growth::{set_radii, GrowthError, GrowthOutcome, Model};

const NONE: u32 = u32::MAX;

/// Random stream for run `run` of an ensemble seeded with `seed`.
pub fn run_rng(seed: u64, run: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(run);
    r
}

/// Host graph with room for clusters up to twice the radius `n`.
pub fn host_for_radius(n: u32) -> Result<Arc<GasketGraph>, GrowthError> {
    let level = level_for_radius(2 * n as u64 + 4).max(2);
    if level > MAX_LEVEL {
        return Err(GrowthError::Capacity(format!(
            "radius {n} needs level {level}"
        )));
    }
    Ok(Arc::new(GasketGraph::build(level, Sided::One)?))
}

/// Launches walkers from `o` until `count` sites are occupied and returns the
/// sites in the order they were occupied.
pub fn settle_order<R: Rng>(
    g: &GasketGraph,
    count: u64,
    rng: &mut R,
) -> Result<Vec<u32>, GrowthError> {
    let adj = g.raw_adjacency();
    let edge = 1u32 << g.level();
    let mut occupied = vec![false; g.num_vertices()];
    let mut order = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let mut x = 0usize;
        while occupied[x] {
            let row = &adj[x];
            let d = row.iter().position(|&w| w == NONE).unwrap_or(4);
            x = row[rng.gen_range(0..d)] as usize;
        }
        if g.dist(x as u32) + 1 >= edge {
            return Err(GrowthError::Capacity(format!(
                "IDLA cluster of {count} reaches the host boundary"
            )));
        }
        occupied[x] = true;
        order.push(x as u32);
    }
    Ok(order)
}

pub fn idla(m: u64, seed: u64) -> Result<GrowthOutcome, GrowthError> {
    let mut n = 0u32;
    let mut probe = GasketGraph::build(2, Sided::One)?;
    loop {
        if (1u32 << probe.level()) <= n + 2 {
            probe = GasketGraph::build(probe.level() + 1, Sided::One)?;
            continue;
        }
        if probe.ball(n)?.members.len() as u64 >= m {
            break;
        }
        n += 1;
    }
    let g = host_for_radius(n)?;
    let mut rng = run_rng(seed, 0);
    let order = settle_order(&g, m, &mut rng)?;
    let mut config = vec![0u64; g.num_vertices()];
    for &v in &order {
        config[v as usize] = 1;
    }
    let mut cluster = order;
    cluster.sort_unstable();
    let (in_radius, out_radius) = set_radii(&g, &cluster);
    let radius = (in_radius == out_radius && out_radius >= 0).then_some(out_radius as u32);
    Ok(GrowthOutcome {
        model: Model::Idla,
        m,
        graph: g,
        fired: Vec::new(),
        cluster,
        radius,
        in_radius,
        out_radius,
        config,
        odometer: Vec::new(),
        sink_trace: Vec::new(),
        seed: Some(seed),
        divisible: None,
        rotors: None,
    })
}

/// Height function on `S_o(r)`. A sphere vertex inside the cluster gets the
/// largest distance reached by its connected component of
/// `cluster ∩ {d ≥ r}`, minus `r`; a vertex outside gets minus its graph
/// distance to the cluster.
pub fn h_function(g: &GasketGraph, cluster: &[bool], r: u32, sphere: &[u32]) -> Vec<i64> {
    let nv = g.num_vertices();
    let mut comp_max = vec![-1i64; nv];
    let mut seen = vec![false; nv];
    for &s in sphere {
        if !cluster[s as usize] || seen[s as usize] {
            continue;
        }
        let mut members = vec![s];
        seen[s as usize] = true;
        let mut i = 0;
        let mut far = r as i64;
        while i < members.len() {
            let x = members[i];
            i += 1;
            far = far.max(g.dist(x) as i64);
            for &w in g.neighbors(x) {
                let wi = w as usize;
                if cluster[wi] && !seen[wi] && g.dist(w) >= r {
                    seen[wi] = true;
                    members.push(w);
                }
            }
        }
        for x in members {
            comp_max[x as usize] = far;
        }
    }
    let mut gap = vec![u32::MAX; nv];
    let mut queue: VecDeque<u32> = VecDeque::new();
    for v in 0..nv {
        if cluster[v] {
            gap[v] = 0;
            queue.push_back(v as u32);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &w in g.neighbors(x) {
            if gap[w as usize] == u32::MAX {
                gap[w as usize] = gap[x as usize] + 1;
                queue.push_back(w);
            }
        }
    }
    sphere
        .iter()
        .map(|&s| {
            if cluster[s as usize] {
                comp_max[s as usize] - r as i64
            } else {
                -(gap[s as usize] as i64)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdlaRun {
    pub run: u64,
    pub out_radius: i64,
    pub in_radius: i64,
    pub rescaled_dev: f64,
    pub poisson_count: u64,
    pub h: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdlaEnsemble {
    pub n: u32,
    pub m: u64,
    pub seed: u64,
    pub runs: Vec<IdlaRun>,
    pub sphere: Vec<u32>,
    /// Sample covariance of `h/√(ln n)` over runs, indexed like `sphere`.
    pub covariance: Vec<Vec<f64>>,
}

impl IdlaEnsemble {
    pub fn stats_csv(&self) -> String {
        let mut s = String::from("n,run,out_radius,in_radius,rescaled_dev\n");
        for r in &self.runs {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                self.n, r.run, r.out_radius, r.in_radius, r.rescaled_dev
            ));
        }
        s
    }

    pub fn min_covariance(&self) -> f64 {
        self.covariance
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// `runs` independent clusters with `m = |B_o(n)|` particles. Each run also
/// continues to a Poisson(`m`) particle count for the height function on
/// `S_o(n)`. Runs execute in parallel; results are ordered by run index.
pub fn idla_ensemble(n: u32, runs: u64, seed: u64) -> Result<IdlaEnsemble, GrowthError> {
    if runs == 0 {
        return Err(GrowthError::Usage(
            "an ensemble needs at least one run".into(),
        ));
    }
    if n < 2 {
        return Err(GrowthError::Usage(
            "target radius must be at least 2".into(),
        ));
    }
    let g = host_for_radius(n)?;
    let m = g.ball(n)?.members.len() as u64;
    let sphere = g.sphere(n);
    let poisson = Poisson::new(m as f64).map_err(|e| GrowthError::Usage(e.to_string()))?;
    let scale = (n as f64).ln().sqrt();
    let results: Result<Vec<IdlaRun>, GrowthError> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = run_rng(seed, run);
            let count = poisson.sample(&mut rng) as u64;
            let order = settle_order(&g, m.max(count), &mut rng)?;
            let mut cluster: Vec<u32> = order[..m as usize].to_vec();
            cluster.sort_unstable();
            let (in_radius, out_radius) = set_radii(&g, &cluster);
            let dev = (out_radius - n as i64)
                .abs()
                .max((n as i64 - in_radius).abs());
            let mut mask = vec![false; g.num_vertices()];
            for &v in &order[..count as usize] {
                mask[v as usize] = true;
            }
            Ok(IdlaRun {
                run,
                out_radius,
                in_radius,
                rescaled_dev: dev as f64 / scale,
                poisson_count: count,
                h: h_function(&g, &mask, n, &sphere),
            })
        })
        .collect();
    let runs_out = results?;
    let k = sphere.len();
    let mut covariance = vec![vec![0f64; k]; k];
    let rn = runs_out.len() as f64;
    if runs_out.len() > 1 {
        let mean: Vec<f64> = (0..k)
            .map(|i| runs_out.iter().map(|r| r.h[i] as f64 / scale).sum::<f64>() / rn)
            .collect();
        for i in 0..k {
            for j in i..k {
                let c = runs_out
                    .iter()
                    .map(|r| (r.h[i] as f64 / scale - mean[i]) * (r.h[j] as f64 / scale - mean[j]))
                    .sum::<f64>()
                    / (rn - 1.0);
                covariance[i][j] = c;
                covariance[j][i] = c;
            }
        }
    }
    Ok(IdlaEnsemble {
        n,
        m,
        seed,
        runs: runs_out,
        sphere,
        covariance,
    })
}
