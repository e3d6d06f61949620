//! Rotor-router aggregation and the abelian stack odometer.
//!
//! The `k`th chip fired from `x` travels to `ρ_k(x) = mech[x][(pos[x] + k) mod d]`.
//! The first chip reaching a vertex is absorbed there.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gasket::GasketGraph;
use crate::growth::divisible::host_for_mass;
use crate::growth::{set_radii, GrowthError, GrowthOutcome, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mechanism {
    Clockwise,
    CounterClockwise,
    /// Independent uniformly random cyclic orders, one per vertex.
    Random(u64),
}

impl Mechanism {
    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::Clockwise => "cw",
            Mechanism::CounterClockwise => "ccw",
            Mechanism::Random(_) => "random",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InitialRotors {
    Zero,
    Random(u64),
}

/// Simple periodic rotor mechanism with current rotor positions.
#[derive(Debug, Clone)]
pub struct RotorSystem {
    graph: Arc<GasketGraph>,
    mechanism: Mechanism,
    cycle: Vec<Vec<u32>>,
    pos: Vec<u32>,
}

impl RotorSystem {
    pub fn new(graph: Arc<GasketGraph>, mechanism: Mechanism, init: InitialRotors) -> Self {
        let nv = graph.num_vertices();
        let mut cycle: Vec<Vec<u32>> = Vec::with_capacity(nv);
        let mut rng = match mechanism {
            Mechanism::Random(s) => Some(ChaCha8Rng::seed_from_u64(s)),
            _ => None,
        };
        for v in 0..nv as u32 {
            let (px, py) = graph.vertex(v).position();
            let angle = |w: &u32| {
                let (qx, qy) = graph.vertex(*w).position();
                (qy - py).atan2(qx - px).rem_euclid(std::f64::consts::TAU)
            };
            let mut nb: Vec<u32> = graph.neighbors(v).to_vec();
            nb.sort_by(|a, b| angle(a).total_cmp(&angle(b)));
            match mechanism {
                Mechanism::CounterClockwise => {}
                Mechanism::Clockwise => nb.reverse(),
                Mechanism::Random(_) => nb.shuffle(rng.as_mut().unwrap()),
            }
            cycle.push(nb);
        }
        let pos = match init {
            InitialRotors::Zero => vec![0; nv],
            InitialRotors::Random(s) => {
                let mut r = ChaCha8Rng::seed_from_u64(s);
                cycle
                    .iter()
                    .map(|c| r.gen_range(0..c.len() as u32))
                    .collect()
            }
        };
        RotorSystem {
            graph,
            mechanism,
            cycle,
            pos,
        }
    }

    pub fn graph(&self) -> &Arc<GasketGraph> {
        &self.graph
    }

    pub fn mechanism(&self) -> Mechanism {
        self.mechanism
    }

    pub fn positions(&self) -> &[u32] {
        &self.pos
    }

    pub fn cycle(&self, x: u32) -> &[u32] {
        &self.cycle[x as usize]
    }

    /// Whether every cycle visits each neighbour exactly once.
    pub fn is_simple(&self) -> bool {
        (0..self.cycle.len()).all(|x| {
            let mut c = self.cycle[x].clone();
            c.sort_unstable();
            c == self.graph.neighbors(x as u32)
        })
    }

    /// Target of the `k`th rotor in the stack at `x`, `k ≥ 1`.
    pub fn rho(&self, x: u32, k: u64) -> u32 {
        let c = &self.cycle[x as usize];
        let d = c.len() as u64;
        c[((self.pos[x as usize] as u64 + k) % d) as usize]
    }

    /// Smallest `j ≥ 1` with `ρ_j(x)` equal to the `i`th entry of the cycle.
    pub fn first_use(&self, x: u32, i: usize) -> u64 {
        let d = self.cycle[x as usize].len() as i64;
        ((i as i64 - self.pos[x as usize] as i64 - 1).rem_euclid(d) + 1) as u64
    }

    /// `R_ρ(e, n)` for the edge from `x` to its `i`th cycle entry.
    pub fn edge_count(&self, x: u32, i: usize, n: u64) -> u64 {
        let d = self.cycle[x as usize].len() as u64;
        (n + d - self.first_use(x, i)) / d
    }

    /// `Δ_ρ u(x) = Σ_{t(e)=x} R_ρ(e, u(s(e))) − u(x)`.
    pub fn stack_laplacian(&self, u: &[u64]) -> Vec<i64> {
        let mut out: Vec<i64> = u.iter().map(|&n| -(n as i64)).collect();
        for (y, &n) in u.iter().enumerate() {
            if n == 0 {
                continue;
            }
            for (i, &x) in self.cycle[y].iter().enumerate() {
                out[x as usize] += self.edge_count(y as u32, i, n) as i64;
            }
        }
        out
    }

    /// `Top_ρ(u)(x) = ρ_{u(x)}(x)` on the support of `u`.
    pub fn top(&self, u: &[u64]) -> Vec<Option<u32>> {
        u.iter()
            .enumerate()
            .map(|(x, &n)| (n > 0).then(|| self.rho(x as u32, n)))
            .collect()
    }

    /// Rotor positions after `u(x)` firings at each vertex.
    pub fn advanced(&self, u: &[u64]) -> RotorSystem {
        let mut next = self.clone();
        for (x, &n) in u.iter().enumerate() {
            let d = self.cycle[x].len() as u64;
            next.pos[x] = ((self.pos[x] as u64 + n) % d) as u32;
        }
        next
    }
}

/// Sequential rotor walks: particle after particle from `o`.
pub fn simulate_walks(rotors: &RotorSystem, m: u64) -> Result<(Vec<u64>, Vec<u64>), GrowthError> {
    let g = rotors.graph();
    let nv = g.num_vertices();
    let edge = 1u32 << g.level();
    let mut occupied = vec![0u64; nv];
    let mut u = vec![0u64; nv];
    for _ in 0..m {
        let mut x = 0u32;
        while occupied[x as usize] == 1 {
            u[x as usize] += 1;
            x = rotors.rho(x, u[x as usize]);
        }
        if g.dist(x) + 1 >= edge {
            return Err(GrowthError::Capacity(format!(
                "rotor cluster of {m} reaches the host boundary"
            )));
        }
        occupied[x as usize] = 1;
    }
    Ok((occupied, u))
}

/// Stack model with all `m` chips placed at once and a FIFO scheduler that
/// fires every surplus chip at a vertex before moving on.
pub fn stabilize_stack(
    rotors: &RotorSystem,
    sigma0: &[u64],
) -> Result<(Vec<u64>, Vec<u64>), GrowthError> {
    let g = rotors.graph();
    let nv = g.num_vertices();
    let edge = 1u32 << g.level();
    let mut sigma = sigma0.to_vec();
    let mut u = vec![0u64; nv];
    let mut queue: VecDeque<u32> = (0..nv as u32).filter(|&x| sigma[x as usize] > 1).collect();
    while let Some(x) = queue.pop_front() {
        let xi = x as usize;
        while sigma[xi] > 1 {
            sigma[xi] -= 1;
            u[xi] += 1;
            let y = rotors.rho(x, u[xi]);
            if g.dist(y) + 1 >= edge {
                return Err(GrowthError::Capacity(
                    "stack cluster reaches the host boundary".into(),
                ));
            }
            sigma[y as usize] += 1;
            if sigma[y as usize] == 2 {
                queue.push_back(y);
            }
        }
    }
    Ok((sigma, u))
}

/// Rotor-router aggregation of `m` particles from `o` on a host graph sized for
/// `m`. When `seed` is given the initial rotors are uniform random.
pub fn rotor_router(
    m: u64,
    mechanism: Mechanism,
    seed: Option<u64>,
) -> Result<GrowthOutcome, GrowthError> {
    let g = host_for_mass(m)?;
    let init = seed
        .map(InitialRotors::Random)
        .unwrap_or(InitialRotors::Zero);
    let rotors = RotorSystem::new(g, mechanism, init);
    let mut out = rotor_router_on(&rotors, m)?;
    out.seed = seed;
    Ok(out)
}

pub fn rotor_router_on(rotors: &RotorSystem, m: u64) -> Result<GrowthOutcome, GrowthError> {
    let (sigma, u) = simulate_walks(rotors, m)?;
    Ok(rotor_outcome(rotors, m, sigma, u))
}

fn rotor_outcome(rotors: &RotorSystem, m: u64, sigma: Vec<u64>, u: Vec<u64>) -> GrowthOutcome {
    let g = rotors.graph().clone();
    let cluster: Vec<u32> = (0..g.num_vertices() as u32)
        .filter(|&x| sigma[x as usize] > 0)
        .collect();
    let fired: Vec<u32> = (0..g.num_vertices() as u32)
        .filter(|&x| u[x as usize] > 0)
        .collect();
    let (in_radius, out_radius) = set_radii(&g, &cluster);
    let radius = (in_radius == out_radius && out_radius >= 0).then_some(out_radius as u32);
    let final_rotors = rotors.advanced(&u);
    GrowthOutcome {
        model: Model::Rotor,
        m,
        graph: g,
        cluster,
        fired,
        radius,
        in_radius,
        out_radius,
        config: sigma,
        odometer: u,
        sink_trace: Vec::new(),
        seed: None,
        divisible: None,
        rotors: Some(final_rotors),
    }
}

/// Output of the three-step odometer computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlResult {
    pub approximation: Vec<i64>,
    pub config: Vec<i64>,
    pub odometer: Vec<u64>,
    pub hill_firings: u64,
    pub hole_unfirings: u64,
    pub cycles_popped: u64,
}

/// Exact stack odometer from an approximation `u1`: approximation, annihilation
/// of hills and holes, then reverse cycle-popping. The result is checked
/// against the least-action conditions before it is returned.
pub fn friedrich_levine(
    sigma0: &[u64],
    u1: &[u64],
    rotors: &RotorSystem,
) -> Result<FlResult, GrowthError> {
    let g = rotors.graph();
    let nv = g.num_vertices();
    if sigma0.len() != nv || u1.len() != nv {
        return Err(GrowthError::Usage(
            "input length differs from the host graph".into(),
        ));
    }
    let budget: u64 =
        64 * (nv as u64 + 1) * (sigma0.iter().sum::<u64>() + u1.iter().sum::<u64>() + 1);
    let lap = rotors.stack_laplacian(u1);
    let mut sigma: Vec<i64> = sigma0
        .iter()
        .zip(&lap)
        .map(|(&s, &l)| s as i64 + l)
        .collect();
    let approximation = sigma.clone();
    let mut u = u1.to_vec();

    let mut order: Vec<u32> = (0..nv as u32).collect();
    order.sort_by_key(|&x| (g.dist(x), x));
    // Firing never creates a hole and unfiring never creates a hill, so the
    // hills are moved to rest first and the holes after.
    let (mut hills, mut holes) = (0u64, 0u64);
    for phase in [Phase::Hills, Phase::Holes] {
        loop {
            let mut changed = false;
            for &x in &order {
                let xi = x as usize;
                loop {
                    match phase {
                        Phase::Hills if sigma[xi] > 1 => {
                            u[xi] += 1;
                            let y = rotors.rho(x, u[xi]);
                            sigma[xi] -= 1;
                            sigma[y as usize] += 1;
                            hills += 1;
                        }
                        Phase::Holes if u[xi] > 0 && sigma[xi] <= 0 => {
                            let y = rotors.rho(x, u[xi]);
                            u[xi] -= 1;
                            sigma[xi] += 1;
                            sigma[y as usize] -= 1;
                            holes += 1;
                        }
                        _ => break,
                    }
                    changed = true;
                    if hills + holes > budget {
                        return Err(GrowthError::Budget(format!(
                            "annihilation exceeded {budget} moves"
                        )));
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    let mut popped = 0u64;
    loop {
        let cycles = top_cycles(rotors, &u);
        if cycles.is_empty() {
            break;
        }
        for c in cycles {
            for x in c {
                u[x as usize] -= 1;
            }
            popped += 1;
            if popped > budget {
                return Err(GrowthError::Budget(
                    "cycle popping did not terminate".into(),
                ));
            }
        }
    }
    check_least_action(rotors, sigma0, &u)?;
    let config: Vec<i64> = sigma0
        .iter()
        .zip(rotors.stack_laplacian(&u))
        .map(|(&s, l)| s as i64 + l)
        .collect();
    Ok(FlResult {
        approximation,
        config,
        odometer: u,
        hill_firings: hills,
        hole_unfirings: holes,
        cycles_popped: popped,
    })
}

#[derive(Clone, Copy)]
enum Phase {
    Hills,
    Holes,
}

/// Disjoint cycles of `Top_ρ(u)` lying inside `supp u`.
pub fn top_cycles(rotors: &RotorSystem, u: &[u64]) -> Vec<Vec<u32>> {
    let top = rotors.top(u);
    let nv = u.len();
    // 0 unvisited, 1 on the current path, 2 done.
    let mut state = vec![0u8; nv];
    let mut out = Vec::new();
    for start in 0..nv {
        if top[start].is_none() || state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut x = start;
        loop {
            if state[x] == 1 {
                let at = path.iter().position(|&p| p == x as u32).unwrap();
                out.push(path[at..].to_vec());
                break;
            }
            if state[x] == 2 {
                break;
            }
            state[x] = 1;
            path.push(x as u32);
            match top[x] {
                Some(y) if u[y as usize] > 0 => x = y as usize,
                _ => break,
            }
        }
        for p in path {
            state[p as usize] = 2;
        }
    }
    out
}

/// The four least-action conditions for the stack odometer `u`.
pub fn check_least_action(
    rotors: &RotorSystem,
    sigma0: &[u64],
    u: &[u64],
) -> Result<(), GrowthError> {
    let g = rotors.graph();
    let edge = 1u32 << g.level();
    let lap = rotors.stack_laplacian(u);
    for x in 0..u.len() {
        let s = sigma0[x] as i64 + lap[x];
        if s > 1 {
            return Err(GrowthError::Certificate(format!(
                "{s} chips at {:?}",
                g.vertex(x as u32)
            )));
        }
        if u[x] > 0 {
            if s != 1 {
                return Err(GrowthError::Certificate(format!(
                    "{s} chips on the support at {:?}",
                    g.vertex(x as u32)
                )));
            }
            if g.dist(x as u32) + 1 >= edge {
                return Err(GrowthError::Capacity(
                    "odometer support reaches the host boundary".into(),
                ));
            }
        }
    }
    if !top_cycles(rotors, u).is_empty() {
        return Err(GrowthError::Certificate(
            "rotor tops contain a cycle".into(),
        ));
    }
    Ok(())
}
