//! Divisible sandpile started from `m·1_o`.
//!
//! A vertex holding mass `s > 1` keeps 1 and sends `(s − 1)/deg` to each
//! neighbour. The odometer `u(x)` is the total mass emitted from `x`, and the
//! final mass is `m·1_o + Δu` with `Δu(z) = Σ_{x∼z} u(x)/deg(x) − u(z)`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::gasket::{GasketGraph, Sided, MAX_LEVEL};
use crate::growth::{set_radii, GrowthError, GrowthOutcome, Model};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const MAX_SWEEPS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arithmetic {
    /// Rational odometer certified by the least-action conditions.
    Exact,
    /// Floating-point relaxation until every excess is below the tolerance.
    Float(f64),
}

impl Default for Arithmetic {
    fn default() -> Self {
        Arithmetic::Float(DEFAULT_TOLERANCE)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Exact(v) => v.len(),
            Values::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Values::Exact(v) => v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
            Values::Float(v) => v.clone(),
        }
    }

    pub fn is_positive(&self, i: usize) -> bool {
        match self {
            Values::Exact(v) => v[i].is_positive(),
            Values::Float(v) => v[i] > 0.0,
        }
    }
}

/// Final mass and odometer over every vertex of the host graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisibleState {
    pub mass: Values,
    pub odometer: Values,
}

impl DivisibleState {
    pub fn support(&self) -> Vec<u32> {
        (0..self.odometer.len())
            .filter(|&i| self.odometer.is_positive(i))
            .map(|i| i as u32)
            .collect()
    }
}

/// Smallest host graph on which the cluster of mass `m` sits strictly inside.
pub fn host_for_mass(m: u64) -> Result<Arc<GasketGraph>, GrowthError> {
    for level in 2..=MAX_LEVEL {
        let g = GasketGraph::build(level, Sided::One)?;
        let edge = 1u32 << level;
        let r = edge - 3;
        if g.ball(r)?.bbar_twice() > 2 * m {
            return Ok(Arc::new(g));
        }
    }
    Err(GrowthError::Capacity(format!(
        "mass {m} exceeds the largest host graph"
    )))
}

/// `n_m = max{k ≥ 0 : b̄(k) ≤ m}` with `b̄(k) = |B_k| − ½|∂_I B_k|`.
pub fn n_of_mass(g: &GasketGraph, m: u64) -> Result<u32, GrowthError> {
    let mut k = 0;
    while g.ball(k + 1)?.bbar_twice() <= 2 * m {
        k += 1;
        if k + 2 >= 1 << g.level() {
            return Err(GrowthError::Capacity(format!(
                "n_m for mass {m} exceeds G_{}",
                g.level()
            )));
        }
    }
    Ok(k)
}

pub fn divisible_sandpile(m: u64, arithmetic: Arithmetic) -> Result<GrowthOutcome, GrowthError> {
    let g = host_for_mass(m)?;
    let state = match arithmetic {
        Arithmetic::Float(tol) => relax_float(&g, m, tol, MAX_SWEEPS)?,
        Arithmetic::Exact => solve_exact(&g, m)?,
    };
    Ok(outcome(g, m, state))
}

fn outcome(g: Arc<GasketGraph>, m: u64, state: DivisibleState) -> GrowthOutcome {
    let cluster = state.support();
    let (in_radius, out_radius) = set_radii(&g, &cluster);
    let radius = (in_radius == out_radius && out_radius >= 0).then_some(out_radius as u32);
    GrowthOutcome {
        model: Model::Divisible,
        m,
        graph: g,
        fired: cluster.clone(),
        cluster,
        radius,
        in_radius,
        out_radius,
        config: Vec::new(),
        odometer: Vec::new(),
        sink_trace: Vec::new(),
        seed: None,
        divisible: Some(state),
        rotors: None,
    }
}

/// Topples every vertex with positive excess, sweeping over the active set
/// until the largest excess drops below `tol`.
pub fn relax_float(
    g: &GasketGraph,
    m: u64,
    tol: f64,
    max_sweeps: u64,
) -> Result<DivisibleState, GrowthError> {
    let nv = g.num_vertices();
    let mut mass = vec![0f64; nv];
    let mut odo = vec![0f64; nv];
    mass[0] = m as f64;
    let mut active: Vec<u32> = vec![0];
    let mut in_active = vec![false; nv];
    in_active[0] = true;
    let edge = 1u32 << g.level();
    let mut sweeps = 0u64;
    loop {
        let mut worst = 0f64;
        let mut grown = Vec::new();
        for &v in &active {
            let x = v as usize;
            let e = mass[x] - 1.0;
            if e <= 0.0 {
                continue;
            }
            worst = worst.max(e);
            mass[x] = 1.0;
            odo[x] += e;
            let share = e / g.degree(v) as f64;
            for &w in g.neighbors(v) {
                mass[w as usize] += share;
                if !in_active[w as usize] {
                    in_active[w as usize] = true;
                    grown.push(w);
                }
            }
        }
        for w in grown {
            if g.dist(w) + 1 >= edge {
                return Err(GrowthError::Capacity(format!(
                    "divisible cluster of mass {m} reaches the host boundary"
                )));
            }
            active.push(w);
        }
        sweeps += 1;
        if worst < tol {
            break;
        }
        if sweeps >= max_sweeps {
            return Err(GrowthError::Budget(format!(
                "residual excess {worst:e} after {sweeps} sweeps"
            )));
        }
    }
    Ok(DivisibleState {
        mass: Values::Float(mass),
        odometer: Values::Float(odo),
    })
}

/// Exact odometer: solve `σ = 1` on a candidate support, then enlarge or
/// shrink the support until the least-action certificate holds.
pub fn solve_exact(g: &GasketGraph, m: u64) -> Result<DivisibleState, GrowthError> {
    let nv = g.num_vertices();
    if m <= 1 {
        let mut mass = vec![BigRational::zero(); nv];
        mass[0] = BigRational::from_integer(BigInt::from(m));
        return Ok(DivisibleState {
            mass: Values::Exact(mass),
            odometer: Values::Exact(vec![BigRational::zero(); nv]),
        });
    }
    let guess = relax_float(g, m, 1e-10, MAX_SWEEPS)?;
    let fo = guess.odometer.to_f64();
    let mut support: BTreeSet<u32> = (0..nv as u32).filter(|&v| fo[v as usize] > 1e-7).collect();
    support.insert(0);
    for _ in 0..64 {
        let u = dirichlet(g, m, &support)?;
        let sigma = final_mass(g, m, &u);
        let drop: Vec<u32> = support
            .iter()
            .copied()
            .filter(|&v| !u[v as usize].is_positive())
            .collect();
        let one = BigRational::one();
        let add: Vec<u32> = (0..nv as u32)
            .filter(|&v| !support.contains(&v) && sigma[v as usize] > one)
            .collect();
        if drop.is_empty() && add.is_empty() {
            certify(g, m, &u, &sigma)?;
            return Ok(DivisibleState {
                mass: Values::Exact(sigma),
                odometer: Values::Exact(u),
            });
        }
        for v in drop {
            support.remove(&v);
        }
        support.extend(add);
    }
    Err(GrowthError::Certificate(format!(
        "support search for mass {m} did not settle"
    )))
}

/// `m·1_o + Δu` exactly.
pub fn final_mass(g: &GasketGraph, m: u64, u: &[BigRational]) -> Vec<BigRational> {
    let nv = g.num_vertices();
    let mut s = vec![BigRational::zero(); nv];
    s[0] = BigRational::from_integer(BigInt::from(m));
    for x in 0..nv {
        if u[x].is_zero() {
            continue;
        }
        s[x] -= &u[x];
        let share = &u[x] / BigRational::from_integer(BigInt::from(g.degree(x as u32)));
        for &w in g.neighbors(x as u32) {
            s[w as usize] += &share;
        }
    }
    s
}

/// The three least-action conditions: `σ = 1` on `supp u`, finite support
/// away from the host boundary, and `σ ≤ 1` everywhere.
pub fn certify(
    g: &GasketGraph,
    m: u64,
    u: &[BigRational],
    sigma: &[BigRational],
) -> Result<(), GrowthError> {
    let one = BigRational::one();
    let edge = 1u32 << g.level();
    for x in 0..g.num_vertices() {
        if u[x].is_negative() {
            return Err(GrowthError::Certificate(format!(
                "negative odometer at {:?}",
                g.vertex(x as u32)
            )));
        }
        if u[x].is_positive() {
            if sigma[x] != one {
                return Err(GrowthError::Certificate(format!(
                    "mass {} on the support",
                    sigma[x]
                )));
            }
            if g.dist(x as u32) + 1 >= edge {
                return Err(GrowthError::Capacity(format!(
                    "divisible cluster of mass {m} reaches the host boundary"
                )));
            }
        }
        if sigma[x] > one {
            return Err(GrowthError::Certificate(format!(
                "unstable mass {} at {:?}",
                sigma[x],
                g.vertex(x as u32)
            )));
        }
    }
    Ok(())
}

/// Solves `σ = 1` on `support` with `u = 0` elsewhere. With `w = u/deg` the
/// system is `Σ_{y∼x, y∈A} w(y) − deg(x)·w(x) = 1 − m·1_o(x)`, which is
/// symmetric; it is eliminated in minimum-degree order.
fn dirichlet(
    g: &GasketGraph,
    m: u64,
    support: &BTreeSet<u32>,
) -> Result<Vec<BigRational>, GrowthError> {
    let idx: Vec<u32> = support.iter().copied().collect();
    let mut pos = vec![usize::MAX; g.num_vertices()];
    for (i, &v) in idx.iter().enumerate() {
        pos[v as usize] = i;
    }
    let n = idx.len();
    let int = |k: i64| BigRational::from_integer(BigInt::from(k));
    let mut rows: Vec<BTreeMap<usize, BigRational>> = Vec::with_capacity(n);
    let mut rhs: Vec<BigRational> = Vec::with_capacity(n);
    for &v in &idx {
        let mut row = BTreeMap::new();
        row.insert(pos[v as usize], int(-(g.degree(v) as i64)));
        for &w in g.neighbors(v) {
            let p = pos[w as usize];
            if p != usize::MAX {
                row.insert(p, int(1));
            }
        }
        rows.push(row);
        rhs.push(if v == 0 { int(1 - m as i64) } else { int(1) });
    }
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let p = (0..n)
            .filter(|&i| alive[i])
            .min_by_key(|&i| rows[i].len())
            .unwrap();
        alive[p] = false;
        order.push(p);
        let pivot = rows[p][&p].clone();
        if pivot.is_zero() {
            return Err(GrowthError::Certificate("singular Dirichlet system".into()));
        }
        let prow: Vec<(usize, BigRational)> =
            rows[p].iter().map(|(&j, a)| (j, a.clone())).collect();
        let pb = rhs[p].clone();
        for &(q, _) in &prow {
            if q == p || !alive[q] {
                continue;
            }
            let a = match rows[q].remove(&p) {
                Some(a) => a,
                None => continue,
            };
            let f = a / &pivot;
            for (j, apj) in &prow {
                if *j == p {
                    continue;
                }
                let e = rows[q].entry(*j).or_insert_with(BigRational::zero);
                *e -= &f * apj;
                if e.is_zero() {
                    rows[q].remove(j);
                }
            }
            let delta = &f * &pb;
            rhs[q] -= delta;
        }
    }
    let mut w = vec![BigRational::zero(); n];
    for &p in order.iter().rev() {
        let mut acc = rhs[p].clone();
        for (j, a) in &rows[p] {
            if *j != p {
                acc -= a * &w[*j];
            }
        }
        w[p] = acc / &rows[p][&p];
    }
    let mut u = vec![BigRational::zero(); g.num_vertices()];
    for (i, &v) in idx.iter().enumerate() {
        u[v as usize] = &w[i] * int(g.degree(v) as i64);
    }
    Ok(u)
}
