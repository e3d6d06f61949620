//! Radial theory of the single-source sandpile: jump tables, the radius
//! recursion, the remainder `R`, the log-periodic function `𝒢` and the
//! volume bounds on `r_m`.

use std::collections::HashMap;
use std::sync::Arc;

use num::integer::gcd;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gasket::{GasketError, GasketGraph, Sided};
use crate::growth::asm::{level_for_mass, radius_series, BoundarySweep, NaiveSweep};
use crate::growth::GrowthError;

/// Below this mass the oracle reads radii from a simulated table.
pub const BASE_TABLE_LEN: u64 = 4 * 81;

/// Largest series depth for which `⌊3^j x̃⌋` stays exact in 128 bits.
pub const MAX_DEPTH: u32 = 46;

#[derive(Debug, Error)]
pub enum RadialError {
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Gasket(#[from] GasketError),
    #[error("|R({x})| = {value} exceeds 1")]
    RemainderBound { x: f64, value: i64 },
    #[error("invalid argument: {0}")]
    Usage(String),
}

/// Hausdorff dimension `log 3 / log 2` of the gasket.
pub fn d_h() -> f64 {
    3f64.log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Via {
    Simulate,
    #[default]
    Recurse,
}

/// Recursion rules keyed by `a = m/3^n ∈ [4, 12)`, all in ninths: `(lo, thick,
/// b)` means `a ∈ [lo/9, next lo/9)` maps to `r_m = 2^n + r(b/9 · 3^{n−2})`
/// when `thick` and `r_m = 2^n + r(b/9 · 3^{n−1})` otherwise.
const RULES: [(u128, bool, u128); 11] = [
    (36, true, 40),
    (40, true, 48),
    (42, true, 54),
    (48, true, 78),
    (54, false, 40),
    (58, false, 42),
    (66, false, 48),
    (72, false, 66),
    (78, false, 72),
    (84, false, 78),
    (90, false, 90),
];

/// Left endpoints, in ninths of `3^n`, of the intervals on which `r` is
/// constant within `[4·3^n, 4·3^{n+1})`.
pub fn plateau_starts() -> [u32; 11] {
    RULES.map(|(lo, _, _)| lo as u32)
}

/// Exact `r_m` for arbitrarily large `m` from a simulated base table and the
/// radial recursions.
#[derive(Debug, Clone)]
pub struct RadiusOracle {
    base: Arc<Vec<u32>>,
}

impl RadiusOracle {
    pub fn new() -> Result<Self, RadialError> {
        let base = radius_series(BASE_TABLE_LEN - 1)?;
        Ok(RadiusOracle {
            base: Arc::new(base),
        })
    }

    /// `r_m` by recursion.
    pub fn radius(&self, m: u128) -> u64 {
        let mut m = m;
        let mut acc = 0u64;
        while m >= BASE_TABLE_LEN as u128 {
            let (n, step) = self.step(m);
            acc += 1u64 << n;
            m = step;
        }
        acc + self.base[m as usize] as u64
    }

    /// The level `n` and the reduced mass of one recursion step.
    fn step(&self, m: u128) -> (u32, u128) {
        let mut n = 0u32;
        let mut p = 1u128;
        while 4 * p * 3 <= m {
            p *= 3;
            n += 1;
        }
        let ninths = 9 * m;
        let (_, thick, b) = RULES
            .iter()
            .rev()
            .find(|(lo, _, _)| ninths >= lo * p)
            .copied()
            .unwrap();
        // b/9 · 3^{n−2} = b · 3^{n−4} and b/9 · 3^{n−1} = b · 3^{n−3}.
        let target = if thick { b * p / 81 } else { b * p / 27 };
        (n, target)
    }

    /// `r(x) = r_⌊x⌋`.
    pub fn radius_at(&self, x: f64) -> u64 {
        self.radius(x.max(0.0).floor() as u128)
    }

    /// `R` at the integer part `m`: `r_m − 2 r_{⌊m/3⌋}`.
    pub fn remainder_int(&self, m: u128) -> i64 {
        self.radius(m) as i64 - 2 * self.radius(m / 3) as i64
    }

    /// `R(x) = r(x) − 2r(x/3)`, checked against `|R| ≤ 1`.
    pub fn remainder(&self, x: f64) -> Result<i8, RadialError> {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(RadialError::Usage(format!(
                "remainder needs a finite x ≥ 0, got {x}"
            )));
        }
        let value = self.remainder_int(x.floor() as u128);
        if value.abs() > 1 {
            return Err(RadialError::RemainderBound { x, value });
        }
        Ok(value as i8)
    }
}

/// `r_m` by the requested method.
pub fn radius(m: u64, via: Via) -> Result<u64, RadialError> {
    match via {
        Via::Recurse => Ok(RadiusOracle::new()?.radius(m as u128)),
        Via::Simulate => {
            let g = Arc::new(GasketGraph::build(level_for_mass(m), Sided::One)?);
            let mut sweep = NaiveSweep::new(g);
            sweep.advance_to(m)?;
            Ok(sweep.radius() as u64)
        }
    }
}

/// `⌊3^s x⌋` computed exactly from the binary expansion of `x > 0`.
fn floor_scaled(x: f64, s: i32) -> u128 {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    let mut num = mant as u128 * 3u128.pow(s.max(0) as u32);
    let mut den = 3u128.pow((-s).max(0) as u32);
    if e >= 0 {
        num <<= e;
    } else if -e < 100 {
        den <<= -e;
    } else {
        return 0;
    }
    num / den
}

/// Largest `k` with `3^k ≤ x`, possibly negative.
fn log3_floor(x: f64) -> i32 {
    let mut k = (x.ln() / 3f64.ln()).floor() as i32;
    while floor_scaled(x, -k) == 0 {
        k -= 1;
    }
    while floor_scaled(x, -(k + 1)) >= 1 {
        k += 1;
    }
    k
}

/// One evaluation of `𝒢(log x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GValue {
    pub x: f64,
    pub value: f64,
    pub trunc_bound: f64,
}

/// `𝒢(log x) = Σ_{j<J} (3^j x̃)^{−1/d_H} R(3^j x̃)` with `x̃ ∈ [1, 3)` and
/// `log x̃ ≡ log x (mod log 3)`. The omitted tail is at most `2^{1−J}`.
pub fn g_function(oracle: &RadiusOracle, x: f64, depth: u32) -> Result<GValue, RadialError> {
    if !(x > 0.0 && x.is_finite() && x < 1e30) {
        return Err(RadialError::Usage(format!(
            "g_function needs 0 < x < 1e30, got {x}"
        )));
    }
    if depth == 0 || depth > MAX_DEPTH {
        return Err(RadialError::Usage(format!(
            "depth must be in 1..={MAX_DEPTH}, got {depth}"
        )));
    }
    let k = log3_floor(x);
    let x_tilde = x / 3f64.powi(k);
    let base = x_tilde.powf(-1.0 / d_h());
    let mut value = 0.0;
    for j in 0..depth as i32 {
        let r = oracle.remainder_int(floor_scaled(x, j - k));
        if r.abs() > 1 {
            return Err(RadialError::RemainderBound {
                x: x_tilde * 3f64.powi(j),
                value: r,
            });
        }
        value += base * 0.5f64.powi(j) * r as f64;
    }
    Ok(GValue {
        x,
        value,
        trunc_bound: 2f64.powi(1 - depth as i32),
    })
}

/// `𝒢` sampled at `points` evenly spaced values of `x ∈ [lo, hi)`.
pub fn g_samples(
    oracle: &RadiusOracle,
    lo: f64,
    hi: f64,
    points: usize,
    depth: u32,
) -> Result<Vec<GValue>, RadialError> {
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) || points == 0 {
        return Err(RadialError::Usage(format!(
            "empty sampling range [{lo}, {hi}) with {points} points"
        )));
    }
    (0..points)
        .map(|i| g_function(oracle, lo + (hi - lo) * i as f64 / points as f64, depth))
        .collect()
}

pub fn g_csv(values: &[GValue]) -> String {
    let mut s = String::from("x,g_value,trunc_bound\n");
    for v in values {
        s.push_str(&format!("{},{},{}\n", v.x, v.value, v.trunc_bound));
    }
    s
}

/// `max |x^{−1/d_H} r(x) − 𝒢(log x)|` over `x = 3^k x̃` for `points` evenly
/// spaced `x̃ ∈ [1, 3)`.
pub fn scaling_gap(
    oracle: &RadiusOracle,
    k: u32,
    points: usize,
    depth: u32,
) -> Result<f64, RadialError> {
    let mut worst = 0f64;
    for i in 0..points {
        let x = 3f64.powi(k as i32) * (1.0 + 2.0 * i as f64 / points as f64);
        let g = g_function(oracle, x, depth)?;
        let scaled = x.powf(-1.0 / d_h()) * oracle.radius_at(x) as f64;
        worst = worst.max((scaled - g.value).abs());
    }
    Ok(worst)
}

/// One row of the jump table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadialRecord {
    /// Level of the fundamental diagram; 0 for the rows below `12`.
    pub n: u32,
    pub m: u64,
    /// `m/3^n` as a reduced fraction; absent below `12`.
    pub m_over_3n: Option<String>,
    pub m_prime: u64,
    /// Chips left inside `G_n`, counted on the simulated configuration.
    pub retained: u64,
    pub r_m: u64,
    pub delta_r: i64,
    pub predicted_m_prime: Option<u64>,
}

impl RadialRecord {
    /// Whether the measured `m′` contradicts the predicted one.
    pub fn mismatch(&self) -> bool {
        self.predicted_m_prime.is_some_and(|p| p != self.m_prime)
    }
}

fn fraction(m: u64, n: u32) -> String {
    let d = 3u64.pow(n);
    let g = gcd(m, d);
    if g == d {
        format!("{}", m / d)
    } else {
        format!("{}/{}", m / g, d / g)
    }
}

/// Predicted `m′` on `G_n` for the jump families at `(4+2p)·3^n` offset by
/// `0`, `2`, `(4/9)·3^n`, `(2/3)·3^n` and `(4/3)·3^n`, with
/// `b_n = (3/2)(3^{n−1}+1)`. Defined for `n ≥ 3`.
pub fn predicted_m_prime(n: u32, m: u64) -> Option<u64> {
    if n < 3 {
        return None;
    }
    let t = 3u64.pow(n);
    if m < 4 * t || m >= 12 * t {
        return None;
    }
    let p = (m - 4 * t) / (2 * t);
    let rem = m - (4 + 2 * p) * t;
    let b = 3 * (t / 3 + 1) / 2;
    let base = match rem {
        0 => b,
        2 => b + 1,
        r if 9 * r == 4 * t => 2 * t / 3 + 1,
        r if 3 * r == 2 * t => 2 * t / 3 + 2,
        r if 3 * r == 4 * t => t + 1,
        _ => return None,
    };
    Some(base + p * t)
}

/// Rows of block `n` with `m ∈ [4·3^n, m_end)` at which `m′` changes.
pub fn jump_block(n: u32, m_end: u64, radii: &[u32]) -> Result<Vec<RadialRecord>, RadialError> {
    let lo = 4 * 3u64.pow(n);
    if m_end as usize > radii.len() {
        return Err(RadialError::Usage(format!(
            "radius table ends at {}, block needs {m_end}",
            radii.len()
        )));
    }
    let g = Arc::new(GasketGraph::build(n.max(1), Sided::One)?);
    let mut sweep = BoundarySweep::new(g, n)?;
    sweep.advance_to(lo - 1)?;
    let mut prev = sweep.absorbed();
    let mut out = Vec::new();
    for m in lo..m_end {
        sweep.advance_to(m)?;
        let mp = sweep.absorbed();
        if m == lo || mp != prev {
            out.push(RadialRecord {
                n,
                m,
                m_over_3n: Some(fraction(m, n)),
                m_prime: mp,
                retained: sweep.retained(),
                r_m: radii[m as usize] as u64,
                delta_r: radii[m as usize] as i64 - radii[m as usize - 1] as i64,
                predicted_m_prime: predicted_m_prime(n, m),
            });
        }
        prev = mp;
    }
    Ok(out)
}

/// Jump table through level `n_max`, preceded by the radius jumps below `12`
/// and followed by the rows of level `n_max + 1` up to `6·3^{n_max+1}`.
pub fn jump_table(n_max: u32) -> Result<Vec<RadialRecord>, RadialError> {
    if n_max == 0 || n_max > 8 {
        return Err(RadialError::Usage(format!(
            "n_max must be in 1..=8, got {n_max}"
        )));
    }
    let last = 6 * 3u64.pow(n_max + 1);
    let radii = radius_series(last)?;
    let mut out = Vec::new();
    let g = Arc::new(GasketGraph::build(1, Sided::One)?);
    let mut sweep = BoundarySweep::new(g, 0)?;
    for m in 1..12u64 {
        sweep.advance_to(m)?;
        let delta = radii[m as usize] as i64 - radii[m as usize - 1] as i64;
        if delta != 0 {
            out.push(RadialRecord {
                n: 0,
                m,
                m_over_3n: None,
                m_prime: sweep.absorbed(),
                retained: sweep.retained(),
                r_m: radii[m as usize] as u64,
                delta_r: delta,
                predicted_m_prime: None,
            });
        }
    }
    for n in 1..=n_max {
        out.extend(jump_block(n, 4 * 3u64.pow(n + 1), &radii)?);
    }
    out.extend(jump_block(n_max + 1, last + 1, &radii)?);
    Ok(out)
}

/// CSV with one `# n=<n>` block per level.
pub fn table_csv(rows: &[RadialRecord]) -> String {
    let mut s = String::new();
    let mut current = None;
    for r in rows {
        if current != Some(r.n) {
            current = Some(r.n);
            s.push_str(&format!(
                "# n={}\nm_over_3n,m,m_prime,m_minus_2m_prime,delta_r\n",
                r.n
            ));
        }
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.m_over_3n.as_deref().unwrap_or(""),
            r.m,
            r.m_prime,
            r.retained,
            r.delta_r
        ));
    }
    s
}

/// Edge census of a vertex set: internal edges `in(X)` and edges `C(X)` from
/// `X` to its complement.
pub fn rossin_count(g: &GasketGraph, member: &[bool]) -> (u64, u64) {
    let mut inner = 0u64;
    let mut cut = 0u64;
    for v in 0..g.num_vertices() as u32 {
        if !member[v as usize] {
            continue;
        }
        for &w in g.neighbors(v) {
            if member[w as usize] {
                inner += 1;
            } else {
                cut += 1;
            }
        }
    }
    (inner / 2, cut)
}

/// Both inequalities on `r_m` and the Rossin count at `X = B_o(r_m − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthBounds {
    pub m: u64,
    pub r: u64,
    /// `(r^{d_H} + 1)/m`, at least `2/9`.
    pub lower_ratio: f64,
    /// `(r − 1)^{d_H}/m`, at most `(3/4)^{d_H}`.
    pub upper_ratio: f64,
    pub rossin_in: u64,
    pub rossin_cut: u64,
}

impl GrowthBounds {
    pub fn lower_holds(&self) -> bool {
        self.lower_ratio >= 2.0 / 9.0
    }

    pub fn upper_holds(&self) -> bool {
        self.upper_ratio <= 0.75f64.powf(d_h())
    }

    /// `m ≥ |in(B_o(r_m − 1))|`.
    pub fn rossin_holds(&self) -> bool {
        self.m >= self.rossin_in
    }

    pub fn rossin_min(&self) -> u64 {
        self.rossin_in + self.rossin_cut
    }
}

fn bounds_for(
    g: &GasketGraph,
    cache: &mut HashMap<u64, (u64, u64)>,
    m: u64,
    r: u64,
) -> GrowthBounds {
    let dh = d_h();
    let (rossin_in, rossin_cut) = *cache
        .entry(r)
        .or_insert_with(|| rossin_count(g, &g.ball_mask(r as i64 - 1)));
    GrowthBounds {
        m,
        r,
        lower_ratio: ((r as f64).powf(dh) + 1.0) / m as f64,
        upper_ratio: (r.saturating_sub(1) as f64).powf(dh) / m as f64,
        rossin_in,
        rossin_cut,
    }
}

pub fn growth_bounds(m: u64) -> Result<GrowthBounds, RadialError> {
    Ok(bounds_series(m)?.pop().unwrap())
}

/// Bounds for every `m ∈ [12, m_max]` from one naive sweep.
pub fn bounds_series(m_max: u64) -> Result<Vec<GrowthBounds>, RadialError> {
    if m_max < 12 {
        return Err(RadialError::Usage(format!(
            "bounds need m ≥ 12, got {m_max}"
        )));
    }
    let g = Arc::new(GasketGraph::build(level_for_mass(m_max), Sided::One)?);
    let mut sweep = NaiveSweep::new(g.clone());
    let mut cache = HashMap::new();
    let mut out = Vec::new();
    for m in 12..=m_max {
        sweep.advance_to(m)?;
        out.push(bounds_for(&g, &mut cache, m, sweep.radius() as u64));
    }
    Ok(out)
}
