//! Acceptance checks, one line per criterion. Runs as a plain binary so that
//! every criterion reports even when an earlier one fails.

use std::error::Error;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use num::{BigRational, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sierpile::growth::asm::{radius_from_odometer, radius_series};
use sierpile::growth::divisible::{host_for_mass, n_of_mass, solve_exact, Values};
use sierpile::growth::rotor::{rotor_router_on, simulate_walks};
use sierpile::growth::{
    contains_ball, friedrich_levine, idla_ensemble, within_ball, Arithmetic, AsmSolver,
    InitialRotors, NaiveSweep, RotorSystem,
};
use sierpile::radial::{d_h, g_samples, jump_table};
use sierpile::sandpile::{
    identity_oracle, is_recurrent, oplus, random_recurrent, tile, verify_toppling_identities,
};
use sierpile::{GasketGraph, Mechanism, RadiusOracle, Sided, TileId, TileKind};

type Outcome = Result<(Verdict, String), Box<dyn Error>>;
type Criterion<'a> = (&'a str, Box<dyn Fn() -> Outcome>);

/// `Deviation` marks a criterion whose stated claim is contradicted by a
/// reproducible counterexample while every other part of it holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Pass,
    Fail,
    Deviation,
}

impl From<bool> for Verdict {
    fn from(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// `(n, m, m′, m − 2m′, Δr)` as printed, with three rows corrected: the
/// printed `649`, `7766` and the `m′` of `2754` contradict their own
/// `m − 2m′` column.
const TABLE: [(u32, u64, u64, u64, i64); 112] = [
    (0, 2, 1, 0, 1),
    (0, 8, 4, 0, 1),
    (1, 12, 3, 6, 0),
    (1, 14, 4, 6, 1),
    (1, 18, 6, 6, 0),
    (1, 20, 7, 6, 0),
    (1, 24, 9, 6, 0),
    (1, 26, 10, 6, 1),
    (1, 30, 12, 6, 0),
    (1, 32, 13, 6, 0),
    (2, 36, 6, 24, 1),
    (2, 38, 7, 24, 0),
    (2, 42, 8, 26, 0),
    (2, 48, 10, 28, 1),
    (2, 54, 15, 24, 0),
    (2, 56, 16, 24, 1),
    (2, 60, 17, 26, 0),
    (2, 66, 19, 28, 0),
    (2, 72, 24, 24, 0),
    (2, 74, 25, 24, 0),
    (2, 78, 26, 26, 0),
    (2, 84, 28, 28, 1),
    (2, 90, 33, 24, 0),
    (2, 92, 34, 24, 0),
    (2, 96, 35, 26, 0),
    (2, 102, 37, 28, 0),
    (3, 108, 15, 78, 2),
    (3, 110, 16, 78, 1),
    (3, 120, 19, 82, 0),
    (3, 126, 20, 86, 0),
    (3, 144, 28, 88, 1),
    (3, 162, 42, 78, 1),
    (3, 164, 43, 78, 0),
    (3, 174, 46, 82, 0),
    (3, 180, 47, 86, 0),
    (3, 198, 55, 88, 1),
    (3, 216, 69, 78, 1),
    (3, 218, 70, 78, 0),
    (3, 228, 73, 82, 0),
    (3, 234, 74, 86, 0),
    (3, 252, 82, 88, 0),
    (3, 270, 96, 78, 1),
    (3, 272, 97, 78, 0),
    (3, 282, 100, 82, 0),
    (3, 288, 101, 86, 0),
    (3, 306, 109, 88, 0),
    (4, 324, 42, 240, 5),
    (4, 326, 43, 240, 0),
    (4, 360, 55, 250, 1),
    (4, 378, 56, 266, 0),
    (4, 432, 82, 268, 1),
    (4, 486, 123, 240, 4),
    (4, 488, 124, 240, 0),
    (4, 522, 136, 250, 0),
    (4, 540, 137, 266, 0),
    (4, 594, 163, 268, 1),
    (4, 648, 204, 240, 2),
    (4, 650, 205, 240, 0),
    (4, 684, 217, 250, 0),
    (4, 702, 218, 266, 1),
    (4, 756, 244, 268, 0),
    (4, 810, 285, 240, 1),
    (4, 812, 286, 240, 0),
    (4, 846, 298, 250, 0),
    (4, 864, 299, 266, 0),
    (4, 918, 325, 268, 0),
    (5, 972, 123, 726, 11),
    (5, 974, 124, 726, 0),
    (5, 1080, 163, 754, 1),
    (5, 1134, 164, 806, 1),
    (5, 1296, 244, 808, 2),
    (5, 1458, 366, 726, 7),
    (5, 1460, 367, 726, 0),
    (5, 1566, 406, 754, 0),
    (5, 1620, 407, 806, 0),
    (5, 1782, 487, 808, 1),
    (5, 1944, 609, 726, 5),
    (5, 1946, 610, 726, 0),
    (5, 2052, 649, 754, 0),
    (5, 2106, 650, 806, 2),
    (5, 2268, 730, 808, 1),
    (5, 2430, 852, 726, 1),
    (5, 2432, 853, 726, 0),
    (5, 2538, 892, 754, 0),
    (5, 2592, 893, 806, 0),
    (5, 2754, 973, 808, 0),
    (6, 2916, 366, 2184, 22),
    (6, 2918, 367, 2184, 0),
    (6, 3240, 487, 2266, 1),
    (6, 3402, 488, 2426, 4),
    (6, 3888, 730, 2428, 4),
    (6, 4374, 1095, 2184, 13),
    (6, 4376, 1096, 2184, 0),
    (6, 4698, 1216, 2266, 1),
    (6, 4860, 1217, 2426, 0),
    (6, 5346, 1459, 2428, 2),
    (6, 5832, 1824, 2184, 8),
    (6, 5834, 1825, 2184, 0),
    (6, 6156, 1945, 2266, 0),
    (6, 6318, 1946, 2426, 5),
    (6, 6804, 2188, 2428, 2),
    (6, 7290, 2553, 2184, 2),
    (6, 7292, 2554, 2184, 0),
    (6, 7614, 2674, 2266, 0),
    (6, 7776, 2675, 2426, 0),
    (6, 8262, 2917, 2428, 0),
    (7, 8748, 1095, 6558, 44),
    (7, 8750, 1096, 6558, 0),
    (7, 9720, 1459, 6802, 3),
    (7, 10206, 1460, 7286, 7),
    (7, 11664, 2188, 7288, 8),
    (7, 13122, 3282, 6558, 25),
];

fn table_reproduction() -> Outcome {
    let rows = jump_table(6)?;
    let got: Vec<(u32, u64, u64, u64, i64)> = rows
        .iter()
        .map(|r| (r.n, r.m, r.m_prime, r.retained, r.delta_r))
        .collect();
    let bad: Vec<_> = TABLE.iter().filter(|row| !got.contains(row)).collect();
    let extra = got.iter().filter(|row| !TABLE.contains(row)).count();
    Ok((
        (bad.is_empty() && extra == 0).into(),
        format!(
            "{} rows expected, {} produced, {} missing, {} extra",
            TABLE.len(),
            got.len(),
            bad.len(),
            extra
        ),
    ))
}

fn identity_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = Vec::new();
    let mut checks = 0;
    for n in 1..=6u32 {
        let e = tile(TileId::new(TileKind::E, n))?;
        let eo = tile(TileId::new(TileKind::EOrigin, n))?;
        let twice = oplus(&e, &e)?;
        let per_sink = 3 * (3u64.pow(n) - 1) / 2;
        let mut ok = twice.config == e && twice.sink_absorbed.iter().all(|&(_, c)| c == per_sink);
        ok &= oplus(&eo, &eo)?.config == eo;
        ok &= identity_oracle(e.view().clone())? == e;
        ok &= identity_oracle(eo.view().clone())? == eo;
        checks += 4;
        for _ in 0..20 {
            let eta = random_recurrent(&e, &mut rng)?;
            ok &= is_recurrent(&eta)? && oplus(&e, &eta)?.config == eta;
            checks += 1;
        }
        if !ok {
            failures.push(n);
        }
    }
    Ok((
        (failures.is_empty()).into(),
        format!("{checks} checks over n = 1..6, failing levels {failures:?}"),
    ))
}

fn toppling_identities() -> Outcome {
    let mut checks = 0;
    let mut failed = 0;
    for n in 1..=5 {
        let report = verify_toppling_identities(n, 10, 3)?;
        checks += report.checks.len();
        failed += report.checks.iter().filter(|c| !c.passed).count();
    }
    Ok((
        (failed == 0).into(),
        format!("{checks} checks over n = 1..5, {failed} failed"),
    ))
}

fn explosion_and_plateau(radii: &[u32]) -> Outcome {
    let mut bad = Vec::new();
    for n in 3..=6u32 {
        let m = 4 * 3usize.pow(n);
        if radii[m - 1] != 1 << n || radii[m] < radii[m - 1] + 2 {
            bad.push(m);
        }
    }
    let mut plateau = 0;
    for n in 2..=5u32 {
        let range = 10 * 3usize.pow(n - 1)..4 * 3usize.pow(n);
        plateau += range.len();
        bad.extend(range.filter(|&m| radii[m] != 1 << n));
    }
    Ok((
        (bad.is_empty()).into(),
        format!("4 explosions and {plateau} plateau masses, failures at {bad:?}"),
    ))
}

fn engine_equivalence() -> Outcome {
    let mut bad = Vec::new();
    let mut solver = AsmSolver::for_mass(1000)?;
    let g = solver.graph().clone();
    let mut literal = NaiveSweep::literal(g.clone());
    for m in 0..=1000 {
        literal.advance_to(m)?;
        let naive = literal.state();
        let hier = solver.hierarchical(m)?;
        if naive != hier || literal.radius() != radius_from_odometer(&g, &hier.odometer, m) {
            bad.push(m);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut masses: Vec<u64> = (0..50).map(|_| rng.gen_range(1..=100_000)).collect();
    masses.sort_unstable();
    let mut solver = AsmSolver::for_mass(100_000)?;
    let g = solver.graph().clone();
    let mut sweep = NaiveSweep::new(g.clone());
    for &m in &masses {
        sweep.advance_to(m)?;
        let naive = sweep.state();
        let hier = solver.hierarchical(m)?;
        if naive != hier || sweep.radius() != radius_from_odometer(&g, &hier.odometer, m) {
            bad.push(m);
        }
    }
    Ok((
        (bad.is_empty()).into(),
        format!("m <= 1000 and 50 random m <= 10^5, mismatches at {bad:?}"),
    ))
}

fn recursion_oracle(radii: &[u32]) -> Outcome {
    let oracle = RadiusOracle::new()?;
    let mismatches = (0..=8262u64)
        .filter(|&m| oracle.radius(m as u128) != radii[m as usize] as u64)
        .count();
    let inv = 1.0 / d_h();
    let (mut lo, mut hi) = (f64::INFINITY, 0f64);
    for m in 12..=1_000_000u64 {
        let ratio = oracle.radius(m as u128) as f64 / (m as f64).powf(inv);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    let ok = mismatches == 0 && lo >= 0.3871 && hi <= 0.7501;
    Ok((
        (ok).into(),
        format!(
            "{mismatches} mismatches for m <= 8262; ratio over [12, 10^6] in [{lo:.5}, {hi:.5}]"
        ),
    ))
}

fn g_evaluation() -> Outcome {
    let oracle = RadiusOracle::new()?;
    let values = g_samples(&oracle, 10.0 / 9.0, 4.0 / 3.0, 200, 40)?;
    let inv = 1.0 / d_h();
    let err = values
        .iter()
        .map(|v| (v.value - 0.5 * v.x.powf(-inv)).abs())
        .fold(0f64, f64::max);
    let lo = values.iter().map(|v| v.value).fold(f64::INFINITY, f64::min);
    let hi = values.iter().map(|v| v.value).fold(0f64, f64::max);
    let ok = values.len() == 200
        && err <= 1e-6
        && lo >= 0.4170 - 5e-4
        && hi <= 0.4679 + 5e-4
        && (lo - 0.4170).abs() <= 5e-4
        && (hi - 0.4679).abs() <= 5e-4;
    Ok((
        (ok).into(),
        format!("max error {err:.2e}, values in [{lo:.6}, {hi:.6}]"),
    ))
}

/// `b̄(n) = |B_n| − ½|∂_I B_n|` for `n ≤ 7`.
fn bbar(n: u32) -> Result<u64, Box<dyn Error>> {
    let g = GasketGraph::build(4, Sided::One)?;
    g.ball(n)?
        .bbar()
        .ok_or_else(|| format!("b̄({n}) is not an integer").into())
}

/// `B(a) ⊆ set ⊆ B(b)`.
fn sandwich(g: &GasketGraph, set: &[u32], a: i64, b: i64) -> bool {
    contains_ball(g, set, a) && within_ball(g, set, b)
}

/// Failure tallies for one rotor-router trial family, as `(n, m)` pairs.
#[derive(Default)]
struct RotorTally {
    trials: usize,
    inner: Vec<(i64, u64)>,
    occupied_outer: Vec<(i64, u64)>,
    fired_outer: Vec<(i64, u64)>,
}

impl RotorTally {
    /// Checks `B(n-2) ⊆ R ⊆ B(n-1+slack)` and `B(n-1) ⊆ σ ⊆ B(n+slack)`.
    fn record(
        &mut self,
        g: &GasketGraph,
        rotors: &RotorSystem,
        n: i64,
        m: u64,
        slack: i64,
    ) -> Result<(), Box<dyn Error>> {
        let o = rotor_router_on(rotors, m)?;
        self.trials += 1;
        if !rotors.is_simple()
            || !contains_ball(g, &o.cluster, n - 1)
            || !contains_ball(g, &o.fired, n - 2)
        {
            self.inner.push((n, m));
        }
        if !within_ball(g, &o.cluster, n + slack) {
            self.occupied_outer.push((n, m));
        }
        if !within_ball(g, &o.fired, n - 1 + slack) {
            self.fired_outer.push((n, m));
        }
        Ok(())
    }

    fn summary(&self, name: &str) -> String {
        let count = |v: &[(i64, u64)]| {
            let mut c: Vec<((i64, u64), usize)> = Vec::new();
            for &k in v {
                match c.iter_mut().find(|e| e.0 == k) {
                    Some(e) => e.1 += 1,
                    None => c.push((k, 1)),
                }
            }
            c.iter()
                .map(|((n, m), k)| format!("{k}x(n={n},m={m})"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "{name}: {} trials, inner [{}], occupied outer [{}], fired outer [{}]",
            self.trials,
            count(&self.inner),
            count(&self.occupied_outer),
            count(&self.fired_outer)
        )
    }
}

/// A seeded mechanism at `m = b̄(2) = 5` whose fired set leaves `B_1`:
/// both neighbours of `o` route their chip to the shared vertex `(1,1)`.
fn fired_set_counterexample() -> Result<Option<u64>, Box<dyn Error>> {
    let g = host_for_mass(5)?;
    for seed in 0..1000u64 {
        let rotors = RotorSystem::new(
            g.clone(),
            Mechanism::Random(seed),
            InitialRotors::Random(seed),
        );
        let o = rotor_router_on(&rotors, 5)?;
        let corner = o.fired.iter().any(|&x| g.vertex(x).lattice() == (1, 1));
        if rotors.is_simple() && corner && !within_ball(&g, &o.fired, 1) {
            return Ok(Some(seed));
        }
    }
    Ok(None)
}

fn rotor_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut oriented = RotorTally::default();
    let mut random = RotorTally::default();
    let mut any_mass = RotorTally::default();
    for n in 2..=7u32 {
        let m = bbar(n)?;
        let g = host_for_mass(m)?;
        for mech in [Mechanism::Clockwise, Mechanism::CounterClockwise] {
            oriented.record(
                &g,
                &RotorSystem::new(g.clone(), mech, InitialRotors::Zero),
                n as i64,
                m,
                0,
            )?;
        }
        for _ in 0..100 {
            let mech = Mechanism::Random(rng.gen());
            let rotors = RotorSystem::new(g.clone(), mech, InitialRotors::Random(rng.gen()));
            random.record(&g, &rotors, n as i64, m, 0)?;
        }
    }
    let big = bbar(7)?;
    for _ in 0..200 {
        let m = rng.gen_range(1..=big);
        let g = host_for_mass(m)?;
        let rotors = RotorSystem::new(
            g.clone(),
            Mechanism::Random(rng.gen()),
            InitialRotors::Random(rng.gen()),
        );
        any_mass.record(&g, &rotors, n_of_mass(&g, m)? as i64, m, 1)?;
    }
    let counterexample = fired_set_counterexample()?;
    let tallies = [&oriented, &random, &any_mass];
    let inner_hold =
        tallies.iter().all(|t| t.inner.is_empty()) && any_mass.occupied_outer.is_empty();
    let outer_hold = tallies
        .iter()
        .all(|t| t.fired_outer.is_empty() && t.occupied_outer.is_empty());
    let verdict = match (inner_hold, outer_hold, counterexample) {
        (true, true, _) => Verdict::Pass,
        (true, false, Some(_)) => Verdict::Deviation,
        _ => Verdict::Fail,
    };
    Ok((
        verdict,
        format!(
            "{}; {}; {}; m = 5 counterexample seed {counterexample:?}",
            oriented.summary("cw/ccw at b̄(n)"),
            random.summary("random at b̄(n)"),
            any_mass.summary("random m"),
        ),
    ))
}

fn exact_odometer(g: &GasketGraph, m: u64) -> Result<Vec<BigRational>, Box<dyn Error>> {
    match solve_exact(g, m)?.odometer {
        Values::Exact(u) => Ok(u),
        Values::Float(_) => Err("exact solver returned floats".into()),
    }
}

fn floor_u64(u: &[BigRational]) -> Vec<u64> {
    u.iter()
        .map(|x| x.floor().to_integer().to_u64().unwrap_or(0))
        .collect()
}

fn friedrich_levine_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut bad = Vec::new();
    for k in 0..50u32 {
        let n = 2 + k % 6;
        let top = bbar(n)?;
        let m = if k % 2 == 0 {
            top
        } else {
            rng.gen_range(1..=top)
        };
        let g = host_for_mass(m)?;
        let rotors = RotorSystem::new(
            g.clone(),
            Mechanism::Random(rng.gen()),
            InitialRotors::Random(rng.gen()),
        );
        let mut sigma0 = vec![0u64; g.num_vertices()];
        sigma0[0] = m;
        let approx = floor_u64(&exact_odometer(&g, m)?);
        let fl = friedrich_levine(&sigma0, &approx, &rotors)?;
        let (sigma, u) = simulate_walks(&rotors, m)?;
        let sigma: Vec<i64> = sigma.iter().map(|&s| s as i64).collect();
        if fl.odometer != u || fl.config != sigma {
            bad.push(m);
        }
    }

    let mut range_checks = 0;
    for n in 2..=7u32 {
        let m = bbar(n)?;
        let g = host_for_mass(m)?;
        let u = floor_u64(&exact_odometer(&g, m)?);
        let inner = g.ball(n)?.inner_boundary;
        let mut mechs = vec![
            (Mechanism::Clockwise, InitialRotors::Zero),
            (Mechanism::CounterClockwise, InitialRotors::Zero),
        ];
        for _ in 0..20 {
            mechs.push((
                Mechanism::Random(rng.gen()),
                InitialRotors::Random(rng.gen()),
            ));
        }
        for (mech, init) in mechs {
            let lap = RotorSystem::new(g.clone(), mech, init).stack_laplacian(&u);
            for x in 0..g.num_vertices() as u32 {
                let d = g.dist(x);
                if d < n {
                    continue;
                }
                range_checks += 1;
                let v = lap[x as usize];
                let allowed = if d > n {
                    v == 0
                } else if inner.contains(&x) {
                    v == 0 || v == 1
                } else {
                    (0..=2).contains(&v)
                };
                if !allowed {
                    bad.push(m);
                }
            }
        }
    }
    Ok((
        (bad.is_empty()).into(),
        format!("50 instances and {range_checks} range checks, failures at m = {bad:?}"),
    ))
}

fn divisible_sandpile() -> Outcome {
    let mut bad = Vec::new();
    let two = BigRational::from_integer(2.into());
    for n in 2..=7u32 {
        let m = bbar(n)?;
        let g = host_for_mass(m)?;
        let u = exact_odometer(&g, m)?;
        let mut support: Vec<u32> = (0..u.len() as u32)
            .filter(|&x| u[x as usize] > BigRational::default())
            .collect();
        support.sort_unstable();
        let ball = g.ball(n - 1)?;
        let mut members = ball.members.clone();
        members.sort_unstable();
        if support != members || !ball.inner_boundary.iter().all(|&y| u[y as usize] == two) {
            bad.push(m);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let big = bbar(7)?;
    for _ in 0..100 {
        let m = rng.gen_range(1..=big);
        let o = sierpile::growth::divisible_sandpile(m, Arithmetic::Exact)?;
        let k = n_of_mass(&o.graph, m)? as i64;
        if !sandwich(&o.graph, &o.cluster, k - 1, k) {
            bad.push(m);
        }
    }
    Ok((
        (bad.is_empty()).into(),
        format!("levels 2..7 and 100 random m <= {big}, failures at {bad:?}"),
    ))
}

fn idla_shape() -> Outcome {
    let ens = idla_ensemble(64, 200, 11)?;
    let inside = ens
        .runs
        .iter()
        .filter(|r| r.in_radius >= 48 && r.out_radius <= 80)
        .count();
    let min_cov = ens.min_covariance();
    let again = idla_ensemble(64, 200, 11)?;
    let ok = ens.runs.len() == 200 && inside == 200 && min_cov >= -0.05 && again == ens;
    Ok((
        ok.into(),
        format!("{inside}/200 clusters within B(48)..B(80), min covariance {min_cov:.4}, rerun identical: {}", again == ens),
    ))
}

fn remainder_law(radii: &[u32]) -> Outcome {
    let bad: Vec<usize> = (0..=10_000usize)
        .filter(|&m| (radii[3 * m] as i64 - 2 * radii[m] as i64).abs() > 1)
        .collect();
    Ok((
        (bad.is_empty()).into(),
        format!("m <= 10^4 by simulation, failures at {bad:?}"),
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let radii = match radius_series(30_000) {
        Ok(r) => Arc::new(r),
        Err(e) => {
            println!("radius series failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    println!(
        "simulated r_m for m <= 30000 in {:.1}s",
        start.elapsed().as_secs_f64()
    );
    let criteria: Vec<Criterion> = vec![
        ("table reproduction", Box::new(table_reproduction)),
        ("identity suite", Box::new(identity_suite)),
        ("toppling identities", Box::new(toppling_identities)),
        (
            "explosion and plateau",
            Box::new({
                let r = radii.clone();
                move || explosion_and_plateau(&r)
            }),
        ),
        ("engine equivalence", Box::new(engine_equivalence)),
        (
            "recursion oracle",
            Box::new({
                let r = radii.clone();
                move || recursion_oracle(&r)
            }),
        ),
        ("g function", Box::new(g_evaluation)),
        ("rotor-router bounds", Box::new(rotor_bounds)),
        ("friedrich-levine", Box::new(friedrich_levine_equivalence)),
        ("divisible sandpile", Box::new(divisible_sandpile)),
        ("idla shape", Box::new(idla_shape)),
        (
            "remainder law",
            Box::new({
                let r = radii.clone();
                move || remainder_law(&r)
            }),
        ),
    ];
    // Optional criterion numbers on the command line restrict the run.
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut all = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let t = Instant::now();
        let (verdict, detail) = check().unwrap_or_else(|e| (Verdict::Fail, format!("error: {e}")));
        all &= verdict != Verdict::Fail;
        let status = match verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Deviation => "DEVIATION",
        };
        println!(
            "criterion {:2} {status} {name}: {detail} ({:.1}s)",
            i + 1,
            t.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
