use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sierpile::growth::AsmSolver;
use sierpile::sandpile::{
    batch_topple_boundary, identity_oracle, is_recurrent, oplus, random_recurrent, stabilize,
    stabilize_with, tile, tile_values, verify_toppling_identities, ToppleOrder,
};
use sierpile::{GasketGraph, SandpileConfig, Sided, SinkSpec, SinkedGraph, TileId, TileKind};

fn view(n: u32, spec: SinkSpec) -> Arc<SinkedGraph> {
    Arc::new(SinkedGraph::standalone(n, spec).unwrap())
}

fn at_origin(view: &Arc<SinkedGraph>, m: u64) -> SandpileConfig {
    let mut c = SandpileConfig::zero(view.clone());
    c.add(0, m);
    c
}

#[test]
fn identity_tiles_match_the_oracle() {
    for n in 1..=6 {
        let e = tile(TileId::new(TileKind::E, n)).unwrap();
        assert_eq!(e, identity_oracle(e.view().clone()).unwrap(), "e_{n}");
        let eo = tile(TileId::new(TileKind::EOrigin, n)).unwrap();
        assert_eq!(eo, identity_oracle(eo.view().clone()).unwrap(), "e_o_{n}");
    }
}

#[test]
fn identities_nest_away_from_the_cut_points() {
    let mut prev = identity_oracle(view(1, SinkSpec::CornersXY)).unwrap();
    for n in 2..=6 {
        let e = identity_oracle(view(n, SinkSpec::CornersXY)).unwrap();
        let g = e.view().graph().clone();
        let (x, y) = g.corners_at(n - 1).unwrap();
        for v in 0..g.prefix_len(n - 1) as u32 {
            if v != x && v != y {
                assert_eq!(
                    e.get(v),
                    prev.get(v),
                    "e_{n} at {:?}",
                    g.vertex(v).lattice()
                );
            }
        }
        prev = e;
    }
}

#[test]
fn identities_are_recurrent() {
    for n in 1..=6 {
        assert!(is_recurrent(&tile(TileId::new(TileKind::E, n)).unwrap()).unwrap());
        assert!(is_recurrent(&SandpileConfig::max_stable(view(n, SinkSpec::CornersXY))).unwrap());
        assert!(!is_recurrent(&SandpileConfig::zero(view(n, SinkSpec::CornersXY))).unwrap());
    }
}

#[test]
fn group_law_on_small_levels() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 1..=4 {
        let e = tile(TileId::new(TileKind::E, n)).unwrap();
        let draw = |rng: &mut ChaCha8Rng| random_recurrent(&e, rng).unwrap();
        for _ in 0..5 {
            let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let ab = oplus(&a, &b).unwrap().config;
            assert!(is_recurrent(&ab).unwrap());
            assert_eq!(ab, oplus(&b, &a).unwrap().config);
            let left = oplus(&ab, &c).unwrap().config;
            let right = oplus(&a, &oplus(&b, &c).unwrap().config).unwrap().config;
            assert_eq!(left, right);
            assert_eq!(oplus(&a, &e).unwrap().config, a);
        }
    }
}

/// Bareiss elimination on the reduced Laplacian over the non-sink vertices.
fn reduced_laplacian_det(v: &SinkedGraph) -> i128 {
    let free = v.non_sinks();
    let n = free.len();
    let mut a = vec![vec![0i128; n]; n];
    for (r, &p) in free.iter().enumerate() {
        a[r][r] = v.threshold(p) as i128;
        for w in v.neighbors(p) {
            if let Some(c) = free.iter().position(|&q| q == w) {
                a[r][c] -= 1;
            }
        }
    }
    let mut prev = 1i128;
    for k in 0..n - 1 {
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    a[n - 1][n - 1]
}

#[test]
fn identity_test_characterizes_recurrence() {
    for spec in [SinkSpec::CornersXY, SinkSpec::Origin, SinkSpec::CornerX] {
        let v = view(1, spec);
        let e = identity_oracle(v.clone()).unwrap();
        let free = v.non_sinks();
        let states: u64 = free.iter().map(|&w| v.threshold(w) as u64).product();
        // Every stable configuration on G_1 with this sink set.
        let mut recurrent = 0;
        for code in 0..states {
            let mut c = SandpileConfig::zero(v.clone());
            let mut k = code;
            for &w in &free {
                let t = v.threshold(w) as u64;
                c.set(w, k % t);
                k /= t;
            }
            let fixed = oplus(&c, &e).unwrap().config == c;
            assert_eq!(fixed, is_recurrent(&c).unwrap());
            recurrent += fixed as u32;
        }
        // Matrix-tree theorem: |R| = det Δ′.
        assert_eq!(recurrent as i128, reduced_laplacian_det(&v), "{spec:?}");
    }
}

#[test]
fn m_tiles_replay_from_the_origin() {
    for n in 1..=5 {
        let v = view(n, SinkSpec::CornersXY);
        let got = stabilize(&at_origin(&v, 4 * 3u64.pow(n) - 2)).unwrap();
        let m = tile(TileId::new(TileKind::M, n)).unwrap();
        assert_eq!(got.config, m, "M_{n}");
        assert!(is_recurrent(&m).unwrap());
    }
}

#[test]
fn zeta_tiles_appear_in_the_outer_cells() {
    // ((4⅔·3^n − 2)1_o)° carries ζ_{n−1} on the cell G_{n−1} + (0, 2^{n−1})
    // and its mirror image on G_{n−1} + (2^{n−1}, 0), away from the far corner.
    for n in 2..=6u32 {
        let m = 14 * 3u64.pow(n - 1) - 2;
        let solver = AsmSolver::for_mass(m).unwrap();
        let g = solver.graph().clone();
        let chips = solver.naive(m).unwrap().chips;
        let zeta = tile_values(&g, TileId::new(TileKind::Zeta, n - 1)).unwrap();
        let s = 1i32 << (n - 1);
        for v in 0..g.prefix_len(n - 1) as u32 {
            let (i, j) = g.vertex(v).lattice();
            if (i, j) == (0, s) {
                continue;
            }
            let up = g.index_ij(i, j + s).unwrap();
            let right = g.index_ij(j + s, i).unwrap();
            assert_eq!(
                chips[up as usize],
                zeta[v as usize],
                "n = {n}, cell vertex {:?}",
                (i, j)
            );
            assert_eq!(
                chips[right as usize],
                zeta[v as usize],
                "n = {n}, mirrored {:?}",
                (i, j)
            );
        }
    }
}

#[test]
fn toppling_identities_hold() {
    for n in 1..=3 {
        let report = verify_toppling_identities(n, 5, 7).unwrap();
        assert!(
            report.all_passed(),
            "level {n}: {:?}",
            report.checks.iter().find(|c| !c.passed)
        );
    }
}

#[test]
fn boundary_batches() {
    let e = tile(TileId::new(TileKind::E, 3)).unwrap();
    let same = batch_topple_boundary(&e, [10, 10], 0).unwrap();
    assert_eq!(
        (same.interior.clone(), same.boundary, same.emitted),
        (e.clone(), [10, 10], [0, 0])
    );

    let b = batch_topple_boundary(&e, [10, 10], 3).unwrap();
    assert!(b.batched);
    assert_eq!(b.interior, e);
    assert_eq!(b.boundary, [4, 4]);
    assert_eq!(b.emitted, [6, 6]);

    let zero = SandpileConfig::zero(e.view().clone());
    let r = batch_topple_boundary(&zero, [12, 12], 2).unwrap();
    assert!(!r.batched);
    let before = 24;
    let after = r.interior.total() + r.boundary.iter().sum::<u64>() + r.emitted.iter().sum::<u64>();
    assert_eq!(before, after);

    assert!(batch_topple_boundary(&e, [5, 10], 3).is_err());
}

#[test]
fn max_stable_doubling_is_recurrent() {
    for n in 1..=4 {
        let v = view(n, SinkSpec::Origin);
        let max = SandpileConfig::max_stable(v.clone());
        let r = oplus(&max, &max).unwrap();
        assert!(is_recurrent(&r.config).unwrap());
    }
}

#[test]
fn csv_round_trip_and_errors() {
    let e = tile(TileId::new(TileKind::E, 4)).unwrap();
    let back = SandpileConfig::from_csv(e.view().clone(), &e.to_csv()).unwrap();
    assert_eq!(back, e);
    assert!(SandpileConfig::from_csv(e.view().clone(), "i,j,chips\n1,x,2\n").is_err());
    assert!(SandpileConfig::from_csv(e.view().clone(), "i,j,chips\n99,99,1\n").is_err());
}

fn chips_on(n: u32) -> impl Strategy<Value = Vec<u64>> {
    let len = GasketGraph::build(n, Sided::One).unwrap().num_vertices();
    prop::collection::vec(0u64..12, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stabilization_is_abelian(chips in chips_on(3), seed in any::<u64>()) {
        let v = view(3, SinkSpec::CornersXY);
        let c = SandpileConfig::from_chips(v, chips).unwrap();
        let lifo = stabilize_with(&c, ToppleOrder::Lifo, None).unwrap();
        for order in [ToppleOrder::Fifo, ToppleOrder::Random(seed)] {
            let other = stabilize_with(&c, order, None).unwrap();
            prop_assert_eq!(&other.config, &lifo.config);
            prop_assert_eq!(&other.odometer, &lifo.odometer);
            prop_assert_eq!(&other.sink_absorbed, &lifo.sink_absorbed);
        }
    }

    #[test]
    fn stabilization_conserves_chips(chips in chips_on(3)) {
        let v = view(3, SinkSpec::Origin);
        let c = SandpileConfig::from_chips(v, chips).unwrap();
        let r = stabilize(&c).unwrap();
        prop_assert!(r.config.is_stable());
        prop_assert_eq!(c.total(), r.config.total() + r.absorbed_total());
    }

    #[test]
    fn csv_round_trips(chips in chips_on(2)) {
        let v = view(2, SinkSpec::CornerX);
        let c = SandpileConfig::from_chips(v.clone(), chips).unwrap();
        prop_assert_eq!(SandpileConfig::from_csv(v, &c.to_csv()).unwrap(), c);
    }
}
