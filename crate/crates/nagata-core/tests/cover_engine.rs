use std::collections::BTreeSet;

use nagata_core::cover_engine::coloring::{adjacency, first_fit, is_proper, k_color};
use nagata_core::cover_engine::components::{brute_diameter, UnionFind};
use nagata_core::cover_engine::constructions::kernel_control;
use nagata_core::cover_engine::{
    brick_cover, carve, certify, empirical_control_curve, exact_diameter, exact_sequence_cover, graph_components,
    heisenberg_brick_cover, max_hop, neighborhood_enlarge, s_scale_components, verify_control,
    verify_control_bruteforce, Cover, CoverError, CoverFile, HeisenbergOverPlane, InducedGraph, LinearControl,
    PlaneOverLine, TrivialKernel, WordSpace,
};
use nagata_core::group_models::{bfs_ball, Heisenberg, WordBall, Zn};
use nagata_core::metric_lab::{GroupMetric, L1Metric, MetricView, TableMetric};
use proptest::prelude::*;

fn sets<E: Ord + Clone>(fam: &[Vec<E>]) -> BTreeSet<BTreeSet<E>> {
    fam.iter().map(|s| s.iter().cloned().collect()).collect()
}

fn union<E: Ord + Clone>(fam: &[Vec<E>]) -> BTreeSet<E> {
    fam.iter().flatten().cloned().collect()
}

fn interval_cover(ball: &WordBall<[i64; 1]>, s: i64, extra_empty: bool) -> Cover<[i64; 1]> {
    let mut fams: Vec<Vec<Vec<[i64; 1]>>> = vec![Vec::new(), Vec::new()];
    let mut blocks: std::collections::BTreeMap<i64, Vec<[i64; 1]>> = Default::default();
    for (x, _) in ball.iter() {
        blocks.entry(x[0].div_euclid(s)).or_default().push(*x);
    }
    for (b, pts) in blocks {
        fams[b.rem_euclid(2) as usize].push(pts);
    }
    if extra_empty {
        fams.push(Vec::new());
    }
    Cover {
        families: fams,
        scale: s as f64,
        claimed_bound: s as f64,
        construction: "intervals".into(),
        params: Default::default(),
    }
}

#[test]
fn components_of_a_small_integer_set() {
    let v = MetricView::new("pts", 3, |i, j| ([0.0f64, 1.0, 5.0][i] - [0.0f64, 1.0, 5.0][j]).abs());
    assert_eq!(s_scale_components(&v, 2.0), vec![vec![0, 1], vec![2]]);
    // at or below the least positive distance everything is a singleton
    assert_eq!(s_scale_components(&v, 1.0).len(), 3);
    assert_eq!(s_scale_components(&v, 0.5).len(), 3);
}

#[test]
fn hop_is_strictly_below_scale() {
    assert_eq!(max_hop(1.0), 0);
    assert_eq!(max_hop(2.0), 1);
    assert_eq!(max_hop(2.5), 2);
    assert_eq!(max_hop(0.0), 0);
}

#[test]
fn union_find_classes() {
    let mut uf = UnionFind::new(5);
    uf.union(3, 1);
    uf.union(4, 3);
    assert_eq!(uf.classes(), vec![vec![0], vec![1, 3, 4], vec![2]]);
}

fn brute_components<E: Clone, M: GroupMetric<E>>(pts: &[E], metric: &M, s: f64) -> BTreeSet<BTreeSet<usize>> {
    let mut uf = UnionFind::new(pts.len());
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if (metric.dist(&pts[i], &pts[j]) as f64) < s {
                uf.union(i as u32, j as u32);
            }
        }
    }
    uf.classes().into_iter().map(|c| c.into_iter().collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn heisenberg_components_match_transitive_closure(
        pick in prop::sample::subsequence((0usize..bfs_ball(&Heisenberg, 5).unwrap().len()).collect::<Vec<_>>(), 100),
        s in 1.0f64..6.0,
    ) {
        let ball = bfs_ball(&Heisenberg, 5).unwrap();
        let metric = TableMetric::new(&Heisenberg, 10).unwrap();
        let pts: Vec<[i64; 3]> = pick.iter().map(|&i| ball.elements()[i]).collect();
        let fast: BTreeSet<BTreeSet<usize>> = graph_components(&WordSpace::new(&Heisenberg), &pts, s)
            .into_iter()
            .map(|c| c.into_iter().collect())
            .collect();
        prop_assert_eq!(fast, brute_components(&pts, &metric, s));
    }

    #[test]
    fn exact_diameter_matches_pairs(pick in prop::sample::subsequence((0usize..200).collect::<Vec<_>>(), 1..60)) {
        let ball = bfs_ball(&Heisenberg, 4).unwrap();
        let metric = TableMetric::new(&Heisenberg, 8).unwrap();
        let pts: Vec<[i64; 3]> = pick.iter().map(|&i| ball.elements()[i % ball.len()]).collect();
        prop_assert_eq!(exact_diameter(&pts, &metric), brute_diameter(&pts, &metric));
    }

    // random covers of a small ℤ² ball: both verifiers agree, and the
    // verified bound never drops when the scale grows
    #[test]
    fn verification_matches_bruteforce_and_is_monotone(
        labels in prop::collection::vec((0usize..3, 0usize..6), 221),
        s in 1.0f64..7.0,
    ) {
        let ball = bfs_ball(&Zn::<2>, 10).unwrap();
        let mut fams = vec![vec![Vec::new(); 6]; 3];
        for (x, &(f, k)) in ball.elements().iter().zip(&labels) {
            fams[f][k].push(*x);
        }
        let mut cover = Cover { families: fams, scale: s, claimed_bound: 3.0 * s, construction: "random".into(), params: Default::default() };
        let a = verify_control(&Zn::<2>, &cover, ball.elements(), |g| ball.is_boundary(g), &L1Metric).unwrap();
        let b = verify_control_bruteforce(&Zn::<2>, &cover, ball.elements(), |g| ball.is_boundary(g), &L1Metric).unwrap();
        prop_assert_eq!(&a, &b);
        cover.scale = s + 2.0;
        let c = verify_control(&Zn::<2>, &cover, ball.elements(), |g| ball.is_boundary(g), &L1Metric).unwrap();
        prop_assert!(c.verified_bound >= a.verified_bound);
    }

    #[test]
    fn first_fit_is_proper(edges in prop::collection::vec((0u32..30, 0u32..30), 0..120)) {
        let adj = adjacency(30, &edges);
        prop_assert!(is_proper(&adj, &first_fit(&adj)));
        if let Some(c) = k_color(&adj, 4, 100_000) {
            prop_assert!(is_proper(&adj, &c));
            prop_assert!(c.iter().all(|&x| x < 4));
        }
    }

    #[test]
    fn enlarging_twice_adds_radii(c in 0.0f64..5.0, k in 0.0f64..5.0, r1 in 0.0f64..4.0, r2 in 0.0f64..4.0, s in 1.0f64..20.0) {
        let d = move |s: f64| c * s + k;
        let twice = neighborhood_enlarge(neighborhood_enlarge(d, r1), r2);
        let once = neighborhood_enlarge(d, r1 + r2);
        prop_assert!((twice(s) - once(s)).abs() < 1e-9);
        let lin = LinearControl { c, k }.enlarge(r1);
        prop_assert!((lin.eval(s) - neighborhood_enlarge(d, r1)(s)).abs() < 1e-9);
    }
}

#[test]
fn verifiers_agree_on_constructed_covers() {
    let z2 = bfs_ball(&Zn::<2>, 24).unwrap();
    for s in [2.0, 3.0, 5.0] {
        let c = brick_cover(&z2, s);
        let a = verify_control(&Zn::<2>, &c, z2.elements(), |g| z2.is_boundary(g), &L1Metric).unwrap();
        let b = verify_control_bruteforce(&Zn::<2>, &c, z2.elements(), |g| z2.is_boundary(g), &L1Metric).unwrap();
        assert_eq!(a, b, "s={s}");
    }
    let heis = bfs_ball(&Heisenberg, 7).unwrap();
    assert!(heis.len() <= 2000, "{}", heis.len());
    let metric = TableMetric::new(&Heisenberg, 14).unwrap();
    for s in [2.0, 3.0] {
        let c = heisenberg_brick_cover(&heis, s).unwrap();
        let a = verify_control(&Heisenberg, &c, heis.elements(), |g| heis.is_boundary(g), &metric).unwrap();
        let b = verify_control_bruteforce(&Heisenberg, &c, heis.elements(), |g| heis.is_boundary(g), &metric).unwrap();
        assert_eq!(a, b, "s={s}");
    }
}

#[test]
fn one_family_on_a_line_has_one_big_component() {
    let ball = bfs_ball(&Zn::<1>, 50).unwrap();
    let cover = Cover {
        families: vec![vec![ball.elements().to_vec()]],
        scale: 2.0,
        claimed_bound: 10.0,
        construction: "all".into(),
        params: Default::default(),
    };
    let e = verify_control(&Zn::<1>, &cover, ball.elements(), |g| ball.is_boundary(g), &L1Metric).unwrap();
    assert_eq!(e.components, 1);
    assert_eq!(e.verified_bound, 100.0);
    assert!(e.verified_bound > e.claimed_bound);
    assert_eq!(e.boundary_over_claim, 1);
    // at s = 1 no hop is short enough, so every point stands alone
    let mut unit = cover.clone();
    unit.scale = 1.0;
    let e1 = verify_control(&Zn::<1>, &unit, ball.elements(), |g| ball.is_boundary(g), &L1Metric).unwrap();
    assert_eq!((e1.components, e1.verified_bound), (101, 0.0));
}

#[test]
fn alternating_intervals_are_separate() {
    let ball = bfs_ball(&Zn::<1>, 50).unwrap();
    for s in [2, 3, 5] {
        let cover = interval_cover(&ball, s, false);
        let e = verify_control(&Zn::<1>, &cover, ball.elements(), |g| ball.is_boundary(g), &L1Metric).unwrap();
        assert!(e.pass);
        assert!(e.verified_bound <= s as f64);
        assert_eq!(e.components, cover.families.iter().map(Vec::len).sum::<usize>());
    }
}

#[test]
fn empty_family_changes_nothing() {
    let ball = bfs_ball(&Zn::<1>, 50).unwrap();
    let a = verify_control(&Zn::<1>, &interval_cover(&ball, 3, false), ball.elements(), |g| ball.is_boundary(g), &L1Metric)
        .unwrap();
    let b = verify_control(&Zn::<1>, &interval_cover(&ball, 3, true), ball.elements(), |g| ball.is_boundary(g), &L1Metric)
        .unwrap();
    assert_eq!((a.verified_bound, a.components, a.pass), (b.verified_bound, b.components, b.pass));
    assert_eq!(b.families, 3);
}

#[test]
fn missing_point_is_refused_with_witness() {
    let ball = bfs_ball(&Zn::<1>, 5).unwrap();
    let mut cover = interval_cover(&ball, 2, false);
    cover.families[0].retain(|s| !s.contains(&[0]));
    match verify_control(&Zn::<1>, &cover, ball.elements(), |g| ball.is_boundary(g), &L1Metric) {
        Err(CoverError::NotCovering(w)) => assert!(w == vec![0] || w == vec![1]),
        other => panic!("{other:?}"),
    }
    let mut outside = interval_cover(&ball, 2, false);
    outside.families[0][0].push([99]);
    assert!(matches!(
        verify_control(&Zn::<1>, &outside, ball.elements(), |g| ball.is_boundary(g), &L1Metric),
        Err(CoverError::OutsideCarrier(_))
    ));
}

#[test]
fn brick_on_the_line() {
    let ball = bfs_ball(&Zn::<1>, 50).unwrap();
    let c = brick_cover(&ball, 2.0);
    assert_eq!(c.families.len(), 2);
    assert_eq!(c.params["L"], 6.0);
    assert_eq!(c.claimed_bound, 6.0);
    let e = verify_control(&Zn::<1>, &c, ball.elements(), |g| ball.is_boundary(g), &L1Metric).unwrap();
    assert!(e.pass, "{e:?}");
}

#[test]
fn brick_on_the_plane() {
    let ball = bfs_ball(&Zn::<2>, 40).unwrap();
    for s in [2.0, 4.0, 8.0] {
        let c = brick_cover(&ball, s);
        assert_eq!(c.families.len(), 3);
        let e = verify_control(&Zn::<2>, &c, ball.elements(), |g| ball.is_boundary(g), &L1Metric).unwrap();
        assert!(e.pass, "s={s} {e:?}");
    }
}

#[test]
fn brick_on_a_point() {
    let ball = bfs_ball(&Zn::<0>, 3).unwrap();
    assert_eq!(ball.len(), 1);
    let c = brick_cover(&ball, 2.0);
    assert_eq!(c.families.len(), 1);
    assert_eq!(c.claimed_bound, 0.0);
    let e = verify_control(&Zn::<0>, &c, ball.elements(), |g| ball.is_boundary(g), &L1Metric).unwrap();
    assert_eq!(e.verified_bound, 0.0);
}

#[test]
fn brick_boxes_in_one_family_are_separated() {
    let ball = bfs_ball(&Zn::<2>, 20).unwrap();
    for s in [2.0, 3.0, 5.0] {
        let c = brick_cover(&ball, s);
        for fam in &c.families {
            for (i, a) in fam.iter().enumerate() {
                for b in &fam[i + 1..] {
                    for x in a {
                        for y in b {
                            assert!(L1Metric.dist(x, y) as f64 >= s, "s={s} {x:?} {y:?}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn every_point_is_in_n_plus_one_minus_n_families() {
    // each point is missed by at most n of the n + 1 families
    let ball = bfs_ball(&Zn::<2>, 20).unwrap();
    let c = brick_cover(&ball, 3.0);
    let unions: Vec<BTreeSet<[i64; 2]>> = c.families.iter().map(|f| union(f)).collect();
    for x in ball.elements() {
        assert!(unions.iter().any(|u| u.contains(x)), "{x:?}");
    }
}

#[test]
fn enlarge_examples() {
    // D(s + 2R) + 2R with D(s) = 2s, R = 3
    let d = neighborhood_enlarge(|s| 2.0 * s, 3.0);
    for s in [0.0, 1.0, 5.0] {
        assert_eq!(d(s), 2.0 * (s + 6.0) + 6.0);
    }
    let same = neighborhood_enlarge(|s| 2.0 * s + 1.0, 0.0);
    assert_eq!(same(4.0), 9.0);
}

#[test]
fn kernel_interval_lengths() {
    // ℤ × {0} in ℤ²: |n| ≥ s first at L + 1 = ⌈s⌉
    assert_eq!(kernel_control(&PlaneOverLine, 4.0), (3, 2));
    // centre of the Heisenberg group: lengths grow like 2√n
    let (l, d) = kernel_control(&HeisenbergOverPlane, 6.0);
    let len = |n: i64| nagata_core::group_models::heisenberg_central_length(n) as f64;
    assert!(len(l + 1) >= 6.0 && len(l) < 6.0);
    assert_eq!(d as f64, (0..l).map(len).fold(0.0, f64::max));
}

#[test]
fn plane_over_line_gives_four_linear_families() {
    let ball = bfs_ball(&Zn::<2>, 40).unwrap();
    let line = bfs_ball(&Zn::<1>, 40).unwrap();
    let mut entries = Vec::new();
    for s in [2.0, 4.0, 8.0] {
        let ch = brick_cover(&line, s);
        let c = exact_sequence_cover(&PlaneOverLine, &ball, &ch, &L1Metric, s).unwrap();
        assert_eq!(c.families.len(), 4);
        let b_h = c.params["b_h"];
        let (_, d_k) = kernel_control(&PlaneOverLine, s + 2.0 * b_h);
        assert_eq!(c.claimed_bound, d_k as f64 + 2.0 * b_h);
        let e = verify_control(&Zn::<2>, &c, ball.elements(), |g| ball.is_boundary(g), &L1Metric).unwrap();
        assert!(e.pass, "s={s} {e:?}");
        entries.push(e);
    }
    let cert = certify("Z^2", 40, "exact-seq", entries);
    assert!(cert.pass, "{cert:?}");
}

#[test]
fn trivial_kernel_is_the_pullback() {
    let ball = bfs_ball(&Zn::<2>, 15).unwrap();
    let s = 3.0;
    let ch = brick_cover(&ball, s);
    let c = exact_sequence_cover(&TrivialKernel, &ball, &ch, &L1Metric, s).unwrap();
    assert_eq!(c.families.len(), 2 * ch.families.len());
    for (j, fam) in ch.families.iter().enumerate() {
        assert_eq!(union(&c.families[2 * j]), union(fam));
        assert!(c.families[2 * j + 1].is_empty());
        // sets are the s-components of the quotient family
        let pts: Vec<[i64; 2]> = union(fam).into_iter().collect();
        let comps: Vec<Vec<[i64; 2]>> = graph_components(&WordSpace::new(&Zn::<2>), &pts, s)
            .into_iter()
            .map(|cc| cc.into_iter().map(|i| pts[i]).collect())
            .collect();
        assert_eq!(sets(&c.families[2 * j]), sets(&comps));
    }
}

#[test]
fn scale_mismatch_is_an_error() {
    let ball = bfs_ball(&Zn::<2>, 5).unwrap();
    let ch = brick_cover(&ball, 2.0);
    assert!(matches!(
        exact_sequence_cover(&TrivialKernel, &ball, &ch, &L1Metric, 3.0),
        Err(CoverError::ScaleMismatch(_))
    ));
}

#[test]
fn heisenberg_exact_sequence_passes() {
    let ball = bfs_ball(&Heisenberg, 16).unwrap();
    let plane = bfs_ball(&Zn::<2>, 16).unwrap();
    let metric = TableMetric::new(&Heisenberg, 32).unwrap();
    for s in [2.0, 4.0] {
        let ch = brick_cover(&plane, s);
        let c = exact_sequence_cover(&HeisenbergOverPlane, &ball, &ch, &L1Metric, s).unwrap();
        assert_eq!(c.families.len(), 6);
        let e = verify_control(&Heisenberg, &c, ball.elements(), |g| ball.is_boundary(g), &metric).unwrap();
        assert!(e.pass, "s={s} {e:?}");
    }
}

#[test]
fn heisenberg_bricks_have_four_families() {
    let ball = bfs_ball(&Heisenberg, 10).unwrap();
    let metric = TableMetric::new(&Heisenberg, 20).unwrap();
    let c = heisenberg_brick_cover(&ball, 2.0).unwrap();
    assert_eq!(c.families.len(), 4);
    let e = verify_control(&Heisenberg, &c, ball.elements(), |g| ball.is_boundary(g), &metric).unwrap();
    assert!(e.pass, "{e:?}");
}

#[test]
fn cover_file_round_trip() {
    let ball = bfs_ball(&Heisenberg, 6).unwrap();
    let c = heisenberg_brick_cover(&ball, 2.0).unwrap();
    let f = CoverFile::from_cover(&Heisenberg, 6, &c);
    let text = serde_json::to_string(&f).unwrap();
    let back: CoverFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_cover(&Heisenberg).unwrap(), c);
}

#[test]
fn certify_needs_linear_bounds() {
    let entry = |s: f64, b: f64| nagata_core::cover_engine::ControlEntry {
        scale: s,
        families: 3,
        claimed_bound: b,
        verified_bound: b,
        interior_bound: b,
        components: 1,
        boundary_components: 0,
        boundary_over_claim: 0,
        pass: true,
    };
    let lin = certify("x", 1, "c", [2.0, 4.0, 8.0, 16.0].iter().map(|&s| entry(s, 3.0 * s)).collect());
    assert!(lin.pass);
    let quad = certify("x", 1, "c", [2.0, 4.0, 8.0, 16.0].iter().map(|&s| entry(s, s * s)).collect());
    assert!(!quad.pass);
    let short = certify("x", 1, "c", vec![entry(2.0, 6.0), entry(4.0, 12.0)]);
    assert!(!short.pass && short.fit_error.is_some());
}

#[test]
fn odd_cycle_needs_three_colours() {
    let edges: Vec<(u32, u32)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
    let adj = adjacency(5, &edges);
    assert!(k_color(&adj, 2, 10_000).is_none());
    let c = k_color(&adj, 3, 10_000).unwrap();
    assert!(is_proper(&adj, &c));
}

#[test]
fn carve_extremes() {
    let ball = bfs_ball(&Zn::<2>, 10).unwrap();
    let g = InducedGraph::new(&Zn::<2>, &ball);
    // radius R from the identity is one cluster
    assert_eq!(carve(&g, 10, 3, 1), Some((1, 1)));
    // no separation needed: singletons of one colour
    assert_eq!(carve(&g, 0, 0, 1), Some((ball.len(), 1)));
    // singletons at separation 1 cannot share one colour
    assert_eq!(carve(&g, 0, 1, 1), None);
}

#[test]
fn one_family_curve_spans_the_ball() {
    let ball = bfs_ball(&Zn::<2>, 12).unwrap();
    let curve = empirical_control_curve(&Zn::<2>, &ball, 0, &[2.0, 4.0]);
    for c in curve {
        assert!(c.heuristic);
        assert_eq!(c.bound, Some(24.0));
        assert_eq!(c.clusters, 1);
    }
}
