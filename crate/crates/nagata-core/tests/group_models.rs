use std::collections::VecDeque;

use nagata_core::group_models::ball::{cache_path, cached_ball, enumerate_words, read_cache, write_cache, write_csv};
use nagata_core::group_models::continuous::{
    axis_interval, curve_length, filiform4_model, grid_distance, translated_set_diameter, ContinuousGroupModel, Euclidean4, P4,
};
use nagata_core::group_models::{
    bfs_ball, bfs_ball_with_cap, heisenberg_central_length, lamplighter_model, sol_lattice_model,
    BallError, GroupModel, Heisenberg, LampState, Zn, CAT_MAP,
};
use proptest::prelude::*;
use rustc_hash::FxHashMap;

fn same_as_enumeration<G: GroupModel>(m: &G, r: u32) {
    let ball = bfs_ball(m, r).unwrap();
    let words = enumerate_words(m, r);
    assert_eq!(ball.len(), words.len(), "{} R={r}", m.name());
    for (g, l) in &words {
        assert_eq!(ball.length(g), Some(*l), "{} {:?}", m.name(), g);
    }
}

#[test]
fn bfs_matches_word_enumeration() {
    let sol = sol_lattice_model(CAT_MAP).unwrap();
    for r in 0..=4 {
        same_as_enumeration(&Zn::<1>, r);
        same_as_enumeration(&Zn::<2>, r);
        same_as_enumeration(&Zn::<3>, r);
        same_as_enumeration(&Heisenberg, r);
        same_as_enumeration(&sol, r);
        same_as_enumeration(&lamplighter_model(), r);
    }
}

#[test]
fn small_ball_sizes() {
    assert_eq!(bfs_ball(&Zn::<2>, 1).unwrap().len(), 5);
    // ℤ² ball of radius r has 2r² + 2r + 1 points
    for r in 0..12 {
        assert_eq!(bfs_ball(&Zn::<2>, r).unwrap().len() as u32, 2 * r * r + 2 * r + 1);
    }
    // the four generators give 12 new elements at length 2
    assert_eq!(bfs_ball(&Heisenberg, 2).unwrap().len(), enumerate_words(&Heisenberg, 2).len());
    assert_eq!(bfs_ball(&Heisenberg, 2).unwrap().len(), 17);
}

#[test]
fn heisenberg_law() {
    let h = Heisenberg;
    assert_eq!(h.multiply(&[1, 0, 0], &[0, 1, 0]), [1, 1, 1]);
    let (x, y) = ([1, 0, 0], [0, 1, 0]);
    let c = h.multiply(&h.multiply(&h.multiply(&x, &y), &h.inverse(&x)), &h.inverse(&y));
    assert_eq!(c, [0, 0, 1]);
    for (a, b, cc) in [(2, -3, 5), (0, 4, -1), (-7, 1, 0)] {
        assert_eq!(h.inverse(&[a, b, cc]), [-a, -b, -cc + a * b]);
    }
}

#[test]
fn central_length_matches_bfs() {
    let ball = bfs_ball(&Heisenberg, 30).unwrap();
    assert_eq!(ball.length(&[0, 0, 1]), Some(4));
    for n in -40i64..=40 {
        let l = heisenberg_central_length(n);
        if l <= 30 {
            assert_eq!(ball.length(&[0, 0, n]).map(u64::from), Some(l), "n={n}");
        } else {
            assert_eq!(ball.length(&[0, 0, n]), None);
        }
    }
}

#[test]
fn sol_conjugation_by_t_applies_the_matrix() {
    let m = sol_lattice_model(CAT_MAP).unwrap();
    let t = [0, 0, 1];
    let g = m.multiply(&m.multiply(&t, &[1, 0, 0]), &m.inverse(&t));
    assert_eq!(g, [2, 1, 0]);
    assert_eq!(m.multiply(&[1, 2, 0], &[3, -5, 0]), [4, -3, 0]);
    assert_eq!(m.identity(), [0, 0, 0]);
}

#[test]
fn sol_rejects_non_hyperbolic_matrices() {
    assert!(sol_lattice_model([[1, 1], [0, 1]]).is_err());
    assert!(sol_lattice_model([[2, 0], [0, 1]]).is_err());
}

#[test]
fn lamplighter_examples() {
    let m = lamplighter_model();
    let gens = m.generators();
    let toggle = &gens[4];
    assert_eq!(m.multiply(toggle, toggle), m.identity());
    let e1 = &gens[0];
    let g = m.multiply(e1, toggle);
    assert_eq!(g, LampState { cursor: [1, 0], lamps: vec![[1, 0]] });
    let ball = bfs_ball(&m, 4).unwrap();
    let two = LampState { cursor: [0, 0], lamps: vec![[0, 0], [1, 0]] };
    assert_eq!(ball.length(&two), Some(4));
}

#[test]
fn tuple_round_trip_and_rejection() {
    let m = lamplighter_model();
    for (g, _) in bfs_ball(&m, 3).unwrap().iter() {
        assert_eq!(&m.from_tuple(&m.to_tuple(g)).unwrap(), g);
    }
    assert!(m.from_tuple(&[0, 0, 1, 0, 0, 0]).is_err()); // unsorted lamps
    assert!(m.from_tuple(&[0]).is_err());
    assert!(Heisenberg.from_tuple(&[1, 2]).is_err());
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ball = bfs_ball(&Heisenberg, 6).unwrap();
    let mut buf = Vec::new();
    write_cache(&Heisenberg, &ball, &mut buf).unwrap();
    let back = read_cache(&Heisenberg, &mut buf.as_slice()).unwrap();
    assert_eq!(back.len(), ball.len());
    assert_eq!(back.radius, ball.radius);
    for (g, l) in ball.iter() {
        assert_eq!(back.length(g), Some(l));
    }
    // a cache written for one model is refused by another
    assert!(read_cache(&Zn::<3>, &mut buf.as_slice()).is_err());

    let first = cached_ball(&Heisenberg, 6, dir.path()).unwrap();
    assert!(cache_path(dir.path(), &Heisenberg, 6).exists());
    let second = cached_ball(&Heisenberg, 6, dir.path()).unwrap();
    assert_eq!(first.elements(), second.elements());
    assert_eq!(first.len(), ball.len());
}

#[test]
fn csv_export_lists_every_element() {
    let ball = bfs_ball(&Zn::<2>, 3).unwrap();
    let mut buf = Vec::new();
    write_csv(&Zn::<2>, &ball, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), ball.len() + 1);
    assert!(text.starts_with("length,element"));
}

#[test]
fn memory_cap_is_enforced() {
    assert!(matches!(bfs_ball_with_cap(&Heisenberg, 40, 1 << 16), Err(BallError::MemoryCap { .. })));
}

#[test]
fn truncation_and_boundary() {
    let ball = bfs_ball(&Zn::<2>, 10).unwrap();
    let small = ball.truncate(4);
    assert_eq!(small.len(), 41);
    assert!(ball.is_boundary(&[9, 0]));
    assert!(ball.is_boundary(&[10, 0]));
    assert!(!ball.is_boundary(&[8, 0]));
}

// Ball from a plain queue over a hash map, as a second oracle for larger R.
fn queue_ball<G: GroupModel>(m: &G, r: u32) -> FxHashMap<G::Elem, u32> {
    let mut seen = FxHashMap::default();
    let mut q = VecDeque::new();
    seen.insert(m.identity(), 0);
    q.push_back(m.identity());
    let gens = m.generators();
    while let Some(g) = q.pop_front() {
        let l = seen[&g];
        if l == r {
            continue;
        }
        for s in &gens {
            let h = m.multiply(&g, s);
            if !seen.contains_key(&h) {
                seen.insert(h.clone(), l + 1);
                q.push_back(h);
            }
        }
    }
    seen
}

#[test]
fn bfs_matches_queue_oracle_at_moderate_radius() {
    let m = sol_lattice_model(CAT_MAP).unwrap();
    let ball = bfs_ball(&m, 8).unwrap();
    let oracle = queue_ball(&m, 8);
    assert_eq!(ball.len(), oracle.len());
    for (g, l) in &oracle {
        assert_eq!(ball.length(g), Some(*l));
    }
}

#[test]
fn filiform_law_examples() {
    let m = filiform4_model();
    let x = [0.3, -1.2, 2.0, 0.7];
    assert_eq!(m.multiply(&x, &[0.0; 4]), x);
    let p = m.multiply(&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]);
    let want = [1.0, 1.0, 0.5, 1.0 / 12.0];
    for i in 0..4 {
        assert!((p[i] - want[i]).abs() < 1e-15, "{p:?}");
    }
    let g = m.metric_tensor(&[0.0; 4]);
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(g[i][j], if i == j { 1.0 } else { 0.0 });
        }
    }
}

fn dleft(m: &impl ContinuousGroupModel, g: &P4, x: &P4, v: &P4) -> P4 {
    let eps = 1e-5;
    let plus: P4 = std::array::from_fn(|i| x[i] + eps * v[i]);
    let minus: P4 = std::array::from_fn(|i| x[i] - eps * v[i]);
    let (a, b) = (m.multiply(g, &plus), m.multiply(g, &minus));
    std::array::from_fn(|i| (a[i] - b[i]) / (2.0 * eps))
}

fn coord() -> impl Strategy<Value = f64> {
    -2.0f64..2.0
}

proptest! {
    #[test]
    fn filiform_coframe_is_left_invariant(
        g in [coord(), coord(), coord(), coord()],
        x in [coord(), coord(), coord(), coord()],
        v in [coord(), coord(), coord(), coord()],
    ) {
        let m = filiform4_model();
        let before = m.norm_at(&x, &v);
        let after = m.norm_at(&m.multiply(&g, &x), &dleft(&m, &g, &x, &v));
        prop_assert!((before - after).abs() <= 1e-6 * (1.0 + before), "{before} vs {after}");
    }

    #[test]
    fn filiform_group_axioms(
        x in [coord(), coord(), coord(), coord()],
        y in [coord(), coord(), coord(), coord()],
        z in [coord(), coord(), coord(), coord()],
    ) {
        let m = filiform4_model();
        let l = m.multiply(&m.multiply(&x, &y), &z);
        let r = m.multiply(&x, &m.multiply(&y, &z));
        for i in 0..4 {
            prop_assert!((l[i] - r[i]).abs() < 1e-9);
        }
        let e = m.multiply(&x, &m.inverse(&x));
        prop_assert!(e.iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn heisenberg_axioms(a in prop::array::uniform3(-50i64..50), b in prop::array::uniform3(-50i64..50), c in prop::array::uniform3(-50i64..50)) {
        let h = Heisenberg;
        prop_assert_eq!(h.multiply(&h.multiply(&a, &b), &c), h.multiply(&a, &h.multiply(&b, &c)));
        prop_assert_eq!(h.multiply(&a, &h.inverse(&a)), h.identity());
    }

    #[test]
    fn sol_axioms(a in prop::array::uniform3(-20i64..20), b in prop::array::uniform3(-20i64..20), t in -4i64..4) {
        let m = sol_lattice_model(CAT_MAP).unwrap();
        let a = [a[0], a[1], t];
        let c = [b[0], b[1], -t];
        prop_assert_eq!(m.multiply(&m.multiply(&a, &b), &c), m.multiply(&a, &m.multiply(&b, &c)));
        prop_assert_eq!(m.multiply(&m.inverse(&a), &a), m.identity());
    }

    #[test]
    fn lamplighter_axioms(w1 in prop::collection::vec(0usize..5, 0..12), w2 in prop::collection::vec(0usize..5, 0..12), w3 in prop::collection::vec(0usize..5, 0..12)) {
        let m = lamplighter_model();
        let gens = m.generators();
        let word = |w: &[usize]| w.iter().fold(m.identity(), |acc, &i| m.multiply(&acc, &gens[i]));
        let (a, b, c) = (word(&w1), word(&w2), word(&w3));
        prop_assert_eq!(m.multiply(&m.multiply(&a, &b), &c), m.multiply(&a, &m.multiply(&b, &c)));
        prop_assert_eq!(m.multiply(&a, &m.inverse(&a)), m.identity());
    }
}

#[test]
fn flat_grid_distance() {
    let d = grid_distance(&Euclidean4, &[0.0; 4], &[1.0, 0.0, 0.0, 0.0], 0.1).unwrap();
    assert!((d - 1.0).abs() <= 0.05, "{d}");
    assert_eq!(grid_distance(&Euclidean4, &[0.3; 4], &[0.3; 4], 0.1).unwrap(), 0.0);
}

#[test]
fn curve_length_of_straight_line() {
    let m = filiform4_model();
    // along e1 from the origin the coframe stays the identity on that axis
    let l = curve_length(&m, |t| [t, 0.0, 0.0, 0.0], 64);
    assert!((l - 1.0).abs() < 1e-9);
}

#[test]
fn filiform_interval_at_identity_slice() {
    let m = filiform4_model();
    let set = axis_interval(3, 0.5, 5);
    let r = translated_set_diameter(&m, &set, &[0.0; 4], 0.1).unwrap();
    // a segment in a central direction is never longer than itself
    assert!(r.diameter <= 0.5 * 1.05, "{}", r.diameter);
    assert!(r.diameter > 0.0);
}

#[test]
fn grid_distance_never_beats_a_curve() {
    // the grid path is an admissible curve, so it cannot undercut the
    // straight segment's length by more than the discretisation slack
    let m = filiform4_model();
    let (p, q) = ([0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.6, 0.0]);
    let d = grid_distance(&m, &p, &q, 0.1).unwrap();
    let l = curve_length(&m, |t| [0.0, 0.0, 0.6 * t, 0.0], 64);
    assert!(d <= l * 1.05, "{d} vs {l}");
}
