//! Randomized invariants of realization, Maxwell lengths and the solver.

mod common;

use common::*;
use num_complex::Complex64;
use steiner_core::ambiguity::{length_difference, random_configuration};
use steiner_core::geom::Point;
use steiner_core::realization::realize_full_rooted;
use steiner_core::topology::enumerate_full_types;
use steiner_core::{
    maxwell_coefficients, maxwell_length, realize, realize_full, solve, CombinatorialType, Configuration,
};

#[test]
fn maxwell_identity_and_coefficient_norms() {
    for (_, p, rt) in realizable_full_samples(11, &[3, 4, 5], 150) {
        rt.verify(&p).unwrap();
        let mc = maxwell_coefficients(&rt).unwrap();
        assert!((maxwell_length(&mc, &p) - rt.length).abs() < 1e-9);
        assert!(mc.sum().norm() < 1e-9);
        assert!(mc.c.iter().all(|c| (c.norm() - 1.0).abs() < 1e-12));
    }
}

#[test]
fn realization_is_independent_of_the_root() {
    for (t, p, rt) in realizable_full_samples(12, &[4, 5, 6], 60) {
        for root in 1..t.n_terminals() {
            let other = realize_full_rooted(&t, &p, root).unwrap();
            for (a, b) in rt.positions.iter().zip(&other.positions) {
                assert!(a.dist(*b) < 1e-9);
            }
        }
        let again = realize_full(&t, &p).unwrap();
        assert_eq!(again, rt);
    }
}

#[test]
fn realization_is_rigid_motion_equivariant() {
    let mut r = rng(13);
    for (t, p, rt) in realizable_full_samples(13, &[3, 4, 5], 80) {
        let phi: f64 = rand::Rng::random_range(&mut r, -3.0..3.0);
        let shift = Point::new(rand::Rng::random_range(&mut r, -5.0..5.0), 2.0);
        let m = |x: Point| x.rotate(phi) + shift;
        let q = p.map(m).unwrap();
        let moved = realize_full(&t, &q).unwrap();
        for (a, b) in rt.positions.iter().zip(&moved.positions) {
            assert!(m(*a).dist(*b) < 1e-9);
        }
        // coefficients pick up the phase e^{-iφ}
        let ca = maxwell_coefficients(&rt).unwrap();
        let cb = maxwell_coefficients(&moved).unwrap();
        let phase = Complex64::from_polar(1.0, -phi);
        for (x, y) in ca.c.iter().zip(&cb.c) {
            assert!((x * phase - y).norm() < 1e-9);
        }
        assert!((moved.length - rt.length).abs() < 1e-9);
    }
}

#[test]
fn coefficients_are_stable_along_realizable_segments() {
    let mut r = rng(14);
    let mut paths = 0;
    for (t, p0, rt0) in realizable_full_samples(14, &[4, 5], 60) {
        let c0 = maxwell_coefficients(&rt0).unwrap();
        let scale = 0.05;
        let p1 = Configuration::new(
            p0.points()
                .iter()
                .map(|x| {
                    *x + Point::new(
                        rand::Rng::random_range(&mut r, -scale..scale),
                        rand::Rng::random_range(&mut r, -scale..scale),
                    )
                })
                .collect(),
        )
        .unwrap();
        let samples: Option<Vec<_>> = (0..=100)
            .map(|k| realize_full(&t, &p0.lerp(&p1, k as f64 / 100.0).unwrap()).ok())
            .collect();
        let Some(samples) = samples else { continue };
        paths += 1;
        for (k, rt) in samples.iter().enumerate() {
            let c = maxwell_coefficients(rt).unwrap();
            // the tree turns as a whole, so coefficients agree up to one common phase
            let phase = c.c[0] / c0.c[0];
            for (a, b) in c0.c.iter().zip(&c.c) {
                assert!((a * phase - b).norm() < 1e-7);
            }
            // and the fixed coefficients keep giving the length
            let q = p0.lerp(&p1, k as f64 / 100.0).unwrap();
            assert!((maxwell_length(&c0, &q) - rt.length).abs() < 1e-9);
        }
    }
    assert!(paths >= 20, "only {paths} fully realizable segments");
}

#[test]
fn every_candidate_satisfies_the_tree_invariants() {
    let mut r = rng(15);
    for n in 2..=5 {
        for _ in 0..10 {
            let p = random_configuration(&mut r, n);
            let res = solve(&p, 1e-9).unwrap();
            for c in &res.candidates {
                c.tree.verify(&p).unwrap();
                assert_eq!(c.tree.ty.topology_code(), c.code);
            }
            for w in res.candidates.windows(2) {
                assert!(w[0].length <= w[1].length);
            }
        }
    }
}

#[test]
fn mirror_of_realized_type_fails_to_realize() {
    for (_, p, rt) in realizable_full_samples(16, &[3, 4, 5], 40) {
        assert!(realize_full(&rt.ty, &p).is_ok());
        assert!(realize_full(&rt.ty.mirror(), &p).is_err());
    }
}

#[test]
fn adding_a_terminal_on_the_tree_does_not_lengthen_it() {
    let mut r = rng(17);
    let mut checked = 0;
    while checked < 30 {
        let n = 3 + checked % 2;
        let p = random_configuration(&mut r, n);
        let res = solve(&p, 1e-9).unwrap();
        let best = res.best();
        if best.tree.ty.n_steiner() == 0 {
            continue;
        }
        let s = best.tree.positions[n];
        let mut pts = p.points().to_vec();
        pts.push(s);
        let q = Configuration::new(pts).unwrap();
        let res2 = solve(&q, 1e-9).unwrap();
        assert!(res2.min_length() <= res.min_length() + 1e-9);
        checked += 1;
    }
}

#[test]
fn random_four_point_configurations_are_unambiguous() {
    let mut r = rng(18);
    for _ in 0..150 {
        let p = random_configuration(&mut r, 4);
        assert!(!solve(&p, 1e-9).unwrap().ambiguous, "{p}");
    }
}

#[test]
fn wall_difference_is_continuous_on_the_rectangle_path() {
    let (p0, p1) = (rect(1.2, 1.0), rect(1.0, 1.2));
    let types = enumerate_full_types(4).unwrap();
    let spines: Vec<&CombinatorialType> = types.iter().filter(|t| realize_full(t, &p0).is_ok()).collect();
    assert_eq!(spines.len(), 2);
    let g: Vec<f64> = (0..=1000)
        .map(|k| length_difference(&p0, &p1, spines[0], spines[1], k as f64 / 1000.0).unwrap().unwrap())
        .collect();
    let diffs: Vec<f64> = g.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    for i in 0..diffs.len() {
        let lo = i.saturating_sub(5);
        let hi = (i + 6).min(diffs.len());
        let mut local = diffs[lo..hi].to_vec();
        local.sort_by(f64::total_cmp);
        let median = local[local.len() / 2];
        assert!(diffs[i] <= 10.0 * median.max(1e-15), "jump at sample {i}");
    }
    // g changes sign exactly once, at the square
    let flips = g.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
    assert_eq!(flips, 1);
    assert!(g[500].abs() < 1e-12);
}

#[test]
fn realize_handles_every_type_on_a_generic_configuration() {
    let p = cfg(&[(0.0, 0.0), (3.0, 0.2), (1.4, 1.1), (0.3, 2.4)]);
    let res = solve(&p, 1e-9).unwrap();
    for c in &res.candidates {
        let direct = realize(&c.ty, &p).unwrap();
        assert!((direct.length - c.length).abs() < 1e-12);
    }
}
