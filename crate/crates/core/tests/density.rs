mod common;

use common::*;
use msde::data_io::Points;
use msde::density::{
    build_fuzzy_graph, compute_empirical_weights, multiscale_weights, required_count,
    satisfied_count, search_radius, PairwiseSpace, RadiusSchedule, TARGET_FRACTION, ZERO_BRACKET,
};
use proptest::prelude::*;

#[test]
fn two_points_saturate() {
    let vals = [0.0, 0.0, 3.0, 4.0];
    let g = build_fuzzy_graph(Points::new(&vals, 2), 15).unwrap();
    assert_eq!(g.rho, vec![5.0, 5.0]);
    assert_eq!(g.get(0, 1), 1.0);
    assert_eq!(g.get(1, 0), 1.0);
    assert_eq!(g.get(0, 0), 0.0);
    let space = g.space();
    assert!((space.distance(0, 1) - 2f64.sqrt()).abs() < 1e-15);
    let w = compute_empirical_weights(Points::new(&vals, 2), 70, 15).unwrap();
    assert_eq!(w.weights[0], w.weights[1]);
}

#[test]
fn equilateral_triangle_is_uniform() {
    let h = 3f64.sqrt() / 2.0;
    let vals = [0.0, 0.0, 1.0, 0.0, 0.5, h];
    let g = build_fuzzy_graph(Points::new(&vals, 2), 2).unwrap();
    let first = g.get(0, 1);
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                assert!((g.get(i, j) - first).abs() < 1e-12, "{i},{j}");
            }
        }
    }
}

#[test]
fn directed_row_sums_hit_the_bisection_target() {
    let mut r = rng(15);
    let vals = uniform_values(&mut r, 100, 0.0, 1.0);
    let p = Points::new(&vals, 2);
    let g = build_fuzzy_graph(p, 15).unwrap();
    let target = 15f64.log2() + 1.0;
    let knn = knn_oracle(&vals, 2, 15);
    for i in 0..50 {
        // independent recomputation from the oracle neighbor distances
        let rho = knn[i][0].1;
        let s: f64 = knn[i]
            .iter()
            .map(|&(_, d)| (-(d - rho).max(0.0) / g.sigma[i]).exp())
            .sum();
        assert!((s - target).abs() < 1e-6, "row {i}: {s}");
        let lib: f64 = g.directed[i].iter().map(|e| e.1).sum();
        assert!((lib - target).abs() < 1e-6, "row {i}: {lib}");
        assert_eq!(g.rho[i], rho);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn probabilistic_union_identity(n in 3usize..60, dim in 1usize..5, k in 2usize..20, seed in any::<u64>()) {
        let mut r = rng(seed);
        let vals = gaussian_values(&mut r, n * dim);
        let g = build_fuzzy_graph(Points::new(&vals, dim), k).unwrap();
        let a = |i: usize, j: usize| {
            g.directed[i].iter().find(|e| e.0 == j).map_or(0.0, |e| e.1)
        };
        for i in 0..n {
            for j in 0..n {
                if i == j { continue; }
                let want = a(i, j) + a(j, i) - a(i, j) * a(j, i);
                prop_assert!((g.get(i, j) - want).abs() <= 1e-12);
                prop_assert_eq!(g.get(i, j), g.get(j, i));
            }
        }
    }

    #[test]
    fn weight_structure(n in 4usize..70, seed in any::<u64>(), t in 1usize..40) {
        let mut r = rng(seed);
        let vals = gaussian_values(&mut r, n * 3);
        let w = compute_empirical_weights(Points::new(&vals, 3), t, 15).unwrap();
        for (i, c) in w.counts.iter().enumerate() {
            prop_assert!(c[0] >= c[1] && c[1] >= c[2] && c[2] >= c[3]);
            let wi = w.weights[i];
            prop_assert!((0.0..=(n - 1) as f64).contains(&wi));
            prop_assert_eq!((wi * 4.0).fract(), 0.0);
            prop_assert_eq!(wi, c.iter().sum::<usize>() as f64 / 4.0);
        }
        prop_assert!(w.schedule.epsilon > 0.0);
        prop_assert!(w.satisfied_fraction * n as f64 >= w.schedule.required as f64 - 1e-9);
    }

    #[test]
    fn weights_follow_row_permutation(n in 4usize..50, seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut r = rng(seed);
        let vals = gaussian_values(&mut r, n * 2);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let pv: Vec<f64> = perm.iter().flat_map(|&i| vals[i * 2..i * 2 + 2].to_vec()).collect();
        let a = compute_empirical_weights(Points::new(&vals, 2), 8, 6).unwrap();
        let b = compute_empirical_weights(Points::new(&pv, 2), 8, 6).unwrap();
        for (new_i, &old_i) in perm.iter().enumerate() {
            prop_assert_eq!(a.weights[old_i], b.weights[new_i]);
        }
    }

    #[test]
    fn predicate_monotone_and_radius_minimal(n in 4usize..60, seed in any::<u64>(), t in 1usize..10) {
        let mut r = rng(seed);
        let vals = gaussian_values(&mut r, n * 2);
        let p = Points::new(&vals, 2);
        let s = search_radius(&p, t, TARGET_FRACTION).unwrap();
        let mut prev = 0;
        for step in 0..=100 {
            let eps = s.epsilon * 1.5 * step as f64 / 100.0;
            let c = satisfied_count(&p, s.t_nbd, eps);
            prop_assert!(c >= prev);
            prev = c;
        }
        prop_assert!(satisfied_count(&p, s.t_nbd, s.epsilon) >= s.required);
        // within the bisection tolerance, nothing smaller qualifies
        let below = s.epsilon * (1.0 - 1.5e-6);
        prop_assert!(s.epsilon == smallest_pair(&p) || satisfied_count(&p, s.t_nbd, below) < s.required);
    }
}

fn smallest_pair(p: &Points<'_>) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            m = m.min(p.distance(i, j));
        }
    }
    m
}

#[test]
fn collinear_radius_converges_to_one_from_above() {
    let vals = [0.0, 1.0, 2.0, 3.0];
    let p = Points::new(&vals, 1);
    assert_eq!(required_count(4, TARGET_FRACTION), 2);
    let s = search_radius(&p, 2, TARGET_FRACTION).unwrap();
    assert!(s.epsilon > 1.0 && s.epsilon - 1.0 < 1e-5, "{}", s.epsilon);
    // grid scan: nothing at or below 1 qualifies, everything above does
    for i in 1..=1000 {
        let eps = 0.5 + i as f64 * 1e-3;
        let ok = satisfied_count(&p, 2, eps) >= 2;
        assert_eq!(ok, eps > 1.0, "eps {eps}");
    }
}

#[test]
fn coincident_points_use_the_zero_bracket() {
    let vals = vec![2.0; 12];
    let s = search_radius(&Points::new(&vals, 2), 3, TARGET_FRACTION).unwrap();
    assert_eq!(s.epsilon, ZERO_BRACKET);
    let w = multiscale_weights(&Points::new(&vals, 2), &s);
    assert!(w.weights.iter().all(|&x| x == w.weights[0]));
}

#[test]
fn impossible_threshold_is_clamped() {
    let mut r = rng(3);
    let vals = gaussian_values(&mut r, 20 * 2);
    let s = search_radius(&Points::new(&vals, 2), 20, TARGET_FRACTION).unwrap();
    assert_eq!(s.t_nbd, 9);
    assert!(satisfied_count(&Points::new(&vals, 2), 9, s.epsilon) >= s.required);
}

#[test]
fn four_radius_average() {
    // point 0 at the origin; others placed so its counts at radii 4,3,2,1
    // (+1e-6) are 8, 6, 5, 3
    let vals = [0.0, 0.5, -0.5, 0.5, 1.5, -1.5, 2.5, 3.5, -3.5];
    let s = RadiusSchedule::from_epsilon(4.0 + 1e-6, 1, 1);
    assert!((s.delta - 1.0).abs() < 1e-12);
    let w = multiscale_weights(&Points::new(&vals, 1), &s);
    assert_eq!(w.counts[0], [8, 6, 5, 3]);
    assert_eq!(w.weights[0], 5.5);
}

#[test]
fn tight_cluster_outweighs_outlier() {
    // laid out directly in the counting space: a 5x6 lattice of spacing 1e-3
    let mut vals: Vec<f64> = (0..30)
        .flat_map(|i| [(i % 5) as f64 * 1e-3, (i / 5) as f64 * 1e-3])
        .collect();
    vals.extend_from_slice(&[50.0, 50.0]);
    let p = Points::new(&vals, 2);
    let s = search_radius(&p, 5, TARGET_FRACTION).unwrap();
    let w = multiscale_weights(&p, &s);
    for i in 0..31 {
        let direct: usize = s.radii.iter().map(|&rad| p.count_within(i, rad)).sum();
        assert_eq!(w.weights[i], direct as f64 / 4.0, "row {i}");
    }
    let outlier = w.weights[30];
    assert_eq!(outlier, 0.0);
    assert!(w.weights[..30].iter().all(|&c| c > outlier), "{:?}", w.weights);
}

#[test]
fn too_few_points() {
    assert!(build_fuzzy_graph(Points::new(&[1.0], 1), 5).is_err());
    assert!(search_radius(&Points::new(&[1.0], 1), 1, 0.3).is_err());
    assert!(search_radius(&Points::new(&[1.0, 2.0], 1), 0, 0.3).is_err());
}
