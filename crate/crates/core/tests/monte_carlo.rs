//! Sampler output checked against independent exact or numerical answers.

use rdetail::grid::{g_from_f, tt_push, BivariateGrid};
use rdetail::tail::mod2_pair_prob;
use rdetail::{ks_distance, Empirical, ExtendedValue, JointBoundary, MarginalDist, RdeSpec, Seed};

/// DKW radius holding with probability `1 − alpha`.
fn dkw(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

fn above(v: ExtendedValue, t: f64) -> bool {
    v > ExtendedValue::Finite(t)
}

#[test]
fn bivariate_grid_matches_coupled_sampler_on_four_regular_tree() {
    let (r, depth, n) = (4, 2, 200_000);
    let rde = RdeSpec::frozen_perc(r).unwrap();
    let mu = rde.fixed_point().unwrap();
    let pairs = rde.sample_coupled_pairs(&mu, depth, n, Seed(21)).unwrap();

    let mut f = BivariateGrid::diagonal(r, 256).unwrap();
    for _ in 0..depth {
        f = tt_push(&f).unwrap();
    }
    let product = BivariateGrid::product(r, 256).unwrap();

    let points = [0.4, 0.55, 0.7, 0.85];
    let mut separated = 0.0f64;
    for &x in &points {
        for &y in &points {
            let hits = pairs.pairs.iter().filter(|&&(a, b)| above(a, x) && above(b, y)).count();
            let p = hits as f64 / n as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            let want = g_from_f(&f, x, y).unwrap();
            assert!(
                (p - want).abs() < 4.0 * sigma + 1e-4,
                "G({x},{y}): sampled {p}, grid {want}"
            );
            separated = separated.max((want - g_from_f(&product, x, y).unwrap()).abs());
        }
    }
    // The check would be vacuous if depth 2 were already indistinguishable from independence.
    assert!(separated > 0.01, "{separated}");
}

#[test]
fn product_boundary_is_preserved() {
    let rde = RdeSpec::frozen_perc(3).unwrap();
    let mu = rde.fixed_point().unwrap();
    let joint = JointBoundary::Product(mu.clone(), mu);
    let pairs = rde.sample_pairs(&joint, 5, 20_000, Seed(8)).unwrap();
    let report = rdetail::tail::independence_stat(&pairs, 32).unwrap();
    assert!(report.stat <= report.baseline_q99, "{report:?}");
}

#[test]
fn mod2_equal_pairs_follow_exact_law() {
    let n = 100_000;
    for q in [0.1, 0.3, 0.5] {
        let rde = RdeSpec::mod2(q).unwrap();
        let mu = rde.fixed_point().unwrap();
        for depth in 1..=10 {
            let pairs = rde.sample_coupled_pairs(&mu, depth, n, Seed(depth as u64)).unwrap();
            let equal = pairs.pairs.iter().filter(|(x, y)| x == y).count() as f64 / n as f64;
            let p = mod2_pair_prob(q, depth as u32);
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((equal - p).abs() <= 3.0 * sigma, "q={q} n={depth}: {equal} vs {p}");
        }
    }
}

#[test]
fn fixed_points_are_invariant_at_every_depth() {
    let n = 20_000;
    let frozen = RdeSpec::frozen_perc(3).unwrap();
    for a in [0.6, 0.8, 1.0] {
        let law = MarginalDist::nu_a(a).unwrap();
        for depth in [1, 4, 8] {
            let roots = frozen.sample_roots(&law, depth, n, Seed(depth as u64)).unwrap();
            let d = ks_distance(&Empirical::from_values(roots).unwrap(), &law).unwrap();
            assert!(d < dkw(n, 0.01), "a={a} depth={depth}: {d}");
        }
    }
    let mod2 = RdeSpec::mod2(0.3).unwrap();
    let half = MarginalDist::bernoulli(0.5).unwrap();
    for depth in [1, 10, 100] {
        let roots = mod2.sample_roots(&half, depth, n, Seed(3)).unwrap();
        let d = ks_distance(&Empirical::from_values(roots).unwrap(), &half).unwrap();
        assert!(d < dkw(n, 0.01), "depth={depth}: {d}");
    }
}

#[test]
fn coupled_coordinates_share_their_law() {
    let rde = RdeSpec::frozen_perc(3).unwrap();
    let mu = rde.fixed_point().unwrap();
    let n = 20_000;
    let pairs = rde.sample_coupled_pairs(&mu, 6, n, Seed(2)).unwrap();
    for coord in [
        Empirical::from_values(pairs.xs()).unwrap(),
        Empirical::from_values(pairs.ys()).unwrap(),
    ] {
        let d = ks_distance(&coord, &mu).unwrap();
        assert!(d < dkw(n, 0.01), "{d}");
    }
}
