//! Sup-CDF independence statistic for root pairs, calibrated by permutation.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::rde::PairSample;
use crate::seed::{Purpose, Seed};
use crate::value::ExtendedValue;

/// Knots per coordinate unless the caller says otherwise.
pub const DEFAULT_EVAL_KNOTS: usize = 32;

/// Permutation resamples behind the baseline quantile.
pub const PERMUTATIONS: usize = 200;

pub const MIN_PAIRS: usize = 100;

/// Level of the baseline quantile.
const BASELINE_LEVEL: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConsistentWithIndependence,
    DependenceDetected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceReport {
    pub stat: f64,
    pub baseline_q99: f64,
    pub depth: usize,
    pub n: usize,
    pub verdict: Verdict,
    pub seed: u64,
}

/// Bin index per value: the first knot at or above it, with `∞` (and nothing
/// else) in the top bin. Knots sit at the finite values of ranks
/// `⌈j·n_f/K⌉`, `j = 1..K`, so the binning depends only on ranks.
fn rank_bins(values: &[ExtendedValue], knots: usize) -> (Vec<u32>, usize) {
    let mut finite: Vec<f64> = values.iter().filter_map(|v| v.finite()).collect();
    finite.sort_unstable_by(f64::total_cmp);
    let nf = finite.len();
    let mut cuts: Vec<f64> = Vec::with_capacity(knots);
    if nf > 0 {
        for j in 1..=knots {
            let rank = (j * nf).div_ceil(knots).max(1);
            cuts.push(finite[rank - 1]);
        }
        cuts.dedup();
    }
    let bins = values
        .iter()
        .map(|v| match v.finite() {
            Some(x) => cuts.partition_point(|&c| c < x) as u32,
            None => cuts.len() as u32,
        })
        .collect();
    (bins, cuts.len())
}

/// `max |F̂(a, b) − F̂_X(a)·F̂_Y(b)|` over the finite knots.
fn sup_gap(xb: &[u32], nx: usize, yb: &[u32], ny: usize) -> f64 {
    let (wx, wy) = (nx + 1, ny + 1);
    let mut joint = vec![0u32; wx * wy];
    for (&a, &b) in xb.iter().zip(yb) {
        joint[a as usize * wy + b as usize] += 1;
    }
    let n = xb.len() as f64;
    // 2-D running sums turn cell counts into CDF counts.
    for a in 0..wx {
        for b in 1..wy {
            joint[a * wy + b] += joint[a * wy + b - 1];
        }
    }
    for a in 1..wx {
        for b in 0..wy {
            joint[a * wy + b] += joint[(a - 1) * wy + b];
        }
    }
    let fx = |a: usize| joint[a * wy + ny] as f64 / n;
    let fy = |b: usize| joint[nx * wy + b] as f64 / n;
    let mut best: f64 = 0.0;
    for a in 0..nx {
        for b in 0..ny {
            best = best.max((joint[a * wy + b] as f64 / n - fx(a) * fy(b)).abs());
        }
    }
    best
}

/// Independence report for a sampled pair set; permutations are seeded from
/// the sample's own seed.
pub fn independence_stat(pairs: &PairSample, eval_knots: usize) -> Result<DependenceReport> {
    independence_stat_with(&pairs.pairs, eval_knots, pairs.meta.depth, Seed(pairs.meta.seed))
}

pub fn independence_stat_with(
    pairs: &[(ExtendedValue, ExtendedValue)],
    eval_knots: usize,
    depth: usize,
    seed: Seed,
) -> Result<DependenceReport> {
    if pairs.len() < MIN_PAIRS {
        return argument(format!("need at least {MIN_PAIRS} pairs, got {}", pairs.len()));
    }
    if eval_knots == 0 {
        return argument("need at least one evaluation knot");
    }
    let xs: Vec<ExtendedValue> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<ExtendedValue> = pairs.iter().map(|p| p.1).collect();
    let (xb, nx) = rank_bins(&xs, eval_knots);
    let (yb, ny) = rank_bins(&ys, eval_knots);
    let stat = sup_gap(&xb, nx, &yb, ny);

    let mut null: Vec<f64> = seed
        .streams(Purpose::Permutation, PERMUTATIONS)
        .into_par_iter()
        .map(|mut rng| {
            let mut perm = yb.clone();
            perm.shuffle(&mut rng);
            sup_gap(&xb, nx, &perm, ny)
        })
        .collect();
    null.sort_unstable_by(f64::total_cmp);
    let idx = ((BASELINE_LEVEL * PERMUTATIONS as f64).ceil() as usize).saturating_sub(1);
    let baseline_q99 = null[idx];
    let verdict = if stat <= baseline_q99 {
        Verdict::ConsistentWithIndependence
    } else {
        Verdict::DependenceDetected
    };
    Ok(DependenceReport {
        stat,
        baseline_q99,
        depth,
        n: pairs.len(),
        verdict,
        seed: seed.0,
    })
}

/// `depth,stat,baseline_q99` rows.
pub fn decay_csv(reports: &[DependenceReport]) -> String {
    let mut out = String::from("depth,stat,baseline_q99\n");
    for r in reports {
        writeln!(out, "{},{:?},{:?}", r.depth, r.stat, r.baseline_q99).expect("writing to a String");
    }
    out
}
