//! Long-range probe: how far the root law sits from `μ` when the depth-`n`
//! boundary is pinned to fixed values.

use serde::Serialize;

use crate::dist::{ks_distance, Empirical, MarginalDist};
use crate::error::{argument, Error, Result};
use crate::grid::Lattice;
use crate::rde::{Assignment, RdeKind, RdeSpec};
use crate::seed::{Purpose, Seed};
use crate::value::{ExtendedValue, Finite, Infinity};

/// Largest boundary for which random per-leaf assignments are materialized.
pub const MAX_ASSIGNED_LEAVES: u64 = 1 << 24;

/// Kolmogorov distance between the root law under `assignment` and `reference`.
pub fn long_range_probe(
    rde: &RdeSpec,
    reference: &MarginalDist,
    assignment: &Assignment,
    depth: usize,
    n_samples: usize,
    seed: Seed,
) -> Result<f64> {
    if n_samples == 0 {
        return argument("probe needs at least one sample");
    }
    let roots = rde.sample_conditional_roots(assignment, depth, n_samples, seed)?;
    ks_distance(&Empirical::from_values(roots)?, reference)
}

/// Constant boundary values worth probing: `k` lattice points plus `∞` for
/// frozen percolation, both parities for mod 2.
pub fn constant_knots(rde: &RdeSpec, k: usize) -> Result<Vec<ExtendedValue>> {
    match rde.kind() {
        RdeKind::FrozenPerc { r } => {
            let mut v: Vec<ExtendedValue> = Lattice::for_degree(r, k)?.knots().into_iter().map(Finite).collect();
            v.push(Infinity);
            Ok(v)
        }
        RdeKind::Mod2 { .. } => Ok(vec![Finite(0.0), Finite(1.0)]),
        RdeKind::Quicksort => argument("quicksort has no reference law to probe against"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub assignment: String,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub rde: String,
    pub depth: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub rows: Vec<ProbeRow>,
    /// Max over the probed assignments; only a lower bound on the sup over all.
    pub max_distance: f64,
    pub max_is_lower_bound: bool,
}

impl ProbeReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("assignment,distance\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:?}\n", r.assignment, r.distance));
        }
        out
    }
}

/// Probes every constant in `knots` and `random` per-leaf assignments drawn
/// from the reference law, and reports the largest distance.
pub fn probe_sup(
    rde: &RdeSpec,
    depth: usize,
    n_samples: usize,
    knots: &[ExtendedValue],
    random: usize,
    seed: Seed,
) -> Result<ProbeReport> {
    let reference = rde
        .fixed_point()
        .ok_or_else(|| Error::Argument(format!("{} has no reference law to probe against", rde.name())))?;
    rde.check_budget(depth)?;
    let mut rows = Vec::with_capacity(knots.len() + random);
    for &x in knots {
        let d = long_range_probe(rde, &reference, &Assignment::Constant(x), depth, n_samples, seed)?;
        rows.push(ProbeRow {
            assignment: x.to_string(),
            distance: d,
        });
    }
    if random > 0 {
        let leaves = (rde.arity() as u64).saturating_pow(depth as u32);
        if leaves > MAX_ASSIGNED_LEAVES {
            return Err(Error::Resource(format!(
                "random assignments need {leaves} boundary values, limit is {MAX_ASSIGNED_LEAVES}"
            )));
        }
        for i in 0..random {
            let mut rng = seed.stream(Purpose::Assignment, i as u64);
            let vals = (0..leaves).map(|_| reference.sample(&mut rng)).collect();
            let d = long_range_probe(rde, &reference, &Assignment::PerLeaf(vals), depth, n_samples, seed)?;
            rows.push(ProbeRow {
                assignment: format!("random-{i}"),
                distance: d,
            });
        }
    }
    let max_distance = rows.iter().map(|r| r.distance).fold(0.0, f64::max);
    Ok(ProbeReport {
        rde: rde.name(),
        depth,
        n_samples,
        seed: seed.0,
        rows,
        max_distance,
        max_is_lower_bound: true,
    })
}
