//! Tail diagnostics: the mod-2 `θ` recursion, an independence statistic for
//! root pairs, and the long-range probe.

mod independence;
mod mod2;
mod probe;

pub use independence::{
    decay_csv, independence_stat, independence_stat_with, DependenceReport, Verdict, DEFAULT_EVAL_KNOTS, MIN_PAIRS,
    PERMUTATIONS,
};
pub use mod2::{mod2_pair_prob, theta_fixed, theta_prediction, theta_step, ThetaFixed};
pub use probe::{constant_knots, long_range_probe, probe_sup, ProbeReport, ProbeRow};
