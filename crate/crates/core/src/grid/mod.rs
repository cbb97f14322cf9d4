//! Deterministic grid solvers for the frozen-percolation RDE.
//!
//! Everything lives on a uniform lattice over `[lo, 1]` with `lo = 1/(r−1)`.
//! Below `lo` the survival functions are closed-form, so those parts of the
//! integrals are added analytically and only `[lo, 1]` is discretized.
//! Quadrature is the composite trapezoid rule throughout.

mod bivariate;
mod iterate;
mod partition;
mod univariate;

pub use bivariate::{g_from_f, h_from_f, tt_push, BivariateGrid, Role, MARGINAL_TOL};
pub use iterate::{
    iterate_diagonal, iterate_from, quadrature_floor, DiagonalRun, Start, Verdict, DEFAULT_MAX_ITERS, MIN_KNOTS,
};
pub use partition::{find_min_partition, partition_check, PartitionBound, CONTRACTION_LIMIT};
pub use univariate::{fixed_point_residual, t_push, SurvivalGrid};

use crate::dist::frozen_lo;
use crate::error::{domain, Result};

/// `k` equally spaced knots on `[lo, 1]`. The last knot is exactly `1.0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    lo: f64,
    k: usize,
}

impl Lattice {
    pub fn new(lo: f64, k: usize) -> Result<Self> {
        if k < 2 {
            return domain(format!("lattice needs at least 2 knots, got {k}"));
        }
        if !(lo > 0.0 && lo < 1.0) {
            return domain(format!("lattice lower end must lie in (0, 1), got {lo}"));
        }
        Ok(Lattice { lo, k })
    }

    /// Lattice over the finite support `[1/(r−1), 1]` of the degree-`r` RDE.
    pub fn for_degree(r: u32, k: usize) -> Result<Self> {
        check_degree(r)?;
        Lattice::new(frozen_lo(r), k)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (1.0 - self.lo) / (self.k - 1) as f64
    }

    pub fn knot(&self, i: usize) -> f64 {
        if i + 1 == self.k {
            1.0
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn knots(&self) -> Vec<f64> {
        (0..self.k).map(|i| self.knot(i)).collect()
    }
}

pub(crate) fn check_degree(r: u32) -> Result<()> {
    if r < 3 {
        return domain(format!("tree degree r must be >= 3, got {r}"));
    }
    Ok(())
}

/// `g^m` by repeated multiplication, so `m = 2` is exactly `g * g`.
#[inline]
pub(crate) fn ipow(g: f64, m: u32) -> f64 {
    let mut acc = g;
    for _ in 1..m {
        acc *= g;
    }
    acc
}

/// Running trapezoid integral of `f` over `x`, starting at 0.
pub(crate) fn cumtrapz(f: &[f64], x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(acc);
    for i in 1..f.len() {
        acc += 0.5 * (x[i] - x[i - 1]) * (f[i - 1] + f[i]);
        out.push(acc);
    }
    out
}
