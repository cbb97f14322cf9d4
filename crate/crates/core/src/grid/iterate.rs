//! Iterating `T⊗T` and watching the deviation from the product.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::bivariate::{h_from_f, push_unchecked, BivariateGrid};
use crate::error::{domain, Error, Result};

/// Smallest grid accepted by [`iterate_diagonal`].
pub const MIN_KNOTS: usize = 64;

/// Default iteration budget.
pub const DEFAULT_MAX_ITERS: usize = 100;

/// A trace value this far above 1 is treated as divergence.
const DIVERGENCE_SLACK: f64 = 1e-9;

/// The trace has stalled once a step changes it by less than this times `tol`.
const STALL_FRACTION: f64 = 1e-2;

/// Iterations used to locate the quadrature floor.
const FLOOR_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Start {
    Diagonal,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConvergedToProduct,
    Stalled,
    BudgetExhausted,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ConvergedToProduct => "converged-to-product",
            Verdict::Stalled => "stalled",
            Verdict::BudgetExhausted => "budget-exhausted",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DiagonalRun {
    /// `s_n = sup|H_n|` for `n = 0, 1, …`.
    pub trace: Vec<f64>,
    pub verdict: Verdict,
    /// The last CDF iterate.
    pub grid: BivariateGrid,
}

impl DiagonalRun {
    /// Number of operator applications performed.
    pub fn iterations(&self) -> usize {
        self.trace.len() - 1
    }

    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iter,sup_h\n");
        for (n, s) in self.trace.iter().enumerate() {
            writeln!(out, "{n},{s:?}").expect("writing to a String");
        }
        out
    }
}

fn start_grid(start: Start, r: u32, k: usize) -> Result<BivariateGrid> {
    match start {
        Start::Diagonal => BivariateGrid::diagonal(r, k),
        Start::Product => BivariateGrid::product(r, k),
    }
}

/// Iterates `T⊗T` from the diagonal coupling; see [`iterate_from`].
pub fn iterate_diagonal(r: u32, k: usize, max_iters: usize, tol: f64) -> Result<DiagonalRun> {
    iterate_from(Start::Diagonal, r, k, max_iters, tol)
}

/// Iterates `T⊗T` and records `sup|H_n|` until it drops below `tol`, stops
/// moving, or `max_iters` steps have been taken.
pub fn iterate_from(start: Start, r: u32, k: usize, max_iters: usize, tol: f64) -> Result<DiagonalRun> {
    if k < MIN_KNOTS {
        return domain(format!("iteration needs k >= {MIN_KNOTS}, got {k}"));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return domain(format!("tol must be positive, got {tol}"));
    }
    let mut f = start_grid(start, r, k)?;
    let mut trace = Vec::new();
    loop {
        let s = h_from_f(&f)?.sup_abs();
        let n = trace.len();
        if s.is_nan() || s > 1.0 + DIVERGENCE_SLACK {
            return Err(Error::NumericalInstability(format!(
                "sup|H| reached {s} at iteration {n}"
            )));
        }
        let prev = trace.last().copied();
        trace.push(s);
        let verdict = if s < tol {
            Some(Verdict::ConvergedToProduct)
        } else if prev.is_some_and(|p| (s - p).abs() < STALL_FRACTION * tol) {
            Some(Verdict::Stalled)
        } else if n >= max_iters {
            Some(Verdict::BudgetExhausted)
        } else {
            None
        };
        if let Some(verdict) = verdict {
            return Ok(DiagonalRun {
                trace,
                verdict,
                grid: f,
            });
        }
        f = push_unchecked(&f);
    }
}

/// Level at which `sup|H_n|` settles when iterating from the exact product.
///
/// The product is a fixed point of the exact operator, so whatever deviation
/// the discrete operator accumulates from it is pure quadrature error.
pub fn quadrature_floor(r: u32, k: usize) -> Result<f64> {
    let mut f = BivariateGrid::product(r, k)?;
    let mut floor: f64 = 0.0;
    let mut prev = 0.0;
    for _ in 0..FLOOR_ITERS {
        f = push_unchecked(&f);
        let s = h_from_f(&f)?.sup_abs();
        floor = floor.max(s);
        if (s - prev).abs() <= 1e-6 * s {
            break;
        }
        prev = s;
    }
    Ok(floor)
}
