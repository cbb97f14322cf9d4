//! Closed-form contraction certificate for the `r = 3` integral equation.
//!
//! `[1/2, 1]` is cut into `k` cells of equal length. On each product cell the
//! bound is `∫∫ du dv/(u²v²) + 2∫ du/u² + 2∫ dv/v²`, evaluated with the exact
//! antiderivative `∫_a^b du/u² = 1/a − 1/b`.

use serde::Serialize;

use crate::error::{domain, Result};

/// Upper end of the meaningful `ε` range for the certificate.
pub const CONTRACTION_LIMIT: f64 = 1.0 / 3.0;

/// Largest `k` tried by [`find_min_partition`].
pub const MAX_CELLS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionBound {
    pub cells: usize,
    /// Maximum cell bound.
    pub bound: f64,
    /// Row and column of the cell attaining it.
    pub worst_cell: (usize, usize),
    /// Set when `ε` lies outside `(0, 1/3)`, where the bound certifies nothing.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub outside_certificate_range: bool,
}

fn edges(k: usize) -> Vec<f64> {
    (0..=k).map(|i| 0.5 + i as f64 / (2 * k) as f64).collect()
}

/// Maximum over all `k × k` cells of the cell bound.
pub fn partition_check(k_cells: usize) -> Result<PartitionBound> {
    if k_cells == 0 {
        return domain("partition needs at least one cell");
    }
    let a = edges(k_cells);
    let d: Vec<f64> = a.windows(2).map(|w| 1.0 / w[0] - 1.0 / w[1]).collect();
    let mut best = PartitionBound {
        cells: k_cells,
        bound: f64::NEG_INFINITY,
        worst_cell: (0, 0),
        outside_certificate_range: false,
    };
    for (i, &di) in d.iter().enumerate() {
        for (j, &dj) in d.iter().enumerate() {
            let b = di * dj + 2.0 * di + 2.0 * dj;
            if b > best.bound {
                best.bound = b;
                best.worst_cell = (i, j);
            }
        }
    }
    Ok(best)
}

/// Least `k` whose maximum cell bound is below `eps`.
///
/// `eps` must be positive. Values at or above `1/3` are accepted but flagged,
/// since they no longer give a contraction.
pub fn find_min_partition(eps: f64) -> Result<PartitionBound> {
    if !(eps > 0.0 && eps.is_finite()) {
        return domain(format!("eps must be positive, got {eps}"));
    }
    for k in 1..=MAX_CELLS {
        let mut b = partition_check(k)?;
        if b.bound < eps {
            b.outside_certificate_range = eps >= CONTRACTION_LIMIT;
            return Ok(b);
        }
    }
    domain(format!(
        "no partition with at most {MAX_CELLS} cells reaches eps = {eps}"
    ))
}
