//! Univariate pushforward `T` on survival grids.

use super::{check_degree, cumtrapz, ipow, Lattice};
use crate::dist::{GridCdf, MarginalDist};
use crate::error::{validation, Result};

/// Survival function `P(X > x)` sampled at lattice knots; taken to be 1 below
/// the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalGrid {
    lattice: Lattice,
    values: Vec<f64>,
}

impl SurvivalGrid {
    pub fn new(lattice: Lattice, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return validation(format!(
                "survival grid has {} values for {} knots",
                values.len(),
                lattice.len()
            ));
        }
        if let Some(i) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return validation(format!("survival value {} at knot {i} outside [0, 1]", values[i]));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] > w[0]) {
            return validation(format!("survival increases after knot {i}"));
        }
        Ok(SurvivalGrid { lattice, values })
    }

    pub fn from_dist(dist: &MarginalDist, lattice: Lattice) -> Result<Self> {
        let values = lattice.knots().iter().map(|&x| 1.0 - dist.cdf_raw(x)).collect();
        SurvivalGrid::new(lattice, values)
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// CDF of `Φ(min of r−1 copies; U)` for copies with the given survival.
///
/// `F′(x) = ∫₀ˣ (W(u) − W(x)) du` with `W = G^(r−1)`, which on the lattice is
/// `lo + ∫_lo^x W − x·W(x)`. The result is nondecreasing for any valid input;
/// its mass above the last knot is assigned to `∞`.
pub fn t_push(survival: &SurvivalGrid, r: u32) -> Result<GridCdf> {
    check_degree(r)?;
    let lat = survival.lattice;
    let x = lat.knots();
    let w: Vec<f64> = survival.values.iter().map(|&g| ipow(g, r - 1)).collect();
    let cs = cumtrapz(&w, &x);
    // Exact increments are (x_i + h/2)(w_i − w_{i+1}) ≥ 0; the running max
    // only absorbs rounding where W is flat.
    let mut cdf = Vec::with_capacity(x.len());
    let mut floor = 0.0f64;
    for i in 0..x.len() {
        floor = floor.max((lat.lo() + cs[i] - x[i] * w[i]).clamp(0.0, 1.0));
        cdf.push(floor);
    }
    let atom = 1.0 - cdf[cdf.len() - 1];
    GridCdf::new(x, cdf, atom)
}

/// `sup_i |T(dist)(x_i) − dist(x_i)|` on the `k`-knot lattice for degree `r`.
pub fn fixed_point_residual(dist: &MarginalDist, r: u32, k: usize) -> Result<f64> {
    let lat = Lattice::for_degree(r, k)?;
    let out = t_push(&SurvivalGrid::from_dist(dist, lat)?, r)?;
    Ok(out
        .knots()
        .iter()
        .zip(out.cdf_values())
        .map(|(&x, &c)| (c - dist.cdf_raw(x)).abs())
        .fold(0.0, f64::max))
}
