//! Bivariate grids and the second-kind operator `T⊗T`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{cumtrapz, ipow, Lattice};
use crate::dist::{frozen_lo, nu_r_survival};
use crate::error::{argument, validation, Result};

/// Slack for the marginal pre-check of [`tt_push`].
pub const MARGINAL_TOL: f64 = 1e-6;

/// Slack for range and monotonicity checks on stored grids.
const VALUE_TOL: f64 = 1e-12;

/// How the values of a [`BivariateGrid`] are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    /// Joint CDF `P(X ≤ x, Y ≤ y)`.
    F,
    /// Joint survival `P(X > x, Y > y)`.
    G,
    /// Deviation `1 − G/G₀` from the product survival `G₀`.
    H,
}

/// `k × k` field on `[lo, 1]²`, row-major with the first coordinate as row.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateGrid {
    r: u32,
    lattice: Lattice,
    role: Role,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    k: usize,
    r: u32,
    role: Role,
}

fn marginal_survival(r: u32, x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| nu_r_survival(r, v)).collect()
}

impl BivariateGrid {
    pub fn new(r: u32, k: usize, role: Role, values: Vec<f64>) -> Result<Self> {
        let lattice = Lattice::for_degree(r, k)?;
        if values.len() != k * k {
            return validation(format!("grid needs {} values, got {}", k * k, values.len()));
        }
        let g = BivariateGrid {
            r,
            lattice,
            role,
            values,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let k = self.k();
        let (lo, hi) = match self.role {
            Role::F | Role::G => (0.0, 1.0),
            Role::H => (-1.0, 1.0),
        };
        if let Some(p) = self
            .values
            .iter()
            .position(|v| !(lo - VALUE_TOL..=hi + VALUE_TOL).contains(v))
        {
            return validation(format!(
                "{:?} value {} at knot ({}, {}) outside [{lo}, {hi}]",
                self.role,
                self.values[p],
                p / k,
                p % k
            ));
        }
        let sign = match self.role {
            Role::F => 1.0,
            Role::G => -1.0,
            Role::H => return Ok(()),
        };
        for i in 0..k {
            for j in 0..k {
                let v = sign * self.get(i, j);
                let down = i + 1 < k && sign * self.get(i + 1, j) < v - VALUE_TOL;
                let right = j + 1 < k && sign * self.get(i, j + 1) < v - VALUE_TOL;
                if down || right {
                    return validation(format!("{:?} grid is not monotone at knot ({i}, {j})", self.role));
                }
            }
        }
        Ok(())
    }

    /// CDF of the product coupling `ν_r ⊗ ν_r`.
    pub fn product(r: u32, k: usize) -> Result<Self> {
        let lattice = Lattice::for_degree(r, k)?;
        let s = marginal_survival(r, &lattice.knots());
        let mut values = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                values.push((1.0 - s[i]) * (1.0 - s[j]));
            }
        }
        Ok(BivariateGrid {
            r,
            lattice,
            role: Role::F,
            values,
        })
    }

    /// CDF of the diagonal coupling `(X, X)` with `X ~ ν_r`.
    pub fn diagonal(r: u32, k: usize) -> Result<Self> {
        let lattice = Lattice::for_degree(r, k)?;
        let s = marginal_survival(r, &lattice.knots());
        let mut values = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                values.push(1.0 - s[i.min(j)]);
            }
        }
        Ok(BivariateGrid {
            r,
            lattice,
            role: Role::F,
            values,
        })
    }

    pub fn k(&self) -> usize {
        self.lattice.len()
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn knots(&self) -> Vec<f64> {
        self.lattice.knots()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.k() + j]
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |v(i, j) − v(j, i)|`.
    pub fn asymmetry(&self) -> f64 {
        let k = self.k();
        let mut m: f64 = 0.0;
        for i in 0..k {
            for j in 0..i {
                m = m.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        m
    }

    /// Bilinear interpolation at `(x, y) ∈ [lo, 1]²`.
    pub fn interp(&self, x: f64, y: f64) -> f64 {
        let (i, s) = self.locate(x);
        let (j, t) = self.locate(y);
        let v00 = self.get(i, j);
        let v01 = self.get(i, j + 1);
        let v10 = self.get(i + 1, j);
        let v11 = self.get(i + 1, j + 1);
        (1.0 - s) * ((1.0 - t) * v00 + t * v01) + s * ((1.0 - t) * v10 + t * v11)
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let k = self.k();
        let lat = self.lattice;
        let pos = ((x - lat.lo()) / lat.step()).clamp(0.0, (k - 1) as f64);
        let i = (pos.floor() as usize).min(k - 2);
        let (a, b) = (lat.knot(i), lat.knot(i + 1));
        (i, ((x - a) / (b - a)).clamp(0.0, 1.0))
    }

    /// Portable text form: one JSON header line, then `k` CSV rows.
    pub fn to_portable(&self) -> String {
        let header = Header {
            k: self.k(),
            r: self.r,
            role: self.role,
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for row in self.values.chunks(self.k()) {
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                write!(out, "{v:?}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_portable(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header: Header = serde_json::from_str(lines.next().unwrap_or_default())?;
        let mut values = Vec::with_capacity(header.k * header.k);
        for (n, line) in lines.enumerate() {
            for cell in line.split(',') {
                let v = cell
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| crate::Error::Validation(format!("grid row {}: {e}", n + 1)))?;
                values.push(v);
            }
        }
        BivariateGrid::new(header.r, header.k, header.role, values)
    }

    fn require(&self, role: Role) -> Result<()> {
        if self.role != role {
            return argument(format!("expected a {role:?} grid, got {:?}", self.role));
        }
        Ok(())
    }

    /// Checks that the CDF is compatible with `ν_r` marginals.
    ///
    /// The grid stops at 1 and so cannot show the marginals themselves; what it
    /// can show is `F(lo, ·) = F(·, lo) = 0` and the Fréchet bounds
    /// `max(0, F(x) + F(y) − 1) ≤ F(x, y) ≤ min(F(x), F(y))` with `F = 1 − S`.
    pub fn check_marginals(&self, tol: f64) -> Result<()> {
        self.require(Role::F)?;
        let k = self.k();
        let fm: Vec<f64> = marginal_survival(self.r, &self.knots())
            .iter()
            .map(|s| 1.0 - s)
            .collect();
        let mut worst = (0.0, 0, 0);
        for i in 0..k {
            for j in 0..k {
                let v = self.get(i, j);
                let lower = (fm[i] + fm[j] - 1.0).max(0.0);
                let upper = fm[i].min(fm[j]);
                let excess = (lower - v).max(v - upper);
                if excess > worst.0 {
                    worst = (excess, i, j);
                }
            }
        }
        let (excess, i, j) = worst;
        if excess > tol {
            let x = self.lattice.knot(i);
            let y = self.lattice.knot(j);
            return validation(format!(
                "F is off the nu_r marginals by {excess:.3e} at knot ({i}, {j}) = ({x}, {y})"
            ));
        }
        Ok(())
    }
}

/// Joint survival `P(X > x, Y > y)` of an F grid with `ν_r` marginals, at any
/// point of the plane.
pub fn g_from_f(f: &BivariateGrid, x: f64, y: f64) -> Result<f64> {
    f.require(Role::F)?;
    let r = f.r;
    let lo = frozen_lo(r);
    let (x, y) = (x.min(1.0), y.min(1.0));
    let s = |v: f64| nu_r_survival(r, v);
    Ok(match (x <= lo, y <= lo) {
        (true, true) => 1.0,
        (true, false) => s(y),
        (false, true) => s(x),
        (false, false) => f.interp(x, y) + s(x) + s(y) - 1.0,
    })
}

/// Deviation field `H = 1 − G/(S(x)S(y))` at the knots.
pub fn h_from_f(f: &BivariateGrid) -> Result<BivariateGrid> {
    f.require(Role::F)?;
    let k = f.k();
    let s = marginal_survival(f.r, &f.knots());
    let mut values = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let g = f.get(i, j) + s[i] + s[j] - 1.0;
            values.push(1.0 - g / (s[i] * s[j]));
        }
    }
    Ok(BivariateGrid {
        r: f.r,
        lattice: f.lattice,
        role: Role::H,
        values,
    })
}

/// One application of the second-kind operator to a CDF with `ν_r` marginals.
pub fn tt_push(f: &BivariateGrid) -> Result<BivariateGrid> {
    f.check_marginals(MARGINAL_TOL)?;
    Ok(push_unchecked(f))
}

/// `F′(x,y) = ∫₀ˣ∫₀ʸ [W(x,y) − W(x,v) − W(u,y) + W(u,v)] dv du`, `W = G^(r−1)`.
///
/// With `sm = S^(r−1)` the parts below `lo` are closed-form, leaving
/// `lo² + lo·Cs(x) + lo·Cs(y) + P − x(lo·sm(x) + R) − y(lo·sm(y) + C) + xy·W`
/// where `Cs`, `R`, `C`, `P` are running integrals from `lo` of `sm`, `W` in
/// `v`, `W` in `u`, and `W` in both.
pub(crate) fn push_unchecked(f: &BivariateGrid) -> BivariateGrid {
    let k = f.k();
    let m = f.r - 1;
    let lo = f.lattice.lo();
    let x = f.knots();
    let s = marginal_survival(f.r, &x);
    let sm: Vec<f64> = s.iter().map(|&v| ipow(v, m)).collect();
    let cs = cumtrapz(&sm, &x);

    let mut w = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            let g = (f.values[i * k + j] + s[i] + s[j] - 1.0).clamp(0.0, 1.0);
            w[i * k + j] = ipow(g, m);
        }
    }
    let mut rr = vec![0.0; k * k];
    for i in 0..k {
        for j in 1..k {
            let d = 0.5 * (x[j] - x[j - 1]);
            rr[i * k + j] = rr[i * k + j - 1] + d * (w[i * k + j - 1] + w[i * k + j]);
        }
    }
    let mut cc = vec![0.0; k * k];
    let mut pp = vec![0.0; k * k];
    for i in 1..k {
        let d = 0.5 * (x[i] - x[i - 1]);
        for j in 0..k {
            cc[i * k + j] = cc[(i - 1) * k + j] + d * (w[(i - 1) * k + j] + w[i * k + j]);
            pp[i * k + j] = pp[(i - 1) * k + j] + d * (rr[(i - 1) * k + j] + rr[i * k + j]);
        }
    }
    let mut values = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            let n = i * k + j;
            let v =
                lo * lo + lo * cs[j] + lo * cs[i] + pp[n] - x[i] * (lo * sm[i] + rr[n]) - x[j] * (lo * sm[j] + cc[n])
                    + x[i] * x[j] * w[n];
            values[n] = v.clamp(0.0, 1.0);
        }
    }
    BivariateGrid {
        r: f.r,
        lattice: f.lattice,
        role: Role::F,
        values,
    }
}
