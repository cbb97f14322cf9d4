//! One-dimensional laws on the extended state space.
//!
//! Three representations share one interface: closed-form families (the
//! frozen-percolation solutions `ν_a`, `ν^r`, Bernoulli and point masses),
//! empirical sample sets, and piecewise-linear grid CDFs. Every law may carry
//! an atom at `∞`; [`MarginalDist::cdf_eval`] at a finite `x` never includes it.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{argument, domain, validation, Error, Result};
use crate::value::{ExtendedValue, Finite, Infinity};

/// Slack allowed when checking that a point lies in a closed support interval.
pub const DOMAIN_TOL: f64 = 1e-12;

/// Default knot count for grid CDFs.
pub const DEFAULT_GRID_KNOTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "family",
    content = "params",
    rename_all = "snake_case",
    try_from = "ClosedFormRepr"
)]
pub enum ClosedForm {
    /// `ν_a(dx) = dx/(2x²)` on `(1/2, a)`, atom `1/(2a)` at `∞`; `a ∈ [1/2, 1]`.
    NuA { a: f64 },
    /// Full-support solution on the `r`-regular tree, supported on `[1/(r−1), 1] ∪ {∞}`.
    NuR { r: u32 },
    /// Bernoulli on `{0, 1}` with `P(1) = p`.
    Bernoulli { p: f64 },
    /// Dirac mass.
    Point { x: ExtendedValue },
}

#[derive(Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
enum ClosedFormRepr {
    NuA { a: f64 },
    NuR { r: u32 },
    Bernoulli { p: f64 },
    Point { x: ExtendedValue },
}

impl TryFrom<ClosedFormRepr> for ClosedForm {
    type Error = Error;
    fn try_from(r: ClosedFormRepr) -> Result<Self> {
        match r {
            ClosedFormRepr::NuA { a } => ClosedForm::nu_a(a),
            ClosedFormRepr::NuR { r } => ClosedForm::nu_r(r),
            ClosedFormRepr::Bernoulli { p } => ClosedForm::bernoulli(p),
            ClosedFormRepr::Point { x } => Ok(ClosedForm::Point { x }),
        }
    }
}

impl ClosedForm {
    pub fn nu_a(a: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&a) {
            return domain(format!("nu_a requires a in [1/2, 1], got {a}"));
        }
        Ok(ClosedForm::NuA { a })
    }

    pub fn nu_r(r: u32) -> Result<Self> {
        if r < 3 {
            return domain(format!("nu_r requires tree degree r >= 3, got {r}"));
        }
        Ok(ClosedForm::NuR { r })
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("bernoulli requires p in [0, 1], got {p}"));
        }
        Ok(ClosedForm::Bernoulli { p })
    }
}

/// Lower end of the finite support of the frozen-percolation state space on
/// the `r`-regular tree.
pub fn frozen_lo(r: u32) -> f64 {
    1.0 / (r as f64 - 1.0)
}

/// Survival `P(Y > y)` of `ν^r` for `y ∈ [1/(r−1), 1]`.
///
/// The `r = 3` branch uses the same expression as `ν_1` so both paths agree
/// bit for bit.
pub fn nu_r_survival(r: u32, y: f64) -> f64 {
    if r == 3 {
        1.0 / (2.0 * y)
    } else {
        let rf = r as f64;
        ((rf - 1.0) * y).powf(-1.0 / (rf - 2.0))
    }
}

/// `P(Y = ∞)` under `ν^r`: `(r−1)^(−1/(r−2))`.
pub fn nu_r_atom(r: u32) -> f64 {
    nu_r_survival(r, 1.0)
}

/// Sorted sample set. Finite values are kept sorted; `∞` draws are counted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Empirical {
    finite: Vec<f64>,
    n_inf: usize,
}

impl Empirical {
    pub fn from_values<I: IntoIterator<Item = ExtendedValue>>(values: I) -> Result<Self> {
        let mut finite = Vec::new();
        let mut n_inf = 0;
        for v in values {
            match v {
                Finite(x) if x.is_nan() => return argument("NaN sample"),
                Finite(x) => finite.push(x),
                Infinity => n_inf += 1,
            }
        }
        finite.sort_unstable_by(f64::total_cmp);
        Ok(Empirical { finite, n_inf })
    }

    pub fn len(&self) -> usize {
        self.finite.len() + self.n_inf
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn finite_values(&self) -> &[f64] {
        &self.finite
    }

    pub fn inf_count(&self) -> usize {
        self.n_inf
    }

    pub fn inf_fraction(&self) -> f64 {
        self.n_inf as f64 / self.len() as f64
    }

    /// Values in ascending order, `∞` last.
    pub fn values(&self) -> impl Iterator<Item = ExtendedValue> + '_ {
        self.finite
            .iter()
            .map(|&x| Finite(x))
            .chain(std::iter::repeat_n(Infinity, self.n_inf))
    }

    fn count_le(&self, x: f64) -> usize {
        self.finite.partition_point(|&v| v <= x)
    }

    fn count_lt(&self, x: f64) -> usize {
        self.finite.partition_point(|&v| v < x)
    }
}

impl Serialize for Empirical {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            samples: &'a [ExtendedValue],
        }
        let samples: Vec<ExtendedValue> = self.values().collect();
        Repr { samples: &samples }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Empirical {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Repr {
            samples: Vec<ExtendedValue>,
        }
        let r = Repr::deserialize(d)?;
        Empirical::from_values(r.samples).map_err(serde::de::Error::custom)
    }
}

/// Piecewise-linear CDF on increasing knots plus an atom at `∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridCdfRepr", deny_unknown_fields)]
pub struct GridCdf {
    knots: Vec<f64>,
    cdf: Vec<f64>,
    atom_inf: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridCdfRepr {
    knots: Vec<f64>,
    cdf: Vec<f64>,
    atom_inf: f64,
}

impl TryFrom<GridCdfRepr> for GridCdf {
    type Error = Error;
    fn try_from(r: GridCdfRepr) -> Result<Self> {
        GridCdf::new(r.knots, r.cdf, r.atom_inf)
    }
}

/// Tolerance on `cdf(last knot) + atom = 1` for grid CDFs.
pub const GRID_MASS_TOL: f64 = 1e-12;

impl GridCdf {
    pub fn new(knots: Vec<f64>, cdf: Vec<f64>, atom_inf: f64) -> Result<Self> {
        if knots.len() < 2 || knots.len() != cdf.len() {
            return validation(format!(
                "grid needs >= 2 knots and matching cdf values (got {} knots, {} values)",
                knots.len(),
                cdf.len()
            ));
        }
        if knots
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less))
        {
            return validation("grid knots must be strictly increasing");
        }
        if cdf.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return validation("grid cdf values must lie in [0, 1]");
        }
        if let Some(i) = cdf.windows(2).position(|w| w[1] < w[0]) {
            return validation(format!("grid cdf decreases after knot {i}"));
        }
        let total = cdf[cdf.len() - 1] + atom_inf;
        if !(0.0..=1.0).contains(&atom_inf) || (total - 1.0).abs() > GRID_MASS_TOL {
            return validation(format!("grid mass is {total}, expected 1"));
        }
        Ok(GridCdf { knots, cdf, atom_inf })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn cdf_values(&self) -> &[f64] {
        &self.cdf
    }

    pub fn atom_inf(&self) -> f64 {
        self.atom_inf
    }

    fn interp(&self, x: f64) -> f64 {
        let k = &self.knots;
        if x <= k[0] {
            return if x < k[0] { 0.0 } else { self.cdf[0] };
        }
        if x >= k[k.len() - 1] {
            return self.cdf[k.len() - 1];
        }
        let j = k.partition_point(|&v| v <= x) - 1;
        let t = (x - k[j]) / (k[j + 1] - k[j]);
        self.cdf[j] + t * (self.cdf[j + 1] - self.cdf[j])
    }
}

/// A one-dimensional law on the extended state space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MarginalDist {
    ClosedForm(ClosedForm),
    Grid(GridCdf),
    Empirical(Empirical),
}

impl From<ClosedForm> for MarginalDist {
    fn from(c: ClosedForm) -> Self {
        MarginalDist::ClosedForm(c)
    }
}

impl MarginalDist {
    pub fn nu_a(a: f64) -> Result<Self> {
        ClosedForm::nu_a(a).map(Into::into)
    }

    pub fn nu_r(r: u32) -> Result<Self> {
        ClosedForm::nu_r(r).map(Into::into)
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        ClosedForm::bernoulli(p).map(Into::into)
    }

    pub fn point(x: ExtendedValue) -> Self {
        ClosedForm::Point { x }.into()
    }

    pub fn empirical(samples: Empirical) -> Result<Self> {
        if samples.is_empty() {
            return argument("empirical distribution needs at least one sample");
        }
        Ok(MarginalDist::Empirical(samples))
    }

    /// `[lo, hi]` range of the finite part of the support, or `None` when
    /// all mass sits at `∞`.
    pub fn finite_support(&self) -> Option<(f64, f64)> {
        match self {
            MarginalDist::ClosedForm(c) => match *c {
                ClosedForm::NuA { a } => (a > 0.5).then_some((0.5, a)),
                ClosedForm::NuR { r } => Some((frozen_lo(r), 1.0)),
                ClosedForm::Bernoulli { p } => Some(match p {
                    0.0 => (0.0, 0.0),
                    1.0 => (1.0, 1.0),
                    _ => (0.0, 1.0),
                }),
                ClosedForm::Point { x } => x.finite().map(|v| (v, v)),
            },
            MarginalDist::Empirical(e) => {
                let f = e.finite_values();
                (!f.is_empty()).then(|| (f[0], f[f.len() - 1]))
            }
            MarginalDist::Grid(g) => {
                let k = g.knots();
                (g.atom_inf < 1.0).then(|| (k[0], k[k.len() - 1]))
            }
        }
    }

    /// Closed interval of finite points at which `cdf_eval` is defined.
    fn domain(&self) -> Option<(f64, f64)> {
        match self {
            MarginalDist::ClosedForm(ClosedForm::NuA { .. }) => Some((0.5, 1.0)),
            MarginalDist::ClosedForm(ClosedForm::NuR { r }) => Some((frozen_lo(*r), 1.0)),
            MarginalDist::Grid(g) => Some((g.knots[0], g.knots[g.knots.len() - 1])),
            _ => None,
        }
    }

    /// Mass of the atom at `∞`.
    pub fn atom_at_infinity(&self) -> f64 {
        match self {
            MarginalDist::ClosedForm(c) => match *c {
                ClosedForm::NuA { a } => 1.0 / (2.0 * a),
                ClosedForm::NuR { r } => nu_r_atom(r),
                ClosedForm::Bernoulli { .. } => 0.0,
                ClosedForm::Point { x } => {
                    if x.is_infinite() {
                        1.0
                    } else {
                        0.0
                    }
                }
            },
            MarginalDist::Empirical(e) => e.inf_fraction(),
            MarginalDist::Grid(g) => g.atom_inf,
        }
    }

    /// `P(Y ≤ x)`.
    pub fn cdf_eval(&self, x: ExtendedValue) -> Result<f64> {
        match x {
            Infinity => Ok(1.0),
            Finite(v) => {
                if v.is_nan() {
                    return domain("cdf evaluated at NaN");
                }
                if let Some((lo, hi)) = self.domain() {
                    if v < lo - DOMAIN_TOL || v > hi + DOMAIN_TOL {
                        return domain(format!("x = {v} outside support [{lo}, {hi}]"));
                    }
                }
                Ok(self.cdf_raw(v))
            }
        }
    }

    /// `P(Y > x)`, including the atom at `∞`.
    pub fn survival(&self, x: ExtendedValue) -> Result<f64> {
        Ok(1.0 - self.cdf_eval(x)?)
    }

    /// Total CDF on the reals: 0 below the support, finite mass above it.
    pub(crate) fn cdf_raw(&self, x: f64) -> f64 {
        match self {
            MarginalDist::ClosedForm(c) => match *c {
                ClosedForm::NuA { a } => {
                    if x <= 0.5 {
                        0.0
                    } else {
                        1.0 - 1.0 / (2.0 * x.min(a))
                    }
                }
                ClosedForm::NuR { r } => {
                    if x <= frozen_lo(r) {
                        0.0
                    } else {
                        1.0 - nu_r_survival(r, x.min(1.0))
                    }
                }
                ClosedForm::Bernoulli { p } => {
                    if x < 0.0 {
                        0.0
                    } else if x < 1.0 {
                        1.0 - p
                    } else {
                        1.0
                    }
                }
                ClosedForm::Point { x: v } => match v {
                    Finite(v) if x >= v => 1.0,
                    _ => 0.0,
                },
            },
            MarginalDist::Empirical(e) => e.count_le(x) as f64 / e.len() as f64,
            MarginalDist::Grid(g) => g.interp(x),
        }
    }

    /// Left limit `P(Y < x)` for finite `x`.
    fn cdf_left_raw(&self, x: f64) -> f64 {
        match self {
            MarginalDist::ClosedForm(c) => match *c {
                ClosedForm::Bernoulli { p } => {
                    if x <= 0.0 {
                        0.0
                    } else if x <= 1.0 {
                        1.0 - p
                    } else {
                        1.0
                    }
                }
                ClosedForm::Point { x: v } => match v {
                    Finite(v) if x > v => 1.0,
                    _ => 0.0,
                },
                _ => self.cdf_raw(x),
            },
            MarginalDist::Empirical(e) => e.count_lt(x) as f64 / e.len() as f64,
            MarginalDist::Grid(g) => {
                if x <= g.knots[0] {
                    0.0
                } else {
                    g.interp(x)
                }
            }
        }
    }

    /// Finite points where the CDF jumps.
    fn jump_points(&self) -> Vec<f64> {
        match self {
            MarginalDist::ClosedForm(ClosedForm::Bernoulli { .. }) => vec![0.0, 1.0],
            MarginalDist::ClosedForm(ClosedForm::Point { x: Finite(v) }) => vec![*v],
            MarginalDist::Empirical(e) => {
                let mut v = e.finite_values().to_vec();
                v.dedup();
                v
            }
            MarginalDist::Grid(g) if g.cdf[0] > 0.0 => vec![g.knots[0]],
            _ => Vec::new(),
        }
    }

    /// Generalized inverse of the CDF.
    ///
    /// Returns the smallest `x` with `cdf_eval(x) ≥ p`, except that a level
    /// equal to the total finite mass maps to `∞` whenever the law has an
    /// atom there: the finite branch is taken only for `p` strictly below
    /// the finite mass.
    pub fn quantile(&self, p: f64) -> Result<ExtendedValue> {
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("quantile level {p} outside [0, 1]"));
        }
        Ok(self.quantile_unchecked(p))
    }

    fn quantile_unchecked(&self, p: f64) -> ExtendedValue {
        match self {
            MarginalDist::ClosedForm(c) => match *c {
                ClosedForm::NuA { a } => {
                    if p < 1.0 - 1.0 / (2.0 * a) {
                        Finite(1.0 / (2.0 * (1.0 - p)))
                    } else {
                        Infinity
                    }
                }
                ClosedForm::NuR { r } => {
                    if p < 1.0 - nu_r_atom(r) {
                        if r == 3 {
                            Finite(1.0 / (2.0 * (1.0 - p)))
                        } else {
                            let rf = r as f64;
                            Finite((1.0 - p).powf(-(rf - 2.0)) / (rf - 1.0))
                        }
                    } else {
                        Infinity
                    }
                }
                ClosedForm::Bernoulli { p: q } => {
                    if p <= 1.0 - q && q < 1.0 {
                        Finite(0.0)
                    } else {
                        Finite(1.0)
                    }
                }
                ClosedForm::Point { x } => x,
            },
            MarginalDist::Empirical(e) => {
                let n = e.len();
                let i = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
                e.finite.get(i).map_or(Infinity, |&x| Finite(x))
            }
            MarginalDist::Grid(g) => {
                let last = g.cdf.len() - 1;
                let finite_mass = g.cdf[last];
                if p > finite_mass || (p == finite_mass && g.atom_inf > 0.0) {
                    return Infinity;
                }
                if p <= g.cdf[0] {
                    return Finite(g.knots[0]);
                }
                // first knot with cdf >= p; its predecessor has cdf < p
                let j = g.cdf.partition_point(|&c| c < p);
                let (c0, c1) = (g.cdf[j - 1], g.cdf[j]);
                let t = (p - c0) / (c1 - c0);
                Finite(g.knots[j - 1] + t * (g.knots[j] - g.knots[j - 1]))
            }
        }
    }

    /// Inverse-CDF draw: `quantile(U)` for one uniform `U ∈ [0, 1)` from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ExtendedValue {
        let u: f64 = rng.random();
        self.quantile_unchecked(u)
    }

    /// [`Self::sample`] with `∞` as `f64::INFINITY`; same draw, same value.
    #[inline]
    pub(crate) fn sample_f64<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        match self {
            MarginalDist::ClosedForm(ClosedForm::NuA { a }) => {
                if u < 1.0 - 1.0 / (2.0 * a) {
                    1.0 / (2.0 * (1.0 - u))
                } else {
                    f64::INFINITY
                }
            }
            _ => self.quantile_unchecked(u).to_f64(),
        }
    }
}

/// Kolmogorov distance between an empirical law and `target`.
///
/// The supremum of `|F_n − F|` is taken over the finite line (checked at every
/// jump point of either CDF, from both sides); the atoms at `∞` are compared
/// separately and the larger discrepancy is returned.
pub fn ks_distance(samples: &Empirical, target: &MarginalDist) -> Result<f64> {
    if samples.is_empty() {
        return argument("ks_distance needs a nonempty sample");
    }
    let n = samples.len() as f64;
    let mut points: Vec<f64> = samples.finite_values().to_vec();
    points.extend(target.jump_points());
    points.sort_unstable_by(f64::total_cmp);
    points.dedup();

    let mut d = (samples.inf_fraction() - target.atom_at_infinity()).abs();
    for &c in &points {
        let at = samples.count_le(c) as f64 / n - target.cdf_raw(c);
        let left = samples.count_lt(c) as f64 / n - target.cdf_left_raw(c);
        d = d.max(at.abs()).max(left.abs());
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    /// Yields a fixed `u64` so `rng.random::<f64>()` equals a chosen dyadic.
    struct ConstRng(u64);

    impl ConstRng {
        fn uniform(u: f64) -> Self {
            // rand maps a u64 to [0, 1) through its top 53 bits
            ConstRng(((u * (1u64 << 53) as f64) as u64) << 11)
        }
    }

    impl RngCore for ConstRng {
        fn next_u32(&mut self) -> u32 {
            (self.0 >> 32) as u32
        }
        fn next_u64(&mut self) -> u64 {
            self.0
        }
        fn fill_bytes(&mut self, dst: &mut [u8]) {
            dst.fill(0)
        }
    }

    fn nu1() -> MarginalDist {
        MarginalDist::nu_a(1.0).unwrap()
    }

    /// Composite Simpson on [lo, x]; oracle for the closed-form CDFs.
    fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
        let h = (hi - lo) / n as f64;
        let mut s = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(lo + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn cdf_examples() {
        let d = nu1();
        assert_eq!(d.cdf_eval(Finite(0.5)).unwrap(), 0.0);
        assert_eq!(d.cdf_eval(Infinity).unwrap(), 1.0);
        let oracle = simpson(|x| 1.0 / (2.0 * x * x), 0.5, 0.75, 2000);
        assert!((oracle - 1.0 / 3.0).abs() < 1e-12);
        assert!((d.cdf_eval(Finite(0.75)).unwrap() - oracle).abs() < 1e-12);

        let nu4 = MarginalDist::nu_r(4).unwrap();
        let dens = |y: f64| 1.0 / (2.0 * 3f64.powf(0.5) * y.powf(1.5));
        let oracle = simpson(dens, 1.0 / 3.0, 1.0, 4000);
        assert!((oracle - (1.0 - 3f64.powf(-0.5))).abs() < 1e-10);
        assert!((nu4.cdf_eval(Finite(1.0)).unwrap() - 0.422650).abs() < 1e-6);
        assert!((nu4.cdf_eval(Finite(1.0)).unwrap() - oracle).abs() < 1e-10);
    }

    #[test]
    fn cdf_rejects_points_below_support() {
        assert!(matches!(nu1().cdf_eval(Finite(0.4)), Err(Error::Domain(_))));
        assert!(nu1().cdf_eval(Finite(0.5 - 1e-14)).is_ok());
        let nu4 = MarginalDist::nu_r(4).unwrap();
        assert!(nu4.cdf_eval(Finite(0.34)).is_ok());
        assert!(nu4.cdf_eval(Finite(0.3)).is_err());
    }

    #[test]
    fn survival_examples() {
        let d = nu1();
        assert_eq!(d.survival(Finite(0.5)).unwrap(), 1.0);
        assert!((d.survival(Finite(0.75)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.survival(Finite(1.0)).unwrap(), 0.5);
        assert_eq!(d.survival(Infinity).unwrap(), 0.0);
    }

    #[test]
    fn nu_a_flat_beyond_a() {
        let d = MarginalDist::nu_a(0.8).unwrap();
        let c = 1.0 - 1.0 / 1.6;
        assert!((d.cdf_eval(Finite(0.9)).unwrap() - c).abs() < 1e-15);
        assert!((d.atom_at_infinity() - 1.0 / 1.6).abs() < 1e-15);
        assert_eq!(d.quantile(0.5).unwrap(), Infinity);
    }

    #[test]
    fn quantile_examples() {
        let d = nu1();
        assert_eq!(d.quantile(0.0).unwrap(), Finite(0.5));
        let q = d.quantile(0.25).unwrap().finite().unwrap();
        assert!((q - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.cdf_eval(Finite(q)).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(d.quantile(0.5).unwrap(), Infinity);
        assert!(matches!(d.quantile(1.5), Err(Error::Domain(_))));
        assert!(d.quantile(-0.1).is_err());
    }

    #[test]
    fn sample_through_forced_uniform() {
        let d = nu1();
        let s = d.sample(&mut ConstRng::uniform(0.25));
        assert!((s.finite().unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.sample(&mut ConstRng::uniform(0.75)), Infinity);
        assert_eq!(d.sample(&mut ConstRng::uniform(0.0)), Finite(0.5));
    }

    #[test]
    fn bernoulli_laws() {
        let b = MarginalDist::bernoulli(0.3).unwrap();
        assert!((b.cdf_eval(Finite(0.0)).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(b.cdf_eval(Finite(1.0)).unwrap(), 1.0);
        assert_eq!(b.quantile(0.7).unwrap(), Finite(0.0));
        assert_eq!(b.quantile(0.71).unwrap(), Finite(1.0));
        assert_eq!(b.atom_at_infinity(), 0.0);
    }

    #[test]
    fn ks_examples() {
        let d = nu1();
        let all_inf = Empirical::from_values(vec![Infinity; 10]).unwrap();
        assert!((ks_distance(&all_inf, &d).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            ks_distance(&Empirical::default(), &d),
            Err(Error::Argument(_))
        ));

        let m = 1000;
        let aligned =
            Empirical::from_values((1..=m).map(|i| d.quantile((i as f64 - 0.5) / m as f64).unwrap())).unwrap();
        assert!(ks_distance(&aligned, &d).unwrap() <= 0.5 / m as f64 + 1e-12);
    }

    #[test]
    fn ks_against_discrete_target_checks_target_jumps() {
        // Bernoulli(1/2) vs all samples = 1: gap 1/2 at the jump at 0
        let b = MarginalDist::bernoulli(0.5).unwrap();
        let ones = Empirical::from_values(vec![Finite(1.0); 4]).unwrap();
        assert!((ks_distance(&ones, &b).unwrap() - 0.5).abs() < 1e-15);
        let half = Empirical::from_values(vec![Finite(0.0), Finite(1.0)]).unwrap();
        assert!(ks_distance(&half, &b).unwrap() < 1e-15);
    }

    #[test]
    fn point_mass_vs_nu1() {
        let d = nu1();
        let at_lo = Empirical::from_values([Finite(0.5)]).unwrap();
        assert!((ks_distance(&at_lo, &d).unwrap() - 1.0).abs() < 1e-15);
        let at_inf = Empirical::from_values([Infinity]).unwrap();
        assert!((ks_distance(&at_inf, &d).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_validation_and_interpolation() {
        assert!(GridCdf::new(vec![0.5, 1.0], vec![0.2, 0.1], 0.9).is_err());
        assert!(GridCdf::new(vec![0.5, 1.0], vec![0.0, 0.5], 0.4).is_err());
        let g = GridCdf::new(vec![0.5, 0.75, 1.0], vec![0.0, 0.25, 0.5], 0.5).unwrap();
        let d = MarginalDist::Grid(g);
        assert!((d.cdf_eval(Finite(0.625)).unwrap() - 0.125).abs() < 1e-15);
        assert!((d.quantile(0.125).unwrap().finite().unwrap() - 0.625).abs() < 1e-15);
        assert_eq!(d.quantile(0.5).unwrap(), Infinity);
        assert!(d.cdf_eval(Finite(0.4)).is_err());
    }

    #[test]
    fn json_shapes() {
        let j = serde_json::to_value(nu1()).unwrap();
        assert_eq!(j, serde_json::json!({"family": "nu_a", "params": {"a": 1.0}}));
        let j = serde_json::to_value(MarginalDist::nu_r(4).unwrap()).unwrap();
        assert_eq!(j, serde_json::json!({"family": "nu_r", "params": {"r": 4}}));
        let g = GridCdf::new(vec![0.5, 1.0], vec![0.0, 0.5], 0.5).unwrap();
        let j = serde_json::to_value(MarginalDist::Grid(g.clone())).unwrap();
        assert_eq!(
            j,
            serde_json::json!({"knots": [0.5, 1.0], "cdf": [0.0, 0.5], "atom_inf": 0.5})
        );
        let back: MarginalDist = serde_json::from_value(j).unwrap();
        assert_eq!(back, MarginalDist::Grid(g));
        let p = serde_json::to_value(MarginalDist::point(Infinity)).unwrap();
        assert_eq!(p, serde_json::json!({"family": "point", "params": {"x": "inf"}}));
        let bad: std::result::Result<MarginalDist, _> =
            serde_json::from_value(serde_json::json!({"family": "nu_a", "params": {"a": 3.0}}));
        assert!(bad.is_err());
    }
}
