//! Recursive distributional equations and depth-`n` recursive tree process
//! samplers.
//!
//! A sample of depth `n` is one realization of the truncated tree: boundary
//! values at generation `n`, one innovation per interior node, and `g`
//! applied bottom-up. The traversal is iterative and keeps only the current
//! root-to-leaf path (`O(depth · arity)` memory). Innovations are drawn in
//! pre-order (a node's innovation before any of its children); leaves are
//! drawn left to right.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{frozen_lo, ClosedForm, MarginalDist, DOMAIN_TOL};
use crate::error::{argument, Error, Result};
use crate::seed::{chunked, Purpose, Seed, StreamRng};
use crate::value::{ExtendedValue, Finite, Infinity};

/// Default cap on nodes in one sampled tree.
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 30;

/// `Φ(x; u)`: `x` when `x > u`, otherwise `∞`. Ties go to `∞`.
#[inline]
pub fn phi(x: ExtendedValue, u: f64) -> ExtendedValue {
    match x {
        Finite(v) if v > u => x,
        _ => Infinity,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum RdeKind {
    /// `Y = Φ(Y_1 ∧ … ∧ Y_{r−1}; U)` on the `r`-regular tree.
    FrozenPerc { r: u32 },
    /// `X = ξ + X_1 (mod 2)`, `ξ ~ Bernoulli(q)`.
    Mod2 { q: f64 },
    /// `X = U X_1 + (1−U) X_2 + 2U ln U + 2(1−U) ln(1−U) + 1` on the reals.
    Quicksort,
}

/// Where the values of an RDE live.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpace {
    /// `[lo, 1] ∪ {∞}`.
    Extended {
        lo: f64,
    },
    /// `{0, 1}`.
    Binary,
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdeSpec {
    kind: RdeKind,
    node_budget: u64,
}

/// Per-RDE kernel, monomorphized into the tree traversal.
///
/// Node values travel as `f64` with `∞` encoded as `f64::INFINITY`; no state
/// space here contains IEEE infinity as a genuine finite point, and the public
/// entry points convert back to [`ExtendedValue`].
trait Rule: Copy {
    fn arity(&self) -> usize;
    fn innovation<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
    /// `g(u; child(0), …, child(arity−1))`.
    fn combine(&self, u: f64, child: impl Fn(usize) -> f64) -> f64;
}

#[inline]
fn phi_f64(x: f64, u: f64) -> f64 {
    if x > u {
        x
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Copy)]
struct FrozenRule {
    arity: usize,
}

impl Rule for FrozenRule {
    fn arity(&self) -> usize {
        self.arity
    }
    #[inline]
    fn innovation<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.random()
    }
    #[inline]
    fn combine(&self, u: f64, child: impl Fn(usize) -> f64) -> f64 {
        let mut m = child(0).min(child(1));
        for i in 2..self.arity {
            m = m.min(child(i));
        }
        phi_f64(m, u)
    }
}

#[derive(Clone, Copy)]
struct Mod2Rule {
    q: f64,
}

impl Rule for Mod2Rule {
    fn arity(&self) -> usize {
        1
    }
    #[inline]
    fn innovation<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        if u < self.q {
            1.0
        } else {
            0.0
        }
    }
    #[inline]
    fn combine(&self, xi: f64, child: impl Fn(usize) -> f64) -> f64 {
        let x = child(0);
        if x.is_finite() {
            (xi + x).rem_euclid(2.0)
        } else {
            x
        }
    }
}

#[derive(Clone, Copy)]
struct QuicksortRule;

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

impl Rule for QuicksortRule {
    fn arity(&self) -> usize {
        2
    }
    #[inline]
    fn innovation<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.random()
    }
    fn combine(&self, u: f64, child: impl Fn(usize) -> f64) -> f64 {
        let (a, b) = (child(0), child(1));
        if a.is_finite() && b.is_finite() {
            u * a + (1.0 - u) * b + 2.0 * xlogx(u) + 2.0 * xlogx(1.0 - u) + 1.0
        } else {
            f64::INFINITY
        }
    }
}

macro_rules! with_rule {
    ($spec:expr, $rule:ident => $body:expr) => {
        match $spec.kind {
            RdeKind::FrozenPerc { r } => {
                let $rule = FrozenRule { arity: r as usize - 1 };
                $body
            }
            RdeKind::Mod2 { q } => {
                let $rule = Mod2Rule { q };
                $body
            }
            RdeKind::Quicksort => {
                let $rule = QuicksortRule;
                $body
            }
        }
    };
}

/// Reusable traversal stacks for one worker.
#[derive(Debug)]
pub struct Scratch<V, I> {
    frames: Vec<(I, u32)>,
    values: Vec<V>,
}

impl<V, I> Default for Scratch<V, I> {
    fn default() -> Self {
        Scratch {
            frames: Vec::new(),
            values: Vec::new(),
        }
    }
}

/// Evaluates one depth-`depth` tree: `innov` per interior node in pre-order,
/// `leaf` per boundary node left to right, `combine` bottom-up.
///
/// Branching trees recurse (their depth is bounded by the node budget);
/// chains (`arity == 1`) are walked iteratively so very deep chains fit.
#[inline]
fn eval_tree<V: Copy, I: Copy, R: ?Sized>(
    arity: usize,
    depth: usize,
    scratch: &mut Scratch<V, I>,
    rng: &mut R,
    mut innov: impl FnMut(&mut R) -> I,
    mut leaf: impl FnMut(&mut R) -> V,
    combine: impl Fn(I, &[V]) -> V,
) -> V {
    if depth == 0 {
        return leaf(rng);
    }
    if arity == 1 {
        let frames = &mut scratch.frames;
        frames.clear();
        for _ in 0..depth {
            frames.push((innov(rng), 0));
        }
        let mut v = leaf(rng);
        while let Some((i, _)) = frames.pop() {
            v = combine(i, std::slice::from_ref(&v));
        }
        return v;
    }
    let mut walker = Walker {
        arity,
        innov,
        leaf,
        combine,
        _marker: std::marker::PhantomData,
    };
    if arity == 2 {
        return walker.binary(depth, rng);
    }
    scratch.values.clear();
    walker.node(depth, &mut scratch.values, rng)
}

type Marker<V, I, R> = std::marker::PhantomData<fn(&mut R) -> (V, I)>;

struct Walker<V, I, R: ?Sized, FI, FL, FC> {
    arity: usize,
    innov: FI,
    leaf: FL,
    combine: FC,
    _marker: Marker<V, I, R>,
}

impl<V, I, R, FI, FL, FC> Walker<V, I, R, FI, FL, FC>
where
    V: Copy,
    I: Copy,
    R: ?Sized,
    FI: FnMut(&mut R) -> I,
    FL: FnMut(&mut R) -> V,
    FC: Fn(I, &[V]) -> V,
{
    fn binary(&mut self, depth: usize, rng: &mut R) -> V {
        let i = (self.innov)(rng);
        let kids = if depth == 1 {
            let a = (self.leaf)(rng);
            [a, (self.leaf)(rng)]
        } else {
            let a = self.binary(depth - 1, rng);
            [a, self.binary(depth - 1, rng)]
        };
        (self.combine)(i, &kids)
    }

    fn node(&mut self, depth: usize, buf: &mut Vec<V>, rng: &mut R) -> V {
        let i = (self.innov)(rng);
        let start = buf.len();
        if depth == 1 {
            for _ in 0..self.arity {
                let v = (self.leaf)(rng);
                buf.push(v);
            }
        } else {
            for _ in 0..self.arity {
                let v = self.node(depth - 1, buf, rng);
                buf.push(v);
            }
        }
        let v = (self.combine)(i, &buf[start..]);
        buf.truncate(start);
        v
    }
}

/// Joint law of the boundary pairs for the bivariate sampler.
#[derive(Debug, Clone, PartialEq)]
pub enum JointBoundary {
    /// `(Z, Z)` with `Z` from the marginal: the diagonal coupling.
    Diagonal(MarginalDist),
    /// Independent coordinates.
    Product(MarginalDist, MarginalDist),
    /// Uniform resampling from a fixed list of pairs.
    Pairs(Vec<(ExtendedValue, ExtendedValue)>),
}

impl JointBoundary {
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match self {
            JointBoundary::Diagonal(m) => {
                let z = m.sample_f64(rng);
                (z, z)
            }
            JointBoundary::Product(a, b) => {
                let x = a.sample_f64(rng);
                (x, b.sample_f64(rng))
            }
            JointBoundary::Pairs(p) => {
                let (x, y) = p[rng.random_range(0..p.len())];
                (x.to_f64(), y.to_f64())
            }
        }
    }

    fn marginals(&self) -> Vec<MarginalDist> {
        match self {
            JointBoundary::Diagonal(m) => vec![m.clone()],
            JointBoundary::Product(a, b) => vec![a.clone(), b.clone()],
            JointBoundary::Pairs(_) => Vec::new(),
        }
    }

    pub fn describe(&self) -> serde_json::Value {
        match self {
            JointBoundary::Diagonal(m) => serde_json::json!({"diagonal": m}),
            JointBoundary::Product(a, b) => serde_json::json!({"product": [a, b]}),
            JointBoundary::Pairs(p) => serde_json::json!({"pairs": p.len()}),
        }
    }
}

/// Boundary values for the long-range probe: fixed for every sample.
#[derive(Debug, Clone, PartialEq)]
pub enum Assignment {
    Constant(ExtendedValue),
    /// One value per boundary node, left to right.
    PerLeaf(Vec<ExtendedValue>),
}

enum LeafValues {
    Constant(f64),
    PerLeaf(Vec<f64>),
}

impl LeafValues {
    fn new(a: &Assignment) -> Self {
        match a {
            Assignment::Constant(v) => LeafValues::Constant(v.to_f64()),
            Assignment::PerLeaf(v) => LeafValues::PerLeaf(v.iter().map(|x| x.to_f64()).collect()),
        }
    }
}

impl RdeSpec {
    pub fn new(kind: RdeKind) -> Result<Self> {
        match kind {
            RdeKind::FrozenPerc { r } if r < 3 => {
                return Err(Error::Domain(format!("frozen percolation needs r >= 3, got {r}")))
            }
            RdeKind::FrozenPerc { r } if r > 1025 => return Err(Error::Domain(format!("tree degree {r} too large"))),
            RdeKind::Mod2 { q } if !(0.0..=1.0).contains(&q) => {
                return Err(Error::Domain(format!("mod2 needs q in [0, 1], got {q}")))
            }
            _ => {}
        }
        Ok(RdeSpec {
            kind,
            node_budget: DEFAULT_NODE_BUDGET,
        })
    }

    pub fn frozen_perc(r: u32) -> Result<Self> {
        Self::new(RdeKind::FrozenPerc { r })
    }

    pub fn mod2(q: f64) -> Result<Self> {
        Self::new(RdeKind::Mod2 { q })
    }

    pub fn quicksort() -> Self {
        RdeSpec {
            kind: RdeKind::Quicksort,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }

    pub fn with_node_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }

    pub fn kind(&self) -> RdeKind {
        self.kind
    }

    pub fn name(&self) -> String {
        match self.kind {
            RdeKind::FrozenPerc { r } => format!("frozen_perc({r})"),
            RdeKind::Mod2 { q } => format!("mod2({q})"),
            RdeKind::Quicksort => "quicksort".to_string(),
        }
    }

    pub fn arity(&self) -> usize {
        with_rule!(self, rule => rule.arity())
    }

    /// The reference solution `μ` used as boundary law and comparison target:
    /// `ν^r` for frozen percolation, the fair coin for mod 2. Quicksort has no
    /// closed form here.
    pub fn fixed_point(&self) -> Option<MarginalDist> {
        match self.kind {
            RdeKind::FrozenPerc { r } => Some(MarginalDist::ClosedForm(ClosedForm::NuR { r })),
            RdeKind::Mod2 { .. } => Some(MarginalDist::ClosedForm(ClosedForm::Bernoulli { p: 0.5 })),
            RdeKind::Quicksort => None,
        }
    }

    pub fn state_space(&self) -> StateSpace {
        match self.kind {
            RdeKind::FrozenPerc { r } => StateSpace::Extended { lo: frozen_lo(r) },
            RdeKind::Mod2 { .. } => StateSpace::Binary,
            RdeKind::Quicksort => StateSpace::Real,
        }
    }

    /// Checks that `v` is a point of the state space.
    pub fn check_value(&self, v: ExtendedValue) -> Result<()> {
        let ok = match (self.state_space(), v) {
            (_, Finite(x)) if x.is_nan() => false,
            (StateSpace::Extended { .. }, Infinity) => true,
            (StateSpace::Extended { lo }, Finite(x)) => x >= lo - DOMAIN_TOL && x <= 1.0 + DOMAIN_TOL,
            (StateSpace::Binary, Finite(x)) => x == 0.0 || x == 1.0,
            (StateSpace::Binary, Infinity) => false,
            (StateSpace::Real, Finite(_)) => true,
            (StateSpace::Real, Infinity) => false,
        };
        if ok {
            Ok(())
        } else {
            argument(format!("value {v} is outside the state space of {}", self.name()))
        }
    }

    /// Checks that a boundary law is supported in the state space.
    pub fn check_boundary(&self, dist: &MarginalDist) -> Result<()> {
        use crate::dist::ClosedForm;
        let bad = || {
            argument(format!(
                "boundary law is not supported in the state space of {}",
                self.name()
            ))
        };
        match self.state_space() {
            StateSpace::Extended { lo } => {
                if let Some((a, b)) = dist.finite_support() {
                    if a < lo - DOMAIN_TOL || b > 1.0 + DOMAIN_TOL {
                        return bad();
                    }
                }
                Ok(())
            }
            StateSpace::Binary => match dist {
                MarginalDist::ClosedForm(ClosedForm::Bernoulli { .. }) => Ok(()),
                MarginalDist::ClosedForm(ClosedForm::Point { x }) => self.check_value(*x),
                MarginalDist::Empirical(e) => e.values().try_for_each(|v| self.check_value(v)),
                _ => bad(),
            },
            StateSpace::Real => {
                if dist.atom_at_infinity() > 0.0 {
                    return bad();
                }
                Ok(())
            }
        }
    }

    /// `g(innovation; children)`.
    pub fn g_eval(&self, innovation: f64, children: &[ExtendedValue]) -> Result<ExtendedValue> {
        if children.len() != self.arity() {
            return argument(format!(
                "{} takes {} children, got {}",
                self.name(),
                self.arity(),
                children.len()
            ));
        }
        let v = with_rule!(self, rule => rule.combine(innovation, |i| children[i].to_f64()));
        Ok(ExtendedValue::from(v))
    }

    /// Draws one innovation from its law.
    pub fn draw_innovation<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        with_rule!(self, rule => rule.innovation(rng))
    }

    /// Total node count of a full tree of the given depth, saturating.
    pub fn tree_nodes(&self, depth: usize) -> u64 {
        let a = self.arity() as u64;
        let mut total: u64 = 0;
        let mut level: u64 = 1;
        for _ in 0..=depth {
            total = total.saturating_add(level);
            level = level.saturating_mul(a);
        }
        total
    }

    pub(crate) fn check_budget(&self, depth: usize) -> Result<()> {
        let nodes = self.tree_nodes(depth);
        if nodes > self.node_budget {
            return Err(Error::Resource(format!(
                "depth {depth} tree of {} has {nodes} nodes, budget is {}",
                self.name(),
                self.node_budget
            )));
        }
        Ok(())
    }

    /// One root value of the depth-`depth` tree with i.i.d. `boundary` leaves.
    pub fn sample_rtp_root<R: Rng + ?Sized>(
        &self,
        boundary: &MarginalDist,
        depth: usize,
        rng: &mut R,
    ) -> Result<ExtendedValue> {
        self.check_budget(depth)?;
        self.check_boundary(boundary)?;
        let mut scratch = Scratch::default();
        Ok(self.root_unchecked(boundary, depth, &mut scratch, rng).into())
    }

    fn root_unchecked<R: Rng + ?Sized>(
        &self,
        boundary: &MarginalDist,
        depth: usize,
        scratch: &mut Scratch<f64, f64>,
        rng: &mut R,
    ) -> f64 {
        with_rule!(self, rule => eval_tree(
            rule.arity(),
            depth,
            scratch,
            rng,
            |r| rule.innovation(r),
            |r| boundary.sample_f64(r),
            |u, c| rule.combine(u, |i| c[i]),
        ))
    }

    /// One root pair of two trees sharing their boundary values (drawn from
    /// `marginal`) but with independent innovations.
    pub fn sample_coupled_roots<R: Rng + ?Sized>(
        &self,
        marginal: &MarginalDist,
        depth: usize,
        rng: &mut R,
    ) -> Result<(ExtendedValue, ExtendedValue)> {
        self.sample_bivariate_root(&JointBoundary::Diagonal(marginal.clone()), depth, rng)
    }

    /// One root pair of the second-kind bivariate tree: boundary pairs from
    /// `joint`, an independent innovation for each coordinate at every node.
    pub fn sample_bivariate_root<R: Rng + ?Sized>(
        &self,
        joint: &JointBoundary,
        depth: usize,
        rng: &mut R,
    ) -> Result<(ExtendedValue, ExtendedValue)> {
        self.check_budget(depth)?;
        self.check_joint(joint)?;
        let mut scratch = Scratch::default();
        let (x, y) = self.pair_unchecked(joint, depth, &mut scratch, rng);
        Ok((x.into(), y.into()))
    }

    fn check_joint(&self, joint: &JointBoundary) -> Result<()> {
        for m in joint.marginals() {
            self.check_boundary(&m)?;
        }
        if let JointBoundary::Pairs(p) = joint {
            if p.is_empty() {
                return argument("empty pair list as joint boundary");
            }
            for &(x, y) in p {
                self.check_value(x)?;
                self.check_value(y)?;
            }
        }
        Ok(())
    }

    fn pair_unchecked<R: Rng + ?Sized>(
        &self,
        joint: &JointBoundary,
        depth: usize,
        scratch: &mut Scratch<(f64, f64), (f64, f64)>,
        rng: &mut R,
    ) -> (f64, f64) {
        with_rule!(self, rule => eval_tree(
            rule.arity(),
            depth,
            scratch,
            rng,
            |r| {
                let u = rule.innovation(r);
                (u, rule.innovation(r))
            },
            |r| joint.sample(r),
            |(u, v), c| (rule.combine(u, |i| c[i].0), rule.combine(v, |i| c[i].1)),
        ))
    }

    /// Root value with the boundary pinned to `assignment`.
    pub fn sample_conditional_root<R: Rng + ?Sized>(
        &self,
        assignment: &Assignment,
        depth: usize,
        rng: &mut R,
    ) -> Result<ExtendedValue> {
        self.check_budget(depth)?;
        self.check_assignment(assignment, depth)?;
        let mut scratch = Scratch::default();
        let leaves = LeafValues::new(assignment);
        Ok(self.conditional_unchecked(&leaves, depth, &mut scratch, rng).into())
    }

    pub(crate) fn check_assignment(&self, assignment: &Assignment, depth: usize) -> Result<()> {
        match assignment {
            Assignment::Constant(v) => self.check_value(*v),
            Assignment::PerLeaf(vals) => {
                let leaves = (self.arity() as u64).saturating_pow(depth as u32);
                if vals.len() as u64 != leaves {
                    return argument(format!(
                        "assignment has {} values, tree has {leaves} boundary nodes",
                        vals.len()
                    ));
                }
                vals.iter().try_for_each(|&v| self.check_value(v))
            }
        }
    }

    fn conditional_unchecked<R: Rng + ?Sized>(
        &self,
        leaves: &LeafValues,
        depth: usize,
        scratch: &mut Scratch<f64, f64>,
        rng: &mut R,
    ) -> f64 {
        let mut next = 0usize;
        let mut leaf = |_: &mut R| match leaves {
            LeafValues::Constant(v) => *v,
            LeafValues::PerLeaf(vals) => {
                next += 1;
                vals[next - 1]
            }
        };
        with_rule!(self, rule => eval_tree(
            rule.arity(),
            depth,
            scratch,
            rng,
            |r| rule.innovation(r),
            &mut leaf,
            |u, c| rule.combine(u, |i| c[i]),
        ))
    }

    /// `n` i.i.d. root values, generated in seeded chunks.
    pub fn sample_roots(
        &self,
        boundary: &MarginalDist,
        depth: usize,
        n: usize,
        seed: Seed,
    ) -> Result<Vec<ExtendedValue>> {
        self.check_budget(depth)?;
        self.check_boundary(boundary)?;
        Ok(chunked(
            seed,
            Purpose::Roots,
            n,
            Scratch::default,
            |s, rng: &mut StreamRng| ExtendedValue::from(self.root_unchecked(boundary, depth, s, rng)),
        ))
    }

    /// `n` i.i.d. root pairs of the bivariate tree.
    pub fn sample_pairs(&self, joint: &JointBoundary, depth: usize, n: usize, seed: Seed) -> Result<PairSample> {
        self.check_budget(depth)?;
        self.check_joint(joint)?;
        let pairs = chunked(seed, Purpose::Pairs, n, Scratch::default, |s, rng: &mut StreamRng| {
            let (x, y) = self.pair_unchecked(joint, depth, s, rng);
            (ExtendedValue::from(x), ExtendedValue::from(y))
        });
        Ok(PairSample {
            pairs,
            meta: PairMeta {
                rde: self.name(),
                depth,
                seed: seed.0,
                n_samples: n,
                boundary: joint.describe(),
            },
        })
    }

    /// `n` coupled root pairs (diagonal boundary with marginal `marginal`).
    pub fn sample_coupled_pairs(
        &self,
        marginal: &MarginalDist,
        depth: usize,
        n: usize,
        seed: Seed,
    ) -> Result<PairSample> {
        self.sample_pairs(&JointBoundary::Diagonal(marginal.clone()), depth, n, seed)
    }

    /// `n` root values with the boundary pinned to `assignment`.
    pub fn sample_conditional_roots(
        &self,
        assignment: &Assignment,
        depth: usize,
        n: usize,
        seed: Seed,
    ) -> Result<Vec<ExtendedValue>> {
        self.check_budget(depth)?;
        self.check_assignment(assignment, depth)?;
        let leaves = LeafValues::new(assignment);
        Ok(chunked(
            seed,
            Purpose::Probe,
            n,
            Scratch::default,
            |s, rng: &mut StreamRng| ExtendedValue::from(self.conditional_unchecked(&leaves, depth, s, rng)),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMeta {
    pub rde: String,
    pub depth: usize,
    pub seed: u64,
    pub n_samples: usize,
    pub boundary: serde_json::Value,
}

/// A batch of root pairs with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSample {
    pub pairs: Vec<(ExtendedValue, ExtendedValue)>,
    pub meta: PairMeta,
}

impl PairSample {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn xs(&self) -> impl Iterator<Item = ExtendedValue> + '_ {
        self.pairs.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = ExtendedValue> + '_ {
        self.pairs.iter().map(|p| p.1)
    }

    /// CSV with header `x,y`; `∞` is written as `inf`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y")?;
        for (x, y) in &self.pairs {
            writeln!(w, "{x},{y}")?;
        }
        w.flush()
    }

    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::to_value(&self.meta).expect("metadata serializes")
    }
}
