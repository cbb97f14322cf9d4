//! C ABI over `rdetail`.
//!
//! Objects are opaque heap handles created by `rdt_*_new`-style constructors
//! and released with the matching `rdt_*_free`. Every fallible call returns an
//! [`RdtStatus`]; on failure the message is available from
//! [`rdt_last_error`] on the same thread. Values in the extended state space
//! cross the boundary as `double`, with `∞` encoded as `INFINITY`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rdetail::grid::{self, DiagonalRun, Verdict};
use rdetail::{tail, Error, ExtendedValue, MarginalDist, RdeSpec, Seed};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdtStatus {
    Ok = 0,
    /// A required pointer argument was null.
    Null = 1,
    Domain = 2,
    Argument = 3,
    Validation = 4,
    Numerical = 5,
    Resource = 6,
    /// The library panicked; the handle arguments should be considered unusable.
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdtVerdict {
    ConvergedToProduct = 0,
    Stalled = 1,
    BudgetExhausted = 2,
}

/// One-dimensional law.
pub struct RdtDist(MarginalDist);

/// Recursive distributional equation with its node budget.
pub struct RdtRde(RdeSpec);

/// Result of a bivariate grid iteration.
pub struct RdtTrace(DiagonalRun);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RdtStatus {
    match e {
        Error::Domain(_) | Error::DegenerateParameter(_) => RdtStatus::Domain,
        Error::Argument(_) => RdtStatus::Argument,
        Error::Validation(_) | Error::Config(_) | Error::Json(_) => RdtStatus::Validation,
        Error::NumericalInstability(_) => RdtStatus::Numerical,
        Error::Resource(_) | Error::Io(_) => RdtStatus::Resource,
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), RdtStatus>) -> RdtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RdtStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            RdtStatus::Panic
        }
    }
}

fn lift<T>(r: rdetail::Result<T>) -> Result<T, RdtStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), RdtStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        return Err(RdtStatus::Null);
    }
    Ok(())
}

/// Checks `out` before building the value, then stores it as a new handle.
///
/// # Safety
/// `out` must be valid for one write.
unsafe fn emit<T>(out: *mut *mut T, make: impl FnOnce() -> Result<T, RdtStatus>) -> Result<(), RdtStatus> {
    non_null(out, "out")?;
    *out = Box::into_raw(Box::new(make()?));
    Ok(())
}

fn to_extended(x: f64) -> Result<ExtendedValue, RdtStatus> {
    if x.is_nan() || x == f64::NEG_INFINITY {
        set_error(format!("{x} is not a point of the state space"));
        return Err(RdtStatus::Domain);
    }
    Ok(ExtendedValue::from(x))
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn rdt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rdt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `ν_a`, `a ∈ [1/2, 1]`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdt_dist_nu_a(a: f64, out: *mut *mut RdtDist) -> RdtStatus {
    guard(|| emit(out, || Ok(RdtDist(lift(MarginalDist::nu_a(a))?))))
}

/// `ν^r`, `r ≥ 3`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdt_dist_nu_r(r: u32, out: *mut *mut RdtDist) -> RdtStatus {
    guard(|| emit(out, || Ok(RdtDist(lift(MarginalDist::nu_r(r))?))))
}

/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdt_dist_bernoulli(p: f64, out: *mut *mut RdtDist) -> RdtStatus {
    guard(|| emit(out, || Ok(RdtDist(lift(MarginalDist::bernoulli(p))?))))
}

/// Point mass at `x` (`INFINITY` for `∞`).
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdt_dist_point(x: f64, out: *mut *mut RdtDist) -> RdtStatus {
    guard(|| emit(out, || Ok(RdtDist(MarginalDist::point(to_extended(x)?)))))
}

/// # Safety
/// `d` must be null or a handle from an `rdt_dist_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rdt_dist_free(d: *mut RdtDist) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// `P(X ≤ x)`; at `x = INFINITY` this is 1.
///
/// # Safety
/// `d` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdt_dist_cdf(d: *const RdtDist, x: f64, out: *mut f64) -> RdtStatus {
    guard(|| {
        non_null(d, "dist")?;
        non_null(out, "out")?;
        *out = lift((*d).0.cdf_eval(to_extended(x)?))?;
        Ok(())
    })
}

/// Quantile at level `p ∈ [0, 1]`; `INFINITY` when it falls in the atom at `∞`.
///
/// # Safety
/// `d` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdt_dist_quantile(d: *const RdtDist, p: f64, out: *mut f64) -> RdtStatus {
    guard(|| {
        non_null(d, "dist")?;
        non_null(out, "out")?;
        *out = lift((*d).0.quantile(p))?.to_f64();
        Ok(())
    })
}

/// Mass of the atom at `∞`.
///
/// # Safety
/// `d` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdt_dist_atom_inf(d: *const RdtDist, out: *mut f64) -> RdtStatus {
    guard(|| {
        non_null(d, "dist")?;
        non_null(out, "out")?;
        *out = (*d).0.atom_at_infinity();
        Ok(())
    })
}

/// Frozen-percolation RDE on the `r`-regular tree.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdt_rde_frozen_perc(r: u32, out: *mut *mut RdtRde) -> RdtStatus {
    guard(|| emit(out, || Ok(RdtRde(lift(RdeSpec::frozen_perc(r))?))))
}

/// Mod-2 RDE with flip probability `q`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdt_rde_mod2(q: f64, out: *mut *mut RdtRde) -> RdtStatus {
    guard(|| emit(out, || Ok(RdtRde(lift(RdeSpec::mod2(q))?))))
}

/// Quicksort RDE.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdt_rde_quicksort(out: *mut *mut RdtRde) -> RdtStatus {
    guard(|| emit(out, || Ok(RdtRde(RdeSpec::quicksort()))))
}

/// Replaces the maximum tree size accepted by the samplers.
///
/// # Safety
/// `rde` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rdt_rde_set_node_budget(rde: *mut RdtRde, budget: u64) -> RdtStatus {
    guard(|| {
        non_null(rde, "rde")?;
        let spec = (*rde).0;
        (*rde).0 = spec.with_node_budget(budget);
        Ok(())
    })
}

/// # Safety
/// `rde` must be null or a handle from an `rdt_rde_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rdt_rde_free(rde: *mut RdtRde) {
    if !rde.is_null() {
        drop(Box::from_raw(rde));
    }
}

/// `n` root values of depth-`depth` trees with i.i.d. `boundary` leaves,
/// written to `out[0..n]`.
///
/// # Safety
/// `rde` and `boundary` must be live handles; `out` must be valid for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn rdt_sample_roots(
    rde: *const RdtRde,
    boundary: *const RdtDist,
    depth: u32,
    n: usize,
    seed: u64,
    out: *mut f64,
) -> RdtStatus {
    guard(|| {
        non_null(rde, "rde")?;
        non_null(boundary, "boundary")?;
        non_null(out, "out")?;
        let roots = lift((*rde).0.sample_roots(&(*boundary).0, depth as usize, n, Seed(seed)))?;
        let buf = std::slice::from_raw_parts_mut(out, n);
        for (b, v) in buf.iter_mut().zip(roots) {
            *b = v.to_f64();
        }
        Ok(())
    })
}

/// `n` coupled root pairs: shared diagonal boundary with marginal `boundary`,
/// independent innovations. Writes `xs[0..n]` and `ys[0..n]`.
///
/// # Safety
/// `rde` and `boundary` must be live handles; `xs` and `ys` must each be
/// valid for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn rdt_sample_coupled(
    rde: *const RdtRde,
    boundary: *const RdtDist,
    depth: u32,
    n: usize,
    seed: u64,
    xs: *mut f64,
    ys: *mut f64,
) -> RdtStatus {
    guard(|| {
        non_null(rde, "rde")?;
        non_null(boundary, "boundary")?;
        non_null(xs, "xs")?;
        non_null(ys, "ys")?;
        let pairs = lift(
            (*rde)
                .0
                .sample_coupled_pairs(&(*boundary).0, depth as usize, n, Seed(seed)),
        )?;
        let xb = std::slice::from_raw_parts_mut(xs, n);
        let yb = std::slice::from_raw_parts_mut(ys, n);
        for (i, (x, y)) in pairs.pairs.into_iter().enumerate() {
            xb[i] = x.to_f64();
            yb[i] = y.to_f64();
        }
        Ok(())
    })
}

/// Fixed point of the mod-2 `θ` recursion from `θ = 0`.
///
/// # Safety
/// `theta` and `iterations` must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn rdt_theta_fixed(q: f64, tol: f64, theta: *mut f64, iterations: *mut usize) -> RdtStatus {
    guard(|| {
        non_null(theta, "theta")?;
        non_null(iterations, "iterations")?;
        let t = lift(tail::theta_fixed(q, tol))?;
        *theta = t.theta;
        *iterations = t.iterations;
        Ok(())
    })
}

/// `P(X = Y)` for mod-2 chains coupled at depth `n`.
#[no_mangle]
pub extern "C" fn rdt_mod2_pair_prob(q: f64, n: u32) -> f64 {
    tail::mod2_pair_prob(q, n)
}

/// Maximum cell bound of the `k_cells` equal-length partition (`r = 3`).
///
/// # Safety
/// `bound` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdt_partition_check(k_cells: usize, bound: *mut f64) -> RdtStatus {
    guard(|| {
        non_null(bound, "bound")?;
        *bound = lift(grid::partition_check(k_cells))?.bound;
        Ok(())
    })
}

/// Least partition size whose bound is below `eps`.
///
/// # Safety
/// `k_cells` and `bound` must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn rdt_find_min_partition(eps: f64, k_cells: *mut usize, bound: *mut f64) -> RdtStatus {
    guard(|| {
        non_null(k_cells, "k_cells")?;
        non_null(bound, "bound")?;
        let b = lift(grid::find_min_partition(eps))?;
        *k_cells = b.cells;
        *bound = b.bound;
        Ok(())
    })
}

/// Sup-norm residual of the univariate grid operator applied to `d` on `k` knots.
///
/// # Safety
/// `d` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdt_fixed_point_residual(d: *const RdtDist, r: u32, k: usize, out: *mut f64) -> RdtStatus {
    guard(|| {
        non_null(d, "dist")?;
        non_null(out, "out")?;
        *out = lift(grid::fixed_point_residual(&(*d).0, r, k))?;
        Ok(())
    })
}

/// Iterates the bivariate operator from the diagonal coupling.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdt_iterate_diagonal(
    r: u32,
    k: usize,
    max_iters: usize,
    tol: f64,
    out: *mut *mut RdtTrace,
) -> RdtStatus {
    guard(|| {
        emit(out, || {
            Ok(RdtTrace(lift(grid::iterate_diagonal(r, k, max_iters, tol))?))
        })
    })
}

/// Number of trace entries (`iterations + 1`).
///
/// # Safety
/// `t` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rdt_trace_len(t: *const RdtTrace) -> usize {
    if t.is_null() {
        0
    } else {
        (*t).0.trace.len()
    }
}

/// Copies up to `len` trace values into `buf`.
///
/// # Safety
/// `t` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn rdt_trace_values(t: *const RdtTrace, buf: *mut f64, len: usize) -> RdtStatus {
    guard(|| {
        non_null(t, "trace")?;
        non_null(buf, "buf")?;
        let src = &(*t).0.trace;
        let n = len.min(src.len());
        ptr::copy_nonoverlapping(src.as_ptr(), buf, n);
        Ok(())
    })
}

/// # Safety
/// `t` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdt_trace_verdict(t: *const RdtTrace, out: *mut RdtVerdict) -> RdtStatus {
    guard(|| {
        non_null(t, "trace")?;
        non_null(out, "out")?;
        *out = match (*t).0.verdict {
            Verdict::ConvergedToProduct => RdtVerdict::ConvergedToProduct,
            Verdict::Stalled => RdtVerdict::Stalled,
            Verdict::BudgetExhausted => RdtVerdict::BudgetExhausted,
        };
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a handle from [`rdt_iterate_diagonal`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rdt_trace_free(t: *mut RdtTrace) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}
