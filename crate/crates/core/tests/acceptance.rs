//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rdetail::grid::{
    find_min_partition, fixed_point_residual, iterate_diagonal, partition_check, quadrature_floor, t_push, tt_push,
    BivariateGrid, Lattice, SurvivalGrid, Verdict,
};
use rdetail::tail::{independence_stat, long_range_probe, theta_fixed};
use rdetail::{Assignment, ExtendedValue, MarginalDist, RdeSpec, Seed};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, elapsed: Duration) -> Outcome {
    check(elapsed < limit, format!("runtime {elapsed:.2?} (limit {limit:?})"))
}

fn timed(limit: Duration, body: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = body()?;
    let time = within(limit, start.elapsed())?;
    Ok(format!("{detail}; {time}"))
}

fn dkw(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// Residual at `k` knots and its growth when `k` is halved, for `law` under
/// the degree-`r` operator.
fn residual_pair(law: &MarginalDist, r: u32) -> Result<(f64, f64), String> {
    let fine = fixed_point_residual(law, r, 1024).map_err(|e| e.to_string())?;
    let coarse = fixed_point_residual(law, r, 512).map_err(|e| e.to_string())?;
    Ok((fine, coarse / fine))
}

const RESIDUAL_LIMIT: f64 = 5e-4;
const HALVING_RATIO: (f64, f64) = (3.0, 5.0);

fn residual_ok(name: &str, law: &MarginalDist, r: u32, notes: &mut Vec<String>) -> Result<bool, String> {
    let (res, ratio) = residual_pair(law, r)?;
    notes.push(format!("{name}: residual {res:.3e} ratio {ratio:.2}"));
    Ok(res < RESIDUAL_LIMIT && (HALVING_RATIO.0..=HALVING_RATIO.1).contains(&ratio))
}

fn criterion_1() -> Outcome {
    timed(Duration::from_secs(1), || {
        let mut notes = Vec::new();
        let mut ok = true;
        for a in [0.6, 0.8, 1.0] {
            ok &= residual_ok(&format!("a={a}"), &MarginalDist::nu_a(a).unwrap(), 3, &mut notes)?;
        }
        check(ok, notes.join(", "))
    })
}

fn criterion_2() -> Outcome {
    timed(Duration::from_secs(1), || {
        let mut notes = Vec::new();
        let mut ok = true;
        for r in [4, 5] {
            ok &= residual_ok(&format!("r={r}"), &MarginalDist::nu_r(r).unwrap(), r, &mut notes)?;
        }
        let lattice = Lattice::for_degree(3, 1024).unwrap();
        let push = |law: MarginalDist| t_push(&SurvivalGrid::from_dist(&law, lattice).unwrap(), 3).unwrap();
        let three = push(MarginalDist::nu_r(3).unwrap());
        let one = push(MarginalDist::nu_a(1.0).unwrap());
        let same = three.knots() == one.knots()
            && three
                .cdf_values()
                .iter()
                .zip(one.cdf_values())
                .all(|(a, b)| a.to_bits() == b.to_bits())
            && three.atom_inf().to_bits() == one.atom_inf().to_bits();
        ok &= same;
        notes.push(format!("r=3 bitwise equal to a=1: {same}"));
        check(ok, notes.join(", "))
    })
}

/// An interval with the integrand at its ends and midpoint.
#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
}

impl Panel {
    fn new(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fb: f64) -> Self {
        Panel {
            a,
            b,
            fa,
            fm: f(0.5 * (a + b)),
            fb,
        }
    }

    fn simpson(&self) -> f64 {
        (self.b - self.a) / 6.0 * (self.fa + 4.0 * self.fm + self.fb)
    }
}

/// Adaptive Simpson quadrature.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn refine(f: &dyn Fn(f64) -> f64, p: Panel, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (p.a + p.b);
        let left = Panel::new(f, p.a, m, p.fa, p.fm);
        let right = Panel::new(f, m, p.b, p.fm, p.fb);
        let (l, r) = (left.simpson(), right.simpson());
        let delta = l + r - p.simpson();
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return l + r + delta / 15.0;
        }
        refine(f, left, tol / 2.0, depth - 1) + refine(f, right, tol / 2.0, depth - 1)
    }
    refine(f, Panel::new(f, a, b, f(a), f(b)), tol, 50)
}

fn criterion_3() -> Outcome {
    timed(Duration::from_secs(1), || {
        let mut worst: f64 = 0.0;
        for r in [3u32, 4, 5, 8] {
            let rf = r as f64;
            let lo = 1.0 / (rf - 1.0);
            let scale = 1.0 / ((rf - 2.0) * (rf - 1.0).powf(1.0 / (rf - 2.0)));
            let density = move |y: f64| scale * y.powf(-(rf - 1.0) / (rf - 2.0));
            let law = MarginalDist::nu_r(r).unwrap();
            for i in 1..=1000 {
                let x = lo + (1.0 - lo) * i as f64 / 1000.0;
                let quad = simpson(&density, lo, x, 1e-13);
                let closed = law.cdf_eval(ExtendedValue::Finite(x)).unwrap();
                worst = worst.max((quad - closed).abs());
            }
        }
        check(
            worst < 1e-8,
            format!("max |closed - quadrature| = {worst:.2e} (limit 1e-8)"),
        )
    })
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let start = Instant::now();
    let results: Vec<_> = [0.1, 0.3, 0.49].iter().map(|&q| (q, theta_fixed(q, 1e-12))).collect();
    let elapsed = start.elapsed();
    for (q, res) in results {
        let fixed = res.map_err(|e| e.to_string())?;
        let rate = (2.0f64 * q - 1.0).powi(2);
        let predicted = ((1e-12f64 / 0.25).ln() / rate.ln()).ceil() as i64;
        ok &= (fixed.theta - 0.25).abs() < 1e-12 && (fixed.iterations as i64 - predicted).abs() <= 1;
        notes.push(format!(
            "q={q}: theta={:.15} iters={} predicted={predicted}",
            fixed.theta, fixed.iterations
        ));
    }
    let time = within(Duration::from_millis(1), elapsed);
    ok &= time.is_ok();
    notes.push(time.unwrap_or_else(|e| e));
    check(ok, notes.join(", "))
}

fn criterion_5() -> Outcome {
    timed(Duration::from_secs(10), || {
        let n = 100_000;
        let mut worst: f64 = 0.0;
        for q in [0.3, 0.5] {
            let rde = RdeSpec::mod2(q).unwrap();
            let mu = rde.fixed_point().unwrap();
            for depth in 1..=10usize {
                let pairs = rde
                    .sample_coupled_pairs(&mu, depth, n, Seed(500 + depth as u64))
                    .unwrap();
                let equal = pairs.pairs.iter().filter(|(x, y)| x == y).count() as f64 / n as f64;
                let p = 0.5 + (1.0 - 2.0 * q).powi(2 * depth as i32) / 2.0;
                let sigma = (p * (1.0 - p) / n as f64).sqrt();
                worst = worst.max((equal - p).abs() / sigma);
            }
        }
        check(
            worst <= 3.0,
            format!("worst deviation {worst:.2} sigma over 20 cases (limit 3)"),
        )
    })
}

fn criterion_6() -> Outcome {
    timed(Duration::from_secs(30), || {
        let f0 = BivariateGrid::product(3, 512).unwrap();
        let f1 = tt_push(&f0).map_err(|e| e.to_string())?;
        let gap = f0
            .values()
            .iter()
            .zip(f1.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        check(gap < 1e-4, format!("sup|T(F0) - F0| = {gap:.3e} at k=512 (limit 1e-4)"))
    })
}

fn criterion_7() -> Outcome {
    timed(Duration::from_secs(300), || {
        let k = 512;
        let run = iterate_diagonal(3, k, 100, 1e-3).map_err(|e| e.to_string())?;
        let floor = quadrature_floor(3, k).map_err(|e| e.to_string())?;
        let s0 = run.trace[0];
        let start_ok = (s0 - 1.0).abs() <= 2.0 / k as f64;
        let monotone = run.trace.windows(2).all(|w| w[1] <= w[0] + floor);
        let last = *run.trace.last().unwrap();
        let reached = last < 1e-3 && run.verdict == Verdict::ConvergedToProduct;

        let long = |k| {
            iterate_diagonal(3, k, 20, f64::MIN_POSITIVE)
                .map(|r| r.trace)
                .map_err(|e| e.to_string())
        };
        let (coarse, fine) = (long(256)?, long(512)?);
        let coarse_floor = quadrature_floor(3, 256).map_err(|e| e.to_string())?;
        let gap = coarse
            .iter()
            .zip(&fine)
            .take(21)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let stable = gap <= 5.0 * coarse_floor && coarse.len().min(fine.len()) == 21;
        check(
            start_ok && monotone && reached && stable,
            format!(
                "s0={s0} monotone={monotone} final={last:.3e} after {} steps ({}), k=256 vs 512 gap {gap:.2e} (limit {:.2e})",
                run.iterations(),
                run.verdict.as_str(),
                5.0 * coarse_floor
            ),
        )
    })
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let one = partition_check(1).map_err(|e| e.to_string())?;
    let min = find_min_partition(1.0 / 3.0 - 1e-6).map_err(|e| e.to_string())?;
    let before = partition_check(min.cells - 1).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let ok = one.bound == 5.0 && (20..=30).contains(&min.cells) && min.bound < 1.0 / 3.0 && before.bound >= 1.0 / 3.0;
    let time = within(Duration::from_millis(1), elapsed);
    check(
        ok && time.is_ok(),
        format!(
            "k=1 bound {}, minimal k={} bound {:.6}, k-1 bound {:.6}; {}",
            one.bound,
            min.cells,
            min.bound,
            before.bound,
            time.unwrap_or_else(|e| e)
        ),
    )
}

fn criterion_9() -> Outcome {
    timed(Duration::from_secs(300), || {
        let rde = RdeSpec::frozen_perc(3).unwrap();
        let mu = rde.fixed_point().unwrap();
        let mut reports = Vec::new();
        for depth in [4, 8, 12, 16] {
            let pairs = rde.sample_coupled_pairs(&mu, depth, 100_000, Seed(9)).unwrap();
            reports.push(independence_stat(&pairs, 32).map_err(|e| e.to_string())?);
        }
        let decreasing = reports.windows(2).all(|w| w[1].stat < w[0].stat);
        let last = reports.last().unwrap();
        let near_null = last.stat <= 2.0 * last.baseline_q99;
        let curve: Vec<String> = reports.iter().map(|r| format!("d{}={:.5}", r.depth, r.stat)).collect();
        check(
            decreasing && near_null,
            format!(
                "stats {} baseline_q99 at 16 = {:.5}",
                curve.join(" "),
                last.baseline_q99
            ),
        )
    })
}

fn criterion_10() -> Outcome {
    timed(Duration::from_secs(10), || {
        let n = 100_000;
        let mut worst: f64 = 0.0;
        let biased = RdeSpec::mod2(0.3).unwrap();
        let mu = biased.fixed_point().unwrap();
        for depth in 1..=8usize {
            let want = 0.4f64.powi(depth as i32) / 2.0;
            let sigma = ((0.5 + want) * (0.5 - want) / n as f64).sqrt();
            for bit in [0.0, 1.0] {
                let a = Assignment::Constant(ExtendedValue::Finite(bit));
                let d = long_range_probe(&biased, &mu, &a, depth, n, Seed(depth as u64)).map_err(|e| e.to_string())?;
                worst = worst.max((d - want).abs() / sigma);
            }
        }
        let fair = RdeSpec::mod2(0.5).unwrap();
        let mut noise: f64 = 0.0;
        for depth in 1..=8usize {
            let a = Assignment::Constant(ExtendedValue::Finite(0.0));
            noise =
                noise.max(long_range_probe(&fair, &mu, &a, depth, n, Seed(depth as u64)).map_err(|e| e.to_string())?);
        }
        let floor = dkw(n, 0.01);
        check(
            worst <= 3.0 && noise <= floor,
            format!("q=0.3 worst {worst:.2} sigma (limit 3); q=0.5 max {noise:.2e} (DKW floor {floor:.2e})"),
        )
    })
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn criterion_11() -> Outcome {
    let runs: [&[&str]; 8] = [
        &["rtp", "--depth", "8", "--samples", "20000", "--seed", "7"],
        &[
            "rtp",
            "--rde",
            "quicksort",
            "--depth",
            "6",
            "--samples",
            "5000",
            "--seed",
            "7",
        ],
        &[
            "coupled",
            "--depth",
            "2",
            "--depth-max",
            "8",
            "--depth-step",
            "3",
            "--samples",
            "8000",
            "--seed",
            "3",
        ],
        &["grid-biv", "--k", "128", "--tol", "1e-3", "--start", "diagonal"],
        &["grid-uni", "--k", "256"],
        &["partition"],
        &["mod2-theta", "--q", "0.3", "--tol", "1e-12"],
        &[
            "probe",
            "--rde",
            "mod2",
            "--q",
            "0.3",
            "--depth",
            "4",
            "--samples",
            "5000",
            "--assignments",
            "3",
        ],
    ];
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut failed = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let outputs: Vec<_> = ["1", "8"]
            .iter()
            .map(|w| {
                let out = tmp.path().join(format!("{i}-{w}"));
                let status = Command::new(env!("CARGO_BIN_EXE_rdetail"))
                    .args(*args)
                    .args(["--workers", w, "--out", out.to_str().unwrap()])
                    .output()
                    .expect("binary runs");
                (status.status.success(), snapshot(&out))
            })
            .collect();
        let same = outputs[0].0 && outputs[1].0 && !outputs[0].1.is_empty() && outputs[0].1 == outputs[1].1;
        if !same {
            failed.push(args[0]);
        }
    }
    check(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} runs byte-identical at 1 and 8 workers", runs.len())
        } else {
            format!("differences in {failed:?}")
        },
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("univariate fixed points nu_a", criterion_1),
        ("univariate fixed points nu^r", criterion_2),
        ("closed-form cdfs vs quadrature", criterion_3),
        ("mod-2 theta fixed point", criterion_4),
        ("mod-2 coupled chains", criterion_5),
        ("product is a bivariate fixed point", criterion_6),
        ("diagonal iteration converges", criterion_7),
        ("contraction certificate", criterion_8),
        ("coupled-root dependence decays", criterion_9),
        ("long-range probe, mod-2", criterion_10),
        ("determinism across worker counts", criterion_11),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
