//! The `rdetail` command line.

mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

pub use config::{load_config, resolve, ConfigFile, Overrides, RdeName, RunConfig, StartName, SECTIONS};

use crate::dist::{ks_distance, Empirical, MarginalDist};
use crate::error::{Error, Result};
use crate::grid::{self, Start};
use crate::rde::RdeSpec;
use crate::seed::Seed;
use crate::tail;
use crate::value::ExtendedValue;

#[derive(Debug, Parser)]
#[command(
    name = "rdetail",
    version,
    about = "Recursive distributional equations and tail diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct Flags {
    /// TOML file with default values for any of the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample root values of the tree process and compare them with the fixed point.
    Rtp(Flags),
    /// Sample coupled root pairs and measure their dependence over a depth range.
    Coupled(Flags),
    /// Iterate the bivariate grid operator and trace sup|H|.
    GridBiv(Flags),
    /// Fixed-point residuals of the univariate grid operator.
    GridUni(Flags),
    /// Contraction certificate for the equal-length partition.
    Partition(Flags),
    /// Iterate the mod-2 theta recursion to its fixed point.
    Mod2Theta(Flags),
    /// Long-range probe with pinned boundary values.
    Probe(Flags),
}

impl Command {
    fn parts(&self) -> (&'static str, &Flags) {
        match self {
            Command::Rtp(f) => ("rtp", f),
            Command::Coupled(f) => ("coupled", f),
            Command::GridBiv(f) => ("grid-biv", f),
            Command::GridUni(f) => ("grid-uni", f),
            Command::Partition(f) => ("partition", f),
            Command::Mod2Theta(f) => ("mod2-theta", f),
            Command::Probe(f) => ("probe", f),
        }
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("rdetail: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: &Cli) -> Result<String> {
    let (name, flags) = cli.command.parts();
    let file = flags.config.as_deref().map(ConfigFile::load).transpose()?;
    let cfg = resolve(name, file.as_ref(), &flags.overrides)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
    pool.install(|| execute(name, &cfg))
}

/// Runs one subcommand with a resolved configuration on the current rayon
/// pool, writing its files under `cfg.out`, and returns the summary line.
pub fn execute(command: &str, cfg: &RunConfig) -> Result<String> {
    let out = Outputs::new(cfg)?;
    match command {
        "rtp" => rtp(cfg, &out),
        "coupled" => coupled(cfg, &out),
        "grid-biv" => grid_biv(cfg, &out),
        "grid-uni" => grid_uni(cfg, &out),
        "partition" => partition(cfg, &out),
        "mod2-theta" => mod2_theta(cfg, &out),
        "probe" => probe(cfg, &out),
        other => Err(Error::Argument(format!("unknown subcommand {other:?}"))),
    }
}

/// Output directory plus the resolved config every sidecar embeds.
struct Outputs {
    dir: PathBuf,
    config: Value,
    seed: u64,
}

impl Outputs {
    fn new(cfg: &RunConfig) -> Result<Self> {
        fs::create_dir_all(&cfg.out)?;
        Ok(Outputs {
            dir: cfg.out.clone(),
            config: serde_json::to_value(cfg)?,
            seed: cfg.seed,
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes `name` and its sidecar `<stem>.json`.
    fn data(&self, name: &str, contents: &str, summary: Value) -> Result<PathBuf> {
        let path = self.path(name);
        fs::write(&path, contents)?;
        let stem = Path::new(name).file_stem().and_then(|s| s.to_str()).unwrap_or(name);
        self.json(&format!("{stem}.json"), json!({ "file": name, "summary": summary }))?;
        Ok(path)
    }

    /// Writes a JSON document with the config and seed merged in.
    fn json(&self, name: &str, body: Value) -> Result<PathBuf> {
        let mut doc = json!({ "config": self.config, "seed": self.seed });
        if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
            d.extend(b);
        }
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}

fn rde_spec(cfg: &RunConfig) -> Result<RdeSpec> {
    match cfg.rde {
        RdeName::FrozenPerc => RdeSpec::frozen_perc(cfg.r),
        RdeName::Mod2 => RdeSpec::mod2(cfg.q),
        RdeName::Quicksort => Ok(RdeSpec::quicksort()),
    }
}

/// Law of the boundary values and, where one is known, the fixed point the
/// roots are compared with.
fn boundary_law(cfg: &RunConfig, spec: &RdeSpec) -> Result<(MarginalDist, Option<MarginalDist>)> {
    if let (RdeName::FrozenPerc, Some(a)) = (cfg.rde, cfg.a) {
        let nu = MarginalDist::nu_a(a)?;
        return Ok((nu.clone(), Some(nu)));
    }
    match spec.fixed_point() {
        Some(mu) => Ok((mu.clone(), Some(mu))),
        None => Ok((MarginalDist::point(ExtendedValue::Finite(0.0)), None)),
    }
}

fn law_name(cfg: &RunConfig) -> String {
    match (cfg.rde, cfg.a) {
        (RdeName::FrozenPerc, Some(a)) => format!("nu_a({a})"),
        (RdeName::FrozenPerc, None) => format!("nu_r({})", cfg.r),
        (RdeName::Mod2, _) => "bernoulli(0.5)".into(),
        (RdeName::Quicksort, _) => "point(0)".into(),
    }
}

fn values_csv(values: &[ExtendedValue]) -> String {
    let mut s = String::with_capacity(values.len() * 20 + 2);
    s.push_str("x\n");
    for v in values {
        writeln!(s, "{v}").expect("writing to a String");
    }
    s
}

fn rtp(cfg: &RunConfig, out: &Outputs) -> Result<String> {
    let spec = rde_spec(cfg)?;
    let (boundary, reference) = boundary_law(cfg, &spec)?;
    let roots = spec.sample_roots(&boundary, cfg.depth, cfg.samples, Seed(cfg.seed))?;
    let emp = Empirical::from_values(roots.iter().copied())?;
    let ks = reference.as_ref().map(|m| ks_distance(&emp, m)).transpose()?;
    let summary = json!({
        "rde": spec.name(),
        "boundary": law_name(cfg),
        "depth": cfg.depth,
        "n": roots.len(),
        "inf_fraction": emp.inf_fraction(),
        "ks_distance": ks,
    });
    let target = if cfg.write_samples {
        out.data("roots.csv", &values_csv(&roots), summary)?
    } else {
        out.json("rtp.json", json!({ "summary": summary }))?
    };
    let ks = ks.map_or("n/a".to_string(), |d| format!("{d:.6}"));
    Ok(format!(
        "rtp {} depth={} n={}: ks={ks} vs {} -> {}",
        spec.name(),
        cfg.depth,
        roots.len(),
        law_name(cfg),
        target.display()
    ))
}

fn depths(cfg: &RunConfig) -> Vec<usize> {
    let last = cfg.depth_max.unwrap_or(cfg.depth);
    (cfg.depth..=last).step_by(cfg.depth_step).collect()
}

fn coupled(cfg: &RunConfig, out: &Outputs) -> Result<String> {
    let spec = rde_spec(cfg)?;
    let (boundary, _) = boundary_law(cfg, &spec)?;
    let mut reports = Vec::new();
    let mut extras = Vec::new();
    for d in depths(cfg) {
        let pairs = spec.sample_coupled_pairs(&boundary, d, cfg.samples, Seed(cfg.seed))?;
        let report = tail::independence_stat(&pairs, cfg.knots)?;
        let equal = pairs.pairs.iter().filter(|(x, y)| x == y).count() as f64 / pairs.len() as f64;
        if cfg.write_samples {
            let mut csv = Vec::new();
            pairs.write_csv(&mut csv)?;
            let csv = String::from_utf8(csv).expect("CSV output is UTF-8");
            out.data(
                &format!("pairs_d{d}.csv"),
                &csv,
                json!({ "pairs": pairs.sidecar(), "report": report }),
            )?;
        }
        extras.push(json!({ "depth": d, "equal_fraction": equal }));
        reports.push(report);
    }
    let path = out.data(
        "decay.csv",
        &tail::decay_csv(&reports),
        json!({ "rde": spec.name(), "boundary": law_name(cfg), "reports": reports, "equal_pairs": extras }),
    )?;
    let last = reports.last().expect("at least one depth");
    Ok(format!(
        "coupled {} depths={}..{} n={}: stat={:.6} baseline_q99={:.6} {} at depth {} -> {}",
        spec.name(),
        cfg.depth,
        last.depth,
        cfg.samples,
        last.stat,
        last.baseline_q99,
        serde_json::to_value(last.verdict)?.as_str().unwrap_or_default(),
        last.depth,
        path.display()
    ))
}

fn require_frozen(cfg: &RunConfig, what: &str) -> Result<()> {
    if cfg.rde != RdeName::FrozenPerc {
        return Err(Error::Argument(format!("{what} is only defined for --rde frozen-perc")));
    }
    Ok(())
}

fn grid_biv(cfg: &RunConfig, out: &Outputs) -> Result<String> {
    require_frozen(cfg, "grid-biv")?;
    let start = match cfg.start {
        StartName::Diagonal => Start::Diagonal,
        StartName::Product => Start::Product,
    };
    let run = grid::iterate_from(start, cfg.r, cfg.k, cfg.iters, cfg.tol)?;
    let floor = grid::quadrature_floor(cfg.r, cfg.k)?;
    let last = *run.trace.last().expect("trace is never empty");
    #[derive(Serialize)]
    struct Summary {
        verdict: grid::Verdict,
        iterations: usize,
        final_sup_h: f64,
        quadrature_floor: f64,
    }
    let summary = Summary {
        verdict: run.verdict,
        iterations: run.iterations(),
        final_sup_h: last,
        quadrature_floor: floor,
    };
    let path = out.data("trace.csv", &run.trace_csv(), serde_json::to_value(&summary)?)?;
    out.data(
        "grid.txt",
        &run.grid.to_portable(),
        json!({ "role": "F", "k": cfg.k, "r": cfg.r }),
    )?;
    Ok(format!(
        "grid-biv r={} k={}: {} after {} iterations, sup|H| = {last:.3e} (floor {floor:.3e}) -> {}",
        cfg.r,
        cfg.k,
        run.verdict.as_str(),
        run.iterations(),
        path.display()
    ))
}

fn grid_uni(cfg: &RunConfig, out: &Outputs) -> Result<String> {
    require_frozen(cfg, "grid-uni")?;
    let mut laws: Vec<(String, MarginalDist)> = Vec::new();
    if cfg.r == 3 {
        let avals = match cfg.a {
            Some(a) => vec![a],
            None => vec![0.6, 0.8, 1.0],
        };
        for a in avals {
            laws.push((format!("nu_a({a})"), MarginalDist::nu_a(a)?));
        }
    }
    laws.push((format!("nu_r({})", cfg.r), MarginalDist::nu_r(cfg.r)?));
    let half = (cfg.k / 2).max(2);
    let mut csv = String::from("law,k,residual,residual_half_k,ratio\n");
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, law) in &laws {
        let res = grid::fixed_point_residual(law, cfg.r, cfg.k)?;
        let res_half = grid::fixed_point_residual(law, cfg.r, half)?;
        let ratio = res_half / res;
        writeln!(csv, "{name},{},{res:?},{res_half:?},{ratio:?}", cfg.k).expect("writing to a String");
        rows.push(json!({ "law": name, "residual": res, "residual_half_k": res_half, "ratio": ratio }));
        worst = worst.max(res);
    }
    let path = out.data(
        "residuals.csv",
        &csv,
        json!({ "k": cfg.k, "half_k": half, "rows": rows }),
    )?;
    Ok(format!(
        "grid-uni r={} k={}: max residual {worst:.3e} over {} laws -> {}",
        cfg.r,
        cfg.k,
        laws.len(),
        path.display()
    ))
}

fn partition(cfg: &RunConfig, out: &Outputs) -> Result<String> {
    if cfg.r != 3 {
        return Err(Error::Argument(format!(
            "the partition certificate is for r = 3, got r = {}",
            cfg.r
        )));
    }
    let check = grid::partition_check(cfg.k)?;
    let min = grid::find_min_partition(cfg.eps)?;
    let mut csv = String::from("cells,bound\n");
    for c in 1..=min.cells {
        writeln!(csv, "{c},{:?}", grid::partition_check(c)?.bound).expect("writing to a String");
    }
    let path = out.data(
        "partition.csv",
        &csv,
        json!({ "check": check, "min_partition": min, "eps": cfg.eps }),
    )?;
    let warn = if min.outside_certificate_range {
        " (warning: eps >= 1/3 certifies no contraction)"
    } else {
        ""
    };
    Ok(format!(
        "partition: bound({}) = {}; least k with bound < {} is {} (bound {}){warn} -> {}",
        cfg.k,
        check.bound,
        cfg.eps,
        min.cells,
        min.bound,
        path.display()
    ))
}

fn mod2_theta(cfg: &RunConfig, out: &Outputs) -> Result<String> {
    let t = tail::theta_fixed(cfg.q, cfg.tol)?;
    let predicted = tail::theta_prediction(cfg.q, cfg.tol);
    let path = out.json(
        "mod2_theta.json",
        json!({ "theta": t.theta, "iterations": t.iterations, "predicted_iterations": predicted }),
    )?;
    Ok(format!(
        "{:.12} iterations={} predicted={predicted} -> {}",
        t.theta,
        t.iterations,
        path.display()
    ))
}

fn probe(cfg: &RunConfig, out: &Outputs) -> Result<String> {
    let spec = rde_spec(cfg)?;
    let knots = tail::constant_knots(&spec, cfg.knots)?;
    let report = tail::probe_sup(&spec, cfg.depth, cfg.samples, &knots, cfg.assignments, Seed(cfg.seed))?;
    let path = out.data("probe.csv", &report.csv(), serde_json::to_value(&report)?)?;
    Ok(format!(
        "probe {} depth={} n={}: max distance {:.6} over {} assignments (lower bound on the sup) -> {}",
        spec.name(),
        cfg.depth,
        cfg.samples,
        report.max_distance,
        report.rows.len(),
        path.display()
    ))
}
