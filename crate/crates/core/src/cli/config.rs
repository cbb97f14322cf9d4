//! Run configuration: defaults, a TOML file, and command-line flags, merged in
//! that order.
//!
//! A config file holds top-level keys plus optional tables named after
//! subcommands (`[rtp]`, `[grid-biv]`, …) whose keys apply only to that
//! subcommand. Keys are spelled exactly like the long flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RdeName {
    FrozenPerc,
    Mod2,
    Quicksort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StartName {
    Diagonal,
    Product,
}

/// Every configurable key, all optional. Doubles as the flag set of each
/// subcommand and as the schema of a config file (table).
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Overrides {
    #[arg(long, value_enum)]
    pub rde: Option<RdeName>,
    /// Tree degree for frozen percolation.
    #[arg(long)]
    pub r: Option<u32>,
    /// Flip probability for mod 2.
    #[arg(long)]
    pub q: Option<f64>,
    /// Boundary law `nu_a` for frozen percolation on the 3-regular tree.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub depth: Option<usize>,
    /// Last depth of a decay curve.
    #[arg(long)]
    pub depth_max: Option<usize>,
    #[arg(long)]
    pub depth_step: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Grid knots, partition cells, or probe lattice size.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub start: Option<StartName>,
    /// Target bound for the partition search.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Knots per coordinate for the independence statistic.
    #[arg(long)]
    pub knots: Option<usize>,
    /// Random per-leaf assignments probed besides the constant ones.
    #[arg(long)]
    pub assignments: Option<usize>,
    /// Write the sampled values, not just the summaries.
    #[arg(long)]
    pub write_samples: Option<bool>,
}

/// Fully resolved configuration. Serializes without `workers` and `out`,
/// which do not affect results.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub rde: RdeName,
    pub r: u32,
    pub q: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    pub depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth_max: Option<usize>,
    pub depth_step: usize,
    pub samples: usize,
    pub k: usize,
    pub tol: f64,
    pub iters: usize,
    pub seed: u64,
    #[serde(skip)]
    pub workers: Option<usize>,
    #[serde(skip)]
    pub out: PathBuf,
    pub start: StartName,
    pub eps: f64,
    pub knots: usize,
    pub assignments: usize,
    pub write_samples: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rde: RdeName::FrozenPerc,
            r: 3,
            q: 0.3,
            a: None,
            depth: 8,
            depth_max: None,
            depth_step: 4,
            samples: 10_000,
            k: 512,
            tol: 1e-3,
            iters: crate::grid::DEFAULT_MAX_ITERS,
            seed: 0,
            workers: None,
            out: PathBuf::from("out"),
            start: StartName::Diagonal,
            eps: crate::grid::CONTRACTION_LIMIT - 1e-6,
            knots: crate::tail::DEFAULT_EVAL_KNOTS,
            assignments: 4,
            write_samples: true,
        }
    }
}

/// Where a key's value came from, for error messages.
#[derive(Debug, Clone, Default)]
struct Origin {
    text: Option<String>,
    path: Option<PathBuf>,
}

impl Origin {
    fn locate(&self, key: &str) -> String {
        let (Some(text), Some(path)) = (&self.text, &self.path) else {
            return String::new();
        };
        for (n, line) in text.lines().enumerate() {
            let t = line.trim_start();
            if let Some(rest) = t.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return format!(" ({}:{})", path.display(), n + 1);
                }
            }
        }
        String::new()
    }
}

/// A parsed config file: top-level keys and per-subcommand tables.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    base: Overrides,
    sections: Vec<(String, Overrides)>,
    origin: Origin,
}

/// Subcommands that may have their own table in a config file.
pub const SECTIONS: [&str; 7] = [
    "rtp",
    "coupled",
    "grid-biv",
    "grid-uni",
    "partition",
    "mod2-theta",
    "probe",
];

fn key_error(origin: &Origin, e: toml::de::Error) -> Error {
    let msg = e.message().to_string();
    let key = msg.split('`').nth(1).map(|k| origin.locate(k)).unwrap_or_default();
    Error::Config(format!("{msg}{key}"))
}

impl ConfigFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let origin = Origin {
            text: Some(text.to_string()),
            path: Some(path.to_path_buf()),
        };
        let table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut base = toml::Table::new();
        let mut sections = Vec::new();
        for (key, value) in table {
            match value {
                toml::Value::Table(t) if SECTIONS.contains(&key.as_str()) => sections.push((key, t)),
                v => {
                    base.insert(key, v);
                }
            }
        }
        let base = Overrides::deserialize(base).map_err(|e| key_error(&origin, e))?;
        let sections = sections
            .into_iter()
            .map(|(k, t)| Ok((k, Overrides::deserialize(t).map_err(|e| key_error(&origin, e))?)))
            .collect::<Result<_>>()?;
        Ok(ConfigFile { base, sections, origin })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        ConfigFile::parse(&text, path)
    }
}

macro_rules! apply {
    ($cfg:ident, $o:expr, [$($f:ident),*], [$($opt:ident),*]) => {
        $( if let Some(v) = $o.$f.clone() { $cfg.$f = v; } )*
        $( if let Some(v) = $o.$opt.clone() { $cfg.$opt = Some(v); } )*
    };
}

fn apply(cfg: &mut RunConfig, o: &Overrides) {
    apply!(
        cfg,
        o,
        [
            rde,
            r,
            q,
            depth,
            depth_step,
            samples,
            k,
            tol,
            iters,
            seed,
            out,
            start,
            eps,
            knots,
            assignments,
            write_samples
        ],
        [a, depth_max, workers]
    );
}

/// Builds the configuration for `command` from an optional file and flags.
pub fn resolve(command: &str, file: Option<&ConfigFile>, flags: &Overrides) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut from_file = Overrides::default();
    if let Some(f) = file {
        apply(&mut cfg, &f.base);
        merge_into(&mut from_file, &f.base);
        for (name, o) in &f.sections {
            if name == command {
                apply(&mut cfg, o);
                merge_into(&mut from_file, o);
            }
        }
    }
    apply(&mut cfg, flags);
    let origin = file.map(|f| f.origin.clone()).unwrap_or_default();
    validate(&cfg).map_err(|(key, msg)| {
        // Point at the file only when the flags did not override the key.
        let at = if is_set(flags, key) || !is_set(&from_file, key) {
            String::new()
        } else {
            origin.locate(key)
        };
        Error::Config(format!("{key}: {msg}{at}"))
    })?;
    Ok(cfg)
}

fn merge_into(acc: &mut Overrides, o: &Overrides) {
    macro_rules! m {
        ($($f:ident),*) => { $( if o.$f.is_some() { acc.$f = o.$f.clone(); } )* };
    }
    m!(
        rde,
        r,
        q,
        a,
        depth,
        depth_max,
        depth_step,
        samples,
        k,
        tol,
        iters,
        seed,
        workers,
        out,
        start,
        eps,
        knots,
        assignments,
        write_samples
    );
}

fn is_set(o: &Overrides, key: &str) -> bool {
    match key {
        "rde" => o.rde.is_some(),
        "r" => o.r.is_some(),
        "q" => o.q.is_some(),
        "a" => o.a.is_some(),
        "depth" => o.depth.is_some(),
        "depth-max" => o.depth_max.is_some(),
        "depth-step" => o.depth_step.is_some(),
        "samples" => o.samples.is_some(),
        "k" => o.k.is_some(),
        "tol" => o.tol.is_some(),
        "iters" => o.iters.is_some(),
        "workers" => o.workers.is_some(),
        "eps" => o.eps.is_some(),
        "knots" => o.knots.is_some(),
        _ => false,
    }
}

fn validate(c: &RunConfig) -> std::result::Result<(), (&'static str, String)> {
    if c.r < 3 {
        return Err(("r", format!("tree degree must be >= 3, got {}", c.r)));
    }
    if !(0.0..=1.0).contains(&c.q) {
        return Err(("q", format!("must lie in [0, 1], got {}", c.q)));
    }
    if let Some(a) = c.a {
        if !(0.5..=1.0).contains(&a) {
            return Err(("a", format!("must lie in [1/2, 1], got {a}")));
        }
        if c.r != 3 {
            return Err(("a", format!("nu_a boundary laws exist only for r = 3, got r = {}", c.r)));
        }
    }
    if let Some(m) = c.depth_max {
        if m < c.depth {
            return Err(("depth-max", format!("must be >= depth ({}), got {m}", c.depth)));
        }
    }
    if c.depth_step == 0 {
        return Err(("depth-step", "must be >= 1".into()));
    }
    if c.samples == 0 {
        return Err(("samples", "must be >= 1".into()));
    }
    if c.k == 0 {
        return Err(("k", "must be >= 1".into()));
    }
    if !(c.tol > 0.0 && c.tol.is_finite()) {
        return Err(("tol", format!("must be positive, got {}", c.tol)));
    }
    if c.workers == Some(0) {
        return Err(("workers", "must be >= 1".into()));
    }
    if !(c.eps > 0.0 && c.eps.is_finite()) {
        return Err(("eps", format!("must be positive, got {}", c.eps)));
    }
    if c.knots == 0 {
        return Err(("knots", "must be >= 1".into()));
    }
    Ok(())
}

/// Loads and resolves a config file with no flag overrides.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    resolve("", Some(&ConfigFile::load(path)?), &Overrides::default())
}
