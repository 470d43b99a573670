//! `fnls`: batch runs of the simulation, probe and measure tools.
//!
//! Each subcommand writes `<out>/<name>.csv`, a `<name>_summary.json` echoing
//! the resolved configuration, and tidy plot data where it applies.

mod commands;
pub mod config;
pub mod plotdata;

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use fnls_core::inequality::DataKind;
use fnls_core::measure::SeriesKind;
use fnls_core::spectral::{DealiasRule, Sign};
use serde::Serialize;

pub use config::RunConfig;
pub use plotdata::{emit_plotdata, PlotKind, PlotPoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ASSERT: i32 = 2;

fn defaults_help() -> String {
    let text = toml::to_string(&RunConfig::default()).unwrap_or_default();
    format!("Configuration defaults (TOML, every key optional):\n\n{text}")
}

#[derive(Debug, Parser)]
#[command(
    name = "fnls",
    version,
    about = "Fractional cubic NLS on the cylinder: simulation, probes, measure scans"
)]
#[command(after_long_help = defaults_help())]
pub struct Cli {
    /// TOML configuration file; unknown keys are rejected.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = "fnls-out")]
    pub out: PathBuf,
    /// Exit with status 2 when a hypothesis or flatness check fails.
    #[arg(long, global = true)]
    pub assert: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "FNLS_THREADS", value_name = "N")]
    pub threads: Option<usize>,
    /// Ensemble seed; member i draws from seed ⊕ i.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Strang-split evolution with mass diagnostics and snapshots.
    Simulate(Overrides),
    /// Picard iteration of the integral equation on the time window.
    Picard(Overrides),
    /// Strichartz ratio sweep over frequency truncations.
    Strichartz(Overrides),
    /// Bilinear ratio sweep over modulation scales (K1, K2).
    Bilinear(Overrides),
    /// Inhomogeneous (Duhamel) ratio sweep over frequency truncations.
    Inhomog(Overrides),
    /// L4 / X^{b,s} embedding ratio sweep over frequency truncations.
    Embedding(Overrides),
    /// Measure enclosure for one (n0, C, K) query.
    Measure(Overrides),
    /// Scan of upper measure / K over the (n0, C, K) grid.
    Scan(Overrides),
    /// Dyadic partial sums of a majorant series.
    Series(Overrides),
    /// Quadrature checks of the integral bounds over the (C, K) grid.
    ProofBounds(Overrides),
    /// Norms of rescaled data and the fitted scaling exponent.
    Scaling(Overrides),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Picard(_) => "picard",
            Command::Strichartz(_) => "strichartz",
            Command::Bilinear(_) => "bilinear",
            Command::Inhomog(_) => "inhomog",
            Command::Embedding(_) => "embedding",
            Command::Measure(_) => "measure",
            Command::Scan(_) => "scan",
            Command::Series(_) => "series",
            Command::ProofBounds(_) => "proof_bounds",
            Command::Scaling(_) => "scaling",
        }
    }

    fn overrides(&self) -> &Overrides {
        match self {
            Command::Simulate(o)
            | Command::Picard(o)
            | Command::Strichartz(o)
            | Command::Bilinear(o)
            | Command::Inhomog(o)
            | Command::Embedding(o)
            | Command::Measure(o)
            | Command::Scan(o)
            | Command::Series(o)
            | Command::ProofBounds(o)
            | Command::Scaling(o) => o,
        }
    }
}

/// Command-line overrides of configuration keys.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// [symbol] alpha
    #[arg(long)]
    pub alpha: Option<f64>,
    /// [symbol] sign: elliptic or hyperbolic
    #[arg(long, value_parser = parse_sign)]
    pub sign: Option<Sign>,
    /// [grid] nx
    #[arg(long)]
    pub nx: Option<usize>,
    /// [grid] ny
    #[arg(long)]
    pub ny: Option<usize>,
    /// [grid] lx
    #[arg(long)]
    pub lx: Option<f64>,
    /// [grid] ly (planar grid)
    #[arg(long)]
    pub ly: Option<f64>,
    /// [time] dt
    #[arg(long)]
    pub dt: Option<f64>,
    /// [time] t_end
    #[arg(long)]
    pub t_end: Option<f64>,
    /// [time] delta
    #[arg(long)]
    pub delta: Option<f64>,
    /// [time] t0
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    /// [time] t1
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    /// [time] nt
    #[arg(long)]
    pub nt: Option<usize>,
    /// [nonlinearity] nu
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    /// [nonlinearity] dealias: off, two_thirds or half
    #[arg(long, value_parser = parse_dealias)]
    pub dealias: Option<DealiasRule>,
    /// [nonlinearity] snapshot_stride
    #[arg(long)]
    pub snapshot_stride: Option<usize>,
    /// [nonlinearity] max_iter
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// [nonlinearity] tol
    #[arg(long)]
    pub tol: Option<f64>,
    /// [data] amplitude
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// [data] snapshot (sets kind = snapshot)
    #[arg(long, value_name = "PATH")]
    pub snapshot: Option<PathBuf>,
    /// [probe] b
    #[arg(long)]
    pub b: Option<f64>,
    /// [probe] s or [scaling] s
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// [probe] members
    #[arg(long)]
    pub members: Option<usize>,
    /// [probe] truncations, comma separated
    #[arg(long, value_delimiter = ',')]
    pub truncations: Option<Vec<usize>>,
    /// [probe] kinds: gaussian, wave_packet, knapp
    #[arg(long, value_delimiter = ',', value_parser = parse_kind)]
    pub kinds: Option<Vec<DataKind>>,
    /// [probe] ks (bilinear) or [scan] ks (scan, proof-bounds), comma separated
    #[arg(long, value_delimiter = ',')]
    pub ks: Option<Vec<f64>>,
    /// [scan] xi0
    #[arg(long, allow_hyphen_values = true)]
    pub xi0: Option<f64>,
    /// [scan] n0
    #[arg(long, allow_hyphen_values = true)]
    pub n0: Option<i64>,
    /// [scan] c
    #[arg(long)]
    pub c: Option<f64>,
    /// [scan] k
    #[arg(long)]
    pub k: Option<f64>,
    /// [scan] trunc_n
    #[arg(long)]
    pub trunc: Option<u64>,
    /// [scan] n0s, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub n0s: Option<Vec<i64>>,
    /// [scan] cs, comma separated
    #[arg(long, value_delimiter = ',')]
    pub cs: Option<Vec<f64>>,
    /// [scan] adversarial
    #[arg(long)]
    pub adversarial: bool,
    /// [scan] series: s1_plus_hyp or s1_tilde_elliptic
    #[arg(long, value_parser = parse_series)]
    pub series: Option<SeriesKind>,
    /// [scan] n_max
    #[arg(long)]
    pub n_max: Option<u64>,
    /// [scaling] lambdas, comma separated
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    s.parse().map_err(|e: fnls_core::Error| e.to_string())
}

fn parse_kind(s: &str) -> Result<DataKind, String> {
    s.parse().map_err(|e: fnls_core::Error| e.to_string())
}

fn parse_series(s: &str) -> Result<SeriesKind, String> {
    s.parse().map_err(|e: fnls_core::Error| e.to_string())
}

fn parse_dealias(s: &str) -> Result<DealiasRule, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown dealias rule {s:?} (expected off, two_thirds or half)"))
}

fn set<T: Clone>(slot: &mut T, v: &Option<T>) {
    if let Some(v) = v {
        *slot = v.clone();
    }
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig, command: &str) {
        set(&mut cfg.symbol.alpha, &self.alpha);
        set(&mut cfg.symbol.sign, &self.sign);
        set(&mut cfg.grid.nx, &self.nx);
        set(&mut cfg.grid.ny, &self.ny);
        set(&mut cfg.grid.lx, &self.lx);
        if self.ly.is_some() {
            cfg.grid.ly = self.ly;
        }
        set(&mut cfg.time.dt, &self.dt);
        set(&mut cfg.time.t_end, &self.t_end);
        set(&mut cfg.time.delta, &self.delta);
        if self.t0.is_some() {
            cfg.time.t0 = self.t0;
        }
        if self.t1.is_some() {
            cfg.time.t1 = self.t1;
        }
        set(&mut cfg.time.nt, &self.nt);
        set(&mut cfg.nonlinearity.nu, &self.nu);
        set(&mut cfg.nonlinearity.dealias, &self.dealias);
        set(&mut cfg.nonlinearity.snapshot_stride, &self.snapshot_stride);
        set(&mut cfg.nonlinearity.max_iter, &self.max_iter);
        set(&mut cfg.nonlinearity.tol, &self.tol);
        set(&mut cfg.data.amplitude, &self.amplitude);
        if self.snapshot.is_some() {
            cfg.data.snapshot = self.snapshot.clone();
            cfg.data.kind = config::InitialKind::Snapshot;
        }
        set(&mut cfg.probe.b, &self.b);
        if command == "scaling" {
            set(&mut cfg.scaling.s, &self.s);
        } else {
            set(&mut cfg.probe.s, &self.s);
        }
        set(&mut cfg.probe.members, &self.members);
        set(&mut cfg.probe.truncations, &self.truncations);
        set(&mut cfg.probe.kinds, &self.kinds);
        if command == "bilinear" {
            set(&mut cfg.probe.ks, &self.ks);
        } else {
            set(&mut cfg.scan.ks, &self.ks);
        }
        set(&mut cfg.scan.xi0, &self.xi0);
        set(&mut cfg.scan.n0, &self.n0);
        set(&mut cfg.scan.c, &self.c);
        set(&mut cfg.scan.k, &self.k);
        set(&mut cfg.scan.trunc_n, &self.trunc);
        set(&mut cfg.scan.n0s, &self.n0s);
        if self.cs.is_some() {
            cfg.scan.cs = self.cs.clone();
        }
        cfg.scan.adversarial |= self.adversarial;
        set(&mut cfg.scan.series, &self.series);
        set(&mut cfg.scan.n_max, &self.n_max);
        set(&mut cfg.scaling.lambdas, &self.lambdas);
    }
}

/// Pass/fail outcome of one check; failures only change the exit code
/// under `--assert`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl Check {
    pub(crate) fn new(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            ok,
            detail: detail.into(),
        }
    }
}

/// What a subcommand hands back for the summary file.
pub(crate) struct Outcome {
    pub results: serde_json::Value,
    pub checks: Vec<Check>,
}

/// Configuration file (or defaults) with the command-line overrides applied.
pub fn resolve_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cli.command.overrides().apply(&mut cfg, cli.command.name());
    Ok(cfg)
}

/// Run the parsed command; returns the process exit code.
pub fn run(cli: &Cli) -> anyhow::Result<i32> {
    if let Some(n) = cli.threads {
        // A second call in the same process (tests) keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = resolve_config(cli)?;
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating output directory {}", cli.out.display()))?;
    let name = cli.command.name();
    let outcome = commands::dispatch(&cli.command, &cfg, &cli.out)?;
    let passed = outcome.checks.iter().all(|c| c.ok);
    let summary = serde_json::json!({
        "command": name,
        "resolved_config": cfg,
        "results": outcome.results,
        "checks": outcome.checks,
        "passed": passed,
    });
    let path = cli.out.join(format!("{name}_summary.json"));
    write_json(&path, &summary)?;
    for c in outcome.checks.iter().filter(|c| !c.ok) {
        eprintln!("check failed: {} ({})", c.name, c.detail);
    }
    Ok(if cli.assert && !passed { EXIT_ASSERT } else { EXIT_OK })
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
