//! `lpp`: command-line harness for the last-passage percolation library.
//!
//! Every subcommand writes a self-describing JSON artifact (tool version +
//! resolved configuration + payload); experiment subcommands can also emit a
//! lossy CSV projection. Flags override config-file values; unknown config
//! keys are rejected. Exit codes: 0 success, 2 usage error, 3 moment-gate
//! refusal, 4 runtime failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use lpp::continuum::{generate_continuum, tail_bound, wk, TailBound};
use lpp::dist::WeightDistribution;
use lpp::experiments::{
    rows_to_csv, run_clt_shape, run_compare_continuum, run_scaling, run_slln, CltConfig,
    CompareConfig, CsvRow, ScalingConfig, SllnConfig,
};
use lpp::graph::{GraphWindow, PresenceModel, WindowInstance};
use lpp::passage::geodesic;
use lpp::renewal::{
    c_range, cycle_estimators, default_horizon, detect_renewals, CRange, CRangeMode,
};
use lpp::rng::trial_seed;

const TOOL_NAME: &str = "lpp";
const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

const EXIT_USAGE: u8 = 2;
const EXIT_GATE: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

impl From<lpp::Error> for Failure {
    fn from(err: lpp::Error) -> Self {
        let code = match &err {
            lpp::Error::Config(_) | lpp::Error::Domain(_) | lpp::Error::Parse(_) => EXIT_USAGE,
            lpp::Error::GateRefused(_) => EXIT_GATE,
            _ => EXIT_RUNTIME,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = TOOL_NAME,
    version,
    about = "Last-passage percolation on the integer line: windows, renewals, continuum comparison",
    propagate_version = true
)]
struct Cli {
    /// JSON file supplying defaults for any flag of the chosen subcommand;
    /// explicit flags win. Unknown keys are rejected.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a window instance file (lazy descriptor or materialized edges)
    Gen(GenArgs),
    /// Last-passage value and geodesic between two vertices
    Passage(PassageArgs),
    /// Renewal detection on one window
    Renewals(RenewalsArgs),
    /// Ratio stabilization of w(0,n)/n over an n grid
    Slln(SllnArgs),
    /// Moments of the renewal-standardized passage value
    Clt(CltArgs),
    /// Growth exponents of the longest/heaviest geodesic edge
    Scaling(ScalingArgs),
    /// KS comparison of normalized passage values against the continuum model
    Compare(CompareArgs),
    /// One continuum instance: truncated values and the tail bound
    Continuum(ContinuumArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: Option<u32>,
    /// Weight law spec, e.g. const:v=1, uniform:a=0.5,b=1.5, exp:rate=1,
    /// pareto:s=1.5, table:path=knots.csv
    #[arg(long)]
    dist: Option<String>,
    /// Constant edge-presence probability in (0, 1]
    #[arg(long)]
    p: Option<f64>,
    /// File of per-length presence probabilities (whitespace-separated)
    #[arg(long, value_name = "PATH")]
    p_table: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Freeze every present edge into an explicit list
    #[arg(long)]
    materialize: bool,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Output format (json)
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct PassageArgs {
    /// Saved instance file (alternative to --n/--dist/--p/--seed)
    #[arg(long, value_name = "PATH")]
    instance: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_name = "PATH")]
    p_table: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Source vertex (default 0)
    #[arg(long)]
    i: Option<u32>,
    /// Target vertex (default n)
    #[arg(long)]
    j: Option<u32>,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct RenewalsArgs {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_name = "PATH")]
    p_table: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Slope constant: a number, or "auto" for the admissible-range midpoint
    #[arg(long)]
    c: Option<String>,
    /// Truncation depth (default n/20)
    #[arg(long)]
    horizon: Option<u32>,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct SllnArgs {
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_name = "PATH")]
    p_table: Option<PathBuf>,
    /// Window sizes: "start:stop:xFACTOR" (geometric) or comma list
    #[arg(long)]
    n_grid: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Count unreachable windows as ratio 0 instead of excluding them
    #[arg(long)]
    l1_plus: bool,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Output format (json or csv)
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct CltArgs {
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_name = "PATH")]
    p_table: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    trials: Option<u64>,
    /// Slope constant: a number, or "auto" for the admissible-range midpoint
    #[arg(long)]
    c: Option<String>,
    /// Truncation depth (default n/20)
    #[arg(long)]
    horizon: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run despite an infinite third moment (no-Gaussian-limit regime)
    #[arg(long)]
    override_moment_gate: bool,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_name = "PATH")]
    p_table: Option<PathBuf>,
    #[arg(long)]
    n_grid: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    /// Tail index of the polynomial law, in (0, 2)
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    n_grid: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    /// Continuum truncation depth (default 10000)
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct ContinuumArgs {
    /// Tail index of the continuum law, in (0, 2)
    #[arg(long)]
    s: Option<f64>,
    /// Truncation depth (default 10000)
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

/// Config-file schema: every key optional, unknown keys rejected. The same
/// file can serve several subcommands; each reads only the keys it uses.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    dist: Option<String>,
    p: Option<f64>,
    p_table: Option<PathBuf>,
    n: Option<u32>,
    n_grid: Option<GridSpec>,
    trials: Option<u64>,
    seed: Option<u64>,
    c: Option<CSpec>,
    horizon: Option<u32>,
    k: Option<usize>,
    s: Option<f64>,
    i: Option<u32>,
    j: Option<u32>,
    instance: Option<PathBuf>,
    materialize: Option<bool>,
    l1_plus: Option<bool>,
    override_moment_gate: Option<bool>,
    output: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum GridSpec {
    Text(String),
    List(Vec<u32>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum CSpec {
    Number(f64),
    Text(String),
}

#[derive(Clone, Copy, PartialEq)]
enum OutputFormat {
    Json,
    Csv,
}

fn parse_format(spec: Option<String>) -> Result<OutputFormat, Failure> {
    match spec.as_deref() {
        None | Some("json") => Ok(OutputFormat::Json),
        Some("csv") => Ok(OutputFormat::Csv),
        Some(other) => Err(usage(format!(
            "format must be json or csv, got `{other}`"
        ))),
    }
}

/// Expands "start:stop:xFACTOR" into a geometric grid (entries rounded,
/// capped at stop), or parses a comma-separated list.
fn parse_grid(spec: &str) -> Result<Vec<u32>, Failure> {
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(usage(format!(
                "grid `{spec}` must look like start:stop:xFACTOR"
            )));
        }
        let start: u32 = parts[0]
            .parse()
            .map_err(|_| usage(format!("grid start `{}` is not an integer", parts[0])))?;
        let stop: u32 = parts[1]
            .parse()
            .map_err(|_| usage(format!("grid stop `{}` is not an integer", parts[1])))?;
        let factor: f64 = parts[2]
            .strip_prefix('x')
            .ok_or_else(|| usage(format!("grid factor `{}` must start with x", parts[2])))?
            .parse()
            .map_err(|_| usage(format!("grid factor `{}` is not a number", parts[2])))?;
        if start == 0 || stop < start {
            return Err(usage(format!(
                "grid needs 1 <= start <= stop, got {start}:{stop}"
            )));
        }
        if !(factor > 1.0 && factor.is_finite()) {
            return Err(usage(format!("grid factor must exceed 1, got x{factor}")));
        }
        let mut grid = Vec::new();
        for e in 0.. {
            let v = (f64::from(start) * factor.powi(e)).round();
            if v > f64::from(stop) {
                break;
            }
            let v = v as u32;
            if grid.last() != Some(&v) {
                grid.push(v);
            }
        }
        Ok(grid)
    } else {
        spec.split(',')
            .map(|tok| {
                tok.trim()
                    .parse()
                    .map_err(|_| usage(format!("grid entry `{tok}` is not an integer")))
            })
            .collect()
    }
}

fn read_to_string(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_RUNTIME,
        message: format!("reading {}: {e}", path.display()),
    })
}

fn load_file_config(path: Option<&PathBuf>) -> Result<FileConfig, Failure> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| usage(format!("config file {}: {e}", path.display())))
}

/// Field-by-field resolution: explicit flag beats config file beats default.
struct Resolver {
    file: FileConfig,
}

impl Resolver {
    fn dist(&self, flag: Option<String>) -> Result<WeightDistribution, Failure> {
        let spec = flag
            .or_else(|| self.file.dist.clone())
            .ok_or_else(|| usage("missing required key `dist`"))?;
        Ok(WeightDistribution::parse(&spec)?)
    }

    fn presence(
        &self,
        p_flag: Option<f64>,
        table_flag: Option<PathBuf>,
    ) -> Result<PresenceModel, Failure> {
        if p_flag.is_some() && table_flag.is_some() {
            return Err(usage("pass either `p` or `p_table`, not both"));
        }
        let (p, table) = match (p_flag, table_flag) {
            (None, None) => (self.file.p, self.file.p_table.clone()),
            other => other,
        };
        match (p, table) {
            (Some(_), Some(_)) => Err(usage("config sets both `p` and `p_table`")),
            (Some(p), None) => Ok(PresenceModel::constant(p)?),
            (None, Some(path)) => {
                let text = read_to_string(&path)?;
                let probs: Vec<f64> = text
                    .split_whitespace()
                    .map(|tok| {
                        tok.parse().map_err(|_| {
                            usage(format!(
                                "presence table {}: `{tok}` is not a number",
                                path.display()
                            ))
                        })
                    })
                    .collect::<Result<_, _>>()?;
                Ok(PresenceModel::per_length(probs)?)
            }
            (None, None) => Err(usage("missing required key `p` (or `p_table`)")),
        }
    }

    fn n(&self, flag: Option<u32>) -> Result<u32, Failure> {
        flag.or(self.file.n)
            .ok_or_else(|| usage("missing required key `n`"))
    }

    fn n_grid(&self, flag: Option<String>) -> Result<Vec<u32>, Failure> {
        match flag {
            Some(spec) => parse_grid(&spec),
            None => match &self.file.n_grid {
                Some(GridSpec::Text(spec)) => parse_grid(spec),
                Some(GridSpec::List(list)) => Ok(list.clone()),
                None => Err(usage("missing required key `n_grid`")),
            },
        }
    }

    fn trials(&self, flag: Option<u64>) -> Result<u64, Failure> {
        flag.or(self.file.trials)
            .ok_or_else(|| usage("missing required key `trials`"))
    }

    fn seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.file.seed).unwrap_or(0)
    }

    /// `None` means "auto": resolve from the admissible range before running.
    fn c(&self, flag: Option<String>) -> Result<Option<f64>, Failure> {
        let spec = match flag {
            Some(s) => Some(CSpec::Text(s)),
            None => self.file.c.clone(),
        };
        match spec {
            None => Ok(None),
            Some(CSpec::Number(v)) => Ok(Some(v)),
            Some(CSpec::Text(s)) if s == "auto" => Ok(None),
            Some(CSpec::Text(s)) => s
                .parse()
                .map(Some)
                .map_err(|_| usage(format!("`c` must be a number or \"auto\", got `{s}`"))),
        }
    }

    fn k_or(&self, flag: Option<usize>, default: usize) -> usize {
        flag.or(self.file.k).unwrap_or(default)
    }

    fn s(&self, flag: Option<f64>) -> Result<f64, Failure> {
        flag.or(self.file.s)
            .ok_or_else(|| usage("missing required key `s`"))
    }

    fn output(&self, flag: Option<PathBuf>) -> Option<PathBuf> {
        flag.or_else(|| self.file.output.clone())
    }

    fn format(&self, flag: Option<String>) -> Result<OutputFormat, Failure> {
        parse_format(flag.or_else(|| self.file.format.clone()))
    }

    fn flag(&self, cli: bool, file: Option<bool>) -> bool {
        cli || file.unwrap_or(false)
    }
}

/// Resolves "auto" c to the midpoint of the basic admissible range measured
/// on a probe window, returning the range alongside for the artifact echo.
fn resolve_c(
    c: Option<f64>,
    probe: &GraphWindow,
) -> Result<(f64, bool, Option<CRange>), Failure> {
    match c {
        Some(v) => Ok((v, false, None)),
        None => {
            let range = c_range(probe, CRangeMode::Basic)?;
            let mid = range.midpoint().ok_or_else(|| Failure {
                code: EXIT_RUNTIME,
                message: format!(
                    "auto c unavailable: admissible range [{}, {}] is degenerate; \
                     pass an explicit --c",
                    range.low, range.high
                ),
            })?;
            Ok((mid, true, Some(range)))
        }
    }
}

fn tool_block() -> serde_json::Value {
    json!({ "name": TOOL_NAME, "version": TOOL_VERSION })
}

struct Emit {
    output: Option<PathBuf>,
    format: OutputFormat,
}

impl Emit {
    /// Writes the artifact (JSON, or the CSV projection when requested and
    /// available) and prints the one-line summary on stderr.
    fn write(
        &self,
        artifact: &serde_json::Value,
        csv_rows: Option<Vec<CsvRow>>,
        summary: &str,
    ) -> Result<(), Failure> {
        let text = match (self.format, csv_rows) {
            (OutputFormat::Json, _) => {
                let mut t = serde_json::to_string_pretty(artifact).map_err(lpp::Error::from)?;
                t.push('\n');
                t
            }
            (OutputFormat::Csv, Some(rows)) => {
                let config = artifact.get("config").cloned().unwrap_or(json!(null));
                format!(
                    "# {TOOL_NAME} {TOOL_VERSION}\n# config: {config}\n{}",
                    rows_to_csv(&rows)
                )
            }
            (OutputFormat::Csv, None) => {
                return Err(usage("csv output is not available for this subcommand"));
            }
        };
        match &self.output {
            Some(path) => fs::write(path, text).map_err(|e| Failure {
                code: EXIT_RUNTIME,
                message: format!("writing {}: {e}", path.display()),
            })?,
            None => print!("{text}"),
        }
        eprintln!("{summary}");
        Ok(())
    }
}

fn cmd_gen(args: GenArgs, r: &Resolver) -> Result<(), Failure> {
    let emit = Emit {
        output: r.output(args.output),
        format: r.format(args.format)?,
    };
    let n = r.n(args.n)?;
    let dist = r.dist(args.dist)?;
    let p_model = r.presence(args.p, args.p_table)?;
    let seed = r.seed(args.seed);
    let materialize = r.flag(args.materialize, r.file.materialize);

    let window = GraphWindow::new(n, p_model.clone(), dist.clone(), seed)?;
    let instance = if materialize {
        window.materialize().to_instance()?
    } else {
        window.to_instance()?
    };
    let edge_count = match &instance {
        WindowInstance::Materialized { edges, .. } => Some(edges.len()),
        WindowInstance::Lazy { .. } => None,
    };
    let artifact = json!({
        "tool": tool_block(),
        "config": {
            "command": "gen",
            "n": n,
            "dist": dist.spec_string(),
            "p_model": p_model,
            "seed": seed,
            "materialize": materialize,
        },
        "instance": instance,
    });
    let summary = match edge_count {
        Some(m) => format!("gen: n={n}, materialized {m} edges"),
        None => format!("gen: n={n}, lazy descriptor"),
    };
    emit.write(&artifact, None, &summary)
}

/// Loads a window from an instance file, accepting both a bare
/// `WindowInstance` and a gen artifact wrapping one under "instance".
fn load_instance(path: &Path) -> Result<GraphWindow, Failure> {
    let text = read_to_string(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let inner = value.get("instance").cloned().unwrap_or(value);
    let instance: WindowInstance = serde_json::from_value(inner)
        .map_err(|e| usage(format!("{}: not a window instance: {e}", path.display())))?;
    Ok(GraphWindow::from_instance(instance)?)
}

fn cmd_passage(args: PassageArgs, r: &Resolver) -> Result<(), Failure> {
    let emit = Emit {
        output: r.output(args.output),
        format: r.format(args.format)?,
    };
    let instance_path = args.instance.or_else(|| r.file.instance.clone());
    if instance_path.is_some() && (args.n.is_some() || args.dist.is_some()) {
        return Err(usage("pass either `instance` or `n`/`dist`/`p`, not both"));
    }
    let (window, source) = match instance_path {
        Some(path) => (load_instance(&path)?, json!(path.display().to_string())),
        None => {
            let n = r.n(args.n)?;
            let dist = r.dist(args.dist)?;
            let p_model = r.presence(args.p, args.p_table)?;
            let seed = r.seed(args.seed);
            (
                GraphWindow::new(n, p_model.clone(), dist.clone(), seed)?,
                json!({
                    "n": n,
                    "dist": dist.spec_string(),
                    "p_model": p_model,
                    "seed": seed,
                }),
            )
        }
    };
    let i = args.i.or(r.file.i).unwrap_or(0);
    let j = args.j.or(r.file.j).unwrap_or(window.n());
    if !(i < j && j <= window.n()) {
        return Err(usage(format!(
            "need i < j <= n, got i={i}, j={j}, n={}",
            window.n()
        )));
    }
    let report = geodesic(&window, i, j);
    let artifact = json!({
        "tool": tool_block(),
        "config": { "command": "passage", "window": source, "i": i, "j": j },
        "report": report,
    });
    let summary = match report.value {
        Some(v) => format!(
            "passage: w({i},{j}) = {v} (longest edge {}, heaviest {})",
            report.ell.unwrap(),
            report.h.unwrap()
        ),
        None => format!("passage: {j} is unreachable from {i}"),
    };
    emit.write(&artifact, None, &summary)
}

fn cmd_renewals(args: RenewalsArgs, r: &Resolver) -> Result<(), Failure> {
    let emit = Emit {
        output: r.output(args.output),
        format: r.format(args.format)?,
    };
    let n = r.n(args.n)?;
    let dist = r.dist(args.dist)?;
    let p_model = r.presence(args.p, args.p_table)?;
    let seed = r.seed(args.seed);
    let horizon = args
        .horizon
        .or(r.file.horizon)
        .unwrap_or_else(|| default_horizon(n));

    let window = GraphWindow::new(n, p_model.clone(), dist.clone(), seed)?;
    let (c, c_auto, range) = resolve_c(r.c(args.c)?, &window)?;
    let analysis = detect_renewals(&window, c, horizon)?;
    let estimates = (analysis.gamma_points.len() >= 2)
        .then(|| cycle_estimators(&analysis, c))
        .transpose()?;

    let artifact = json!({
        "tool": tool_block(),
        "config": {
            "command": "renewals",
            "n": n,
            "dist": dist.spec_string(),
            "p_model": p_model,
            "seed": seed,
            "c": c,
            "c_auto": c_auto,
            "horizon": horizon,
        },
        "report": {
            "analysis": analysis,
            "lambda_hat": analysis.lambda_hat(),
            "candidate_span": analysis.candidate_span(),
            "c_range": range,
            "estimates": estimates,
        },
    });
    let summary = format!(
        "renewals: {} points over span {}, lambda_hat = {:.5}, c = {c}{}",
        analysis.gamma_points.len(),
        analysis.candidate_span(),
        analysis.lambda_hat(),
        if c_auto { " (auto)" } else { "" }
    );
    emit.write(&artifact, None, &summary)
}

fn cmd_slln(args: SllnArgs, r: &Resolver) -> Result<(), Failure> {
    let emit = Emit {
        output: r.output(args.output),
        format: r.format(args.format)?,
    };
    let report = run_slln(&SllnConfig {
        dist: r.dist(args.dist)?,
        p_model: r.presence(args.p, args.p_table)?,
        n_grid: r.n_grid(args.n_grid)?,
        trials: r.trials(args.trials)?,
        seed: r.seed(args.seed),
        l1_plus: r.flag(args.l1_plus, r.file.l1_plus),
    })?;
    let artifact = json!({
        "tool": tool_block(),
        "config": report.config,
        "report": report,
    });
    let summary = format!(
        "slln: {} grid points x {} trials, means {:?}",
        report.points.len(),
        report.config.trials,
        report
            .points
            .iter()
            .map(|p| p.ratio_mean.map(|m| format!("{m:.4}")))
            .collect::<Vec<_>>()
    );
    emit.write(&artifact, Some(report.to_csv_rows()), &summary)
}

fn cmd_clt(args: CltArgs, r: &Resolver) -> Result<(), Failure> {
    let emit = Emit {
        output: r.output(args.output),
        format: r.format(args.format)?,
    };
    let n = r.n(args.n)?;
    let dist = r.dist(args.dist)?;
    let p_model = r.presence(args.p, args.p_table)?;
    let seed = r.seed(args.seed);
    let horizon = args
        .horizon
        .or(r.file.horizon)
        .unwrap_or_else(|| default_horizon(n));

    // "auto" c is estimated on the first trial's window, the same window the
    // experiment itself will draw.
    let probe = GraphWindow::new(n, p_model.clone(), dist.clone(), trial_seed(seed, 0))?;
    let (c, c_auto, range) = resolve_c(r.c(args.c)?, &probe)?;

    let report = run_clt_shape(&CltConfig {
        dist,
        p_model,
        n,
        trials: r.trials(args.trials)?,
        c,
        horizon,
        seed,
        override_moment_gate: r.flag(args.override_moment_gate, r.file.override_moment_gate),
        t_grid: vec![],
    })?;
    let artifact = json!({
        "tool": tool_block(),
        "config": report.config,
        "c_auto": c_auto,
        "c_range": range,
        "report": report,
    });
    let summary = if report.degenerate {
        format!(
            "clt: degenerate (sigma2 = 0) over {} trials at c = {c}",
            report.trials_used
        )
    } else {
        let m = report.z_moments.unwrap();
        format!(
            "clt: var(z) = {:.3}, skew = {:.3}, kurt = {:.3} over {} trials at c = {c}{}",
            m.variance,
            m.skewness,
            m.kurtosis,
            report.trials_used,
            if c_auto { " (auto)" } else { "" }
        )
    };
    emit.write(&artifact, Some(report.to_csv_rows()), &summary)
}

fn cmd_scaling(args: ScalingArgs, r: &Resolver) -> Result<(), Failure> {
    let emit = Emit {
        output: r.output(args.output),
        format: r.format(args.format)?,
    };
    let report = run_scaling(&ScalingConfig {
        dist: r.dist(args.dist)?,
        p_model: r.presence(args.p, args.p_table)?,
        n_grid: r.n_grid(args.n_grid)?,
        trials: r.trials(args.trials)?,
        seed: r.seed(args.seed),
    })?;
    let artifact = json!({
        "tool": tool_block(),
        "config": report.config,
        "report": report,
    });
    let summary = format!(
        "scaling: slopes ell = {:.3}, h = {:.3}, w = {:.3} over {} grid points",
        report.ell_fit.slope,
        report.h_fit.slope,
        report.w_fit.slope,
        report.points.len()
    );
    emit.write(&artifact, Some(report.to_csv_rows()), &summary)
}

fn cmd_compare(args: CompareArgs, r: &Resolver) -> Result<(), Failure> {
    let emit = Emit {
        output: r.output(args.output),
        format: r.format(args.format)?,
    };
    let p = args
        .p
        .or(r.file.p)
        .ok_or_else(|| usage("missing required key `p`"))?;
    let report = run_compare_continuum(&CompareConfig {
        s: r.s(args.s)?,
        p,
        n_grid: r.n_grid(args.n_grid)?,
        trials: r.trials(args.trials)?,
        k: r.k_or(args.k, 10_000),
        seed: r.seed(args.seed),
    })?;
    let artifact = json!({
        "tool": tool_block(),
        "config": report.config,
        "report": report,
    });
    let summary = format!(
        "compare: KS {:?} over n grid {:?}",
        report
            .points
            .iter()
            .map(|pt| format!("{:.3}", pt.ks))
            .collect::<Vec<_>>(),
        report.config.n_grid
    );
    emit.write(&artifact, Some(report.to_csv_rows()), &summary)
}

fn cmd_continuum(args: ContinuumArgs, r: &Resolver) -> Result<(), Failure> {
    let emit = Emit {
        output: r.output(args.output),
        format: r.format(args.format)?,
    };
    let s = r.s(args.s)?;
    let k = r.k_or(args.k, 10_000);
    if k < 2 {
        return Err(usage("continuum needs k >= 2 to report the increment"));
    }
    let seed = r.seed(args.seed);
    let instance = generate_continuum(s, k, seed)?;
    let w_full = wk(&instance, k)?;
    let w_half = wk(&instance, k / 2)?;
    let increment = w_full - w_half;
    // The checkpointed bound controls how much the value can still grow past
    // depth k/2; it needs at least one interior checkpoint, hence k >= 3.
    let bound: Option<TailBound> = (k >= 3)
        .then(|| tail_bound(&instance, k / 2, k - 1))
        .transpose()?;
    let artifact = json!({
        "tool": tool_block(),
        "config": { "command": "continuum", "s": s, "k": k, "seed": seed },
        "report": {
            "wk": w_full,
            "wk_half": w_half,
            "increment": increment,
            "tail_bound": bound,
            "bound_holds": bound.map(|b| increment <= b.upper_bound()),
        },
    });
    let summary = format!(
        "continuum: w^{k} = {w_full:.6}, increment past k/2 = {increment:.3e}{}",
        match bound {
            Some(b) => format!(" <= bound {:.3e}", b.upper_bound()),
            None => String::new(),
        }
    );
    emit.write(&artifact, None, &summary)
}

fn configure_workers() -> Result<(), Failure> {
    match std::env::var("LPP_WORKERS") {
        Err(_) => Ok(()),
        Ok(v) => {
            let workers: usize = v
                .parse()
                .ok()
                .filter(|&w| w > 0)
                .ok_or_else(|| usage(format!("LPP_WORKERS must be a positive integer, got `{v}`")))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build_global()
                .map_err(|e| Failure {
                    code: EXIT_RUNTIME,
                    message: format!("worker pool: {e}"),
                })
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_workers()?;
    let r = Resolver {
        file: load_file_config(cli.config.as_ref())?,
    };
    match cli.command {
        Command::Gen(args) => cmd_gen(args, &r),
        Command::Passage(args) => cmd_passage(args, &r),
        Command::Renewals(args) => cmd_renewals(args, &r),
        Command::Slln(args) => cmd_slln(args, &r),
        Command::Clt(args) => cmd_clt(args, &r),
        Command::Scaling(args) => cmd_scaling(args, &r),
        Command::Compare(args) => cmd_compare(args, &r),
        Command::Continuum(args) => cmd_continuum(args, &r),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
