//! Command-line front end: single-point bound computation, SNR sweeps,
//! discrete-memoryless evaluation/search, and oracle validation runs.
//!
//! Exit codes: 0 success, 2 invalid input, 3 evaluator/optimizer failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use relaycap::bounds::{Thm4Params, Thm5Params};
use relaycap::dm::search::{search_thm2, Thm2Channel};
use relaycap::dm::{eval_thm1, eval_thm2, Thm1Input, Thm2Input};
use relaycap::sweep::{rows_to_csv, run_point, run_sweep_rows, BoundKind, SweepAxis, SweepSpec};
use relaycap::validate::{
    sample_covariance_check, validate_thm4_effective_channel, validate_thm5_terms,
};
use relaycap::{db_to_linear, ChannelParams, GaussianJoint, OptimizerConfig};

#[derive(Parser)]
#[command(
    name = "relaycap",
    about = "Capacity bounds for the Gaussian relay channel with source-side state knowledge",
    version
)]
struct Cli {
    /// JSON config with `channel` and `optimizer` sections; command-line
    /// flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format (sweeps support both; other commands emit JSON).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Coarse grid points per dimension.
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Pattern-search refinement iterations.
    #[arg(long, global = true)]
    refine_iters: Option<usize>,

    /// Absolute objective tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Seed for randomized operations (DM search, sampling checks).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate bounds at a single channel point.
    Point {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Comma-separated subset of upper,cutset,thm4,thm5,df_noise,asymptotes.
        #[arg(long, value_delimiter = ',')]
        bounds: Vec<String>,
    },
    /// Sweep one parameter and emit a curve per bound.
    Sweep {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Axis: snr_db (10log10(p1/n2), varied through n2) or one of
        /// p1,p2,q,n2,n3 (linear units).
        #[arg(long)]
        axis: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        points: usize,
        #[arg(long, value_delimiter = ',')]
        bounds: Vec<String>,
    },
    /// Discrete-memoryless rate expressions.
    Dm {
        #[command(subcommand)]
        command: DmCommand,
    },
    /// Cross-check closed forms against covariance/sampling oracles.
    Validate {
        /// thm4 | thm5 | sampling
        #[arg(long)]
        target: String,
        /// JSON parameter file (see README for the per-target schema).
        #[arg(long)]
        params: PathBuf,
        /// Sample count for the sampling target.
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum DmCommand {
    /// Evaluate a fixed factorization from a JSON fixture.
    Eval {
        /// 1 or 2
        #[arg(long)]
        theorem: u8,
        #[arg(long)]
        input: PathBuf,
    },
    /// Heuristic search over tiny-alphabet factorizations (theorem 2 only).
    Search {
        /// Must be 2.
        #[arg(long)]
        theorem: u8,
        /// JSON file with the state law and channel law.
        #[arg(long)]
        channel: PathBuf,
        /// Cardinalities, e.g. u=2,ur=2,x=2.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<String>,
        #[arg(long, default_value_t = 8)]
        restarts: u32,
    },
}

/// Channel parameters, linear or dB; flags override the config file.
#[derive(Args, Default, Clone)]
struct ChannelArgs {
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p1_db: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p2_db: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    q_db: Option<f64>,
    #[arg(long)]
    n2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    n2_db: Option<f64>,
    #[arg(long)]
    n3: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    n3_db: Option<f64>,
}

/// `channel` section of the config file: every field may be given in
/// linear units or with a `_db` suffix, never both. All values are stored
/// linear internally.
#[derive(Deserialize, Default, Clone)]
#[serde(deny_unknown_fields)]
struct ChannelConfig {
    p1: Option<f64>,
    p1_db: Option<f64>,
    p2: Option<f64>,
    p2_db: Option<f64>,
    q: Option<f64>,
    q_db: Option<f64>,
    n2: Option<f64>,
    n2_db: Option<f64>,
    n3: Option<f64>,
    n3_db: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    channel: ChannelConfig,
    optimizer: Option<OptimizerConfig>,
}

enum CliError {
    /// Bad arguments, files, or schemas: exit code 2.
    Input(String),
    /// The computation itself failed: exit code 3.
    Eval(String),
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
    fn eval(e: impl std::fmt::Display) -> Self {
        CliError::Eval(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Eval(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let file_config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<FileConfig>(&text)
                .map_err(|e| CliError::Input(format!("bad config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let mut opt = file_config.optimizer.clone().unwrap_or_default();
    if let Some(g) = cli.grid {
        opt.grid_points_per_dim = g;
    }
    if let Some(r) = cli.refine_iters {
        opt.refine_iters = r;
    }
    if let Some(t) = cli.tol {
        opt.tol = t;
    }
    if let Some(s) = cli.seed {
        opt.seed = s;
    }
    opt.validate().map_err(CliError::input)?;
    let seed = cli.seed.unwrap_or(0);

    // every subcommand except sweep emits JSON only
    if cli.format == Some(Format::Csv) && !matches!(cli.command, Command::Sweep { .. }) {
        return Err(CliError::Input(
            "csv output is available for sweep only".into(),
        ));
    }

    let output = match &cli.command {
        Command::Point { channel, bounds } => {
            let ch = resolve_channel(channel, &file_config.channel, None)?;
            let bounds = parse_bounds(bounds)?;
            let record = run_point(&ch, &bounds, &opt).map_err(CliError::eval)?;
            to_json(&record)?
        }
        Command::Sweep {
            channel,
            axis,
            from,
            to,
            points,
            bounds,
        } => {
            let axis: SweepAxis = axis.parse().map_err(CliError::input)?;
            let fixed = resolve_channel(channel, &file_config.channel, Some(axis))?;
            let spec = SweepSpec {
                axis,
                lo: *from,
                hi: *to,
                points: *points,
                fixed,
                bounds: parse_bounds(bounds)?,
            };
            spec.validate().map_err(CliError::input)?;
            let rows = run_sweep_rows(&spec, &opt).map_err(CliError::eval)?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => rows_to_csv(&rows),
                Format::Json => to_json(&rows)?,
            }
        }
        Command::Dm { command } => match command {
            DmCommand::Eval { theorem, input } => {
                let text = read_file(input)?;
                let report = match theorem {
                    1 => {
                        let input: Thm1Input = parse_json(&text, input)?;
                        input.validate().map_err(CliError::input)?;
                        eval_thm1(&input).map_err(CliError::eval)?
                    }
                    2 => {
                        let input: Thm2Input = parse_json(&text, input)?;
                        input.validate().map_err(CliError::input)?;
                        eval_thm2(&input).map_err(CliError::eval)?
                    }
                    other => {
                        return Err(CliError::Input(format!(
                            "theorem must be 1 or 2, got {other}"
                        )))
                    }
                };
                to_json(&report)?
            }
            DmCommand::Search {
                theorem,
                channel,
                sizes,
                restarts,
            } => {
                if *theorem != 2 {
                    return Err(CliError::Input(
                        "search is available for theorem 2 only; theorem 1 is evaluation-only"
                            .into(),
                    ));
                }
                let text = read_file(channel)?;
                let chan: Thm2Channel = parse_json(&text, channel)?;
                chan.validate().map_err(CliError::input)?;
                let sizes = parse_sizes(sizes)?;
                let outcome =
                    search_thm2(&chan, &sizes, *restarts, seed).map_err(CliError::eval)?;
                to_json(&outcome)?
            }
        },
        Command::Validate {
            target,
            params,
            samples,
        } => {
            let text = read_file(params)?;
            match target.as_str() {
                "thm4" => {
                    #[derive(Deserialize)]
                    #[serde(deny_unknown_fields)]
                    struct P {
                        channel: ChannelConfig,
                        gamma: f64,
                    }
                    let p: P = parse_json(&text, params)?;
                    let ch = resolve_channel(&ChannelArgs::default(), &p.channel, None)?;
                    let report =
                        validate_thm4_effective_channel(&ch, &Thm4Params { gamma: p.gamma })
                            .map_err(CliError::eval)?;
                    to_json(&report)?
                }
                "thm5" => {
                    #[derive(Deserialize)]
                    #[serde(deny_unknown_fields)]
                    struct P {
                        channel: ChannelConfig,
                        beta: f64,
                        gamma: f64,
                        alpha: f64,
                    }
                    let p: P = parse_json(&text, params)?;
                    let ch = resolve_channel(&ChannelArgs::default(), &p.channel, None)?;
                    let report = validate_thm5_terms(
                        &ch,
                        &Thm5Params {
                            beta: p.beta,
                            gamma: p.gamma,
                            alpha: p.alpha,
                        },
                    )
                    .map_err(CliError::eval)?;
                    to_json(&report)?
                }
                "sampling" => {
                    #[derive(Deserialize)]
                    #[serde(deny_unknown_fields)]
                    struct P {
                        names: Vec<String>,
                        cov: Vec<Vec<f64>>,
                    }
                    let p: P = parse_json(&text, params)?;
                    let n = p.names.len();
                    if p.cov.len() != n || p.cov.iter().any(|r| r.len() != n) {
                        return Err(CliError::Input(format!(
                            "cov must be a {n}x{n} matrix matching `names`"
                        )));
                    }
                    let cov = nalgebra::DMatrix::from_fn(n, n, |i, j| p.cov[i][j]);
                    let joint = GaussianJoint::new(p.names, cov).map_err(CliError::input)?;
                    let report =
                        sample_covariance_check(&joint, *samples, seed).map_err(CliError::eval)?;
                    to_json(&report)?
                }
                other => {
                    return Err(CliError::Input(format!(
                        "unknown target `{other}` (expected thm4, thm5 or sampling)"
                    )))
                }
            }
        }
    };

    let mut output = output;
    if !output.ends_with('\n') {
        output.push('\n');
    }
    match &cli.out {
        Some(path) => fs::write(path, output)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{output}");
            Ok(())
        }
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, path: &Path) -> CliResult<T> {
    serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("bad JSON in {}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Eval(e.to_string()))
}

fn parse_bounds(names: &[String]) -> CliResult<Vec<BoundKind>> {
    let mut out = Vec::new();
    for name in names {
        let name = name.trim();
        if name.is_empty() {
            continue;
        }
        let kind: BoundKind = name.parse().map_err(CliError::input)?;
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    if out.is_empty() {
        return Err(CliError::Input("no bounds requested".into()));
    }
    Ok(out)
}

fn parse_sizes(entries: &[String]) -> CliResult<BTreeMap<String, usize>> {
    let mut out = BTreeMap::new();
    for entry in entries {
        let (name, value) = entry
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("bad size `{entry}`, expected name=count")))?;
        let count: usize = value
            .parse()
            .map_err(|_| CliError::Input(format!("bad cardinality in `{entry}`")))?;
        out.insert(name.trim().to_string(), count);
    }
    Ok(out)
}

/// Merge one channel field from flag (wins) or config, converting dB.
fn merge_field(
    name: &str,
    flag_lin: Option<f64>,
    flag_db: Option<f64>,
    cfg_lin: Option<f64>,
    cfg_db: Option<f64>,
) -> CliResult<Option<f64>> {
    if flag_lin.is_some() && flag_db.is_some() {
        return Err(CliError::Input(format!(
            "give either --{name} or --{name}-db, not both"
        )));
    }
    if cfg_lin.is_some() && cfg_db.is_some() {
        return Err(CliError::Input(format!(
            "config gives both {name} and {name}_db"
        )));
    }
    Ok(flag_lin
        .or(flag_db.map(db_to_linear))
        .or(cfg_lin)
        .or(cfg_db.map(db_to_linear)))
}

fn resolve_channel(
    args: &ChannelArgs,
    cfg: &ChannelConfig,
    axis: Option<SweepAxis>,
) -> CliResult<ChannelParams> {
    let p1 = merge_field("p1", args.p1, args.p1_db, cfg.p1, cfg.p1_db)?;
    let p2 = merge_field("p2", args.p2, args.p2_db, cfg.p2, cfg.p2_db)?;
    let q = merge_field("q", args.q, args.q_db, cfg.q, cfg.q_db)?;
    let n2 = merge_field("n2", args.n2, args.n2_db, cfg.n2, cfg.n2_db)?;
    let n3 = merge_field("n3", args.n3, args.n3_db, cfg.n3, cfg.n3_db)?;
    // a swept field may be omitted; its placeholder is overwritten per point
    let placeholder = |field: SweepAxis, v: Option<f64>| -> Option<f64> {
        match (axis, v) {
            (Some(a), None) if a == field => Some(1.0),
            (Some(SweepAxis::SnrDb), None) if field == SweepAxis::N2 => Some(1.0),
            _ => v,
        }
    };
    let p1 = placeholder(SweepAxis::P1, p1);
    let p2 = placeholder(SweepAxis::P2, p2);
    let q = placeholder(SweepAxis::Q, q);
    let n2 = placeholder(SweepAxis::N2, n2);
    let n3 = placeholder(SweepAxis::N3, n3);
    let require = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| {
            CliError::Input(format!("missing channel parameter {name} (flag or config)"))
        })
    };
    ChannelParams::new(
        require("p1", p1)?,
        require("p2", p2)?,
        require("q", q)?,
        require("n2", n2)?,
        require("n3", n3)?,
    )
    .map_err(CliError::input)
}
