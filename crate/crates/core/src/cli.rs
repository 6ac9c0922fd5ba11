//! The `patrol` command line.
//!
//! Exit status is 0 on success (or a patrolling schedule), 1 when a schedule
//! fails or a search is exhausted, and 2 on invalid input or I/O errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::coverage::{idle_profile, verify, CoverageError};
use crate::document::{Metadata, ScheduleDocument};
use crate::rational::Rational;
use crate::render::{render_svg, RenderOptions};
use crate::schedule::{AgentSpec, Schedule};
use crate::search::{search, InitialCandidate, SearchConfig, SearchStatus};
use crate::strategies::{
    bounds, fig1_schedule, fig2_schedule, partition_schedule_ordered, ratio,
    weighted_three_schedule, SegmentOrder,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "patrol", version, about = "Build, verify, search and draw fence-patrolling schedules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BuildKind {
    Partition,
    Fig1,
    Fig2,
    Weighted3,
}

#[derive(Debug, clap::Args)]
struct AgentArgs {
    /// Comma-separated agent speeds, e.g. 1,7/3,1/2.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    speeds: Vec<Rational>,
    /// Comma-separated weights, one per speed; all 1 when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    weights: Vec<Rational>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a schedule document exactly.
    Verify { path: PathBuf },
    /// Emit a certified schedule document on standard output.
    Build {
        #[arg(value_enum)]
        kind: BuildKind,
        #[command(flatten)]
        agents: AgentArgs,
        /// Fence length for partition schedules; the bound when omitted.
        #[arg(long)]
        length: Option<Rational>,
        /// Lay partition segments out slowest first instead of in input order.
        #[arg(long)]
        by_speed: bool,
    },
    /// Search for a schedule patrolling a fence of the given length.
    Search {
        #[command(flatten)]
        agents: AgentArgs,
        #[arg(long)]
        length: Rational,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 840)]
        grid: u64,
        #[arg(long)]
        period: Option<Rational>,
        /// Start from this schedule document; its agents are used when
        /// --speeds is omitted.
        #[arg(long)]
        warm: Option<PathBuf>,
        /// Start from random waypoints instead of proportional zigzags.
        #[arg(long, conflicts_with = "warm")]
        random_start: bool,
        /// Write the document here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a schedule document as an SVG space-time diagram.
    Render {
        path: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        periods: u32,
        #[arg(long, default_value_t = 100.0)]
        space_scale: f64,
        #[arg(long, default_value_t = 40.0)]
        time_scale: f64,
        #[arg(long, default_value_t = 0.35)]
        opacity: f64,
        /// Outline bands with dashed strokes.
        #[arg(long)]
        dotted: bool,
    },
    /// Print the partition length and the trivial upper bound.
    Bounds {
        #[command(flatten)]
        agents: AgentArgs,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Verify { path } => cmd_verify(&path, out),
        Command::Build {
            kind,
            agents,
            length,
            by_speed,
        } => cmd_build(kind, &agents, length, by_speed, out),
        Command::Search {
            agents,
            length,
            seed,
            budget,
            workers,
            grid,
            period,
            warm,
            random_start,
            out: path,
        } => {
            let cfg = SearchConfig {
                seed,
                budget,
                workers,
                grid_denominator: grid,
                period,
                ..SearchConfig::default()
            };
            cmd_search(&agents, &length, cfg, warm.as_deref(), random_start, path.as_deref(), out, err)
        }
        Command::Render {
            path,
            out: target,
            periods,
            space_scale,
            time_scale,
            opacity,
            dotted,
        } => {
            let opts = RenderOptions {
                periods_shown: periods,
                pixels_per_unit_space: space_scale,
                pixels_per_unit_time: time_scale,
                band_opacity: opacity,
                show_dotted_union: dotted,
                ..RenderOptions::default()
            };
            cmd_render(&path, target.as_deref(), &opts, out)
        }
        Command::Bounds { agents } => cmd_bounds(&agents, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn io_error(e: std::io::Error) -> Failure {
    invalid(format!("write failed: {e}"))
}

fn specs_from(args: &AgentArgs) -> Result<Vec<AgentSpec>, Failure> {
    if args.speeds.is_empty() {
        return Err(invalid("--speeds is required"));
    }
    if !args.weights.is_empty() && args.weights.len() != args.speeds.len() {
        return Err(invalid(format!(
            "{} weights given for {} speeds",
            args.weights.len(),
            args.speeds.len()
        )));
    }
    args.speeds
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = args.weights.get(i).cloned().unwrap_or_else(Rational::one);
            AgentSpec::new(v.clone(), w).map_err(|e| invalid(format!("agent {i}: {e}")))
        })
        .collect()
}

fn load(path: &Path) -> Result<Schedule, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let schedule = ScheduleDocument::parse(&text)
        .and_then(|doc| doc.to_schedule())
        .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    if let Some(first) = schedule.validate().first() {
        return Err(invalid(format!("{}: invalid schedule: {first}", path.display())));
    }
    Ok(schedule)
}

fn coverage_failure(e: CoverageError) -> Failure {
    invalid(e.to_string())
}

fn cmd_verify(path: &Path, out: &mut dyn Write) -> Outcome {
    let s = load(path)?;
    let verdict = verify(&s).map_err(coverage_failure)?;
    let label = if verdict.patrols() { "PATROLS" } else { "FAILS" };
    let mut text = format!("{label} l={} ratio={}\n", s.fence_length(), ratio(&s));
    if let Some(w) = &verdict.witness {
        text += &format!("witness x={} t*={}\n", w.x, w.t_star);
    }
    text += &format!("uncovered_area={}\n", verdict.uncovered_area);
    if s.common_weight().is_some() {
        let idle = idle_profile(&s).map_err(coverage_failure)?;
        match (&idle.global_max, &idle.argmax_x) {
            (Some(m), Some(x)) => text += &format!("max_idle={m} at x={x}\n"),
            _ => text += "max_idle=unbounded\n",
        }
    }
    out.write_all(text.as_bytes()).map_err(io_error)?;
    Ok(if verdict.patrols() { EXIT_OK } else { EXIT_FAILS })
}

fn emit_certified(s: &Schedule, meta: Metadata, out: &mut dyn Write) -> Result<(), Failure> {
    let certified = s.is_valid() && verify(s).is_ok_and(|v| v.patrols());
    if !certified {
        return Err(invalid("refusing to emit a schedule that does not patrol"));
    }
    let doc = ScheduleDocument::from_schedule(s, Some(meta));
    out.write_all(doc.to_json().as_bytes()).map_err(io_error)
}

fn cmd_build(
    kind: BuildKind,
    agents: &AgentArgs,
    length: Option<Rational>,
    by_speed: bool,
    out: &mut dyn Write,
) -> Outcome {
    let fixed = |s: Schedule| {
        if !agents.speeds.is_empty() || !agents.weights.is_empty() || length.is_some() {
            return Err(invalid("this kind takes no --speeds, --weights or --length"));
        }
        Ok(s)
    };
    let (name, s) = match kind {
        BuildKind::Partition => {
            let specs = specs_from(agents)?;
            let order = if by_speed {
                SegmentOrder::BySpeed
            } else {
                SegmentOrder::Input
            };
            let s = partition_schedule_ordered(&specs, length.as_ref(), order)
                .map_err(|e| invalid(e.to_string()))?;
            ("partition", s)
        }
        BuildKind::Fig1 => ("fig1", fixed(fig1_schedule())?),
        BuildKind::Fig2 => ("fig2", fixed(fig2_schedule())?),
        BuildKind::Weighted3 => ("weighted3", fixed(weighted_three_schedule())?),
    };
    let meta = Metadata {
        name: Some(name.to_string()),
        provenance: Some(format!("build {name}")),
        ..Metadata::default()
    };
    emit_certified(&s, meta, out)?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    agents: &AgentArgs,
    length: &Rational,
    mut cfg: SearchConfig,
    warm: Option<&Path>,
    random_start: bool,
    target: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    if !length.is_positive() {
        return Err(invalid("--length must be positive"));
    }
    let warm = warm.map(load).transpose()?;
    let specs = match &warm {
        Some(s) if agents.speeds.is_empty() => s.specs(),
        _ => specs_from(agents)?,
    };
    cfg.initial = match warm {
        Some(s) => InitialCandidate::Warm(s),
        None if random_start => InitialCandidate::Random,
        None => InitialCandidate::Proportional,
    };
    let outcome = search(&specs, length, &cfg);
    match (outcome.status, outcome.best_schedule) {
        (SearchStatus::Certified, Some(s)) => {
            let meta = Metadata {
                name: Some("search".into()),
                provenance: Some("search".into()),
                seed: Some(cfg.seed),
                budget: Some(cfg.budget),
                grid_denominator: Some(cfg.grid_denominator),
            };
            let _ = writeln!(err, "CERTIFIED after {} evaluations", outcome.evaluations);
            match target {
                Some(path) => {
                    let mut buf = Vec::new();
                    emit_certified(&s, meta, &mut buf)?;
                    fs::write(path, buf)
                        .map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))?;
                }
                None => emit_certified(&s, meta, out)?,
            }
            Ok(EXIT_OK)
        }
        _ => {
            writeln!(
                out,
                "EXHAUSTED evaluations={} best_uncovered_area={}",
                outcome.evaluations, outcome.best_uncovered_area
            )
            .map_err(io_error)?;
            Ok(EXIT_FAILS)
        }
    }
}

fn cmd_render(path: &Path, target: Option<&Path>, opts: &RenderOptions, out: &mut dyn Write) -> Outcome {
    let valid_scale = |v: f64| v.is_finite() && v > 0.0;
    if opts.periods_shown == 0 || !valid_scale(opts.pixels_per_unit_space) || !valid_scale(opts.pixels_per_unit_time) {
        return Err(invalid("periods and scales must be positive"));
    }
    let s = load(path)?;
    let svg = render_svg(&s, opts);
    match target {
        Some(p) => fs::write(p, svg).map_err(|e| invalid(format!("cannot write {}: {e}", p.display())))?,
        None => out.write_all(svg.as_bytes()).map_err(io_error)?,
    }
    Ok(EXIT_OK)
}

fn cmd_bounds(agents: &AgentArgs, out: &mut dyn Write) -> Outcome {
    let b = bounds(&specs_from(agents)?);
    let text = format!(
        "partition_length={} ({})\ntrivial_upper={} ({})\n",
        b.partition_length,
        b.partition_length.to_decimal(6),
        b.trivial_upper,
        b.trivial_upper.to_decimal(6)
    );
    out.write_all(text.as_bytes()).map_err(io_error)?;
    Ok(EXIT_OK)
}
