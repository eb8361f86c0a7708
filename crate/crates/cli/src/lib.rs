//! Command-line front end for `pathfree-core`.
//!
//! Exit codes: 0 success, 1 verified failure (over budget, witness path,
//! uncertified extraction, inequality violation), 2 usage or I/O error,
//! 3 internal invariant violation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pathfree_core::bins::checks::{run_suite, Grid, SuiteConfig};
use pathfree_core::bins::{monte_carlo_max_load, BinsQuery, BinsStats, McEstimate, DEFAULT_EXACT_CAP};
use pathfree_core::extract::{find_pk_free_subgraph, key_lemma_extract, ExtractError, DEFAULT_TRIALS};
use pathfree_core::generate::{generate, render, Model};
use pathfree_core::graph::{parse_edge_list, Graph};
use pathfree_core::pipeline::{colour_graph, parse_colouring, serialize_colouring, PipelineError, PipelineParams};
use pathfree_core::verify::{verify_with, VerificationReport, VerifyOptions, DEFAULT_EXACT_CAP as VERIFY_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "pathfree", version, about = "Edge colourings without long monochromatic paths")]
pub struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Colour a graph with at most r colours and no monochromatic P_k.
    Colour(ColourArgs),
    /// Check a colouring for monochromatic paths on k vertices.
    Verify(VerifyArgs),
    /// Extract a P_k-free subgraph.
    Extract(ExtractArgs),
    /// Exact and sampled balls-and-bins statistics over a grid.
    Bins(BinsArgs),
    /// Run the balls-and-bins inequality suite.
    CheckInequalities(CheckArgs),
    /// Write a random graph as an edge list.
    Generate(GenerateArgs),
}

#[derive(Args, Debug)]
pub struct ColourArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Colouring file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON run report to write.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    /// Replace the solved β_0 (for example 0.5 to exercise the rounds).
    #[arg(long)]
    pub beta0: Option<f64>,
    #[arg(long, default_value_t = VERIFY_CAP)]
    pub exact_cap: usize,
    /// Refuse to run when the size preconditions fail.
    #[arg(long)]
    pub enforce_preconditions: bool,
    #[arg(long, hide = true)]
    pub inject_overspend: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// The graph the colouring should cover.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub colouring: PathBuf,
    /// Defaults to the colouring file header.
    #[arg(long)]
    pub r: Option<usize>,
    /// Defaults to the colouring file header.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = VERIFY_CAP)]
    pub exact_cap: usize,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Edge list of the extracted subgraph.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub k: usize,
    /// Run the degree-class selection with this r first.
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
}

#[derive(Args, Debug)]
pub struct BinsArgs {
    /// `q_min..q_max n_min..n_max`, inclusive.
    #[arg(long, num_args = 2, value_names = ["Q_RANGE", "N_RANGE"], default_values = ["1..4", "1..4"])]
    pub grid: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    pub exact_cap: u128,
    /// Monte Carlo trials per cell; 0 disables sampling.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Replace every per-check grid with `q_min..q_max n_min..n_max`.
    #[arg(long, num_args = 2, value_names = ["Q_RANGE", "N_RANGE"])]
    pub grid: Option<Vec<String>>,
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    pub exact_cap: u128,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampled instances for the T-transform check.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, hide = true)]
    pub corrupt_oracle: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    UniformM,
    DRegular,
    StarForest,
    PathUnion,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub model: ModelName,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Vertices (uniform-m, d-regular).
    #[arg(long)]
    pub n: Option<usize>,
    /// Edges (uniform-m).
    #[arg(long)]
    pub m: Option<usize>,
    /// Degree (d-regular).
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of stars (star-forest).
    #[arg(long)]
    pub stars: Option<usize>,
    /// Leaves per star (star-forest).
    #[arg(long)]
    pub leaves: Option<usize>,
    /// Number of paths (path-union).
    #[arg(long)]
    pub paths: Option<usize>,
    /// Vertices per path (path-union).
    #[arg(long)]
    pub length: Option<usize>,
}

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError {
            code: EXIT_USAGE,
            error: e.into(),
        }
    }
}

fn invariant(e: impl Into<anyhow::Error>) -> CliError {
    CliError {
        code: EXIT_INVARIANT,
        error: e.into(),
    }
}

type CmdResult = Result<i32, CliError>;

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Errors are printed to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build()
        .map_err(CliError::from)
        .and_then(|pool| pool.install(|| dispatch(&cli)));
    match result {
        Ok(code) => code,
        Err(CliError { code, error }) => {
            eprintln!("error: {error:#}");
            code
        }
    }
}

fn dispatch(cli: &Cli) -> CmdResult {
    let mut out = std::io::stdout().lock();
    match &cli.command {
        Command::Colour(a) => cmd_colour(a, cli.format, &mut out),
        Command::Verify(a) => cmd_verify(a, cli.format, &mut out),
        Command::Extract(a) => cmd_extract(a, cli.format, &mut out),
        Command::Bins(a) => cmd_bins(a, cli.format, &mut out),
        Command::CheckInequalities(a) => cmd_check(a, cli.format, &mut out),
        Command::Generate(a) => cmd_generate(a, &mut out),
    }
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_edge_list(&text).with_context(|| format!("parsing {}", path.display()))?)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn verdict_lines<W: Write>(out: &mut W, v: &VerificationReport) -> Result<(), CliError> {
    writeln!(out, "verdict: {:?}", v.verdict)?;
    writeln!(out, "colours used: {} (r = {})", v.colours_used, v.r)?;
    if v.uncoloured_edges > 0 || !v.foreign_edges.is_empty() {
        writeln!(
            out,
            "coverage: {} uncoloured, {} foreign",
            v.uncoloured_edges,
            v.foreign_edges.len()
        )?;
    }
    for w in v.failures.iter().take(5) {
        writeln!(out, "witness colour {}: {:?}", w.colour, w.path)?;
    }
    writeln!(out, "accepted: {}", v.accepted())?;
    Ok(())
}

#[derive(Serialize)]
struct ColourOutput<'a> {
    run: &'a pathfree_core::pipeline::RunReport,
    verification: &'a VerificationReport,
    accepted: bool,
}

pub fn cmd_colour<W: Write>(a: &ColourArgs, format: Format, out: &mut W) -> CmdResult {
    let g = read_graph(&a.input)?;
    let mut params = PipelineParams::new(a.r, a.k).with_seed(a.seed).with_trials(a.trials);
    if let Some(b) = a.beta0 {
        params = params.with_beta0(b);
    }
    params.enforce_preconditions = a.enforce_preconditions;
    params.inject_overspend = a.inject_overspend;
    let run = match colour_graph(&g, &params) {
        Ok(run) => run,
        Err(e @ PipelineError::Invariant(_)) => return Err(invariant(e)),
        Err(e) => return Err(e.into()),
    };
    let opts = VerifyOptions {
        exact_cap: a.exact_cap,
        ..VerifyOptions::default()
    };
    let verification = verify_with(&g, &run.colouring, a.r, a.k, &opts);
    let accepted = run.report.success && verification.accepted();
    if let Some(path) = &a.output {
        let text = serialize_colouring(&g, &run.colouring, a.r, a.k).map_err(invariant)?;
        write_file(path, &text)?;
    }
    let summary = ColourOutput {
        run: &run.report,
        verification: &verification,
        accepted,
    };
    if let Some(path) = &a.report {
        write_file(path, &serde_json::to_string_pretty(&summary)?)?;
    }
    match format {
        Format::Json => emit_json(out, &summary)?,
        Format::Text => {
            let rep = &run.report;
            writeln!(out, "graph: {} vertices, {} edges", rep.vertices, rep.edges)?;
            for st in &rep.stages {
                match &st.skipped {
                    Some(why) => writeln!(out, "stage {}: skipped ({why})", st.name)?,
                    None => writeln!(
                        out,
                        "stage {}: {} colours (budget {}), {} edges coloured",
                        st.name, st.colours_used, st.budget, st.edges_coloured
                    )?,
                }
            }
            writeln!(out, "rounds: {}, termination: {:?}", rep.rounds.len(), rep.termination)?;
            writeln!(out, "pipeline success: {}", rep.success)?;
            verdict_lines(out, &verification)?;
        }
    }
    Ok(if accepted { EXIT_OK } else { EXIT_FAILED })
}

pub fn cmd_verify<W: Write>(a: &VerifyArgs, format: Format, out: &mut W) -> CmdResult {
    let g = read_graph(&a.input)?;
    let path = &a.colouring;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = parse_colouring(&text).with_context(|| format!("parsing {}", path.display()))?;
    let r = a.r.or(file.r).ok_or_else(|| anyhow!("--r missing and not in the colouring header"))?;
    let k = a.k.or(file.k).ok_or_else(|| anyhow!("--k missing and not in the colouring header"))?;
    let opts = VerifyOptions {
        exact_cap: a.exact_cap,
        ..VerifyOptions::default()
    };
    let v = verify_with(&g, &file.colouring, r, k, &opts);
    match format {
        Format::Json => emit_json(out, &v)?,
        Format::Text => verdict_lines(out, &v)?,
    }
    Ok(if v.accepted() { EXIT_OK } else { EXIT_FAILED })
}

#[derive(Serialize)]
struct ExtractOutput {
    certified: bool,
    tier: Option<pathfree_core::extract::CertTier>,
    edges: usize,
    input_edges: usize,
    q: usize,
    e_ab: usize,
    trial: usize,
    certified_trials: usize,
    trials: usize,
    selection: Option<pathfree_core::extract::Selection>,
}

pub fn cmd_extract<W: Write>(a: &ExtractArgs, format: Format, out: &mut W) -> CmdResult {
    let g = read_graph(&a.input)?;
    let outcome = match a.r {
        Some(r) => key_lemma_extract(&g, r, a.k, a.trials, a.seed).map(|kx| (kx.result, Some(kx.selection))),
        None => find_pk_free_subgraph(&g, &g.non_isolated(), &[], a.k, a.trials, a.seed).map(|res| (res, None)),
    };
    let (result, selection) = match outcome {
        Ok(x) => x,
        Err(ExtractError::NoCertified { best, .. }) => (*best, None),
        Err(e @ ExtractError::Invariant(_)) => return Err(invariant(e)),
        Err(e) => return Err(e.into()),
    };
    if let (Some(path), true) = (&a.output, result.certified) {
        write_file(path, &result.h.to_edge_list())?;
    }
    let summary = ExtractOutput {
        certified: result.certified,
        tier: result.tier,
        edges: result.h.edge_count(),
        input_edges: g.edge_count(),
        q: result.q,
        e_ab: result.e_ab,
        trial: result.trial,
        certified_trials: result.certified_trials,
        trials: result.trials_run,
        selection,
    };
    match format {
        Format::Json => emit_json(out, &summary)?,
        Format::Text => {
            writeln!(out, "certified: {} ({:?})", summary.certified, summary.tier)?;
            writeln!(out, "edges: {} of {}", summary.edges, summary.input_edges)?;
            writeln!(out, "q: {}, e(A,B): {}", summary.q, summary.e_ab)?;
            writeln!(
                out,
                "trial {} of {}, {} certified",
                summary.trial, summary.trials, summary.certified_trials
            )?;
        }
    }
    Ok(if result.certified { EXIT_OK } else { EXIT_FAILED })
}

/// Parses `a..b` (inclusive) or a single number.
pub fn parse_range(s: &str) -> anyhow::Result<RangeInclusive<u64>> {
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo, hi.strip_prefix('=').unwrap_or(hi)),
        None => (s, s),
    };
    let lo: u64 = lo.trim().parse().with_context(|| format!("bad range start in {s:?}"))?;
    let hi: u64 = hi.trim().parse().with_context(|| format!("bad range end in {s:?}"))?;
    if lo > hi {
        return Err(anyhow!("empty range {s:?}"));
    }
    Ok(lo..=hi)
}

pub fn parse_grid(parts: &[String]) -> anyhow::Result<Grid> {
    match parts {
        [q, n] => Ok(Grid {
            q: parse_range(q)?,
            n: parse_range(n)?,
        }),
        _ => Err(anyhow!("--grid takes two ranges")),
    }
}

#[derive(Serialize)]
struct BinsRow {
    q: u64,
    n: u64,
    exact: Option<BinsStats>,
    mc: Option<McEstimate>,
    error: Option<String>,
}

pub fn cmd_bins<W: Write>(a: &BinsArgs, format: Format, out: &mut W) -> CmdResult {
    let grid = parse_grid(&a.grid)?;
    let mut rows = Vec::new();
    for q in grid.q.clone() {
        for n in grid.n.clone() {
            let query = BinsQuery::new(q, n)?;
            let (stats, mut error) = match BinsStats::compute(query, a.exact_cap) {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let mc = if a.trials > 0 {
                match monte_carlo_max_load(query, a.trials, a.seed) {
                    Ok(m) => Some(m),
                    Err(e) => {
                        error.get_or_insert(e.to_string());
                        None
                    }
                }
            } else {
                None
            };
            rows.push(BinsRow {
                q,
                n,
                exact: stats,
                mc,
                error,
            });
        }
    }
    match format {
        Format::Json => emit_json(out, &rows)?,
        Format::Text => {
            writeln!(out, "q\tn\tE[M]\tw\tlb_unified\tlb_usable\tmc_mean\tmc_stderr")?;
            for row in &rows {
                let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.6}"));
                let (em, w, lbu, lbs) = match &row.exact {
                    Some(s) => (s.expected_max.to_string(), s.w.to_string(), f(Some(s.lb_unified)), f(s.lb_usable)),
                    None => ("-".into(), "-".into(), "-".into(), "-".into()),
                };
                writeln!(
                    out,
                    "{}\t{}\t{em}\t{w}\t{lbu}\t{lbs}\t{}\t{}{}",
                    row.q,
                    row.n,
                    f(row.mc.as_ref().map(|m| m.mean)),
                    f(row.mc.as_ref().map(|m| m.stderr)),
                    row.error.as_ref().map_or(String::new(), |e| format!("\t# {e}"))
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_check<W: Write>(a: &CheckArgs, format: Format, out: &mut W) -> CmdResult {
    let cfg = SuiteConfig {
        grid: a.grid.as_deref().map(parse_grid).transpose()?,
        exact_cap: a.exact_cap,
        seed: a.seed,
        schur_samples: a.trials,
        corrupt_oracle: a.corrupt_oracle,
    };
    let report = run_suite(&cfg)?;
    match format {
        Format::Json => emit_json(out, &report)?,
        Format::Text => {
            for c in &report.checks {
                let margin = c.min_margin.map_or("-".into(), |m| format!("{m:.3e}"));
                writeln!(
                    out,
                    "{}: {} cases, {} violations, min margin {margin}",
                    c.name, c.cases, c.violations
                )?;
                if let Some(v) = &c.first_violation {
                    writeln!(out, "    first violation: {v}")?;
                }
            }
            writeln!(out, "total violations: {}", report.total_violations)?;
        }
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILED })
}

pub fn cmd_generate<W: Write>(a: &GenerateArgs, out: &mut W) -> CmdResult {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| anyhow!("--model {:?} needs --{flag}", a.model));
    let model = match a.model {
        ModelName::UniformM => Model::UniformM {
            n: need(a.n, "n")?,
            m: need(a.m, "m")?,
        },
        ModelName::DRegular => Model::DRegular {
            n: need(a.n, "n")?,
            d: need(a.d, "d")?,
        },
        ModelName::StarForest => Model::StarForest {
            stars: need(a.stars, "stars")?,
            leaves: need(a.leaves, "leaves")?,
        },
        ModelName::PathUnion => Model::PathUnion {
            paths: need(a.paths, "paths")?,
            length: need(a.length, "length")?,
        },
    };
    let g = generate(model, a.seed)?;
    let text = render(&g, model, a.seed);
    match &a.output {
        Some(path) => write_file(path, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}
