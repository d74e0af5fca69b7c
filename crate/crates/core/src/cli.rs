//! Command-line front end. Every subcommand's arguments double as a
//! config-file section, so `vexlab run --config file.toml` and the
//! equivalent flags build the same [`RunConfig`].

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{ExponentFunction, FamilyKind};
use crate::grid::GridSpec;
use crate::hardy::Lemma22Variant;
use crate::lab::export::{export_report, ExportFormat};
use crate::lab::profile::Profile;
use crate::lab::report::{EquivalenceReport, Mode, Scenario, Which};
use crate::lab::search::{adversarial_search, SearchSpace, DEFAULT_BUDGET};
use crate::lab::suites::{
    lemma21_spike_ratio, lemma21_suite, lemma22_suite, run_all, standard_suite, summarize, LEMMA21_A,
};
use crate::lab::{cross_exponent_check, equivalence_report, monotone_variant_report, moreover_check};
use crate::lebesgue::{luxemburg_norm, modular, DEFAULT_TOLERANCE};

pub const OUTPUT_DIR_ENV: &str = "VEXLAB_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "vexlab", version, about = "Variable-exponent Lebesgue norms and Hardy-operator experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    #[command(flatten)]
    Direct(RunConfig),
    /// Run the subcommand described by a TOML config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

/// One subcommand with all of its settings. In a config file it is a
/// single table named after the subcommand, e.g. `[norm]`.
#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RunConfig {
    /// Luxemburg norm and modular of one function.
    Norm(NormArgs),
    /// Equivalence reports for one scenario or a suite.
    Equiv(EquivArgs),
    /// Randomized checks of the discrete Hardy bound or the pointwise estimate.
    Lemma(LemmaArgs),
    /// Seeded random search for the worst two-sided ratio.
    Search(SearchArgs),
}

fn default_grid() -> GridSpec {
    GridSpec::default()
}
fn default_tol() -> f64 {
    DEFAULT_TOLERANCE
}
fn default_s() -> f64 {
    1.0
}
fn default_eps() -> Profile {
    Profile::PowerPeak { alpha: 0.5, beta: 0.5 }
}
fn default_which() -> Which {
    Which::Eta
}
fn default_seed() -> u64 {
    1
}
fn default_budget() -> usize {
    DEFAULT_BUDGET
}
fn default_top_k() -> usize {
    10
}
fn default_families() -> Vec<FamilyKind> {
    vec![FamilyKind::LogInterp, FamilyKind::LogPerturbed]
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormArgs {
    /// Exponent descriptor: const(c), loginterp(p0,pinf) or logpert(p0,pinf,A,phase).
    #[arg(long)]
    pub p: ExponentFunction,
    /// Function descriptor, e.g. powerpeak(0.5,0.5), indicator(0,1), zero.
    #[arg(long)]
    pub f: Profile,
    /// Grid descriptor grid(v_min,v_max,nodes_per_octave).
    #[arg(long, default_value_t = default_grid())]
    #[serde(default = "default_grid")]
    pub grid: GridSpec,
    /// Bisection tolerance on the modular residual.
    #[arg(long, default_value_t = default_tol())]
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    /// Every suite exponent, weight, input and operator.
    Standard,
    /// Only the constant-exponent members of the standard suite.
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    /// Variable norm of the operator output against the split fixed norms.
    #[default]
    Equivalence,
    /// Sum of both operator norms against the split norms of the input.
    Moreover,
    /// The input itself stands in for the operator output; must be monotone.
    Monotone,
    /// Norm under --p against norm under --q.
    Cross,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivArgs {
    /// Run a named suite instead of a single scenario.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<SuiteName>,
    /// What to measure for each scenario.
    #[arg(long, value_enum, default_value_t)]
    #[serde(default)]
    pub kind: ReportKind,
    /// Exponent descriptor (single scenario).
    #[arg(long, required_unless_present = "suite")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<ExponentFunction>,
    /// Second exponent for --kind cross.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<ExponentFunction>,
    /// Power weight s > 0.
    #[arg(long, default_value_t = default_s())]
    #[serde(default = "default_s")]
    pub s: f64,
    /// Input descriptor for the single scenario.
    #[arg(long, default_value_t = default_eps())]
    #[serde(default = "default_eps")]
    pub eps: Profile,
    /// Operator: eta or lambda.
    #[arg(long, default_value_t = default_which())]
    #[serde(default = "default_which")]
    pub which: Which,
    /// full: norms over (0,inf); unit: norms over (0,1].
    #[arg(long, default_value_t)]
    #[serde(default)]
    pub mode: Mode,
    #[arg(long, default_value_t = default_grid())]
    #[serde(default = "default_grid")]
    pub grid: GridSpec,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Report file. Defaults to <output-dir>/<subcommand>.<format> when an
    /// output directory is set.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Directory for report files.
    #[arg(long, env = OUTPUT_DIR_ENV)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// csv or json.
    #[arg(long, default_value_t)]
    #[serde(default)]
    pub format: ExportFormat,
}

impl OutputArgs {
    fn path(&self, stem: &str) -> Option<PathBuf> {
        match (&self.output, &self.output_dir) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(dir)) => Some(dir.join(format!("{stem}.{}", self.format.extension()))),
            (None, None) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaKind {
    /// Discrete Hardy-type bound for convolution sequences.
    Discrete,
    /// Pointwise Jensen-type estimate for variable exponents.
    Pointwise,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaArgs {
    #[arg(long, value_enum)]
    pub lemma: LemmaKind,
    /// Draws per case (default 1000 for discrete, 200 for pointwise).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
    #[arg(long, default_value_t = default_seed())]
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Restrict the pointwise check to one variant: origin-py, origin-p0 or infinity.
    #[arg(long, value_parser = parse_variant)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Lemma22Variant>,
    #[arg(long, default_value_t = default_grid())]
    #[serde(default = "default_grid")]
    pub grid: GridSpec,
}

fn parse_variant(s: &str) -> std::result::Result<Lemma22Variant, String> {
    Lemma22Variant::ALL
        .into_iter()
        .find(|v| v.name() == s.replace('-', "_"))
        .ok_or_else(|| "expected origin-py, origin-p0 or infinity".to_string())
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchArgs {
    #[arg(long, default_value_t = default_budget())]
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[arg(long, default_value_t = default_seed())]
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Exponent families to draw from (comma separated): const, loginterp, logpert.
    #[arg(long, value_delimiter = ',', default_values_t = default_families())]
    #[serde(default = "default_families")]
    pub families: Vec<FamilyKind>,
    #[arg(long, default_value_t = 1.2)]
    #[serde(default = "SearchArgs::p_min")]
    pub p_min: f64,
    #[arg(long, default_value_t = 4.0)]
    #[serde(default = "SearchArgs::p_max")]
    pub p_max: f64,
    /// Largest perturbation amplitude (at most 2).
    #[arg(long, default_value_t = 0.5)]
    #[serde(default = "SearchArgs::amplitude_max")]
    pub amplitude_max: f64,
    #[arg(long, default_value_t = 0.5)]
    #[serde(default = "SearchArgs::s_min")]
    pub s_min: f64,
    #[arg(long, default_value_t = 2.0)]
    #[serde(default = "SearchArgs::s_max")]
    pub s_max: f64,
    #[arg(long, default_value_t)]
    #[serde(default)]
    pub mode: Mode,
    #[arg(long, default_value_t = default_grid())]
    #[serde(default = "default_grid")]
    pub grid: GridSpec,
    #[arg(long, default_value_t = default_top_k())]
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

impl SearchArgs {
    fn p_min() -> f64 {
        1.2
    }
    fn p_max() -> f64 {
        4.0
    }
    fn amplitude_max() -> f64 {
        0.5
    }
    fn s_min() -> f64 {
        0.5
    }
    fn s_max() -> f64 {
        2.0
    }

    fn space(&self) -> SearchSpace {
        SearchSpace {
            families: self.families.clone(),
            p_range: (self.p_min, self.p_max),
            amplitude_range: (0.0, self.amplitude_max),
            s_range: (self.s_min, self.s_max),
            grid: self.grid,
            top_k: self.top_k,
            ..SearchSpace::new(self.mode)
        }
    }
}

/// Parses a TOML config file into a [`RunConfig`]. Unknown keys are
/// rejected.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| Error::Parse {
        input: path.display().to_string(),
        reason: e.to_string(),
    })
}

/// A check ran to completion but found a violated bound.
pub struct Violation;

/// Runs one subcommand, writing human-readable output to `out`.
pub fn execute(config: &RunConfig, out: &mut dyn Write) -> Result<std::result::Result<(), Violation>> {
    match config {
        RunConfig::Norm(a) => cmd_norm(a, out).map(Ok),
        RunConfig::Equiv(a) => cmd_equiv(a, out).map(Ok),
        RunConfig::Lemma(a) => cmd_lemma(a, out),
        RunConfig::Search(a) => cmd_search(a, out).map(Ok),
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

fn cmd_norm(a: &NormArgs, out: &mut dyn Write) -> Result<()> {
    let grid = a.grid.build()?;
    let f = a.f.sample(&grid)?;
    let r = luxemburg_norm(&a.p, &grid, &f, a.tol)?;
    let (p_minus, p_plus) = a.p.grid_range(&grid)?;
    writeln!(out, "exponent        {}", a.p).map_err(io)?;
    writeln!(out, "function        {}", a.f).map_err(io)?;
    writeln!(out, "grid            {}", a.grid).map_err(io)?;
    writeln!(out, "norm            {:.12e}", r.norm).map_err(io)?;
    writeln!(out, "modular         {:.12e}", modular(&a.p, &grid, &f)?).map_err(io)?;
    writeln!(out, "modular_at_norm {:.12e}", r.modular_at_norm).map_err(io)?;
    writeln!(out, "iterations      {}", r.iterations).map_err(io)?;
    writeln!(out, "bracket         [{:.12e}, {:.12e}]", r.bracket.0, r.bracket.1).map_err(io)?;
    writeln!(out, "p_range         [{p_minus}, {p_plus}]").map_err(io)?;
    Ok(())
}

fn cmd_equiv(a: &EquivArgs, out: &mut dyn Write) -> Result<()> {
    let scenarios = match (a.suite, &a.p) {
        (Some(suite), _) => {
            let mut all = standard_suite(a.mode, a.grid);
            if suite == SuiteName::Constant {
                all.retain(|sc| sc.exponent.is_constant());
            }
            if a.kind == ReportKind::Moreover {
                all.retain(|sc| sc.which == Which::Eta);
            }
            all
        }
        (None, Some(p)) => vec![Scenario::new(p.clone(), a.s, a.eps, a.which, a.mode, a.grid)],
        (None, None) => return Err(Error::InvalidParameter("--p or --suite is required".into())),
    };
    let reports = match a.kind {
        ReportKind::Equivalence => run_all(&scenarios, equivalence_report)?,
        ReportKind::Moreover => run_all(&scenarios, moreover_check)?,
        ReportKind::Monotone => run_all(&scenarios, monotone_variant_report)?,
        ReportKind::Cross => {
            let q = a
                .q
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("--kind cross needs --q".into()))?;
            run_all(&scenarios, |sc| cross_exponent_check(sc, q))?
        }
    };
    if reports.len() == 1 {
        print_report(&reports[0], out)?;
    }
    let summary = summarize(&reports);
    writeln!(out, "scenarios       {}", summary.scenarios).map_err(io)?;
    writeln!(out, "degenerate      {}", summary.degenerate).map_err(io)?;
    writeln!(out, "flagged         {}", summary.unstable).map_err(io)?;
    writeln!(out, "worst_ratio     {:.6}", summary.worst_ratio).map_err(io)?;
    writeln!(out, "worst_scenario  {}", summary.worst_id).map_err(io)?;
    writeln!(out, "max_refinement  {:.3e}", summary.max_refinement_delta).map_err(io)?;
    writeln!(out, "max_tail        {:.3e}", summary.max_tail_delta).map_err(io)?;
    if let Some(path) = a.output.path("equiv") {
        export_report(&reports, &path, a.output.format)?;
        writeln!(out, "wrote           {}", path.display()).map_err(io)?;
    }
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), |v| format!("{v:.6}"))
}

fn print_report(r: &EquivalenceReport, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "scenario        {}", r.scenario_id).map_err(io)?;
    writeln!(out, "lhs             {:.12e}", r.lhs).map_err(io)?;
    writeln!(out, "rhs             {:.12e}", r.rhs).map_err(io)?;
    writeln!(out, "ratio_fwd       {}", opt(r.ratio_fwd)).map_err(io)?;
    writeln!(out, "ratio_bwd       {}", opt(r.ratio_bwd)).map_err(io)?;
    writeln!(out, "clog            origin {:.6}, infinity {:.6}", r.clog_origin, r.clog_infinity).map_err(io)?;
    writeln!(out, "flags           {}", r.flags).map_err(io)?;
    Ok(())
}

fn cmd_lemma(a: &LemmaArgs, out: &mut dyn Write) -> Result<std::result::Result<(), Violation>> {
    let mut violated = false;
    match a.lemma {
        LemmaKind::Discrete => {
            let draws = a.draws.unwrap_or(1000);
            let cases = lemma21_suite(a.seed, draws)?;
            writeln!(out, "{:>5} {:>5} {:>5} {:>7} {:>12}", "a", "sigma", "p", "draws", "max_ratio").map_err(io)?;
            for c in &cases {
                writeln!(out, "{:>5} {:>5} {:>5} {:>7} {:>12.9}", c.a, c.sigma, c.p, c.draws, c.max_ratio).map_err(io)?;
                for v in &c.violations {
                    violated = true;
                    writeln!(
                        out,
                        "VIOLATION a={} sigma={} p={} k_min={} ratio={} eps={:?}",
                        c.a, c.sigma, c.p, v.k_min, v.ratio, v.eps
                    )
                    .map_err(io)?;
                }
            }
            let max = cases.iter().map(|c| c.max_ratio).fold(0.0, f64::max);
            writeln!(out, "max_ratio       {max:.12}").map_err(io)?;
            for a in LEMMA21_A {
                writeln!(out, "spike a={a}     {:.12}", lemma21_spike_ratio(a, 60)?).map_err(io)?;
            }
        }
        LemmaKind::Pointwise => {
            let draws = a.draws.unwrap_or(200);
            let grid = a.grid.build()?;
            let variants: Vec<_> = match a.variant {
                Some(v) => vec![v],
                None => Lemma22Variant::ALL.to_vec(),
            };
            for v in variants {
                let s = lemma22_suite(a.seed, draws, v, &grid)?;
                writeln!(
                    out,
                    "{:<10} draws {} min_margin {:.6e} ungrouped {:.6e}",
                    v.name(),
                    s.draws,
                    s.min_margin,
                    s.min_margin_ungrouped
                )
                .map_err(io)?;
                if s.min_margin < -1e-10 {
                    violated = true;
                    if let Some(w) = &s.worst {
                        writeln!(
                            out,
                            "VIOLATION draw={} exponent={} a={} b={} m={} gamma={} input={} margin={}",
                            w.draw, w.exponent, w.a, w.b, w.m, w.gamma, w.input, w.min_margin
                        )
                        .map_err(io)?;
                    }
                }
            }
        }
    }
    Ok(if violated { Err(Violation) } else { Ok(()) })
}

fn cmd_search(a: &SearchArgs, out: &mut dyn Write) -> Result<()> {
    let result = adversarial_search(&a.space(), a.budget, a.seed)?;
    writeln!(
        out,
        "budget {} evaluated {} out_of_range {} degenerate {} failed {}",
        result.budget, result.evaluated, result.out_of_range, result.degenerate, result.failed
    )
    .map_err(io)?;
    writeln!(out, "{:>4} {:>7} {:>10} {:>10} {:>10}  scenario", "rank", "draw", "worst", "clog_0", "clog_inf")
        .map_err(io)?;
    for (rank, e) in result.entries.iter().enumerate() {
        writeln!(
            out,
            "{:>4} {:>7} {:>10.6} {:>10.4} {:>10.4}  {}",
            rank + 1,
            e.draw,
            e.worst_ratio,
            e.report.clog_origin,
            e.report.clog_infinity,
            e.report.scenario_id
        )
        .map_err(io)?;
    }
    if let Some(path) = a.output.path("search") {
        let reports: Vec<_> = result.entries.iter().map(|e| e.report.clone()).collect();
        export_report(&reports, &path, a.output.format)?;
        writeln!(out, "wrote {}", path.display()).map_err(io)?;
    }
    Ok(())
}

/// Full command-line entry point. Exit codes: 0 success, 1 solver failure
/// or violated bound, 2 usage or parse error.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let config = match cli.command {
        Command::Direct(config) => config,
        Command::Run { config } => match load_config(&config) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(&config, &mut out) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Violation)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Parse { .. }) { 2 } else { 1 })
        }
    }
}
