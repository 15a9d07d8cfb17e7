//! The `mscs` command line.
//!
//! Exit codes: `0` success (every checked property holds), `1` a checked
//! property fails and its counterexample is printed, `2` bad input or usage.
//! With `--json` each subcommand prints one of the `*Output` documents below
//! (or a [`CoherenceReport`](crate::coherence::CoherenceReport)).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::coherence::CoherenceChecker;
use crate::error::{Error, Result};
use crate::pipeline::{
    export_results, load_pipeline_spec, pipeline_distribution, pipeline_state1_cdf, sweep_state1, Export,
    SweepRow,
};
use crate::probability::{
    cdf_bounds, closed_form_cdf, dominance_check, exact_system_distribution, monte_carlo_distribution,
    ComponentDistribution, MonteCarloEstimate, SystemDistribution, ORACLE_TOLERANCE,
};
use crate::state::{Level, StateSpace, StateVector, DEFAULT_ENUMERATION_LIMIT};
use crate::structure::{parse_expr, StructureExpr, SystemKind};

#[derive(Debug, Parser)]
#[command(name = "mscs", version, about = "Multistate coherent system analysis")]
struct Cli {
    /// Emit a JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Largest state space (in vectors) an exhaustive pass may visit.
    #[arg(long, global = true, env = "MSCS_LIMIT", value_name = "VECTORS", default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    limit: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check monotonicity, relevance and the boundary condition exhaustively.
    Coherence(CoherenceArgs),
    /// Evaluate a structure on one state vector.
    Eval(EvalArgs),
    /// List the upper critical connection vectors to a level.
    Ucv(UcvArgs),
    /// System performance distribution.
    Dist(DistArgs),
    /// Product bounds on the system CDF against the exact value.
    Bounds(BoundsArgs),
    /// Check that componentwise CDF dominance carries over to the system.
    Dominance(DominanceArgs),
    /// Series pipeline case study.
    #[command(subcommand)]
    Pipeline(PipelineCommand),
}

#[derive(Debug, Args)]
struct StructureArg {
    /// Structure expression, e.g. "series(c1, parallel(c2, c3))".
    #[arg(long, value_name = "EXPR")]
    structure: String,
}

#[derive(Debug, Args)]
struct CoherenceArgs {
    #[command(flatten)]
    structure: StructureArg,
    /// Number of components (defaults to the largest index in the structure).
    #[arg(long, value_name = "N")]
    components: Option<usize>,
    #[arg(long, value_name = "M")]
    max_state: usize,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    structure: StructureArg,
    /// Comma-separated component levels, e.g. "2,0,3".
    #[arg(long, value_name = "LEVELS")]
    state: String,
    /// Reject levels above this value.
    #[arg(long, value_name = "M")]
    max_state: Option<usize>,
}

#[derive(Debug, Args)]
struct UcvArgs {
    #[command(flatten)]
    structure: StructureArg,
    #[arg(long, value_name = "N")]
    components: Option<usize>,
    #[arg(long, value_name = "M")]
    max_state: usize,
    #[arg(long, value_name = "J")]
    level: usize,
}

#[derive(Debug, Args)]
struct ComponentsArg {
    /// Pipeline spec file whose segments supply the component distributions.
    #[arg(long, value_name = "PATH", conflicts_with = "pmf")]
    spec: Option<PathBuf>,
    /// Component PMF as comma-separated masses; repeat once per component.
    #[arg(long, value_name = "MASSES")]
    pmf: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Closed,
    Mc,
}

#[derive(Debug, Args)]
struct DistArgs {
    #[command(flatten)]
    structure: StructureArg,
    #[command(flatten)]
    components: ComponentsArg,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    method: Method,
    #[arg(long, value_name = "N", default_value_t = 100_000)]
    samples: u64,
    #[arg(long, value_name = "S", default_value_t = 0)]
    seed: u64,
    /// Also write the distribution as CSV.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    structure: StructureArg,
    #[command(flatten)]
    components: ComponentsArg,
    /// Only this level (default: every level).
    #[arg(long, value_name = "J")]
    level: Option<usize>,
}

#[derive(Debug, Args)]
struct DominanceArgs {
    #[command(flatten)]
    structure: StructureArg,
    /// Dominated (worse) components.
    #[command(flatten)]
    components: ComponentsArg,
    /// Dominating (better) components, as a spec file.
    #[arg(long, value_name = "PATH", conflicts_with = "primed_pmf")]
    primed_spec: Option<PathBuf>,
    /// Dominating (better) component PMF; repeat once per component.
    #[arg(long, value_name = "MASSES")]
    primed_pmf: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum PipelineCommand {
    /// Pipeline CDF from a spec file.
    Analyze {
        #[arg(long, value_name = "PATH")]
        spec: PathBuf,
        #[arg(long, value_name = "J")]
        level: Option<usize>,
        /// Also write the distribution as CSV.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Sweep the state-1 masses of segments 1 and 2 over (0, 1).
    Sweep {
        #[arg(long, value_name = "PATH")]
        spec: PathBuf,
        #[arg(long, value_name = "N", default_value_t = 10_000)]
        trials: u64,
        #[arg(long, value_name = "S", default_value_t = 0)]
        seed: u64,
        /// Write every trial as CSV.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutput {
    pub structure: StructureExpr,
    pub state: StateVector,
    pub level: Level,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcvOutput {
    pub structure: StructureExpr,
    pub components: usize,
    pub max_state: Level,
    pub level: Level,
    pub vectors: Vec<StateVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistOutput {
    pub structure: StructureExpr,
    pub method: Method,
    pub distribution: SystemDistribution,
    /// Per-level estimates, present for `--method mc`.
    pub estimates: Option<Vec<MonteCarloEstimate>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub level: Level,
    pub lower: f64,
    pub exact: f64,
    pub upper: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsOutput {
    pub structure: StructureExpr,
    /// `series` or `parallel` when the structure is one of the two.
    pub kind: Option<SystemKind>,
    pub rows: Vec<BoundsRow>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceOutput {
    pub structure: StructureExpr,
    pub holds: bool,
    pub cdf: Vec<f64>,
    pub cdf_primed: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOutput {
    pub segments: usize,
    pub max_state: Level,
    pub cdf: Vec<f64>,
    /// The reduced state-1 value when every segment has `p_0 = 0`.
    pub state1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub seed: u64,
    pub trials: u64,
    pub argmax: SweepRow,
    pub supremum: f64,
}

enum Outcome {
    Pass,
    Fail,
}

/// Runs one invocation; `args` includes the program name.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("output serializes");
    writeln!(out, "{text}").map_err(io)
}

fn structure(arg: &StructureArg) -> Result<StructureExpr> {
    parse_expr(&arg.structure)
}

fn component_count(e: &StructureExpr, given: Option<usize>) -> Result<usize> {
    match given {
        Some(n) if n < e.arity() => Err(Error::ArityMismatch {
            arity: e.arity(),
            given: n,
        }),
        Some(n) => Ok(n),
        None => Ok(e.arity()),
    }
}

fn parse_masses(text: &str, subject: &str) -> Result<ComponentDistribution> {
    let masses = text
        .split(',')
        .map(|t| {
            t.trim().parse::<f64>().map_err(|_| {
                Error::parse(
                    1,
                    format!("expected a probability in {subject}, found `{}`", t.trim()),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ComponentDistribution::new(masses).map_err(|source| Error::InvalidPmf {
        subject: subject.to_string(),
        source,
    })
}

fn distributions(spec: &Option<PathBuf>, pmfs: &[String], what: &str) -> Result<Vec<ComponentDistribution>> {
    match spec {
        Some(path) => Ok(load_pipeline_spec(path)?.distributions()),
        None if pmfs.is_empty() => Err(Error::PreconditionViolated(format!(
            "{what}: supply --spec or one --pmf per component"
        ))),
        None => pmfs
            .iter()
            .enumerate()
            .map(|(i, t)| parse_masses(t, &format!("component {}", i + 1)))
            .collect(),
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Outcome> {
    let limit = cli.limit;
    match &cli.command {
        Command::Coherence(a) => {
            let e = structure(&a.structure)?;
            let n = component_count(&e, a.components)?;
            let space = StateSpace::new(a.max_state)?;
            let report = CoherenceChecker::new(&e, n, space)?
                .with_limit(limit)
                .coherence_report()?;
            if cli.json {
                emit_json(out, &report)?;
            } else {
                writeln!(out, "structure: {e}").map_err(io)?;
                out.write_all(report.to_table().as_bytes()).map_err(io)?;
            }
            Ok(if report.overall {
                Outcome::Pass
            } else {
                Outcome::Fail
            })
        }
        Command::Eval(a) => {
            let e = structure(&a.structure)?;
            let state: StateVector = a.state.parse()?;
            if let Some(m) = a.max_state {
                StateVector::within(state.as_slice().to_vec(), StateSpace::new(m)?)?;
            }
            let level = e.eval_expr(&state)?;
            if cli.json {
                emit_json(
                    out,
                    &EvalOutput {
                        structure: e,
                        state,
                        level,
                    },
                )?;
            } else {
                writeln!(out, "{level}").map_err(io)?;
            }
            Ok(Outcome::Pass)
        }
        Command::Ucv(a) => {
            let e = structure(&a.structure)?;
            let n = component_count(&e, a.components)?;
            let space = StateSpace::new(a.max_state)?;
            let level = space.check_level(a.level)?;
            let set = CoherenceChecker::new(&e, n, space)?
                .with_limit(limit)
                .enumerate_ucv(level)?;
            if cli.json {
                emit_json(
                    out,
                    &UcvOutput {
                        structure: e,
                        components: n,
                        max_state: space.max_state(),
                        level,
                        vectors: set.vectors,
                    },
                )?;
            } else {
                for v in &set.vectors {
                    writeln!(out, "{v}").map_err(io)?;
                }
            }
            Ok(Outcome::Pass)
        }
        Command::Dist(a) => {
            let e = structure(&a.structure)?;
            let dists = distributions(&a.components.spec, &a.components.pmf, "dist")?;
            let (distribution, estimates) = match a.method {
                Method::Exact => (exact_system_distribution(&e, &dists, limit)?, None),
                Method::Closed => {
                    let kind = e.basic_kind().ok_or_else(|| {
                        Error::PreconditionViolated(format!(
                            "closed forms exist only for plain series or parallel structures, not `{e}`"
                        ))
                    })?;
                    if e.arity() != dists.len() {
                        return Err(Error::ArityMismatch {
                            arity: e.arity(),
                            given: dists.len(),
                        });
                    }
                    let m = dists[0].max_state();
                    let cdf = (0..=m)
                        .map(|j| closed_form_cdf(kind, &dists, j))
                        .collect::<Result<Vec<_>>>()?;
                    let pmf = cdf
                        .iter()
                        .enumerate()
                        .map(|(j, c)| if j == 0 { *c } else { c - cdf[j - 1] })
                        .collect();
                    (SystemDistribution { pmf, cdf }, None)
                }
                Method::Mc => {
                    let est = monte_carlo_distribution(&e, &dists, a.samples, a.seed)?;
                    let cdf: Vec<f64> = est.iter().map(|x| x.estimate).collect();
                    let pmf = cdf
                        .iter()
                        .enumerate()
                        .map(|(j, c)| if j == 0 { *c } else { c - cdf[j - 1] })
                        .collect();
                    (SystemDistribution { pmf, cdf }, Some(est))
                }
            };
            if let Some(path) = &a.out {
                export_results(Export::Distribution(&distribution), path)?;
            }
            if cli.json {
                emit_json(
                    out,
                    &DistOutput {
                        structure: e,
                        method: a.method,
                        distribution,
                        estimates,
                    },
                )?;
            } else {
                write_distribution_table(out, &distribution, estimates.as_deref())?;
            }
            Ok(Outcome::Pass)
        }
        Command::Bounds(a) => {
            let e = structure(&a.structure)?;
            let dists = distributions(&a.components.spec, &a.components.pmf, "bounds")?;
            let exact = exact_system_distribution(&e, &dists, limit)?;
            let levels: Vec<Level> = match a.level {
                Some(j) => vec![StateSpace::new(exact.max_state() as usize)?.check_level(j)?],
                None => (0..=exact.max_state()).collect(),
            };
            let rows = levels
                .into_iter()
                .map(|j| {
                    let b = cdf_bounds(&dists, j)?;
                    let p = exact.cdf[j as usize];
                    Ok(BoundsRow {
                        level: j,
                        lower: b.lower,
                        exact: p,
                        upper: b.upper,
                        within: b.contains(p, ORACLE_TOLERANCE),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let holds = rows.iter().all(|r| r.within);
            let output = BoundsOutput {
                kind: e.basic_kind(),
                structure: e,
                rows,
                holds,
            };
            if cli.json {
                emit_json(out, &output)?;
            } else {
                writeln!(out, "level  lower         exact         upper         within").map_err(io)?;
                for r in &output.rows {
                    writeln!(
                        out,
                        "{:<5}  {:.10}  {:.10}  {:.10}  {}",
                        r.level,
                        r.lower,
                        r.exact,
                        r.upper,
                        if r.within { "yes" } else { "NO" }
                    )
                    .map_err(io)?;
                }
            }
            Ok(if holds { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Dominance(a) => {
            let e = structure(&a.structure)?;
            let dists = distributions(&a.components.spec, &a.components.pmf, "dominance")?;
            let primed = distributions(&a.primed_spec, &a.primed_pmf, "dominance (primed)")?;
            let r = dominance_check(&e, &primed, &dists, limit)?;
            if cli.json {
                emit_json(
                    out,
                    &DominanceOutput {
                        structure: e,
                        holds: r.holds,
                        cdf: r.cdf,
                        cdf_primed: r.cdf_primed,
                    },
                )?;
            } else {
                writeln!(out, "level  P(j)          P'(j)").map_err(io)?;
                for (j, (p, pp)) in r.cdf.iter().zip(&r.cdf_primed).enumerate() {
                    writeln!(out, "{j:<5}  {p:.10}  {pp:.10}").map_err(io)?;
                }
                writeln!(out, "dominance {}", if r.holds { "holds" } else { "FAILS" }).map_err(io)?;
            }
            Ok(if r.holds { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Pipeline(PipelineCommand::Analyze {
            spec,
            level,
            out: csv,
        }) => {
            let spec = load_pipeline_spec(spec)?;
            let dist = pipeline_distribution(&spec)?;
            if let Some(path) = csv {
                export_results(Export::Distribution(&dist), path)?;
            }
            let state1 = pipeline_state1_cdf(&spec).ok();
            if cli.json {
                emit_json(
                    out,
                    &AnalyzeOutput {
                        segments: spec.segments.len(),
                        max_state: spec.max_state,
                        cdf: dist.cdf,
                        state1,
                    },
                )?;
            } else if let Some(j) = level {
                let j = StateSpace::new(spec.max_state as usize)?.check_level(*j)?;
                writeln!(out, "{:.10}", dist.cdf[j as usize]).map_err(io)?;
            } else {
                writeln!(out, "level  P_pipeline(j)").map_err(io)?;
                for (j, c) in dist.cdf.iter().enumerate() {
                    writeln!(out, "{j:<5}  {c:.10}").map_err(io)?;
                }
            }
            Ok(Outcome::Pass)
        }
        Command::Pipeline(PipelineCommand::Sweep {
            spec,
            trials,
            seed,
            out: csv,
        }) => {
            let base = load_pipeline_spec(spec)?;
            let result = sweep_state1(&base, *trials, *seed)?;
            if let Some(path) = csv {
                export_results(Export::Sweep(&result), path)?;
            }
            let summary = SweepOutput {
                seed: result.seed,
                trials: result.trials,
                argmax: *result.argmax(),
                supremum: result.supremum(),
            };
            if cli.json {
                emit_json(out, &summary)?;
            } else {
                let a = &summary.argmax;
                writeln!(out, "trials: {}  seed: {}", summary.trials, summary.seed).map_err(io)?;
                writeln!(
                    out,
                    "sample argmax: trial {}  p_1_1 = {:.6}  p_2_1 = {:.6}  P_pipeline(1) = {:.10}",
                    a.trial, a.p_1_1, a.p_2_1, a.p_pipeline_1
                )
                .map_err(io)?;
                writeln!(out, "supremum (p_1_1, p_2_1 -> 1): {:.10}", summary.supremum).map_err(io)?;
            }
            Ok(Outcome::Pass)
        }
    }
}

fn write_distribution_table(
    out: &mut dyn Write,
    d: &SystemDistribution,
    estimates: Option<&[MonteCarloEstimate]>,
) -> Result<()> {
    match estimates {
        None => {
            writeln!(out, "level  pmf           cdf").map_err(io)?;
            for (j, (p, c)) in d.pmf.iter().zip(&d.cdf).enumerate() {
                writeln!(out, "{j:<5}  {p:.10}  {c:.10}").map_err(io)?;
            }
        }
        Some(est) => {
            writeln!(out, "level  pmf           cdf           std_error").map_err(io)?;
            for ((j, (p, c)), e) in d.pmf.iter().zip(&d.cdf).enumerate().zip(est) {
                writeln!(out, "{j:<5}  {p:.10}  {c:.10}  {:.10}", e.std_error).map_err(io)?;
            }
        }
    }
    Ok(())
}

/// Convenience for tests and examples: runs the CLI and captures both streams.
pub fn run_captured(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mscs").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).expect("utf-8 output"),
        String::from_utf8(err).expect("utf-8 output"),
    )
}
