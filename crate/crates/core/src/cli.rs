//! Batch front-end: parses analysis requests, loads JSON inputs, dispatches
//! to the library modules, and emits JSON or CSV reports.
//!
//! Every JSON report embeds an `"inputs"` object echoing the flags that
//! produced it, so a report is sufficient to re-run its analysis. Runs are
//! deterministic: identical plans (including `--seed`) produce byte-identical
//! primary report files.
//!
//! Exit codes distinguish three situations:
//!
//! * `0` — the analysis ran and its hypothesis held;
//! * `1` — the inputs were well-formed but the argument does not apply
//!   (a failed lemma condition, a non-normal tensor, commensurate filling);
//!   the report is still written so sweeps can record the failure;
//! * `2` — the request itself was unusable: parse errors, missing or
//!   malformed files, I/O failures. The message goes to standard error.

use std::collections::BTreeMap;
use std::env;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::aqec::{
    commuting_projector_certificate, subsystem_variance, verify_distinguishability, Code, CodeSpec,
    SearchSettings,
};
use crate::circuit::{Circuit, Connectivity, LocalOperator, Region, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::lll::{
    glll_bound, symmetric_bound, uniform_assignment, verify_lopsided_condition, BoundOutcome,
    DependencyGraph, Event, JointDistribution, LllAssignment,
};
use crate::lsm::{lsm_report, momentum_of_amplitudes, ChargeAssignment};
use crate::mps::{
    aklt_tensor, canonicalize, clustering_constant, ghz_tensor, ring_amplitudes, MPSTensor,
    GAUGE_TOL,
};
use crate::wstate::{build_w, w_bound_report};

/// Exit code for a completed run whose hypothesis held.
pub const EXIT_OK: u8 = 0;
/// Exit code for a completed run whose argument did not apply.
pub const EXIT_INAPPLICABLE: u8 = 1;
/// Exit code for unusable requests: parse, file, and I/O errors.
pub const EXIT_USAGE: u8 = 2;

/// A parsed analysis request: one subcommand plus the output knobs shared
/// by every command.
#[derive(Debug, Clone, Parser)]
#[command(
    name = "aqec-lll",
    version,
    about = "Local-lemma bounds, shallow-circuit light cones, and subsystem-variance analysis",
    long_about = None
)]
pub struct AnalysisPlan {
    /// Report destination; standard output when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Report format. `csv` applies to tabular reports only
    /// (`lsm-check` tables and `code-variance --sweep`).
    #[arg(long, global = true, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,

    /// Seed for any randomized search the command performs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for parallel sweeps; 0 picks the machine default.
    /// When omitted, the AQEC_LLL_THREADS environment variable is consulted.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// The analysis to run.
    #[command(subcommand)]
    pub command: AnalysisCommand,
}

/// Output encodings for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    /// One JSON object with an embedded `"inputs"` block, trailing newline.
    Json,
    /// Comma-separated rows with a header line; tabular reports only.
    Csv,
}

/// Gate geometries selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Geometry {
    /// Open one-dimensional chain; nearest-neighbor gates.
    Line,
    /// Unrestricted pairs.
    All,
}

impl Geometry {
    fn as_str(self) -> &'static str {
        match self {
            Self::Line => "line",
            Self::All => "all",
        }
    }

    fn connectivity(self, n: usize) -> Connectivity {
        match self {
            Self::Line => Connectivity::line(n, false),
            Self::All => Connectivity::AllToAll,
        }
    }
}

/// The analyses the front-end dispatches.
#[derive(Debug, Clone, Subcommand)]
pub enum AnalysisCommand {
    /// Certified lower bound on the probability that no event occurs.
    ///
    /// The params file holds either a symmetric instance
    /// {"p":0.01,"d":3,"n":100,"c":1.0} or a general one
    /// {"probabilities":[...],"gamma":[[...],...],"c":1.0,"x":[...]} where
    /// "x" is an optional weight vector (solved uniformly when omitted).
    LllBound {
        /// JSON instance description.
        #[arg(long, value_name = "FILE")]
        params: PathBuf,
    },

    /// Exhaustive check of the lopsided dependency condition on an explicit
    /// probability space.
    ///
    /// The instance file holds {"probs":[...],"events":[{"name":...,
    /// "outcomes":[...]},...],"gamma":[[...],...]} and optionally "subset",
    /// the event positions to check (all events when omitted).
    LllVerify {
        /// JSON probability-space description.
        #[arg(long, value_name = "FILE")]
        instance: PathBuf,

        /// Inflation constant the conditional probabilities are compared
        /// against.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },

    /// Largest trace-norm deviation of a size-d reduced matrix across the
    /// code manifold.
    CodeVariance {
        /// JSON code description: {"n":...,"k":...,"basis":[...]} with each
        /// basis entry either {"circuit":...} or {"amplitudes":[[re,im],...]}.
        #[arg(long, value_name = "FILE")]
        code: PathBuf,

        /// Region size to search (the largest size when --sweep is given).
        #[arg(long)]
        d: usize,

        /// Search every region size from 1 to d and emit a table.
        #[arg(long)]
        sweep: bool,

        /// Points per angle axis of the deterministic single-logical-qubit
        /// grid.
        #[arg(long, default_value_t = 64)]
        grid_points: usize,

        /// Seeded random code states drawn for larger logical spaces.
        #[arg(long, default_value_t = 256)]
        random_samples: usize,

        /// Rounds of coordinate-ascent refinement on each region's best
        /// state.
        #[arg(long, default_value_t = 3)]
        refine_iters: usize,
    },

    /// Builds the local observable that best distinguishes two shallow
    /// preparations and checks it against the light-cone bound.
    CodeDistinguish {
        /// JSON circuit for the first preparation.
        #[arg(long, value_name = "FILE")]
        circuit1: PathBuf,

        /// JSON circuit for the second preparation.
        #[arg(long, value_name = "FILE")]
        circuit2: PathBuf,

        /// Declared overlap bound between the two outputs, in [0, 1).
        #[arg(long)]
        delta: f64,
    },

    /// Escape-probability certificate for a commuting projector family,
    /// compared against the exact value.
    CodeCertify {
        /// JSON setup: {"state":...,"projectors":[...]} and optionally
        /// "regions" (projector supports when omitted).
        #[arg(
            long,
            value_name = "FILE",
            required_unless_present = "w",
            conflicts_with = "w"
        )]
        setup: Option<PathBuf>,

        /// Built-in setup: the uniform single-excitation state on N qubits
        /// with one excitation projector per site.
        #[arg(long, value_name = "N")]
        w: Option<usize>,

        /// Weighting constant of the certificate condition.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },

    /// Depth lower bound for preparing the uniform single-excitation state
    /// within a trace-distance budget.
    WstateReport {
        /// Number of qubits.
        #[arg(long)]
        n: usize,

        /// Trace-distance accuracy demanded of the preparation.
        #[arg(long)]
        delta: f64,

        /// Geometry the preparing circuit is restricted to.
        #[arg(long, value_enum)]
        connectivity: Geometry,
    },

    /// Canonical form, transfer spectrum, and optional clustering constant
    /// of a translationally invariant tensor.
    MpsAnalyze {
        /// Tensor source: a JSON file, or the built-ins `aklt` and `ghz`.
        #[arg(long, value_name = "FILE|aklt|ghz")]
        tensor: String,

        /// Decay rate for the clustering bound; defaults to the midpoint of
        /// the spectral gap.
        #[arg(long)]
        lambda: Option<f64>,

        /// First observable of the clustering pair: JSON rows of [re, im]
        /// entries, positive semidefinite.
        #[arg(long, value_name = "FILE", requires = "q")]
        p: Option<PathBuf>,

        /// Second observable of the clustering pair.
        #[arg(long, value_name = "FILE", requires = "p")]
        q: Option<PathBuf>,
    },

    /// Exact state of a closed ring built from one repeated tensor.
    MpsRing {
        /// Tensor source: a JSON file, or the built-ins `aklt` and `ghz`.
        #[arg(long, value_name = "FILE|aklt|ghz")]
        tensor: String,

        /// Ring length in sites.
        #[arg(long)]
        sites: usize,

        /// Include the normalized amplitude list in the report.
        #[arg(long)]
        amplitudes: bool,
    },

    /// Momentum, twist response, and local indistinguishability of a
    /// translation-invariant charge eigenstate on a ring.
    LsmCheck {
        /// JSON state: {"n":...,"amplitudes":[[re,im],...]}.
        #[arg(
            long,
            value_name = "FILE",
            required_unless_present = "w",
            conflicts_with = "w"
        )]
        state: Option<PathBuf>,

        /// Built-in state: the uniform single-excitation state on N sites.
        #[arg(long, value_name = "N")]
        w: Option<usize>,

        /// JSON per-site charge: {"sites":...,"charge":[[[re,im],...],...]};
        /// the excitation-counting charge when omitted.
        #[arg(long, value_name = "FILE")]
        charge: Option<PathBuf>,

        /// Circuit depth for the preparability conditions; requires --delta.
        #[arg(long, requires = "delta")]
        depth: Option<usize>,

        /// Trace-distance budget for the preparability conditions; requires
        /// --depth.
        #[arg(long, requires = "depth")]
        delta: Option<f64>,
    },
}

impl AnalysisCommand {
    /// The subcommand name as typed on the command line.
    #[must_use]
    pub fn name(&self) -> &'static str {
        match self {
            Self::LllBound { .. } => "lll-bound",
            Self::LllVerify { .. } => "lll-verify",
            Self::CodeVariance { .. } => "code-variance",
            Self::CodeDistinguish { .. } => "code-distinguish",
            Self::CodeCertify { .. } => "code-certify",
            Self::WstateReport { .. } => "wstate-report",
            Self::MpsAnalyze { .. } => "mps-analyze",
            Self::MpsRing { .. } => "mps-ring",
            Self::LsmCheck { .. } => "lsm-check",
        }
    }
}

/// Parses an argument list (without the program name) into a plan.
///
/// `--help` and `--version` surface as errors whose kind reports a
/// successful display; [`main`-style callers](run) should exit 0 on those
/// and 2 on genuine usage errors.
///
/// # Errors
///
/// Returns the underlying parser error for unknown commands, missing
/// required flags, and malformed values; the message names the offending
/// flag.
pub fn parse_command<I, T>(argv: I) -> std::result::Result<AnalysisPlan, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let full = std::iter::once(OsString::from("aqec-lll")).chain(argv.into_iter().map(Into::into));
    AnalysisPlan::try_parse_from(full)
}

/// Executes a plan end to end and returns the process exit code.
///
/// The report goes to `--out` or standard output. Inapplicability (exit 1)
/// still writes a report: either the command's own report with a failed
/// condition inside, or `{"status":"inapplicable","detail":...}` when the
/// analysis could not produce a value at all.
#[must_use]
pub fn run(plan: &AnalysisPlan) -> u8 {
    configure_threads(plan);
    let inputs = inputs_value(plan);
    match execute(plan) {
        Ok(output) => {
            let rendered = match plan.format {
                ReportFormat::Json => render_json(&inputs, &output.body),
                ReportFormat::Csv => match &output.table {
                    Some(table) => Ok(render_csv(table)),
                    None => Err(Error::InvalidInput(format!(
                        "{} emits a nested report; csv applies to tabular reports only",
                        plan.command.name()
                    ))),
                },
            };
            match rendered.and_then(|text| write_output(plan, &text)) {
                Ok(()) => {
                    if output.applicable {
                        EXIT_OK
                    } else {
                        EXIT_INAPPLICABLE
                    }
                }
                Err(err) => {
                    eprintln!("error: {err}");
                    EXIT_USAGE
                }
            }
        }
        // No value exists, but the request was well-formed: record why the
        // argument does not apply and signal it through the exit code.
        Err(Error::Inapplicable(detail)) => {
            let body = json!({ "status": "inapplicable", "detail": detail });
            match render_json(&inputs, &body).and_then(|text| write_output(plan, &text)) {
                Ok(()) => EXIT_INAPPLICABLE,
                Err(err) => {
                    eprintln!("error: {err}");
                    EXIT_USAGE
                }
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_USAGE
        }
    }
}

/// Result of one dispatched analysis: the JSON body (without the `inputs`
/// block), an optional tabular projection for CSV output, and whether the
/// hypothesis held.
struct RunOutput {
    body: Value,
    table: Option<Table>,
    applicable: bool,
}

impl RunOutput {
    fn nested(body: Value, applicable: bool) -> Self {
        Self {
            body,
            table: None,
            applicable,
        }
    }
}

/// A flat report: header plus formatted rows.
struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<String>>,
}

fn configure_threads(plan: &AnalysisPlan) {
    let threads = plan.threads.unwrap_or_else(|| {
        env::var("AQEC_LLL_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(0)
    });
    if threads > 0 {
        // A later call in the same process keeps the first pool; acceptable
        // for repeated in-process invocations.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

/// The `"inputs"` block: the subcommand and every analysis-relevant flag.
fn inputs_value(plan: &AnalysisPlan) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), json!(plan.command.name()));
    m.insert("seed".into(), json!(plan.seed));
    match &plan.command {
        AnalysisCommand::LllBound { params } => {
            m.insert("params".into(), path_value(params));
        }
        AnalysisCommand::LllVerify { instance, c } => {
            m.insert("instance".into(), path_value(instance));
            m.insert("c".into(), json!(c));
        }
        AnalysisCommand::CodeVariance {
            code,
            d,
            sweep,
            grid_points,
            random_samples,
            refine_iters,
        } => {
            m.insert("code".into(), path_value(code));
            m.insert("d".into(), json!(d));
            m.insert("sweep".into(), json!(sweep));
            m.insert("grid_points".into(), json!(grid_points));
            m.insert("random_samples".into(), json!(random_samples));
            m.insert("refine_iters".into(), json!(refine_iters));
        }
        AnalysisCommand::CodeDistinguish {
            circuit1,
            circuit2,
            delta,
        } => {
            m.insert("circuit1".into(), path_value(circuit1));
            m.insert("circuit2".into(), path_value(circuit2));
            m.insert("delta".into(), json!(delta));
        }
        AnalysisCommand::CodeCertify { setup, w, c } => {
            if let Some(path) = setup {
                m.insert("setup".into(), path_value(path));
            }
            if let Some(n) = w {
                m.insert("w".into(), json!(n));
            }
            m.insert("c".into(), json!(c));
        }
        AnalysisCommand::WstateReport {
            n,
            delta,
            connectivity,
        } => {
            m.insert("n".into(), json!(n));
            m.insert("delta".into(), json!(delta));
            m.insert("connectivity".into(), json!(connectivity.as_str()));
        }
        AnalysisCommand::MpsAnalyze {
            tensor,
            lambda,
            p,
            q,
        } => {
            m.insert("tensor".into(), json!(tensor));
            if let Some(rate) = lambda {
                m.insert("lambda".into(), json!(rate));
            }
            if let Some(path) = p {
                m.insert("p".into(), path_value(path));
            }
            if let Some(path) = q {
                m.insert("q".into(), path_value(path));
            }
        }
        AnalysisCommand::MpsRing {
            tensor,
            sites,
            amplitudes,
        } => {
            m.insert("tensor".into(), json!(tensor));
            m.insert("sites".into(), json!(sites));
            m.insert("amplitudes".into(), json!(amplitudes));
        }
        AnalysisCommand::LsmCheck {
            state,
            w,
            charge,
            depth,
            delta,
        } => {
            if let Some(path) = state {
                m.insert("state".into(), path_value(path));
            }
            if let Some(n) = w {
                m.insert("w".into(), json!(n));
            }
            if let Some(path) = charge {
                m.insert("charge".into(), path_value(path));
            }
            if let Some(t) = depth {
                m.insert("depth".into(), json!(t));
            }
            if let Some(budget) = delta {
                m.insert("delta".into(), json!(budget));
            }
        }
    }
    Value::Object(m)
}

fn path_value(path: &Path) -> Value {
    json!(path.display().to_string())
}

fn execute(plan: &AnalysisPlan) -> Result<RunOutput> {
    match &plan.command {
        AnalysisCommand::LllBound { params } => lll_bound_command(params),
        AnalysisCommand::LllVerify { instance, c } => lll_verify_command(instance, *c),
        AnalysisCommand::CodeVariance {
            code,
            d,
            sweep,
            grid_points,
            random_samples,
            refine_iters,
        } => {
            let settings = SearchSettings {
                grid_points: *grid_points,
                random_samples: *random_samples,
                refine_iters: *refine_iters,
                seed: plan.seed,
            };
            code_variance_command(code, *d, *sweep, &settings)
        }
        AnalysisCommand::CodeDistinguish {
            circuit1,
            circuit2,
            delta,
        } => code_distinguish_command(circuit1, circuit2, *delta),
        AnalysisCommand::CodeCertify { setup, w, c } => {
            code_certify_command(setup.as_deref(), *w, *c)
        }
        AnalysisCommand::WstateReport {
            n,
            delta,
            connectivity,
        } => wstate_report_command(*n, *delta, *connectivity),
        AnalysisCommand::MpsAnalyze {
            tensor,
            lambda,
            p,
            q,
        } => mps_analyze_command(tensor, *lambda, p.as_deref(), q.as_deref()),
        AnalysisCommand::MpsRing {
            tensor,
            sites,
            amplitudes,
        } => mps_ring_command(tensor, *sites, *amplitudes),
        AnalysisCommand::LsmCheck {
            state,
            w,
            charge,
            depth,
            delta,
        } => lsm_check_command(state.as_deref(), *w, charge.as_deref(), *depth, *delta),
    }
}

/// Instance description accepted by `lll-bound`.
#[derive(Deserialize)]
#[serde(untagged)]
enum BoundParams {
    Symmetric {
        p: f64,
        d: usize,
        n: usize,
        #[serde(default = "default_c")]
        c: f64,
    },
    General {
        probabilities: Vec<f64>,
        gamma: Vec<Vec<usize>>,
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default)]
        x: Option<Vec<f64>>,
    },
}

fn default_c() -> f64 {
    1.0
}

fn lll_bound_command(params: &Path) -> Result<RunOutput> {
    let outcome = match load_json::<BoundParams>(params, "params")? {
        BoundParams::Symmetric { p, d, n, c } => symmetric_bound(p, d, n, c)?,
        BoundParams::General {
            probabilities,
            gamma,
            c,
            x,
        } => {
            let graph = DependencyGraph { gamma };
            let assignment = match x {
                Some(x) => Some(LllAssignment { c, x }),
                None => uniform_assignment(&probabilities, &graph, c)?,
            };
            match assignment {
                Some(assignment) => glll_bound(&probabilities, &graph, &assignment)?,
                // No uniform weight certifies these inputs: report the
                // comparison that failed, worst probability against the
                // peak of the solvable range.
                None => {
                    let d = graph.max_degree();
                    let p_max = probabilities.iter().copied().fold(0.0f64, f64::max);
                    let x_peak = 1.0 / (c * (d as f64 + 1.0));
                    let rhs = x_peak * (1.0 - c * x_peak).powi(d as i32);
                    BoundOutcome::ConditionViolation {
                        index: None,
                        lhs: p_max,
                        rhs,
                    }
                }
            }
        }
    };
    let applicable = outcome.is_applicable();
    Ok(RunOutput::nested(to_body(&outcome)?, applicable))
}

/// Instance description accepted by `lll-verify`.
#[derive(Deserialize)]
struct VerifyInstance {
    probs: Vec<f64>,
    events: Vec<Event>,
    gamma: Vec<Vec<usize>>,
    #[serde(default)]
    subset: Option<Vec<usize>>,
}

fn lll_verify_command(instance: &Path, c: f64) -> Result<RunOutput> {
    let spec = load_json::<VerifyInstance>(instance, "instance")?;
    let event_count = spec.events.len();
    let dist = JointDistribution {
        probs: spec.probs,
        events: spec.events,
    };
    let graph = DependencyGraph { gamma: spec.gamma };
    let indices = spec.subset.unwrap_or_else(|| (0..event_count).collect());
    let report = verify_lopsided_condition(&dist, &indices, &graph, c)?;
    let applicable = report.passes;
    Ok(RunOutput::nested(to_body(&report)?, applicable))
}

fn code_variance_command(
    code: &Path,
    d: usize,
    sweep: bool,
    settings: &SearchSettings,
) -> Result<RunOutput> {
    let spec = load_json::<CodeSpec>(code, "code")?;
    let code = Code::try_from(spec)?;
    if sweep {
        let mut reports = Vec::with_capacity(d);
        for size in 1..=d {
            reports.push(subsystem_variance(&code, size, settings)?);
        }
        let rows = reports
            .iter()
            .map(|r| {
                vec![
                    r.d.to_string(),
                    r.epsilon.to_string(),
                    r.samples_evaluated.to_string(),
                ]
            })
            .collect();
        let body = json!({
            "n": code.physical_qubits(),
            "k": code.logical_qubits(),
            "sweep": reports,
        });
        Ok(RunOutput {
            body,
            table: Some(Table {
                header: &["d", "epsilon", "samples_evaluated"],
                rows,
            }),
            applicable: true,
        })
    } else {
        let report = subsystem_variance(&code, d, settings)?;
        let mut body = to_body(&report)?;
        if let Value::Object(map) = &mut body {
            map.insert("n".into(), json!(code.physical_qubits()));
            map.insert("k".into(), json!(code.logical_qubits()));
        }
        Ok(RunOutput::nested(body, true))
    }
}

fn code_distinguish_command(circuit1: &Path, circuit2: &Path, delta: f64) -> Result<RunOutput> {
    let c1 = load_json::<Circuit>(circuit1, "circuit")?;
    let c2 = load_json::<Circuit>(circuit2, "circuit")?;
    let report = verify_distinguishability(&c1, &c2, delta)?;
    let applicable = report.satisfied;
    Ok(RunOutput::nested(to_body(&report)?, applicable))
}

/// Setup description accepted by `code-certify`.
#[derive(Deserialize)]
struct CertifySetup {
    state: StateVector,
    projectors: Vec<LocalOperator>,
    #[serde(default)]
    regions: Option<Vec<Vec<usize>>>,
}

fn code_certify_command(setup: Option<&Path>, w: Option<usize>, c: f64) -> Result<RunOutput> {
    let (state, projectors, regions): (StateVector, Vec<LocalOperator>, Vec<Region>) =
        match (setup, w) {
            (Some(path), _) => {
                let spec = load_json::<CertifySetup>(path, "setup")?;
                let regions = match spec.regions {
                    Some(lists) => lists.into_iter().map(Region::new).collect(),
                    None => spec.projectors.iter().map(|p| p.support.clone()).collect(),
                };
                (spec.state, spec.projectors, regions)
            }
            (None, Some(n)) => {
                let projectors: Vec<LocalOperator> =
                    (0..n).map(excitation_projector).collect::<Result<_>>()?;
                let regions = (0..n).map(Region::single).collect();
                (build_w(n)?, projectors, regions)
            }
            (None, None) => {
                return Err(Error::InvalidInput(
                    "code-certify needs --setup or --w".into(),
                ))
            }
        };
    let report = commuting_projector_certificate(&projectors, &regions, &state, c)?;
    let applicable = report.condition_holds;
    Ok(RunOutput::nested(to_body(&report)?, applicable))
}

/// `|1⟩⟨1|` on one site.
fn excitation_projector(site: usize) -> Result<LocalOperator> {
    let mut m = CMatrix::zeros(2, 2);
    m[(1, 1)] = C64::new(1.0, 0.0);
    LocalOperator::new(Region::single(site), m)
}

fn wstate_report_command(n: usize, delta: f64, geometry: Geometry) -> Result<RunOutput> {
    let report = w_bound_report(n, delta, &geometry.connectivity(n))?;
    let applicable = report.condition_holds;
    Ok(RunOutput::nested(to_body(&report)?, applicable))
}

fn mps_analyze_command(
    tensor: &str,
    lambda: Option<f64>,
    p: Option<&Path>,
    q: Option<&Path>,
) -> Result<RunOutput> {
    let a = load_tensor(tensor)?;
    let canon = canonicalize(&a, GAUGE_TOL)?;
    let spectrum: Vec<[f64; 2]> = canon.spectrum.iter().map(|z| [z.re, z.im]).collect();
    let mut body = json!({
        "phys_dim": a.phys_dim(),
        "bond_dim": a.bond_dim(),
        "lambda2": canon.lambda2,
        "is_normal": canon.is_normal,
        "residual_right": canon.residual_right,
        "residual_left": canon.residual_left,
        "spectrum": spectrum,
        "rho": matrix_rows(&canon.rho),
    });
    if let (Some(p_path), Some(q_path)) = (p, q) {
        let p_obs = load_matrix(p_path, "observable")?;
        let q_obs = load_matrix(q_path, "observable")?;
        let clustering = clustering_constant(&a, lambda, &p_obs, &q_obs)?;
        if let Value::Object(map) = &mut body {
            map.insert(
                "clustering".into(),
                serde_json::to_value(&clustering)
                    .map_err(|e| Error::InvalidInput(format!("unserializable report: {e}")))?,
            );
        }
    }
    let applicable = canon.is_normal;
    Ok(RunOutput::nested(body, applicable))
}

fn mps_ring_command(tensor: &str, sites: usize, emit_amplitudes: bool) -> Result<RunOutput> {
    let a = load_tensor(tensor)?;
    let amps = ring_amplitudes(&a, sites)?;
    // Cyclic trace states are exactly shift invariant, so the momentum is
    // defined; reporting it confirms the phase convention.
    let momentum = momentum_of_amplitudes(&amps, a.phys_dim(), sites)?;
    let mut body = json!({
        "sites": sites,
        "phys_dim": a.phys_dim(),
        "bond_dim": a.bond_dim(),
        "dimension": amps.len(),
        "momentum": momentum,
    });
    if emit_amplitudes {
        let pairs: Vec<[f64; 2]> = amps.iter().map(|z| [z.re, z.im]).collect();
        if let Value::Object(map) = &mut body {
            map.insert("amplitudes".into(), json!(pairs));
        }
    }
    Ok(RunOutput::nested(body, true))
}

fn lsm_check_command(
    state: Option<&Path>,
    w: Option<usize>,
    charge: Option<&Path>,
    depth: Option<usize>,
    delta: Option<f64>,
) -> Result<RunOutput> {
    let state = match (state, w) {
        (Some(path), _) => load_json::<StateVector>(path, "state")?,
        (None, Some(n)) => build_w(n)?,
        (None, None) => return Err(Error::InvalidInput("lsm-check needs --state or --w".into())),
    };
    let charges = match charge {
        Some(path) => load_json::<ChargeAssignment>(path, "charge")?,
        None => ChargeAssignment::uniform_excitation(state.qubit_count())?,
    };
    let report = lsm_report(&state, &charges, depth, delta)?;
    let rows = report
        .indistinguishability
        .iter()
        .map(|entry| vec![entry.size.to_string(), entry.trace_distance.to_string()])
        .collect();
    let applicable = report.applicable;
    Ok(RunOutput {
        body: to_body(&report)?,
        table: Some(Table {
            header: &["size", "trace_distance"],
            rows,
        }),
        applicable,
    })
}

fn load_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::InvalidInput(format!("cannot read {what} file {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("malformed {what} file {}: {e}", path.display())))
}

fn load_tensor(source: &str) -> Result<MPSTensor> {
    match source {
        "aklt" => Ok(aklt_tensor()),
        "ghz" => Ok(ghz_tensor()),
        path => load_json::<MPSTensor>(Path::new(path), "tensor"),
    }
}

/// Reads a complex matrix stored as JSON rows of `[re, im]` entries.
fn load_matrix(path: &Path, what: &str) -> Result<CMatrix> {
    let rows = load_json::<Vec<Vec<[f64; 2]>>>(path, what)?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput(format!(
            "{what} file {} must hold a nonempty square matrix",
            path.display()
        )));
    }
    Ok(CMatrix::from_fn(n, n, |r, c| {
        let [re, im] = rows[r][c];
        C64::new(re, im)
    }))
}

fn matrix_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

fn to_body<T: serde::Serialize>(report: &T) -> Result<Value> {
    serde_json::to_value(report)
        .map_err(|e| Error::InvalidInput(format!("unserializable report: {e}")))
}

/// Assembles `{"inputs": ..., <body fields>}` as compact JSON with a
/// trailing newline. Keys are emitted in sorted order, so identical plans
/// render identical bytes.
fn render_json(inputs: &Value, body: &Value) -> Result<String> {
    let mut map = BTreeMap::new();
    map.insert("inputs".to_string(), inputs.clone());
    match body {
        Value::Object(fields) => {
            for (k, v) in fields {
                map.insert(k.clone(), v.clone());
            }
        }
        other => {
            map.insert("result".to_string(), other.clone());
        }
    }
    let mut text = serde_json::to_string(&map)
        .map_err(|e| Error::InvalidInput(format!("unserializable report: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn render_csv(table: &Table) -> String {
    let mut text = table.header.join(",");
    text.push('\n');
    for row in &table.rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

fn write_output(plan: &AnalysisPlan, text: &str) -> Result<()> {
    match &plan.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
