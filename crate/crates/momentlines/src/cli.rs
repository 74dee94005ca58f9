//! Command-line front end: JSON tables in, verdicts / measures / regions /
//! residuals out.
//!
//! Exit codes: 0 success, 1 bad input, 2 negative solvability verdict
//! (unsolvable data, failed sufficient condition, boundary data), 3
//! numerical failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::Error;
use crate::hamburger::{HamburgerVerdict, Solvability};
use crate::interval::IntervalSet;
use crate::lines::{split_moments, LineFamily};
use crate::low_order::{
    classify_m1n1, classify_m1n2, m1n2_line_positions, solve_m1n1, solve_m1n2, ClassM1N1,
    ClassM1N2,
};
use crate::measure::{residual, AtomicMeasure2D, MomentTable};
use crate::order3::{region_analysis, solve_order3, Order3Report, SolverConfig};

const TOL_ENV_VAR: &str = "MOMENTLINES_TOL";
const DEFAULT_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "momentlines",
    about = "Solve truncated two-dimensional moment problems on horizontal lines",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Emit machine-readable JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write the output document to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a moment table: decide solvability and construct a measure.
    Solve {
        /// Path to the moment table JSON file.
        table: PathBuf,
        /// Residual tolerance (default: MOMENTLINES_TOL or 1e-9).
        #[arg(long)]
        tol: Option<f64>,
        /// Headroom factor above the a3 lower bound.
        #[arg(long = "a3-margin")]
        a3_margin: Option<f64>,
        /// Geometric growth factor of the a3 search.
        #[arg(long = "a3-growth")]
        a3_growth: Option<f64>,
        /// Candidate budget of the a3 search.
        #[arg(long = "a3-max-iters")]
        a3_max_iters: Option<u32>,
        /// Override the free moment s[0][3] used when N = 2.
        #[arg(long = "complete-s03")]
        complete_s03: Option<f64>,
        /// Override the free moment s[1][3] used when N = 2.
        #[arg(long = "complete-s13")]
        complete_s13: Option<f64>,
        /// Override the free moment s[2][3] used when N = 2.
        #[arg(long = "complete-s23")]
        complete_s23: Option<f64>,
        /// Override the free moment s[3][3] used when N = 2.
        #[arg(long = "complete-s33")]
        complete_s33: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Report the feasible a2 regions of a table with M, N >= 2.
    Region {
        table: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Split a table into per-line moments on explicit line positions.
    Split {
        table: PathBuf,
        /// Comma-separated strictly increasing line positions a0,a1,...
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        lines: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check how well a measure reproduces a moment table.
    Verify {
        measure: PathBuf,
        table: PathBuf,
        /// Residual tolerance (default: MOMENTLINES_TOL or 1e-9).
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            let _ = err.print();
            return 0;
        }
        Err(err) => {
            let _ = err.print();
            return 1;
        }
    };

    let (rendered, output) = match cli.command {
        Command::Solve {
            table,
            tol,
            a3_margin,
            a3_growth,
            a3_max_iters,
            complete_s03,
            complete_s13,
            complete_s23,
            complete_s33,
            output,
        } => {
            let cfg = match build_config(
                tol,
                a3_margin,
                a3_growth,
                a3_max_iters,
                [complete_s03, complete_s13, complete_s23, complete_s33],
            ) {
                Ok(cfg) => cfg,
                Err(msg) => return input_error(&msg),
            };
            (cmd_solve(&table, &cfg), output)
        }
        Command::Region { table, output } => (cmd_region(&table), output),
        Command::Split { table, lines, output } => (cmd_split(&table, &lines), output),
        Command::Verify { measure, table, tol, output } => {
            let tol = match resolve_tol(tol) {
                Ok(t) => t,
                Err(msg) => return input_error(&msg),
            };
            (cmd_verify(&measure, &table, tol), output)
        }
    };

    match rendered {
        Ok(doc) => {
            let text = if output.json { doc.json } else { doc.human };
            if let Err(code) = emit(&output.out, &text) {
                return code;
            }
            doc.exit
        }
        Err(msg) => input_error(&msg),
    }
}

fn input_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    1
}

struct Rendered {
    json: String,
    human: String,
    exit: i32,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), i32> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|err| {
            eprintln!("error: failed to write {}: {err}", path.display());
            1
        }),
        None => {
            let stdout = std::io::stdout();
            let mut handle = stdout.lock();
            handle.write_all(text.as_bytes()).map_err(|_| 1)
        }
    }
}

fn resolve_tol(flag: Option<f64>) -> Result<f64, String> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV_VAR) {
            Ok(raw) => raw
                .parse::<f64>()
                .map_err(|_| format!("{TOL_ENV_VAR} is not a number: {raw:?}"))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if !(tol.is_finite() && tol > 0.0) {
        return Err(format!("tolerance must be a positive number, got {tol}"));
    }
    Ok(tol)
}

fn build_config(
    tol: Option<f64>,
    a3_margin: Option<f64>,
    a3_growth: Option<f64>,
    a3_max_iters: Option<u32>,
    complete: [Option<f64>; 4],
) -> Result<SolverConfig, String> {
    let mut cfg = SolverConfig {
        tol: resolve_tol(tol)?,
        complete_s3: complete,
        ..SolverConfig::default()
    };
    if let Some(m) = a3_margin {
        cfg.a3_margin = m;
    }
    if let Some(g) = a3_growth {
        cfg.a3_growth = g;
    }
    if let Some(i) = a3_max_iters {
        cfg.a3_max_iters = i;
    }
    cfg.validate().map_err(|err| err.to_string())?;
    Ok(cfg)
}

fn load_table(path: &Path) -> Result<MomentTable, String> {
    let raw = std::fs::read_to_string(path)
        .map_err(|err| format!("failed to read {}: {err}", path.display()))?;
    serde_json::from_str(&raw).map_err(|err| format!("invalid moment table in {}: {err}", path.display()))
}

fn load_measure(path: &Path) -> Result<AtomicMeasure2D, String> {
    let raw = std::fs::read_to_string(path)
        .map_err(|err| format!("failed to read {}: {err}", path.display()))?;
    serde_json::from_str(&raw).map_err(|err| format!("invalid measure in {}: {err}", path.display()))
}

// ---------------------------------------------------------------------
// output documents

/// Serializes with every f64 printed at 17 significant digits, so emitted
/// numbers parse back to the identical double.
fn to_json<T: Serialize>(value: &T) -> String {
    struct SigDigits;
    impl serde_json::ser::Formatter for SigDigits {
        fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
        where
            W: ?Sized + std::io::Write,
        {
            write!(writer, "{value:.16e}")
        }
    }
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser).expect("output documents always serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[derive(Serialize)]
struct IntervalOut {
    lo: f64,
    hi: Option<f64>,
    hi_inf: bool,
}

fn intervals_out(set: &IntervalSet) -> Vec<IntervalOut> {
    set.components()
        .iter()
        .map(|iv| IntervalOut {
            lo: iv.lo,
            hi: iv.hi.is_finite().then_some(iv.hi),
            hi_inf: !iv.hi.is_finite(),
        })
        .collect()
}

#[derive(Serialize)]
struct VerdictOut {
    kind: String,
    s0: f64,
    hankel: Option<f64>,
}

fn verdict_out(v: &HamburgerVerdict) -> VerdictOut {
    let kind = match v.kind {
        Solvability::ZeroMeasure => "zero_measure",
        Solvability::SolvableStrict => "solvable_strict",
        Solvability::Inconclusive => "inconclusive",
        Solvability::Unsolvable => "unsolvable",
    };
    VerdictOut { kind: kind.into(), s0: v.s0, hankel: v.hankel }
}

#[derive(Serialize)]
struct TraceOut {
    a3: f64,
    accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Serialize)]
struct Order3Diag {
    a2: f64,
    a3: f64,
    i1: Vec<IntervalOut>,
    i2: Vec<IntervalOut>,
    i3: Vec<IntervalOut>,
    base_interval: Vec<IntervalOut>,
    admissible: Vec<IntervalOut>,
    split: Vec<Vec<f64>>,
    line_verdicts: Vec<VerdictOut>,
    closed_form_dev: Vec<f64>,
    a3_trace: Vec<TraceOut>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Diagnostics {
    Order3(Box<Order3Diag>),
    Rank1 { alpha: f64 },
}

#[derive(Serialize)]
struct SolveDoc {
    verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lines: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    measure: Option<AtomicMeasure2D>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<Diagnostics>,
}

impl SolveDoc {
    fn failure(verdict: &str, error: String) -> Self {
        SolveDoc {
            verdict: verdict.into(),
            case: None,
            note: None,
            error: Some(error),
            lines: None,
            measure: None,
            residual: None,
            diagnostics: None,
        }
    }
}

fn human_atoms(mu: &AtomicMeasure2D) -> String {
    let mut out = format!("atoms ({}):\n", mu.atoms().len());
    for a in mu.atoms() {
        out.push_str(&format!(
            "  (x1, x2, w) = ({:.6}, {:.6}, {:.6})\n",
            a.x1, a.x2, a.w
        ));
    }
    out
}

fn human_solve(doc: &SolveDoc, intervals: Option<&Order3Report>) -> String {
    let mut out = format!("verdict: {}\n", doc.verdict);
    if let Some(case) = &doc.case {
        out.push_str(&format!("case: {case}\n"));
    }
    if let Some(note) = &doc.note {
        out.push_str(&format!("note: {note}\n"));
    }
    if let Some(err) = &doc.error {
        out.push_str(&format!("reason: {err}\n"));
    }
    if let Some(lines) = &doc.lines {
        if !lines.is_empty() {
            let rendered: Vec<String> = lines.iter().map(|a| format!("{a:.6}")).collect();
            out.push_str(&format!("lines: {}\n", rendered.join(", ")));
        }
    }
    if let Some(mu) = &doc.measure {
        out.push_str(&human_atoms(mu));
    }
    if let Some(res) = doc.residual {
        out.push_str(&format!("residual: {res:e}\n"));
    }
    if let Some(report) = intervals {
        out.push_str(&format!("I1: {}\n", report.i1));
        out.push_str(&format!("I2: {}\n", report.i2));
        out.push_str(&format!("I3: {}\n", report.i3));
        out.push_str(&format!("base interval: {}\n", report.base_interval));
        out.push_str(&format!("admissible a2: {}\n", report.admissible));
        out.push_str(&format!(
            "a2 = {:.6}, a3 = {:.6} ({} candidate{} tried)\n",
            report.a2,
            report.a3,
            report.a3_trace.len(),
            if report.a3_trace.len() == 1 { "" } else { "s" }
        ));
    }
    out
}

// ---------------------------------------------------------------------
// commands

fn failure_doc(err: &Error) -> Rendered {
    let (verdict, exit) = match err {
        Error::NotSolvableOnTheseLines { .. } => ("unsolvable", 2),
        Error::InconclusiveOnLine { .. } => ("inconclusive", 2),
        Error::SufficientConditionFails(_) => ("not_certified", 2),
        Error::SearchExhausted { .. }
        | Error::NumericalFailure(_)
        | Error::PreconditionFailed(_)
        | Error::InternalAssertion(_) => ("numerical_failure", 3),
        // InvalidInput is handled as an input error before this point
        Error::InvalidInput(_) => ("invalid_input", 1),
    };
    let doc = SolveDoc::failure(verdict, err.to_string());
    Rendered {
        json: to_json(&doc),
        human: human_solve(&doc, None),
        exit,
    }
}

fn solved_doc(
    case: &str,
    note: Option<String>,
    lines: Vec<f64>,
    mu: AtomicMeasure2D,
    table: &MomentTable,
    report: Option<&Order3Report>,
) -> Rendered {
    // independent re-verification before printing
    let res = residual(table, &mu);
    let doc = SolveDoc {
        verdict: "solved".into(),
        case: Some(case.into()),
        note,
        error: None,
        lines: Some(lines),
        measure: Some(mu),
        residual: Some(res),
        diagnostics: report.map(|r| {
            Diagnostics::Order3(Box::new(Order3Diag {
                a2: r.a2,
                a3: r.a3,
                i1: intervals_out(&r.i1),
                i2: intervals_out(&r.i2),
                i3: intervals_out(&r.i3),
                base_interval: intervals_out(&r.base_interval),
                admissible: intervals_out(&r.admissible),
                split: r.split.clone(),
                line_verdicts: r.line_verdicts.iter().map(verdict_out).collect(),
                closed_form_dev: r.closed_form_dev.to_vec(),
                a3_trace: r
                    .a3_trace
                    .iter()
                    .map(|s| TraceOut { a3: s.a3, accepted: s.accepted, note: s.note.clone() })
                    .collect(),
            }))
        }),
    };
    Rendered {
        json: to_json(&doc),
        human: human_solve(&doc, report),
        exit: 0,
    }
}

fn cmd_solve(table_path: &Path, cfg: &SolverConfig) -> Result<Rendered, String> {
    let table = load_table(table_path)?;
    let dims = (table.m_max(), table.n_max());
    match dims {
        (1, 1) => solve_11(&table),
        (1, 2) => solve_12(&table),
        (2, 2) | (2, 3) | (3, 2) | (3, 3) => solve_order(&table, cfg),
        (m, n) => Err(format!(
            "unsupported dimensions M = {m}, N = {n}; supported: (1,1), (1,2), (2,2), (2,3), (3,2), (3,3)"
        )),
    }
}

fn solve_11(table: &MomentTable) -> Result<Rendered, String> {
    match classify_m1n1(table).map_err(|e| e.to_string())? {
        ClassM1N1::Unsolvable => Ok(Rendered {
            json: to_json(&SolveDoc::failure(
                "unsolvable",
                "no non-negative measure matches this 2x2 table".into(),
            )),
            human: human_solve(
                &SolveDoc::failure(
                    "unsolvable",
                    "no non-negative measure matches this 2x2 table".into(),
                ),
                None,
            ),
            exit: 2,
        }),
        ClassM1N1::Zero => {
            let mu = AtomicMeasure2D::empty();
            Ok(solved_doc(
                "zero_measure",
                Some("unique solution \u{3bc}\u{2261}0".into()),
                vec![],
                mu,
                table,
                None,
            ))
        }
        ClassM1N1::PositiveMass => match solve_m1n1(table) {
            Ok(mu) => {
                let center = table.get(0, 1) / table.get(0, 0);
                Ok(solved_doc(
                    "positive_mass",
                    None,
                    vec![center - 1.0, center + 1.0],
                    mu,
                    table,
                    None,
                ))
            }
            Err(err) => Ok(failure_doc(&err)),
        },
    }
}

fn solve_12(table: &MomentTable) -> Result<Rendered, String> {
    match classify_m1n2(table).map_err(|e| e.to_string())? {
        ClassM1N2::Unsolvable { reason } => {
            let doc = SolveDoc::failure("unsolvable", reason);
            Ok(Rendered {
                json: to_json(&doc),
                human: human_solve(&doc, None),
                exit: 2,
            })
        }
        ClassM1N2::Zero => Ok(solved_doc(
            "zero_measure",
            Some("unique solution \u{3bc}\u{2261}0".into()),
            vec![],
            AtomicMeasure2D::empty(),
            table,
            None,
        )),
        ClassM1N2::Rank1 { alpha } => match solve_m1n2(table) {
            Ok(mu) => {
                let res = residual(table, &mu);
                let doc = SolveDoc {
                    verdict: "solved".into(),
                    case: Some("rank_one".into()),
                    note: None,
                    error: None,
                    lines: Some(vec![alpha]),
                    measure: Some(mu),
                    residual: Some(res),
                    diagnostics: Some(Diagnostics::Rank1 { alpha }),
                };
                Ok(Rendered {
                    json: to_json(&doc),
                    human: human_solve(&doc, None),
                    exit: 0,
                })
            }
            Err(err) => Ok(failure_doc(&err)),
        },
        ClassM1N2::PositiveDefinite => match solve_m1n2(table) {
            Ok(mu) => {
                let (a0, a1, a2) = m1n2_line_positions(table);
                Ok(solved_doc(
                    "positive_definite",
                    None,
                    vec![a0, a1, a2],
                    mu,
                    table,
                    None,
                ))
            }
            Err(err) => Ok(failure_doc(&err)),
        },
    }
}

fn solve_order(table: &MomentTable, cfg: &SolverConfig) -> Result<Rendered, String> {
    match solve_order3(table, cfg) {
        Ok((mu, report)) => {
            let lines = vec![-report.a3, -report.a2, report.a2, report.a3];
            Ok(solved_doc(
                "symmetric_four_lines",
                None,
                lines,
                mu,
                table,
                Some(&report),
            ))
        }
        Err(Error::InvalidInput(msg)) => Err(msg),
        Err(err) => Ok(failure_doc(&err)),
    }
}

#[derive(Serialize)]
struct RegionDoc {
    verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    i1: Option<Vec<IntervalOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    i2: Option<Vec<IntervalOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    i3: Option<Vec<IntervalOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    base_interval: Option<Vec<IntervalOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    admissible: Option<Vec<IntervalOut>>,
}

fn cmd_region(table_path: &Path) -> Result<Rendered, String> {
    let table = load_table(table_path)?;
    match region_analysis(&table) {
        Ok(region) => {
            let doc = RegionDoc {
                verdict: "ok".into(),
                error: None,
                i1: Some(intervals_out(&region.i1)),
                i2: Some(intervals_out(&region.i2)),
                i3: Some(intervals_out(&region.i3)),
                base_interval: Some(intervals_out(&region.base_interval)),
                admissible: Some(intervals_out(&region.admissible)),
            };
            let human = format!(
                "base conditions: satisfied\nI1: {}\nI2: {}\nI3: {}\nbase interval: {}\nadmissible a2: {}\n",
                region.i1, region.i2, region.i3, region.base_interval, region.admissible
            );
            Ok(Rendered { json: to_json(&doc), human, exit: 0 })
        }
        Err(Error::InvalidInput(msg)) => Err(msg),
        Err(err) => {
            let doc = RegionDoc {
                verdict: "not_certified".into(),
                error: Some(err.to_string()),
                i1: None,
                i2: None,
                i3: None,
                base_interval: None,
                admissible: None,
            };
            let human = format!("verdict: not_certified\nreason: {err}\n");
            Ok(Rendered { json: to_json(&doc), human, exit: 2 })
        }
    }
}

#[derive(Serialize)]
struct SplitDoc {
    verdict: String,
    lines: Vec<f64>,
    w_det: f64,
    /// split[m][j] = per-line moment s_m(j)
    split: Vec<Vec<f64>>,
}

fn cmd_split(table_path: &Path, line_positions: &[f64]) -> Result<Rendered, String> {
    let table = load_table(table_path)?;
    let family = LineFamily::new(line_positions.to_vec()).map_err(|e| e.to_string())?;
    let split = split_moments(&table, &family).map_err(|e| match e {
        Error::InvalidInput(msg) => msg,
        other => other.to_string(),
    })?;
    let doc = SplitDoc {
        verdict: "ok".into(),
        lines: family.positions().to_vec(),
        w_det: split.w_det(),
        split: split.rows().to_vec(),
    };
    let mut human = format!("W = {}\ns_m(j) grid (rows m, columns j):\n", split.w_det());
    for row in split.rows() {
        let rendered: Vec<String> = row.iter().map(|v| format!("{v:.12}")).collect();
        human.push_str(&format!("  {}\n", rendered.join("  ")));
    }
    Ok(Rendered { json: to_json(&doc), human, exit: 0 })
}

#[derive(Serialize)]
struct VerifyDoc {
    verdict: String,
    residual: f64,
    tol: f64,
}

fn cmd_verify(measure_path: &Path, table_path: &Path, tol: f64) -> Result<Rendered, String> {
    let mu = load_measure(measure_path)?;
    let table = load_table(table_path)?;
    let res = residual(&table, &mu);
    let ok = res <= tol;
    let doc = VerifyDoc {
        verdict: if ok { "ok".into() } else { "mismatch".into() },
        residual: res,
        tol,
    };
    let human = format!("residual: {res:e}\ntolerance: {tol:e}\nverdict: {}\n", doc.verdict);
    Ok(Rendered {
        json: to_json(&doc),
        human,
        exit: if ok { 0 } else { 2 },
    })
}
