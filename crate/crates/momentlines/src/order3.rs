//! Solver for tables with both orders in {2, 3}: feasible a2 regions from
//! the three quadratic inequalities, the a3 lower bounds and geometric
//! search, the symmetric four-line split, and the end-to-end construction.
//!
//! The solution is supported on the four lines x2 = -a3, -a2, a2, a3. The
//! admissible-a2 set is a sufficient condition: when it is empty the data
//! may still be solvable on some other support.

use crate::error::{Error, Result};
use crate::hamburger::{hamburger_check, solve_two_atoms, HamburgerData, HamburgerVerdict, Solvability};
use crate::interval::IntervalSet;
use crate::lines::{assemble_measure, split_moments, LineFamily, SplitMoments};
use crate::measure::{residual, AtomicMeasure2D, MomentTable};

/// Tuning knobs for the order-3 solver.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Relative residual tolerance for the final verification.
    pub tol: f64,
    /// Multiplicative headroom above the a3 lower bound for the first
    /// search candidate.
    pub a3_margin: f64,
    /// Geometric growth factor between candidates.
    pub a3_growth: f64,
    /// Candidate budget before the search gives up.
    pub a3_max_iters: u32,
    /// Optional overrides for the free moments s[m][3] when N = 2
    /// (indexed by m; defaults to 0).
    pub complete_s3: [Option<f64>; 4],
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-9,
            a3_margin: 1.25,
            a3_growth: 2.0,
            a3_max_iters: 200,
            complete_s3: [None; 4],
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidInput(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.a3_margin > 1.0 && self.a3_margin.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "a3 margin must exceed 1, got {}",
                self.a3_margin
            )));
        }
        if !(self.a3_growth > 1.0 && self.a3_growth.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "a3 growth must exceed 1, got {}",
                self.a3_growth
            )));
        }
        if self.a3_max_iters == 0 {
            return Err(Error::InvalidInput("a3 iteration budget must be positive".into()));
        }
        for (m, v) in self.complete_s3.iter().enumerate() {
            if let Some(v) = v {
                if !v.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "completion value for s[{m}][3] is not finite"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The symmetric four-line support (-a3, -a2, a2, a3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricLines {
    a2: f64,
    a3: f64,
}

impl SymmetricLines {
    pub fn new(a2: f64, a3: f64) -> Result<Self> {
        if !(a2.is_finite() && a3.is_finite() && a2 > 0.0 && a3 > a2) {
            return Err(Error::InvalidInput(format!(
                "symmetric lines need 0 < a2 < a3, got a2 = {a2}, a3 = {a3}"
            )));
        }
        Ok(SymmetricLines { a2, a3 })
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn a3(&self) -> f64 {
        self.a3
    }

    pub fn family(&self) -> LineFamily {
        LineFamily::new(vec![-self.a3, -self.a2, self.a2, self.a3])
            .expect("constructor guarantees a strictly increasing family")
    }
}

/// One candidate considered during the a3 search.
#[derive(Debug, Clone, PartialEq)]
pub struct A3SearchStep {
    pub a3: f64,
    pub accepted: bool,
    /// Which condition failed, when one did.
    pub note: Option<String>,
}

/// Everything the solve decided and measured, for diagnostics and output.
#[derive(Debug, Clone)]
pub struct Order3Report {
    pub a2: f64,
    pub a3: f64,
    pub i1: IntervalSet,
    pub i2: IntervalSet,
    pub i3: IntervalSet,
    pub base_interval: IntervalSet,
    pub admissible: IntervalSet,
    /// Per-line moment vectors s_m(j) at the chosen lines.
    pub split: Vec<Vec<f64>>,
    pub line_verdicts: Vec<HamburgerVerdict>,
    /// Largest relative deviation, per line, between the textbook closed
    /// forms of the symmetric split and the Cramer values. Deviations are
    /// recorded, not asserted: the printed closed form for the outermost
    /// line disagrees with Cramer by a known constant factor.
    pub closed_form_dev: [f64; 4],
    pub a3_trace: Vec<A3SearchStep>,
    pub residual: f64,
}

/// Region analysis: the three inequality regions, the base interval, and
/// their intersection.
#[derive(Debug, Clone)]
pub struct RegionReport {
    pub i1: IntervalSet,
    pub i2: IntervalSet,
    pub i3: IntervalSet,
    pub base_interval: IntervalSet,
    pub admissible: IntervalSet,
}

fn expect_order2(table: &MomentTable) -> Result<()> {
    if table.m_max() < 2 || table.n_max() < 2 {
        return Err(Error::InvalidInput(format!(
            "need M >= 2 and N >= 2, got M = {}, N = {}",
            table.m_max(),
            table.n_max()
        )));
    }
    Ok(())
}

/// The three positivity conditions on the data itself: s00 > 0,
/// s00*s02 - s01^2 > 0, s00*s20 - s10^2 > 0.
pub fn base_conditions(table: &MomentTable) -> Result<bool> {
    expect_order2(table)?;
    let s00 = table.get(0, 0);
    let h_col = s00 * table.get(0, 2) - table.get(0, 1) * table.get(0, 1);
    let h_row = s00 * table.get(2, 0) - table.get(1, 0) * table.get(1, 0);
    Ok(s00 > 0.0 && h_col > 0.0 && h_row > 0.0)
}

/// Direct evaluation of the first inequality at a2: positive iff a2 lies
/// in I1.
pub fn eval_i1(table: &MomentTable, a2: f64) -> f64 {
    let t = a2 * a2;
    let p0 = -t * table.get(0, 0) + table.get(0, 2);
    let p1 = -t * table.get(1, 0) + table.get(1, 2);
    let p2 = -t * table.get(2, 0) + table.get(2, 2);
    p0 * p2 - p1 * p1
}

/// Direct evaluation of the second inequality at a2.
pub fn eval_i2(table: &MomentTable, a2: f64) -> f64 {
    let p0 = a2 * table.get(0, 0) - table.get(0, 1);
    let p1 = a2 * table.get(1, 0) - table.get(1, 1);
    let p2 = a2 * table.get(2, 0) - table.get(2, 1);
    p0 * p2 - p1 * p1
}

/// Direct evaluation of the third inequality at a2.
pub fn eval_i3(table: &MomentTable, a2: f64) -> f64 {
    let p0 = a2 * table.get(0, 0) + table.get(0, 1);
    let p1 = a2 * table.get(1, 0) + table.get(1, 1);
    let p2 = a2 * table.get(2, 0) + table.get(2, 1);
    p0 * p2 - p1 * p1
}

/// Solution set of the first inequality. Quadratic in t = a2^2 with
/// coefficients A = s00*s20 - s10^2, B = -(s00*s22 + s20*s02 - 2*s10*s12),
/// C = s02*s22 - s12^2; solved exactly in t and mapped back by sqrt.
pub fn interval_i1(table: &MomentTable) -> Result<IntervalSet> {
    expect_order2(table)?;
    let a = table.get(0, 0) * table.get(2, 0) - table.get(1, 0) * table.get(1, 0);
    let b = -(table.get(0, 0) * table.get(2, 2) + table.get(2, 0) * table.get(0, 2)
        - 2.0 * table.get(1, 0) * table.get(1, 2));
    let c = table.get(0, 2) * table.get(2, 2) - table.get(1, 2) * table.get(1, 2);
    Ok(IntervalSet::from_quadratic_gt_zero(a, b, c).map_sqrt())
}

/// Solution set of the second inequality, quadratic directly in a2.
pub fn interval_i2(table: &MomentTable) -> Result<IntervalSet> {
    expect_order2(table)?;
    let a = table.get(0, 0) * table.get(2, 0) - table.get(1, 0) * table.get(1, 0);
    let b = -(table.get(0, 0) * table.get(2, 1) + table.get(2, 0) * table.get(0, 1)
        - 2.0 * table.get(1, 0) * table.get(1, 1));
    let c = table.get(0, 1) * table.get(2, 1) - table.get(1, 1) * table.get(1, 1);
    Ok(IntervalSet::from_quadratic_gt_zero(a, b, c))
}

/// Solution set of the third inequality, quadratic directly in a2.
pub fn interval_i3(table: &MomentTable) -> Result<IntervalSet> {
    expect_order2(table)?;
    let a = table.get(0, 0) * table.get(2, 0) - table.get(1, 0) * table.get(1, 0);
    let b = table.get(0, 0) * table.get(2, 1) + table.get(2, 0) * table.get(0, 1)
        - 2.0 * table.get(1, 0) * table.get(1, 1);
    let c = table.get(0, 1) * table.get(2, 1) - table.get(1, 1) * table.get(1, 1);
    Ok(IntervalSet::from_quadratic_gt_zero(a, b, c))
}

/// The base interval (|s01|/s00, sqrt(s02/s00)) that every admissible a2
/// must come from. Non-degenerate whenever the base conditions hold.
pub fn base_interval(table: &MomentTable) -> Result<IntervalSet> {
    expect_order2(table)?;
    let s00 = table.get(0, 0);
    if s00 <= 0.0 {
        return Ok(IntervalSet::empty());
    }
    let lo = table.get(0, 1).abs() / s00;
    let ratio = table.get(0, 2) / s00;
    if ratio <= 0.0 {
        return Ok(IntervalSet::empty());
    }
    Ok(IntervalSet::interval(lo, ratio.sqrt()))
}

/// Intersection of the base interval with the three inequality regions.
/// Empty means the sufficient condition fails, not that the problem is
/// unsolvable.
pub fn admissible_a2(table: &MomentTable) -> Result<IntervalSet> {
    let region = region_analysis(table)?;
    Ok(region.admissible)
}

/// Computes all the feasibility sets at once.
pub fn region_analysis(table: &MomentTable) -> Result<RegionReport> {
    expect_order2(table)?;
    if !base_conditions(table)? {
        return Err(Error::SufficientConditionFails(
            "base conditions fail: need s00 > 0, s00*s02 - s01^2 > 0, s00*s20 - s10^2 > 0".into(),
        ));
    }
    let i1 = interval_i1(table)?;
    let i2 = interval_i2(table)?;
    let i3 = interval_i3(table)?;
    let base = base_interval(table)?;
    let admissible = base.intersect(&i1).intersect(&i2).intersect(&i3);
    Ok(RegionReport {
        i1,
        i2,
        i3,
        base_interval: base,
        admissible,
    })
}

/// Extends a table with N = 2 to N = 3 by filling the free moments
/// s[m][3] (defaults to zero, overridable through the config).
pub fn completed_table(table: &MomentTable, cfg: &SolverConfig) -> Result<MomentTable> {
    match table.n_max() {
        3 => Ok(table.clone()),
        2 => {
            let rows: Vec<Vec<f64>> = table
                .rows()
                .iter()
                .enumerate()
                .map(|(m, row)| {
                    let mut row = row.clone();
                    row.push(cfg.complete_s3.get(m).copied().flatten().unwrap_or(0.0));
                    row
                })
                .collect();
            MomentTable::new(rows)
        }
        n => Err(Error::InvalidInput(format!("expected N in {{2, 3}}, got N = {n}"))),
    }
}

/// Lower bound on a3 for a fixed a2 inside the base interval: the larger
/// of |s03 - a2^2*s01| / (s02 - a2^2*s00) and
/// sqrt((a2*s02 + |s03|) / (a2*s00 - |s01|)), floored at a2 itself.
/// Expects a completed table (N = 3).
pub fn a3_lower_bound(table: &MomentTable, a2: f64) -> Result<f64> {
    expect_order2(table)?;
    if table.n_max() < 3 {
        return Err(Error::InvalidInput(
            "a3 bound needs a completed table with N = 3".into(),
        ));
    }
    if !(a2.is_finite() && a2 > 0.0) {
        return Err(Error::PreconditionFailed(format!("a2 must be positive, got {a2}")));
    }
    let s00 = table.get(0, 0);
    let s01 = table.get(0, 1);
    let s02 = table.get(0, 2);
    let s03 = table.get(0, 3);

    // both denominators positive iff a2 lies strictly inside the base interval
    let denom1 = s02 - a2 * a2 * s00;
    let denom2 = a2 * s00 - s01.abs();
    if denom1 <= 0.0 || denom2 <= 0.0 {
        return Err(Error::PreconditionFailed(format!(
            "a2 = {a2} is outside the base interval (denominators {denom1}, {denom2})"
        )));
    }
    let bound1 = (s03 - a2 * a2 * s01).abs() / denom1;
    let bound2 = ((a2 * s02 + s03.abs()) / denom2).sqrt();
    Ok(bound1.max(bound2).max(a2))
}

/// Grows a3 geometrically from the lower bound until every per-line
/// problem of the symmetric split is strictly solvable. Termination for
/// admissible a2 is guaranteed in exact arithmetic because the limiting
/// inequalities are strict; the iteration budget catches the boundary and
/// ill-conditioned regimes.
pub fn search_a3(
    table: &MomentTable,
    a2: f64,
    cfg: &SolverConfig,
) -> Result<(f64, Vec<A3SearchStep>)> {
    cfg.validate()?;
    let lower = a3_lower_bound(table, a2)?;
    let mut trace = Vec::new();
    let mut a3 = cfg.a3_margin * lower;
    let mut last_note = String::new();

    for _ in 0..cfg.a3_max_iters {
        let note = match evaluate_candidate(table, a2, a3) {
            Ok(None) => {
                trace.push(A3SearchStep { a3, accepted: true, note: None });
                return Ok((a3, trace));
            }
            Ok(Some(reason)) => reason,
            Err(err) => format!("split failed: {err}"),
        };
        trace.push(A3SearchStep {
            a3,
            accepted: false,
            note: Some(note.clone()),
        });
        last_note = note;
        a3 *= cfg.a3_growth;
    }

    Err(Error::SearchExhausted {
        iters: cfg.a3_max_iters,
        last_a3: a3 / cfg.a3_growth,
        detail: last_note,
    })
}

/// Returns None when all per-line conditions hold, otherwise the reason
/// the candidate fails.
fn evaluate_candidate(table: &MomentTable, a2: f64, a3: f64) -> Result<Option<String>> {
    let lines = SymmetricLines::new(a2, a3)?;
    let split = split_moments(table, &lines.family())?;
    for j in 0..4 {
        let data = HamburgerData::new(split.line_moments(j))?;
        let verdict = hamburger_check(&data);
        if verdict.kind != Solvability::SolvableStrict {
            return Ok(Some(format!(
                "line {j}: {:?} (s0 = {}, Hankel = {:?})",
                verdict.kind, verdict.s0, verdict.hankel
            )));
        }
    }
    Ok(None)
}

/// Per-line moments on the symmetric family, via the general Vandermonde
/// split. The table must be completed (N = 3).
pub fn split_symmetric(table: &MomentTable, lines: &SymmetricLines) -> Result<SplitMoments> {
    if table.n_max() != 3 {
        return Err(Error::InvalidInput(
            "symmetric split needs a completed table with N = 3".into(),
        ));
    }
    split_moments(table, &lines.family())
}

/// The textbook closed forms for the symmetric split, transcribed as
/// printed (with a1 = -a2 substituted). Kept only as a cross-check
/// against the Cramer route; the form for line 3 is known to carry a
/// misprinted prefactor.
pub fn closed_form_split(table: &MomentTable, lines: &SymmetricLines) -> Vec<Vec<f64>> {
    let a2 = lines.a2();
    let a3 = lines.a3();
    let w = 4.0 * a2 * a3 * (a3 * a3 - a2 * a2) * (a3 * a3 - a2 * a2);
    let a1 = -a2;

    (0..=table.m_max())
        .map(|m| {
            let s0 = table.get(m, 0);
            let s1 = table.get(m, 1);
            let s2 = table.get(m, 2);
            let s3 = table.get(m, 3);
            vec![
                2.0 * a2 * (a3 - a2) * (a3 + a2) / w
                    * (-a2 * a2 * a3 * s0 + a2 * a2 * s1 + a3 * s2 - s3),
                -((a2 + a3) * (a3 - a2) * 2.0 * a3) / w
                    * (-a3 * a3 * a2 * s0 + a3 * a3 * s1 + a2 * s2 - s3),
                (a1 + a3) * (a3 + a2) * 2.0 * a3 / w
                    * (a2 * a3 * a3 * s0 + a3 * a3 * s1 - a2 * s2 - s3),
                -((a2 + a3) * 2.0 * a2 * (a2 + a3)) / w
                    * (a3 * a2 * a2 * s0 + a2 * a2 * s1 - a3 * s2 - s3),
            ]
        })
        .collect()
}

fn closed_form_deviation(split: &SplitMoments, closed: &[Vec<f64>]) -> [f64; 4] {
    let mut dev = [0.0_f64; 4];
    for (m, row) in closed.iter().enumerate() {
        for (j, &cf) in row.iter().enumerate() {
            let reference = split.value(m, j);
            let scale = 1.0_f64.max(reference.abs());
            dev[j] = dev[j].max((cf - reference).abs() / scale);
        }
    }
    dev
}

/// End-to-end solve for M, N in {2, 3}: complete the free moments, check
/// the base conditions, pick a2 from the admissible set, search a3, split,
/// solve the four per-line problems, assemble, and verify against the
/// original table.
pub fn solve_order3(
    table: &MomentTable,
    cfg: &SolverConfig,
) -> Result<(AtomicMeasure2D, Order3Report)> {
    cfg.validate()?;
    let (m_max, n_max) = (table.m_max(), table.n_max());
    if !(2..=3).contains(&m_max) || !(2..=3).contains(&n_max) {
        return Err(Error::InvalidInput(format!(
            "order-3 solver expects M, N in {{2, 3}}, got M = {m_max}, N = {n_max}"
        )));
    }

    let region = region_analysis(table)?;
    if region.admissible.is_empty() {
        return Err(Error::SufficientConditionFails(
            "admissible a2 set is empty; the sufficient condition does not certify this data"
                .into(),
        ));
    }

    // Interval endpoints are only trustworthy to about 1e-9 of their own
    // scale, so a component narrower than that is indistinguishable from
    // an empty intersection and cannot certify anything.
    let component = region
        .admissible
        .components()
        .iter()
        .copied()
        .filter(|c| c.width() > 2e-9 * (1.0 + c.hi.abs()))
        .max_by(|a, b| a.width().total_cmp(&b.width()))
        .ok_or_else(|| {
            Error::SufficientConditionFails(
                "admissible a2 set consists of boundary slivers at endpoint-rounding scale; \
                 the sufficient condition cannot be certified numerically"
                    .into(),
            )
        })?;
    if !component.hi.is_finite() {
        return Err(Error::InternalAssertion(
            "admissible set escaped the bounded base interval".into(),
        ));
    }
    // midpoint of the widest component, kept 1% of the width off each end
    let width = component.width();
    let a2 = (component.lo + 0.5 * width)
        .max(component.lo + 0.01 * width)
        .min(component.hi - 0.01 * width);

    let working = completed_table(table, cfg)?;
    let (a3, a3_trace) = search_a3(&working, a2, cfg)?;
    let lines = SymmetricLines::new(a2, a3)?;
    let split = split_symmetric(&working, &lines)?;

    let mut sigmas = Vec::with_capacity(4);
    let mut line_verdicts = Vec::with_capacity(4);
    for j in 0..4 {
        let data = HamburgerData::new(split.line_moments(j))?;
        line_verdicts.push(hamburger_check(&data));
        sigmas.push(solve_two_atoms(&data)?);
    }
    let mu = assemble_measure(&sigmas, &lines.family())?;

    let err = residual(table, &mu);
    let bound = cfg.tol * (1.0 + table.max_abs());
    if err > bound {
        return Err(Error::NumericalFailure(format!(
            "constructed measure misses the data: residual {err} exceeds {bound}"
        )));
    }

    let closed = closed_form_split(&working, &lines);
    let report = Order3Report {
        a2,
        a3,
        i1: region.i1,
        i2: region.i2,
        i3: region.i3,
        base_interval: region.base_interval,
        admissible: region.admissible,
        split: split.rows().to_vec(),
        line_verdicts,
        closed_form_dev: closed_form_deviation(&split, &closed),
        a3_trace,
        residual: err,
    };
    Ok((mu, report))
}
