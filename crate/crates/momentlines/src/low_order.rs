//! Complete classification and construction for the two smallest table
//! shapes: M = N = 1 and M = 1, N = 2. Both classifications are exact
//! (necessary and sufficient); the constructions place the solution on
//! one, two, or three horizontal lines and hand off to the line solver.

use crate::error::{Error, Result};
use crate::lines::{solve_on_lines_with_tol, LineFamily};
use crate::measure::{residual, Atom2D, AtomicMeasure2D, MomentTable};

/// Tolerance band for the rank-one boundary s00*s02 = s01^2.
fn rank1_band(s00: f64, s02: f64) -> f64 {
    1e-12 * 1.0_f64.max((s00 * s02).abs())
}

/// Verdict for 2x2 tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassM1N1 {
    /// All four moments vanish; the unique solution is the zero measure.
    Zero,
    /// s00 > 0: always solvable.
    PositiveMass,
    Unsolvable,
}

/// Verdict for 2x3 tables.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassM1N2 {
    /// All six moments vanish.
    Zero,
    /// Hankel boundary with consistent moments: all mass on x2 = alpha.
    Rank1 { alpha: f64 },
    /// s00 > 0 and s00*s02 - s01^2 > 0.
    PositiveDefinite,
    Unsolvable { reason: String },
}

fn expect_dims(table: &MomentTable, m_max: usize, n_max: usize) -> Result<()> {
    if table.m_max() != m_max || table.n_max() != n_max {
        return Err(Error::InvalidInput(format!(
            "expected a table with M = {m_max}, N = {n_max}, got M = {}, N = {}",
            table.m_max(),
            table.n_max()
        )));
    }
    Ok(())
}

pub fn classify_m1n1(table: &MomentTable) -> Result<ClassM1N1> {
    expect_dims(table, 1, 1)?;
    if table.is_zero() {
        Ok(ClassM1N1::Zero)
    } else if table.get(0, 0) > 0.0 {
        Ok(ClassM1N1::PositiveMass)
    } else {
        Ok(ClassM1N1::Unsolvable)
    }
}

/// Solves a 2x2 table. The two lines are placed symmetrically around the
/// mean line position s01/s00; both line masses equal s00/2 > 0.
pub fn solve_m1n1(table: &MomentTable) -> Result<AtomicMeasure2D> {
    match classify_m1n1(table)? {
        ClassM1N1::Zero => Ok(AtomicMeasure2D::empty()),
        ClassM1N1::Unsolvable => Err(Error::PreconditionFailed(
            "2x2 table is unsolvable (s00 < 0, or s00 = 0 with a nonzero moment)".into(),
        )),
        ClassM1N1::PositiveMass => {
            let center = table.get(0, 1) / table.get(0, 0);
            let lines = LineFamily::new(vec![center - 1.0, center + 1.0])?;
            let mu = solve_on_lines_with_tol(table, &lines, 1e-10)?;
            Ok(mu)
        }
    }
}

pub fn classify_m1n2(table: &MomentTable) -> Result<ClassM1N2> {
    expect_dims(table, 1, 2)?;
    if table.is_zero() {
        return Ok(ClassM1N2::Zero);
    }
    let s00 = table.get(0, 0);
    if s00 < 0.0 {
        return Ok(ClassM1N2::Unsolvable {
            reason: format!("total mass s00 = {s00} is negative"),
        });
    }
    if s00 == 0.0 {
        return Ok(ClassM1N2::Unsolvable {
            reason: "zero total mass with a nonzero moment".into(),
        });
    }
    let s01 = table.get(0, 1);
    let s02 = table.get(0, 2);
    let hankel = s00 * s02 - s01 * s01;
    let band = rank1_band(s00, s02);
    if hankel > band {
        return Ok(ClassM1N2::PositiveDefinite);
    }
    if hankel < -band {
        return Ok(ClassM1N2::Unsolvable {
            reason: format!("s00*s02 - s01^2 = {hankel} is negative"),
        });
    }
    // Hankel boundary: the data is solvable only if every moment matches
    // the single-line pattern s[m][n] = alpha^n * s[m][0].
    let alpha = s01 / s00;
    let tol = 1e-9 * (1.0 + table.max_abs());
    for m in 0..=1 {
        let mut expected = table.get(m, 0);
        for n in 1..=2 {
            expected *= alpha;
            let got = table.get(m, n);
            if (got - expected).abs() > tol {
                return Ok(ClassM1N2::Unsolvable {
                    reason: format!(
                        "Hankel boundary but s[{m}][{n}] = {got} differs from alpha^{n} * s[{m}][0] = {expected}"
                    ),
                });
            }
        }
    }
    Ok(ClassM1N2::Rank1 { alpha })
}

/// Deterministic line positions used for the positive-definite case.
pub fn m1n2_line_positions(table: &MomentTable) -> (f64, f64, f64) {
    let s00 = table.get(0, 0);
    let a2 = 2.0 * (table.get(0, 2) / s00).sqrt();
    let a1 = table.get(0, 1) / s00;
    (-a2, a1, a2)
}

/// The three line-mass positivity conditions for the chosen positions
/// (a0 = -a2 is already substituted); all must be strictly positive when
/// the classification is positive-definite. Exposed so callers can audit
/// the construction.
pub fn m1n2_mass_conditions(table: &MomentTable, a1: f64, a2: f64) -> [f64; 3] {
    let s00 = table.get(0, 0);
    let s01 = table.get(0, 1);
    let s02 = table.get(0, 2);
    [
        a1 * a2 * s00 - (a1 + a2) * s01 + s02,
        a2 * a2 * s00 - s02,
        -a1 * a2 * s00 - (a1 - a2) * s01 + s02,
    ]
}

/// Solves a 2x3 table per its classification: empty measure, a single
/// atom on the line x2 = alpha, or a three-line construction with
/// a2 = 2*sqrt(s02/s00), a1 = s01/s00, a0 = -a2.
pub fn solve_m1n2(table: &MomentTable) -> Result<AtomicMeasure2D> {
    match classify_m1n2(table)? {
        ClassM1N2::Zero => Ok(AtomicMeasure2D::empty()),
        ClassM1N2::Unsolvable { reason } => Err(Error::PreconditionFailed(format!(
            "2x3 table is unsolvable: {reason}"
        ))),
        ClassM1N2::Rank1 { alpha } => {
            let s00 = table.get(0, 0);
            let mu = AtomicMeasure2D::new(vec![Atom2D {
                x1: table.get(1, 0) / s00,
                x2: alpha,
                w: s00,
            }])?;
            let err = residual(table, &mu);
            let bound = 1e-9 * (1.0 + table.max_abs());
            if err > bound {
                return Err(Error::NumericalFailure(format!(
                    "single-line solution misses the data: residual {err} exceeds {bound}"
                )));
            }
            Ok(mu)
        }
        ClassM1N2::PositiveDefinite => {
            let (a0, a1, a2) = m1n2_line_positions(table);
            let conditions = m1n2_mass_conditions(table, a1, a2);
            if conditions.iter().any(|&c| c <= 0.0) {
                // impossible for positive-definite data; a failure here is a bug
                return Err(Error::InternalAssertion(format!(
                    "line-mass conditions not strictly positive: {conditions:?}"
                )));
            }
            let lines = LineFamily::new(vec![a0, a1, a2])?;
            solve_on_lines_with_tol(table, &lines, 1e-9)
        }
    }
}
