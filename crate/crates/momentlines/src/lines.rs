//! Reduction of a planar moment table to per-line moment vectors and back:
//! the Vandermonde split, its Cramer cross-check, measure assembly, and the
//! constructive solve on a fixed family of horizontal lines.

use crate::error::{Error, Result};
use crate::hamburger::{hamburger_check, solve_one_atom, solve_two_atoms, HamburgerData, Solvability};
use crate::measure::{residual, Atom2D, AtomicMeasure1D, AtomicMeasure2D, MomentTable};
use crate::numeric::{det_cofactor, pow_iter, solve_dense};

/// Strictly increasing positions a_0 < ... < a_N of horizontal lines
/// x2 = a_j.
#[derive(Debug, Clone, PartialEq)]
pub struct LineFamily {
    a: Vec<f64>,
}

impl LineFamily {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidInput("line family must be non-empty".into()));
        }
        if let Some(i) = a.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("line position a_{i} is not finite")));
        }
        for i in 1..a.len() {
            if a[i - 1] >= a[i] {
                return Err(Error::InvalidInput(format!(
                    "line positions must be strictly increasing, got a_{} = {} >= a_{} = {}",
                    i - 1,
                    a[i - 1],
                    i,
                    a[i]
                )));
            }
        }
        Ok(LineFamily { a })
    }

    pub fn positions(&self) -> &[f64] {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one line by construction
    }

    /// Highest line index N.
    pub fn n_max(&self) -> usize {
        self.a.len() - 1
    }
}

/// Per-line moment vectors s_m(j) together with the Vandermonde
/// determinant of the family they were split on.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitMoments {
    /// values[m][j] = s_m(j)
    values: Vec<Vec<f64>>,
    w_det: f64,
}

impl SplitMoments {
    pub fn value(&self, m: usize, j: usize) -> f64 {
        self.values[m][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn w_det(&self) -> f64 {
        self.w_det
    }

    /// Moment vector (s_0(j), ..., s_M(j)) of line j.
    pub fn line_moments(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[j]).collect()
    }
}

/// Vandermonde determinant of the family, via the product formula
/// prod_{j<i} (a_i - a_j). Strictly positive for increasing positions.
pub fn vandermonde_det(lines: &LineFamily) -> f64 {
    let a = lines.positions();
    let mut w = 1.0;
    for i in 1..a.len() {
        for j in 0..i {
            w *= a[i] - a[j];
        }
    }
    w
}

/// Power matrix of the family: row n holds a_j^n. This is the coefficient
/// matrix linking per-line moments to the planar moments.
fn power_matrix(lines: &LineFamily) -> Vec<Vec<f64>> {
    let a = lines.positions();
    (0..a.len())
        .map(|n| a.iter().map(|&aj| pow_iter(aj, n)).collect())
        .collect()
}

/// Splits the table into per-line moments by solving, for each m, the
/// linear system sum_j a_j^n s_m(j) = s[m][n] with partial pivoting.
///
/// The solution is re-multiplied through the system and rejected if the
/// residual exceeds 1e-10 * (1 + max|s|).
pub fn split_moments(table: &MomentTable, lines: &LineFamily) -> Result<SplitMoments> {
    if lines.len() != table.n_max() + 1 {
        return Err(Error::InvalidInput(format!(
            "need exactly {} lines for a table with N = {}, got {}",
            table.n_max() + 1,
            table.n_max(),
            lines.len()
        )));
    }
    let matrix = power_matrix(lines);
    let scale = 1.0 + table.max_abs();
    let mut values = Vec::with_capacity(table.m_max() + 1);
    for m in 0..=table.m_max() {
        let rhs: Vec<f64> = (0..=table.n_max()).map(|n| table.get(m, n)).collect();
        let solution = solve_dense(matrix.clone(), rhs.clone()).ok_or_else(|| {
            Error::NumericalFailure("singular Vandermonde system".into())
        })?;
        if solution.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure(
                "Vandermonde solve produced non-finite values".into(),
            ));
        }
        for n in 0..=table.n_max() {
            let recomposed: f64 = (0..lines.len()).map(|j| matrix[n][j] * solution[j]).sum();
            let err = (recomposed - rhs[n]).abs();
            if err > 1e-10 * scale {
                return Err(Error::NumericalFailure(format!(
                    "split residual {err} at (m={m}, n={n}) exceeds {}",
                    1e-10 * scale
                )));
            }
        }
        values.push(solution);
    }
    Ok(SplitMoments {
        values,
        w_det: vandermonde_det(lines),
    })
}

/// The same split by literal ratios of determinants: s_m(j) = D_{j;m} / W,
/// where D_{j;m} replaces column j of the power matrix with the m-th moment
/// row. Exponential-cost cross-check route; kept deliberately independent
/// of the elimination solver.
pub fn split_moments_cramer(table: &MomentTable, lines: &LineFamily) -> Result<SplitMoments> {
    if lines.len() != table.n_max() + 1 {
        return Err(Error::InvalidInput(format!(
            "need exactly {} lines for a table with N = {}, got {}",
            table.n_max() + 1,
            table.n_max(),
            lines.len()
        )));
    }
    let matrix = power_matrix(lines);
    let w = det_cofactor(&matrix);
    if w == 0.0 {
        return Err(Error::NumericalFailure("zero Vandermonde determinant".into()));
    }
    let mut values = Vec::with_capacity(table.m_max() + 1);
    for m in 0..=table.m_max() {
        let mut row = Vec::with_capacity(lines.len());
        for j in 0..lines.len() {
            let mut replaced = matrix.clone();
            for (n, matrix_row) in replaced.iter_mut().enumerate() {
                matrix_row[j] = table.get(m, n);
            }
            row.push(det_cofactor(&replaced) / w);
        }
        values.push(row);
    }
    Ok(SplitMoments { values, w_det: w })
}

/// Lifts per-line measures to the plane: every atom (x, w) of sigma_j
/// becomes the planar atom (x, a_j, w).
pub fn assemble_measure(
    sigmas: &[AtomicMeasure1D],
    lines: &LineFamily,
) -> Result<AtomicMeasure2D> {
    if sigmas.len() != lines.len() {
        return Err(Error::InvalidInput(format!(
            "got {} line measures for {} lines",
            sigmas.len(),
            lines.len()
        )));
    }
    let mut atoms = Vec::new();
    for (sigma, &aj) in sigmas.iter().zip(lines.positions()) {
        for atom in sigma.atoms() {
            atoms.push(Atom2D {
                x1: atom.x,
                x2: aj,
                w: atom.w,
            });
        }
    }
    AtomicMeasure2D::new(atoms)
}

fn solve_line(data: &HamburgerData) -> Result<AtomicMeasure1D> {
    if data.order() <= 1 {
        solve_one_atom(data)
    } else {
        solve_two_atoms(data)
    }
}

pub(crate) fn solve_on_lines_with_tol(
    table: &MomentTable,
    lines: &LineFamily,
    tol: f64,
) -> Result<AtomicMeasure2D> {
    if table.m_max() > 3 {
        return Err(Error::InvalidInput(format!(
            "constructive solving is limited to M <= 3, got M = {}",
            table.m_max()
        )));
    }
    let split = split_moments(table, lines)?;
    let mut sigmas = Vec::with_capacity(lines.len());
    for j in 0..lines.len() {
        let data = HamburgerData::new(split.line_moments(j))?;
        let verdict = hamburger_check(&data);
        match verdict.kind {
            Solvability::Unsolvable => {
                return Err(Error::NotSolvableOnTheseLines {
                    line: j,
                    position: lines.positions()[j],
                    reason: format!(
                        "per-line problem unsolvable (s0 = {}, Hankel = {:?})",
                        verdict.s0, verdict.hankel
                    ),
                });
            }
            Solvability::Inconclusive => {
                return Err(Error::InconclusiveOnLine {
                    line: j,
                    position: lines.positions()[j],
                    hankel: verdict.hankel.unwrap_or(0.0),
                });
            }
            Solvability::ZeroMeasure | Solvability::SolvableStrict => {
                sigmas.push(solve_line(&data)?);
            }
        }
    }
    let mu = assemble_measure(&sigmas, lines)?;
    let err = residual(table, &mu);
    let bound = tol * (1.0 + table.max_abs());
    if err > bound {
        return Err(Error::NumericalFailure(format!(
            "assembled measure misses the data: residual {err} exceeds {bound}"
        )));
    }
    Ok(mu)
}

/// Solves the moment problem restricted to the given lines: split, check
/// and solve each per-line problem, assemble, and verify the result
/// against the input table.
pub fn solve_on_lines(table: &MomentTable, lines: &LineFamily) -> Result<AtomicMeasure2D> {
    solve_on_lines_with_tol(table, lines, 1e-9)
}
