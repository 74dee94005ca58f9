//! Moment tables, atomic measures, and the brute-force moment oracle.
//!
//! Everything downstream (solvers, verification, CLI) builds on the types
//! here. All operations are pure; all types are immutable once constructed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::pow_iter;

/// Rectangular moment data s[m][n] for 0 <= m <= M, 0 <= n <= N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MomentTableRaw", into = "MomentTableRaw")]
pub struct MomentTable {
    s: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize, Clone)]
struct MomentTableRaw {
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    s: Vec<Vec<f64>>,
}

impl TryFrom<MomentTableRaw> for MomentTable {
    type Error = Error;

    fn try_from(raw: MomentTableRaw) -> Result<Self> {
        let table = MomentTable::new(raw.s)?;
        if table.m_max() != raw.m || table.n_max() != raw.n {
            return Err(Error::InvalidInput(format!(
                "declared dimensions M={}, N={} do not match a {}x{} moment matrix",
                raw.m,
                raw.n,
                table.m_max() + 1,
                table.n_max() + 1
            )));
        }
        Ok(table)
    }
}

impl From<MomentTable> for MomentTableRaw {
    fn from(table: MomentTable) -> Self {
        MomentTableRaw {
            m: table.m_max(),
            n: table.n_max(),
            s: table.s,
        }
    }
}

impl MomentTable {
    /// Builds a table from the matrix `s[m][n]`. Dimensions are inferred:
    /// M = rows - 1, N = cols - 1. Rows must be non-empty, rectangular, and
    /// every entry finite.
    pub fn new(s: Vec<Vec<f64>>) -> Result<Self> {
        if s.is_empty() || s[0].is_empty() {
            return Err(Error::InvalidInput(
                "moment table must have at least one row and one column".into(),
            ));
        }
        let cols = s[0].len();
        for (m, row) in s.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidInput(format!(
                    "moment table row {m} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (n, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "moment s[{m}][{n}] is not finite"
                    )));
                }
            }
        }
        Ok(MomentTable { s })
    }

    /// All-zero table of the given maximal orders.
    pub fn zeros(m_max: usize, n_max: usize) -> Self {
        MomentTable {
            s: vec![vec![0.0; n_max + 1]; m_max + 1],
        }
    }

    /// Largest power of x1 covered (the M in s[m][n]).
    pub fn m_max(&self) -> usize {
        self.s.len() - 1
    }

    /// Largest power of x2 covered (the N in s[m][n]).
    pub fn n_max(&self) -> usize {
        self.s[0].len() - 1
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.s[m][n]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.s
    }

    /// Largest absolute entry; used to scale tolerances.
    pub fn max_abs(&self) -> f64 {
        self.s
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, &v| acc.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.s.iter().flatten().all(|&v| v == 0.0)
    }
}

/// Point mass in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom2D {
    pub x1: f64,
    pub x2: f64,
    pub w: f64,
}

/// Point mass on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom1D {
    pub x: f64,
    pub w: f64,
}

/// Finite non-negative atomic measure on the plane.
///
/// Weights are strictly positive; the zero measure is the empty atom list.
/// Atoms at the same location are merged at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Measure2DRaw", into = "Measure2DRaw")]
pub struct AtomicMeasure2D {
    atoms: Vec<Atom2D>,
}

#[derive(Serialize, Deserialize, Clone)]
struct Measure2DRaw {
    atoms: Vec<Atom2D>,
}

impl TryFrom<Measure2DRaw> for AtomicMeasure2D {
    type Error = Error;
    fn try_from(raw: Measure2DRaw) -> Result<Self> {
        AtomicMeasure2D::new(raw.atoms)
    }
}

impl From<AtomicMeasure2D> for Measure2DRaw {
    fn from(mu: AtomicMeasure2D) -> Self {
        Measure2DRaw { atoms: mu.atoms }
    }
}

impl AtomicMeasure2D {
    pub fn new(atoms: Vec<Atom2D>) -> Result<Self> {
        let mut merged: Vec<Atom2D> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            if !(atom.x1.is_finite() && atom.x2.is_finite() && atom.w.is_finite()) {
                return Err(Error::InvalidInput("atom with non-finite field".into()));
            }
            if atom.w <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "atom at ({}, {}) has non-positive weight {}",
                    atom.x1, atom.x2, atom.w
                )));
            }
            match merged
                .iter_mut()
                .find(|a| a.x1 == atom.x1 && a.x2 == atom.x2)
            {
                Some(existing) => existing.w += atom.w,
                None => merged.push(atom),
            }
        }
        Ok(AtomicMeasure2D { atoms: merged })
    }

    pub fn empty() -> Self {
        AtomicMeasure2D { atoms: Vec::new() }
    }

    pub fn atoms(&self) -> &[Atom2D] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }
}

/// Finite non-negative atomic measure on the line (same invariants as the
/// planar version).
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure1D {
    atoms: Vec<Atom1D>,
}

impl AtomicMeasure1D {
    pub fn new(atoms: Vec<Atom1D>) -> Result<Self> {
        let mut merged: Vec<Atom1D> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            if !(atom.x.is_finite() && atom.w.is_finite()) {
                return Err(Error::InvalidInput("atom with non-finite field".into()));
            }
            if atom.w <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "atom at {} has non-positive weight {}",
                    atom.x, atom.w
                )));
            }
            match merged.iter_mut().find(|a| a.x == atom.x) {
                Some(existing) => existing.w += atom.w,
                None => merged.push(atom),
            }
        }
        Ok(AtomicMeasure1D { atoms: merged })
    }

    pub fn empty() -> Self {
        AtomicMeasure1D { atoms: Vec::new() }
    }

    pub fn atoms(&self) -> &[Atom1D] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }
}

/// Integral of x1^m x2^n against the measure.
pub fn moment_2d(mu: &AtomicMeasure2D, m: usize, n: usize) -> f64 {
    mu.atoms
        .iter()
        .map(|a| a.w * pow_iter(a.x1, m) * pow_iter(a.x2, n))
        .sum()
}

/// Integral of x^m against the measure.
pub fn moment_1d(sigma: &AtomicMeasure1D, m: usize) -> f64 {
    sigma.atoms.iter().map(|a| a.w * pow_iter(a.x, m)).sum()
}

/// Full moment table of a measure: the brute-force oracle.
pub fn moments_table(mu: &AtomicMeasure2D, m_max: usize, n_max: usize) -> MomentTable {
    let s = (0..=m_max)
        .map(|m| (0..=n_max).map(|n| moment_2d(mu, m, n)).collect())
        .collect();
    MomentTable { s }
}

/// Largest absolute mismatch between the table and the measure's moments.
/// Zero means the measure reproduces the data exactly.
pub fn residual(table: &MomentTable, mu: &AtomicMeasure2D) -> f64 {
    let mut worst = 0.0_f64;
    for m in 0..=table.m_max() {
        for n in 0..=table.n_max() {
            worst = worst.max((moment_2d(mu, m, n) - table.get(m, n)).abs());
        }
    }
    worst
}
