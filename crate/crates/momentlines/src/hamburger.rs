//! Truncated Hamburger moment problems of order at most 3: solvability
//! verdicts and explicit atomic solutions.
//!
//! The verdict follows the strict sufficient conditions s0 > 0 and
//! s0*s2 - s1^2 > 0; data sitting on that Hankel boundary is reported
//! `Inconclusive` rather than silently solved. Constructions are the
//! minimal Gauss quadratures: one atom for order <= 1, two atoms for
//! orders 2 and 3.

use crate::error::{Error, Result};
use crate::measure::{Atom1D, AtomicMeasure1D};

/// Relative band around zero for the Hankel boundary test. The band is
/// scaled by the magnitudes of the two products whose difference forms the
/// Hankel quantity, so the verdict is invariant under positive scaling of
/// the data and stays meaningful when the moments themselves are tiny
/// (per-line moments of a distant line scale like 1/a^2).
const HANKEL_BAND: f64 = 1e-12;

fn hankel_band(s0: f64, s1: f64, s2: f64) -> f64 {
    HANKEL_BAND * (s0 * s2).abs().max(s1 * s1)
}

/// Moment vector (s_0, ..., s_M) with M <= 3.
#[derive(Debug, Clone, PartialEq)]
pub struct HamburgerData {
    s: Vec<f64>,
}

impl HamburgerData {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.is_empty() || s.len() > 4 {
            return Err(Error::InvalidInput(format!(
                "Hamburger data must hold 1 to 4 moments, got {}",
                s.len()
            )));
        }
        if let Some(i) = s.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("moment s_{i} is not finite")));
        }
        Ok(HamburgerData { s })
    }

    /// Highest moment order M.
    pub fn order(&self) -> usize {
        self.s.len() - 1
    }

    pub fn moment(&self, m: usize) -> f64 {
        self.s[m]
    }

    pub fn moments(&self) -> &[f64] {
        &self.s
    }

    pub fn is_zero(&self) -> bool {
        self.s.iter().all(|&v| v == 0.0)
    }

    fn hankel(&self) -> Option<f64> {
        if self.order() >= 2 {
            Some(self.s[0] * self.s[2] - self.s[1] * self.s[1])
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solvability {
    /// All moments vanish; the unique solution is the zero measure.
    ZeroMeasure,
    /// The strict conditions hold; a construction is guaranteed.
    SolvableStrict,
    /// Hankel quantity sits inside the boundary band: not certified.
    Inconclusive,
    Unsolvable,
}

/// Verdict plus the quantities it was decided on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamburgerVerdict {
    pub kind: Solvability,
    pub s0: f64,
    /// s0*s2 - s1^2, present when the data reaches order 2.
    pub hankel: Option<f64>,
}

/// Decides solvability of the truncated problem.
pub fn hamburger_check(data: &HamburgerData) -> HamburgerVerdict {
    let s0 = data.moment(0);
    let hankel = data.hankel();
    let kind = if data.is_zero() {
        Solvability::ZeroMeasure
    } else if s0 < 0.0 {
        Solvability::Unsolvable
    } else if s0 == 0.0 {
        // zero mass forces the zero measure, but some moment is nonzero
        Solvability::Unsolvable
    } else {
        match hankel {
            None => Solvability::SolvableStrict,
            Some(h) => {
                let band = hankel_band(data.moment(0), data.moment(1), data.moment(2));
                if h > band {
                    Solvability::SolvableStrict
                } else if h >= -band {
                    Solvability::Inconclusive
                } else {
                    Solvability::Unsolvable
                }
            }
        }
    };
    HamburgerVerdict { kind, s0, hankel }
}

fn require_constructible(data: &HamburgerData) -> Result<HamburgerVerdict> {
    let verdict = hamburger_check(data);
    match verdict.kind {
        Solvability::ZeroMeasure | Solvability::SolvableStrict => Ok(verdict),
        Solvability::Inconclusive => Err(Error::PreconditionFailed(format!(
            "Hankel quantity {:?} is inside the boundary band; refusing to construct",
            verdict.hankel
        ))),
        Solvability::Unsolvable => Err(Error::PreconditionFailed(format!(
            "data is unsolvable (s0 = {}, Hankel = {:?})",
            verdict.s0, verdict.hankel
        ))),
    }
}

/// One-atom solution for order <= 1: the atom sits at s1/s0 (at 0 when
/// only s0 is given) and carries the whole mass.
pub fn solve_one_atom(data: &HamburgerData) -> Result<AtomicMeasure1D> {
    if data.order() > 1 {
        return Err(Error::InvalidInput(format!(
            "one-atom construction expects order <= 1, got {}",
            data.order()
        )));
    }
    let verdict = require_constructible(data)?;
    if verdict.kind == Solvability::ZeroMeasure {
        return Ok(AtomicMeasure1D::empty());
    }
    let x = if data.order() >= 1 {
        data.moment(1) / data.moment(0)
    } else {
        0.0
    };
    AtomicMeasure1D::new(vec![Atom1D { x, w: data.moment(0) }])
}

/// Two-atom Gauss quadrature for orders 2 and 3.
///
/// Order 3 solves the 2x2 system s0*g + s1*b = s2, s1*g + s2*b = s3 and
/// places the atoms at the roots of x^2 - b*x - g; the strict Hankel
/// condition makes the roots real and distinct and the weights positive.
/// Order 2 leaves s3 free and uses the centered symmetric pair.
pub fn solve_two_atoms(data: &HamburgerData) -> Result<AtomicMeasure1D> {
    if data.order() < 2 {
        return Err(Error::InvalidInput(format!(
            "two-atom construction expects order 2 or 3, got {}",
            data.order()
        )));
    }
    let verdict = require_constructible(data)?;
    if verdict.kind == Solvability::ZeroMeasure {
        return Ok(AtomicMeasure1D::empty());
    }

    let s0 = data.moment(0);
    let s1 = data.moment(1);
    let s2 = data.moment(2);

    if data.order() == 2 {
        // centered pair at mean +/- standard deviation, half the mass each
        let mean = s1 / s0;
        let var = s2 / s0 - mean * mean;
        if var <= 0.0 {
            return Err(Error::NumericalFailure(format!(
                "non-positive variance {var} despite strict Hankel condition"
            )));
        }
        let d = var.sqrt();
        return AtomicMeasure1D::new(vec![
            Atom1D { x: mean - d, w: s0 / 2.0 },
            Atom1D { x: mean + d, w: s0 / 2.0 },
        ]);
    }

    let s3 = data.moment(3);
    let h = verdict.hankel.expect("order 3 data has a Hankel quantity");
    // Cramer on [[s0,s1],[s1,s2]] (g, b)^T = (s2, s3)^T
    let g = (s2 * s2 - s1 * s3) / h;
    let b = (s0 * s3 - s1 * s2) / h;

    let disc = b * b + 4.0 * g;
    let disc_floor = 1e-14 * 1.0_f64.max(b * b + 4.0 * g.abs());
    if disc <= disc_floor {
        return Err(Error::NumericalFailure(format!(
            "near-degenerate node polynomial: discriminant {disc} below floor {disc_floor}"
        )));
    }
    // larger-magnitude root first, companion by Vieta, to avoid cancellation
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let big = sign * (b.abs() + disc.sqrt()) / 2.0;
    let other = -g / big;
    let (lo, hi) = if big < other { (big, other) } else { (other, big) };

    let span = hi - lo;
    let w_lo = (hi * s0 - s1) / span;
    let w_hi = (s1 - lo * s0) / span;
    if w_lo <= 0.0 || w_hi <= 0.0 {
        return Err(Error::NumericalFailure(format!(
            "non-positive quadrature weights ({w_lo}, {w_hi})"
        )));
    }
    AtomicMeasure1D::new(vec![
        Atom1D { x: lo, w: w_lo },
        Atom1D { x: hi, w: w_hi },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::moment_1d;
    use proptest::prelude::*;

    fn data(s: &[f64]) -> HamburgerData {
        HamburgerData::new(s.to_vec()).unwrap()
    }

    #[test]
    fn check_examples() {
        assert_eq!(hamburger_check(&data(&[0.0, 0.0, 0.0])).kind, Solvability::ZeroMeasure);
        assert_eq!(
            hamburger_check(&data(&[1.0, 0.0, 1.0, 0.0])).kind,
            Solvability::SolvableStrict
        );
        assert_eq!(hamburger_check(&data(&[1.0, 1.0, 1.0])).kind, Solvability::Inconclusive);
    }

    #[test]
    fn check_rejections() {
        assert_eq!(hamburger_check(&data(&[-1.0])).kind, Solvability::Unsolvable);
        assert_eq!(hamburger_check(&data(&[0.0, 1.0])).kind, Solvability::Unsolvable);
        assert_eq!(
            hamburger_check(&data(&[1.0, 2.0, 1.0])).kind,
            Solvability::Unsolvable
        );
        assert_eq!(hamburger_check(&data(&[2.0, 4.0])).kind, Solvability::SolvableStrict);
    }

    #[test]
    fn verdict_carries_diagnostics() {
        let v = hamburger_check(&data(&[1.0, 0.0, 1.0, 0.0]));
        assert_eq!(v.s0, 1.0);
        assert_eq!(v.hankel, Some(1.0));
        let v = hamburger_check(&data(&[2.0, 4.0]));
        assert_eq!(v.hankel, None);
    }

    #[test]
    fn one_atom_examples() {
        let sigma = solve_one_atom(&data(&[2.0, 4.0])).unwrap();
        assert_eq!(sigma.atoms(), &[Atom1D { x: 2.0, w: 2.0 }]);

        assert!(solve_one_atom(&data(&[0.0, 0.0])).unwrap().is_empty());

        let sigma = solve_one_atom(&data(&[3.0])).unwrap();
        assert_eq!(sigma.atoms(), &[Atom1D { x: 0.0, w: 3.0 }]);

        assert!(matches!(
            solve_one_atom(&data(&[-1.0, 0.0])),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn two_atoms_symmetric_order3() {
        let sigma = solve_two_atoms(&data(&[1.0, 0.0, 1.0, 0.0])).unwrap();
        assert_eq!(sigma.atoms(), &[Atom1D { x: -1.0, w: 0.5 }, Atom1D { x: 1.0, w: 0.5 }]);
    }

    #[test]
    fn two_atoms_order2() {
        let sigma = solve_two_atoms(&data(&[2.0, 0.0, 2.0 / 3.0])).unwrap();
        let r = 1.0 / 3.0_f64.sqrt();
        assert_eq!(sigma.atoms().len(), 2);
        assert!((sigma.atoms()[0].x + r).abs() < 1e-15);
        assert!((sigma.atoms()[1].x - r).abs() < 1e-15);
        assert!((sigma.atoms()[0].w - 1.0).abs() < 1e-15);
        assert!((sigma.atoms()[1].w - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_atoms_boundary_is_refused() {
        // rank-one data: the Hankel quantity vanishes
        assert!(matches!(
            solve_two_atoms(&data(&[1.0, 1.0, 1.0, 1.0])),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn reconstruction_is_exact() {
        for s in [
            vec![1.0, 0.0, 1.0, 0.0],
            vec![2.0, 1.0, 3.0, 2.0],
            vec![5.0, -2.0, 4.0],
            vec![1.0, 0.25],
        ] {
            let d = data(&s);
            let sigma = if d.order() <= 1 {
                solve_one_atom(&d).unwrap()
            } else {
                solve_two_atoms(&d).unwrap()
            };
            for (m, &want) in s.iter().enumerate() {
                let got = moment_1d(&sigma, m);
                let scale = 1.0f64.max(want.abs());
                assert!(
                    (got - want).abs() <= 1e-10 * scale,
                    "moment {m}: got {got}, want {want} for {s:?}"
                );
            }
            assert!(sigma.atoms().iter().all(|a| a.w > 0.0));
            assert!(sigma.atoms().len() <= 2);
        }
    }

    proptest! {
        // verdict kind never changes under positive scaling
        #[test]
        fn scale_covariant_verdict(
            x1 in -10.0..10.0f64,
            gap in 0.1..5.0f64,
            w1 in 0.1..10.0f64,
            w2 in 0.1..10.0f64,
            lambda in 0.01..100.0f64,
            kind in 0usize..3,
        ) {
            let s: Vec<f64> = match kind {
                // two distinct atoms: strictly solvable
                0 => {
                    let x2 = x1 + gap;
                    (0..4).map(|m| {
                        w1 * crate::numeric::pow_iter(x1, m) + w2 * crate::numeric::pow_iter(x2, m)
                    }).collect()
                }
                // one atom: exact rank-one boundary
                1 => (0..4).map(|m| w1 * crate::numeric::pow_iter(x1, m)).collect(),
                // zero data
                _ => vec![0.0; 4],
            };
            let base = hamburger_check(&data(&s));
            let scaled: Vec<f64> = s.iter().map(|v| v * lambda).collect();
            let after = hamburger_check(&data(&scaled));
            prop_assert_eq!(base.kind, after.kind);
        }

        // two-atom generator round trip: moments and atoms both recovered
        #[test]
        fn two_atom_round_trip(
            x1 in -10.0..5.0f64,
            gap in 1.0..5.0f64,
            w1 in 0.5..10.0f64,
            w2 in 0.5..10.0f64,
        ) {
            let x2 = x1 + gap;
            let s: Vec<f64> = (0..4).map(|m| {
                w1 * crate::numeric::pow_iter(x1, m) + w2 * crate::numeric::pow_iter(x2, m)
            }).collect();
            let sigma = solve_two_atoms(&data(&s)).unwrap();
            for (m, &want) in s.iter().enumerate() {
                let got = moment_1d(&sigma, m);
                prop_assert!((got - want).abs() <= 1e-9 * 1.0f64.max(want.abs()));
            }
            prop_assert_eq!(sigma.atoms().len(), 2);
            let tol = 1e-7 * 1.0f64.max(x1.abs()).max(x2.abs());
            prop_assert!((sigma.atoms()[0].x - x1).abs() <= tol);
            prop_assert!((sigma.atoms()[1].x - x2).abs() <= tol);
            let wtol = 1e-7 * 1.0f64.max(w1).max(w2);
            prop_assert!((sigma.atoms()[0].w - w1).abs() <= wtol);
            prop_assert!((sigma.atoms()[1].w - w2).abs() <= wtol);
        }
    }
}
