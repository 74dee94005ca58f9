//! Finite unions of disjoint open intervals inside (0, inf), and the exact
//! solution sets of strict quadratic inequalities over that half-axis.
//!
//! Endpoints are plain f64; an infinite right endpoint is `f64::INFINITY`.
//! All sets are open, so two components may legitimately share an endpoint
//! (an excluded point) and are never merged across it.

/// Open interval (lo, hi) with 0 <= lo < hi <= inf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// Ordered union of disjoint open intervals in (0, inf).
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    components: Vec<Interval>,
}

/// Relative band below which a quadratic discriminant is treated as an
/// exact double root (an excluded point rather than a spurious sliver).
const DISC_BAND: f64 = 1e-12;

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { components: Vec::new() }
    }

    /// The whole half-axis (0, inf).
    pub fn positive_axis() -> Self {
        IntervalSet::interval(0.0, f64::INFINITY)
    }

    /// Single open interval clipped to (0, inf); empty when degenerate.
    pub fn interval(lo: f64, hi: f64) -> Self {
        let lo = lo.max(0.0);
        if lo < hi {
            IntervalSet { components: vec![Interval { lo, hi }] }
        } else {
            IntervalSet::empty()
        }
    }

    /// Builds from arbitrary candidate intervals: clips to (0, inf),
    /// drops empties, sorts, and merges strictly overlapping pairs.
    /// Touching components stay separate (the shared endpoint is excluded).
    pub fn from_intervals(raw: Vec<(f64, f64)>) -> Self {
        let mut parts: Vec<Interval> = raw
            .into_iter()
            .map(|(lo, hi)| Interval { lo: lo.max(0.0), hi })
            .filter(|iv| iv.lo < iv.hi)
            .collect();
        parts.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for iv in parts {
            match merged.last_mut() {
                Some(last) if iv.lo < last.hi => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        IntervalSet { components: merged }
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.components.iter().any(|iv| iv.contains(x))
    }

    /// All finite endpoints, in order.
    pub fn endpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for iv in &self.components {
            out.push(iv.lo);
            if iv.hi.is_finite() {
                out.push(iv.hi);
            }
        }
        out
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut parts = Vec::new();
        for a in &self.components {
            for b in &other.components {
                let lo = a.lo.max(b.lo);
                let hi = a.hi.min(b.hi);
                if lo < hi {
                    parts.push((lo, hi));
                }
            }
        }
        IntervalSet::from_intervals(parts)
    }

    /// Widest component (infinite components win). Ties go to the leftmost.
    pub fn widest_component(&self) -> Option<Interval> {
        self.components
            .iter()
            .copied()
            .max_by(|a, b| a.width().total_cmp(&b.width()).then(b.lo.total_cmp(&a.lo)))
    }

    /// Image under the square root, valid because components lie in
    /// [0, inf) and sqrt is increasing.
    pub fn map_sqrt(&self) -> IntervalSet {
        IntervalSet {
            components: self
                .components
                .iter()
                .map(|iv| Interval { lo: iv.lo.sqrt(), hi: iv.hi.sqrt() })
                .collect(),
        }
    }

    /// Exact solution set of a*x^2 + b*x + c > 0 intersected with (0, inf).
    ///
    /// Discriminants within `DISC_BAND` (relative to the coefficient scale)
    /// of zero are snapped to an exact double root, so boundary inequalities
    /// yield a genuinely excluded point instead of floating-point slivers.
    pub fn from_quadratic_gt_zero(a: f64, b: f64, c: f64) -> IntervalSet {
        if a == 0.0 {
            // linear: b*x + c > 0
            return if b > 0.0 {
                IntervalSet::interval((-c / b).max(0.0), f64::INFINITY)
            } else if b < 0.0 {
                IntervalSet::interval(0.0, -c / b)
            } else if c > 0.0 {
                IntervalSet::positive_axis()
            } else {
                IntervalSet::empty()
            };
        }

        let disc = b * b - 4.0 * a * c;
        let scale = (b * b).max((4.0 * a * c).abs());
        let snapped_zero = disc.abs() <= DISC_BAND * scale;

        if snapped_zero {
            let root = -b / (2.0 * a);
            return if a > 0.0 {
                // positive everywhere except the double root
                if root > 0.0 {
                    IntervalSet::from_intervals(vec![(0.0, root), (root, f64::INFINITY)])
                } else {
                    IntervalSet::positive_axis()
                }
            } else {
                IntervalSet::empty()
            };
        }

        if disc < 0.0 {
            return if a > 0.0 {
                IntervalSet::positive_axis()
            } else {
                IntervalSet::empty()
            };
        }

        // two distinct real roots; |q| = (|b| + sqrt(disc))/2 > 0 here
        let sq = disc.sqrt();
        let q = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
        let (mut r1, mut r2) = (q / a, c / q);
        if r1 > r2 {
            std::mem::swap(&mut r1, &mut r2);
        }

        if a > 0.0 {
            IntervalSet::from_intervals(vec![(0.0, r1), (r2.max(0.0), f64::INFINITY)])
        } else {
            IntervalSet::from_intervals(vec![(r1, r2)])
        }
    }
}

impl std::fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.components.is_empty() {
            return write!(f, "(empty)");
        }
        for (i, iv) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, " \u{222a} ")?;
            }
            if iv.hi.is_finite() {
                write!(f, "({:.6}, {:.6})", iv.lo, iv.hi)?;
            } else {
                write!(f, "({:.6}, \u{221e})", iv.lo)?;
            }
        }
        Ok(())
    }
}
