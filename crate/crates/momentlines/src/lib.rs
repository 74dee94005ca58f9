//! Constructive solving of truncated two-dimensional moment problems with
//! rectangular data, by reduction to one-dimensional problems on families
//! of horizontal lines.
//!
//! Given the moments s[m][n] of an unknown non-negative planar measure for
//! 0 <= m <= M, 0 <= n <= N, the crate decides solvability and builds an
//! explicit atomic measure reproducing the data:
//!
//! - M = N = 1 and M = 1, N = 2: complete classification (solvable or not)
//!   with constructions on one to three lines ([`low_order`]).
//! - M, N in {2, 3}: a sufficient condition expressed through three
//!   quadratic inequalities in the line parameter a2; when an admissible
//!   a2 exists, a solution supported on the four symmetric lines
//!   x2 = -a3, -a2, a2, a3 is constructed ([`order3`]).
//!
//! The split of planar moments into per-line moments, the per-line solvers,
//! and the brute-force verification oracle are exposed individually in
//! [`lines`], [`hamburger`], and [`measure`].

pub mod cli;
pub mod error;
pub mod hamburger;
pub mod interval;
pub mod lines;
pub mod low_order;
pub mod measure;
mod numeric;
pub mod order3;

pub use error::{Error, Result};
pub use measure::{moments_table, residual, Atom1D, Atom2D, AtomicMeasure1D, AtomicMeasure2D, MomentTable};

pub use numeric::det_cofactor;
