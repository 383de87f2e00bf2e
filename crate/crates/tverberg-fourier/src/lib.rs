//! Average-value Tverberg partitions via finite Fourier analysis.
//!
//! A continuous map `f: ∂Δⁿ → R^d` together with `q` points on pairwise
//! disjoint faces, indexed by a finite abelian group `G` of order `q`, has
//! per-coordinate Fourier coefficients `c_{i,ε}`. Forcing a prescribed set of
//! coefficients to vanish forces coincidences among averages of the image
//! points. This crate provides:
//!
//! - exact character arithmetic and the naive transforms ([`group`],
//!   [`fourier`]);
//! - the obstruction polynomials in the two quotient cohomology rings whose
//!   non-vanishing certifies that such a collection of points exists
//!   ([`obstruction`]);
//! - partition plans instantiating the average-value theorems: group
//!   decomposition `q = p^k·r`, annihilated character sets, target simplex
//!   dimension, and the full coincidence schedule ([`planner`]);
//! - a numerical solver that finds certified configurations for affine maps,
//!   a verifier, and brute-force oracles for small cases ([`geometry`],
//!   [`solver`], [`oracle`]);
//! - stable JSON file formats and the `tvf` command-line tool ([`files`],
//!   [`cli`]).
//!
//! See the crate examples for runnable walkthroughs of each capability.

pub mod cli;
pub mod files;
pub mod fourier;
pub mod geometry;
pub mod group;
pub mod obstruction;
pub mod oracle;
pub mod planner;
pub mod solver;

pub use fourier::{forward_transform, inverse_transform, synthesize_constrained, SpectrumTable, ValueTable};
pub use geometry::{Configuration, FourierReport, PointPlacement, PostMap, SimplexMap};
pub use group::{Character, GroupElement, GroupSpec, RootOfUnity};
pub use obstruction::{Mod2Poly, ObstructionPoly, QuotientPolyZ};
pub use planner::{plan_theorem_1_3, plan_theorem_1_4, CoincidenceSchedule, PartitionPlan, Theorem};
pub use solver::{solve, SearchMode, SolveOptions, SolveOutcome};
