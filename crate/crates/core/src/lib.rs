//! Barycenters of probability measures supported on a convex polytope.
//!
//! A point `a` of a polytope `M` is the barycenter of some probability measure
//! whose support is exactly `M` iff every point of `M` can be pushed through
//! `a` and a little beyond it without leaving `M`; in finite dimension this is
//! the same as `a` lying in the relative interior of `M`. This crate decides
//! the condition exactly, builds explicit discrete witness measures, and runs
//! Monte Carlo checks for the Hilbert-cube truncation and for measures on the
//! probability simplex.

pub mod characterize;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod hilbert_cube;
pub mod lp;
pub mod rational;
pub mod rng;
pub mod simplex_t2;
pub mod witness;

pub use characterize::{
    alpha_max_per_vertex, check_condition_ii, conditional_barycenter, in_relint, in_v_a,
    max_prolongation_alpha, Alpha, CharacterizationReport, ProlongationResult,
};
pub use error::{BaryError, Result};
pub use geometry::{
    affine_hull, contains, covering_radius, dense_sequence, AffineSubspace, CoveringGrid,
    DensePlan, Polytope,
};
pub use lp::{solve_lp, LinearProgram, LpOutcome, LpStatus, Relation};
pub use rational::{Rational, RationalVector};
pub use witness::{
    barycenter, construct_witness, merge_and_normalize, sample, DiscreteMeasure, WitnessPair,
};
