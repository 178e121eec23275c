//! Certified bounds on the optimum of a regularized linear classifier after a
//! small set of edits to its training matrix, without retraining.
//!
//! A model is trained once ([`solver::train`]) and a small set of per-row and
//! per-column statistics is kept alongside it ([`solver::CachedStats`]).
//! After a [`sparse::ModificationSet`] of cell edits, [`bounds`] refreshes the
//! statistics of the touched rows and columns, evaluates the duality gap of
//! the modified problem at the old solution, and turns it into per-coordinate
//! intervals that provably contain the new optimum. The cost is proportional
//! to the number of edited cells.
//!
//! [`partial`] re-optimizes just the touched coordinates to shrink the gap,
//! and [`decision`] uses the intervals for certified labels, a drift bound
//! that decides when retraining is worthwhile, and safe sample screening.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`.

pub mod bounds;
pub mod decision;
pub mod error;
pub mod experiment;
pub mod objective;
pub mod partial;
pub mod scalar;
pub mod solver;
pub mod sparse;

pub use bounds::{
    bounds_case_i, bounds_case_ii, bounds_case_iii, compute_gap, sphere_extremes, update_delta_stats, BoundCase,
    BoundsDocument, CenterView, GapEvaluation, Radii,
};
pub use decision::{
    classify, param_change_upper, score_bounds, screen_samples, screen_with_bounds, should_retrain, Label,
    RetrainPolicy, VerdictLine,
};
pub use error::{Error, Result};
pub use objective::{Extended, Interval, Loss, ObjectiveConfig, Penalty};
pub use partial::{
    partial_dual_optimize, partial_primal_optimize, run_partial, tightened_bounds, Budget, PartialPlan, Scenario,
};
pub use scalar::Scalar;
pub use solver::{build_cached_stats, dual_objective, primal_from_dual, primal_objective, train, train_warm, TrainOptions};
pub use sparse::{apply_modifications, normalize_rows, parse_libsvm, split_train_test, write_libsvm};

/// Sparse dataset over `f64`.
pub type Dataset = sparse::SparseDataset<f64>;
/// Cell edits over `f64`.
pub type Modifications = sparse::ModificationSet<f64>;
pub type Overlay<'a> = sparse::OverlayView<'a, f64>;
pub type Objective = objective::Objective<f64>;
pub type SmoothedHinge = objective::SmoothedHinge<f64>;
pub type L2Penalty = objective::L2Penalty<f64>;
pub type Solution = solver::PrimalDualSolution<f64>;
pub type CachedStats = solver::CachedStats<f64>;
pub type StatsFile = solver::StatsFile<f64>;
pub type TrainOutput = solver::TrainOutput<f64>;
pub type DeltaStats = bounds::DeltaStats<f64>;
pub type Bounds<'a> = bounds::Bounds<'a, f64>;
pub type BoundsReport = bounds::BoundsReport<f64>;
pub type SparseBoundsReport = bounds::SparseBoundsReport<f64>;
pub type CheckSolution = partial::CheckSolution<f64>;
pub type Verdict = decision::Verdict<f64>;
