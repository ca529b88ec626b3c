//! Monte Carlo estimators and the phase-transition experiments.

mod branching;
mod config;
mod estimator;
mod growth;
mod manifest;
mod percolation;
mod profile;
mod sets;

pub use branching::{backbone_offspring, kolmogorov_check, KolmogorovResult};
pub use config::{
    ExperimentConfig, Output, Overrides, RunOptions, Walkers, DEFAULT_REPLICATES, DEFAULT_SEED,
};
pub use estimator::{
    estimate, estimate_proportion, mean_difference, ratio_of_means, run_replicates,
    wilson_interval, z95, EstimatorKind, EstimatorResult, MAX_FAILURE_RATE,
};
pub use growth::{collision_growth_curve, triple_growth_curve, GrowthCurve, GrowthRow};
pub use manifest::{replay, run_experiment, sha256_hex, OutputDigest, RunManifest, MANIFEST_FILE};
pub use percolation::{
    percolation_collision_run, ClusterRecord, PercolationRun, PercolationRunConfig, StartPolicy,
};
pub use profile::{
    transition_profile, ProfileMode, ProfileRow, TransitionProfile, PROFILE_EXIT_TOLERANCE,
};
pub use sets::{
    set_collision_probability, set_collision_probability_in, shared_set_collisions_in,
    tree_intervals, HorizonPolicy, ResolvedTarget, SetCollisionResult, SetCollisionSpec,
    SharedSetCollisions, TargetContext, TargetSet, DEFAULT_STEP_BUDGET,
};
