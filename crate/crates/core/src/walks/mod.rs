//! Random-walk engines, collision counters and exact collision oracles.

mod collide;
mod exact;
mod rng;
mod space;

pub use collide::{
    encode_path, killed_pair_collisions, pair_collisions, run_pair, triple_collisions, walk,
    CollisionOptions, CollisionRecord,
};
pub use exact::{
    ballot_check, bd_chain_densities, exact_pair_expectation, second_moment_bound, BallotRow,
    BirthDeathTrace, PairExpectation, RESIDUAL_MASS_TOLERANCE,
};
pub use rng::{RngStream, LANE_ENV, LANE_W, LANE_X, LANE_Y};
pub use space::{CombSpace, IndexSpace, OracleSpace, WalkSpace};
