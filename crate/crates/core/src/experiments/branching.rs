use super::estimator::{estimate_proportion, EstimatorResult, MAX_FAILURE_RATE};
use crate::families::galton_watson::gw_generations;
use crate::families::OffspringSpec;
use crate::par::{map_indexed, Execution};
use crate::walks::{RngStream, LANE_ENV};
use crate::{Error, Result};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct KolmogorovResult {
    pub n: usize,
    pub estimate: EstimatorResult,
    /// `1 - f^(n)(0)` from the generating function.
    pub exact: f64,
    /// `2 / (n σ²)`.
    pub reference: f64,
    pub variance: f64,
}

/// Monte Carlo `P(Z_n > 0)` for a critical process, with the exact value and
/// the asymptotic reference `2/(nσ²)`.
pub fn kolmogorov_check(
    offspring: &OffspringSpec,
    n: usize,
    replicates: u64,
    seed: u64,
    exec: Execution,
) -> Result<KolmogorovResult> {
    offspring.require_critical()?;
    let var = offspring.variance();
    if !(var > 1e-12) {
        return Err(Error::InvalidSpec(
            "offspring variance must be positive".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidSpec(
            "generation count must be positive".into(),
        ));
    }
    let estimate = estimate_proportion(
        &format!("P(Z_{n} > 0)"),
        replicates,
        seed,
        exec,
        MAX_FAILURE_RATE,
        |k| {
            let mut rng = RngStream::new(seed, k).lane(LANE_ENV);
            Ok(*gw_generations(offspring, n, &mut rng)
                .last()
                .expect("n+1 generations")
                > 0)
        },
    )?;
    Ok(KolmogorovResult {
        n,
        estimate,
        exact: offspring.survival_probability(n),
        reference: 2.0 / (n as f64 * var),
        variance: var,
    })
}

/// Off-backbone offspring `Y = X̂ - 1` of `nodes` backbone vertices, `X̂`
/// drawn from the size-biased law. Returns the per-node values.
pub fn backbone_offspring(
    offspring: &OffspringSpec,
    nodes: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<f64>> {
    offspring.require_critical()?;
    let biased = offspring.size_biased()?;
    Ok(map_indexed(nodes, exec, |k| {
        let mut rng = RngStream::new(seed, k).lane(LANE_ENV);
        (biased.sample(&mut rng).max(1) - 1) as f64
    }))
}
