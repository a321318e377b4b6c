//! Batch distance statistics and standard-error arithmetic.
//!
//! The distance random variable is the Euclidean distance between a
//! shot-reconstructed occupation triple and the ideal triple, taken over
//! small fixed-size shot batches. The standard error for a run of N total
//! measurements treats the run as N/batch independent batches, and the 95%
//! interval uses the conventional factor 2 on the standard error.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::StateVector;
use crate::seed;
use crate::tomography::{occupations_exact, occupations_measured, TomographyError};

/// Batch size matching four repetitions of the eight possible outcomes.
pub const DEFAULT_BATCH_SIZE: u64 = 32;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("need at least two distances, got {0}")]
    InsufficientData(usize),
    #[error("zero batches: {total} measurements at batch size {batch}")]
    ZeroBatches { total: u64, batch: u64 },
    #[error(transparent)]
    Tomography(#[from] TomographyError),
}

/// Batch distances of one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceSample {
    pub point_id: String,
    pub batch_size: u64,
    pub distances: Vec<f64>,
}

/// Sample mean and sample standard deviation (n-1 denominator).
pub fn batch_stats(sample: &DistanceSample) -> Result<(f64, f64), StatsError> {
    let n = sample.distances.len();
    if n < 2 {
        return Err(StatsError::InsufficientData(n));
    }
    let mean = sample.distances.iter().sum::<f64>() / n as f64;
    let var = sample
        .distances
        .iter()
        .map(|d| (d - mean).powi(2))
        .sum::<f64>()
        / (n as f64 - 1.0);
    Ok((mean, var.sqrt()))
}

/// Standard error and 95% interval for a run of `total_measurements`,
/// grouped into batches of `batch_size` (floored batch count).
pub fn standard_error(
    sigma: f64,
    total_measurements: u64,
    batch_size: u64,
) -> Result<(f64, f64), StatsError> {
    let batches = total_measurements / batch_size;
    if batches == 0 {
        return Err(StatsError::ZeroBatches {
            total: total_measurements,
            batch: batch_size,
        });
    }
    let se = sigma / (batches as f64).sqrt();
    Ok((se, 2.0 * se))
}

/// Simulate noiseless batch distances for one prepared state: each batch
/// reconstructs the triple from `batch_size` shots per setting and records
/// its distance to the exact triple.
pub fn collect_batch_distances(
    state: &StateVector,
    point_id: &str,
    batches: u32,
    batch_size: u64,
    seed: u64,
) -> Result<DistanceSample, StatsError> {
    let exact = occupations_exact(state)?;
    let mut distances = Vec::with_capacity(batches as usize);
    for batch in 0..batches {
        let measured = occupations_measured(
            state,
            batch_size,
            seed::derive(seed, "batch", u64::from(batch)),
        )?;
        distances.push(measured.occupations.distance(&exact));
    }
    Ok(DistanceSample {
        point_id: point_id.to_string(),
        batch_size,
        distances,
    })
}
