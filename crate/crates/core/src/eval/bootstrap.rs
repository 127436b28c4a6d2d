use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;

pub const DEFAULT_RESAMPLES: usize = 200;

/// `mean ± half_width`, in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCI {
    pub mean: f64,
    pub half_width: f64,
    pub n_resamples: usize,
    pub level: f64,
}

/// Normal-approximation bootstrap interval for accuracy.
///
/// Draws `n_resamples` resamples of size `flags.len()` with replacement from a
/// ChaCha8 stream seeded with `seed`. `mean` is the mean resample accuracy and
/// `half_width` is 1.96 times the sample standard deviation of the resample
/// accuracies.
pub fn bootstrap_accuracy(
    flags: &[bool],
    n_resamples: usize,
    seed: u64,
) -> Result<BootstrapCI, EvalError> {
    if flags.is_empty() || n_resamples == 0 {
        return Err(EvalError::EmptyEvaluation);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = flags.len();
    let accuracies: Vec<f64> = (0..n_resamples)
        .map(|_| {
            let hits = (0..n).filter(|_| flags[rng.random_range(0..n)]).count();
            hits as f64 * 100.0 / n as f64
        })
        .collect();
    let mean = accuracies.iter().sum::<f64>() / n_resamples as f64;
    let sd = if n_resamples > 1 {
        let ss: f64 = accuracies.iter().map(|a| (a - mean).powi(2)).sum();
        (ss / (n_resamples - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(BootstrapCI {
        mean,
        half_width: 1.96 * sd,
        n_resamples,
        level: 0.95,
    })
}
