use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::SplitMask;
use crate::error::{Error, Result};

/// Train/validation/test fractions of the benchmark protocol.
pub const BENCHMARK_SPLIT_RATIOS: [f64; 3] = [0.48, 0.32, 0.20];

/// Fractions used for synthetic graphs.
pub const SYNTH_SPLIT_RATIOS: [f64; 3] = [0.50, 0.20, 0.30];

/// `count` random splits of `0..n` with `floor(r0 n)` train and `floor(r1 n)`
/// validation nodes; the remainder is the test set. Split `i` depends only on
/// `(seed, i)`.
pub fn generate_splits(n: usize, ratios: [f64; 3], count: usize, seed: u64) -> Result<Vec<SplitMask>> {
    if n < 10 {
        return Err(Error::InvalidInput(format!("need at least 10 nodes to split, got {n}")));
    }
    if (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 || ratios.iter().any(|&r| r <= 0.0) {
        return Err(Error::InvalidInput(format!("split ratios {ratios:?} must be positive and sum to 1")));
    }
    // guard against 0.48 * 100 = 47.999...
    let n_train = (ratios[0] * n as f64 + 1e-9).floor() as usize;
    let n_val = (ratios[1] * n as f64 + 1e-9).floor() as usize;
    if n_train == 0 || n_val == 0 || n_train + n_val >= n {
        return Err(Error::InvalidInput(format!("ratios {ratios:?} leave an empty set for n = {n}")));
    }

    Ok((0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let test = perm.split_off(n_train + n_val);
            let val = perm.split_off(n_train);
            SplitMask {
                train: perm,
                val,
                test,
            }
        })
        .collect())
}
