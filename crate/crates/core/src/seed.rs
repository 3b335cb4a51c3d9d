//! Seed derivation for reproducible, order-independent Monte Carlo.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for item `index` of stream `stream` under `master`.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index)
}

/// Stable 64-bit id for a stream name (FNV-1a).
pub fn stream_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// A named family of independent generators, one per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub experiment_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, experiment: &str) -> Self {
        RngStream {
            master_seed,
            experiment_id: stream_id(experiment),
        }
    }

    pub fn seed(&self, trial: u64) -> u64 {
        derive_seed(self.master_seed, self.experiment_id, trial)
    }

    pub fn rng(&self, trial: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed(trial))
    }

    /// A sub-stream, e.g. one per SNR point.
    pub fn child(&self, label: u64) -> Self {
        RngStream {
            master_seed: self.master_seed,
            experiment_id: derive_seed(self.experiment_id, 0x5eed, label),
        }
    }
}
