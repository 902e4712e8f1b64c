//! Random-choice offsets `theta_k` in (-1, 1).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThetaSource {
    /// Van der Corput base 2, shifted by a seed-derived Cranley-Patterson offset
    /// (no shift for seed 0).
    #[default]
    LowDiscrepancy,
    /// ChaCha8 uniform draws.
    Pseudorandom,
}

impl ThetaSource {
    pub fn describe(&self, seed: u64) -> String {
        match self {
            ThetaSource::LowDiscrepancy => format!("van der Corput base 2, shift seed {seed}"),
            ThetaSource::Pseudorandom => format!("ChaCha8 uniform, seed {seed}"),
        }
    }
}

/// Radical inverse of `k` in base 2.
pub fn van_der_corput(mut k: u64) -> f64 {
    let mut x = 0.0;
    let mut f = 0.5;
    while k > 0 {
        if k & 1 == 1 {
            x += f;
        }
        k >>= 1;
        f *= 0.5;
    }
    x
}

/// Offsets `theta_0..theta_count`. `theta_0` is unused by the scheme (the first
/// column averages the initial data) and is set to 0.
pub fn theta_sequence(source: ThetaSource, seed: u64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(0.0);
    match source {
        ThetaSource::LowDiscrepancy => {
            let shift = if seed == 0 { 0.0 } else { ChaCha8Rng::seed_from_u64(seed).gen::<f64>() };
            for k in 1..count {
                let mut x = (van_der_corput(k as u64) + shift).fract();
                if x == 0.0 {
                    x = 0.5;
                }
                out.push(2.0 * x - 1.0);
            }
        }
        ThetaSource::Pseudorandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 1..count {
                let mut x: f64 = rng.gen();
                if x == 0.0 {
                    x = 0.5;
                }
                out.push(2.0 * x - 1.0);
            }
        }
    }
    out
}
