//! BPSK over AWGN and channel LLRs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("noise standard deviation must be positive, got {0}")]
    NonPositiveSigma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub ebno_db: f64,
    /// Rate used for the energy normalization (payload rate `k / N`).
    pub rate: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl ChannelParams {
    pub fn new(ebno_db: f64, rate: f64, seed: u64) -> Self {
        ChannelParams {
            ebno_db,
            rate,
            sigma: noise_sigma(ebno_db, rate),
            seed,
        }
    }
}

/// `1 / sqrt(2 R Eb/N0)` for unit-energy BPSK symbols.
pub fn noise_sigma(ebno_db: f64, rate: f64) -> f64 {
    let ebno = 10f64.powf(ebno_db / 10.0);
    1.0 / (2.0 * rate * ebno).sqrt()
}

/// Random stream of one frame. Streams are keyed by `(seed, frame_index)`
/// only, so any worker can regenerate any frame.
pub fn frame_rng(seed: u64, frame_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame_index);
    rng
}

pub fn modulate_bpsk(bits: &[u8]) -> Vec<f64> {
    bits.iter().map(|&b| if b == 0 { 1.0 } else { -1.0 }).collect()
}

pub fn transmit<R: Rng + ?Sized>(symbols: &[f64], sigma: f64, rng: &mut R) -> Vec<f64> {
    symbols
        .iter()
        .map(|&s| {
            let z: f64 = rng.sample(StandardNormal);
            s + sigma * z
        })
        .collect()
}

/// `2 y / sigma^2`; positive values favour bit 0.
pub fn llr_from_channel(y: &[f64], sigma: f64) -> Result<Vec<f64>, ChannelError> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(ChannelError::NonPositiveSigma(sigma));
    }
    let scale = 2.0 / (sigma * sigma);
    Ok(y.iter().map(|&v| scale * v).collect())
}
