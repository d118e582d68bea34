//! BPSK over AWGN, channel LLRs, and rate-matching application/reversal.
//!
//! LLRs follow `log(P(y | 0) / P(y | 1))`, so a positive value favours 0.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::construction::{RateMatchMode, RateMatchPattern};
use crate::error::{Error, Result};
use crate::types::BitVector;

/// LLR assigned to shortened (known-zero) positions.
pub const LLR_SATURATION: f64 = 1000.0;

/// Noise standard deviation per real dimension for unit-energy BPSK at the
/// given Es/N0.
pub fn sigma_from_snr_db(snr_db: f64) -> f64 {
    (1.0 / (2.0 * 10f64.powf(snr_db / 10.0))).sqrt()
}

/// Eb/N0 for BPSK carrying `k` information bits in `m` channel uses.
pub fn ebn0_from_esn0_db(esn0_db: f64, k: usize, m: usize) -> f64 {
    esn0_db - 10.0 * (k as f64 / m as f64).log10()
}

pub fn esn0_from_ebn0_db(ebn0_db: f64, k: usize, m: usize) -> f64 {
    ebn0_db + 10.0 * (k as f64 / m as f64).log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Es/N0 in dB.
    pub snr_db: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn new(snr_db: f64, seed: u64) -> Self {
        Self {
            snr_db,
            sigma: sigma_from_snr_db(snr_db),
            seed,
        }
    }
}

/// Drop the pattern positions from a mother codeword, preserving order.
pub fn apply_rate_matching(codeword: &BitVector, pattern: &RateMatchPattern) -> Result<BitVector> {
    if codeword.len() != pattern.mother_len() {
        return Err(Error::LengthMismatch {
            expected: pattern.mother_len(),
            actual: codeword.len(),
        });
    }
    let removed = pattern.pattern.mask(codeword.len());
    let kept: Vec<u8> = codeword
        .iter()
        .zip(&removed)
        .filter(|(_, &r)| !r)
        .map(|(b, _)| b)
        .collect();
    Ok(BitVector::from_bits(&kept))
}

/// Re-expand `M` channel LLRs to the mother length: punctured positions get
/// 0, shortened positions get [`LLR_SATURATION`].
pub fn derate_match(llr: &[f64], pattern: &RateMatchPattern) -> Result<Vec<f64>> {
    let mut out = vec![0.0; pattern.mother_len()];
    derate_match_into(llr, pattern, &mut out)?;
    Ok(out)
}

pub(crate) fn derate_match_into(
    llr: &[f64],
    pattern: &RateMatchPattern,
    out: &mut [f64],
) -> Result<()> {
    if llr.len() != pattern.transmitted_len() {
        return Err(Error::LengthMismatch {
            expected: pattern.transmitted_len(),
            actual: llr.len(),
        });
    }
    let fill = match pattern.mode {
        RateMatchMode::Puncture => 0.0,
        RateMatchMode::Shorten => LLR_SATURATION,
    };
    let mut src = llr.iter();
    let mut removed = pattern.pattern.iter().peekable();
    for (i, slot) in out.iter_mut().enumerate() {
        if removed.peek() == Some(&i) {
            removed.next();
            *slot = fill;
        } else {
            *slot = *src.next().expect("length checked above");
        }
    }
    Ok(())
}

/// Modulate (0 -> +1, 1 -> -1), add white Gaussian noise and return the
/// channel LLRs `2 y / sigma^2`.
pub fn bpsk_awgn_llr<R: Rng + ?Sized>(
    bits: &BitVector,
    cfg: &ChannelConfig,
    rng: &mut R,
) -> Vec<f64> {
    let mut out = vec![0.0; bits.len()];
    let noise: Vec<f64> = (0..bits.len())
        .map(|_| rng.sample(StandardNormal))
        .collect();
    llr_from_noise(&bits.to_bits(), &noise, cfg.sigma, &mut out);
    out
}

/// LLRs for given standard-normal noise draws scaled by `sigma`.
pub(crate) fn llr_from_noise(bits: &[u8], noise: &[f64], sigma: f64, out: &mut [f64]) {
    let scale = 2.0 / (sigma * sigma);
    for ((o, &b), &z) in out.iter_mut().zip(bits).zip(noise) {
        let x = 1.0 - 2.0 * f64::from(b);
        *o = scale * (x + sigma * z);
    }
}
