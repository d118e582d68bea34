//! Polar transform, parity-check pre-coding, CRC and the SC / SCL decoder
//! family.

mod crc;
mod decoder;
mod precode;
mod sc;
mod scl;
mod transform;

pub use crc::{crc_attach, crc_check, CrcSpec};
pub use decoder::{
    path_metric_update, DecodeResult, DecoderConfig, DecoderMode, ListEntry, PathMetric,
};
pub use precode::{pc_precode, PcRegister, DEFAULT_PC_REGISTER_LEN};
pub use sc::sc_decode;
pub use scl::{scl_decode, ListDecoder};
pub use transform::{polar_transform, polar_transform_in_place};

pub(crate) use precode::pc_precode_into;

use serde::{Deserialize, Serialize};

use crate::channel::derate_match_into;
use crate::construction::{Allocation, RateMatchPattern};
use crate::error::{Error, Result};
use crate::types::{BitVector, CodeSpec};

/// Everything needed to encode a message and decode a received frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarCode {
    pub spec: CodeSpec,
    pub allocation: Allocation,
    pub rate_match: RateMatchPattern,
    pub crc: Option<CrcSpec>,
    pub pc_register_len: usize,
}

impl PolarCode {
    pub fn new(
        spec: CodeSpec,
        allocation: Allocation,
        rate_match: RateMatchPattern,
        crc: Option<CrcSpec>,
        pc_register_len: usize,
    ) -> Result<Self> {
        let crc_len = crc.map_or(0, |c| c.degree());
        if allocation.n() != spec.n() || rate_match.mother_len() != spec.n() {
            return Err(Error::InvalidAllocation(format!(
                "allocation / pattern length does not match N = {}",
                spec.n()
            )));
        }
        if allocation.k() != spec.k() + crc_len {
            return Err(Error::InvalidAllocation(format!(
                "allocation has {} information positions, expected K + crc = {}",
                allocation.k(),
                spec.k() + crc_len
            )));
        }
        if rate_match.transmitted_len() != spec.m() {
            return Err(Error::InvalidAllocation(format!(
                "pattern leaves {} bits, expected M = {}",
                rate_match.transmitted_len(),
                spec.m()
            )));
        }
        if rate_match
            .pattern
            .iter()
            .any(|i| allocation.info().contains(i))
        {
            return Err(Error::InvalidAllocation(
                "an information position lies in the rate-matching pattern".into(),
            ));
        }
        Ok(Self {
            spec,
            allocation,
            rate_match,
            crc,
            pc_register_len,
        })
    }

    /// Pre-code and transform a `K`-bit message into the `N`-bit mother
    /// codeword, writing the `N` bits into `out`.
    pub fn encode_mother_into(&self, message: &[u8], out: &mut [u8]) -> Result<()> {
        if message.len() != self.spec.k() {
            return Err(Error::LengthMismatch {
                expected: self.spec.k(),
                actual: message.len(),
            });
        }
        match self.crc {
            Some(crc) => {
                let mut full = message.to_vec();
                full.extend(crc.remainder(message));
                pc_precode_into(&full, &self.allocation, self.pc_register_len, out)?;
            }
            None => pc_precode_into(message, &self.allocation, self.pc_register_len, out)?,
        }
        polar_transform_in_place(out);
        Ok(())
    }

    /// Mother codeword with the pattern positions removed.
    pub fn encode(&self, message: &BitVector) -> Result<BitVector> {
        let mut c = vec![0u8; self.spec.n()];
        self.encode_mother_into(&message.to_bits(), &mut c)?;
        crate::channel::apply_rate_matching(&BitVector::from_bits(&c), &self.rate_match)
    }

    /// Decoder configuration matching this code's CRC and register.
    pub fn decoder_config(&self, mode: DecoderMode, list_size: usize) -> DecoderConfig {
        DecoderConfig {
            pc_register_len: self.pc_register_len,
            ..DecoderConfig::new(mode, list_size).with_crc(self.crc)
        }
    }

    /// De-rate-match `M` channel LLRs and decode.
    pub fn decode(&self, llr: &[f64], cfg: &DecoderConfig) -> Result<DecodeResult> {
        let mut full = vec![0.0; self.spec.n()];
        derate_match_into(llr, &self.rate_match, &mut full)?;
        scl_decode(&full, &self.allocation, cfg)
    }
}
