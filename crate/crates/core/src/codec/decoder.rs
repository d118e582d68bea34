use serde::{Deserialize, Serialize};

use crate::codec::crc::CrcSpec;
use crate::codec::precode::DEFAULT_PC_REGISTER_LEN;
use crate::error::{Error, Result};
use crate::types::BitVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderMode {
    Sc,
    Scl,
    CaScl,
    PcScl,
}

/// Path-metric increment rule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathMetric {
    /// Add `|llr|` when the bit disagrees with the hard decision.
    #[default]
    HardPenalty,
    /// Add `ln(1 + exp(-(1 - 2u) * llr))`.
    Exact,
}

impl PathMetric {
    #[inline]
    pub fn update(self, pm: f64, llr: f64, bit: u8) -> f64 {
        match self {
            PathMetric::HardPenalty => path_metric_update(pm, llr, bit),
            PathMetric::Exact => {
                let x = if bit == 0 { -llr } else { llr };
                pm + if x > 35.0 { x } else { x.exp().ln_1p() }
            }
        }
    }
}

/// Hard-decision penalty metric; lower is better.
#[inline]
pub fn path_metric_update(pm: f64, llr: f64, bit: u8) -> f64 {
    let hard = u8::from(llr < 0.0);
    if bit == hard {
        pm
    } else {
        pm + llr.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub list_size: usize,
    pub mode: DecoderMode,
    /// CRC appended to the message; used for path selection in CA-SCL and
    /// stripped from the output in every mode.
    pub crc: Option<CrcSpec>,
    pub pc_register_len: usize,
    #[serde(default)]
    pub metric: PathMetric,
    /// Keep every surviving path in the result.
    #[serde(default)]
    pub dump_list: bool,
}

impl DecoderConfig {
    pub fn new(mode: DecoderMode, list_size: usize) -> Self {
        Self {
            list_size,
            mode,
            crc: None,
            pc_register_len: DEFAULT_PC_REGISTER_LEN,
            metric: PathMetric::HardPenalty,
            dump_list: false,
        }
    }

    pub fn with_crc(mut self, crc: Option<CrcSpec>) -> Self {
        self.crc = crc;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.list_size == 0 || self.list_size > u16::MAX as usize {
            return Err(Error::InvalidConfig(format!(
                "list size {} outside [1, 65535]",
                self.list_size
            )));
        }
        if self.pc_register_len == 0 || self.pc_register_len > 32 {
            return Err(Error::InvalidConfig(format!(
                "PC register length {} outside [1, 32]",
                self.pc_register_len
            )));
        }
        Ok(())
    }

    pub(crate) fn crc_len(&self) -> usize {
        self.crc.map_or(0, |c| c.degree())
    }
}

/// One surviving list entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ListEntry {
    pub message: BitVector,
    pub path_metric: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub message: BitVector,
    pub selected_path_metric: f64,
    /// CRC outcome for CRC-aided selection, otherwise always true.
    pub pass: bool,
    pub list_dump: Option<Vec<ListEntry>>,
}
