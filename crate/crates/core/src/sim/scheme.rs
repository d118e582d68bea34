use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::codec::{CrcSpec, DecoderMode, PolarCode};
use crate::construction::{
    brs_pattern, ca_allocation, ga_reliability, pw_sequence, pw_weights, qup_pattern,
    select_allocation, GaConfig, RateMatchPattern,
};
use crate::error::{Error, Result};
use crate::types::CodeSpec;

/// Coding scheme under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// PW ordering, bit-reversed shortening, CSR parity checks, PC-SCL.
    #[serde(rename = "pc-polar")]
    PcPolar,
    /// GA ordering, quasi-uniform puncturing, CRC, CA-SCL.
    #[serde(rename = "ca-polar-ga-qup")]
    CaPolarGaQup,
    /// PW ordering, bit-reversed shortening, CRC, CA-SCL.
    #[serde(rename = "ca-polar-pw-brs")]
    CaPolarPwBrs,
    /// PW ordering, bit-reversed shortening, no assistance bits, SCL.
    #[serde(rename = "polar")]
    Plain,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::PcPolar,
        Scheme::CaPolarGaQup,
        Scheme::CaPolarPwBrs,
        Scheme::Plain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::PcPolar => "pc-polar",
            Scheme::CaPolarGaQup => "ca-polar-ga-qup",
            Scheme::CaPolarPwBrs => "ca-polar-pw-brs",
            Scheme::Plain => "polar",
        }
    }

    pub fn decoder_mode(self) -> DecoderMode {
        match self {
            Scheme::PcPolar => DecoderMode::PcScl,
            Scheme::CaPolarGaQup | Scheme::CaPolarPwBrs => DecoderMode::CaScl,
            Scheme::Plain => DecoderMode::Scl,
        }
    }

    pub fn uses_crc(self) -> bool {
        matches!(self, Scheme::CaPolarGaQup | Scheme::CaPolarPwBrs)
    }

    /// Whether construction depends on the channel SNR.
    pub fn uses_ga(self) -> bool {
        self == Scheme::CaPolarGaQup
    }

    pub fn default_rate_match(self) -> RateMatchKind {
        match self {
            Scheme::CaPolarGaQup => RateMatchKind::Qup,
            _ => RateMatchKind::Brs,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown scheme {s:?} (expected one of pc-polar, ca-polar-ga-qup, ca-polar-pw-brs, polar)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateMatchKind {
    Brs,
    Qup,
    None,
}

impl FromStr for RateMatchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brs" => Ok(RateMatchKind::Brs),
            "qup" => Ok(RateMatchKind::Qup),
            "none" => Ok(RateMatchKind::None),
            other => Err(Error::InvalidConfig(format!(
                "unknown rate matching {other:?} (expected brs, qup or none)"
            ))),
        }
    }
}

pub fn rate_match_pattern(spec: &CodeSpec, kind: RateMatchKind) -> Result<RateMatchPattern> {
    match kind {
        RateMatchKind::Brs => brs_pattern(spec),
        RateMatchKind::Qup => qup_pattern(spec),
        RateMatchKind::None if spec.m() == spec.n() => Ok(RateMatchPattern::none(spec.n())),
        RateMatchKind::None => Err(Error::InvalidSpec(format!(
            "M = {} differs from N = {} but rate matching is disabled",
            spec.m(),
            spec.n()
        ))),
    }
}

/// Parameters that fully determine a code construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeDesign {
    pub spec: CodeSpec,
    pub scheme: Scheme,
    pub crc_len: usize,
    pub alpha: f64,
    pub rate_match: RateMatchKind,
    pub pc_register_len: usize,
}

impl CodeDesign {
    pub fn validate(&self) -> Result<()> {
        if !self.scheme.uses_crc() && self.crc_len != 0 {
            return Err(Error::InvalidConfig(format!(
                "scheme {} does not use a CRC (crc_len = {})",
                self.scheme, self.crc_len
            )));
        }
        CrcSpec::for_len(self.crc_len)?;
        Ok(())
    }

    /// Construct the code. `ga_design_snr_db` is required by GA schemes and
    /// ignored otherwise.
    pub fn build(&self, ga_design_snr_db: Option<f64>) -> Result<PolarCode> {
        self.validate()?;
        let spec = &self.spec;
        let pattern = rate_match_pattern(spec, self.rate_match)?;
        let crc = CrcSpec::for_len(self.crc_len)?;
        let allocation = match self.scheme {
            Scheme::PcPolar => {
                select_allocation(spec, &pw_sequence(spec.n())?, &pattern, self.alpha)?
            }
            Scheme::CaPolarGaQup => {
                let snr = ga_design_snr_db.ok_or_else(|| {
                    Error::InvalidConfig("GA construction needs a design SNR".into())
                })?;
                let means = ga_reliability(spec, &GaConfig::new(snr)?, &pattern)?;
                ca_allocation(spec, &means, &pattern, self.crc_len)?
            }
            Scheme::CaPolarPwBrs | Scheme::Plain => {
                ca_allocation(spec, &pw_weights(spec.n())?, &pattern, self.crc_len)?
            }
        };
        PolarCode::new(*spec, allocation, pattern, crc, self.pc_register_len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::DEFAULT_PC_REGISTER_LEN;

    fn design(scheme: Scheme, k: usize, m: usize, crc_len: usize) -> CodeDesign {
        CodeDesign {
            spec: CodeSpec::new(k, m).unwrap(),
            scheme,
            crc_len,
            alpha: 1.0,
            rate_match: scheme.default_rate_match(),
            pc_register_len: DEFAULT_PC_REGISTER_LEN,
        }
    }

    #[test]
    fn names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
            assert_eq!(
                serde_json::to_string(&s).unwrap(),
                format!("\"{}\"", s.name())
            );
        }
        assert!("ldpc".parse::<Scheme>().is_err());
    }

    #[test]
    fn builds_every_scheme() {
        for (scheme, crc) in [
            (Scheme::PcPolar, 0),
            (Scheme::CaPolarGaQup, 8),
            (Scheme::CaPolarPwBrs, 16),
            (Scheme::Plain, 0),
        ] {
            let code = design(scheme, 40, 100, crc).build(Some(2.0)).unwrap();
            assert_eq!(code.allocation.k(), 40 + crc);
            assert_eq!(code.rate_match.transmitted_len(), 100);
        }
    }

    #[test]
    fn rejects_inconsistent_designs() {
        assert!(design(Scheme::PcPolar, 40, 100, 8).build(None).is_err());
        assert!(design(Scheme::CaPolarGaQup, 40, 100, 8)
            .build(None)
            .is_err());
        assert!(design(Scheme::CaPolarPwBrs, 40, 100, 12)
            .build(None)
            .is_err());
        let mut d = design(Scheme::Plain, 40, 100, 0);
        d.rate_match = RateMatchKind::None;
        assert!(d.build(None).is_err());
    }
}
