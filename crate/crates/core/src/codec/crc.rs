use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::BitVector;

/// A CRC generator polynomial, stored with its `x^degree` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CrcSpec {
    polynomial: u64,
    degree: u32,
}

impl CrcSpec {
    /// `D^8 + D^7 + D^6 + D^3 + D^2 + D + 1`
    pub const CRC8: CrcSpec = CrcSpec {
        polynomial: 0x1CF,
        degree: 8,
    };

    /// `D^16 + D^12 + D^11 + D^9 + D^8 + D^5 + D^3 + D + 1`
    pub const CRC16: CrcSpec = CrcSpec {
        polynomial: 0x11B2B,
        degree: 16,
    };

    pub fn new(polynomial: u64) -> Result<Self> {
        if polynomial < 2 {
            return Err(Error::InvalidConfig(format!(
                "CRC polynomial {polynomial:#x} has degree 0"
            )));
        }
        let degree = 63 - polynomial.leading_zeros();
        if degree > 32 {
            return Err(Error::InvalidConfig(format!(
                "CRC polynomial {polynomial:#x} has degree {degree} > 32"
            )));
        }
        Ok(Self { polynomial, degree })
    }

    /// Parse the hex notation used on the command line, e.g. `0x1CF`.
    pub fn from_hex(s: &str) -> Result<Self> {
        let digits = s.trim().trim_start_matches("0x").trim_start_matches("0X");
        let poly = u64::from_str_radix(digits, 16)
            .map_err(|e| Error::InvalidConfig(format!("bad CRC polynomial {s:?}: {e}")))?;
        Self::new(poly)
    }

    /// The standard polynomial for a CRC length of 8 or 16, none for 0.
    pub fn for_len(len: usize) -> Result<Option<Self>> {
        match len {
            0 => Ok(None),
            8 => Ok(Some(Self::CRC8)),
            16 => Ok(Some(Self::CRC16)),
            other => Err(Error::InvalidConfig(format!(
                "no built-in CRC of length {other} (use 0, 8 or 16)"
            ))),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn polynomial(&self) -> u64 {
        self.polynomial
    }

    /// Coefficients, highest degree first.
    pub fn coefficients(&self) -> Vec<u8> {
        (0..=self.degree)
            .rev()
            .map(|j| ((self.polynomial >> j) & 1) as u8)
            .collect()
    }

    /// Remainder of `u(x) * x^degree` divided by the generator, highest
    /// degree first. `bits[0]` is the highest-degree message coefficient.
    pub fn remainder(&self, bits: &[u8]) -> Vec<u8> {
        let deg = self.degree;
        let mask = (1u64 << deg) - 1;
        let low = self.polynomial & mask;
        let mut reg = 0u64;
        for &b in bits {
            let feedback = ((reg >> (deg - 1)) & 1) ^ u64::from(b & 1);
            reg = (reg << 1) & mask;
            if feedback == 1 {
                reg ^= low;
            }
        }
        (0..deg).rev().map(|j| ((reg >> j) & 1) as u8).collect()
    }

    pub(crate) fn check_bits(&self, bits: &[u8]) -> bool {
        if bits.len() <= self.degree() {
            return false;
        }
        let (msg, tail) = bits.split_at(bits.len() - self.degree());
        self.remainder(msg) == tail
    }
}

impl fmt::Display for CrcSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#X}", self.polynomial)
    }
}

/// Append the CRC of `u`.
pub fn crc_attach(u: &BitVector, spec: &CrcSpec) -> BitVector {
    let mut bits = u.to_bits();
    let tail = spec.remainder(&bits);
    bits.extend(tail);
    BitVector::from_bits(&bits)
}

/// True iff the trailing CRC matches. Inputs no longer than the degree fail.
pub fn crc_check(u_with_crc: &BitVector, spec: &CrcSpec) -> bool {
    spec.check_bits(&u_with_crc.to_bits())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Schoolbook GF(2) long division of `msg * x^deg` by the polynomial.
    fn long_division(msg: &[u8], poly: &[u8]) -> Vec<u8> {
        let deg = poly.len() - 1;
        let mut work: Vec<u8> = msg.to_vec();
        work.extend(std::iter::repeat_n(0, deg));
        for i in 0..msg.len() {
            if work[i] == 1 {
                for (j, &p) in poly.iter().enumerate() {
                    work[i + j] ^= p;
                }
            }
        }
        work[msg.len()..].to_vec()
    }

    #[test]
    fn polynomials_match_their_terms() {
        let terms8 = [8, 7, 6, 3, 2, 1, 0];
        let terms16 = [16, 12, 11, 9, 8, 5, 3, 1, 0];
        let build = |t: &[u32]| t.iter().fold(0u64, |acc, &e| acc | (1 << e));
        assert_eq!(build(&terms8), CrcSpec::CRC8.polynomial());
        assert_eq!(build(&terms16), CrcSpec::CRC16.polynomial());
        assert_eq!(CrcSpec::from_hex("0x1CF").unwrap(), CrcSpec::CRC8);
        assert_eq!(CrcSpec::from_hex("11B2B").unwrap(), CrcSpec::CRC16);
        assert_eq!(
            CrcSpec::CRC8.coefficients(),
            vec![1, 1, 1, 0, 0, 1, 1, 1, 1]
        );
        assert!(CrcSpec::for_len(12).is_err());
    }

    #[test]
    fn zero_message_has_zero_crc() {
        let u = BitVector::zeros(8);
        let c = crc_attach(&u, &CrcSpec::CRC8);
        assert_eq!(c.len(), 16);
        assert_eq!(c.weight(), 0);
        assert!(crc_check(&c, &CrcSpec::CRC8));
    }

    #[test]
    fn matches_long_division() {
        for crc in [CrcSpec::CRC8, CrcSpec::CRC16] {
            let unit = [1u8, 0, 0, 0, 0, 0, 0, 0];
            assert_eq!(
                crc.remainder(&unit),
                long_division(&unit, &crc.coefficients())
            );
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for len in [1usize, 7, 40, 200] {
                let msg: Vec<u8> = (0..len).map(|_| rng.random_range(0..2)).collect();
                assert_eq!(
                    crc.remainder(&msg),
                    long_division(&msg, &crc.coefficients())
                );
            }
        }
    }

    #[test]
    fn round_trip_and_single_flips() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for crc in [CrcSpec::CRC8, CrcSpec::CRC16] {
            for _ in 0..10_000 {
                let len = rng.random_range(1..64);
                let bits: Vec<u8> = (0..len).map(|_| rng.random_range(0..2)).collect();
                assert!(crc_check(
                    &crc_attach(&BitVector::from_bits(&bits), &crc),
                    &crc
                ));
            }
            let u = BitVector::from_bits(&[1, 0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0]);
            let good = crc_attach(&u, &crc);
            for pos in 0..good.len() {
                let mut bad = good.clone();
                bad.set(pos, 1 - bad.get(pos));
                assert!(!crc_check(&bad, &crc), "flip at {pos} undetected");
            }
        }
    }

    #[test]
    fn too_short_input_fails() {
        assert!(!crc_check(&BitVector::zeros(8), &CrcSpec::CRC8));
        assert!(crc_check(&BitVector::zeros(9), &CrcSpec::CRC8));
    }
}
