//! Index arithmetic, packed bit vectors and code-parameter types shared by
//! the rest of the crate.
//!
//! Sub-channel indices are 0-based, so `u[0]` is the first bit decided by a
//! successive-cancellation decoder.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reverse the low `width` bits of `index`.
pub fn bit_reverse(index: usize, width: u32) -> Result<usize> {
    if width > usize::BITS || (width < usize::BITS && index >> width != 0) {
        return Err(Error::WidthOutOfRange { index, width });
    }
    if width == 0 {
        return Ok(0);
    }
    Ok(index.reverse_bits() >> (usize::BITS - width))
}

/// Hamming weight of row `index` of `F^{⊗n}`, which is `2^popcount(index)`.
#[inline]
pub fn row_weight(index: usize) -> usize {
    1usize << index.count_ones()
}

/// `log2(len)` when `len` is a power of two.
pub fn log2_exact(len: usize) -> Result<u32> {
    if len.is_power_of_two() {
        Ok(len.trailing_zeros())
    } else {
        Err(Error::NotPowerOfTwo(len))
    }
}

/// Code dimensions: `k` information bits carried by `m` transmitted bits of
/// a mother code of length `n = 2^ceil(log2 m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct CodeSpec {
    k: usize,
    m: usize,
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "K")]
    k: usize,
}

impl TryFrom<SpecRepr> for CodeSpec {
    type Error = Error;

    fn try_from(r: SpecRepr) -> Result<Self> {
        CodeSpec::with_mother(r.k, r.m, r.n)
    }
}

impl From<CodeSpec> for SpecRepr {
    fn from(s: CodeSpec) -> Self {
        SpecRepr {
            n: s.n,
            m: s.m,
            k: s.k,
        }
    }
}

impl CodeSpec {
    /// Build a spec whose mother length is the smallest power of two `>= m`.
    pub fn new(k: usize, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidSpec("M must be positive".into()));
        }
        Self::with_mother(k, m, m.next_power_of_two())
    }

    /// Build a spec with an explicit mother length, which must equal
    /// `2^ceil(log2 m)`.
    pub fn with_mother(k: usize, m: usize, n: usize) -> Result<Self> {
        log2_exact(n)?;
        if m == 0 || m > n || (n > 1 && m <= n / 2) {
            return Err(Error::InvalidSpec(format!(
                "M = {m} must satisfy N/2 < M <= N for N = {n}"
            )));
        }
        if k == 0 || k > m {
            return Err(Error::InvalidSpec(format!(
                "K = {k} must satisfy 0 < K <= M = {m}"
            )));
        }
        Ok(Self { k, m, n })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Mother code length `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn log2n(&self) -> u32 {
        self.n.trailing_zeros()
    }

    /// Number of rate-matched (shortened or punctured) positions.
    pub fn rate_matched(&self) -> usize {
        self.n - self.m
    }

    /// `K / M`.
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.m as f64
    }
}

/// A packed sequence of bits.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// Build from a slice of 0/1 values; any non-zero byte counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.words[i / 64] |= 1 << (i % 64);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        ((self.words[i / 64] >> (i % 64)) & 1) as u8
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: u8) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if bit & 1 == 1 {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(
            self.len, other.len,
            "xor of bit vectors with different lengths"
        );
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Unpack to one byte per bit.
    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector[")?;
        for b in self.iter() {
            write!(f, "{b}")?;
        }
        write!(f, "]")
    }
}

impl From<&[u8]> for BitVector {
    fn from(bits: &[u8]) -> Self {
        Self::from_bits(bits)
    }
}

/// A duplicate-free, ascending set of sub-channel indices below a bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(indices: impl IntoIterator<Item = usize>, bound: usize) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidAllocation(format!(
                "duplicate index {}",
                w[0]
            )));
        }
        if let Some(&last) = v.last() {
            if last >= bound {
                return Err(Error::InvalidAllocation(format!(
                    "index {last} outside [0, {bound})"
                )));
            }
        }
        Ok(Self(v))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// Dense membership mask of length `bound`.
    pub fn mask(&self, bound: usize) -> Vec<bool> {
        let mut m = vec![false; bound];
        for &i in &self.0 {
            m[i] = true;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_reverse_examples() {
        assert_eq!(bit_reverse(0, 3).unwrap(), 0);
        assert_eq!(bit_reverse(1, 3).unwrap(), 4);
        assert_eq!(bit_reverse(6, 3).unwrap(), 3);
        assert_eq!(bit_reverse(0, 0).unwrap(), 0);
        assert!(matches!(
            bit_reverse(8, 3),
            Err(Error::WidthOutOfRange { index: 8, width: 3 })
        ));
    }

    #[test]
    fn bit_reverse_is_involution() {
        for n in 0..=20u32 {
            let step = if n > 12 { 997 } else { 1 };
            for i in (0..1usize << n).step_by(step) {
                assert_eq!(bit_reverse(bit_reverse(i, n).unwrap(), n).unwrap(), i);
            }
        }
    }

    fn kron_rows(n: usize) -> Vec<Vec<u8>> {
        let mut g = vec![vec![1u8]];
        while g.len() < n {
            let s = g.len();
            let mut next = vec![vec![0u8; 2 * s]; 2 * s];
            for r in 0..s {
                for c in 0..s {
                    next[r][c] = g[r][c];
                    next[r + s][c] = g[r][c];
                    next[r + s][c + s] = g[r][c];
                }
            }
            g = next;
        }
        g
    }

    #[test]
    fn row_weight_matches_explicit_kronecker_power() {
        assert_eq!(row_weight(5), 4);
        assert_eq!(row_weight(0), 1);
        assert_eq!(row_weight(15), 16);
        for n in [2, 4, 8, 16, 32] {
            for (i, row) in kron_rows(n).iter().enumerate() {
                let w: usize = row.iter().map(|&b| b as usize).sum();
                assert_eq!(row_weight(i), w, "row {i} of N={n}");
            }
        }
    }

    #[test]
    fn code_spec_bounds() {
        let s = CodeSpec::new(4, 6).unwrap();
        assert_eq!((s.n(), s.log2n(), s.rate_matched()), (8, 3, 2));
        assert_eq!(CodeSpec::new(1, 1).unwrap().n(), 1);
        assert!(CodeSpec::new(0, 8).is_err());
        assert!(CodeSpec::new(9, 8).is_err());
        assert!(CodeSpec::with_mother(4, 4, 16).is_err());
        assert!(CodeSpec::with_mother(4, 6, 12).is_err());
    }

    #[test]
    fn bitvector_positional_contract() {
        let bits = [1u8, 0, 1, 1, 0, 0, 0, 1];
        let mut v = BitVector::from_bits(&bits);
        assert_eq!(v.to_bits(), bits);
        assert_eq!(v.weight(), 4);
        v.set(1, 1);
        v.set(0, 0);
        assert_eq!(v.get(1), 1);
        assert_eq!(v.get(0), 0);
        let long = BitVector::from_bits(&[1u8; 130]);
        assert_eq!(long.weight(), 130);
    }

    #[test]
    fn index_set_rejects_duplicates_and_out_of_range() {
        assert!(IndexSet::new([1, 2, 2], 4).is_err());
        assert!(IndexSet::new([1, 4], 4).is_err());
        let s = IndexSet::new([3, 0], 4).unwrap();
        assert_eq!(s.as_slice(), &[0, 3]);
        assert!(s.contains(3) && !s.contains(1));
    }

    #[test]
    fn spec_json_is_validated() {
        let s = CodeSpec::new(40, 100).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"N":128,"M":100,"K":40}"#);
        assert_eq!(serde_json::from_str::<CodeSpec>(&j).unwrap(), s);
        assert!(serde_json::from_str::<CodeSpec>(r#"{"N":128,"M":60,"K":40}"#).is_err());
    }
}
