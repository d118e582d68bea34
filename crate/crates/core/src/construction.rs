//! Code construction: reliability orderings, rate-matching patterns and the
//! information / frozen / parity-check allocation.

use serde::{Deserialize, Serialize};

use crate::channel::{self, LLR_SATURATION};
use crate::error::{Error, Result};
use crate::types::{bit_reverse, log2_exact, row_weight, CodeSpec, IndexSet};

/// Base of the polarization-weight expansion, `2^(1/4)`.
pub const PW_BETA: f64 = 1.189_207_115_002_721;

/// Largest supported `log2 N` for the sequence builders.
pub const MAX_LOG2N: u32 = 20;

/// Per-index reliabilities and the ascending-reliability ordering `Q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReliabilitySequence {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "Q")]
    order: Vec<usize>,
    #[serde(skip)]
    weights: Vec<f64>,
    #[serde(skip)]
    beta: f64,
}

impl ReliabilitySequence {
    /// Order arbitrary per-index reliabilities, ascending, ties broken by
    /// ascending index.
    pub fn from_weights(weights: Vec<f64>, beta: f64) -> Self {
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]).then(a.cmp(&b)));
        Self {
            n: weights.len(),
            order,
            weights,
            beta,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Ascending-reliability permutation `Q`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Indices from most to least reliable.
    pub fn descending(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().rev().copied()
    }
}

fn check_len(n: usize) -> Result<u32> {
    let log2n = log2_exact(n)?;
    if log2n == 0 || log2n > MAX_LOG2N {
        return Err(Error::InvalidSpec(format!(
            "mother length {n} outside [2, 2^{MAX_LOG2N}]"
        )));
    }
    Ok(log2n)
}

/// Polarization weights `W_i = sum_j b_j * beta^j` for every index below `n`.
pub fn pw_weights(n: usize) -> Result<Vec<f64>> {
    let log2n = check_len(n)?;
    let powers: Vec<f64> = (0..log2n).map(|j| PW_BETA.powi(j as i32)).collect();
    Ok((0..n)
        .map(|i| {
            powers
                .iter()
                .enumerate()
                .filter(|(j, _)| (i >> j) & 1 == 1)
                .map(|(_, p)| p)
                .sum()
        })
        .collect())
}

/// The channel-independent PW reliability sequence of length `n`.
pub fn pw_sequence(n: usize) -> Result<ReliabilitySequence> {
    Ok(ReliabilitySequence::from_weights(pw_weights(n)?, PW_BETA))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateMatchMode {
    /// Untransmitted bits are known to be zero.
    Shorten,
    /// Untransmitted bits are unknown.
    Puncture,
}

/// Positions removed from the mother codeword.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateMatchPattern {
    pub mode: RateMatchMode,
    /// The ordered length-N sequence the pattern was cut from.
    pub reversed_seq: Vec<usize>,
    #[serde(rename = "R")]
    pub pattern: IndexSet,
}

impl RateMatchPattern {
    /// The identity pattern (no rate matching) for mother length `n`.
    pub fn none(n: usize) -> Self {
        Self {
            mode: RateMatchMode::Shorten,
            reversed_seq: (0..n).rev().collect(),
            pattern: IndexSet::empty(),
        }
    }

    pub fn mother_len(&self) -> usize {
        self.reversed_seq.len()
    }

    pub fn transmitted_len(&self) -> usize {
        self.mother_len() - self.pattern.len()
    }
}

/// Bit-reversed shortening: `T_j = BR(N-1-j)`, `R = {T_0, ..., T_{N-M-1}}`.
pub fn brs_pattern(spec: &CodeSpec) -> Result<RateMatchPattern> {
    let n = spec.n();
    let width = spec.log2n();
    let seq = (0..n)
        .map(|j| bit_reverse(n - 1 - j, width))
        .collect::<Result<Vec<_>>>()?;
    let pattern = IndexSet::new(seq[..spec.rate_matched()].iter().copied(), n)?;
    Ok(RateMatchPattern {
        mode: RateMatchMode::Shorten,
        reversed_seq: seq,
        pattern,
    })
}

/// Quasi-uniform puncturing: the first `N - M` coded bits.
pub fn qup_pattern(spec: &CodeSpec) -> Result<RateMatchPattern> {
    let n = spec.n();
    Ok(RateMatchPattern {
        mode: RateMatchMode::Puncture,
        reversed_seq: (0..n).collect(),
        pattern: IndexSet::new(0..spec.rate_matched(), n)?,
    })
}

/// Design point for Gaussian-approximation density evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    /// Es/N0 in dB.
    pub design_snr_db: f64,
}

impl GaConfig {
    pub fn new(design_snr_db: f64) -> Result<Self> {
        if !design_snr_db.is_finite() {
            return Err(Error::InvalidConfig("GA design SNR must be finite".into()));
        }
        Ok(Self { design_snr_db })
    }
}

// Two-segment approximation of phi(x) = 1 - E[tanh(L/2)], L ~ N(x, 2x),
// evaluated in the log domain so that large means do not underflow.
const PHI_SPLIT: f64 = 10.0;

fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < PHI_SPLIT {
        (-0.4527 * x.powf(0.86) + 0.0218).min(0.0)
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

fn ln_phi_inv(ly: f64) -> f64 {
    if ly >= 0.0 {
        return 0.0;
    }
    let ly_split = ln_phi(PHI_SPLIT);
    if ly >= ly_split {
        let x = ((0.0218 - ly) / 0.4527).powf(1.0 / 0.86);
        return x.min(PHI_SPLIT);
    }
    // Second segment has no closed-form inverse; it is monotone, so bisect.
    let (mut lo, mut hi) = (PHI_SPLIT, PHI_SPLIT * 2.0);
    while ln_phi(hi) > ly {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_phi(mid) > ly {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// GA mean of the check-node ("minus") combination of two LLR means.
pub fn ga_check_mean(a: f64, b: f64) -> f64 {
    let (la, lb) = (ln_phi(a), ln_phi(b));
    let (hi, lo) = if la >= lb { (la, lb) } else { (lb, la) };
    // ln(phi_a + phi_b - phi_a * phi_b)
    let ly = hi + ((lo - hi).exp() - lo.exp()).ln_1p();
    ln_phi_inv(ly)
}

/// Propagate per-coded-bit channel LLR means through the polar transform,
/// returning the mean LLR of each synthesized sub-channel.
pub fn ga_means(channel_means: &[f64]) -> Result<Vec<f64>> {
    log2_exact(channel_means.len())?;
    let mut out = vec![0.0; channel_means.len()];
    ga_recurse(channel_means, &mut out);
    Ok(out)
}

fn ga_recurse(input: &[f64], out: &mut [f64]) {
    if input.len() == 1 {
        out[0] = input[0];
        return;
    }
    let half = input.len() / 2;
    let (a, b) = input.split_at(half);
    let minus: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| ga_check_mean(x, y))
        .collect();
    let plus: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| x + y).collect();
    let (lo, hi) = out.split_at_mut(half);
    ga_recurse(&minus, lo);
    ga_recurse(&plus, hi);
}

/// GA sub-channel means for a rate-matched code at `cfg`'s design SNR.
/// Punctured positions start from mean 0, shortened ones from the LLR
/// saturation value.
pub fn ga_reliability(
    spec: &CodeSpec,
    cfg: &GaConfig,
    pattern: &RateMatchPattern,
) -> Result<Vec<f64>> {
    check_pattern(spec, pattern)?;
    let sigma = channel::sigma_from_snr_db(cfg.design_snr_db);
    let mean = 2.0 / (sigma * sigma);
    let mut channel_means = vec![mean; spec.n()];
    let removed = match pattern.mode {
        RateMatchMode::Puncture => 0.0,
        RateMatchMode::Shorten => LLR_SATURATION,
    };
    for i in pattern.pattern.iter() {
        channel_means[i] = removed;
    }
    ga_means(&channel_means)
}

fn check_pattern(spec: &CodeSpec, pattern: &RateMatchPattern) -> Result<()> {
    if pattern.mother_len() != spec.n() || pattern.pattern.len() != spec.rate_matched() {
        return Err(Error::InvalidSpec(format!(
            "rate-matching pattern (N = {}, |R| = {}) does not fit N = {}, M = {}",
            pattern.mother_len(),
            pattern.pattern.len(),
            spec.n(),
            spec.m()
        )));
    }
    Ok(())
}

/// Role of a sub-channel in an allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BitRole {
    Info,
    Parity,
    Frozen,
}

#[derive(Serialize, Deserialize)]
struct AllocationRepr {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "I")]
    info: Vec<usize>,
    #[serde(rename = "P")]
    pc: Vec<usize>,
    #[serde(rename = "F")]
    frozen: Vec<usize>,
    #[serde(default)]
    w_min: usize,
    #[serde(default)]
    f: usize,
    #[serde(default)]
    f1: usize,
    #[serde(default)]
    f2: usize,
    #[serde(default)]
    alpha: f64,
}

/// Partition of `[0, N)` into information, parity-check and frozen indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AllocationRepr", into = "AllocationRepr")]
pub struct Allocation {
    n: usize,
    info: IndexSet,
    pc: IndexSet,
    frozen: IndexSet,
    roles: Vec<BitRole>,
    /// Smallest row weight among the reliable window (0 when unused).
    pub w_min: usize,
    /// Estimated number of pre-selected PC bits.
    pub f: usize,
    /// PC bits pre-selected at weight `w_min`.
    pub f1: usize,
    /// PC bits pre-selected at weight `2 * w_min`.
    pub f2: usize,
    pub alpha: f64,
}

impl TryFrom<AllocationRepr> for Allocation {
    type Error = Error;

    fn try_from(r: AllocationRepr) -> Result<Self> {
        let mut a = Allocation::from_sets(r.n, r.info, r.pc, r.frozen)?;
        a.w_min = r.w_min;
        a.f = r.f;
        a.f1 = r.f1;
        a.f2 = r.f2;
        a.alpha = r.alpha;
        Ok(a)
    }
}

impl From<Allocation> for AllocationRepr {
    fn from(a: Allocation) -> Self {
        Self {
            n: a.n,
            info: a.info.as_slice().to_vec(),
            pc: a.pc.as_slice().to_vec(),
            frozen: a.frozen.as_slice().to_vec(),
            w_min: a.w_min,
            f: a.f,
            f1: a.f1,
            f2: a.f2,
            alpha: a.alpha,
        }
    }
}

impl Allocation {
    /// Build from explicit sets, which must partition `[0, n)`.
    pub fn from_sets(
        n: usize,
        info: impl IntoIterator<Item = usize>,
        pc: impl IntoIterator<Item = usize>,
        frozen: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        log2_exact(n)?;
        let info = IndexSet::new(info, n)?;
        let pc = IndexSet::new(pc, n)?;
        let frozen = IndexSet::new(frozen, n)?;
        let mut roles: Vec<Option<BitRole>> = vec![None; n];
        for (set, role) in [
            (&info, BitRole::Info),
            (&pc, BitRole::Parity),
            (&frozen, BitRole::Frozen),
        ] {
            for i in set.iter() {
                if let Some(prev) = roles[i] {
                    return Err(Error::InvalidAllocation(format!(
                        "index {i} is both {prev:?} and {role:?}"
                    )));
                }
                roles[i] = Some(role);
            }
        }
        let roles = roles
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                r.ok_or_else(|| Error::InvalidAllocation(format!("index {i} has no role")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            info,
            pc,
            frozen,
            roles,
            w_min: 0,
            f: 0,
            f1: 0,
            f2: 0,
            alpha: 0.0,
        })
    }

    /// Mother length `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of information positions (including CRC bits for CA codes).
    pub fn k(&self) -> usize {
        self.info.len()
    }

    pub fn info(&self) -> &IndexSet {
        &self.info
    }

    pub fn pc(&self) -> &IndexSet {
        &self.pc
    }

    pub fn frozen(&self) -> &IndexSet {
        &self.frozen
    }

    pub fn roles(&self) -> &[BitRole] {
        &self.roles
    }

    #[inline]
    pub fn role(&self, i: usize) -> BitRole {
        self.roles[i]
    }
}

fn non_pattern_descending<'a>(
    rel: &'a ReliabilitySequence,
    pattern: &'a RateMatchPattern,
) -> impl Iterator<Item = usize> + 'a {
    let removed = pattern.pattern.mask(rel.len());
    rel.descending().filter(move |&i| !removed[i])
}

/// Estimated number of pre-selected PC bits, floored and clamped to
/// `[0, floor((M - K) / 2)]`.
pub fn estimate_pc_count(spec: &CodeSpec, alpha: f64) -> usize {
    let x = alpha * (spec.rate() - 0.5);
    let raw = (spec.log2n() as f64 * (alpha - x * x)).floor();
    let cap = (spec.m() - spec.k()) / 2;
    if raw <= 0.0 {
        0
    } else {
        (raw as usize).min(cap)
    }
}

/// PC-Polar bit-set selection: pre-select `f1 + f2` low-weight PC bits from
/// the reliable window, take the `K` most reliable remaining positions as
/// information bits, turn every other non-rate-matched position into a PC
/// bit and freeze the rate-matched ones.
pub fn select_allocation(
    spec: &CodeSpec,
    rel: &ReliabilitySequence,
    pattern: &RateMatchPattern,
    alpha: f64,
) -> Result<Allocation> {
    check_pattern(spec, pattern)?;
    if rel.len() != spec.n() {
        return Err(Error::LengthMismatch {
            expected: spec.n(),
            actual: rel.len(),
        });
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let k = spec.k();
    let f = estimate_pc_count(spec, alpha);
    let candidates: Vec<usize> = non_pattern_descending(rel, pattern).collect();

    let window = &candidates[..(k + f).min(candidates.len())];
    let w_min = window.iter().map(|&i| row_weight(i)).min().unwrap_or(1);
    let n_wmin = window.iter().filter(|&&i| row_weight(i) == w_min).count();
    let (f1, f2) = if f <= n_wmin {
        (f, 0)
    } else {
        (n_wmin, 3 * (f - n_wmin) / 4)
    };
    if k + f1 + f2 > candidates.len() {
        return Err(Error::Infeasible(format!(
            "K + f1 + f2 = {} exceeds N - |R| = {}",
            k + f1 + f2,
            candidates.len()
        )));
    }

    let mut preselected = vec![false; spec.n()];
    for (weight, count) in [(w_min, f1), (2 * w_min, f2)] {
        candidates
            .iter()
            .filter(|&&i| row_weight(i) == weight)
            .take(count)
            .for_each(|&i| preselected[i] = true);
    }
    let info: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&i| !preselected[i])
        .take(k)
        .collect();
    let info_mask = {
        let mut m = vec![false; spec.n()];
        info.iter().for_each(|&i| m[i] = true);
        m
    };
    let pc: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&i| !info_mask[i])
        .collect();

    let mut alloc = Allocation::from_sets(spec.n(), info, pc, pattern.pattern.iter())?;
    alloc.w_min = w_min;
    alloc.f = f;
    alloc.f1 = f1;
    alloc.f2 = f2;
    alloc.alpha = alpha;
    Ok(alloc)
}

/// CA-Polar selection: the `K + crc_len` most reliable positions outside the
/// rate-matching pattern carry message and CRC; everything else is frozen.
pub fn ca_allocation(
    spec: &CodeSpec,
    reliability: &[f64],
    pattern: &RateMatchPattern,
    crc_len: usize,
) -> Result<Allocation> {
    check_pattern(spec, pattern)?;
    if reliability.len() != spec.n() {
        return Err(Error::LengthMismatch {
            expected: spec.n(),
            actual: reliability.len(),
        });
    }
    let total = spec.k() + crc_len;
    if total > spec.m() {
        return Err(Error::Infeasible(format!(
            "K + crc_len = {total} exceeds M = {}",
            spec.m()
        )));
    }
    let rel = ReliabilitySequence::from_weights(reliability.to_vec(), f64::NAN);
    let info: Vec<usize> = non_pattern_descending(&rel, pattern).take(total).collect();
    let info_mask = IndexSet::new(info.iter().copied(), spec.n())?.mask(spec.n());
    let frozen: Vec<usize> = (0..spec.n()).filter(|&i| !info_mask[i]).collect();
    Allocation::from_sets(spec.n(), info, [], frozen)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pw_weight_examples() {
        let w = pw_weights(8).unwrap();
        assert_eq!(w[0], 0.0);
        assert_eq!(w[1], 1.0);
        let expected = 1.0 + 2f64.powf(0.25) + 2f64.sqrt();
        assert!((w[7] - expected).abs() < 1e-12);
        assert!((PW_BETA - 2f64.powf(0.25)).abs() < 1e-15);
        assert!(pw_weights(12).is_err());
    }

    #[test]
    fn pw_sequence_examples() {
        assert_eq!(pw_sequence(2).unwrap().order(), &[0, 1]);
        assert_eq!(pw_sequence(4).unwrap().order(), &[0, 1, 2, 3]);
        assert_eq!(pw_sequence(8).unwrap().order(), &[0, 1, 2, 4, 3, 5, 6, 7]);
    }

    #[test]
    fn pw_sequence_is_nested() {
        for log2n in 2..=10 {
            let n = 1usize << log2n;
            let big: Vec<usize> = pw_sequence(n)
                .unwrap()
                .order()
                .iter()
                .copied()
                .filter(|&i| i < n / 2)
                .collect();
            assert_eq!(big, pw_sequence(n / 2).unwrap().order(), "N = {n}");
        }
    }

    #[test]
    fn brs_examples() {
        let p = brs_pattern(&CodeSpec::new(4, 8).unwrap()).unwrap();
        assert!(p.pattern.is_empty());
        let p = brs_pattern(&CodeSpec::new(4, 6).unwrap()).unwrap();
        assert_eq!(p.reversed_seq, vec![7, 3, 5, 1, 6, 2, 4, 0]);
        assert_eq!(p.pattern.as_slice(), &[3, 7]);
        assert_eq!(p.mode, RateMatchMode::Shorten);
        let p = brs_pattern(&CodeSpec::new(4, 15).unwrap()).unwrap();
        assert_eq!(p.pattern.as_slice(), &[15]);
    }

    #[test]
    fn qup_examples() {
        assert!(qup_pattern(&CodeSpec::new(4, 8).unwrap())
            .unwrap()
            .pattern
            .is_empty());
        let p = qup_pattern(&CodeSpec::new(4, 6).unwrap()).unwrap();
        assert_eq!(p.pattern.as_slice(), &[0, 1]);
        assert_eq!(p.mode, RateMatchMode::Puncture);
        let p = qup_pattern(&CodeSpec::new(4, 12).unwrap()).unwrap();
        assert_eq!(p.pattern.as_slice(), &[0, 1, 2, 3]);
    }

    #[test]
    fn ga_trivial_lengths() {
        assert_eq!(ga_means(&[3.5]).unwrap(), vec![3.5]);
        let m = ga_means(&[2.0, 2.0]).unwrap();
        assert_eq!(m[1], 4.0);
        assert!(m[0] > 0.0 && m[0] < 2.0);
        assert!(ga_means(&[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn ga_phi_inverse_round_trips() {
        for &x in &[0.05, 0.5, 1.0, 5.0, 9.5, 10.5, 20.0, 300.0, 2500.0] {
            let back = ln_phi_inv(ln_phi(x));
            assert!(
                (back - x).abs() < 1e-6 * x.max(1.0),
                "x = {x}, back = {back}"
            );
        }
    }

    #[test]
    fn ga_check_mean_is_below_both_inputs() {
        for &(a, b) in &[
            (0.3, 0.3),
            (2.0, 5.0),
            (40.0, 41.0),
            (1000.0, 3.0),
            (1000.0, 1000.0),
        ] {
            let m = ga_check_mean(a, b);
            assert!(m <= a.min(b) + 1e-9, "({a}, {b}) -> {m}");
        }
        assert_eq!(ga_check_mean(0.0, 7.0), 0.0);
    }

    #[test]
    fn ga_punctured_positions_lose_capacity() {
        let spec = CodeSpec::new(4, 12).unwrap();
        let p = qup_pattern(&spec).unwrap();
        let m = ga_reliability(&spec, &GaConfig::new(1.0).unwrap(), &p).unwrap();
        for (i, &x) in m[..4].iter().enumerate() {
            assert!(x < 1e-6, "sub-channel {i} mean {x}");
        }
        assert!(m[4..].iter().all(|&x| x > 1e-3));
    }

    #[test]
    fn allocation_estimate_f() {
        let spec = CodeSpec::new(128, 256).unwrap();
        assert_eq!(estimate_pc_count(&spec, 1.0), 8);
        let spec = CodeSpec::new(8, 8).unwrap();
        assert_eq!(estimate_pc_count(&spec, 1.0), 0);
    }

    #[test]
    fn allocation_rate_one() {
        let spec = CodeSpec::new(8, 8).unwrap();
        let a = select_allocation(
            &spec,
            &pw_sequence(8).unwrap(),
            &brs_pattern(&spec).unwrap(),
            1.0,
        )
        .unwrap();
        assert_eq!(a.info().as_slice(), &[0, 1, 2, 3, 4, 5, 6, 7]);
        assert!(a.pc().is_empty() && a.frozen().is_empty());
    }

    #[test]
    fn allocation_n16_k8_hand_trace() {
        // PW order for N = 16, most reliable first:
        //   15 14 13 11 7 12 10 9 6 5 3 8 4 2 1 0
        // f = 4 * (1 - 0) = 4, cap (16 - 8) / 2 = 4.
        // Window = first 12; the smallest row weight there is 2 (index 8
        // only), so n_wmin = 1 < f: f1 = 1, f2 = floor(3/4 * 3) = 2.
        // Weight-2 pick: {8}. Weight-4 picks in order: 12, 10.
        // I = first 8 skipping {8, 12, 10}: 15 14 13 11 7 9 6 5.
        // P = everything else, F = R = {}.
        let spec = CodeSpec::new(8, 16).unwrap();
        let rel = pw_sequence(16).unwrap();
        let desc: Vec<usize> = rel.descending().collect();
        assert_eq!(
            desc,
            vec![15, 14, 13, 11, 7, 12, 10, 9, 6, 5, 3, 8, 4, 2, 1, 0]
        );
        let a = select_allocation(&spec, &rel, &brs_pattern(&spec).unwrap(), 1.0).unwrap();
        assert_eq!((a.f, a.w_min, a.f1, a.f2), (4, 2, 1, 2));
        assert_eq!(a.info().as_slice(), &[5, 6, 7, 9, 11, 13, 14, 15]);
        assert_eq!(a.pc().as_slice(), &[0, 1, 2, 3, 4, 8, 10, 12]);
        assert!(a.frozen().is_empty());
    }

    #[test]
    fn allocation_with_shortening_freezes_pattern() {
        let spec = CodeSpec::new(4, 6).unwrap();
        let p = brs_pattern(&spec).unwrap();
        let a = select_allocation(&spec, &pw_sequence(8).unwrap(), &p, 1.0).unwrap();
        assert_eq!(a.frozen().as_slice(), &[3, 7]);
        assert_eq!(a.k(), 4);
        assert!(a.info().iter().all(|i| !p.pattern.contains(i)));
    }

    #[test]
    fn ca_allocation_examples() {
        let spec = CodeSpec::new(4, 8).unwrap();
        let pw = pw_weights(8).unwrap();
        let none = RateMatchPattern::none(8);
        let a = ca_allocation(&spec, &pw, &none, 0).unwrap();
        assert_eq!(a.info().as_slice(), &[3, 5, 6, 7]);
        let spec = CodeSpec::new(8, 8).unwrap();
        let a = ca_allocation(&spec, &pw, &none, 0).unwrap();
        assert_eq!(a.info().len(), 8);
        let spec = CodeSpec::new(120, 256).unwrap();
        let a = ca_allocation(
            &spec,
            &pw_weights(256).unwrap(),
            &RateMatchPattern::none(256),
            8,
        )
        .unwrap();
        assert_eq!(a.info().len(), 128);
        assert!(a.pc().is_empty());
        let spec = CodeSpec::new(250, 256).unwrap();
        assert!(matches!(
            ca_allocation(
                &spec,
                &pw_weights(256).unwrap(),
                &RateMatchPattern::none(256),
                8
            ),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn allocation_json_shape() {
        let spec = CodeSpec::new(8, 16).unwrap();
        let a = select_allocation(
            &spec,
            &pw_sequence(16).unwrap(),
            &brs_pattern(&spec).unwrap(),
            1.0,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::to_value(&a).unwrap();
        for key in ["I", "P", "F", "w_min", "f1", "f2"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let back: Allocation = serde_json::from_value(v).unwrap();
        assert_eq!(back, a);
        let seq = serde_json::to_value(pw_sequence(8).unwrap()).unwrap();
        assert_eq!(
            seq,
            serde_json::json!({"N": 8, "Q": [0, 1, 2, 4, 3, 5, 6, 7]})
        );
        let bad = serde_json::json!({"N": 4, "I": [0, 1], "P": [1], "F": [2, 3]});
        assert!(serde_json::from_value::<Allocation>(bad).is_err());
    }
}
