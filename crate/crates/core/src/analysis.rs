//! Exhaustive code-geometry tools: coset weight spectra, minimum codeword
//! weight of a parity-check allocation, and SC error-pattern statistics.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channel::{llr_from_noise, sigma_from_snr_db};
use crate::codec::{pc_precode_into, polar_transform_in_place, sc_decode};
use crate::construction::Allocation;
use crate::error::{Error, Result};
use crate::sim::Executor;
use crate::types::log2_exact;

/// Largest enumeration, as a power of two.
pub const ENUMERATION_CAP_BITS: usize = 24;

/// Words of a packed length-`n` row.
fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// Row `i` of the `n x n` generator, packed.
fn generator_row(n: usize, i: usize) -> Vec<u64> {
    let mut row = vec![0u64; words_for(n)];
    for j in 0..n {
        if j & i == j {
            row[j / 64] |= 1 << (j % 64);
        }
    }
    row
}

fn weight(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

/// Histogram of `weight(offset + span(basis))` over all `2^basis.len()`
/// combinations, enumerated in Gray-code order and split across `exec` by
/// the top basis vectors.
fn span_histogram(offset: &[u64], basis: &[Vec<u64>], n: usize, exec: &Executor) -> Vec<u64> {
    let split = basis.len().min(6);
    let low = basis.len() - split;
    let parts = exec.map(0..1u64 << split, |prefix| {
        let mut acc = offset.to_vec();
        for (b, row) in basis[low..].iter().enumerate() {
            if prefix >> b & 1 == 1 {
                acc.iter_mut().zip(row).for_each(|(a, r)| *a ^= r);
            }
        }
        let mut hist = vec![0u64; n + 1];
        hist[weight(&acc)] += 1;
        for step in 1u64..1 << low {
            let flip = step.trailing_zeros() as usize;
            acc.iter_mut().zip(&basis[flip]).for_each(|(a, r)| *a ^= r);
            hist[weight(&acc)] += 1;
        }
        hist
    });
    parts.into_iter().fold(vec![0u64; n + 1], |mut tot, h| {
        tot.iter_mut().zip(h).for_each(|(t, x)| *t += x);
        tot
    })
}

/// Weight distribution of the coset `g_i + span(g_{i+1}, ..., g_{N-1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceSpectrum {
    #[serde(rename = "N")]
    pub n: usize,
    pub stage: usize,
    pub counts: BTreeMap<usize, u64>,
}

impl DistanceSpectrum {
    pub fn min_weight(&self) -> usize {
        *self.counts.keys().next().expect("a coset is never empty")
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn to_table(&self) -> String {
        let mut s = format!(
            "coset spectrum N={} i={}\n{:>8} {:>12}\n",
            self.n, self.stage, "weight", "count"
        );
        for (w, c) in &self.counts {
            let _ = writeln!(s, "{w:>8} {c:>12}");
        }
        s
    }
}

pub fn coset_spectrum(n: usize, i: usize) -> Result<DistanceSpectrum> {
    coset_spectrum_with(n, i, &Executor::Sequential)
}

pub fn coset_spectrum_with(n: usize, i: usize, exec: &Executor) -> Result<DistanceSpectrum> {
    log2_exact(n)?;
    if i >= n {
        return Err(Error::InvalidConfig(format!("stage {i} outside [0, {n})")));
    }
    let free = n - 1 - i;
    if free > ENUMERATION_CAP_BITS {
        return Err(Error::EnumerationTooLarge {
            bits: free,
            cap: ENUMERATION_CAP_BITS,
        });
    }
    let offset = generator_row(n, i);
    let basis: Vec<Vec<u64>> = (i + 1..n).map(|r| generator_row(n, r)).collect();
    let hist = span_histogram(&offset, &basis, n, exec);
    let counts = hist
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .collect();
    Ok(DistanceSpectrum {
        n,
        stage: i,
        counts,
    })
}

pub fn coset_min_distance(n: usize, i: usize) -> Result<usize> {
    Ok(coset_spectrum(n, i)?.min_weight())
}

/// Minimum nonzero codeword weight of the code defined by `alloc` with a
/// length-`p` parity-check register; `N + 1` when there are no information
/// bits.
pub fn min_codeword_weight(alloc: &Allocation, p: usize) -> Result<usize> {
    min_codeword_weight_with(alloc, p, &Executor::Sequential)
}

pub fn min_codeword_weight_with(alloc: &Allocation, p: usize, exec: &Executor) -> Result<usize> {
    let (n, k) = (alloc.n(), alloc.k());
    if k == 0 {
        return Ok(n + 1);
    }
    if k > ENUMERATION_CAP_BITS {
        return Err(Error::EnumerationTooLarge {
            bits: k,
            cap: ENUMERATION_CAP_BITS,
        });
    }
    // Encoding is linear, so the unit messages span the code.
    let mut basis = Vec::with_capacity(k);
    let mut msg = vec![0u8; k];
    let mut x = vec![0u8; n];
    for b in 0..k {
        msg.fill(0);
        msg[b] = 1;
        pc_precode_into(&msg, alloc, p, &mut x)?;
        polar_transform_in_place(&mut x);
        let mut row = vec![0u64; words_for(n)];
        for (j, &bit) in x.iter().enumerate() {
            row[j / 64] |= u64::from(bit) << (j % 64);
        }
        basis.push(row);
    }
    Ok(min_weight_of_span(&basis, n, exec))
}

/// Minimum nonzero weight of `span(basis)`: every nonzero word is
/// `basis[t] + span(basis[..t])` for exactly one `t`.
fn min_weight_of_span(basis: &[Vec<u64>], n: usize, exec: &Executor) -> usize {
    let mut best = n + 1;
    for top in 0..basis.len() {
        let h = span_histogram(&basis[top], &basis[..top], n, exec);
        if let Some(w) = h.iter().position(|&c| c > 0) {
            best = best.min(w);
        }
    }
    best
}

/// One observed error support and how often it occurred.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternCount {
    pub support: Vec<usize>,
    pub count: u64,
}

/// Ranked u-domain error supports from all-information SC decoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorPatternStats {
    #[serde(rename = "N")]
    pub n: usize,
    pub snr_db: f64,
    pub frames: u64,
    pub total_errors: u64,
    /// Descending by count, ties by support.
    pub patterns: Vec<PatternCount>,
}

impl ErrorPatternStats {
    /// Zero-based rank of `support`, if it was observed.
    pub fn rank_of(&self, support: &[usize]) -> Option<usize> {
        self.patterns.iter().position(|p| p.support == support)
    }

    /// Fraction of error events covered by the `top` most frequent supports.
    pub fn top_mass(&self, top: usize) -> f64 {
        if self.total_errors == 0 {
            return 0.0;
        }
        let covered: u64 = self.patterns.iter().take(top).map(|p| p.count).sum();
        covered as f64 / self.total_errors as f64
    }

    /// Most frequent support with exactly one erroneous bit.
    pub fn top_single(&self) -> Option<&PatternCount> {
        self.patterns.iter().find(|p| p.support.len() == 1)
    }

    pub fn frame_error_rate(&self) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.total_errors as f64 / self.frames as f64
        }
    }

    pub fn to_table(&self, top: usize) -> String {
        let mut s = format!(
            "error patterns N={} snr_db={} frames={} events={}\n{:>4} {:>10} {:>8}  support\n",
            self.n,
            crate::sim::format_sig6(self.snr_db),
            self.frames,
            self.total_errors,
            "rank",
            "count",
            "share"
        );
        for (r, p) in self.patterns.iter().take(top).enumerate() {
            let share = p.count as f64 / self.total_errors.max(1) as f64;
            let _ = writeln!(
                s,
                "{:>4} {:>10} {:>8.4}  {:?}",
                r + 1,
                p.count,
                share,
                p.support
            );
        }
        let _ = writeln!(s, "top-{top} mass {:.4}", self.top_mass(top));
        s
    }
}

const PATTERN_BATCH: u64 = 256;
const PATTERN_ROUND: u64 = 16;

/// Decode one batch of all-information frames; returns the number of frames
/// and the error supports seen, in frame order.
fn pattern_batch(
    n: usize,
    alloc: &Allocation,
    sigma: f64,
    seed: u64,
    frames: std::ops::Range<u64>,
) -> Result<(u64, Vec<Vec<usize>>)> {
    let mut u = vec![0u8; n];
    let mut x = vec![0u8; n];
    let mut noise = vec![0.0; n];
    let mut llr = vec![0.0; n];
    let mut events = Vec::new();
    let mut count = 0;
    for f in frames {
        let mut bits = ChaCha8Rng::seed_from_u64(seed);
        bits.set_stream(2 * f);
        for chunk in u.chunks_mut(64) {
            let w = bits.next_u64();
            for (j, b) in chunk.iter_mut().enumerate() {
                *b = (w >> j & 1) as u8;
            }
        }
        x.copy_from_slice(&u);
        polar_transform_in_place(&mut x);
        let mut nrng = ChaCha8Rng::seed_from_u64(seed);
        nrng.set_stream(2 * f + 1);
        for z in noise.iter_mut() {
            *z = StandardNormal.sample(&mut nrng);
        }
        llr_from_noise(&x, &noise, sigma, &mut llr);
        let out = sc_decode(&llr, alloc, crate::codec::DEFAULT_PC_REGISTER_LEN)?;
        let support: Vec<usize> = (0..n).filter(|&i| out.message.get(i) != u[i]).collect();
        if !support.is_empty() {
            events.push(support);
        }
        count += 1;
    }
    Ok((count, events))
}

fn full_rate(n: usize) -> Result<Allocation> {
    Allocation::from_sets(n, 0..n, [], [])
}

/// Run all-information SC decoding of length `n` at `snr_db` until
/// `min_error_events` frames are in error or `max_frames` have been decoded,
/// and rank the observed error supports.
pub fn error_pattern_stats(
    n: usize,
    snr_db: f64,
    min_error_events: u64,
    max_frames: u64,
    seed: u64,
    exec: &Executor,
) -> Result<ErrorPatternStats> {
    log2_exact(n)?;
    let alloc = full_rate(n)?;
    let sigma = sigma_from_snr_db(snr_db);
    let batches = max_frames.div_ceil(PATTERN_BATCH);
    let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
    let (mut frames, mut total) = (0u64, 0u64);
    let mut next = 0;
    'rounds: while next < batches {
        let end = (next + PATTERN_ROUND).min(batches);
        let results = exec.map(next..end, |b| {
            let first = b * PATTERN_BATCH;
            let last = (first + PATTERN_BATCH).min(max_frames);
            pattern_batch(n, &alloc, sigma, seed, first..last)
        });
        for r in results {
            let (f, events) = r?;
            frames += f;
            total += events.len() as u64;
            for e in events {
                *counts.entry(e).or_default() += 1;
            }
            if total >= min_error_events {
                break 'rounds;
            }
        }
        next = end;
    }
    let mut patterns: Vec<PatternCount> = counts
        .into_iter()
        .map(|(support, count)| PatternCount { support, count })
        .collect();
    patterns.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then_with(|| a.support.cmp(&b.support))
    });
    Ok(ErrorPatternStats {
        n,
        snr_db,
        frames,
        total_errors: total,
        patterns,
    })
}

/// SNR at which all-information SC of length `n` has frame error rate
/// `target_fer`, by bisection on a fixed `frames`-frame corpus.
pub fn calibrate_pattern_snr(
    n: usize,
    target_fer: f64,
    frames: u64,
    seed: u64,
    exec: &Executor,
) -> Result<f64> {
    if !(target_fer > 0.0 && target_fer < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "target FER {target_fer} outside (0, 1)"
        )));
    }
    let fer = |snr: f64| -> Result<f64> {
        Ok(error_pattern_stats(n, snr, u64::MAX, frames, seed, exec)?.frame_error_rate())
    };
    let (mut lo, mut hi) = (-10.0, 20.0);
    if fer(hi)? > target_fer || fer(lo)? < target_fer {
        return Err(Error::BracketNotFound(format!(
            "FER {target_fer} not crossed in [{lo}, {hi}] dB"
        )));
    }
    while hi - lo > 0.01 {
        let mid = 0.5 * (lo + hi);
        if fer(mid)? > target_fer {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::row_weight;

    fn naive_spectrum(n: usize, i: usize) -> BTreeMap<usize, u64> {
        let rows: Vec<Vec<u8>> = (0..n)
            .map(|r| (0..n).map(|j| u8::from(j & r == j)).collect())
            .collect();
        let free = n - 1 - i;
        let mut out = BTreeMap::new();
        for m in 0u64..1 << free {
            let mut c = rows[i].clone();
            for b in 0..free {
                if m >> b & 1 == 1 {
                    c.iter_mut()
                        .zip(&rows[i + 1 + b])
                        .for_each(|(x, y)| *x ^= y);
                }
            }
            *out.entry(c.iter().map(|&v| v as usize).sum()).or_default() += 1;
        }
        out
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(
            coset_spectrum(2, 1).unwrap().counts,
            BTreeMap::from([(2, 1)])
        );
        assert_eq!(
            coset_spectrum(16, 15).unwrap().counts,
            BTreeMap::from([(16, 1)])
        );
        assert_eq!(coset_min_distance(16, 5).unwrap(), 4);
        assert_eq!(coset_min_distance(8, 7).unwrap(), 8);
        assert_eq!(coset_min_distance(16, 10).unwrap(), 4);
    }

    #[test]
    fn spectrum_matches_naive_enumeration() {
        for n in [2, 4, 8, 16] {
            for i in 0..n {
                let s = coset_spectrum(n, i).unwrap();
                assert_eq!(s.counts, naive_spectrum(n, i), "N={n} i={i}");
                assert_eq!(s.total(), 1 << (n - 1 - i));
                assert_eq!(s.min_weight(), row_weight(i));
            }
        }
    }

    #[test]
    fn parallel_spectrum_agrees() {
        let exec = Executor::with_workers(3).unwrap();
        assert_eq!(
            coset_spectrum_with(32, 14, &exec).unwrap(),
            coset_spectrum(32, 14).unwrap()
        );
    }

    #[test]
    fn spectrum_cap() {
        assert!(matches!(
            coset_spectrum(64, 10),
            Err(Error::EnumerationTooLarge { .. })
        ));
        assert!(coset_spectrum(16, 16).is_err());
        assert!(coset_spectrum(12, 0).is_err());
    }

    fn alloc(n: usize, info: &[usize], pc: &[usize]) -> Allocation {
        let frozen = (0..n).filter(|i| !info.contains(i) && !pc.contains(i));
        Allocation::from_sets(n, info.iter().copied(), pc.iter().copied(), frozen).unwrap()
    }

    #[test]
    fn parity_check_raises_weight() {
        assert_eq!(min_codeword_weight(&alloc(16, &[5], &[10]), 5).unwrap(), 6);
        assert_eq!(min_codeword_weight(&alloc(16, &[5], &[]), 5).unwrap(), 4);
        assert_eq!(min_codeword_weight(&alloc(16, &[], &[]), 5).unwrap(), 17);
    }

    /// Brute force over every message, independent of the span enumeration.
    fn naive_min_weight(a: &Allocation, p: usize) -> usize {
        let (n, k) = (a.n(), a.k());
        let mut best = n + 1;
        let mut x = vec![0u8; n];
        for m in 1u64..1 << k {
            let msg: Vec<u8> = (0..k).map(|b| (m >> b & 1) as u8).collect();
            pc_precode_into(&msg, a, p, &mut x).unwrap();
            polar_transform_in_place(&mut x);
            best = best.min(x.iter().map(|&v| v as usize).sum());
        }
        best
    }

    #[test]
    fn min_weight_matches_brute_force() {
        let cases: [(usize, &[usize], &[usize]); 5] = [
            (16, &[7, 11, 13, 14, 15], &[3, 12]),
            (16, &[15], &[]),
            (16, &[6, 7], &[1, 10, 12]),
            (
                32,
                &[15, 23, 27, 29, 30, 31, 22, 26],
                &[7, 11, 13, 14, 20, 24],
            ),
            (8, &[0, 1, 2, 3, 4, 5, 6, 7], &[]),
        ];
        for (n, i, p) in cases {
            let a = alloc(n, i, p);
            assert_eq!(
                min_codeword_weight(&a, 5).unwrap(),
                naive_min_weight(&a, 5),
                "{i:?} {p:?}"
            );
        }
    }

    #[test]
    fn no_errors_at_high_snr() {
        let s = error_pattern_stats(16, 60.0, 10, 2_000, 1, &Executor::Sequential).unwrap();
        assert_eq!(s.total_errors, 0);
        assert_eq!(s.frames, 2_000);
        assert!(s.patterns.is_empty());
    }

    #[test]
    fn pattern_counts_are_consistent() {
        let s = error_pattern_stats(16, 3.0, 500, 100_000, 5, &Executor::Sequential).unwrap();
        assert!(s.total_errors >= 500);
        assert_eq!(
            s.patterns.iter().map(|p| p.count).sum::<u64>(),
            s.total_errors
        );
        assert!(s.patterns.iter().all(|p| !p.support.is_empty()));
        assert!(s.patterns.windows(2).all(|w| w[0].count >= w[1].count));
        let par = error_pattern_stats(
            16,
            3.0,
            500,
            100_000,
            5,
            &Executor::with_workers(2).unwrap(),
        )
        .unwrap();
        assert_eq!(s, par);
    }
}
