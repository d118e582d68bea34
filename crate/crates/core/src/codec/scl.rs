//! Successive-cancellation list decoding.
//!
//! All paths are processed together, depth first over the code tree. Each
//! tree layer keeps one LLR row and two partial-sum rows (left/right child)
//! per path. Paths are only re-indexed at information leaves; a node that
//! returns from a child receives the child's `new path -> old path` map and
//! gathers its own buffered rows through it, so no per-path state is copied
//! when paths fork.
//!
//! With the hard-penalty metric a subtree without information leaves is not
//! descended. Its bits are fixed per path (frozen zeros and register
//! predictions), and the leaf penalties add up to the correlation
//! discrepancy of the resulting sub-codeword against the subtree's input
//! LLRs, which is charged directly.

use std::cmp::Ordering;

use crate::codec::decoder::{DecodeResult, DecoderConfig, DecoderMode, ListEntry, PathMetric};
use crate::codec::precode::PcRegister;
use crate::codec::sc::{f_minsum, g_combine, sc_decode};
use crate::codec::transform::polar_transform_in_place;
use crate::construction::{Allocation, BitRole};
use crate::error::{Error, Result};
use crate::types::BitVector;

#[derive(Debug, Clone, Copy)]
struct Candidate {
    pm: f64,
    parent: u16,
    bit: u8,
    /// 1 when `bit` disagrees with the hard decision. Breaks metric ties
    /// when an increment is too small to change `pm`.
    against: u8,
}

/// Reusable list decoder bound to one allocation.
#[derive(Debug, Clone)]
pub struct ListDecoder {
    cfg: DecoderConfig,
    roles: Vec<BitRole>,
    /// `info_before[i]` = number of information leaves before `i`.
    info_before: Vec<usize>,
    skip_fixed: bool,
    info_len: usize,
    log2n: usize,
    list: usize,
    /// `alpha[lam]` holds `list` rows of `2^lam` LLRs; the top layer holds
    /// the single shared channel row.
    alpha: Vec<Vec<f64>>,
    beta: Vec<[Vec<u8>; 2]>,
    perm: Vec<[Vec<u16>; 2]>,
    npaths: usize,
    pm: Vec<f64>,
    reg: Vec<PcRegister>,
    next_leaf: usize,
    hist_parent: Vec<u16>,
    hist_bit: Vec<u8>,
    info_seen: usize,
    cands: Vec<Candidate>,
    scratch_pm: Vec<f64>,
    scratch_reg: Vec<PcRegister>,
}

impl ListDecoder {
    pub fn new(alloc: &Allocation, cfg: &DecoderConfig) -> Result<Self> {
        cfg.validate()?;
        if alloc.k() < cfg.crc_len() {
            return Err(Error::InvalidConfig(format!(
                "allocation carries {} bits, fewer than the {}-bit CRC",
                alloc.k(),
                cfg.crc_len()
            )));
        }
        let n = alloc.n();
        let log2n = n.trailing_zeros() as usize;
        let list = if cfg.mode == DecoderMode::Sc {
            1
        } else {
            cfg.list_size
        };
        let alpha = (0..=log2n)
            .map(|lam| vec![0.0; if lam == log2n { n } else { list << lam }])
            .collect();
        let beta = (0..=log2n)
            .map(|lam| [vec![0u8; list << lam], vec![0u8; list << lam]])
            .collect();
        let perm = (0..=log2n)
            .map(|_| [vec![0u16; list], vec![0u16; list]])
            .collect();
        let reg = PcRegister::new(cfg.pc_register_len)?;
        let mut info_before = vec![0; n + 1];
        for (i, r) in alloc.roles().iter().enumerate() {
            info_before[i + 1] = info_before[i] + usize::from(*r == BitRole::Info);
        }
        Ok(Self {
            cfg: cfg.clone(),
            roles: alloc.roles().to_vec(),
            info_before,
            skip_fixed: cfg.metric == PathMetric::HardPenalty,
            info_len: alloc.k(),
            log2n,
            list,
            alpha,
            beta,
            perm,
            npaths: 1,
            pm: vec![0.0; list],
            reg: vec![reg; list],
            next_leaf: 0,
            hist_parent: vec![0; alloc.k() * list],
            hist_bit: vec![0; alloc.k() * list],
            info_seen: 0,
            cands: Vec::with_capacity(2 * list),
            scratch_pm: vec![0.0; list],
            scratch_reg: vec![reg; list],
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    /// Decode one frame of mother-length channel LLRs.
    pub fn decode(&mut self, llr: &[f64]) -> Result<DecodeResult> {
        let n = 1usize << self.log2n;
        if llr.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: llr.len(),
            });
        }
        self.alpha[self.log2n].copy_from_slice(llr);
        self.npaths = 1;
        self.pm[0] = 0.0;
        self.reg[0] = PcRegister::new(self.cfg.pc_register_len)?;
        self.next_leaf = 0;
        self.info_seen = 0;
        self.node(self.log2n, 0);
        Ok(self.select())
    }

    fn node(&mut self, lam: usize, side: usize) {
        if lam == 0 {
            self.leaf(side);
            return;
        }
        let span = 1usize << lam;
        if self.skip_fixed
            && self.info_before[self.next_leaf + span] == self.info_before[self.next_leaf]
        {
            self.fixed_subtree(lam, side);
            return;
        }
        let half = 1usize << (lam - 1);
        let top = lam == self.log2n;
        let row = |l: usize| if top { 0 } else { l * 2 * half };

        // Left child: check-node update.
        {
            let (lo, hi) = self.alpha.split_at_mut(lam);
            let (src, dst) = (&hi[0], &mut lo[lam - 1]);
            for (l, d) in dst.chunks_exact_mut(half).take(self.npaths).enumerate() {
                let (a, b) = src[row(l)..row(l) + 2 * half].split_at(half);
                for ((d, &a), &b) in d.iter_mut().zip(a).zip(b) {
                    *d = f_minsum(a, b);
                }
            }
        }
        self.node(lam - 1, 0);

        // Right child: variable-node update through the left child's path map.
        {
            let (lo, hi) = self.alpha.split_at_mut(lam);
            let (src, dst) = (&hi[0], &mut lo[lam - 1]);
            let left_beta = self.beta[lam - 1][0].chunks_exact(half);
            let map = &self.perm[lam - 1][0][..self.npaths];
            for ((d, u), &p) in dst.chunks_exact_mut(half).zip(left_beta).zip(map) {
                let p = p as usize;
                let (a, b) = src[row(p)..row(p) + 2 * half].split_at(half);
                for (((d, &a), &b), &u) in d.iter_mut().zip(a).zip(b).zip(u) {
                    *d = g_combine(a, b, u);
                }
            }
        }
        self.node(lam - 1, 1);

        // Combine partial sums and compose the path maps.
        let (lo, hi) = self.beta.split_at_mut(lam);
        let child = &lo[lam - 1];
        let out = &mut hi[0][side];
        let (plo, phi) = self.perm.split_at_mut(lam);
        let (map_left, map_right) = (&plo[lam - 1][0], &plo[lam - 1][1]);
        let map_out = &mut phi[0][side];
        let rows = out
            .chunks_exact_mut(2 * half)
            .zip(child[1].chunks_exact(half))
            .zip(&map_right[..self.npaths])
            .zip(map_out.iter_mut());
        for (((o, right), &p2), m) in rows {
            let p2 = p2 as usize;
            let left = &child[0][p2 * half..(p2 + 1) * half];
            let (o_lo, o_hi) = o.split_at_mut(half);
            for (((ol, oh), &l), &r) in o_lo.iter_mut().zip(o_hi).zip(left).zip(right) {
                *ol = l ^ r;
                *oh = r;
            }
            *m = map_left[p2];
        }
    }

    fn fixed_subtree(&mut self, lam: usize, side: usize) {
        let span = 1usize << lam;
        let top = lam == self.log2n;
        let first = self.next_leaf;
        let roles = &self.roles[first..first + span];
        for l in 0..self.npaths {
            let bits = &mut self.beta[lam][side][l * span..(l + 1) * span];
            let reg = &mut self.reg[l];
            for (b, role) in bits.iter_mut().zip(roles) {
                reg.rotate();
                *b = if *role == BitRole::Parity {
                    reg.front()
                } else {
                    0
                };
            }
            polar_transform_in_place(bits);
            let at = if top { 0 } else { l * span };
            let penalty: f64 = self.alpha[lam][at..at + span]
                .iter()
                .zip(bits.iter())
                .map(|(&a, &c)| if (a < 0.0) != (c == 1) { a.abs() } else { 0.0 })
                .sum();
            self.pm[l] += penalty;
            self.perm[lam][side][l] = l as u16;
        }
        self.next_leaf += span;
    }

    fn leaf(&mut self, side: usize) {
        let i = self.next_leaf;
        self.next_leaf += 1;
        let metric = self.cfg.metric;
        let top = self.log2n == 0;
        let llr_of = |alpha: &[Vec<f64>], l: usize| if top { alpha[0][0] } else { alpha[0][l] };

        for r in &mut self.reg[..self.npaths] {
            r.rotate();
        }
        match self.roles[i] {
            BitRole::Frozen | BitRole::Parity => {
                let parity = self.roles[i] == BitRole::Parity;
                for l in 0..self.npaths {
                    let bit = if parity { self.reg[l].front() } else { 0 };
                    self.pm[l] = metric.update(self.pm[l], llr_of(&self.alpha, l), bit);
                    self.beta[0][side][l] = bit;
                    self.perm[0][side][l] = l as u16;
                }
            }
            BitRole::Info => {
                self.cands.clear();
                for l in 0..self.npaths {
                    let llr = llr_of(&self.alpha, l);
                    let hard = u8::from(llr < 0.0);
                    for bit in [0u8, 1] {
                        self.cands.push(Candidate {
                            pm: metric.update(self.pm[l], llr, bit),
                            parent: l as u16,
                            bit,
                            against: bit ^ hard,
                        });
                    }
                }
                if self.cands.len() > self.list {
                    self.cands.sort_unstable_by(cmp_candidates);
                    self.cands.truncate(self.list);
                }
                let base = self.info_seen * self.list;
                for (l, c) in self.cands.iter().enumerate() {
                    let mut reg = self.reg[c.parent as usize];
                    reg.absorb(c.bit);
                    self.scratch_reg[l] = reg;
                    self.scratch_pm[l] = c.pm;
                    self.beta[0][side][l] = c.bit;
                    self.perm[0][side][l] = c.parent;
                    self.hist_parent[base + l] = c.parent;
                    self.hist_bit[base + l] = c.bit;
                }
                self.npaths = self.cands.len();
                self.pm[..self.npaths].copy_from_slice(&self.scratch_pm[..self.npaths]);
                self.reg[..self.npaths].copy_from_slice(&self.scratch_reg[..self.npaths]);
                self.info_seen += 1;
            }
        }
    }

    fn trace_back(&self, mut path: usize) -> Vec<u8> {
        let mut bits = vec![0u8; self.info_len];
        for t in (0..self.info_len).rev() {
            let at = t * self.list + path;
            bits[t] = self.hist_bit[at];
            path = self.hist_parent[at] as usize;
        }
        bits
    }

    fn select(&self) -> DecodeResult {
        let mut order: Vec<usize> = (0..self.npaths).collect();
        order.sort_by(|&a, &b| self.pm[a].total_cmp(&self.pm[b]).then(a.cmp(&b)));
        let crc_len = self.cfg.crc_len();
        let keep = self.info_len - crc_len;
        let entries: Vec<(usize, Vec<u8>, bool)> = order
            .iter()
            .map(|&l| {
                let bits = self.trace_back(l);
                let pass = self.cfg.crc.is_none_or(|c| c.check_bits(&bits));
                (l, bits, pass)
            })
            .collect();
        let use_crc = self.cfg.mode == DecoderMode::CaScl && self.cfg.crc.is_some();
        let chosen = if use_crc {
            entries.iter().find(|e| e.2).unwrap_or(&entries[0])
        } else {
            &entries[0]
        };
        let pass = if use_crc || self.cfg.mode == DecoderMode::Sc {
            chosen.2
        } else {
            true
        };
        let list_dump = self.cfg.dump_list.then(|| {
            entries
                .iter()
                .map(|(l, bits, pass)| ListEntry {
                    message: BitVector::from_bits(&bits[..keep]),
                    path_metric: self.pm[*l],
                    pass: *pass,
                })
                .collect()
        });
        DecodeResult {
            message: BitVector::from_bits(&chosen.1[..keep]),
            selected_path_metric: self.pm[chosen.0],
            pass,
            list_dump,
        }
    }
}

fn cmp_candidates(a: &Candidate, b: &Candidate) -> Ordering {
    a.pm.total_cmp(&b.pm)
        .then(a.parent.cmp(&b.parent))
        .then(a.against.cmp(&b.against))
}

/// Decode with the configured mode. `Sc` runs the plain successive
/// cancellation decoder; the list modes run [`ListDecoder`].
pub fn scl_decode(llr: &[f64], alloc: &Allocation, cfg: &DecoderConfig) -> Result<DecodeResult> {
    if cfg.mode == DecoderMode::Sc && cfg.metric == PathMetric::HardPenalty && !cfg.dump_list {
        cfg.validate()?;
        let mut r = sc_decode(llr, alloc, cfg.pc_register_len)?;
        if let Some(crc) = cfg.crc {
            let bits = r.message.to_bits();
            r.pass = crc.check_bits(&bits);
            r.message = BitVector::from_bits(&bits[..bits.len() - crc.degree()]);
        }
        return Ok(r);
    }
    ListDecoder::new(alloc, cfg)?.decode(llr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::crc::CrcSpec;
    use crate::codec::precode::pc_precode_into;
    use crate::codec::transform::polar_transform_in_place;
    use crate::construction::{
        ca_allocation, pw_sequence, pw_weights, select_allocation, RateMatchPattern,
    };
    use crate::types::CodeSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn pc_alloc(k: usize, n: usize) -> Allocation {
        let spec = CodeSpec::new(k, n).unwrap();
        select_allocation(
            &spec,
            &pw_sequence(n).unwrap(),
            &RateMatchPattern::none(n),
            1.0,
        )
        .unwrap()
    }

    fn noisy_frame(alloc: &Allocation, rng: &mut ChaCha8Rng, sigma: f64) -> (Vec<u8>, Vec<f64>) {
        let msg: Vec<u8> = (0..alloc.k()).map(|_| rng.random_range(0..2)).collect();
        let mut u = vec![0u8; alloc.n()];
        pc_precode_into(&msg, alloc, 5, &mut u).unwrap();
        polar_transform_in_place(&mut u);
        let llr = u
            .iter()
            .map(|&c| {
                let z: f64 = rng.sample(StandardNormal);
                2.0 * ((1.0 - 2.0 * c as f64) + sigma * z) / (sigma * sigma)
            })
            .collect();
        (msg, llr)
    }

    #[test]
    fn noiseless_recovery_all_modes() {
        let alloc = pc_alloc(20, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for mode in [DecoderMode::Sc, DecoderMode::Scl, DecoderMode::PcScl] {
            for _ in 0..20 {
                let (msg, llr) = noisy_frame(&alloc, &mut rng, 1e-3);
                let r = scl_decode(&llr, &alloc, &DecoderConfig::new(mode, 4)).unwrap();
                assert_eq!(r.message.to_bits(), msg);
                assert!(r.pass);
            }
        }
    }

    #[test]
    fn list_of_one_matches_sc() {
        let alloc = pc_alloc(32, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut dec = ListDecoder::new(&alloc, &DecoderConfig::new(DecoderMode::PcScl, 1)).unwrap();
        for _ in 0..500 {
            let (_, llr) = noisy_frame(&alloc, &mut rng, 0.9);
            let sc = sc_decode(&llr, &alloc, 5).unwrap();
            let l1 = dec.decode(&llr).unwrap();
            assert_eq!(sc.message, l1.message);
            let scale = sc.selected_path_metric.abs().max(1.0);
            assert!((sc.selected_path_metric - l1.selected_path_metric).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn crc_aided_selection_prefers_passing_path() {
        let spec = CodeSpec::new(16, 64).unwrap();
        let alloc = ca_allocation(
            &spec,
            &pw_weights(64).unwrap(),
            &RateMatchPattern::none(64),
            8,
        )
        .unwrap();
        let cfg = DecoderConfig::new(DecoderMode::CaScl, 8).with_crc(Some(CrcSpec::CRC8));
        let mut dec = ListDecoder::new(
            &alloc,
            &DecoderConfig {
                dump_list: true,
                ..cfg
            },
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let msg: Vec<u8> = (0..16).map(|_| rng.random_range(0..2)).collect();
            let mut with_crc = msg.clone();
            with_crc.extend(CrcSpec::CRC8.remainder(&msg));
            let mut u = vec![0u8; 64];
            pc_precode_into(&with_crc, &alloc, 5, &mut u).unwrap();
            polar_transform_in_place(&mut u);
            let llr: Vec<f64> = u
                .iter()
                .map(|&c| {
                    2.0 * ((1.0 - 2.0 * c as f64) + 0.8 * rng.sample::<f64, _>(StandardNormal))
                        / 0.64
                })
                .collect();
            let r = dec.decode(&llr).unwrap();
            let dump = r.list_dump.as_ref().unwrap();
            assert_eq!(r.message.len(), 16);
            match dump.iter().find(|e| e.pass) {
                Some(first) => {
                    assert!(r.pass);
                    assert_eq!(first.message, r.message);
                }
                None => {
                    assert!(!r.pass);
                    assert_eq!(dump[0].message, r.message);
                }
            }
            assert!(dump
                .windows(2)
                .all(|w| w[0].path_metric <= w[1].path_metric));
        }
    }

    #[test]
    fn metric_never_decreases_along_list() {
        let alloc = pc_alloc(8, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut dec = ListDecoder::new(&alloc, &DecoderConfig::new(DecoderMode::PcScl, 8)).unwrap();
        for _ in 0..100 {
            let (_, llr) = noisy_frame(&alloc, &mut rng, 1.0);
            let r = dec.decode(&llr).unwrap();
            assert!(r.selected_path_metric >= 0.0);
        }
    }

    #[test]
    fn single_leaf_code() {
        let alloc = Allocation::from_sets(1, [0], [], []).unwrap();
        let mut dec = ListDecoder::new(&alloc, &DecoderConfig::new(DecoderMode::Scl, 4)).unwrap();
        assert_eq!(dec.decode(&[-2.0]).unwrap().message.to_bits(), vec![1]);
        assert_eq!(dec.decode(&[3.0]).unwrap().message.to_bits(), vec![0]);
    }
}
