//! Monte Carlo block-error-rate simulation.
//!
//! Every frame draws its message and its noise from two ChaCha8 streams
//! keyed by `(seed, frame index)`. Frames are grouped into fixed batches and
//! the stopping rule is evaluated on batch boundaries in index order, so a
//! result depends only on the configuration, never on how many workers ran
//! it. Two schemes simulated with the same seed and the same `M` see the
//! same noise on every frame.

mod exec;
mod report;
mod scheme;

pub use exec::Executor;
pub use report::{
    format_sig6, json_mirror_path, k_range_designs, sweep, BlerRow, RequiredSnrRow, ResultsFile,
    Row, RowKind, SweepGrid,
};
pub use scheme::{rate_match_pattern, CodeDesign, RateMatchKind, Scheme};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::{derate_match_into, llr_from_noise, sigma_from_snr_db};
use crate::codec::{DecoderConfig, ListDecoder, PathMetric, PolarCode, DEFAULT_PC_REGISTER_LEN};
use crate::error::{Error, Result};
use crate::types::CodeSpec;

/// Frames per work item.
pub const FRAME_BATCH: u64 = 64;
/// Work items dispatched per round before the stopping rule is checked.
const BATCHES_PER_ROUND: u64 = 16;

/// Stop at `min_frame_errors` errors or `max_frames` frames, whichever is
/// first (checked on batch boundaries).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_frame_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_frame_errors: 100,
            max_frames: 1_000_000,
        }
    }
}

impl StopRule {
    /// Run exactly `frames` frames.
    pub fn fixed(frames: u64) -> Self {
        Self {
            min_frame_errors: frames,
            max_frames: frames,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_frame_errors == 0 || self.max_frames < self.min_frame_errors {
            return Err(Error::InvalidConfig(format!(
                "stop rule needs 1 <= min_frame_errors ({}) <= max_frames ({})",
                self.min_frame_errors, self.max_frames
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub design: CodeDesign,
    pub list_size: usize,
    #[serde(default)]
    pub metric: PathMetric,
    pub seed: u64,
    pub stop: StopRule,
    /// Fixed GA design SNR; `None` designs at each evaluated SNR.
    #[serde(default)]
    pub ga_design_snr_db: Option<f64>,
    /// Share noise realisations across schemes with the same seed.
    pub shared_noise: bool,
}

impl ExperimentConfig {
    /// Defaults: the scheme's own rate matching, alpha = 1, p = 5, shared
    /// noise, 100 errors / 10^6 frames.
    pub fn new(
        scheme: Scheme,
        spec: CodeSpec,
        list_size: usize,
        crc_len: usize,
        seed: u64,
    ) -> Self {
        Self {
            design: CodeDesign {
                spec,
                scheme,
                crc_len,
                alpha: 1.0,
                rate_match: scheme.default_rate_match(),
                pc_register_len: DEFAULT_PC_REGISTER_LEN,
            },
            list_size,
            metric: PathMetric::HardPenalty,
            seed,
            stop: StopRule::default(),
            ga_design_snr_db: None,
            shared_noise: true,
        }
    }

    pub fn with_stop(mut self, stop: StopRule) -> Self {
        self.stop = stop;
        self
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.design.spec
    }

    pub fn scheme(&self) -> Scheme {
        self.design.scheme
    }

    pub fn validate(&self) -> Result<()> {
        self.design.validate()?;
        self.stop.validate()?;
        self.decoder_config(None).validate()
    }

    pub fn decoder_config(&self, code: Option<&PolarCode>) -> DecoderConfig {
        let mut cfg = match code {
            Some(c) => c.decoder_config(self.design.scheme.decoder_mode(), self.list_size),
            None => DecoderConfig::new(self.design.scheme.decoder_mode(), self.list_size),
        };
        cfg.metric = self.metric;
        cfg.pc_register_len = self.design.pc_register_len;
        cfg
    }

    fn stream_seed(&self) -> u64 {
        if self.shared_noise {
            self.seed
        } else {
            // Distinct schemes get unrelated streams.
            let tag = self.design.scheme as u64 + 1;
            self.seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        }
    }
}

/// One simulated operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlerPoint {
    pub snr_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bler: f64,
}

impl BlerPoint {
    pub fn new(snr_db: f64, frames: u64, frame_errors: u64) -> Self {
        Self {
            snr_db,
            frames,
            frame_errors,
            bler: if frames == 0 {
                0.0
            } else {
                frame_errors as f64 / frames as f64
            },
        }
    }
}

/// Result of a required-SNR search, with every probe it ran.
#[derive(Debug, Clone, PartialEq)]
pub struct RequiredSnr {
    pub snr_db: f64,
    pub probes: Vec<BlerPoint>,
}

/// SNR scan used to bracket a target BLER.
pub const SCAN_START_DB: f64 = -2.0;
pub const SCAN_STOP_DB: f64 = 10.0;
/// Lowest SNR tried when the target is already met at the scan start.
pub const SCAN_FLOOR_DB: f64 = -30.0;
/// Probe frame cap in units of `min_frame_errors / target_bler`.
pub const PROBE_FRAME_FACTOR: f64 = 4.0;

/// Simulation engine for one experiment configuration.
#[derive(Debug, Clone)]
pub struct Simulator {
    cfg: ExperimentConfig,
    exec: Executor,
    fixed_code: Option<PolarCode>,
}

impl Simulator {
    pub fn new(cfg: ExperimentConfig, exec: Executor) -> Result<Self> {
        cfg.validate()?;
        let fixed_code = match (cfg.design.scheme.uses_ga(), cfg.ga_design_snr_db) {
            (true, None) => None,
            (_, snr) => Some(cfg.design.build(snr)?),
        };
        Ok(Self {
            cfg,
            exec,
            fixed_code,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    /// The code simulated at `snr_db`.
    pub fn code_at(&self, snr_db: f64) -> Result<PolarCode> {
        match &self.fixed_code {
            Some(c) => Ok(c.clone()),
            None => self.cfg.design.build(Some(snr_db)),
        }
    }

    pub fn simulate_bler(&self, snr_db: f64) -> Result<BlerPoint> {
        self.simulate_with_stop(snr_db, self.cfg.stop)
    }

    fn simulate_with_stop(&self, snr_db: f64, stop: StopRule) -> Result<BlerPoint> {
        let code = self.code_at(snr_db)?;
        let dec_cfg = self.cfg.decoder_config(Some(&code));
        // Fail early on configuration errors rather than inside workers.
        ListDecoder::new(&code.allocation, &dec_cfg)?;
        let sigma = sigma_from_snr_db(snr_db);
        let stream_seed = self.cfg.stream_seed();

        let total_batches = stop.max_frames.div_ceil(FRAME_BATCH);
        let (mut frames, mut errors) = (0u64, 0u64);
        let mut next = 0u64;
        'rounds: while next < total_batches {
            let end = (next + BATCHES_PER_ROUND).min(total_batches);
            let results = self.exec.map(next..end, |b| {
                let first = b * FRAME_BATCH;
                let last = (first + FRAME_BATCH).min(stop.max_frames);
                run_batch(&code, &dec_cfg, sigma, stream_seed, first..last)
            });
            for r in results {
                let (f, e) = r?;
                frames += f;
                errors += e;
                if errors >= stop.min_frame_errors {
                    break 'rounds;
                }
            }
            next = end;
        }
        Ok(BlerPoint::new(snr_db, frames, errors))
    }

    /// Bracket the target by a 1 dB scan, then bisect until the bracket is no
    /// wider than `resolution_db`; returns the bracket midpoint.
    pub fn required_snr(&self, target_bler: f64, resolution_db: f64) -> Result<RequiredSnr> {
        if !(target_bler > 0.0 && target_bler < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "target BLER {target_bler} outside (0, 1)"
            )));
        }
        if resolution_db.is_nan() || resolution_db <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "resolution {resolution_db} dB must be positive"
            )));
        }
        let cap = (PROBE_FRAME_FACTOR * self.cfg.stop.min_frame_errors as f64 / target_bler).ceil();
        let stop = StopRule {
            min_frame_errors: self.cfg.stop.min_frame_errors,
            max_frames: self
                .cfg
                .stop
                .max_frames
                .min(cap as u64)
                .max(self.cfg.stop.min_frame_errors),
        };
        let mut probes = Vec::new();
        let mut probe = |snr: f64| -> Result<bool> {
            let p = self.simulate_with_stop(snr, stop)?;
            probes.push(p);
            Ok(p.bler <= target_bler)
        };

        let (mut lo, mut hi);
        if probe(SCAN_START_DB)? {
            hi = SCAN_START_DB;
            lo = hi - 1.0;
            while probe(lo)? {
                hi = lo;
                lo -= 1.0;
                if lo < SCAN_FLOOR_DB {
                    return Err(Error::BracketNotFound(format!(
                        "BLER <= {target_bler} already at {SCAN_FLOOR_DB} dB"
                    )));
                }
            }
        } else {
            lo = SCAN_START_DB;
            hi = lo + 1.0;
            while !probe(hi)? {
                lo = hi;
                hi += 1.0;
                if hi > SCAN_STOP_DB {
                    return Err(Error::BracketNotFound(format!(
                        "BLER > {target_bler} up to {SCAN_STOP_DB} dB"
                    )));
                }
            }
        }
        while hi - lo > resolution_db {
            let mid = 0.5 * (lo + hi);
            if probe(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(RequiredSnr {
            snr_db: 0.5 * (lo + hi),
            probes,
        })
    }
}

fn frame_rng(stream_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed);
    rng.set_stream(stream);
    rng
}

fn run_batch(
    code: &PolarCode,
    dec_cfg: &DecoderConfig,
    sigma: f64,
    stream_seed: u64,
    frames: std::ops::Range<u64>,
) -> Result<(u64, u64)> {
    let spec = code.spec;
    let mut decoder = ListDecoder::new(&code.allocation, dec_cfg)?;
    let removed = code.rate_match.pattern.mask(spec.n());
    let mut msg = vec![0u8; spec.k()];
    let mut mother = vec![0u8; spec.n()];
    let mut sent = vec![0u8; spec.m()];
    let mut noise = vec![0.0; spec.m()];
    let mut llr_m = vec![0.0; spec.m()];
    let mut llr_n = vec![0.0; spec.n()];
    let (mut count, mut errors) = (0u64, 0u64);
    for frame in frames {
        let mut bits = frame_rng(stream_seed, 2 * frame);
        for chunk in msg.chunks_mut(64) {
            let word = bits.next_u64();
            for (j, b) in chunk.iter_mut().enumerate() {
                *b = ((word >> j) & 1) as u8;
            }
        }
        code.encode_mother_into(&msg, &mut mother)?;
        for (dst, &c) in sent.iter_mut().zip(
            mother
                .iter()
                .zip(&removed)
                .filter(|(_, &r)| !r)
                .map(|(c, _)| c),
        ) {
            *dst = c;
        }
        let mut noise_rng = frame_rng(stream_seed, 2 * frame + 1);
        for z in noise.iter_mut() {
            *z = noise_rng.sample(StandardNormal);
        }
        llr_from_noise(&sent, &noise, sigma, &mut llr_m);
        derate_match_into(&llr_m, &code.rate_match, &mut llr_n)?;
        let out = decoder.decode(&llr_n)?;
        count += 1;
        if out.message.iter().zip(&msg).any(|(a, &b)| a != b) {
            errors += 1;
        }
    }
    Ok((count, errors))
}

/// Simulate one operating point with a sequential executor.
pub fn simulate_bler(cfg: &ExperimentConfig, snr_db: f64) -> Result<BlerPoint> {
    Simulator::new(cfg.clone(), Executor::Sequential)?.simulate_bler(snr_db)
}

/// Required SNR for `target_bler` with a sequential executor.
pub fn required_snr(cfg: &ExperimentConfig, target_bler: f64, resolution_db: f64) -> Result<f64> {
    Ok(Simulator::new(cfg.clone(), Executor::Sequential)?
        .required_snr(target_bler, resolution_db)?
        .snr_db)
}
