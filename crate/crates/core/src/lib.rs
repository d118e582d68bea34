//! Parity-check polar codes.
//!
//! Construction of polar codes with distributed parity-check bits (PW
//! reliability, bit-reversed shortening, weight-driven PC placement),
//! CRC-aided baselines (GA reliability, quasi-uniform puncturing), SC / SCL
//! decoding with CRC or parity-check assistance, a reproducible Monte Carlo
//! BLER engine and exhaustive code-geometry tools.
//!
//! ```
//! use pcpolar::{CodeSpec, Scheme, ExperimentConfig, StopRule, simulate_bler};
//!
//! let spec = CodeSpec::new(32, 64).unwrap();
//! let cfg = ExperimentConfig::new(Scheme::PcPolar, spec, 4, 0, 1)
//!     .with_stop(StopRule::fixed(256));
//! let point = simulate_bler(&cfg, 60.0).unwrap();
//! assert_eq!(point.frame_errors, 0);
//! ```
//!
//! The `parallel` feature (on by default) runs simulation batches on a rayon
//! pool; without it every [`Executor`] is sequential. Results are identical
//! either way.

pub mod analysis;
pub mod channel;
pub mod codec;
pub mod construction;
pub mod error;
pub mod sim;
pub mod types;

pub use codec::{DecoderConfig, DecoderMode, PathMetric, PolarCode};
pub use construction::{Allocation, BitRole, RateMatchPattern, ReliabilitySequence};
pub use error::{Error, Result};
pub use sim::{
    required_snr, simulate_bler, sweep, BlerPoint, CodeDesign, Executor, ExperimentConfig,
    RateMatchKind, Scheme, Simulator, StopRule,
};
pub use types::{BitVector, CodeSpec, IndexSet};
