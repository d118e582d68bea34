use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "pcpolar",
    version,
    about = "Parity-check polar codes: construction, coding, analysis and BLER simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct a code and print it as JSON.
    Construct(ConstructArgs),
    /// Encode K-bit messages (one per line) into M-bit codewords.
    Encode(EncodeArgs),
    /// Decode M channel LLRs per line into K bits and a pass flag.
    Decode(DecodeArgs),
    /// BLER at one or more SNR points.
    Simulate(SimulateArgs),
    /// BLER over an SNR grid, or required SNR over a range of K.
    Sweep(SweepArgs),
    /// Exhaustive code-geometry tools.
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCommand,
    },
}

/// Code-defining flags shared by `construct`, `simulate` and `sweep`.
#[derive(Debug, Args, Clone)]
pub struct CodeArgs {
    /// Mother length; defaults to the smallest power of two >= M.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Transmitted length (for `sweep --rate`, derived from each K).
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Message length (for `sweep --k-range`, the first K is used only to
    /// validate the other flags).
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// PC-count scaling factor.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// CRC length for CRC-aided schemes (0, 8 or 16); defaults to 16.
    #[arg(long)]
    pub crc: Option<usize>,
    /// Rate matching; defaults to the scheme's own (brs or qup).
    #[arg(long = "rate-match")]
    pub rate_match: Option<String>,
    /// GA design SNR in dB; simulations default to the simulated SNR.
    #[arg(long = "ga-snr", allow_hyphen_values = true)]
    pub ga_snr: Option<f64>,
    /// Parity-check shift-register length.
    #[arg(long = "pc-len", default_value_t = 5)]
    pub pc_len: usize,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct ConstructArgs {
    /// pc-polar (alias pc), ca-polar-ga-qup (alias ca), ca-polar-pw-brs or polar.
    #[arg(long, default_value = "pc-polar")]
    pub scheme: String,
    #[command(flatten)]
    pub code: CodeArgs,
    /// Write the code here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct EncodeArgs {
    /// Code file written by `construct`.
    #[arg(long)]
    pub code: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Sc,
    Scl,
    CaScl,
    PcScl,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct DecodeArgs {
    #[arg(long)]
    pub code: PathBuf,
    /// List size.
    #[arg(long = "L", default_value_t = 8)]
    pub list: usize,
    /// Decoder; defaults to the one matching the code's scheme.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Hard,
    Exact,
}

/// Simulation flags shared by `simulate` and `sweep`.
#[derive(Debug, Args, Clone)]
pub struct RunArgs {
    /// One scheme or a comma-separated list.
    #[arg(long, default_value = "pc-polar")]
    pub scheme: String,
    #[command(flatten)]
    pub code: CodeArgs,
    /// List size.
    #[arg(long = "L", default_value_t = 8)]
    pub list: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Stop a point after this many frame errors...
    #[arg(long = "min-errors", default_value_t = 100)]
    pub min_errors: u64,
    /// ...or after this many frames.
    #[arg(long = "max-frames", default_value_t = 1_000_000)]
    pub max_frames: u64,
    /// Draw noise independently per scheme instead of sharing it.
    #[arg(long = "independent-noise")]
    pub independent_noise: bool,
    #[arg(long, value_enum, default_value = "hard")]
    pub metric: MetricArg,
    /// Worker threads (0 = one per core). Results do not depend on it.
    #[arg(long, env = "POLAR_WORKERS", default_value_t = 0)]
    pub workers: usize,
    /// CSV output (a JSON mirror and a manifest are written alongside).
    /// Without it, CSV goes to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// SNR points (Es/N0, dB): `a,b,c` or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub snr: String,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// BLER rows at these SNR points (`a,b,c` or `start:stop:step`).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "k_range")]
    pub snr: Option<String>,
    /// Required-SNR rows for K in `first:last[:step]` (inclusive).
    #[arg(long = "k-range")]
    pub k_range: Option<String>,
    /// With --k-range: transmitted length M = round(K / rate) instead of --M.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long = "target-bler", default_value_t = 1e-3)]
    pub target_bler: f64,
    /// Bisection stops when the bracket is this narrow (dB).
    #[arg(long, default_value_t = 0.1)]
    pub resolution: f64,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Weight spectrum of the coset g_i + span(g_{i+1}, ..., g_{N-1}).
    Coset(CosetArgs),
    /// Minimum nonzero codeword weight of a code.
    Minweight(MinweightArgs),
    /// Ranked error patterns of all-information SC decoding.
    Patterns(PatternsArgs),
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct CosetArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long = "i")]
    pub i: usize,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
    #[arg(long, env = "POLAR_WORKERS", default_value_t = 0)]
    pub workers: usize,
    /// Write JSON here (with a manifest).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct MinweightArgs {
    /// Code file written by `construct`.
    #[arg(long, conflicts_with_all = ["n", "info", "pc"])]
    pub code: Option<PathBuf>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Information positions, comma-separated.
    #[arg(long = "I")]
    pub info: Option<String>,
    /// Parity-check positions, comma-separated; everything else is frozen.
    #[arg(long = "P", default_value = "")]
    pub pc: String,
    /// Register length (defaults to the code file's, else 5).
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub json: bool,
    #[arg(long, env = "POLAR_WORKERS", default_value_t = 0)]
    pub workers: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct PatternsArgs {
    #[arg(long = "N", default_value_t = 16)]
    pub n: usize,
    /// Operating point; by default calibrated to --target-fer.
    #[arg(long, allow_hyphen_values = true)]
    pub snr: Option<f64>,
    #[arg(long = "target-fer", default_value_t = 0.3)]
    pub target_fer: f64,
    /// Error events to collect.
    #[arg(long, default_value_t = 10_000)]
    pub events: u64,
    #[arg(long = "max-frames", default_value_t = 10_000_000)]
    pub max_frames: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Patterns shown in the table.
    #[arg(long, default_value_t = 16)]
    pub top: usize,
    #[arg(long)]
    pub json: bool,
    #[arg(long, env = "POLAR_WORKERS", default_value_t = 0)]
    pub workers: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// `a,b,c` or `start:stop:step` (inclusive of `stop` up to rounding).
pub fn parse_snr_list(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains(':') {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<Result<_, _>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(format!("range {s:?} must be start:stop:step"));
        };
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(format!("range {s:?} needs step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        // Round to the step's precision so grid points print cleanly.
        return Ok((0..count)
            .map(|j| ((start + j as f64 * step) * 1e9).round() / 1e9)
            .collect());
    }
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect()
}

/// `first:last[:step]`, inclusive.
pub fn parse_k_range(s: &str) -> Result<Vec<usize>, String> {
    let parts: Vec<usize> = s
        .split(':')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let (first, last, step) = match parts[..] {
        [a, b] => (a, b, 1),
        [a, b, c] => (a, b, c),
        _ => return Err(format!("K range {s:?} must be first:last[:step]")),
    };
    if step == 0 || last < first {
        return Err(format!("K range {s:?} needs step > 0 and last >= first"));
    }
    Ok((first..=last).step_by(step).collect())
}

pub fn parse_index_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn snr_lists() {
        assert_eq!(parse_snr_list("1, 2.5,-3").unwrap(), vec![1.0, 2.5, -3.0]);
        assert_eq!(
            parse_snr_list("0:1:0.25").unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert_eq!(parse_snr_list("-1:0:0.1").unwrap().len(), 11);
        assert_eq!(parse_snr_list("-1:0:0.1").unwrap()[3], -0.7);
        assert!(parse_snr_list("").unwrap().is_empty());
        assert!(parse_snr_list("1:0:1").is_err());
        assert!(parse_snr_list("a").is_err());
    }

    #[test]
    fn k_ranges() {
        assert_eq!(parse_k_range("8:16").unwrap().len(), 9);
        assert_eq!(parse_k_range("32:336:16").unwrap().len(), 20);
        assert!(parse_k_range("5").is_err());
        assert!(parse_k_range("5:4").is_err());
    }
}
