use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use pcpolar::analysis::{
    calibrate_pattern_snr, coset_spectrum_with, error_pattern_stats, min_codeword_weight_with,
};
use pcpolar::codec::{DecoderMode, PathMetric, PolarCode};
use pcpolar::sim::{
    json_mirror_path, k_range_designs, sweep, ResultsFile, Row, RowKind, SweepGrid,
};
use pcpolar::{
    Allocation, BitVector, CodeDesign, CodeSpec, Executor, ExperimentConfig, Scheme, StopRule,
};
use serde::{Deserialize, Serialize};

use crate::args::*;
use crate::error::CliError;
use crate::manifest::RunManifest;

/// Calibration corpus for `analyze patterns` without an explicit SNR.
const CALIBRATION_FRAMES: u64 = 20_000;

/// A constructed code as stored by `construct` and read by `encode`,
/// `decode` and `analyze minweight`.
#[derive(Debug, Serialize, Deserialize)]
pub struct CodeFile {
    pub scheme: Scheme,
    #[serde(flatten)]
    pub code: PolarCode,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn parse_scheme(s: &str) -> Result<Scheme, CliError> {
    match s.trim() {
        "pc" => Ok(Scheme::PcPolar),
        "ca" => Ok(Scheme::CaPolarGaQup),
        other => Ok(other.parse()?),
    }
}

fn parse_schemes(s: &str) -> Result<Vec<Scheme>, CliError> {
    let list: Vec<Scheme> = s.split(',').map(parse_scheme).collect::<Result<_, _>>()?;
    if list.is_empty() {
        return Err(usage("no scheme given"));
    }
    Ok(list)
}

fn design(scheme: Scheme, code: &CodeArgs, k: usize, m: usize) -> Result<CodeDesign, CliError> {
    let spec = match code.n {
        Some(n) => CodeSpec::with_mother(k, m, n)?,
        None => CodeSpec::new(k, m)?,
    };
    let crc_len = match (scheme.uses_crc(), code.crc) {
        (true, c) => c.unwrap_or(16),
        (false, None | Some(0)) => 0,
        (false, Some(c)) => {
            return Err(usage(format!(
                "scheme {scheme} takes no CRC (got --crc {c})"
            )));
        }
    };
    let rate_match = match &code.rate_match {
        Some(r) => r.parse()?,
        None => scheme.default_rate_match(),
    };
    let d = CodeDesign {
        spec,
        scheme,
        crc_len,
        alpha: code.alpha,
        rate_match,
        pc_register_len: code.pc_len,
    };
    d.validate()?;
    Ok(d)
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("missing --{flag}")))
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Data(format!("{}: {e}", p.display()))),
        None => {
            let mut o = io::stdout().lock();
            o.write_all(text.as_bytes())?;
            o.flush()?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("values serialise") + "\n"
}

pub fn construct(a: ConstructArgs) -> Result<(), CliError> {
    let scheme = parse_scheme(&a.scheme)?;
    let d = design(
        scheme,
        &a.code,
        require(a.code.k, "K")?,
        require(a.code.m, "M")?,
    )?;
    if scheme.uses_ga() && a.code.ga_snr.is_none() {
        return Err(usage(format!("scheme {scheme} needs --ga-snr")));
    }
    let code = d.build(a.code.ga_snr)?;
    let text = to_json(&CodeFile { scheme, code });
    write_text(a.out.as_deref(), &text)?;
    if let Some(out) = &a.out {
        let config = serde_json::json!({ "design": d, "ga_snr_db": a.code.ga_snr });
        RunManifest::new("construct", config, vec![out.clone()]).write(out)?;
    }
    Ok(())
}

pub fn load_code(path: &Path) -> Result<CodeFile, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let f: CodeFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let c = f.code;
    let code = PolarCode::new(c.spec, c.allocation, c.rate_match, c.crc, c.pc_register_len)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(CodeFile {
        scheme: f.scheme,
        code,
    })
}

fn parse_bits(line: &str, no: usize, len: usize) -> Result<Vec<u8>, CliError> {
    let bits: Vec<u8> = line
        .split_whitespace()
        .map(|t| match t {
            "0" => Ok(0),
            "1" => Ok(1),
            _ => Err(CliError::Data(format!("line {no}: {t:?} is not a bit"))),
        })
        .collect::<Result<_, _>>()?;
    if bits.len() != len {
        return Err(CliError::Data(format!(
            "line {no}: expected {len} bits, found {}",
            bits.len()
        )));
    }
    Ok(bits)
}

fn parse_llrs(line: &str, no: usize, len: usize) -> Result<Vec<f64>, CliError> {
    let llrs: Vec<f64> = line
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|x| !x.is_nan())
                .ok_or_else(|| CliError::Data(format!("line {no}: {t:?} is not an LLR")))
        })
        .collect::<Result<_, _>>()?;
    if llrs.len() != len {
        return Err(CliError::Data(format!(
            "line {no}: expected {len} LLRs, found {}",
            llrs.len()
        )));
    }
    Ok(llrs)
}

fn join_bits(bits: impl Iterator<Item = u8>) -> String {
    bits.map(|b| if b == 1 { "1" } else { "0" })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Apply `f` to every non-blank input line, numbering lines from 1.
fn each_line(
    mut f: impl FnMut(&str, usize, &mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let stdin = io::stdin().lock();
    let mut out = io::BufWriter::new(io::stdout().lock());
    for (i, line) in stdin.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        f(&line, i + 1, &mut out)?;
    }
    out.flush()?;
    Ok(())
}

pub fn encode(a: EncodeArgs) -> Result<(), CliError> {
    let CodeFile { code, .. } = load_code(&a.code)?;
    let k = code.spec.k();
    each_line(|line, no, out| {
        let msg = parse_bits(line, no, k)?;
        let c = code.encode(&BitVector::from_bits(&msg))?;
        writeln!(out, "{}", join_bits(c.iter()))?;
        Ok(())
    })
}

pub fn decode(a: DecodeArgs) -> Result<(), CliError> {
    let CodeFile { scheme, code } = load_code(&a.code)?;
    let mode = match a.mode {
        None => scheme.decoder_mode(),
        Some(ModeArg::Sc) => DecoderMode::Sc,
        Some(ModeArg::Scl) => DecoderMode::Scl,
        Some(ModeArg::CaScl) => DecoderMode::CaScl,
        Some(ModeArg::PcScl) => DecoderMode::PcScl,
    };
    let cfg = code.decoder_config(mode, a.list);
    cfg.validate()?;
    let m = code.spec.m();
    each_line(|line, no, out| {
        let llr = parse_llrs(line, no, m)?;
        let r = code.decode(&llr, &cfg)?;
        let flag = if r.pass { "pass" } else { "fail" };
        writeln!(out, "{} {flag}", join_bits(r.message.iter()))?;
        Ok(())
    })
}

fn experiments(r: &RunArgs, k: usize, m: usize) -> Result<Vec<ExperimentConfig>, CliError> {
    let stop = StopRule {
        min_frame_errors: r.min_errors,
        max_frames: r.max_frames,
    };
    stop.validate()?;
    parse_schemes(&r.scheme)?
        .into_iter()
        .map(|scheme| {
            let cfg = ExperimentConfig {
                design: design(scheme, &r.code, k, m)?,
                list_size: r.list,
                metric: match r.metric {
                    MetricArg::Hard => PathMetric::HardPenalty,
                    MetricArg::Exact => PathMetric::Exact,
                },
                seed: r.seed,
                stop,
                ga_design_snr_db: r.code.ga_snr,
                shared_noise: !r.independent_noise,
            };
            cfg.validate()?;
            Ok(cfg)
        })
        .collect()
}

fn summary(row: &Row) -> String {
    match row {
        Row::Bler(b) => format!(
            "{} N={} M={} K={} L={} snr={} dB frames={} errors={} bler={}",
            b.scheme,
            b.n,
            b.m,
            b.k,
            b.l,
            pcpolar::sim::format_sig6(b.snr_db),
            b.frames,
            b.frame_errors,
            pcpolar::sim::format_sig6(b.bler)
        ),
        Row::RequiredSnr(r) => format!(
            "{} N={} M={} K={} L={} target={} required_snr={} dB",
            r.scheme,
            r.n,
            r.m,
            r.k,
            r.l,
            pcpolar::sim::format_sig6(r.target_bler),
            pcpolar::sim::format_sig6(r.required_snr_db)
        ),
    }
}

/// Run `(config, grid)` jobs into `out` (resumable) or standard output.
fn run_jobs(
    command: &str,
    jobs: Vec<(ExperimentConfig, SweepGrid)>,
    kind: RowKind,
    manifest_config: serde_json::Value,
    workers: usize,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let exec = Executor::with_workers(workers)?;
    match out {
        Some(path) => {
            let manifest = RunManifest::new(
                command,
                manifest_config,
                vec![path.clone(), json_mirror_path(path)],
            );
            manifest.check_resume(path)?;
            let mut file = ResultsFile::open(path, kind)?;
            manifest.write(path)?;
            for (cfg, grid) in &jobs {
                sweep(cfg, grid, &exec, Some(&mut file), |row| {
                    println!("{}", summary(row))
                })?;
            }
        }
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{}", kind.header())?;
            for (cfg, grid) in &jobs {
                let mut err = None;
                sweep(cfg, grid, &exec, None, |row| {
                    if let Err(e) =
                        writeln!(stdout, "{}", row.to_csv()).and_then(|_| stdout.flush())
                    {
                        err.get_or_insert(e);
                    }
                })?;
                if let Some(e) = err {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(())
}

fn snr_grid(s: &str) -> Result<Vec<f64>, CliError> {
    parse_snr_list(s).map_err(|e| usage(format!("--snr: {e}")))
}

pub fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let r = &a.run;
    let exps = experiments(r, require(r.code.k, "K")?, require(r.code.m, "M")?)?;
    let snrs = snr_grid(&a.snr)?;
    let config = serde_json::json!({ "experiments": exps, "snr_db": snrs });
    let jobs = exps
        .into_iter()
        .map(|c| (c, SweepGrid::Snr(snrs.clone())))
        .collect();
    run_jobs(
        "simulate",
        jobs,
        RowKind::Bler,
        config,
        r.workers,
        r.out.as_ref(),
    )
}

pub fn sweep_cmd(a: SweepArgs) -> Result<(), CliError> {
    let r = &a.run;
    match (&a.snr, &a.k_range) {
        (Some(snr), None) => simulate(SimulateArgs {
            run: a.run.clone(),
            snr: snr.clone(),
        }),
        (None, Some(range)) => {
            let bler_ok = a.target_bler > 0.0 && a.target_bler < 1.0;
            if !bler_ok || a.resolution.is_nan() || a.resolution <= 0.0 {
                return Err(usage(
                    "--target-bler must lie in (0, 1) and --resolution be positive",
                ));
            }
            let ks = parse_k_range(range).map_err(|e| usage(format!("--k-range: {e}")))?;
            let k0 = ks[0];
            let m0 = match (a.rate, r.code.m) {
                (Some(rate), _) if rate > 0.0 && rate <= 1.0 => (k0 as f64 / rate).round() as usize,
                (Some(rate), _) => return Err(usage(format!("--rate {rate} outside (0, 1]"))),
                (None, m) => require(m, "M")?,
            };
            let bases = experiments(r, k0, m0)?;
            let mut jobs = Vec::new();
            let mut all = Vec::new();
            for base in &bases {
                let configs = k_range_designs(base, ks.iter().copied(), a.rate)?;
                all.extend(configs.iter().cloned());
                jobs.push((
                    base.clone(),
                    SweepGrid::RequiredSnr {
                        configs,
                        target_bler: a.target_bler,
                        resolution_db: a.resolution,
                    },
                ));
            }
            let config = serde_json::json!({
                "experiments": all,
                "target_bler": a.target_bler,
                "resolution_db": a.resolution,
            });
            run_jobs(
                "sweep",
                jobs,
                RowKind::RequiredSnr,
                config,
                r.workers,
                r.out.as_ref(),
            )
        }
        _ => Err(usage("sweep needs exactly one of --snr or --k-range")),
    }
}

fn emit_analysis<T: Serialize>(
    command: &str,
    config: serde_json::Value,
    value: &T,
    table: String,
    json: bool,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    match out {
        Some(path) => {
            write_text(Some(path), &to_json(value))?;
            RunManifest::new(command, config, vec![path.clone()]).write(path)?;
            write_text(None, &table)
        }
        None if json => write_text(None, &to_json(value)),
        None => write_text(None, &table),
    }
}

pub fn analyze(cmd: AnalyzeCommand) -> Result<(), CliError> {
    match cmd {
        AnalyzeCommand::Coset(a) => {
            let exec = Executor::with_workers(a.workers)?;
            let s = coset_spectrum_with(a.n, a.i, &exec)?;
            let table = format!("{}min distance {}\n", s.to_table(), s.min_weight());
            let config = serde_json::json!({ "N": a.n, "i": a.i });
            emit_analysis("analyze coset", config, &s, table, a.json, a.out.as_ref())
        }
        AnalyzeCommand::Minweight(a) => {
            let exec = Executor::with_workers(a.workers)?;
            let (alloc, p) = match &a.code {
                Some(path) => {
                    let f = load_code(path)?;
                    let p = a.p.unwrap_or(f.code.pc_register_len);
                    (f.code.allocation, p)
                }
                None => {
                    let n = require(a.n, "N")?;
                    let info = parse_index_list(a.info.as_deref().unwrap_or(""))
                        .map_err(|e| usage(format!("--I: {e}")))?;
                    let pc = parse_index_list(&a.pc).map_err(|e| usage(format!("--P: {e}")))?;
                    let frozen: Vec<usize> = (0..n)
                        .filter(|i| !info.contains(i) && !pc.contains(i))
                        .collect();
                    let alloc = Allocation::from_sets(n, info, pc, frozen)?;
                    (alloc, a.p.unwrap_or(5))
                }
            };
            let w = min_codeword_weight_with(&alloc, p, &exec)?;
            let value = serde_json::json!({
                "N": alloc.n(),
                "I": alloc.info(),
                "P": alloc.pc(),
                "p": p,
                "min_weight": w,
            });
            let table = format!("min weight {w}\n");
            emit_analysis(
                "analyze minweight",
                value.clone(),
                &value,
                table,
                a.json,
                a.out.as_ref(),
            )
        }
        AnalyzeCommand::Patterns(a) => {
            let exec = Executor::with_workers(a.workers)?;
            let snr = match a.snr {
                Some(s) => s,
                None => {
                    calibrate_pattern_snr(a.n, a.target_fer, CALIBRATION_FRAMES, a.seed, &exec)?
                }
            };
            let stats = error_pattern_stats(a.n, snr, a.events, a.max_frames, a.seed, &exec)?;
            let table = stats.to_table(a.top);
            let config = serde_json::json!({
                "N": a.n,
                "snr_db": snr,
                "events": a.events,
                "max_frames": a.max_frames,
                "seed": a.seed,
            });
            emit_analysis(
                "analyze patterns",
                config,
                &stats,
                table,
                a.json,
                a.out.as_ref(),
            )
        }
    }
}
