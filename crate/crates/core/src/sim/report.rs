//! Result rows, CSV / JSON serialisation and resumable sweeps.

use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{BlerPoint, Executor, ExperimentConfig, Simulator};
use crate::error::{Error, Result};
use crate::types::CodeSpec;

/// Format like C's `%.6g`: six significant digits, trailing zeros removed.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Row kind, which fixes the CSV header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Bler,
    RequiredSnr,
}

const COMMON: &str = "scheme,N,M,K,L,crc_len,alpha,seed";

impl RowKind {
    pub fn header(self) -> String {
        match self {
            RowKind::Bler => format!("{COMMON},snr_db,frames,frame_errors,bler"),
            RowKind::RequiredSnr => format!("{COMMON},target_bler,required_snr_db"),
        }
    }

    /// Number of leading columns that identify a row for resumption.
    fn key_columns(self) -> usize {
        9
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlerRow {
    pub scheme: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub crc_len: usize,
    pub alpha: f64,
    pub seed: u64,
    pub snr_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bler: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequiredSnrRow {
    pub scheme: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub crc_len: usize,
    pub alpha: f64,
    pub seed: u64,
    pub target_bler: f64,
    pub required_snr_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Row {
    Bler(BlerRow),
    RequiredSnr(RequiredSnrRow),
}

fn common_fields(cfg: &ExperimentConfig) -> (String, usize, usize, usize, usize, usize, f64, u64) {
    let s = cfg.spec();
    (
        cfg.scheme().name().to_string(),
        s.n(),
        s.m(),
        s.k(),
        cfg.list_size,
        cfg.design.crc_len,
        cfg.design.alpha,
        cfg.seed,
    )
}

impl Row {
    pub fn bler(cfg: &ExperimentConfig, p: &BlerPoint) -> Self {
        let (scheme, n, m, k, l, crc_len, alpha, seed) = common_fields(cfg);
        Row::Bler(BlerRow {
            scheme,
            n,
            m,
            k,
            l,
            crc_len,
            alpha,
            seed,
            snr_db: p.snr_db,
            frames: p.frames,
            frame_errors: p.frame_errors,
            bler: p.bler,
        })
    }

    pub fn required_snr(cfg: &ExperimentConfig, target_bler: f64, snr_db: f64) -> Self {
        let (scheme, n, m, k, l, crc_len, alpha, seed) = common_fields(cfg);
        Row::RequiredSnr(RequiredSnrRow {
            scheme,
            n,
            m,
            k,
            l,
            crc_len,
            alpha,
            seed,
            target_bler,
            required_snr_db: snr_db,
        })
    }

    pub fn kind(&self) -> RowKind {
        match self {
            Row::Bler(_) => RowKind::Bler,
            Row::RequiredSnr(_) => RowKind::RequiredSnr,
        }
    }

    pub fn to_csv(&self) -> String {
        let g = format_sig6;
        match self {
            Row::Bler(r) => format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.scheme,
                r.n,
                r.m,
                r.k,
                r.l,
                r.crc_len,
                g(r.alpha),
                r.seed,
                g(r.snr_db),
                r.frames,
                r.frame_errors,
                g(r.bler)
            ),
            Row::RequiredSnr(r) => format!(
                "{},{},{},{},{},{},{},{},{},{}",
                r.scheme,
                r.n,
                r.m,
                r.k,
                r.l,
                r.crc_len,
                g(r.alpha),
                r.seed,
                g(r.target_bler),
                g(r.required_snr_db)
            ),
        }
    }

    /// JSON object with the same fields and the same float rounding as the CSV.
    pub fn to_json(&self) -> serde_json::Value {
        let header = self.kind().header();
        let csv = self.to_csv();
        let mut obj = serde_json::Map::new();
        for (name, text) in header.split(',').zip(csv.split(',')) {
            let value = if name == "scheme" {
                serde_json::Value::String(text.to_string())
            } else {
                serde_json::from_str(text).unwrap_or(serde_json::Value::String(text.to_string()))
            };
            obj.insert(name.to_string(), value);
        }
        serde_json::Value::Object(obj)
    }

    fn key(&self) -> String {
        row_key(&self.to_csv(), self.kind())
    }
}

fn row_key(line: &str, kind: RowKind) -> String {
    line.split(',')
        .take(kind.key_columns())
        .collect::<Vec<_>>()
        .join(",")
}

/// CSV results file with a JSON mirror (`<path>.json`). Rows are flushed as
/// they are produced; reopening an existing file skips rows already present.
#[derive(Debug)]
pub struct ResultsFile {
    path: PathBuf,
    kind: RowKind,
    done: HashSet<String>,
    lines: Vec<String>,
}

impl ResultsFile {
    pub fn open(path: impl AsRef<Path>, kind: RowKind) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let header = kind.header();
        let mut lines = Vec::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path).map_err(|e| io_err(&path, e))?);
            let mut it = reader.lines();
            match it.next() {
                Some(Ok(h)) if h == header => {}
                None => {}
                Some(Ok(h)) => {
                    return Err(Error::InvalidConfig(format!(
                        "{} has header {h:?}, expected {header:?}",
                        path.display()
                    )))
                }
                Some(Err(e)) => return Err(io_err(&path, e)),
            }
            for line in it {
                let line = line.map_err(|e| io_err(&path, e))?;
                // A partial trailing line from an interrupted run is dropped.
                if line.split(',').count() == header.split(',').count() {
                    lines.push(line);
                }
            }
        }
        let done = lines.iter().map(|l| row_key(l, kind)).collect();
        let file = Self {
            path,
            kind,
            done,
            lines,
        };
        file.rewrite()?;
        Ok(file)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn json_path(&self) -> PathBuf {
        json_mirror_path(&self.path)
    }

    pub fn contains(&self, row: &Row) -> bool {
        self.done.contains(&row.key())
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn append(&mut self, row: &Row) -> Result<()> {
        if row.kind() != self.kind {
            return Err(Error::InvalidConfig(
                "row kind does not match results file".into(),
            ));
        }
        let line = row.to_csv();
        let mut f = OpenOptions::new()
            .append(true)
            .open(&self.path)
            .map_err(|e| io_err(&self.path, e))?;
        writeln!(f, "{line}").map_err(|e| io_err(&self.path, e))?;
        f.flush().map_err(|e| io_err(&self.path, e))?;
        self.done.insert(row_key(&line, self.kind));
        self.lines.push(line);
        self.write_json()
    }

    fn rewrite(&self) -> Result<()> {
        let mut text = self.kind.header();
        text.push('\n');
        for l in &self.lines {
            text.push_str(l);
            text.push('\n');
        }
        fs::write(&self.path, text).map_err(|e| io_err(&self.path, e))?;
        self.write_json()
    }

    fn write_json(&self) -> Result<()> {
        let header = self.kind.header();
        let rows: Vec<serde_json::Value> = self
            .lines
            .iter()
            .map(|l| {
                let obj = header
                    .split(',')
                    .zip(l.split(','))
                    .map(|(k, v)| {
                        let value = if k == "scheme" {
                            serde_json::Value::String(v.into())
                        } else {
                            serde_json::from_str(v).unwrap_or(serde_json::Value::String(v.into()))
                        };
                        (k.to_string(), value)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let path = self.json_path();
        let text = serde_json::to_string_pretty(&rows).expect("json values serialise");
        fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))
    }
}

pub fn json_mirror_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// What a sweep iterates over.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepGrid {
    /// BLER at each SNR.
    Snr(Vec<f64>),
    /// Required SNR for each prepared configuration (see [`k_range_designs`]).
    RequiredSnr {
        configs: Vec<ExperimentConfig>,
        target_bler: f64,
        resolution_db: f64,
    },
}

/// One configuration per `K`. With `rate = Some(r)` the transmitted length
/// is `M = round(K / r)` and `N` the next power of two; otherwise `M` and
/// `N` are taken from `base`.
pub fn k_range_designs(
    base: &ExperimentConfig,
    ks: impl IntoIterator<Item = usize>,
    rate: Option<f64>,
) -> Result<Vec<ExperimentConfig>> {
    ks.into_iter()
        .map(|k| {
            let spec = match rate {
                Some(r) if r > 0.0 && r <= 1.0 => {
                    CodeSpec::new(k, ((k as f64) / r).round() as usize)?
                }
                Some(r) => return Err(Error::InvalidConfig(format!("rate {r} outside (0, 1]"))),
                None => CodeSpec::with_mother(k, base.spec().m(), base.spec().n())?,
            };
            let mut cfg = base.clone();
            cfg.design.spec = spec;
            cfg.validate()?;
            Ok(cfg)
        })
        .collect()
}

/// Run every case of `grid`. Rows already in `out` are skipped and not
/// returned; new rows are appended as soon as each finishes.
pub fn sweep(
    cfg: &ExperimentConfig,
    grid: &SweepGrid,
    exec: &Executor,
    mut out: Option<&mut ResultsFile>,
    mut on_row: impl FnMut(&Row),
) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    let mut emit = |row: Row, out: &mut Option<&mut ResultsFile>| -> Result<()> {
        if let Some(f) = out.as_deref_mut() {
            f.append(&row)?;
        }
        on_row(&row);
        rows.push(row);
        Ok(())
    };
    match grid {
        SweepGrid::Snr(snrs) => {
            if snrs.is_empty() {
                return Ok(rows);
            }
            let sim = Simulator::new(cfg.clone(), exec.clone())?;
            for &snr in snrs {
                let probe = Row::bler(cfg, &BlerPoint::new(snr, 0, 0));
                if out.as_deref().is_some_and(|f| f.contains(&probe)) {
                    continue;
                }
                let p = sim.simulate_bler(snr)?;
                emit(Row::bler(cfg, &p), &mut out)?;
            }
        }
        SweepGrid::RequiredSnr {
            configs,
            target_bler,
            resolution_db,
        } => {
            for c in configs {
                let probe = Row::required_snr(c, *target_bler, 0.0);
                if out.as_deref().is_some_and(|f| f.contains(&probe)) {
                    continue;
                }
                let r = Simulator::new(c.clone(), exec.clone())?
                    .required_snr(*target_bler, *resolution_db)?;
                emit(Row::required_snr(c, *target_bler, r.snr_db), &mut out)?;
            }
        }
    }
    Ok(rows)
}
