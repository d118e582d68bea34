//! `--config FILE` support. The file is flat `key = value` lines or a JSON
//! object whose keys are long flag names. Its entries are spliced into the
//! argument list ahead of the user's own flags, so flags win.

use std::ffi::OsString;
use std::fs;

use crate::error::CliError;

/// Number of leading tokens (after the program name) naming the command.
fn command_depth(args: &[OsString]) -> usize {
    match args.get(1).and_then(|a| a.to_str()) {
        Some("analyze") => 2,
        Some(_) => 1,
        None => 0,
    }
}

fn config_path(args: &[OsString]) -> Result<Option<String>, CliError> {
    let mut it = args.iter().filter_map(|a| a.to_str());
    while let Some(a) = it.next() {
        if a == "--" {
            break;
        }
        if a == "--config" {
            return it
                .next()
                .map(|p| Some(p.to_string()))
                .ok_or_else(|| CliError::Usage("--config needs a file".into()));
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Ok(Some(p.to_string()));
        }
    }
    Ok(None)
}

/// Parse config text into `(flag, value)` pairs; a `None` value is a bare
/// switch.
pub fn parse_config(text: &str) -> Result<Vec<(String, Option<String>)>, CliError> {
    let trimmed = text.trim_start();
    let mut pairs = Vec::new();
    if trimmed.starts_with('{') {
        let obj: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(trimmed).map_err(|e| CliError::Data(format!("config: {e}")))?;
        for (k, v) in obj {
            let value = match v {
                serde_json::Value::Bool(true) => None,
                serde_json::Value::Bool(false) | serde_json::Value::Null => continue,
                serde_json::Value::String(s) => Some(s),
                serde_json::Value::Array(items) => Some(
                    items
                        .iter()
                        .map(|x| match x {
                            serde_json::Value::String(s) => s.clone(),
                            other => other.to_string(),
                        })
                        .collect::<Vec<_>>()
                        .join(","),
                ),
                other => Some(other.to_string()),
            };
            pairs.push((flag_name(&k), value));
        }
        return Ok(pairs);
    }
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Data(format!("config line {}: expected key = value", no + 1))
        })?;
        let (k, v) = (k.trim(), v.trim());
        match v {
            "true" => pairs.push((flag_name(k), None)),
            "false" => {}
            _ => pairs.push((flag_name(k), Some(v.to_string()))),
        }
    }
    Ok(pairs)
}

fn flag_name(key: &str) -> String {
    key.trim_start_matches('-').replace('_', "-")
}

/// Expand `--config FILE` into explicit flags placed before the user's.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args)? else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::Data(format!("{path}: {e}")))?;
    let at = (1 + command_depth(&args)).min(args.len());
    let injected = parse_config(&text)?.into_iter().map(|(k, v)| match v {
        Some(v) => OsString::from(format!("--{k}={v}")),
        None => OsString::from(format!("--{k}")),
    });
    let mut out: Vec<OsString> = args[..at].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}
