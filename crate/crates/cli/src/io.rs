//! File formats and flag parsers shared by the subcommands.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use sparsekit_core::{Amplitude, SparseSignal};

/// Reads a vector from a JSON array, a saved signal (`{"values": [...], "k": ..}`)
/// or whitespace-separated reals.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_vector(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return Ok(serde_json::from_str(trimmed)?);
    }
    if trimmed.starts_with('{') {
        let signal: SparseSignal = serde_json::from_str(trimmed)?;
        return Ok(signal.values().to_vec());
    }
    text.split_whitespace()
        .enumerate()
        .map(|(i, tok)| {
            tok.parse::<f64>()
                .with_context(|| format!("entry {}: `{tok}` is not a number", i + 1))
        })
        .collect()
}

/// Reads a signal file. Plain vectors get `k` = number of nonzeros.
pub fn read_signal(path: &Path) -> Result<SparseSignal> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()));
    }
    Ok(SparseSignal::from_values(parse_vector(&text)?))
}

/// One real per line.
pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    let mut out = String::with_capacity(v.len() * 24);
    for x in v {
        out.push_str(&format!("{x:?}\n"));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Pretty JSON to `path`, or to stdout when `path` is `None`.
pub fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `unit`, `uniform:A:B` or `gaussian:SIGMA`.
pub fn parse_amplitude(s: &str) -> Result<Amplitude> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| -> Result<f64> {
        t.parse::<f64>().with_context(|| format!("`{t}` is not a number"))
    };
    match parts.as_slice() {
        ["unit"] => Ok(Amplitude::Unit),
        ["uniform", a, b] => Ok(Amplitude::Uniform { a: num(a)?, b: num(b)? }),
        ["gaussian", sigma] => Ok(Amplitude::Gaussian { sigma: num(sigma)? }),
        _ => bail!("amplitude `{s}`: expected unit, uniform:A:B or gaussian:SIGMA"),
    }
}

/// `3`, `1..4` (inclusive) or `1,2,5`.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    let num = |t: &str| -> Result<usize> {
        t.trim().parse::<usize>().with_context(|| format!("`{t}` is not a nonnegative integer"))
    };
    let out: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            bail!("empty range `{s}`");
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Result<_>>()?
    };
    if out.contains(&0) {
        bail!("sparsity indices start at 1");
    }
    Ok(out)
}
