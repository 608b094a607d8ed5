//! Shared option parsing: bases, weight sequences, N grids, shift keys, and
//! JSON config merging (command-line flags win on conflict).

use padic_qmc::kernels::GammaSeq;
use padic_qmc::primes::{first_primes, validate_bases};
use std::path::Path;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub type Result<T> = std::result::Result<T, ConfigError>;

pub fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()))
}

/// Loads a JSON config file into a command's option struct.
pub fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| ConfigError(format!("invalid config {}: {e}", path.display())))
}

/// Resolves the base vector from an explicit list or a "first s primes"
/// request.
pub fn resolve_bases(
    bases: Option<&str>,
    s: Option<usize>,
    use_first_primes: bool,
) -> Result<Vec<u32>> {
    let resolved = match (bases, s) {
        (Some(list), None) => parse_u32_list(list)?,
        (None, Some(0)) => return err("dimension must be >= 1"),
        (None, Some(s)) => {
            let _ = use_first_primes; // --s alone implies the first s primes
            first_primes(s)
        }
        (Some(_), Some(_)) => return err("give either --bases or --s, not both"),
        (None, None) => return err("missing bases: pass --bases 2,3 or --s <dim> [--first-primes]"),
    };
    validate_bases(&resolved).map_err(|e| ConfigError(e.to_string()))?;
    Ok(resolved)
}

pub fn parse_u32_list(text: &str) -> Result<Vec<u32>> {
    text.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|e| ConfigError(format!("bad integer {t:?}: {e}"))))
        .collect()
}

pub fn parse_u64_list(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|e| ConfigError(format!("bad integer {t:?}: {e}"))))
        .collect()
}

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| ConfigError(format!("bad number {t:?}: {e}"))))
        .collect()
}

/// Weight sequence specs: `const:c`, `pow:c` (gamma_j = j^-c with c > 0),
/// `list:a,b,...`, or a bare number (constant).
pub fn parse_gamma(text: &str) -> Result<GammaSeq> {
    if let Some(rest) = text.strip_prefix("const:") {
        let c: f64 = rest.trim().parse().map_err(|e| ConfigError(format!("bad constant: {e}")))?;
        return Ok(GammaSeq::Constant(c));
    }
    if let Some(rest) = text.strip_prefix("pow:") {
        let c: f64 = rest.trim().parse().map_err(|e| ConfigError(format!("bad exponent: {e}")))?;
        if !(c > 0.0) {
            return err(format!("power-law exponent must be positive, got {c}"));
        }
        return Ok(GammaSeq::PowerLaw(c));
    }
    if let Some(rest) = text.strip_prefix("list:") {
        return Ok(GammaSeq::Explicit(parse_f64_list(rest)?));
    }
    match text.trim().parse::<f64>() {
        Ok(c) => Ok(GammaSeq::Constant(c)),
        Err(_) => err(format!("cannot parse weight spec {text:?} (use const:, pow:, or list:)")),
    }
}

/// `seed:replicate` key of a sampled shift.
pub fn parse_shift_key(text: &str) -> Result<(u64, u64)> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| ConfigError(format!("shift key {text:?} is not seed:replicate")))?;
    Ok((
        a.trim().parse().map_err(|e| ConfigError(format!("bad shift seed: {e}")))?,
        b.trim().parse().map_err(|e| ConfigError(format!("bad shift replicate: {e}")))?,
    ))
}

/// N grids: an explicit comma list, or `pow2:lo:hi` for 2^lo .. 2^hi.
pub fn parse_n_grid(text: &str) -> Result<Vec<u64>> {
    if let Some(rest) = text.strip_prefix("pow2:") {
        let (lo, hi) = rest
            .split_once(':')
            .ok_or_else(|| ConfigError(format!("bad pow2 range {rest:?} (use pow2:lo:hi)")))?;
        let lo: u32 = lo.trim().parse().map_err(|e| ConfigError(format!("bad exponent: {e}")))?;
        let hi: u32 = hi.trim().parse().map_err(|e| ConfigError(format!("bad exponent: {e}")))?;
        if lo > hi || hi >= 63 {
            return err(format!("bad pow2 range {lo}:{hi}"));
        }
        return Ok((lo..=hi).map(|e| 1u64 << e).collect());
    }
    parse_u64_list(text)
}

/// CLI flags win over JSON config values.
pub fn prefer<T>(flag: Option<T>, json: Option<T>) -> Option<T> {
    flag.or(json)
}
