pub mod convergence;
pub mod discrepancy;
pub mod error;
pub mod gen;
pub mod verify;

use crate::config::{self, parse_shift_key, resolve_bases};
use crate::CliError;
use padic_qmc::halton::HaltonSpec;
use padic_qmc::padic::{sample_shift, Shift};

/// Digits per sampled shift coordinate (capped per base to the exact range).
pub const SHIFT_DIGITS: usize = padic_qmc::wce::SHIFT_PRECISION;

/// Builds the sequence spec shared by several commands.
pub fn build_spec(
    bases: Option<&str>,
    s: Option<usize>,
    first_primes: bool,
    start: Option<u64>,
    shift: Option<&str>,
    precision: Option<usize>,
) -> Result<(HaltonSpec, Option<Shift>), CliError> {
    let bases = resolve_bases(bases, s, first_primes)?;
    let mut spec = HaltonSpec::new(bases.clone())?.with_start(start.unwrap_or(0));
    let shift = match shift {
        None => None,
        Some(key) => {
            let (seed, replicate) = parse_shift_key(key)?;
            let shift = sample_shift(&bases, precision.unwrap_or(SHIFT_DIGITS), seed, replicate)?;
            spec = spec.with_shift(shift.clone())?;
            Some(shift)
        }
    };
    Ok((spec, shift))
}

/// Applies "flags win over JSON" to an optional pair.
pub fn merged<T>(flag: Option<T>, json: Option<T>) -> Option<T> {
    config::prefer(flag, json)
}
