//! `qmc error`: error reports over an N list. Columns:
//! `space,s,N,M,e_sq_mean,e_sq_stderr,series_value,series_tail,theory_bound,seed`
//! with absent quantities left empty.
//!
//! With `--m <replicates>` the e_sq columns hold the Monte Carlo mean and
//! standard error over random shifts; with `--exact` they hold the exact
//! squared error of the (possibly shifted) prefix and M stays empty. Exact
//! mode is refused above N = 2^15 (quadratic cost); use the series columns
//! there.

use super::{build_spec, merged};
use crate::config::{load_json, parse_f64_list, parse_gamma, parse_u32_list};
use crate::output::{Cell, Csv, Sink};
use crate::{CliError, CmdResult};
use clap::Args;
use padic_qmc::halton::halton_block;
use padic_qmc::wce::{
    rms_wce_monte_carlo, rms_wce_series, theory_bound_sobolev, wce_sq_korobov, wce_sq_sobolev,
};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Exact-mode refusal threshold (pairwise kernel sums are O(N^2)).
const MAX_EXACT_N: u64 = 1 << 15;

#[derive(Args, Serialize, Deserialize, Default, Clone)]
pub struct ErrorArgs {
    /// JSON config file with these same fields; flags win on conflict.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Function space: sobolev (anchored, default) or korobov.
    #[arg(long)]
    pub space: Option<String>,

    /// Comma-separated prime bases.
    #[arg(long)]
    pub bases: Option<String>,

    /// Dimension (first s primes with --first-primes).
    #[arg(long)]
    pub s: Option<usize>,

    #[arg(long, default_value_t = false)]
    #[serde(default)]
    pub first_primes: bool,

    /// Weights: const:c | pow:c | list:a,b,... (default const:1).
    #[arg(long)]
    pub gamma: Option<String>,

    /// Korobov exponents: one value for all coordinates or list:a,b,...
    #[arg(long)]
    pub alpha: Option<String>,

    /// Comma-separated N values.
    #[arg(long)]
    pub n: Option<String>,

    /// First sequence index.
    #[arg(long)]
    pub start: Option<u64>,

    /// Fixed sampled shift seed:replicate (exact mode only).
    #[arg(long)]
    pub shift: Option<String>,

    /// Monte Carlo replicates over random shifts (sobolev space).
    #[arg(long)]
    pub m: Option<usize>,

    /// Compute the exact squared error of the prefix (N <= 2^15).
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    pub exact: bool,

    /// Truncation exponents g_1,...,g_s overriding the default.
    #[arg(long)]
    pub g: Option<String>,

    /// Seed for the Monte Carlo shifts.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output CSV path (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: ErrorArgs) -> CmdResult {
    let json: ErrorArgs = match &args.config {
        Some(path) => load_json(path)?,
        None => ErrorArgs::default(),
    };
    let space = merged(args.space, json.space).unwrap_or_else(|| "sobolev".into());
    let bases = merged(args.bases, json.bases);
    let s = merged(args.s, json.s);
    let first_primes = args.first_primes || json.first_primes;
    let gamma_spec = parse_gamma(&merged(args.gamma, json.gamma).unwrap_or_else(|| "const:1".into()))?;
    let alpha_spec = merged(args.alpha, json.alpha);
    let n_list = merged(args.n, json.n)
        .ok_or_else(|| CliError::Config("missing --n <list>".into()))?;
    let n_list = crate::config::parse_u64_list(&n_list)?;
    let start = merged(args.start, json.start);
    let shift_key = merged(args.shift, json.shift);
    let replicates = merged(args.m, json.m).unwrap_or(0);
    let exact = args.exact || json.exact;
    let g_override = match merged(args.g, json.g) {
        Some(text) => Some(parse_u32_list(&text)?),
        None => None,
    };
    let seed = merged(args.seed, json.seed).unwrap_or(0);
    let out = merged(args.out, json.out);

    if n_list.is_empty() || n_list.contains(&0) {
        return Err(CliError::Config("need a nonempty --n list of positive counts".into()));
    }
    if exact && replicates > 0 {
        return Err(CliError::Config("--exact and --m are mutually exclusive".into()));
    }
    if exact {
        if let Some(&n) = n_list.iter().find(|&&n| n > MAX_EXACT_N) {
            return Err(CliError::Config(format!(
                "exact mode refused for N = {n} > 2^15; drop --exact and read the series columns"
            )));
        }
    }
    let (spec, _) =
        build_spec(bases.as_deref(), s, first_primes, start, shift_key.as_deref(), None)?;
    let dim = spec.dim();
    let gamma = gamma_spec.values(dim);

    let korobov = match space.as_str() {
        "sobolev" => None,
        "korobov" => {
            let alpha = match alpha_spec.as_deref() {
                None => vec![2.0; dim],
                Some(text) => match text.strip_prefix("list:") {
                    Some(rest) => parse_f64_list(rest)?,
                    None => vec![text
                        .trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::Config(format!("bad alpha: {e}")))?; dim],
                },
            };
            if alpha.len() != dim {
                return Err(CliError::Config(format!(
                    "alpha list has {} entries for dimension {dim}",
                    alpha.len()
                )));
            }
            Some(alpha)
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown space {other:?} (use sobolev or korobov)"
            )))
        }
    };
    if korobov.is_some() && (exact || replicates > 0 || shift_key.is_some()) {
        return Err(CliError::Config(
            "the korobov space supports series and bounds only (unshifted sequence)".into(),
        ));
    }

    let header = [
        "space", "s", "N", "M", "e_sq_mean", "e_sq_stderr", "series_value", "series_tail",
        "theory_bound", "seed",
    ];
    let mut csv = Csv::new(&header);
    for &n in &n_list {
        let (mut e_mean, mut e_se, mut m_col, mut seed_col) = (None, None, None, None);
        let (series_value, series_tail, theory_bound, space_label);
        match &korobov {
            None => {
                let series = rms_wce_series(&spec, &gamma, n, g_override.as_deref())?;
                series_value = Some(series.partial_sum);
                series_tail = Some(series.tail_bound);
                theory_bound = if n >= 2 {
                    Some(theory_bound_sobolev(spec.bases(), &gamma, n)?)
                } else {
                    None
                };
                space_label = "sobolev".to_string();
                if replicates > 0 {
                    let unshifted = spec.clone().without_shift();
                    let mc = rms_wce_monte_carlo(&unshifted, &gamma, n, replicates, seed)?;
                    e_mean = Some(mc.mean_e_sq);
                    e_se = Some(mc.std_error);
                    m_col = Some(replicates as u64);
                    seed_col = Some(seed);
                } else if exact {
                    let points = halton_block(&spec, n as usize)?;
                    e_mean = Some(wce_sq_sobolev(&points, &gamma)?);
                }
            }
            Some(alpha) => {
                let report = wce_sq_korobov(&spec, alpha, &gamma, n, g_override.as_deref())?;
                series_value = Some(report.partial_sum);
                series_tail = Some(report.tail_bound);
                theory_bound = Some(report.theory_bound);
                space_label = format!(
                    "korobov(alpha={})",
                    alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(";")
                );
            }
        }
        csv.row(&[
            Cell::Str(space_label),
            Cell::Int(dim as u64),
            Cell::Int(n),
            Cell::opt_int(m_col),
            Cell::opt_float(e_mean),
            Cell::opt_float(e_se),
            Cell::opt_float(series_value),
            Cell::opt_float(series_tail),
            Cell::opt_float(theory_bound),
            Cell::opt_int(seed_col),
        ]);
    }
    Sink::from_path(out.as_deref()).write_all(&csv.into_bytes())?;
    Ok(0)
}
