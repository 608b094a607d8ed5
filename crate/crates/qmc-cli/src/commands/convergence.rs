//! `qmc convergence`: RMS error or RMS L2-discrepancy over a geometric N
//! grid, with the `N * rms / (log N)^(s/2)` diagnostic ratio column and a
//! final `slope,<value>,r2,<value>` line from the log-log fit.

use super::{build_spec, merged};
use crate::config::{load_json, parse_gamma, parse_n_grid};
use crate::output::{Cell, Csv, Sink};
use crate::{CliError, CmdResult};
use clap::Args;
use padic_qmc::discrepancy::rms_l2_experiment;
use padic_qmc::fmt::sig17;
use padic_qmc::stats::fit_loglog;
use padic_qmc::wce::{rms_wce_monte_carlo, rms_wce_series};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Args, Serialize, Deserialize, Default, Clone)]
pub struct ConvergenceArgs {
    /// JSON config file with these same fields; flags win on conflict.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Quantity: l2 (RMS unweighted L2 discrepancy, default) or wce
    /// (RMS worst-case error in the weighted Sobolev space).
    #[arg(long)]
    pub kind: Option<String>,

    /// Comma-separated prime bases.
    #[arg(long)]
    pub bases: Option<String>,

    /// Dimension (first s primes with --first-primes).
    #[arg(long)]
    pub s: Option<usize>,

    #[arg(long, default_value_t = false)]
    #[serde(default)]
    pub first_primes: bool,

    /// Weights for kind=wce (default const:1).
    #[arg(long)]
    pub gamma: Option<String>,

    /// N grid: comma list or pow2:lo:hi. At least 4 points.
    #[arg(long)]
    pub n: Option<String>,

    /// Shift replicates per grid point (default 64).
    #[arg(long)]
    pub m: Option<usize>,

    /// Seed for the replicate shifts.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output CSV path (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: ConvergenceArgs) -> CmdResult {
    let json: ConvergenceArgs = match &args.config {
        Some(path) => load_json(path)?,
        None => ConvergenceArgs::default(),
    };
    let kind = merged(args.kind, json.kind).unwrap_or_else(|| "l2".into());
    let bases = merged(args.bases, json.bases);
    let s = merged(args.s, json.s);
    let first_primes = args.first_primes || json.first_primes;
    let gamma_spec =
        parse_gamma(&merged(args.gamma, json.gamma).unwrap_or_else(|| "const:1".into()))?;
    let n_grid = parse_n_grid(
        &merged(args.n, json.n).ok_or_else(|| CliError::Config("missing --n <grid>".into()))?,
    )?;
    let replicates = merged(args.m, json.m).unwrap_or(64);
    let seed = merged(args.seed, json.seed).unwrap_or(0);
    let out = merged(args.out, json.out);

    if n_grid.len() < 4 {
        return Err(CliError::Config(format!(
            "refusing to fit a slope through {} grid points; give at least 4",
            n_grid.len()
        )));
    }
    let (spec, _) = build_spec(bases.as_deref(), s, first_primes, None, None, None)?;
    let dim = spec.dim() as f64;

    let mut csv;
    let fit = match kind.as_str() {
        "l2" => {
            let experiment = rms_l2_experiment(&spec, &n_grid, replicates, seed)?;
            csv = Csv::new(&[
                "N",
                "mean_l2_sq",
                "stderr",
                "rms",
                "ratio",
                "min_l2_sq",
                "min_replicate",
            ]);
            for r in &experiment.records {
                csv.row(&[
                    Cell::Int(r.n),
                    Cell::Float(r.mean_l2_sq),
                    Cell::Float(r.std_error),
                    Cell::Float(r.rms),
                    Cell::Float(r.ratio),
                    Cell::Float(r.min_l2_sq),
                    Cell::Int(r.min_replicate),
                ]);
            }
            experiment.fit
        }
        "wce" => {
            let gamma = gamma_spec.values(spec.dim());
            csv = Csv::new(&[
                "N",
                "e_sq_mean",
                "e_sq_stderr",
                "rms",
                "ratio",
                "series_value",
                "series_tail",
            ]);
            let mut rms_values = Vec::with_capacity(n_grid.len());
            for &n in &n_grid {
                let mc = rms_wce_monte_carlo(&spec, &gamma, n, replicates, seed)?;
                let series = rms_wce_series(&spec, &gamma, n, None)?;
                let rms = mc.mean_e_sq.max(0.0).sqrt();
                let ratio = n as f64 * rms / (n as f64).ln().powf(dim / 2.0);
                csv.row(&[
                    Cell::Int(n),
                    Cell::Float(mc.mean_e_sq),
                    Cell::Float(mc.std_error),
                    Cell::Float(rms),
                    Cell::Float(ratio),
                    Cell::Float(series.partial_sum),
                    Cell::Float(series.tail_bound),
                ]);
                rms_values.push(rms);
            }
            let ns: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
            fit_loglog(&ns, &rms_values)
        }
        other => {
            return Err(CliError::Config(format!("unknown kind {other:?} (l2 | wce)")));
        }
    };
    let fit = fit.ok_or_else(|| {
        CliError::Numerical("slope fit failed (degenerate or nonpositive data)".into())
    })?;
    csv.line(&format!("slope,{},r2,{}", sig17(fit.slope), sig17(fit.r_squared)));
    Sink::from_path(out.as_deref()).write_all(&csv.into_bytes())?;
    Ok(0)
}
