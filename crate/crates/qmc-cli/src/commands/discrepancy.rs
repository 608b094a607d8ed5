//! `qmc discrepancy`: L2 discrepancy of a (possibly shifted) Halton block.
//! Columns: `method,s,N,weights,l2_sq`.

use super::{build_spec, merged};
use crate::config::{load_json, parse_gamma};
use crate::output::{Cell, Csv, Sink};
use crate::{CliError, CmdResult};
use clap::Args;
use padic_qmc::discrepancy::{l2_discrepancy, DiscrepancyMethod};
use padic_qmc::halton::halton_block;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Args, Serialize, Deserialize, Default, Clone)]
pub struct DiscrepancyArgs {
    /// JSON config file with these same fields; flags win on conflict.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Comma-separated prime bases.
    #[arg(long)]
    pub bases: Option<String>,

    /// Dimension (first s primes with --first-primes).
    #[arg(long)]
    pub s: Option<usize>,

    #[arg(long, default_value_t = false)]
    #[serde(default)]
    pub first_primes: bool,

    /// Number of points.
    #[arg(long)]
    pub n: Option<u64>,

    /// First sequence index.
    #[arg(long)]
    pub start: Option<u64>,

    /// Sampled p-adic shift as seed:replicate.
    #[arg(long)]
    pub shift: Option<String>,

    /// Weights (const:c | pow:c | list:...); omit for the unweighted
    /// (classical star) discrepancy.
    #[arg(long)]
    pub gamma: Option<String>,

    /// closed | quadrature | exact-integration (default closed).
    #[arg(long)]
    pub method: Option<String>,

    /// Cells per axis for the quadrature method (default 1024).
    #[arg(long)]
    pub grid: Option<usize>,

    /// Output CSV path (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: DiscrepancyArgs) -> CmdResult {
    let json: DiscrepancyArgs = match &args.config {
        Some(path) => load_json(path)?,
        None => DiscrepancyArgs::default(),
    };
    let bases = merged(args.bases, json.bases);
    let s = merged(args.s, json.s);
    let first_primes = args.first_primes || json.first_primes;
    let n = merged(args.n, json.n)
        .ok_or_else(|| CliError::Config("missing --n <count>".into()))?;
    let start = merged(args.start, json.start);
    let shift_key = merged(args.shift, json.shift);
    let gamma_spec = merged(args.gamma, json.gamma);
    let method_name = merged(args.method, json.method).unwrap_or_else(|| "closed".into());
    let grid = merged(args.grid, json.grid).unwrap_or(1024);
    let out = merged(args.out, json.out);

    let (spec, _) =
        build_spec(bases.as_deref(), s, first_primes, start, shift_key.as_deref(), None)?;
    let points = halton_block(&spec, n as usize)?;
    let weights = match &gamma_spec {
        None => None,
        Some(text) => Some(parse_gamma(text)?.values(spec.dim())),
    };
    let method = match method_name.as_str() {
        "closed" => DiscrepancyMethod::ClosedForm,
        "quadrature" => DiscrepancyMethod::Quadrature { grid },
        "exact-integration" => DiscrepancyMethod::ExactIntegration,
        other => {
            return Err(CliError::Config(format!(
                "unknown method {other:?} (closed | quadrature | exact-integration)"
            )))
        }
    };
    let result = l2_discrepancy(&points, weights.as_deref(), method)?;

    let method_label = match result.method {
        DiscrepancyMethod::ClosedForm => "closed".to_string(),
        DiscrepancyMethod::Quadrature { grid } => format!("quadrature({grid})"),
        DiscrepancyMethod::ExactIntegration => "exact-integration".to_string(),
    };
    let weights_label = match &result.weights {
        None => "unweighted".to_string(),
        Some(g) => g.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";"),
    };
    let mut csv = Csv::new(&["method", "s", "N", "weights", "l2_sq"]);
    csv.row(&[
        Cell::Str(method_label),
        Cell::Int(spec.dim() as u64),
        Cell::Int(n),
        Cell::Str(weights_label),
        Cell::Float(result.l2_sq),
    ]);
    Sink::from_path(out.as_deref()).write_all(&csv.into_bytes())?;
    Ok(0)
}
