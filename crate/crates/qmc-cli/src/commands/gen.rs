//! `qmc gen`: write a block of (optionally shifted) Halton points as CSV
//! with header `n,x1,...,xs`. A sampled shift is recorded in a JSON sidecar
//! next to the output file.

use super::{build_spec, merged};
use crate::config::load_json;
use crate::output::{Cell, Csv, Sink};
use crate::{CliError, CmdResult};
use clap::Args;
use padic_qmc::halton::HaltonStream;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Args, Serialize, Deserialize, Default, Clone)]
pub struct GenArgs {
    /// JSON config file with these same fields; flags win on conflict.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Comma-separated prime bases, e.g. 2,3,5.
    #[arg(long)]
    pub bases: Option<String>,

    /// Dimension; combined with --first-primes picks the first s primes.
    #[arg(long)]
    pub s: Option<usize>,

    /// Use the first s primes as bases.
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    pub first_primes: bool,

    /// Number of points.
    #[arg(long)]
    pub n: Option<u64>,

    /// First sequence index (default 0).
    #[arg(long)]
    pub start: Option<u64>,

    /// Sampled p-adic shift as seed:replicate.
    #[arg(long)]
    pub shift: Option<String>,

    /// Digits per shift coordinate (default 64, capped per base).
    #[arg(long)]
    pub precision: Option<usize>,

    /// Output CSV path (stdout if omitted). Required with --shift so the
    /// sidecar has somewhere to live.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ShiftSidecar<'a> {
    seed: u64,
    replicate: u64,
    bases: Vec<u32>,
    precisions: Vec<usize>,
    digits: Vec<&'a [u32]>,
}

pub fn run(args: GenArgs) -> CmdResult {
    let json: GenArgs = match &args.config {
        Some(path) => load_json(path)?,
        None => GenArgs::default(),
    };
    let bases = merged(args.bases, json.bases);
    let s = merged(args.s, json.s);
    let first_primes = args.first_primes || json.first_primes;
    let n = merged(args.n, json.n)
        .ok_or_else(|| CliError::Config("missing --n <count>".into()))?;
    let start = merged(args.start, json.start);
    let shift_key = merged(args.shift, json.shift);
    let precision = merged(args.precision, json.precision);
    let out = merged(args.out, json.out);

    if n == 0 {
        return Err(CliError::Config("need --n >= 1".into()));
    }
    if shift_key.is_some() && out.is_none() {
        return Err(CliError::Config(
            "--shift needs --out so the shift sidecar can be written".into(),
        ));
    }
    let (spec, shift) =
        build_spec(bases.as_deref(), s, first_primes, start, shift_key.as_deref(), precision)?;

    let mut header: Vec<String> = vec!["n".into()];
    header.extend((1..=spec.dim()).map(|j| format!("x{j}")));
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    let mut stream = HaltonStream::new(&spec);
    let mut coords = vec![0.0f64; spec.dim()];
    for _ in 0..n {
        let index = stream.next_into(&mut coords);
        let mut cells = vec![Cell::Int(index)];
        cells.extend(coords.iter().map(|&x| Cell::Float(x)));
        csv.row(&cells);
    }
    Sink::from_path(out.as_deref()).write_all(&csv.into_bytes())?;

    if let (Some(shift), Some(out)) = (&shift, &out) {
        let (seed, replicate) = match shift.provenance() {
            padic_qmc::padic::ShiftProvenance::Sampled { seed, replicate } => (*seed, *replicate),
            _ => unreachable!("gen only samples shifts"),
        };
        let sidecar = ShiftSidecar {
            seed,
            replicate,
            bases: shift.bases(),
            precisions: shift.sigma().iter().map(|z| z.precision()).collect(),
            digits: shift.sigma().iter().map(|z| z.digits()).collect(),
        };
        let mut path = out.clone();
        path.set_extension("shift.json");
        let text = serde_json::to_string_pretty(&sidecar)
            .map_err(|e| CliError::Io(format!("sidecar encoding failed: {e}")))?;
        std::fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(0)
}
