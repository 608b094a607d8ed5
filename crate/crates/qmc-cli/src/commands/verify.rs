//! `qmc verify`: run the brute-force check suite. One line per check,
//! `name,status,measured,tolerance`; exit code 0 iff everything passed.

use crate::CmdResult;
use clap::Args;
use padic_qmc::verify::{run_suite, suite_passed};

#[derive(Args)]
pub struct VerifyArgs {
    /// Run only checks whose name contains this substring.
    #[arg(long)]
    pub only: Option<String>,

    /// Seed for the sampled checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(args: VerifyArgs) -> CmdResult {
    let results = run_suite(args.seed, args.only.as_deref());
    if results.is_empty() {
        eprintln!("qmc: no check matches --only {:?}", args.only.unwrap_or_default());
        return Ok(2);
    }
    for r in &results {
        println!("{}", r.line());
    }
    Ok(if suite_passed(&results) { 0 } else { 1 })
}
