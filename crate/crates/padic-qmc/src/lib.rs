//! Open-type quasi-Monte Carlo integration with p-adically shifted Halton
//! sequences.
//!
//! Halton sequences are extensible node sets for equal-weight cubature: the
//! first N points of the infinite sequence are the rule, so increasing N
//! never discards function evaluations. This crate implements the machinery
//! to generate them, randomize them by p-adic shifts, and compute their
//! integration error in weighted Sobolev spaces exactly:
//!
//! - [`padic`]: exact base-p digit arithmetic, the Monna map and its inverse,
//!   carry addition in Z_p, and the p-adic shift of points.
//! - [`halton`]: streaming generation of (shifted) Halton sequences.
//! - [`function_system`]: the orthonormal system of p-adic characters
//!   `beta_k`, exact character sums over Halton prefixes, and a Gram-matrix
//!   orthonormality check.
//! - [`kernels`]: reproducing kernels of the weighted anchored Sobolev space,
//!   their shift-invariant coefficient sequences `r_{p,gamma}(k)`, and the
//!   Korobov-type p-adic space.
//! - [`wce`]: exact squared worst-case errors, root-mean-square errors over
//!   random shifts (Monte Carlo and exact series), and theoretical bounds.
//! - [`discrepancy`]: weighted and unweighted L2 discrepancy, closed form and
//!   quadrature, plus RMS discrepancy experiments.
//! - [`verify`]: brute-force verification suite for every closed-form
//!   identity the other modules rely on.
//!
//! ```
//! use padic_qmc::halton::{halton_block, HaltonSpec};
//! use padic_qmc::wce::wce_sq_sobolev;
//!
//! let spec = HaltonSpec::new(vec![2, 3]).unwrap();
//! let points = halton_block(&spec, 64).unwrap();
//! let e_sq = wce_sq_sobolev(&points, &[1.0, 1.0]).unwrap();
//! assert!(e_sq > 0.0 && e_sq < 0.01);
//! ```

pub mod discrepancy;
pub mod error;
pub mod fmt;
pub mod function_system;
pub mod halton;
pub mod kernels;
pub mod padic;
pub mod primes;
pub mod rng;
pub mod stats;
pub mod verify;
pub mod wce;

mod trig;

pub use error::{QmcError, Result};

// The book chapters double as doc-tests so their snippets stay in sync with
// the API (`cargo test --doc` runs them).
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/padic.md")]
    mod padic {}
    #[doc = include_str!("../../../book/src/halton.md")]
    mod halton {}
    #[doc = include_str!("../../../book/src/function-system.md")]
    mod function_system {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/worst-case-error.md")]
    mod worst_case_error {}
    #[doc = include_str!("../../../book/src/discrepancy.md")]
    mod discrepancy {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
