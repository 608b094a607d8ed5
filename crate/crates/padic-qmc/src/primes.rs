//! Prime predicates and small prime tables.
//!
//! Bases in this crate are small primes (a few hundred at most), so
//! deterministic trial division is enough.

use crate::error::{QmcError, Result};

/// Deterministic primality test by trial division.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn validate_prime(p: u32) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(QmcError::InvalidBase(p))
    }
}

/// Checks that `bases` is non-empty and consists of pairwise distinct primes.
pub fn validate_bases(bases: &[u32]) -> Result<()> {
    if bases.is_empty() {
        return Err(QmcError::InvalidBases(bases.to_vec()));
    }
    for (i, &p) in bases.iter().enumerate() {
        if !is_prime(p) {
            return Err(QmcError::InvalidBase(p));
        }
        if bases[..i].contains(&p) {
            return Err(QmcError::InvalidBases(bases.to_vec()));
        }
    }
    Ok(())
}

/// All primes `<= n` by sieve of Eratosthenes.
pub fn primes_up_to(n: usize) -> Vec<u32> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u32);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    out
}

/// The first `s` primes (2, 3, 5, ...).
pub fn first_primes(s: usize) -> Vec<u32> {
    if s == 0 {
        return Vec::new();
    }
    // p_s < s (ln s + ln ln s) for s >= 6; pad generously for small s.
    let mut bound = 16usize.max((s as f64 * ((s as f64).ln() + (s as f64).ln().ln().max(1.0)) * 1.2) as usize);
    loop {
        let ps = primes_up_to(bound);
        if ps.len() >= s {
            return ps[..s].to_vec();
        }
        bound *= 2;
    }
}
