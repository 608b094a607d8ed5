//! The p-adic function system: the orthonormal basis `beta_k` of
//! `L2([0,1]^s)` that matches the structure of Halton sequences.
//!
//! For a prime p the characters of Z_p are `chi_k(z) = e^(2 pi i phi_p(k) z)`
//! with k a nonnegative integer, and `beta_k(x) = chi_k(phi_p^+(x))`. Because
//! `phi_p(k)` has denominator `p^a` (a = digit length of k), `beta_k(x)`
//! depends only on the first a base-p digits of x, and its angle is the exact
//! rational `phi_p(k) * phi_p^+(x) mod 1`. All angle arithmetic here is done
//! on integer numerators, with one complex exponential at the end.
//!
//! On Halton points the characters collapse to pure geometric terms:
//! `beta_k(x_n) = e(n * theta)` with `theta = sum_j phi_{p_j}(k_j)`, which is
//! what makes exact character sums over Halton prefixes cheap.

use crate::error::{QmcError, Result};
use crate::padic::{
    digit_length, f64_digits, leading_digit, monna_inverse_rational, radical_inverse_fraction,
    PAdicNumber, UnitPoint,
};
use crate::primes::validate_bases;
use crate::trig::{sinpi_frac, unit_exp_frac};
use num_complex::Complex64;

/// Cap on the exact denominator `prod_j p_j^(a_j)`; keeps every angle
/// reduction inside u128.
const MAX_THETA_DEN: u128 = 1 << 80;

/// Cap on prefix lengths in exact character sums (`N * numerator` must stay
/// inside u128).
const MAX_CHAR_SUM_LEN: u64 = 1 << 40;

/// A multi-index of the function system with its derived digit data and the
/// exact frequency `theta = sum_j phi_{p_j}(k_j) mod 1`.
///
/// For k != 0 the reduced denominator of theta is `prod_j p_j^(a_j) > 1`
/// (the per-coordinate numerators are coprime to their bases), so theta is
/// never an integer and `sin(pi theta) != 0`. That nondegeneracy is checked
/// at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyIndex {
    bases: Vec<u32>,
    k: Vec<u64>,
    digit_lengths: Vec<u32>,
    leading_digits: Vec<u32>,
    theta_num: u128,
    theta_den: u128,
}

impl FrequencyIndex {
    pub fn new(bases: &[u32], k: &[u64]) -> Result<Self> {
        validate_bases(bases)?;
        if k.len() != bases.len() {
            return Err(QmcError::DimensionMismatch { expected: bases.len(), got: k.len() });
        }
        let mut digit_lengths = Vec::with_capacity(k.len());
        let mut leading_digits = Vec::with_capacity(k.len());
        let mut den = 1u128;
        for (&p, &kj) in bases.iter().zip(k) {
            let a = digit_length(p, kj);
            digit_lengths.push(a);
            leading_digits.push(if kj == 0 { 0 } else { leading_digit(p, kj) });
            for _ in 0..a {
                den = den
                    .checked_mul(p as u128)
                    .filter(|&d| d <= MAX_THETA_DEN)
                    .ok_or_else(|| {
                        QmcError::Overflow(format!("theta denominator for k = {k:?} exceeds 2^80"))
                    })?;
            }
        }
        let mut num = 0u128;
        for (&p, &kj) in bases.iter().zip(k) {
            let (kn, kd) = radical_inverse_fraction(p, kj);
            num = (num + kn * (den / kd)) % den;
        }
        let idx = Self {
            bases: bases.to_vec(),
            k: k.to_vec(),
            digit_lengths,
            leading_digits,
            theta_num: num,
            theta_den: den,
        };
        if !idx.is_zero() && idx.theta_num == 0 {
            // impossible for distinct prime bases; guards the geometric sum
            return Err(QmcError::NumericalConsistency(format!(
                "degenerate frequency theta for k = {k:?}"
            )));
        }
        Ok(idx)
    }

    pub fn bases(&self) -> &[u32] {
        &self.bases
    }

    pub fn k(&self) -> &[u64] {
        &self.k
    }

    pub fn is_zero(&self) -> bool {
        self.k.iter().all(|&kj| kj == 0)
    }

    /// Per-coordinate digit lengths a_j (0 iff k_j = 0).
    pub fn digit_lengths(&self) -> &[u32] {
        &self.digit_lengths
    }

    /// Per-coordinate most significant digits (0 iff k_j = 0).
    pub fn leading_digits(&self) -> &[u32] {
        &self.leading_digits
    }

    /// The exact frequency as (numerator, denominator), reduced mod 1.
    pub fn theta(&self) -> (u128, u128) {
        (self.theta_num, self.theta_den)
    }

    pub fn theta_f64(&self) -> f64 {
        self.theta_num as f64 / self.theta_den as f64
    }

    /// `sin(pi * theta)`, nonzero for every nonzero index.
    pub fn sin_pi_theta(&self) -> f64 {
        sinpi_frac(self.theta_num, self.theta_den)
    }
}

/// Index boxes `Delta_p(g)` over which series are truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexBoxMode {
    /// `0 <= k_j < p_j^(g_j)` for all j.
    Full,
    /// The full box minus the zero index.
    Punctured,
    /// `1 <= k_j < p_j^(g_j)` for all j.
    Interior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexBox {
    g: Vec<u32>,
    mode: IndexBoxMode,
}

impl IndexBox {
    pub fn new(g: Vec<u32>, mode: IndexBoxMode) -> Result<Self> {
        if g.is_empty() || g.contains(&0) {
            return Err(QmcError::Domain("box exponents g_j must be >= 1".into()));
        }
        Ok(Self { g, mode })
    }

    pub fn g(&self) -> &[u32] {
        &self.g
    }

    pub fn mode(&self) -> IndexBoxMode {
        self.mode
    }

    fn limits(&self, bases: &[u32]) -> Result<Vec<u64>> {
        if bases.len() != self.g.len() {
            return Err(QmcError::DimensionMismatch { expected: self.g.len(), got: bases.len() });
        }
        bases
            .iter()
            .zip(&self.g)
            .map(|(&p, &gj)| {
                (p as u64).checked_pow(gj).filter(|&l| l <= 1 << 63).ok_or_else(|| {
                    QmcError::Overflow(format!("p^g = {p}^{gj} exceeds the index range"))
                })
            })
            .collect()
    }

    /// Number of indices in the box.
    pub fn count(&self, bases: &[u32]) -> Result<u128> {
        let limits = self.limits(bases)?;
        let mut total = 1u128;
        for &l in &limits {
            let l = match self.mode {
                IndexBoxMode::Interior => l - 1,
                _ => l,
            } as u128;
            total = total
                .checked_mul(l)
                .ok_or_else(|| QmcError::Overflow("index box size exceeds u128".into()))?;
        }
        if self.mode == IndexBoxMode::Punctured {
            total -= 1;
        }
        Ok(total)
    }

    /// Visits every index of the box in lexicographic odometer order.
    pub fn for_each<F: FnMut(&[u64])>(&self, bases: &[u32], mut f: F) -> Result<()> {
        let limits = self.limits(bases)?;
        let lo = match self.mode {
            IndexBoxMode::Interior => 1u64,
            _ => 0,
        };
        let mut k = vec![lo; limits.len()];
        if self.mode == IndexBoxMode::Punctured {
            // skip the zero vector by advancing once
            if !advance(&mut k, &limits, 0) {
                return Ok(());
            }
        }
        loop {
            f(&k);
            if !advance(&mut k, &limits, lo) {
                return Ok(());
            }
        }
    }
}

fn advance(k: &mut [u64], limits: &[u64], lo: u64) -> bool {
    for j in 0..k.len() {
        k[j] += 1;
        if k[j] < limits[j] {
            return true;
        }
        k[j] = lo;
    }
    false
}

/// `beta_k` evaluated from the first `a` base-p digits of x (least
/// significant weight first). The angle `phi_p(k) * phi_p^+(x) mod 1` is the
/// exact rational `(K * Z mod p^a) / p^a`.
fn beta_from_digits(p: u32, k: u64, digits: &[u32]) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let (num_k, den) = radical_inverse_fraction(p, k);
    assert!(den <= 1 << 63, "index {k} too large for exact angle arithmetic in base {p}");
    debug_assert!(digits.len() as u32 >= digit_length(p, k));
    let mut z = 0u128;
    let mut pw = 1u128;
    for &d in digits.iter().take(digit_length(p, k) as usize) {
        z += d as u128 * pw;
        pw *= p as u128;
    }
    unit_exp_frac(num_k * z % den, den)
}

/// `beta_k(x)` for the exact binary value of x in `[0, 1)`.
///
/// `beta_k(p, 0, x) = 1` for every x; for k > 0 the value depends only on
/// the first a = digit_length(p, k) base-p digits of x. For p-adic rationals
/// that binary floats cannot represent exactly (such as 2/3 in base 3), use
/// [`beta_rational`], which honors the terminating-expansion convention.
pub fn beta(p: u32, k: u64, x: f64) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let a = digit_length(p, k) as usize;
    let digits = f64_digits(x, p, a).expect("x in [0,1) and small digit count");
    beta_from_digits(p, k, &digits)
}

/// `beta_k` at the exact rational `num / den` in `[0, 1)`.
pub fn beta_rational(p: u32, k: u64, num: u64, den: u64) -> Result<Complex64> {
    if k == 0 {
        if den == 0 || num >= den {
            return Err(QmcError::Domain(format!("{num}/{den} outside [0, 1)")));
        }
        return Ok(Complex64::new(1.0, 0.0));
    }
    let a = digit_length(p, k) as usize;
    let z = monna_inverse_rational(num, den, p, a)?;
    Ok(beta_from_digits(p, k, z.digits()))
}

/// `beta_k` of a truncated p-adic integer (the digits of `phi_p^+(x)`).
pub fn beta_padic(k: u64, z: &PAdicNumber) -> Complex64 {
    beta_from_digits(z.base(), k, z.digits())
}

/// The s-dimensional system: the product of the per-coordinate values.
pub fn beta_multi(bases: &[u32], k: &[u64], x: &UnitPoint) -> Result<Complex64> {
    if bases.len() != k.len() || x.dim() != k.len() {
        return Err(QmcError::DimensionMismatch { expected: bases.len(), got: x.dim() });
    }
    if bases != x.bases() {
        return Err(QmcError::IncompatibleOperands(format!(
            "point bases {:?} vs requested {:?}",
            x.bases(),
            bases
        )));
    }
    let mut out = Complex64::new(1.0, 0.0);
    for (j, (&p, &kj)) in bases.iter().zip(k).enumerate() {
        out *= beta(p, kj, x.coords()[j]);
    }
    Ok(out)
}

/// The index whose character is the complex conjugate of `beta_k`:
/// `phi_p(k') = -phi_p(k) mod 1`.
pub fn conjugate_index(p: u32, k: u64) -> u64 {
    if k == 0 {
        return 0;
    }
    let a = digit_length(p, k);
    let (num, den) = radical_inverse_fraction(p, k);
    // digit-reverse (den - num) back to an integer index, as an a-digit
    // string (leading zeros of the numerator become low digits of k')
    let mut m = den - num;
    let mut out = 0u64;
    for _ in 0..a {
        out = out * p as u64 + (m % p as u128) as u64;
        m /= p as u128;
    }
    out
}

/// Exact character sum over the first n unshifted Halton points:
/// `S_n(k) = sum_{m<n} beta_k(x_m) = sum_{m<n} e(m * theta)`, evaluated as a
/// closed-form geometric sum on the exact rational theta.
///
/// `k = 0` degenerates to `S_n = n`. A p-adic shift multiplies the sum by the
/// unimodular constant `beta_k(sigma)` and is left to the caller.
pub fn char_sum_halton(index: &FrequencyIndex, n: u64) -> Result<Complex64> {
    if n == 0 || n > MAX_CHAR_SUM_LEN {
        return Err(QmcError::Domain(format!("prefix length {n} outside [1, 2^40]")));
    }
    if index.is_zero() {
        return Ok(Complex64::new(n as f64, 0.0));
    }
    let (num, den) = index.theta();
    // S_n = e^(i pi (n-1) theta) * sin(pi n theta) / sin(pi theta)
    let phase = unit_exp_frac((n as u128 - 1) * num, 2 * den);
    let ratio = sinpi_frac(n as u128 * num, den) / sinpi_frac(num, den);
    Ok(phase * ratio)
}

/// Max entrywise deviation of the Gram matrix of `{beta_k : k < p^g}` from
/// the identity, using the exact piecewise-constant cell structure: all these
/// functions are constant on the `p^g` cells of resolution `p^-g`, so the
/// inner products are finite sums, not quadrature approximations.
///
/// `q` is the nominal evaluation resolution and must be a positive multiple
/// of `p^g`; the cell sums are exact for every such q.
pub fn gram_check(p: u32, g: u32, q: u64) -> Result<f64> {
    crate::primes::validate_prime(p)?;
    let m = (p as u64)
        .checked_pow(g)
        .filter(|&m| m <= 1 << 20)
        .ok_or_else(|| QmcError::Resolution(format!("p^g = {p}^{g} too large")))?;
    if q == 0 || q % m != 0 {
        return Err(QmcError::Resolution(format!(
            "quadrature resolution {q} is not a positive multiple of p^g = {m}"
        )));
    }
    let m = m as usize;
    // values[k][c] = beta_k on cell c = [c/p^g, (c+1)/p^g)
    let mut values = vec![Complex64::new(0.0, 0.0); m * m];
    for k in 0..m as u64 {
        let row = &mut values[(k as usize) * m..(k as usize + 1) * m];
        for (c, slot) in row.iter_mut().enumerate() {
            *slot = beta_rational(p, k, c as u64, m as u64)?;
        }
    }
    let mut max_dev = 0.0f64;
    for k in 0..m {
        for l in 0..m {
            let mut inner = Complex64::new(0.0, 0.0);
            for c in 0..m {
                inner += values[k * m + c] * values[l * m + c].conj();
            }
            inner /= m as f64;
            let target = if k == l { 1.0 } else { 0.0 };
            let dev = (inner - target).norm();
            max_dev = max_dev.max(dev);
        }
    }
    Ok(max_dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn beta_zero_index_is_one() {
        for x in [0.0, 0.25, 0.9999] {
            assert_eq!(beta(5, 0, x), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn beta_examples() {
        // phi_2(1) = 1/2, z = phi_2^+(0.5) = 1: e^(pi i) = -1
        assert!(close(beta(2, 1, 0.5), Complex64::new(-1.0, 0.0), 1e-15));
        // phi_3(1) = 1/3, z = 2 at x = 2/3: e^(4 pi i / 3)
        let expected = Complex64::new((4.0 * PI / 3.0).cos(), (4.0 * PI / 3.0).sin());
        assert!(close(beta_rational(3, 1, 2, 3).unwrap(), expected, 1e-15));
    }

    #[test]
    fn beta_multi_is_the_product() {
        let x = UnitPoint::new(vec![0.5, 0.625], vec![2, 3]).unwrap();
        let product = beta(2, 3, 0.5) * beta(3, 4, 0.625);
        let multi = beta_multi(&[2, 3], &[3, 4], &x).unwrap();
        assert!(close(product, multi, 1e-14));
        assert!((multi.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn beta_depends_only_on_leading_digits() {
        // digit locality: truncating x past a = digit_length(k) digits
        // leaves beta unchanged
        for &(p, k) in &[(2u32, 5u64), (3, 7), (5, 24)] {
            let a = digit_length(p, k) as usize;
            for i in 0..50 {
                let x = (i as f64 * 0.019_37) % 1.0;
                let digits = f64_digits(x, p, a + 8).unwrap();
                let truncated = crate::padic::PAdicNumber::from_digits(
                    p,
                    digits[..a].iter().copied().chain(std::iter::repeat(0).take(8)).collect(),
                )
                .unwrap();
                let same = beta_padic(k, &truncated);
                assert!(close(beta(p, k, x), same, 1e-14), "p={p} k={k} x={x}");
            }
        }
    }

    #[test]
    fn conjugation_law() {
        for &(p, k) in &[(2u32, 1u64), (2, 6), (3, 5), (5, 77)] {
            let kc = conjugate_index(p, k);
            for i in 0..25 {
                let x = (i as f64 * 0.041_7 + 0.003) % 1.0;
                assert!(
                    close(beta(p, k, x).conj(), beta(p, kc, x), 1e-14),
                    "p={p} k={k} kc={kc} x={x}"
                );
            }
        }
        assert_eq!(conjugate_index(7, 0), 0);
    }

    #[test]
    fn character_homomorphism_on_integers() {
        // chi_k(y + z) = chi_k(y) chi_k(z) through the Monna map
        let p = 3u32;
        for k in 1..20u64 {
            for (y, z) in [(4u64, 7u64), (10, 17), (26, 1)] {
                let sum = PAdicNumber::from_integer(p, y + z, 30).unwrap();
                let lhs = beta_padic(k, &sum);
                let rhs = beta_rational(p, k, radical_inverse_fraction(p, y).0 as u64, {
                    radical_inverse_fraction(p, y).1 as u64
                })
                .unwrap()
                    * beta_rational(p, k, radical_inverse_fraction(p, z).0 as u64, {
                        radical_inverse_fraction(p, z).1 as u64
                    })
                    .unwrap();
                assert!(close(lhs, rhs, 1e-13), "k={k} y={y} z={z}");
            }
        }
    }

    #[test]
    fn frequency_index_theta() {
        // k = (1, 1) in bases (2, 3): theta = 1/2 + 1/3 = 5/6
        let idx = FrequencyIndex::new(&[2, 3], &[1, 1]).unwrap();
        assert_eq!(idx.theta(), (5, 6));
        assert!(!idx.is_zero());
        assert_eq!(idx.digit_lengths(), &[1, 1]);
        // zero index
        let zero = FrequencyIndex::new(&[2, 3], &[0, 0]).unwrap();
        assert!(zero.is_zero());
        assert_eq!(zero.theta(), (0, 1));
    }

    #[test]
    fn nondegeneracy_of_theta() {
        // theta never integral for k != 0: check a sweep
        for k1 in 0..27u64 {
            for k2 in 0..25u64 {
                if (k1, k2) == (0, 0) {
                    continue;
                }
                let idx = FrequencyIndex::new(&[3, 5], &[k1, k2]).unwrap();
                let (num, den) = idx.theta();
                assert!(num % den != 0, "k = ({k1}, {k2})");
                assert!(idx.sin_pi_theta().abs() > 0.0);
            }
        }
    }

    #[test]
    fn char_sum_degenerate_and_alternating() {
        let zero = FrequencyIndex::new(&[2], &[0]).unwrap();
        assert_eq!(char_sum_halton(&zero, 17).unwrap(), Complex64::new(17.0, 0.0));
        // p = 2, k = 1: beta alternates +1, -1 along the sequence
        let idx = FrequencyIndex::new(&[2], &[1]).unwrap();
        assert!(char_sum_halton(&idx, 2).unwrap().norm() < 1e-14);
        assert!(close(char_sum_halton(&idx, 3).unwrap(), Complex64::new(1.0, 0.0), 1e-13));
    }

    #[test]
    fn char_sum_matches_brute_force() {
        // direct summation of e(m * theta) (still independent of the
        // phase/sine closed form)
        for (bases, k) in [(vec![2u32, 3], vec![3u64, 2]), (vec![2, 3, 5], vec![1, 4, 7])] {
            let idx = FrequencyIndex::new(&bases, &k).unwrap();
            let (num, den) = idx.theta();
            for n in [1u64, 2, 9, 100] {
                let mut direct = Complex64::new(0.0, 0.0);
                for m in 0..n {
                    direct += unit_exp_frac(m as u128 * num, den);
                }
                let closed = char_sum_halton(&idx, n).unwrap();
                assert!(close(direct, closed, 1e-10), "k={k:?} n={n}");
            }
        }
    }

    #[test]
    fn char_sum_bound_example() {
        // |S_n| <= 1/|sin(pi theta)| on a sweep
        let idx = FrequencyIndex::new(&[2, 3], &[5, 2]).unwrap();
        let cap = 1.0 / idx.sin_pi_theta().abs();
        for n in 1..=512u64 {
            assert!(char_sum_halton(&idx, n).unwrap().norm() <= cap + 1e-9);
        }
    }

    #[test]
    fn index_box_enumeration() {
        let boxed = IndexBox::new(vec![2, 1], IndexBoxMode::Full).unwrap();
        assert_eq!(boxed.count(&[2, 3]).unwrap(), 12);
        let mut seen = Vec::new();
        boxed.for_each(&[2, 3], |k| seen.push(k.to_vec())).unwrap();
        assert_eq!(seen.len(), 12);
        assert_eq!(seen[0], vec![0, 0]);
        assert_eq!(seen[11], vec![3, 2]);

        let punctured = IndexBox::new(vec![2, 1], IndexBoxMode::Punctured).unwrap();
        assert_eq!(punctured.count(&[2, 3]).unwrap(), 11);
        let mut first = None;
        punctured
            .for_each(&[2, 3], |k| {
                if first.is_none() {
                    first = Some(k.to_vec());
                }
            })
            .unwrap();
        assert_eq!(first.unwrap(), vec![1, 0]);

        let interior = IndexBox::new(vec![2, 2], IndexBoxMode::Interior).unwrap();
        assert_eq!(interior.count(&[2, 3]).unwrap(), 3 * 8);
    }

    #[test]
    fn gram_small_cases() {
        assert_eq!(gram_check(2, 1, 2).unwrap(), 0.0);
        assert!(gram_check(3, 2, 9).unwrap() < 1e-12);
        assert!(gram_check(5, 2, 25).unwrap() < 1e-12);
        // resolution must divide
        assert!(matches!(gram_check(2, 2, 6), Err(QmcError::Resolution(_))));
    }
}
