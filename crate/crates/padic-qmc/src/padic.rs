//! Base-p digit arithmetic: radical inverse, Monna map and its inverse,
//! carry addition and subtraction of truncated p-adic integers, and the
//! p-adic shift of points in the unit cube.
//!
//! A p-adic integer is a formal sum `z = sum_r z_r p^r` with digits
//! `z_r in {0, ..., p-1}`. Everything here works on truncations to a fixed
//! number of digits P; dropping carries past digit P-1 is reduction modulo
//! `p^P`, so all additive identities hold exactly on the stored digits.
//!
//! Digit extraction from `f64` input uses the exact binary value of the
//! float (one u128 scaling, no repeated rounding), and rational input has a
//! dedicated exact path, so p-adic rationals always get their terminating
//! expansion.

use crate::error::{QmcError, Result};
use crate::primes::{validate_bases, validate_prime};
use crate::rng::keyed_digit;

/// Largest f64 below 1.0; used to clamp conversions back into `[0, 1)`.
pub(crate) const ONE_MINUS_EPS: f64 = 1.0 - f64::EPSILON / 2.0;

/// Largest supported prime base. Bases in practice are small; this cap
/// guarantees that the default precision below stays inside the exact
/// digit-extraction range.
pub const MAX_BASE: u32 = 1021;

/// Exact digit-extraction bound: `p^precision` must stay below `2^74` so that
/// `mantissa * p^precision` fits in a u128.
const MAX_SCALED_DEN: u128 = 1 << 74;

/// Smallest precision P with `p^-P <= 2^-64`, i.e. truncation error below
/// the resolution of an f64 in `[0.5, 1)`.
pub fn default_precision(p: u32) -> usize {
    let mut pow = 1u128;
    let mut precision = 0usize;
    while pow < (1u128 << 64) {
        pow *= p as u128;
        precision += 1;
    }
    precision
}

/// Largest precision whose digits can be extracted exactly from an f64 in
/// this base (`p^P <= 2^74`); never smaller than [`default_precision`].
pub fn max_supported_precision(p: u32) -> usize {
    let mut pow = p as u128;
    let mut precision = 1usize;
    while pow * p as u128 <= MAX_SCALED_DEN {
        pow *= p as u128;
        precision += 1;
    }
    precision
}

fn validate_base(p: u32) -> Result<()> {
    validate_prime(p)?;
    if p > MAX_BASE {
        return Err(QmcError::Domain(format!("base {p} exceeds supported maximum {MAX_BASE}")));
    }
    Ok(())
}

fn scaled_denominator(p: u32, precision: usize) -> Result<u128> {
    if precision == 0 {
        return Err(QmcError::Domain("precision must be >= 1".into()));
    }
    let mut pow = 1u128;
    for _ in 0..precision {
        pow = pow
            .checked_mul(p as u128)
            .filter(|&v| v <= MAX_SCALED_DEN)
            .ok_or_else(|| {
                QmcError::Domain(format!(
                    "precision {precision} too large for base {p} (p^P must stay below 2^74)"
                ))
            })?;
    }
    Ok(pow)
}

/// First `precision` base-p digits of the exact binary value of `x`,
/// least-significant weight first: digit r has weight `p^-(r+1)`.
pub(crate) fn f64_digits(x: f64, p: u32, precision: usize) -> Result<Vec<u32>> {
    if !(0.0..1.0).contains(&x) {
        return Err(QmcError::Domain(format!("x = {x} outside [0, 1)")));
    }
    let den = scaled_denominator(p, precision)?;
    let mut digits = vec![0u32; precision];
    if x == 0.0 {
        return Ok(digits);
    }
    // x = mant * 2^-shift exactly.
    let bits = x.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i64;
    let mant_field = bits & ((1u64 << 52) - 1);
    let (mant, shift) = if exp_field == 0 {
        (mant_field, 1074u32)
    } else {
        (mant_field | (1u64 << 52), (1075 - exp_field) as u32)
    };
    // floor(x * p^P): mant < 2^53 and p^P < 2^74, so the product fits u128.
    let scaled = mant as u128 * den;
    let y = if shift >= 128 { 0 } else { scaled >> shift };
    debug_assert!(y < den);
    // Base-p digits of y, least significant first, land at positions P-1 down to 0.
    let mut y = y;
    for i in 0..precision {
        digits[precision - 1 - i] = (y % p as u128) as u32;
        y /= p as u128;
    }
    Ok(digits)
}

/// An element of Z_p truncated to `precision` stored digits.
///
/// Digit `r` of the vector is the coefficient of `p^r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PAdicNumber {
    base: u32,
    digits: Vec<u32>,
}

impl PAdicNumber {
    /// Zero with the given precision.
    pub fn zero(base: u32, precision: usize) -> Result<Self> {
        validate_base(base)?;
        if precision == 0 {
            return Err(QmcError::Domain("precision must be >= 1".into()));
        }
        Ok(Self { base, digits: vec![0; precision] })
    }

    /// Builds from explicit digits (index r holds z_r). The digit count is
    /// the precision.
    pub fn from_digits(base: u32, digits: Vec<u32>) -> Result<Self> {
        validate_base(base)?;
        if digits.is_empty() {
            return Err(QmcError::Domain("precision must be >= 1".into()));
        }
        if let Some(&bad) = digits.iter().find(|&&d| d >= base) {
            return Err(QmcError::Domain(format!("digit {bad} not in [0, {base})")));
        }
        Ok(Self { base, digits })
    }

    /// Embeds a nonnegative integer (truncating modulo `p^precision`).
    pub fn from_integer(base: u32, n: u64, precision: usize) -> Result<Self> {
        let mut z = Self::zero(base, precision)?;
        let mut n = n;
        for r in 0..precision {
            if n == 0 {
                break;
            }
            z.digits[r] = (n % base as u64) as u32;
            n /= base as u64;
        }
        Ok(z)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            return Err(QmcError::IncompatibleOperands(format!(
                "base {} vs {}",
                self.base, other.base
            )));
        }
        if self.digits.len() != other.digits.len() {
            return Err(QmcError::IncompatibleOperands(format!(
                "precision {} vs {}",
                self.digits.len(),
                other.digits.len()
            )));
        }
        Ok(())
    }

    /// Carry addition in Z_p; the carry past the last stored digit is dropped.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let p = self.base;
        let mut digits = Vec::with_capacity(self.digits.len());
        let mut carry = 0u32;
        for (&a, &b) in self.digits.iter().zip(&other.digits) {
            let mut d = a + b + carry;
            carry = if d >= p { 1 } else { 0 };
            if d >= p {
                d -= p;
            }
            digits.push(d);
        }
        Ok(Self { base: p, digits })
    }

    /// Borrow subtraction in Z_p (the additive inverse of `add`).
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let p = self.base;
        let mut digits = Vec::with_capacity(self.digits.len());
        let mut borrow = 0i64;
        for (&a, &b) in self.digits.iter().zip(&other.digits) {
            let mut d = a as i64 - b as i64 - borrow;
            borrow = if d < 0 { 1 } else { 0 };
            if d < 0 {
                d += p as i64;
            }
            digits.push(d as u32);
        }
        Ok(Self { base: p, digits })
    }
}

/// Number of base-p digits of k (0 for k = 0).
pub fn digit_length(p: u32, k: u64) -> u32 {
    let mut len = 0;
    let mut k = k;
    while k > 0 {
        k /= p as u64;
        len += 1;
    }
    len
}

/// Most significant base-p digit of k >= 1.
pub fn leading_digit(p: u32, k: u64) -> u32 {
    assert!(k >= 1, "leading digit of 0 is undefined");
    let mut k = k;
    while k >= p as u64 {
        k /= p as u64;
    }
    k as u32
}

/// The radical inverse as an exact fraction: `phi_p(k) = num / p^a` with
/// `a = digit_length(p, k)`. The numerator is the digit reversal of k, and
/// it is coprime to p whenever k > 0.
pub fn radical_inverse_fraction(p: u32, k: u64) -> (u128, u128) {
    let mut num = 0u128;
    let mut den = 1u128;
    let mut k = k;
    while k > 0 {
        num = num * p as u128 + (k % p as u64) as u128;
        den *= p as u128;
        k /= p as u64;
    }
    (num, den)
}

pub(crate) fn ratio_to_unit(num: u128, den: u128) -> f64 {
    debug_assert!(num < den);
    if num == 0 {
        return 0.0;
    }
    ((num as f64) / (den as f64)).min(ONE_MINUS_EPS)
}

/// Value of a digit vector under the Monna map, via its exact fraction.
/// Trailing zero digits are stripped so terminating expansions reduce to
/// small fractions with a single correctly rounded division.
pub(crate) fn digits_to_unit(base: u32, digits: &[u32]) -> f64 {
    let mut last = digits.len();
    while last > 0 && digits[last - 1] == 0 {
        last -= 1;
    }
    let mut num = 0u128;
    let mut den = 1u128;
    for &d in &digits[..last] {
        num = num * base as u128 + d as u128;
        den *= base as u128;
    }
    ratio_to_unit(num, den)
}

/// The radical inverse `phi_p(n) = sum_k n_{k-1} p^-k` in `[0, 1)`.
///
/// Exact in binary floating point for p = 2; for other bases the value is a
/// single correctly rounded division of the exact fraction.
pub fn radical_inverse(p: u32, n: u64) -> Result<f64> {
    validate_base(p)?;
    let (num, den) = radical_inverse_fraction(p, n);
    Ok(ratio_to_unit(num, den))
}

/// The Monna map `phi_p(z) = sum_r z_r p^-(r+1)` of a truncated p-adic
/// integer. Restricted to embedded integers this is the radical inverse,
/// bit-for-bit.
pub fn monna_map(z: &PAdicNumber) -> f64 {
    digits_to_unit(z.base, &z.digits)
}

/// The inverse Monna map `phi_p^+` truncated to `precision` digits, reading
/// the exact binary value of x. p-adic rationals representable in binary
/// (e.g. any dyadic for p = 2) get their terminating expansion.
pub fn monna_inverse(x: f64, p: u32, precision: usize) -> Result<PAdicNumber> {
    validate_base(p)?;
    let digits = f64_digits(x, p, precision)?;
    Ok(PAdicNumber { base: p, digits })
}

/// The inverse Monna map of the exact rational `num / den` in `[0, 1)`.
///
/// This is the path to use for p-adic rationals that a binary float cannot
/// represent (e.g. 2/3 in base 3): extraction is exact and terminating
/// expansions terminate.
pub fn monna_inverse_rational(num: u64, den: u64, p: u32, precision: usize) -> Result<PAdicNumber> {
    validate_base(p)?;
    if precision == 0 {
        return Err(QmcError::Domain("precision must be >= 1".into()));
    }
    if den == 0 || num >= den {
        return Err(QmcError::Domain(format!("{num}/{den} outside [0, 1)")));
    }
    let mut digits = vec![0u32; precision];
    let mut rem = num as u128;
    for d in digits.iter_mut() {
        rem *= p as u128;
        *d = (rem / den as u128) as u32;
        rem %= den as u128;
    }
    Ok(PAdicNumber { base: p, digits })
}

/// A point of `[0, 1)^s` tagged with one prime base per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitPoint {
    coords: Vec<f64>,
    bases: Vec<u32>,
}

impl UnitPoint {
    pub fn new(coords: Vec<f64>, bases: Vec<u32>) -> Result<Self> {
        validate_bases(&bases)?;
        if coords.len() != bases.len() {
            return Err(QmcError::DimensionMismatch { expected: bases.len(), got: coords.len() });
        }
        if let Some(&bad) = coords.iter().find(|c| !(0.0..1.0).contains(*c)) {
            return Err(QmcError::Domain(format!("coordinate {bad} outside [0, 1)")));
        }
        Ok(Self { coords, bases })
    }

    pub(crate) fn new_unchecked(coords: Vec<f64>, bases: Vec<u32>) -> Self {
        Self { coords, bases }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn bases(&self) -> &[u32] {
        &self.bases
    }
}

/// How a shift came to be; sampled shifts record their stream key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShiftProvenance {
    Explicit,
    Sampled { seed: u64, replicate: u64 },
}

/// A p-adic shift: one truncated p-adic integer per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Shift {
    sigma: Vec<PAdicNumber>,
    provenance: ShiftProvenance,
}

impl Shift {
    /// Wraps explicit per-coordinate shift digits.
    pub fn explicit(sigma: Vec<PAdicNumber>) -> Result<Self> {
        let bases: Vec<u32> = sigma.iter().map(|z| z.base()).collect();
        validate_bases(&bases)?;
        Ok(Self { sigma, provenance: ShiftProvenance::Explicit })
    }

    pub fn sigma(&self) -> &[PAdicNumber] {
        &self.sigma
    }

    pub fn bases(&self) -> Vec<u32> {
        self.sigma.iter().map(|z| z.base()).collect()
    }

    pub fn provenance(&self) -> &ShiftProvenance {
        &self.provenance
    }

    /// The shift coordinates as a point of the unit cube.
    pub fn as_point(&self) -> UnitPoint {
        let coords = self.sigma.iter().map(monna_map).collect();
        UnitPoint::new_unchecked(coords, self.bases())
    }
}

/// Draws a shift with i.i.d. uniform digits from the deterministic
/// counter-based stream keyed by (seed, replicate, coordinate, digit index).
/// Identical inputs give identical shifts on any platform.
///
/// `precision` is the requested digit count; a coordinate whose base cannot
/// be extracted exactly at that depth is capped at
/// [`max_supported_precision`], which still satisfies `p^-P <= 2^-64`
/// whenever `precision >= 64`.
pub fn sample_shift(bases: &[u32], precision: usize, seed: u64, replicate: u64) -> Result<Shift> {
    validate_bases(bases)?;
    if precision == 0 {
        return Err(QmcError::Domain("precision must be >= 1".into()));
    }
    if bases.iter().any(|&p| p > MAX_BASE) {
        return Err(QmcError::Domain(format!("bases above {MAX_BASE} are unsupported")));
    }
    let sigma = bases
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let digits_len = precision.min(max_supported_precision(p));
            let digits = (0..digits_len)
                .map(|r| keyed_digit(seed, replicate, j as u64, r as u64, p))
                .collect();
            PAdicNumber { base: p, digits }
        })
        .collect();
    Ok(Shift { sigma, provenance: ShiftProvenance::Sampled { seed, replicate } })
}

/// Coordinatewise p-adic shift:
/// `x_j -> phi_p(phi_p^+(x_j) + phi_p^+(sigma_j))` at the shift's precision.
pub fn shift_point(x: &UnitPoint, shift: &Shift) -> Result<UnitPoint> {
    if x.dim() != shift.sigma.len() {
        return Err(QmcError::DimensionMismatch { expected: shift.sigma.len(), got: x.dim() });
    }
    let mut coords = Vec::with_capacity(x.dim());
    for (j, sigma) in shift.sigma.iter().enumerate() {
        if x.bases[j] != sigma.base() {
            return Err(QmcError::IncompatibleOperands(format!(
                "coordinate {j}: point base {} vs shift base {}",
                x.bases[j],
                sigma.base()
            )));
        }
        let z = monna_inverse(x.coords[j], sigma.base(), sigma.precision())?;
        coords.push(monna_map(&z.add(sigma)?));
    }
    Ok(UnitPoint::new_unchecked(coords, x.bases.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_precision_matches_resolution_rule() {
        assert_eq!(default_precision(2), 64);
        assert_eq!(default_precision(3), 41);
        assert_eq!(default_precision(5), 28);
        assert_eq!(default_precision(7), 23);
    }

    #[test]
    fn radical_inverse_values() {
        assert_eq!(radical_inverse(2, 0).unwrap(), 0.0);
        assert_eq!(radical_inverse(2, 3).unwrap(), 0.75);
        assert_eq!(radical_inverse(3, 5).unwrap(), 7.0 / 9.0);
        assert!(matches!(radical_inverse(4, 1), Err(QmcError::InvalidBase(4))));
    }

    #[test]
    fn monna_map_agrees_with_radical_inverse_on_integers() {
        for &p in &[2u32, 3, 5, 7, 11] {
            let precision = default_precision(p);
            for n in 0..200u64 {
                let z = PAdicNumber::from_integer(p, n, precision).unwrap();
                assert_eq!(monna_map(&z), radical_inverse(p, n).unwrap(), "p={p} n={n}");
            }
        }
    }

    #[test]
    fn monna_map_examples() {
        let z = PAdicNumber::from_digits(2, vec![0, 0, 0, 0]).unwrap();
        assert_eq!(monna_map(&z), 0.0);
        let z = PAdicNumber::from_digits(2, vec![1, 1, 0, 0]).unwrap();
        assert_eq!(monna_map(&z), 0.75);
        let z = PAdicNumber::from_digits(3, vec![2, 1, 0, 0]).unwrap();
        assert_eq!(monna_map(&z), 7.0 / 9.0);
    }

    #[test]
    fn monna_inverse_examples() {
        let z = monna_inverse(0.0, 2, 8).unwrap();
        assert!(z.is_zero());
        let z = monna_inverse(0.5, 2, 8).unwrap();
        assert_eq!(z.digits(), &[1, 0, 0, 0, 0, 0, 0, 0]);
        let z = monna_inverse(0.75, 2, 8).unwrap();
        assert_eq!(z.digits(), &[1, 1, 0, 0, 0, 0, 0, 0]);
        assert!(monna_inverse(1.0, 2, 8).is_err());
        assert!(monna_inverse(-0.1, 2, 8).is_err());
    }

    #[test]
    fn monna_inverse_rational_terminates_for_p_adic_rationals() {
        // 2/3 in base 3 terminates: digits (2, 0, 0, ...).
        let z = monna_inverse_rational(2, 3, 3, 6).unwrap();
        assert_eq!(z.digits(), &[2, 0, 0, 0, 0, 0]);
        // while the f64 nearest to 2/3 is slightly below it.
        let zf = monna_inverse(2.0 / 3.0, 3, 6).unwrap();
        assert_eq!(zf.digits()[0], 1);
        // 1/7 in base 3 repeats: 0.010212...
        let z = monna_inverse_rational(1, 7, 3, 6).unwrap();
        assert_eq!(z.digits(), &[0, 1, 0, 2, 1, 2]);
    }

    #[test]
    fn roundtrip_reproduces_stored_digits() {
        // bit-exact for p = 2 (dyadic values); within truncation resolution
        // for odd bases, whose finite digit strings a binary float cannot
        // represent exactly
        let precision = default_precision(2);
        for i in 0..500u64 {
            let x = (i as f64 * 0.001998) % 1.0;
            let z = monna_inverse(x, 2, precision).unwrap();
            let back = monna_inverse(monna_map(&z), 2, precision).unwrap();
            assert_eq!(z, back, "x={x}");
        }
        for &p in &[3u32, 5] {
            let precision = default_precision(p);
            for i in 0..500u64 {
                let x = (i as f64 * 0.001998) % 1.0;
                let truncated = monna_map(&monna_inverse(x, p, precision).unwrap());
                assert!(
                    (truncated - x).abs() <= (p as f64).powi(-(precision as i32)) + 4e-16,
                    "p={p} x={x}"
                );
            }
        }
    }

    #[test]
    fn roundtrip_is_exact_on_p_adic_rationals() {
        // x with at most P base-p digits comes back exactly: the f64 path
        // for dyadics, the rational path for other bases.
        for m in 0..8u64 {
            let x = m as f64 / 8.0;
            let z = monna_inverse(x, 2, default_precision(2)).unwrap();
            assert_eq!(monna_map(&z), x, "m={m}");
        }
        for &p in &[3u32, 5] {
            let den = (p as u64).pow(3);
            for m in 0..den {
                let z = monna_inverse_rational(m, den, p, default_precision(p)).unwrap();
                assert_eq!(monna_map(&z), m as f64 / den as f64, "p={p} m={m}");
            }
        }
    }

    #[test]
    fn addition_inverse_of_one_is_all_p_minus_one() {
        for &p in &[2u32, 3, 7] {
            let one = PAdicNumber::from_integer(p, 1, 10).unwrap();
            let minus_one = PAdicNumber::from_digits(p, vec![p - 1; 10]).unwrap();
            assert!(one.add(&minus_one).unwrap().is_zero());
            // and read in reverse: 0 - 1 has every digit p-1.
            let zero = PAdicNumber::zero(p, 10).unwrap();
            assert_eq!(zero.sub(&one).unwrap(), minus_one);
        }
    }

    #[test]
    fn addition_embeds_integer_addition() {
        let a = PAdicNumber::from_integer(2, 1, 3).unwrap();
        let b = PAdicNumber::from_integer(2, 3, 3).unwrap();
        assert_eq!(a.add(&b).unwrap().digits(), &[0, 0, 1]);
        let four = PAdicNumber::from_integer(2, 4, 3).unwrap();
        assert_eq!(four.sub(&b).unwrap().digits(), &[1, 0, 0]);
    }

    #[test]
    fn add_zero_and_self_subtraction() {
        let a = PAdicNumber::from_integer(5, 123, 8).unwrap();
        let zero = PAdicNumber::zero(5, 8).unwrap();
        assert_eq!(a.add(&zero).unwrap(), a);
        assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn incompatible_operands_are_rejected() {
        let a = PAdicNumber::zero(2, 8).unwrap();
        let b = PAdicNumber::zero(3, 8).unwrap();
        assert!(matches!(a.add(&b), Err(QmcError::IncompatibleOperands(_))));
        let c = PAdicNumber::zero(2, 9).unwrap();
        assert!(matches!(a.sub(&c), Err(QmcError::IncompatibleOperands(_))));
    }

    #[test]
    fn shift_examples_base_two() {
        let sigma = Shift::explicit(vec![monna_inverse(0.5, 2, 64).unwrap()]).unwrap();
        let x = UnitPoint::new(vec![0.5], vec![2]).unwrap();
        assert_eq!(shift_point(&x, &sigma).unwrap().coords(), &[0.25]);
        let x = UnitPoint::new(vec![0.75], vec![2]).unwrap();
        assert_eq!(shift_point(&x, &sigma).unwrap().coords(), &[0.125]);
    }

    #[test]
    fn zero_shift_is_identity() {
        let zero = Shift::explicit(vec![
            PAdicNumber::zero(2, 64).unwrap(),
            PAdicNumber::zero(3, 41).unwrap(),
        ])
        .unwrap();
        let x = UnitPoint::new(vec![0.71875, 0.625], vec![2, 3]).unwrap();
        let y = shift_point(&x, &zero).unwrap();
        assert_eq!(y.coords()[0], x.coords()[0]);
        assert!((y.coords()[1] - x.coords()[1]).abs() < 1e-15);
    }

    #[test]
    fn sampled_shifts_are_deterministic_and_replicate_distinct() {
        let a = sample_shift(&[2, 3], 64, 99, 4).unwrap();
        let b = sample_shift(&[2, 3], 64, 99, 4).unwrap();
        assert_eq!(a, b);
        let mut seen = std::collections::HashSet::new();
        for replicate in 0..10_000u64 {
            let s = sample_shift(&[2], 64, 7, replicate).unwrap();
            let key: u64 = s.sigma()[0]
                .digits()
                .iter()
                .take(64)
                .enumerate()
                .map(|(i, &d)| (d as u64) << i)
                .sum();
            assert!(seen.insert(key), "replicate {replicate} collided");
        }
    }

    #[test]
    fn shift_base_mismatch_is_rejected() {
        let sigma = sample_shift(&[2], 64, 1, 0).unwrap();
        let x = UnitPoint::new(vec![0.5], vec![3]).unwrap();
        assert!(matches!(shift_point(&x, &sigma), Err(QmcError::IncompatibleOperands(_))));
    }

    #[test]
    fn tiny_and_subnormal_inputs_extract_cleanly() {
        let z = monna_inverse(f64::MIN_POSITIVE / 4.0, 2, 64).unwrap();
        assert!(z.is_zero());
        let x = 2f64.powi(-70);
        let z = monna_inverse(x, 2, 64).unwrap();
        assert!(z.is_zero()); // below the 64-digit resolution
        let x = 2f64.powi(-60);
        let z = monna_inverse(x, 2, 64).unwrap();
        assert_eq!(z.digits()[59], 1);
        assert_eq!(monna_map(&z), x);
    }
}
