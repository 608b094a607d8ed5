//! Reproducing kernels and their p-adic shift-invariant coefficient
//! sequences.
//!
//! The weighted anchored Sobolev space (anchor 1) has kernel
//! `K(x, y) = prod_j (1 + gamma_j min(1 - x_j, 1 - y_j))`. Averaging it over
//! all p-adic shifts gives a kernel that is diagonal in the `beta_k` system,
//! `K_sh(x, y) = sum_k r_{p,gamma}(k) beta_k(x) conj(beta_k(y))`, with
//!
//! - `r(0) = 1 + gamma/3`,
//! - `r(k) = gamma / (2 p^(2a)) * (1 / sin^2(kappa pi / p) - 1/3)` for k > 0,
//!
//! where a is the digit length of k and kappa its most significant digit.
//! Only the digit length and leading digit of k matter, which is what makes
//! the box sums of `r` available in closed form:
//! `sum_{k < p^g} r(k) = 1 + gamma/3 + gamma/6 (1 - p^-g)` and
//! `sum_k r(k) = 1 + gamma/2`.
//!
//! The Korobov-type p-adic space replaces the coefficients by
//! `r_{p,alpha,gamma}(k) = gamma p^(-alpha floor(log_p k))` (1 at k = 0),
//! whose box sums are plain geometric series. Its inner product weights the
//! beta-coefficients of f and g by `1/r(k)`; only the coefficient sequence
//! is needed operationally, so no inner-product evaluator is exposed. The
//! same kernel can be identified with a Walsh-space kernel, but no Walsh
//! machinery is built here.

use crate::error::{QmcError, Result};
use crate::padic::{digit_length, f64_digits, leading_digit, radical_inverse_fraction};
use crate::primes::validate_bases;
use crate::trig::{sin_digit_angle, unit_exp_frac};
use num_complex::Complex64;

/// Anchor of the Sobolev space.
#[derive(Debug, Clone, PartialEq)]
pub enum Anchor {
    /// Anchor at 1 (the default throughout).
    One,
    /// Anchor at an arbitrary w in `[0, 1]^s`.
    W(Vec<f64>),
    /// The unanchored space (second Bernoulli polynomial kernel).
    Unanchored,
}

/// A weighted function space over `[0,1]^s` with one prime base, one weight
/// (and optionally one Korobov exponent) per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSpace {
    bases: Vec<u32>,
    gamma: Vec<f64>,
    alpha: Option<Vec<f64>>,
    anchor: Anchor,
}

impl WeightedSpace {
    /// The anchored Sobolev space with anchor 1. Zero weights are allowed
    /// (the coordinate drops out of the kernel).
    pub fn sobolev(bases: Vec<u32>, gamma: Vec<f64>) -> Result<Self> {
        validate_bases(&bases)?;
        if gamma.len() != bases.len() {
            return Err(QmcError::DimensionMismatch { expected: bases.len(), got: gamma.len() });
        }
        if let Some(&g) = gamma.iter().find(|&&g| !(g >= 0.0)) {
            return Err(QmcError::Domain(format!("weight {g} must be nonnegative")));
        }
        Ok(Self { bases, gamma, alpha: None, anchor: Anchor::One })
    }

    /// The Korobov-type p-adic space with exponents `alpha_j > 1`.
    pub fn korobov(bases: Vec<u32>, alpha: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        let mut space = Self::sobolev(bases, gamma)?;
        if alpha.len() != space.bases.len() {
            return Err(QmcError::DimensionMismatch {
                expected: space.bases.len(),
                got: alpha.len(),
            });
        }
        if let Some(&a) = alpha.iter().find(|&&a| !(a > 1.0)) {
            return Err(QmcError::Domain(format!("alpha {a} must be > 1")));
        }
        space.alpha = Some(alpha);
        Ok(space)
    }

    pub fn with_anchor(mut self, anchor: Anchor) -> Result<Self> {
        if let Anchor::W(w) = &anchor {
            if w.len() != self.bases.len() {
                return Err(QmcError::DimensionMismatch {
                    expected: self.bases.len(),
                    got: w.len(),
                });
            }
            if let Some(&c) = w.iter().find(|c| !(0.0..=1.0).contains(*c)) {
                return Err(QmcError::Domain(format!("anchor coordinate {c} outside [0, 1]")));
            }
        }
        self.anchor = anchor;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[u32] {
        &self.bases
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn alpha(&self) -> Option<&[f64]> {
        self.alpha.as_deref()
    }

    pub fn anchor(&self) -> &Anchor {
        &self.anchor
    }

    /// The k = 0 shift-invariant coefficient of coordinate j under the
    /// current anchor.
    fn r_zero(&self, j: usize) -> f64 {
        match &self.anchor {
            Anchor::One => 1.0 + self.gamma[j] / 3.0,
            Anchor::W(w) => anchor_w_r0(self.gamma[j], w[j]),
            Anchor::Unanchored => 1.0,
        }
    }
}

/// A coordinate weight sequence gamma_1, gamma_2, ...
#[derive(Debug, Clone, PartialEq)]
pub enum GammaSeq {
    Constant(f64),
    /// `gamma_j = j^-c`.
    PowerLaw(f64),
    Explicit(Vec<f64>),
}

impl GammaSeq {
    /// gamma_j for 1-based j (explicit lists return 0 beyond their length).
    pub fn value(&self, j: usize) -> f64 {
        debug_assert!(j >= 1);
        match self {
            GammaSeq::Constant(c) => *c,
            GammaSeq::PowerLaw(c) => (j as f64).powf(-c),
            GammaSeq::Explicit(v) => v.get(j - 1).copied().unwrap_or(0.0),
        }
    }

    /// The first s weights.
    pub fn values(&self, s: usize) -> Vec<f64> {
        (1..=s).map(|j| self.value(j)).collect()
    }
}

fn check_cube_point(x: &[f64], s: usize) -> Result<()> {
    if x.len() != s {
        return Err(QmcError::DimensionMismatch { expected: s, got: x.len() });
    }
    if let Some(&bad) = x.iter().find(|c| !(0.0..=1.0).contains(*c)) {
        return Err(QmcError::Domain(format!("coordinate {bad} outside [0, 1]")));
    }
    Ok(())
}

/// The anchored Sobolev kernel
/// `K(x, y) = prod_j (1 + gamma_j min(1 - x_j, 1 - y_j))` on `[0, 1]^(2s)`.
pub fn sobolev_kernel(space: &WeightedSpace, x: &[f64], y: &[f64]) -> Result<f64> {
    if space.anchor != Anchor::One {
        return Err(QmcError::Domain("sobolev_kernel requires the anchor-1 space".into()));
    }
    check_cube_point(x, space.dim())?;
    check_cube_point(y, space.dim())?;
    let mut out = 1.0;
    for j in 0..space.dim() {
        out *= 1.0 + space.gamma[j] * (1.0 - x[j].max(y[j]));
    }
    Ok(out)
}

/// The unanchored kernel
/// `prod_j (1 + gamma_j (B2({x_j - y_j}) / 2 + (x_j - 1/2)(y_j - 1/2)))`
/// with `B2(t) = t^2 - t + 1/6`.
pub fn unanchored_kernel(space: &WeightedSpace, x: &[f64], y: &[f64]) -> Result<f64> {
    check_cube_point(x, space.dim())?;
    check_cube_point(y, space.dim())?;
    let mut out = 1.0;
    for j in 0..space.dim() {
        let frac = (x[j] - y[j]).rem_euclid(1.0);
        out *= 1.0
            + space.gamma[j] * (bernoulli2(frac) / 2.0 + (x[j] - 0.5) * (y[j] - 0.5));
    }
    Ok(out)
}

/// The second Bernoulli polynomial `B2(t) = t^2 - t + 1/6`.
pub fn bernoulli2(t: f64) -> f64 {
    t * t - t + 1.0 / 6.0
}

/// Shift-invariant coefficient of the anchored Sobolev kernel. Strictly
/// positive for every k (`1/sin^2 >= 1 > 1/3`).
pub fn r_sobolev(p: u32, gamma: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0 + gamma / 3.0;
    }
    let a = digit_length(p, k);
    let kappa = leading_digit(p, k);
    let s = sin_digit_angle(kappa, p);
    gamma / (2.0 * (p as f64).powi(2 * a as i32)) * (1.0 / (s * s) - 1.0 / 3.0)
}

/// Shift-invariant coefficient of the unanchored kernel: the k = 0 entry
/// becomes 1, every other entry equals the anchored one.
pub fn r_unanchored(p: u32, gamma: f64, k: u64) -> f64 {
    if k == 0 {
        1.0
    } else {
        r_sobolev(p, gamma, k)
    }
}

/// The k = 0 coefficient for anchor w: `1 + gamma (w^2 - w + 1/3)`.
/// For k > 0 the coefficients do not depend on the anchor.
pub fn anchor_w_r0(gamma: f64, w: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&w));
    1.0 + gamma * (w * w - w + 1.0 / 3.0)
}

/// Closed form of the box sum `sum_{k < p^g} r_{p,gamma}(k)`
/// `= 1 + gamma/3 + gamma/6 (1 - p^-g)`; `g = 0` leaves only the k = 0 term.
pub fn r_sum_box(p: u32, gamma: f64, g: u32) -> f64 {
    if g == 0 {
        return 1.0 + gamma / 3.0;
    }
    1.0 + gamma / 3.0 + gamma / 6.0 * (1.0 - (p as f64).powi(-(g as i32)))
}

/// The full series `sum_k r_{p,gamma}(k) = 1 + gamma/2` (the g -> infinity
/// limit of [`r_sum_box`]).
pub fn r_total(gamma: f64) -> f64 {
    1.0 + gamma / 2.0
}

/// Product form of [`r_sum_box`] over all coordinates.
pub fn r_sum_box_multi(bases: &[u32], gamma: &[f64], g: &[u32]) -> f64 {
    bases
        .iter()
        .zip(gamma)
        .zip(g)
        .map(|((&p, &gam), &gj)| r_sum_box(p, gam, gj))
        .product()
}

/// Product form of [`r_total`] over all coordinates.
pub fn r_total_multi(gamma: &[f64]) -> f64 {
    gamma.iter().map(|&g| r_total(g)).product()
}

/// Tail mass `sum_{k not in Delta_p(g)} r(k)` of the Sobolev coefficients,
/// exactly `prod (1 + gamma_j/2) - prod (box sums)`.
pub fn r_tail_multi(bases: &[u32], gamma: &[f64], g: &[u32]) -> f64 {
    (r_total_multi(gamma) - r_sum_box_multi(bases, gamma, g)).max(0.0)
}

/// Korobov-type coefficient `r_{p,alpha,gamma}(k)`: 1 at k = 0, otherwise
/// `gamma p^(-alpha floor(log_p k))`.
pub fn r_korobov(p: u32, alpha: f64, gamma: f64, k: u64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(QmcError::Domain(format!("alpha = {alpha} must be > 1")));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let a = digit_length(p, k);
    Ok(gamma * (p as f64).powf(-alpha * (a - 1) as f64))
}

/// Closed form of `sum_{k < p^g} r_{p,alpha,gamma}(k)`; there are
/// `p^(a-1) (p-1)` indices of digit length a, each weighing
/// `gamma p^(-alpha (a-1))`, so the sum is a geometric series in
/// `p^(1 - alpha)`.
pub fn korobov_sum_box(p: u32, alpha: f64, gamma: f64, g: u32) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(QmcError::Domain(format!("alpha = {alpha} must be > 1")));
    }
    let q = (p as f64).powf(1.0 - alpha);
    Ok(1.0 + gamma * (p - 1) as f64 * (1.0 - q.powi(g as i32)) / (1.0 - q))
}

/// The full Korobov series `1 + gamma (p-1) p^alpha / (p^alpha - p)`.
pub fn korobov_total(p: u32, alpha: f64, gamma: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(QmcError::Domain(format!("alpha = {alpha} must be > 1")));
    }
    let q = (p as f64).powf(1.0 - alpha);
    Ok(1.0 + gamma * (p - 1) as f64 / (1.0 - q))
}

/// Korobov tail `sum_{k >= p^g} r(k) = gamma (p-1) p^(g(1-alpha)) / (1 - p^(1-alpha))`.
pub fn korobov_tail(p: u32, alpha: f64, gamma: f64, g: u32) -> Result<f64> {
    Ok((korobov_total(p, alpha, gamma)? - korobov_sum_box(p, alpha, gamma, g)?).max(0.0))
}

/// Per-coordinate partial sum `sum_{k < p^g} r(k) beta_k(x) conj(beta_k(y))`
/// from the first g digits of x and y. The angle per index is the exact
/// rational `K (Z_x - Z_y) / p^a mod 1`.
fn coordinate_series(p: u32, gamma: f64, g: u32, r0: f64, x: f64, y: f64) -> Result<Complex64> {
    let limit = (p as u64)
        .checked_pow(g)
        .filter(|&l| l <= 1 << 22)
        .ok_or_else(|| QmcError::ResourceLimit(format!("p^g = {p}^{g} too large to enumerate")))?;
    let dx = f64_digits(x, p, g as usize)?;
    let dy = f64_digits(y, p, g as usize)?;
    // phi^+ truncations of x and y as integers mod p^a for growing a
    let mut acc = Complex64::new(r0, 0.0);
    for k in 1..limit {
        let a = digit_length(p, k) as usize;
        let (num_k, den) = radical_inverse_fraction(p, k);
        let mut zx = 0u128;
        let mut zy = 0u128;
        let mut pw = 1u128;
        for r in 0..a {
            zx += dx[r] as u128 * pw;
            zy += dy[r] as u128 * pw;
            pw *= p as u128;
        }
        let angle = (num_k * ((zx + den - zy) % den)) % den;
        acc += r_sobolev(p, gamma, k) * unit_exp_frac(angle, den);
    }
    Ok(acc)
}

/// Truncated series of the p-adic shift-invariant kernel
/// `K_sh(x, y) = sum_k r(k) beta_k(x) conj(beta_k(y))` over the box
/// `Delta_p(g)`, together with the certified tail bound
/// `sum_{k not in Delta(g)} r(k)` (every dropped term has modulus at most
/// r(k)). The returned value is real; the symmetrized imaginary part is
/// checked to vanish.
///
/// Valid for the anchor-1, anchor-w, and unanchored spaces (only the k = 0
/// coefficient differs). No closed form exists for `K_sh` itself; the pair
/// (value, tail) is an exact enclosure.
pub fn shift_invariant_kernel(
    space: &WeightedSpace,
    x: &[f64],
    y: &[f64],
    g: &[u32],
) -> Result<(f64, f64)> {
    let s = space.dim();
    check_cube_point(x, s)?;
    check_cube_point(y, s)?;
    if g.len() != s {
        return Err(QmcError::DimensionMismatch { expected: s, got: g.len() });
    }
    if x.iter().chain(y).any(|&c| c >= 1.0) {
        return Err(QmcError::Domain("shift-invariant kernel needs points in [0, 1)".into()));
    }
    if g.contains(&0) {
        return Err(QmcError::Domain("truncation exponents g_j must be >= 1".into()));
    }
    let mut value = Complex64::new(1.0, 0.0);
    let mut total = 1.0;
    let mut box_sum = 1.0;
    for j in 0..s {
        let p = space.bases[j];
        let gamma = space.gamma[j];
        let r0 = space.r_zero(j);
        value *= coordinate_series(p, gamma, g[j], r0, x[j], y[j])?;
        total *= r0 + gamma / 6.0;
        box_sum *= r0 + gamma / 6.0 * (1.0 - (p as f64).powi(-(g[j] as i32)));
    }
    if value.im.abs() > 1e-10 {
        return Err(QmcError::NumericalConsistency(format!(
            "shift-invariant kernel series has imaginary part {}",
            value.im
        )));
    }
    Ok((value.re, (total - box_sum).max(0.0)))
}
