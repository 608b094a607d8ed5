//! Worst-case integration errors in the weighted spaces: exact squared
//! errors from the kernel sum, root-mean-square errors over random p-adic
//! shifts (Monte Carlo and exact series), and the theoretical bounds.
//!
//! For any reproducing kernel K and points `x_0, ..., x_{N-1}`,
//!
//! ```text
//! e^2 = int int K - (2/N) sum_n int K(x_n, .) + (1/N^2) sum_{m,n} K(x_m, x_n).
//! ```
//!
//! For the anchored Sobolev kernel the two integrals have closed forms
//! `int int K = prod (1 + gamma_j/3)` and
//! `int K(x, .) = prod (1 + gamma_j (1 - x_j^2) / 2)`, both validated against
//! quadrature in the tests.
//!
//! The squared RMS error of the shifted sequence is the series
//! `sum_{k != 0} r(k) |S_N(k) / N|^2` over the exact character sums
//! `S_N(k) = sum_{n<N} e(n theta_k)`. Two independent evaluations are
//! implemented: direct enumeration of the truncation box (geometric sum per
//! index), and a factored form that groups the box by digit length and
//! leading digit per coordinate,
//!
//! ```text
//! sum_{k in Delta(g)} r(k) e(d theta_k) = prod_j W_j(d),
//! W_j(d) = r_j(0) + sum_{a <= g_j, p^(a-1) | d} w_j(a)
//!              sum_{kappa=1}^{p-1} c_j(kappa) e(d kappa / p^a),
//! ```
//!
//! so the partial sum is a pair sum over n - m with O(N log N) cost instead
//! of O(|Delta(g)|). The two routes agree to rounding and are tested against
//! each other; the factored route makes large truncation boxes (s = 3,
//! N = 2^12 and beyond) affordable. Either way the dropped tail is bounded
//! by the closed-form coefficient mass outside the box.

use crate::error::{QmcError, Result};
use crate::function_system::{IndexBox, IndexBoxMode};
use crate::halton::{halton_block, HaltonSpec, PointSet};
use crate::kernels::{
    korobov_sum_box, korobov_total, r_sobolev, r_sum_box, r_tail_multi, GammaSeq,
};
use crate::padic::{radical_inverse_fraction, sample_shift};
use crate::primes::{first_primes, validate_bases};
use crate::stats::mean_and_standard_error;
use crate::trig::{sinpi_frac, unit_exp_frac};
use num_complex::Complex64;
use rayon::prelude::*;

/// Digits drawn per shift coordinate: enough that `p^-P <= 2^-64` for every
/// base, so truncation bias sits below double-precision resolution.
pub const SHIFT_PRECISION: usize = 64;

/// Box-enumeration budget; larger truncation boxes go through the factored
/// route automatically.
const BOX_ENUMERATION_LIMIT: u128 = 1 << 22;

/// Negative values of squared errors within this margin are rounding noise
/// and clamp to zero; anything more negative is a consistency failure.
const NEGATIVE_CLAMP: f64 = 1e-12;

/// Monte Carlo estimate of a squared error over independent random shifts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmsEstimate {
    pub mean_e_sq: f64,
    pub std_error: f64,
    pub replicates: usize,
}

/// A truncated series value with its certified tail bound: the exact series
/// lies in `[partial_sum, partial_sum + tail_bound]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub partial_sum: f64,
    pub tail_bound: f64,
}

/// One row of an error study; optional fields are absent when the
/// corresponding computation was not requested.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub space: String,
    pub s: usize,
    pub n: u64,
    pub replicates: Option<usize>,
    pub e_sq_mean: Option<f64>,
    pub e_sq_std_error: Option<f64>,
    pub series_value: Option<f64>,
    pub series_tail: Option<f64>,
    pub theory_bound: Option<f64>,
    pub seed: Option<u64>,
}

impl std::fmt::Display for ErrorReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn opt(v: Option<f64>) -> String {
            v.map_or_else(|| "-".into(), |x| format!("{x:.6e}"))
        }
        write!(
            f,
            "space={} s={} N={} M={} e_sq={}(se {}) series={}(+{}) bound={}",
            self.space,
            self.s,
            self.n,
            self.replicates.map_or_else(|| "-".into(), |m| m.to_string()),
            opt(self.e_sq_mean),
            opt(self.e_sq_std_error),
            opt(self.series_value),
            opt(self.series_tail),
            opt(self.theory_bound),
        )
    }
}

fn clamp_e_sq(value: f64, context: &str) -> Result<f64> {
    if value < -NEGATIVE_CLAMP {
        return Err(QmcError::NumericalConsistency(format!(
            "{context}: squared error {value} is negative beyond rounding tolerance"
        )));
    }
    Ok(value.max(0.0))
}

/// `int int K = prod_j (1 + gamma_j / 3)`.
fn kernel_mass(gamma: &[f64]) -> f64 {
    gamma.iter().map(|g| 1.0 + g / 3.0).product()
}

/// `int K(x, .) = prod_j (1 + gamma_j (1 - x_j^2) / 2)`.
fn kernel_row_integral(x: &[f64], gamma: &[f64]) -> f64 {
    x.iter().zip(gamma).map(|(&xj, &g)| 1.0 + g * (1.0 - xj * xj) / 2.0).product()
}

/// Exact squared worst-case error of a point set in the anchored Sobolev
/// space, over coordinates in the closed cube `[0, 1]^s` given row-major.
pub fn wce_sq_sobolev_flat(coords: &[f64], dim: usize, gamma: &[f64]) -> Result<f64> {
    if dim == 0 || coords.len() % dim != 0 || coords.is_empty() {
        return Err(QmcError::DimensionMismatch { expected: dim, got: coords.len() });
    }
    if gamma.len() != dim {
        return Err(QmcError::DimensionMismatch { expected: dim, got: gamma.len() });
    }
    if let Some(&bad) = coords.iter().find(|c| !(0.0..=1.0).contains(*c)) {
        return Err(QmcError::Domain(format!("coordinate {bad} outside [0, 1]")));
    }
    let n = coords.len() / dim;
    let a = kernel_mass(gamma);
    let b_sum: f64 = coords.chunks_exact(dim).map(|row| kernel_row_integral(row, gamma)).sum();
    let mut pair_sum = 0.0;
    for m in 0..n {
        let xm = &coords[m * dim..(m + 1) * dim];
        // diagonal term
        let mut diag = 1.0;
        for j in 0..dim {
            diag *= 1.0 + gamma[j] * (1.0 - xm[j]);
        }
        pair_sum += diag;
        for xn in coords[..m * dim].chunks_exact(dim) {
            let mut k = 1.0;
            for j in 0..dim {
                k *= 1.0 + gamma[j] * (1.0 - xm[j].max(xn[j]));
            }
            pair_sum += 2.0 * k;
        }
    }
    let nf = n as f64;
    clamp_e_sq(a - 2.0 / nf * b_sum + pair_sum / (nf * nf), "wce_sq_sobolev")
}

/// [`wce_sq_sobolev_flat`] over a [`PointSet`].
pub fn wce_sq_sobolev(points: &PointSet, gamma: &[f64]) -> Result<f64> {
    wce_sq_sobolev_flat(
        points.rows().flatten().copied().collect::<Vec<_>>().as_slice(),
        points.dim(),
        gamma,
    )
}

/// Monte Carlo mean and standard error of the squared worst-case error over
/// independent p-adic shifts of the first n sequence points. Deterministic
/// given the seed; replicates are keyed individually so the result does not
/// depend on scheduling.
pub fn rms_wce_monte_carlo(
    spec: &HaltonSpec,
    gamma: &[f64],
    n: u64,
    replicates: usize,
    seed: u64,
) -> Result<RmsEstimate> {
    if replicates < 2 {
        return Err(QmcError::Domain("need at least 2 replicates".into()));
    }
    if spec.shift().is_some() {
        return Err(QmcError::Domain(
            "rms_wce_monte_carlo draws its own shifts; pass an unshifted spec".into(),
        ));
    }
    let values: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let shift = sample_shift(spec.bases(), SHIFT_PRECISION, seed, rep as u64)?;
            let shifted = spec.clone().with_shift(shift)?;
            let points = halton_block(&shifted, n as usize)?;
            wce_sq_sobolev(&points, gamma)
        })
        .collect::<Result<_>>()?;
    let (mean, std_error) = mean_and_standard_error(&values);
    Ok(RmsEstimate { mean_e_sq: mean, std_error, replicates })
}

/// Default truncation box: `g_j = ceil(2 log_{p_j} N) + 1`, at least 1.
pub fn default_truncation(bases: &[u32], n: u64) -> Vec<u32> {
    bases
        .iter()
        .map(|&p| {
            let g = if n <= 1 { 0 } else { (2.0 * (n as f64).ln() / (p as f64).ln()).ceil() as u32 };
            (g + 1).max(1)
        })
        .collect()
}

/// Per-coordinate data for the factored series route.
struct CoordSeries {
    p: u64,
    g: u32,
    r_zero: f64,
    /// weight of the digit-length-a block (multiplicity folded in), a = 1..
    level_weights: Vec<f64>,
    /// per leading digit kappa = 1..p-1
    digit_coefficients: Vec<f64>,
    /// closed-form W(0) = sum of all coefficients in the box
    box_sum: f64,
}

impl CoordSeries {
    /// `W(d) = sum_{k < p^g} r(k) e(d phi_p(k))`, exact in the angle
    /// arithmetic. Only digit lengths a with `p^(a-1) | d` contribute.
    fn w(&self, d: u64) -> Complex64 {
        if d == 0 {
            return Complex64::new(self.box_sum, 0.0);
        }
        let mut acc = Complex64::new(self.r_zero, 0.0);
        let mut pa_prev = 1u128; // p^(a-1)
        let mut pa = self.p as u128; // p^a
        for a in 1..=self.g {
            if (a as usize) > self.level_weights.len() || d as u128 % pa_prev != 0 {
                break;
            }
            let dm = d as u128 % pa;
            let mut inner = Complex64::new(0.0, 0.0);
            for kappa in 1..self.p as u32 {
                inner += self.digit_coefficients[(kappa - 1) as usize]
                    * unit_exp_frac(dm * kappa as u128 % pa, pa);
            }
            acc += self.level_weights[(a - 1) as usize] * inner;
            pa_prev = pa;
            pa *= self.p as u128;
        }
        acc
    }
}

fn sobolev_coord_series(p: u32, gamma: f64, g: u32, max_level: u32) -> CoordSeries {
    let levels = g.min(max_level);
    let digit_coefficients: Vec<f64> = (1..p)
        .map(|kappa| {
            let s = crate::trig::sin_digit_angle(kappa, p);
            1.0 / (s * s) - 1.0 / 3.0
        })
        .collect();
    let level_weights: Vec<f64> =
        (1..=levels).map(|a| gamma / (2.0 * (p as f64).powi(a as i32 + 1))).collect();
    CoordSeries {
        p: p as u64,
        g,
        r_zero: 1.0 + gamma / 3.0,
        level_weights,
        digit_coefficients,
        box_sum: r_sum_box(p, gamma, g),
    }
}

fn korobov_coord_series(p: u32, alpha: f64, gamma: f64, g: u32, max_level: u32) -> Result<CoordSeries> {
    let levels = g.min(max_level);
    let level_weights: Vec<f64> = (1..=levels)
        .map(|a| gamma * (p as f64).powf(-alpha * (a - 1) as f64) * (p as f64).powi(a as i32 - 1))
        .collect();
    Ok(CoordSeries {
        p: p as u64,
        g,
        r_zero: 1.0,
        level_weights,
        digit_coefficients: vec![1.0; (p - 1) as usize],
        box_sum: korobov_sum_box(p, alpha, gamma, g)?,
    })
}

/// Digit levels that can possibly divide a lag d < n: `p^(a-1) <= n`.
fn max_level_for(p: u32, n: u64) -> u32 {
    let mut level = 1u32;
    let mut pw = 1u128;
    while pw * p as u128 <= n as u128 {
        pw *= p as u128;
        level += 1;
    }
    level
}

/// Factored evaluation of `sum_{k in Delta*(g)} r(k) |S_n(k)/n|^2` as a pair
/// sum over lags. `coords` carry the per-coordinate W data; `a_zero` is the
/// k = 0 coefficient product that the punctured box excludes.
fn series_pair_route(coords: &[CoordSeries], n: u64, a_zero: f64) -> f64 {
    // d = 0 term
    let w0: f64 = coords.iter().map(|c| c.box_sum).product();
    let mut total = n as f64 * (w0 - a_zero);
    for d in 1..n {
        let mut prod = Complex64::new(1.0, 0.0);
        for c in coords {
            prod *= c.w(d);
        }
        // the k = 0 coefficient contributes a_zero at every lag
        total += 2.0 * (n - d) as f64 * (prod.re - a_zero);
    }
    (total / (n as f64 * n as f64)).max(0.0)
}

/// Direct enumeration of the punctured truncation box; each index gets its
/// exact geometric character sum. `r_coord(j, k_j)` supplies the coordinate
/// coefficient.
fn series_box_route<R>(bases: &[u32], g: &[u32], n: u64, r_coord: R) -> Result<f64>
where
    R: Fn(usize, u64) -> f64,
{
    let boxed = IndexBox::new(g.to_vec(), IndexBoxMode::Punctured)?;
    let mut sum = 0.0f64;
    boxed.for_each(bases, |k| {
        let mut num = 0u128;
        let mut den = 1u128;
        for (&p, &kj) in bases.iter().zip(k) {
            let (kn, kd) = radical_inverse_fraction(p, kj);
            num = num * kd + kn * den;
            den *= kd;
        }
        num %= den;
        debug_assert!(num != 0, "degenerate theta inside punctured box");
        let ratio = sinpi_frac(n as u128 * num, den) / sinpi_frac(num, den);
        let weight: f64 = k.iter().enumerate().map(|(j, &kj)| r_coord(j, kj)).product();
        sum += weight * (ratio / n as f64) * (ratio / n as f64);
    })?;
    Ok(sum)
}

/// Series for the expected squared unweighted L2 discrepancy over shifts:
/// the coefficients are the gamma = 1 Sobolev ones with the k = 0 entry at
/// 1/3 instead of 1 + 1/3 (the kernel `prod min(1-x, 1-y)` has no constant
/// term).
pub(crate) fn l2_series_unweighted(
    spec: &HaltonSpec,
    n: u64,
    g: Option<&[u32]>,
) -> Result<SeriesValue> {
    let g = g.map_or_else(|| default_truncation(spec.bases(), n), |g| g.to_vec());
    check_series_args(spec, n, &g)?;
    let bases = spec.bases();
    let s = bases.len();
    let box_sums: Vec<f64> =
        bases.iter().zip(&g).map(|(&p, &gj)| r_sum_box(p, 1.0, gj) - 1.0).collect();
    let tail_bound = (0.5f64.powi(s as i32) - box_sums.iter().product::<f64>()).max(0.0);
    let boxed = IndexBox::new(g.clone(), IndexBoxMode::Punctured)?;
    let partial_sum = if boxed.count(bases).map_or(false, |c| c <= BOX_ENUMERATION_LIMIT) {
        series_box_route(bases, &g, n, |j, k| {
            if k == 0 {
                1.0 / 3.0
            } else {
                r_sobolev(bases[j], 1.0, k)
            }
        })?
    } else {
        let coords: Vec<CoordSeries> = bases
            .iter()
            .zip(&g)
            .map(|(&p, &gj)| {
                let mut c = sobolev_coord_series(p, 1.0, gj, max_level_for(p, n));
                c.r_zero -= 1.0;
                c.box_sum -= 1.0;
                c
            })
            .collect();
        series_pair_route(&coords, n, 3.0f64.powi(-(s as i32)))
    };
    Ok(SeriesValue { partial_sum, tail_bound })
}

fn check_series_args(spec: &HaltonSpec, n: u64, g: &[u32]) -> Result<()> {
    if n == 0 {
        return Err(QmcError::Domain("need n >= 1".into()));
    }
    if g.len() != spec.dim() {
        return Err(QmcError::DimensionMismatch { expected: spec.dim(), got: g.len() });
    }
    if g.contains(&0) {
        return Err(QmcError::Domain("truncation exponents g_j must be >= 1".into()));
    }
    Ok(())
}

/// Squared RMS worst-case error of the randomly shifted sequence, as the
/// truncated series `sum_{k in Delta*(g)} r_{p,gamma}(k) |S_N(k)/N|^2` plus
/// the certified tail bound `sum_{k not in Delta(g)} r(k)` (valid because
/// `|S_N/N| <= 1`). `g = None` uses [`default_truncation`].
///
/// The value does not depend on the spec's start index or attached shift:
/// both multiply each character sum by a unimodular constant.
pub fn rms_wce_series(
    spec: &HaltonSpec,
    gamma: &[f64],
    n: u64,
    g: Option<&[u32]>,
) -> Result<SeriesValue> {
    if gamma.len() != spec.dim() {
        return Err(QmcError::DimensionMismatch { expected: spec.dim(), got: gamma.len() });
    }
    let g = g.map_or_else(|| default_truncation(spec.bases(), n), |g| g.to_vec());
    check_series_args(spec, n, &g)?;
    let bases = spec.bases();
    let tail_bound = r_tail_multi(bases, gamma, &g);
    let boxed = IndexBox::new(g.clone(), IndexBoxMode::Punctured)?;
    let partial_sum = if boxed.count(bases).map_or(false, |c| c <= BOX_ENUMERATION_LIMIT) {
        series_box_route(bases, &g, n, |j, k| r_sobolev(bases[j], gamma[j], k))?
    } else {
        let coords: Vec<CoordSeries> = bases
            .iter()
            .zip(gamma)
            .zip(&g)
            .map(|((&p, &gam), &gj)| sobolev_coord_series(p, gam, gj, max_level_for(p, n)))
            .collect();
        let a_zero: f64 = gamma.iter().map(|g| 1.0 + g / 3.0).product();
        series_pair_route(&coords, n, a_zero)
    };
    Ok(SeriesValue { partial_sum, tail_bound })
}

/// The upper bound of the main error theorem:
/// `(1/N^2) [prod (1 + gamma_j (log N) p_j^2 / log p_j)
///           + prod (1 + gamma_j/2) prod (1 + gamma_j p_j / 6)]`,
/// natural logarithms throughout.
pub fn theory_bound_sobolev(bases: &[u32], gamma: &[f64], n: u64) -> Result<f64> {
    validate_bases(bases)?;
    if gamma.len() != bases.len() {
        return Err(QmcError::DimensionMismatch { expected: bases.len(), got: gamma.len() });
    }
    if n < 2 {
        return Err(QmcError::Domain("theory bound needs N >= 2".into()));
    }
    let log_n = (n as f64).ln();
    let first: f64 = bases
        .iter()
        .zip(gamma)
        .map(|(&p, &g)| 1.0 + g * log_n * (p as f64) * (p as f64) / (p as f64).ln())
        .product();
    let second: f64 = gamma.iter().map(|&g| 1.0 + g / 2.0).product::<f64>()
        * bases.iter().zip(gamma).map(|(&p, &g)| 1.0 + g * p as f64 / 6.0).product::<f64>();
    Ok((first + second) / (n as f64 * n as f64))
}

/// Error report for the Korobov-type space: truncated series with tail, and
/// the displayed theoretical bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KorobovReport {
    pub partial_sum: f64,
    pub tail_bound: f64,
    /// `(1/N^2) [prod (1 + 2 gamma_j p_j^2 log N)
    ///           + prod (1 + gamma_j p_j) prod (1 + gamma_j p_j^2)]`
    pub theory_bound: f64,
    /// The sharper `(1/N^2) (-1 + prod (1 + 2 gamma_j p_j^2))`, valid when
    /// every `alpha_j > 2`.
    pub theory_bound_alpha_gt2: Option<f64>,
}

/// Squared worst-case error of the *unshifted* Halton sequence in the
/// Korobov-type p-adic space, as a truncated series plus certified tail.
pub fn wce_sq_korobov(
    spec: &HaltonSpec,
    alpha: &[f64],
    gamma: &[f64],
    n: u64,
    g: Option<&[u32]>,
) -> Result<KorobovReport> {
    if spec.shift().is_some() {
        return Err(QmcError::Domain("the Korobov-space result is for unshifted Halton".into()));
    }
    if alpha.len() != spec.dim() || gamma.len() != spec.dim() {
        return Err(QmcError::DimensionMismatch { expected: spec.dim(), got: alpha.len() });
    }
    if let Some(&a) = alpha.iter().find(|&&a| !(a > 1.0)) {
        return Err(QmcError::Domain(format!("alpha = {a} must be > 1")));
    }
    let g = g.map_or_else(|| default_truncation(spec.bases(), n), |g| g.to_vec());
    check_series_args(spec, n, &g)?;
    let bases = spec.bases();

    let mut total = 1.0;
    let mut box_total = 1.0;
    for j in 0..bases.len() {
        total *= korobov_total(bases[j], alpha[j], gamma[j])?;
        box_total *= korobov_sum_box(bases[j], alpha[j], gamma[j], g[j])?;
    }
    let tail_bound = (total - box_total).max(0.0);

    let boxed = IndexBox::new(g.clone(), IndexBoxMode::Punctured)?;
    let partial_sum = if boxed.count(bases).map_or(false, |c| c <= BOX_ENUMERATION_LIMIT) {
        series_box_route(bases, &g, n, |j, k| {
            crate::kernels::r_korobov(bases[j], alpha[j], gamma[j], k).expect("alpha validated")
        })?
    } else {
        let coords: Vec<CoordSeries> = bases
            .iter()
            .zip(alpha.iter().zip(gamma))
            .zip(&g)
            .map(|((&p, (&al, &gam)), &gj)| {
                korobov_coord_series(p, al, gam, gj, max_level_for(p, n))
            })
            .collect::<Result<_>>()?;
        series_pair_route(&coords, n, 1.0)
    };

    let log_n = (n.max(1) as f64).ln();
    let p2 = |p: u32| (p as f64) * (p as f64);
    let first: f64 =
        bases.iter().zip(gamma).map(|(&p, &g)| 1.0 + 2.0 * g * p2(p) * log_n).product();
    let second: f64 = bases.iter().zip(gamma).map(|(&p, &g)| 1.0 + g * p as f64).product::<f64>()
        * bases.iter().zip(gamma).map(|(&p, &g)| 1.0 + g * p2(p)).product::<f64>();
    let theory_bound = (first + second) / (n as f64 * n as f64);
    let theory_bound_alpha_gt2 = if alpha.iter().all(|&a| a > 2.0) {
        let prod: f64 = bases.iter().zip(gamma).map(|(&p, &g)| 1.0 + 2.0 * g * p2(p)).product();
        Some((prod - 1.0) / (n as f64 * n as f64))
    } else {
        None
    };

    Ok(KorobovReport { partial_sum, tail_bound, theory_bound, theory_bound_alpha_gt2 })
}

/// The Hickernell-Kritzer-style lower-bound constant of the Korobov-type
/// space: `c_K = -1 + prod_j (1 + gamma_j p_j^alpha_j (p_j - 1) / (p_j^alpha_j - p_j))`,
/// which is exactly `-1 + prod_j sum_k r_{p_j,alpha_j,gamma_j}(k)`.
pub fn korobov_ck(bases: &[u32], alpha: &[f64], gamma: &[f64]) -> Result<f64> {
    let mut prod = 1.0;
    for j in 0..bases.len() {
        prod *= korobov_total(bases[j], alpha[j], gamma[j])?;
    }
    Ok(prod - 1.0)
}

/// One checkpoint of the weight-condition diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightConditionRow {
    pub j: u64,
    /// partial sum of `gamma_j p_j^2 / log p_j` (main theorem condition)
    pub theorem_sum: f64,
    /// partial sum of `sqrt(gamma_j) j log j` (Wang's condition)
    pub wang_sum: f64,
    /// partial sum of `gamma_j j^2 log j` (corollary condition, first-primes bases)
    pub corollary_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightConditionReport {
    /// checkpoints at j = 1, 2, 4, ... and at j_max
    pub rows: Vec<WeightConditionRow>,
    /// sizes of the last summand of each series at j_max
    pub final_increments: (f64, f64, f64),
}

impl WeightConditionReport {
    pub fn final_row(&self) -> WeightConditionRow {
        *self.rows.last().expect("at least one checkpoint")
    }
}

/// Partial sums up to `j_max` of the three weight-condition series, for
/// diagnostics: the main theorem condition (with p_j the j-th prime), Wang's
/// condition, and the corollary condition.
pub fn weight_condition_partial_sums(gamma: &GammaSeq, j_max: u64) -> Result<WeightConditionReport> {
    if j_max < 1 {
        return Err(QmcError::Domain("need j_max >= 1".into()));
    }
    let primes = first_primes(j_max as usize);
    let mut rows = Vec::new();
    let (mut theorem_sum, mut wang_sum, mut corollary_sum) = (0.0f64, 0.0f64, 0.0f64);
    let mut increments = (0.0, 0.0, 0.0);
    let mut checkpoint = 1u64;
    for j in 1..=j_max {
        let g = gamma.value(j as usize);
        let p = primes[(j - 1) as usize] as f64;
        let jf = j as f64;
        increments = (g * p * p / p.ln(), g.sqrt() * jf * jf.ln(), g * jf * jf * jf.ln());
        theorem_sum += increments.0;
        wang_sum += increments.1;
        corollary_sum += increments.2;
        if j == checkpoint || j == j_max {
            rows.push(WeightConditionRow { j, theorem_sum, wang_sum, corollary_sum });
            while checkpoint <= j {
                checkpoint *= 2;
            }
        }
    }
    Ok(WeightConditionReport { rows, final_increments: increments })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point_set(bases: Vec<u32>, rows: Vec<Vec<f64>>) -> PointSet {
        PointSet::from_coords(bases, rows.into_iter().flatten().collect()).unwrap()
    }

    #[test]
    fn single_point_values() {
        for gamma in [0.25, 1.0, 1.7] {
            let at_one = wce_sq_sobolev_flat(&[1.0], 1, &[gamma]).unwrap();
            assert!((at_one - gamma / 3.0).abs() < 1e-14, "gamma={gamma}");
            let at_half = wce_sq_sobolev_flat(&[0.5], 1, &[gamma]).unwrap();
            assert!((at_half - gamma / 12.0).abs() < 1e-14, "gamma={gamma}");
            let at_zero = wce_sq_sobolev_flat(&[0.0], 1, &[gamma]).unwrap();
            assert!((at_zero - gamma / 3.0).abs() < 1e-14, "gamma={gamma}");
        }
    }

    #[test]
    fn gamma_scaling_is_exact_on_dyadic_weights() {
        for gamma in [0.75, 1.5, 3.0] {
            let one = wce_sq_sobolev_flat(&[1.0], 1, &[gamma]).unwrap();
            let two = wce_sq_sobolev_flat(&[1.0], 1, &[2.0 * gamma]).unwrap();
            assert_eq!(two, 2.0 * one);
        }
    }

    #[test]
    fn closed_form_ingredients_match_quadrature() {
        // int int K dx dy = 1 + gamma/3 (midpoint rule, 1-D factor)
        let q = 2048usize;
        for gamma in [0.5, 1.0, 3.0] {
            let mut mass = 0.0;
            for i in 0..q {
                let x = (i as f64 + 0.5) / q as f64;
                for j in 0..q {
                    let y = (j as f64 + 0.5) / q as f64;
                    mass += 1.0 + gamma * (1.0 - x.max(y));
                }
            }
            mass /= (q * q) as f64;
            assert!((mass - kernel_mass(&[gamma])).abs() < 1e-5, "gamma={gamma}");
            // int K(x, .) dy = 1 + gamma (1 - x^2)/2 at several anchors x
            for x in [0.0f64, 0.3, 0.9, 1.0] {
                let mut row = 0.0;
                for j in 0..q {
                    let y = (j as f64 + 0.5) / q as f64;
                    row += 1.0 + gamma * (1.0 - x.max(y));
                }
                row /= q as f64;
                assert!(
                    (row - kernel_row_integral(&[x], &[gamma])).abs() < 1e-6,
                    "gamma={gamma} x={x}"
                );
            }
        }
    }

    #[test]
    fn wce_of_two_points_matches_hand_expansion() {
        // N=2, s=1: direct expansion of the three kernel terms
        let gamma = 1.0;
        let (x0, x1) = (0.25, 0.75);
        let a = 1.0 + gamma / 3.0;
        let b = (1.0 + gamma * (1.0 - x0 * x0) / 2.0) + (1.0 + gamma * (1.0 - x1 * x1) / 2.0);
        let k = |u: f64, v: f64| 1.0 + gamma * (1.0 - u.max(v));
        let pair = k(x0, x0) + k(x1, x1) + 2.0 * k(x0, x1);
        let expected = a - b + pair / 4.0;
        let got = wce_sq_sobolev(&point_set(vec![2], vec![vec![x0], vec![x1]]), &[gamma]).unwrap();
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let spec = HaltonSpec::new(vec![2, 3]).unwrap();
        let a = rms_wce_monte_carlo(&spec, &[1.0, 1.0], 16, 8, 42).unwrap();
        let b = rms_wce_monte_carlo(&spec, &[1.0, 1.0], 16, 8, 42).unwrap();
        assert_eq!(a, b);
        let c = rms_wce_monte_carlo(&spec, &[1.0, 1.0], 16, 8, 43).unwrap();
        assert_ne!(a.mean_e_sq, c.mean_e_sq);
    }

    #[test]
    fn series_routes_agree() {
        // box enumeration vs factored pair route on boxes small enough for both
        for n in [1u64, 2, 8, 33] {
            let g = [12u32];
            let box_val =
                series_box_route(&[2], &g, n, |_, k| r_sobolev(2, 1.0, k)).unwrap();
            let coords = vec![sobolev_coord_series(2, 1.0, 12, max_level_for(2, n))];
            let fast = series_pair_route(&coords, n, 1.0 + 1.0 / 3.0);
            assert!(
                (box_val - fast).abs() <= 1e-12 * box_val.max(1e-30),
                "n={n}: {box_val} vs {fast}"
            );
        }
        let spec2 = HaltonSpec::new(vec![2, 3]).unwrap();
        for n in [5u64, 50] {
            let g = [6u32, 4];
            let gamma = [1.0, 0.5];
            let box_val = series_box_route(spec2.bases(), &g, n, |j, k| {
                r_sobolev(spec2.bases()[j], gamma[j], k)
            })
            .unwrap();
            let coords: Vec<CoordSeries> = spec2
                .bases()
                .iter()
                .zip(gamma)
                .zip(g)
                .map(|((&p, gam), gj)| sobolev_coord_series(p, gam, gj, max_level_for(p, n)))
                .collect();
            let a_zero: f64 = gamma.iter().map(|g| 1.0 + g / 3.0).product();
            let fast = series_pair_route(&coords, n, a_zero);
            assert!(
                (box_val - fast).abs() <= 1e-11 * box_val.max(1e-30),
                "n={n}: {box_val} vs {fast}"
            );
        }
    }

    #[test]
    fn series_single_point_is_box_mass() {
        // N=1: S_1(k) = 1 for all k, so the partial sum is the punctured box mass
        let spec = HaltonSpec::new(vec![2, 3]).unwrap();
        let gamma = [1.0, 2.0];
        let g = [3u32, 2];
        let series = rms_wce_series(&spec, &gamma, 1, Some(&g)).unwrap();
        let expected = crate::kernels::r_sum_box_multi(spec.bases(), &gamma, &g)
            - gamma.iter().map(|g| 1.0 + g / 3.0).product::<f64>();
        assert!((series.partial_sum - expected).abs() < 1e-13);
    }

    #[test]
    fn series_partial_sum_is_monotone_in_g() {
        let spec = HaltonSpec::new(vec![2]).unwrap();
        let mut prev = 0.0;
        for g in 1..=14u32 {
            let v = rms_wce_series(&spec, &[1.0], 16, Some(&[g])).unwrap();
            assert!(v.partial_sum >= prev - 1e-15, "g={g}");
            prev = v.partial_sum;
        }
    }

    #[test]
    fn series_tail_is_the_le2_difference() {
        let spec = HaltonSpec::new(vec![2, 3]).unwrap();
        let gamma = [1.0, 0.5];
        let g = [5u32, 3];
        let series = rms_wce_series(&spec, &gamma, 8, Some(&g)).unwrap();
        let expected = crate::kernels::r_total_multi(&gamma)
            - crate::kernels::r_sum_box_multi(spec.bases(), &gamma, &g);
        assert!((series.tail_bound - expected).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_mean_matches_series_interval() {
        let spec = HaltonSpec::new(vec![2]).unwrap();
        let series = rms_wce_series(&spec, &[1.0], 16, Some(&[12])).unwrap();
        let mc = rms_wce_monte_carlo(&spec, &[1.0], 16, 500, 7).unwrap();
        let slack = 3.0 * (mc.std_error + series.tail_bound);
        assert!(
            mc.mean_e_sq >= series.partial_sum - slack
                && mc.mean_e_sq <= series.partial_sum + series.tail_bound + slack,
            "mc = {} vs series = [{}, {}] (se {})",
            mc.mean_e_sq,
            series.partial_sum,
            series.partial_sum + series.tail_bound,
            mc.std_error
        );
    }

    #[test]
    fn theory_bound_example_and_shape() {
        let b = theory_bound_sobolev(&[2], &[1.0], 2).unwrap();
        assert!((b - 1.75).abs() < 1e-12);
        assert!(theory_bound_sobolev(&[2], &[1.0], 1).is_err());
        // decreasing in N past small N
        let mut prev = f64::INFINITY;
        for e in 2..=14u32 {
            let v = theory_bound_sobolev(&[2, 3], &[1.0, 0.5], 1 << e).unwrap();
            assert!(v < prev);
            prev = v;
        }
        // dominates the series partial sum
        for e in [3u32, 6, 9] {
            let n = 1u64 << e;
            let series = rms_wce_series(&HaltonSpec::new(vec![2]).unwrap(), &[1.0], n, None).unwrap();
            assert!(series.partial_sum <= theory_bound_sobolev(&[2], &[1.0], n).unwrap());
        }
        // and the Monte Carlo means stay under it too
        for (bases, n) in [(vec![2u32], 16u64), (vec![2, 3], 32)] {
            let gamma = vec![1.0; bases.len()];
            let spec = HaltonSpec::new(bases.clone()).unwrap();
            let mc = rms_wce_monte_carlo(&spec, &gamma, n, 200, 3).unwrap();
            assert!(mc.mean_e_sq <= theory_bound_sobolev(&bases, &gamma, n).unwrap());
        }
    }

    #[test]
    fn rms_slope_is_near_minus_one_in_low_dimensions() {
        // log-log slope of the exact series RMS over N = 2^4 .. 2^12 for
        // s in {1,2,3} at unit weights; log factors keep it above -1.15
        // and the one-point floor keeps it below -0.80
        for s in 1..=3usize {
            let spec = HaltonSpec::new(crate::primes::first_primes(s)).unwrap();
            let gamma = vec![1.0; s];
            let (mut ns, mut rms) = (Vec::new(), Vec::new());
            for e in 4..=12u32 {
                let n = 1u64 << e;
                let series = rms_wce_series(&spec, &gamma, n, None).unwrap();
                ns.push(n as f64);
                rms.push(series.partial_sum.sqrt());
            }
            let fit = crate::stats::fit_loglog(&ns, &rms).unwrap();
            assert!(
                (-1.15..=-0.80).contains(&fit.slope),
                "s={s}: slope {}",
                fit.slope
            );
            assert!(fit.r_squared >= 0.98, "s={s}: r2 {}", fit.r_squared);
        }
    }

    #[test]
    fn korobov_report_values() {
        let spec = HaltonSpec::new(vec![2]).unwrap();
        let report = wce_sq_korobov(&spec, &[2.0], &[1.0], 1, Some(&[1])).unwrap();
        assert!((report.partial_sum - 1.0).abs() < 1e-13);
        assert!(report.theory_bound_alpha_gt2.is_none());
        let report3 = wce_sq_korobov(&spec, &[3.0], &[1.0], 4, Some(&[5])).unwrap();
        let sharp = report3.theory_bound_alpha_gt2.unwrap();
        assert!((sharp - (9.0 - 1.0) / 16.0).abs() < 1e-13);
        assert!(report3.partial_sum <= report3.theory_bound);
        assert!(wce_sq_korobov(&spec, &[1.0], &[1.0], 4, None).is_err());
    }

    #[test]
    fn korobov_ck_example() {
        let ck = korobov_ck(&[2], &[2.0], &[1.0]).unwrap();
        assert!((ck - 2.0).abs() < 1e-14);
        // and against the paper's explicit product form
        let explicit = -1.0
            + [(2u32, 2.0f64, 1.0f64), (3, 2.5, 0.5)]
                .iter()
                .map(|&(p, a, g)| {
                    let pf = p as f64;
                    1.0 + g * pf.powf(a) * (pf - 1.0) / (pf.powf(a) - pf)
                })
                .product::<f64>();
        let ck2 = korobov_ck(&[2, 3], &[2.0, 2.5], &[1.0, 0.5]).unwrap();
        assert!((ck2 - explicit).abs() < 1e-12);
    }

    #[test]
    fn weight_conditions_zero_and_split() {
        let zero = weight_condition_partial_sums(&GammaSeq::Constant(0.0), 100).unwrap();
        let last = zero.final_row();
        assert_eq!(
            (last.theorem_sum, last.wang_sum, last.corollary_sum),
            (0.0, 0.0, 0.0)
        );
        // gamma_j = j^-4 up to 10^6: the corollary series has visibly
        // converged while the Wang series still steps by (log j)/j
        let j_max = 1_000_000u64;
        let report = weight_condition_partial_sums(&GammaSeq::PowerLaw(4.0), j_max).unwrap();
        let (_, wang_inc, cor_inc) = report.final_increments;
        assert!(cor_inc < 1e-8, "corollary increment {cor_inc}");
        let j = j_max as f64;
        assert!((wang_inc - j.ln() / j).abs() < 1e-12);
        // same qualitative split at gamma_j = j^-3.1: corollary increments
        // are j^-1.1 log j (summable), Wang increments j^-0.55 log j (not)
        let report = weight_condition_partial_sums(&GammaSeq::PowerLaw(3.1), j_max).unwrap();
        let (_, wang_inc, cor_inc) = report.final_increments;
        assert!(cor_inc < 1e-5, "corollary increment {cor_inc}");
        assert!(wang_inc > 1e-3, "wang increment {wang_inc} should still be sizable");
        assert!(wang_inc / cor_inc > 100.0);
        // partial sums are recorded along geometric checkpoints
        assert!(report.rows.len() > 15);
        assert!(report.rows.windows(2).all(|w| w[0].corollary_sum <= w[1].corollary_sum));
    }

    #[test]
    fn series_is_invariant_under_start_index_and_shift() {
        let base = HaltonSpec::new(vec![2, 3]).unwrap();
        let a = rms_wce_series(&base, &[1.0, 1.0], 32, Some(&[8, 5])).unwrap();
        let b = rms_wce_series(&base.clone().with_start(17), &[1.0, 1.0], 32, Some(&[8, 5]))
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn error_report_formats() {
        let report = ErrorReport {
            space: "sobolev".into(),
            s: 2,
            n: 64,
            replicates: Some(100),
            e_sq_mean: Some(1e-4),
            e_sq_std_error: Some(1e-6),
            series_value: None,
            series_tail: None,
            theory_bound: Some(2e-4),
            seed: Some(1),
        };
        let text = report.to_string();
        assert!(text.contains("space=sobolev") && text.contains("N=64"));
    }
}
