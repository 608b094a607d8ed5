//! Weighted and unweighted L2 discrepancy.
//!
//! The local discrepancy of points `x_0, ..., x_{N-1}` at a box corner t is
//! `Delta_N(t) = (1/N) #{n : x_n in [0, t)} - prod_i t_i`. The weighted L2
//! discrepancy aggregates `int |Delta_N(t_u, 1)|^2 dt_u` over all nonempty
//! coordinate subsets u with weights `gamma_u = prod_{j in u} gamma_j`; it
//! equals the worst-case error in the anchored Sobolev space, which is what
//! the acceptance suite checks (the two quantities are computed by fully
//! independent routes here).
//!
//! Per subset the integral has the Warnock closed form
//!
//! ```text
//! int |Delta|^2 = 3^-s - (2/N) sum_n prod_j (1 - x_nj^2)/2
//!               + (1/N^2) sum_{m,n} prod_j (1 - max(x_mj, x_nj)),
//! ```
//!
//! validated against two independent oracles: midpoint quadrature of the
//! definition on a uniform grid, and exact piecewise integration of the
//! definition (the count function is constant between sorted coordinates).

use crate::error::{QmcError, Result};
use crate::halton::{halton_block, HaltonSpec, PointSet};
use crate::padic::sample_shift;
use crate::stats::{fit_loglog, mean_and_standard_error, LineFit};
use crate::wce::{SeriesValue, SHIFT_PRECISION};
use rayon::prelude::*;

/// Subset enumeration is 2^s; refuse beyond this dimension.
const MAX_SUBSET_DIM: usize = 20;

/// How a discrepancy value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscrepancyMethod {
    /// Warnock-style closed form.
    ClosedForm,
    /// Midpoint rule on a uniform grid with `grid` cells per axis.
    Quadrature { grid: usize },
    /// Exact piecewise integration of the definition (s <= 2).
    ExactIntegration,
}

/// A computed squared L2 discrepancy with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyResult {
    pub l2_sq: f64,
    pub method: DiscrepancyMethod,
    /// Per-coordinate weights; `None` means the unweighted (classical star)
    /// discrepancy.
    pub weights: Option<Vec<f64>>,
}

/// Local discrepancy at box corner `t in [0, 1]^s` (half-open boxes: strict
/// upper comparison).
pub fn local_discrepancy(points: &PointSet, t: &[f64]) -> Result<f64> {
    let s = points.dim();
    if t.len() != s {
        return Err(QmcError::DimensionMismatch { expected: s, got: t.len() });
    }
    if let Some(&bad) = t.iter().find(|c| !(0.0..=1.0).contains(*c)) {
        return Err(QmcError::Domain(format!("corner coordinate {bad} outside [0, 1]")));
    }
    let inside =
        points.rows().filter(|row| row.iter().zip(t).all(|(&x, &ti)| x < ti)).count();
    let volume: f64 = t.iter().product();
    Ok(inside as f64 / points.len() as f64 - volume)
}

/// All 2^s subset products of per-coordinate factors, by lowest-set-bit
/// recursion (`out[mask] = out[mask without lowest bit] * factor[lowest]`).
#[inline]
fn subset_products(factors: &[f64], out: &mut [f64]) {
    out[0] = 1.0;
    for mask in 1..out.len() {
        let low = mask.trailing_zeros() as usize;
        out[mask] = out[mask & (mask - 1)] * factors[low];
    }
}

/// Weighted squared L2 discrepancy by direct subset summation: for every
/// nonempty `u`, the Warnock closed form of `int |Delta(t_u, 1)|^2 dt_u` on
/// the projected points, weighted by `gamma_u`.
pub fn weighted_l2_sq(points: &PointSet, gamma: &[f64]) -> Result<f64> {
    let s = points.dim();
    if gamma.len() != s {
        return Err(QmcError::DimensionMismatch { expected: s, got: gamma.len() });
    }
    if s > MAX_SUBSET_DIM {
        return Err(QmcError::ResourceLimit(format!(
            "subset enumeration over 2^{s} subsets refused (max dimension {MAX_SUBSET_DIM})"
        )));
    }
    if points.is_empty() {
        return Err(QmcError::Domain("need at least one point".into()));
    }
    let n = points.len();
    let masks = 1usize << s;
    let mut b_sums = vec![0.0f64; masks];
    let mut pair_sums = vec![0.0f64; masks];
    let mut scratch = vec![0.0f64; masks];
    let mut factors = vec![0.0f64; s];

    for row in points.rows() {
        for j in 0..s {
            factors[j] = (1.0 - row[j] * row[j]) / 2.0;
        }
        subset_products(&factors, &mut scratch);
        for (acc, v) in b_sums.iter_mut().zip(&scratch) {
            *acc += v;
        }
    }
    for m in 0..n {
        let xm = points.point(m);
        for nn in 0..=m {
            let xn = points.point(nn);
            let weight = if nn == m { 1.0 } else { 2.0 };
            for j in 0..s {
                factors[j] = 1.0 - xm[j].max(xn[j]);
            }
            subset_products(&factors, &mut scratch);
            for (acc, v) in pair_sums.iter_mut().zip(&scratch) {
                *acc += weight * v;
            }
        }
    }

    let mut gamma_prods = vec![0.0f64; masks];
    subset_products(gamma, &mut gamma_prods);
    let nf = n as f64;
    let mut total = 0.0;
    for mask in 1..masks {
        let dim_u = mask.count_ones() as i32;
        let a_u = 3.0f64.powi(-dim_u);
        total +=
            gamma_prods[mask] * (a_u - 2.0 / nf * b_sums[mask] + pair_sums[mask] / (nf * nf));
    }
    if total < -1e-12 {
        return Err(QmcError::NumericalConsistency(format!(
            "weighted L2^2 = {total} negative beyond rounding tolerance"
        )));
    }
    Ok(total.max(0.0))
}

/// Classical (star) squared L2 discrepancy via Warnock's closed form. The
/// one-dimensional case uses the sorted O(N log N) evaluation of the pair
/// sum; higher dimensions use the direct pair loop.
pub fn unweighted_l2_sq(points: &PointSet) -> f64 {
    let s = points.dim();
    let n = points.len();
    let nf = n as f64;
    let b_sum: f64 = points
        .rows()
        .map(|row| row.iter().map(|&x| (1.0 - x * x) / 2.0).product::<f64>())
        .sum();
    let pair_sum: f64 = if s == 1 {
        // sum_{m,n} (1 - max) = N^2 - sum_i x_(i) (2i + 1) over sorted values
        let mut xs: Vec<f64> = points.rows().map(|r| r[0]).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let max_sum: f64 =
            xs.iter().enumerate().map(|(i, &x)| x * (2 * i + 1) as f64).sum();
        nf * nf - max_sum
    } else {
        let mut acc = 0.0;
        for m in 0..n {
            let xm = points.point(m);
            acc += xm.iter().map(|&x| 1.0 - x).product::<f64>();
            for nn in 0..m {
                let xn = points.point(nn);
                let mut k = 1.0;
                for j in 0..s {
                    k *= 1.0 - xm[j].max(xn[j]);
                }
                acc += 2.0 * k;
            }
        }
        acc
    };
    (3.0f64.powi(-(s as i32)) - 2.0 / nf * b_sum + pair_sum / (nf * nf)).max(0.0)
}

/// Midpoint-rule quadrature of `int |Delta_N(t)|^2 dt` on a uniform grid
/// (`grid` cells per axis, s <= 2). Error decays like 1/grid because the
/// count function jumps across point coordinates.
pub fn unweighted_l2_sq_quadrature(points: &PointSet, grid: usize) -> Result<f64> {
    let s = points.dim();
    if grid < 2 {
        return Err(QmcError::Resolution("grid must be >= 2".into()));
    }
    match s {
        1 => {
            let mut xs: Vec<f64> = points.rows().map(|r| r[0]).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = points.len() as f64;
            let mut sum = 0.0;
            let mut count = 0usize;
            for c in 0..grid {
                let t = (c as f64 + 0.5) / grid as f64;
                while count < xs.len() && xs[count] < t {
                    count += 1;
                }
                let delta = count as f64 / n - t;
                sum += delta * delta;
            }
            Ok(sum / grid as f64)
        }
        2 => {
            // prefix-summed counts: cell (c1, c2) needs
            // #{points : x < (c1+0.5)/G and y < (c2+0.5)/G}
            let g = grid;
            let cell_of = |x: f64| -> usize {
                // first cell whose midpoint corner exceeds x
                let v = x * g as f64 - 0.5;
                if v < 0.0 {
                    0
                } else {
                    (v.floor() as usize + 1).min(g)
                }
            };
            let mut hist = vec![0u32; (g + 1) * (g + 1)];
            for row in points.rows() {
                let (cx, cy) = (cell_of(row[0]), cell_of(row[1]));
                if cx < g && cy < g {
                    hist[cx * (g + 1) + cy] += 1;
                }
            }
            // 2-D suffix-to-prefix accumulation
            let mut counts = vec![0u32; (g + 1) * (g + 1)];
            for c1 in 0..g {
                for c2 in 0..g {
                    counts[(c1 + 1) * (g + 1) + c2 + 1] = hist[c1 * (g + 1) + c2]
                        + counts[c1 * (g + 1) + c2 + 1]
                        + counts[(c1 + 1) * (g + 1) + c2]
                        - counts[c1 * (g + 1) + c2];
                }
            }
            let n = points.len() as f64;
            let mut sum = 0.0;
            for c1 in 0..g {
                let t1 = (c1 as f64 + 0.5) / g as f64;
                for c2 in 0..g {
                    let t2 = (c2 as f64 + 0.5) / g as f64;
                    let inside = counts[(c1 + 1) * (g + 1) + c2 + 1] as f64;
                    let delta = inside / n - t1 * t2;
                    sum += delta * delta;
                }
            }
            Ok(sum / (g * g) as f64)
        }
        _ => Err(QmcError::Resolution(format!(
            "quadrature oracle supports s <= 2, got s = {s}"
        ))),
    }
}

/// Exact integration of `int |Delta_N(t)|^2 dt` (s <= 2): the count is
/// constant on the rectangles between sorted coordinates, and the integrand
/// is polynomial there.
pub fn unweighted_l2_sq_exact_integration(points: &PointSet) -> Result<f64> {
    let s = points.dim();
    match s {
        1 => {
            let mut cuts: Vec<f64> = points.rows().map(|r| r[0]).collect();
            cuts.push(0.0);
            cuts.push(1.0);
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cuts.dedup();
            let n = points.len() as f64;
            let mut sum = 0.0;
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                let count = points.rows().filter(|r| r[0] <= a).count() as f64;
                let c = count / n;
                // int_a^b (c - t)^2 dt
                sum += ((b - c).powi(3) - (a - c).powi(3)) / 3.0;
            }
            Ok(sum)
        }
        2 => {
            let mut ux: Vec<f64> = points.rows().map(|r| r[0]).collect();
            let mut uy: Vec<f64> = points.rows().map(|r| r[1]).collect();
            for v in [&mut ux, &mut uy] {
                v.push(0.0);
                v.push(1.0);
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v.dedup();
            }
            let n = points.len() as f64;
            let mut sum = 0.0;
            for wx in ux.windows(2) {
                for wy in uy.windows(2) {
                    let count = points
                        .rows()
                        .filter(|r| r[0] <= wx[0] && r[1] <= wy[0])
                        .count() as f64;
                    let c = count / n;
                    let area = (wx[1] - wx[0]) * (wy[1] - wy[0]);
                    let x1 = (wx[1] * wx[1] - wx[0] * wx[0]) / 2.0;
                    let y1 = (wy[1] * wy[1] - wy[0] * wy[0]) / 2.0;
                    let x2 = (wx[1].powi(3) - wx[0].powi(3)) / 3.0;
                    let y2 = (wy[1].powi(3) - wy[0].powi(3)) / 3.0;
                    // int (c - t1 t2)^2 = c^2 A - 2 c X1 Y1 + X2 Y2
                    sum += c * c * area - 2.0 * c * x1 * y1 + x2 * y2;
                }
            }
            Ok(sum)
        }
        _ => Err(QmcError::Resolution(format!(
            "exact integration supports s <= 2, got s = {s}"
        ))),
    }
}

/// Weighted discrepancy through an integration oracle applied to every
/// nonempty coordinate projection (so dimensions are limited by the oracle).
pub fn weighted_l2_sq_quadrature(
    points: &PointSet,
    gamma: &[f64],
    grid: usize,
) -> Result<f64> {
    let s = points.dim();
    if gamma.len() != s {
        return Err(QmcError::DimensionMismatch { expected: s, got: gamma.len() });
    }
    let mut total = 0.0;
    for mask in 1usize..(1 << s) {
        let coords: Vec<usize> = (0..s).filter(|j| mask >> j & 1 == 1).collect();
        let data: Vec<f64> =
            points.rows().flat_map(|r| coords.iter().map(|&j| r[j]).collect::<Vec<_>>()).collect();
        let sub_bases: Vec<u32> = coords.iter().map(|&j| points.bases()[j]).collect();
        let projected = PointSet::from_coords(sub_bases, data)?;
        let gamma_u: f64 = coords.iter().map(|&j| gamma[j]).product();
        total += gamma_u * unweighted_l2_sq_quadrature(&projected, grid)?;
    }
    Ok(total)
}

/// Umbrella evaluator used by the CLI.
pub fn l2_discrepancy(
    points: &PointSet,
    weights: Option<&[f64]>,
    method: DiscrepancyMethod,
) -> Result<DiscrepancyResult> {
    let l2_sq = match (&method, weights) {
        (DiscrepancyMethod::ClosedForm, None) => unweighted_l2_sq(points),
        (DiscrepancyMethod::ClosedForm, Some(g)) => weighted_l2_sq(points, g)?,
        (DiscrepancyMethod::Quadrature { grid }, None) => {
            unweighted_l2_sq_quadrature(points, *grid)?
        }
        (DiscrepancyMethod::Quadrature { grid }, Some(g)) => {
            weighted_l2_sq_quadrature(points, g, *grid)?
        }
        (DiscrepancyMethod::ExactIntegration, None) => {
            unweighted_l2_sq_exact_integration(points)?
        }
        (DiscrepancyMethod::ExactIntegration, Some(_)) => {
            return Err(QmcError::Resolution(
                "exact integration is implemented for the unweighted case".into(),
            ))
        }
    };
    Ok(DiscrepancyResult { l2_sq, method, weights: weights.map(<[f64]>::to_vec) })
}

/// One grid point of an RMS L2-discrepancy experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmsL2Record {
    pub n: u64,
    pub mean_l2_sq: f64,
    pub std_error: f64,
    /// sqrt of the mean squared discrepancy
    pub rms: f64,
    /// the bounded-ratio diagnostic `N * rms / (log N)^(s/2)`
    pub ratio: f64,
    /// smallest observed value across the sampled shifts, and its replicate
    pub min_l2_sq: f64,
    pub min_replicate: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmsL2Experiment {
    pub records: Vec<RmsL2Record>,
    /// least-squares fit of log(rms) against log(N)
    pub fit: Option<LineFit>,
}

/// Monte Carlo RMS of the unweighted L2 discrepancy of the shifted sequence
/// over an increasing N grid. One shifted block per replicate serves every
/// prefix (open-type reuse). Deterministic given the seed.
pub fn rms_l2_experiment(
    spec: &HaltonSpec,
    n_grid: &[u64],
    replicates: usize,
    seed: u64,
) -> Result<RmsL2Experiment> {
    if spec.shift().is_some() {
        return Err(QmcError::Domain(
            "rms_l2_experiment draws its own shifts; pass an unshifted spec".into(),
        ));
    }
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QmcError::Domain("N grid must be strictly increasing".into()));
    }
    if n_grid[0] < 2 {
        return Err(QmcError::Domain("N grid must start at 2 or more".into()));
    }
    if replicates < 2 {
        return Err(QmcError::Domain("need at least 2 replicates".into()));
    }
    let n_max = *n_grid.last().unwrap() as usize;
    // per replicate, the squared discrepancy of every prefix in the grid
    let per_replicate: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let shift = sample_shift(spec.bases(), SHIFT_PRECISION, seed, rep as u64)?;
            let shifted = spec.clone().with_shift(shift)?;
            let block = halton_block(&shifted, n_max)?;
            Ok(n_grid.iter().map(|&n| unweighted_l2_sq(&block.prefix(n as usize))).collect())
        })
        .collect::<Result<_>>()?;
    let s = spec.dim() as f64;
    let mut records = Vec::with_capacity(n_grid.len());
    for (i, &n) in n_grid.iter().enumerate() {
        let values: Vec<f64> = per_replicate.iter().map(|v| v[i]).collect();
        let (mean, std_error) = mean_and_standard_error(&values);
        let (min_replicate, min_l2_sq) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, &v)| (i as u64, v))
            .unwrap();
        debug_assert!(min_l2_sq <= mean);
        let rms = mean.sqrt();
        let ratio = n as f64 * rms / (n as f64).ln().powf(s / 2.0);
        records.push(RmsL2Record { n, mean_l2_sq: mean, std_error, rms, ratio, min_l2_sq, min_replicate });
    }
    let xs: Vec<f64> = records.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.rms).collect();
    Ok(RmsL2Experiment { fit: fit_loglog(&xs, &ys), records })
}

/// Exact expected squared unweighted L2 discrepancy of the shifted sequence,
/// as a truncated character series with certified tail: the kernel
/// `prod_j min(1 - x_j, 1 - y_j)` has shift-invariant coefficients equal to
/// the Sobolev ones at gamma = 1 with the k = 0 entry replaced by 1/3.
pub fn rms_l2_sq_series_unweighted(
    spec: &HaltonSpec,
    n: u64,
    g: Option<&[u32]>,
) -> Result<SeriesValue> {
    crate::wce::l2_series_unweighted(spec, n, g)
}
