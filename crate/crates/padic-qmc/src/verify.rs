//! Brute-force verification of every closed-form identity the other modules
//! rely on, runnable as a named check suite.
//!
//! The oracles here deliberately avoid the code paths they check: character
//! sums are re-summed pointwise from exact rational Halton coordinates
//! (never the geometric closed form), kernel integrals are re-done by cell
//! decomposition or midpoint quadrature, and the shift-invariant kernel is
//! re-averaged over explicit shifts. Every check returns a machine-readable
//! pass/fail with the measured deviation; the suite is deterministic given
//! its seed.

use crate::error::{QmcError, Result};
use crate::function_system::{beta_rational, FrequencyIndex};
use crate::kernels::{r_sobolev, shift_invariant_kernel, sobolev_kernel, WeightedSpace};
use crate::padic::{
    default_precision, digit_length, leading_digit, monna_inverse, monna_map,
    radical_inverse_fraction,
};
use crate::rng::CounterRng;
use crate::trig::sin_digit_angle;
use num_complex::Complex64;
use rayon::prelude::*;

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, measured: f64, tolerance: f64, detail: String) -> Self {
        let passed = measured.is_finite() && measured <= tolerance;
        Self { name: name.into(), measured, tolerance, passed, detail }
    }

    /// One CSV-ish report line: `name,status,measured,tolerance`.
    pub fn line(&self) -> String {
        format!(
            "{},{},{},{}",
            self.name,
            if self.passed { "pass" } else { "FAIL" },
            crate::fmt::sig17(self.measured),
            crate::fmt::sig17(self.tolerance),
        )
    }
}

/// Closed form and brute-force value of
/// `tau_p(k) = int int |x - y| conj(beta_k(x)) beta_k(y) dx dy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauCheck {
    pub closed_form: f64,
    pub brute_force: f64,
    pub abs_diff: f64,
}

/// Brute-force evaluation by the `p^a`-cell decomposition: `beta_k` is
/// constant on cells of width `p^-a`, and the per-cell integrals of |x - y|
/// are `1/(3 p^(3a))` on the diagonal and `|u - v| / p^(3a)` off it.
pub fn check_tau(p: u32, k: u64) -> Result<TauCheck> {
    if k == 0 {
        return Err(QmcError::Domain("tau is defined for k >= 1".into()));
    }
    let a = digit_length(p, k);
    let cells = (p as u64)
        .checked_pow(a)
        .filter(|&m| m <= 1 << 13)
        .ok_or_else(|| QmcError::ResourceLimit(format!("p^a = {p}^{a} beyond cell budget")))?;
    let values: Vec<Complex64> =
        (0..cells).map(|u| beta_rational(p, k, u, cells)).collect::<Result<_>>()?;
    let p3a = (p as f64).powi(3 * a as i32);
    let mut acc = Complex64::new(0.0, 0.0);
    for u in 0..cells {
        for v in 0..cells {
            let weight = if u == v {
                1.0 / (3.0 * p3a)
            } else {
                (u.abs_diff(v)) as f64 / p3a
            };
            acc += values[u as usize].conj() * values[v as usize] * weight;
        }
    }
    let kappa = leading_digit(p, k);
    let sin = sin_digit_angle(kappa, p);
    let closed_form =
        (1.0 / (p as f64).powi(2 * a as i32)) * (1.0 / 3.0 - 1.0 / (sin * sin));
    debug_assert!(acc.im.abs() < 1e-12);
    Ok(TauCheck {
        closed_form,
        brute_force: acc.re,
        abs_diff: (closed_form - acc.re).abs(),
    })
}

/// Direct trigonometric summation of `sum_{kappa < p} 1/sin^2(kappa pi / p)`
/// against the closed form `(p^2 - 1) / 3`.
pub fn check_sin_sum(p: u32) -> Result<(f64, f64, f64)> {
    crate::primes::validate_prime(p)?;
    if p > 10_000 {
        return Err(QmcError::Domain("sin-sum check supports p <= 10^4".into()));
    }
    let lhs: f64 = (1..p)
        .map(|kappa| {
            let s = sin_digit_angle(kappa, p);
            1.0 / (s * s)
        })
        .sum();
    let rhs = ((p as f64) * (p as f64) - 1.0) / 3.0;
    Ok((lhs, rhs, (lhs - rhs).abs()))
}

/// Midpoint quadrature of `int int (1 + gamma min(1-x, 1-y)) dx dy` against
/// the closed form `1 + gamma / 3`.
pub fn check_khat0(gamma: f64, q: usize) -> Result<f64> {
    if q < 64 {
        return Err(QmcError::Resolution("need q >= 64".into()));
    }
    let mut sum = 0.0;
    for i in 0..q {
        let x = (i as f64 + 0.5) / q as f64;
        for j in 0..q {
            let y = (j as f64 + 0.5) / q as f64;
            sum += 1.0 + gamma * (1.0 - x.max(y));
        }
    }
    let quad = sum / (q * q) as f64;
    Ok((quad - (1.0 + gamma / 3.0)).abs())
}

/// sigma-quadrature of the shift-averaged kernel
/// `int K(x + sigma, y + sigma) d sigma` (p-adic shifts) against the
/// truncated character series, at the supplied (x, y) pairs.
///
/// `cells` must be a power of p: the shift map is a piecewise translation on
/// base-p cells, so cell midpoints sample every branch. Returns the largest
/// observed deviation; it must stay below the series tail plus the
/// quadrature's own O(1/cells) error allowance.
pub fn check_shift_invariant_kernel(
    p: u32,
    gamma: f64,
    pairs: &[(f64, f64)],
    g: u32,
    cells: u64,
) -> Result<f64> {
    let mut m = cells;
    while m > 1 {
        if m % p as u64 != 0 {
            return Err(QmcError::Resolution(format!("cells = {cells} is not a power of {p}")));
        }
        m /= p as u64;
    }
    let space = WeightedSpace::sobolev(vec![p], vec![gamma])?;
    let precision = default_precision(p);
    let mut worst = 0.0f64;
    for &(x, y) in pairs {
        let zx = monna_inverse(x, p, precision)?;
        let zy = monna_inverse(y, p, precision)?;
        let mut quad = 0.0;
        for c in 0..cells {
            let sigma = monna_inverse((c as f64 + 0.5) / cells as f64, p, precision)?;
            let xs = monna_map(&zx.add(&sigma)?);
            let ys = monna_map(&zy.add(&sigma)?);
            quad += sobolev_kernel(&space, &[xs], &[ys])?;
        }
        quad /= cells as f64;
        let (series, _tail) = shift_invariant_kernel(&space, &[x], &[y], &[g])?;
        worst = worst.max((quad - series).abs());
    }
    Ok(worst)
}

/// Character sum over the first n Halton points by direct pointwise
/// summation: each coordinate is the exact rational `phi_p(m)` and `beta` is
/// evaluated on it digit by digit. Never touches the geometric closed form.
pub fn char_sum_halton_direct(bases: &[u32], k: &[u64], n: u64) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for m in 0..n {
        let mut term = Complex64::new(1.0, 0.0);
        for (&p, &kj) in bases.iter().zip(k) {
            let (num, den) = radical_inverse_fraction(p, m);
            term *= beta_rational(p, kj, num as u64, den as u64)?;
        }
        total += term;
    }
    Ok(total)
}

/// Samples random (k, N) and returns the worst observed
/// `|S_N(k)| * |sin(pi theta_k)|`, which the character-sum bound caps at 1.
/// `S_N` comes from [`char_sum_halton_direct`].
pub fn check_char_sum_bound(bases: &[u32], samples: usize, seed: u64) -> Result<(f64, String)> {
    let mut rng = CounterRng::new(seed, 0x6bd);
    // per-coordinate index ranges kept small enough that direct summation
    // stays cheap: k_j < p^g with p^g <= 4096
    let limits: Vec<u64> = bases
        .iter()
        .map(|&p| {
            let mut l = 1u64;
            while l * p as u64 <= 4096 {
                l *= p as u64;
            }
            l
        })
        .collect();
    let mut worst = 0.0f64;
    let mut argmax = String::new();
    for _ in 0..samples {
        let k: Vec<u64> =
            limits.iter().map(|&l| 1 + rng.next_below(l - 1)).collect();
        // log-uniform prefix length in [1, 4096]
        let n = 1u64 << rng.next_below(13);
        let n = n + rng.next_below(n);
        let index = FrequencyIndex::new(bases, &k)?;
        let s = char_sum_halton_direct(bases, &k, n)?;
        let ratio = s.norm() * index.sin_pi_theta().abs();
        if ratio > worst {
            worst = ratio;
            argmax = format!("k={k:?} N={n}");
        }
    }
    Ok((worst, argmax))
}

/// Enumerates the digit box `k_j in [p_j^(u_j), p_j^(u_j + 1))` and compares
/// `sum 1/sin^2(pi theta)` with the bound `(1/3) prod p_j^(2 u_j + 2)`.
pub fn check_bdt_small(bases: &[u32], u: &[u32]) -> Result<(f64, f64)> {
    if bases.len() != u.len() {
        return Err(QmcError::DimensionMismatch { expected: bases.len(), got: u.len() });
    }
    let mut budget = 1u128;
    for (&p, &uj) in bases.iter().zip(u) {
        budget = budget.saturating_mul((p as u128).pow(uj + 1));
    }
    if budget > 1_000_000 {
        return Err(QmcError::ResourceLimit(format!(
            "enumeration budget exceeded: prod p^(u+1) = {budget} > 10^6"
        )));
    }
    let lows: Vec<u64> = bases.iter().zip(u).map(|(&p, &uj)| (p as u64).pow(uj)).collect();
    let highs: Vec<u64> =
        bases.iter().zip(u).map(|(&p, &uj)| (p as u64).pow(uj + 1)).collect();
    let mut k: Vec<u64> = lows.clone();
    let mut lhs = 0.0f64;
    loop {
        let index = FrequencyIndex::new(bases, &k)?;
        let s = index.sin_pi_theta();
        lhs += 1.0 / (s * s);
        // odometer over the digit box
        let mut j = 0;
        loop {
            if j == k.len() {
                let mut rhs = 1.0f64;
                for (&p, &uj) in bases.iter().zip(u) {
                    rhs *= (p as f64).powi(2 * uj as i32 + 2);
                }
                return Ok((lhs, rhs / 3.0));
            }
            k[j] += 1;
            if k[j] < highs[j] {
                break;
            }
            k[j] = lows[j];
            j += 1;
        }
    }
}

fn seeded_pairs(seed: u64, count: usize) -> Vec<(f64, f64)> {
    let mut rng = CounterRng::new(seed, 0x9a135);
    (0..count).map(|_| (rng.next_f64(), rng.next_f64())).collect()
}

type CheckFn = Box<dyn Fn() -> CheckResult + Send + Sync>;

fn manifest(seed: u64) -> Vec<(&'static str, CheckFn)> {
    let mut checks: Vec<(&'static str, CheckFn)> = Vec::new();

    for p in [2u32, 3, 5] {
        let name: &'static str = match p {
            2 => "tau_p2",
            3 => "tau_p3",
            _ => "tau_p5",
        };
        checks.push((
            name,
            Box::new(move || {
                let mut worst = 0.0f64;
                for k in 1..(p as u64).pow(3) {
                    worst = worst.max(check_tau(p, k).expect("in budget").abs_diff);
                }
                CheckResult::new(name, worst, 1e-12, format!("all k < {p}^3"))
            }),
        ));
    }

    checks.push((
        "tau_r_consistency",
        Box::new(|| {
            // r_{p,gamma}(k) must equal -(gamma/2) tau_p(k), with tau from
            // the brute-force cell sum
            let mut worst = 0.0f64;
            for p in [2u32, 3, 5] {
                for gamma in [0.5, 1.0, 2.0] {
                    for k in 1..(p as u64).pow(2) {
                        let tau = check_tau(p, k).expect("in budget").brute_force;
                        let diff = (r_sobolev(p, gamma, k) - (-gamma / 2.0 * tau)).abs();
                        worst = worst.max(diff);
                    }
                }
            }
            CheckResult::new("tau_r_consistency", worst, 1e-12, "p in {2,3,5}".into())
        }),
    ));

    checks.push((
        "sin_sum",
        Box::new(|| {
            let mut worst = 0.0f64;
            for &p in &crate::primes::primes_up_to(101) {
                worst = worst.max(check_sin_sum(p).expect("valid prime").2);
            }
            CheckResult::new("sin_sum", worst, 1e-8, "primes <= 101".into())
        }),
    ));

    checks.push((
        "khat0",
        Box::new(|| {
            let mut worst = 0.0f64;
            for gamma in [0.0, 1.0, 3.0] {
                worst = worst.max(check_khat0(gamma, 4096).expect("q >= 64"));
            }
            CheckResult::new("khat0", worst, 1e-5, "gamma in {0,1,3}, q = 4096".into())
        }),
    ));

    for (p, g, cells) in [(2u32, 12u32, 1u64 << 14), (3, 8, 19683)] {
        let name: &'static str = if p == 2 { "shift_kernel_p2" } else { "shift_kernel_p3" };
        checks.push((
            name,
            Box::new(move || {
                let pairs = seeded_pairs(seed ^ p as u64, 10);
                let space = WeightedSpace::sobolev(vec![p], vec![1.0]).expect("valid");
                let (_, tail) =
                    shift_invariant_kernel(&space, &[0.0], &[0.0], &[g]).expect("valid args");
                let worst =
                    check_shift_invariant_kernel(p, 1.0, &pairs, g, cells).expect("valid args");
                CheckResult::new(
                    name,
                    worst,
                    tail + 1e-3,
                    format!("10 pairs, g = {g}, {cells} shift cells"),
                )
            }),
        ));
    }

    for (name, bases) in
        [("char_bound_2_3", vec![2u32, 3]), ("char_bound_2_3_5", vec![2, 3, 5])]
    {
        let name: &'static str = name;
        checks.push((
            name,
            Box::new(move || {
                let (worst, argmax) =
                    check_char_sum_bound(&bases, 2000, seed).expect("valid bases");
                CheckResult::new(name, worst, 1.0 + 1e-9, format!("worst at {argmax}"))
            }),
        ));
    }

    checks.push((
        "bdt_boxes",
        Box::new(|| {
            let cases: [(&[u32], &[u32]); 6] = [
                (&[2], &[0]),
                (&[3], &[0]),
                (&[2], &[3]),
                (&[2, 3], &[0, 0]),
                (&[2, 3], &[2, 1]),
                (&[2, 3, 5], &[1, 1, 0]),
            ];
            let mut worst = 0.0f64;
            for (bases, u) in cases {
                let (lhs, rhs) = check_bdt_small(bases, u).expect("in budget");
                worst = worst.max(lhs / rhs);
            }
            CheckResult::new("bdt_boxes", worst, 1.0 + 1e-12, "6 digit boxes".into())
        }),
    ));

    checks
}

/// Runs the named checks (all of them, or those whose name contains
/// `only`). Checks are independent and run in parallel; the report order is
/// fixed.
pub fn run_suite(seed: u64, only: Option<&str>) -> Vec<CheckResult> {
    let checks: Vec<(&'static str, CheckFn)> = manifest(seed)
        .into_iter()
        .filter(|(name, _)| only.map_or(true, |pat| name.contains(pat)))
        .collect();
    checks.into_par_iter().map(|(_, f)| f()).collect()
}

/// True when every check passed.
pub fn suite_passed(results: &[CheckResult]) -> bool {
    !results.is_empty() && results.iter().all(|r| r.passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_system::char_sum_halton;

    #[test]
    fn tau_example_base_two() {
        // p=2, k=1: tau = (1/4)(1/3 - 1) = -1/6
        let check = check_tau(2, 1).unwrap();
        assert!((check.closed_form + 1.0 / 6.0).abs() < 1e-15);
        assert!(check.abs_diff < 1e-14, "diff = {}", check.abs_diff);
    }

    #[test]
    fn tau_base_three_sweep() {
        for k in 1..9u64 {
            let check = check_tau(3, k).unwrap();
            assert!(check.abs_diff < 1e-12, "k = {k}: diff = {}", check.abs_diff);
        }
        assert!(check_tau(3, 0).is_err());
    }

    #[test]
    fn sin_sum_small_primes() {
        let (lhs, rhs, diff) = check_sin_sum(2).unwrap();
        assert_eq!(rhs, 1.0);
        assert!((lhs - 1.0).abs() < 1e-15 && diff < 1e-15);
        let (lhs, rhs, _) = check_sin_sum(3).unwrap();
        assert!((lhs - 8.0 / 3.0).abs() < 1e-13 && (rhs - 8.0 / 3.0).abs() < 1e-13);
        let (_, _, diff) = check_sin_sum(101).unwrap();
        assert!(diff < 1e-8);
    }

    #[test]
    fn shift_kernel_check_is_exact_for_zero_weight() {
        // gamma = 0: the kernel is constant 1, so quadrature and series agree
        let worst = check_shift_invariant_kernel(2, 0.0, &[(0.0, 0.0)], 4, 16).unwrap();
        assert_eq!(worst, 0.0);
        // cells must be a power of p
        assert!(check_shift_invariant_kernel(2, 1.0, &[(0.0, 0.0)], 4, 24).is_err());
    }

    #[test]
    fn khat0_values() {
        assert_eq!(check_khat0(0.0, 64).unwrap(), 0.0);
        assert!(check_khat0(1.0, 1024).unwrap() < 1e-5);
        assert!(check_khat0(3.0, 4096).unwrap() < 1e-6);
        assert!(check_khat0(1.0, 10).is_err());
    }

    #[test]
    fn direct_char_sum_agrees_with_geometric_form() {
        for (bases, k) in [(vec![2u32], vec![3u64]), (vec![2, 3], vec![1, 2])] {
            let idx = FrequencyIndex::new(&bases, &k).unwrap();
            for n in [1u64, 7, 64, 257] {
                let direct = char_sum_halton_direct(&bases, &k, n).unwrap();
                let closed = char_sum_halton(&idx, n).unwrap();
                assert!((direct - closed).norm() < 1e-10, "k={k:?} n={n}");
            }
        }
    }

    #[test]
    fn char_bound_alternating_case() {
        // theta = 1/2: |S_N| <= 1 for every N
        for n in 1..=64u64 {
            let s = char_sum_halton_direct(&[2], &[1], n).unwrap();
            assert!(s.norm() <= 1.0 + 1e-12, "n = {n}");
        }
    }

    #[test]
    fn bdt_single_coordinate_values() {
        // t=1, p=2, u=0: lhs = 1/sin^2(pi/2) = 1 <= 4/3
        let (lhs, rhs) = check_bdt_small(&[2], &[0]).unwrap();
        assert!((lhs - 1.0).abs() < 1e-14);
        assert!((rhs - 4.0 / 3.0).abs() < 1e-14);
        // t=1, p=3, u=0: lhs = 8/3 <= 3
        let (lhs, rhs) = check_bdt_small(&[3], &[0]).unwrap();
        assert!((lhs - 8.0 / 3.0).abs() < 1e-13);
        assert!((rhs - 3.0).abs() < 1e-14);
        // t=2, bases (2,3), u=(0,0): enumerated lhs <= 12
        let (lhs, rhs) = check_bdt_small(&[2, 3], &[0, 0]).unwrap();
        assert!(lhs <= rhs);
        assert!((rhs - 12.0).abs() < 1e-12);
        // budget guard
        assert!(check_bdt_small(&[2, 3, 5], &[5, 5, 5]).is_err());
    }

    #[test]
    fn suite_runs_deterministically() {
        let a = run_suite(11, Some("bdt"));
        let b = run_suite(11, Some("bdt"));
        assert_eq!(a, b);
        assert_eq!(a.len(), 1);
        assert!(suite_passed(&a));
        let line = a[0].line();
        assert!(line.starts_with("bdt_boxes,pass,"));
        assert!(!suite_passed(&[]));
    }
}
