//! Trigonometry of exact rational angles.
//!
//! All characters in this crate have angles that are rationals with known
//! denominators. Range reduction is done on the integer numerator, so the
//! only floating-point rounding left is the final sin/cos call.

use num_complex::Complex64;
use std::f64::consts::PI;

/// sin(pi * num / den) with exact reduction of `num` modulo `2 * den`.
pub fn sinpi_frac(num: u128, den: u128) -> f64 {
    debug_assert!(den > 0);
    let two_den = 2 * den;
    let mut r = num % two_den; // angle in [0, 2*pi)
    let mut sign = 1.0;
    if r >= den {
        r -= den; // sin(pi + t) = -sin(t)
        sign = -1.0;
    }
    // r/den in [0, 1); fold onto [0, 1/2] where sin(pi t) is best conditioned.
    if 2 * r > den {
        r = den - r;
    }
    sign * (PI * (r as f64 / den as f64)).sin()
}

/// e^(2 pi i num / den) with exact reduction of `num` modulo `den`.
/// Quarter turns come out exact.
pub fn unit_exp_frac(num: u128, den: u128) -> Complex64 {
    debug_assert!(den > 0);
    let r = num % den;
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * r == den {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * r == den {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * r == 3 * den {
        return Complex64::new(0.0, -1.0);
    }
    // Map to (-1/2, 1/2) turns so the argument passed to sin/cos is small.
    let t = if 2 * r > den {
        (r as f64 - den as f64) / den as f64
    } else {
        r as f64 / den as f64
    };
    let (s, c) = (2.0 * PI * t).sin_cos();
    Complex64::new(c, s)
}

/// sin(kappa * pi / p) for 1 <= kappa < p, evaluated on the folded argument
/// so accuracy does not degrade as kappa approaches p.
pub fn sin_digit_angle(kappa: u32, p: u32) -> f64 {
    debug_assert!(kappa >= 1 && kappa < p);
    let k = kappa.min(p - kappa);
    (PI * k as f64 / p as f64).sin()
}
