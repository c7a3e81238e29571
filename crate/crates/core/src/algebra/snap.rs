//! Recovering exact Gaussian rationals from floating-point approximations.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::float::ComplexFloat;
use super::gaussian::GaussianRational;

/// Default denominator bound for snapping.
pub const DEFAULT_MAX_DEN: u64 = 1_000_000;

/// Acceptance tolerance `2^-(prec/2)` used by [`snap_to_exact`].
pub fn snap_tolerance(prec: usize) -> f64 {
    2f64.powf(-(prec as f64) / 2.0)
}

/// Best rational approximation `p/q` with `1 ≤ q ≤ max_den` (continued fractions
/// with a final semiconvergent).
pub fn best_rational(x: f64, max_den: u64) -> Option<(i128, i128)> {
    if !x.is_finite() || x.abs() > 1e15 || max_den == 0 {
        return None;
    }
    let max_den = max_den as i128;
    let (mut p0, mut q0, mut p1, mut q1): (i128, i128, i128, i128) = (0, 1, 1, 0);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den {
            let k = (max_den - q0) / q1;
            let (ps, qs) = (p0 + k * p1, q0 + k * q1);
            let err = |p: i128, q: i128| (x - p as f64 / q as f64).abs();
            if q1 == 0 || (k > 0 && err(ps, qs) < err(p1, q1)) {
                return Some((ps, qs));
            }
            return Some((p1, q1));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a;
        if frac.abs() < 1e-18 || (x - p1 as f64 / q1 as f64).abs() <= f64::EPSILON * x.abs() {
            break;
        }
        v = 1.0 / frac;
        if !v.is_finite() {
            break;
        }
    }
    Some((p1, q1))
}

fn to_big(p: i128, q: i128) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Nearest Gaussian rational with both denominators at most `max_den`, if it lies
/// within `2^-(prec/2)` (relative to `max(1, |x|)`) of `x`.
pub fn snap_to_exact(x: &ComplexFloat, max_den: u64, prec: usize) -> Option<GaussianRational> {
    let (pr, qr) = best_rational(x.re, max_den)?;
    let (pi, qi) = best_rational(x.im, max_den)?;
    let err = ((x.re - pr as f64 / qr as f64).powi(2) + (x.im - pi as f64 / qi as f64).powi(2)).sqrt();
    let scale = x.abs().max(1.0);
    (err <= snap_tolerance(prec) * scale).then(|| GaussianRational::new(to_big(pr, qr), to_big(pi, qi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> ComplexFloat {
        ComplexFloat::new(re, im)
    }

    #[test]
    fn examples() {
        assert_eq!(snap_to_exact(&c(0.5, 0.0), 10, 53), Some(GaussianRational::ratio(1, 2)));
        assert_eq!(snap_to_exact(&c(0.333333333, 0.0), 10, 53), Some(GaussianRational::ratio(1, 3)));
        assert_eq!(snap_to_exact(&c(0.70710678, 0.0), 10, 53), None);
        assert_eq!(snap_to_exact(&c(-2.0, -0.25), 10, 53), Some("-2-1/4i".parse().unwrap()));
    }

    #[test]
    fn semiconvergent_is_used() {
        // pi with q ≤ 100: 311/99 is a semiconvergent between 22/7 and 333/106
        assert_eq!(best_rational(std::f64::consts::PI, 100), Some((311, 99)));
        assert_eq!(best_rational(std::f64::consts::PI, 7), Some((22, 7)));
    }

    proptest! {
        #[test]
        fn round_trip(a in -5000i64..5000, b in 1i64..1000, c2 in -5000i64..5000, d in 1i64..1000) {
            let g = GaussianRational::new(
                BigRational::new(a.into(), b.into()),
                BigRational::new(c2.into(), d.into()),
            );
            let (re, im) = g.to_f64_pair();
            prop_assert_eq!(snap_to_exact(&c(re, im), DEFAULT_MAX_DEN, 53), Some(g));
        }
    }
}
