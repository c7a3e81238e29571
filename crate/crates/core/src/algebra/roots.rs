//! Numeric root finding: Aberth–Ehrlich simultaneous iteration in double
//! precision, Newton polishing at arbitrary precision, and exact recovery of
//! roots that lie in Q(i).

use num_traits::Zero;

use super::float::{Complex, ComplexFloat, Real};
use super::gaussian::GaussianRational;
use super::poly::{horner, ComplexPoly};
use super::snap::{snap_to_exact, DEFAULT_MAX_DEN};
use crate::error::{Error, Result};

const MAX_ABERTH_ITERS: usize = 800;

/// A numeric root together with its multiplicity.
#[derive(Clone, Debug)]
pub struct NumRoot<R = f64> {
    pub z: Complex<R>,
    pub mult: usize,
}

/// Clustering tolerance `2^-(prec/3)` for numerically computed multiple roots.
pub fn cluster_tolerance(prec: usize) -> f64 {
    2f64.powf(-(prec as f64) / 3.0)
}

fn deriv(coeffs: &[ComplexFloat]) -> Vec<ComplexFloat> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.scale(&(i as f64)))
        .collect()
}

/// Roots of a polynomial with floating coefficients (lowest degree first),
/// listed with repetition. Leading coefficient must be nonzero.
pub fn aberth(coeffs: &[ComplexFloat]) -> Result<Vec<ComplexFloat>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    if lead.is_zero() {
        return Err(Error::InvalidArgument("leading coefficient is zero".into()));
    }
    let monic: Vec<ComplexFloat> = coeffs.iter().map(|c| *c / lead).collect();
    if n == 1 {
        return Ok(vec![-monic[0]]);
    }
    let dm = deriv(&monic);

    // Fujiwara-style radius; start on a slightly rotated circle
    let radius = (0..n)
        .map(|i| monic[i].abs().powf(1.0 / (n - i) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut z: Vec<ComplexFloat> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            ComplexFloat::new(radius * t.cos(), radius * t.sin())
        })
        .collect();

    let mut converged = vec![false; n];
    let mut worst = f64::INFINITY;
    for _ in 0..MAX_ABERTH_ITERS {
        worst = 0.0f64;
        for k in 0..n {
            if converged[k] {
                continue;
            }
            let p = horner(&monic, &z[k]);
            let dp = horner(&dm, &z[k]);
            if p.is_zero() {
                converged[k] = true;
                continue;
            }
            let ratio = p / dp;
            let mut s = ComplexFloat::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    let diff = z[k] - z[j];
                    if !diff.is_zero() {
                        s = s + diff.inv();
                    }
                }
            }
            let w = ratio / (ComplexFloat::new(1.0, 0.0) - ratio * s);
            if !w.is_finite() {
                continue;
            }
            z[k] = z[k] - w;
            let step = w.abs() / (1.0 + z[k].abs());
            worst = worst.max(step);
            if step < 4.0 * f64::EPSILON {
                converged[k] = true;
            }
        }
        if converged.iter().all(|&c| c) {
            return Ok(z);
        }
    }
    // accept slow clusters (multiple roots converge only linearly) if residuals are small
    let scale: f64 = monic.iter().map(|c| c.abs()).sum();
    let ok = z.iter().all(|r| {
        let m = r.abs().max(1.0).powi(n as i32);
        horner(&monic, r).abs() <= 1e-6 * scale * m
    });
    if ok {
        Ok(z)
    } else {
        Err(Error::NumericFailure(format!(
            "Aberth iteration did not converge: degree {n}, last relative step {worst:e}"
        )))
    }
}

/// Groups roots closer than `tol` into clusters represented by their mean.
pub fn cluster(roots: &[ComplexFloat], tol: f64) -> Vec<NumRoot> {
    let mut out: Vec<(ComplexFloat, usize)> = Vec::new();
    for r in roots {
        match out.iter_mut().find(|(c, m)| (*c / ComplexFloat::new(*m as f64, 0.0) - *r).abs() < tol * (1.0 + r.abs())) {
            Some((sum, m)) => {
                *sum = *sum + *r;
                *m += 1;
            }
            None => out.push((*r, 1)),
        }
    }
    out.into_iter()
        .map(|(s, m)| NumRoot { z: s / ComplexFloat::new(m as f64, 0.0), mult: m })
        .collect()
}

/// Roots of a float-coefficient polynomial with multiplicities from clustering.
pub fn roots_of_float_poly(coeffs: &[ComplexFloat], prec: usize) -> Result<Vec<NumRoot>> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    Ok(cluster(&aberth(&c)?, cluster_tolerance(prec)))
}

/// Newton refinement of a simple root of `p` at the working precision of `z`.
pub fn newton_polish<R: Real>(coeffs: &[Complex<R>], z: Complex<R>, max_steps: usize) -> Complex<R> {
    let d: Vec<Complex<R>> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.scale(&R::from_f64(i as f64, z.precision())))
        .collect();
    let tol = 2f64.powf(-(z.precision() as f64) + 4.0);
    let mut z = z;
    for _ in 0..max_steps {
        let dp = horner(&d, &z);
        if dp.is_zero() {
            break;
        }
        let step = horner(coeffs, &z) / dp;
        z = z - step.clone();
        if step.to_c64().abs() <= tol * (1.0 + z.to_c64().abs()) {
            break;
        }
    }
    z
}

/// Roots of an exact polynomial at `prec` bits, with exact multiplicities from
/// the square-free decomposition. Each distinct root appears once.
pub fn poly_roots_numeric<R: Real>(p: &ComplexPoly, prec: usize) -> Result<Vec<NumRoot<R>>> {
    if p.degree().unwrap_or(0) == 0 {
        return Err(Error::InvalidArgument("root finding needs degree at least 1".into()));
    }
    let mut out = Vec::new();
    for (factor, mult) in p.square_free() {
        let approx = aberth(&factor.to_numeric::<f64>(53))?;
        let hi: Vec<Complex<R>> = factor.to_numeric(prec);
        for z in approx {
            let start: Complex<R> = Complex::from_f64(z.re, z.im, prec);
            let steps = if prec > 53 { 8 + prec / 16 } else { 3 };
            out.push(NumRoot { z: newton_polish(&hi, start, steps), mult });
        }
    }
    Ok(out)
}

/// Double-precision convenience wrapper.
pub fn roots_f64(p: &ComplexPoly) -> Result<Vec<NumRoot>> {
    poly_roots_numeric::<f64>(p, 53)
}

/// Splits off the roots of `p` lying in Q(i): returns `(exact roots with
/// multiplicity, cofactor)` where the cofactor has no roots that snapping found.
pub fn exact_roots(p: &ComplexPoly) -> Result<(Vec<(GaussianRational, usize)>, ComplexPoly)> {
    let mut found = Vec::new();
    let mut rest = ComplexPoly::one();
    if p.is_zero() {
        return Err(Error::InvalidArgument("roots of the zero polynomial".into()));
    }
    for (factor, mult) in p.square_free() {
        let mut f = factor;
        // keep a snapped approximation only if it is an exact root
        let approx = aberth(&f.to_numeric::<f64>(53))?;
        for z in approx {
            if f.degree().unwrap_or(0) == 0 {
                break;
            }
            let hi: Vec<Complex<f64>> = f.to_numeric(53);
            let z = newton_polish(&hi, z, 4);
            if let Some(q) = snap_to_exact(&z, DEFAULT_MAX_DEN, 53) {
                if f.eval(&q).is_zero() {
                    let lin = ComplexPoly::new(vec![-&q, GaussianRational::from(1)]);
                    f = f.exact_div(&lin).expect("verified root divides");
                    found.push((q, mult));
                }
            }
        }
        rest = &rest * &f.pow(mult as u32);
    }
    Ok((found, rest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::float::{chordal, BigFloat};
    use proptest::prelude::*;

    fn p(c: &[i64]) -> ComplexPoly {
        ComplexPoly::from_ints(c)
    }

    #[test]
    fn simple_examples() {
        let r = roots_f64(&p(&[-1, 0, 1])).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|x| x.mult == 1));
        let mut re: Vec<f64> = r.iter().map(|x| x.z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-14 && (re[1] - 1.0).abs() < 1e-14);

        let r = roots_f64(&p(&[1, -2, 1])).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].mult, 2);
        assert!((r[0].z.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cube_roots_of_unity() {
        let r = roots_f64(&p(&[-1, 0, 0, 1])).unwrap();
        assert_eq!(r.len(), 3);
        for i in 0..3 {
            for j in 0..i {
                assert!(((r[i].z - r[j].z).abs() - 3f64.sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn high_precision_polish() {
        let r = poly_roots_numeric::<BigFloat>(&p(&[-2, 0, 1]), 200).unwrap();
        let pos = r.iter().find(|x| x.z.re.to_f64() > 0.0).unwrap();
        let sq = pos.z.clone() * pos.z.clone();
        let err = (sq.re - BigFloat::from_f64(2.0, 200)).abs();
        assert!(err < BigFloat::from_f64(1e-55, 200));
    }

    #[test]
    fn exact_root_extraction() {
        // (z − 1/2)² (z + i) (z² − 2)
        let half = GaussianRational::ratio(1, 2);
        let f = &ComplexPoly::from_roots(&[half.clone(), half.clone(), -GaussianRational::i()]) * &p(&[-2, 0, 1]);
        let (roots, rest) = exact_roots(&f).unwrap();
        assert_eq!(rest, p(&[-2, 0, 1]));
        assert!(roots.contains(&(half, 2)));
        assert!(roots.contains(&(-GaussianRational::i(), 1)));
    }

    #[test]
    fn float_clustering() {
        // (z − 1)³ (z + 2) with float coefficients
        let coeffs: Vec<ComplexFloat> = p(&[-2, 5, -3, -1, 1]).to_numeric(53);
        let r = roots_of_float_poly(&coeffs, 53).unwrap();
        let mults: Vec<usize> = r.iter().map(|x| x.mult).collect();
        assert_eq!(mults.iter().sum::<usize>(), 4);
        assert!(r.iter().any(|x| x.mult == 3 && chordal(&x.z, &ComplexFloat::new(1.0, 0.0)) < 1e-4));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn rebuild_from_roots(c in prop::collection::vec((-9i64..10, -9i64..10), 2..17)) {
            let poly = ComplexPoly::new(c.iter().map(|&(a, b)| GaussianRational::from_ints(a, b)).collect());
            prop_assume!(poly.degree().unwrap_or(0) >= 1);
            let roots = roots_f64(&poly).unwrap();
            prop_assert_eq!(roots.iter().map(|r| r.mult).sum::<usize>(), poly.degree().unwrap());
            // expand lead·∏(z − r)^m and compare coefficients
            let lead = ComplexFloat::from_gaussian(poly.leading().unwrap(), 53);
            let mut acc = vec![lead];
            for r in &roots {
                for _ in 0..r.mult {
                    let mut next = vec![ComplexFloat::new(0.0, 0.0); acc.len() + 1];
                    for (i, a) in acc.iter().enumerate() {
                        next[i + 1] = next[i + 1] + *a;
                        next[i] = next[i] - *a * r.z;
                    }
                    acc = next;
                }
            }
            let exact: Vec<ComplexFloat> = poly.to_numeric(53);
            let scale = exact.iter().map(|x| x.abs()).fold(0.0, f64::max);
            for (a, e) in acc.iter().zip(&exact) {
                prop_assert!((*a - *e).abs() <= 1e-9 * scale, "{:?} vs {:?}", a, e);
            }
        }
    }
}
