//! Small-height random maps for tests and the command line's `sample` command.

use num_traits::Zero;
use rand::Rng;

use crate::algebra::{ComplexPoly, GaussianRational};
use crate::mobius::MobiusTransform;
use crate::ratmap::{critical_data, Mode, RationalMap};

/// `p/q` with `|p| ≤ bound`, `1 ≤ q ≤ bound`.
pub fn rational<R: Rng>(rng: &mut R, bound: i64) -> GaussianRational {
    GaussianRational::ratio(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

pub fn nonzero_rational<R: Rng>(rng: &mut R, bound: i64) -> GaussianRational {
    loop {
        let q = rational(rng, bound);
        if !q.is_zero() {
            return q;
        }
    }
}

/// Gaussian integer with parts in `[-bound, bound]`, real half the time.
pub fn gaussian_integer<R: Rng>(rng: &mut R, bound: i64) -> GaussianRational {
    let re = rng.gen_range(-bound..=bound);
    let im = if rng.gen_bool(0.5) { 0 } else { rng.gen_range(-bound..=bound) };
    GaussianRational::from_ints(re, im)
}

pub fn mobius<R: Rng>(rng: &mut R) -> MobiusTransform {
    loop {
        let e: Vec<GaussianRational> = (0..4).map(|_| gaussian_integer(rng, 3)).collect();
        if let Ok(m) = MobiusTransform::new(e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone()) {
            return m;
        }
    }
}

/// Degree-2 map with small Gaussian-integer coefficients.
pub fn quadratic<R: Rng>(rng: &mut R) -> RationalMap {
    loop {
        let num = ComplexPoly::new((0..3).map(|_| gaussian_integer(rng, 4)).collect());
        let den = ComplexPoly::new((0..3).map(|_| gaussian_integer(rng, 4)).collect());
        if let Ok(f) = RationalMap::new(num, den) {
            if f.degree() == 2 {
                return f;
            }
        }
    }
}

/// `f_a(z) = (z² − a)/(z² + a)`.
pub fn fa(a: &GaussianRational) -> RationalMap {
    let one = GaussianRational::from(1);
    let zero = GaussianRational::zero();
    RationalMap::new(
        ComplexPoly::new(vec![-a, zero.clone(), one.clone()]),
        ComplexPoly::new(vec![a.clone(), zero, one]),
    )
    .expect("nonzero denominator")
}

/// Real rational `a ∉ {0, ±1}`.
pub fn fa_parameter<R: Rng>(rng: &mut R) -> GaussianRational {
    loop {
        let a = nonzero_rational(rng, 9);
        let one = GaussianRational::from(1);
        if a != one && a != -&one {
            return a;
        }
    }
}

/// A critically coalescing quadratic: a Möbius conjugate of some `f_a`.
pub fn coalescing_quadratic<R: Rng>(rng: &mut R) -> RationalMap {
    let f = fa(&fa_parameter(rng));
    let m = mobius(rng);
    m.inverse().to_map().compose(&f.compose(&m.to_map()))
}

/// `μ₁ ∘ z^d ∘ μ₂`, always bicritical.
pub fn bicritical<R: Rng>(rng: &mut R, d: usize) -> RationalMap {
    let mut num = vec![0; d + 1];
    num[d] = 1;
    let power = RationalMap::from_ints(&num, &[1]).unwrap();
    mobius(rng).to_map().compose(&power.compose(&mobius(rng).to_map()))
}

pub fn bicritical_cubic<R: Rng>(rng: &mut R) -> RationalMap {
    bicritical(rng, 3)
}

/// `f_c(z) = c(z + 1/z)`.
pub fn sigma2(c: &GaussianRational) -> RationalMap {
    let zero = GaussianRational::zero();
    RationalMap::new(
        ComplexPoly::new(vec![c.clone(), zero.clone(), c.clone()]),
        ComplexPoly::new(vec![zero, GaussianRational::from(1)]),
    )
    .expect("nonzero denominator")
}

/// Whether `f` is bicritical (exact critical data permitting).
pub fn is_bicritical(f: &RationalMap) -> bool {
    critical_data(f, Mode::Numeric).map(|c| c.bicritical).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn samples_have_expected_shape() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..5 {
            assert_eq!(quadratic(&mut rng).degree(), 2);
            let c = coalescing_quadratic(&mut rng);
            assert_eq!(critical_data(&c, Mode::Numeric).unwrap().critically_coalescing, Some(true));
            let g = bicritical_cubic(&mut rng);
            assert_eq!(g.degree(), 3);
            assert!(is_bicritical(&g));
        }
        assert_eq!(sigma2(&GaussianRational::ratio(3, 5)).to_string(), "(3/5*z^2 + 3/5)/z");
    }
}
