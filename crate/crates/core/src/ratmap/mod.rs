//! Rational maps of the Riemann sphere with exact Q(i) coefficients.

mod critical;
mod fiber;
mod orbit;
mod point;

use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::float::{Complex, Real};
use crate::algebra::poly::horner;
use crate::algebra::ComplexPoly;
use crate::error::{Error, Result};

pub use critical::{critical_data, local_degree, CriticalData, Mode};
pub use fiber::{degree_partition, fiber, fiber_numeric, fiber_poly, DegreePartition};
pub use orbit::{postcritical_orbit, CriticalOrbit, PostcriticalOrbit, DEFAULT_ORBIT_BOUND};
pub use point::{dedup_points, format_complex, same_set, NumPoint, Point, SpherePoint};

/// Iterates above this degree are refused.
pub const DEFAULT_DEGREE_CAP: usize = 256;

/// `P/Q` with `gcd(P, Q) = 1` and `Q` monic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMap {
    num: ComplexPoly,
    den: ComplexPoly,
    degree: usize,
}

impl RationalMap {
    /// Reduces by the gcd and scales the denominator to be monic.
    pub fn new(num: ComplexPoly, den: ComplexPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let g = ComplexPoly::gcd(&num, &den)?;
        if g.is_constant() {
            return Ok(RationalMap::from_coprime(num, den));
        }
        let num = num.exact_div(&g).expect("gcd divides numerator");
        let den = den.exact_div(&g).expect("gcd divides denominator");
        Ok(RationalMap::from_coprime(num, den))
    }

    /// Skips the gcd; callers guarantee coprimality.
    pub(crate) fn from_coprime(num: ComplexPoly, den: ComplexPoly) -> Self {
        let lead = den.leading().expect("nonzero denominator").clone();
        let (num, den) = if lead.is_one() {
            (num, den)
        } else {
            let inv = lead.inv().unwrap();
            (num.scale(&inv), den.scale(&inv))
        };
        let degree = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0));
        RationalMap { num, den, degree }
    }

    pub fn from_ints(num: &[i64], den: &[i64]) -> Result<Self> {
        RationalMap::new(ComplexPoly::from_ints(num), ComplexPoly::from_ints(den))
    }

    pub fn polynomial(p: ComplexPoly) -> Self {
        RationalMap::from_coprime(p, ComplexPoly::one())
    }

    pub fn identity() -> Self {
        RationalMap::polynomial(ComplexPoly::z())
    }

    pub fn num(&self) -> &ComplexPoly {
        &self.num
    }

    pub fn den(&self) -> &ComplexPoly {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_identity(&self) -> bool {
        *self == RationalMap::identity()
    }

    pub fn eval(&self, z: &SpherePoint) -> SpherePoint {
        match z {
            SpherePoint::Finite(z) => {
                let q = self.den.eval(z);
                if q.is_zero() {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(&self.num.eval(z) / &q)
                }
            }
            SpherePoint::Infinity => {
                let d = self.degree;
                let (p, q) = (self.num.coeff(d), self.den.coeff(d));
                if q.is_zero() {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(&p / &q)
                }
            }
        }
    }

    pub fn eval_point(&self, z: &Point, prec: usize) -> Point {
        match z {
            Point::Exact(p) => Point::Exact(self.eval(p)),
            Point::Numeric(p) => Point::Numeric(self.to_numeric::<f64>(prec).eval(p)),
        }
    }

    /// `self ∘ g`. Homogenized substitution keeps numerator and denominator
    /// coprime, so no gcd is taken.
    pub fn compose(&self, g: &RationalMap) -> RationalMap {
        let d = self.degree;
        let num = self.num.homogenize(&g.num, &g.den, d);
        let den = self.den.homogenize(&g.num, &g.den, d);
        RationalMap::from_coprime(num, den)
    }

    pub fn iterate(&self, k: usize) -> Result<RationalMap> {
        self.iterate_capped(k, DEFAULT_DEGREE_CAP)
    }

    /// `self^k`, refusing when `d^k` exceeds `cap`.
    pub fn iterate_capped(&self, k: usize, cap: usize) -> Result<RationalMap> {
        if k == 0 {
            return Err(Error::InvalidArgument("iterate count must be at least 1".into()));
        }
        let degree = (self.degree as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if degree > cap as u128 {
            return Err(Error::DegreeOverflow { degree, cap });
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = self.compose(&acc);
        }
        Ok(acc)
    }

    /// `P′Q − PQ′`
    pub fn wronskian(&self) -> ComplexPoly {
        &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative())
    }

    pub fn to_numeric<R: Real>(&self, prec: usize) -> NumericMap<R> {
        NumericMap::new(self, prec)
    }

    /// Coefficient text that the expression parser reads back, e.g.
    /// `(z^2 - 2)/(z^2 + 2)` or `-2/z`.
    pub fn to_expression(&self) -> String {
        let terms = |p: &ComplexPoly| p.coeffs().iter().filter(|c| !c.is_zero()).count();
        if self.den.is_constant() {
            // den is monic, so it is exactly 1
            return format!("{}", self.num);
        }
        let num = if terms(&self.num) > 1 { format!("({})", self.num) } else { format!("{}", self.num) };
        // a monic single-term denominator is a bare power of z
        let den = if terms(&self.den) > 1 { format!("({})", self.den) } else { format!("{}", self.den) };
        format!("{num}/{den}")
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expression())
    }
}

impl fmt::Debug for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expression())
    }
}

/// Floating-point evaluator that switches to the chart at ∞ outside the unit disk.
#[derive(Clone, Debug)]
pub struct NumericMap<R = f64> {
    num: Vec<Complex<R>>,
    den: Vec<Complex<R>>,
    num_rev: Vec<Complex<R>>,
    den_rev: Vec<Complex<R>>,
    prec: usize,
}

impl<R: Real> NumericMap<R> {
    pub fn new(f: &RationalMap, prec: usize) -> Self {
        let d = f.degree;
        NumericMap {
            num: f.num.to_numeric(prec),
            den: f.den.to_numeric(prec),
            num_rev: f.num.reversed(d).to_numeric(prec),
            den_rev: f.den.reversed(d).to_numeric(prec),
            prec,
        }
    }

    fn padded(v: &[Complex<R>], n: usize, prec: usize) -> Vec<Complex<R>> {
        let mut v = v.to_vec();
        v.resize(n, Complex::zero(prec));
        v
    }

    /// Builds an evaluator straight from float coefficients (lowest degree first).
    pub fn from_coeffs(num: Vec<Complex<R>>, den: Vec<Complex<R>>, prec: usize) -> Self {
        let n = num.len().max(den.len());
        let num = Self::padded(&num, n, prec);
        let den = Self::padded(&den, n, prec);
        let mut num_rev = num.clone();
        num_rev.reverse();
        let mut den_rev = den.clone();
        den_rev.reverse();
        NumericMap { num, den, num_rev, den_rev, prec }
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn eval(&self, z: &NumPoint<R>) -> NumPoint<R> {
        let (p, q) = match z {
            NumPoint::Infinity => {
                let zero = Complex::zero(self.prec);
                (horner(&self.num_rev, &zero), horner(&self.den_rev, &zero))
            }
            NumPoint::Finite(z) => {
                if z.to_c64().norm_sqr() <= 1.0 {
                    (horner(&self.num, z), horner(&self.den, z))
                } else {
                    let w = z.inv();
                    (horner(&self.num_rev, &w), horner(&self.den_rev, &w))
                }
            }
        };
        if q.is_zero() {
            NumPoint::Infinity
        } else {
            let v = p / q;
            if v.to_c64().is_finite() {
                NumPoint::Finite(v)
            } else {
                NumPoint::Infinity
            }
        }
    }

    pub fn eval_finite(&self, z: &Complex<R>) -> NumPoint<R> {
        self.eval(&NumPoint::Finite(z.clone()))
    }
}
