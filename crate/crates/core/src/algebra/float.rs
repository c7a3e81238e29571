//! Floating-point scalars: plain `f64` and an arbitrary-precision binary float,
//! behind one small trait so numeric kernels can run at either precision.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::ops::SquareRoot;
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use num_bigint::BigInt;
use num_rational::BigRational;

use super::gaussian::{rational_to_f64, GaussianRational};

pub trait Real:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64, prec: usize) -> Self;
    fn from_rational(q: &BigRational, prec: usize) -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn precision(&self) -> usize;

    fn abs(&self) -> Self {
        if self.to_f64() < 0.0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn zero_like(&self) -> Self {
        Self::from_f64(0.0, self.precision())
    }

    fn one_like(&self) -> Self {
        Self::from_f64(1.0, self.precision())
    }
}

impl Real for f64 {
    fn from_f64(v: f64, _prec: usize) -> Self {
        v
    }
    fn from_rational(q: &BigRational, _prec: usize) -> Self {
        rational_to_f64(q)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn precision(&self) -> usize {
        53
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

/// Binary float with a fixed working precision in bits.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigFloat(pub FBig<HalfEven>);

pub fn bigint_to_ibig(n: &BigInt) -> IBig {
    IBig::from_str_radix(&n.to_str_radix(16), 16).expect("hex digits round-trip")
}

impl BigFloat {
    fn exact(v: FBig<HalfEven>, prec: usize) -> Self {
        BigFloat(v.with_precision(prec).value())
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl Real for BigFloat {
    fn from_f64(v: f64, prec: usize) -> Self {
        let x = FBig::<HalfEven>::try_from(v).expect("finite f64");
        BigFloat::exact(x, prec)
    }

    fn from_rational(q: &BigRational, prec: usize) -> Self {
        let n = BigFloat::exact(FBig::from(bigint_to_ibig(q.numer())), prec);
        let d = BigFloat::exact(FBig::from(bigint_to_ibig(q.denom())), prec);
        n / d
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    fn sqrt(&self) -> Self {
        BigFloat(self.0.sqrt())
    }

    fn precision(&self) -> usize {
        self.0.precision()
    }
}

macro_rules! bigfloat_op {
    ($tr:ident, $m:ident) => {
        impl $tr for BigFloat {
            type Output = BigFloat;
            fn $m(self, rhs: BigFloat) -> BigFloat {
                BigFloat($tr::$m(self.0, rhs.0))
            }
        }
    };
}

bigfloat_op!(Add, add);
bigfloat_op!(Sub, sub);
bigfloat_op!(Mul, mul);
bigfloat_op!(Div, div);

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat(-self.0)
    }
}

/// Complex number over a [`Real`] scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex<R> {
    pub re: R,
    pub im: R,
}

/// Double-precision complex number, the workhorse of the numeric layer.
pub type ComplexFloat = Complex<f64>;

impl ComplexFloat {
    /// Rejects NaN and infinite parts.
    pub fn try_new(re: f64, im: f64) -> Option<Self> {
        (re.is_finite() && im.is_finite()).then_some(Complex { re, im })
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl<R: Real> Complex<R> {
    pub fn new(re: R, im: R) -> Self {
        Complex { re, im }
    }

    pub fn from_f64(re: f64, im: f64, prec: usize) -> Self {
        Complex::new(R::from_f64(re, prec), R::from_f64(im, prec))
    }

    pub fn from_gaussian(g: &GaussianRational, prec: usize) -> Self {
        Complex::new(R::from_rational(&g.re, prec), R::from_rational(&g.im, prec))
    }

    pub fn zero(prec: usize) -> Self {
        Complex::from_f64(0.0, 0.0, prec)
    }

    pub fn one(prec: usize) -> Self {
        Complex::from_f64(1.0, 0.0, prec)
    }

    pub fn precision(&self) -> usize {
        self.re.precision()
    }

    pub fn to_c64(&self) -> ComplexFloat {
        Complex { re: self.re.to_f64(), im: self.im.to_f64() }
    }

    pub fn lift<S: Real>(&self, prec: usize) -> Complex<S> {
        Complex::from_f64(self.re.to_f64(), self.im.to_f64(), prec)
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> R {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn abs(&self) -> R {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: &R) -> Self {
        Complex::new(self.re.clone() * s.clone(), self.im.clone() * s.clone())
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        Complex::new(self.re.clone() / n.clone(), -(self.im.clone() / n))
    }

    pub fn is_zero(&self) -> bool {
        self.re.to_f64() == 0.0 && self.im.to_f64() == 0.0
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let r = self.abs();
        let two = R::from_f64(2.0, self.precision());
        // take the larger component by the stable half-angle formula, divide for the other
        if self.re.to_f64() >= 0.0 {
            let t = ((r + self.re.clone()) / two.clone()).sqrt();
            let im = self.im.clone() / (two * t.clone());
            Complex::new(t, im)
        } else {
            let t = ((r - self.re.clone()) / two.clone()).sqrt();
            let re = self.im.abs() / (two * t.clone());
            let im = if self.im.to_f64() < 0.0 { -t } else { t };
            Complex::new(re, im)
        }
    }

    pub fn powu(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Complex::one(self.precision());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl<R: Real> Add for Complex<R> {
    type Output = Complex<R>;
    fn add(self, rhs: Self) -> Self {
        Complex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<R: Real> Sub for Complex<R> {
    type Output = Complex<R>;
    fn sub(self, rhs: Self) -> Self {
        Complex::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl<R: Real> Mul for Complex<R> {
    type Output = Complex<R>;
    fn mul(self, rhs: Self) -> Self {
        Complex::new(
            self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone(),
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl<R: Real> Div for Complex<R> {
    type Output = Complex<R>;
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv()
    }
}

impl<R: Real> Neg for Complex<R> {
    type Output = Complex<R>;
    fn neg(self) -> Self {
        Complex::new(-self.re, -self.im)
    }
}

impl Copy for Complex<f64> {}

/// Chordal distance on the sphere between two finite points (range [0, 2]).
pub fn chordal<R: Real>(z: &Complex<R>, w: &Complex<R>) -> f64 {
    let (z, w) = (z.to_c64(), w.to_c64());
    let d = (z - w).abs();
    let den = ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt();
    if den.is_finite() {
        2.0 * d / den
    } else {
        // both far out: compare reciprocals instead
        let (zi, wi) = (z.inv(), w.inv());
        let den = ((1.0 + zi.norm_sqr()) * (1.0 + wi.norm_sqr())).sqrt();
        2.0 * (zi - wi).abs() / den
    }
}

/// Chordal distance from a finite point to infinity.
pub fn chordal_to_infinity<R: Real>(z: &Complex<R>) -> f64 {
    2.0 / (1.0 + z.to_c64().norm_sqr()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bigfloat_arithmetic_beyond_double() {
        let prec = 200;
        let third = BigFloat::from_rational(&BigRational::new(1.into(), 3.into()), prec);
        let back = third.clone() * BigFloat::from_f64(3.0, prec);
        let err = (back - BigFloat::from_f64(1.0, prec)).abs();
        assert!(err < BigFloat::from_f64(1e-55, prec));
        let two = BigFloat::from_f64(2.0, prec);
        let r = two.sqrt();
        let sq = r.clone() * r;
        assert!((sq - BigFloat::from_f64(2.0, prec)).abs() < BigFloat::from_f64(1e-58, prec));
    }

    #[test]
    fn complex_ops() {
        let a = ComplexFloat::new(1.0, 2.0);
        let b = ComplexFloat::new(-3.0, 0.5);
        let q = (a * b) / b;
        assert!(chordal(&q, &a) < 1e-15);
        assert!(ComplexFloat::try_new(f64::NAN, 0.0).is_none());
        for (re, im) in [(3.0, 4.0), (-4.0, 0.0), (0.0, -2.0), (-1.0, -1e-9)] {
            let z = ComplexFloat::new(re, im);
            let r = z.sqrt();
            assert!(chordal(&(r * r), &z) < 1e-14);
            assert!(r.re >= 0.0);
        }
        assert!((chordal_to_infinity(&ComplexFloat::new(0.0, 0.0)) - 2.0).abs() < 1e-15);
        let big = ComplexFloat::new(1e200, 0.0);
        assert!(chordal(&big, &ComplexFloat::new(1e200, 1e190)) < 1e-9);
    }
}
