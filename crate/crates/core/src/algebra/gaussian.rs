//! Exact elements of the Gaussian rationals Q(i).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact complex number `re + im·i` with rational parts.
///
/// `BigRational` keeps both parts reduced with a positive denominator, so
/// structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussianRational::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    /// `num/den` as a real Gaussian rational. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        GaussianRational::real(BigRational::new(num.into(), den.into()))
    }

    pub fn real(re: BigRational) -> Self {
        GaussianRational::new(re, BigRational::zero())
    }

    #[allow(clippy::self_named_constructors)]
    pub fn i() -> Self {
        GaussianRational::from_ints(0, 1)
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|²`, always rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussianRational::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = GaussianRational::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact square root in Q(i), if one exists.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(GaussianRational::zero());
        }
        // sqrt(x+iy) = u + iv with u = sqrt((|z|+x)/2), v = sign(y) sqrt((|z|-x)/2)
        let modulus = rational_sqrt(&self.norm_sqr())?;
        let two = BigRational::from_integer(2.into());
        let u = rational_sqrt(&((&modulus + &self.re) / &two))?;
        let mut v = rational_sqrt(&((&modulus - &self.re) / &two))?;
        if self.im.is_negative() {
            v = -v;
        }
        let root = GaussianRational::new(u, v);
        debug_assert_eq!(&(&root * &root), self);
        Some(root)
    }

    /// Total bit size of all numerators and denominators; a height proxy.
    pub fn height_bits(&self) -> u64 {
        self.re.numer().bits() + self.re.denom().bits() + self.im.numer().bits() + self.im.denom().bits()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

/// Nearest `f64` of a rational, robust to numerators and denominators beyond `f64` range.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let shift = q.numer().bits() as i64 - q.denom().bits() as i64;
    // scale to roughly [2^-64, 2^64] before converting
    let (n, d) = if shift > 0 {
        (q.numer().clone(), q.denom() << (shift as usize))
    } else {
        (q.numer() << ((-shift) as usize), q.denom().clone())
    };
    let mant = BigRational::new(n, d);
    let m = mant.numer().to_f64().unwrap_or(0.0) / mant.denom().to_f64().unwrap_or(1.0);
    m * 2f64.powi(shift.clamp(-2000, 2000) as i32)
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = integer_sqrt(q.numer())?;
    let d = integer_sqrt(q.denom())?;
    Some(BigRational::new(n, d))
}

fn integer_sqrt(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational::from_ints(1, 0)
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        GaussianRational::from_ints(v, 0)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(v: BigRational) -> Self {
        GaussianRational::real(v)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a GaussianRational> for &'a GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: &'a GaussianRational) -> GaussianRational {
                let f: fn(&GaussianRational, &GaussianRational) -> GaussianRational = $body;
                f(self, rhs)
            }
        }
        impl $tr<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: &'a GaussianRational) -> GaussianRational {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| GaussianRational::new(&a.re + &b.re, &a.im + &b.im));
forward_binop!(Sub, sub, |a, b| GaussianRational::new(&a.re - &b.re, &a.im - &b.im));
forward_binop!(Mul, mul, |a, b| {
    if a.im.is_zero() && b.im.is_zero() {
        return GaussianRational::real(&a.re * &b.re);
    }
    GaussianRational::new(&a.re * &b.re - &a.im * &b.im, &a.re * &b.im + &a.im * &b.re)
});
forward_binop!(Div, div, |a, b| {
    let inv = b.inv().expect("division by zero Gaussian rational");
    a * &inv
});

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Canonical exact text: `-17/19`, `1/2+3/4i`, `-i`, `0`.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |q: &BigRational| -> String {
            let a = q.abs();
            if a.is_one() {
                "i".to_string()
            } else {
                format!("{}i", fmt_rational(&a))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => {
                let sign = if self.im.is_negative() { "-" } else { "" };
                write!(f, "{sign}{}", im_part(&self.im))
            }
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "{}{sign}{}", fmt_rational(&self.re), im_part(&self.im))
            }
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("malformed rational `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigRational = parse_rational(n)?;
        let d: BigRational = parse_rational(d)?;
        if d.is_zero() {
            return Err(Error::InvalidArgument(format!("zero denominator in `{s}`")));
        }
        return Ok(n / d);
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip_digits = ip.trim_start_matches(['-', '+']);
        let whole: BigInt = if ip_digits.is_empty() { BigInt::zero() } else { ip_digits.parse().map_err(|_| bad())? };
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let frac: BigInt = fp.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let v = BigRational::new(whole * &scale + frac, scale);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Parses `a`, `a/b`, decimals, `bi`, `a+bi`, `a-b/ci`, `i`, `-i`.
impl FromStr for GaussianRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::InvalidArgument("empty number".into()));
        }
        let imag_part = |t: &str| -> Result<BigRational> {
            let body = &t[..t.len() - 1];
            match body {
                "" | "+" => Ok(BigRational::one()),
                "-" => Ok(-BigRational::one()),
                _ => parse_rational(body),
            }
        };
        if !s.ends_with('i') {
            return Ok(GaussianRational::real(parse_rational(&s)?));
        }
        // split at the last sign that is not the leading one
        let split = s
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        match split {
            Some(k) => Ok(GaussianRational::new(parse_rational(&s[..k])?, imag_part(&s[k..])?)),
            None => Ok(GaussianRational::new(BigRational::zero(), imag_part(&s)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn display_and_parse() {
        for s in ["0", "-17/19", "1/2+3/4i", "i", "-i", "2-3i", "-5/2i", "7"] {
            assert_eq!(g(s).to_string(), s);
        }
        assert_eq!(g("0.25"), GaussianRational::ratio(1, 4));
        assert_eq!(g("-1.5+0.5i"), GaussianRational::new(BigRational::new((-3).into(), 2.into()), BigRational::new(1.into(), 2.into())));
        assert!("1/0".parse::<GaussianRational>().is_err());
        assert!("abc".parse::<GaussianRational>().is_err());
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(g("-4").sqrt(), Some(g("2i")));
        assert_eq!(g("2i").sqrt(), Some(g("1+i")));
        assert_eq!(g("9/16").sqrt(), Some(g("3/4")));
        assert_eq!(g("2").sqrt(), None);
        assert_eq!(g("i").sqrt(), None);
    }

    #[test]
    fn f64_conversion_handles_huge_parts() {
        let big = BigRational::new(num_traits::pow(BigInt::from(10), 400) * 3, num_traits::pow(BigInt::from(10), 400));
        assert!((rational_to_f64(&big) - 3.0).abs() < 1e-12);
    }

    fn arb_gr() -> impl Strategy<Value = GaussianRational> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20).prop_map(|(a, b, c, d)| {
            GaussianRational::new(BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into()))
        })
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_gr(), b in arb_gr(), c in arb_gr()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), GaussianRational::one());
            }
            prop_assert_eq!((&a * &a).sqrt().map(|r| &r * &r), Some(&a * &a));
        }

        #[test]
        fn text_round_trip(a in arb_gr()) {
            prop_assert_eq!(a.to_string().parse::<GaussianRational>().unwrap(), a);
        }
    }
}
