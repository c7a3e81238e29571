//! Dense univariate polynomials over Q(i).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::float::{Complex, Real};
use super::gaussian::GaussianRational;
use crate::error::{Error, Result};

/// Polynomial with coefficients stored lowest degree first.
///
/// The coefficient vector never has trailing zeros; the zero polynomial is
/// the empty vector and reports `degree() == None`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ComplexPoly {
    coeffs: Vec<GaussianRational>,
}

impl ComplexPoly {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ComplexPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        ComplexPoly::new(coeffs.iter().map(|&c| GaussianRational::from(c)).collect())
    }

    pub fn zero() -> Self {
        ComplexPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        ComplexPoly::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        ComplexPoly::new(vec![c])
    }

    /// `c·zⁿ`
    pub fn monomial(c: GaussianRational, n: usize) -> Self {
        let mut coeffs = vec![GaussianRational::zero(); n];
        coeffs.push(c);
        ComplexPoly::new(coeffs)
    }

    /// The polynomial `z`.
    pub fn z() -> Self {
        ComplexPoly::monomial(GaussianRational::one(), 1)
    }

    /// `∏ (z − rᵢ)`
    pub fn from_roots(roots: &[GaussianRational]) -> Self {
        roots.iter().fold(ComplexPoly::one(), |acc, r| {
            &acc * &ComplexPoly::new(vec![-r, GaussianRational::one()])
        })
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> GaussianRational {
        self.coeffs.get(i).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&GaussianRational> {
        self.coeffs.last()
    }

    /// Order of vanishing at 0 (`None` for the zero polynomial).
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, z: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    pub fn to_numeric<R: Real>(&self, prec: usize) -> Vec<Complex<R>> {
        self.coeffs.iter().map(|c| Complex::from_gaussian(c, prec)).collect()
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        ComplexPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Divides by the leading coefficient; the zero polynomial stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) if !l.is_one() => {
                let inv = l.inv().expect("leading coefficient is nonzero");
                self.scale(&inv)
            }
            _ => self.clone(),
        }
    }

    pub fn derivative(&self) -> Self {
        ComplexPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &GaussianRational::from(i as i64))
                .collect(),
        )
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = ComplexPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Coefficients reversed relative to a formal degree `n ≥ deg`: `zⁿ·p(1/z)`.
    pub fn reversed(&self, n: usize) -> Self {
        assert!(self.degree().is_none_or(|d| d <= n), "formal degree below actual degree");
        let mut c = self.coeffs.clone();
        c.resize(n + 1, GaussianRational::zero());
        c.reverse();
        ComplexPoly::new(c)
    }

    pub fn div_rem(&self, b: &ComplexPoly) -> Result<(ComplexPoly, ComplexPoly)> {
        let db = b.degree().ok_or_else(|| Error::InvalidArgument("polynomial division by zero".into()))?;
        let lead_inv = b.leading().unwrap().inv().unwrap();
        let mut r = self.coeffs.clone();
        let Some(da) = self.degree() else {
            return Ok((ComplexPoly::zero(), ComplexPoly::zero()));
        };
        if da < db {
            return Ok((ComplexPoly::zero(), self.clone()));
        }
        let mut q = vec![GaussianRational::zero(); da - db + 1];
        for i in (0..=da - db).rev() {
            let t = &r[i + db] * &lead_inv;
            if t.is_zero() {
                continue;
            }
            for (j, bc) in b.coeffs.iter().enumerate() {
                let prod = &t * bc;
                r[i + j] -= &prod;
            }
            q[i] = t;
        }
        r.truncate(db);
        Ok((ComplexPoly::new(q), ComplexPoly::new(r)))
    }

    /// Quotient if `b` divides `self` exactly.
    pub fn exact_div(&self, b: &ComplexPoly) -> Option<ComplexPoly> {
        let (q, r) = self.div_rem(b).ok()?;
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &ComplexPoly, b: &ComplexPoly) -> Result<ComplexPoly> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::InvalidArgument("gcd of two zero polynomials".into()));
        }
        if super::modp::provably_coprime(a, b) {
            return Ok(ComplexPoly::one());
        }
        let (mut x, mut y) = (a.monic(), b.monic());
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y)?;
            x = y;
            y = r.monic();
        }
        Ok(x)
    }

    /// Square-free decomposition (Yun): monic pairwise coprime factors `(gᵢ, i)`
    /// with `self = c · ∏ gᵢⁱ`. Constants yield an empty list.
    pub fn square_free(&self) -> Vec<(ComplexPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let b = ComplexPoly::gcd(&f, &df).expect("f is nonzero");
        let mut c = f.exact_div(&b).expect("gcd divides");
        let mut d = &df.exact_div(&b).expect("gcd divides") - &c.derivative();
        let mut i = 1;
        while c.degree().unwrap_or(0) > 0 {
            let a = ComplexPoly::gcd(&c, &d).expect("c is nonzero");
            c = c.exact_div(&a).expect("gcd divides");
            d = &d.exact_div(&a).expect("gcd divides") - &c.derivative();
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }

    pub fn is_square_free(&self) -> bool {
        self.square_free().iter().all(|(_, m)| *m == 1)
    }

    /// `Σ pᵢ numⁱ den^(n−i)` for a formal degree `n ≥ deg(self)`.
    pub fn homogenize(&self, num: &ComplexPoly, den: &ComplexPoly, n: usize) -> ComplexPoly {
        let num_pows = powers(num, n);
        let den_pows = powers(den, n);
        let mut acc = ComplexPoly::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = &num_pows[i] * &den_pows[n - i];
            acc = &acc + &term.scale(c);
        }
        acc
    }

    /// Substitutes `z ← num/den` and clears denominators:
    /// returns `(outer(num/den)·den^m, den^m)` with `m = deg(outer)`.
    pub fn compose(outer: &ComplexPoly, num: &ComplexPoly, den: &ComplexPoly) -> Result<(ComplexPoly, ComplexPoly)> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("composition with a zero denominator".into()));
        }
        let m = outer.degree().unwrap_or(0);
        Ok((outer.homogenize(num, den, m), den.pow(m as u32)))
    }
}

fn powers(p: &ComplexPoly, n: usize) -> Vec<ComplexPoly> {
    let mut v = Vec::with_capacity(n + 1);
    v.push(ComplexPoly::one());
    for i in 1..=n {
        let next = &v[i - 1] * p;
        v.push(next);
    }
    v
}

/// Horner evaluation of numeric coefficients (lowest degree first).
pub fn horner<R: Real>(coeffs: &[Complex<R>], z: &Complex<R>) -> Complex<R> {
    let prec = z.precision();
    coeffs.iter().rev().fold(Complex::zero(prec), |acc, c| acc * z.clone() + c.clone())
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPoly::zero();
        }
        let mut out = vec![GaussianRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        ComplexPoly::new(out)
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        ComplexPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! owned_poly_op {
    ($tr:ident, $m:ident) => {
        impl $tr for ComplexPoly {
            type Output = ComplexPoly;
            fn $m(self, rhs: ComplexPoly) -> ComplexPoly {
                (&self).$m(&rhs)
            }
        }
    };
}

owned_poly_op!(Add, add);
owned_poly_op!(Sub, sub);
owned_poly_op!(Mul, mul);

/// Text that the expression parser reads back, highest degree first,
/// e.g. `z^2 - 1` or `(1/2+3/4i)*z^2 + 2*z`.
impl fmt::Display for ComplexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let zero = num_rational::BigRational::zero();
            let negative = (c.is_real() && c.re < zero) || (c.re.is_zero() && c.im < zero);
            let mag = if negative { -c } else { c.clone() };
            let sign = match (first, negative) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let mono = match i {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{i}"),
            };
            let coef = if i > 0 && mag.is_one() {
                String::new()
            } else if mag.is_real() || mag.re.is_zero() {
                mag.to_string()
            } else {
                format!("({mag})")
            };
            let body = match (coef.is_empty(), mono.is_empty()) {
                (true, _) => mono,
                (false, true) => coef,
                (false, false) => format!("{coef}*{mono}"),
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for ComplexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> ComplexPoly {
        ComplexPoly::from_ints(c)
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(&p(&[-1, 0, 1]) + &p(&[1]), p(&[0, 0, 1]));
        assert_eq!(&p(&[-1, 1]) * &p(&[1, 1]), p(&[-1, 0, 1]));
        assert_eq!(&p(&[-2, 0, 2]) * &p(&[-2, 0, 2]), p(&[4, 0, -8, 0, 4]));
        assert_eq!(p(&[0]).degree(), None);
        assert_eq!(p(&[3, 0, 0]).degree(), Some(0));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(ComplexPoly::gcd(&p(&[-1, 0, 1]), &p(&[-1, 1])).unwrap(), p(&[-1, 1]));
        assert_eq!(ComplexPoly::gcd(&p(&[1, 0, 1]), &p(&[-1, 0, 1])).unwrap(), p(&[1]));
        let a = &p(&[-1, 1]).pow(2) * &p(&[2, 1]);
        let b = &p(&[-1, 1]) * &p(&[3, 1]);
        assert_eq!(ComplexPoly::gcd(&a, &b).unwrap(), p(&[-1, 1]));
        assert!(ComplexPoly::gcd(&ComplexPoly::zero(), &ComplexPoly::zero()).is_err());
    }

    #[test]
    fn compose_examples() {
        let (a, b) = ComplexPoly::compose(&p(&[0, 0, 1]), &p(&[1, 1]), &p(&[1])).unwrap();
        assert_eq!((a, b), (p(&[1, 2, 1]), p(&[1])));
        let (a, b) = ComplexPoly::compose(&p(&[1, 1]), &p(&[1]), &p(&[0, 1])).unwrap();
        assert_eq!((a, b), (p(&[1, 1]), p(&[0, 1])));
        // outer 2w−2 at w = 4(z²−1)² / (16z²−1)²
        let num = p(&[-1, 0, 1]).pow(2).scale(&GaussianRational::from(4));
        let den = p(&[-1, 0, 16]).pow(2);
        let (a, _) = ComplexPoly::compose(&p(&[-2, 2]), &num, &den).unwrap();
        assert_eq!(a, p(&[6, 0, 48, 0, -504]));
        assert_eq!(a, p(&[-1, 0, -8, 0, 84]).scale(&GaussianRational::from(-6)));
        assert!(ComplexPoly::compose(&p(&[1]), &p(&[1]), &ComplexPoly::zero()).is_err());
    }

    #[test]
    fn square_free_decomposition() {
        let f = &(&p(&[-1, 1]).pow(3) * &p(&[2, 1]).pow(2)) * &p(&[5, 0, 1]);
        let sf = f.scale(&GaussianRational::from(7)).square_free();
        assert_eq!(sf, vec![(p(&[5, 0, 1]), 1), (p(&[2, 1]), 2), (p(&[-1, 1]), 3)]);
        assert!(p(&[-1, 0, 1]).is_square_free());
        assert!(!p(&[1, 2, 1]).is_square_free());
    }

    #[test]
    fn display() {
        assert_eq!(p(&[-1, 0, 1]).to_string(), "z^2 - 1");
        let q = ComplexPoly::new(vec![GaussianRational::zero(), GaussianRational::from(2), "1/2+3/4i".parse().unwrap()]);
        assert_eq!(q.to_string(), "(1/2+3/4i)*z^2 + 2*z");
        assert_eq!(ComplexPoly::constant("-i".parse().unwrap()).to_string(), "-i");
    }

    fn arb_poly() -> impl Strategy<Value = ComplexPoly> {
        prop::collection::vec((-9i64..10, -3i64..4), 0..9).prop_map(|v| {
            ComplexPoly::new(v.into_iter().map(|(a, b)| GaussianRational::from_ints(a, b)).collect())
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
        }

        #[test]
        fn gcd_contains_common_factor(a in arb_poly(), b in arb_poly(), g in arb_poly()) {
            prop_assume!(!g.is_zero() && !(a.is_zero() && b.is_zero()));
            let h = ComplexPoly::gcd(&(&a * &g), &(&b * &g)).unwrap();
            prop_assert!(h.exact_div(&g.monic()).is_some());
        }

        #[test]
        fn division_identity(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b).unwrap();
            prop_assert_eq!(&(&q * &b) + &r, a);
            prop_assert!(r.degree() < b.degree());
        }
    }
}
