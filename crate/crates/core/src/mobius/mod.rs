//! Möbius transformations, exact and numeric, and finite groups of them.

mod group;

use std::fmt;

use num_traits::Zero;

use crate::algebra::float::{Complex, Real};
use crate::algebra::snap::{snap_to_exact, DEFAULT_MAX_DEN};
use crate::algebra::{ComplexPoly, GaussianRational};
use crate::error::{Error, Result};
use crate::ratmap::{NumPoint, Point, RationalMap, SpherePoint};

pub use group::{
    commuting_structure, group_closure, group_closure_mixed, BeardonCase, CommutingReport, GroupElement, IsoType,
    MobiusGroup, Polyhedral, ELEMENT_TOL,
};

/// `z ↦ (az + b)/(cz + d)` scaled so the first nonzero entry is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MobiusTransform {
    a: GaussianRational,
    b: GaussianRational,
    c: GaussianRational,
    d: GaussianRational,
}

fn gr(v: i64) -> GaussianRational {
    GaussianRational::from(v)
}

impl MobiusTransform {
    pub fn new(a: GaussianRational, b: GaussianRational, c: GaussianRational, d: GaussianRational) -> Result<Self> {
        let det = &(&a * &d) - &(&b * &c);
        if det.is_zero() {
            return Err(Error::InvalidArgument("singular Möbius matrix".into()));
        }
        let lead = [&a, &b, &c, &d].into_iter().find(|x| !x.is_zero()).unwrap().clone();
        let inv = lead.inv().unwrap();
        Ok(MobiusTransform { a: &a * &inv, b: &b * &inv, c: &c * &inv, d: &d * &inv })
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        MobiusTransform::new(gr(a), gr(b), gr(c), gr(d))
    }

    pub fn identity() -> Self {
        MobiusTransform::from_ints(1, 0, 0, 1).unwrap()
    }

    /// `z ↦ λz`
    pub fn scaling(lambda: GaussianRational) -> Result<Self> {
        MobiusTransform::new(lambda, gr(0), gr(0), gr(1))
    }

    pub fn entries(&self) -> [&GaussianRational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> GaussianRational {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn is_identity(&self) -> bool {
        *self == MobiusTransform::identity()
    }

    /// `self ∘ t` (matrix product).
    pub fn compose(&self, t: &MobiusTransform) -> MobiusTransform {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        MobiusTransform::new(
            &(a * &t.a) + &(b * &t.c),
            &(a * &t.b) + &(b * &t.d),
            &(c * &t.a) + &(d * &t.c),
            &(c * &t.b) + &(d * &t.d),
        )
        .expect("product of invertible matrices")
    }

    pub fn inverse(&self) -> MobiusTransform {
        MobiusTransform::new(self.d.clone(), -&self.b, -&self.c, self.a.clone()).expect("invertible")
    }

    pub fn pow(&self, n: usize) -> MobiusTransform {
        (0..n).fold(MobiusTransform::identity(), |acc, _| acc.compose(self))
    }

    pub fn apply(&self, z: &SpherePoint) -> SpherePoint {
        let (num, den) = match z {
            SpherePoint::Finite(z) => (&(&self.a * z) + &self.b, &(&self.c * z) + &self.d),
            SpherePoint::Infinity => (self.a.clone(), self.c.clone()),
        };
        if den.is_zero() {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite(&num / &den)
        }
    }

    pub fn apply_point(&self, z: &Point) -> Point {
        match z {
            Point::Exact(p) => Point::Exact(self.apply(p)),
            Point::Numeric(p) => Point::Numeric(self.to_numeric::<f64>(53).apply(p)),
        }
    }

    /// Least `n ≤ max_order` with `selfⁿ = id`.
    pub fn order(&self, max_order: usize) -> Option<usize> {
        let mut acc = self.clone();
        for n in 1..=max_order {
            if acc.is_identity() {
                return Some(n);
            }
            acc = acc.compose(self);
        }
        None
    }

    /// Fixed points on the sphere: roots of `cz² + (d − a)z − b`, with ∞ when
    /// `c = 0`. Exact when the discriminant is a square in Q(i).
    pub fn fixed_points(&self) -> Result<Vec<Point>> {
        if self.is_identity() {
            return Err(Error::InvalidArgument("the identity fixes every point".into()));
        }
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let dma = d - a;
        if c.is_zero() {
            let mut out = vec![Point::Exact(SpherePoint::Infinity)];
            if !dma.is_zero() {
                out.insert(0, Point::Exact(SpherePoint::Finite(b / &dma)));
            }
            return Ok(out);
        }
        let disc = &(&dma * &dma) + &(&(b * c) * &gr(4));
        let two_c = c * &gr(2);
        let amd = a - d;
        if disc.is_zero() {
            return Ok(vec![Point::Exact(SpherePoint::Finite(&amd / &two_c))]);
        }
        if let Some(s) = disc.sqrt() {
            return Ok(vec![
                Point::Exact(SpherePoint::Finite(&(&amd + &s) / &two_c)),
                Point::Exact(SpherePoint::Finite(&(&amd - &s) / &two_c)),
            ]);
        }
        let s = Complex::<f64>::from_gaussian(&disc, 53).sqrt();
        let amd = Complex::<f64>::from_gaussian(&amd, 53);
        let two_c = Complex::<f64>::from_gaussian(&two_c, 53);
        Ok(vec![
            Point::Numeric(NumPoint::Finite((amd + s) / two_c)),
            Point::Numeric(NumPoint::Finite((amd - s) / two_c)),
        ])
    }

    /// The map sending `(z1, z2, z3)` to `(0, ∞, 1)`.
    pub fn from_three_points(z1: &SpherePoint, z2: &SpherePoint, z3: &SpherePoint) -> Result<Self> {
        let h = |p: &SpherePoint| match p {
            SpherePoint::Finite(z) => (z.clone(), gr(1)),
            SpherePoint::Infinity => (gr(1), gr(0)),
        };
        let det = |p: &(GaussianRational, GaussianRational), q: &(GaussianRational, GaussianRational)| {
            &(&p.0 * &q.1) - &(&q.0 * &p.1)
        };
        let (p1, p2, p3) = (h(z1), h(z2), h(z3));
        let k1 = det(&p3, &p2);
        let k2 = det(&p3, &p1);
        if k1.is_zero() || k2.is_zero() || det(&p1, &p2).is_zero() {
            return Err(Error::InvalidArgument("three-point chart needs distinct points".into()));
        }
        MobiusTransform::new(&p1.1 * &k1, -&(&p1.0 * &k1), &p2.1 * &k2, -&(&p2.0 * &k2))
    }

    /// The map sending `zᵢ ↦ wᵢ`.
    pub fn from_triples(z: [&SpherePoint; 3], w: [&SpherePoint; 3]) -> Result<Self> {
        let a = MobiusTransform::from_three_points(z[0], z[1], z[2])?;
        let b = MobiusTransform::from_three_points(w[0], w[1], w[2])?;
        Ok(b.inverse().compose(&a))
    }

    pub fn to_map(&self) -> RationalMap {
        RationalMap::from_coprime(
            ComplexPoly::new(vec![self.b.clone(), self.a.clone()]),
            ComplexPoly::new(vec![self.d.clone(), self.c.clone()]),
        )
    }

    pub fn from_map(f: &RationalMap) -> Result<Self> {
        if f.degree() != 1 {
            return Err(Error::InvalidArgument(format!("degree {} map is not Möbius", f.degree())));
        }
        MobiusTransform::new(f.num().coeff(1), f.num().coeff(0), f.den().coeff(1), f.den().coeff(0))
    }

    pub fn to_numeric<R: Real>(&self, prec: usize) -> NumMobius<R> {
        let m = [&self.a, &self.b, &self.c, &self.d].map(|x| Complex::from_gaussian(x, prec));
        NumMobius::normalized(m)
    }

    /// Entries as exact strings `[a, b, c, d]`.
    pub fn entry_strings(&self) -> [String; 4] {
        self.entries().map(|x| x.to_string())
    }
}

impl fmt::Display for MobiusTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_map())
    }
}

impl fmt::Debug for MobiusTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Floating-point Möbius matrix normalized to determinant 1 (so defined up to sign).
#[derive(Clone, Debug)]
pub struct NumMobius<R = f64> {
    pub m: [Complex<R>; 4],
}

impl<R: Real> NumMobius<R> {
    pub fn normalized(m: [Complex<R>; 4]) -> Self {
        let [a, b, c, d] = m;
        let det = a.clone() * d.clone() - b.clone() * c.clone();
        let s = det.sqrt().inv();
        NumMobius { m: [a * s.clone(), b * s.clone(), c * s.clone(), d * s] }
    }

    pub fn precision(&self) -> usize {
        self.m[0].precision()
    }

    pub fn identity(prec: usize) -> Self {
        NumMobius { m: [Complex::one(prec), Complex::zero(prec), Complex::zero(prec), Complex::one(prec)] }
    }

    pub fn det(&self) -> Complex<R> {
        let [a, b, c, d] = &self.m;
        a.clone() * d.clone() - b.clone() * c.clone()
    }

    /// `self ∘ t`
    pub fn compose(&self, t: &NumMobius<R>) -> NumMobius<R> {
        let [a, b, c, d] = self.m.clone();
        let [e, f, g, h] = t.m.clone();
        NumMobius::normalized([
            a.clone() * e.clone() + b.clone() * g.clone(),
            a * f.clone() + b * h.clone(),
            c.clone() * e + d.clone() * g,
            c * f + d * h,
        ])
    }

    pub fn inverse(&self) -> NumMobius<R> {
        let [a, b, c, d] = self.m.clone();
        NumMobius { m: [d, -b, -c, a] }
    }

    pub fn apply(&self, z: &NumPoint<R>) -> NumPoint<R> {
        let [a, b, c, d] = &self.m;
        let (num, den) = match z {
            NumPoint::Finite(z) => (a.clone() * z.clone() + b.clone(), c.clone() * z.clone() + d.clone()),
            NumPoint::Infinity => (a.clone(), c.clone()),
        };
        if den.is_zero() {
            return NumPoint::Infinity;
        }
        let v = num / den;
        if v.to_c64().is_finite() && v.to_c64().abs() < 1e300 {
            NumPoint::Finite(v)
        } else {
            NumPoint::Infinity
        }
    }

    /// The map sending `(z1, z2, z3)` to `(0, ∞, 1)`; `None` if points coincide numerically.
    pub fn from_three_points(z: [&NumPoint<R>; 3], prec: usize) -> Option<Self> {
        let h = |p: &NumPoint<R>| match p {
            NumPoint::Finite(z) => (z.clone(), Complex::one(prec)),
            NumPoint::Infinity => (Complex::one(prec), Complex::zero(prec)),
        };
        let det = |p: &(Complex<R>, Complex<R>), q: &(Complex<R>, Complex<R>)| {
            p.0.clone() * q.1.clone() - q.0.clone() * p.1.clone()
        };
        let (p1, p2, p3) = (h(z[0]), h(z[1]), h(z[2]));
        let k1 = det(&p3, &p2);
        let k2 = det(&p3, &p1);
        let k3 = det(&p1, &p2);
        let tiny = |x: &Complex<R>| x.to_c64().abs() < 1e-300;
        if tiny(&k1) || tiny(&k2) || tiny(&k3) {
            return None;
        }
        Some(NumMobius::normalized([
            p1.1.clone() * k1.clone(),
            -(p1.0 * k1),
            p2.1.clone() * k2.clone(),
            -(p2.0 * k2),
        ]))
    }

    pub fn from_triples(z: [&NumPoint<R>; 3], w: [&NumPoint<R>; 3], prec: usize) -> Option<Self> {
        let a = NumMobius::from_three_points(z, prec)?;
        let b = NumMobius::from_three_points(w, prec)?;
        Some(b.inverse().compose(&a))
    }

    /// Projective distance `min(‖A − B‖, ‖A + B‖)` in the max-entry norm.
    pub fn dist(&self, other: &NumMobius<R>) -> f64 {
        let norm = |sign: f64| {
            self.m
                .iter()
                .zip(&other.m)
                .map(|(x, y)| {
                    let (x, y) = (x.to_c64(), y.to_c64());
                    (x - y.scale(&sign)).abs()
                })
                .fold(0.0, f64::max)
        };
        norm(1.0).min(norm(-1.0))
    }

    pub fn to_f64(&self) -> NumMobius {
        NumMobius { m: self.m.clone().map(|x| x.to_c64()) }
    }

    pub fn lift<S: Real>(&self, prec: usize) -> NumMobius<S> {
        NumMobius::normalized(self.m.clone().map(|x| x.lift(prec)))
    }

    /// Recovers an exact transform: divide by the entry of largest modulus,
    /// then snap each entry to a small-height Gaussian rational.
    pub fn snap(&self, prec: usize) -> Option<MobiusTransform> {
        let m: Vec<_> = self.m.iter().map(|x| x.to_c64()).collect();
        let big = *m.iter().max_by(|x, y| x.abs().total_cmp(&y.abs()))?;
        let scaled: Vec<_> = m.iter().map(|x| *x / big).collect();
        let e: Option<Vec<GaussianRational>> =
            scaled.iter().map(|x| snap_to_exact(x, DEFAULT_MAX_DEN, prec)).collect();
        let e = e?;
        MobiusTransform::new(e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone()).ok()
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.dist(&NumMobius::identity(self.precision())) < tol
    }
}

impl NumMobius {
    /// Least `n ≤ max_order` with `selfⁿ ≈ id`.
    pub fn order(&self, max_order: usize, tol: f64) -> Option<usize> {
        let mut acc = self.clone();
        for n in 1..=max_order {
            if acc.is_identity(tol) {
                return Some(n);
            }
            acc = acc.compose(self);
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> MobiusTransform {
        MobiusTransform::from_ints(a, b, c, d).unwrap()
    }

    fn ex(s: &str) -> SpherePoint {
        if s == "inf" {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite(s.parse().unwrap())
        }
    }

    #[test]
    fn composition_examples() {
        let neg = m(-1, 0, 0, 1);
        assert!(neg.compose(&neg).is_identity());
        let a_over_z = m(0, 3, 1, 0);
        assert_eq!(a_over_z.compose(&neg), m(0, -3, 1, 0));
        assert!(m(1, 1, 0, 1).compose(&m(1, -1, 0, 1)).is_identity());
        // projective: scaling entries changes nothing
        assert_eq!(m(2, 4, 6, 10), m(1, 2, 3, 5));
    }

    #[test]
    fn fixed_point_examples() {
        let fp = m(-1, 0, 0, 1).fixed_points().unwrap();
        assert_eq!(fp, vec![Point::Exact(ex("0")), Point::Exact(ex("inf"))]);
        let fp = m(0, 4, 1, 0).fixed_points().unwrap();
        assert!(fp.contains(&Point::Exact(ex("2"))) && fp.contains(&Point::Exact(ex("-2"))));
        assert_eq!(m(1, 1, 0, 1).fixed_points().unwrap(), vec![Point::Exact(ex("inf"))]);
        assert!(MobiusTransform::identity().fixed_points().is_err());
        // 2/z has irrational fixed points ±√2
        let fp = m(0, 2, 1, 0).fixed_points().unwrap();
        assert!(fp.iter().all(|p| !p.is_exact()));
        for p in &fp {
            let NumPoint::Finite(z) = p.approx() else { panic!() };
            assert!(((z * z).re - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn orders() {
        assert_eq!(m(-1, 0, 0, 1).order(10), Some(2));
        let iz = MobiusTransform::scaling(GaussianRational::i()).unwrap();
        assert_eq!(iz.order(10), Some(4));
        assert_eq!(m(1, 1, 0, 1).order(50), None);
    }

    #[test]
    fn three_point_charts() {
        let pts = [ex("0"), ex("inf"), ex("1")];
        let chart = MobiusTransform::from_three_points(&ex("2"), &ex("inf"), &ex("1/2+i")).unwrap();
        assert_eq!(chart.apply(&ex("2")), pts[0]);
        assert_eq!(chart.apply(&ex("inf")), pts[1]);
        assert_eq!(chart.apply(&ex("1/2+i")), pts[2]);
        let t = MobiusTransform::from_triples([&ex("1"), &ex("2"), &ex("3")], [&ex("inf"), &ex("-1"), &ex("i")]).unwrap();
        assert_eq!(t.apply(&ex("1")), ex("inf"));
        assert_eq!(t.apply(&ex("3")), ex("i"));
        assert!(MobiusTransform::from_three_points(&ex("1"), &ex("1"), &ex("2")).is_err());

        let nt = t.to_numeric::<f64>(53);
        let nt2 = NumMobius::from_triples(
            [&ex("1").approx(), &ex("2").approx(), &ex("3").approx()],
            [&NumPoint::Infinity, &ex("-1").approx(), &ex("i").approx()],
            53,
        )
        .unwrap();
        assert!(nt.dist(&nt2) < 1e-12);
        assert_eq!(nt2.snap(53), Some(t));
    }

    #[test]
    fn numeric_order_and_inverse() {
        let r = MobiusTransform::scaling(GaussianRational::i()).unwrap().to_numeric::<f64>(53);
        assert_eq!(r.order(16, 1e-9), Some(4));
        assert!(r.compose(&r.inverse()).is_identity(1e-12));
    }
}
