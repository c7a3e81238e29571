//! Points of the Riemann sphere, exact and approximate.

use std::fmt;

use num_traits::Zero;

use crate::algebra::float::{chordal, chordal_to_infinity, Complex, ComplexFloat, Real};
use crate::algebra::snap::{snap_to_exact, DEFAULT_MAX_DEN};
use crate::algebra::GaussianRational;

/// Exact point: an element of Q(i) or ∞.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum SpherePoint {
    Finite(GaussianRational),
    Infinity,
}

impl SpherePoint {
    pub fn zero() -> Self {
        SpherePoint::Finite(GaussianRational::zero())
    }

    pub fn from_int(v: i64) -> Self {
        SpherePoint::Finite(GaussianRational::from(v))
    }

    pub fn finite(&self) -> Option<&GaussianRational> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn to_num<R: Real>(&self, prec: usize) -> NumPoint<R> {
        match self {
            SpherePoint::Finite(z) => NumPoint::Finite(Complex::from_gaussian(z, prec)),
            SpherePoint::Infinity => NumPoint::Infinity,
        }
    }

    pub fn approx(&self) -> NumPoint {
        self.to_num(53)
    }

    pub fn height_bits(&self) -> u64 {
        self.finite().map_or(0, |z| z.height_bits())
    }
}

impl From<GaussianRational> for SpherePoint {
    fn from(z: GaussianRational) -> Self {
        SpherePoint::Finite(z)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{z}"),
            SpherePoint::Infinity => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Approximate point on the sphere.
#[derive(Clone, Debug, PartialEq)]
pub enum NumPoint<R = f64> {
    Finite(Complex<R>),
    Infinity,
}

impl<R: Real> NumPoint<R> {
    /// Chordal distance, in [0, 2].
    pub fn dist(&self, other: &NumPoint<R>) -> f64 {
        match (self, other) {
            (NumPoint::Infinity, NumPoint::Infinity) => 0.0,
            (NumPoint::Finite(z), NumPoint::Infinity) | (NumPoint::Infinity, NumPoint::Finite(z)) => {
                chordal_to_infinity(z)
            }
            (NumPoint::Finite(z), NumPoint::Finite(w)) => chordal(z, w),
        }
    }

    pub fn to_f64(&self) -> NumPoint {
        match self {
            NumPoint::Finite(z) => NumPoint::Finite(z.to_c64()),
            NumPoint::Infinity => NumPoint::Infinity,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, NumPoint::Infinity)
    }
}

impl NumPoint {
    /// Treats very large moduli as ∞.
    pub fn normalized(self) -> NumPoint {
        match self {
            NumPoint::Finite(z) if !z.is_finite() || z.abs() > 1e300 => NumPoint::Infinity,
            p => p,
        }
    }

    /// Snaps to an exact point when a nearby Gaussian rational exists.
    pub fn snap(&self, prec: usize) -> Option<SpherePoint> {
        match self {
            NumPoint::Infinity => Some(SpherePoint::Infinity),
            NumPoint::Finite(z) => {
                if z.abs() > 1e8 {
                    // try in the chart at ∞
                    let w = z.inv();
                    if w.abs() < snap_tol(prec) {
                        return Some(SpherePoint::Infinity);
                    }
                }
                snap_to_exact(z, DEFAULT_MAX_DEN, prec).map(SpherePoint::Finite)
            }
        }
    }
}

fn snap_tol(prec: usize) -> f64 {
    crate::algebra::snap::snap_tolerance(prec)
}

impl fmt::Display for NumPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumPoint::Infinity => write!(f, "inf"),
            NumPoint::Finite(z) => write!(f, "{}", format_complex(z)),
        }
    }
}

/// `re+imi` with 17 significant digits, signs explicit.
pub fn format_complex(z: &ComplexFloat) -> String {
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    if im == 0.0 {
        format!("{re:.17e}")
    } else if im < 0.0 {
        format!("{re:.17e}-{:.17e}i", -im)
    } else {
        format!("{re:.17e}+{im:.17e}i")
    }
}

/// A point carrying an exactness flag: exact when it is known in Q(i) ∪ {∞}.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Exact(SpherePoint),
    Numeric(NumPoint),
}

impl Point {
    pub fn is_exact(&self) -> bool {
        matches!(self, Point::Exact(_))
    }

    pub fn exact(&self) -> Option<&SpherePoint> {
        match self {
            Point::Exact(p) => Some(p),
            Point::Numeric(_) => None,
        }
    }

    pub fn approx(&self) -> NumPoint {
        match self {
            Point::Exact(p) => p.approx(),
            Point::Numeric(p) => p.clone(),
        }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.approx().dist(&other.approx())
    }

    /// Exact equality when both are exact, otherwise chordal closeness within `tol`.
    pub fn same(&self, other: &Point, tol: f64) -> bool {
        match (self, other) {
            (Point::Exact(a), Point::Exact(b)) => a == b,
            _ => self.dist(other) <= tol,
        }
    }

    pub fn is_infinity(&self) -> bool {
        match self {
            Point::Exact(p) => p.is_infinity(),
            Point::Numeric(p) => p.is_infinity(),
        }
    }
}

impl From<SpherePoint> for Point {
    fn from(p: SpherePoint) -> Self {
        Point::Exact(p)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Exact(p) => write!(f, "{p}"),
            Point::Numeric(p) => write!(f, "~{p}"),
        }
    }
}

/// Compares two point sets up to order.
pub fn same_set(a: &[Point], b: &[Point], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|p| b.iter().any(|q| p.same(q, tol)))
        && b.iter().all(|q| a.iter().any(|p| p.same(q, tol)))
}

/// Removes repeated points, keeping first occurrences.
pub fn dedup_points(points: Vec<Point>, tol: f64) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::new();
    for p in points {
        if !out.iter().any(|q| q.same(&p, tol)) {
            out.push(p);
        }
    }
    out
}
