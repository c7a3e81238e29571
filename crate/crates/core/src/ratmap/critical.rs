use num_traits::Zero;

use super::point::{dedup_points, NumPoint, Point, SpherePoint};
use super::RationalMap;
use crate::algebra::roots::{exact_roots, poly_roots_numeric};
use crate::algebra::{BigFloat, ComplexPoly};
use crate::error::{Error, Result};

/// Whether to insist on exact points (falling back when impossible) or go numeric.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Numeric,
}

/// Tolerance for comparing numeric critical points and values.
pub(crate) const POINT_TOL: f64 = 1e-9;
/// Working precision for numeric critical points and values.
const VALUE_PREC: usize = 128;

#[derive(Clone, Debug)]
pub struct CriticalData {
    /// Distinct critical points with multiplicity (local degree minus one).
    pub points: Vec<(Point, usize)>,
    /// Image of each critical point, aligned with `points`.
    pub values: Vec<Point>,
    /// All points were found in Q(i) ∪ {∞}.
    pub exact: bool,
    pub bicritical: bool,
    /// `f(v₁) = f(v₂)`; only meaningful for bicritical quadratics.
    pub critically_coalescing: Option<bool>,
}

impl CriticalData {
    pub fn point_set(&self) -> Vec<Point> {
        self.points.iter().map(|(p, _)| p.clone()).collect()
    }

    pub fn value_set(&self) -> Vec<Point> {
        dedup_points(self.values.clone(), POINT_TOL)
    }

    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|(_, m)| m).sum()
    }

    /// Bicritical with critical values equal to critical points as a set, i.e.
    /// conjugate to `z^d` or `z^-d`.
    pub fn is_power_map(&self) -> bool {
        self.bicritical && super::point::same_set(&self.point_set(), &self.value_set(), POINT_TOL)
    }
}

/// Critical points are the roots of the Wronskian `P′Q − PQ′`, plus ∞ with
/// multiplicity `2d − 2 − deg W`.
pub fn critical_data(f: &RationalMap, mode: Mode) -> Result<CriticalData> {
    let d = f.degree();
    if d < 2 {
        return Err(Error::InvalidArgument(format!("critical data needs degree at least 2, got {d}")));
    }
    let w = f.wronskian();
    let deg_w = w.degree().ok_or_else(|| Error::Internal("vanishing Wronskian".into()))?;
    let mut points: Vec<(Point, usize)> = Vec::new();
    let mut exact = true;
    match mode {
        Mode::Exact => {
            let (roots, rest) = exact_roots(&w)?;
            points.extend(roots.into_iter().map(|(z, m)| (Point::Exact(SpherePoint::Finite(z)), m)));
            if rest.degree().unwrap_or(0) > 0 {
                exact = false;
                points.extend(numeric_roots(&rest)?);
            }
        }
        Mode::Numeric => {
            exact = false;
            points.extend(numeric_roots(&w)?);
        }
    }
    let at_inf = 2 * d - 2 - deg_w;
    if at_inf > 0 {
        let p = match mode {
            Mode::Exact => Point::Exact(SpherePoint::Infinity),
            Mode::Numeric => Point::Numeric(NumPoint::Infinity),
        };
        points.push((p, at_inf));
    }
    // expanded coefficients of an iterate can cancel badly near its critical
    // points, so numeric values are evaluated with extra precision
    let hi = (!exact).then(|| f.to_numeric::<BigFloat>(VALUE_PREC));
    let values: Vec<Point> = points
        .iter()
        .map(|(p, _)| {
            let v = match (p, &hi) {
                (Point::Numeric(NumPoint::Finite(z)), Some(hi)) => {
                    Point::Numeric(hi.eval(&NumPoint::Finite(z.lift::<BigFloat>(VALUE_PREC))).to_f64())
                }
                _ => f.eval_point(p, 53),
            };
            refine_value(f, v)
        })
        .collect();
    let bicritical = points.len() == 2;
    let critically_coalescing = (bicritical && d == 2).then(|| {
        let a = f.eval_point(&values[0], 53);
        let b = f.eval_point(&values[1], 53);
        a.same(&b, POINT_TOL)
    });
    Ok(CriticalData { points, values, exact, bicritical, critically_coalescing })
}

/// A numeric critical value is replaced by a nearby Gaussian rational when
/// that rational is verifiably a critical value (its fiber has a repeated point).
fn refine_value(f: &RationalMap, v: Point) -> Point {
    let Point::Numeric(np) = &v else { return v };
    match np.snap(53) {
        Some(q) => {
            let (r, at_inf) = super::fiber::fiber_poly(f, &q);
            let repeated = at_inf >= 2 || (r.degree().unwrap_or(0) > 0 && !r.is_square_free());
            if repeated {
                Point::Exact(q)
            } else {
                v
            }
        }
        None => v,
    }
}

/// Roots polished at extra precision before rounding: Wronskians of iterates
/// have clustered roots that double precision resolves only to about 1e-6.
fn numeric_roots(p: &ComplexPoly) -> Result<Vec<(Point, usize)>> {
    Ok(poly_roots_numeric::<BigFloat>(p, VALUE_PREC)?
        .into_iter()
        .map(|r| (Point::Numeric(NumPoint::Finite(r.z.to_c64()).normalized()), r.mult))
        .collect())
}

/// Local mapping degree of `f` at `z`.
pub fn local_degree(f: &RationalMap, z: &Point) -> Result<usize> {
    let d = f.degree();
    if d == 0 {
        return Err(Error::InvalidArgument("constant map".into()));
    }
    let w = f.wronskian();
    let deg_w = w.degree().unwrap_or(0);
    if z.is_infinity() {
        return Ok(1 + 2 * d - 2 - deg_w);
    }
    match z {
        Point::Exact(SpherePoint::Finite(z0)) => {
            let lin = ComplexPoly::new(vec![-z0, crate::algebra::GaussianRational::from(1)]);
            let mut m = 0;
            let mut q = w;
            while !q.is_zero() && q.eval(z0).is_zero() {
                q = q.exact_div(&lin).expect("root divides");
                m += 1;
            }
            Ok(1 + m)
        }
        _ => {
            let target = z.approx();
            let at_inf = 2 * d - 2 - deg_w;
            if at_inf > 0 && target.dist(&NumPoint::Infinity) < 1e-7 {
                return Ok(1 + at_inf);
            }
            let m = numeric_roots(&w)?
                .into_iter()
                .find(|(p, _)| p.approx().dist(&target) < 1e-7)
                .map_or(0, |(_, m)| m);
            Ok(1 + m)
        }
    }
}
