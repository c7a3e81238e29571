use super::critical::{critical_data, Mode, POINT_TOL};
use super::point::{dedup_points, Point};
use super::RationalMap;
use crate::error::{Error, Result};

pub const DEFAULT_ORBIT_BOUND: usize = 64;

/// Exact iteration stops once a point's coefficients exceed this many bits;
/// such orbits are reported as not finite within the bound.
const HEIGHT_GUARD_BITS: u64 = 4096;

/// Forward orbit `v, f(v), f²(v), …` of one critical value.
#[derive(Clone, Debug)]
pub struct CriticalOrbit {
    pub points: Vec<Point>,
    /// Index of the first point of the cycle, when the orbit closed up.
    pub preperiod: Option<usize>,
    pub period: Option<usize>,
}

impl CriticalOrbit {
    pub fn is_finite(&self) -> bool {
        self.period.is_some()
    }
}

#[derive(Clone, Debug)]
pub struct PostcriticalOrbit {
    /// One orbit per distinct critical value.
    pub orbits: Vec<CriticalOrbit>,
    /// Every orbit closed up within the bound.
    pub finite: bool,
    /// Distinct points visited by all orbits.
    pub postcritical_set: Vec<Point>,
    /// A fixed point `α` lying in the postcritical set.
    pub fixed_point: Option<Point>,
    /// Least `m` with `f^m(v) = α` over the critical values `v`.
    pub m: Option<usize>,
}

pub fn postcritical_orbit(f: &RationalMap, max_len: usize) -> Result<PostcriticalOrbit> {
    let cd = critical_data(f, Mode::Exact)?;
    if !cd.bicritical {
        return Err(Error::InvalidArgument("postcritical orbit requires a bicritical map".into()));
    }
    let nf = f.to_numeric::<f64>(53);
    let orbits: Vec<CriticalOrbit> = cd
        .value_set()
        .into_iter()
        .map(|v| follow(f, &nf, v, max_len))
        .collect();
    let finite = orbits.iter().all(CriticalOrbit::is_finite);
    let postcritical_set = dedup_points(orbits.iter().flat_map(|o| o.points.clone()).collect(), POINT_TOL);
    let fixed_point = postcritical_set
        .iter()
        .find(|p| f.eval_point(p, 53).same(p, POINT_TOL))
        .cloned();
    let m = fixed_point.as_ref().and_then(|a| {
        orbits
            .iter()
            .filter_map(|o| o.points.iter().position(|p| p.same(a, POINT_TOL)))
            .min()
    });
    Ok(PostcriticalOrbit { orbits, finite, postcritical_set, fixed_point, m })
}

fn follow(f: &RationalMap, nf: &super::NumericMap, v: Point, max_len: usize) -> CriticalOrbit {
    let mut points = vec![v];
    while points.len() < max_len {
        let last = points.last().unwrap();
        let next = match last {
            Point::Exact(p) => {
                let q = f.eval(p);
                if q.height_bits() > HEIGHT_GUARD_BITS {
                    break;
                }
                Point::Exact(q)
            }
            Point::Numeric(p) => Point::Numeric(nf.eval(p)),
        };
        if let Some(j) = points.iter().position(|p| p.same(&next, POINT_TOL)) {
            let period = points.len() - j;
            return CriticalOrbit { points, preperiod: Some(j), period: Some(period) };
        }
        points.push(next);
    }
    CriticalOrbit { points, preperiod: None, period: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmap::SpherePoint;

    fn ex(s: &str) -> Point {
        Point::Exact(if s == "inf" { SpherePoint::Infinity } else { SpherePoint::Finite(s.parse().unwrap()) })
    }

    #[test]
    fn power_map_orbit() {
        let sq = RationalMap::from_ints(&[0, 0, 1], &[1]).unwrap();
        let po = postcritical_orbit(&sq, DEFAULT_ORBIT_BOUND).unwrap();
        assert!(po.finite);
        assert!(po.orbits.iter().all(|o| o.period == Some(1) && o.preperiod == Some(0)));
        assert_eq!(po.m, Some(0));
    }

    #[test]
    fn f1_is_postcritically_finite() {
        let f1 = RationalMap::from_ints(&[-1, 0, 1], &[1, 0, 1]).unwrap();
        let po = postcritical_orbit(&f1, DEFAULT_ORBIT_BOUND).unwrap();
        assert!(po.finite);
        // values −1, 1; −1 → 0 → −1 and 1 → 0 → −1
        assert_eq!(po.postcritical_set.len(), 3);
        assert!(po.fixed_point.is_none());
        let o = po.orbits.iter().find(|o| o.points[0] == ex("1")).unwrap();
        assert_eq!((o.preperiod, o.period), (Some(1), Some(2)));
    }

    #[test]
    fn f2_orbit_is_not_finite_within_bound() {
        let f2 = RationalMap::from_ints(&[-2, 0, 1], &[2, 0, 1]).unwrap();
        let po = postcritical_orbit(&f2, 20).unwrap();
        assert!(!po.finite);
        let o = po.orbits.iter().find(|o| o.points[0] == ex("-1")).unwrap();
        assert_eq!(&o.points[..3], &[ex("-1"), ex("-1/3"), ex("-17/19")]);
    }

    #[test]
    fn fixed_point_reached_at_step_two() {
        // a = i: −1 → −i → i, and i is fixed
        let i = crate::algebra::GaussianRational::i();
        let f = RationalMap::new(
            crate::algebra::ComplexPoly::new(vec![-&i, 0.into(), 1.into()]),
            crate::algebra::ComplexPoly::new(vec![i.clone(), 0.into(), 1.into()]),
        )
        .unwrap();
        let po = postcritical_orbit(&f, DEFAULT_ORBIT_BOUND).unwrap();
        assert!(po.finite);
        assert_eq!(po.fixed_point, Some(ex("i")));
        assert_eq!(po.m, Some(2));
    }
}
