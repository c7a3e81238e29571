use super::{same, MATCH_TOL};
use crate::error::{Error, Result};
use crate::mobius::{MobiusTransform, NumMobius};
use crate::ratmap::{critical_data, same_set, CriticalData, Mode, Point, RationalMap, SpherePoint, DEFAULT_DEGREE_CAP};

/// The unique Möbius `μ` with `g = μ∘f`, for bicritical `f`, `g` sharing their critical points.
pub fn mobius_factor(f: &RationalMap, g: &RationalMap) -> Result<MobiusTransform> {
    if f.degree() != g.degree() {
        return Err(Error::InvalidArgument("maps have different degrees".into()));
    }
    let cf = critical_data(f, Mode::Exact)?;
    let cg = critical_data(g, Mode::Exact)?;
    if !cf.bicritical || !cg.bicritical {
        return Err(Error::InvalidArgument("mobius factor needs bicritical maps".into()));
    }
    if !same_set(&cf.point_set(), &cg.point_set(), MATCH_TOL) {
        return Err(Error::InvalidArgument("maps have different critical points".into()));
    }
    let crit = cf.point_set();
    let a = (0..64)
        .map(crate::deck::base_point)
        .map(|z| Point::Exact(SpherePoint::Finite(z)))
        .find(|p| !crit.iter().any(|c| same(c, p)))
        .expect("finitely many critical points");
    let fa = [f.eval_point(&crit[0], 53), f.eval_point(&crit[1], 53), f.eval_point(&a, 53)];
    let ga = [g.eval_point(&crit[0], 53), g.eval_point(&crit[1], 53), g.eval_point(&a, 53)];
    let exact = |v: &[Point; 3]| -> Option<[SpherePoint; 3]> {
        Some([v[0].exact()?.clone(), v[1].exact()?.clone(), v[2].exact()?.clone()])
    };
    let mu = match (exact(&fa), exact(&ga)) {
        (Some(zs), Some(ws)) => {
            MobiusTransform::from_triples([&zs[0], &zs[1], &zs[2]], [&ws[0], &ws[1], &ws[2]])?
        }
        _ => {
            let zs = fa.each_ref().map(Point::approx);
            let ws = ga.each_ref().map(Point::approx);
            NumMobius::<f64>::from_triples([&zs[0], &zs[1], &zs[2]], [&ws[0], &ws[1], &ws[2]], 53)
                .and_then(|m| m.snap(53))
                .ok_or_else(|| Error::Internal("Möbius factor is not representable over Q(i)".into()))?
        }
    };
    if mu.to_map().compose(f) != *g {
        return Err(Error::Internal("Möbius factor failed exact certification".into()));
    }
    Ok(mu)
}

#[derive(Clone, Debug)]
pub struct SharedIterateReport {
    /// Least `k ≤ max_k` with `f^k = g^k`.
    pub minimal_k: Option<usize>,
    pub max_k: usize,
    pub critical_points_f: Vec<Point>,
    pub critical_points_g: Vec<Point>,
    pub critical_values_f: Vec<Point>,
    pub critical_values_g: Vec<Point>,
    /// `C_f = C_g` and `V_f = V_g`.
    pub cv_cp_agree: bool,
    pub second_iterate_equal: bool,
    /// `μ` with `g = μ∘f`, when the critical points agree.
    pub mobius_factor: Option<MobiusTransform>,
    /// `μ` when additionally `μ² = id` and `f∘μ = μ∘f`.
    pub involution_mu: Option<MobiusTransform>,
    pub symmetry_locus_member: bool,
    /// In even degree: whether `μ` exchanges the two critical points, and the two critical values.
    pub transposes_critical_points: Option<bool>,
    pub transposes_critical_values: Option<bool>,
    /// A shared iterate was found but the critical data disagree. This contradicts a theorem, so it marks a bug.
    pub theorem_alarm: bool,
}

fn transposes(mu: &MobiusTransform, pts: &[Point]) -> bool {
    pts.len() == 2 && same(&mu.apply_point(&pts[0]), &pts[1]) && same(&mu.apply_point(&pts[1]), &pts[0])
}

/// Scans `k = 1..=max_k` for `f^k = g^k` and checks the structure that a shared iterate forces.
pub fn shared_iterate_analysis(f: &RationalMap, g: &RationalMap, max_k: usize) -> Result<SharedIterateReport> {
    if f.degree() != g.degree() || f.degree() < 2 {
        return Err(Error::InvalidArgument("maps must have the same degree, at least 2".into()));
    }
    let cf: CriticalData = critical_data(f, Mode::Exact)?;
    let cg: CriticalData = critical_data(g, Mode::Exact)?;
    if !cf.bicritical || !cg.bicritical {
        return Err(Error::InvalidArgument("shared-iterate analysis needs bicritical maps".into()));
    }
    let degree = (f.degree() as u128).checked_pow(max_k as u32).unwrap_or(u128::MAX);
    if degree > DEFAULT_DEGREE_CAP as u128 {
        return Err(Error::DegreeOverflow { degree, cap: DEFAULT_DEGREE_CAP });
    }
    let mut minimal_k = None;
    let mut second_iterate_equal = false;
    let (mut fk, mut gk) = (f.clone(), g.clone());
    for k in 1..=max_k.max(2) {
        if k > 1 {
            fk = f.compose(&fk);
            gk = g.compose(&gk);
        }
        let equal = fk == gk;
        if k == 2 {
            second_iterate_equal = equal;
        }
        if equal && k <= max_k && minimal_k.is_none() {
            minimal_k = Some(k);
        }
        if minimal_k.is_some() && k >= 2 {
            break;
        }
    }
    let cp_agree = same_set(&cf.point_set(), &cg.point_set(), MATCH_TOL);
    let cv_agree = same_set(&cf.value_set(), &cg.value_set(), MATCH_TOL);
    let cv_cp_agree = cp_agree && cv_agree;
    let mobius_factor = if cp_agree { Some(mobius_factor(f, g)?) } else { None };
    let mut involution_mu = None;
    let (mut tc, mut tv) = (None, None);
    if let (Some(_), Some(mu)) = (minimal_k, &mobius_factor) {
        if f != g {
            let m = mu.to_map();
            let involutive = mu.compose(mu).is_identity();
            let commutes = f.compose(&m) == m.compose(f);
            if involutive && commutes {
                involution_mu = Some(mu.clone());
            }
            if f.degree() % 2 == 0 {
                tc = Some(transposes(mu, &cf.point_set()));
                tv = Some(transposes(mu, &cf.value_set()));
            }
        }
    }
    let symmetry_locus_member = involution_mu.is_some();
    Ok(SharedIterateReport {
        minimal_k,
        max_k,
        critical_points_f: cf.point_set(),
        critical_points_g: cg.point_set(),
        critical_values_f: cf.value_set(),
        critical_values_g: cg.value_set(),
        cv_cp_agree,
        second_iterate_equal,
        mobius_factor,
        involution_mu,
        symmetry_locus_member,
        transposes_critical_points: tc,
        transposes_critical_values: tv,
        theorem_alarm: minimal_k.is_some() && !cv_cp_agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(s: &str) -> Point {
        if s == "inf" {
            Point::Exact(SpherePoint::Infinity)
        } else {
            Point::Exact(SpherePoint::Finite(s.parse().unwrap()))
        }
    }

    #[test]
    fn no_shared_iterate_pair() {
        let f = RationalMap::from_ints(&[-2, 0, 2], &[-1, 0, 16]).unwrap();
        let g = RationalMap::from_ints(&[-16, 0, 1], &[-8, 0, 8]).unwrap();
        let r = shared_iterate_analysis(&f, &g, 4).unwrap();
        assert_eq!(r.minimal_k, None);
        assert!(r.cv_cp_agree && !r.second_iterate_equal && !r.theorem_alarm);
        assert!(same_set(&r.critical_values_f, &[ex("1/8"), ex("2")], 0.0));
        let mu = r.mobius_factor.unwrap();
        assert!(same_set(&[mu.apply_point(&ex("1/8")), mu.apply_point(&ex("2"))], &r.critical_values_g, 0.0));
    }

    #[test]
    fn odd_degree_fourth_iterate() {
        let f = RationalMap::from_ints(&[-1, 0, 0, 1], &[1, 0, 0, 1]).unwrap();
        let g = RationalMap::from_ints(&[1, 0, 0, -1], &[1, 0, 0, 1]).unwrap();
        let r = shared_iterate_analysis(&f, &g, 4).unwrap();
        assert_eq!(r.minimal_k, Some(4));
        assert!(!r.second_iterate_equal && r.cv_cp_agree);
        assert!(r.involution_mu.is_none());
    }

    #[test]
    fn symmetry_locus_pair() {
        let fc = RationalMap::from_ints(&[3, 0, 3], &[0, 5]).unwrap();
        let fmc = RationalMap::from_ints(&[-3, 0, -3], &[0, 5]).unwrap();
        let r = shared_iterate_analysis(&fc, &fmc, 3).unwrap();
        assert_eq!(r.minimal_k, Some(2));
        assert!(r.second_iterate_equal && r.symmetry_locus_member);
        assert_eq!(r.involution_mu.unwrap(), MobiusTransform::from_ints(-1, 0, 0, 1).unwrap());
        assert_eq!(r.transposes_critical_points, Some(true));
        assert_eq!(r.transposes_critical_values, Some(true));
        assert_eq!(mobius_factor(&fc, &fc).unwrap(), MobiusTransform::identity());
    }

    #[test]
    fn degree_cap() {
        let f = RationalMap::from_ints(&[0, 0, 1], &[1]).unwrap();
        assert!(matches!(shared_iterate_analysis(&f, &f, 9), Err(Error::DegreeOverflow { .. })));
    }
}
