//! Recovering the critical points and values of a bicritical `f` from an
//! iterate `F = f^k`, and comparing maps that may share an iterate.

mod shared;

use std::fmt;

use crate::deck::{deck_group_of, DeckResult};
use crate::error::{Error, Result};
use crate::mobius::{GroupElement, IsoType, MobiusTransform, NumMobius};
use crate::ratmap::{
    critical_data, dedup_points, fiber_poly, local_degree, CriticalData, Mode, NumPoint, Point, RationalMap,
    SpherePoint, DEFAULT_ORBIT_BOUND,
};

pub use shared::{mobius_factor, shared_iterate_analysis, SharedIterateReport};

/// Tolerance for matching points when at least one of them is numeric.
pub const MATCH_TOL: f64 = 1e-7;
/// Tolerance for grouping numeric critical points by their image.
const VALUE_TOL: f64 = 1e-6;
/// Snapping precision for values whose exactness is then verified.
const SNAP_PREC: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetectCase {
    HigherDegree,
    QuadraticCyclic,
    QuadraticPower,
    V4NoFixedPoint,
    V4FixedPointM2CrossRatio,
    V4FixedPointCounts,
    D8PowerLike,
}

impl DetectCase {
    pub fn label(&self) -> &'static str {
        match self {
            DetectCase::HigherDegree => "higher-degree",
            DetectCase::QuadraticCyclic => "quadratic-cyclic",
            DetectCase::QuadraticPower => "quadratic-power",
            DetectCase::V4NoFixedPoint => "V4-no-fixed-point",
            DetectCase::V4FixedPointM2CrossRatio => "V4-fixed-point-m2-crossratio",
            DetectCase::V4FixedPointCounts => "V4-fixed-point-m-gt-2-counts",
            DetectCase::D8PowerLike => "D8-power-like",
        }
    }
}

impl fmt::Display for DetectCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug)]
pub struct CrossRatioCheck {
    pub value: Point,
    /// `x = −1` or `x² − 6x + 1 = 0`, exactly or within `1e-8`.
    pub satisfied: bool,
    /// The membership was decided in exact arithmetic.
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct Evidence {
    pub deck_type: IsoType,
    pub deck_order: usize,
    /// Deck element whose fixed points are the critical points.
    pub element: Option<usize>,
    /// Points whose whole `F`-fiber is critical.
    pub value_candidates: Vec<Point>,
    pub special_pairs: Vec<Vec<Point>>,
    /// `F`-images of the special pairs (or `F²`-images when the first images were all distinct).
    pub pair_images: Vec<Point>,
    pub postcritical: Vec<Point>,
    pub alpha: Option<Point>,
    /// The preimage of `α` other than `α` itself, `β_{m−1}`.
    pub beta: Option<Point>,
    pub m: Option<usize>,
    pub cross_ratio: Option<CrossRatioCheck>,
    pub fiber_counts: Vec<(Point, usize)>,
}

impl Evidence {
    fn new(dr: &DeckResult) -> Self {
        Evidence {
            deck_type: dr.group.iso_type,
            deck_order: dr.group.order(),
            element: None,
            value_candidates: Vec::new(),
            special_pairs: Vec::new(),
            pair_images: Vec::new(),
            postcritical: Vec::new(),
            alpha: None,
            beta: None,
            m: None,
            cross_ratio: None,
            fiber_counts: Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DetectionReport {
    pub critical_points: Vec<Point>,
    pub critical_values: Vec<Point>,
    pub case: DetectCase,
    pub evidence: Evidence,
}

fn violation(msg: impl Into<String>) -> Error {
    Error::HypothesisViolation(msg.into())
}

fn same(a: &Point, b: &Point) -> bool {
    a.same(b, MATCH_TOL)
}

/// Snaps a numeric point when the snapped value is exactly a critical point of `F`.
fn refine_critical(big_f: &RationalMap, p: Point) -> Point {
    let Point::Numeric(np) = &p else { return p };
    match np.snap(53) {
        Some(q) if local_degree(big_f, &Point::Exact(q.clone())).is_ok_and(|e| e >= 2) => Point::Exact(q),
        _ => p,
    }
}

fn fixed_critical_points(big_f: &RationalMap, e: &GroupElement) -> Result<Vec<Point>> {
    Ok(e.fixed_points()?.into_iter().map(|p| refine_critical(big_f, p)).collect())
}

/// Whether every point of `F⁻¹(x)` is a critical point of `F`.
pub fn fiber_all_critical(big_f: &RationalMap, x: &Point) -> Result<bool> {
    match x {
        Point::Exact(x) => Ok(exact_fiber_all_critical(big_f, x)),
        Point::Numeric(_) => Ok(local_degree_sum(&critical_data(big_f, Mode::Numeric)?, x) == big_f.degree()),
    }
}

fn exact_fiber_all_critical(big_f: &RationalMap, x: &SpherePoint) -> bool {
    let (r, at_inf) = fiber_poly(big_f, x);
    let finite_ok = r.degree().unwrap_or(0) == 0 || r.square_free().iter().all(|(_, m)| *m >= 2);
    finite_ok && at_inf != 1
}

/// Sum of local degrees of the critical points lying over `x`. The fiber is
/// entirely critical exactly when this reaches `deg F`; unlike root
/// clustering this stays reliable near points of high local degree.
fn local_degree_sum(cd: &CriticalData, x: &Point) -> usize {
    cd.points.iter().zip(&cd.values).filter(|(_, v)| v.same(x, VALUE_TOL)).map(|((_, m), _)| m + 1).sum()
}

/// Number of distinct critical points of `F` in the fiber over `x`.
pub fn count_critical_in_fiber(big_f: &RationalMap, x: &SpherePoint) -> usize {
    let (r, at_inf) = fiber_poly(big_f, x);
    let finite: usize = if r.degree().unwrap_or(0) == 0 {
        0
    } else {
        r.square_free().iter().filter(|(_, m)| *m >= 2).map(|(p, _)| p.degree().unwrap_or(0)).sum()
    };
    finite + usize::from(at_inf >= 2)
}

/// As [`count_critical_in_fiber`], for points that may be numeric.
pub fn count_critical_in_fiber_point(big_f: &RationalMap, x: &Point) -> Result<usize> {
    match x {
        Point::Exact(x) => Ok(count_critical_in_fiber(big_f, x)),
        Point::Numeric(_) => {
            let cd = critical_data(big_f, Mode::Numeric)?;
            Ok(cd.values.iter().filter(|v| v.same(x, VALUE_TOL)).count())
        }
    }
}

/// `{x : F⁻¹(x) ⊆ C_F}`, searched among the critical values of `F`.
pub fn all_critical_fibers(big_f: &RationalMap) -> Result<Vec<Point>> {
    let cd = critical_data(big_f, Mode::Exact)?;
    let n = big_f.degree();
    let mut out: Vec<Point> = Vec::new();
    for v in &cd.values {
        if out.iter().any(|o| o.same(v, VALUE_TOL)) {
            continue;
        }
        // an exact member of the group is the best representative
        let v = cd.values.iter().find(|w| w.is_exact() && w.same(v, VALUE_TOL)).unwrap_or(v);
        match v {
            Point::Exact(x) => {
                if exact_fiber_all_critical(big_f, x) {
                    out.push(v.clone());
                }
            }
            Point::Numeric(np) => {
                if local_degree_sum(&cd, v) == n {
                    let snapped = np.snap(SNAP_PREC).filter(|q| exact_fiber_all_critical(big_f, q));
                    out.push(snapped.map_or_else(|| v.clone(), Point::Exact));
                }
            }
        }
    }
    Ok(out)
}

/// `[v₁ : v₂ : a : b]`, the image of `b` under the Möbius map sending `(v₁, v₂, a)` to `(0, ∞, 1)`.
pub fn cross_ratio(v1: &Point, v2: &Point, a: &Point, b: &Point) -> Result<Point> {
    if let (Some(v1), Some(v2), Some(a), Some(b)) = (v1.exact(), v2.exact(), a.exact(), b.exact()) {
        let m = MobiusTransform::from_three_points(v1, v2, a)?;
        return Ok(Point::Exact(m.apply(b)));
    }
    let (v1, v2, a) = (v1.approx(), v2.approx(), a.approx());
    if v1.dist(&v2) < MATCH_TOL || v1.dist(&a) < MATCH_TOL || v2.dist(&a) < MATCH_TOL {
        return Err(Error::InvalidArgument("cross-ratio anchors must be distinct".into()));
    }
    let m = NumMobius::<f64>::from_three_points([&v1, &v2, &a], 53)
        .ok_or_else(|| Error::InvalidArgument("cross-ratio anchors must be distinct".into()))?;
    Ok(Point::Numeric(m.apply(&b.approx())))
}

/// Tests `x ∈ {−1, 3 ± 2√2}`.
pub fn check_cross_ratio(x: &Point) -> CrossRatioCheck {
    if let Some(SpherePoint::Finite(z)) = x.exact() {
        // x² − 6x + 1 has no roots in Q(i)
        let satisfied = *z == crate::algebra::GaussianRational::from(-1);
        return CrossRatioCheck { value: x.clone(), satisfied, exact: true };
    }
    let satisfied = match x.approx() {
        NumPoint::Infinity => false,
        NumPoint::Finite(z) => {
            let one = crate::algebra::ComplexFloat::new(1.0, 0.0);
            let six = crate::algebra::ComplexFloat::new(6.0, 0.0);
            (z + one).abs() < 1e-8 || (z * z - six * z + one).abs() < 1e-8
        }
    };
    CrossRatioCheck { value: x.clone(), satisfied, exact: false }
}

fn deck_of(big_f: &RationalMap) -> Result<DeckResult> {
    deck_group_of(big_f, 53)
}

/// First element (exact ones first) of order at least `min_order`, or of order exactly `exact_order`.
fn pick_element(dr: &DeckResult, pred: impl Fn(usize) -> bool) -> Option<usize> {
    let g = &dr.group;
    let idx: Vec<usize> = (1..g.order()).filter(|&i| pred(g.orders[i])).collect();
    idx.iter().copied().find(|&i| g.elements[i].is_certified()).or_else(|| idx.first().copied())
}

/// Critical points and values of a bicritical `f` of degree `d ≥ 3` from `F = f^k`.
pub fn detect_higher_degree(big_f: &RationalMap, d: usize, k: usize) -> Result<DetectionReport> {
    if d < 3 {
        return Err(Error::InvalidArgument("higher-degree detection needs d ≥ 3".into()));
    }
    check_degree(big_f, d, k)?;
    let dr = deck_of(big_f)?;
    let mut ev = Evidence::new(&dr);
    let i = pick_element(&dr, |o| o >= 3).ok_or_else(|| violation("no deck element of order at least 3"))?;
    ev.element = Some(i);
    let critical_points = fixed_critical_points(big_f, &dr.group.elements[i])?;
    ev.value_candidates = all_critical_fibers(big_f)?;
    let critical_values = ev.value_candidates.clone();
    if critical_values.len() != 2 {
        return Err(violation(format!("{} points have fully critical fibers, expected 2", critical_values.len())));
    }
    Ok(DetectionReport { critical_points, critical_values, case: DetectCase::HigherDegree, evidence: ev })
}

fn check_degree(big_f: &RationalMap, d: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("iterate index must be at least 1".into()));
    }
    let expected = (d as u128).checked_pow(k as u32);
    if expected != Some(big_f.degree() as u128) {
        return Err(violation(format!("degree {} is not {d}^{k}", big_f.degree())));
    }
    Ok(())
}

/// The two points of `set` exchanged by `mu`.
fn swapped_pair(mu: &GroupElement, set: &[Point]) -> Option<Vec<Point>> {
    for (i, x) in set.iter().enumerate() {
        for y in &set[i + 1..] {
            if same(&mu.apply(x), y) {
                return Some(vec![x.clone(), y.clone()]);
            }
        }
    }
    None
}

enum Pattern {
    AllEqual,
    AllDistinct,
    OddOneOut(usize),
}

fn pattern(pts: &[Point]) -> Pattern {
    let e01 = same(&pts[0], &pts[1]);
    let e02 = same(&pts[0], &pts[2]);
    let e12 = same(&pts[1], &pts[2]);
    match (e01, e02, e12) {
        (true, true, _) | (true, _, true) | (_, true, true) => Pattern::AllEqual,
        (true, false, false) => Pattern::OddOneOut(2),
        (false, true, false) => Pattern::OddOneOut(1),
        (false, false, true) => Pattern::OddOneOut(0),
        (false, false, false) => Pattern::AllDistinct,
    }
}

/// Critical points and values of a quadratic `f` from `F = f^k`.
pub fn detect_quadratic(big_f: &RationalMap, k: usize) -> Result<DetectionReport> {
    check_degree(big_f, 2, k)?;
    let dr = deck_of(big_f)?;
    let mut ev = Evidence::new(&dr);
    ev.value_candidates = all_critical_fibers(big_f)?;
    match dr.group.iso_type {
        IsoType::Cyclic(n) if n >= 2 => {
            let case = if n > 2 { DetectCase::QuadraticPower } else { DetectCase::QuadraticCyclic };
            let i = pick_element(&dr, |o| o == n).expect("cyclic group has a generator");
            ev.element = Some(i);
            let critical_points = fixed_critical_points(big_f, &dr.group.elements[i])?;
            let critical_values = ev.value_candidates.clone();
            if critical_values.len() != 2 {
                return Err(violation(format!("{} points have fully critical fibers, expected 2", critical_values.len())));
            }
            Ok(DetectionReport { critical_points, critical_values, case, evidence: ev })
        }
        IsoType::Dihedral(8) => {
            let i = pick_element(&dr, |o| o == 4).expect("D8 has elements of order 4");
            ev.element = Some(i);
            let critical_points = fixed_critical_points(big_f, &dr.group.elements[i])?;
            // the square of the rotation generates Deck(f)
            let mu = &dr.group.elements[dr.group.table[i][i]];
            let critical_values = swapped_pair(mu, &ev.value_candidates)
                .ok_or_else(|| violation("no pair of fully critical fibers is exchanged by Deck(f)"))?;
            Ok(DetectionReport { critical_points, critical_values, case: DetectCase::D8PowerLike, evidence: ev })
        }
        IsoType::V4 => detect_klein(big_f, k, &dr, ev),
        other => Err(violation(format!("deck group {other} is not that of a quadratic iterate"))),
    }
}

fn detect_klein(big_f: &RationalMap, k: usize, dr: &DeckResult, mut ev: Evidence) -> Result<DetectionReport> {
    let pairs = dr.special_pairs.clone().ok_or_else(|| Error::Internal("V4 result without special pairs".into()))?;
    ev.special_pairs = pairs.iter().map(|p| p.points.clone()).collect();
    if ev.value_candidates.len() != 3 {
        return Err(violation(format!("{} points have fully critical fibers, expected 3", ev.value_candidates.len())));
    }
    let image = |p: &Point| big_f.eval_point(p, 53);
    let mut images: Vec<Point> = pairs.iter().map(|p| image(&p.points[0])).collect();
    let mut pat = pattern(&images);
    if let Pattern::AllDistinct = pat {
        // k = 2: the pair images are v₁, v₂ and f(v₁); one more step separates them
        images = images.iter().map(image).collect();
        pat = pattern(&images);
    }
    ev.pair_images = images;
    let group = &dr.group;
    let (mu_index, case) = match pat {
        Pattern::OddOneOut(i) => (pairs[i].element, DetectCase::V4NoFixedPoint),
        Pattern::AllDistinct => return Err(violation("special pairs have three distinct images")),
        Pattern::AllEqual => {
            let (beta, case) = locate_alpha_beta(big_f, k, &mut ev)?;
            let alpha = ev.alpha.clone().expect("set with beta");
            let i = (1..group.order())
                .find(|&i| same(&group.elements[i].apply(&alpha), &beta))
                .ok_or_else(|| violation("no deck element sends α to β"))?;
            ev.beta = Some(beta);
            (i, case)
        }
    };
    ev.element = Some(mu_index);
    let mu = &group.elements[mu_index];
    let critical_points = fixed_critical_points(big_f, mu)?;
    let critical_values = match case {
        DetectCase::V4FixedPointM2CrossRatio => {
            let beta = ev.beta.as_ref().unwrap();
            ev.value_candidates.iter().filter(|x| !same(x, beta)).cloned().collect()
        }
        _ => swapped_pair(mu, &ev.value_candidates)
            .ok_or_else(|| violation("no pair of fully critical fibers is exchanged by Deck(f)"))?,
    };
    Ok(DetectionReport { critical_points, critical_values, case, evidence: ev })
}

/// Forward closure of the critical values of `F` under `F`.
fn postcritical_closure(big_f: &RationalMap) -> Result<Vec<Point>> {
    let cd = critical_data(big_f, Mode::Exact)?;
    let mut set = cd.value_set();
    let mut frontier = set.clone();
    for _ in 0..DEFAULT_ORBIT_BOUND {
        let next: Vec<Point> = frontier
            .iter()
            .map(|p| big_f.eval_point(p, 53))
            .filter(|q| !set.iter().any(|s| same(s, q)))
            .collect();
        let next = dedup_points(next, MATCH_TOL);
        if next.is_empty() {
            return Ok(set);
        }
        set.extend(next.iter().cloned());
        frontier = next;
    }
    Err(violation("postcritical set of F is not finite within the orbit bound"))
}

fn locate_alpha_beta(big_f: &RationalMap, k: usize, ev: &mut Evidence) -> Result<(Point, DetectCase)> {
    let post = postcritical_closure(big_f)?;
    let mut alphas = Vec::new();
    for x in &post {
        if same(&big_f.eval_point(x, 53), x) && !fiber_all_critical(big_f, x)? {
            alphas.push(x.clone());
        }
    }
    if alphas.len() != 1 {
        return Err(violation(format!("found {} candidates for the postcritical fixed point", alphas.len())));
    }
    let alpha = alphas.remove(0);
    let m = post.len().checked_sub(2).ok_or_else(|| violation("postcritical set too small"))?;
    ev.postcritical = post.clone();
    ev.alpha = Some(alpha.clone());
    ev.m = Some(m);
    if m <= 2 {
        let s = ev.value_candidates.clone();
        let mut valid = Vec::new();
        for (i, b) in s.iter().enumerate() {
            let others: Vec<&Point> = s.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p).collect();
            let check = check_cross_ratio(&cross_ratio(others[0], others[1], &alpha, b)?);
            if check.satisfied {
                valid.push((b.clone(), check));
            }
        }
        if valid.len() != 1 {
            return Err(violation(format!("{} choices of β pass the cross-ratio test", valid.len())));
        }
        let (beta, check) = valid.remove(0);
        ev.cross_ratio = Some(check);
        return Ok((beta, DetectCase::V4FixedPointM2CrossRatio));
    }
    if k <= m {
        return Err(violation(format!("fiber counts need k > m, got k = {k}, m = {m}")));
    }
    let target = 1usize << (k - (m - 1));
    let mut hits = Vec::new();
    for x in &post {
        let c = count_critical_in_fiber_point(big_f, x)?;
        ev.fiber_counts.push((x.clone(), c));
        if c == target {
            hits.push(x.clone());
        }
    }
    if hits.len() != 1 {
        return Err(violation(format!("{} points carry {target} critical points, expected one", hits.len())));
    }
    Ok((hits.remove(0), DetectCase::V4FixedPointCounts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmap::same_set;

    fn ex(s: &str) -> Point {
        if s == "inf" {
            Point::Exact(SpherePoint::Infinity)
        } else {
            Point::Exact(SpherePoint::Finite(s.parse().unwrap()))
        }
    }

    fn set(v: &[&str]) -> Vec<Point> {
        v.iter().map(|s| ex(s)).collect()
    }

    fn f_a(a: i64) -> RationalMap {
        RationalMap::from_ints(&[-a, 0, 1], &[a, 0, 1]).unwrap()
    }

    #[test]
    fn odd_degree_example() {
        let f = RationalMap::from_ints(&[-1, 0, 0, 1], &[1, 0, 0, 1]).unwrap();
        let r = detect_higher_degree(&f.iterate(2).unwrap(), 3, 2).unwrap();
        assert!(same_set(&r.critical_points, &set(&["0", "inf"]), 0.0));
        assert!(same_set(&r.critical_values, &set(&["-1", "1"]), 0.0));
        let z9 = RationalMap::from_ints(&[0, 0, 0, 0, 0, 0, 0, 0, 0, 1], &[1]).unwrap();
        let r = detect_higher_degree(&z9, 3, 2).unwrap();
        assert!(same_set(&r.critical_points, &set(&["0", "inf"]), 0.0));
        assert!(same_set(&r.critical_values, &set(&["0", "inf"]), 0.0));
    }

    #[test]
    fn quadratic_cases() {
        let z16 = RationalMap::from_ints(&[0, 0, 1], &[1]).unwrap().iterate(4).unwrap();
        let r = detect_quadratic(&z16, 4).unwrap();
        assert_eq!(r.case, DetectCase::QuadraticPower);
        assert!(same_set(&r.critical_points, &set(&["0", "inf"]), 0.0));

        let r = detect_quadratic(&f_a(2).iterate(2).unwrap(), 2).unwrap();
        assert_eq!(r.case, DetectCase::V4NoFixedPoint);
        assert!(same_set(&r.critical_points, &set(&["0", "inf"]), 0.0));
        assert!(same_set(&r.critical_values, &set(&["-1", "1"]), 0.0));

        let r = detect_quadratic(&f_a(1).iterate(3).unwrap(), 3).unwrap();
        assert_eq!(r.case, DetectCase::D8PowerLike);
        assert!(same_set(&r.critical_points, &set(&["0", "inf"]), 0.0));
        assert!(same_set(&r.critical_values, &set(&["-1", "1"]), 0.0));
    }

    #[test]
    fn fixed_point_case_with_gaussian_parameter() {
        // a = i: −1 ↦ −i ↦ i ↦ i, so α = i and m = 2
        let i = crate::algebra::GaussianRational::i();
        let f = RationalMap::new(
            crate::algebra::ComplexPoly::new(vec![-&i, 0.into(), 1.into()]),
            crate::algebra::ComplexPoly::new(vec![i.clone(), 0.into(), 1.into()]),
        )
        .unwrap();
        for k in 2..=4 {
            let r = detect_quadratic(&f.iterate(k).unwrap(), k).unwrap();
            assert!(same_set(&r.critical_points, &set(&["0", "inf"]), 0.0), "k = {k}");
            assert!(same_set(&r.critical_values, &set(&["-1", "1"]), 0.0), "k = {k}");
            if r.case == DetectCase::V4FixedPointM2CrossRatio {
                let cr = r.evidence.cross_ratio.unwrap();
                assert!(cr.satisfied && cr.exact);
                assert_eq!(cr.value, ex("-1"));
            }
        }
    }

    #[test]
    fn counts_and_cross_ratios() {
        let z4 = RationalMap::from_ints(&[0, 0, 0, 0, 1], &[1]).unwrap();
        assert_eq!(count_critical_in_fiber(&z4, &SpherePoint::zero()), 1);
        assert_eq!(count_critical_in_fiber(&z4, &SpherePoint::from_int(1)), 0);
        let x = cross_ratio(&ex("0"), &ex("inf"), &ex("1"), &ex("-1")).unwrap();
        assert_eq!(x, ex("-1"));
        let r = 3.0 + 2.0 * 2f64.sqrt();
        let num = Point::Numeric(NumPoint::Finite(crate::algebra::ComplexFloat::new(r, 0.0)));
        let x = cross_ratio(&ex("0"), &ex("inf"), &ex("1"), &num).unwrap();
        assert!(check_cross_ratio(&x).satisfied);
        assert!(!check_cross_ratio(&ex("1/2")).satisfied);
        assert!(cross_ratio(&ex("0"), &ex("0"), &ex("1"), &ex("2")).is_err());
    }
}
