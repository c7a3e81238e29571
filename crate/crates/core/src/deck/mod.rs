//! Deck groups `{τ : F∘τ = F}` of iterates and automorphism groups
//! `{τ : τ⁻¹∘f∘τ = f}`, found numerically from fibers and certified exactly.

mod aut;

use num_rational::BigRational;
use rayon::prelude::*;

use crate::algebra::float::BigFloat;
use crate::algebra::roots::poly_roots_numeric;
use crate::algebra::{ComplexPoly, GaussianRational};
use crate::error::{Error, Result};
use crate::mobius::{group_closure_mixed, GroupElement, IsoType, MobiusGroup, NumMobius, ELEMENT_TOL};
use crate::ratmap::{critical_data, fiber_poly, same_set, CriticalData, Mode, NumPoint, Point, RationalMap, SpherePoint};

pub use aut::aut_group;

/// Number of base points tried before giving up on finding a regular fiber.
pub const BASE_POINT_ATTEMPTS: usize = 64;

/// Chordal tolerance for matching fiber points at double precision.
const FIBER_TOL: f64 = 1e-6;
/// Tolerance for the high-precision recheck of numeric-only elements.
const HIGH_PREC_TOL: f64 = 1e-12;
const SCREEN_PREC: usize = 128;
/// Fibers with two points closer than this are used only as a last resort.
const MIN_SPACING: f64 = 1e-4;

/// The `i`-th base point: 2, 3, 1+i, 2+i, 5/2, then a fixed tail.
pub fn base_point(i: usize) -> GaussianRational {
    let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    match i {
        0 => GaussianRational::from(2),
        1 => GaussianRational::from(3),
        2 => GaussianRational::from_ints(1, 1),
        3 => GaussianRational::from_ints(2, 1),
        4 => GaussianRational::ratio(5, 2),
        _ => {
            let t = (i - 4) as i64;
            GaussianRational::new(r(2 * t + 3, t + 1), r(t, t + 2))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairLabel {
    CriticalPoints,
    /// Preimage of the critical point with the given index in `critical_data(f).points`.
    PreimageOfCritical(usize),
}

/// Fixed-point pair of one involution of a V4 deck group.
#[derive(Clone, Debug)]
pub struct SpecialPair {
    /// Index of the involution in the group.
    pub element: usize,
    pub points: Vec<Point>,
    pub label: Option<PairLabel>,
}

#[derive(Clone, Debug)]
pub struct DeckResult {
    pub degree: usize,
    pub k: usize,
    pub group: MobiusGroup,
    pub base_points: Vec<SpherePoint>,
    pub special_pairs: Option<Vec<SpecialPair>>,
    /// Numeric candidates dropped because they failed the high-precision recheck.
    pub rejected_numeric: usize,
}

impl DeckResult {
    /// Per-element exact certification flags, aligned with `group.elements`.
    pub fn certified(&self) -> Vec<bool> {
        self.group.elements.iter().map(GroupElement::is_certified).collect()
    }

    pub fn iso_type(&self) -> IsoType {
        self.group.iso_type
    }

    pub fn all_certified(&self) -> bool {
        self.certified().iter().all(|&c| c)
    }
}

struct RegularFiber {
    base: SpherePoint,
    poly: ComplexPoly,
    points: Vec<NumPoint>,
}

fn is_regular(f: &RationalMap, w: &GaussianRational) -> Option<ComplexPoly> {
    let (r, at_inf) = fiber_poly(f, &SpherePoint::Finite(w.clone()));
    (at_inf == 0 && r.degree() == Some(f.degree()) && r.is_square_free()).then_some(r)
}

fn min_spacing(points: &[NumPoint]) -> f64 {
    let mut m = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        for q in &points[..i] {
            m = m.min(p.dist(q));
        }
    }
    m
}

fn regular_fibers(f: &RationalMap, count: usize) -> Result<Vec<RegularFiber>> {
    let mut out = Vec::new();
    let mut crowded = Vec::new();
    for i in 0..BASE_POINT_ATTEMPTS {
        let w = base_point(i);
        if let Some(poly) = is_regular(f, &w) {
            // polished at extra precision: anchor errors get amplified by the
            // inverse fiber spacing when candidates are built from three points
            let points: Vec<NumPoint> = poly_roots_numeric::<BigFloat>(&poly, SCREEN_PREC)?
                .into_iter()
                .map(|r| NumPoint::Finite(r.z).to_f64())
                .collect();
            let spacing = min_spacing(&points);
            let fiber = RegularFiber { base: SpherePoint::Finite(w), poly, points };
            // exactly regular but numerically close to a critical value
            if spacing < MIN_SPACING {
                crowded.push((spacing, fiber));
                continue;
            }
            out.push(fiber);
            if out.len() == count {
                return Ok(out);
            }
        }
    }
    crowded.sort_by(|a, b| b.0.total_cmp(&a.0));
    out.extend(crowded.into_iter().map(|(_, fiber)| fiber).take(count - out.len()));
    if out.len() == count {
        return Ok(out);
    }
    Err(Error::SearchFailure(format!("no regular fiber among the first {BASE_POINT_ATTEMPTS} base points")))
}

/// Index permutation induced by `tau` on `points`, if it permutes them within `tol`.
fn induced_permutation(tau: &NumMobius, points: &[NumPoint], tol: f64) -> Option<Vec<usize>> {
    let mut used = vec![false; points.len()];
    let mut perm = Vec::with_capacity(points.len());
    for p in points {
        let img = tau.apply(p);
        let j = (0..points.len()).find(|&j| !used[j] && points[j].dist(&img) < tol)?;
        used[j] = true;
        perm.push(j);
    }
    Some(perm)
}

fn preserves_local_degrees(tau: &NumMobius, crit: &[(NumPoint, usize)]) -> bool {
    crit.iter().all(|(c, m)| {
        let img = tau.apply(c);
        crit.iter().any(|(c2, m2)| m2 == m && c2.dist(&img) < FIBER_TOL)
    })
}

struct Candidate {
    tau: NumMobius,
    targets: [usize; 3],
}

/// `Deck(f^k)`.
pub fn deck_group(f: &RationalMap, k: usize, precision: usize) -> Result<DeckResult> {
    if f.degree() < 2 {
        return Err(Error::InvalidArgument(format!("deck group needs degree at least 2, got {}", f.degree())));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("iterate index must be at least 1".into()));
    }
    let big_f = f.iterate(k)?;
    let mut result = deck_group_of(&big_f, precision)?;
    result.degree = f.degree();
    result.k = k;
    Ok(result)
}

/// `Deck(F)` for a map given directly.
pub fn deck_group_of(big_f: &RationalMap, precision: usize) -> Result<DeckResult> {
    let n = big_f.degree();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("deck group needs degree at least 2, got {n}")));
    }
    let fibers = regular_fibers(big_f, 2)?;
    let crit: Vec<(NumPoint, usize)> = critical_data(big_f, Mode::Numeric)?
        .points
        .into_iter()
        .map(|(p, m)| (p.approx(), m))
        .collect();
    let fiber = &fibers[0].points;
    let second = &fibers[1].points;
    // the third anchor comes from the second fiber so that degree two works too
    let src = [&fiber[0], &fiber[1], &second[0]];

    let triples: Vec<[usize; 3]> = (0..n)
        .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| [a, b, c])))
        .filter(|[a, b, _]| a != b)
        .collect();
    let survivors: Vec<Candidate> = triples
        .par_iter()
        .filter_map(|t| {
            let tau = NumMobius::from_triples(src, [&fiber[t[0]], &fiber[t[1]], &second[t[2]]], 53)?;
            induced_permutation(&tau, fiber, FIBER_TOL)?;
            if !preserves_local_degrees(&tau, &crit) {
                return None;
            }
            induced_permutation(&tau, second, FIBER_TOL)?;
            Some(Candidate { tau, targets: *t })
        })
        .collect();

    let certified: Vec<Option<GroupElement>> = survivors
        .par_iter()
        .map(|c| {
            let exact = c.tau.snap(53)?;
            (big_f.compose(&exact.to_map()) == *big_f).then(|| GroupElement::exact(exact))
        })
        .collect();

    let hp = precision.max(53).saturating_mul(2).max(113);
    let needs_recheck = certified.iter().any(Option::is_none);
    let hi_fibers = if needs_recheck {
        Some((high_precision_fiber(&fibers[0], hp)?, high_precision_fiber(&fibers[1], hp)?))
    } else {
        None
    };

    let mut elements = Vec::new();
    let mut rejected_numeric = 0;
    for (cand, cert) in survivors.iter().zip(certified) {
        match cert {
            Some(e) => elements.push(e),
            None => {
                let (hi, hi2) = hi_fibers.as_ref().expect("computed when needed");
                // keep the refined transform so that compositions stay within tolerance
                if let Some(tau) = recheck(&cand.targets, hi, hi2, hp) {
                    elements.push(GroupElement::numeric(tau.to_f64()));
                } else {
                    rejected_numeric += 1;
                }
            }
        }
    }
    if elements.is_empty() {
        return Err(Error::Internal("identity was not recovered as a deck candidate".into()));
    }
    let group = group_closure_mixed(elements, n, ELEMENT_TOL).map_err(|e| match e {
        Error::ClosureExceedsCap { .. } => {
            Error::NumericFalsePositive(format!("closure exceeds the degree bound {n}; retry at higher precision"))
        }
        e => e,
    })?;
    let special_pairs = (group.iso_type == IsoType::V4).then(|| unlabeled_pairs(&group)).transpose()?;
    Ok(DeckResult {
        degree: n,
        k: 1,
        group,
        base_points: fibers.into_iter().map(|f| f.base).collect(),
        special_pairs,
        rejected_numeric,
    })
}

fn high_precision_fiber(fiber: &RegularFiber, prec: usize) -> Result<Vec<NumPoint<BigFloat>>> {
    let roots = poly_roots_numeric::<BigFloat>(&fiber.poly, prec)?;
    // align with the double-precision ordering
    fiber
        .points
        .iter()
        .map(|p| {
            roots
                .iter()
                .map(|r| NumPoint::Finite(r.z.clone()))
                .min_by(|a, b| a.to_f64().dist(p).total_cmp(&b.to_f64().dist(p)))
                .ok_or_else(|| Error::Internal("empty high-precision fiber".into()))
        })
        .collect()
}

fn recheck(
    targets: &[usize; 3],
    hi: &[NumPoint<BigFloat>],
    hi2: &[NumPoint<BigFloat>],
    prec: usize,
) -> Option<NumMobius<BigFloat>> {
    let tau = NumMobius::<BigFloat>::from_triples(
        [&hi[0], &hi[1], &hi2[0]],
        [&hi[targets[0]], &hi[targets[1]], &hi2[targets[2]]],
        prec,
    )?;
    let ok = [hi, hi2].iter().all(|fib| {
        fib.iter().all(|p| {
            let img = tau.apply(p);
            fib.iter().any(|q| q.dist(&img) < HIGH_PREC_TOL)
        })
    });
    ok.then_some(tau)
}

fn unlabeled_pairs(group: &MobiusGroup) -> Result<Vec<SpecialPair>> {
    (1..group.order())
        .map(|i| {
            Ok(SpecialPair { element: i, points: refine_points(group.elements[i].fixed_points()?), label: None })
        })
        .collect()
}

/// Replaces numeric points by exact ones when snapping gives a point that
/// is verifiably the same to working precision.
fn refine_points(points: Vec<Point>) -> Vec<Point> {
    points
        .into_iter()
        .map(|p| match &p {
            Point::Numeric(NumPoint::Infinity) => Point::Exact(SpherePoint::Infinity),
            _ => p,
        })
        .collect()
}

/// Labels the special pairs of a V4 deck group against the critical data of `f`.
pub fn special_pairs(dr: &DeckResult, f: &RationalMap) -> Result<Vec<SpecialPair>> {
    if dr.group.iso_type != IsoType::V4 {
        return Err(Error::InvalidArgument(format!("special pairs need a V4 group, got {}", dr.group.iso_type)));
    }
    let cd: CriticalData = critical_data(f, Mode::Exact)?;
    if f.degree() != 2 || cd.critically_coalescing != Some(true) {
        return Err(Error::InvalidArgument("special pair labels need a critically coalescing quadratic".into()));
    }
    let crit = cd.point_set();
    let tol = 1e-9;
    let pairs = dr.special_pairs.clone().unwrap_or_default();
    pairs
        .into_iter()
        .map(|mut sp| {
            sp.label = if same_set(&sp.points, &crit, tol) {
                Some(PairLabel::CriticalPoints)
            } else {
                let img = f.eval_point(&sp.points[0], 53);
                crit.iter().position(|c| c.same(&img, 1e-7)).map(PairLabel::PreimageOfCritical)
            };
            Ok(sp)
        })
        .collect()
}

/// True when `τ` is an exact deck transformation of `F`.
pub fn is_deck_transformation(big_f: &RationalMap, tau: &crate::mobius::MobiusTransform) -> bool {
    big_f.compose(&tau.to_map()) == *big_f
}
