use rayon::prelude::*;

use crate::algebra::roots::{exact_roots, poly_roots_numeric};
use crate::algebra::{ComplexFloat, ComplexPoly};
use crate::error::{Error, Result};
use crate::mobius::{group_closure, MobiusGroup, NumMobius};
use crate::ratmap::{critical_data, Mode, NumPoint, Point, RationalMap, SpherePoint};

const TOL: f64 = 1e-7;
const AUT_CAP: usize = 120;

/// Bit flags describing how a point sits relative to `f`; automorphisms preserve them.
const CRIT: u8 = 1;
const CRIT_VALUE: u8 = 2;
const FIXED: u8 = 4;
const SECOND_IMAGE: u8 = 8;

struct Marked {
    point: NumPoint,
    flags: u8,
}

fn add(set: &mut Vec<Marked>, p: NumPoint, flag: u8) {
    match set.iter_mut().find(|m| m.point.dist(&p) < TOL) {
        Some(m) => m.flags |= flag,
        None => set.push(Marked { point: p, flags: flag }),
    }
}

fn fixed_points(f: &RationalMap) -> Result<Vec<Point>> {
    // roots of P − zQ, plus ∞ when f(∞) = ∞
    let p = f.num() - &(&ComplexPoly::z() * f.den());
    let mut out = Vec::new();
    if !p.is_zero() && p.degree().unwrap_or(0) > 0 {
        let (roots, rest) = exact_roots(&p)?;
        out.extend(roots.into_iter().map(|(z, _)| Point::Exact(SpherePoint::Finite(z))));
        if rest.degree().unwrap_or(0) > 0 {
            out.extend(
                poly_roots_numeric::<f64>(&rest, 53)?
                    .into_iter()
                    .map(|r| Point::Numeric(NumPoint::Finite(r.z))),
            );
        }
    }
    if f.eval(&SpherePoint::Infinity).is_infinity() {
        out.push(Point::Exact(SpherePoint::Infinity));
    }
    Ok(out)
}

/// `Aut(f)`: every Möbius `τ` with `f∘τ = τ∘f`, each certified exactly.
///
/// Candidates are the Möbius maps sending three marked points (critical
/// points, critical values, fixed points, second images of critical points)
/// to marked points of the same kind.
pub fn aut_group(f: &RationalMap, _precision: usize) -> Result<MobiusGroup> {
    if f.degree() < 2 {
        return Err(Error::InvalidArgument(format!("automorphism group needs degree at least 2, got {}", f.degree())));
    }
    let cd = critical_data(f, Mode::Exact)?;
    let nf = f.to_numeric::<f64>(53);
    let mut marked: Vec<Marked> = Vec::new();
    for (c, _) in &cd.points {
        add(&mut marked, c.approx(), CRIT);
    }
    for v in &cd.values {
        add(&mut marked, v.approx(), CRIT_VALUE);
        add(&mut marked, nf.eval(&v.approx()), SECOND_IMAGE);
    }
    for p in fixed_points(f)? {
        add(&mut marked, p.approx(), FIXED);
    }
    if marked.len() < 3 {
        return Err(Error::SearchFailure("fewer than three marked points".into()));
    }
    let n = marked.len();
    let triples: Vec<[usize; 3]> = (0..n)
        .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| [a, b, c])))
        .filter(|[a, b, c]| a != b && b != c && a != c)
        .filter(|t| (0..3).all(|i| marked[t[i]].flags == marked[i].flags))
        .collect();
    let probes: Vec<NumPoint> = [(0.3, 0.7), (-1.1, 0.2), (2.3, -0.4)]
        .iter()
        .map(|&(re, im)| NumPoint::Finite(ComplexFloat::new(re, im)))
        .collect();
    let src = [&marked[0].point, &marked[1].point, &marked[2].point];
    let gens: Vec<_> = triples
        .par_iter()
        .filter_map(|t| {
            let tau = NumMobius::from_triples(src, [&marked[t[0]].point, &marked[t[1]].point, &marked[t[2]].point], 53)?;
            let permutes = marked.iter().all(|m| {
                let img = tau.apply(&m.point);
                marked.iter().any(|q| q.flags == m.flags && q.point.dist(&img) < TOL)
            });
            if !permutes {
                return None;
            }
            let commutes = probes.iter().all(|z| nf.eval(&tau.apply(z)).dist(&tau.apply(&nf.eval(z))) < TOL);
            if !commutes {
                return None;
            }
            let exact = tau.snap(53)?;
            let m = exact.to_map();
            (f.compose(&m) == m.compose(f)).then_some(exact)
        })
        .collect();
    group_closure(&gens, AUT_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::{IsoType, MobiusTransform};

    #[test]
    fn power_map_symmetries() {
        let sq = RationalMap::from_ints(&[0, 0, 1], &[1]).unwrap();
        let g = aut_group(&sq, 53).unwrap();
        assert!(g.contains_exact(&MobiusTransform::from_ints(0, 1, 1, 0).unwrap()));
        assert_eq!(g.iso_type, IsoType::Cyclic(2));
        // z³ commutes with −z and 1/z
        let cube = RationalMap::from_ints(&[0, 0, 0, 1], &[1]).unwrap();
        let g = aut_group(&cube, 53).unwrap();
        assert_eq!(g.iso_type, IsoType::V4);
    }

    #[test]
    fn symmetry_locus_and_generic() {
        // 3/5 (z + 1/z)
        let fc = RationalMap::from_ints(&[3, 0, 3], &[0, 5]).unwrap();
        let g = aut_group(&fc, 53).unwrap();
        assert!(g.contains_exact(&MobiusTransform::from_ints(-1, 0, 0, 1).unwrap()));
        let generic = RationalMap::from_ints(&[1, 0, 1], &[1]).unwrap();
        assert_eq!(aut_group(&generic, 53).unwrap().order(), 1);
    }
}
