use super::critical::{critical_data, Mode};
use super::point::{NumPoint, Point, SpherePoint};
use super::RationalMap;
use crate::algebra::float::{BigFloat, Complex, ComplexFloat};
use crate::algebra::roots::{exact_roots, poly_roots_numeric, roots_of_float_poly};
use crate::algebra::ComplexPoly;
use crate::error::{Error, Result};

const FIBER_PREC: usize = 128;

/// Polynomial whose roots are the finite points of `f⁻¹(w)`, together with
/// the multiplicity of ∞ in that fiber.
pub fn fiber_poly(f: &RationalMap, w: &SpherePoint) -> (ComplexPoly, usize) {
    let r = match w {
        SpherePoint::Finite(w) => f.num() - &f.den().scale(w),
        SpherePoint::Infinity => f.den().clone(),
    };
    let at_inf = f.degree() - r.degree().unwrap_or(0);
    (r, at_inf)
}

/// Solutions of `f(z) = w` with multiplicity (total `deg f`).
///
/// Exact mode fails with `NotRepresentable` when some solution is irrational.
pub fn fiber(f: &RationalMap, w: &SpherePoint, mode: Mode) -> Result<Vec<(Point, usize)>> {
    let (r, at_inf) = fiber_poly(f, w);
    let mut out = Vec::new();
    if r.degree().unwrap_or(0) > 0 {
        match mode {
            Mode::Exact => {
                let (roots, rest) = exact_roots(&r)?;
                if rest.degree().unwrap_or(0) > 0 {
                    return Err(Error::NotRepresentable(format!("fiber over {w} has irrational points")));
                }
                out.extend(roots.into_iter().map(|(z, m)| (Point::Exact(SpherePoint::Finite(z)), m)));
            }
            Mode::Numeric => {
                // clustered fibers of iterates lose digits at double precision
                out.extend(
                    poly_roots_numeric::<BigFloat>(&r, FIBER_PREC)?
                        .into_iter()
                        .map(|root| (Point::Numeric(NumPoint::Finite(root.z).to_f64()), root.mult)),
                );
            }
        }
    }
    if at_inf > 0 {
        let p = match mode {
            Mode::Exact => Point::Exact(SpherePoint::Infinity),
            Mode::Numeric => Point::Numeric(NumPoint::Infinity),
        };
        out.push((p, at_inf));
    }
    Ok(out)
}

/// Fiber over an approximate point; multiplicities come from root clustering.
pub fn fiber_numeric(f: &RationalMap, w: &NumPoint, prec: usize) -> Result<Vec<(NumPoint, usize)>> {
    let d = f.degree();
    let num: Vec<ComplexFloat> = f.num().to_numeric(53);
    let den: Vec<ComplexFloat> = f.den().to_numeric(53);
    let mut r: Vec<ComplexFloat> = match w {
        NumPoint::Infinity => den.clone(),
        NumPoint::Finite(w) => (0..=d)
            .map(|i| {
                let p = num.get(i).copied().unwrap_or(Complex::new(0.0, 0.0));
                let q = den.get(i).copied().unwrap_or(Complex::new(0.0, 0.0));
                p - *w * q
            })
            .collect(),
    };
    // ∞ lies over w when f(∞) ≈ w; its multiplicity is the local degree there
    let f_inf = f.eval(&SpherePoint::Infinity).approx();
    let mut at_inf = 0;
    if f_inf.dist(w) < 1e-10 {
        at_inf = super::critical::local_degree(f, &Point::Exact(SpherePoint::Infinity))?;
    }
    r.truncate(d + 1 - at_inf);
    let mut out: Vec<(NumPoint, usize)> = if r.len() > 1 {
        roots_of_float_poly(&r, prec)?
            .into_iter()
            .map(|root| (NumPoint::Finite(root.z), root.mult))
            .collect()
    } else {
        Vec::new()
    };
    if at_inf > 0 {
        out.push((NumPoint::Infinity, at_inf));
    }
    Ok(out)
}

/// Counts `aᵢ` of fiber points of `f^k` over `z` with local degree `dⁱ` under `f^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreePartition {
    pub d: usize,
    pub k: usize,
    pub counts: Vec<usize>,
}

impl DegreePartition {
    /// `Σ aᵢ dⁱ`, which always equals `d^k`.
    pub fn weighted_total(&self) -> usize {
        self.counts.iter().enumerate().map(|(i, a)| a * self.d.pow(i as u32)).sum()
    }
}

/// Local degrees come from exact multiplicities in the square-free
/// decomposition of the fiber polynomial of `f^k`, so no root finding is needed.
pub fn degree_partition(f: &RationalMap, k: usize, z: &SpherePoint) -> Result<DegreePartition> {
    let cd = critical_data(f, Mode::Exact)?;
    if !cd.bicritical {
        return Err(Error::InvalidArgument("degree partition requires a bicritical map".into()));
    }
    let d = f.degree();
    let fk = f.iterate(k)?;
    let (r, at_inf) = fiber_poly(&fk, z);
    let mut counts = vec![0usize; k + 1];
    let mut add = |mult: usize, how_many: usize| -> Result<()> {
        let i = (0..=k)
            .find(|&i| d.pow(i as u32) == mult)
            .ok_or_else(|| Error::Internal(format!("local degree {mult} is not a power of {d}")))?;
        counts[i] += how_many;
        Ok(())
    };
    for (factor, mult) in r.square_free() {
        add(mult, factor.degree().unwrap_or(0))?;
    }
    if at_inf > 0 {
        add(at_inf, 1)?;
    }
    Ok(DegreePartition { d, k, counts })
}
