//! Numeric dynamics: attracting cycles reached from critical orbits, and
//! deterministic pictures of Julia sets and one-parameter families.

mod render;

use crate::algebra::ComplexFloat;
use crate::ratmap::{NumPoint, NumericMap};

pub use render::{render, render_with_threads, Palette, RenderOutput, RenderSpec, Target, Window};

#[derive(Clone, Debug)]
pub struct Cycle {
    pub points: Vec<NumPoint>,
    pub period: usize,
    pub multiplier: f64,
}

#[derive(Clone, Debug, Default)]
pub struct CycleAtlas {
    pub cycles: Vec<Cycle>,
}

impl CycleAtlas {
    pub fn periods(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.cycles.iter().map(|c| c.period).collect();
        p.sort_unstable();
        p
    }
}

/// Local coordinate near `z`: the identity on the closed unit disk, `1/z` outside.
#[derive(Clone, Copy, PartialEq)]
enum Chart {
    Origin,
    Infinity,
}

impl Chart {
    fn at(z: &NumPoint) -> Chart {
        match z {
            NumPoint::Finite(w) if w.norm_sqr() <= 1.0 => Chart::Origin,
            _ => Chart::Infinity,
        }
    }

    fn to_local(self, z: &NumPoint) -> ComplexFloat {
        match (self, z) {
            (Chart::Origin, NumPoint::Finite(w)) => *w,
            (Chart::Infinity, NumPoint::Finite(w)) => w.inv(),
            (Chart::Infinity, NumPoint::Infinity) => ComplexFloat::new(0.0, 0.0),
            (Chart::Origin, NumPoint::Infinity) => ComplexFloat::new(f64::INFINITY, 0.0),
        }
    }

    fn from_local(self, u: ComplexFloat) -> NumPoint {
        match self {
            Chart::Origin => NumPoint::Finite(u),
            Chart::Infinity if u.abs() < 1e-300 => NumPoint::Infinity,
            Chart::Infinity => NumPoint::Finite(u.inv()),
        }
    }
}

/// Multiplier of the cycle through `points` by central differences in local charts.
fn multiplier(f: &NumericMap, points: &[NumPoint]) -> f64 {
    let h = 1e-6;
    let p = points.len();
    let charts: Vec<Chart> = points.iter().map(Chart::at).collect();
    let mut lambda = ComplexFloat::new(1.0, 0.0);
    for i in 0..p {
        let (src, dst) = (charts[i], charts[(i + 1) % p]);
        let u = src.to_local(&points[i]);
        let step = ComplexFloat::new(h, 0.0);
        let plus = dst.to_local(&f.eval(&src.from_local(u + step)));
        let minus = dst.to_local(&f.eval(&src.from_local(u - step)));
        let d = (plus - minus) / ComplexFloat::new(2.0 * h, 0.0);
        lambda = lambda * d;
    }
    lambda.abs()
}

/// Least `p ≤ max_period` with `f^p(z)` within `eps` of `z`.
pub fn detect_period(f: &NumericMap, z: &NumPoint, max_period: usize, eps: f64) -> Option<usize> {
    let mut w = z.clone();
    for p in 1..=max_period {
        w = f.eval(&w);
        if w.dist(z) < eps {
            return Some(p);
        }
    }
    None
}

/// Iterates each seed `max_iter` times, then looks for a nearby periodic orbit.
/// Only attracting cycles (multiplier below 1) are kept, each once.
pub fn find_attracting_cycles(
    f: &NumericMap,
    seeds: &[NumPoint],
    max_iter: usize,
    max_period: usize,
    cycle_eps: f64,
) -> CycleAtlas {
    let mut atlas = CycleAtlas::default();
    let dedup_tol = (cycle_eps * 1e3).max(1e-9);
    for seed in seeds {
        let mut z = seed.clone();
        for _ in 0..max_iter {
            z = f.eval(&z);
        }
        let Some(period) = detect_period(f, &z, max_period, cycle_eps) else { continue };
        let mut points = vec![z.clone()];
        for _ in 1..period {
            let next = f.eval(points.last().unwrap());
            points.push(next);
        }
        let m = multiplier(f, &points);
        if m >= 1.0 {
            continue;
        }
        let known = atlas.cycles.iter().any(|c| c.points.iter().any(|q| q.dist(&points[0]) < dedup_tol));
        if !known {
            atlas.cycles.push(Cycle { points, period, multiplier: m });
        }
    }
    atlas
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmap::RationalMap;

    #[test]
    fn square_map_has_two_superattracting_fixed_points() {
        let f = RationalMap::from_ints(&[0, 0, 1], &[1]).unwrap().to_numeric::<f64>(53);
        let seeds = [NumPoint::Finite(ComplexFloat::new(0.0, 0.0)), NumPoint::Infinity];
        let atlas = find_attracting_cycles(&f, &seeds, 50, 8, 1e-9);
        assert_eq!(atlas.periods(), vec![1, 1]);
        assert!(atlas.cycles.iter().all(|c| c.multiplier < 1e-6));
        assert!(atlas.cycles.iter().any(|c| c.points[0].is_infinity()));
    }

    #[test]
    fn repelling_cycles_are_dropped() {
        // seeding on the repelling fixed point 1 of z² leaves it there
        let f = RationalMap::from_ints(&[0, 0, 1], &[1]).unwrap().to_numeric::<f64>(53);
        let atlas = find_attracting_cycles(&f, &[NumPoint::Finite(ComplexFloat::new(1.0, 0.0))], 10, 4, 1e-9);
        assert!(atlas.cycles.is_empty());
    }
}
