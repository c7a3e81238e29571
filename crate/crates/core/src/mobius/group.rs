use std::collections::HashMap;
use std::fmt;

use super::{MobiusTransform, NumMobius};
use crate::error::{Error, Result};
use crate::ratmap::{same_set, Point};

/// Projective tolerance for identifying numeric group elements.
pub const ELEMENT_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polyhedral {
    A4,
    S4,
    A5,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsoType {
    Cyclic(usize),
    /// Dihedral group of the given order `2n`, `n ≥ 3`.
    Dihedral(usize),
    V4,
    Polyhedral(Polyhedral),
}

impl IsoType {
    pub fn order(&self) -> usize {
        match *self {
            IsoType::Cyclic(n) | IsoType::Dihedral(n) => n,
            IsoType::V4 => 4,
            IsoType::Polyhedral(Polyhedral::A4) => 12,
            IsoType::Polyhedral(Polyhedral::S4) => 24,
            IsoType::Polyhedral(Polyhedral::A5) => 60,
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        matches!(self, IsoType::Polyhedral(_))
    }
}

impl fmt::Display for IsoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoType::Cyclic(n) => write!(f, "Cyclic({n})"),
            IsoType::Dihedral(n) => write!(f, "Dihedral({n})"),
            IsoType::V4 => write!(f, "V4"),
            IsoType::Polyhedral(p) => write!(f, "{p:?}"),
        }
    }
}

/// A group member: exact when known over Q(i), always with a numeric matrix.
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub exact: Option<MobiusTransform>,
    pub approx: NumMobius,
}

impl GroupElement {
    pub fn exact(t: MobiusTransform) -> Self {
        let approx = t.to_numeric(53);
        GroupElement { exact: Some(t), approx }
    }

    pub fn numeric(m: NumMobius) -> Self {
        GroupElement { exact: None, approx: m }
    }

    pub fn identity() -> Self {
        GroupElement::exact(MobiusTransform::identity())
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => GroupElement::exact(a.compose(b)),
            _ => GroupElement::numeric(self.approx.compose(&other.approx)),
        }
    }

    pub fn same(&self, other: &GroupElement, tol: f64) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            _ => self.approx.dist(&other.approx) < tol,
        }
    }

    /// Fixed points, exact when the element is exact and they are rational.
    pub fn fixed_points(&self) -> Result<Vec<Point>> {
        if let Some(t) = &self.exact {
            return t.fixed_points();
        }
        numeric_fixed_points(&self.approx)
    }

    pub fn apply(&self, z: &Point) -> Point {
        match &self.exact {
            Some(t) => t.apply_point(z),
            None => Point::Numeric(self.approx.apply(&z.approx())),
        }
    }

    pub fn is_certified(&self) -> bool {
        self.exact.is_some()
    }
}

fn numeric_fixed_points(m: &NumMobius) -> Result<Vec<Point>> {
    use crate::algebra::ComplexFloat;
    use crate::ratmap::NumPoint;
    let [a, b, c, d] = m.m;
    if m.is_identity(ELEMENT_TOL) {
        return Err(Error::InvalidArgument("the identity fixes every point".into()));
    }
    let scale = [a, b, c, d].iter().map(|x| x.abs()).fold(0.0, f64::max);
    if c.abs() < 1e-12 * scale {
        let mut out = vec![Point::Numeric(NumPoint::Infinity)];
        let dma = d - a;
        if dma.abs() > 1e-12 * scale {
            out.insert(0, Point::Numeric(NumPoint::Finite(b / dma)));
        }
        return Ok(out);
    }
    let amd = a - d;
    let disc = amd * amd + b * c * ComplexFloat::new(4.0, 0.0);
    let s = disc.sqrt();
    let two_c = c * ComplexFloat::new(2.0, 0.0);
    if disc.abs() < 1e-14 * scale * scale {
        return Ok(vec![Point::Numeric(NumPoint::Finite(amd / two_c))]);
    }
    Ok(vec![
        Point::Numeric(NumPoint::Finite((amd + s) / two_c).normalized()),
        Point::Numeric(NumPoint::Finite((amd - s) / two_c).normalized()),
    ])
}

/// Finite Möbius group with its Cayley table; element 0 is the identity.
#[derive(Clone, Debug)]
pub struct MobiusGroup {
    pub elements: Vec<GroupElement>,
    /// `table[i][j]` is the index of `elements[i] ∘ elements[j]`.
    pub table: Vec<Vec<usize>>,
    pub orders: Vec<usize>,
    pub iso_type: IsoType,
    /// For dihedral groups: indices `(r, s)` with `⟨r⟩` of index two and `srs⁻¹ = r⁻¹`.
    pub dihedral_witness: Option<(usize, usize)>,
}

impl MobiusGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn inverse_of(&self, i: usize) -> usize {
        (0..self.order()).find(|&j| self.table[i][j] == 0).expect("group has inverses")
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|i| (0..n).all(|j| self.table[i][j] == self.table[j][i]))
    }

    /// Index of the element matching `t`, if present.
    pub fn position(&self, t: &GroupElement) -> Option<usize> {
        self.elements.iter().position(|e| e.same(t, ELEMENT_TOL))
    }

    pub fn contains_exact(&self, t: &MobiusTransform) -> bool {
        self.elements.iter().any(|e| e.exact.as_ref() == Some(t))
    }

    /// Orders of all elements as a sorted multiset.
    pub fn order_census(&self) -> Vec<usize> {
        let mut v = self.orders.clone();
        v.sort_unstable();
        v
    }

    pub fn from_elements(elements: Vec<GroupElement>, tol: f64) -> Result<MobiusGroup> {
        let n = elements.len();
        let exact_index: HashMap<MobiusTransform, usize> = elements
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.exact.clone().map(|t| (t, i)))
            .collect();
        let find = |g: &GroupElement| -> Option<usize> {
            if let Some(t) = &g.exact {
                if let Some(&i) = exact_index.get(t) {
                    return Some(i);
                }
            }
            elements.iter().position(|e| e.same(g, tol))
        };
        let mut table = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                let prod = elements[i].compose(&elements[j]);
                table[i][j] = find(&prod)
                    .ok_or_else(|| Error::NumericFalsePositive("element set is not closed under composition".into()))?;
            }
        }
        if !elements[0].exact.as_ref().is_some_and(MobiusTransform::is_identity) {
            return Err(Error::Internal("first group element must be the identity".into()));
        }
        let orders: Vec<usize> = (0..n).map(|i| element_order(&table, i)).collect();
        let (iso_type, dihedral_witness) = classify(&table, &orders)?;
        Ok(MobiusGroup { elements, table, orders, iso_type, dihedral_witness })
    }
}

fn element_order(table: &[Vec<usize>], i: usize) -> usize {
    let mut acc = i;
    let mut n = 1;
    while acc != 0 {
        acc = table[acc][i];
        n += 1;
        assert!(n <= table.len() + 1, "element order exceeds group order");
    }
    n
}

fn classify(table: &[Vec<usize>], orders: &[usize]) -> Result<(IsoType, Option<(usize, usize)>)> {
    let n = table.len();
    if orders.contains(&n) {
        return Ok((IsoType::Cyclic(n), None));
    }
    if n == 4 && orders.iter().all(|&o| o <= 2) {
        return Ok((IsoType::V4, None));
    }
    if n % 2 == 0 && n >= 6 {
        let half = n / 2;
        for r in (0..n).filter(|&r| orders[r] == half) {
            let mut cyclic = vec![0usize];
            while cyclic.len() < half {
                let next = table[*cyclic.last().unwrap()][r];
                cyclic.push(next);
            }
            let r_inv = cyclic[half - 1];
            for s in (0..n).filter(|&s| orders[s] == 2 && !cyclic.contains(&s)) {
                // s is an involution, so s⁻¹ = s
                if table[table[s][r]][s] == r_inv {
                    return Ok((IsoType::Dihedral(n), Some((r, s))));
                }
            }
        }
    }
    let census = |o: usize| orders.iter().filter(|&&x| x == o).count();
    let poly = match n {
        12 if census(2) == 3 && census(3) == 8 => Some(Polyhedral::A4),
        24 if census(2) == 9 && census(3) == 8 && census(4) == 6 => Some(Polyhedral::S4),
        60 if census(2) == 15 && census(3) == 20 && census(5) == 24 => Some(Polyhedral::A5),
        _ => None,
    };
    poly.map(|p| (IsoType::Polyhedral(p), None))
        .ok_or_else(|| Error::Internal(format!("group of order {n} matches no finite Möbius group type")))
}

/// Closure of exact generators under composition.
pub fn group_closure(gens: &[MobiusTransform], cap: usize) -> Result<MobiusGroup> {
    group_closure_mixed(gens.iter().cloned().map(GroupElement::exact).collect(), cap, ELEMENT_TOL)
}

/// Closure of possibly numeric generators; numeric elements are identified
/// within projective distance `tol`.
pub fn group_closure_mixed(gens: Vec<GroupElement>, cap: usize, tol: f64) -> Result<MobiusGroup> {
    if cap == 0 {
        return Err(Error::InvalidArgument("closure cap must be at least 1".into()));
    }
    let mut elements = vec![GroupElement::identity()];
    let mut frontier = 0;
    while frontier < elements.len() {
        let x = elements[frontier].clone();
        frontier += 1;
        for g in &gens {
            let y = x.compose(g);
            if !elements.iter().any(|e| e.same(&y, tol)) {
                elements.push(y);
                if elements.len() > cap {
                    return Err(Error::ClosureExceedsCap { cap });
                }
            }
        }
    }
    MobiusGroup::from_elements(elements, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BeardonCase {
    NotCommuting,
    /// Both maps have the same fixed-point set.
    SharedFixedSet,
    /// `s`, `t` and `s∘t` are involutions with pairwise disjoint fixed sets.
    ThreeInvolutions,
}

#[derive(Clone, Debug)]
pub struct CommutingReport {
    pub commute: bool,
    pub case: BeardonCase,
    pub s_order: Option<usize>,
    pub t_order: Option<usize>,
    pub fixed_sets_disjoint: bool,
}

/// Which configuration two commuting non-identity Möbius maps are in.
pub fn commuting_structure(s: &MobiusTransform, t: &MobiusTransform) -> Result<CommutingReport> {
    if s.is_identity() || t.is_identity() {
        return Err(Error::InvalidArgument("commuting structure needs non-identity maps".into()));
    }
    let commute = s.compose(t) == t.compose(s);
    let fs = s.fixed_points()?;
    let ft = t.fixed_points()?;
    let tol = 1e-9;
    let fixed_sets_disjoint = !fs.iter().any(|p| ft.iter().any(|q| p.same(q, tol)));
    let (s_order, t_order) = (s.order(64), t.order(64));
    let case = if !commute {
        BeardonCase::NotCommuting
    } else if same_set(&fs, &ft, tol) {
        BeardonCase::SharedFixedSet
    } else if s_order == Some(2) && t_order == Some(2) && s.compose(t).order(2) == Some(2) && fixed_sets_disjoint {
        BeardonCase::ThreeInvolutions
    } else {
        return Err(Error::Internal("commuting maps outside both known configurations".into()));
    };
    Ok(CommutingReport { commute, case, s_order, t_order, fixed_sets_disjoint })
}
