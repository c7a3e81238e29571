//! JSON rendering of analysis results. Exact numbers are always strings.

use deckmap::algebra::ComplexFloat;
use deckmap::deck::{DeckResult, PairLabel};
use deckmap::detect::{DetectionReport, SharedIterateReport};
use deckmap::mobius::{GroupElement, MobiusGroup, MobiusTransform};
use deckmap::ratmap::{CriticalData, NumPoint, Point, PostcriticalOrbit, RationalMap};
use serde_json::{json, Value};

pub const SCHEMA: &str = "deckmap/1";

fn complex(z: &ComplexFloat) -> Value {
    json!([z.re, z.im])
}

pub fn point(p: &Point) -> Value {
    match p {
        Point::Exact(s) => json!({ "exact": true, "value": s.to_string() }),
        Point::Numeric(NumPoint::Infinity) => json!({ "exact": false, "value": "inf" }),
        Point::Numeric(NumPoint::Finite(z)) => json!({ "exact": false, "value": p.to_string(), "approx": complex(z) }),
    }
}

pub fn points(ps: &[Point]) -> Value {
    Value::Array(ps.iter().map(point).collect())
}

pub fn map(f: &RationalMap) -> Value {
    let coeffs = |p: &deckmap::algebra::ComplexPoly| -> Vec<String> { p.coeffs().iter().map(|c| c.to_string()).collect() };
    json!({
        "expression": f.to_string(),
        "degree": f.degree(),
        "num": coeffs(f.num()),
        "den": coeffs(f.den()),
    })
}

pub fn mobius(m: &MobiusTransform) -> Value {
    json!({ "entries": m.entry_strings(), "map": m.to_string() })
}

fn element(e: &GroupElement, order: usize) -> Value {
    json!({
        "certified": e.is_certified(),
        "entries": e.exact.as_ref().map(|m| json!(m.entry_strings())),
        "map": e.exact.as_ref().map(|m| m.to_string()),
        "approx": e.approx.m.iter().map(complex).collect::<Vec<_>>(),
        "order": order,
    })
}

pub fn group(g: &MobiusGroup) -> Value {
    json!({
        "iso_type": g.iso_type.to_string(),
        "order": g.order(),
        "abelian": g.is_abelian(),
        "all_certified": g.elements.iter().all(GroupElement::is_certified),
        "elements": g.elements.iter().zip(&g.orders).map(|(e, &o)| element(e, o)).collect::<Vec<_>>(),
    })
}

pub fn critical(cd: &CriticalData) -> Value {
    json!({
        "points": cd.points.iter().map(|(p, m)| json!({ "point": point(p), "multiplicity": m })).collect::<Vec<_>>(),
        "values": points(&cd.value_set()),
        "exact": cd.exact,
        "bicritical": cd.bicritical,
        "power_map": cd.is_power_map(),
        "critically_coalescing": cd.critically_coalescing,
    })
}

pub fn postcritical(o: &PostcriticalOrbit) -> Value {
    json!({
        "finite": o.finite,
        "orbits": o.orbits.iter().map(|c| json!({
            "points": points(&c.points),
            "preperiod": c.preperiod,
            "period": c.period,
        })).collect::<Vec<_>>(),
        "postcritical_set": points(&o.postcritical_set),
        "fixed_point": o.fixed_point.as_ref().map(point),
        "m": o.m,
    })
}

pub fn deck(dr: &DeckResult) -> Value {
    let pairs = dr.special_pairs.as_ref().map(|ps| {
        ps.iter()
            .map(|p| {
                let label = match &p.label {
                    Some(PairLabel::CriticalPoints) => json!("critical-points"),
                    Some(PairLabel::PreimageOfCritical(i)) => json!(format!("preimage-of-critical-{i}")),
                    None => Value::Null,
                };
                json!({ "element": p.element, "points": points(&p.points), "label": label })
            })
            .collect::<Vec<_>>()
    });
    json!({
        "degree": dr.degree,
        "k": dr.k,
        "group": group(&dr.group),
        "base_points": dr.base_points.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "special_pairs": pairs,
        "rejected_numeric": dr.rejected_numeric,
    })
}

pub fn detection(r: &DetectionReport) -> Value {
    let e = &r.evidence;
    json!({
        "critical_points": points(&r.critical_points),
        "critical_values": points(&r.critical_values),
        "case": r.case.label(),
        "evidence": {
            "deck_type": e.deck_type.to_string(),
            "deck_order": e.deck_order,
            "element": e.element,
            "value_candidates": points(&e.value_candidates),
            "special_pairs": e.special_pairs.iter().map(|p| points(p)).collect::<Vec<_>>(),
            "pair_images": points(&e.pair_images),
            "postcritical": points(&e.postcritical),
            "alpha": e.alpha.as_ref().map(point),
            "beta": e.beta.as_ref().map(point),
            "m": e.m,
            "cross_ratio": e.cross_ratio.as_ref().map(|c| json!({
                "value": point(&c.value),
                "satisfied": c.satisfied,
                "exact": c.exact,
            })),
            "fiber_counts": e.fiber_counts.iter().map(|(p, n)| json!({ "point": point(p), "count": n })).collect::<Vec<_>>(),
        },
    })
}

pub fn shared(r: &SharedIterateReport) -> Value {
    json!({
        "minimal_k": r.minimal_k,
        "max_k": r.max_k,
        "critical_points_f": points(&r.critical_points_f),
        "critical_points_g": points(&r.critical_points_g),
        "critical_values_f": points(&r.critical_values_f),
        "critical_values_g": points(&r.critical_values_g),
        "cv_cp_agree": r.cv_cp_agree,
        "second_iterate_equal": r.second_iterate_equal,
        "mobius_factor": r.mobius_factor.as_ref().map(mobius),
        "involution_mu": r.involution_mu.as_ref().map(mobius),
        "symmetry_locus_member": r.symmetry_locus_member,
        "transposes_critical_points": r.transposes_critical_points,
        "transposes_critical_values": r.transposes_critical_values,
        "theorem_alarm": r.theorem_alarm,
    })
}

/// Top-level document for a successful command.
pub fn envelope(command: &str, input: Value, result: Value) -> Value {
    json!({ "schema": SCHEMA, "command": command, "input": input, "result": result })
}

/// Top-level document for a failed command.
pub fn error_envelope(command: &str, kind: &str, message: &str, position: Option<usize>) -> Value {
    json!({
        "schema": SCHEMA,
        "command": command,
        "error": { "kind": kind, "message": message, "position": position },
    })
}
