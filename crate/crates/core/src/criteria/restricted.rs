//! `S_u` and `S*_u` on the monotone cones, reported as T3.3 to T3.6.

use super::{check, two_sided, unit_term, CriterionResult, Form, Shape, Side};
use crate::error::Result;
use crate::spec::{Hypothesis, InequalitySpec};
use crate::weights::{CumKind, SupDirection};

pub(super) fn evaluate(theorem: &str, spec: &InequalitySpec, form: Form) -> Result<CriterionResult> {
    let e = spec.exponents;
    let (p, q) = (e.p, e.q);
    let (u, v, w) = (&spec.u, &spec.v, &spec.w);
    let verbatim = form == Form::Verbatim;
    let hyps: &[Hypothesis] = match (theorem, verbatim) {
        ("T3.3", false) => &[Hypothesis::V, Hypothesis::WStar],
        ("T3.3", true) => &[Hypothesis::VStar, Hypothesis::WStar],
        ("T3.4", false) => &[Hypothesis::VStar, Hypothesis::W],
        ("T3.4", true) => &[Hypothesis::V, Hypothesis::W],
        ("T3.5", _) => &[Hypothesis::VStar, Hypothesis::WStar],
        _ => &[Hypothesis::V, Hypothesis::W],
    };
    let report = check(theorem, spec, hyps)?;
    let v_total = v.integrate(0.0, f64::INFINITY).powf(1.0 / p);
    let big_v = v.cumulative_weight(CumKind::Lower);
    let big_vs = v.cumulative_weight(CumKind::Upper);
    let u_up = u.running_sup(SupDirection::UpToT);
    let u_down = u.running_sup(SupDirection::FromT);

    let mut terms = match theorem {
        "T3.3" => two_sided(&Shape::new(Side::Left, u_up.clone(), big_v.powf(-1.0 / p), w, e), true),
        "T3.4" => two_sided(&Shape::new(Side::Right, u_down.clone(), big_vs.powf(-1.0 / p), w, e), true),
        "T3.5" | "T3.6" => {
            let (side, big, dir) = if theorem == "T3.5" {
                (Side::Left, &big_vs, SupDirection::UpToT)
            } else {
                (Side::Right, &big_v, SupDirection::FromT)
            };
            // U = sup u^p / V°^2 over the side's range; the envelope is U^{1/p}
            let env = u.powf(p).product(&big.powf(-2.0)).running_sup(dir).powf(1.0 / p);
            let shape = Shape::new(side, env, big.powf(1.0 / p), w, e);
            if p <= q {
                vec![("A1", shape.a())]
            } else {
                let r = e.r().expect("q < p");
                // the printed display carries V°^{-r/p} in B1
                let s_r = big.powf(if verbatim { -r / p } else { r / p });
                vec![("B1", shape.b_int_with(&s_r)), ("B2", shape.b_sup(true))]
            }
        }
        _ => unreachable!("restricted theorems only"),
    };
    let unit_env = if theorem == "T3.3" || theorem == "T3.5" { &u_up } else { &u_down };
    terms.push(("unit", unit_term(unit_env, w, v_total, e)));
    Ok(CriterionResult::new(theorem, &e, form, terms, report))
}
