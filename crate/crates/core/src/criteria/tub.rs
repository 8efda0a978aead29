//! `T_{u,b}` on the non-increasing cone, reported as T5.1 for `p >= 1` and T5.3 for `p < 1`.

use super::{b_outer, check, CriterionResult, Form, Shape, Side};
use crate::error::Result;
use crate::spec::{Hypothesis, InequalitySpec};
use crate::weights::{CumKind, SupDirection};

pub(super) fn evaluate(theorem: &str, spec: &InequalitySpec, form: Form) -> Result<CriterionResult> {
    let e = spec.exponents;
    let (p, q) = (e.p, e.q);
    let (u, b, v, w) = (spec.effective_u(), spec.effective_b(), &spec.v, &spec.w);
    let verbatim = form == Form::Verbatim;
    let hyps: &[Hypothesis] =
        if theorem == "T5.1" { &[Hypothesis::B, Hypothesis::V, Hypothesis::W] } else { &[Hypothesis::B, Hypothesis::V] };
    let mut scratch = spec.clone();
    scratch.b = b.clone();
    let report = check(theorem, &scratch, hyps)?;

    let big_b = b.cumulative_weight(CumKind::Lower);
    let big_v = v.cumulative_weight(CumKind::Lower);
    let r_env = u.product(&big_b.recip()).running_sup(SupDirection::FromT);

    let (first, second, case) = if p >= 1.0 {
        let (s1, s2) = if p == 1.0 {
            (big_b.product(&big_v.recip()).running_sup(SupDirection::UpToT), big_v.clone())
        } else {
            let pp = e.p_prime().expect("p > 1");
            let bv = big_b.product(&big_v.recip()).powf(pp).product(v).cumulative_weight(CumKind::Lower).powf(1.0 / pp);
            let vv = big_v.powf(pp).product(v).cumulative_weight(CumKind::Lower).powf(1.0 / pp);
            (bv, vv)
        };
        let q_env = u.product(&big_v.powf(-2.0)).running_sup(SupDirection::FromT);
        let case = match (p == 1.0, p <= q) {
            (false, true) => "i",
            (true, true) => "ii",
            (false, false) => "iii",
            (true, false) => "iv",
        };
        (Shape::new(Side::Right, r_env, s1, w, e), Shape::new(Side::Right, q_env, s2, w, e), case)
    } else {
        let s1 = big_b.product(&big_v.powf(-1.0 / p)).running_sup(SupDirection::UpToT);
        let u2 = u.powf(p).product(&big_v.powf(-2.0)).running_sup(SupDirection::FromT);
        let case = if p <= q { "i" } else { "ii" };
        (Shape::new(Side::Right, r_env, s1, w, e), Shape::new(Side::Right, u2.powf(1.0 / p), big_v.powf(1.0 / p), w, e), case)
    };

    let terms = if p <= q {
        vec![("A1", first.a()), ("A2", second.a())]
    } else if p >= 1.0 {
        // the printed B2, B4 take the outer supremum of a function of x alone
        vec![("B1", first.b_int()), ("B2", first.b_sup(!verbatim)), ("B3", second.b_int()), ("B4", second.b_sup(!verbatim))]
    } else {
        let b1 = if verbatim {
            // printed: [sup_{τ>=x} R(τ)^q · sup_{y<=x} B/V^{1/p}]^r
            let f = first.env.powf(q).product(&first.s);
            b_outer(&first.w_outer, &f, w, e)
        } else {
            first.b_sup(true)
        };
        vec![("B1", b1), ("B2", first.b_int()), ("B3", second.b_sup(true)), ("B4", second.b_int())]
    };
    Ok(CriterionResult::new(format!("{theorem}.{case}"), &e, form, terms, report))
}
