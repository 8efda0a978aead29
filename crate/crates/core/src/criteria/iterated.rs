//! Iterated inequalities `S_u ∘ H`, `S_u ∘ H*`, `S*_u ∘ H*`, `S*_u ∘ H`;
//! criteria reported as T3.1, T3.2 and T4.1 to T4.4.

use super::{b_outer, check, require, two_sided, unit_term, CriterionResult, Form, Shape, Side};
use crate::error::{Error, Result};
use crate::spec::{Hypothesis, InequalitySpec};
use crate::weights::{phi_weights, psi_weights, CumKind, SupDirection, Weight};
use crate::Ext;

pub(super) fn evaluate(theorem: &str, spec: &InequalitySpec, form: Form) -> Result<CriterionResult> {
    let e = spec.exponents;
    let p = e.p;
    let (u, v, w) = (&spec.u, &spec.v, &spec.w);
    let verbatim = form == Form::Verbatim;
    let (terms, report) = match theorem {
        "T3.1" | "T3.2" => {
            require(theorem, p >= 1.0, "p>=1")?;
            let (hyps, side, env_dir, cum) = if theorem == "T3.1" {
                ([Hypothesis::V, Hypothesis::W], Side::Right, SupDirection::FromT, CumKind::Lower)
            } else {
                ([Hypothesis::VStar, Hypothesis::WStar], Side::Left, SupDirection::UpToT, CumKind::Upper)
            };
            let report = check(theorem, spec, &hyps)?;
            let sigma = sigma_weight(v, p, cum);
            let shape = Shape::new(side, u.running_sup(env_dir), sigma, w, e);
            (two_sided(&shape, true), report)
        }
        "T4.1" | "T4.3" => {
            require(theorem, p > 1.0, "p>1")?;
            let (pair, hyp, side, dir) = if theorem == "T4.1" {
                (phi_weights(v, p), Hypothesis::WStar, Side::Left, SupDirection::UpToT)
            } else {
                (psi_weights(v, p), Hypothesis::W, Side::Right, SupDirection::FromT)
            };
            let (_, cap) = pair.map_err(|err| match err {
                Error::TransformUndefined(why) => Error::Inapplicable { theorem: theorem.into(), predicate: why },
                other => other,
            })?;
            let mut report = check(theorem, spec, &[hyp])?;
            report.insert(if side == Side::Left { "0<∫_0^x v^(1-p')<inf" } else { "0<∫_x^inf v^(1-p')<inf" }.into(), true);
            let u_cap = u.product(&cap.powf(2.0));
            let env = u_cap.running_sup(dir);
            let shape = Shape::new(side, env.clone(), cap.powf(-1.0 / p), w, e);
            let pp = e.p_prime().expect("p > 1");
            // ‖1‖_{p,φ}^p = ∫φ = (p'+1)·Φ(inf), and ψ likewise with Ψ(0)
            let cap_end = if side == Side::Left { cap.limit_at_infinity() } else { cap.limit_at_zero() };
            let denom = (Ext::new(pp + 1.0) * cap_end).powf(1.0 / p);
            // the printed unit term of T4.3 has S rather than S*
            let unit_env = if verbatim && theorem == "T4.3" { u_cap.running_sup(SupDirection::UpToT) } else { env };
            let mut terms = two_sided(&shape, true);
            terms.push(("unit", unit_term(&unit_env, w, denom, e)));
            (terms, report)
        }
        "T4.2" => {
            require(theorem, p == 1.0, "p=1")?;
            let report = check(theorem, spec, &[Hypothesis::V, Hypothesis::WStar])?;
            let big_v = v.cumulative_weight(CumKind::Lower);
            let env = u.product(&big_v.powf(2.0)).running_sup(SupDirection::UpToT);
            let shape = Shape::new(Side::Left, env.clone(), big_v.recip(), w, e);
            let mut terms = two_sided(&shape, true);
            terms.push(("unit", unit_term(&env, w, v.integrate(0.0, f64::INFINITY), e)));
            (terms, report)
        }
        "T4.4" => {
            require(theorem, p == 1.0, "p=1")?;
            let hyps = if verbatim { [Hypothesis::VStar, Hypothesis::WStar] } else { [Hypothesis::VStar, Hypothesis::W] };
            let report = check(theorem, spec, &hyps)?;
            let big_vs = v.cumulative_weight(CumKind::Upper);
            let env = u.product(&big_vs.powf(2.0)).running_sup(SupDirection::FromT);
            let right = Shape::new(Side::Right, env.clone(), big_vs.recip(), w, e);
            let mut terms = if !verbatim {
                two_sided(&right, true)
            } else {
                // the printed display mixes W*, ∫_0^x and V with the right-hand envelope
                let big_v = v.cumulative_weight(CumKind::Lower);
                if e.p <= e.q {
                    vec![("A1", Shape::new(Side::Left, env.clone(), big_v.recip(), w, e).a())]
                } else {
                    let inner = env.product(&big_v.recip()).running_sup(SupDirection::FromT);
                    let ws = w.cumulative_weight(CumKind::Upper);
                    vec![("B1", right.b_int()), ("B2", b_outer(&ws, &inner, w, e))]
                }
            };
            terms.push(("unit", unit_term(&env, w, v.integrate(0.0, f64::INFINITY), e)));
            (terms, report)
        }
        _ => unreachable!("iterated theorems only"),
    };
    Ok(CriterionResult::new(theorem, &e, form, terms, report))
}

/// `x -> σ_p(0, x)` (`Lower`) or `x -> σ_p(x, inf)` (`Upper`) as a weight.
pub(crate) fn sigma_weight(v: &Weight, p: f64, kind: CumKind) -> Weight {
    if p == 1.0 {
        let dir = match kind {
            CumKind::Lower => SupDirection::UpToT,
            CumKind::Upper => SupDirection::FromT,
        };
        return v.recip().running_sup(dir);
    }
    let pp = p / (p - 1.0);
    v.powf(1.0 - pp).cumulative_weight(kind).powf(1.0 / pp)
}
