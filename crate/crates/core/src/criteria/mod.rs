//! Characterizing constants of the restricted, iterated and `T_{u,b}`
//! inequalities, and the reductions between inequality families.
//!
//! Every constant is assembled from exact weight algebra: running suprema,
//! primitives, products and powers of [`Weight`]s, followed by one
//! supremum or integral over `(0, inf)`.

mod iterated;
mod reduce;
mod restricted;
mod tub;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::Exponents;
use crate::gridfn::Cone;
use crate::spec::{Hypothesis, InequalitySpec, OperatorKind};
use crate::weights::{CumKind, SupDirection, Weight};
use crate::Ext;

pub use reduce::{reduce_spec, reduce_spec_with, Reduction, ReductionRecord};

/// Which rendering of a theorem display to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    /// Consistent with the change-of-variables and reduction arguments.
    Derived,
    /// The display exactly as printed.
    Verbatim,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    /// Evaluate the printed displays where they disagree with the derivations.
    pub verbatim_paper: bool,
}

/// Criterion constants for one spec.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub theorem_id: String,
    pub regime: String,
    pub form: Form,
    /// `A1`, `A2`, `B1`..`B4` and `unit` as the theorem has them.
    pub terms: BTreeMap<String, Ext>,
    pub total: Ext,
    pub finite: bool,
    /// Hypotheses checked, each with its outcome.
    pub hypothesis_report: BTreeMap<String, bool>,
    /// The other form when its terms differ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternate: Option<Box<CriterionResult>>,
}

impl CriterionResult {
    fn new(theorem_id: impl Into<String>, e: &Exponents, form: Form, terms: Vec<(&str, Ext)>, hyps: BTreeMap<String, bool>) -> Self {
        let terms: BTreeMap<String, Ext> = terms.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        let total = terms.values().copied().sum::<Ext>();
        Self {
            theorem_id: theorem_id.into(),
            regime: e.regime().label().to_string(),
            form,
            finite: total.is_finite(),
            terms,
            total,
            hypothesis_report: hyps,
            alternate: None,
        }
    }

    pub fn term(&self, name: &str) -> Option<Ext> {
        self.terms.get(name).copied()
    }
}

/// The governing theorem of a spec, or `None` when it has no criterion.
pub fn theorem_for(spec: &InequalitySpec) -> Option<&'static str> {
    let p = spec.exponents.p;
    Some(match (&spec.kind, spec.cone) {
        (OperatorKind::S, Cone::NonIncreasing) => "T3.3",
        (OperatorKind::Sstar, Cone::NonDecreasing) => "T3.4",
        (OperatorKind::S, Cone::NonDecreasing) => "T3.5",
        (OperatorKind::Sstar, Cone::NonIncreasing) => "T3.6",
        (OperatorKind::ISI4, Cone::Nonneg) => "T3.1",
        (OperatorKind::ISI2, Cone::Nonneg) => "T3.2",
        (OperatorKind::ISI1, Cone::Nonneg) => "T4.1",
        (OperatorKind::Isi1V, Cone::Nonneg) => "T4.2",
        (OperatorKind::ISI3, Cone::Nonneg) => "T4.3",
        (OperatorKind::Isi3V, Cone::Nonneg) => "T4.4",
        (OperatorKind::Tub | OperatorKind::TGamma { .. }, Cone::NonIncreasing) if p >= 1.0 => "T5.1",
        (OperatorKind::Tub | OperatorKind::TGamma { .. }, Cone::NonIncreasing) => "T5.3",
        _ => return None,
    })
}

/// Criterion constants for `spec`, in the form selected by `opts`, with the
/// other form attached when it differs.
pub fn evaluate(spec: &InequalitySpec, opts: Options) -> Result<CriterionResult> {
    spec.validate()?;
    spec.exponents.require_finite()?;
    let theorem = theorem_for(spec).ok_or_else(|| Error::Inapplicable {
        theorem: spec.kind.name(),
        predicate: format!("a criterion for the {} cone", spec.cone.symbol()),
    })?;
    let (primary, other) = if opts.verbatim_paper { (Form::Verbatim, Form::Derived) } else { (Form::Derived, Form::Verbatim) };
    let run = |form| match theorem {
        "T3.3" | "T3.4" | "T3.5" | "T3.6" => restricted::evaluate(theorem, spec, form),
        "T5.1" | "T5.3" => tub::evaluate(theorem, spec, form),
        _ => iterated::evaluate(theorem, spec, form),
    };
    let mut result = run(primary)?;
    if let Ok(alt) = run(other) {
        if alt.terms != result.terms || alt.hypothesis_report != result.hypothesis_report {
            result.alternate = Some(Box::new(alt));
        }
    }
    Ok(result)
}

/// Checks `hyps` on `spec`; the first failure makes the theorem inapplicable.
fn check(theorem: &str, spec: &InequalitySpec, hyps: &[Hypothesis]) -> Result<BTreeMap<String, bool>> {
    let mut report = BTreeMap::new();
    for h in hyps {
        let ok = h.holds(spec);
        report.insert(h.label().to_string(), ok);
        if !ok {
            return Err(Error::Inapplicable { theorem: theorem.into(), predicate: h.label().into() });
        }
    }
    Ok(report)
}

fn require(theorem: &str, ok: bool, predicate: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Inapplicable { theorem: theorem.into(), predicate: predicate.into() })
    }
}

/// Sides of the two shapes every criterion is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    /// `W*` outside, `∫_0^x` inside, suprema over `(0, x]`.
    Left,
    /// `W` outside, `∫_x^inf` inside, suprema over `[x, inf)`.
    Right,
}

impl Side {
    fn inner(self) -> CumKind {
        match self {
            Side::Left => CumKind::Lower,
            Side::Right => CumKind::Upper,
        }
    }

    fn outer(self) -> CumKind {
        match self {
            Side::Left => CumKind::Upper,
            Side::Right => CumKind::Lower,
        }
    }

    fn sup(self) -> SupDirection {
        match self {
            Side::Left => SupDirection::UpToT,
            Side::Right => SupDirection::FromT,
        }
    }
}

/// With an envelope `E` (monotone), a factor `S` and `G = E^q`:
///
/// * `A = sup_x (G(x) W°(x) + ∫° G w)^{1/q} S(x)`
/// * `B_int = (∫ (∫° G w)^{r/p} G S^r w)^{1/r}`
/// * `B_sup = (∫ W°^{r/p} [sup° E S]^r w)^{1/r}`
///
/// where `W°`, `∫°`, `sup°` follow the [`Side`].
struct Shape {
    side: Side,
    env: Weight,
    s: Weight,
    g: Weight,
    w: Weight,
    w_outer: Weight,
    g_cum: Weight,
    e: Exponents,
}

impl Shape {
    fn new(side: Side, env: Weight, s: Weight, w: &Weight, e: Exponents) -> Self {
        let g = env.powf(e.q);
        let g_cum = g.product(w).cumulative_weight(side.inner());
        let w_outer = w.cumulative_weight(side.outer());
        Self { side, env, s, g, w: w.clone(), w_outer, g_cum, e }
    }

    fn a(&self) -> Ext {
        self.g.product(&self.w_outer).add(&self.g_cum).powf(1.0 / self.e.q).product(&self.s).sup_on(0.0, f64::INFINITY)
    }

    /// `B_int` with `S^r` replaced by `s_r`.
    fn b_int_with(&self, s_r: &Weight) -> Ext {
        let (p, r) = (self.e.p, self.r());
        self.g_cum.powf(r / p).product(&self.g).product(s_r).product(&self.w).integrate(0.0, f64::INFINITY).powf(1.0 / r)
    }

    fn b_int(&self) -> Ext {
        self.b_int_with(&self.s.powf(self.r()))
    }

    /// `B_sup`; with `inner_sup = false` the supremum is dropped and `E S`
    /// is taken at `x`.
    fn b_sup(&self, inner_sup: bool) -> Ext {
        let inner = self.env.product(&self.s);
        let inner = if inner_sup { inner.running_sup(self.side.sup()) } else { inner };
        b_outer(&self.w_outer, &inner, &self.w, self.e)
    }

    fn r(&self) -> f64 {
        self.e.r().expect("B terms are only formed for q < p")
    }
}

/// `(∫ W°^{r/p} F^r w)^{1/r}`.
fn b_outer(w_outer: &Weight, f: &Weight, w: &Weight, e: Exponents) -> Ext {
    let r = e.r().expect("B terms are only formed for q < p");
    w_outer.powf(r / e.p).product(&f.powf(r)).product(w).integrate(0.0, f64::INFINITY).powf(1.0 / r)
}

/// `‖env‖_{q,w} / V(inf)^{1/p}`: the unit-function term.
fn unit_term(env: &Weight, w: &Weight, denominator: Ext, e: Exponents) -> Ext {
    env.powf(e.q).product(w).integrate(0.0, f64::INFINITY).powf(1.0 / e.q) / denominator
}

/// `A1` alone for `p <= q`, `B1, B2` for `q < p`.
fn two_sided(shape: &Shape, inner_sup: bool) -> Vec<(&'static str, Ext)> {
    if shape.e.p <= shape.e.q {
        vec![("A1", shape.a())]
    } else {
        vec![("B1", shape.b_int()), ("B2", shape.b_sup(inner_sup))]
    }
}

#[cfg(test)]
mod tests;
