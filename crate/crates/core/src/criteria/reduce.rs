//! Reductions between inequality families, reported as R2.1 to R2.6.
//!
//! R2.1 to R2.4 move a monotone-cone inequality to an iterated one over all
//! nonnegative functions; R2.5 and R2.6 go the other way.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gridfn::Cone;
use crate::operators::{Inner, Outer};
use crate::spec::{InequalitySpec, OperatorKind};
use crate::weights::{phi_weights, CumKind, SupDirection, Weight};
use crate::Ext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Reduction {
    /// `↓` to `T ∘ H*` with weight `V^p v^{1-p}`.
    R21,
    /// `↓` to `T(V^{-2} ∫_0^x hV)` with weight `v^{1-p}`.
    R22,
    /// `↑` to `T ∘ H` with weight `V*^p v^{1-p}`.
    R23,
    /// `↑` to `T(V*^{-2} ∫_x^inf hV*)` with weight `v^{1-p}`.
    R24,
    /// `T ∘ H` with `p > 1` to `T_{Φ²}` on `↓` with weight `φ`.
    R25,
    /// `T ∘ H` against `‖h‖_{1,1/V}` to `T_{V²}` on `↓` with weight `v`.
    R26,
}

impl Reduction {
    pub fn id(self) -> &'static str {
        match self {
            Reduction::R21 => "R2.1",
            Reduction::R22 => "R2.2",
            Reduction::R23 => "R2.3",
            Reduction::R24 => "R2.4",
            Reduction::R25 => "R2.5",
            Reduction::R26 => "R2.6",
        }
    }
}

/// What a reduction did.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionRecord {
    pub theorem_id: String,
    /// `"cone->iterated"` or `"iterated->cone"`.
    pub direction: String,
    /// `‖T 1‖_{q,w} / ‖1‖_{p,v}` when `V(inf)` (or `V*(0)`) is finite; the
    /// original best constant is then comparable to the reduced one plus
    /// this term.
    pub side_condition: Option<Ext>,
}

/// Applies the natural reduction for the inequality's shape: R2.1 on `↓`, R2.3 on
/// `↑`, R2.5 for `S_u ∘ H` and `S*_u ∘ H`, R2.6 for the `1/V` form.
pub fn reduce_spec(spec: &InequalitySpec) -> Result<(InequalitySpec, ReductionRecord)> {
    let which = match (&spec.kind, spec.cone) {
        (OperatorKind::ISI1 | OperatorKind::ISI4, _) => Reduction::R25,
        (OperatorKind::Isi1V, _) => Reduction::R26,
        (_, Cone::NonIncreasing) => Reduction::R21,
        (_, Cone::NonDecreasing) => Reduction::R23,
        _ => return Err(inapplicable("R2", format!("no reduction for {}", spec.kind.name()))),
    };
    reduce_spec_with(spec, which)
}

pub fn reduce_spec_with(spec: &InequalitySpec, which: Reduction) -> Result<(InequalitySpec, ReductionRecord)> {
    spec.validate()?;
    let id = which.id();
    let p = spec.exponents.p;
    let mut out = spec.clone();
    let (direction, side_condition) = match which {
        Reduction::R21 | Reduction::R22 | Reduction::R23 | Reduction::R24 => {
            let down = matches!(which, Reduction::R21 | Reduction::R22);
            let cone = if down { Cone::NonIncreasing } else { Cone::NonDecreasing };
            if spec.cone != cone || spec.kind.is_iterated() {
                return Err(inapplicable(id, format!("needs a non-iterated operator on the {} cone", cone.symbol())));
            }
            if !(p >= 1.0 && p.is_finite()) {
                return Err(inapplicable(id, "1<=p<inf".into()));
            }
            let kind = if down { CumKind::Lower } else { CumKind::Upper };
            let big = spec.v.cumulative_weight(kind);
            let proper = crate::spec::primitive_is_proper(&spec.v, kind);
            if !proper {
                return Err(inapplicable(id, if down { "0<V<inf" } else { "0<V*<inf" }.into()));
            }
            let (outer, u) = outer_of(spec);
            let inner = match which {
                Reduction::R21 => Inner::Copson,
                Reduction::R23 => Inner::Hardy,
                Reduction::R22 => Inner::HardyDamped(big.clone()),
                _ => Inner::CopsonDamped(big.clone()),
            };
            out.v = match which {
                Reduction::R21 | Reduction::R23 => big.powf(p).product(&spec.v.powf(1.0 - p)),
                _ => spec.v.powf(1.0 - p),
            };
            out.kind = canonical(outer, inner, &spec.kind);
            out.u = u;
            out.cone = Cone::Nonneg;
            let total = spec.v.integrate(0.0, f64::INFINITY);
            let side = matches!(which, Reduction::R21 | Reduction::R23).then(|| total.is_finite()).unwrap_or(false);
            ("cone->iterated", side.then(|| unit_ratio(spec, total)))
        }
        Reduction::R25 => {
            let outer_kind = match spec.kind {
                OperatorKind::ISI1 => OperatorKind::S,
                OperatorKind::ISI4 => OperatorKind::Sstar,
                _ => return Err(inapplicable(id, "needs S_u ∘ H or S*_u ∘ H".into())),
            };
            let (small, cap) = phi_weights(&spec.v, p).map_err(|err| match err {
                Error::TransformUndefined(why) => inapplicable(id, why),
                other => other,
            })?;
            out.kind = outer_kind;
            out.u = spec.u.product(&cap.powf(2.0));
            out.v = small;
            out.cone = Cone::NonIncreasing;
            ("iterated->cone", None)
        }
        Reduction::R26 => {
            if spec.kind != OperatorKind::Isi1V {
                return Err(inapplicable(id, "needs the ISI1_V form".into()));
            }
            if !crate::spec::primitive_is_proper(&spec.v, CumKind::Lower) {
                return Err(inapplicable(id, "0<V<inf".into()));
            }
            let big_v = spec.v.cumulative_weight(CumKind::Lower);
            out.kind = OperatorKind::S;
            out.u = spec.u.product(&big_v.powf(2.0));
            out.cone = Cone::NonIncreasing;
            ("iterated->cone", None)
        }
    };
    Ok((out, ReductionRecord { theorem_id: id.into(), direction: direction.into(), side_condition }))
}

fn inapplicable(theorem: &str, predicate: String) -> Error {
    Error::Inapplicable { theorem: theorem.into(), predicate }
}

fn outer_of(spec: &InequalitySpec) -> (Outer, Weight) {
    let form = spec.form();
    (form.outer, form.u)
}

/// Named kinds where one exists, a composite otherwise.
fn canonical(outer: Outer, inner: Inner, original: &OperatorKind) -> OperatorKind {
    match (&outer, &inner) {
        (Outer::Sup, Inner::Copson) => OperatorKind::ISI2,
        (Outer::Sup, Inner::Hardy) => OperatorKind::ISI1,
        (Outer::SupStar, Inner::Copson) => OperatorKind::ISI3,
        (Outer::SupStar, Inner::Hardy) => OperatorKind::ISI4,
        _ => {
            let inner_label = match inner {
                Inner::Identity => "",
                Inner::Hardy => "∘H",
                Inner::Copson => "∘H*",
                Inner::HardyDamped(_) => "∘(V^-2 H(hV))",
                Inner::CopsonDamped(_) => "∘(V*^-2 H*(hV*))",
                Inner::Sup(_) => "∘S",
            };
            OperatorKind::Composite { label: format!("{}{inner_label}", original.name()), outer, inner }
        }
    }
}

/// `‖T 1‖_{q,w} / ‖1‖_{p,v}`, with `T 1` the envelope of `u` on the
/// operator's side.
fn unit_ratio(spec: &InequalitySpec, v_total: Ext) -> Ext {
    let e = spec.exponents;
    let u = spec.effective_u();
    let env = match spec.kind {
        OperatorKind::S => u.running_sup(SupDirection::UpToT),
        _ => u.running_sup(SupDirection::FromT),
    };
    env.powf(e.q).product(&spec.w).integrate(0.0, f64::INFINITY).powf(1.0 / e.q) / v_total.powf(1.0 / e.p)
}
