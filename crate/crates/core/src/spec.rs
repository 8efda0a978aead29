//! Concrete inequality instances: operator kind, cone, weights, exponents.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::Exponents;
use crate::gridfn::{Cone, Grid, GridFunction};
use crate::operators::{Inner, OperatorForm, OperatorOutput, Outer, PreparedOperator, Steps};
use crate::weights::{CumKind, Weight};

/// The operator on the left-hand side of an inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum OperatorKind {
    /// `S_u`
    S,
    /// `S*_u`
    Sstar,
    /// `S_u ∘ H`
    ISI1,
    /// `S_u ∘ H*`
    ISI2,
    /// `S*_u ∘ H*`
    ISI3,
    /// `S*_u ∘ H`
    ISI4,
    /// `S_u ∘ H` measured against `‖h‖_{1, 1/V}`
    #[serde(rename = "ISI1_V")]
    Isi1V,
    /// `S*_u ∘ H*` measured against `‖h‖_{1, 1/V*}`
    #[serde(rename = "ISI3_V")]
    Isi3V,
    /// `T_{u,b}`
    #[serde(rename = "TUB")]
    Tub,
    /// `T_γ`, i.e. `T_{u,1}` with `u(s) = s^{gamma_over_n}`
    TGamma { gamma_over_n: f64 },
    /// Forms produced by reductions with no criterion of their own;
    /// the right-hand side weight is `v` itself.
    #[serde(skip)]
    Composite { outer: Outer, inner: Inner, label: String },
}

impl OperatorKind {
    pub fn name(&self) -> String {
        match self {
            OperatorKind::S => "S".into(),
            OperatorKind::Sstar => "Sstar".into(),
            OperatorKind::ISI1 => "ISI1".into(),
            OperatorKind::ISI2 => "ISI2".into(),
            OperatorKind::ISI3 => "ISI3".into(),
            OperatorKind::ISI4 => "ISI4".into(),
            OperatorKind::Isi1V => "ISI1_V".into(),
            OperatorKind::Isi3V => "ISI3_V".into(),
            OperatorKind::Tub => "TUB".into(),
            OperatorKind::TGamma { gamma_over_n } => format!("TGamma({gamma_over_n})"),
            OperatorKind::Composite { label, .. } => label.clone(),
        }
    }

    /// Whether the input ranges over all nonnegative functions.
    pub fn is_iterated(&self) -> bool {
        !matches!(self, OperatorKind::S | OperatorKind::Sstar | OperatorKind::Tub | OperatorKind::TGamma { .. })
            && !matches!(self, OperatorKind::Composite { inner: Inner::Identity | Inner::Sup(_), .. })
    }
}

/// Preconditions a theorem may impose on the weights, each for all `x > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// `0 < V(x) < inf`
    V,
    /// `0 < V*(x) < inf`
    VStar,
    /// `0 < W(x) < inf`
    W,
    /// `0 < W*(x) < inf`
    WStar,
    /// `0 < B(x) < inf`
    B,
}

impl Hypothesis {
    pub fn label(self) -> &'static str {
        match self {
            Hypothesis::V => "0<V<inf",
            Hypothesis::VStar => "0<V*<inf",
            Hypothesis::W => "0<W<inf",
            Hypothesis::WStar => "0<W*<inf",
            Hypothesis::B => "0<B<inf",
        }
    }

    pub fn holds(self, spec: &InequalitySpec) -> bool {
        match self {
            Hypothesis::V => primitive_is_proper(&spec.v, CumKind::Lower),
            Hypothesis::VStar => primitive_is_proper(&spec.v, CumKind::Upper),
            Hypothesis::W => primitive_is_proper(&spec.w, CumKind::Lower),
            Hypothesis::WStar => primitive_is_proper(&spec.w, CumKind::Upper),
            Hypothesis::B => primitive_is_proper(&spec.b, CumKind::Lower),
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Whether `∫_0^x w` (or `∫_x^inf w`) lies in `(0, inf)` for every `x > 0`.
pub fn primitive_is_proper(w: &Weight, kind: CumKind) -> bool {
    let pieces = w.pieces();
    if pieces.iter().any(|p| p.c.is_infinite()) {
        return false;
    }
    let knots = w.knots();
    match kind {
        CumKind::Lower => {
            let edge = knots.first().copied().unwrap_or(1.0).min(1.0);
            !pieces[0].is_zero() && w.integrate(0.0, edge).is_finite()
        }
        CumKind::Upper => {
            let edge = knots.last().copied().unwrap_or(1.0).max(1.0);
            !pieces[pieces.len() - 1].is_zero() && w.integrate(edge, f64::INFINITY).is_finite()
        }
    }
}

/// One inequality `‖T f‖_{q,w} <= c ‖f‖_{p,v}` over a cone.
#[derive(Clone, Debug, PartialEq)]
pub struct InequalitySpec {
    pub kind: OperatorKind,
    pub cone: Cone,
    pub u: Weight,
    pub b: Weight,
    pub v: Weight,
    pub w: Weight,
    pub exponents: Exponents,
}

impl InequalitySpec {
    /// The operator as an outer/inner composition.
    pub fn form(&self) -> OperatorForm {
        let (outer, inner, u) = match &self.kind {
            OperatorKind::S => (Outer::Sup, Inner::Identity, self.u.clone()),
            OperatorKind::Sstar => (Outer::SupStar, Inner::Identity, self.u.clone()),
            OperatorKind::ISI1 | OperatorKind::Isi1V => (Outer::Sup, Inner::Hardy, self.u.clone()),
            OperatorKind::ISI2 => (Outer::Sup, Inner::Copson, self.u.clone()),
            OperatorKind::ISI3 | OperatorKind::Isi3V => (Outer::SupStar, Inner::Copson, self.u.clone()),
            OperatorKind::ISI4 => (Outer::SupStar, Inner::Hardy, self.u.clone()),
            OperatorKind::Tub => (Outer::Tub { b: self.b.clone() }, Inner::Identity, self.u.clone()),
            OperatorKind::TGamma { gamma_over_n } => {
                (Outer::Tub { b: Weight::one() }, Inner::Identity, Weight::power(1.0, *gamma_over_n))
            }
            OperatorKind::Composite { outer, inner, .. } => (outer.clone(), inner.clone(), self.u.clone()),
        };
        OperatorForm { outer, inner, u }
    }

    /// The weight of the right-hand side norm.
    pub fn norm_weight(&self) -> Weight {
        match self.kind {
            OperatorKind::Isi1V => self.v.cumulative_weight(CumKind::Lower).recip(),
            OperatorKind::Isi3V => self.v.cumulative_weight(CumKind::Upper).recip(),
            _ => self.v.clone(),
        }
    }

    /// The numerator weight `u`, with `T_γ` resolved to its power.
    pub fn effective_u(&self) -> Weight {
        self.form().u
    }

    /// The `b` weight, `≡ 1` for `T_γ`.
    pub fn effective_b(&self) -> Weight {
        match self.kind {
            OperatorKind::TGamma { .. } => Weight::one(),
            _ => self.b.clone(),
        }
    }

    /// Checks the cone against the operator kind.
    pub fn validate(&self) -> Result<()> {
        let iterated = self.kind.is_iterated();
        match (iterated, self.cone) {
            (true, Cone::Nonneg) | (false, Cone::NonIncreasing | Cone::NonDecreasing) => Ok(()),
            (true, c) => Err(Error::Usage(format!("{} acts on all nonnegative h, not on the {} cone", self.kind.name(), c.symbol()))),
            (false, _) => Err(Error::Usage(format!("{} needs a monotone cone", self.kind.name()))),
        }
    }

    /// Tabulates the operator on `grid`.
    pub fn prepare(&self, grid: Arc<Grid>) -> Result<PreparedOperator> {
        self.validate()?;
        PreparedOperator::new(&self.form(), grid)
    }
}

/// `T f` for the operator of `spec`; `f` must lie in the cone of `spec`.
pub fn apply_spec(spec: &InequalitySpec, f: &GridFunction) -> Result<OperatorOutput> {
    if f.cone() != spec.cone {
        return Err(Error::Usage(format!(
            "{} expects a function from the {} cone, got {}",
            spec.kind.name(),
            spec.cone.symbol(),
            f.cone().symbol()
        )));
    }
    Ok(spec.prepare(f.grid().clone())?.apply(&Steps::from_gridfn(f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::make_log_grid;

    fn spec(kind: OperatorKind, cone: Cone) -> InequalitySpec {
        InequalitySpec {
            kind,
            cone,
            u: Weight::one(),
            b: Weight::one(),
            v: Weight::one(),
            w: Weight::power_exp(1.0, 0.0, 1.0),
            exponents: Exponents::new(1.0, 1.0).unwrap(),
        }
    }

    fn chi(g: &Arc<Grid>, a: f64, cone: Cone) -> GridFunction {
        let v = g.knots().iter().map(|&x| if x <= a * (1.0 + 1e-12) { 1.0 } else { 0.0 }).collect();
        GridFunction::monotone(g.clone(), v, cone).unwrap()
    }

    #[test]
    fn apply_spec_examples() {
        let g = Arc::new(make_log_grid(1e-3, 1e3, 61).unwrap());
        let h = chi(&g, 1.0, Cone::Nonneg);
        let out = apply_spec(&spec(OperatorKind::ISI1, Cone::Nonneg), &h).unwrap();
        let k = g.knots();
        // left-rule segments carry h = 1 up to the first knot past 1
        let edge = k[k.partition_point(|&x| x <= 1.0 + 1e-12)];
        for i in 1..k.len() {
            // the outer sup sees the inner output one cell late
            assert!((out.values[i].get() - (k[i - 1].min(edge) - g.eps())).abs() < 1e-12, "{i} {:?}", out.values[i]);
        }
        let out = apply_spec(&spec(OperatorKind::ISI3, Cone::Nonneg), &h).unwrap();
        for i in 0..k.len() - 1 {
            assert!((out.values[i].get() - (edge - k[i + 1]).max(0.0)).abs() < 1e-12, "{i}");
        }
        let mut t = spec(OperatorKind::Tub, Cone::NonIncreasing);
        t.u = Weight::power(1.0, 1.0);
        let ones = GridFunction::monotone(g.clone(), vec![1.0; g.len()], Cone::NonIncreasing).unwrap();
        // on the non-increasing cone the tail beyond M is 0
        assert!(apply_spec(&t, &ones).unwrap().values.iter().all(|v| (v.get() - g.m()).abs() < 1e-9));
        let f = chi(&g, 1.0, Cone::NonIncreasing);
        assert!(apply_spec(&t, &f).unwrap().values.iter().all(|v| (v.get() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn cone_mismatch_is_a_usage_error() {
        let g = Arc::new(make_log_grid(1e-3, 1e3, 11).unwrap());
        let f = chi(&g, 1.0, Cone::NonIncreasing);
        let s = spec(OperatorKind::S, Cone::NonDecreasing);
        assert!(matches!(apply_spec(&s, &f), Err(Error::Usage(_))));
        assert!(matches!(spec(OperatorKind::ISI2, Cone::NonIncreasing).validate(), Err(Error::Usage(_))));
        assert!(matches!(spec(OperatorKind::S, Cone::Nonneg).validate(), Err(Error::Usage(_))));
    }

    #[test]
    fn hypotheses() {
        let s = spec(OperatorKind::S, Cone::NonIncreasing);
        assert!(Hypothesis::V.holds(&s));
        assert!(!Hypothesis::VStar.holds(&s));
        assert!(Hypothesis::W.holds(&s) && Hypothesis::WStar.holds(&s));
        let mut t = s.clone();
        t.v = Weight::power(1.0, -1.0);
        assert!(!Hypothesis::V.holds(&t));
        t.v = Weight::piecewise(vec![1.0], vec![crate::weights::Piece::ZERO, crate::weights::Piece::constant(1.0)]).unwrap();
        assert!(!Hypothesis::V.holds(&t));
        t.v = Weight::power(1.0, -2.0);
        assert!(Hypothesis::VStar.holds(&t) && !Hypothesis::V.holds(&t));
    }
}
