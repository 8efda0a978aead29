//! `T_{u,b}`, its `p`-power form and its double-sup form for `p <= 1`.
//!
//! With `f` non-increasing,
//! `sup_{y<=t} f B <= ∫_0^t f b <= p^{1/p} (∫_0^t f^p B^{p-1} b)^{1/p}`,
//! so the three operators are ordered pointwise and their inequalities are
//! equivalent; with `u ≡ 1` they are the three forms of the Hardy inequality on `↓`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::{best_constant_lower, Budget, OracleResult, Trace};
use crate::error::{Error, Result};
use crate::exponents::Exponents;
use crate::gridfn::{Cone, Grid, GridFunction};
use crate::operators::{Inner, Outer, PreparedOperator, OperatorForm, Steps};
use crate::spec::{primitive_is_proper, InequalitySpec, OperatorKind};
use crate::weights::{CumKind, Weight};
use crate::Ext;

/// The three inequalities of one weight set.
#[derive(Clone, Debug)]
pub struct ThreeWay {
    /// `‖T_{u,b} f‖_{q,w} <= c ‖f‖_{p,v}`
    pub tub: InequalitySpec,
    /// `T_{u^p/p, B^{p-1}b}` with exponents `(1, q/p)`; its constant to the
    /// power `1/p` is that of the `p`-power form.
    pub power: InequalitySpec,
    /// `S*_{u/B} ∘ S_B` on the non-increasing cone.
    pub double_sup: InequalitySpec,
}

impl ThreeWay {
    pub fn new(u: &Weight, b: &Weight, v: &Weight, w: &Weight, e: Exponents) -> Result<Self> {
        let p = e.p;
        if !(p > 0.0 && p <= 1.0) || !e.q.is_finite() {
            return Err(Error::Usage(format!("three-way check needs 0 < p <= 1 and finite q, got p={}, q={}", e.p, e.q)));
        }
        if !primitive_is_proper(b, CumKind::Lower) {
            return Err(Error::Inapplicable { theorem: "T5.2".into(), predicate: "0<B<inf".into() });
        }
        let big_b = b.cumulative_weight(CumKind::Lower);
        let make = |kind, u: Weight, b: Weight, exponents| InequalitySpec {
            kind,
            cone: Cone::NonIncreasing,
            u,
            b,
            v: v.clone(),
            w: w.clone(),
            exponents,
        };
        let double_sup = OperatorKind::Composite {
            outer: Outer::SupStar,
            inner: Inner::Sup(big_b.clone()),
            label: "S*_{u/B}∘S_B".into(),
        };
        Ok(Self {
            tub: make(OperatorKind::Tub, u.clone(), b.clone(), e),
            power: make(
                OperatorKind::Tub,
                u.powf(p).scale(1.0 / p),
                big_b.powf(p - 1.0).product(b),
                Exponents::new(1.0, e.q / p)?,
            ),
            double_sup: make(double_sup, u.product(&big_b.recip()), b.clone(), e),
        })
    }

    fn p(&self) -> f64 {
        self.tub.exponents.p
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ThreeWayReport {
    pub tub: OracleResult,
    pub power: OracleResult,
    pub double_sup: OracleResult,
    /// Quotients of the effective bounds, keyed `"a/b"`.
    pub ratios: BTreeMap<String, Ext>,
    /// Largest `max(r, 1/r)` over finite pairs.
    pub max_spread: f64,
    pub flags_agree: bool,
}

/// Oracle bounds for the three forms and their pairwise ratios.
pub fn verify_three_way(
    u: &Weight,
    b: &Weight,
    v: &Weight,
    w: &Weight,
    e: Exponents,
    grid: Arc<Grid>,
    budget: Budget,
    seed: u64,
) -> Result<ThreeWayReport> {
    let tw = ThreeWay::new(u, b, v, w, e)?;
    let tub = best_constant_lower(&tw.tub, grid.clone(), budget, seed)?;
    let power = root(best_constant_lower(&tw.power, grid.clone(), budget, seed)?, tw.p())?;
    let double_sup = best_constant_lower(&tw.double_sup, grid, budget, seed)?;
    let named = [("tub", &tub), ("power", &power), ("double_sup", &double_sup)];
    let mut ratios = BTreeMap::new();
    let mut max_spread: f64 = 1.0;
    for i in 0..3 {
        for j in i + 1..3 {
            let (a, b) = (named[i].1.effective(), named[j].1.effective());
            let r = a / b;
            if a.is_finite() && b.is_finite() {
                max_spread = max_spread.max(if r.get() >= 1.0 { r.get() } else { 1.0 / r.get() });
            }
            ratios.insert(format!("{}/{}", named[i].0, named[j].0), r);
        }
    }
    let flags_agree = tub.divergence_flag == power.divergence_flag && power.divergence_flag == double_sup.divergence_flag;
    Ok(ThreeWayReport { tub, power, double_sup, ratios, max_spread, flags_agree })
}

/// Moves a bound for `f = g^p` back to `g`.
fn root(r: OracleResult, p: f64) -> Result<OracleResult> {
    let s = 1.0 / p;
    let values = r.witness.values().iter().map(|x| x.powf(s)).collect();
    let witness = GridFunction::monotone(r.witness.grid().clone(), values, Cone::NonIncreasing)?;
    let trace = Trace { characteristic: r.trace.characteristic.powf(s), random: r.trace.random.powf(s), ascent: r.trace.ascent.powf(s) };
    Ok(OracleResult { lower_bound: r.lower_bound.powf(s), witness, trace, divergence_flag: r.divergence_flag })
}

/// Knot values of the three inner functionals of a non-increasing `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sandwich {
    /// `sup_{0<τ<=t} f(τ) B(τ)`
    pub sup_fb: Vec<Ext>,
    /// `∫_0^t f b`
    pub int_fb: Vec<Ext>,
    /// `(∫_0^t f^p B^{p-1} b)^{1/p}`
    pub power: Vec<Ext>,
}

impl Sandwich {
    pub fn new(f: &GridFunction, b: &Weight, p: f64) -> Result<Self> {
        if f.cone() != Cone::NonIncreasing {
            return Err(Error::Usage("the sandwich compares non-increasing functions".into()));
        }
        let grid = f.grid().clone();
        let knots = grid.knots();
        let big_b = b.cumulative_weight(CumKind::Lower);
        let sup = PreparedOperator::new(&OperatorForm { outer: Outer::Sup, inner: Inner::Identity, u: big_b.clone() }, grid.clone())?;
        let steps = Steps::from_gridfn(f);
        let cumulative = |g: &Steps, m: &crate::weights::PieceMasses| {
            let mut acc = g.head * m.head;
            let mut out = vec![acc];
            for (s, w) in g.segs.iter().zip(&m.segs) {
                acc = acc + *s * *w;
                out.push(acc);
            }
            out
        };
        let pow_steps = Steps {
            head: steps.head.powf(p),
            segs: steps.segs.iter().map(|s| s.powf(p)).collect(),
            tail: steps.tail.powf(p),
        };
        let kernel = big_b.powf(p - 1.0).product(b);
        Ok(Self {
            sup_fb: sup.apply_outer(&steps).values,
            int_fb: cumulative(&steps, &b.masses(knots)),
            power: cumulative(&pow_steps, &kernel.masses(knots)).into_iter().map(|x| x.powf(1.0 / p)).collect(),
        })
    }
}
