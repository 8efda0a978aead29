//! Hardy, Copson, supremal and `T_{u,b}` operators on grid step functions.
//!
//! Inputs are exact step functions ([`Steps`]). Every operator returns its
//! exact values at the knots together with a step function that lies below
//! the true output everywhere on `(0, inf)`. Norms of those lower step
//! functions are therefore lower bounds for the norms of the true outputs.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gridfn::{Cone, Grid, GridFunction};
use crate::weights::{CumKind, Weight};
use crate::Ext;

/// A step function on a grid: `head` on `(0, x_0)`, `segs[i]` on
/// `(x_i, x_{i+1})`, `tail` on `(x_{N-1}, inf)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Steps {
    pub head: Ext,
    pub segs: Vec<Ext>,
    pub tail: Ext,
}

impl Steps {
    pub fn from_gridfn(f: &GridFunction) -> Self {
        Self {
            head: Ext::new(f.head()),
            segs: f.seg_values().into_iter().map(Ext::new).collect(),
            tail: Ext::new(f.tail()),
        }
    }

    /// `(∫ f^p w)^{1/p}` from the masses of `w` over the same grid.
    pub fn norm(&self, p: f64, masses: &crate::weights::PieceMasses) -> Ext {
        let mut acc = self.head.powf(p) * masses.head + self.tail.powf(p) * masses.tail;
        for (v, m) in self.segs.iter().zip(&masses.segs) {
            acc = acc + v.powf(p) * *m;
        }
        acc.powf(1.0 / p)
    }

    /// `ess sup f·w` from the suprema of `w` over the same grid.
    pub fn sup_norm(&self, sups: &crate::weights::PieceMasses) -> Ext {
        let mut acc = (self.head * sups.head).max(self.tail * sups.tail);
        for (v, s) in self.segs.iter().zip(&sups.segs) {
            acc = acc.max(*v * *s);
        }
        acc
    }
}

/// Outermost operator of a composition.
#[derive(Clone, Debug, PartialEq)]
pub enum Outer {
    /// `t -> ess sup_{0 < s <= t} u(s) g(s)`
    Sup,
    /// `t -> ess sup_{s >= t} u(s) g(s)`
    SupStar,
    /// `t -> sup_{s >= t} u(s)/B(s) ∫_0^s g b`
    Tub { b: Weight },
}

/// Operator applied to the input before the outer one.
#[derive(Clone, Debug, PartialEq)]
pub enum Inner {
    Identity,
    /// `∫_0^x h`
    Hardy,
    /// `∫_x^inf h`
    Copson,
    /// `V(x)^{-2} ∫_0^x h V` with the given `V`.
    HardyDamped(Weight),
    /// `V*(x)^{-2} ∫_x^inf h V*` with the given `V*`.
    CopsonDamped(Weight),
    /// `t -> ess sup_{0 < s <= t} u(s) f(s)` with the given `u`.
    Sup(Weight),
}

/// `outer_u(inner(f))`; for `Tub`, `u` is the numerator weight.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorForm {
    pub outer: Outer,
    pub inner: Inner,
    pub u: Weight,
}

/// Operator output: exact knot values and a lower step function.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorOutput {
    pub values: Vec<Ext>,
    pub lower: Steps,
    pub cone: Cone,
}

impl OperatorOutput {
    pub fn has_infinite(&self) -> bool {
        self.values.iter().any(|v| v.is_infinite())
    }

    /// Knot values as a cone element; `None` if any value is infinite.
    pub fn to_gridfn(&self, grid: &Arc<Grid>) -> Option<GridFunction> {
        if self.has_infinite() {
            return None;
        }
        let v = self.values.iter().map(|x| x.get()).collect();
        GridFunction::monotone(grid.clone(), v, self.cone).ok()
    }
}

fn monotone_lower(values: &[Ext], cone: Cone) -> Steps {
    let n = values.len();
    match cone {
        Cone::NonIncreasing => Steps { head: values[0], segs: values[1..].to_vec(), tail: Ext::zero() },
        _ => Steps { head: Ext::zero(), segs: values[..n - 1].to_vec(), tail: values[n - 1] },
    }
}

enum PreparedInner {
    Identity,
    Hardy,
    Copson,
    /// masses of `V`, `V(x_{i+1})^{-2}` per segment, `V(inf)^{-2}`, knot `V^{-2}`
    HardyDamped { masses: crate::weights::PieceMasses, seg_scale: Vec<Ext>, tail_scale: Ext, knot_scale: Vec<Ext> },
    CopsonDamped { masses: crate::weights::PieceMasses, seg_scale: Vec<Ext>, head_scale: Ext, knot_scale: Vec<Ext> },
    Sup(Box<PreparedOperator>),
}

enum PreparedOuter {
    /// per-segment sups of `u`, one-sided limits of `u` at segment ends
    Sup { head_sup: Ext, seg_sup: Vec<Ext>, tail_sup: Ext, left_end: Vec<Ext>, right_end: Vec<Ext>, at_zero: Ext, at_inf: Ext },
    /// `R = u/B` data and masses of `b`
    Tub { b_masses: crate::weights::PieceMasses, r_seg_sup: Vec<Ext>, r_knot: Vec<Ext>, r_tail_sup: Ext, r_at_inf: Ext, u_at_inf: Ext, b_total_infinite: bool },
}

/// An operator form with all weight data tabulated on a grid.
pub struct PreparedOperator {
    grid: Arc<Grid>,
    inner: PreparedInner,
    outer: PreparedOuter,
    star: bool,
}

impl PreparedOperator {
    pub fn new(form: &OperatorForm, grid: Arc<Grid>) -> Result<Self> {
        let k = grid.knots();
        let n = k.len();
        let inner = match &form.inner {
            Inner::Identity => PreparedInner::Identity,
            Inner::Hardy => PreparedInner::Hardy,
            Inner::Copson => PreparedInner::Copson,
            Inner::HardyDamped(big_v) => {
                let inv2 = |x: Ext| x.powf(-2.0);
                PreparedInner::HardyDamped {
                    masses: big_v.masses(k),
                    seg_scale: (0..n - 1).map(|i| inv2(big_v.eval(k[i + 1]))).collect(),
                    tail_scale: inv2(big_v.limit_at_infinity()),
                    knot_scale: k.iter().map(|&x| inv2(big_v.eval(x))).collect(),
                }
            }
            Inner::CopsonDamped(big_v) => {
                let inv2 = |x: Ext| x.powf(-2.0);
                PreparedInner::CopsonDamped {
                    masses: big_v.masses(k),
                    seg_scale: (0..n - 1).map(|i| inv2(big_v.eval(k[i]))).collect(),
                    head_scale: inv2(big_v.limit_at_zero()),
                    knot_scale: k.iter().map(|&x| inv2(big_v.eval(x))).collect(),
                }
            }
            Inner::Sup(u) => PreparedInner::Sup(Box::new(PreparedOperator::new(
                &plain(Outer::Sup, Inner::Identity, u.clone()),
                grid.clone(),
            )?)),
        };
        let u = &form.u;
        let (outer, star) = match &form.outer {
            Outer::Sup | Outer::SupStar => {
                let s = u.piece_sups(k);
                (
                    PreparedOuter::Sup {
                        head_sup: s.head,
                        seg_sup: s.segs,
                        tail_sup: s.tail,
                        left_end: k.iter().map(|&x| u.right_limit(x)).collect(),
                        right_end: k.iter().map(|&x| u.left_limit(x)).collect(),
                        at_zero: u.limit_at_zero(),
                        at_inf: u.limit_at_infinity(),
                    },
                    matches!(form.outer, Outer::SupStar),
                )
            }
            Outer::Tub { b } => {
                let (b0, b1) = (b.integrate(0.0, k[0]), b.integrate(0.0, k[n - 1]));
                if b0.is_zero() || b1.is_infinite() {
                    return Err(Error::Precondition("B(t) must lie in (0, inf) on the grid".into()));
                }
                let big_b = b.cumulative_weight(CumKind::Lower);
                let r = u.product(&big_b.recip());
                let rs = r.piece_sups(k);
                (
                    PreparedOuter::Tub {
                        b_masses: b.masses(k),
                        r_seg_sup: rs.segs,
                        r_knot: k.iter().map(|&x| r.eval(x)).collect(),
                        r_tail_sup: rs.tail,
                        r_at_inf: r.limit_at_infinity(),
                        u_at_inf: u.limit_at_infinity(),
                        b_total_infinite: b.integrate(k[n - 1], f64::INFINITY).is_infinite(),
                    },
                    true,
                )
            }
        };
        Ok(Self { grid, inner, outer, star })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Cone of the outer operator's output.
    pub fn output_cone(&self) -> Cone {
        if self.star {
            Cone::NonIncreasing
        } else {
            Cone::NonDecreasing
        }
    }

    /// Lower step function of the inner operator's output.
    pub fn apply_inner(&self, f: &Steps) -> Steps {
        let n = f.segs.len() + 1;
        let len = |i: usize| Ext::new(self.grid.knots()[i + 1] - self.grid.knots()[i]);
        match &self.inner {
            PreparedInner::Identity => f.clone(),
            PreparedInner::Hardy => {
                let mut v = Vec::with_capacity(n);
                let mut acc = f.head * Ext::new(self.grid.knots()[0]);
                v.push(acc);
                for i in 0..n - 1 {
                    acc = acc + f.segs[i] * len(i);
                    v.push(acc);
                }
                monotone_lower(&v, Cone::NonDecreasing)
            }
            PreparedInner::Copson => monotone_lower(&copson_values(f, &self.grid), Cone::NonIncreasing),
            PreparedInner::HardyDamped { masses, seg_scale, tail_scale, .. } => {
                let g = lower_cumulative(f, masses);
                Steps {
                    head: Ext::zero(),
                    segs: (0..n - 1).map(|i| g[i] * seg_scale[i]).collect(),
                    tail: g[n - 1] * *tail_scale,
                }
            }
            PreparedInner::CopsonDamped { masses, seg_scale, head_scale, .. } => {
                let g = upper_cumulative(f, masses);
                Steps {
                    head: g[0] * *head_scale,
                    segs: (0..n - 1).map(|i| g[i + 1] * seg_scale[i]).collect(),
                    tail: Ext::zero(),
                }
            }
            PreparedInner::Sup(op) => op.apply_outer(f).lower,
        }
    }

    /// Exact knot values of the inner operator's output.
    pub fn inner_knot_values(&self, f: &Steps) -> Vec<Ext> {
        let n = f.segs.len() + 1;
        match &self.inner {
            PreparedInner::Identity => {
                let mut v = f.segs.clone();
                v.push(f.tail);
                v
            }
            PreparedInner::Hardy => {
                let mut v = Vec::with_capacity(n);
                let k = self.grid.knots();
                let mut acc = f.head * Ext::new(k[0]);
                v.push(acc);
                for i in 0..n - 1 {
                    acc = acc + f.segs[i] * Ext::new(k[i + 1] - k[i]);
                    v.push(acc);
                }
                v
            }
            PreparedInner::Copson => copson_values(f, &self.grid),
            PreparedInner::HardyDamped { masses, knot_scale, .. } => {
                lower_cumulative(f, masses).into_iter().zip(knot_scale).map(|(g, s)| g * *s).collect()
            }
            PreparedInner::CopsonDamped { masses, knot_scale, .. } => {
                upper_cumulative(f, masses).into_iter().zip(knot_scale).map(|(g, s)| g * *s).collect()
            }
            PreparedInner::Sup(op) => op.apply_outer(f).values,
        }
    }

    /// Applies the outer operator to a lower step function `g`.
    pub fn apply_outer(&self, g: &Steps) -> OperatorOutput {
        let n = g.segs.len() + 1;
        match &self.outer {
            PreparedOuter::Sup { head_sup, seg_sup, tail_sup, left_end, right_end, at_zero, at_inf } => {
                if !self.star {
                    let mut values = Vec::with_capacity(n);
                    let mut acc = g.head * *head_sup;
                    values.push(acc);
                    for i in 0..n - 1 {
                        acc = acc.max(g.segs[i] * seg_sup[i]);
                        values.push(acc);
                    }
                    let lower = Steps {
                        head: g.head * *at_zero,
                        segs: (0..n - 1).map(|i| values[i].max(g.segs[i] * left_end[i])).collect(),
                        tail: values[n - 1].max(g.tail * left_end[n - 1]),
                    };
                    OperatorOutput { values, lower, cone: Cone::NonDecreasing }
                } else {
                    let mut values = vec![Ext::zero(); n];
                    let mut acc = g.tail * *tail_sup;
                    values[n - 1] = acc;
                    for i in (0..n - 1).rev() {
                        acc = acc.max(g.segs[i] * seg_sup[i]);
                        values[i] = acc;
                    }
                    let lower = Steps {
                        head: values[0].max(g.head * right_end[0]),
                        segs: (0..n - 1).map(|i| values[i + 1].max(g.segs[i] * right_end[i + 1])).collect(),
                        tail: g.tail * *at_inf,
                    };
                    OperatorOutput { values, lower, cone: Cone::NonIncreasing }
                }
            }
            PreparedOuter::Tub { b_masses, r_seg_sup, r_knot, r_tail_sup, r_at_inf, u_at_inf, b_total_infinite } => {
                let big_g = lower_cumulative(g, b_masses);
                let tail_growth = if *b_total_infinite { g.tail * *u_at_inf } else { Ext::zero() };
                let mut values = vec![Ext::zero(); n];
                let mut acc = (big_g[n - 1] * *r_tail_sup).max(tail_growth);
                values[n - 1] = acc.max(big_g[n - 1] * r_knot[n - 1]);
                for j in (0..n - 1).rev() {
                    acc = acc.max(r_seg_sup[j] * big_g[j]).max(r_knot[j + 1] * big_g[j + 1]);
                    values[j] = acc.max(r_knot[j] * big_g[j]);
                }
                let lower = Steps {
                    head: values[0],
                    segs: values[1..].to_vec(),
                    tail: (big_g[n - 1] * *r_at_inf).max(tail_growth),
                };
                OperatorOutput { values, lower, cone: Cone::NonIncreasing }
            }
        }
    }

    /// `outer(inner(f))` with the inner output taken as its lower step function.
    pub fn apply(&self, f: &Steps) -> OperatorOutput {
        self.apply_outer(&self.apply_inner(f))
    }
}

fn copson_values(f: &Steps, grid: &Grid) -> Vec<Ext> {
    let k = grid.knots();
    let n = k.len();
    let mut v = vec![Ext::zero(); n];
    let mut acc = if f.tail.is_zero() { Ext::zero() } else { Ext::infinity() };
    v[n - 1] = acc;
    for i in (0..n - 1).rev() {
        acc = acc + f.segs[i] * Ext::new(k[i + 1] - k[i]);
        v[i] = acc;
    }
    v
}

/// `∫_0^{x_k} f w` at every knot.
fn lower_cumulative(f: &Steps, m: &crate::weights::PieceMasses) -> Vec<Ext> {
    let mut v = Vec::with_capacity(f.segs.len() + 1);
    let mut acc = f.head * m.head;
    v.push(acc);
    for (s, w) in f.segs.iter().zip(&m.segs) {
        acc = acc + *s * *w;
        v.push(acc);
    }
    v
}

/// `∫_{x_k}^inf f w` at every knot.
fn upper_cumulative(f: &Steps, m: &crate::weights::PieceMasses) -> Vec<Ext> {
    let n = f.segs.len() + 1;
    let mut v = vec![Ext::zero(); n];
    let mut acc = f.tail * m.tail;
    v[n - 1] = acc;
    for i in (0..n - 1).rev() {
        acc = acc + f.segs[i] * m.segs[i];
        v[i] = acc;
    }
    v
}

fn plain(outer: Outer, inner: Inner, u: Weight) -> OperatorForm {
    OperatorForm { outer, inner, u }
}

fn monotone_output(values: Vec<Ext>, cone: Cone) -> OperatorOutput {
    let lower = monotone_lower(&values, cone);
    OperatorOutput { values, lower, cone }
}

/// `H f(t) = ∫_0^t f` at the knots.
pub fn hardy(f: &GridFunction) -> OperatorOutput {
    let prep = PreparedOperator::new(&plain(Outer::Sup, Inner::Hardy, Weight::one()), f.grid().clone())
        .expect("identity weights are valid");
    monotone_output(prep.inner_knot_values(&Steps::from_gridfn(f)), Cone::NonDecreasing)
}

/// `H* f(t) = ∫_t^inf f` at the knots; infinite when `f` has a positive tail.
pub fn copson(f: &GridFunction) -> OperatorOutput {
    let prep = PreparedOperator::new(&plain(Outer::SupStar, Inner::Copson, Weight::one()), f.grid().clone())
        .expect("identity weights are valid");
    monotone_output(prep.inner_knot_values(&Steps::from_gridfn(f)), Cone::NonIncreasing)
}

/// Which supremal operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupVariant {
    /// `S_u`, supremum over `(0, t]`.
    S,
    /// `S*_u`, supremum over `[t, inf)`.
    SStar,
}

/// `S_u g` or `S*_u g`.
pub fn sup_op(g: &GridFunction, variant: SupVariant, u: &Weight) -> OperatorOutput {
    let outer = match variant {
        SupVariant::S => Outer::Sup,
        SupVariant::SStar => Outer::SupStar,
    };
    let prep = PreparedOperator::new(&plain(outer, Inner::Identity, u.clone()), g.grid().clone())
        .expect("sup forms have no preconditions");
    prep.apply(&Steps::from_gridfn(g))
}

/// `T_{u,b} g(t) = sup_{s >= t} u(s)/B(s) ∫_0^s g b`.
pub fn t_ub(g: &GridFunction, u: &Weight, b: &Weight) -> Result<OperatorOutput> {
    let prep = PreparedOperator::new(&plain(Outer::Tub { b: b.clone() }, Inner::Identity, u.clone()), g.grid().clone())?;
    Ok(prep.apply(&Steps::from_gridfn(g)))
}

/// `T_γ = T_{u,1}` with `u(s) = s^γ`.
pub fn t_gamma(g: &GridFunction, gamma: f64) -> Result<OperatorOutput> {
    t_ub(g, &Weight::power(1.0, gamma), &Weight::one())
}
