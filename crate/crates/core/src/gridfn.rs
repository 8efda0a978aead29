//! Logarithmic grids, step functions on them, and weighted `L^p` functionals.
//!
//! A [`GridFunction`] is an exact step function on `(0, inf)`: a head value on
//! `(0, x_0)`, one value per segment `(x_i, x_{i+1})` and a tail value on
//! `(x_{N-1}, inf)`. The per-knot values are mapped to segments by a
//! [`SegmentRule`]. Norms are then computed from the exact masses of the
//! weight over each piece, so no quadrature error enters them.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Pareto};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::Weight;
use crate::Ext;

/// Default grid: `[1e-6, 1e6]` with 512 knots.
pub const DEFAULT_EPS: f64 = 1e-6;
pub const DEFAULT_M: f64 = 1e6;
pub const DEFAULT_N: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cone {
    NonIncreasing,
    NonDecreasing,
    #[serde(alias = "none")]
    Nonneg,
}

impl Cone {
    pub fn symbol(self) -> &'static str {
        match self {
            Cone::NonIncreasing => "down",
            Cone::NonDecreasing => "up",
            Cone::Nonneg => "nonneg",
        }
    }
}

/// How per-knot values are assigned to segments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentRule {
    /// `(x_i, x_{i+1})` takes `f_i`.
    Left,
    /// `(x_i, x_{i+1})` takes `f_{i+1}`.
    Right,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid {
    eps: f64,
    m: f64,
    knots: Vec<f64>,
}

/// `n` log-spaced knots from `eps` to `m`, both endpoints exact.
pub fn make_log_grid(eps: f64, m: f64, n: usize) -> Result<Grid> {
    if !(eps > 0.0 && m.is_finite() && eps < m) {
        return Err(Error::Config(format!("grid needs 0 < eps < M < inf, got eps={eps}, M={m}")));
    }
    if n < 2 {
        return Err(Error::Config(format!("grid needs at least 2 knots, got {n}")));
    }
    let (a, b) = (eps.ln(), m.ln());
    let mut knots: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    knots[0] = eps;
    knots[n - 1] = m;
    Ok(Grid { eps, m, knots })
}

impl Grid {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn segments(&self) -> usize {
        self.knots.len() - 1
    }
}

/// A nonnegative step function on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
    cone: Cone,
    rule: SegmentRule,
    head: f64,
    tail: f64,
}

impl GridFunction {
    /// A cone element with the canonical policies: non-increasing functions
    /// take right endpoint values, head `f_0` and tail 0; non-decreasing ones
    /// take left endpoint values, head 0 and tail `f_{N-1}`.
    pub fn monotone(grid: Arc<Grid>, values: Vec<f64>, cone: Cone) -> Result<Self> {
        check_values(&grid, &values)?;
        let n = values.len();
        let ok = match cone {
            Cone::NonIncreasing => values.windows(2).all(|w| w[0] >= w[1]),
            Cone::NonDecreasing => values.windows(2).all(|w| w[0] <= w[1]),
            Cone::Nonneg => true,
        };
        if !ok {
            return Err(Error::Precondition(format!("values are not in the {} cone", cone.symbol())));
        }
        let (rule, head, tail) = match cone {
            Cone::NonIncreasing => (SegmentRule::Right, values[0], 0.0),
            Cone::NonDecreasing => (SegmentRule::Left, 0.0, values[n - 1]),
            Cone::Nonneg => (SegmentRule::Left, 0.0, 0.0),
        };
        Ok(Self { grid, values, cone, rule, head, tail })
    }

    /// A step function with explicit policies.
    pub fn with_policies(grid: Arc<Grid>, values: Vec<f64>, rule: SegmentRule, head: f64, tail: f64) -> Result<Self> {
        check_values(&grid, &values)?;
        if !(head >= 0.0 && head.is_finite() && tail >= 0.0 && tail.is_finite()) {
            return Err(Error::Precondition("head and tail must be finite and nonnegative".into()));
        }
        Ok(Self { grid, values, cone: Cone::Nonneg, rule, head, tail })
    }

    /// The segment values `h_i` of a function on all of `(0, inf)` that is
    /// zero outside `[eps, M]`; there are `N - 1` of them.
    pub fn from_segments(grid: Arc<Grid>, segs: &[f64]) -> Result<Self> {
        if segs.len() != grid.segments() {
            return Err(Error::Precondition(format!("{} segment values for {} segments", segs.len(), grid.segments())));
        }
        let mut values = segs.to_vec();
        values.push(0.0);
        Self::with_policies(grid, values, SegmentRule::Left, 0.0, 0.0)
    }

    /// `like` with its values replaced, before projection onto the cone.
    pub(crate) fn with_cone_values(like: &GridFunction, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), like.values.len());
        Self { values, ..like.clone() }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cone(&self) -> Cone {
        self.cone
    }

    pub fn rule(&self) -> SegmentRule {
        self.rule
    }

    pub fn head(&self) -> f64 {
        self.head
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Value on segment `i`.
    pub fn seg(&self, i: usize) -> f64 {
        match self.rule {
            SegmentRule::Left => self.values[i],
            SegmentRule::Right => self.values[i + 1],
        }
    }

    pub fn seg_values(&self) -> Vec<f64> {
        (0..self.grid.segments()).map(|i| self.seg(i)).collect()
    }

    /// Value at `t`, away from the knots.
    pub fn eval(&self, t: f64) -> f64 {
        let k = self.grid.knots();
        if t < k[0] {
            self.head
        } else if t > k[k.len() - 1] {
            self.tail
        } else {
            let i = k.partition_point(|&x| x <= t).clamp(1, k.len() - 1) - 1;
            self.seg(i)
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        out.head *= s;
        out.tail *= s;
        out
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(self.head.max(self.tail), f64::max)
    }
}

fn check_values(grid: &Grid, values: &[f64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::Precondition(format!("{} values for {} knots", values.len(), grid.len())));
    }
    if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::Precondition("values must be finite and nonnegative".into()));
    }
    Ok(())
}

/// `‖f‖_{p,w} = (∫ f^p w)^{1/p}`, or `ess sup f·w` for `p = inf`.
pub fn weighted_norm(f: &GridFunction, p: f64, w: &Weight) -> Ext {
    let knots = f.grid.knots();
    if p.is_infinite() {
        let s = w.piece_sups(knots);
        let mut acc = Ext::new(f.head) * s.head;
        for (i, m) in s.segs.iter().enumerate() {
            acc = acc.max(Ext::new(f.seg(i)) * *m);
        }
        return acc.max(Ext::new(f.tail) * s.tail);
    }
    let masses = w.masses(knots);
    norm_from_masses(f, p, &masses)
}

/// Same as [`weighted_norm`] with precomputed masses of `w` over the grid.
pub fn norm_from_masses(f: &GridFunction, p: f64, masses: &crate::weights::PieceMasses) -> Ext {
    let pow = |x: f64| Ext::new(x).powf(p);
    let mut acc = pow(f.head) * masses.head + pow(f.tail) * masses.tail;
    for (i, m) in masses.segs.iter().enumerate() {
        acc = acc + pow(f.seg(i)) * *m;
    }
    acc.powf(1.0 / p)
}

/// Random monotone function: i.i.d. increments mixing zeros, exponential and
/// Pareto draws, cumulated in the cone's direction and scaled to max 1.
pub fn sample_monotone(cone: Cone, grid: &Arc<Grid>, seed: u64) -> Result<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pareto = Pareto::new(1.0, 1.2).expect("valid Pareto parameters");
    let n = grid.len();
    let incs: Vec<f64> = (0..n)
        .map(|_| {
            let r: f64 = rng.gen();
            if r < 0.4 {
                0.0
            } else if r < 0.7 {
                Exp1.sample(&mut rng)
            } else {
                pareto.sample(&mut rng)
            }
        })
        .collect();
    let mut values = vec![0.0; n];
    match cone {
        Cone::NonIncreasing => {
            let mut acc = 0.0;
            for i in (0..n).rev() {
                acc += incs[i];
                values[i] = acc;
            }
        }
        Cone::NonDecreasing => {
            let mut acc = 0.0;
            for i in 0..n {
                acc += incs[i];
                values[i] = acc;
            }
        }
        Cone::Nonneg => values.copy_from_slice(&incs),
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        for v in &mut values {
            *v /= max;
        }
    } else {
        values[0] = 1.0;
        if cone == Cone::NonDecreasing {
            values.iter_mut().for_each(|v| *v = 1.0);
        }
    }
    GridFunction::monotone(grid.clone(), values, cone)
}

/// Least majorant in the cone: running max from the right for
/// non-increasing, from the left for non-decreasing.
pub fn project_cone(f: &GridFunction, cone: Cone) -> GridFunction {
    let mut values = f.values.clone();
    match cone {
        Cone::NonIncreasing => {
            for i in (0..values.len().saturating_sub(1)).rev() {
                values[i] = values[i].max(values[i + 1]);
            }
        }
        Cone::NonDecreasing => {
            for i in 1..values.len() {
                values[i] = values[i].max(values[i - 1]);
            }
        }
        Cone::Nonneg => return f.clone(),
    }
    GridFunction::monotone(f.grid.clone(), values, cone).expect("projection lands in the cone")
}

#[derive(Serialize)]
struct FlatRecord<'a> {
    knots: &'a [f64],
    values: &'a [f64],
    cone: Cone,
    rule: SegmentRule,
    head: f64,
    tail: f64,
}

impl Serialize for GridFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FlatRecord {
            knots: self.grid.knots(),
            values: &self.values,
            cone: self.cone,
            rule: self.rule,
            head: self.head,
            tail: self.tail,
        }
        .serialize(s)
    }
}
