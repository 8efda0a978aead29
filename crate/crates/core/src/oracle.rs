//! Brute-force lower bounds for the best constant of an inequality.
//!
//! Every candidate `f` gives the certified lower bound
//! `‖T f‖_{q,w} / ‖f‖_{p,v}`: the numerator is the norm of a step function
//! lying below `T f`, the denominator is exact.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::CriterionResult;
use crate::error::{Error, Result};
use crate::gridfn::{project_cone, sample_monotone, weighted_norm, Cone, Grid, GridFunction};
use crate::operators::{PreparedOperator, Steps};
use crate::spec::{apply_spec, InequalitySpec};
use crate::weights::{CumKind, PieceMasses, Weight};
use crate::Ext;

mod threeway;
pub use threeway::{verify_three_way, Sandwich, ThreeWay, ThreeWayReport};

/// Work limits of [`best_constant_lower`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Knots used as level-set cut points.
    pub n_char: usize,
    /// Random cone elements.
    pub n_random: usize,
    /// Coordinate-ascent sweeps.
    pub n_ascent: usize,
}

impl Budget {
    /// Every knot, 200 random functions, 50 sweeps.
    pub fn for_grid(grid: &Grid) -> Self {
        Self { n_char: grid.len(), n_random: 200, n_ascent: 50 }
    }
}

/// Best ratio after each stage; non-decreasing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Trace {
    pub characteristic: Ext,
    pub random: Ext,
    pub ascent: Ext,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub lower_bound: Ext,
    pub witness: GridFunction,
    pub trace: Trace,
    /// Level-set ratios grow like a power into a grid boundary.
    pub divergence_flag: bool,
}

impl OracleResult {
    /// `+inf` when divergence was detected, the lower bound otherwise.
    pub fn effective(&self) -> Ext {
        if self.divergence_flag {
            Ext::infinity()
        } else {
            self.lower_bound
        }
    }
}

/// `‖T f‖_{q,w} / ‖f‖_{p,v}` for one cone element, with the norm weight of
/// `spec` on the right.
pub fn rayleigh_ratio(spec: &InequalitySpec, f: &GridFunction) -> Result<Ext> {
    let out = apply_spec(spec, f)?;
    let (p, q) = (spec.exponents.p, spec.exponents.q);
    let knots = f.grid().knots();
    let num = if q.is_infinite() { out.lower.sup_norm(&spec.w.piece_sups(knots)) } else { out.lower.norm(q, &spec.w.masses(knots)) };
    Ok(num / weighted_norm(f, p, &spec.norm_weight()))
}

/// Rayleigh quotients on one grid with all weight data tabulated.
struct Quotient {
    grid: Arc<Grid>,
    cone: Cone,
    op: PreparedOperator,
    p: f64,
    q: f64,
    w: PieceMasses,
    v: PieceMasses,
}

impl Quotient {
    fn new(spec: &InequalitySpec, grid: Arc<Grid>) -> Result<Self> {
        let (p, q) = (spec.exponents.p, spec.exponents.q);
        let knots = grid.knots();
        let w = if q.is_infinite() { spec.w.piece_sups(knots) } else { spec.w.masses(knots) };
        let nw = spec.norm_weight();
        let v = if p.is_infinite() { nw.piece_sups(knots) } else { nw.masses(knots) };
        Ok(Self { op: spec.prepare(grid.clone())?, grid, cone: spec.cone, p, q, w, v })
    }

    fn gridfn(&self, values: Vec<f64>) -> GridFunction {
        GridFunction::monotone(self.grid.clone(), values, self.cone).expect("candidates stay in the cone")
    }

    fn ratio(&self, f: &GridFunction) -> Ext {
        let (num, den) = self.parts(f);
        num / den
    }

    fn parts(&self, f: &GridFunction) -> (Ext, Ext) {
        let steps = Steps::from_gridfn(f);
        let out = self.op.apply(&steps);
        let num = if self.q.is_infinite() { out.lower.sup_norm(&self.w) } else { out.lower.norm(self.q, &self.w) };
        let den = if self.p.is_infinite() { steps.sup_norm(&self.v) } else { steps.norm(self.p, &self.v) };
        (num, den)
    }

    /// Level-set test functions cut at knot `k`.
    fn characteristic(&self, k: usize) -> Vec<GridFunction> {
        let n = self.grid.len();
        let step = |lo: usize, hi: usize| self.gridfn((0..n).map(|i| if (lo..hi).contains(&i) { 1.0 } else { 0.0 }).collect());
        match self.cone {
            Cone::NonIncreasing => vec![step(0, k + 1)],
            Cone::NonDecreasing => vec![step(k, n)],
            // left rule: value i lives on (x_i, x_{i+1}); the last value is unused
            Cone::Nonneg if k + 1 < n => vec![step(k, k + 1), step(0, k + 1), step(k, n - 1)],
            Cone::Nonneg => vec![],
        }
    }

    /// Ratios of the level-set family members at knot `k`.
    fn scan_at(&self, k: usize) -> Vec<(Ext, GridFunction)> {
        self.characteristic(k).into_iter().map(|f| (self.ratio(&f), f)).collect()
    }
}

/// Knot indices with every prefix spread over the grid: the two ends first,
/// then successive bisections.
fn spread_order(n: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut push = |i: usize, order: &mut Vec<usize>| {
        if !seen[i] {
            seen[i] = true;
            order.push(i);
        }
    };
    push(0, &mut order);
    push(n - 1, &mut order);
    let mut parts = 2usize;
    while order.len() < n {
        for j in 1..parts {
            push(j * (n - 1) / parts, &mut order);
        }
        parts *= 2;
    }
    order
}

const BOUNDARY_KNOTS: usize = 8;
const GROWTH_EXPONENT: f64 = 0.05;
const MIN_R2: f64 = 0.99;

/// Whether `ratios` (ordered toward the boundary at abscissae `x`) grow
/// monotonically like a power of `x` with exponent above the threshold.
fn grows_into_boundary(x: &[f64], ratios: &[Ext]) -> bool {
    if ratios.iter().any(|r| r.is_infinite()) {
        return true;
    }
    if ratios.iter().any(|r| r.is_zero()) || ratios.windows(2).any(|w| w[1] < w[0]) {
        return false;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ratios.iter().map(|r| r.get().ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = ly.iter().map(|b| (b - my).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return false;
    }
    let slope = sxy / sxx;
    let r2 = sxy * sxy / (sxx * syy);
    // growth measured along the direction of travel
    let growth = if x[x.len() - 1] < x[0] { -slope } else { slope };
    growth > GROWTH_EXPONENT && r2 > MIN_R2
}

fn seed_for(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Lower bound for the best constant of `spec` on its cone over `grid`.
pub fn best_constant_lower(spec: &InequalitySpec, grid: Arc<Grid>, budget: Budget, seed: u64) -> Result<OracleResult> {
    if budget.n_char == 0 && budget.n_random == 0 && budget.n_ascent == 0 {
        return Err(Error::Config("oracle budget is zero".into()));
    }
    if budget.n_char == 0 {
        return Err(Error::Config("oracle budget needs n_char >= 1".into()));
    }
    let qt = Quotient::new(spec, grid.clone())?;
    let n = grid.len();
    let knots = grid.knots();

    let mut cuts: Vec<usize> = spread_order(n).into_iter().take(budget.n_char).collect();
    // nonneg level sets need a cell to the right of the cut
    let top = if spec.cone == Cone::Nonneg { n - 1 } else { n };
    let ends: Vec<usize> = (0..BOUNDARY_KNOTS.min(top)).chain(top.saturating_sub(BOUNDARY_KNOTS)..top).collect();
    for k in ends {
        if !cuts.contains(&k) {
            cuts.push(k);
        }
    }
    let scanned: Vec<(usize, Vec<(Ext, GridFunction)>)> = cuts.par_iter().map(|&k| (k, qt.scan_at(k))).collect();

    // each family is tested on its own: their maxima can cross near an end
    let families = if spec.cone == Cone::Nonneg { 3 } else { 1 };
    let window = |idx: &mut dyn Iterator<Item = usize>, fam: usize| {
        let (mut x, mut r) = (Vec::new(), Vec::new());
        for k in idx.take(top / 2) {
            let Some(f) = qt.characteristic(k).into_iter().nth(fam) else { continue };
            let (num, den) = qt.parts(&f);
            // both norms underflowed: nothing is known at this knot
            if num.is_zero() && den.is_zero() {
                continue;
            }
            x.push(knots[k]);
            r.push(num / den);
            if x.len() == BOUNDARY_KNOTS {
                break;
            }
        }
        x.reverse();
        r.reverse();
        x.len() >= 3 && grows_into_boundary(&x, &r)
    };
    let divergence_flag = (0..families).any(|fam| window(&mut (0..top), fam) || window(&mut (0..top).rev(), fam));

    let mut best = Ext::zero();
    let mut witness: Option<GridFunction> = None;
    for (r, f) in scanned.into_iter().flat_map(|s| s.1) {
        if r > best || witness.is_none() {
            best = r;
            witness = Some(f);
        }
    }
    let mut witness = witness.unwrap_or_else(|| qt.gridfn(vec![1.0; n]));
    let characteristic = best;

    for i in 0..budget.n_random {
        let f = sample_monotone(spec.cone, &grid, seed_for(seed, i))?;
        let r = qt.ratio(&f);
        if r > best {
            best = r;
            witness = f;
        }
    }
    let random = best;

    if best.is_finite() {
        const STEPS: [f64; 4] = [2.0, 0.5, 1.1, 1.0 / 1.1];
        for _ in 0..budget.n_ascent {
            let mut improved = false;
            for i in 0..n {
                for s in STEPS {
                    let mut values = witness.values().to_vec();
                    values[i] *= s;
                    let f = project_cone(&GridFunction::with_cone_values(&witness, values), spec.cone);
                    let r = qt.ratio(&f);
                    if r > best {
                        best = r;
                        witness = f;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
    let trace = Trace { characteristic, random, ascent: best };
    Ok(OracleResult { lower_bound: best, witness, trace, divergence_flag })
}

/// `sup_t (∫_0^t g)·(∫_0^t v)^{-1/p}`, including the limits at 0 and
/// infinity. For `p <= 1` this is the best constant of
/// `∫ f g <= c (∫ f^p v)^{1/p}` over non-increasing `f`.
pub fn down_dual_constant(g: &Weight, v: &Weight, p: f64) -> Result<Ext> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Usage(format!("down_dual_constant needs 0 < p <= 1, got {p}")));
    }
    let big_g = g.cumulative_weight(CumKind::Lower);
    let big_v = v.cumulative_weight(CumKind::Lower);
    let h = big_g.product(&big_v.powf(-1.0 / p));
    Ok(h.sup_on(0.0, f64::INFINITY).max(h.limit_at_zero()).max(h.limit_at_infinity()))
}

/// Extra factor on the upper band edge for discretization bias.
pub const SAFETY: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    InconsistentFiniteness,
    RatioOutOfBand,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub id: String,
    pub criterion: CriterionResult,
    pub oracle: OracleResult,
    /// criterion total over oracle lower bound
    pub ratio: Ext,
    pub verdict: Verdict,
}

/// Compares a criterion with an oracle bound: consistent when both are
/// infinite, or both finite with `1/band <= ratio <= band·SAFETY`.
pub fn equivalence_report(id: &str, criterion: CriterionResult, oracle: OracleResult, band: f64) -> Result<EquivalenceReport> {
    if !(band > 1.0) {
        return Err(Error::Config(format!("band must exceed 1, got {band}")));
    }
    let (c, o) = (criterion.total, oracle.effective());
    let ratio = c / oracle.lower_bound;
    let verdict = match (c.is_infinite(), o.is_infinite()) {
        (true, true) => Verdict::Consistent,
        (true, false) | (false, true) => Verdict::InconsistentFiniteness,
        (false, false) => {
            let r = ratio.get();
            if r.is_finite() && r >= 1.0 / band && r <= band * SAFETY {
                Verdict::Consistent
            } else {
                Verdict::RatioOutOfBand
            }
        }
    };
    Ok(EquivalenceReport { id: id.into(), criterion, oracle, ratio, verdict })
}

#[cfg(test)]
mod tests;
