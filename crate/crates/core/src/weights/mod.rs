//! Weights on `(0, inf)` and the transforms the criteria are built from.
//!
//! Every weight is stored as a piecewise function whose pieces are
//! `c · t^alpha · exp(-lambda·t - mu/t)`. Power, power-exponential,
//! piecewise-power and log-linearly interpolated tables all land in this
//! representation exactly, and it stays closed under products, powers,
//! inversion of the variable and running suprema.

mod literal;
mod piece;

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::ExtNonneg;

pub use literal::WeightLiteral;
pub use piece::Piece;

type Ext = ExtNonneg<f64>;

/// Which primitive of a weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CumKind {
    /// `∫_0^t w`
    Lower,
    /// `∫_t^inf w`
    Upper,
}

/// Direction of a running supremum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupDirection {
    /// `sup_{0 < s <= t}`, the non-decreasing envelope.
    UpToT,
    /// `sup_{t <= s < inf}`, the non-increasing envelope.
    FromT,
}

/// Masses of a weight over the pieces of a knot sequence `x_0 < ... < x_{n-1}`:
/// `(0, x_0)`, the `n - 1` segments, and `(x_{n-1}, inf)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PieceMasses {
    pub head: Ext,
    pub segs: Vec<Ext>,
    pub tail: Ext,
}

impl PieceMasses {
    pub fn total(&self) -> Ext {
        self.head + self.segs.iter().copied().sum::<Ext>() + self.tail
    }
}

/// A nonnegative weight on `(0, inf)`.
#[derive(Clone, PartialEq)]
pub struct Weight {
    knots: Vec<f64>,
    pieces: Vec<Piece>,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.knots.is_empty() {
            let p = self.pieces[0];
            write!(f, "Weight({}·t^{}·e^(-{}t-{}/t))", p.c, p.alpha, p.lambda, p.mu)
        } else {
            write!(f, "Weight({} pieces)", self.pieces.len())
        }
    }
}

const SAMPLE_LO: f64 = 1e-12;
const SAMPLE_HI: f64 = 1e12;
const SAMPLES_PER_DECADE: usize = 64;
const SLOPE_SNAP: f64 = 1e-6;

impl Weight {
    pub fn from_piece(p: Piece) -> Self {
        Self { knots: Vec::new(), pieces: vec![p] }
    }

    /// Builds a piecewise weight; `pieces.len()` must be `knots.len() + 1`.
    pub fn piecewise(knots: Vec<f64>, pieces: Vec<Piece>) -> Result<Self> {
        if pieces.len() != knots.len() + 1 {
            return Err(Error::Config(format!(
                "piecewise weight needs {} segments for {} knots, got {}",
                knots.len() + 1,
                knots.len(),
                pieces.len()
            )));
        }
        if knots.iter().any(|&k| !(k > 0.0 && k.is_finite())) || knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("knots must be positive, finite and strictly increasing".into()));
        }
        if pieces.iter().any(|p| p.c.is_nan() || p.c < 0.0 || !p.alpha.is_finite() || !p.lambda.is_finite() || !p.mu.is_finite()) {
            return Err(Error::Config("weight pieces must have c >= 0 and finite exponents".into()));
        }
        Ok(Self { knots, pieces }.simplified())
    }

    pub fn power(c: f64, alpha: f64) -> Self {
        Self::from_piece(Piece::power(c, alpha))
    }

    /// `c · t^alpha · exp(-lambda·t)`; `lambda` may be negative.
    pub fn power_exp(c: f64, alpha: f64, lambda: f64) -> Self {
        Self::from_piece(Piece { c, alpha, lambda, mu: 0.0 })
    }

    pub fn one() -> Self {
        Self::power(1.0, 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::power(c, 0.0)
    }

    /// Log-linear interpolation of `(t_i, y_i)`, extended past both ends by
    /// the power law of the nearest segment. A segment touching a zero
    /// sample is zero.
    pub fn from_table(t: &[f64], y: &[f64]) -> Result<Self> {
        if t.len() != y.len() || t.is_empty() {
            return Err(Error::Config("table needs equally many t and y values (at least one)".into()));
        }
        if t.iter().any(|&x| !(x > 0.0 && x.is_finite())) || t.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("table t values must be positive and strictly increasing".into()));
        }
        if y.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::Config("table y values must be finite and nonnegative".into()));
        }
        if t.len() == 1 {
            return Ok(Self::constant(y[0]));
        }
        Self::piecewise(t.to_vec(), table_pieces(t, y))
    }

    /// Samples `f` on a fixed logarithmic table over `[1e-12, 1e12]`. Each
    /// segment is fitted by `c · t^alpha · exp(-lambda·t)` through its
    /// endpoints and geometric midpoint; outside the table the end segments
    /// continue as power laws.
    pub fn sampled<F: Fn(f64) -> Ext>(f: F) -> Weight {
        let t = sample_knots();
        let y: Vec<Ext> = t.iter().map(|&x| f(x)).collect();
        Self::fitted(&t, &y)
    }

    /// `t` holds knots at even and midpoints at odd positions.
    fn fitted_raw(t: &[f64], y: &[Ext]) -> Weight {
        let knots: Vec<f64> = t.iter().step_by(2).copied().collect();
        let ends: Vec<Ext> = y.iter().step_by(2).copied().collect();
        let n = knots.len();
        let mut pieces = Vec::with_capacity(n + 1);
        pieces.push(log_linear(&knots[..2], &ends[..2], true));
        for i in 0..n - 1 {
            let (ts, ys) = (&t[2 * i..2 * i + 3], &y[2 * i..2 * i + 3]);
            let fit = if ys.iter().any(|v| v.is_infinite()) {
                Some(Piece::constant(f64::INFINITY))
            } else {
                fit_three(ts, &ys.iter().map(|v| v.get()).collect::<Vec<_>>())
            };
            pieces.push(fit.unwrap_or_else(|| log_linear(&knots[i..i + 2], &ends[i..i + 2], false)));
        }
        pieces.push(log_linear(&knots[n - 2..], &ends[n - 2..], true));
        Weight { knots, pieces }
    }

    fn fitted(t: &[f64], y: &[Ext]) -> Weight {
        Self::fitted_raw(t, y).simplified()
    }

    /// Replaces the extrapolating end pieces where a shape is known.
    fn with_ends(mut self, head: Option<Piece>, tail: Option<Piece>) -> Weight {
        if let Some(h) = head {
            self.pieces[0] = h;
        }
        if let Some(t) = tail {
            let n = self.pieces.len();
            self.pieces[n - 1] = t;
        }
        self
    }

    /// Pointwise sum; exact where both summands have pieces of one shape,
    /// sampled otherwise.
    pub fn add(&self, other: &Weight) -> Weight {
        let knots = self.merged_knots(other);
        let pieces: Option<Vec<Piece>> = (0..=knots.len())
            .map(|i| {
                let t = Self::representative(&knots, i);
                let (a, b) = (self.piece_at(t), other.piece_at(t));
                if a.is_zero() {
                    Some(*b)
                } else if b.is_zero() {
                    Some(*a)
                } else if a.c.is_infinite() || b.c.is_infinite() {
                    Some(Piece::constant(f64::INFINITY))
                } else if (a.alpha, a.lambda, a.mu) == (b.alpha, b.lambda, b.mu) {
                    Some(Piece { c: a.c + b.c, ..*a })
                } else {
                    None
                }
            })
            .collect();
        match pieces {
            Some(pieces) => Weight { knots, pieces }.simplified(),
            None => {
                let t = sample_knots();
                let y: Vec<Ext> = t.iter().map(|&x| self.eval(x) + other.eval(x)).collect();
                let (a, b) = (self.pieces[self.pieces.len() - 1], other.pieces[other.pieces.len() - 1]);
                let dom_tail = dominant_at_infinity(&a, &b);
                let dom_head = dominant_at_zero(&self.pieces[0], &other.pieces[0]);
                let head = dom_head.and_then(|p| p.anchored(t[0], y[0]));
                let tail = dom_tail.and_then(|p| p.anchored(t[t.len() - 1], y[y.len() - 1]));
                Weight::fitted_raw(&t, &y).with_ends(head, tail).with_lost_ends(&t, &y, dom_head, dom_tail).simplified()
            }
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// The single piece when the weight has no knots.
    pub fn as_single(&self) -> Option<&Piece> {
        if self.knots.is_empty() {
            self.pieces.first()
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_single().is_some_and(|p| *p == Piece::constant(1.0))
    }

    fn piece_at(&self, t: f64) -> &Piece {
        &self.pieces[self.knots.partition_point(|&k| k < t)]
    }

    fn bounds(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { 0.0 } else { self.knots[i - 1] };
        let hi = if i == self.knots.len() { f64::INFINITY } else { self.knots[i] };
        (lo, hi)
    }

    /// Value at `t > 0`.
    pub fn eval(&self, t: f64) -> Ext {
        self.piece_at(t).eval(t)
    }

    /// `lim_{s -> t+}`; `t = 0` gives the limit at zero.
    pub fn right_limit(&self, t: f64) -> Ext {
        self.pieces[self.knots.partition_point(|&k| k <= t)].value_or_limit(t)
    }

    /// `lim_{s -> t-}`; `t = inf` gives the limit at infinity.
    pub fn left_limit(&self, t: f64) -> Ext {
        self.pieces[self.knots.partition_point(|&k| k < t)].value_or_limit(t)
    }

    pub fn limit_at_zero(&self) -> Ext {
        self.pieces[0].limit_at_zero()
    }

    pub fn limit_at_infinity(&self) -> Ext {
        self.pieces[self.pieces.len() - 1].limit_at_infinity()
    }

    fn overlapping(&self, lo: f64, hi: f64) -> impl Iterator<Item = (&Piece, f64, f64)> + '_ {
        let start = self.knots.partition_point(|&k| k <= lo);
        (start..self.pieces.len()).map_while(move |i| {
            let (a, b) = self.bounds(i);
            if a >= hi {
                return None;
            }
            let (a, b) = (a.max(lo), b.min(hi));
            Some((&self.pieces[i], a, b))
        })
        .filter(|(_, a, b)| b > a)
    }

    /// `∫_lo^hi w` with `0 <= lo <= hi <= inf`.
    pub fn integrate(&self, lo: f64, hi: f64) -> Ext {
        self.overlapping(lo, hi).map(|(p, a, b)| p.integrate(a, b)).sum()
    }

    /// `∫_0^t w` or `∫_t^inf w`.
    pub fn cumulative(&self, kind: CumKind, t: f64) -> Ext {
        match kind {
            CumKind::Lower => self.integrate(0.0, t),
            CumKind::Upper => self.integrate(t, f64::INFINITY),
        }
    }

    /// Essential supremum over `(lo, hi)`.
    pub fn sup_on(&self, lo: f64, hi: f64) -> Ext {
        self.overlapping(lo, hi).map(|(p, a, b)| p.sup_on(a, b)).fold(Ext::zero(), Ext::max)
    }

    /// Essential infimum over `(lo, hi)`.
    pub fn inf_on(&self, lo: f64, hi: f64) -> Ext {
        self.overlapping(lo, hi).map(|(p, a, b)| p.inf_on(a, b)).fold(Ext::infinity(), Ext::min)
    }

    /// Masses over the pieces of `knots` (see [`PieceMasses`]).
    pub fn masses(&self, knots: &[f64]) -> PieceMasses {
        let n = knots.len();
        PieceMasses {
            head: self.integrate(0.0, knots[0]),
            segs: (0..n - 1).map(|i| self.integrate(knots[i], knots[i + 1])).collect(),
            tail: self.integrate(knots[n - 1], f64::INFINITY),
        }
    }

    /// Suprema over the pieces of `knots`.
    pub fn piece_sups(&self, knots: &[f64]) -> PieceMasses {
        let n = knots.len();
        PieceMasses {
            head: self.sup_on(0.0, knots[0]),
            segs: (0..n - 1).map(|i| self.sup_on(knots[i], knots[i + 1])).collect(),
            tail: self.sup_on(knots[n - 1], f64::INFINITY),
        }
    }

    fn merged_knots(&self, other: &Weight) -> Vec<f64> {
        let mut k: Vec<f64> = self.knots.iter().chain(other.knots.iter()).copied().collect();
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }

    fn representative(knots: &[f64], i: usize) -> f64 {
        match (i, knots.len()) {
            (_, 0) => 1.0,
            (0, _) => knots[0] / 2.0,
            (i, n) if i == n => knots[n - 1] * 2.0,
            (i, _) => (knots[i - 1] * knots[i]).sqrt(),
        }
    }

    pub fn product(&self, other: &Weight) -> Weight {
        let knots = self.merged_knots(other);
        let pieces = (0..=knots.len())
            .map(|i| {
                let t = Self::representative(&knots, i);
                self.piece_at(t).mul(other.piece_at(t))
            })
            .collect();
        Weight { knots, pieces }.simplified()
    }

    pub fn powf(&self, s: f64) -> Weight {
        Weight { knots: self.knots.clone(), pieces: self.pieces.iter().map(|p| p.powf(s)).collect() }.simplified()
    }

    pub fn scale(&self, k: f64) -> Weight {
        self.product(&Weight::constant(k))
    }

    pub fn recip(&self) -> Weight {
        self.powf(-1.0)
    }

    /// `t -> w(1/t) · (1/t^2)^jacobian_exponent`.
    pub fn dual_substitute(&self, jacobian_exponent: f64) -> Weight {
        let knots = self.knots.iter().rev().map(|k| 1.0 / k).collect();
        let pieces = self.pieces.iter().rev().map(|p| p.dual(jacobian_exponent)).collect();
        Weight { knots, pieces }.simplified()
    }

    /// Running supremum envelope: `sup_{0<s<=t} w(s)` or `sup_{t<=s<inf} w(s)`.
    pub fn running_sup(&self, direction: SupDirection) -> Weight {
        match direction {
            SupDirection::UpToT => self.envelope_up(),
            SupDirection::FromT => self.dual_substitute(0.0).envelope_up().dual_substitute(0.0),
        }
    }

    /// Whether the weight is `+inf` everywhere.
    pub fn is_everywhere_infinite(&self) -> bool {
        self.pieces.iter().all(|p| p.c.is_infinite())
    }

    fn envelope_up(&self) -> Weight {
        // monotone sub-intervals
        let mut parts: Vec<(f64, f64, Piece)> = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let (lo, hi) = self.bounds(i);
            let mut cuts = vec![lo];
            cuts.extend(p.stationary_points().into_iter().filter(|&t| t > lo && t < hi));
            cuts.push(hi);
            for w in cuts.windows(2) {
                parts.push((w[0], w[1], *p));
            }
        }
        let mut level = Ext::zero();
        let mut out: Vec<(f64, f64, Piece)> = Vec::new();
        let push = |lo: f64, hi: f64, p: Piece, out: &mut Vec<(f64, f64, Piece)>| {
            if let Some(last) = out.last_mut() {
                if last.2 == p {
                    last.1 = hi;
                    return;
                }
            }
            out.push((lo, hi, p));
        };
        for (lo, hi, p) in parts {
            let fa = p.value_or_limit(lo);
            let fb = p.value_or_limit(hi);
            if fb > fa {
                if fb <= level {
                    push(lo, hi, Piece::constant(level.get()), &mut out);
                } else if fa >= level {
                    push(lo, hi, p, &mut out);
                    level = fb;
                } else {
                    let c = crossing(&p, level.get(), lo, hi);
                    push(lo, c, Piece::constant(level.get()), &mut out);
                    push(c, hi, p, &mut out);
                    level = fb;
                }
            } else {
                level = level.max(fa);
                push(lo, hi, Piece::constant(level.get()), &mut out);
            }
        }
        let knots = out.iter().skip(1).map(|(lo, _, _)| *lo).collect();
        let pieces = out.into_iter().map(|(_, _, p)| p).collect();
        Weight { knots, pieces }.simplified()
    }

    fn simplified(mut self) -> Weight {
        let mut knots = Vec::with_capacity(self.knots.len());
        let mut pieces = vec![self.pieces[0]];
        for (k, p) in self.knots.iter().zip(self.pieces.iter().skip(1)) {
            if *pieces.last().expect("nonempty") == *p {
                continue;
            }
            knots.push(*k);
            pieces.push(*p);
        }
        self.knots = knots;
        self.pieces = pieces;
        self
    }

    /// The primitive `t -> ∫_0^t w` or `t -> ∫_t^inf w` as a weight; exact
    /// for single power and single exponential pieces, tabulated otherwise.
    pub fn cumulative_weight(&self, kind: CumKind) -> Weight {
        if let Some(p) = self.as_single() {
            if p.is_zero() {
                return Weight::constant(0.0);
            }
            match kind {
                CumKind::Lower if p.is_pure_power() && p.alpha > -1.0 && p.c.is_finite() => {
                    return Weight::power(p.c / (p.alpha + 1.0), p.alpha + 1.0);
                }
                CumKind::Upper if p.is_pure_power() && p.alpha < -1.0 && p.c.is_finite() => {
                    return Weight::power(p.c / -(p.alpha + 1.0), p.alpha + 1.0);
                }
                CumKind::Upper if p.alpha == 0.0 && p.mu == 0.0 && p.lambda > 0.0 && p.c.is_finite() => {
                    return Weight::power_exp(p.c / p.lambda, 0.0, p.lambda);
                }
                _ => {}
            }
        }
        let t = sample_knots();
        let m = self.masses(&t);
        // `t` alternates knots and midpoints
        let mut y = vec![Ext::zero(); t.len()];
        match kind {
            CumKind::Lower => {
                let mut acc = m.head;
                y[0] = acc;
                for i in 1..t.len() {
                    acc = acc + m.segs[i - 1];
                    y[i] = acc;
                }
            }
            CumKind::Upper => {
                let mut acc = m.tail;
                y[t.len() - 1] = acc;
                for i in (0..t.len() - 1).rev() {
                    acc = acc + m.segs[i];
                    y[i] = acc;
                }
            }
        }
        let (head, tail) = self.primitive_ends(kind, &t, &y);
        let (exp_head, exp_tail) = self.exponential_ends(kind);
        Weight::fitted_raw(&t, &y).with_ends(head, tail).with_lost_ends(&t, &y, exp_head, exp_tail).simplified()
    }

    /// Leading terms of the primitive at an end where `self` grows (or, for
    /// the primitive from that end, decays) exponentially:
    /// `∫ c t^a e^{-l t} ~ c t^a e^{-l t}/|l|` at infinity and
    /// `∫ c t^a e^{-m/t} ~ c t^{a+2} e^{-m/t}/|m|` at zero, with relative
    /// errors `~ a/(l t)` and `~ (a+2) t/m`.
    fn exponential_ends(&self, kind: CumKind) -> (Option<Piece>, Option<Piece>) {
        let usable = |p: &Piece| p.c > 0.0 && p.c.is_finite();
        let first = self.pieces[0];
        let last = self.pieces[self.pieces.len() - 1];
        let head_exp = match kind {
            CumKind::Lower => first.mu > 0.0,
            CumKind::Upper => first.mu < 0.0,
        };
        let tail_exp = match kind {
            CumKind::Lower => last.lambda < 0.0,
            CumKind::Upper => last.lambda > 0.0,
        };
        let head = (usable(&first) && head_exp).then(|| Piece { c: first.c / first.mu.abs(), alpha: first.alpha + 2.0, ..first });
        let tail = (usable(&last) && tail_exp).then(|| Piece { c: last.c / last.lambda.abs(), ..last });
        (head, tail)
    }

    /// End pieces of a primitive from the end behaviour of `self`, anchored
    /// at the outermost samples. A fitted end exponent carries the sampling
    /// error and the next-order terms (e.g. `2x^{-1/2} - 2√π` for
    /// `∫_x^inf t^{-3/2} e^{-t}`), which decide limits after cancellation.
    fn primitive_ends(&self, kind: CumKind, t: &[f64], y: &[Ext]) -> (Option<Piece>, Option<Piece>) {
        let (t0, y0) = (t[0], y[0]);
        let (tn, yn) = (t[t.len() - 1], y[y.len() - 1]);
        let usable = |p: &Piece| p.c > 0.0 && p.c.is_finite();
        let power = |s: f64| Piece::power(1.0, s);
        let constant = |v: Ext| v.is_finite().then(|| Piece::constant(v.get()));
        let (exp_head, exp_tail) = self.exponential_ends(kind);
        let first = self.pieces[0];
        let head = match kind {
            _ if exp_head.is_some() => exp_head.and_then(|h| h.anchored(t0, y0).or(Some(h))),
            _ if !usable(&first) || first.mu != 0.0 => None,
            CumKind::Lower if first.alpha > -1.0 => power(first.alpha + 1.0).anchored(t0, y0),
            CumKind::Upper if first.alpha < -1.0 => power(first.alpha + 1.0).anchored(t0, y0),
            CumKind::Upper if first.alpha > -1.0 => constant(y0 + self.integrate(0.0, t0)),
            _ => None,
        };
        let last = self.pieces[self.pieces.len() - 1];
        let tail = match kind {
            _ if exp_tail.is_some() => exp_tail.and_then(|p| p.anchored(tn, yn).or(Some(p))),
            _ if !usable(&last) => None,
            CumKind::Lower if last.lambda == 0.0 && last.alpha > -1.0 => power(last.alpha + 1.0).anchored(tn, yn),
            CumKind::Lower if last.lambda > 0.0 || (last.lambda == 0.0 && last.alpha < -1.0) => {
                constant(yn + self.integrate(tn, f64::INFINITY))
            }
            CumKind::Upper if last.lambda == 0.0 && last.alpha < -1.0 => power(last.alpha + 1.0).anchored(tn, yn),
            _ => None,
        };
        (head, tail)
    }

    /// Replaces the parts of a fit to samples `y` at `t` that lie beyond the
    /// samples which left the f64 range (inf, or 0 next to nonzero values)
    /// by `head` and `tail`.
    fn with_lost_ends(self, t: &[f64], y: &[Ext], head: Option<Piece>, tail: Option<Piece>) -> Weight {
        let usable = |p: Option<Piece>| p.filter(|p| p.c > 0.0 && p.c.is_finite());
        let lost = |i: usize, next: usize| y[i].is_infinite() || (y[i].is_zero() && !y[next].is_zero());
        let mut out = self;
        if let Some(tail) = usable(tail) {
            if let Some(i) = (1..y.len()).find(|&i| lost(i, i - 1)) {
                out = out.with_tail(t[i.saturating_sub(2) & !1], tail);
            }
        }
        if let Some(head) = usable(head) {
            if let Some(i) = (0..y.len() - 1).rev().find(|&i| lost(i, i + 1)) {
                out = out.with_head(t[((i + 3) & !1).min(y.len() - 1)], head);
            }
        }
        out
    }

    /// `self` below `cut`, `tail` from `cut` on.
    fn with_tail(&self, cut: f64, tail: Piece) -> Weight {
        let knots: Vec<f64> = self.knots.iter().copied().filter(|&k| k < cut).chain([cut]).collect();
        let mut pieces: Vec<Piece> = self.pieces[..knots.len()].to_vec();
        pieces.push(tail);
        Weight { knots, pieces }
    }

    /// `head` below `cut`, `self` from `cut` on.
    fn with_head(&self, cut: f64, head: Piece) -> Weight {
        let from = self.knots.iter().position(|&k| k > cut).unwrap_or(self.knots.len());
        let knots: Vec<f64> = [cut].into_iter().chain(self.knots[from..].iter().copied()).collect();
        let pieces: Vec<Piece> = [head].into_iter().chain(self.pieces[from..].iter().copied()).collect();
        Weight { knots, pieces }
    }
}

/// The summand that dominates `a + b` as `t -> inf`; their sum when they
/// have one shape.
fn dominant_at_infinity(a: &Piece, b: &Piece) -> Option<Piece> {
    if a.is_zero() || b.is_zero() {
        return Some(if a.is_zero() { *b } else { *a });
    }
    if (a.alpha, a.lambda, a.mu) == (b.alpha, b.lambda, b.mu) {
        return Some(Piece { c: a.c + b.c, ..*a });
    }
    // c t^alpha e^{-lambda t - mu/t}: smaller lambda wins, then larger alpha
    let key = |p: &Piece| (-p.lambda, p.alpha);
    match key(a).partial_cmp(&key(b))? {
        std::cmp::Ordering::Greater => Some(*a),
        std::cmp::Ordering::Less => Some(*b),
        std::cmp::Ordering::Equal => None,
    }
}

/// The summand that dominates `a + b` as `t -> 0`; their sum when they
/// have one shape.
fn dominant_at_zero(a: &Piece, b: &Piece) -> Option<Piece> {
    if a.is_zero() || b.is_zero() || (a.alpha, a.lambda, a.mu) == (b.alpha, b.lambda, b.mu) {
        return dominant_at_infinity(a, b);
    }
    // smaller mu wins, then smaller alpha
    let key = |p: &Piece| (-p.mu, -p.alpha);
    match key(a).partial_cmp(&key(b))? {
        std::cmp::Ordering::Greater => Some(*a),
        std::cmp::Ordering::Less => Some(*b),
        std::cmp::Ordering::Equal => None,
    }
}

/// Power law through two samples. Extrapolating pieces with a slope below
/// `SLOPE_SNAP` in magnitude are flattened, so rounding in the samples
/// cannot produce a spurious zero or infinite limit.
fn log_linear(t: &[f64], y: &[Ext], extrapolating: bool) -> Piece {
    if y[0].is_infinite() || y[1].is_infinite() {
        return Piece::constant(f64::INFINITY);
    }
    let (a, b) = (y[0].get(), y[1].get());
    if a == 0.0 || b == 0.0 {
        return Piece::ZERO;
    }
    let slope = (b / a).ln() / (t[1] / t[0]).ln();
    if extrapolating && slope.abs() < SLOPE_SNAP {
        let at = if t[0] == SAMPLE_LO { a } else { b };
        return Piece::constant(at);
    }
    power_through(t[0], a, b, slope)
}

/// `c · t^slope` through `(t0, a)`. When `c` leaves the f64 range the
/// samples are far outside it too: tiny ones become zero, large ones the
/// larger sample as a constant.
fn power_through(t0: f64, a: f64, b: f64, slope: f64) -> Piece {
    let c = a * t0.powf(-slope);
    if c > 0.0 && c.is_finite() {
        Piece::power(c, slope)
    } else if a.max(b) < 1.0 {
        Piece::ZERO
    } else {
        Piece::constant(a.max(b))
    }
}

/// Log-linear pieces for a table with at least two samples.
fn table_pieces(t: &[f64], y: &[f64]) -> Vec<Piece> {
    let seg = |i: usize| -> Piece {
        if y[i] == 0.0 || y[i + 1] == 0.0 {
            return Piece::ZERO;
        }
        let slope = (y[i + 1] / y[i]).ln() / (t[i + 1] / t[i]).ln();
        power_through(t[i], y[i], y[i + 1], slope)
    };
    let n = t.len();
    let mut pieces = Vec::with_capacity(n + 1);
    pieces.push(seg(0));
    for i in 0..n - 1 {
        pieces.push(seg(i));
    }
    pieces.push(seg(n - 2));
    pieces
}

/// Knots interleaved with their geometric midpoints.
fn sample_knots() -> Vec<f64> {
    let decades = (SAMPLE_HI / SAMPLE_LO).log10();
    let n = 2 * (decades as usize) * SAMPLES_PER_DECADE + 1;
    let (a, b) = (SAMPLE_LO.ln(), SAMPLE_HI.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// A piece through three positive samples: `c · t^alpha · exp(-lambda·t)`
/// from `t = 1` on and `c · t^alpha · exp(-mu/t)` below, so that the
/// exponential factor that can dominate at the near end is the free one.
fn fit_three(t: &[f64], y: &[f64]) -> Option<Piece> {
    if y.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return None;
    }
    let near_zero = t[1] < 1.0;
    // r_j = alpha·s_j - k·d_j, with k = lambda and d = t, or k = mu and d = 1/t
    let d = |x: f64| if near_zero { 1.0 / x } else { x };
    let (s1, s2) = ((t[1] / t[0]).ln(), (t[2] / t[0]).ln());
    let (d1, d2) = (d(t[1]) - d(t[0]), d(t[2]) - d(t[0]));
    let (r1, r2) = ((y[1] / y[0]).ln(), (y[2] / y[0]).ln());
    let det = -s1 * d2 + s2 * d1;
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let alpha = (-r1 * d2 + r2 * d1) / det;
    let k = (s1 * r2 - s2 * r1) / det;
    let ln_c = y[0].ln() - alpha * t[0].ln() + k * d(t[0]);
    let c = ln_c.exp();
    let (lambda, mu) = if near_zero { (0.0, k) } else { (k, 0.0) };
    (c > 0.0 && c.is_finite() && alpha.is_finite() && k.is_finite()).then_some(Piece { c, alpha, lambda, mu })
}

/// Point in `(lo, hi)` where an increasing piece reaches `level`.
fn crossing(p: &Piece, level: f64, lo: f64, hi: f64) -> f64 {
    let mut a = if lo > 0.0 { lo } else { hi.min(1.0) };
    while a > 1e-300 && p.eval(a).get() >= level {
        a /= 2.0;
    }
    let mut b = if hi.is_finite() { hi } else { lo.max(1.0) };
    while b < 1e300 && p.eval(b).get() < level {
        b *= 2.0;
    }
    let (mut la, mut lb) = (a.ln(), b.ln());
    for _ in 0..200 {
        let m = 0.5 * (la + lb);
        if p.eval(m.exp()).get() < level {
            la = m;
        } else {
            lb = m;
        }
        if lb - la < 1e-15 {
            break;
        }
    }
    lb.exp().clamp(if lo > 0.0 { lo } else { 0.0 }, hi)
}

/// `σ_p(a, b)`: `(∫_a^b v^{1-p'})^{1/p'}` for `p > 1`, `ess sup_{(a,b)} 1/v`
/// for `p = 1`.
pub fn sigma_p(v: &Weight, p: f64, a: f64, b: f64) -> Result<Ext> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Usage(format!("sigma_p needs 1 <= p < inf, got {p}")));
    }
    if p == 1.0 {
        return Ok(v.recip().sup_on(a, b));
    }
    let pp = p / (p - 1.0);
    Ok(v.powf(1.0 - pp).integrate(a, b).powf(1.0 / pp))
}

/// `(φ[v;p], Φ[v;p])` with `Φ(x) = (∫_0^x v^{1-p'})^{1/(p'+1)}` and
/// `φ(x) = (∫_0^x v^{1-p'})^{-p'/(p'+1)} v^{1-p'}(x)`.
///
/// Note `∫_0^x φ = (p'+1) · Φ(x)`; `Φ` is the closed form, not the primitive of `φ`.
pub fn phi_weights(v: &Weight, p: f64) -> Result<(Weight, Weight)> {
    transform_pair(v, p, CumKind::Lower)
}

/// `(ψ[v;p], Ψ[v;p])`, the mirror of [`phi_weights`] built on `∫_x^inf v^{1-p'}`.
pub fn psi_weights(v: &Weight, p: f64) -> Result<(Weight, Weight)> {
    transform_pair(v, p, CumKind::Upper)
}

fn transform_pair(v: &Weight, p: f64, kind: CumKind) -> Result<(Weight, Weight)> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::TransformUndefined(format!("needs 1 < p < inf, got {p}")));
    }
    let pp = p / (p - 1.0);
    let g = v.powf(1.0 - pp);
    let (probe, name) = match kind {
        CumKind::Lower => (g.integrate(0.0, 1.0), "∫_0^x v^(1-p')"),
        CumKind::Upper => (g.integrate(1.0, f64::INFINITY), "∫_x^inf v^(1-p')"),
    };
    if probe.is_infinite() || probe.is_zero() || g.pieces().iter().any(|p| p.c.is_infinite()) {
        return Err(Error::TransformUndefined(format!("{name} must be positive and finite for all x")));
    }
    if kind == CumKind::Upper && g.pieces().last().is_some_and(Piece::is_zero) {
        return Err(Error::TransformUndefined(format!("{name} vanishes for large x")));
    }
    let big = g.cumulative_weight(kind);
    let cap = big.powf(1.0 / (pp + 1.0));
    let small = big.powf(-pp / (pp + 1.0)).product(&g);
    Ok((small, cap))
}
