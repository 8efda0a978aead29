//! One analytic piece `c · t^alpha · exp(-lambda·t - mu/t)`.
//!
//! The family is closed under products, real powers and the inversion
//! `t -> 1/t` (with a power-of-`t` Jacobian), which is what the weight
//! transforms need.

use crate::quad;
use crate::scalar::ExtNonneg;

type Ext = ExtNonneg<f64>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece {
    /// Prefactor in `[0, inf]`.
    pub c: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub mu: f64,
}

/// Sum of two exponents; a near-total cancellation is rounded to zero so that
/// tabulated weights divided by their closed forms keep finite end limits.
fn cancel(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.abs() <= CANCEL_TOL * a.abs().max(b.abs()) {
        0.0
    } else {
        s
    }
}

const CANCEL_TOL: f64 = 1e-6;

impl Piece {
    pub const ZERO: Piece = Piece { c: 0.0, alpha: 0.0, lambda: 0.0, mu: 0.0 };

    pub fn power(c: f64, alpha: f64) -> Self {
        Self { c, alpha, lambda: 0.0, mu: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        Self::power(c, 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.c == 0.0
    }

    pub fn is_pure_power(&self) -> bool {
        self.lambda == 0.0 && self.mu == 0.0
    }

    fn ln_shape(&self, t: f64) -> f64 {
        let mut s = -self.lambda * t;
        if self.alpha != 0.0 {
            s += self.alpha * t.ln();
        }
        if self.mu != 0.0 {
            s -= self.mu / t;
        }
        s
    }

    /// The piece of this shape (ignoring `c`) through `(t, y)`.
    pub(crate) fn anchored(&self, t: f64, y: Ext) -> Option<Piece> {
        if !(y.is_finite() && !y.is_zero()) {
            return None;
        }
        let c = (y.get().ln() - self.ln_shape(t)).exp();
        (c > 0.0 && c.is_finite()).then_some(Piece { c, ..*self })
    }

    pub fn eval(&self, t: f64) -> Ext {
        if self.c == 0.0 {
            return Ext::zero();
        }
        if self.c.is_infinite() {
            return Ext::infinity();
        }
        Ext::new((self.c.ln() + self.ln_shape(t)).exp())
    }

    /// Limit as `t -> 0+`.
    pub fn limit_at_zero(&self) -> Ext {
        if self.c == 0.0 {
            return Ext::zero();
        }
        let grows = if self.mu != 0.0 { self.mu < 0.0 } else { self.alpha < 0.0 };
        let decays = if self.mu != 0.0 { self.mu > 0.0 } else { self.alpha > 0.0 };
        if grows || self.c.is_infinite() {
            Ext::infinity()
        } else if decays {
            Ext::zero()
        } else {
            Ext::new(self.c)
        }
    }

    /// Limit as `t -> inf`.
    pub fn limit_at_infinity(&self) -> Ext {
        if self.c == 0.0 {
            return Ext::zero();
        }
        let grows = if self.lambda != 0.0 { self.lambda < 0.0 } else { self.alpha > 0.0 };
        let decays = if self.lambda != 0.0 { self.lambda > 0.0 } else { self.alpha < 0.0 };
        if grows || self.c.is_infinite() {
            Ext::infinity()
        } else if decays {
            Ext::zero()
        } else {
            Ext::new(self.c)
        }
    }

    /// Value at `t`, or the one-sided limit when `t` is `0` or `inf`.
    pub fn value_or_limit(&self, t: f64) -> Ext {
        if t <= 0.0 {
            self.limit_at_zero()
        } else if t.is_infinite() {
            self.limit_at_infinity()
        } else {
            self.eval(t)
        }
    }

    /// Positive zeros of the logarithmic derivative, sorted.
    pub fn stationary_points(&self) -> Vec<f64> {
        let (a, l, m) = (self.alpha, self.lambda, self.mu);
        let mut out = Vec::new();
        if l == 0.0 {
            if a != 0.0 && m != 0.0 {
                let t = -m / a;
                if t > 0.0 {
                    out.push(t);
                }
            }
        } else {
            let disc = a * a + 4.0 * l * m;
            if disc >= 0.0 {
                let sq = disc.sqrt();
                for t in [(a - sq) / (2.0 * l), (a + sq) / (2.0 * l)] {
                    if t > 0.0 && t.is_finite() {
                        out.push(t);
                    }
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn candidates(&self, lo: f64, hi: f64) -> impl Iterator<Item = Ext> + '_ {
        let inner: Vec<f64> = self.stationary_points().into_iter().filter(|&t| t > lo && t < hi).collect();
        [self.value_or_limit(lo), self.value_or_limit(hi)]
            .into_iter()
            .chain(inner.into_iter().map(move |t| self.eval(t)))
    }

    /// Supremum over `(lo, hi)`; `lo` may be `0` and `hi` may be `inf`.
    pub fn sup_on(&self, lo: f64, hi: f64) -> Ext {
        self.candidates(lo, hi).fold(Ext::zero(), Ext::max)
    }

    /// Infimum over `(lo, hi)`.
    pub fn inf_on(&self, lo: f64, hi: f64) -> Ext {
        self.candidates(lo, hi).fold(Ext::infinity(), Ext::min)
    }

    pub fn mul(&self, o: &Piece) -> Piece {
        let c = (Ext::new(self.c) * Ext::new(o.c)).get();
        if c == 0.0 {
            return Piece::ZERO;
        }
        if c.is_infinite() {
            return Piece::constant(c);
        }
        Piece { c, alpha: cancel(self.alpha, o.alpha), lambda: cancel(self.lambda, o.lambda), mu: cancel(self.mu, o.mu) }
    }

    pub fn powf(&self, s: f64) -> Piece {
        if s == 0.0 {
            return Piece::constant(1.0);
        }
        let c = Ext::new(self.c).powf(s).get();
        if c == 0.0 {
            return Piece::ZERO;
        }
        if c.is_infinite() {
            return Piece::constant(c);
        }
        Piece { c, alpha: self.alpha * s, lambda: self.lambda * s, mu: self.mu * s }
    }

    /// `t -> p(1/t) · (1/t^2)^jac`.
    pub fn dual(&self, jac: f64) -> Piece {
        if self.c == 0.0 {
            return Piece::ZERO;
        }
        Piece { c: self.c, alpha: -self.alpha - 2.0 * jac, lambda: self.mu, mu: self.lambda }
    }

    /// `∫_lo^hi` of the piece, with `0 <= lo < hi <= inf`.
    pub fn integrate(&self, lo: f64, hi: f64) -> Ext {
        if !(hi > lo) || self.c == 0.0 {
            return Ext::zero();
        }
        if self.c.is_infinite() {
            return Ext::infinity();
        }
        if self.is_pure_power() {
            return Ext::new(self.c) * power_integral(self.alpha, lo, hi);
        }
        if self.alpha == 0.0 && self.mu == 0.0 {
            return Ext::new(self.c) * exp_integral(self.lambda, lo, hi);
        }
        self.integrate_numeric(lo, hi)
    }

    fn integrate_numeric(&self, lo: f64, hi: f64) -> Ext {
        let (a, l, m) = (self.alpha, self.lambda, self.mu);
        let mut head = Ext::zero();
        let mut tail = Ext::zero();
        let mut lo = lo;
        let mut hi = hi;
        if lo == 0.0 {
            if m < 0.0 || (m == 0.0 && a <= -1.0) {
                return Ext::infinity();
            }
            if m > 0.0 {
                lo = (m / 1000.0).min(hi / 2.0);
            } else {
                let cut = (1e-8 / l.abs().max(1.0)).min(if hi.is_finite() { hi / 2.0 } else { 1.0 });
                head = Ext::new(self.c * (a + 1.0).recip() * ((a + 1.0) * cut.ln() - l * cut).exp());
                lo = cut;
            }
        }
        if hi.is_infinite() {
            if l < 0.0 || (l == 0.0 && a >= -1.0) {
                return Ext::infinity();
            }
            if l > 0.0 {
                let mut reference = lo.max(1.0 / l);
                for t in self.stationary_points() {
                    if t > lo {
                        reference = reference.max(t);
                    }
                }
                let peak = self.ln_shape(reference) + reference.ln();
                let mut b = reference * 2.0;
                while self.ln_shape(b) + b.ln() > peak - 46.0 && b < 1e300 {
                    b *= 2.0;
                }
                hi = b;
            } else {
                let cut = lo.max(1.0) * 1e8;
                tail = Ext::new(self.c * (-(a + 1.0)).recip() * ((a + 1.0) * cut.ln() - m / cut).exp());
                hi = cut;
            }
        }
        let body = quad::integrate_log(|t| self.eval(t).get(), lo, hi, quad::REL_TOL);
        head + Ext::new(body) + tail
    }
}

/// `∫_lo^hi t^alpha dt`.
pub(crate) fn power_integral(alpha: f64, lo: f64, hi: f64) -> Ext {
    let e = alpha + 1.0;
    if lo == 0.0 && e <= 0.0 {
        return Ext::infinity();
    }
    if hi.is_infinite() && e >= 0.0 {
        return Ext::infinity();
    }
    if e == 0.0 {
        return Ext::new((hi / lo).ln());
    }
    if lo == 0.0 {
        return Ext::new(hi.powf(e) / e);
    }
    if hi.is_infinite() {
        return Ext::new(lo.powf(e) / -e);
    }
    // lo^e · (exp(e·ln(hi/lo)) - 1) / e, without cancellation
    Ext::new(lo.powf(e) * (e * (hi / lo).ln()).exp_m1() / e)
}

/// `∫_lo^hi exp(-lambda·t) dt`.
fn exp_integral(lambda: f64, lo: f64, hi: f64) -> Ext {
    if lambda == 0.0 {
        return Ext::new(hi - lo);
    }
    if hi.is_infinite() {
        return if lambda > 0.0 { Ext::new((-lambda * lo).exp() / lambda) } else { Ext::infinity() };
    }
    Ext::new((-lambda * lo).exp() * -(-lambda * (hi - lo)).exp_m1() / lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Ext, b: f64, tol: f64) -> bool {
        (a.get() - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn closed_forms() {
        assert!(close(Piece::power(1.0, 0.0).integrate(0.0, 2.0), 2.0, 1e-15));
        assert!(close(Piece::power(2.0, 1.0).integrate(0.0, 3.0), 9.0, 1e-15));
        let e = Piece { c: 1.0, alpha: 0.0, lambda: 1.0, mu: 0.0 };
        assert!(close(e.integrate(0.0, f64::INFINITY), 1.0, 1e-15));
        assert!(Piece::power(1.0, -1.0).integrate(0.0, 1.0).is_infinite());
        assert!(Piece::power(1.0, 0.0).integrate(1.0, f64::INFINITY).is_infinite());
    }

    #[test]
    fn numeric_gamma_integral() {
        // ∫ t^{1/2} e^{-t} = Γ(3/2) = √π/2
        let p = Piece { c: 1.0, alpha: 0.5, lambda: 1.0, mu: 0.0 };
        let want = std::f64::consts::PI.sqrt() / 2.0;
        assert!(close(p.integrate(0.0, f64::INFINITY), want, 1e-8));
        // ∫_0^x of the dual piece equals ∫_{1/x}^inf of the original
        let d = p.dual(1.0);
        let x = 0.7;
        assert!(close(d.integrate(0.0, x), p.integrate(1.0 / x, f64::INFINITY).get(), 1e-8));
    }

    #[test]
    fn singular_at_zero_but_integrable() {
        // ∫_0^1 t^{-1/2} e^{-t} dt = √π · erf(1)
        let p = Piece { c: 1.0, alpha: -0.5, lambda: 1.0, mu: 0.0 };
        let want = 1.493_648_265_624_854_f64;
        assert!(close(p.integrate(0.0, 1.0), want, 1e-7), "{}", p.integrate(0.0, 1.0));
    }

    #[test]
    fn sup_uses_stationary_point() {
        let p = Piece { c: 1.0, alpha: 1.0, lambda: 1.0, mu: 0.0 };
        assert!(close(p.sup_on(0.0, 2.0), (-1.0f64).exp(), 1e-15));
        assert!(close(p.inf_on(0.5, 2.0), 2.0 * (-2.0f64).exp(), 1e-15));
    }

    #[test]
    fn limits() {
        assert!(Piece::power(1.0, -1.0).limit_at_zero().is_infinite());
        assert_eq!(Piece::power(3.0, 0.0).limit_at_infinity(), Ext::new(3.0));
        let d = Piece { c: 1.0, alpha: 0.0, lambda: 1.0, mu: 0.0 }.dual(0.0);
        assert_eq!(d.limit_at_zero(), Ext::zero());
        assert_eq!(d.limit_at_infinity(), Ext::one());
    }
}
