//! Adaptive Simpson quadrature on the logarithmic axis.
//!
//! `∫_a^b f(t) dt = ∫_{ln a}^{ln b} f(e^s) e^s ds`. The log interval is cut
//! into panels of width at most [`PANEL_WIDTH`] before adapting, so that
//! integrands concentrated in a small part of a long range are not missed.

use crate::scalar::Scalar;

/// Default relative tolerance of a single quadrature call.
pub const REL_TOL: f64 = 1e-9;

const PANEL_WIDTH: f64 = 0.5;
const MAX_DEPTH: u32 = 48;
/// Subdivisions allowed per panel; integrands dominated by rounding noise
/// never meet a relative tolerance.
const PANEL_BUDGET: usize = 1 << 14;

/// Integrates a nonnegative `f` over `[a, b]` with `0 < a < b < inf`.
pub fn integrate_log<T, F>(f: F, a: T, b: T, rel_tol: T) -> T
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if !(b > a) {
        return T::zero();
    }
    let g = |s: T| {
        let t = s.exp();
        let y = f(t) * t;
        if y.is_nan() {
            T::zero()
        } else {
            y
        }
    };
    let (la, lb) = (a.ln(), b.ln());
    let width = lb - la;
    let panels = (width / T::lit(PANEL_WIDTH)).ceil().to_usize().unwrap_or(1).max(1);
    let h = width / T::from_usize(panels).expect("panel count");
    let mut total = T::zero();
    for k in 0..panels {
        let s0 = la + h * T::from_usize(k).expect("panel index");
        let s1 = if k + 1 == panels { lb } else { s0 + h };
        let (f0, f1) = (g(s0), g(s1));
        let m = (s0 + s1) / T::lit(2.0);
        let fm = g(m);
        let whole = simpson(s0, s1, f0, fm, f1);
        if whole.is_infinite() {
            return T::infinity();
        }
        total = total + adapt(&g, s0, s1, f0, fm, f1, whole, rel_tol, MAX_DEPTH, &mut { PANEL_BUDGET });
        if total.is_infinite() {
            return total;
        }
    }
    total
}

fn simpson<T: Scalar>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<T: Scalar, G: Fn(T) -> T>(
    g: &G,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
    budget: &mut usize,
) -> T {
    let m = (a + b) / T::lit(2.0);
    let lm = (a + m) / T::lit(2.0);
    let rm = (m + b) / T::lit(2.0);
    let (flm, frm) = (g(lm), g(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let scale = (left + right).abs().max(T::min_positive_value());
    if depth == 0 || *budget == 0 || delta.abs() <= T::lit(15.0) * tol * scale || !delta.is_finite() {
        return left + right + delta / T::lit(15.0);
    }
    *budget -= 1;
    let l = adapt(g, a, m, fa, flm, fm, left, tol, depth - 1, budget);
    l + adapt(g, m, b, fm, frm, fb, right, tol, depth - 1, budget)
}
