use super::*;
use crate::operators::Inner;
use crate::quad::integrate_log;
use proptest::prelude::*;

fn spec(kind: OperatorKind, cone: Cone, u: Weight, v: Weight, w: Weight, p: f64, q: f64) -> InequalitySpec {
    InequalitySpec { kind, cone, u, b: Weight::one(), v, w, exponents: Exponents::new(p, q).unwrap() }
}

fn exp_w() -> Weight {
    Weight::power_exp(1.0, 0.0, 1.0)
}

fn t() -> Weight {
    Weight::power(1.0, 1.0)
}

fn run(s: &InequalitySpec) -> CriterionResult {
    evaluate(s, Options::default()).unwrap()
}

fn close(a: Ext, b: f64, tol: f64) -> bool {
    (a.get() - b).abs() <= tol * b.abs().max(1e-300)
}

/// `∫_0^inf f` by adaptive quadrature on a log scale.
fn quad(f: impl Fn(f64) -> f64) -> f64 {
    integrate_log(f, 1e-14, 200.0, 1e-12)
}

#[test]
fn restricted_down_examples() {
    let r = run(&spec(OperatorKind::S, Cone::NonIncreasing, t(), Weight::one(), exp_w(), 1.0, 1.0));
    assert_eq!(r.theorem_id, "T3.3");
    assert_eq!(r.regime, "1=p≤q");
    assert!(close(r.term("A1").unwrap(), 1.0, 1e-6), "{:?}", r.terms);
    assert!(r.term("unit").unwrap().is_zero());
    assert!(close(r.total, 1.0, 1e-6));
    // the printed hypotheses need V* < inf, which v ≡ 1 violates
    assert!(r.alternate.is_none());

    let r = run(&spec(OperatorKind::S, Cone::NonIncreasing, Weight::one(), Weight::one(), exp_w(), 1.0, 1.0));
    assert!(r.term("A1").unwrap().is_infinite() && !r.finite);

    let r = run(&spec(OperatorKind::S, Cone::NonIncreasing, t(), Weight::one(), exp_w(), 2.0, 1.0));
    assert_eq!(r.regime, "q<p");
    // r = 2, r/p = 1: B1^2 = ∫ (1 - e^{-x}(1+x)) e^{-x}, B2^2 = ∫ x e^{-2x}
    let b1 = quad(|x| (1.0 - (-x as f64).exp() * (1.0 + x)) * (-x).exp()).sqrt();
    let b2 = quad(|x| x * (-2.0 * x).exp()).sqrt();
    assert!(close(r.term("B1").unwrap(), b1, 1e-6), "{:?} vs {b1}", r.terms);
    assert!(close(r.term("B2").unwrap(), b2, 1e-6), "{:?} vs {b2}", r.terms);
    assert!(r.term("unit").unwrap().is_zero());
}

#[test]
fn iterated_examples() {
    let r = run(&spec(OperatorKind::ISI4, Cone::Nonneg, Weight::one(), Weight::one(), exp_w(), 2.0, 2.0));
    assert_eq!(r.theorem_id, "T3.1");
    assert!(r.term("A1").unwrap().is_infinite());

    let ev = Weight::power_exp(1.0, 0.0, -1.0);
    let r = run(&spec(OperatorKind::ISI4, Cone::Nonneg, Weight::one(), ev, exp_w(), 2.0, 2.0));
    assert!(close(r.term("A1").unwrap(), 1.0, 1e-6), "{:?}", r.terms);

    let u = Weight::power(1.0, -2.0 / 3.0);
    let r = run(&spec(OperatorKind::ISI1, Cone::Nonneg, u, Weight::one(), exp_w(), 2.0, 2.0));
    assert_eq!(r.theorem_id, "T4.1");
    // Φ_1 ≡ 1 and Φ = x^{1/3}: A1 = sup x^{-1/6}
    assert!(r.term("A1").unwrap().is_infinite());
    assert!(r.term("unit").unwrap().is_zero());

}

#[test]
fn tub_examples() {
    let mut s = spec(OperatorKind::Tub, Cone::NonIncreasing, t(), Weight::one(), exp_w(), 1.0, 1.0);
    let r = run(&s);
    assert_eq!(r.theorem_id, "T5.1.ii");
    assert!(close(r.term("A1").unwrap(), 1.0, 1e-4), "{:?}", r.terms);
    assert!(close(r.term("A2").unwrap(), 1.0, 1e-4), "{:?}", r.terms);
    assert!(close(r.total, 2.0, 1e-4));

    s.exponents = Exponents::new(0.5, 0.5).unwrap();
    let r = run(&s);
    assert_eq!(r.theorem_id, "T5.3.i");
    assert!(r.term("A1").unwrap().is_infinite());

    s.exponents = Exponents::new(2.0, 2.0).unwrap();
    s.kind = OperatorKind::TGamma { gamma_over_n: 0.5 };
    s.w = Weight::power_exp(1.0, 1.0, 1.0);
    let r = run(&s);
    assert_eq!(r.theorem_id, "T5.1.i");
    // u/B = τ^{-1/2}, (B/V)^2 v = 1, V^2 v = t^2, u/V^2 = τ^{-3/2}
    let w_low = |x: f64| 1.0 - (-x).exp() * (1.0 + x);
    let a1 = |x: f64| {
        let tail = integrate_log(|t| t.powf(-1.0) * t * (-t).exp(), x, 200.0, 1e-12);
        ((1.0 / x) * w_low(x) + tail).sqrt() * x.sqrt()
    };
    let a2 = |x: f64| {
        let tail = integrate_log(|t| t.powf(-3.0) * t * (-t).exp(), x, 200.0, 1e-12);
        (x.powf(-3.0) * w_low(x) + tail).sqrt() * (x.powi(3) / 3.0).sqrt()
    };
    let grid = (0..400).map(|i| 10f64.powf(-4.0 + 7.0 * i as f64 / 399.0));
    let (m1, m2) = grid.fold((0.0f64, 0.0f64), |(m1, m2), x| (m1.max(a1(x)), m2.max(a2(x))));
    assert!(r.term("A1").unwrap().get() >= m1 * (1.0 - 1e-6), "{:?} vs {m1}", r.terms);
    assert!(r.term("A2").unwrap().get() >= m2 * (1.0 - 1e-6), "{:?} vs {m2}", r.terms);
    assert!(close(r.term("A1").unwrap(), m1, 1e-3) && close(r.term("A2").unwrap(), m2, 1e-3));
}

#[test]
fn tub_envelope_replacement_is_exact() {
    let b = Weight::one();
    let u = Weight::power(1.0, 0.5);
    let big_b = b.cumulative_weight(CumKind::Lower);
    let env = u.product(&big_b.recip()).running_sup(SupDirection::FromT).product(&big_b);
    let w = Weight::power_exp(1.0, 0.5, 1.0);
    for (p, q) in [(2.0, 3.0), (3.0, 1.5)] {
        let a = run(&spec(OperatorKind::Tub, Cone::NonIncreasing, u.clone(), Weight::one(), w.clone(), p, q));
        let e = run(&spec(OperatorKind::Tub, Cone::NonIncreasing, env.clone(), Weight::one(), w.clone(), p, q));
        assert_eq!(a.terms, e.terms);
    }
}

#[test]
fn hypothesis_failures_are_reported() {
    let s = spec(OperatorKind::S, Cone::NonDecreasing, t(), Weight::one(), exp_w(), 1.0, 1.0);
    match evaluate(&s, Options::default()) {
        Err(Error::Inapplicable { theorem, predicate }) => {
            assert_eq!(theorem, "T3.5");
            assert_eq!(predicate, "0<V*<inf");
        }
        other => panic!("{other:?}"),
    }
    let s = spec(OperatorKind::Isi1V, Cone::Nonneg, t(), Weight::one(), exp_w(), 2.0, 2.0);
    assert!(matches!(evaluate(&s, Options::default()), Err(Error::Inapplicable { .. })));
    let s = spec(OperatorKind::S, Cone::Nonneg, t(), Weight::one(), exp_w(), 1.0, 1.0);
    assert!(matches!(evaluate(&s, Options::default()), Err(Error::Usage(_))));
}

#[test]
fn verbatim_switch_changes_only_the_typo_terms() {
    let v = Weight::power_exp(1.0, 0.0, 1.0);
    let w = Weight::power_exp(1.0, 1.0, 1.0);
    let s = spec(OperatorKind::S, Cone::NonDecreasing, Weight::power(1.0, 0.5), v, w, 2.0, 1.0);
    let d = run(&s);
    let alt = d.alternate.as_ref().expect("the printed B1 differs");
    assert_eq!(alt.form, Form::Verbatim);
    assert_eq!(d.term("B2"), alt.term("B2"));
    assert_ne!(d.term("B1"), alt.term("B1"));
    let vb = evaluate(&s, Options { verbatim_paper: true }).unwrap();
    assert_eq!(vb.form, Form::Verbatim);
    assert_eq!(vb.terms, alt.terms);
}

/// Tilde weights of the `x = 1/t` substitution.
fn dual(s: &InequalitySpec, kind: OperatorKind, cone: Cone, v_jac: f64) -> InequalitySpec {
    InequalitySpec {
        kind,
        cone,
        u: s.u.dual_substitute(0.0),
        b: s.b.clone(),
        v: s.v.dual_substitute(v_jac),
        w: s.w.dual_substitute(1.0),
        exponents: s.exponents,
    }
}

/// Compares totals when both theorems apply; returns whether it compared.
/// The hypotheses only correspond under the substitution for Jacobian 1.
fn assert_dual_pair(s: &InequalitySpec, d: &InequalitySpec) -> bool {
    match (evaluate(s, Options::default()), evaluate(d, Options::default())) {
        (Ok(a), Ok(b)) => {
            let ok = (a.total.is_infinite() && b.total.is_infinite())
                || (a.total.get() - b.total.get()).abs() <= 1e-3 * a.total.get().max(b.total.get());
            assert!(ok, "{} {:?} vs {} {:?}", a.theorem_id, a.terms, b.theorem_id, b.terms);
            true
        }
        (Err(Error::Inapplicable { .. }), _) | (_, Err(Error::Inapplicable { .. })) => false,
        (a, b) => panic!("{a:?} vs {b:?}"),
    }
}

#[test]
fn duality_pairs_agree() {
    let u = Weight::power_exp(1.0, 0.7, 0.4);
    let w = Weight::power_exp(1.0, 1.2, 1.0);
    let mut compared = BTreeMap::new();
    for alpha in [0.3, 1.5, 3.5] {
        let v = Weight::power_exp(2.0, alpha, 0.5);
        for (p, q) in [(1.0, 2.0), (2.0, 2.0), (2.0, 1.0), (1.0, 0.5), (0.5, 0.7), (1.5, 0.8)] {
            let mk = |kind, cone| spec(kind, cone, u.clone(), v.clone(), w.clone(), p, q);
            let mut pair = |name: &'static str, s: InequalitySpec, d: InequalitySpec| {
                *compared.entry(name).or_insert(0) += assert_dual_pair(&s, &d) as usize;
            };
            let s = mk(OperatorKind::S, Cone::NonIncreasing);
            pair("T3.3", s.clone(), dual(&s, OperatorKind::Sstar, Cone::NonDecreasing, 1.0));
            let s = mk(OperatorKind::Sstar, Cone::NonIncreasing);
            pair("T3.6", s.clone(), dual(&s, OperatorKind::S, Cone::NonDecreasing, 1.0));
            if p >= 1.0 {
                let s = mk(OperatorKind::ISI4, Cone::Nonneg);
                pair("T3.1", s.clone(), dual(&s, OperatorKind::ISI2, Cone::Nonneg, 1.0 - p));
            }
            if p > 1.0 {
                let s = mk(OperatorKind::ISI1, Cone::Nonneg);
                pair("T4.1", s.clone(), dual(&s, OperatorKind::ISI3, Cone::Nonneg, 1.0 - p));
            }
            if p == 1.0 {
                let s = mk(OperatorKind::Isi1V, Cone::Nonneg);
                pair("T4.2", s.clone(), dual(&s, OperatorKind::Isi3V, Cone::Nonneg, 1.0));
            }
        }
    }
    for name in ["T3.3", "T3.6", "T3.1", "T4.1", "T4.2"] {
        assert!(compared.get(name).copied().unwrap_or(0) >= 2, "{name}: {compared:?}");
    }
}

#[test]
fn reductions_map_the_examples() {
    let s = spec(OperatorKind::S, Cone::NonIncreasing, t(), Weight::one(), exp_w(), 2.0, 2.0);
    let (r, rec) = reduce_spec(&s).unwrap();
    assert_eq!(rec.theorem_id, "R2.1");
    assert_eq!(r.kind, OperatorKind::ISI2);
    assert_eq!(r.cone, Cone::Nonneg);
    assert!(close(r.v.eval(3.0), 9.0, 1e-12));
    assert!(rec.side_condition.is_none());

    let s = spec(OperatorKind::S, Cone::NonDecreasing, t(), exp_w(), exp_w(), 1.0, 1.0);
    let (r, rec) = reduce_spec(&s).unwrap();
    assert_eq!(rec.theorem_id, "R2.3");
    assert!(close(r.v.eval(0.7), (-0.7f64).exp(), 1e-9));
    // V*(0) = 1: the unit term ‖t‖_{1,e^{-t}} / 1 = 1 is attached
    assert!(close(rec.side_condition.unwrap(), 1.0, 1e-9));

    let s = spec(OperatorKind::ISI1, Cone::Nonneg, t(), Weight::one(), exp_w(), 2.0, 2.0);
    let (r, rec) = reduce_spec(&s).unwrap();
    assert_eq!(rec.theorem_id, "R2.5");
    assert_eq!((r.kind.clone(), r.cone), (OperatorKind::S, Cone::NonIncreasing));
    assert!(close(r.v.eval(8.0), 0.25, 1e-9));
    assert!(close(r.u.eval(8.0), 8.0 * 4.0, 1e-9));

    let s = spec(OperatorKind::Tub, Cone::NonIncreasing, t(), Weight::one(), exp_w(), 1.0, 1.0);
    let (r, _) = reduce_spec_with(&s, Reduction::R22).unwrap();
    assert!(matches!(r.kind, OperatorKind::Composite { inner: Inner::HardyDamped(_), .. }));
    assert!(r.kind.is_iterated());
}

fn battery_weight() -> impl Strategy<Value = Weight> {
    (0.2f64..5.0, -0.5f64..1.5, 0.2f64..2.0).prop_map(|(c, a, l)| Weight::power_exp(c, a, l))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn scale_covariance(u in battery_weight(), w in battery_weight(), lam in 0.1f64..10.0,
                        pq in prop_oneof![Just((1.0, 2.0)), Just((2.0, 1.0)), Just((0.5, 1.0))]) {
        let (p, q) = pq;
        let v = Weight::power_exp(1.0, 0.0, -0.5);
        let base = spec(OperatorKind::Sstar, Cone::NonIncreasing, u, v, w, p, q);
        let r0 = run(&base);
        let mut sw = base.clone();
        sw.w = base.w.scale(lam);
        let mut sv = base.clone();
        sv.v = base.v.scale(lam);
        let (rw, rv) = (run(&sw), run(&sv));
        for (name, x) in &r0.terms {
            let want_w = *x * Ext::new(lam.powf(1.0 / q));
            let want_v = *x * Ext::new(lam.powf(-1.0 / p));
            for (got, want) in [(rw.terms[name], want_w), (rv.terms[name], want_v)] {
                prop_assert!(got == want || (got.get() - want.get()).abs() <= 1e-6 * want.get(), "{name}: {got:?} vs {want:?}");
            }
        }
    }
}
