use super::*;
use crate::criteria::{evaluate, Options};
use crate::exponents::Exponents;
use crate::gridfn::make_log_grid;
use crate::spec::OperatorKind;
use proptest::prelude::*;

fn grid() -> Arc<Grid> {
    Arc::new(make_log_grid(1e-4, 1e4, 97).unwrap())
}

fn spec(kind: OperatorKind, cone: Cone, u: Weight, p: f64, q: f64) -> InequalitySpec {
    InequalitySpec {
        kind,
        cone,
        u,
        b: Weight::one(),
        v: Weight::one(),
        w: Weight::power_exp(1.0, 0.0, 1.0),
        exponents: Exponents::new(p, q).unwrap(),
    }
}

fn small() -> Budget {
    Budget { n_char: 97, n_random: 20, n_ascent: 3 }
}

#[test]
fn level_sets_reach_the_known_constants() {
    let s = spec(OperatorKind::S, Cone::NonIncreasing, Weight::power(1.0, 1.0), 1.0, 1.0);
    let r = best_constant_lower(&s, grid(), small(), 1).unwrap();
    assert!((r.lower_bound.get() - 1.0).abs() < 0.01, "{:?}", r.trace);
    assert!(r.lower_bound.get() <= 1.0 + 1e-12);
    assert!(!r.divergence_flag);

    let s = spec(OperatorKind::Tub, Cone::NonIncreasing, Weight::power(1.0, 1.0), 1.0, 1.0);
    let r = best_constant_lower(&s, grid(), small(), 1).unwrap();
    assert!((r.lower_bound.get() - 1.0).abs() < 0.01, "{:?}", r.trace);
    assert!(!r.divergence_flag);
}

#[test]
fn blowup_at_the_origin_is_flagged() {
    let s = spec(OperatorKind::S, Cone::NonIncreasing, Weight::one(), 1.0, 1.0);
    let r = best_constant_lower(&s, grid(), small(), 1).unwrap();
    assert!(r.divergence_flag, "{:?}", r.trace);
    // χ_(0,eps) gives about 1/eps
    assert!(r.lower_bound.get() > 0.5e4);
    assert!(r.effective().is_infinite());
}

#[test]
fn witness_reproduces_the_bound() {
    let u = Weight::power_exp(1.0, 0.5, 0.3);
    for (kind, cone, p, q) in [
        (OperatorKind::S, Cone::NonIncreasing, 2.0, 3.0),
        (OperatorKind::Sstar, Cone::NonDecreasing, 1.5, 1.0),
        (OperatorKind::ISI1, Cone::Nonneg, 2.0, 2.0),
        (OperatorKind::ISI3, Cone::Nonneg, 3.0, 1.5),
        (OperatorKind::Tub, Cone::NonIncreasing, 0.5, 0.8),
    ] {
        let mut s = spec(kind.clone(), cone, u.clone(), p, q);
        s.v = Weight::power_exp(1.0, 0.2, 0.1);
        let r = best_constant_lower(&s, grid(), small(), 7).unwrap();
        let again = rayleigh_ratio(&s, &r.witness).unwrap();
        let same = again == r.lower_bound || (again.get() - r.lower_bound.get()).abs() <= 1e-10 * r.lower_bound.get();
        assert!(same, "{kind:?} {again:?} {:?}", r.trace);
        assert!(r.trace.characteristic <= r.trace.random && r.trace.random <= r.trace.ascent);
        assert_eq!(r.trace.ascent, r.lower_bound);
    }
}

#[test]
fn zero_budget_is_rejected() {
    let s = spec(OperatorKind::S, Cone::NonIncreasing, Weight::one(), 1.0, 1.0);
    let zero = Budget { n_char: 0, n_random: 0, n_ascent: 0 };
    assert!(matches!(best_constant_lower(&s, grid(), zero, 1), Err(Error::Config(_))));
}

#[test]
fn spread_order_is_a_permutation_with_spread_prefixes() {
    for n in [2, 3, 16, 97] {
        let mut o = spread_order(n);
        assert_eq!(&o[..2], &[0, n - 1]);
        o.sort_unstable();
        assert_eq!(o, (0..n).collect::<Vec<_>>());
    }
}

#[test]
fn boundary_growth_detection() {
    let x: Vec<f64> = (0..8).map(|i| 10f64.powi(-i)).collect();
    let grow: Vec<Ext> = x.iter().map(|t| Ext::new(1.0 / t)).collect();
    let flat: Vec<Ext> = x.iter().map(|t| Ext::new(1.0 - t)).collect();
    assert!(grows_into_boundary(&x, &grow));
    assert!(!grows_into_boundary(&x, &flat));
    let mut with_inf = flat.clone();
    with_inf[3] = Ext::infinity();
    assert!(grows_into_boundary(&x, &with_inf));
}

#[test]
fn down_dual_examples() {
    let one = Weight::one();
    assert!((down_dual_constant(&one, &one, 1.0).unwrap().get() - 1.0).abs() < 1e-12);
    assert!(down_dual_constant(&one, &one, 0.5).unwrap().is_infinite());
    let g = Weight::power_exp(1.0, 0.0, 1.0);
    assert!((down_dual_constant(&g, &one, 1.0).unwrap().get() - 1.0).abs() < 1e-6);
    assert!(down_dual_constant(&g, &one, 1.5).is_err());
}

#[test]
fn verdicts() {
    let s = spec(OperatorKind::Tub, Cone::NonIncreasing, Weight::power(1.0, 1.0), 1.0, 1.0);
    let crit = evaluate(&s, Options::default()).unwrap();
    let orc = best_constant_lower(&s, grid(), small(), 1).unwrap();
    let rep = equivalence_report("tub", crit.clone(), orc.clone(), 64.0).unwrap();
    assert_eq!(rep.verdict, Verdict::Consistent);
    assert!((rep.ratio.get() - 2.0).abs() < 0.03);

    let div = OracleResult { divergence_flag: true, ..orc.clone() };
    assert_eq!(equivalence_report("x", crit.clone(), div.clone(), 64.0).unwrap().verdict, Verdict::InconsistentFiniteness);
    let mut inf = crit.clone();
    inf.total = Ext::infinity();
    assert_eq!(equivalence_report("x", inf, div, 64.0).unwrap().verdict, Verdict::Consistent);
    let far = OracleResult { lower_bound: Ext::new(1e-3), ..orc };
    assert_eq!(equivalence_report("x", crit.clone(), far.clone(), 64.0).unwrap().verdict, Verdict::RatioOutOfBand);
    assert!(equivalence_report("x", crit, far, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn budgets_are_monotone(seed in 0u64..1000, a in 0.0f64..1.5, lam in 0.1f64..2.0,
                            nc in 1usize..40, nr in 0usize..6, extra in 1usize..4) {
        let mut s = spec(OperatorKind::S, Cone::NonIncreasing, Weight::power_exp(1.0, a, lam), 2.0, 1.5);
        s.v = Weight::power_exp(1.0, 0.3, 0.2);
        let g = grid();
        let at = |b: Budget| best_constant_lower(&s, g.clone(), b, seed).unwrap().lower_bound;
        let base = Budget { n_char: nc, n_random: nr, n_ascent: 0 };
        let lb = at(base);
        let more_char = Budget { n_char: nc + extra, ..base };
        let more_random = Budget { n_random: nr + extra, ..base };
        let asc = Budget { n_ascent: 1, ..base };
        let more_ascent = Budget { n_ascent: 1 + extra, ..base };
        prop_assert!(at(more_char) >= lb);
        prop_assert!(at(more_random) >= lb);
        prop_assert!(at(more_ascent) >= at(asc));
        prop_assert!(at(asc) >= lb);
    }
}

#[test]
fn sandwich_orders_the_three_functionals() {
    let g = grid();
    for (b, p) in [(Weight::one(), 0.5), (Weight::power(2.0, 1.0), 0.5), (Weight::one(), 1.0), (Weight::power(2.0, 1.0), 0.8)] {
        for seed in 0..10 {
            let f = crate::gridfn::sample_monotone(Cone::NonIncreasing, &g, seed).unwrap();
            let s = Sandwich::new(&f, &b, p).unwrap();
            for k in 0..g.len() {
                assert!(s.sup_fb[k].get() <= s.int_fb[k].get() * (1.0 + 1e-12), "{k}");
                assert!(s.int_fb[k].get() <= p.powf(1.0 / p) * s.power[k].get() * (1.0 + 1e-9), "{k}");
            }
        }
        // level sets attain the right-hand constant
        let k = 40;
        let chi = GridFunction::monotone(g.clone(), (0..g.len()).map(|i| if i <= k { 1.0 } else { 0.0 }).collect(), Cone::NonIncreasing).unwrap();
        let s = Sandwich::new(&chi, &b, p).unwrap();
        let a = g.knots()[k];
        let big_b = b.integrate(0.0, a).get();
        assert!((s.int_fb[k].get() - big_b).abs() < 1e-9 * big_b);
        assert!((s.int_fb[k].get() - p.powf(1.0 / p) * s.power[k].get()).abs() < 1e-6 * big_b);
    }
}

#[test]
fn three_way_examples() {
    let e = Exponents::new(1.0, 1.0).unwrap();
    let w = Weight::power_exp(1.0, 0.0, 1.0);
    let one = Weight::one();
    // u ≡ 1: all three forms grow like ln(1/a) on χ_(0,a)
    let r = verify_three_way(&one, &one, &one, &w, e, grid(), small(), 3).unwrap();
    assert!(r.flags_agree && r.tub.divergence_flag, "{:?}", r.ratios);

    let e = Exponents::new(0.5, 0.5).unwrap();
    let r = verify_three_way(&Weight::power(1.0, 1.0), &one, &one, &w, e, grid(), small(), 3).unwrap();
    assert!(r.flags_agree && r.tub.divergence_flag && r.double_sup.divergence_flag, "{:?}", r.ratios);

    // finite case: u = t e^{-t}, v ≡ 1, p = q = 1
    let e = Exponents::new(1.0, 1.0).unwrap();
    let u = Weight::power_exp(1.0, 1.0, 1.0);
    let r = verify_three_way(&u, &one, &one, &w, e, grid(), small(), 3).unwrap();
    assert!(r.flags_agree && !r.tub.divergence_flag, "{:?}", r.ratios);
    assert!(r.max_spread <= 8.0, "{:?}", r.ratios);
    // at p = 1 the power form is T_{u,b} itself
    assert!((r.tub.lower_bound.get() - r.power.lower_bound.get()).abs() < 1e-9 * r.tub.lower_bound.get());
    assert!(r.double_sup.lower_bound.get() <= r.tub.lower_bound.get() * (1.0 + 1e-12), "{:?} {:?}", r.double_sup.trace, r.tub.trace);

    let bad = verify_three_way(&u, &one, &one, &w, Exponents::new(2.0, 1.0).unwrap(), grid(), small(), 3);
    assert!(matches!(bad, Err(Error::Usage(_))));
}

#[test]
fn growth_hidden_by_underflow_is_flagged() {
    // χ_(a,inf) gives a + 1 until e^{-a} underflows near a = 708
    let mut s = spec(OperatorKind::S, Cone::NonDecreasing, Weight::power(1.0, 1.0), 1.0, 1.0);
    s.v = Weight::power_exp(1.0, 0.0, 1.0);
    let r = best_constant_lower(&s, grid(), small(), 1).unwrap();
    assert!(r.divergence_flag, "{:?}", r.trace);
    assert!(r.lower_bound.get() > 500.0);
}
