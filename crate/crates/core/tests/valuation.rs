use proptest::prelude::*;
use quadwalk::fixed_point::{certify_infinite_2d, FixedPointEvidence};
use quadwalk::model::fixtures;
use quadwalk::valuation::{
    audit_pattern, certify_infinite_valuation, replay, valuation_maps, ValuationError, ValuationVerdict,
    DEFAULT_MAX_STEPS, DEFAULT_STARTS,
};
use quadwalk::{Model, Step};

/// `Φ` read off the step list: the exponents of `y` among the steps with
/// `x = -1` and `x = +1`.
fn naive_phi(m: &Model, (a, b): (i64, i64)) -> (i64, i64) {
    let ys = |x: i8| m.steps().iter().filter(move |(s, _)| s.coord(0) == x).map(|(s, _)| i64::from(s.coord(1)));
    let k = if b >= 0 {
        ys(-1).min().unwrap() - ys(1).min().unwrap()
    } else {
        ys(-1).max().unwrap() - ys(1).max().unwrap()
    };
    (k * b - a, b)
}

fn naive_psi(m: &Model, (a, b): (i64, i64)) -> (i64, i64) {
    let (b, a) = naive_phi(&m.xy_reflection(), (b, a));
    (a, b)
}

fn bases_and_reflections() -> Vec<Model> {
    fixtures::singular_bases().into_iter().flat_map(|m| [m.xy_reflection(), m]).collect()
}

#[test]
fn orbit_law_on_the_singular_bases() {
    for m in bases_and_reflections() {
        let c = certify_infinite_valuation(&m, &[(1, 2)], DEFAULT_MAX_STEPS).unwrap();
        assert_eq!(c.verdict, ValuationVerdict::InfiniteOrbit, "{m}");
        let p = c.pattern.unwrap();
        assert_eq!((p.start, p.offset, p.period, p.increment), ((1, 2), 0, 2, (2, 2)), "{m}");
        let mut s = (1, 2);
        for n in 1..=50i64 {
            let t = naive_phi(&m, s);
            assert_eq!(t, (2 * n + 1, 2 * n), "{m}");
            s = naive_psi(&m, t);
            assert_eq!(s, (2 * n + 1, 2 * n + 2), "{m}");
            assert_eq!(replay(&c.maps, &p, n as usize), Some(s), "{m}");
        }
        assert!(audit_pattern(&c.maps, &p, 50));
    }
}

#[test]
fn valuation_without_fixed_points() {
    let m = fixtures::example_valuation();
    assert_eq!(certify_infinite_2d(&m).unwrap().evidence, FixedPointEvidence::NoFixedPoint);
    let c = certify_infinite_valuation(&m, &DEFAULT_STARTS, DEFAULT_MAX_STEPS).unwrap();
    assert_eq!(c.verdict, ValuationVerdict::InfiniteOrbit);
    let p = c.pattern.unwrap();
    assert_eq!((p.start, p.period, p.increment), ((1, 2), 2, (2, 2)));
    assert!(c.positive_extreme_coefficients);
}

#[test]
fn finite_groups_are_never_certified() {
    for m in [fixtures::simple_walk(), fixtures::kreweras(), fixtures::reverse_kreweras(), fixtures::tandem()] {
        let c = certify_infinite_valuation(&m, &DEFAULT_STARTS, DEFAULT_MAX_STEPS).unwrap();
        assert_eq!(c.verdict, ValuationVerdict::Inconclusive, "{m}");
        assert!(c.pattern.is_none());
    }
}

#[test]
fn errors() {
    assert_eq!(valuation_maps(&fixtures::simple_walk_3d()), Err(ValuationError::NotPlanar));
    let m = Model::from_list(2, &[&[1, 0], &[-1, 0], &[0, 1]]);
    assert_eq!(valuation_maps(&m), Err(ValuationError::MissingNegativeStep(1)));
}

fn arb_model() -> impl Strategy<Value = Model> {
    let step = proptest::collection::vec(-1i8..=1, 2).prop_filter("nonzero", |c| c != &[0, 0]);
    proptest::collection::vec((step, 1u32..=3), 2..=8)
        .prop_map(|v| Model::new(2, v.iter().map(|(c, k)| (Step::new(c), *k))))
        .prop_filter("both directions on each axis", |m| (0..2).all(|i| m.has_positive(i) && m.has_negative(i)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn maps_match_the_step_list_and_are_involutions(m in arb_model(), a in -50i64..50, b in -50i64..50) {
        let vm = valuation_maps(&m).unwrap();
        prop_assert_eq!(vm.phi((a, b)), Some(naive_phi(&m, (a, b))));
        prop_assert_eq!(vm.psi((a, b)), Some(naive_psi(&m, (a, b))));
        prop_assert_eq!(vm.phi(vm.phi((a, b)).unwrap()), Some((a, b)));
        prop_assert_eq!(vm.psi(vm.psi((a, b)).unwrap()), Some((a, b)));
    }

    #[test]
    fn certificates_replay(m in arb_model()) {
        let c = certify_infinite_valuation(&m, &DEFAULT_STARTS, DEFAULT_MAX_STEPS).unwrap();
        if let Some(p) = &c.pattern {
            prop_assert!(p.increment != (0, 0));
            prop_assert!(audit_pattern(&c.maps, p, 10));
            let mut s = p.start;
            for k in 0..p.offset + 5 * p.period {
                s = if k % 2 == 0 { naive_phi(&m, s) } else { naive_psi(&m, s) };
            }
            prop_assert_eq!(replay(&c.maps, p, 5), Some(s));
        }
    }
}
