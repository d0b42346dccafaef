use num_rational::BigRational;
use proptest::prelude::*;
use quadwalk::algebra::rat;
use quadwalk::group::{enumerate_elements, orbit_search, BirationalMap, GroupOrder, RationalFunction};
use quadwalk::model::fixtures;
use quadwalk::{parse_model, Model, Step};

/// Models with a positive and a negative step along every axis.
fn arb_model() -> impl Strategy<Value = Model> {
    (2usize..=3)
        .prop_flat_map(|dim| {
            let step = proptest::collection::vec(-1i8..=1, dim).prop_filter("nonzero", |c| c.iter().any(|&v| v != 0));
            (Just(dim), proptest::collection::vec((step, 1u32..=3), 2..=7))
        })
        .prop_map(|(dim, steps)| Model::new(dim, steps.iter().map(|(c, k)| (Step::new(c), *k))))
        .prop_filter("every axis has both directions", |m| (0..m.dim()).all(|i| m.has_positive(i) && m.has_negative(i)))
}

fn order(m: &Model) -> GroupOrder {
    orbit_search(m, 200, 0).unwrap().verdict
}

/// Evaluates the step polynomial directly from the step list.
fn chi_at(m: &Model, p: &[BigRational]) -> BigRational {
    let mut sum = rat(0, 1);
    for (s, k) in m.steps() {
        let mut term = rat(i64::from(*k), 1);
        for (i, x) in p.iter().enumerate() {
            let e = i32::from(s.coord(i));
            term *= if e >= 0 { num_traits::pow(x.clone(), e as usize) } else { x.recip() };
        }
        sum += term;
    }
    sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn generators_are_involutions_preserving_the_step_polynomial(
        m in arb_model(),
        point in proptest::collection::vec((1i64..=9, 1i64..=9), 3),
    ) {
        let p: Vec<BigRational> = point[..m.dim()].iter().map(|&(a, b)| rat(a, b)).collect();
        let chi = RationalFunction::from_poly(m.characteristic_polynomial());
        for g in BirationalMap::generators(&m).unwrap() {
            prop_assert!(BirationalMap::compose(&g, &g).unwrap().is_identity());
            prop_assert_eq!(&chi.substitute(&g).unwrap(), &chi);
            let image = g.eval(&p).unwrap();
            prop_assert_eq!(chi_at(&m, &image), chi_at(&m, &p));
            prop_assert_eq!(g.eval(&image).unwrap(), p.clone());
        }
    }

    /// A step set symmetric under y ↦ -y has a group of order 4.
    #[test]
    fn vertically_symmetric_models_have_order_four(m in arb_model()) {
        prop_assume!(m.dim() == 2);
        let sym = Model::new(2, m.steps().iter().flat_map(|(s, k)| {
            [(*s, *k), (Step::new(&[s.coord(0), -s.coord(1)]), *k)]
        }));
        prop_assert_eq!(order(&sym), GroupOrder::Finite(4));
    }
}

#[test]
fn known_orders() {
    let cases = [
        ("[[1,0],[-1,0],[0,1],[0,-1]]", 4),
        ("[[-1,0],[0,-1],[1,1]]", 6),
        ("[[1,0],[0,1],[-1,-1]]", 6),
        ("[[1,0],[-1,0],[0,1],[0,-1],[1,1],[-1,-1]]", 6),
        ("[[1,0],[-1,0],[1,1],[-1,-1]]", 8),
        ("[[1,0],[-1,0],[-1,1],[1,-1]]", 8),
    ];
    for (text, n) in cases {
        let m = parse_model(text).unwrap();
        assert_eq!(order(&m), GroupOrder::Finite(n), "{text}");
        assert_eq!(enumerate_elements(&m, 20).unwrap().unwrap().len(), n as usize, "{text}");
    }
    assert_eq!(order(&fixtures::simple_walk_3d()), GroupOrder::Finite(8));
    assert_eq!(order(&fixtures::example_fixed_point()), GroupOrder::ExceedsBound(200));
}

#[test]
fn order_does_not_depend_on_the_seed() {
    for m in [fixtures::kreweras(), fixtures::tandem(), fixtures::example_valuation()] {
        let base = order(&m);
        for seed in 1..5 {
            assert_eq!(orbit_search(&m, 200, seed).unwrap().verdict, base);
        }
    }
}
