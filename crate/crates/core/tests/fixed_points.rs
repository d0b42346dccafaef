use proptest::prelude::*;
use quadwalk::algebra::{rat, real_roots, resultant, strip_cyclotomic, to_f64, MultiPoly, UniPoly};
use quadwalk::fixed_point::{
    certify_infinite_2d, certify_system, check_box, eigenvalue_polynomial, jacobian, solve_fixed_points,
    FixedPointEvidence, FixedPointSystem, FixedPointWitness, FixedPoints,
};
use quadwalk::group::{orbit_search, GroupOrder};
use quadwalk::model::fixtures;
use quadwalk::Model;

const SMALL_STEPS: [[i8; 2]; 8] = [[-1, -1], [-1, 0], [-1, 1], [0, -1], [0, 1], [1, -1], [1, 0], [1, 1]];

fn model_from_mask(mask: u8, mult: &[u32]) -> Model {
    let steps: Vec<(quadwalk::Step, u32)> =
        (0..8).filter(|i| mask >> i & 1 == 1).map(|i| (quadwalk::Step::new(&SMALL_STEPS[i]), mult[i])).collect();
    Model::new(2, steps)
}

fn all_axes_covered(m: &Model) -> bool {
    (0..2).all(|a| m.has_positive(a) && m.has_negative(a))
}

/// Naive route: every common root with `xy ≠ 0`, located by isolating the
/// real roots of `res_y(E₁, E₂)` and substituting back into `E₁`, `E₂`.
fn naive_real_fixed_points(sys: &FixedPointSystem) -> Vec<(f64, f64)> {
    let (e1, e2) = sys.equations();
    let ex = sys.x_eliminant();
    if ex.is_zero() || ex.is_constant() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for x0 in real_roots(&ex) {
        let x = x0.refine(&rat(1, 1 << 50)).to_f64();
        let r2 = sys.p2.eval_f64(x) / sys.q2.eval_f64(x);
        if r2 <= 0.0 {
            continue;
        }
        for y in [r2.sqrt(), -r2.sqrt()] {
            let scale = 1.0 + x.abs().powi(2) + y.abs().powi(4);
            if eval_f64(&e1, x, y).abs() < 1e-7 * scale && eval_f64(&e2, x, y).abs() < 1e-7 * scale {
                out.push((x, y));
            }
        }
    }
    out
}

fn eval_f64(p: &MultiPoly, x: f64, y: f64) -> f64 {
    p.terms().map(|(e, c)| to_f64(c) * x.powi(e[0]) * y.powi(e[1])).sum()
}

#[test]
fn weighted_example_quintic_and_octic() {
    let m = fixtures::example_fixed_point();
    let sys = FixedPointSystem::from_model(&m).unwrap();
    let quintic = UniPoly::from_ints(&[-3, 9, -1, -6, 0, 1]);
    assert!(quintic.divides(&sys.x_eliminant()));
    // −1 − 3y + x²y = 0 on every root of the quintic
    let rel = MultiPoly::from_terms(2, [([0, 0, 0], rat(-1, 1)), ([0, 1, 0], rat(-3, 1)), ([2, 1, 0], rat(1, 1))]);
    let (_, e2) = sys.equations();
    let r = resultant(&rel, &e2, 1).unwrap().to_unipoly(0).unwrap();
    assert!(quintic.divides(&r));
    let (q, _) = eigenvalue_polynomial(&sys).unwrap();
    assert!(UniPoly::from_ints(&[1, 1, 1]).divides(&q));
    let octic = UniPoly::from_ints(&[27, -243, -2051, -5587, -7611, -5587, -2051, -243, 27]);
    assert!(octic.divides(&q));
    let (cyc, rem) = strip_cyclotomic(&octic).unwrap();
    assert_eq!((cyc, rem), (UniPoly::one(), octic));
}

#[test]
fn weighted_example_certificate_has_real_witness() {
    let cert = certify_infinite_2d(&fixtures::example_fixed_point()).unwrap();
    assert!(cert.is_infinite());
    let FixedPointEvidence::NonCyclotomicFactor { factor, witness, .. } = &cert.evidence else { panic!() };
    assert_eq!(factor.deg(), 8);
    assert!(matches!(witness, FixedPointWitness::Real { .. }));
}

#[test]
fn fixed_point_method_fails_without_fixed_points() {
    let m = fixtures::example_valuation();
    let sys = FixedPointSystem::from_model(&m).unwrap();
    assert_eq!(sys.p1, UniPoly::from_ints(&[0, 0, 2]));
    assert_eq!(sys.q1, UniPoly::from_ints(&[1, 1]));
    assert_eq!(sys.p2, UniPoly::from_ints(&[0, 0, 1]));
    assert_eq!(sys.q2, UniPoly::from_ints(&[2]));
    // the only common roots have x = 0
    let (e1, e2) = sys.equations();
    let r = resultant(&e1, &e2, 1).unwrap().to_unipoly(0).unwrap();
    assert_eq!(r.strip_x_factors().deg(), 0);
    assert!(matches!(solve_fixed_points(&sys), FixedPoints::NoFixedPoint));
    assert_eq!(certify_infinite_2d(&m).unwrap().evidence, FixedPointEvidence::NoFixedPoint);
}

#[test]
fn real_boxes_match_naive_route() {
    for mask in 1u8..=255 {
        let m = model_from_mask(mask, &[1; 8]);
        if !all_axes_covered(&m) {
            continue;
        }
        let sys = FixedPointSystem::from_model(&m).unwrap();
        let FixedPoints::Isolated(sol) = solve_fixed_points(&sys) else { continue };
        let mut ours: Vec<(f64, f64)> = sol
            .boxes
            .iter()
            .map(|b| {
                let mut b = b.clone();
                b.refine(&rat(1, 1 << 50));
                (b.x.to_f64(), b.y.to_f64())
            })
            .collect();
        let mut naive = naive_real_fixed_points(&sys);
        ours.sort_by(|a, b| a.partial_cmp(b).unwrap());
        naive.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(ours.len(), naive.len(), "{m}");
        for (a, b) in ours.iter().zip(&naive) {
            assert!((a.0 - b.0).abs() < 1e-6 && (a.1 - b.1).abs() < 1e-6, "{m}: {a:?} vs {b:?}");
        }
    }
}

#[test]
fn small_step_models_agree_with_orbit_search() {
    let mut infinite = 0;
    for mask in 1u8..=255 {
        let m = model_from_mask(mask, &[1; 8]);
        if !all_axes_covered(&m) {
            continue;
        }
        let cert = certify_infinite_2d(&m).unwrap();
        if cert.is_infinite() {
            infinite += 1;
            let orbit = orbit_search(&m, 200, 7).unwrap();
            assert_eq!(orbit.verdict, GroupOrder::ExceedsBound(200), "{m}");
        }
    }
    assert!(infinite > 0);
}

fn reciprocal(q: &UniPoly) -> bool {
    let r = q.reversed().primitive();
    let q = q.primitive();
    r == q || r == -&q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn infinite_certificates_are_confirmed(mask in 1u8..=255, mult in proptest::collection::vec(1u32..=3, 8)) {
        let m = model_from_mask(mask, &mult);
        prop_assume!(all_axes_covered(&m));
        let cert = certify_infinite_2d(&m).unwrap();
        if cert.is_infinite() {
            prop_assert_eq!(orbit_search(&m, 200, 11).unwrap().verdict, GroupOrder::ExceedsBound(200));
        }
    }

    #[test]
    fn eigenvalue_polynomial_is_reciprocal(mask in 1u8..=255, mult in proptest::collection::vec(1u32..=3, 8)) {
        let m = model_from_mask(mask, &mult);
        prop_assume!(all_axes_covered(&m));
        let sys = FixedPointSystem::from_model(&m).unwrap();
        if let Some((q, _)) = eigenvalue_polynomial(&sys) {
            prop_assert!(!q.is_zero());
            prop_assert!(reciprocal(&q));
        }
    }

    #[test]
    fn determinant_one_and_common_fixed_points(mask in 1u8..=255, mult in proptest::collection::vec(1u32..=3, 8)) {
        let m = model_from_mask(mask, &mult);
        prop_assume!(all_axes_covered(&m));
        let sys = FixedPointSystem::from_model(&m).unwrap();
        if let FixedPoints::Isolated(sol) = solve_fixed_points(&sys) {
            let det = jacobian(&sys).det;
            prop_assert_eq!(sol.annihilator(&det.num, &det.den), UniPoly::from_ints(&[-1, 1]));
            for bx in &sol.boxes {
                let c = check_box(&sys, bx, &rat(1, 1 << 30)).unwrap();
                prop_assert!(c.det_contains_one && c.phi_fixes && c.psi_fixes);
            }
        }
    }
}

#[test]
fn certificate_is_deterministic() {
    let sys = FixedPointSystem::from_model(&fixtures::example_fixed_point()).unwrap();
    assert_eq!(certify_system(&sys), certify_system(&sys));
}
