use num_rational::BigRational;
use quadwalk::algebra::{
    chebyshev_t, is_cos_rational_multiple_of_pi, rat, to_f64, AlgebraicNumber, Interval, MultiPoly, PiMultiple, UniPoly,
};
use quadwalk::asymptotics::{
    correlation_c, critical_point, nondfinite_verdict, periodicity, singular_exponent, AsymptoticsError,
    ExponentVerdict, NonDFiniteRoute,
};
use quadwalk::counting::{count_walks, empirical_growth, log_counts, Endpoint};
use quadwalk::fixed_point::FixedPointSystem;
use quadwalk::model::fixtures;
use quadwalk::{parse_model, Model, Step};

const SMALL_STEPS: [[i8; 2]; 8] = [[-1, -1], [-1, 0], [-1, 1], [0, -1], [0, 1], [1, -1], [1, 0], [1, 1]];

fn model_from_mask(mask: u8) -> Model {
    Model::new(2, (0..8).filter(|i| mask >> i & 1 == 1).map(|i| (Step::new(&SMALL_STEPS[i]), 1)))
}

fn eval(p: &MultiPoly, x: f64, y: f64) -> f64 {
    p.terms().map(|(e, c)| to_f64(c) * x.powi(e[0]) * y.powi(e[1])).sum()
}

/// Newton's method on the gradient in logarithmic coordinates, which keeps
/// the iterate positive; returns `(x₀, y₀, ρ, c)`.
fn numeric_critical_point(m: &Model) -> (f64, f64, f64, f64) {
    let chi = m.characteristic_polynomial();
    let (cx, cy) = (chi.derivative(0), chi.derivative(1));
    let (cxx, cyy, cxy) = (cx.derivative(0), cy.derivative(1), cx.derivative(1));
    let (mut u, mut v) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let (x, y) = (u.exp(), v.exp());
        // g = (x·χ_x, y·χ_y) as a function of (u, v)
        let g = [x * eval(&cx, x, y), y * eval(&cy, x, y)];
        let j11 = x * eval(&cx, x, y) + x * x * eval(&cxx, x, y);
        let j22 = y * eval(&cy, x, y) + y * y * eval(&cyy, x, y);
        let j12 = x * y * eval(&cxy, x, y);
        let det = j11 * j22 - j12 * j12;
        u -= (j22 * g[0] - j12 * g[1]) / det;
        v -= (j11 * g[1] - j12 * g[0]) / det;
    }
    let (x, y) = (u.exp(), v.exp());
    let c = eval(&cxy, x, y) / (eval(&cxx, x, y) * eval(&cyy, x, y)).sqrt();
    (x, y, eval(&chi, x, y), c)
}

fn value(a: &AlgebraicNumber) -> f64 {
    a.refine(&rat(1, 1 << 50)).to_f64()
}

#[test]
fn exact_fixtures() {
    let cases = [
        (fixtures::simple_walk(), 4, rat(0, 1), rat(-3, 1)),
        (fixtures::tandem(), 3, rat(-1, 2), rat(-4, 1)),
        (fixtures::reverse_kreweras(), 3, rat(1, 2), rat(-5, 2)),
    ];
    for (m, rho, c, alpha) in cases {
        let a = singular_exponent(&m).unwrap();
        assert_eq!(a.x0.rational_value(), Some(rat(1, 1)), "{m}");
        assert_eq!(a.y0.rational_value(), Some(rat(1, 1)), "{m}");
        assert_eq!(a.rho.rational_value(), Some(rat(rho, 1)), "{m}");
        assert_eq!(a.c.rational_value(), Some(c), "{m}");
        assert_eq!(a.alpha.value(), Some(alpha.clone()), "{m}");
        let (lo, hi) = (a.alpha_numeric.0 .0, a.alpha_numeric.1 .0);
        let exact = to_f64(&alpha);
        assert!(lo <= exact && exact <= hi);
        let w = a.chebyshev_witness.unwrap();
        assert!(a.c.neg().is_root_of(&w));
    }
}

#[test]
fn half_plane_models_are_rejected() {
    let m = parse_model("[[-1,1],[1,-1],[1,1]]").unwrap();
    assert_eq!(critical_point(&m).unwrap_err(), AsymptoticsError::HalfPlaneContained { normal: (1, 1) });
    assert!(matches!(singular_exponent(&fixtures::simple_walk_3d()), Err(AsymptoticsError::NotPlanar(3))));
}

#[test]
fn periods() {
    assert_eq!(periodicity(&fixtures::simple_walk(), 60), Ok(2));
    assert_eq!(periodicity(&fixtures::kreweras(), 60), Ok(3));
    let m = parse_model("[[1,0],[-1,0],[1,1],[-1,-1],[0,1],[0,-1]]").unwrap();
    let s = count_walks(&m, 3, &Endpoint::Origin).unwrap();
    assert!(s.terms[2] > 0u32.into() && s.terms[3] > 0u32.into());
    assert_eq!(periodicity(&m, 60), Ok(1));
    let never = parse_model("[[1,0],[0,1],[1,-1]]").unwrap();
    assert_eq!(periodicity(&never, 60), Err(AsymptoticsError::NoExcursionFound(60)));
}

/// The exact pipeline against a floating-point Newton solve of the gradient
/// system, over every small-step set not contained in a half-plane.
#[test]
fn exact_and_numeric_routes_agree() {
    let mut seen = 0;
    for mask in 1u8..=255 {
        let m = model_from_mask(mask);
        if m.half_plane_normal().is_some() {
            continue;
        }
        seen += 1;
        let a = singular_exponent(&m).unwrap();
        let (x, y, rho, c) = numeric_critical_point(&m);
        assert!((value(&a.x0) - x).abs() < 1e-9, "{m}");
        assert!((value(&a.y0) - y).abs() < 1e-9, "{m}");
        assert!((value(&a.rho) - rho).abs() < 1e-9, "{m}");
        assert!((value(&a.c) - c).abs() < 1e-9, "{m}");
        let r = value(&a.rho);
        assert!((1.0..=m.cardinality() as f64).contains(&r), "{m}");
        assert!(a.c.within(&Interval::new(rat(-1, 1), rat(1, 1))));
        if let ExponentVerdict::Rational { .. } = a.alpha {
            let w = a.chebyshev_witness.as_ref().unwrap();
            assert!(!w.is_constant() && a.c.neg().is_root_of(w));
        }
    }
    assert!(seen > 50);
}

#[test]
fn gradient_vanishes_on_refined_boxes() {
    for m in [fixtures::example_fixed_point(), fixtures::tandem(), fixtures::kreweras()] {
        let cp = critical_point(&m).unwrap();
        let chi = m.characteristic_polynomial();
        let sys = FixedPointSystem::from_model(&m).unwrap();
        assert!(cp.x0.is_root_of(&sys.x_eliminant()));
        let mut prev = None;
        for k in [10u32, 20, 40] {
            let mut b = cp.point().clone();
            b.refine(&rat(1, 1i64 << k));
            for var in 0..2 {
                let g = chi.derivative(var).eval_interval(&b.intervals()).unwrap();
                assert!(g.contains_zero());
                if var == 0 {
                    if let Some(p) = &prev {
                        assert!(g.width() < *p);
                    }
                    prev = Some(g.width());
                }
            }
        }
    }
}

#[test]
fn weighted_example_exponent_is_irrational() {
    let m = fixtures::example_fixed_point();
    let a = singular_exponent(&m).unwrap();
    assert_eq!(a.alpha, ExponentVerdict::Irrational);
    assert_eq!(a.angle, PiMultiple::Irrational);
    assert!(a.chebyshev_witness.is_none());
    let c = correlation_c(&critical_point(&m).unwrap()).unwrap();
    assert_eq!(c, a.c);
    // no T_q(−c) = ±1 for any q up to the admissible range
    let neg = a.c.neg();
    for q in 1..=40u32 {
        for s in [-1, 1] {
            let g = UniPoly::gcd(neg.annihilator(), &(&chebyshev_t(q) - &UniPoly::from_ints(&[s])));
            assert!(g.is_constant() || !neg.is_root_of(&g));
        }
    }
    let v = nondfinite_verdict(&m);
    assert!(v.nondfinite);
    assert_eq!(v.route, NonDFiniteRoute::IrrationalExponent);
}

#[test]
fn verdicts() {
    assert!(!nondfinite_verdict(&fixtures::simple_walk()).nondfinite);
    let row4 = parse_model("[[-1,1],[-1,1],[-1,1],[1,-1],[1,1]]").unwrap();
    assert_eq!(nondfinite_verdict(&row4).route, NonDFiniteRoute::SingularReduction);
    let reflected = parse_model("[[-1,1],[1,-1],[1,0],[1,0]]").unwrap();
    assert_eq!(nondfinite_verdict(&reflected).route, NonDFiniteRoute::SingularReduction);
    let other = parse_model("[[-1,1],[1,-1],[0,1],[1,0]]").unwrap();
    assert_eq!(nondfinite_verdict(&other).route, NonDFiniteRoute::None);
}

#[test]
fn niven_values() {
    for q in 1..=12u64 {
        for p in 0..=q {
            if num_integer::gcd(p, q) != 1 {
                continue;
            }
            let v = (p as f64 * std::f64::consts::PI / q as f64).cos();
            let ann = &chebyshev_t(q as u32) - &UniPoly::from_ints(&[if p % 2 == 0 { 1 } else { -1 }]);
            let enclosure =
                Interval::new(BigRational::from_float(v - 1e-6).unwrap(), BigRational::from_float(v + 1e-6).unwrap());
            let roots = AlgebraicNumber::roots_in(&ann, &enclosure);
            assert_eq!(roots.len(), 1);
            assert_eq!(is_cos_rational_multiple_of_pi(&roots[0]), Ok(PiMultiple::Rational { p, q }), "{p}/{q}");
        }
    }
    for r in [rat(1, 4), rat(1, 3)] {
        let a = AlgebraicNumber::from_rational(&r);
        assert_eq!(is_cos_rational_multiple_of_pi(&a), Ok(PiMultiple::Irrational));
    }
}

#[test]
fn empirical_exponent_matches() {
    for m in [fixtures::simple_walk(), fixtures::tandem()] {
        let a = singular_exponent(&m).unwrap();
        let p = periodicity(&m, 60).unwrap();
        let rho = value(&a.rho);
        let l = log_counts(&m, 600, &Endpoint::Origin).unwrap();
        let g = empirical_growth(&l, p, Some(rho)).unwrap();
        let mid = (a.alpha_numeric.0 .0 + a.alpha_numeric.1 .0) / 2.0;
        assert!((g.alpha - mid).abs() <= 0.1, "{m}: {} vs {mid}", g.alpha);
        assert!((g.rho - rho).abs() <= 0.01 * rho);
        // lim sup e_n^{1/n} stays below ρ
        let last = (0..l.len()).rev().find(|&n| l[n].is_finite()).unwrap();
        assert!((l[last] / last as f64).exp() <= rho + 0.05);
    }
}
