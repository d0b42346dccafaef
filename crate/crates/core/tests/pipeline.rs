use quadwalk::asymptotics::reduces_to_non_dfinite_base;
use quadwalk::corpora;
use quadwalk::model::fixtures;
use quadwalk::pipeline::{
    batch, classify, classify_model, verify, BatchOutcome, ClassificationReport, Config, GroupStatus, InfiniteMethod,
    NonDFiniteStatus, Route,
};
use quadwalk::{parse_corpus, parse_model, Model};

fn reports(entries: &[quadwalk::pipeline::BatchEntry]) -> Vec<&ClassificationReport> {
    entries
        .iter()
        .map(|e| match &e.outcome {
            BatchOutcome::Report(r) => r.as_ref(),
            BatchOutcome::ParseError(msg) => panic!("line {}: {msg}", e.line),
        })
        .collect()
}

/// Distinct steps, sorted.
fn step_set(m: &Model) -> Vec<Vec<i8>> {
    let mut v: Vec<Vec<i8>> = m.steps().iter().map(|(s, _)| (0..m.dim()).map(|i| s.coord(i)).collect()).collect();
    v.sort();
    v
}

#[test]
fn singular_corpus_classes_match_the_annotations() {
    for (line, m) in parse_corpus(corpora::WEIGHTED_SINGULAR) {
        let m = m.unwrap();
        assert!(m.is_singular(), "line {line}");
        let text = corpora::WEIGHTED_SINGULAR.lines().nth(line - 1).unwrap();
        let class = parse_model(text.split(':').nth(1).unwrap()).unwrap();
        let (reduced, _) = m.reduce_multiset();
        let ours = step_set(&reduced);
        assert!(ours == step_set(&class) || ours == step_set(&class.xy_reflection()), "line {line}");
    }
}

#[test]
fn singular_corpus_verdicts() {
    let (entries, summary) = batch(corpora::WEIGHTED_SINGULAR, &Config::default(), None);
    let rs = reports(&entries);
    assert_eq!(rs.len(), 43);
    let certified =
        rs.iter().filter(|r| r.nondfinite == NonDFiniteStatus::Certified { route: Route::SingularReduction }).count();
    let conjectured = rs.iter().filter(|r| r.nondfinite == NonDFiniteStatus::Conjectured).count();
    assert_eq!((certified, conjectured), (18, 25));
    assert_eq!(summary.models, 43);
    for r in &rs {
        assert_eq!(r.singular, Some(true));
        assert!(matches!(r.group, GroupStatus::Infinite { .. }), "{}", r.model);
        assert!(verify(r).passed(), "{}", r.model);
    }
    // exactly the first 18 rows reduce to a base step set
    let first: Vec<bool> = rs.iter().map(|r| reduces_to_non_dfinite_base(&parse_model(&r.model).unwrap())).collect();
    assert!(first[..18].iter().all(|&b| b) && first[18..].iter().all(|&b| !b));
}

#[test]
fn singular_bases_need_the_valuation_argument() {
    let (entries, _) = batch(corpora::SINGULAR5, &Config::default(), Some(2));
    for r in reports(&entries) {
        assert_eq!(r.group, GroupStatus::Infinite { method: InfiniteMethod::Valuation }, "{}", r.model);
        assert!(verify(r).passed());
    }
}

#[test]
fn irrational_exponent_report() {
    let r = classify_model(&fixtures::example_fixed_point(), &Config::default());
    assert_eq!(r.group, GroupStatus::Infinite { method: InfiniteMethod::FixedPoint });
    assert_eq!(r.nondfinite, NonDFiniteStatus::Certified { route: Route::IrrationalExponent });
    assert!(r.evidence.fixed_point.as_ref().unwrap().eigenvalue_polynomial.is_some());
    assert!(verify(&r).passed());
}

#[test]
fn reports_are_reproducible() {
    let config = Config::default();
    let a = serde_json::to_string(&classify("-1 0; -1 1×3; 0 -1; 1 1", &config).unwrap()).unwrap();
    let b = serde_json::to_string(&classify("[[-1,0],[-1,1],[-1,1],[-1,1],[0,-1],[1,1]]", &config).unwrap()).unwrap();
    assert_eq!(a, b);
    let back: ClassificationReport = serde_json::from_str(&a).unwrap();
    assert!(verify(&back).passed());
}

#[test]
fn batch_keeps_input_order_and_reports_bad_lines() {
    let corpus = "[[1,0],[-1,0],[0,1],[0,-1]]\n\n2 2; 1 0\n[[-1,0],[0,-1],[1,1]]\n";
    let (entries, summary) = batch(corpus, &Config::default(), Some(3));
    assert_eq!(entries.iter().map(|e| e.line).collect::<Vec<_>>(), vec![1, 3, 4]);
    assert!(matches!(entries[1].outcome, BatchOutcome::ParseError(_)));
    assert_eq!(summary.parse_errors, 1);
    assert_eq!(summary.group["finite(4)"], 1);
    assert_eq!(summary.group["finite(6)"], 1);
}

#[test]
fn tampered_evidence_is_rejected() {
    let mut r = classify_model(&fixtures::example_valuation(), &Config::default());
    let ev = r.evidence.valuation.as_mut().unwrap();
    ev.certificate.pattern.as_mut().unwrap().increment.0 += 1;
    assert!(!verify(&r).passed());

    let mut r = classify_model(&fixtures::example_fixed_point(), &Config::default());
    r.model = fixtures::tandem().to_string();
    assert!(!verify(&r).passed());
}

#[test]
fn three_dimensional_walk() {
    let r = classify_model(&fixtures::simple_walk_3d(), &Config::default());
    assert_eq!(r.group, GroupStatus::Finite { order: 8 });
    assert_eq!(r.singular, None);
    assert!(r.asymptotics.is_none());
}
