//! End-to-end classification of models and corpora.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{int, is_cos_rational_multiple_of_pi, rat, strip_cyclotomic, PiMultiple};
use crate::asymptotics::{
    nondfinite_verdict_from, periodicity, reduces_to_non_dfinite_base, singular_exponent, Asymptotics,
    AsymptoticsError, ExponentVerdict, NonDFiniteEvidence, NonDFiniteRoute, NonDFiniteVerdict, DEFAULT_PERIOD_HORIZON,
};
use crate::fixed_point::{
    certify_infinite_2d, certify_infinite_3d, eigenvalue_polynomial, CertificateVerdict, FixedPointEvidence,
    FixedPointSystem, GroupCertificate, GroupCertificate3d,
};
use crate::group::{orbit_search, GroupOrder, OrbitResult};
use crate::model::{parse_corpus, parse_model, Model, ParseError};
use crate::valuation::{
    audit_pattern, certify_infinite_valuation, valuation_maps, ValuationOrbitCertificate, ValuationVerdict,
    DEFAULT_MAX_STEPS, DEFAULT_STARTS,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub bound: u64,
    pub seed: u64,
    #[serde(with = "crate::algebra::rational_str")]
    pub specialization: BigRational,
    pub period_horizon: usize,
    pub valuation_steps: usize,
    /// Try the valuation argument before the fixed-point argument.
    pub valuation_first: bool,
    pub timings: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            bound: 200,
            seed: 0,
            specialization: rat(1, 7),
            period_horizon: DEFAULT_PERIOD_HORIZON,
            valuation_steps: DEFAULT_MAX_STEPS,
            valuation_first: false,
            timings: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfiniteMethod {
    FixedPoint,
    Valuation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GroupStatus {
    Finite { order: u64 },
    Infinite { method: InfiniteMethod },
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NonDFiniteStatus {
    Certified {
        route: Route,
    },
    /// Singular with an infinite group but no certificate.
    Conjectured,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    IrrationalExponent,
    SingularReduction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsSummary {
    pub rho: f64,
    pub alpha: (f64, f64),
    pub alpha_verdict: ExponentVerdict,
    pub period: Option<usize>,
}

/// Valuation certificate of the model itself, or of its projection along
/// `projection_axis` for 3D models.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationEvidence {
    pub projection_axis: Option<usize>,
    pub certificate: ValuationOrbitCertificate,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub orbit: Option<OrbitResult>,
    pub fixed_point: Option<GroupCertificate>,
    pub fixed_point_3d: Option<GroupCertificate3d>,
    pub valuation: Option<ValuationEvidence>,
    pub asymptotics: Option<Asymptotics>,
    pub nondfinite: Option<NonDFiniteVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub stages_ms: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema_version: u32,
    pub artifact_version: String,
    pub model: String,
    pub dimension: usize,
    pub effective_dimension: usize,
    pub singular: Option<bool>,
    pub group: GroupStatus,
    pub nondfinite: NonDFiniteStatus,
    pub asymptotics: Option<AsymptoticsSummary>,
    pub evidence: Evidence,
    pub stage_errors: Vec<StageError>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<Timings>,
}

struct Clock {
    enabled: bool,
    timings: Timings,
}

impl Clock {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        if !self.enabled {
            return f();
        }
        let t = Instant::now();
        let out = f();
        self.timings.stages_ms.insert(stage.to_string(), t.elapsed().as_secs_f64() * 1e3);
        out
    }
}

pub fn classify(text: &str, config: &Config) -> Result<ClassificationReport, ParseError> {
    Ok(classify_model(&parse_model(text)?, config))
}

pub fn classify_model(m: &Model, config: &Config) -> ClassificationReport {
    let mut clock = Clock { enabled: config.timings, timings: Timings::default() };
    let mut errors = Vec::new();
    let mut evidence = Evidence::default();
    let mut record = |stage: &str, e: &dyn std::fmt::Display| {
        errors.push(StageError { stage: stage.to_string(), message: e.to_string() })
    };

    let effective_dimension = clock.time("dimension", || m.dimension());
    let singular = (m.dim() == 2).then(|| m.is_singular());

    let mut group = GroupStatus::Unknown;
    match clock.time("orbit", || orbit_search(m, config.bound, config.seed)) {
        Ok(r) => {
            if let GroupOrder::Finite(order) = r.verdict {
                group = GroupStatus::Finite { order };
            }
            evidence.orbit = Some(r);
        }
        Err(e) => record("orbit", &e),
    }
    let unbounded = matches!(evidence.orbit, Some(OrbitResult { verdict: GroupOrder::ExceedsBound(_), .. }));
    if unbounded {
        let order: [InfiniteMethod; 2] = if config.valuation_first {
            [InfiniteMethod::Valuation, InfiniteMethod::FixedPoint]
        } else {
            [InfiniteMethod::FixedPoint, InfiniteMethod::Valuation]
        };
        for method in order {
            let proved = match method {
                InfiniteMethod::FixedPoint => {
                    clock.time("fixed_point", || fixed_point_stage(m, config, &mut evidence, &mut record))
                }
                InfiniteMethod::Valuation => {
                    clock.time("valuation", || valuation_stage(m, config, &mut evidence, &mut record))
                }
            };
            if proved {
                group = GroupStatus::Infinite { method };
                break;
            }
        }
    }

    let mut asymptotics = None;
    let mut nondfinite = NonDFiniteStatus::Unknown;
    if m.dim() == 2 {
        let exponent =
            clock.time(
                "asymptotics",
                || {
                    if m.half_plane_normal().is_some() {
                        None
                    } else {
                        Some(singular_exponent(m))
                    }
                },
            );
        match &exponent {
            Some(Ok(a)) => {
                let period = match periodicity(m, config.period_horizon) {
                    Ok(p) => Some(p),
                    Err(e) => {
                        record("periodicity", &e);
                        None
                    }
                };
                asymptotics = Some(AsymptoticsSummary {
                    rho: a.rho.refine(&rat(1, 1 << 50)).to_f64(),
                    alpha: (a.alpha_numeric.0 .0, a.alpha_numeric.1 .0),
                    alpha_verdict: a.alpha,
                    period,
                });
                evidence.asymptotics = Some(a.clone());
            }
            Some(Err(e)) => record("asymptotics", e),
            None => {}
        }
        let v = nondfinite_verdict_from(m, || match exponent {
            Some(r) => r,
            None => Err(AsymptoticsError::HalfPlaneContained { normal: m.half_plane_normal().unwrap_or_default() }),
        });
        nondfinite = match v.route {
            NonDFiniteRoute::IrrationalExponent if v.nondfinite => {
                NonDFiniteStatus::Certified { route: Route::IrrationalExponent }
            }
            NonDFiniteRoute::SingularReduction if v.nondfinite => {
                NonDFiniteStatus::Certified { route: Route::SingularReduction }
            }
            _ if singular == Some(true) && matches!(group, GroupStatus::Infinite { .. }) => {
                NonDFiniteStatus::Conjectured
            }
            _ => NonDFiniteStatus::Unknown,
        };
        evidence.nondfinite = Some(v);
    }

    ClassificationReport {
        schema_version: SCHEMA_VERSION,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        model: m.to_string(),
        dimension: m.dim(),
        effective_dimension,
        singular,
        group,
        nondfinite,
        asymptotics,
        evidence,
        stage_errors: errors,
        timings: config.timings.then_some(clock.timings),
    }
}

fn fixed_point_stage(
    m: &Model,
    config: &Config,
    evidence: &mut Evidence,
    record: &mut impl FnMut(&str, &dyn std::fmt::Display),
) -> bool {
    if m.dim() == 2 {
        match certify_infinite_2d(m) {
            Ok(c) => {
                let proved = c.is_infinite();
                evidence.fixed_point = Some(c);
                proved
            }
            Err(e) => {
                record("fixed_point", &e);
                false
            }
        }
    } else {
        match certify_infinite_3d(m, &config.specialization) {
            Ok(c) => {
                let proved = c.verdict == CertificateVerdict::InfiniteGroup;
                evidence.fixed_point_3d = Some(c);
                proved
            }
            Err(e) => {
                record("fixed_point", &e);
                false
            }
        }
    }
}

/// Planar models are certified directly. A 3D model is certified through a
/// planar projection whose steps all keep a nonzero image; the involutions
/// of the projection are then restrictions of those of the model.
fn valuation_stage(
    m: &Model,
    config: &Config,
    evidence: &mut Evidence,
    record: &mut impl FnMut(&str, &dyn std::fmt::Display),
) -> bool {
    let candidates: Vec<(Option<usize>, Model)> = if m.dim() == 2 {
        vec![(None, m.clone())]
    } else {
        (0..3).rev().filter_map(|axis| m.project(axis).map(|p| (Some(axis), p))).collect()
    };
    let mut last = None;
    for (projection_axis, planar) in candidates {
        match certify_infinite_valuation(&planar, &DEFAULT_STARTS, config.valuation_steps) {
            Ok(certificate) => {
                let proved = certificate.verdict == ValuationVerdict::InfiniteOrbit;
                last = Some(ValuationEvidence { projection_axis, certificate });
                if proved {
                    evidence.valuation = last;
                    return true;
                }
            }
            Err(e) => record("valuation", &e),
        }
    }
    evidence.valuation = last;
    false
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchEntry {
    pub line: usize,
    #[serde(flatten)]
    pub outcome: BatchOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchOutcome {
    Report(Box<ClassificationReport>),
    ParseError(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub models: usize,
    pub parse_errors: usize,
    pub group: BTreeMap<String, usize>,
    pub nondfinite: BTreeMap<String, usize>,
}

impl fmt::Display for GroupStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupStatus::Finite { order } => write!(f, "finite({order})"),
            GroupStatus::Infinite { method: InfiniteMethod::FixedPoint } => f.write_str("infinite(fixed_point)"),
            GroupStatus::Infinite { method: InfiniteMethod::Valuation } => f.write_str("infinite(valuation)"),
            GroupStatus::Unknown => f.write_str("unknown"),
        }
    }
}

impl fmt::Display for NonDFiniteStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NonDFiniteStatus::Certified { route: Route::IrrationalExponent } => "certified(irrational_exponent)",
            NonDFiniteStatus::Certified { route: Route::SingularReduction } => "certified(singular_reduction)",
            NonDFiniteStatus::Conjectured => "conjectured",
            NonDFiniteStatus::Unknown => "unknown",
        })
    }
}

impl Summary {
    pub fn of(entries: &[BatchEntry]) -> Summary {
        let mut s = Summary::default();
        for e in entries {
            match &e.outcome {
                BatchOutcome::Report(r) => {
                    s.models += 1;
                    *s.group.entry(r.group.to_string()).or_default() += 1;
                    *s.nondfinite.entry(r.nondfinite.to_string()).or_default() += 1;
                }
                BatchOutcome::ParseError(_) => s.parse_errors += 1,
            }
        }
        s
    }
}

/// Classifies every model of a corpus on `jobs` worker threads (all cores
/// when `None`). Entries come back in input order.
pub fn batch(corpus: &str, config: &Config, jobs: Option<usize>) -> (Vec<BatchEntry>, Summary) {
    let parsed = parse_corpus(corpus);
    let run = || {
        parsed
            .par_iter()
            .map(|(line, r)| BatchEntry {
                line: *line,
                outcome: match r {
                    Ok(m) => BatchOutcome::Report(Box::new(classify_model(m, config))),
                    Err(e) => BatchOutcome::ParseError(e.to_string()),
                },
            })
            .collect::<Vec<_>>()
    };
    let entries = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool").install(run),
        None => run(),
    };
    let summary = Summary::of(&entries);
    (entries, summary)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub checks: Vec<(String, bool)>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    fn push(&mut self, name: &str, ok: bool) {
        self.checks.push((name.to_string(), ok));
    }
}

/// Re-checks the certified claims of a report from its stored evidence.
pub fn verify(report: &ClassificationReport) -> Verification {
    let mut v = Verification::default();
    let m = match parse_model(&report.model) {
        Ok(m) => m,
        Err(_) => {
            v.push("model parses", false);
            return v;
        }
    };
    match report.group {
        GroupStatus::Infinite { method: InfiniteMethod::FixedPoint } => {
            if let Some(c) = &report.evidence.fixed_point {
                v.push("fixed-point certificate", check_fixed_point(&m, c));
            } else if let Some(c3) = &report.evidence.fixed_point_3d {
                let ok = c3.verdict == CertificateVerdict::InfiniteGroup
                    && c3.pairings.iter().any(|p| p.certificate.is_infinite() && check_non_cyclotomic(&p.certificate));
                v.push("3D fixed-point certificate", ok);
            } else {
                v.push("fixed-point evidence present", false);
            }
        }
        GroupStatus::Infinite { method: InfiniteMethod::Valuation } => {
            v.push("valuation pattern", check_valuation(&m, report.evidence.valuation.as_ref()));
        }
        _ => {}
    }
    if let NonDFiniteStatus::Certified { route } = report.nondfinite {
        let ok = match route {
            Route::SingularReduction => {
                let (reduced, _) = m.reduce_multiset();
                m.is_singular()
                    && reduces_to_non_dfinite_base(&m)
                    && matches!(&report.evidence.nondfinite, Some(NonDFiniteVerdict {
                        evidence: NonDFiniteEvidence::Reduction { reduced: r, .. }, ..
                    }) if *r == reduced.to_string())
            }
            Route::IrrationalExponent => check_irrational(&m, report.evidence.asymptotics.as_ref()),
        };
        v.push("non-D-finiteness certificate", ok);
    }
    v
}

fn check_non_cyclotomic(c: &GroupCertificate) -> bool {
    let FixedPointEvidence::NonCyclotomicFactor { factor, .. } = &c.evidence else { return false };
    let Some(q) = &c.eigenvalue_polynomial else { return false };
    matches!(strip_cyclotomic(factor), Ok((_, rem)) if !rem.is_constant()) && factor.divides(q)
}

fn check_fixed_point(m: &Model, c: &GroupCertificate) -> bool {
    let Ok(sys) = FixedPointSystem::from_model(m) else { return false };
    let recomputed = eigenvalue_polynomial(&sys).map(|(q, _)| q);
    c.is_infinite() && recomputed == c.eigenvalue_polynomial && check_non_cyclotomic(c)
}

fn check_valuation(m: &Model, ev: Option<&ValuationEvidence>) -> bool {
    let Some(ev) = ev else { return false };
    let planar = match ev.projection_axis {
        None => Some(m.clone()),
        Some(axis) if m.dim() == 3 => m.project(axis),
        Some(_) => None,
    };
    let Some(planar) = planar else { return false };
    let Ok(maps) = valuation_maps(&planar) else { return false };
    let Some(pattern) = &ev.certificate.pattern else { return false };
    maps == ev.certificate.maps && audit_pattern(&maps, pattern, 3)
}

fn check_irrational(m: &Model, a: Option<&Asymptotics>) -> bool {
    let Some(a) = a else { return false };
    let bounds = crate::algebra::Interval::new(int(-1), int(1));
    m.dim() == 2
        && !m.is_singular()
        && m.half_plane_normal().is_none()
        && a.alpha == ExponentVerdict::Irrational
        && a.c.within(&bounds)
        && matches!(is_cos_rational_multiple_of_pi(&a.c.neg()), Ok(PiMultiple::Irrational))
}
