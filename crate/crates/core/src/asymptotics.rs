//! Excursion asymptotics `eₙ ~ K·ρⁿ·n^α` for planar models: the critical
//! point of the characteristic polynomial, the growth constant, the
//! correlation `c`, the exponent `α = −1 − π/arccos(−c)` and the resulting
//! non-D-finiteness verdicts.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    chebyshev_t, is_cos_rational_multiple_of_pi, rat, AlgebraicNumber, Interval, MultiPoly, PiMultiple, UniPoly,
};
use crate::counting::{count_walks, CountError, Endpoint};
use crate::fixed_point::{
    pin, solve_fixed_points, sqrt_enclosure, FixedPointBox, FixedPointSolutions, FixedPointSystem, FixedPoints,
};
use crate::model::Model;

pub const DEFAULT_PERIOD_HORIZON: usize = 60;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AsymptoticsError {
    #[error("asymptotics need a planar model, got dimension {0}")]
    NotPlanar(usize),
    #[error("steps lie in the half-plane {}·i + {}·j ≥ 0", .normal.0, .normal.1)]
    HalfPlaneContained { normal: (i64, i64) },
    #[error("expected one positive critical point, found {0}")]
    CriticalPointCount(usize),
    #[error("χ_xx·χ_yy is not certainly positive at the critical point")]
    DegenerateHessian,
    #[error("no excursion of length at most {0}")]
    NoExcursionFound(usize),
    #[error(transparent)]
    Counting(#[from] CountError),
}

/// The unique positive critical point of `χ` and `ρ = χ(x₀, y₀)`.
#[derive(Clone, Debug)]
pub struct CriticalPoint {
    pub x0: AlgebraicNumber,
    pub y0: AlgebraicNumber,
    pub rho: AlgebraicNumber,
    point: FixedPointBox,
    solutions: FixedPointSolutions,
    chi: MultiPoly,
}

impl CriticalPoint {
    /// Squarefree polynomial vanishing at `num/den` on every critical point
    /// of `χ` with `xy ≠ 0`.
    pub fn annihilator(&self, num: &MultiPoly, den: &MultiPoly) -> UniPoly {
        self.solutions.annihilator(num, den)
    }

    pub fn point(&self) -> &FixedPointBox {
        &self.point
    }
}

/// The gradient equations `x² = A₋(y)/A₊(y)`, `y² = B₋(x)/B₊(x)` are the
/// fixed-point equations of the two involutions, so their solver is reused.
pub fn critical_point(m: &Model) -> Result<CriticalPoint, AsymptoticsError> {
    if m.dim() != 2 {
        return Err(AsymptoticsError::NotPlanar(m.dim()));
    }
    if let Some(normal) = m.half_plane_normal() {
        return Err(AsymptoticsError::HalfPlaneContained { normal });
    }
    let sys = FixedPointSystem::from_model(m).expect("every direction has a step");
    let FixedPoints::Isolated(solutions) = solve_fixed_points(&sys) else {
        return Err(AsymptoticsError::CriticalPointCount(0));
    };
    let positive: Vec<&FixedPointBox> = solutions.boxes.iter().filter(|b| b.x.sign() > 0 && b.y.sign() > 0).collect();
    if positive.len() != 1 {
        return Err(AsymptoticsError::CriticalPointCount(positive.len()));
    }
    let point = positive[0].clone();
    let chi = m.characteristic_polynomial();
    let one = MultiPoly::one(2);
    let ann = solutions.annihilator(&chi, &one);
    let rho = solutions.value_at(&point, &chi, &one, &ann).expect("ρ isolates");
    Ok(CriticalPoint { x0: point.x.clone(), y0: point.y.clone(), rho, point, solutions, chi })
}

/// `c = χ_xy/√(χ_xx·χ_yy)` at the critical point. Its annihilator is
/// `P(t²)` for the annihilator `P` of `c²`; the sign of `χ_xy` is carried by
/// the enclosure that pins the root.
pub fn correlation_c(cp: &CriticalPoint) -> Result<AlgebraicNumber, AsymptoticsError> {
    let chi = &cp.chi;
    let cxy = chi.derivative(0).derivative(1);
    let hess = &chi.derivative(0).derivative(0) * &chi.derivative(1).derivative(1);
    let mut b = cp.point.clone();
    b.refine(&rat(1, 1 << 20));
    match hess.eval_interval(&b.intervals()) {
        Some(h) if h.is_positive() => {}
        _ => return Err(AsymptoticsError::DegenerateHessian),
    }
    if cxy.is_zero() {
        return Ok(AlgebraicNumber::from_rational(&BigRational::zero()));
    }
    let c2 = cp.annihilator(&cxy.pow(2), &hess);
    let ann = c2.compose(&UniPoly::from_ints(&[0, 0, 1])).squarefree_part().primitive();
    let mut b = cp.point.clone();
    let c = pin(&ann, |w| {
        b.refine(w);
        let iv = b.intervals();
        let h = hess.eval_interval(&iv)?;
        if !h.is_positive() {
            return None;
        }
        cxy.eval_interval(&iv)?.div(&sqrt_enclosure(&h, w)?)
    })
    .ok_or(AsymptoticsError::DegenerateHessian)?;
    debug_assert!(c.within(&Interval::new(rat(-1, 1), rat(1, 1))));
    Ok(c)
}

/// `α` as an exact rational when `arccos(−c)/π` is rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExponentVerdict {
    Rational { numer: i64, denom: u64 },
    Irrational,
}

impl ExponentVerdict {
    pub fn value(&self) -> Option<BigRational> {
        match *self {
            ExponentVerdict::Rational { numer, denom } => Some(BigRational::new(numer.into(), denom.into())),
            ExponentVerdict::Irrational => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Asymptotics {
    pub x0: AlgebraicNumber,
    pub y0: AlgebraicNumber,
    pub rho: AlgebraicNumber,
    pub c: AlgebraicNumber,
    /// `arccos(−c)/π`.
    pub angle: PiMultiple,
    pub alpha: ExponentVerdict,
    /// Float enclosure of `α` from the interval of `c`.
    pub alpha_numeric: (OrderedF64, OrderedF64),
    /// `gcd(ann(−c), T_q − (−1)^p)` when `arccos(−c) = pπ/q`.
    pub chebyshev_witness: Option<UniPoly>,
}

/// An `f64` that compares bitwise, so reports can derive `Eq`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrderedF64(pub f64);

impl PartialEq for OrderedF64 {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for OrderedF64 {}

fn alpha_of(c: f64) -> f64 {
    -1.0 - std::f64::consts::PI / (-c).clamp(-1.0, 1.0).acos()
}

pub fn singular_exponent(m: &Model) -> Result<Asymptotics, AsymptoticsError> {
    let cp = critical_point(m)?;
    let c = correlation_c(&cp)?;
    let neg = c.neg();
    let angle = is_cos_rational_multiple_of_pi(&neg).expect("c lies in [-1, 1]");
    let (alpha, witness) = match angle {
        PiMultiple::Rational { p, q } => {
            let sign = if p.is_even() { 1 } else { -1 };
            let target = &chebyshev_t(q as u32) - &UniPoly::from_ints(&[sign]);
            let g = UniPoly::gcd(neg.annihilator(), &target);
            assert!(neg.is_root_of(&g));
            let verdict = ExponentVerdict::Rational { numer: -((p + q) as i64), denom: p };
            (verdict, Some(g.primitive()))
        }
        PiMultiple::Irrational => (ExponentVerdict::Irrational, None),
    };
    // α is increasing in c
    let iv = c.refine(&rat(1, 1 << 50)).interval();
    let (lo, hi) = iv.to_f64_pair();
    let alpha_numeric = (OrderedF64(alpha_of(lo) - 1e-9), OrderedF64(alpha_of(hi) + 1e-9));
    Ok(Asymptotics { x0: cp.x0, y0: cp.y0, rho: cp.rho, c, angle, alpha, alpha_numeric, chebyshev_witness: witness })
}

/// gcd of the lengths `n ≤ horizon` with a nonzero excursion count.
pub fn periodicity(m: &Model, horizon: usize) -> Result<usize, AsymptoticsError> {
    let s = count_walks(m, horizon, &Endpoint::Origin)?;
    let p = s.support().filter(|&n| n > 0).fold(0, |g, n| g.gcd(&n));
    if p == 0 {
        return Err(AsymptoticsError::NoExcursionFound(horizon));
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonDFiniteRoute {
    IrrationalExponent,
    SingularReduction,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonDFiniteEvidence {
    Exponent { c: AlgebraicNumber, alpha_numeric: (OrderedF64, OrderedF64) },
    Reduction { reduced: String, multiplicities: Vec<u32> },
    None { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonDFiniteVerdict {
    pub nondfinite: bool,
    pub route: NonDFiniteRoute,
    pub evidence: NonDFiniteEvidence,
}

impl NonDFiniteVerdict {
    fn inconclusive(reason: impl Into<String>) -> Self {
        NonDFiniteVerdict {
            nondfinite: false,
            route: NonDFiniteRoute::None,
            evidence: NonDFiniteEvidence::None { reason: reason.into() },
        }
    }
}

/// Reduced step sets whose excursion series are known to be non-D-finite,
/// up to exchanging the axes.
pub fn non_dfinite_bases() -> [Model; 2] {
    [Model::from_list(2, &[&[-1, 1], &[1, -1], &[1, 1]]), Model::from_list(2, &[&[-1, 1], &[1, -1], &[0, 1]])]
}

/// Whether the distinct steps of `m` form one of [`non_dfinite_bases`] or
/// its reflection.
pub fn reduces_to_non_dfinite_base(m: &Model) -> bool {
    let (reduced, _) = m.reduce_multiset();
    non_dfinite_bases().iter().any(|b| same_steps(&reduced, b) || same_steps(&reduced, &b.xy_reflection()))
}

fn same_steps(a: &Model, b: &Model) -> bool {
    let mut x: Vec<_> = a.steps().iter().map(|(s, _)| *s).collect();
    let mut y: Vec<_> = b.steps().iter().map(|(s, _)| *s).collect();
    x.sort();
    y.sort();
    x == y
}

pub fn nondfinite_verdict(m: &Model) -> NonDFiniteVerdict {
    nondfinite_verdict_from(m, || singular_exponent(m))
}

/// As [`nondfinite_verdict`], taking the exponent computation from the
/// caller; it is only invoked for nonsingular planar models.
pub fn nondfinite_verdict_from(
    m: &Model,
    exponent: impl FnOnce() -> Result<Asymptotics, AsymptoticsError>,
) -> NonDFiniteVerdict {
    if m.dim() != 2 {
        return NonDFiniteVerdict::inconclusive("not a planar model");
    }
    if m.is_singular() {
        if reduces_to_non_dfinite_base(m) {
            let (reduced, multiplicities) = m.reduce_multiset();
            return NonDFiniteVerdict {
                nondfinite: true,
                route: NonDFiniteRoute::SingularReduction,
                evidence: NonDFiniteEvidence::Reduction { reduced: reduced.to_string(), multiplicities },
            };
        }
        return NonDFiniteVerdict::inconclusive("singular model outside the reducible classes");
    }
    match exponent() {
        Ok(a) if a.alpha == ExponentVerdict::Irrational => NonDFiniteVerdict {
            nondfinite: true,
            route: NonDFiniteRoute::IrrationalExponent,
            evidence: NonDFiniteEvidence::Exponent { c: a.c, alpha_numeric: a.alpha_numeric },
        },
        Ok(a) => NonDFiniteVerdict::inconclusive(format!("rational exponent, arccos(-c)/pi = {}", a.angle)),
        Err(e) => NonDFiniteVerdict::inconclusive(e.to_string()),
    }
}
