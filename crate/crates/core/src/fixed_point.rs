//! Fixed points of `θ = ψ∘φ` and the eigenvalue test for infinite groups.
//!
//! The system `p₁(y) = x²q₁(y)`, `p₂(x) = y²q₂(x)` is solved by splitting the
//! first equation into its even and odd parts in `y`. With `Y = y² = p₂/q₂`
//! this yields `y = −ê/ô` on the roots of `F_o` and `y = ±√(p₂/q₂)` on the
//! roots of `F_b`, so every root of the eliminant is a genuine solution with
//! `xy ≠ 0`. Values of rational functions at the fixed points are then
//! annihilated by resultants against `F_o` and `F_b`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    int, rat, real_roots, resultant, strip_cyclotomic, AlgebraicNumber, Interval, MultiPoly, SturmSequence, UniPoly,
    MAX_VARS,
};
use crate::model::Model;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FixedPointError {
    #[error("no positive step along axis {0}")]
    MissingPositiveStep(usize),
    #[error("expected a {expected}-dimensional model, got dimension {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("every specialization value makes a denominator vanish")]
    SpecializationFailure,
}

/// `r₁ = p₁/q₁` in `y` and `r₂ = p₂/q₂` in `x`, each a reduced fraction with
/// jointly primitive integer coefficients and `lc(q) > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointSystem {
    pub p1: UniPoly,
    pub q1: UniPoly,
    pub p2: UniPoly,
    pub q2: UniPoly,
}

impl FixedPointSystem {
    pub fn from_model(m: &Model) -> Result<Self, FixedPointError> {
        if m.dim() != 2 {
            return Err(FixedPointError::WrongDimension { expected: 2, found: m.dim() });
        }
        let a = m.axis_decomposition(0);
        let b = m.axis_decomposition(1);
        Self::from_parts(&a.minus, &a.plus, &b.minus, &b.plus)
    }

    /// `A₋, A₊` are Laurent polynomials in variable 1, `B₋, B₊` in variable 0.
    pub fn from_parts(
        a_minus: &MultiPoly,
        a_plus: &MultiPoly,
        b_minus: &MultiPoly,
        b_plus: &MultiPoly,
    ) -> Result<Self, FixedPointError> {
        if a_plus.is_zero() {
            return Err(FixedPointError::MissingPositiveStep(0));
        }
        if b_plus.is_zero() {
            return Err(FixedPointError::MissingPositiveStep(1));
        }
        let (p1, q1) = reduced_ratio(a_minus, a_plus, 1);
        let (p2, q2) = reduced_ratio(b_minus, b_plus, 0);
        Ok(FixedPointSystem { p1, q1, p2, q2 })
    }

    /// `p₁(y) − x²q₁(y)` and `p₂(x) − y²q₂(x)`.
    pub fn equations(&self) -> (MultiPoly, MultiPoly) {
        let x2 = MultiPoly::var(2, 0).pow(2);
        let y2 = MultiPoly::var(2, 1).pow(2);
        let e1 = &MultiPoly::from_unipoly(2, 1, &self.p1) - &(&x2 * &MultiPoly::from_unipoly(2, 1, &self.q1));
        let e2 = &MultiPoly::from_unipoly(2, 0, &self.p2) - &(&y2 * &MultiPoly::from_unipoly(2, 0, &self.q2));
        (e1, e2)
    }

    /// `res_y(E₁, E₂)` with factors of `x` removed; zero when the equations
    /// share a component.
    pub fn x_eliminant(&self) -> UniPoly {
        let (e1, e2) = self.equations();
        let r = resultant(&e1, &e2, 1).expect("second equation depends on y");
        r.to_unipoly(0).expect("eliminant in x").strip_x_factors().primitive()
    }
}

fn reduced_ratio(num: &MultiPoly, den: &MultiPoly, var: usize) -> (UniPoly, UniPoly) {
    if num.is_zero() {
        return (UniPoly::zero(), UniPoly::one());
    }
    let shift = num.min_degree_in(var).min(den.min_degree_in(var));
    let mut e = [0; MAX_VARS];
    e[var] = -shift;
    let n = num.mul_monomial(&e).to_unipoly(var).expect("univariate numerator");
    let d = den.mul_monomial(&e).to_unipoly(var).expect("univariate denominator");
    let g = UniPoly::gcd(&n, &d);
    let n = n.div_exact(&g).expect("gcd divides");
    let d = d.div_exact(&g).expect("gcd divides");
    let mut all = n.coeffs().to_vec();
    all.extend(d.coeffs().iter().cloned());
    let mut c = UniPoly::from_coeffs(all).content();
    if d.lc().is_negative() {
        c = -c;
    }
    let c = c.recip();
    (n.scale(&c), d.scale(&c))
}

/// `Σ cᵢ aⁱ b^{k−i}`.
fn homogenize(coeffs: &[UniPoly], a: &UniPoly, b: &UniPoly, k: usize) -> UniPoly {
    let mut acc = UniPoly::zero();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc = &acc + &(&(c * &a.pow(i as u32)) * &b.pow((k - i) as u32));
    }
    acc
}

/// Polynomials in an auxiliary variable `Y` with coefficients in `ℚ[x]`.
type YPoly = Vec<UniPoly>;

fn ypoly_mul(a: &YPoly, b: &YPoly) -> YPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![UniPoly::zero(); a.len() + b.len() - 1];
    for (i, u) in a.iter().enumerate() {
        for (j, v) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(u * v);
        }
    }
    out
}

/// `a − Y·b`.
fn ypoly_sub_shifted(a: &YPoly, b: &YPoly) -> YPoly {
    let n = a.len().max(b.len() + 1);
    (0..n)
        .map(|k| {
            let u = a.get(k).cloned().unwrap_or_else(UniPoly::zero);
            let v = if k == 0 { UniPoly::zero() } else { b.get(k - 1).cloned().unwrap_or_else(UniPoly::zero) };
            &u - &v
        })
        .collect()
}

/// Coefficients of `N(x, y)` in `y`, each a polynomial in `x`.
fn y_coefficients(n: &MultiPoly) -> Vec<UniPoly> {
    n.coefficients_in(1).iter().map(|c| c.to_unipoly(0).expect("coefficient in x")).collect()
}

/// A certified real fixed point: `x` isolated by the eliminant, `y` by the
/// annihilator of the `y`-coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointBox {
    pub x: AlgebraicNumber,
    pub y: AlgebraicNumber,
}

impl FixedPointBox {
    pub fn refine(&mut self, width: &BigRational) {
        self.x.refine_in_place(width);
        self.y.refine_in_place(width);
    }

    pub fn intervals(&self) -> [Interval; 2] {
        [self.x.interval(), self.y.interval()]
    }
}

/// The fixed points with `xy ≠ 0`, as a finite set.
#[derive(Clone, Debug)]
pub struct FixedPointSolutions {
    system: FixedPointSystem,
    /// `F_o`: roots with `ô(x) ≠ 0`, where `y = y_num/y_den`.
    pub single: UniPoly,
    /// `F_b`: roots with `ô(x) = 0`, where `y = ±√(p₂/q₂)`.
    pub paired: UniPoly,
    y_num: UniPoly,
    y_den: UniPoly,
    y_annihilator: UniPoly,
    pub boxes: Vec<FixedPointBox>,
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum FixedPoints {
    NoFixedPoint,
    /// The equations share a curve of solutions.
    PositiveDimensional,
    Isolated(FixedPointSolutions),
}

pub fn solve_fixed_points(sys: &FixedPointSystem) -> FixedPoints {
    if sys.p1.is_zero() || sys.p2.is_zero() {
        return FixedPoints::NoFixedPoint;
    }
    let (p1e, p1o) = sys.p1.even_odd();
    let (q1e, q1o) = sys.q1.even_odd();
    let x2 = UniPoly::monomial(BigRational::one(), 2);
    let split = |p: &UniPoly, q: &UniPoly| -> Vec<UniPoly> {
        let n = p.coeffs().len().max(q.coeffs().len());
        (0..n).map(|k| &UniPoly::constant(p.coeff(k)) - &x2.scale(&q.coeff(k))).collect()
    };
    let ee = split(&p1e, &q1e);
    let eo = split(&p1o, &q1o);
    let k = ee.len().max(eo.len()).saturating_sub(1);
    let e_hat = homogenize(&ee, &sys.p2, &sys.q2, k);
    let o_hat = homogenize(&eo, &sys.p2, &sys.q2, k);
    let g = &(&sys.q2 * &e_hat.pow(2)) - &(&sys.p2 * &o_hat.pow(2));
    if g.is_zero() {
        return FixedPoints::PositiveDimensional;
    }
    let f = g.squarefree_part().strip_x_factors().saturate(&sys.q2).saturate(&sys.p2).primitive();
    if f.is_constant() {
        return FixedPoints::NoFixedPoint;
    }
    let paired = if o_hat.is_zero() { f.clone() } else { UniPoly::gcd(&f, &o_hat).primitive() };
    let single = f.div_exact(&paired).expect("gcd divides").primitive();
    let mut sol = FixedPointSolutions {
        system: sys.clone(),
        single,
        paired,
        y_num: -&e_hat,
        y_den: o_hat,
        y_annihilator: UniPoly::one(),
        boxes: Vec::new(),
    };
    sol.y_annihilator = sol.annihilator(&MultiPoly::var(2, 1), &MultiPoly::one(2));
    sol.boxes = sol.real_boxes();
    FixedPoints::Isolated(sol)
}

impl FixedPoints {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, FixedPoints::PositiveDimensional)
    }
}

impl FixedPointSolutions {
    pub fn system(&self) -> &FixedPointSystem {
        &self.system
    }

    /// Squarefree eliminant in `x` of all fixed points.
    pub fn x_polynomial(&self) -> UniPoly {
        (&self.single * &self.paired).primitive()
    }

    pub fn y_annihilator(&self) -> &UniPoly {
        &self.y_annihilator
    }

    /// Squarefree polynomial vanishing at `num/den` at every fixed point.
    /// `den` must not vanish at any fixed point.
    pub fn annihilator(&self, num: &MultiPoly, den: &MultiPoly) -> UniPoly {
        let (num, den) = clear_common(num, den);
        let mut acc = UniPoly::one();
        if !self.single.is_constant() {
            acc = &acc * &self.single_part(&num, &den);
        }
        if !self.paired.is_constant() {
            acc = &acc * &self.paired_part(&num, &den);
        }
        acc.squarefree_part().primitive()
    }

    fn single_part(&self, num: &MultiPoly, den: &MultiPoly) -> UniPoly {
        let nc = y_coefficients(num);
        let mc = y_coefficients(den);
        let (dn, dm) = (nc.len() - 1, mc.len() - 1);
        let mut rn = homogenize(&nc, &self.y_num, &self.y_den, dn);
        let mut rd = homogenize(&mc, &self.y_num, &self.y_den, dm);
        if dm >= dn {
            rn = &rn * &self.y_den.pow((dm - dn) as u32);
        } else {
            rd = &rd * &self.y_den.pow((dn - dm) as u32);
        }
        let rd = rd.rem(&self.single);
        if rd.is_zero() {
            return UniPoly::one();
        }
        let f = self.single.saturate(&rd);
        if f.is_constant() {
            return UniPoly::one();
        }
        let (rn, rd) = (rn.rem(&f), rd.rem(&f));
        let t = MultiPoly::var(2, 1);
        let h = &(&MultiPoly::from_unipoly(2, 0, &rd) * &t) - &MultiPoly::from_unipoly(2, 0, &rn);
        eliminate_x(&f, &h)
    }

    fn paired_part(&self, num: &MultiPoly, den: &MultiPoly) -> UniPoly {
        let parity = |c: Vec<UniPoly>| -> (YPoly, YPoly) {
            let even = c.iter().step_by(2).cloned().collect();
            let odd = c.iter().skip(1).step_by(2).cloned().collect();
            (even, odd)
        };
        let (ne, no) = parity(y_coefficients(num));
        let (me, mo) = parity(y_coefficients(den));
        let a = ypoly_sub_shifted(&ypoly_mul(&me, &me), &ypoly_mul(&mo, &mo));
        let b = ypoly_sub_shifted(&ypoly_mul(&ne, &me), &ypoly_mul(&no, &mo));
        let c = ypoly_sub_shifted(&ypoly_mul(&ne, &ne), &ypoly_mul(&no, &no));
        let k = a.len().max(b.len()).max(c.len()).saturating_sub(1);
        let (p2, q2) = (&self.system.p2, &self.system.q2);
        let a = homogenize(&a, p2, q2, k).rem(&self.paired);
        if a.is_zero() {
            return UniPoly::one();
        }
        let f = self.paired.saturate(&a);
        if f.is_constant() {
            return UniPoly::one();
        }
        let a = a.rem(&f);
        let b = homogenize(&b, p2, q2, k).scale(&int(2)).rem(&f);
        let c = homogenize(&c, p2, q2, k).rem(&f);
        let t = MultiPoly::var(2, 1);
        let h = &(&(&MultiPoly::from_unipoly(2, 0, &a) * &t.pow(2)) - &(&MultiPoly::from_unipoly(2, 0, &b) * &t))
            + &MultiPoly::from_unipoly(2, 0, &c);
        eliminate_x(&f, &h)
    }

    fn real_boxes(&self) -> Vec<FixedPointBox> {
        let mut out = Vec::new();
        if !self.single.is_constant() {
            for x0 in real_roots(&self.single) {
                let mut xr = x0.clone();
                let (yn, yd) = (&self.y_num, &self.y_den);
                let y = pin(&self.y_annihilator, |w| {
                    xr.refine_in_place(w);
                    let iv = xr.interval();
                    yn.eval_interval(&iv).div(&yd.eval_interval(&iv))
                });
                out.push(FixedPointBox { x: x0, y: y.expect("y-coordinate isolates") });
            }
        }
        if !self.paired.is_constant() {
            let (p2, q2) = (&self.system.p2, &self.system.q2);
            for x0 in real_roots(&self.paired) {
                let mut xr = x0.clone();
                let r2 = loop {
                    let iv = xr.interval();
                    if let Some(r) = p2.eval_interval(&iv).div(&q2.eval_interval(&iv)) {
                        if !r.contains_zero() {
                            break r;
                        }
                    }
                    xr.bisect();
                };
                if r2.is_negative() {
                    continue;
                }
                for sign in [1, -1] {
                    let mut xr = xr.clone();
                    let y = pin(&self.y_annihilator, |w| {
                        xr.refine_in_place(w);
                        let iv = xr.interval();
                        let r = p2.eval_interval(&iv).div(&q2.eval_interval(&iv))?;
                        let s = sqrt_enclosure(&r, w)?;
                        Some(if sign > 0 { s } else { Interval::new(-&s.hi, -&s.lo) })
                    });
                    out.push(FixedPointBox { x: x0.clone(), y: y.expect("y-coordinate isolates") });
                }
            }
        }
        out
    }

    /// The value of `num/den` at a real fixed point, isolated by `ann`.
    pub fn value_at(
        &self,
        bx: &FixedPointBox,
        num: &MultiPoly,
        den: &MultiPoly,
        ann: &UniPoly,
    ) -> Option<AlgebraicNumber> {
        let mut b = bx.clone();
        pin(ann, |w| {
            b.refine(w);
            eval_fraction(num, den, &b.intervals())
        })
    }
}

fn clear_common(num: &MultiPoly, den: &MultiPoly) -> (MultiPoly, MultiPoly) {
    let (a, b) = (num.min_exponents(), den.min_exponents());
    let mut e = [0; MAX_VARS];
    for i in 0..MAX_VARS {
        e[i] = (-a[i].min(b[i])).max(0);
    }
    (num.mul_monomial(&e), den.mul_monomial(&e))
}

/// `res_x(f(x), h(x, t))` as a polynomial in `t`, squarefree and primitive.
fn eliminate_x(f: &UniPoly, h: &MultiPoly) -> UniPoly {
    let r = resultant(&MultiPoly::from_unipoly(2, 0, f), h, 0).expect("f depends on x");
    r.to_unipoly(1).expect("resultant in t").squarefree_part().primitive()
}

fn eval_fraction(num: &MultiPoly, den: &MultiPoly, point: &[Interval]) -> Option<Interval> {
    num.eval_interval(point)?.div(&den.eval_interval(point)?)
}

/// Refines an enclosure until it contains exactly one root of `ann`.
pub(crate) fn pin(ann: &UniPoly, mut enclose: impl FnMut(&BigRational) -> Option<Interval>) -> Option<AlgebraicNumber> {
    let sturm = SturmSequence::new(ann);
    let mut w = rat(1, 256);
    let step = rat(1, 256);
    for k in 1..=64u32 {
        if let Some(iv) = enclose(&w) {
            let iv = iv.round_outward(8 * k + 8);
            let mut roots = sturm.roots_in(&iv.lo, &iv.hi);
            if roots.len() == 1 {
                return roots.pop();
            }
        }
        w = &w * &step;
    }
    None
}

/// Rational enclosure of `√r` for `r ≥ 0`, widened by at most `w` per side.
pub(crate) fn sqrt_enclosure(r: &Interval, w: &BigRational) -> Option<Interval> {
    if r.lo.is_negative() {
        return None;
    }
    // bracket [lo, hi] with lo² ≤ q ≤ hi², hi − lo ≤ w
    let bracket = |q: &BigRational| -> (BigRational, BigRational) {
        let (mut lo, mut hi) = (BigRational::zero(), q.max(&BigRational::one()).clone());
        while &hi - &lo > *w {
            let mid = (&lo + &hi) / int(2);
            if &mid * &mid <= *q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    };
    Some(Interval::new(bracket(&r.lo).0, bracket(&r.hi).1))
}

/// A fraction of bivariate Laurent polynomials in `x` (var 0), `y` (var 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frac {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl Frac {
    fn mul(&self, o: &Frac) -> Frac {
        Frac { num: &self.num * &o.num, den: &self.den * &o.den }
    }

    fn add(&self, o: &Frac) -> Frac {
        if self.den == o.den {
            return Frac { num: &self.num + &o.num, den: self.den.clone() };
        }
        Frac { num: &(&self.num * &o.den) + &(&o.num * &self.den), den: &self.den * &o.den }
    }

    pub fn eval_interval(&self, point: &[Interval]) -> Option<Interval> {
        eval_fraction(&self.num, &self.den, point)
    }
}

/// Jacobian of `θ = ψ∘φ` with `φ(x, y) = (r₁(y)/x, y)`, `ψ(x, y) = (x, r₂(x)/y)`.
#[derive(Clone, Debug)]
pub struct JacobianData {
    pub entries: [[Frac; 2]; 2],
    pub det: Frac,
    /// The trace in the form valid on the fixed-point set.
    pub trace: Frac,
    /// `M·X² − N·X + M` for `trace = N/M`, in variables `x, y, X`.
    pub char_numerator: MultiPoly,
}

fn wronskian(p: &UniPoly, q: &UniPoly) -> UniPoly {
    &(&p.derivative() * q) - &(p * &q.derivative())
}

pub fn jacobian(sys: &FixedPointSystem) -> JacobianData {
    let x = MultiPoly::var(2, 0);
    let y = MultiPoly::var(2, 1);
    let p1 = MultiPoly::from_unipoly(2, 1, &sys.p1);
    let q1 = MultiPoly::from_unipoly(2, 1, &sys.q1);
    let p2 = MultiPoly::from_unipoly(2, 0, &sys.p2);
    let q2 = MultiPoly::from_unipoly(2, 0, &sys.q2);
    let w1 = MultiPoly::from_unipoly(2, 1, &wronskian(&sys.p1, &sys.q1));
    let w2 = MultiPoly::from_unipoly(2, 0, &wronskian(&sys.p2, &sys.q2));
    let a = Frac { num: -&p1, den: &x.pow(2) * &q1 };
    let b = Frac { num: w1.clone(), den: &x * &q1.pow(2) };
    let c = Frac { num: w2.clone(), den: &y * &q2.pow(2) };
    let d = Frac { num: -&p2, den: &y.pow(2) * &q2 };
    let det = a.mul(&d);
    let m = &(&(&x * &y) * &q2.pow(2)) * &q1.pow(2);
    let n = &(&w1 * &w2) - &m.scale(&int(2));
    let lift = |p: &MultiPoly| p.with_nvars(3);
    let xx = MultiPoly::var(3, 2);
    let char_numerator = &(&(&lift(&m) * &xx.pow(2)) - &(&lift(&n) * &xx)) + &lift(&m);
    JacobianData {
        entries: [[a.clone(), b.clone()], [c.mul(&a), c.mul(&b).add(&d)]],
        det,
        trace: Frac { num: n, den: m },
        char_numerator,
    }
}

/// `X^n · P(X + 1/X)` for a trace annihilator `P` of degree `n`.
pub fn palindromic_lift(p: &UniPoly) -> UniPoly {
    let n = p.deg();
    let s = UniPoly::from_ints(&[1, 0, 1]);
    let mut acc = UniPoly::zero();
    for (k, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc = &acc + &s.pow(k as u32).shift_up(n - k).scale(c);
    }
    acc
}

/// `res_X(r(X), X² − tX + 1)`: annihilator of `λ + 1/λ` over the roots `λ` of `r`.
pub fn trace_form(r: &UniPoly) -> UniPoly {
    let xx = MultiPoly::var(2, 0);
    let t = MultiPoly::var(2, 1);
    let quad = &(&xx.pow(2) - &(&t * &xx)) + &MultiPoly::one(2);
    let res = resultant(&MultiPoly::from_unipoly(2, 0, r), &quad, 0).expect("depends on X");
    res.to_unipoly(1).expect("resultant in t").squarefree_part().primitive()
}

/// `q(X)` with its trace annihilator, or `None` without isolated fixed points.
pub fn eigenvalue_polynomial(sys: &FixedPointSystem) -> Option<(UniPoly, UniPoly)> {
    match solve_fixed_points(sys) {
        FixedPoints::Isolated(sol) => {
            let jac = jacobian(sys);
            let pt = sol.annihilator(&jac.trace.num, &jac.trace.den);
            Some((palindromic_lift(&pt), pt))
        }
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateVerdict {
    InfiniteGroup,
    Inconclusive,
}

/// The fixed point carrying an eigenvalue that is not a root of unity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum FixedPointWitness {
    /// A real box whose Jacobian trace is a root of the witness polynomial.
    Real { point: FixedPointBox, trace: AlgebraicNumber },
    /// Only non-real fixed points qualify. Every root of the witness
    /// polynomial is the trace at a genuine fixed point.
    Complex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum FixedPointEvidence {
    NonCyclotomicFactor {
        /// Part of `q(X)` free of roots of unity.
        factor: UniPoly,
        /// `gcd` of the trace annihilator and the trace form of `factor`.
        witness_traces: UniPoly,
        witness: FixedPointWitness,
    },
    NoFixedPoint,
    DegenerateFixedPointSet,
    AllRootsOfUnity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCertificate {
    pub verdict: CertificateVerdict,
    pub evidence: FixedPointEvidence,
    pub eigenvalue_polynomial: Option<UniPoly>,
}

impl GroupCertificate {
    fn inconclusive(evidence: FixedPointEvidence, q: Option<UniPoly>) -> Self {
        GroupCertificate { verdict: CertificateVerdict::Inconclusive, evidence, eigenvalue_polynomial: q }
    }

    pub fn is_infinite(&self) -> bool {
        self.verdict == CertificateVerdict::InfiniteGroup
    }
}

pub fn certify_infinite_2d(m: &Model) -> Result<GroupCertificate, FixedPointError> {
    Ok(certify_system(&FixedPointSystem::from_model(m)?))
}

pub fn certify_system(sys: &FixedPointSystem) -> GroupCertificate {
    let sol = match solve_fixed_points(sys) {
        FixedPoints::NoFixedPoint => return GroupCertificate::inconclusive(FixedPointEvidence::NoFixedPoint, None),
        FixedPoints::PositiveDimensional => {
            return GroupCertificate::inconclusive(FixedPointEvidence::DegenerateFixedPointSet, None)
        }
        FixedPoints::Isolated(sol) => sol,
    };
    let jac = jacobian(sys);
    let pt = sol.annihilator(&jac.trace.num, &jac.trace.den);
    let q = palindromic_lift(&pt);
    let (_, rem) = strip_cyclotomic(&q).expect("q is nonzero");
    if rem.is_constant() {
        return GroupCertificate::inconclusive(FixedPointEvidence::AllRootsOfUnity, Some(q));
    }
    let traces = UniPoly::gcd(&pt, &trace_form(&rem)).primitive();
    if traces.is_constant() {
        return GroupCertificate::inconclusive(FixedPointEvidence::AllRootsOfUnity, Some(q));
    }
    let witness = sol
        .boxes
        .iter()
        .find_map(|bx| {
            let t = sol.value_at(bx, &jac.trace.num, &jac.trace.den, &pt)?;
            t.is_root_of(&traces).then(|| FixedPointWitness::Real { point: bx.clone(), trace: t })
        })
        .unwrap_or(FixedPointWitness::Complex);
    GroupCertificate {
        verdict: CertificateVerdict::InfiniteGroup,
        evidence: FixedPointEvidence::NonCyclotomicFactor { factor: rem, witness_traces: traces, witness },
        eigenvalue_polynomial: Some(q),
    }
}

/// Interval checks at a real fixed point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxCheck {
    pub det_contains_one: bool,
    pub phi_fixes: bool,
    pub psi_fixes: bool,
}

pub fn check_box(sys: &FixedPointSystem, bx: &FixedPointBox, width: &BigRational) -> Option<BoxCheck> {
    let mut b = bx.clone();
    b.refine(width);
    let [xi, yi] = b.intervals();
    let det = jacobian(sys).det.eval_interval(&[xi.clone(), yi.clone()])?;
    let r1 = sys.p1.eval_interval(&yi).div(&sys.q1.eval_interval(&yi))?;
    let r2 = sys.p2.eval_interval(&xi).div(&sys.q2.eval_interval(&xi))?;
    Some(BoxCheck {
        det_contains_one: det.contains(&BigRational::one()),
        phi_fixes: r1.div(&xi)?.intersects(&xi),
        psi_fixes: r2.div(&yi)?.intersects(&yi),
    })
}

pub const SPECIALIZATION_FALLBACKS: [(i64, i64); 4] = [(1, 7), (1, 11), (1, 13), (2, 7)];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingCertificate {
    pub axes: [usize; 2],
    pub certificate: GroupCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCertificate3d {
    pub verdict: CertificateVerdict,
    /// The value given to the unused variable, as `p/q`.
    pub specialization: String,
    pub pairings: Vec<PairingCertificate>,
}

/// The 2D system for the pair `(i, j)` with the remaining variable set to `s`.
pub fn pairing_system(m: &Model, i: usize, j: usize, s: &BigRational) -> Result<FixedPointSystem, FixedPointError> {
    let k = 3 - i - j;
    let to_pair = |p: &MultiPoly| -> MultiPoly {
        let p = p.specialize(k, s);
        MultiPoly::from_terms(
            2,
            p.terms().map(|(e, c)| {
                let mut f = [0; MAX_VARS];
                f[0] = e[i];
                f[1] = e[j];
                (f, c.clone())
            }),
        )
    };
    let a = m.axis_decomposition(i);
    let b = m.axis_decomposition(j);
    FixedPointSystem::from_parts(&to_pair(&a.minus), &to_pair(&a.plus), &to_pair(&b.minus), &to_pair(&b.plus))
}

pub fn certify_infinite_3d(m: &Model, specialization: &BigRational) -> Result<GroupCertificate3d, FixedPointError> {
    if m.dim() != 3 {
        return Err(FixedPointError::WrongDimension { expected: 3, found: m.dim() });
    }
    if let Some(axis) = (0..3).find(|&a| !m.has_positive(a)) {
        return Err(FixedPointError::MissingPositiveStep(axis));
    }
    let mut values = vec![specialization.clone()];
    for (n, d) in SPECIALIZATION_FALLBACKS {
        let v = rat(n, d);
        if !values.contains(&v) {
            values.push(v);
        }
    }
    'values: for s in &values {
        let mut systems = Vec::new();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            match pairing_system(m, i, j, s) {
                Ok(sys) => systems.push(([i, j], sys)),
                Err(_) => continue 'values,
            }
        }
        let pairings: Vec<PairingCertificate> = systems
            .iter()
            .map(|(axes, sys)| PairingCertificate { axes: *axes, certificate: certify_system(sys) })
            .collect();
        let verdict = if pairings.iter().any(|p| p.certificate.is_infinite()) {
            CertificateVerdict::InfiniteGroup
        } else {
            CertificateVerdict::Inconclusive
        };
        return Ok(GroupCertificate3d { verdict, specialization: s.to_string(), pairings });
    }
    Err(FixedPointError::SpecializationFailure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    fn quintic() -> UniPoly {
        p(&[-3, 9, -1, -6, 0, 1])
    }

    #[test]
    fn weighted_example_system() {
        let sys = FixedPointSystem::from_model(&fixtures::example_fixed_point()).unwrap();
        assert!(quintic().divides(&sys.x_eliminant()));
        let FixedPoints::Isolated(sol) = solve_fixed_points(&sys) else { panic!("expected fixed points") };
        assert_eq!(sol.x_polynomial(), quintic());
        assert!(!sol.boxes.is_empty());
        for bx in &sol.boxes {
            // y = 1/(x² − 3)
            let mut bx = bx.clone();
            bx.refine(&rat(1, 1 << 40));
            let xv = bx.x.to_f64();
            assert!((bx.y.to_f64() - 1.0 / (xv * xv - 3.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn weighted_example_eigenvalues() {
        let sys = FixedPointSystem::from_model(&fixtures::example_fixed_point()).unwrap();
        let (q, _) = eigenvalue_polynomial(&sys).unwrap();
        let octic = p(&[27, -243, -2051, -5587, -7611, -5587, -2051, -243, 27]);
        assert!(p(&[1, 1, 1]).divides(&q));
        assert!(octic.divides(&q));
        let cert = certify_system(&sys);
        assert!(cert.is_infinite());
        let FixedPointEvidence::NonCyclotomicFactor { factor, .. } = cert.evidence else { panic!() };
        assert_eq!(factor, octic);
    }

    #[test]
    fn valuation_example_has_no_fixed_point() {
        let m = fixtures::example_valuation();
        let sys = FixedPointSystem::from_model(&m).unwrap();
        assert!(matches!(solve_fixed_points(&sys), FixedPoints::NoFixedPoint));
        let cert = certify_infinite_2d(&m).unwrap();
        assert_eq!(cert.evidence, FixedPointEvidence::NoFixedPoint);
    }

    #[test]
    fn simple_walk_boxes() {
        let sys = FixedPointSystem::from_model(&fixtures::simple_walk()).unwrap();
        let FixedPoints::Isolated(sol) = solve_fixed_points(&sys) else { panic!() };
        assert_eq!(sol.boxes.len(), 4);
        for bx in &sol.boxes {
            assert_eq!(bx.x.rational_value().unwrap().abs(), int(1));
            assert_eq!(bx.y.rational_value().unwrap().abs(), int(1));
        }
        let (q, _) = eigenvalue_polynomial(&sys).unwrap();
        assert_eq!(q.squarefree_part(), p(&[1, 1]));
        assert_eq!(certify_system(&sys).evidence, FixedPointEvidence::AllRootsOfUnity);
    }

    #[test]
    fn determinant_is_one() {
        for m in [fixtures::example_fixed_point(), fixtures::simple_walk(), fixtures::kreweras()] {
            let sys = FixedPointSystem::from_model(&m).unwrap();
            let FixedPoints::Isolated(sol) = solve_fixed_points(&sys) else { continue };
            let det = jacobian(&sys).det;
            assert_eq!(sol.annihilator(&det.num, &det.den), p(&[-1, 1]));
            for bx in &sol.boxes {
                let c = check_box(&sys, bx, &rat(1, 1 << 20)).unwrap();
                assert!(c.det_contains_one && c.phi_fixes && c.psi_fixes);
            }
        }
    }

    #[test]
    fn shared_component_is_degenerate() {
        // both equations reduce to x² = y²
        let m = Model::from_list(2, &[&[-1, 1], &[1, -1]]);
        let sys = FixedPointSystem::from_model(&m).unwrap();
        assert!(matches!(solve_fixed_points(&sys), FixedPoints::PositiveDimensional));
    }

    #[test]
    fn simple_walk_3d_inconclusive() {
        let cert = certify_infinite_3d(&fixtures::simple_walk_3d(), &rat(1, 7)).unwrap();
        assert_eq!(cert.verdict, CertificateVerdict::Inconclusive);
        assert_eq!(cert.pairings.len(), 3);
        assert!(certify_infinite_3d(&fixtures::simple_walk(), &rat(1, 7)).is_err());
    }
}
