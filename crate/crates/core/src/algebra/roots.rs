//! Sturm sequences, real-root isolation and real algebraic numbers.
//!
//! Every sign decision in this module is exact: polynomials are evaluated at
//! rational points and roots are counted with Sturm sequences.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::interval::rational_str;
use super::{rat, to_f64, AlgebraError, Interval, UniPoly};

/// Sturm chain of a squarefree polynomial.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    chain: Vec<UniPoly>,
}

impl SturmSequence {
    /// Builds the chain of the squarefree part of `p`.
    pub fn new(p: &UniPoly) -> Self {
        let p0 = p.squarefree_part();
        let mut chain = vec![p0.clone()];
        if p0.is_constant() {
            return SturmSequence { chain };
        }
        let mut a = p0;
        let mut b = a.derivative().primitive_keep_sign();
        while !b.is_zero() {
            // Dividing by a positive content keeps the signs intact.
            let r = (-&a.rem(&b)).primitive_keep_sign();
            chain.push(b.clone());
            a = b;
            b = r;
        }
        SturmSequence { chain }
    }

    pub fn poly(&self) -> &UniPoly {
        &self.chain[0]
    }

    fn variations_at(&self, x: &BigRational) -> usize {
        count_variations(self.chain.iter().map(|p| p.eval(x)))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        count_variations(self.chain.iter().map(|p| {
            let lc = p.lc();
            if positive || p.deg() % 2 == 0 {
                lc
            } else {
                -lc
            }
        }))
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_in(&self, a: &BigRational, b: &BigRational) -> usize {
        if a >= b {
            return 0;
        }
        self.variations_at(a) - self.variations_at(b)
    }

    /// Number of distinct real roots.
    pub fn count_all(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }

    /// Number of distinct real roots in the closed interval `[a, b]`.
    pub fn count_closed(&self, a: &BigRational, b: &BigRational) -> usize {
        let at_a = usize::from(self.poly().eval(a).is_zero());
        at_a + self.count_in(a, b)
    }
}

fn count_variations(values: impl Iterator<Item = BigRational>) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for v in values {
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

/// Number of distinct real roots of `p` in the closed interval `[a, b]`.
pub fn count_roots(p: &UniPoly, a: &BigRational, b: &BigRational) -> usize {
    SturmSequence::new(p).count_closed(a, b)
}

/// Integer bound strictly larger than the absolute value of every root.
fn cauchy_bound(p: &UniPoly) -> BigRational {
    let lc = p.lc().abs();
    let m = p.coeffs()[..p.deg()].iter().map(|c| c.abs() / &lc).max().unwrap_or_else(BigRational::zero);
    (m + BigRational::one()).ceil() + BigRational::one()
}

/// Isolating intervals for the distinct real roots of `p`, in increasing
/// order. Each interval `(lo, hi)` contains exactly one root, the endpoints are
/// not roots, and the intervals are pairwise disjoint.
pub fn isolate_real_roots(p: &UniPoly) -> Vec<Interval> {
    if p.is_zero() {
        return Vec::new();
    }
    let sqf = p.squarefree_part();
    if sqf.is_constant() {
        return Vec::new();
    }
    let b = cauchy_bound(&sqf);
    isolate_real_roots_in(&sqf, &-&b, &b).into_iter().map(|a| a.interval()).collect()
}

/// Every real root of `p`, in increasing order.
pub fn real_roots(p: &UniPoly) -> Vec<AlgebraicNumber> {
    if p.is_zero() || p.is_constant() {
        return Vec::new();
    }
    let b = cauchy_bound(&p.squarefree_part());
    isolate_real_roots_in(p, &-&b, &b)
}

/// All real roots of `p` inside the closed interval `[lo, hi]`, as algebraic
/// numbers with the squarefree part of `p` as annihilator.
pub fn isolate_real_roots_in(p: &UniPoly, lo: &BigRational, hi: &BigRational) -> Vec<AlgebraicNumber> {
    if p.is_zero() {
        return Vec::new();
    }
    SturmSequence::new(p).roots_in(lo, hi)
}

impl SturmSequence {
    /// Every real root in the closed interval `[lo, hi]`.
    pub fn roots_in(&self, lo: &BigRational, hi: &BigRational) -> Vec<AlgebraicNumber> {
        let sqf = self.poly().primitive();
        if sqf.is_constant() || lo > hi {
            return Vec::new();
        }
        let mut out = Vec::new();
        if sqf.eval(lo).is_zero() {
            out.push(AlgebraicNumber::rational_root(&sqf, lo.clone()));
        }
        let mut stack = vec![(lo.clone(), hi.clone(), self.count_in(lo, hi))];
        let mut found = Vec::new();
        while let Some((a, b, n)) = stack.pop() {
            match n {
                0 => {}
                1 => found.push((a, b)),
                _ => {
                    let m = (&a + &b) / rat(2, 1);
                    let left = self.count_in(&a, &m);
                    stack.push((m.clone(), b, n - left));
                    stack.push((a, m, left));
                }
            }
        }
        found.sort_by(|x, y| x.0.cmp(&y.0));
        for (mut a, mut b) in found {
            if sqf.eval(&b).is_zero() {
                out.push(AlgebraicNumber::rational_root(&sqf, b));
                continue;
            }
            // The root lies in (a, b); `a` may be a root belonging to the
            // neighbouring interval, so squeeze it out.
            let mut exact = None;
            while sqf.eval(&a).is_zero() {
                let m = (&a + &b) / rat(2, 1);
                if sqf.eval(&m).is_zero() {
                    exact = Some(m);
                    break;
                }
                if self.count_in(&m, &b) == 1 {
                    a = m;
                } else {
                    b = m;
                }
            }
            match exact {
                Some(q) => out.push(AlgebraicNumber::rational_root(&sqf, q)),
                None => out.push(AlgebraicNumber { annihilator: sqf.clone(), lo: a, hi: b }),
            }
        }
        out.sort_by(|x, y| x.lo.cmp(&y.lo));
        out
    }
}

/// A real algebraic number: a squarefree integer polynomial together with an
/// open rational interval containing exactly one of its real roots.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraicNumber {
    annihilator: UniPoly,
    #[serde(with = "rational_str")]
    lo: BigRational,
    #[serde(with = "rational_str")]
    hi: BigRational,
}

impl AlgebraicNumber {
    /// Validates the isolating property (exactly one root in the interval,
    /// endpoints not roots).
    pub fn new(annihilator: &UniPoly, interval: Interval) -> Result<Self, AlgebraError> {
        let sqf = annihilator.squarefree_part();
        if sqf.is_constant() {
            return Err(AlgebraError::ZeroPolynomial);
        }
        let Interval { lo, hi } = interval;
        if sqf.eval(&lo).is_zero() || sqf.eval(&hi).is_zero() {
            return Err(AlgebraError::NotIsolating("endpoint is a root".into()));
        }
        let n = SturmSequence::new(&sqf).count_in(&lo, &hi);
        if n != 1 {
            return Err(AlgebraError::NotIsolating(format!("{n} roots in interval")));
        }
        Ok(AlgebraicNumber { annihilator: sqf, lo, hi })
    }

    pub fn from_rational(q: &BigRational) -> Self {
        let p = UniPoly::from_coeffs(vec![-q.clone(), BigRational::one()]).primitive();
        AlgebraicNumber { annihilator: p, lo: q - BigRational::one(), hi: q + BigRational::one() }
    }

    /// Wraps a rational root `q` of the squarefree `p`.
    fn rational_root(p: &UniPoly, q: BigRational) -> Self {
        let sturm = SturmSequence::new(p);
        let mut w = BigRational::one();
        loop {
            let lo = &q - &w;
            let hi = &q + &w;
            if !p.eval(&lo).is_zero() && !p.eval(&hi).is_zero() && sturm.count_in(&lo, &hi) == 1 {
                return AlgebraicNumber { annihilator: p.primitive(), lo, hi };
            }
            w /= rat(2, 1);
        }
    }

    /// Every root of `annihilator` inside the closed interval `enclosure`.
    pub fn roots_in(annihilator: &UniPoly, enclosure: &Interval) -> Vec<AlgebraicNumber> {
        isolate_real_roots_in(annihilator, &enclosure.lo, &enclosure.hi)
    }

    pub fn annihilator(&self) -> &UniPoly {
        &self.annihilator
    }

    pub fn interval(&self) -> Interval {
        Interval { lo: self.lo.clone(), hi: self.hi.clone() }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Midpoint as a float, a hint only.
    pub fn to_f64(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) / rat(2, 1)))
    }

    /// Halves the isolating interval once.
    pub fn bisect(&mut self) {
        let m = (&self.lo + &self.hi) / rat(2, 1);
        let pm = self.annihilator.eval(&m);
        if pm.is_zero() {
            self.lo = (&self.lo + &m) / rat(2, 1);
            self.hi = (&m + &self.hi) / rat(2, 1);
            return;
        }
        let plo = self.annihilator.eval(&self.lo);
        if plo.is_positive() != pm.is_positive() {
            self.hi = m;
        } else {
            self.lo = m;
        }
    }

    /// Refined copy whose interval has width at most `width`.
    pub fn refine(&self, width: &BigRational) -> Self {
        let mut a = self.clone();
        a.refine_in_place(width);
        a
    }

    pub fn refine_in_place(&mut self, width: &BigRational) {
        while &self.width() > width {
            self.bisect();
        }
    }

    /// The exact value if it is rational.
    pub fn rational_value(&self) -> Option<BigRational> {
        let coeffs = self.annihilator.integer_coeffs();
        let lc: BigInt = coeffs.last().unwrap().abs();
        // A rational root n/d in lowest terms has d | lc; lc·root is then an
        // integer. Refine until at most two integers fit in lc·interval.
        let target = BigRational::new(BigInt::one(), lc.clone());
        let a = self.refine(&target);
        let lcq = BigRational::from_integer(lc.clone());
        let lo = (&a.lo * &lcq).ceil().to_integer();
        let hi = (&a.hi * &lcq).floor().to_integer();
        let mut k = lo;
        while k <= hi {
            let cand = BigRational::new(k.clone(), lc.clone());
            if a.interval().contains(&cand) && self.annihilator.eval(&cand).is_zero() {
                return Some(cand);
            }
            k += 1;
        }
        None
    }

    /// The negation, annihilated by `p(-X)`.
    pub fn neg(&self) -> Self {
        AlgebraicNumber { annihilator: self.annihilator.reflect().primitive(), lo: -&self.hi, hi: -&self.lo }
    }

    /// Exact sign: -1, 0 or 1.
    pub fn sign(&self) -> i32 {
        let zero = BigRational::zero();
        if self.annihilator.eval(&zero).is_zero() && self.lo < zero && zero < self.hi {
            return 0;
        }
        let mut a = self.clone();
        while a.lo < zero && zero < a.hi {
            a.bisect();
        }
        if a.lo >= zero {
            1
        } else {
            -1
        }
    }

    /// Whether the number lies in the closed interval `[lo, hi]`, decided
    /// exactly.
    pub fn within(&self, bounds: &Interval) -> bool {
        let sturm = SturmSequence::new(&self.annihilator);
        let lo = self.lo.clone().max(bounds.lo.clone());
        let hi = self.hi.clone().min(bounds.hi.clone());
        lo <= hi && sturm.count_closed(&lo, &hi) == 1
    }

    /// Whether `self` is a root of `p`, decided by a gcd and a Sturm count.
    pub fn is_root_of(&self, p: &UniPoly) -> bool {
        let g = UniPoly::gcd(&self.annihilator, p);
        !g.is_constant() && SturmSequence::new(&g).count_in(&self.lo, &self.hi) == 1
    }
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Root({} in ({}, {}))", self.annihilator, self.lo, self.hi)
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rational_value() {
            Some(q) => write!(f, "{q}"),
            None => write!(f, "{:.12}", self.refine(&rat(1, 1 << 50)).to_f64()),
        }
    }
}
