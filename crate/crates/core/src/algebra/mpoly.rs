//! Sparse Laurent polynomials in up to three variables with rational
//! coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Interval, UniPoly};

pub const MAX_VARS: usize = 3;

/// Exponent vector; unused trailing slots are zero.
pub type Exponent = [i32; MAX_VARS];

const DEFAULT_NAMES: [&str; MAX_VARS] = ["x", "y", "z"];

/// A Laurent polynomial. Terms are keyed by exponent vector in lexicographic
/// order (variable 0 most significant); no zero coefficient is ever stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, BigRational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS);
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::monomial(nvars, [0; MAX_VARS], c)
    }

    pub fn monomial(nvars: usize, exp: Exponent, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        debug_assert!(exp[nvars..].iter().all(|&e| e == 0));
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// The variable with index `i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = [0; MAX_VARS];
        e[i] = 1;
        Self::monomial(nvars, e, BigRational::one())
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, BigRational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: Exponent, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    /// Embeds a univariate polynomial as a polynomial in variable `var`.
    pub fn from_unipoly(nvars: usize, var: usize, p: &UniPoly) -> Self {
        let mut out = Self::zero(nvars);
        for (i, c) in p.coeffs().iter().enumerate() {
            let mut e = [0; MAX_VARS];
            e[var] = i as i32;
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Same polynomial viewed in a ring with `nvars` variables.
    pub fn with_nvars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.max_var_used().map_or(0, |v| v + 1));
        MultiPoly { nvars, terms: self.terms.clone() }
    }

    fn max_var_used(&self) -> Option<usize> {
        (0..MAX_VARS).rev().find(|&v| self.depends_on(v))
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| *e == [0; MAX_VARS])
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.is_constant() {
            return self.terms.get(&[0; MAX_VARS]).cloned();
        }
        None
    }

    pub fn coeff(&self, exp: &Exponent) -> BigRational {
        self.terms.get(exp).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] != 0)
    }

    pub fn degree_in(&self, var: usize) -> i32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, var: usize) -> i32 {
        self.terms.keys().map(|e| e[var]).min().unwrap_or(0)
    }

    pub fn total_degree(&self) -> i32 {
        self.terms.keys().map(|e| e.iter().sum::<i32>()).max().unwrap_or(0)
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k >= 0))
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_exponents(&self) -> Exponent {
        let mut m = [0; MAX_VARS];
        for (i, slot) in m.iter_mut().enumerate().take(self.nvars) {
            *slot = self.min_degree_in(i);
        }
        m
    }

    pub fn mul_monomial(&self, exp: &Exponent) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut f = *e;
                for i in 0..MAX_VARS {
                    f[i] += exp[i];
                }
                (f, c.clone())
            })
            .collect();
        MultiPoly { nvars: self.nvars, terms }
    }

    /// Multiplies by the monomial that clears every negative exponent and
    /// every common monomial factor; returns the polynomial and the exponent
    /// shift applied.
    pub fn to_polynomial(&self) -> (Self, Exponent) {
        let m = self.min_exponents();
        let shift = m.map(|k| -k);
        (self.mul_monomial(&shift), shift)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, a)| (*e, a * c)).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] != 0 {
                let mut f = *e;
                f[var] -= 1;
                out.add_term(f, c * BigRational::from_integer(BigInt::from(e[var])));
            }
        }
        out
    }

    /// Evaluates at a rational point; `None` on a negative power of zero.
    pub fn eval(&self, point: &[BigRational]) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate().take(self.nvars) {
                if k == 0 {
                    continue;
                }
                let x = &point[i];
                if k < 0 && x.is_zero() {
                    return None;
                }
                let base = if k < 0 { x.recip() } else { x.clone() };
                t *= num_traits::pow(base, k.unsigned_abs() as usize);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Interval enclosure over a box; `None` if a negative power meets an
    /// interval containing zero.
    pub fn eval_interval(&self, point: &[Interval]) -> Option<Interval> {
        let mut acc = Interval::point(BigRational::zero());
        for (e, c) in &self.terms {
            let mut t = Interval::point(c.clone());
            for (i, &k) in e.iter().enumerate().take(self.nvars) {
                if k == 0 {
                    continue;
                }
                let base = if k < 0 { point[i].recip()? } else { point[i].clone() };
                t = &t * &base.powi(k.unsigned_abs());
            }
            acc = &acc + &t;
        }
        Some(acc)
    }

    /// Replaces variable `var` by the rational `value`.
    pub fn specialize(&self, var: usize, value: &BigRational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[var];
            let factor = if k >= 0 {
                num_traits::pow(value.clone(), k as usize)
            } else {
                num_traits::pow(value.recip(), (-k) as usize)
            };
            let mut f = *e;
            f[var] = 0;
            out.add_term(f, c * factor);
        }
        out
    }

    /// Replaces variable `var` (appearing with nonnegative exponents only) by
    /// the polynomial `q`.
    pub fn substitute(&self, var: usize, q: &MultiPoly) -> Self {
        let coeffs = self.coefficients_in(var);
        let mut acc = Self::zero(self.nvars.max(q.nvars));
        for c in coeffs.iter().rev() {
            acc = &(&acc * q) + &c.with_nvars(acc.nvars);
        }
        acc
    }

    /// Exchanges two variables.
    pub fn swap_vars(&self, i: usize, j: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut f = *e;
                f.swap(i, j);
                (f, c.clone())
            })
            .collect();
        MultiPoly { nvars: self.nvars, terms }
    }

    /// Dense coefficient list with respect to `var` (ascending powers). The
    /// polynomial must not contain negative powers of `var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<MultiPoly> {
        assert!(self.min_degree_in(var) >= 0, "negative power in coefficients_in");
        if self.is_zero() {
            return Vec::new();
        }
        let d = self.degree_in(var) as usize;
        let mut out = vec![Self::zero(self.nvars); d + 1];
        for (e, c) in &self.terms {
            let mut f = *e;
            f[var] = 0;
            out[e[var] as usize].add_term(f, c.clone());
        }
        out
    }

    pub fn from_coefficients_in(nvars: usize, var: usize, coeffs: &[MultiPoly]) -> Self {
        let mut out = Self::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (e, a) in &c.terms {
                let mut f = *e;
                f[var] += k as i32;
                out.add_term(f, a.clone());
            }
        }
        out
    }

    /// Converts to a univariate polynomial in `var`, if no other variable
    /// occurs and all exponents are nonnegative.
    pub fn to_unipoly(&self, var: usize) -> Option<UniPoly> {
        let mut coeffs = Vec::new();
        for (e, c) in &self.terms {
            if (0..MAX_VARS).any(|i| i != var && e[i] != 0) || e[var] < 0 {
                return None;
            }
            let k = e[var] as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, BigRational::zero());
            }
            coeffs[k] = c.clone();
        }
        Some(UniPoly::from_coeffs(coeffs))
    }

    /// Leading term in lexicographic order.
    pub fn lex_leading(&self) -> Option<(&Exponent, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Leading coefficient in graded-lexicographic order.
    pub fn grlex_leading_coeff(&self) -> BigRational {
        self.terms
            .iter()
            .max_by(|a, b| {
                let da: i32 = a.0.iter().sum();
                let db: i32 = b.0.iter().sum();
                da.cmp(&db).then(a.0.cmp(b.0))
            })
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients.
    pub fn content(&self) -> BigRational {
        let mut g = BigInt::zero();
        let mut l = BigInt::one();
        for c in self.terms.values() {
            g = g.gcd(c.numer());
            l = l.lcm(c.denom());
        }
        if g.is_zero() {
            return BigRational::one();
        }
        BigRational::new(g, l)
    }

    /// Coprime integer coefficients, positive lexicographic leading
    /// coefficient.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.lex_leading().unwrap().1.is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        let nv = self.nvars.max(d.nvars);
        if self.is_zero() {
            return Some(Self::zero(nv));
        }
        let (a, sa) = self.to_polynomial();
        let (b, sb) = d.to_polynomial();
        let (lead_e, lead_c) = b.lex_leading().map(|(e, c)| (*e, c.clone())).unwrap();
        let lead_inv = lead_c.recip();
        let mut rem = a.with_nvars(nv);
        let mut quot = Self::zero(nv);
        while let Some((e, c)) = rem.lex_leading().map(|(e, c)| (*e, c.clone())) {
            let mut q = [0; MAX_VARS];
            for i in 0..MAX_VARS {
                q[i] = e[i] - lead_e[i];
                if q[i] < 0 {
                    return None;
                }
            }
            let coef = &c * &lead_inv;
            for (be, bc) in &b.terms {
                let mut f = *be;
                for i in 0..MAX_VARS {
                    f[i] += q[i];
                }
                rem.add_term(f, -(&coef * bc));
            }
            quot.add_term(q, coef);
        }
        // self = a·x^{-sa}, d = b·x^{-sb}
        let shift: Exponent = std::array::from_fn(|i| sb[i] - sa[i]);
        Some(quot.mul_monomial(&shift))
    }

    /// Greatest common divisor of two polynomials (nonnegative exponents),
    /// normalized by [`MultiPoly::primitive`]. Computed recursively: content
    /// extraction in the main variable and primitive remainder sequences.
    pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        let nv = a.nvars.max(b.nvars);
        if a.is_zero() {
            return b.with_nvars(nv).primitive();
        }
        if b.is_zero() {
            return a.with_nvars(nv).primitive();
        }
        let main = (0..MAX_VARS).rev().find(|&v| a.depends_on(v) || b.depends_on(v));
        let Some(v) = main else {
            return Self::one(nv);
        };
        if !a.depends_on(v) {
            return Self::gcd(a, &b.content_in(v));
        }
        if !b.depends_on(v) {
            return Self::gcd(&a.content_in(v), b);
        }
        let ca = a.content_in(v);
        let cb = b.content_in(v);
        let c = Self::gcd(&ca, &cb);
        let mut f = a.div_exact(&ca).expect("content divides").coefficients_in(v);
        let mut g = b.div_exact(&cb).expect("content divides").coefficients_in(v);
        if f.len() < g.len() {
            std::mem::swap(&mut f, &mut g);
        }
        let g = loop {
            let r = prem(&f, &g);
            if r.is_empty() {
                break g;
            }
            if r.len() == 1 {
                break vec![Self::one(nv)];
            }
            f = g;
            g = primitive_part_list(&r);
        };
        let g = Self::from_coefficients_in(nv, v, &g);
        let g = g.div_exact(&g.content_in(v)).expect("content divides");
        (&c * &g).primitive()
    }

    /// Gcd of the coefficients of `self` viewed as a polynomial in `var`.
    pub fn content_in(&self, var: usize) -> MultiPoly {
        let mut g = Self::zero(self.nvars);
        for c in self.coefficients_in(var) {
            if c.is_zero() {
                continue;
            }
            g = Self::gcd(&g, &c);
            if g.is_constant() {
                return Self::one(self.nvars);
            }
        }
        g
    }

    pub fn display_with(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut mono = Vec::new();
            for (i, &k) in e.iter().enumerate().take(self.nvars) {
                match k {
                    0 => {}
                    1 => mono.push(names[i].to_string()),
                    _ => mono.push(format!("{}^{}", names[i], k)),
                }
            }
            let mono = mono.join("*");
            if mono.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a}*{mono}"));
            }
        }
        out
    }
}

/// Pseudo-remainder `lc(g)^(deg f - deg g + 1) · f mod g` for coefficient
/// lists in the main variable. Empty list is the zero polynomial.
pub(crate) fn prem(f: &[MultiPoly], g: &[MultiPoly]) -> Vec<MultiPoly> {
    let dg = g.len() - 1;
    if f.len() < g.len() {
        return f.to_vec();
    }
    let lcg = &g[dg];
    let mut r = f.to_vec();
    let mut e = f.len() - g.len() + 1;
    while r.len() >= g.len() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - g.len();
        let mut next: Vec<MultiPoly> = r.iter().map(|c| c * lcg).collect();
        for (j, gc) in g.iter().enumerate() {
            next[shift + j] = &next[shift + j] - &(&lr * gc);
        }
        next.pop();
        trim(&mut next);
        r = next;
        e -= 1;
    }
    if e > 0 {
        let m = lcg.pow(e as u32);
        r = r.iter().map(|c| c * &m).collect();
    }
    r
}

pub(crate) fn trim(v: &mut Vec<MultiPoly>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn primitive_part_list(r: &[MultiPoly]) -> Vec<MultiPoly> {
    let mut g = MultiPoly::zero(r[0].nvars);
    for c in r {
        if !c.is_zero() {
            g = MultiPoly::gcd(&g, c);
        }
    }
    r.iter().map(|c| c.div_exact(&g).expect("content divides")).collect()
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&DEFAULT_NAMES))
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.with_nvars(self.nvars.max(rhs.nvars));
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.with_nvars(self.nvars.max(rhs.nvars));
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars.max(rhs.nvars));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = std::array::from_fn(|i| ea[i] + eb[i]);
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
