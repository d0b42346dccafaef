//! The birational involutions of a model and the group they generate.
//!
//! Composition convention: `compose(f, g)` is `f ∘ g`, i.e. apply `g`
//! first, then `f`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{MultiPoly, MAX_VARS};
use crate::model::Model;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("no positive step along axis {0}")]
    MissingPositiveStep(usize),
    #[error("no negative step along axis {0}")]
    MissingNegativeStep(usize),
    #[error("composition produced an identically zero denominator")]
    DegenerateComposition,
}

/// A rational function `num / den` in lowest terms. Both parts are
/// polynomials; `den` has coprime integer coefficients and a positive
/// graded-lex leading coefficient.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunction {
    /// Reduces `num / den` to canonical form; `None` if `den` is zero.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let nv = num.nvars().max(den.nvars());
        if num.is_zero() {
            return Some(RationalFunction { num: MultiPoly::zero(nv), den: MultiPoly::one(nv) });
        }
        let (n, sn) = num.to_polynomial();
        let (d, sd) = den.to_polynomial();
        // num/den = n·m^(sd - sn) / d
        let mut up = [0; MAX_VARS];
        let mut down = [0; MAX_VARS];
        for i in 0..MAX_VARS {
            let k = sd[i] - sn[i];
            if k > 0 {
                up[i] = k;
            } else {
                down[i] = -k;
            }
        }
        let n = n.mul_monomial(&up).with_nvars(nv);
        let d = d.mul_monomial(&down).with_nvars(nv);
        let g = MultiPoly::gcd(&n, &d);
        let n = n.div_exact(&g).expect("gcd divides");
        let d = d.div_exact(&g).expect("gcd divides");
        let mut c = d.content();
        if d.grlex_leading_coeff().is_negative() {
            c = -c;
        }
        let c = c.recip();
        Some(RationalFunction { num: n.scale(&c), den: d.scale(&c) })
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let one = MultiPoly::one(p.nvars());
        Self::new(p, one).expect("nonzero denominator")
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        RationalFunction { num: MultiPoly::var(nvars, i), den: MultiPoly::one(nvars) }
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn eval(&self, point: &[BigRational]) -> Option<BigRational> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(point)? / d)
    }

    /// `self(g(v))`, the substitution of the components of `g`.
    pub fn substitute(&self, g: &BirationalMap) -> Result<RationalFunction, GroupError> {
        let n = homogenized_substitution(&self.num, g);
        let d = homogenized_substitution(&self.den, g);
        let nv = g.arity();
        let mut top = n.0;
        let mut bottom = d.0;
        for j in 0..nv {
            let (dn, dd) = (n.1[j], d.1[j]);
            let b = g.comps[j].den();
            if dd > dn {
                top = &top * &b.pow((dd - dn) as u32);
            } else if dn > dd {
                bottom = &bottom * &b.pow((dn - dd) as u32);
            }
        }
        RationalFunction::new(top, bottom).ok_or(GroupError::DegenerateComposition)
    }
}

/// For a polynomial `p` and components `a_j / b_j`, returns
/// `p(a/b) · Π b_j^(deg_j p)` as a polynomial, together with the degrees.
fn homogenized_substitution(p: &MultiPoly, g: &BirationalMap) -> (MultiPoly, [i32; MAX_VARS]) {
    let nv = g.arity();
    let mut degs = [0; MAX_VARS];
    for (j, d) in degs.iter_mut().enumerate().take(nv) {
        *d = p.degree_in(j);
    }
    let mut a_pows: Vec<Vec<MultiPoly>> = Vec::new();
    let mut b_pows: Vec<Vec<MultiPoly>> = Vec::new();
    for (j, &dj) in degs.iter().enumerate().take(nv) {
        let mut av = vec![MultiPoly::one(nv)];
        let mut bv = vec![MultiPoly::one(nv)];
        for k in 1..=dj as usize {
            av.push(&av[k - 1] * g.comps[j].num());
            bv.push(&bv[k - 1] * g.comps[j].den());
        }
        a_pows.push(av);
        b_pows.push(bv);
    }
    let mut out = MultiPoly::zero(nv);
    for (e, c) in p.terms() {
        let mut t = MultiPoly::constant(nv, c.clone());
        for j in 0..nv {
            let k = e[j] as usize;
            t = &t * &a_pows[j][k];
            t = &t * &b_pows[j][degs[j] as usize - k];
        }
        out = &out + &t;
    }
    (out, degs)
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den.constant_value().is_some_and(|c| c == BigRational::from_integer(1.into()))
        {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A map `(x, y[, z]) ↦ (f_1, f_2[, f_3])` with canonical rational
/// components.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BirationalMap {
    comps: Vec<RationalFunction>,
}

impl BirationalMap {
    pub fn identity(arity: usize) -> Self {
        BirationalMap { comps: (0..arity).map(|i| RationalFunction::var(arity, i)).collect() }
    }

    pub fn from_components(comps: Vec<RationalFunction>) -> Self {
        BirationalMap { comps }
    }

    pub fn arity(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[RationalFunction] {
        &self.comps
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.arity())
    }

    /// The involution along `axis`: `v ↦ v̄·V₋/V₊`, other coordinates fixed.
    pub fn involution(m: &Model, axis: usize) -> Result<Self, GroupError> {
        let dec = m.axis_decomposition(axis);
        if dec.plus.is_zero() {
            return Err(GroupError::MissingPositiveStep(axis));
        }
        if dec.minus.is_zero() {
            return Err(GroupError::MissingNegativeStep(axis));
        }
        let d = m.dim();
        let v = MultiPoly::var(d, axis);
        let mut map = Self::identity(d);
        map.comps[axis] = RationalFunction::new(dec.minus, &v * &dec.plus).expect("nonzero denominator");
        Ok(map)
    }

    /// The generators of the group of `m`, one per axis.
    pub fn generators(m: &Model) -> Result<Vec<Self>, GroupError> {
        (0..m.dim()).map(|a| Self::involution(m, a)).collect()
    }

    /// `f ∘ g`: apply `g`, then `f`.
    pub fn compose(f: &BirationalMap, g: &BirationalMap) -> Result<BirationalMap, GroupError> {
        assert_eq!(f.arity(), g.arity());
        let comps = f.comps.iter().map(|c| c.substitute(g)).collect::<Result<_, _>>()?;
        Ok(BirationalMap { comps })
    }

    pub fn eval(&self, point: &[BigRational]) -> Option<Vec<BigRational>> {
        self.comps.iter().map(|c| c.eval(point)).collect()
    }

    /// Evaluation modulo [`FINGERPRINT_PRIME`]; `None` when a denominator or
    /// an inverted coordinate vanishes.
    pub fn eval_mod(&self, point: &[u64]) -> Option<Vec<u64>> {
        self.comps
            .iter()
            .map(|c| {
                let d = eval_poly_mod(c.den(), point)?;
                if d == 0 {
                    return None;
                }
                Some(mul_mod(eval_poly_mod(c.num(), point)?, inv_mod(d)))
            })
            .collect()
    }
}

impl fmt::Display for BirationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl fmt::Debug for BirationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Modulus of the evaluation fingerprints, the Mersenne prime 2^61 - 1.
pub const FINGERPRINT_PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % FINGERPRINT_PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, FINGERPRINT_PRIME - 2)
}

fn rational_mod(q: &BigRational) -> Option<u64> {
    let p = BigInt::from(FINGERPRINT_PRIME);
    let reduce = |n: &BigInt| {
        let r = n % &p;
        let r = if r.is_negative() { r + &p } else { r };
        r.to_u64().expect("reduced residue")
    };
    let d = reduce(q.denom());
    if d == 0 {
        return None;
    }
    Some(mul_mod(reduce(q.numer()), inv_mod(d)))
}

fn eval_poly_mod(p: &MultiPoly, point: &[u64]) -> Option<u64> {
    let mut acc = 0u64;
    for (e, c) in p.terms() {
        let mut t = rational_mod(c)?;
        for (j, &k) in e.iter().enumerate().take(point.len()) {
            if k == 0 {
                continue;
            }
            let base = if k < 0 {
                if point[j] == 0 {
                    return None;
                }
                inv_mod(point[j])
            } else {
                point[j]
            };
            t = mul_mod(t, pow_mod(base, k.unsigned_abs() as u64));
        }
        acc = (acc + t) % FINGERPRINT_PRIME;
    }
    Some(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum GroupOrder {
    Finite(u64),
    ExceedsBound(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitResult {
    pub verdict: GroupOrder,
    pub elements_explored: usize,
}

/// Number of random evaluation points used for fingerprints.
const FINGERPRINT_POINTS: usize = 3;
const MAX_REDRAWS: usize = 32;

struct Element {
    parent: Option<(usize, usize)>,
    fingerprint: Vec<Vec<u64>>,
}

/// Breadth-first enumeration of the group generated by the involutions of
/// `m`. Elements are compared through their values at seeded random points
/// modulo [`FINGERPRINT_PRIME`]; every fingerprint collision is settled by
/// exact comparison of canonical forms.
pub fn orbit_search(m: &Model, bound: u64, seed: u64) -> Result<OrbitResult, GroupError> {
    assert!(bound >= 1);
    let gens = BirationalMap::generators(m)?;
    for g in &gens {
        assert!(BirationalMap::compose(g, g)?.is_identity(), "generator is not an involution");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REDRAWS {
        let points: Vec<Vec<u64>> =
            (0..FINGERPRINT_POINTS).map(|_| (0..m.dim()).map(|_| rng.gen_range(2..=97)).collect()).collect();
        if let Some(r) = search_with_points(&gens, bound, &points)? {
            return Ok(r);
        }
    }
    panic!("fingerprint points kept hitting poles");
}

fn search_with_points(
    gens: &[BirationalMap],
    bound: u64,
    points: &[Vec<u64>],
) -> Result<Option<OrbitResult>, GroupError> {
    let mut elements = vec![Element { parent: None, fingerprint: points.to_vec() }];
    let mut index: HashMap<Vec<Vec<u64>>, Vec<usize>> = HashMap::new();
    index.insert(points.to_vec(), vec![0]);
    let mut forms: HashMap<usize, BirationalMap> = HashMap::new();
    forms.insert(0, BirationalMap::identity(gens[0].arity()));
    let mut head = 0;
    while head < elements.len() {
        for (gi, g) in gens.iter().enumerate() {
            if elements[head].parent.is_some_and(|(_, last)| last == gi) {
                // g∘(g∘p) = p, already known
                continue;
            }
            let mut fp = Vec::with_capacity(points.len());
            for v in &elements[head].fingerprint {
                match g.eval_mod(v) {
                    Some(w) => fp.push(w),
                    None => return Ok(None),
                }
            }
            let mut known = false;
            if let Some(candidates) = index.get(&fp).cloned() {
                let new_form = BirationalMap::compose(g, &form(head, &elements, gens, &mut forms)?)?;
                for c in candidates {
                    if form(c, &elements, gens, &mut forms)? == new_form {
                        known = true;
                        break;
                    }
                }
            }
            if known {
                continue;
            }
            let id = elements.len();
            elements.push(Element { parent: Some((head, gi)), fingerprint: fp.clone() });
            index.entry(fp).or_default().push(id);
            if elements.len() as u64 > bound {
                return Ok(Some(OrbitResult {
                    verdict: GroupOrder::ExceedsBound(bound),
                    elements_explored: elements.len(),
                }));
            }
        }
        head += 1;
    }
    let n = elements.len();
    Ok(Some(OrbitResult { verdict: GroupOrder::Finite(n as u64), elements_explored: n }))
}

/// Canonical form of element `i`, built from its parent on demand.
fn form(
    i: usize,
    elements: &[Element],
    gens: &[BirationalMap],
    cache: &mut HashMap<usize, BirationalMap>,
) -> Result<BirationalMap, GroupError> {
    if let Some(f) = cache.get(&i) {
        return Ok(f.clone());
    }
    let (p, g) = elements[i].parent.expect("identity is cached");
    let parent = form(p, elements, gens, cache)?;
    let f = BirationalMap::compose(&gens[g], &parent)?;
    cache.insert(i, f.clone());
    Ok(f)
}

/// Every element of the group as an explicit map, when the group is finite
/// with at most `bound` elements. Used for closure audits.
pub fn enumerate_elements(m: &Model, bound: usize) -> Result<Option<Vec<BirationalMap>>, GroupError> {
    let gens = BirationalMap::generators(m)?;
    let mut elems = vec![BirationalMap::identity(m.dim())];
    let mut head = 0;
    while head < elems.len() {
        for g in &gens {
            let c = BirationalMap::compose(g, &elems[head])?;
            if !elems.contains(&c) {
                if elems.len() >= bound {
                    return Ok(None);
                }
                elems.push(c);
            }
        }
        head += 1;
    }
    Ok(Some(elems))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::model::fixtures::*;

    #[test]
    fn simple_walk_generators() {
        let m = simple_walk();
        let phi = BirationalMap::involution(&m, 0).unwrap();
        assert_eq!(phi.to_string(), "[(1) / (x), y]");
        let psi = BirationalMap::involution(&m, 1).unwrap();
        let theta = BirationalMap::compose(&psi, &phi).unwrap();
        assert_eq!(theta.to_string(), "[(1) / (x), (1) / (y)]");
    }

    #[test]
    fn example_generators() {
        let phi = BirationalMap::involution(&example_valuation(), 0).unwrap();
        let p = phi.eval(&[rat(3, 1), rat(2, 1)]).unwrap();
        // 2y^2 / (x(1+y))
        assert_eq!(p[0], rat(8, 9));
        let psi = BirationalMap::involution(&example_fixed_point(), 1).unwrap();
        let p = psi.eval(&[rat(3, 1), rat(2, 1)]).unwrap();
        // x / (y(3 + x^2))
        assert_eq!(p[1], rat(3, 24));
    }

    #[test]
    fn involutions_square_to_identity() {
        for m in [example_fixed_point(), example_valuation(), kreweras(), simple_walk_3d()] {
            for g in BirationalMap::generators(&m).unwrap() {
                assert!(BirationalMap::compose(&g, &g).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn orders() {
        let order = |m: &Model| orbit_search(m, 200, 7).unwrap().verdict;
        assert_eq!(order(&simple_walk()), GroupOrder::Finite(4));
        assert_eq!(order(&kreweras()), GroupOrder::Finite(6));
        assert_eq!(order(&tandem()), GroupOrder::Finite(6));
        assert_eq!(order(&simple_walk_3d()), GroupOrder::Finite(8));
        assert_eq!(order(&example_fixed_point()), GroupOrder::ExceedsBound(200));
    }

    #[test]
    fn missing_steps() {
        let m = Model::from_list(2, &[&[1, 0], &[0, 1], &[0, -1]]);
        assert_eq!(BirationalMap::involution(&m, 0), Err(GroupError::MissingNegativeStep(0)));
        let m = Model::from_list(2, &[&[-1, 0], &[0, 1], &[0, -1]]);
        assert_eq!(BirationalMap::involution(&m, 0), Err(GroupError::MissingPositiveStep(0)));
    }
}
