//! Step multisets in ℤ² and ℤ³, their characteristic polynomials and the
//! small combinatorial invariants used by the certifiers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{int, MultiPoly, MAX_VARS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("column {column}: {message}")]
pub struct ParseError {
    /// 1-based character column within the input line.
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(column: usize, message: impl Into<String>) -> Self {
        ParseError { column, message: message.into() }
    }
}

/// A nonzero vector with entries in {-1, 0, 1}. Unused trailing coordinates
/// are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Step(pub [i8; MAX_VARS]);

impl Step {
    pub fn new(coords: &[i8]) -> Self {
        assert!(coords.len() <= MAX_VARS);
        let mut c = [0; MAX_VARS];
        c[..coords.len()].copy_from_slice(coords);
        Step(c)
    }

    pub fn coord(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; MAX_VARS]
    }

    fn exponent(&self) -> [i32; MAX_VARS] {
        self.0.map(i32::from)
    }
}

/// A model: distinct steps in lexicographic order with positive
/// multiplicities.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Model {
    dim: usize,
    steps: Vec<(Step, u32)>,
}

/// `S = v̄·minus + zero + v·plus` for the chosen axis `v`; the three parts do
/// not involve `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisDecomposition {
    pub axis: usize,
    pub minus: MultiPoly,
    pub zero: MultiPoly,
    pub plus: MultiPoly,
}

impl AxisDecomposition {
    pub fn reconstruct(&self) -> MultiPoly {
        let n = self.minus.nvars();
        let mut e = [0; MAX_VARS];
        e[self.axis] = -1;
        let vbar = MultiPoly::monomial(n, e, int(1));
        let v = MultiPoly::var(n, self.axis);
        &(&(&vbar * &self.minus) + &self.zero) + &(&v * &self.plus)
    }
}

impl Model {
    /// Builds a model from (possibly repeated) steps with multiplicities.
    pub fn new(dim: usize, steps: impl IntoIterator<Item = (Step, u32)>) -> Self {
        assert!((2..=3).contains(&dim), "arity must be 2 or 3");
        let mut acc: BTreeMap<Step, u32> = BTreeMap::new();
        for (s, k) in steps {
            assert!(!s.is_zero(), "zero step");
            assert!(s.0[dim..].iter().all(|&c| c == 0));
            if k > 0 {
                *acc.entry(s).or_insert(0) += k;
            }
        }
        assert!(!acc.is_empty(), "empty model");
        Model { dim, steps: acc.into_iter().collect() }
    }

    /// Builds a model from a list of literal steps, each counted once per
    /// occurrence.
    pub fn from_list(dim: usize, steps: &[&[i8]]) -> Self {
        Self::new(dim, steps.iter().map(|s| (Step::new(s), 1)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn steps(&self) -> &[(Step, u32)] {
        &self.steps
    }

    pub fn num_distinct(&self) -> usize {
        self.steps.len()
    }

    /// Σ multiplicities.
    pub fn cardinality(&self) -> u32 {
        self.steps.iter().map(|(_, k)| k).sum()
    }

    pub fn multiplicity(&self, s: &Step) -> u32 {
        self.steps.iter().find(|(t, _)| t == s).map_or(0, |(_, k)| *k)
    }

    pub fn has_step(&self, coords: &[i8]) -> bool {
        self.multiplicity(&Step::new(coords)) > 0
    }

    pub fn has_positive(&self, axis: usize) -> bool {
        self.steps.iter().any(|(s, _)| s.0[axis] > 0)
    }

    pub fn has_negative(&self, axis: usize) -> bool {
        self.steps.iter().any(|(s, _)| s.0[axis] < 0)
    }

    /// `Σ k·x^i y^j (z^l)` over steps `(i, j, l)` of multiplicity `k`.
    pub fn characteristic_polynomial(&self) -> MultiPoly {
        MultiPoly::from_terms(
            self.dim,
            self.steps.iter().map(|(s, k)| (s.exponent(), BigRational::from_integer(BigInt::from(*k)))),
        )
    }

    pub fn axis_decomposition(&self, axis: usize) -> AxisDecomposition {
        assert!(axis < self.dim);
        let mut parts = [MultiPoly::zero(self.dim), MultiPoly::zero(self.dim), MultiPoly::zero(self.dim)];
        for (s, k) in &self.steps {
            let mut e = s.exponent();
            let slot = (e[axis] + 1) as usize;
            e[axis] = 0;
            parts[slot].add_term(e, int(i64::from(*k)));
        }
        let [minus, zero, plus] = parts;
        AxisDecomposition { axis, minus, zero, plus }
    }

    /// Same steps, every multiplicity 1, together with the original
    /// multiplicities in step order.
    pub fn reduce_multiset(&self) -> (Model, Vec<u32>) {
        let reduced = Model { dim: self.dim, steps: self.steps.iter().map(|(s, _)| (*s, 1)).collect() };
        (reduced, self.steps.iter().map(|(_, k)| *k).collect())
    }

    /// Repeats each step of `self` according to `r`.
    pub fn with_multiplicities(&self, r: &[u32]) -> Model {
        assert_eq!(r.len(), self.steps.len());
        Model::new(self.dim, self.steps.iter().zip(r).map(|((s, _), k)| (*s, *k)))
    }

    /// No step among (-1,0), (-1,-1), (0,-1).
    pub fn is_singular(&self) -> bool {
        assert_eq!(self.dim, 2, "singularity is defined for planar models");
        ![[-1, 0], [-1, -1], [0, -1]].iter().any(|s| self.has_step(s))
    }

    pub fn swap_axes(&self, i: usize, j: usize) -> Model {
        Model::new(
            self.dim,
            self.steps.iter().map(|(s, k)| {
                let mut c = s.0;
                c.swap(i, j);
                (Step(c), *k)
            }),
        )
    }

    pub fn xy_reflection(&self) -> Model {
        self.swap_axes(0, 1)
    }

    /// Drops coordinate `axis`. Steps that become zero are discarded and
    /// coinciding steps merge their multiplicities. `None` if nothing is left.
    pub fn project(&self, axis: usize) -> Option<Model> {
        assert_eq!(self.dim, 3);
        let steps: Vec<(Step, u32)> = self
            .steps
            .iter()
            .map(|(s, k)| {
                let c: Vec<i8> = (0..3).filter(|&i| i != axis).map(|i| s.0[i]).collect();
                (Step::new(&c), *k)
            })
            .filter(|(s, _)| !s.is_zero())
            .collect();
        if steps.is_empty() {
            return None;
        }
        Some(Model::new(2, steps))
    }

    /// Embeds a planar model in ℤ³ with zero third coordinate.
    pub fn lift(&self) -> Model {
        assert_eq!(self.dim, 2);
        Model { dim: 3, steps: self.steps.clone() }
    }

    /// Smallest `d` such that some `d` of the inequalities
    /// `Σ_s a_s s_k ≥ 0` imply all of them over `a ≥ 0`.
    pub fn dimension(&self) -> usize {
        let axes: Vec<usize> = (0..self.dim).collect();
        for d in 0..=self.dim {
            for subset in subsets(&axes, d) {
                if axes.iter().all(|&k| subset.contains(&k) || self.implies(&subset, k)) {
                    return d;
                }
            }
        }
        self.dim
    }

    /// Whether the inequalities of `premises` imply inequality `k` for every
    /// nonnegative weighting of the steps. By Farkas' lemma this holds iff
    /// `L_k = Σ λ_i L_i + μ` with `λ, μ ≥ 0`, that is iff some `λ ≥ 0`
    /// satisfies `Σ λ_i s_i ≤ s_k` for every step.
    pub fn implies(&self, premises: &[usize], k: usize) -> bool {
        let rows: Vec<(Vec<BigRational>, BigRational)> = self
            .steps
            .iter()
            .map(|(s, _)| (premises.iter().map(|&i| int(s.0[i].into())).collect(), int(s.0[k].into())))
            .collect();
        fourier_motzkin_feasible(premises.len(), rows)
    }

    /// A nonzero normal `(u, v)` with `u·i + v·j ≥ 0` on every step, if one
    /// exists. Some such normal is always orthogonal to a step, so those are
    /// the only candidates.
    pub fn half_plane_normal(&self) -> Option<(i64, i64)> {
        assert_eq!(self.dim, 2);
        for (s, _) in &self.steps {
            let (i, j) = (i64::from(s.0[0]), i64::from(s.0[1]));
            for (u, v) in [(-j, i), (j, -i)] {
                if self.steps.iter().all(|(t, _)| u * i64::from(t.0[0]) + v * i64::from(t.0[1]) >= 0) {
                    return Some((u, v));
                }
            }
        }
        None
    }

    /// Steps written out with repetition, as in `[[-1,1],[-1,1],[1,0]]`.
    pub fn bracket_form(&self) -> String {
        let mut parts = Vec::new();
        for (s, k) in &self.steps {
            let c: Vec<String> = s.0[..self.dim].iter().map(|v| v.to_string()).collect();
            for _ in 0..*k {
                parts.push(format!("[{}]", c.join(",")));
            }
        }
        format!("[{}]", parts.join(","))
    }
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], size - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Feasibility of `{λ ≥ 0 : row·λ ≤ rhs for every row}` by Fourier–Motzkin
/// elimination.
pub fn fourier_motzkin_feasible(nvars: usize, mut rows: Vec<(Vec<BigRational>, BigRational)>) -> bool {
    for j in 0..nvars {
        let mut e = vec![BigRational::zero(); nvars];
        e[j] = int(-1);
        rows.push((e, BigRational::zero()));
    }
    for j in 0..nvars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.0[j].is_positive() {
                pos.push(r);
            } else if r.0[j].is_negative() {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        for (pc, pb) in &pos {
            for (nc, nb) in &neg {
                let a = &pc[j];
                let b = -&nc[j];
                let coeffs: Vec<BigRational> = pc.iter().zip(nc).map(|(p, n)| p * &b + n * a).collect();
                rest.push((coeffs, pb * &b + nb * a));
            }
        }
        rows = rest;
    }
    rows.iter().all(|(_, b)| !b.is_negative())
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .steps
            .iter()
            .map(|(s, k)| {
                let c: Vec<String> = s.0[..self.dim].iter().map(|v| v.to_string()).collect();
                if *k > 1 {
                    format!("{}×{}", c.join(" "), k)
                } else {
                    c.join(" ")
                }
            })
            .collect();
        f.write_str(&parts.join("; "))
    }
}

impl FromStr for Model {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_model(s)
    }
}

impl Serialize for Model {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Model {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_model(&s).map_err(serde::de::Error::custom)
    }
}

/// Parses one model. Accepted forms:
///
/// * `-1 0; -1 1×3; 0 -1; 1 1` (`*k` is accepted for `×k`),
/// * `[[-1,0],[-1,1],[-1,1],[-1,1],[0,-1],[1,1]]`.
///
/// Text after `#` is ignored.
pub fn parse_model(text: &str) -> Result<Model, ParseError> {
    let body = text.split('#').next().unwrap_or("");
    let trimmed = body.trim_start();
    let offset = body.len() - trimmed.len();
    let trimmed = trimmed.trim_end();
    if trimmed.is_empty() {
        return Err(ParseError::new(1, "empty model"));
    }
    if trimmed.starts_with('[') {
        return parse_bracket(trimmed, offset);
    }
    let mut dim = None;
    let mut steps = Vec::new();
    let mut pos = offset;
    let chunks: Vec<&str> = body[offset..].split(';').collect();
    let last = chunks.len() - 1;
    for (idx, chunk) in chunks.into_iter().enumerate() {
        let col = char_column(text, pos + leading_ws(chunk));
        pos += chunk.len() + 1;
        let chunk = chunk.trim();
        if chunk.is_empty() {
            // a trailing separator is harmless
            if idx == last {
                continue;
            }
            return Err(ParseError::new(col, "empty step"));
        }
        let (coords, mult) = match chunk.split_once(['×', '*']) {
            Some((c, m)) => {
                let m: u32 =
                    m.trim().parse().map_err(|_| ParseError::new(col, format!("bad multiplicity in '{chunk}'")))?;
                if m == 0 {
                    return Err(ParseError::new(col, "multiplicity must be positive"));
                }
                (c, m)
            }
            None => (chunk, 1),
        };
        let c: Vec<i8> = coords
            .split_whitespace()
            .map(|t| t.parse::<i8>().map_err(|_| ParseError::new(col, format!("bad coordinate '{t}'"))))
            .collect::<Result<_, _>>()?;
        steps.push((check_step(&c, &mut dim, col)?, mult));
    }
    let dim = dim.ok_or_else(|| ParseError::new(1, "empty model"))?;
    Ok(Model::new(dim, steps))
}

fn leading_ws(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

fn char_column(text: &str, byte: usize) -> usize {
    text[..byte.min(text.len())].chars().count() + 1
}

fn check_step(c: &[i8], dim: &mut Option<usize>, col: usize) -> Result<Step, ParseError> {
    if !(2..=3).contains(&c.len()) {
        return Err(ParseError::new(col, format!("step must have 2 or 3 coordinates, found {}", c.len())));
    }
    if let Some(d) = *dim {
        if d != c.len() {
            return Err(ParseError::new(col, "steps of different arity"));
        }
    }
    *dim = Some(c.len());
    if c.iter().any(|v| !(-1..=1).contains(v)) {
        return Err(ParseError::new(col, "coordinate outside {-1, 0, 1}"));
    }
    let s = Step::new(c);
    if s.is_zero() {
        return Err(ParseError::new(col, "zero step"));
    }
    Ok(s)
}

fn parse_bracket(text: &str, offset: usize) -> Result<Model, ParseError> {
    let col = offset + 1;
    let raw: Vec<Vec<i64>> =
        serde_json::from_str(text).map_err(|e| ParseError::new(col + e.column().saturating_sub(1), e.to_string()))?;
    let mut dim = None;
    let mut steps = Vec::new();
    for c in raw {
        let c: Vec<i8> = c
            .iter()
            .map(|&v| i8::try_from(v).map_err(|_| ParseError::new(col, "coordinate outside {-1, 0, 1}")))
            .collect::<Result<_, _>>()?;
        steps.push((check_step(&c, &mut dim, col)?, 1));
    }
    let dim = dim.ok_or_else(|| ParseError::new(col, "empty model"))?;
    Ok(Model::new(dim, steps))
}

/// Parses a corpus: one model per line, blank and comment-only lines
/// skipped. Each entry carries its 1-based line number.
pub fn parse_corpus(text: &str) -> Vec<(usize, Result<Model, ParseError>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.split('#').next().unwrap_or("").trim().is_empty())
        .map(|(i, l)| (i + 1, parse_model(l)))
        .collect()
}

/// Frequently used models.
pub mod fixtures {
    use super::Model;

    pub fn simple_walk() -> Model {
        Model::from_list(2, &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]])
    }

    pub fn kreweras() -> Model {
        Model::from_list(2, &[&[-1, 0], &[0, -1], &[1, 1]])
    }

    pub fn reverse_kreweras() -> Model {
        Model::from_list(2, &[&[0, 1], &[1, 0], &[-1, -1]])
    }

    pub fn tandem() -> Model {
        Model::from_list(2, &[&[1, 0], &[-1, 1], &[0, -1]])
    }

    pub fn simple_walk_3d() -> Model {
        Model::from_list(3, &[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]])
    }

    /// `S = 1/x + 3y/x + 1/y + xy`.
    pub fn example_fixed_point() -> Model {
        Model::from_list(2, &[&[-1, 0], &[-1, 1], &[-1, 1], &[-1, 1], &[0, -1], &[1, 1]])
    }

    /// `S = 2y/x + x/y + x`.
    pub fn example_valuation() -> Model {
        Model::from_list(2, &[&[-1, 1], &[-1, 1], &[1, -1], &[1, 0]])
    }

    /// The five singular step sets.
    pub fn singular_bases() -> Vec<Model> {
        [
            &[[-1, 1], [1, -1], [1, 1]][..],
            &[[-1, 1], [1, -1], [0, 1]][..],
            &[[-1, 1], [1, -1], [0, 1], [1, 0]][..],
            &[[-1, 1], [1, -1], [0, 1], [1, 1]][..],
            &[[-1, 1], [1, -1], [0, 1], [1, 0], [1, 1]][..],
        ]
        .iter()
        .map(|steps| {
            let v: Vec<&[i8]> = steps.iter().map(|s| &s[..]).collect();
            Model::from_list(2, &v)
        })
        .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn parse_example_with_repeats() {
        let m = parse_model("-1 0; -1 1; -1 1; -1 1; 0 -1; 1 1").unwrap();
        assert_eq!(m, example_fixed_point());
        assert_eq!(m.multiplicity(&Step::new(&[-1, 1])), 3);
        assert_eq!(m.to_string(), "-1 0; -1 1×3; 0 -1; 1 1");
        assert_eq!(parse_model(&m.to_string()).unwrap(), m);
        assert_eq!(parse_model("-1 1*3; -1 0; 1 1; 0 -1").unwrap(), m);
        assert_eq!(parse_model("[[-1,0],[-1,1],[-1,1],[-1,1],[0,-1],[1,1]]  # ex").unwrap(), m);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_model("0 0").unwrap_err().message, "zero step");
        assert!(parse_model("1 2").is_err());
        assert!(parse_model("").is_err());
        assert!(parse_model("# nothing").is_err());
        assert!(parse_model("1 0; 1 0 1").is_err());
        let e = parse_model("1 0; 0 0").unwrap_err();
        assert_eq!(e.column, 6);
        assert_eq!(parse_model("1 1 1").unwrap().dim(), 3);
    }

    #[test]
    fn characteristic_polynomials() {
        let s = example_fixed_point().characteristic_polynomial();
        let at = s.eval(&[rat(2, 1), rat(3, 1)]).unwrap();
        // 1/2 + 9/2 + 1/3 + 6
        assert_eq!(at, rat(34, 3));
        let s = example_valuation().characteristic_polynomial();
        assert_eq!(s.eval(&[rat(2, 1), rat(3, 1)]).unwrap(), rat(3, 1) + rat(2, 3) + rat(2, 1));
    }

    #[test]
    fn axis_decompositions() {
        let d = example_fixed_point().axis_decomposition(0);
        assert_eq!(d.minus.to_string(), "3*y + 1");
        assert_eq!(d.plus.to_string(), "y");
        let d = example_valuation().axis_decomposition(1);
        assert_eq!(d.minus.to_string(), "x");
        assert_eq!(d.plus.to_string(), "2*x^-1");
        let d = simple_walk().axis_decomposition(0);
        assert_eq!(d.zero.to_string(), "y + y^-1");
    }

    #[test]
    fn dimensions() {
        assert_eq!(Model::from_list(3, &[&[1, 1, 1]]).dimension(), 0);
        assert_eq!(Model::from_list(3, &[&[-1, 1, 0], &[1, -1, 0], &[1, 1, 0]]).dimension(), 2);
        assert_eq!(Model::from_list(3, &[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1], &[1, 1, 1]]).dimension(), 3);
        assert_eq!(simple_walk_3d().dimension(), 3);
        assert_eq!(simple_walk().dimension(), 2);
        // y-inequality implied by x: steps (-1,1), (1,0)
        assert_eq!(Model::from_list(2, &[&[-1, 1], &[1, 0]]).dimension(), 1);
    }

    #[test]
    fn reductions_and_reflections() {
        let m = parse_model("[[-1, 1], [-1, 1], [-1, 1], [1, -1], [1, 1]]").unwrap();
        let (red, r) = m.reduce_multiset();
        assert_eq!(red.to_string(), "-1 1; 1 -1; 1 1");
        assert_eq!(r, vec![3, 1, 1]);
        assert_eq!(red.with_multiplicities(&r), m);
        let row10 = parse_model("[[-1, 1], [-1, 1], [1, -1], [1, 0]]").unwrap();
        assert_eq!(row10.xy_reflection().to_string(), "-1 1; 0 1; 1 -1×2");
    }

    #[test]
    fn singular_and_half_plane() {
        let m = Model::from_list(2, &[&[-1, 1], &[1, -1], &[1, 1]]);
        assert!(m.is_singular());
        assert!(!example_fixed_point().is_singular());
        assert!(!simple_walk().is_singular());
        assert_eq!(m.half_plane_normal(), Some((1, 1)));
        assert_eq!(simple_walk().half_plane_normal(), None);
        assert_eq!(tandem().half_plane_normal(), None);
    }

    #[test]
    fn projection_drops_zero_steps() {
        let m = Model::from_list(3, &[&[0, 0, 1], &[1, 0, -1], &[1, 0, 1]]);
        let p = m.project(2).unwrap();
        assert_eq!(p.to_string(), "1 0×2");
    }
}
