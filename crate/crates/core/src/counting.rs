//! Exact and floating-point enumeration of walks confined to the quadrant
//! (or octant), weighted by step multiplicities.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Model, Step};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("{cells} lattice cells exceed the cap of {cap}")]
    TooLarge { cells: u64, cap: u64 },
    #[error("endpoint has {found} coordinates, model has dimension {expected}")]
    EndpointDimension { expected: usize, found: usize },
    #[error("invalid series text at line {line}: {message}")]
    BadSeries { line: usize, message: String },
}

/// Default bound on the number of cells of one DP layer.
pub const DEFAULT_CELL_CAP: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    /// Walks returning to the origin.
    Origin,
    /// Walks ending anywhere.
    All,
    Point(Vec<i64>),
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Origin => f.write_str("origin"),
            Endpoint::All => f.write_str("all"),
            Endpoint::Point(p) => {
                let s: Vec<String> = p.iter().map(i64::to_string).collect();
                write!(f, "{}", s.join(","))
            }
        }
    }
}

impl std::str::FromStr for Endpoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "origin" => Ok(Endpoint::Origin),
            "all" => Ok(Endpoint::All),
            t => t
                .split(',')
                .map(|c| c.trim().parse::<i64>().map_err(|e| format!("bad endpoint {t:?}: {e}")))
                .collect::<Result<Vec<_>, _>>()
                .map(Endpoint::Point),
        }
    }
}

/// Counts `e₀, …, e_N` of walks of a model with a given endpoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Series {
    pub model: String,
    pub endpoint: Endpoint,
    #[serde(with = "biguint_vec")]
    pub terms: Vec<BigUint>,
}

mod biguint_vec {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|x| x.parse().map_err(serde::de::Error::custom)).collect()
    }
}

impl Series {
    pub fn horizon(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }

    /// One integer per line after `#` header lines.
    pub fn to_text(&self) -> String {
        let mut out =
            format!("# model: {}\n# endpoint: {}\n# horizon: {}\n", self.model, self.endpoint, self.horizon());
        for t in &self.terms {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Series, CountError> {
        let mut model = String::new();
        let mut endpoint = Endpoint::Origin;
        let mut terms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            let bad = |message: String| CountError::BadSeries { line: i + 1, message };
            if let Some(h) = line.strip_prefix('#') {
                if let Some((k, v)) = h.split_once(':') {
                    match k.trim() {
                        "model" => model = v.trim().to_string(),
                        "endpoint" => endpoint = v.parse().map_err(bad)?,
                        _ => {}
                    }
                }
            } else if !line.is_empty() {
                terms.push(line.parse().map_err(|e| bad(format!("{e}")))?);
            }
        }
        Ok(Series { model, endpoint, terms })
    }

    /// Indices of the nonzero terms.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().enumerate().filter(|(_, t)| !t.is_zero()).map(|(i, _)| i)
    }
}

/// Dense cube `[0, side)^d`, flattened with the first coordinate slowest.
#[derive(Clone, Copy)]
struct Grid {
    dim: usize,
    side: usize,
}

impl Grid {
    fn new(dim: usize, side: usize, cap: u64) -> Result<Grid, CountError> {
        let cells = (side as u64).checked_pow(dim as u32).unwrap_or(u64::MAX);
        if cells > cap {
            return Err(CountError::TooLarge { cells, cap });
        }
        Ok(Grid { dim, side })
    }

    fn len(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    fn coords(&self, mut idx: usize) -> [usize; 3] {
        let mut c = [0; 3];
        for k in (0..self.dim).rev() {
            c[k] = idx % self.side;
            idx /= self.side;
        }
        c
    }

    fn index(&self, c: &[usize]) -> usize {
        c[..self.dim].iter().fold(0, |acc, &v| acc * self.side + v)
    }

    /// Target of a step from `c`, if it stays in the cube.
    fn shift(&self, c: &[usize; 3], s: &Step) -> Option<usize> {
        self.shift_within(c, s, self.side - 1)
    }

    /// Like [`Grid::shift`], with every target coordinate at most `limit`.
    fn shift_within(&self, c: &[usize; 3], s: &Step, limit: usize) -> Option<usize> {
        let mut t = [0; 3];
        for k in 0..self.dim {
            let v = c[k] as i64 + i64::from(s.coord(k));
            if v < 0 || v > limit.min(self.side - 1) as i64 {
                return None;
            }
            t[k] = v as usize;
        }
        Some(self.index(&t))
    }
}

fn endpoint_index(grid: &Grid, endpoint: &Endpoint) -> Result<Option<Option<usize>>, CountError> {
    match endpoint {
        Endpoint::All => Ok(None),
        Endpoint::Origin => Ok(Some(Some(0))),
        Endpoint::Point(p) => {
            if p.len() != grid.dim {
                return Err(CountError::EndpointDimension { expected: grid.dim, found: p.len() });
            }
            if p.iter().any(|&v| v < 0 || v as usize >= grid.side) {
                return Ok(Some(None));
            }
            let c: Vec<usize> = p.iter().map(|&v| v as usize).collect();
            Ok(Some(Some(grid.index(&c))))
        }
    }
}

/// Largest coordinate any counted walk can visit.
fn side_for(n_max: usize, endpoint: &Endpoint) -> usize {
    match endpoint {
        // a walk must come back, so it never goes beyond n/2
        Endpoint::Origin => n_max / 2 + 1,
        _ => n_max + 1,
    }
}

/// Coordinate bound after `k` of `n_max` steps: a walk back to the origin
/// can only be `n_max - k` away.
fn remaining_bound(n_max: usize, k: usize, endpoint: &Endpoint) -> usize {
    match endpoint {
        Endpoint::Origin => n_max - k,
        _ => usize::MAX,
    }
}

pub fn count_walks(m: &Model, n_max: usize, endpoint: &Endpoint) -> Result<Series, CountError> {
    count_walks_capped(m, n_max, endpoint, DEFAULT_CELL_CAP)
}

pub fn count_walks_capped(m: &Model, n_max: usize, endpoint: &Endpoint, cap: u64) -> Result<Series, CountError> {
    let grid = Grid::new(m.dim(), side_for(n_max, endpoint), cap)?;
    let target = endpoint_index(&grid, endpoint)?;
    let steps: Vec<(Step, BigUint)> = m.steps().iter().map(|(s, k)| (*s, BigUint::from(*k))).collect();
    let mut layer = vec![BigUint::zero(); grid.len()];
    layer[0] = BigUint::one();
    let read = |layer: &[BigUint]| -> BigUint {
        match target {
            None => layer.iter().sum(),
            Some(Some(i)) => layer[i].clone(),
            Some(None) => BigUint::zero(),
        }
    };
    let mut terms = vec![read(&layer)];
    for k in 1..=n_max {
        let limit = remaining_bound(n_max, k, endpoint);
        let mut next = vec![BigUint::zero(); grid.len()];
        for (idx, v) in layer.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let c = grid.coords(idx);
            for (s, w) in &steps {
                if let Some(t) = grid.shift_within(&c, s, limit) {
                    next[t] += v * w;
                }
            }
        }
        layer = next;
        terms.push(read(&layer));
    }
    Ok(Series { model: m.to_string(), endpoint: endpoint.clone(), terms })
}

/// `ln eₙ` for `n ≤ n_max`, computed in floating point with a running scale;
/// `-∞` for zero counts. Used only for growth estimates.
pub fn log_counts(m: &Model, n_max: usize, endpoint: &Endpoint) -> Result<Vec<f64>, CountError> {
    let grid = Grid::new(m.dim(), side_for(n_max, endpoint), DEFAULT_CELL_CAP)?;
    let target = endpoint_index(&grid, endpoint)?;
    let steps: Vec<(Step, f64)> = m.steps().iter().map(|(s, k)| (*s, f64::from(*k))).collect();
    let mut layer = vec![0.0f64; grid.len()];
    layer[0] = 1.0;
    let mut scale = 0.0f64;
    let read = |layer: &[f64], scale: f64| -> f64 {
        let v = match target {
            None => layer.iter().sum(),
            Some(Some(i)) => layer[i],
            Some(None) => 0.0,
        };
        if v > 0.0 {
            v.ln() + scale
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut out = vec![read(&layer, scale)];
    for k in 1..=n_max {
        let limit = remaining_bound(n_max, k, endpoint);
        let mut next = vec![0.0f64; grid.len()];
        for (idx, &v) in layer.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let c = grid.coords(idx);
            for (s, w) in &steps {
                if let Some(t) = grid.shift_within(&c, s, limit) {
                    next[t] += v * w;
                }
            }
        }
        let max = next.iter().cloned().fold(0.0, f64::max);
        if max > 0.0 {
            for v in &mut next {
                *v /= max;
            }
            scale += max.ln();
        }
        layer = next;
        out.push(read(&layer, scale));
    }
    Ok(out)
}

/// Outcome of [`weighted_reduction_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedCheck {
    pub horizon: usize,
    pub multiplicities: Vec<u32>,
    /// Weighted usage sums of the reduced model equal the counts of the
    /// multiset for every endpoint and length.
    pub usage_identity: bool,
    /// For three distinct steps the usage vector is fixed by the endpoint and
    /// length, so the weighted counts are a monomial times the reduced
    /// counts. `None` otherwise.
    pub monomial_identity: Option<bool>,
}

impl WeightedCheck {
    pub fn passed(&self) -> bool {
        self.usage_identity && self.monomial_identity != Some(false)
    }
}

/// Walk counts of the reduced model refined by step usage: `o(u)` is the
/// number of confined walks using step `k` exactly `u_k` times.
fn usage_counts(reduced: &Model, horizon: usize) -> HashMap<Vec<u32>, BigUint> {
    let steps: Vec<Step> = reduced.steps().iter().map(|(s, _)| *s).collect();
    let dim = reduced.dim();
    let position = |u: &[u32]| -> [i64; 3] {
        let mut p = [0i64; 3];
        for (k, s) in steps.iter().enumerate() {
            for (i, slot) in p.iter_mut().enumerate().take(dim) {
                *slot += i64::from(u[k]) * i64::from(s.coord(i));
            }
        }
        p
    };
    let mut all = HashMap::new();
    let mut layer: HashMap<Vec<u32>, BigUint> = HashMap::new();
    layer.insert(vec![0; steps.len()], BigUint::one());
    all.extend(layer.clone());
    for _ in 0..horizon {
        let mut next: HashMap<Vec<u32>, BigUint> = HashMap::new();
        for (u, v) in &layer {
            for k in 0..steps.len() {
                let mut w = u.clone();
                w[k] += 1;
                if position(&w).iter().all(|&c| c >= 0) {
                    *next.entry(w).or_default() += v;
                }
            }
        }
        all.extend(next.iter().map(|(k, v)| (k.clone(), v.clone())));
        layer = next;
    }
    all
}

/// Checks that the counts of `m` are the multiplicity-weighted usage counts
/// of its reduced model, for every endpoint and every length up to `horizon`.
pub fn weighted_reduction_check(m: &Model, horizon: usize) -> Result<WeightedCheck, CountError> {
    let (reduced, mult) = m.reduce_multiset();
    let grid = Grid::new(m.dim(), horizon + 1, DEFAULT_CELL_CAP)?;
    let steps: Vec<Step> = reduced.steps().iter().map(|(s, _)| *s).collect();
    let usage = usage_counts(&reduced, horizon);

    // (length, endpoint) → weighted usage sum, and reduced counts
    let mut weighted: HashMap<(usize, usize), BigUint> = HashMap::new();
    let mut plain: HashMap<(usize, usize), BigUint> = HashMap::new();
    let mut weights_at: HashMap<(usize, usize), Vec<Vec<u32>>> = HashMap::new();
    for (u, o) in &usage {
        let n = u.iter().sum::<u32>() as usize;
        let mut c = [0usize; 3];
        for (i, slot) in c.iter_mut().enumerate().take(m.dim()) {
            let v: i64 = steps.iter().zip(u).map(|(s, &k)| i64::from(k) * i64::from(s.coord(i))).sum();
            *slot = v as usize;
        }
        let key = (n, grid.index(&c));
        let w: BigUint = mult.iter().zip(u).map(|(&r, &k)| BigUint::from(r).pow(k)).product();
        *weighted.entry(key).or_default() += &w * o;
        *plain.entry(key).or_default() += o;
        weights_at.entry(key).or_default().push(u.clone());
    }

    // direct DP on the multiset, keeping every layer
    let mut usage_identity = true;
    let wsteps: Vec<(Step, BigUint)> = m.steps().iter().map(|(s, k)| (*s, BigUint::from(*k))).collect();
    let mut layer = vec![BigUint::zero(); grid.len()];
    layer[0] = BigUint::one();
    for n in 0..=horizon {
        for (idx, v) in layer.iter().enumerate() {
            let expect = weighted.get(&(n, idx)).cloned().unwrap_or_default();
            if *v != expect {
                usage_identity = false;
            }
        }
        if n == horizon {
            break;
        }
        let mut next = vec![BigUint::zero(); grid.len()];
        for (idx, v) in layer.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let c = grid.coords(idx);
            for (s, w) in &wsteps {
                if let Some(t) = grid.shift(&c, s) {
                    next[t] += v * w;
                }
            }
        }
        layer = next;
    }

    let monomial_identity = (steps.len() == 3).then(|| {
        weights_at.iter().all(|(key, us)| {
            let w: BigUint = mult.iter().zip(&us[0]).map(|(&r, &k)| BigUint::from(r).pow(k)).product();
            us.iter().all(|u| u == &us[0]) && weighted[key] == &w * &plain[key]
        })
    });
    Ok(WeightedCheck { horizon, multiplicities: mult, usage_identity, monomial_identity })
}

/// Growth estimates from `ln eₙ` along the progression `n ≡ r (mod period)`
/// that carries the nonzero terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub rho: f64,
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("need at least {needed} nonzero terms on the progression, found {found}")]
pub struct InsufficientData {
    pub needed: usize,
    pub found: usize,
}

/// `ρ̂` from Richardson-extrapolated term ratios; `α̂` from the
/// Richardson-extrapolated slope of `ln(eₙ/ρⁿ)` against `ln n`, using `rho`
/// when given and `ρ̂` otherwise.
pub fn empirical_growth(
    log_terms: &[f64],
    period: usize,
    rho: Option<f64>,
) -> Result<GrowthEstimate, InsufficientData> {
    assert!(period >= 1);
    let last = (0..log_terms.len()).rev().find(|&n| log_terms[n].is_finite());
    let Some(last) = last else { return Err(InsufficientData { needed: 50, found: 0 }) };
    let offset = last % period;
    let prog: Vec<(f64, f64)> = (offset..=last)
        .step_by(period)
        .filter(|&n| n > 0 && log_terms[n].is_finite())
        .map(|n| (n as f64, log_terms[n]))
        .collect();
    if prog.len() < 50 {
        return Err(InsufficientData { needed: 50, found: prog.len() });
    }
    let k = prog.len() - 1;
    let ratio = |i: usize| ((prog[i].1 - prog[i - 1].1) / (prog[i].0 - prog[i - 1].0)).exp();
    let rho_hat = 2.0 * ratio(k) - ratio(k / 2);
    let rho = rho.unwrap_or(rho_hat);
    let l = |i: usize| prog[i].1 - prog[i].0 * rho.ln();
    let slope = |i: usize| (l(i) - l(i / 2)) / (prog[i].0 / prog[i / 2].0).ln();
    let alpha = 2.0 * slope(k) - slope(k / 2);
    Ok(GrowthEstimate { rho: rho_hat, alpha })
}

/// `ln` of an exact term, `-∞` for zero.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures;

    fn nums(s: &Series) -> Vec<u64> {
        s.terms.iter().map(|t| t.to_u64().unwrap()).collect()
    }

    #[test]
    fn simple_walk_excursions() {
        let s = count_walks(&fixtures::simple_walk(), 6, &Endpoint::Origin).unwrap();
        assert_eq!(nums(&s), vec![1, 0, 2, 0, 10, 0, 70]);
    }

    #[test]
    fn kreweras_excursions() {
        let s = count_walks(&fixtures::kreweras(), 6, &Endpoint::Origin).unwrap();
        assert_eq!(nums(&s), vec![1, 0, 0, 2, 0, 0, 16]);
    }

    #[test]
    fn series_text_roundtrip() {
        let s = count_walks(&fixtures::tandem(), 10, &Endpoint::All).unwrap();
        assert_eq!(Series::from_text(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn memory_guard() {
        let r = count_walks_capped(&fixtures::simple_walk(), 100, &Endpoint::All, 1000);
        assert!(matches!(r, Err(CountError::TooLarge { .. })));
    }

    #[test]
    fn float_backend_matches_exact() {
        let m = fixtures::kreweras();
        let s = count_walks(&m, 40, &Endpoint::Origin).unwrap();
        let l = log_counts(&m, 40, &Endpoint::Origin).unwrap();
        for (t, v) in s.terms.iter().zip(&l) {
            let e = ln_biguint(t);
            assert!(e == *v || (e - v).abs() < 1e-9);
        }
    }

    #[test]
    fn geometric_growth() {
        let l: Vec<f64> = (0..200).map(|n| n as f64 * 2f64.ln()).collect();
        let g = empirical_growth(&l, 1, None).unwrap();
        assert!((g.rho - 2.0).abs() < 1e-9);
        assert!(g.alpha.abs() < 1e-6);
    }

    #[test]
    fn weighted_check_identity_model() {
        let c = weighted_reduction_check(&fixtures::kreweras(), 12).unwrap();
        assert!(c.passed());
        assert_eq!(c.monomial_identity, Some(true));
    }
}
