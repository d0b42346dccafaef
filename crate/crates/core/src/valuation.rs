//! The valuation maps `Φ`, `Ψ` on `ℤ²` and infinite-orbit certificates.
//!
//! If `x`, `y` are Laurent series with valuations `a`, `b`, the valuations
//! of their images under `φ`, `ψ` depend on `(a, b)` only, through piecewise
//! linear maps. An unbounded orbit of the group they generate proves the
//! group of the walk infinite.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::MultiPoly;
use crate::model::Model;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ValuationError {
    #[error("no positive step along axis {0}")]
    MissingPositiveStep(usize),
    #[error("no negative step along axis {0}")]
    MissingNegativeStep(usize),
    #[error("valuation maps need a 2-dimensional model")]
    NotPlanar,
}

/// Valuations `v` and degrees `d` of `A₋, A₊` (in `y`) and `B₋, B₊` (in `x`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ValuationMaps {
    pub v_minus_y: i64,
    pub v_plus_y: i64,
    pub d_minus_y: i64,
    pub d_plus_y: i64,
    pub v_minus_x: i64,
    pub v_plus_x: i64,
    pub d_minus_x: i64,
    pub d_plus_x: i64,
}

fn extremes(p: &MultiPoly, var: usize) -> (i64, i64) {
    (p.min_degree_in(var) as i64, p.degree_in(var) as i64)
}

pub fn valuation_maps(m: &Model) -> Result<ValuationMaps, ValuationError> {
    if m.dim() != 2 {
        return Err(ValuationError::NotPlanar);
    }
    for axis in 0..2 {
        if !m.has_positive(axis) {
            return Err(ValuationError::MissingPositiveStep(axis));
        }
        if !m.has_negative(axis) {
            return Err(ValuationError::MissingNegativeStep(axis));
        }
    }
    let a = m.axis_decomposition(0);
    let b = m.axis_decomposition(1);
    let (v_minus_y, d_minus_y) = extremes(&a.minus, 1);
    let (v_plus_y, d_plus_y) = extremes(&a.plus, 1);
    let (v_minus_x, d_minus_x) = extremes(&b.minus, 0);
    let (v_plus_x, d_plus_x) = extremes(&b.plus, 0);
    Ok(ValuationMaps { v_minus_y, v_plus_y, d_minus_y, d_plus_y, v_minus_x, v_plus_x, d_minus_x, d_plus_x })
}

/// Whether every coefficient of `A±`, `B±` is positive, so in particular the
/// trailing ones. Always true for step polynomials; recorded for audit.
pub fn extreme_coefficients_positive(m: &Model) -> bool {
    use num_traits::Signed;
    (0..m.dim().min(2)).all(|axis| {
        let d = m.axis_decomposition(axis);
        [d.minus, d.plus].iter().all(|p| p.terms().all(|(_, c)| c.is_positive()))
    })
}

impl ValuationMaps {
    pub fn phi(&self, (a, b): (i64, i64)) -> Option<(i64, i64)> {
        let k = if b >= 0 { self.v_minus_y - self.v_plus_y } else { self.d_minus_y - self.d_plus_y };
        Some((b.checked_mul(k)?.checked_sub(a)?, b))
    }

    pub fn psi(&self, (a, b): (i64, i64)) -> Option<(i64, i64)> {
        let k = if a >= 0 { self.v_minus_x - self.v_plus_x } else { self.d_minus_x - self.d_plus_x };
        Some((a, a.checked_mul(k)?.checked_sub(b)?))
    }

    /// Step `k` of the alternating word: `Φ` on even steps, `Ψ` on odd ones.
    pub fn step(&self, k: usize, s: (i64, i64)) -> Option<(i64, i64)> {
        if k.is_multiple_of(2) {
            self.phi(s)
        } else {
            self.psi(s)
        }
    }

    /// The coordinate whose sign selects the branch at step `k`.
    fn branch_coordinate(k: usize, s: (i64, i64)) -> i64 {
        if k.is_multiple_of(2) {
            s.1
        } else {
            s.0
        }
    }
}

/// Panics on overflow; use [`ValuationMaps::phi`] for a checked version.
pub fn apply_phi(vm: &ValuationMaps, a: i64, b: i64) -> (i64, i64) {
    vm.phi((a, b)).expect("valuation overflow")
}

pub fn apply_psi(vm: &ValuationMaps, a: i64, b: i64) -> (i64, i64) {
    vm.psi((a, b)).expect("valuation overflow")
}

/// `s_{k+p} = s_k + δ` along the alternating word, from step `offset` on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPattern {
    pub start: (i64, i64),
    pub offset: usize,
    pub period: usize,
    pub increment: (i64, i64),
    /// Sign of the branch coordinate at each step of the first period.
    pub branch_signs: Vec<i8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValuationVerdict {
    InfiniteOrbit,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationOrbitCertificate {
    pub verdict: ValuationVerdict,
    pub maps: ValuationMaps,
    /// States `s₀, Φ(s₀), ΨΦ(s₀), …` for the certifying start, or the last
    /// start tried.
    pub trace: Vec<(i64, i64)>,
    pub pattern: Option<OrbitPattern>,
    pub positive_extreme_coefficients: bool,
}

pub const DEFAULT_STARTS: [(i64, i64); 4] = [(1, 2), (2, 1), (1, 1), (1, 3)];
pub const DEFAULT_MAX_STEPS: usize = 200;

fn sub(u: (i64, i64), v: (i64, i64)) -> Option<(i64, i64)> {
    Some((u.0.checked_sub(v.0)?, u.1.checked_sub(v.1)?))
}

fn sign(x: i64) -> i8 {
    x.signum() as i8
}

/// Checks the pattern `(k0, p)` on a trajectory holding at least `k0 + 2p + 1`
/// states. Differences between the two passes must propagate unchanged and
/// never push a branch coordinate across zero, so by induction every later
/// pass adds the same increment.
fn pattern_at(traj: &[(i64, i64)], k0: usize, p: usize) -> Option<(i64, i64)> {
    let delta = sub(traj[k0 + p], traj[k0])?;
    if delta == (0, 0) {
        return None;
    }
    for j in 0..=p {
        let dj = sub(traj[k0 + p + j], traj[k0 + j])?;
        if j == p && dj != delta {
            return None;
        }
        if j < p {
            let k = k0 + j;
            let c = ValuationMaps::branch_coordinate(k, traj[k]);
            let dc = ValuationMaps::branch_coordinate(k, dj);
            if sign(c) * sign(dc) < 0 {
                return None;
            }
            // the second pass must select the same branch
            let c2 = ValuationMaps::branch_coordinate(k, traj[k + p]);
            if sign(c) * sign(c2) < 0 {
                return None;
            }
        }
    }
    Some(delta)
}

enum Run {
    Pattern(OrbitPattern),
    Cycle,
    Exhausted,
}

fn run_start(vm: &ValuationMaps, start: (i64, i64), max_steps: usize, traj: &mut Vec<(i64, i64)>) -> Run {
    traj.clear();
    traj.push(start);
    for k in 0..max_steps {
        let Some(next) = vm.step(k, traj[k]) else { return Run::Exhausted };
        let n = k + 1;
        // a repeated state at the same word parity closes a cycle
        if traj.iter().enumerate().any(|(i, s)| *s == next && i % 2 == n % 2) {
            traj.push(next);
            return Run::Cycle;
        }
        traj.push(next);
        // smallest certificate ending at state n: n = k0 + 2p
        for p in (2..=n / 2).step_by(2) {
            let k0 = n - 2 * p;
            if let Some(increment) = pattern_at(traj, k0, p) {
                let branch_signs = (k0..k0 + p).map(|k| sign(ValuationMaps::branch_coordinate(k, traj[k]))).collect();
                return Run::Pattern(OrbitPattern { start, offset: k0, period: p, increment, branch_signs });
            }
        }
    }
    Run::Exhausted
}

pub fn certify_infinite_valuation(
    m: &Model,
    starts: &[(i64, i64)],
    max_steps: usize,
) -> Result<ValuationOrbitCertificate, ValuationError> {
    assert!(max_steps >= 4, "max_steps must be at least 4");
    let maps = valuation_maps(m)?;
    let positive_extreme_coefficients = extreme_coefficients_positive(m);
    let mut traj = Vec::new();
    for &start in starts {
        if let Run::Pattern(pattern) = run_start(&maps, start, max_steps, &mut traj) {
            return Ok(ValuationOrbitCertificate {
                verdict: ValuationVerdict::InfiniteOrbit,
                maps,
                trace: traj,
                pattern: Some(pattern),
                positive_extreme_coefficients,
            });
        }
    }
    Ok(ValuationOrbitCertificate {
        verdict: ValuationVerdict::Inconclusive,
        maps,
        trace: traj,
        pattern: None,
        positive_extreme_coefficients,
    })
}

/// The state after `offset + n·period` steps, computed by iterating the maps.
pub fn replay(vm: &ValuationMaps, pattern: &OrbitPattern, n: usize) -> Option<(i64, i64)> {
    let mut s = pattern.start;
    for k in 0..pattern.offset + n * pattern.period {
        s = vm.step(k, s)?;
    }
    Some(s)
}

/// Replays `passes` periods and checks both the affine law and the recorded
/// branch signs.
pub fn audit_pattern(vm: &ValuationMaps, pattern: &OrbitPattern, passes: usize) -> bool {
    let mut s = pattern.start;
    let mut k = 0;
    while k < pattern.offset {
        match vm.step(k, s) {
            Some(t) => s = t,
            None => return false,
        }
        k += 1;
    }
    let base = s;
    for n in 0..passes {
        let expect = (base.0 + n as i64 * pattern.increment.0, base.1 + n as i64 * pattern.increment.1);
        if s != expect {
            return false;
        }
        for j in 0..pattern.period {
            let c = sign(ValuationMaps::branch_coordinate(k, s));
            let recorded = pattern.branch_signs[j];
            if c * recorded < 0 || (recorded == 0 && n == 0 && c != 0) {
                return false;
            }
            match vm.step(k, s) {
                Some(t) => s = t,
                None => return false,
            }
            k += 1;
        }
    }
    true
}
