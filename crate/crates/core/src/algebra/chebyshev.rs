//! Chebyshev polynomials and the rational-angle test for algebraic cosines.

use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::cyclotomic::euler_phi;
use super::{int, AlgebraError, AlgebraicNumber, Interval, UniPoly};

/// Outcome of the test `arccos(v)/π ∈ ℚ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PiMultiple {
    /// `arccos(v) = pπ/q` with `gcd(p, q) = 1`.
    Rational {
        p: u64,
        q: u64,
    },
    Irrational,
}

impl fmt::Display for PiMultiple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PiMultiple::Rational { p, q } => write!(f, "{p}/{q}"),
            PiMultiple::Irrational => f.write_str("irrational"),
        }
    }
}

/// `T_q`, the Chebyshev polynomial of the first kind.
pub fn chebyshev_t(q: u32) -> UniPoly {
    let two_t = UniPoly::from_ints(&[0, 2]);
    let mut prev = UniPoly::one();
    let mut cur = UniPoly::x();
    if q == 0 {
        return prev;
    }
    for _ in 1..q {
        let next = &(&two_t * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `T_q mod m`, reducing after every step of the three-term recurrence.
pub fn chebyshev_t_mod(q: u32, m: &UniPoly) -> UniPoly {
    assert!(!m.is_constant(), "modulus must be nonconstant");
    let two_t = UniPoly::from_ints(&[0, 2]);
    let mut prev = UniPoly::one().rem(m);
    let mut cur = UniPoly::x().rem(m);
    if q == 0 {
        return prev;
    }
    for _ in 1..q {
        let next = (&(&two_t * &cur) - &prev).rem(m);
        prev = cur;
        cur = next;
    }
    cur
}

/// Decides whether `arccos(v)` is a rational multiple of π.
///
/// If `v = cos(pπ/q)` then `T_q(v) = ±1` and `φ(2q) ≤ 2·deg`, so every
/// admissible `q ≤ 4·deg²` is tried in increasing order. The first hit is the
/// reduced denominator; the numerator is read off the refined interval.
pub fn is_cos_rational_multiple_of_pi(v: &AlgebraicNumber) -> Result<PiMultiple, AlgebraError> {
    if !v.within(&Interval::new(int(-1), int(1))) {
        return Err(AlgebraError::OutOfRange);
    }
    let a = v.annihilator();
    let n = a.deg() as u64;
    let one = UniPoly::one();
    for q in 1..=4 * n * n {
        if euler_phi(2 * q) > 2 * n {
            continue;
        }
        let t = chebyshev_t_mod(q as u32, a);
        for (even, target) in [(true, &t - &one), (false, &t + &one)] {
            let g = UniPoly::gcd(a, &target);
            if g.is_constant() || !v.is_root_of(&g) {
                continue;
            }
            let k = numerator_for(v, q, even);
            let d = k.gcd(&q);
            return Ok(PiMultiple::Rational { p: k / d, q: q / d });
        }
    }
    Ok(PiMultiple::Irrational)
}

/// The `k` in `0..=q` of the given parity with `cos(kπ/q)` in `v`'s interval.
/// Consecutive candidates are separated by far more than the refined width,
/// so the nearest one is unambiguous.
fn numerator_for(v: &AlgebraicNumber, q: u64, even: bool) -> u64 {
    let v = v.refine(&BigRational::new(One::one(), (1u64 << 40).into()));
    let theta = v.to_f64().clamp(-1.0, 1.0).acos() / std::f64::consts::PI * q as f64;
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for k in 0..=q {
        if (k % 2 == 0) != even {
            continue;
        }
        let dist = (k as f64 - theta).abs();
        if dist < best_dist {
            best = k;
            best_dist = dist;
        }
    }
    best
}
