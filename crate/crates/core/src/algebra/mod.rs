//! Exact arithmetic kernel: rational polynomials, resultants, real algebraic
//! numbers, cyclotomic stripping and the Chebyshev rational-angle test.

mod chebyshev;
mod cyclotomic;
mod interval;
mod mpoly;
mod ratfn;
mod resultant;
mod roots;
mod upoly;

pub use chebyshev::{chebyshev_t, chebyshev_t_mod, is_cos_rational_multiple_of_pi, PiMultiple};
pub use cyclotomic::{cyclotomic_polynomial, euler_phi, strip_cyclotomic};
pub(crate) use interval::rational_str;
pub use interval::Interval;
pub use mpoly::{Exponent, MultiPoly, MAX_VARS};
pub use ratfn::RatFn;
pub use resultant::{resultant, univariate_resultant};
pub use roots::{count_roots, isolate_real_roots, isolate_real_roots_in, real_roots, AlgebraicNumber, SturmSequence};
pub use upoly::UniPoly;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("neither polynomial depends on the eliminated variable")]
    InvalidElimination,
    #[error("value does not lie in [-1, 1]")]
    OutOfRange,
    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,
    #[error("interval does not isolate a single root: {0}")]
    NotIsolating(String),
}

/// Shorthand for the rational `n/d`.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Nearest double, used only for hints and reporting. Handles operands whose
/// numerator and denominator each overflow `f64`.
pub fn to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift >= 0 {
        q.numer().abs() / (q.denom() << shift as u64)
    } else {
        (q.numer().abs() << (-shift) as u64) / q.denom()
    };
    let m = scaled.to_f64().unwrap_or(f64::MAX);
    let v = m * 2f64.powi(shift as i32);
    if q.is_negative() {
        -v
    } else {
        v
    }
}

/// Exact rational conversion of a finite double.
pub fn from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Parses `a`, `-a`, or `a/b` with integer `a`, `b`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn to_f64_handles_huge_operands() {
        let big = BigInt::from(3) * BigInt::from(10).pow(400);
        let q = BigRational::new(big.clone() + 1, big);
        assert!((to_f64(&q) - 1.0).abs() < 1e-15);
        let q = BigRational::new(BigInt::from(10).pow(400), BigInt::from(7));
        assert!(to_f64(&q).is_infinite() || to_f64(&q) > 1e300);
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("1/7"), Some(rat(1, 7)));
        assert_eq!(parse_rational("-3"), Some(rat(-3, 1)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
