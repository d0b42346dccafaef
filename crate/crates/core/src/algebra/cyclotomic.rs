//! Removal of root-of-unity factors.

use num_rational::BigRational;
use num_traits::One;

use super::{AlgebraError, UniPoly};

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn mobius(mut n: u64) -> i32 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// The `n`-th cyclotomic polynomial, `Π_{d|n} (X^d − 1)^{μ(n/d)}`.
pub fn cyclotomic_polynomial(n: u64) -> UniPoly {
    assert!(n >= 1);
    let mut num = UniPoly::one();
    let mut den = UniPoly::one();
    for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
        let f = &UniPoly::monomial(BigRational::one(), d as usize) - &UniPoly::one();
        match mobius(n / d) {
            1 => num = &num * &f,
            -1 => den = &den * &f,
            _ => {}
        }
    }
    num.div_exact(&den).expect("cyclotomic quotient")
}

/// Splits the squarefree part of `q` into its root-of-unity factor and the
/// remainder, both primitive. Every `n ≤ 2·deg²` with `φ(n) ≤ deg` is tried.
/// Dividing out `gcd(q, Xⁿ − 1)` for all such `n` is the same as dividing out
/// each `Φ_n` that divides `q`, which is what is done here since `Φ_n` is
/// irreducible and has small coefficients.
pub fn strip_cyclotomic(q: &UniPoly) -> Result<(UniPoly, UniPoly), AlgebraError> {
    if q.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let mut rem = q.squarefree_part().primitive();
    let mut cyc = UniPoly::one();
    let d = rem.deg() as u64;
    for n in 1..=2 * d * d {
        if rem.is_constant() {
            break;
        }
        if euler_phi(n) > rem.deg() as u64 {
            continue;
        }
        let phi = cyclotomic_polynomial(n);
        if let Some(r) = rem.div_exact(&phi) {
            cyc = &cyc * &phi;
            rem = r.primitive();
        }
    }
    Ok((cyc.primitive(), rem.primitive()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_values() {
        let expect = [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(euler_phi(i as u64 + 1), e);
        }
    }

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic_polynomial(3), UniPoly::from_ints(&[1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(12), UniPoly::from_ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn strip_third_cyclotomic() {
        let (c, r) = strip_cyclotomic(&UniPoly::from_ints(&[1, 1, 1])).unwrap();
        assert_eq!(c, UniPoly::from_ints(&[1, 1, 1]));
        assert_eq!(r, UniPoly::one());
    }

    #[test]
    fn strip_mixed() {
        // (X - 1)(X^2 - 3X + 1)
        let q = &UniPoly::from_ints(&[-1, 1]) * &UniPoly::from_ints(&[1, -3, 1]);
        let (c, r) = strip_cyclotomic(&q).unwrap();
        assert_eq!(c, UniPoly::from_ints(&[-1, 1]));
        assert_eq!(r, UniPoly::from_ints(&[1, -3, 1]));
    }

    #[test]
    fn zero_is_error() {
        assert!(strip_cyclotomic(&UniPoly::zero()).is_err());
    }
}
