//! Resultants via the subresultant pseudo-remainder sequence.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::mpoly::{prem, trim};
use super::{AlgebraError, MultiPoly, UniPoly, MAX_VARS};

/// Multiplies by the smallest monomial that leaves no negative exponent.
fn clear_negative(p: &MultiPoly) -> MultiPoly {
    let m = p.min_exponents();
    let shift: [i32; MAX_VARS] = std::array::from_fn(|i| (-m[i]).max(0));
    p.mul_monomial(&shift)
}

/// Sylvester resultant of `p` and `q` with respect to variable `var`.
/// Laurent inputs are first multiplied by monomials clearing their negative
/// exponents.
pub fn resultant(p: &MultiPoly, q: &MultiPoly, var: usize) -> Result<MultiPoly, AlgebraError> {
    let nv = p.nvars().max(q.nvars());
    let p = clear_negative(p).with_nvars(nv);
    let q = clear_negative(q).with_nvars(nv);
    if !p.depends_on(var) && !q.depends_on(var) {
        return Err(AlgebraError::InvalidElimination);
    }
    if p.is_zero() || q.is_zero() {
        return Ok(MultiPoly::zero(nv));
    }
    let a = p.coefficients_in(var);
    let b = q.coefficients_in(var);
    Ok(subresultant(a, b, nv))
}

fn deg(v: &[MultiPoly]) -> usize {
    v.len() - 1
}

fn subresultant(mut a: Vec<MultiPoly>, mut b: Vec<MultiPoly>, nv: usize) -> MultiPoly {
    let mut sign = false;
    if deg(&a) < deg(&b) {
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            sign = true;
        }
        std::mem::swap(&mut a, &mut b);
    }
    if deg(&b) == 0 {
        return b[0].pow(deg(&a) as u32);
    }
    let mut g = MultiPoly::one(nv);
    let mut h = MultiPoly::one(nv);
    loop {
        let delta = deg(&a) - deg(&b);
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            sign = !sign;
        }
        let mut r = prem(&a, &b);
        trim(&mut r);
        if r.is_empty() {
            return MultiPoly::zero(nv);
        }
        let divisor = &g * &h.pow(delta as u32);
        a = b;
        b = r.iter().map(|c| c.div_exact(&divisor).expect("subresultant division")).collect();
        g = a.last().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            g.pow(delta as u32).div_exact(&h.pow(delta as u32 - 1)).expect("subresultant division")
        };
        if deg(&b) == 0 {
            break;
        }
    }
    let da = deg(&a) as u32;
    let res = b[0].pow(da).div_exact(&h.pow(da - 1)).expect("subresultant division");
    if sign {
        -&res
    } else {
        res
    }
}

/// Resultant of two univariate polynomials over the rationals, computed by
/// the Euclidean recurrence `res(A, B) = (-1)^(mn) lc(B)^(m - deg R) res(B, R)`.
pub fn univariate_resultant(a: &UniPoly, b: &UniPoly) -> BigRational {
    if a.is_zero() || b.is_zero() {
        return BigRational::zero();
    }
    let mut a = a.clone();
    let mut b = b.clone();
    let mut acc = BigRational::one();
    loop {
        let m = a.deg();
        let n = b.deg();
        if n == 0 {
            return acc * num_traits::pow(b.lc(), m);
        }
        if m == 0 {
            return acc * num_traits::pow(a.lc(), n);
        }
        let r = a.rem(&b);
        if r.is_zero() {
            return BigRational::zero();
        }
        if m % 2 == 1 && n % 2 == 1 {
            acc = -acc;
        }
        acc *= num_traits::pow(b.lc(), m - r.deg());
        a = b;
        b = r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};

    fn x() -> MultiPoly {
        MultiPoly::var(2, 0)
    }
    fn y() -> MultiPoly {
        MultiPoly::var(2, 1)
    }
    fn c(n: i64) -> MultiPoly {
        MultiPoly::constant(2, int(n))
    }

    #[test]
    fn linear_pair() {
        let r = resultant(&(&y() - &x()), &(&y() + &x()), 1).unwrap();
        assert_eq!(r, &c(2) * &x());
    }

    #[test]
    fn common_factor_gives_zero() {
        let p = &(&y() * &y()) - &x();
        assert!(resultant(&p, &p, 1).unwrap().is_zero());
    }

    #[test]
    fn invalid_elimination() {
        assert_eq!(resultant(&x(), &(&x() + &c(1)), 1), Err(AlgebraError::InvalidElimination));
    }

    #[test]
    fn one_side_constant_in_var() {
        // res_y(x, y^2 + 1) = x^2
        let r = resultant(&x(), &(&(&y() * &y()) + &c(1)), 1).unwrap();
        assert_eq!(r, &x() * &x());
    }

    #[test]
    fn univariate_matches_roots() {
        // res(X^2 - 2, X - 3) = (3)^2 - 2 up to sign convention
        let a = UniPoly::from_ints(&[-2, 0, 1]);
        let b = UniPoly::from_ints(&[-3, 1]);
        assert_eq!(univariate_resultant(&a, &b), rat(7, 1));
        assert_eq!(univariate_resultant(&b, &a), rat(7, 1));
    }

    #[test]
    fn laurent_inputs_are_cleared() {
        // (y + 1/y) - x  ->  y^2 - x y + 1
        let p = &(&y() + &MultiPoly::monomial(2, [0, -1, 0], int(1))) - &x();
        let r1 = resultant(&p, &(&y() - &c(2)), 1).unwrap();
        let p2 = &(&(&y() * &y()) - &(&x() * &y())) + &c(1);
        let r2 = resultant(&p2, &(&y() - &c(2)), 1).unwrap();
        assert_eq!(r1, r2);
    }
}
