//! Guessing linear recurrences with polynomial coefficients from a finite
//! prefix of a sequence.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Terms kept out of the fitting window and used only for verification.
pub const HELD_OUT: usize = 20;

const PRIME: u64 = (1 << 61) - 1;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GuessError {
    #[error("need at least {0} terms")]
    NeedMoreTerms(usize),
}

/// `Σ_j p_j(n)·a_{n+j} = 0`, with `coefficients[j][k]` the coefficient of
/// `n^k` in `p_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recurrence {
    pub order: usize,
    pub degree: usize,
    #[serde(with = "bigint_matrix")]
    pub coefficients: Vec<Vec<BigInt>>,
}

mod bigint_matrix {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        m.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let m = Vec::<Vec<String>>::deserialize(d)?;
        m.iter().map(|r| r.iter().map(|x| x.parse().map_err(serde::de::Error::custom)).collect()).collect()
    }
}

impl Recurrence {
    fn eval_coefficient(&self, j: usize, n: usize) -> BigInt {
        let n = BigInt::from(n);
        self.coefficients[j].iter().rev().fold(BigInt::zero(), |acc, c| acc * &n + c)
    }

    pub fn holds_at(&self, terms: &[BigUint], n: usize) -> bool {
        let sum: BigInt =
            (0..=self.order).map(|j| self.eval_coefficient(j, n) * BigInt::from(terms[n + j].clone())).sum();
        sum.is_zero()
    }

    /// Checks the relation at every index where all of its terms are known.
    pub fn verify(&self, terms: &[BigUint]) -> bool {
        terms.len() > self.order && (0..terms.len() - self.order).all(|n| self.holds_at(terms, n))
    }

    pub fn height(&self) -> BigInt {
        self.coefficients.iter().flatten().map(|c| c.abs()).max().unwrap_or_default()
    }
}

impl fmt::Display for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (j, p) in self.coefficients.iter().enumerate() {
            let mut poly = String::new();
            for (k, c) in p.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let sign = if c.is_negative() { "-" } else { "+" };
                if poly.is_empty() {
                    poly.push_str(if c.is_negative() { "-" } else { "" });
                } else {
                    poly.push_str(&format!(" {sign} "));
                }
                let a = c.abs();
                poly.push_str(&match k {
                    0 => a.to_string(),
                    1 => format!("{a}*n"),
                    _ => format!("{a}*n^{k}"),
                });
            }
            if !poly.is_empty() {
                parts.push(format!("({poly})*a(n+{j})"));
            }
        }
        write!(f, "{} = 0", parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Guess {
    Found(Recurrence),
    /// No relation within the bounds. Evidence only, not a proof.
    NoneFound {
        max_order: usize,
        max_degree: usize,
        terms: usize,
    },
}

pub fn required_terms(max_order: usize, max_degree: usize) -> usize {
    (max_order + 1) * (max_degree + 1) + max_order + HELD_OUT
}

/// Searches orders `1..=max_order` and degrees `0..=max_degree` in that
/// order and returns the first relation that survives the held-out terms.
pub fn guess_recurrence(terms: &[BigUint], max_order: usize, max_degree: usize) -> Result<Guess, GuessError> {
    let need = required_terms(max_order, max_degree);
    if terms.len() < need {
        return Err(GuessError::NeedMoreTerms(need));
    }
    let fit = &terms[..terms.len() - HELD_OUT];
    for order in 1..=max_order {
        for degree in 0..=max_degree {
            if let Some(rec) = fit_recurrence(fit, order, degree) {
                if rec.verify(terms) {
                    return Ok(Guess::Found(rec));
                }
            }
        }
    }
    Ok(Guess::NoneFound { max_order, max_degree, terms: terms.len() })
}

/// Row `n` holds `n^k·a_{n+j}` in column `j·(degree+1) + k`.
fn system(fit: &[BigUint], order: usize, degree: usize) -> Vec<Vec<BigInt>> {
    (0..fit.len() - order)
        .map(|n| {
            let mut row = Vec::with_capacity((order + 1) * (degree + 1));
            for j in 0..=order {
                let mut v = BigInt::from(fit[n + j].clone());
                for _ in 0..=degree {
                    row.push(v.clone());
                    v *= n;
                }
            }
            row
        })
        .collect()
}

fn fit_recurrence(fit: &[BigUint], order: usize, degree: usize) -> Option<Recurrence> {
    let cols = (order + 1) * (degree + 1);
    if fit.len() < order + cols {
        return None;
    }
    let rows = system(fit, order, degree);
    if rank_mod_p(&rows, cols) == cols {
        return None;
    }
    nullspace(rows, cols)
        .into_iter()
        .map(|v| Recurrence { order, degree, coefficients: v.chunks(degree + 1).map(<[BigInt]>::to_vec).collect() })
        .filter(|r| r.coefficients[order].iter().any(|c| !c.is_zero()))
        .min_by(|a, b| a.height().cmp(&b.height()))
}

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
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

/// Rank over `ℤ/p`; never exceeds the rank over `ℚ`, so full rank here
/// rules out a nonzero kernel.
fn rank_mod_p(rows: &[Vec<BigInt>], cols: usize) -> usize {
    let p = BigInt::from(PRIME);
    let mut m: Vec<Vec<u64>> =
        rows.iter().map(|r| r.iter().map(|x| x.mod_floor(&p).to_u64().expect("reduced")).collect()).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, pr);
        let inv = pow_mod(m[rank][c], PRIME - 2);
        for i in rank + 1..m.len() {
            if m[i][c] == 0 {
                continue;
            }
            let f = mul_mod(m[i][c], inv);
            let (top, rest) = m.split_at_mut(i);
            for (x, &p) in rest[0][c..cols].iter_mut().zip(&top[rank][c..cols]) {
                *x = (*x + PRIME - mul_mod(f, p)) % PRIME;
            }
        }
        rank += 1;
    }
    rank
}

/// Kernel basis of an integer matrix, one primitive integer vector per free
/// column. Forward elimination is fraction-free (Bareiss); the
/// back-substitution is rational.
fn nullspace(mut m: Vec<Vec<BigInt>>, cols: usize) -> Vec<Vec<BigInt>> {
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, pr);
        for i in r + 1..m.len() {
            for k in c + 1..cols {
                let v = &m[r][c] * &m[i][k] - &m[i][c] * &m[r][k];
                m[i][k] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![BigRational::zero(); cols];
            x[f] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate().rev() {
                let s: BigRational = (pc + 1..cols)
                    .filter(|&k| !x[k].is_zero())
                    .map(|k| BigRational::from_integer(m[i][k].clone()) * &x[k])
                    .sum();
                x[pc] = -s / BigRational::from_integer(m[i][pc].clone());
            }
            primitive(&x)
        })
        .collect()
}

fn primitive(x: &[BigRational]) -> Vec<BigInt> {
    let l = x.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let v: Vec<BigInt> = x.iter().map(|q| q.numer() * (&l / q.denom())).collect();
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let sign = v.iter().rev().find(|c| !c.is_zero()).map_or(1, |c| if c.is_negative() { -1 } else { 1 });
    v.into_iter().map(|c| c / &g * sign).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn powers_of_two(n: usize) -> Vec<BigUint> {
        (0..n).map(|k| BigUint::one() << k).collect()
    }

    #[test]
    fn geometric() {
        let Guess::Found(r) = guess_recurrence(&powers_of_two(40), 2, 2).unwrap() else { panic!() };
        assert_eq!((r.order, r.degree), (1, 0));
        assert_eq!(r.coefficients, vec![vec![BigInt::from(-2)], vec![BigInt::one()]]);
    }

    #[test]
    fn too_short() {
        assert_eq!(guess_recurrence(&powers_of_two(10), 2, 2), Err(GuessError::NeedMoreTerms(31)));
    }

    #[test]
    fn catalan() {
        let mut c = vec![BigUint::one()];
        for n in 0..60u32 {
            let next = &c[n as usize] * BigUint::from(2 * (2 * n + 1)) / BigUint::from(n + 2);
            c.push(next);
        }
        let Guess::Found(r) = guess_recurrence(&c, 2, 2).unwrap() else { panic!() };
        assert_eq!((r.order, r.degree), (1, 1));
        assert!(r.verify(&c));
    }

    #[test]
    fn kernel_of_rank_deficient_matrix() {
        let m: Vec<Vec<BigInt>> =
            [[1, 2, 3], [2, 4, 6], [1, 0, 1]].iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        assert_eq!(rank_mod_p(&m, 3), 2);
        let k = nullspace(m, 3);
        assert_eq!(k, vec![vec![BigInt::from(-1), BigInt::from(-1), BigInt::one()]]);
    }
}
