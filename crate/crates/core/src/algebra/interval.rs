//! Closed intervals with rational endpoints.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{from_f64, to_f64};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "rational_str")]
    pub lo: BigRational,
    #[serde(with = "rational_str")]
    pub hi: BigRational,
}

pub(crate) mod rational_str {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        crate::algebra::parse_rational(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s}")))
    }
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(q: BigRational) -> Self {
        Interval { lo: q.clone(), hi: q }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn powi(&self, e: u32) -> Interval {
        if e == 0 {
            return Interval::point(BigRational::one());
        }
        let lo = num_traits::pow(self.lo.clone(), e as usize);
        let hi = num_traits::pow(self.hi.clone(), e as usize);
        if e % 2 == 1 {
            Interval { lo, hi }
        } else if self.contains_zero() {
            Interval { lo: BigRational::zero(), hi: lo.max(hi) }
        } else if lo <= hi {
            Interval { lo, hi }
        } else {
            Interval { lo: hi, hi: lo }
        }
    }

    /// Reciprocal; `None` when the interval contains zero.
    pub fn recip(&self) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        Some(Interval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn div(&self, other: &Interval) -> Option<Interval> {
        Some(self * &other.recip()?)
    }

    /// Rational enclosure of the square root of a nonnegative interval.
    pub fn sqrt(&self) -> Option<Interval> {
        if self.lo.is_negative() {
            return None;
        }
        let lo = sqrt_below(&self.lo);
        let hi = sqrt_above(&self.hi);
        Some(Interval { lo, hi })
    }

    /// Widens the endpoints outward to multiples of `2^-bits`.
    pub fn round_outward(&self, bits: u32) -> Interval {
        let scale = BigRational::from_integer(BigInt::one() << bits);
        let lo = (&self.lo * &scale).floor() / &scale;
        let hi = (&self.hi * &scale).ceil() / &scale;
        Interval { lo, hi }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (to_f64(&self.lo), to_f64(&self.hi))
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.clone().min(other.lo.clone()), hi: self.hi.clone().max(other.hi.clone()) }
    }
}

fn sqrt_below(q: &BigRational) -> BigRational {
    if !q.is_positive() {
        return BigRational::zero();
    }
    let mut s = from_f64(to_f64(q).sqrt() * (1.0 - 1e-12));
    while &(&s * &s) > q {
        s = &s / BigRational::from_integer(2.into());
    }
    s
}

fn sqrt_above(q: &BigRational) -> BigRational {
    if !q.is_positive() {
        return BigRational::zero();
    }
    let mut s = from_f64(to_f64(q).sqrt() * (1.0 + 1e-12) + f64::MIN_POSITIVE);
    while &(&s * &s) < q {
        s = &s * BigRational::from_integer(2.into()) + BigRational::one();
    }
    s
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.to_f64_pair();
        write!(f, "[{a:.12}, {b:.12}]")
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        Interval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        Interval { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        let c = [&self.lo * &rhs.lo, &self.lo * &rhs.hi, &self.hi * &rhs.lo, &self.hi * &rhs.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn even_power_straddling_zero() {
        let i = Interval::new(rat(-2, 1), rat(1, 1));
        assert_eq!(i.powi(2), Interval::new(rat(0, 1), rat(4, 1)));
        assert_eq!(i.powi(3), Interval::new(rat(-8, 1), rat(1, 1)));
    }

    #[test]
    fn sqrt_encloses() {
        let i = Interval::new(rat(2, 1), rat(3, 1)).sqrt().unwrap();
        assert!(&i.lo * &i.lo <= rat(2, 1));
        assert!(&i.hi * &i.hi >= rat(3, 1));
        assert!(i.width() < rat(1, 2));
    }

    #[test]
    fn recip_rejects_zero() {
        assert!(Interval::new(rat(-1, 1), rat(1, 1)).recip().is_none());
        assert_eq!(Interval::new(rat(2, 1), rat(4, 1)).recip().unwrap(), Interval::new(rat(1, 4), rat(1, 2)));
    }
}
