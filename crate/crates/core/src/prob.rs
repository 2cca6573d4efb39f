//! Probabilities carried both as exact rationals and as `f64`.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A probability in `[0, 1]`.
///
/// The exact value is kept so that oracles can sum world weights without
/// rounding; the `f64` value is what the inference backends use.
#[derive(Clone)]
pub struct Prob {
    exact: BigRational,
    value: f64,
}

impl Prob {
    pub fn new(exact: BigRational) -> Result<Self> {
        if exact.is_negative() || exact > BigRational::one() {
            return Err(Error::ProbabilityRange(exact.to_string()));
        }
        let value = exact.to_f64().unwrap_or(f64::NAN);
        Ok(Prob { exact, value })
    }

    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::ProbabilityRange(format!("{num}/{den}")));
        }
        Prob::new(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Prob {
            exact: BigRational::zero(),
            value: 0.0,
        }
    }

    pub fn one() -> Self {
        Prob {
            exact: BigRational::one(),
            value: 1.0,
        }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Prob::one()
        } else {
            Prob::zero()
        }
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exact.is_one()
    }

    /// `1 - p`.
    pub fn complement(&self) -> Prob {
        let exact = BigRational::one() - &self.exact;
        let value = exact.to_f64().unwrap_or(f64::NAN);
        Prob { exact, value }
    }
}

impl PartialEq for Prob {
    fn eq(&self, other: &Self) -> bool {
        self.exact == other.exact
    }
}

impl Eq for Prob {}

impl fmt::Debug for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prob({self})")
    }
}

/// Decimal when the denominator is of the form 2^a 5^b, `num/den` otherwise.
/// Integers print with a trailing `.0` (`1.0`, `0.0`).
impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.exact.numer();
        let den = self.exact.denom();
        let mut d = den.clone();
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        let (mut twos, mut fives) = (0u32, 0u32);
        while (&d % &two).is_zero() {
            d /= &two;
            twos += 1;
        }
        while (&d % &five).is_zero() {
            d /= &five;
            fives += 1;
        }
        if !d.is_one() {
            return write!(f, "{num}/{den}");
        }
        let digits = twos.max(fives);
        let scaled = num * BigInt::from(10).pow(digits) / den;
        if digits == 0 {
            return write!(f, "{scaled}.0");
        }
        let s = format!("{:0>width$}", scaled.to_string(), width = digits as usize + 1);
        let (int, frac) = s.split_at(s.len() - digits as usize);
        write!(f, "{int}.{frac}")
    }
}

impl FromStr for Prob {
    type Err = Error;

    /// Accepts `d+`, `d+.d+` and `d+/d+`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ProbabilityRange(s.to_string());
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if let Some((n, d)) = s.split_once('/') {
            if !digits(n) || !digits(d) {
                return Err(bad());
            }
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Prob::new(BigRational::new(n, d));
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if !digits(int) || (s.contains('.') && !digits(frac)) {
            return Err(bad());
        }
        let num: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let den = BigInt::from(10).pow(frac.len() as u32);
        Prob::new(BigRational::new(num, den))
    }
}

/// Numeric type used when summing world or circuit weights.
pub trait Weight:
    Clone
    + fmt::Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_prob(p: &Prob) -> Self;
    fn as_f64(&self) -> f64;
}

impl Weight for f64 {
    fn from_prob(p: &Prob) -> Self {
        p.value
    }

    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Weight for BigRational {
    fn from_prob(p: &Prob) -> Self {
        p.exact.clone()
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!("0.3".parse::<Prob>().unwrap(), Prob::ratio(3, 10).unwrap());
        assert_eq!("1/3".parse::<Prob>().unwrap(), Prob::ratio(1, 3).unwrap());
        assert_eq!("1".parse::<Prob>().unwrap(), Prob::one());
        assert!("1.5".parse::<Prob>().is_err());
        assert!("0.".parse::<Prob>().is_err());
        assert!("-0.1".parse::<Prob>().is_err());
        assert!("1/0".parse::<Prob>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["0.3", "0.0", "1.0", "0.125", "1/3", "2/7", "0.05"] {
            let p: Prob = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
            assert_eq!(p.to_string().parse::<Prob>().unwrap(), p);
        }
        assert_eq!(Prob::ratio(1, 2).unwrap().to_string(), "0.5");
        assert_eq!(Prob::ratio(2, 4).unwrap().to_string(), "0.5");
    }

    #[test]
    fn complement_is_exact() {
        let p = Prob::ratio(3, 10).unwrap();
        assert_eq!(p.complement(), Prob::ratio(7, 10).unwrap());
    }
}
