//! Signed binary fixed-point numbers with 512 fractional bits.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

/// Fractional bits.
pub const FRAC_BITS: u32 = 512;

const LN_2: &str = "0.693147180559945309417232121458176568075500134360255254120680009493393621969694715605863326996418687542001481020570685734";

/// `raw * 2^-FRAC_BITS`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigFixed {
    raw: BigInt,
}

impl BigFixed {
    pub fn zero() -> Self {
        Self { raw: BigInt::zero() }
    }

    pub fn one() -> Self {
        Self {
            raw: BigInt::one() << FRAC_BITS,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self {
            raw: BigInt::from(n) << FRAC_BITS,
        }
    }

    /// Exact conversion (values below `2^-512` lose low bits).
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite input {x}");
        let (mantissa, exponent, sign) = x.integer_decode();
        let mut raw = BigInt::from(mantissa);
        let shift = exponent as i64 + FRAC_BITS as i64;
        raw = if shift >= 0 {
            raw << shift as u64
        } else {
            raw >> (-shift) as u64
        };
        if sign < 0 {
            raw = -raw;
        }
        Self { raw }
    }

    /// Parses a plain decimal literal such as `-12.5e-3` or `0.125`.
    pub fn from_decimal(s: &str) -> Self {
        let (mant, exp10) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i64>().expect("exponent")),
            None => (s, 0),
        };
        let negative = mant.starts_with('-');
        let mant = mant.trim_start_matches(['-', '+']);
        let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
        let digits: BigInt = format!("{int}{frac}").parse().expect("digits");
        let exp10 = exp10 - frac.len() as i64;
        let ten = BigInt::from(10);
        let mut raw = digits << FRAC_BITS;
        if exp10 >= 0 {
            raw *= num_traits::pow(ten, exp10 as usize);
        } else {
            raw /= num_traits::pow(ten, (-exp10) as usize);
        }
        Self {
            raw: if negative { -raw } else { raw },
        }
    }

    pub fn ln2() -> Self {
        Self::from_decimal(LN_2)
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.raw.bits() as i64;
        let drop = (bits - 64).max(0);
        let head = (&self.raw >> drop as u64).to_f64().expect("finite");
        ldexp(head, drop - FRAC_BITS as i64)
    }

    pub fn abs(&self) -> Self {
        Self { raw: self.raw.abs() }
    }

    pub fn is_negative(&self) -> bool {
        self.raw.is_negative()
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of negative value");
        Self {
            raw: (&self.raw << FRAC_BITS).sqrt(),
        }
    }

    pub fn cbrt(&self) -> Self {
        Self {
            raw: (&self.raw << (2 * FRAC_BITS)).cbrt(),
        }
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `e^x` by halving the argument until it is below `2^-8`, summing the
    /// Taylor series and squaring back.
    pub fn exp(&self) -> Self {
        let mut halvings = 0u32;
        let mut x = self.clone();
        let small = Self::one().raw >> 8u32;
        while x.raw.abs() > small {
            x.raw >>= 1u32;
            halvings += 1;
        }
        let mut sum = Self::one();
        let mut term = Self::one();
        for k in 1..200i64 {
            term = &(&term * &x) / &Self::from_int(k);
            if term.raw.is_zero() {
                break;
            }
            sum = &sum + &term;
        }
        for _ in 0..halvings {
            sum = &sum * &sum;
        }
        sum
    }
}

fn ldexp(x: f64, mut e: i64) -> f64 {
    let mut v = x;
    while e > 0 {
        let step = e.min(1000);
        v *= 2f64.powi(step as i32);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(1000);
        v *= 2f64.powi(-(step as i32));
        e += step;
    }
    v
}

impl PartialOrd for BigFixed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.raw.cmp(&other.raw))
    }
}

impl<'a> Add<&'a BigFixed> for &'a BigFixed {
    type Output = BigFixed;
    fn add(self, rhs: &BigFixed) -> BigFixed {
        BigFixed {
            raw: &self.raw + &rhs.raw,
        }
    }
}

impl<'a> Sub<&'a BigFixed> for &'a BigFixed {
    type Output = BigFixed;
    fn sub(self, rhs: &BigFixed) -> BigFixed {
        BigFixed {
            raw: &self.raw - &rhs.raw,
        }
    }
}

impl<'a> Mul<&'a BigFixed> for &'a BigFixed {
    type Output = BigFixed;
    fn mul(self, rhs: &BigFixed) -> BigFixed {
        BigFixed {
            raw: (&self.raw * &rhs.raw) >> FRAC_BITS,
        }
    }
}

impl<'a> Div<&'a BigFixed> for &'a BigFixed {
    type Output = BigFixed;
    fn div(self, rhs: &BigFixed) -> BigFixed {
        assert!(!rhs.raw.is_zero(), "division by zero");
        BigFixed {
            raw: (&self.raw << FRAC_BITS) / &rhs.raw,
        }
    }
}

impl Neg for BigFixed {
    type Output = BigFixed;
    fn neg(self) -> BigFixed {
        BigFixed { raw: -self.raw }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for x in [0.0, 1.0, -2.5, 1e-30, 3.7e12, std::f64::consts::PI] {
            assert_eq!(BigFixed::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn roots() {
        let eight = BigFixed::from_int(8);
        assert_eq!(eight.cbrt().to_f64(), 2.0);
        assert_eq!(BigFixed::from_int(9).sqrt().to_f64(), 3.0);
        let two = BigFixed::from_int(2).sqrt();
        assert_eq!((&two * &two).to_f64(), 2.0);
    }

    #[test]
    fn exp_and_ln2_agree() {
        let e = BigFixed::ln2().exp();
        assert!((e.to_f64() - 2.0).abs() < 1e-15);
        assert!((BigFixed::one().exp().to_f64() - std::f64::consts::E).abs() < 1e-15);
        assert!((BigFixed::from_int(-3).exp().to_f64() - (-3f64).exp()).abs() < 1e-17);
    }

    #[test]
    fn decimal_parse() {
        assert_eq!(BigFixed::from_decimal("0.125").to_f64(), 0.125);
        assert_eq!(BigFixed::from_decimal("-1.5e2").to_f64(), -150.0);
    }
}
