//! Exact rational numbers backed by arbitrary-precision integers.
//!
//! Every coverage decision in this crate goes through [`Rational`]; there is
//! no floating-point fallback on verification paths.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
    #[error("expected a positive value, got {0}")]
    NotPositive(Rational),
}

/// A canonical fraction: positive denominator, numerator and denominator coprime.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self, RationalError> {
        if den == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(Self(BigRational::new(num.into(), den.into())))
    }

    /// Constant constructor for literals known to be well formed.
    ///
    /// Panics when `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("literal rational with zero denominator")
    }

    pub fn integer(n: i64) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Result<Self, RationalError> {
        if den.is_zero() {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(Self(BigRational::new(num, den)))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Self(self.0.recip())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn midpoint(&self, other: &Self) -> Self {
        (self + other) / Rational::integer(2)
    }

    /// Reduces `self` into `[0, modulus)`.
    pub fn rem_euclid(&self, modulus: &Self) -> Self {
        let q = (self / modulus).floor();
        self - &(modulus * &Rational::from(q))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // Extremely large operands: divide after shifting into range.
            let n = self.numer().to_f64().unwrap_or(f64::INFINITY);
            let d = self.denom().to_f64().unwrap_or(f64::INFINITY);
            n / d
        })
    }

    /// Fixed-point decimal text, rounded half away from zero.
    pub fn to_decimal(&self, places: u32) -> String {
        let scale = BigInt::from(10u32).pow(places);
        let scaled = self.numer() * &scale;
        let den = self.denom();
        let (q, r) = scaled.abs().div_rem(den);
        let q = if r * 2u32 >= *den { q + 1u32 } else { q };
        let digits = q.to_string();
        let negative = self.is_negative() && !q.is_zero();
        let places = places as usize;
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        if places == 0 {
            out.push_str(&digits);
            return out;
        }
        let padded = format!("{digits:0>width$}", width = places + 1);
        let (int_part, frac_part) = padded.split_at(padded.len() - places);
        out.push_str(int_part);
        out.push('.');
        out.push_str(frac_part);
        out
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

/// Smallest positive `r` such that `r / a` and `r / b` are both integers.
pub fn rational_lcm(a: &Rational, b: &Rational) -> Result<Rational, RationalError> {
    for v in [a, b] {
        if !v.is_positive() {
            return Err(RationalError::NotPositive(v.clone()));
        }
    }
    let num = a.numer().lcm(b.numer());
    let den = a.denom().gcd(b.denom());
    Rational::from_bigints(num, den)
}

/// [`rational_lcm`] folded over a non-empty list.
pub fn rational_lcm_all<'a, I>(values: I) -> Result<Rational, RationalError>
where
    I: IntoIterator<Item = &'a Rational>,
{
    let mut it = values.into_iter();
    let first = it
        .next()
        .ok_or_else(|| RationalError::NotPositive(Rational::zero()))?;
    if !first.is_positive() {
        return Err(RationalError::NotPositive(first.clone()));
    }
    it.try_fold(first.clone(), |acc, v| rational_lcm(&acc, v))
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Self(BigRational::from_integer(n))
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Accepts exactly `-?digits(/digits)?`.
impl FromStr for Rational {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || RationalError::Malformed(s.to_string());
        let body = s.strip_prefix('-').unwrap_or(s);
        let (num, den) = match body.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (body, None),
        };
        if !is_digits(num) || den.is_some_and(|d| !is_digits(d)) {
            return Err(malformed());
        }
        let mut n: BigInt = num.parse().map_err(|_| malformed())?;
        if s.starts_with('-') {
            n = -n;
        }
        let d: BigInt = match den {
            Some(d) => d.parse().map_err(|_| malformed())?,
            None => BigInt::one(),
        };
        Rational::from_bigints(n, d)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'b> $trait<&'b Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, v| acc + v)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, v| acc + v)
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.0.is_integer() && *self.numer() == BigInt::from(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&Rational::integer(*other)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn construction_reduces_and_normalizes_sign() {
        let r = Rational::new(14, 6).unwrap();
        assert_eq!((r.numer().clone(), r.denom().clone()), (7.into(), 3.into()));
        let r = Rational::new(3, -6).unwrap();
        assert_eq!((r.numer().clone(), r.denom().clone()), ((-1).into(), 2.into()));
        let r = Rational::new(0, 5).unwrap();
        assert_eq!((r.numer().clone(), r.denom().clone()), (0.into(), 1.into()));
        assert_eq!(Rational::new(1, 0), Err(RationalError::ZeroDenominator));
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(rational_lcm(&q(7, 1), &q(10, 3)).unwrap(), q(70, 1));
        assert_eq!(rational_lcm(&q(1, 1), &q(1, 1)).unwrap(), q(1, 1));
        assert_eq!(rational_lcm(&q(3, 2), &q(1, 2)).unwrap(), q(3, 2));
        assert!(matches!(
            rational_lcm(&q(0, 1), &q(1, 2)),
            Err(RationalError::NotPositive(_))
        ));
        assert!(rational_lcm(&q(-1, 1), &q(1, 2)).is_err());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("7/3".parse::<Rational>().unwrap(), q(7, 3));
        assert_eq!("-14/6".parse::<Rational>().unwrap(), q(-7, 3));
        assert_eq!("5".parse::<Rational>().unwrap(), q(5, 1));
        assert_eq!(q(7, 3).to_string(), "7/3");
        assert_eq!(q(-4, 2).to_string(), "-2");
        for bad in ["7/0", "", "/3", "1/", "+1", "1.5", " 1", "1/-2", "--1", "a"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn decimals() {
        assert_eq!(q(7, 3).to_decimal(6), "2.333333");
        assert_eq!(q(2, 3).to_decimal(6), "0.666667");
        assert_eq!(q(-1, 8).to_decimal(2), "-0.13");
        assert_eq!(q(-1, 1000).to_decimal(2), "0.00");
        assert_eq!(q(41, 12).to_decimal(0), "3");
        assert_eq!(q(5, 1).to_decimal(3), "5.000");
    }

    #[test]
    fn rem_euclid_wraps_negative() {
        assert_eq!(q(-1, 4).rem_euclid(&q(1, 1)), q(3, 4));
        assert_eq!(q(15, 2).rem_euclid(&q(7, 1)), q(1, 2));
        assert_eq!(q(7, 1).rem_euclid(&q(7, 1)), q(0, 1));
    }

    fn small() -> impl Strategy<Value = Rational> {
        (-60i64..60, 1i64..40).prop_map(|(n, d)| q(n, d))
    }

    fn cross_cmp(a: &Rational, b: &Rational) -> Ordering {
        // Independent comparison through cross-multiplication.
        (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
    }

    proptest! {
        #[test]
        fn field_laws_hold_exactly(a in small(), b in small(), c in small()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
            }
        }

        #[test]
        fn ordering_matches_cross_multiplication(a in small(), b in small()) {
            prop_assert_eq!(a.cmp(&b), cross_cmp(&a, &b));
            // Canonical form: equal values have identical parts.
            let sum = &a + &b;
            let g = sum.numer().gcd(sum.denom());
            prop_assert!(g == BigInt::one());
            prop_assert!(sum.denom() > &BigInt::zero());
        }

        #[test]
        fn lcm_is_common_multiple_and_minimal(
            an in 1i64..50, ad in 1i64..20, bn in 1i64..50, bd in 1i64..20
        ) {
            let a = q(an, ad);
            let b = q(bn, bd);
            let l = rational_lcm(&a, &b).unwrap();
            prop_assert!((&l / &a).is_integer());
            prop_assert!((&l / &b).is_integer());
            // No proper divisor l/p (p prime) is still a common multiple.
            for p in [2i64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
                let smaller = &l / &q(p, 1);
                prop_assert!(!((&smaller / &a).is_integer() && (&smaller / &b).is_integer()));
            }
        }
    }
}
