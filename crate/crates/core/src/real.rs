//! Binary floating point at a configurable precision, for the kinetic oracle
//! and the subluminality checks.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::OnceLock;

use dashu_base::{Abs, SquareRoot};
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;

use crate::combinatorics::Rational;

type Inner = FBig<HalfEven>;

pub const DEFAULT_PRECISION_BITS: usize = 128;

/// Working precision in bits; `MOMENTWAVE_PRECISION_BITS` overrides the default
/// (values below 64 are raised to 64).
pub fn precision_bits() -> usize {
    static BITS: OnceLock<usize> = OnceLock::new();
    *BITS.get_or_init(|| {
        std::env::var("MOMENTWAVE_PRECISION_BITS")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .map(|b| b.max(64))
            .unwrap_or(DEFAULT_PRECISION_BITS)
    })
}

#[derive(Clone, PartialEq, Eq)]
pub struct Real(Inner);

impl Real {
    fn wrap(x: Inner) -> Self {
        Real(x.with_precision(precision_bits()).value())
    }

    pub fn zero() -> Self {
        Real::from_int(0)
    }

    pub fn one() -> Self {
        Real::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Real::wrap(Inner::from(n))
    }

    pub fn from_f64(x: f64) -> Self {
        Real::wrap(Inner::try_from(x).expect("finite f64"))
    }

    fn from_bigint(n: &num_bigint::BigInt) -> Self {
        let i = IBig::from_str(&n.to_string()).expect("decimal integer");
        Real::wrap(Inner::from(i))
    }

    pub fn from_rational(q: &Rational) -> Self {
        Real::from_bigint(q.numer()) / Real::from_bigint(q.denom())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "square root of a negative number");
        Real(self.0.sqrt())
    }

    pub fn exp(&self) -> Self {
        Real(self.0.exp())
    }

    pub fn abs(&self) -> Self {
        Real(self.0.clone().abs())
    }

    pub fn is_zero(&self) -> bool {
        self.0 == Inner::ZERO
    }

    pub fn is_negative(&self) -> bool {
        self.0 < Inner::ZERO
    }

    pub fn powi(&self, n: u32) -> Self {
        (0..n).fold(Real::one(), |acc, _| acc * self)
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                Real(&self.0 $op &rhs.0)
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                Real(self.0 $op rhs.0)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                Real(self.0 $op &rhs.0)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                Real(&self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl AddAssign<&Real> for Real {
    fn add_assign(&mut self, rhs: &Real) {
        self.0 = &self.0 + &rhs.0;
    }
}

impl SubAssign<&Real> for Real {
    fn sub_assign(&mut self, rhs: &Real) {
        self.0 = &self.0 - &rhs.0;
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0.clone())
    }
}

impl std::iter::Sum for Real {
    fn sum<I: Iterator<Item = Real>>(iter: I) -> Real {
        iter.fold(Real::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::rational;

    #[test]
    fn rational_round_trip() {
        let third = Real::from_rational(&rational(1, 3));
        assert!((third.to_f64() - 1.0 / 3.0).abs() < 1e-16);
        let back = &third * &Real::from_int(3) - Real::one();
        assert!(back.abs().to_f64() < 1e-35);
    }

    #[test]
    fn elementary_functions() {
        let two = Real::from_int(2);
        let r = two.sqrt();
        assert!((&r * &r - &two).abs().to_f64() < 1e-35);
        assert!((Real::one().exp().to_f64() - std::f64::consts::E).abs() < 1e-15);
        assert!(Real::from_int(-3) < Real::zero());
        assert_eq!(Real::from_int(-3).abs(), Real::from_int(3));
    }
}
