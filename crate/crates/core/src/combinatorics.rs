//! Exact integers, rationals and the combinatorial coefficients of the
//! 2D trace-less projector and its inversion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// `n!` for `n >= 0`.
pub fn factorial(n: i64) -> Result<BigInt> {
    if n < 0 {
        return Err(Error::domain(format!("factorial of negative argument {n}")));
    }
    Ok((2..=n).fold(BigInt::one(), |acc, k| acc * k))
}

/// `n!!` with the conventions `(-1)!! = 0!! = 1`.
pub fn double_factorial(n: i64) -> Result<BigInt> {
    if n < -1 {
        return Err(Error::domain(format!("double factorial of argument {n} < -1")));
    }
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    Ok(acc)
}

/// `C(n, k)`, zero outside the Pascal triangle.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn fact(n: i64) -> Result<Rational> {
    factorial(n).map(Rational::from_integer)
}

fn dfact(n: i64) -> Result<Rational> {
    double_factorial(n).map(Rational::from_integer)
}

/// Coefficient `a_s` of the rank-`p` 2D trace-less projector:
/// `(-1/4)^s * p/(p-2s)! * (p-s-1)!/s!`, with `a_0 = 1` for every `p`
/// (including the scalar block `p = 0`).
pub fn coeff_a(p: usize, s: usize) -> Result<Rational> {
    if s > p / 2 {
        return Err(Error::domain(format!("coeff_a: s={s} outside 0..={}", p / 2)));
    }
    if s == 0 {
        return Ok(Rational::one());
    }
    let (p, s) = (p as i64, s as i64);
    let quarter = rational(-1, 4);
    let sign_pow = (0..s).fold(Rational::one(), |acc, _| acc * &quarter);
    Ok(sign_pow * int(p) / fact(p - 2 * s)? * fact(p - s - 1)? / fact(s)?)
}

/// Coefficient `b_{r,s}` expressing the symmetrized `K^{⊗r}` through 2D
/// trace-less parts:
/// `r!/(r-2s)! * 1/(2s)!! * (2r-4s)!!/(2r-2s)!!`.
///
/// The brute-force tensor check in [`crate::tensor::verify_theorem2`] pins
/// this form; [`coeff_b_as_printed`] keeps the `(r-s)!` variant for comparison.
pub fn coeff_b(r: usize, s: usize) -> Result<Rational> {
    if s > r / 2 {
        return Err(Error::domain(format!("coeff_b: s={s} outside 0..={}", r / 2)));
    }
    let (r, s) = (r as i64, s as i64);
    Ok(fact(r)? / fact(r - 2 * s)? / dfact(2 * s)? * dfact(2 * r - 4 * s)? / dfact(2 * r - 2 * s)?)
}

/// `r!/(r-s)! * 1/(2s)!! * (2r-4s)!!/(2r-2s)!!`, the variant with `(r-s)!`.
/// It agrees with [`coeff_b`] only when `s = 0` or `r <= 2`.
pub fn coeff_b_as_printed(r: usize, s: usize) -> Result<Rational> {
    if s > r / 2 {
        return Err(Error::domain(format!("coeff_b: s={s} outside 0..={}", r / 2)));
    }
    let (r, s) = (r as i64, s as i64);
    Ok(fact(r)? / fact(r - s)? / dfact(2 * s)? * dfact(2 * r - 4 * s)? / dfact(2 * r - 2 * s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0).unwrap(), BigInt::from(1));
        assert_eq!(factorial(5).unwrap(), BigInt::from(120));
        assert_eq!(factorial(12).unwrap(), BigInt::from(479001600u64));
        assert!(matches!(factorial(-1), Err(Error::Domain(_))));
    }

    #[test]
    fn double_factorial_values() {
        assert_eq!(double_factorial(-1).unwrap(), BigInt::from(1));
        assert_eq!(double_factorial(0).unwrap(), BigInt::from(1));
        assert_eq!(double_factorial(6).unwrap(), BigInt::from(48));
        assert_eq!(double_factorial(7).unwrap(), BigInt::from(105));
        assert!(matches!(double_factorial(-2), Err(Error::Domain(_))));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::from(1));
        assert_eq!(binomial(-2, 1), BigInt::zero());
        assert_eq!(binomial(5, -1), BigInt::zero());
    }

    #[test]
    fn coeff_a_values() {
        for p in 0..=10 {
            assert_eq!(coeff_a(p, 0).unwrap(), Rational::one());
        }
        assert_eq!(coeff_a(2, 1).unwrap(), rational(-1, 2));
        assert_eq!(coeff_a(4, 2).unwrap(), rational(1, 8));
        assert!(coeff_a(3, 2).is_err());
    }

    #[test]
    fn coeff_b_values() {
        for r in 1..=10 {
            assert_eq!(coeff_b(r, 0).unwrap(), Rational::one());
        }
        assert_eq!(coeff_b(3, 0).unwrap(), Rational::one());
        assert_eq!(coeff_b(2, 1).unwrap(), rational(1, 2));
        // 4!/0! * 1/4!! * 0!!/4!! = 24/64
        assert_eq!(coeff_b(4, 2).unwrap(), rational(3, 8));
        assert_eq!(coeff_b(3, 1).unwrap(), rational(3, 4));
        assert!(coeff_b(4, 3).is_err());
    }

    #[test]
    fn printed_b_differs_beyond_rank_two() {
        assert_eq!(coeff_b_as_printed(2, 1).unwrap(), coeff_b(2, 1).unwrap());
        assert_eq!(coeff_b_as_printed(4, 2).unwrap(), rational(3, 16));
        assert_ne!(coeff_b_as_printed(3, 1).unwrap(), coeff_b(3, 1).unwrap());
    }

    #[test]
    fn factorial_recurrence() {
        for n in 0..=30 {
            assert_eq!(factorial(n).unwrap() * (n + 1), factorial(n + 1).unwrap());
        }
    }

    #[test]
    fn double_factorial_identities() {
        for k in 0..=15i64 {
            let two_k = BigInt::from(2).pow(k as u32) * factorial(k).unwrap();
            assert_eq!(double_factorial(2 * k).unwrap(), two_k);
            assert_eq!(
                double_factorial(2 * k - 1).unwrap() * double_factorial(2 * k).unwrap(),
                factorial(2 * k).unwrap()
            );
        }
    }

    #[test]
    fn coefficients_in_lowest_terms() {
        for p in 0..=10 {
            for s in 0..=p / 2 {
                for q in [coeff_a(p, s).unwrap(), coeff_b(p.max(1), s.min(p.max(1) / 2)).unwrap()] {
                    assert!(q.numer().gcd(q.denom()) == BigInt::one());
                    assert!(q.denom() > &BigInt::zero());
                }
            }
        }
    }
}
