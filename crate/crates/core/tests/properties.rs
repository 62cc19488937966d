use momentwave::charsys::{parse_decimal, y_coeff};
use momentwave::combinatorics::{double_factorial, factorial, int, rational, Rational};
use momentwave::poly::RationalPoly;
use momentwave::solver::{real_roots, ExactForm};
use momentwave::tensor::{Component, MinkTensor, Variance};
use num_bigint::BigInt;
use proptest::prelude::*;

fn poly(coeffs: Vec<(i64, i64)>) -> RationalPoly {
    RationalPoly::new(coeffs.into_iter().map(|(n, d)| rational(n, d)).collect())
}

fn coeffs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-20i64..=20, 1i64..=9), 0..6)
}

proptest! {
    #[test]
    fn division_reconstructs(a in coeffs(), b in coeffs()) {
        let (a, b) = (poly(a), poly(b));
        prop_assume!(b.degree().is_some());
        let (q, r) = a.div_rem(&b);
        prop_assert_eq!(&(&q * &b) + &r, a);
        prop_assert!(r.degree().is_none_or(|d| d < b.degree().unwrap()));
    }

    #[test]
    fn factorial_recurrences(n in 1i64..40) {
        prop_assert_eq!(factorial(n).unwrap(), BigInt::from(n) * factorial(n - 1).unwrap());
        prop_assert_eq!(double_factorial(n).unwrap(), BigInt::from(n) * double_factorial(n - 2).unwrap());
        prop_assert_eq!(double_factorial(2 * n).unwrap(), (BigInt::from(1) << n as usize) * factorial(n).unwrap());
    }

    #[test]
    fn rational_roots_are_recovered(roots in prop::collection::vec((-12i64..=12, 1i64..=6), 1..5)) {
        let mut f = RationalPoly::one();
        for (n, d) in &roots {
            f = &f * &RationalPoly::linear(-rational(*n, *d), int(1));
        }
        let found = real_roots(&f, 1e-12).unwrap();
        let total: usize = found.iter().map(|r| r.multiplicity).sum();
        prop_assert_eq!(total, roots.len());
        for (n, d) in &roots {
            let q = rational(*n, *d);
            prop_assert!(found.iter().any(|r| r.exact == ExactForm::Rational(q.clone())));
        }
    }

    #[test]
    fn symmetrization_is_idempotent(values in prop::collection::vec(-5i128..=5, 64)) {
        let t = MinkTensor::from_fn(vec![Variance::Lower; 3], |i| Component::int(values[i[0] * 16 + i[1] * 4 + i[2]]));
        let s = t.symmetrized();
        prop_assert_eq!(s.symmetrized(), s.clone());
        prop_assert_eq!(s.permuted(&[2, 0, 1]), s);
    }

    #[test]
    fn decimals_parse_exactly(m in -1_000_000i64..1_000_000, k in 0u32..8) {
        let text = format!("{m}e-{k}");
        let want = Rational::new(BigInt::from(m), BigInt::from(10).pow(k));
        prop_assert_eq!(parse_decimal(&text).unwrap(), want);
    }

    #[test]
    fn coefficient_labels_balance(p in 0usize..4, b in 0usize..4, extra in 0usize..4) {
        let n = p + extra;
        for t in y_coeff(p, b, n).unwrap() {
            prop_assert_eq!(t.h + t.k, n - p);
        }
    }
}
