//! Integer combinatorics and the scalar backends.

mod scalar;

pub use scalar::{
    AnyScalar, Backend, BackendKind, Exact, ExactScalar, Float, FloatScalar, IntoAny,
    ParseExactError, Scalar,
};

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// Step function: 1 for `x >= 0`, 0 otherwise.
pub fn heaviside(x: i64) -> i64 {
    i64::from(x >= 0)
}

/// 1 for `x == 0`, 0 otherwise.
pub fn kronecker(x: i64) -> i64 {
    i64::from(x == 0)
}

pub fn factorial(n: i64) -> Result<BigUint> {
    if n < 0 {
        return Err(Error::NegativeFactorial(n));
    }
    Ok((1..=n as u64).map(BigUint::from).product())
}

/// `C(a, b)`, extended by zero outside `0 <= b <= a`.
///
/// A negative `b` always gives zero. A negative `a` with `b >= 0` is an error
/// since no formula in this crate ever asks for it.
pub fn binomial(a: i64, b: i64) -> Result<BigUint> {
    if b < 0 {
        return Ok(BigUint::ZERO);
    }
    if a < 0 {
        return Err(Error::NegativeBinomialUpper { upper: a, lower: b });
    }
    if b > a {
        return Ok(BigUint::ZERO);
    }
    let b = b.min(a - b) as u64;
    let a = a as u64;
    // Each prefix product is itself a binomial, so the division is exact.
    let mut acc = BigUint::one();
    for k in 0..b {
        acc *= a - k;
        acc /= k + 1;
    }
    Ok(acc)
}

/// `n!!` with `(-1)!! = 0!! = 1`.
pub fn double_factorial(n: i64) -> Result<BigUint> {
    if n < -1 {
        return Err(Error::DoubleFactorialDomain(n));
    }
    Ok((1..=n.max(0) as u64)
        .rev()
        .step_by(2)
        .map(BigUint::from)
        .product())
}

/// `Π_{k=lo..=hi} f(k)`; one when `hi < lo`.
pub fn product_range<S: Scalar>(f: impl Fn(i64) -> S, lo: i64, hi: i64) -> S {
    (lo..=hi).fold(S::one(), |acc, k| acc * f(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn heaviside_and_kronecker() {
        assert_eq!(heaviside(0), 1);
        assert_eq!(heaviside(-1), 0);
        assert_eq!(heaviside(7), 1);
        assert_eq!(kronecker(0), 1);
        assert_eq!(kronecker(3), 0);
        assert_eq!(kronecker(-3), 0);
    }

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0).unwrap(), big(1));
        assert_eq!(factorial(5).unwrap(), big(120));
        // repeated multiplication in u64
        let oracle: u64 = (1..=20u64).product();
        assert_eq!(oracle, 2_432_902_008_176_640_000);
        assert_eq!(factorial(20).unwrap(), big(oracle));
        assert_eq!(factorial(-1), Err(Error::NegativeFactorial(-1)));
    }

    #[test]
    fn binomial_values_and_conventions() {
        assert_eq!(binomial(5, 2).unwrap(), big(10));
        assert_eq!(binomial(1, -1).unwrap(), big(0));
        assert_eq!(binomial(3, 5).unwrap(), big(0));
        assert_eq!(binomial(0, 0).unwrap(), big(1));
        assert_eq!(binomial(0, -1).unwrap(), big(0));
        assert!(matches!(
            binomial(-1, 0),
            Err(Error::NegativeBinomialUpper { upper: -1, lower: 0 })
        ));
    }

    #[test]
    fn double_factorial_values() {
        assert_eq!(double_factorial(-1).unwrap(), big(1));
        assert_eq!(double_factorial(0).unwrap(), big(1));
        assert_eq!(double_factorial(5).unwrap(), big(15));
        assert_eq!(double_factorial(6).unwrap(), big(48));
        assert_eq!(double_factorial(-2), Err(Error::DoubleFactorialDomain(-2)));
    }

    #[test]
    fn product_range_examples() {
        let v: ExactScalar = product_range(|k| ExactScalar::from_u64(k as u64), 1, 4);
        assert_eq!(v, ExactScalar::from_u64(24));
        let empty: ExactScalar = product_range(|_| ExactScalar::from_u64(99), 0, -1);
        assert_eq!(empty, ExactScalar::one());
        let v: ExactScalar = product_range(|k| ExactScalar::new(1, 7 - 2 * k), 0, 2);
        assert_eq!(v, ExactScalar::new(1, 105));
    }

    proptest! {
        #[test]
        fn factorial_is_product_range(n in 0i64..60) {
            let p: ExactScalar = product_range(|k| ExactScalar::from_u64(k as u64), 1, n);
            prop_assert_eq!(ExactScalar::from(factorial(n).unwrap()), p);
        }

        #[test]
        fn double_factorials_multiply_to_factorial(n in 1i64..80) {
            let lhs = double_factorial(n).unwrap() * double_factorial(n - 1).unwrap();
            prop_assert_eq!(lhs, factorial(n).unwrap());
        }

        #[test]
        fn odd_double_factorial_identity(n in 1i64..60) {
            let lhs = double_factorial(2 * n - 1).unwrap();
            let rhs = factorial(2 * n).unwrap() / (BigUint::from(2u8).pow(n as u32) * factorial(n).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn pascal_rule(a in 1i64..80, b in 0i64..80) {
            prop_assume!(b <= a);
            let lhs = binomial(a, b).unwrap();
            let rhs = binomial(a - 1, b - 1).unwrap() + binomial(a - 1, b).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
