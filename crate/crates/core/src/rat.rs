//! Arbitrary-precision rational helpers used throughout the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number.
pub type Rat = BigRational;

/// Rational from an `i64`.
pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational from an integer numerator and denominator.
pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Rational from a `BigInt`.
pub fn rat_big(n: BigInt) -> Rat {
    Rat::from_integer(n)
}

/// Floor of a rational as a `BigInt`.
pub fn rat_floor(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

/// Ceiling of a rational as a `BigInt`.
pub fn rat_ceil(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

/// Sign of a rational as -1, 0, or 1.
pub fn rat_sign(r: &Rat) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// True when the rational is an integer.
pub fn rat_is_int(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Renders a rational as `p` or `p/q`.
pub fn rat_display(r: &Rat) -> String {
    if rat_is_int(r) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
