//! Polynomials and rational functions in `alpha` with exact rational
//! coefficients.
//!
//! Because `alpha` is transcendental, the evaluation map from polynomials to
//! reals is injective: a polynomial is zero at `alpha` exactly when it is the
//! zero polynomial, and two rational functions agree at `alpha` exactly when
//! they agree as reduced fractions. [`AlphaRat`] keeps every value in a
//! canonical reduced form so that syntactic equality is value equality.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rat::{rat_big, rat_display, rat_is_int, Rat};

/// Polynomial in `alpha` over Q. Invariant: the last coefficient is nonzero
/// (the zero polynomial has no coefficients).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AlphaPoly {
    coeffs: Vec<Rat>,
}

impl AlphaPoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        AlphaPoly { coeffs: Vec::new() }
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        Self::from_rat(Rat::one())
    }

    /// The monomial `alpha^k`.
    pub fn alpha_pow(k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = Rat::one();
        AlphaPoly { coeffs }
    }

    /// A constant polynomial.
    pub fn from_rat(r: Rat) -> Self {
        if r.is_zero() {
            Self::zero()
        } else {
            AlphaPoly { coeffs: vec![r] }
        }
    }

    /// A constant integer polynomial.
    pub fn from_int(n: &BigInt) -> Self {
        Self::from_rat(rat_big(n.clone()))
    }

    /// Builds from raw coefficients (constant term first), trimming zeros.
    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        let mut p = AlphaPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `alpha^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    /// All coefficients, constant term first.
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Leading coefficient (zero polynomial has none).
    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) + other.coeff(i));
        }
        Self::from_coeffs(coeffs)
    }

    /// Pointwise difference.
    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) - other.coeff(i));
        }
        Self::from_coeffs(coeffs)
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        AlphaPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    /// Product.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    /// Scalar multiple.
    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        AlphaPoly {
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplication by `alpha^k`.
    pub fn mul_alpha_pow(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rat::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        AlphaPoly { coeffs }
    }

    /// Euclidean division: returns `(q, r)` with `self = q*d + r` and
    /// `deg r < deg d`. Panics if `d` is zero.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.coeffs.len();
        if self.coeffs.len() < dd {
            return (Self::zero(), self.clone());
        }
        let lead_inv = d.coeffs[dd - 1].recip();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![Rat::zero(); rem.len() - dd + 1];
        for top in (dd - 1..rem.len()).rev() {
            let q = &rem[top] * &lead_inv;
            if q.is_zero() {
                continue;
            }
            let shift = top + 1 - dd;
            quo[shift] = q.clone();
            for (i, dc) in d.coeffs.iter().enumerate() {
                let prod = dc * &q;
                rem[shift + i] -= prod;
            }
        }
        rem.truncate(dd - 1);
        (Self::from_coeffs(quo), Self::from_coeffs(rem))
    }

    /// Monic greatest common divisor (1 for coprime inputs).
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = x.divrem(&y);
            x = y;
            y = r;
        }
        if x.is_zero() {
            return x;
        }
        let inv = x.leading().unwrap().recip();
        x.scale(&inv)
    }

    /// Clears denominators and content: returns `(ints, scale)` with
    /// `self = scale * sum ints[i] * alpha^i`, the integer coefficients
    /// coprime with positive leading entry, and `scale` carrying the sign.
    pub fn to_integer_primitive(&self) -> (Vec<BigInt>, Rat) {
        if self.is_zero() {
            return (Vec::new(), Rat::zero());
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let mut content = BigInt::zero();
        for v in &ints {
            content = content.gcd(v);
        }
        if ints.last().unwrap().is_negative() {
            content = -content;
        }
        for v in &mut ints {
            *v = &*v / &content;
        }
        (ints, Rat::new(content, den))
    }
}

impl fmt::Display for AlphaPoly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(out, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(out, " - ")?;
            } else {
                write!(out, " + ")?;
            }
            let unit = mag.is_one() && i > 0;
            if !unit {
                write!(out, "{}", rat_display(&mag))?;
                if i > 0 {
                    write!(out, "*")?;
                }
            }
            match i {
                0 => {}
                1 => write!(out, "alpha")?,
                _ => write!(out, "alpha^{}", i)?,
            }
        }
        Ok(())
    }
}

/// Rational function in `alpha`, kept in canonical reduced form:
/// numerator and denominator coprime, denominator with coprime integer
/// coefficients and positive leading coefficient (1 when the value is zero).
/// Syntactic equality therefore coincides with equality of real values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlphaRat {
    num: AlphaPoly,
    den: AlphaPoly,
}

impl AlphaRat {
    /// Builds `num/den`, canonicalizing. Panics if `den` is zero.
    pub fn ratio(num: AlphaPoly, den: AlphaPoly) -> Self {
        assert!(!den.is_zero(), "AlphaRat with zero denominator");
        if num.is_zero() {
            return AlphaRat {
                num,
                den: AlphaPoly::one(),
            };
        }
        let g = AlphaPoly::gcd(&num, &den);
        let (num, _) = num.divrem(&g);
        let (den, _) = den.divrem(&g);
        // Denominator to primitive integer form with positive leading
        // coefficient; absorb the scale into the numerator.
        let (ints, scale) = den.to_integer_primitive();
        let den = AlphaPoly::from_coeffs(ints.iter().map(|v| rat_big(v.clone())).collect());
        let num = num.scale(&scale.recip());
        AlphaRat { num, den }
    }

    /// Embeds a polynomial.
    pub fn from_poly(p: AlphaPoly) -> Self {
        AlphaRat {
            num: p,
            den: AlphaPoly::one(),
        }
    }

    /// Embeds a rational constant.
    pub fn from_rat(r: Rat) -> Self {
        Self::from_poly(AlphaPoly::from_rat(r))
    }

    /// The zero value.
    pub fn zero() -> Self {
        Self::from_poly(AlphaPoly::zero())
    }

    /// The unit value.
    pub fn one() -> Self {
        Self::from_poly(AlphaPoly::one())
    }

    /// The value `alpha^k`.
    pub fn alpha_pow(k: usize) -> Self {
        Self::from_poly(AlphaPoly::alpha_pow(k))
    }

    /// Numerator of the reduced form.
    pub fn num(&self) -> &AlphaPoly {
        &self.num
    }

    /// Denominator of the reduced form.
    pub fn den(&self) -> &AlphaPoly {
        &self.den
    }

    /// True for the zero value.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The exact rational value, when the reduced form is constant. By
    /// transcendence every non-constant reduced form is irrational.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.num.degree().unwrap_or(0) == 0 && self.den.degree() == Some(0) {
            Some(self.num.coeff(0) / self.den.coeff(0))
        } else {
            None
        }
    }

    /// Sum.
    pub fn add(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Self::ratio(num, self.den.mul(&other.den))
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).sub(&other.num.mul(&self.den));
        Self::ratio(num, self.den.mul(&other.den))
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        AlphaRat {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    /// Product.
    pub fn mul(&self, other: &Self) -> Self {
        Self::ratio(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    /// Quotient. Panics if `other` is zero.
    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "AlphaRat division by zero");
        Self::ratio(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    /// Reciprocal. Panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "AlphaRat reciprocal of zero");
        Self::ratio(self.den.clone(), self.num.clone())
    }

    /// Scalar multiple by a rational.
    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        AlphaRat {
            num: self.num.scale(r),
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for AlphaRat {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) && self.den.coeff(0).is_one() {
            write!(out, "{}", self.num)
        } else {
            write!(out, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Total order on polynomial pairs used only for deterministic container
/// ordering; it is not the order of real values.
pub fn poly_key_cmp(a: &AlphaPoly, b: &AlphaPoly) -> Ordering {
    a.cmp(b)
}

/// True when the rational is an integer (re-export convenience).
pub fn rat_integer(r: &Rat) -> bool {
    rat_is_int(r)
}
