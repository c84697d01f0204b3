//! Exact arithmetic and decision queries in the field Q(alpha).
//!
//! Values are polynomials ([`AlphaPoly`]) or reduced rational functions
//! ([`AlphaRat`]) in `alpha`. Sign, ordering, and floor queries are answered
//! by evaluating integer-cleared polynomials over the provider's interval at
//! successive ladder levels with scaled-integer interval Horner evaluation;
//! transcendence of `alpha` guarantees every such query terminates (a
//! nonzero polynomial cannot vanish at `alpha`, and a non-constant reduced
//! fraction cannot be rational, so intervals eventually separate).

pub mod poly;
pub mod provider;

pub use poly::{AlphaPoly, AlphaRat};
pub use provider::{AlphaProvider, LevelBounds, DEFAULT_PRECISION_CAP};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::Result;
use crate::rat::{rat_sign, Rat};

/// Interval bounds of an integer-coefficient polynomial at a ladder level:
/// value is in `[lo, hi] / 2^(work_bits * deg)`.
fn horner_bounds(ints: &[BigInt], lvl: &LevelBounds) -> (BigInt, BigInt) {
    debug_assert!(!ints.is_empty());
    let deg = ints.len() - 1;
    let mut lo = ints[deg].clone();
    let mut hi = lo.clone();
    for k in (0..deg).rev() {
        let cands = [&lo * &lvl.lo, &lo * &lvl.hi, &hi * &lvl.lo, &hi * &lvl.hi];
        let mut nlo = cands[0].clone();
        let mut nhi = cands[0].clone();
        for c in &cands[1..] {
            if *c < nlo {
                nlo = c.clone();
            }
            if *c > nhi {
                nhi = c.clone();
            }
        }
        let shift = (lvl.work_bits as u64) * ((deg - k) as u64);
        lo = nlo + (&ints[k] << shift);
        hi = nhi + (&ints[k] << shift);
    }
    (lo, hi)
}

/// Sign of `p(alpha)`: -1, 0, or +1. Zero only for the zero polynomial.
pub fn poly_sign(provider: &AlphaProvider, p: &AlphaPoly) -> Result<i8> {
    if p.is_zero() {
        return Ok(0);
    }
    let (ints, scale) = p.to_integer_primitive();
    let scale_sign = rat_sign(&scale);
    if ints.len() == 1 {
        // Constant polynomial: exact. (Primitive form has positive entries.)
        let s: i8 = if ints[0].is_positive() {
            1
        } else if ints[0].is_negative() {
            -1
        } else {
            0
        };
        return Ok(scale_sign * s);
    }
    provider.resolve(|lvl| {
        let (lo, hi) = horner_bounds(&ints, lvl);
        if lo.is_positive() {
            Some(scale_sign)
        } else if hi.is_negative() {
            Some(-scale_sign)
        } else {
            None
        }
    })
}

/// Sign of a reduced rational function at `alpha`.
pub fn rat_sign_of(provider: &AlphaProvider, v: &AlphaRat) -> Result<i8> {
    if v.is_zero() {
        return Ok(0);
    }
    let sn = poly_sign(provider, v.num())?;
    let sd = poly_sign(provider, v.den())?;
    Ok(sn * sd)
}

/// Exact comparison of two values in Q(alpha).
pub fn compare(provider: &AlphaProvider, a: &AlphaRat, b: &AlphaRat) -> Result<std::cmp::Ordering> {
    let s = rat_sign_of(provider, &a.sub(b))?;
    Ok(match s {
        1 => std::cmp::Ordering::Greater,
        -1 => std::cmp::Ordering::Less,
        _ => std::cmp::Ordering::Equal,
    })
}

/// Floor of a value in Q(alpha), computed exactly.
pub fn floor_of(provider: &AlphaProvider, v: &AlphaRat) -> Result<BigInt> {
    if let Some(r) = v.as_rational() {
        return Ok(r.floor().to_integer());
    }
    let (ni, ns) = v.num().to_integer_primitive();
    let (di, ds) = v.den().to_integer_primitive();
    // v = (ns/ds) * N/D with integer polynomials N, D; fold the rational
    // factor into integer multipliers p, q of the same sign convention.
    let factor = ns / ds;
    let p = factor.numer().clone();
    let q = factor.denom().clone();
    let num_ints: Vec<BigInt> = ni.iter().map(|c| c * &p).collect();
    let den_ints: Vec<BigInt> = di.iter().map(|c| c * &q).collect();
    let dn = num_ints.len() - 1;
    let dd = den_ints.len() - 1;
    provider.resolve(|lvl| {
        let (na, nb) = horner_bounds(&num_ints, lvl);
        let (da, db) = horner_bounds(&den_ints, lvl);
        if !da.is_positive() && !db.is_negative() {
            return None; // denominator interval straddles zero
        }
        // value = (n / 2^(w*dn)) / (d / 2^(w*dd)) = n * 2^(w*dd) / (d * 2^(w*dn))
        let w = lvl.work_bits as u64;
        let num_shift = w * (dd as u64);
        let den_shift = w * (dn as u64);
        let fdiv = |n: &BigInt, d: &BigInt| -> BigInt {
            let nn = n << num_shift;
            let dd2 = d << den_shift;
            nn.div_floor(&dd2)
        };
        let cands = [
            fdiv(&na, &da),
            fdiv(&na, &db),
            fdiv(&nb, &da),
            fdiv(&nb, &db),
        ];
        let flo = cands.iter().min().unwrap();
        let fhi = cands.iter().max().unwrap();
        if flo == fhi {
            Some(flo.clone())
        } else {
            None
        }
    })
}

/// Ceiling of a value in Q(alpha).
pub fn ceil_of(provider: &AlphaProvider, v: &AlphaRat) -> Result<BigInt> {
    Ok(-floor_of(provider, &v.neg())?)
}

/// Rational interval bounds of `p(alpha)` at ladder level `j`.
pub fn poly_bounds(provider: &AlphaProvider, p: &AlphaPoly, j: u32) -> Result<(Rat, Rat)> {
    if p.is_zero() {
        return Ok((Rat::zero(), Rat::zero()));
    }
    let (ints, scale) = p.to_integer_primitive();
    let lvl = provider.level(j)?;
    let (lo, hi) = horner_bounds(&ints, &lvl);
    let deg = ints.len() - 1;
    let denom = BigInt::from(1) << ((lvl.work_bits as u64) * deg as u64);
    let rlo = Rat::new(lo, denom.clone()) * &scale;
    let rhi = Rat::new(hi, denom) * &scale;
    if rlo <= rhi {
        Ok((rlo, rhi))
    } else {
        Ok((rhi, rlo))
    }
}

/// Rational interval bounds of a value in Q(alpha) at ladder level `j`,
/// refining past `j` only if the denominator interval still straddles zero.
pub fn rat_bounds(provider: &AlphaProvider, v: &AlphaRat, j: u32) -> Result<(Rat, Rat)> {
    if let Some(r) = v.as_rational() {
        return Ok((r.clone(), r));
    }
    let (ni, ns) = v.num().to_integer_primitive();
    let (di, ds) = v.den().to_integer_primitive();
    let factor = ns / ds;
    let num_ints: Vec<BigInt> = ni.iter().map(|c| c * factor.numer()).collect();
    let den_ints: Vec<BigInt> = di.iter().map(|c| c * factor.denom()).collect();
    let dn = num_ints.len() - 1;
    let dd = den_ints.len() - 1;
    let mut level = j;
    loop {
        let lvl = provider.level(level)?;
        let (na, nb) = horner_bounds(&num_ints, &lvl);
        let (da, db) = horner_bounds(&den_ints, &lvl);
        if !da.is_positive() && !db.is_negative() {
            level += 1;
            continue;
        }
        let w = lvl.work_bits as u64;
        let nden = BigInt::from(1) << (w * dn as u64);
        let dden = BigInt::from(1) << (w * dd as u64);
        let quot = |n: &BigInt, d: &BigInt| Rat::new(n * &dden, d * &nden);
        let mut cands = [
            quot(&na, &da),
            quot(&na, &db),
            quot(&nb, &da),
            quot(&nb, &db),
        ];
        cands.sort();
        return Ok((cands[0].clone(), cands[3].clone()));
    }
}

/// If `g = r * f` for a rational `r`, returns `r`. Purely syntactic.
pub fn is_rational_multiple(f: &AlphaPoly, g: &AlphaPoly) -> Option<Rat> {
    if f.is_zero() {
        return if g.is_zero() { Some(Rat::zero()) } else { None };
    }
    if g.is_zero() {
        return Some(Rat::zero());
    }
    if f.degree() != g.degree() {
        return None;
    }
    let r = g.leading().unwrap() / f.leading().unwrap();
    if g == &f.scale(&r) {
        Some(r)
    } else {
        None
    }
}
