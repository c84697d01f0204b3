//! Interval approximations of `alpha` along a deterministic precision ladder.
//!
//! A provider serves nested rational intervals that contain `alpha` strictly.
//! Precision is organized as a ladder of levels: level `j` guarantees an
//! interval of width at most `2^-(64 * 2^j)`. Each level is computed once,
//! canonically, as the fresh series/digit bound intersected with the previous
//! level, and then memoized. Queries walk the ladder from level 0 upward and
//! never observe a partially refined state, so the answer to every query —
//! and the peak precision a computation settles at — is independent of thread
//! interleaving and of whatever happens to be cached already.
//!
//! Built-in constants are computed with scaled-integer series:
//! `pi = 16*arctan(1/5) - 4*arctan(1/239)`, `e = sum 1/k!`, and
//! `ln2 = sum 1/(k*2^k)`, each with a conservative truncation-error count
//! that widens the returned interval. A digit-file alpha is read as an
//! integer part plus a block of fractional decimal digits; its intervals are
//! widened by one count in each direction so that `alpha` stays strictly
//! interior even when the supplied decimal terminates.

use std::path::Path;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Nominal bits of ladder level 0; level `j` has `64 << j` nominal bits.
const BASE_BITS: u32 = 64;
/// Extra working bits beyond nominal when computing a level.
const GUARD_BITS: u32 = 64;
/// Default hard cap on nominal precision, in bits.
pub const DEFAULT_PRECISION_CAP: u32 = 1 << 20;

enum Kind {
    Pi,
    E,
    Ln2,
    Digits { int_part: BigInt, digits: Vec<u8> },
}

/// One settled ladder level: `lo / 2^work_bits < alpha < hi / 2^work_bits`.
#[derive(Clone, Debug)]
pub struct LevelBounds {
    /// Scale exponent: bounds are numerators over `2^work_bits`.
    pub work_bits: u32,
    /// Strict lower-bound numerator.
    pub lo: BigInt,
    /// Strict upper-bound numerator.
    pub hi: BigInt,
}

/// Source of interval approximations of `alpha`.
pub struct AlphaProvider {
    kind: Kind,
    description: String,
    cap_bits: u32,
    levels: Mutex<Vec<Arc<LevelBounds>>>,
    peak: AtomicU32,
}

impl AlphaProvider {
    fn new(kind: Kind, description: String) -> Self {
        AlphaProvider {
            kind,
            description,
            cap_bits: DEFAULT_PRECISION_CAP,
            levels: Mutex::new(Vec::new()),
            peak: AtomicU32::new(0),
        }
    }

    /// The circle constant pi.
    pub fn pi() -> Self {
        Self::new(Kind::Pi, "pi".to_string())
    }

    /// Euler's number e.
    pub fn e() -> Self {
        Self::new(Kind::E, "e".to_string())
    }

    /// The natural logarithm of 2.
    pub fn ln2() -> Self {
        Self::new(Kind::Ln2, "ln2".to_string())
    }

    /// Alpha from an explicit integer part and fractional decimal digits.
    pub fn from_digits(int_part: BigInt, digits: &str) -> Result<Self> {
        let cleaned: Vec<u8> = digits
            .bytes()
            .filter(|b| !b.is_ascii_whitespace())
            .map(|b| {
                if b.is_ascii_digit() {
                    Ok(b - b'0')
                } else {
                    Err(Error::InvalidAlpha(format!(
                        "non-digit byte {:?} in fractional part",
                        b as char
                    )))
                }
            })
            .collect::<Result<_>>()?;
        if cleaned.is_empty() {
            return Err(Error::InvalidAlpha(
                "digit alpha needs at least one fractional digit".to_string(),
            ));
        }
        let description = format!("digits({}.{}...)", int_part, preview(&cleaned));
        Ok(Self::new(
            Kind::Digits {
                int_part,
                digits: cleaned,
            },
            description,
        ))
    }

    /// Alpha from a digit file: line 1 is the integer part in base 10, the
    /// remaining lines are the fractional digits (whitespace ignored).
    pub fn from_digit_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))?;
        let mut lines = text.lines();
        let first = lines
            .next()
            .ok_or_else(|| Error::InvalidAlpha("digit file is empty".to_string()))?;
        let int_part: BigInt = first
            .trim()
            .parse()
            .map_err(|_| Error::InvalidAlpha(format!("bad integer part {:?}", first.trim())))?;
        let rest: String = lines.collect::<Vec<_>>().join("");
        let mut p = Self::from_digits(int_part, &rest)?;
        p.description = format!("digits:{}", path.display());
        Ok(p)
    }

    /// Parses an alpha choice: `pi`, `e`, `ln2`, or `digits:PATH`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        match spec {
            "pi" => Ok(Self::pi()),
            "e" => Ok(Self::e()),
            "ln2" => Ok(Self::ln2()),
            other => {
                if let Some(path) = other.strip_prefix("digits:") {
                    Self::from_digit_file(Path::new(path))
                } else {
                    Err(Error::InvalidAlpha(format!(
                        "unknown alpha {:?} (expected pi, e, ln2, or digits:PATH)",
                        other
                    )))
                }
            }
        }
    }

    /// Replaces the hard precision cap (nominal bits).
    pub fn with_cap(mut self, cap_bits: u32) -> Self {
        self.cap_bits = cap_bits.max(BASE_BITS);
        self
    }

    /// Human-readable description of the constant.
    pub fn describe(&self) -> &str {
        &self.description
    }

    /// The hard precision cap, in nominal bits.
    pub fn cap_bits(&self) -> u32 {
        self.cap_bits
    }

    /// Highest nominal precision any query has settled at since the last
    /// [`AlphaProvider::reset_peak`].
    pub fn peak_bits(&self) -> u32 {
        self.peak.load(Ordering::SeqCst)
    }

    /// Resets the peak-precision meter.
    pub fn reset_peak(&self) {
        self.peak.store(0, Ordering::SeqCst);
    }

    /// Nominal bits of ladder level `j`.
    fn nominal_bits(j: u32) -> u32 {
        BASE_BITS.saturating_mul(1u32.checked_shl(j).unwrap_or(u32::MAX))
    }

    /// Fetches (computing and memoizing if needed) ladder level `j`.
    pub fn level(&self, j: u32) -> Result<Arc<LevelBounds>> {
        let nominal = Self::nominal_bits(j);
        if nominal > self.cap_bits {
            return Err(Error::PrecisionCap { cap: self.cap_bits });
        }
        {
            let levels = self.levels.lock().unwrap();
            if let Some(l) = levels.get(j as usize) {
                let l = Arc::clone(l);
                drop(levels);
                self.peak.fetch_max(nominal, Ordering::SeqCst);
                return Ok(l);
            }
        }
        // Levels are computed strictly in order so each is the canonical
        // intersection with its predecessor, independent of who computes it.
        let prev = if j == 0 {
            None
        } else {
            Some(self.level(j - 1)?)
        };
        let work = nominal + GUARD_BITS;
        let (mut lo, mut hi) = self.raw_bounds(work)?;
        if let Some(p) = prev {
            let shift = work - p.work_bits;
            let plo = &p.lo << shift;
            let phi = &p.hi << shift;
            if plo > lo {
                lo = plo;
            }
            if phi < hi {
                hi = phi;
            }
        }
        debug_assert!(lo < hi, "alpha interval collapsed at level {}", j);
        let data = Arc::new(LevelBounds {
            work_bits: work,
            lo,
            hi,
        });
        let mut levels = self.levels.lock().unwrap();
        if levels.len() == j as usize {
            levels.push(Arc::clone(&data));
        }
        let out = Arc::clone(&levels[j as usize]);
        drop(levels);
        self.peak.fetch_max(nominal, Ordering::SeqCst);
        Ok(out)
    }

    /// Walks the ladder, asking `query` at each level until it resolves.
    pub fn resolve<T>(&self, mut query: impl FnMut(&LevelBounds) -> Option<T>) -> Result<T> {
        let mut j = 0u32;
        loop {
            let level = self.level(j)?;
            if let Some(t) = query(&level) {
                return Ok(t);
            }
            j += 1;
        }
    }

    /// Fresh (un-intersected) strict bounds `lo/2^work < alpha < hi/2^work`.
    fn raw_bounds(&self, work: u32) -> Result<(BigInt, BigInt)> {
        let (value, err) = match &self.kind {
            Kind::Pi => pi_scaled(work),
            Kind::E => e_scaled(work),
            Kind::Ln2 => ln2_scaled(work),
            Kind::Digits { int_part, digits } => {
                return digit_bounds(int_part, digits, work);
            }
        };
        // Widen by one extra count so containment is strict.
        let slack = err + 1;
        Ok((&value - &slack, value + slack))
    }
}

fn preview(digits: &[u8]) -> String {
    digits.iter().take(8).map(|d| (d + b'0') as char).collect()
}

/// `arctan(1/m) * 2^work` by the alternating series, with an error count.
///
/// Every stored intermediate is a truncated division of a positive quantity,
/// so each term is off by fewer than 3 counts and the tail by fewer than 3;
/// the returned error bound over-counts as `3 * terms + 3`.
fn arctan_inv_scaled(m: u32, work: u32) -> (BigInt, BigInt) {
    let msq = BigInt::from(m) * BigInt::from(m);
    let mut x = (BigInt::from(1) << work) / BigInt::from(m);
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    let mut terms = 0u64;
    loop {
        let term = &x / BigInt::from(2 * k + 1);
        if term.is_zero() {
            break;
        }
        if k.is_multiple_of(2) {
            sum += &term;
        } else {
            sum -= &term;
        }
        terms += 1;
        x = &x / &msq;
        if x.is_zero() {
            break;
        }
        k += 1;
    }
    (sum, BigInt::from(3 * terms + 3))
}

/// `pi * 2^work` via `16*arctan(1/5) - 4*arctan(1/239)`, with error count.
fn pi_scaled(work: u32) -> (BigInt, BigInt) {
    let (a5, e5) = arctan_inv_scaled(5, work);
    let (a239, e239) = arctan_inv_scaled(239, work);
    (16 * a5 - 4 * a239, 16 * e5 + 4 * e239)
}

/// `e * 2^work` via the factorial series, with error count.
fn e_scaled(work: u32) -> (BigInt, BigInt) {
    let mut term = BigInt::from(1) << work;
    let mut sum = term.clone();
    let mut k = 1u64;
    let mut terms = 1u64;
    loop {
        term = &term / BigInt::from(k);
        if term.is_zero() {
            break;
        }
        sum += &term;
        terms += 1;
        k += 1;
    }
    (sum, BigInt::from(2 * terms + 2))
}

/// `ln2 * 2^work` via `sum_{k>=1} 1/(k*2^k)`, with error count.
fn ln2_scaled(work: u32) -> (BigInt, BigInt) {
    let mut sum = BigInt::zero();
    for k in 1..=(work as u64) {
        let term = (BigInt::from(1) << (work as u64 - k)) / BigInt::from(k);
        if term.is_zero() {
            break;
        }
        sum += term;
    }
    (sum, BigInt::from(work as u64 + 2))
}

/// Strict digit-file bounds at the given working precision.
fn digit_bounds(int_part: &BigInt, digits: &[u8], work: u32) -> Result<(BigInt, BigInt)> {
    // 2^-work needs about work * log10(2) decimal digits; take a margin.
    let needed = ((work as f64) * std::f64::consts::LOG10_2).ceil() as usize + 2;
    if digits.len() < needed {
        return Err(Error::DigitsExhausted {
            needed,
            available: digits.len(),
        });
    }
    let mut frac = BigInt::zero();
    for &d in &digits[..needed] {
        frac = frac * 10 + BigInt::from(d);
    }
    let ten_pow = BigInt::from(10).pow(needed as u32);
    let scaled = |n: &BigInt| -> BigInt { (n << work) / ten_pow.clone() };
    // alpha lies in [N/10^needed, (N+1)/10^needed]; widen a count on each
    // side so even a terminating decimal stays strictly interior.
    let n_lo = int_part * &ten_pow + &frac;
    let n_hi = &n_lo + 1;
    let lo: BigInt = scaled(&n_lo) - 1;
    let hi: BigInt = scaled(&n_hi) + 2;
    debug_assert!(lo < hi);
    Ok((lo, hi))
}
