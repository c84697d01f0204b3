//! Independent brute-force search over boxed assignments.
//!
//! This module decides systems by direct enumeration: every candidate in a
//! finite box is checked against the original constraints using the exact
//! evaluator. It shares no machinery with the decision procedure beyond the
//! semantic definition of the language, which makes it a useful
//! cross-validation oracle and a reference implementation for tests.
//!
//! A fast path screens candidates with `f64` arithmetic before falling back
//! to exact evaluation. The screen is sound: every floating-point quantity
//! carries a proven error margin, and any comparison that lands within its
//! margin is re-decided exactly. Candidates are enumerated in lexicographic
//! order over the box, and parallel scans chunk the index space in fixed
//! rounds so results are identical for any thread count.

use std::cmp::min;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::alpha::{self, AlphaPoly};
use crate::ctx::BeattyCtx;
use crate::error::Result;
use crate::rat::Rat;
use crate::syntax::{system_holds, Constraint, FracSum, System, Term};

/// Inclusive per-variable ranges defining the candidate space.
#[derive(Clone, Debug)]
pub struct SearchBox {
    ranges: Vec<(BigInt, BigInt)>,
}

impl SearchBox {
    /// Builds a box from inclusive `(lo, hi)` ranges, one per variable.
    ///
    /// # Panics
    ///
    /// Panics if any range has `lo > hi`.
    pub fn new(ranges: Vec<(BigInt, BigInt)>) -> SearchBox {
        for (lo, hi) in &ranges {
            assert!(lo <= hi, "search box range is empty: {lo} > {hi}");
        }
        SearchBox { ranges }
    }

    /// A symmetric cube `[lo, hi]^dims`.
    pub fn cube(dims: usize, lo: i64, hi: i64) -> SearchBox {
        SearchBox::new(vec![(BigInt::from(lo), BigInt::from(hi)); dims])
    }

    /// The ranges, one per variable.
    pub fn ranges(&self) -> &[(BigInt, BigInt)] {
        &self.ranges
    }

    /// Number of candidates (capped at `u128::MAX`).
    pub fn total(&self) -> u128 {
        let mut acc: u128 = 1;
        for (lo, hi) in &self.ranges {
            let w: BigInt = (hi - lo) + 1u32;
            match w.to_u128() {
                Some(w) => acc = acc.saturating_mul(w),
                None => return u128::MAX,
            }
        }
        acc
    }

    /// The candidate at a lexicographic index (first variable most
    /// significant).
    fn decode(&self, idx: u128) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.ranges.len()];
        let mut rem = idx;
        for (i, (lo, hi)) in self.ranges.iter().enumerate().rev() {
            let w: BigInt = (hi - lo) + 1u32;
            let w = w.to_u128().unwrap();
            let d = rem % w;
            rem /= w;
            out[i] = lo + BigInt::from(d);
        }
        out
    }

    /// i64 ranges when every bound fits.
    fn ranges_i64(&self) -> Option<Vec<(i64, i64)>> {
        self.ranges
            .iter()
            .map(|(lo, hi)| Some((lo.to_i64()?, hi.to_i64()?)))
            .collect()
    }
}

fn decode_i64(ranges: &[(i64, i64)], idx: u128) -> Vec<i64> {
    let mut out = vec![0i64; ranges.len()];
    let mut rem = idx;
    for (i, (lo, hi)) in ranges.iter().enumerate().rev() {
        let w = (*hi as i128 - *lo as i128 + 1) as u128;
        let d = (rem % w) as i64;
        rem /= w;
        out[i] = lo + d;
    }
    out
}

/// Outcome of a brute-force scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    /// Satisfying assignments in lexicographic order (full variable table),
    /// at most the requested limit.
    pub hits: Vec<Vec<BigInt>>,
    /// Candidates examined before the scan stopped.
    pub scanned: u128,
    /// True when the scan stopped at the hit limit with candidates left, so
    /// further hits may exist.
    pub truncated: bool,
}

// ---------------------------------------------------------------------------
// Sound floating-point screen
// ---------------------------------------------------------------------------

/// Smallest `f64` no smaller than a nonnegative rational.
fn rat_to_f64_ub(r: &Rat) -> f64 {
    debug_assert!(!r.is_negative());
    let mut u = r.to_f64().unwrap_or(f64::MAX);
    if !u.is_finite() {
        return f64::MAX;
    }
    if u < 0.0 {
        u = 0.0;
    }
    loop {
        match BigRational::from_float(u) {
            Some(ru) if ru >= *r => return u,
            _ => u = f64::from_bits(u.to_bits() + 1),
        }
    }
}

/// Precomputed constants for the floating-point screen.
struct FastAlpha {
    /// `f64` approximation of alpha.
    alpha: f64,
    /// Proven bound on `|alpha - self.alpha|`.
    eps: f64,
}

const P52: f64 = 1.0 / 4503599627370496.0; // 2^-52

impl FastAlpha {
    fn new(ctx: &BeattyCtx) -> Result<FastAlpha> {
        let (lo, hi) = alpha::poly_bounds(&ctx.alpha, &AlphaPoly::alpha_pow(1), 0)?;
        let a = ((&lo + &hi) / Rat::from_integer(BigInt::from(2)))
            .to_f64()
            .unwrap_or(0.0);
        if !a.is_finite() || a <= 0.0 {
            // Degenerate approximation: disable the screen via a huge margin.
            return Ok(FastAlpha {
                alpha: 1.0,
                eps: f64::MAX,
            });
        }
        let ar = BigRational::from_float(a).unwrap();
        let d1 = (&ar - &lo).abs();
        let d2 = (&hi - &ar).abs();
        let eps = rat_to_f64_ub(&d1.max(d2));
        Ok(FastAlpha { alpha: a, eps })
    }

    /// `floor(alpha * x)` when the margin leaves no doubt.
    fn floor_mul(&self, x: i128) -> Option<i128> {
        if x == 0 {
            return Some(0);
        }
        if x.unsigned_abs() > (1 << 44) {
            return None;
        }
        let xf = x as f64; // exact: |x| <= 2^44
        let y = self.alpha * xf;
        let margin = 2.0 * (self.eps * xf.abs() + y.abs() * P52) + 1e-12;
        let lo = (y - margin).floor();
        let hi = (y + margin).floor();
        if lo == hi && lo.abs() < 9.0e18 {
            Some(lo as i128)
        } else {
            None
        }
    }

    /// Iterated floor application.
    fn floor_pow(&self, x: i128, pow: u32) -> Option<i128> {
        let mut v = x;
        for _ in 0..pow {
            v = self.floor_mul(v)?;
        }
        Some(v)
    }

    /// Sign of `alpha*a + b` as "negative?", when determined.
    fn comb_is_negative(&self, a: i128, b: i128) -> Option<bool> {
        if a == 0 {
            return Some(b < 0);
        }
        if a.unsigned_abs() > (1 << 50) || b.unsigned_abs() > (1 << 50) {
            return None;
        }
        let af = a as f64;
        let bf = b as f64;
        let ya = self.alpha * af;
        let y = ya + bf;
        let margin = 2.0 * (self.eps * af.abs() + (ya.abs() + y.abs()) * P52) + 1e-12;
        if y < -margin {
            Some(true)
        } else if y > margin {
            Some(false)
        } else {
            None
        }
    }
}

/// Screen-friendly compiled view of a system.
struct FastSys<'a> {
    sys: &'a System,
    alpha: FastAlpha,
}

impl<'a> FastSys<'a> {
    /// Compiles when all literal coefficients are screen-sized.
    fn compile(ctx: &BeattyCtx, sys: &'a System) -> Result<Option<FastSys<'a>>> {
        fn term_ok(t: &Term) -> bool {
            match t {
                Term::Int(n) => n.to_i64().is_some(),
                Term::Var(_) => true,
                Term::Add(ts) => ts.iter().all(term_ok),
                Term::Mul(n, inner) => n.to_i64().is_some() && term_ok(inner),
                Term::F { pow, arg } => *pow <= 16 && term_ok(arg),
            }
        }
        fn fracsum_ok(fs: &FracSum) -> bool {
            fs.konst.to_i64().is_some()
                && fs
                    .terms
                    .iter()
                    .all(|(n, t)| n.to_i64().is_some() && term_ok(t))
        }
        let ok = sys.constraints.iter().all(|c| match c {
            Constraint::Eq(a, b) => term_ok(a) && term_ok(b),
            Constraint::Cong(a, b, m) => term_ok(a) && term_ok(b) && m.to_i64().is_some(),
            Constraint::FracLt(a, b) => fracsum_ok(a) && fracsum_ok(b),
        });
        if !ok {
            return Ok(None);
        }
        Ok(Some(FastSys {
            sys,
            alpha: FastAlpha::new(ctx)?,
        }))
    }

    fn eval_term(&self, env: &[i64], t: &Term) -> Option<i128> {
        match t {
            Term::Int(n) => n.to_i128(),
            Term::Var(v) => Some(env[*v] as i128),
            Term::Add(ts) => {
                let mut acc = 0i128;
                for t in ts {
                    acc = acc.checked_add(self.eval_term(env, t)?)?;
                }
                Some(acc)
            }
            Term::Mul(n, inner) => n.to_i128()?.checked_mul(self.eval_term(env, inner)?),
            Term::F { pow, arg } => self.alpha.floor_pow(self.eval_term(env, arg)?, *pow),
        }
    }

    /// `(A, B)` with the fractional sum equal to `alpha*A + B`.
    fn fracsum_parts(&self, env: &[i64], fs: &FracSum) -> Option<(i128, i128)> {
        let mut a = 0i128;
        let mut b = fs.konst.to_i128()?;
        for (n, t) in &fs.terms {
            let n = n.to_i128()?;
            let tv = self.eval_term(env, t)?;
            let ft = self.alpha.floor_mul(tv)?;
            a = a.checked_add(n.checked_mul(tv)?)?;
            b = b.checked_sub(n.checked_mul(ft)?)?;
        }
        Some((a, b))
    }

    fn constraint_holds(&self, env: &[i64], c: &Constraint) -> Option<bool> {
        match c {
            Constraint::Eq(l, r) => Some(self.eval_term(env, l)? == self.eval_term(env, r)?),
            Constraint::Cong(l, r, m) => {
                let d = self.eval_term(env, l)? - self.eval_term(env, r)?;
                Some(d.rem_euclid(m.to_i128()?) == 0)
            }
            Constraint::FracLt(l, r) => {
                let (la, lb) = self.fracsum_parts(env, l)?;
                let (ra, rb) = self.fracsum_parts(env, r)?;
                self.alpha
                    .comb_is_negative(la.checked_sub(ra)?, lb.checked_sub(rb)?)
            }
        }
    }

    /// Definite verdict for a candidate, or `None` when anything was left
    /// undecided by the screen.
    fn check(&self, env: &[i64]) -> Option<bool> {
        let mut ambiguous = false;
        for c in &self.sys.constraints {
            match self.constraint_holds(env, c) {
                Some(true) => {}
                Some(false) => return Some(false),
                None => ambiguous = true,
            }
        }
        if ambiguous {
            None
        } else {
            Some(true)
        }
    }
}

// ---------------------------------------------------------------------------
// Scanning
// ---------------------------------------------------------------------------

const CHUNK: u128 = 4096;

/// Exact check of one assignment against the original system.
pub fn brute_check(ctx: &BeattyCtx, sys: &System, env: &[BigInt]) -> Result<bool> {
    system_holds(ctx, sys, env)
}

/// Scans the box in lexicographic order and returns up to `limit` satisfying
/// assignments. Results are independent of the configured thread count.
pub fn brute_solve(
    ctx: &BeattyCtx,
    sys: &System,
    bx: &SearchBox,
    limit: usize,
) -> Result<OracleReport> {
    brute_solve_inner(ctx, sys, bx, limit, false)
}

/// Like [`brute_solve`] but with the floating-point screen disabled; every
/// candidate is decided by the exact evaluator. Used to validate the screen.
pub fn brute_solve_exact(
    ctx: &BeattyCtx,
    sys: &System,
    bx: &SearchBox,
    limit: usize,
) -> Result<OracleReport> {
    brute_solve_inner(ctx, sys, bx, limit, true)
}

fn brute_solve_inner(
    ctx: &BeattyCtx,
    sys: &System,
    bx: &SearchBox,
    limit: usize,
    force_exact: bool,
) -> Result<OracleReport> {
    assert_eq!(
        bx.ranges.len(),
        sys.vars.len(),
        "search box dimension must match the variable count"
    );
    let total = bx.total();
    let threads = ctx.cfg.threads.max(1) as u128;
    let fast = if force_exact {
        None
    } else {
        match (FastSys::compile(ctx, sys)?, bx.ranges_i64()) {
            (Some(fs), Some(ranges)) => Some((fs, ranges)),
            _ => None,
        }
    };

    let mut hits: Vec<Vec<BigInt>> = Vec::new();
    let mut idx: u128 = 0;
    while idx < total {
        let round_end = min(total, idx + CHUNK * threads);
        let mut spans = Vec::new();
        let mut s = idx;
        while s < round_end {
            let e = min(round_end, s + CHUNK);
            spans.push((s, e));
            s = e;
        }
        let results: Vec<Result<Vec<Vec<BigInt>>>> = if spans.len() == 1 {
            vec![scan_span(ctx, sys, bx, &fast, spans[0].0, spans[0].1)]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = spans
                    .iter()
                    .map(|&(s, e)| {
                        let fast = &fast;
                        scope.spawn(move || scan_span(ctx, sys, bx, fast, s, e))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().unwrap()).collect()
            })
        };
        for r in results {
            hits.extend(r?);
        }
        idx = round_end;
        if hits.len() >= limit {
            break;
        }
    }
    let truncated = hits.len() > limit || (idx < total && hits.len() >= limit);
    hits.truncate(limit);
    Ok(OracleReport {
        hits,
        scanned: idx,
        truncated,
    })
}

fn scan_span(
    ctx: &BeattyCtx,
    sys: &System,
    bx: &SearchBox,
    fast: &Option<(FastSys<'_>, Vec<(i64, i64)>)>,
    start: u128,
    end: u128,
) -> Result<Vec<Vec<BigInt>>> {
    let mut out = Vec::new();
    for i in start..end {
        if let Some((fs, ranges)) = fast {
            let env = decode_i64(ranges, i);
            match fs.check(&env) {
                Some(false) => continue,
                Some(true) => {
                    out.push(env.iter().map(|&v| BigInt::from(v)).collect());
                    continue;
                }
                None => {}
            }
        }
        let env = bx.decode(i);
        if system_holds(ctx, sys, &env)? {
            out.push(env);
        }
    }
    Ok(out)
}
