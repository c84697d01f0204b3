//! Relaxation engine for purely fractional systems.
//!
//! A system whose atoms only constrain chain decimals `{alpha f^p(x)}` is
//! decided in two moves:
//!
//! 1. **Exact Fourier–Motzkin elimination** over the decimals, treated as
//!    real unknowns in the unit box. Coefficients are rational and right-hand
//!    sides are polynomials in alpha, so every comparison is exact. An
//!    infeasible elimination yields a residual constant inequality together
//!    with the original atoms that combine to it — a checkable unsatisfiability
//!    certificate. Infeasibility of the open relaxation implies infeasibility
//!    of the closed one here (every atom is a strict open half-space, so any
//!    closed-box point can be nudged inward), hence an exact "unsat".
//! 2. **Density search.** If the relaxation is feasible, back-substitution
//!    produces a strictly interior rational-in-alpha sample. Shrinking the
//!    minimum slack into per-decimal target windows reduces witness finding
//!    to hitting those windows simultaneously, which the equidistribution of
//!    the chain decimals guarantees is possible; the search tries integers in
//!    a fixed order with exact membership tests and gives up honestly when
//!    the budget runs out.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::alpha::{self, AlphaPoly, AlphaProvider};
use crate::ctx::BeattyCtx;
use crate::error::Result;
use crate::rat::{rat_frac, rat_i, Rat};
use crate::syntax::{FracAtom, VarId};

// ---------------------------------------------------------------------------
// Fourier–Motzkin over an ordered key type
// ---------------------------------------------------------------------------

/// One linear inequality `sum coeffs[k] * x_k  <  rhs` (or `<=` when not
/// strict) with provenance into the caller's original row list.
#[derive(Clone, Debug)]
pub struct FmIneq<K: Ord> {
    /// Rational coefficients; absent keys are zero.
    pub coeffs: BTreeMap<K, Rat>,
    /// Exact right-hand side.
    pub rhs: AlphaPoly,
    /// Strict (`<`) versus nonstrict (`<=`).
    pub strict: bool,
    /// Indices of the original rows this one was combined from.
    pub parents: Vec<usize>,
}

impl<K: Ord + Clone> FmIneq<K> {
    /// A fresh row with itself as provenance.
    pub fn original(index: usize, coeffs: BTreeMap<K, Rat>, rhs: AlphaPoly, strict: bool) -> Self {
        FmIneq {
            coeffs,
            rhs,
            strict,
            parents: vec![index],
        }
    }
}

/// Result of an elimination run.
#[derive(Clone, Debug)]
pub enum FmOutcome<K: Ord> {
    /// A point satisfying every row, as exact polynomials in alpha.
    Feasible(BTreeMap<K, AlphaPoly>),
    /// A derived constant row that fails: `0 < rhs` (or `0 <= rhs`) with
    /// `rhs` nonpositive (or negative), traced to the original rows.
    Infeasible {
        /// Right-hand side of the failing constant row.
        residual: AlphaPoly,
        /// Whether the failing row was strict.
        strict: bool,
        /// Original rows whose combination produced it.
        parents: Vec<usize>,
    },
}

fn merge_parents(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Splits constant rows off, erroring out on a violated one.
fn sweep_constants<K: Ord + Clone>(
    provider: &AlphaProvider,
    rows: Vec<FmIneq<K>>,
) -> Result<std::result::Result<Vec<FmIneq<K>>, FmOutcome<K>>> {
    let mut live = Vec::new();
    for row in rows {
        if row.coeffs.is_empty() {
            let sign = alpha::poly_sign(provider, &row.rhs)?;
            let holds = if row.strict { sign > 0 } else { sign >= 0 };
            if !holds {
                return Ok(Err(FmOutcome::Infeasible {
                    residual: row.rhs,
                    strict: row.strict,
                    parents: row.parents,
                }));
            }
        } else {
            live.push(row);
        }
    }
    Ok(Ok(live))
}

/// Decides a conjunction of linear inequalities by eliminating keys in
/// ascending order, then reconstructs a sample point by reverse midpoint
/// back-substitution. Fully deterministic.
pub fn fm_solve<K: Ord + Clone>(
    provider: &AlphaProvider,
    rows: Vec<FmIneq<K>>,
) -> Result<FmOutcome<K>> {
    let keys: BTreeSet<K> = rows.iter().flat_map(|r| r.coeffs.keys().cloned()).collect();
    let mut current = match sweep_constants(provider, rows)? {
        Ok(live) => live,
        Err(out) => return Ok(out),
    };
    let mut stages: Vec<(K, Vec<FmIneq<K>>)> = Vec::new();
    for key in &keys {
        let (with, without): (Vec<_>, Vec<_>) = current
            .into_iter()
            .partition(|r| r.coeffs.contains_key(key));
        let mut next = without;
        for lower in with.iter().filter(|r| r.coeffs[key].is_negative()) {
            for upper in with.iter().filter(|r| r.coeffs[key].is_positive()) {
                let ll = lower.coeffs[key].clone().recip(); // negative
                let lu = upper.coeffs[key].clone().recip(); // positive
                                                            // Scale lower by -ll > 0 and upper by lu > 0, then add: the
                                                            // key cancels by construction.
                let mut coeffs: BTreeMap<K, Rat> = BTreeMap::new();
                for (k, c) in &lower.coeffs {
                    if k != key {
                        coeffs.insert(k.clone(), c * (-&ll));
                    }
                }
                for (k, c) in &upper.coeffs {
                    if k == key {
                        continue;
                    }
                    let add = c * &lu;
                    let slot = coeffs.entry(k.clone()).or_insert_with(Rat::zero);
                    *slot += add;
                }
                coeffs.retain(|_, c| !c.is_zero());
                let rhs = lower.rhs.scale(&-&ll).add(&upper.rhs.scale(&lu));
                next.push(FmIneq {
                    coeffs,
                    rhs,
                    strict: lower.strict || upper.strict,
                    parents: merge_parents(&lower.parents, &upper.parents),
                });
            }
        }
        stages.push((key.clone(), with));
        current = match sweep_constants(provider, next)? {
            Ok(live) => live,
            Err(out) => return Ok(out),
        };
    }
    debug_assert!(current.is_empty(), "rows without keys survive elimination");

    // Reverse midpoint back-substitution.
    let mut sample: BTreeMap<K, AlphaPoly> = BTreeMap::new();
    let half = rat_frac(1, 2);
    for (key, rows) in stages.iter().rev() {
        let mut lo: Option<AlphaPoly> = None;
        let mut hi: Option<AlphaPoly> = None;
        for row in rows {
            let ck = &row.coeffs[key];
            let mut rest = row.rhs.clone();
            for (k, c) in &row.coeffs {
                if k == key {
                    continue;
                }
                rest = rest.sub(&sample[k].scale(c));
            }
            let bound = rest.scale(&ck.clone().recip());
            if ck.is_positive() {
                hi = Some(match hi {
                    None => bound,
                    Some(h) => {
                        if alpha::poly_sign(provider, &bound.sub(&h))? < 0 {
                            bound
                        } else {
                            h
                        }
                    }
                });
            } else {
                lo = Some(match lo {
                    None => bound,
                    Some(l) => {
                        if alpha::poly_sign(provider, &bound.sub(&l))? > 0 {
                            bound
                        } else {
                            l
                        }
                    }
                });
            }
        }
        let one = AlphaPoly::one();
        let value = match (lo, hi) {
            (Some(l), Some(h)) => l.add(&h).scale(&half),
            (Some(l), None) => l.add(&one),
            (None, Some(h)) => h.sub(&one),
            (None, None) => AlphaPoly::zero(),
        };
        sample.insert(key.clone(), value);
    }
    Ok(FmOutcome::Feasible(sample))
}

// ---------------------------------------------------------------------------
// Decimal windows and the integer search
// ---------------------------------------------------------------------------

/// An open rational window that the chain decimal at one level must hit.
#[derive(Clone, Debug)]
pub struct DecimalWindow {
    /// Chain level: the decimal constrained is `{alpha f^level(n)}`.
    pub level: u32,
    /// Open lower endpoint.
    pub lo: Rat,
    /// Open upper endpoint.
    pub hi: Rat,
}

/// Searches for an integer whose chain decimals land in all the given
/// windows simultaneously, trying `1..=budget` then `-1..=-budget`. Every
/// membership test is exact; the result is independent of the thread count.
pub fn kronecker_search(
    ctx: &BeattyCtx,
    windows: &[DecimalWindow],
    budget: u64,
) -> Result<Option<BigInt>> {
    if windows.is_empty() {
        return Ok(Some(BigInt::one()));
    }
    let total = 2u128 * budget as u128;
    let threads = ctx.cfg.threads.max(1) as u128;
    const CHUNK: u128 = 512;
    let lo_polys: Vec<AlphaPoly> = windows
        .iter()
        .map(|w| AlphaPoly::from_rat(w.lo.clone()))
        .collect();
    let hi_polys: Vec<AlphaPoly> = windows
        .iter()
        .map(|w| AlphaPoly::from_rat(w.hi.clone()))
        .collect();

    let probe = |rank: u128| -> Result<Option<BigInt>> {
        let n = rank_to_candidate(rank, budget);
        for (i, w) in windows.iter().enumerate() {
            let d = ctx.frac_chain_poly(&n, w.level)?;
            if alpha::poly_sign(&ctx.alpha, &d.sub(&lo_polys[i]))? <= 0 {
                return Ok(None);
            }
            if alpha::poly_sign(&ctx.alpha, &hi_polys[i].sub(&d))? <= 0 {
                return Ok(None);
            }
        }
        Ok(Some(n))
    };

    let mut idx: u128 = 0;
    while idx < total {
        let round_end = total.min(idx + CHUNK * threads);
        let mut spans = Vec::new();
        let mut s = idx;
        while s < round_end {
            let e = round_end.min(s + CHUNK);
            spans.push((s, e));
            s = e;
        }
        let scan = |(s, e): (u128, u128)| -> Result<Option<BigInt>> {
            for r in s..e {
                if let Some(n) = probe(r)? {
                    return Ok(Some(n));
                }
            }
            Ok(None)
        };
        let results: Vec<Result<Option<BigInt>>> = if spans.len() == 1 {
            vec![scan(spans[0])]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = spans
                    .iter()
                    .map(|&span| scope.spawn(move || scan(span)))
                    .collect();
                handles.into_iter().map(|h| h.join().unwrap()).collect()
            })
        };
        for r in results {
            if let Some(n) = r? {
                return Ok(Some(n));
            }
        }
        idx = round_end;
    }
    Ok(None)
}

fn rank_to_candidate(rank: u128, budget: u64) -> BigInt {
    if rank < budget as u128 {
        BigInt::from(rank as u64 + 1)
    } else {
        -BigInt::from((rank - budget as u128) as u64 + 1)
    }
}

// ---------------------------------------------------------------------------
// The purely fractional solver
// ---------------------------------------------------------------------------

/// Verdict on a conjunction of fractional atoms.
#[derive(Clone, Debug)]
pub enum NonalgOutcome {
    /// Values for every variable that occurs in the atoms.
    Witness(BTreeMap<VarId, BigInt>),
    /// The relaxation is infeasible; the lines form a certificate.
    Infeasible {
        /// Human-readable derivation: the residual inequality and the atoms
        /// that combine to it.
        certificate: Vec<String>,
        /// The residual polynomial whose sign refutes the system: the
        /// elimination derived `0 < residual` (or `0 <= residual`) while the
        /// residual is in fact nonpositive (negative). Re-checking this one
        /// sign certifies the refutation.
        residual: AlphaPoly,
    },
    /// The relaxation is feasible but no witness surfaced within budget.
    BudgetExhausted,
}

fn decimal_name(vars: &[String], var: VarId, level: u32) -> String {
    match level {
        0 => format!("frac({})", vars[var]),
        1 => format!("frac(f({}))", vars[var]),
        p => format!("frac(f^{}({}))", p, vars[var]),
    }
}

/// Renders an atom `sum n*frac(f^p(x)) < rhs` for certificates.
pub fn render_atom(vars: &[String], atom: &FracAtom) -> String {
    let mut out = String::new();
    for ((var, level), n) in &atom.terms {
        let name = decimal_name(vars, *var, *level);
        let piece = if n.is_one() {
            name
        } else if (-n).is_one() {
            format!("-{}", name)
        } else {
            format!("{}*{}", n, name)
        };
        if out.is_empty() {
            out = piece;
        } else if let Some(rest) = piece.strip_prefix('-') {
            out = format!("{} - {}", out, rest);
        } else {
            out = format!("{} + {}", out, piece);
        }
    }
    if out.is_empty() {
        out = "0".to_string();
    }
    format!("{} < {}", out, atom.rhs)
}

type DecKey = (VarId, u32);

fn build_rows(atoms: &[FracAtom], strict_lower: bool) -> Vec<FmIneq<DecKey>> {
    let mut rows: Vec<FmIneq<DecKey>> = Vec::new();
    let mut keys: BTreeSet<DecKey> = BTreeSet::new();
    for (i, atom) in atoms.iter().enumerate() {
        let coeffs: BTreeMap<DecKey, Rat> = atom
            .terms
            .iter()
            .map(|(k, n)| (*k, Rat::from_integer(n.clone())))
            .collect();
        keys.extend(coeffs.keys().copied());
        rows.push(FmIneq::original(i, coeffs, atom.rhs.clone(), true));
    }
    let mut next_index = atoms.len();
    for key in keys {
        // Lower bound 0 <= d (or 0 < d), encoded as -d <(=) 0.
        let mut lo = BTreeMap::new();
        lo.insert(key, -Rat::one());
        rows.push(FmIneq::original(
            next_index,
            lo,
            AlphaPoly::zero(),
            strict_lower,
        ));
        // Upper bound d < 1: no decimal reaches 1.
        let mut hi = BTreeMap::new();
        hi.insert(key, Rat::one());
        rows.push(FmIneq::original(next_index + 1, hi, AlphaPoly::one(), true));
        next_index += 2;
    }
    rows
}

fn describe_parent(vars: &[String], atoms: &[FracAtom], index: usize) -> String {
    if index < atoms.len() {
        return render_atom(vars, &atoms[index]);
    }
    // Box rows come in (lower, upper) pairs after the atoms, ordered by key.
    let keys: BTreeSet<DecKey> = atoms.iter().flat_map(|a| a.terms.keys().copied()).collect();
    let pos = index - atoms.len();
    let key = keys.iter().nth(pos / 2).copied();
    match key {
        Some((var, level)) => {
            let name = decimal_name(vars, var, level);
            if pos.is_multiple_of(2) {
                format!("0 <= {}", name)
            } else {
                format!("{} < 1", name)
            }
        }
        None => "unit interval bound".to_string(),
    }
}

/// Refines until the exact value is bracketed by rationals at most `width`
/// apart, then returns the midpoint.
fn rational_near(provider: &AlphaProvider, value: &AlphaPoly, width: &Rat) -> Result<Rat> {
    let mut level = 0;
    loop {
        let (lo, hi) = alpha::poly_bounds(provider, value, level)?;
        if &(&hi - &lo) < width {
            return Ok((lo + hi) / rat_i(2));
        }
        level += 1;
    }
}

/// Positive rational lower bound of a (positive) value.
fn positive_lower_bound(provider: &AlphaProvider, value: &AlphaPoly) -> Result<Rat> {
    let mut level = 0;
    loop {
        let (lo, _) = alpha::poly_bounds(provider, value, level)?;
        if lo.is_positive() {
            return Ok(lo);
        }
        level += 1;
    }
}

/// Exact check of one atom at concrete variable values.
fn atom_holds(ctx: &BeattyCtx, atom: &FracAtom, env: &BTreeMap<VarId, BigInt>) -> Result<bool> {
    let mut lhs = AlphaPoly::zero();
    for ((var, level), n) in &atom.terms {
        let d = ctx.frac_chain_poly(&env[var], *level)?;
        lhs = lhs.add(&d.scale(&Rat::from_integer(n.clone())));
    }
    Ok(alpha::poly_sign(&ctx.alpha, &lhs.sub(&atom.rhs))? < 0)
}

/// Renders the human-readable refutation for an elimination that ended
/// infeasible, preferring the closed-bound re-derivation so the cited
/// residual never depends on a phantom strict bound.
fn infeasibility_certificate(
    ctx: &BeattyCtx,
    vars: &[String],
    atoms: &[FracAtom],
    strict: FmOutcome<(VarId, u32)>,
) -> Result<(Vec<String>, AlphaPoly)> {
    let closed = fm_solve(&ctx.alpha, build_rows(atoms, false))?;
    let (residual, strict_row, parents) = match closed {
        FmOutcome::Infeasible {
            residual,
            strict,
            parents,
        } => (residual, strict, parents),
        FmOutcome::Feasible(_) => match strict {
            FmOutcome::Infeasible {
                residual,
                strict,
                parents,
            } => (residual, strict, parents),
            FmOutcome::Feasible(_) => unreachable!("caller established infeasibility"),
        },
    };
    let rel = if strict_row { "<" } else { "<=" };
    let mut certificate = vec![format!(
        "combining the constraints below requires 0 {} {}, which fails",
        rel, residual
    )];
    for p in &parents {
        certificate.push(format!("  uses: {}", describe_parent(vars, atoms, *p)));
    }
    Ok((certificate, residual))
}

/// Fast infeasibility test for a conjunction of fractional atoms: runs only
/// the elimination, never the witness search. Returns the certificate and
/// the refuting residual when the atoms are contradictory, `None` when the
/// relaxation has a sample (which says nothing about integer witnesses).
pub fn fracs_infeasible(
    ctx: &BeattyCtx,
    vars: &[String],
    atoms: &[FracAtom],
) -> Result<Option<(Vec<String>, AlphaPoly)>> {
    if atoms.is_empty() {
        return Ok(None);
    }
    let strict = fm_solve(&ctx.alpha, build_rows(atoms, true))?;
    if matches!(strict, FmOutcome::Feasible(_)) {
        return Ok(None);
    }
    infeasibility_certificate(ctx, vars, atoms, strict).map(Some)
}

/// Decides a conjunction of fractional atoms: exact unsatisfiability via
/// elimination, or a witness via the density search, or an honest budget
/// verdict. `vars` is only used to render certificates.
pub fn solve_nonalg(ctx: &BeattyCtx, vars: &[String], atoms: &[FracAtom]) -> Result<NonalgOutcome> {
    if atoms.is_empty() {
        return Ok(NonalgOutcome::Witness(BTreeMap::new()));
    }
    // One strict run decides everything: every atom is an open condition, so
    // a closed-box point perturbs to an interior one and strict infeasibility
    // already implies there is no witness. The certificate is re-derived with
    // the closed lower bounds so it never cites a phantom strict bound.
    let strict = fm_solve(&ctx.alpha, build_rows(atoms, true))?;
    let sample = match strict {
        FmOutcome::Feasible(sample) => sample,
        FmOutcome::Infeasible { .. } => {
            let (certificate, residual) = infeasibility_certificate(ctx, vars, atoms, strict)?;
            return Ok(NonalgOutcome::Infeasible {
                certificate,
                residual,
            });
        }
    };

    // Minimum slack over all strict rows at the sample, scaled by each row's
    // coefficient 1-norm: moving every decimal by less than half of it keeps
    // every row satisfied.
    let rows = build_rows(atoms, true);
    let mut delta: Option<AlphaPoly> = None;
    for row in &rows {
        let mut value = AlphaPoly::zero();
        for (k, c) in &row.coeffs {
            value = value.add(&sample[k].scale(c));
        }
        let slack = row.rhs.sub(&value);
        let norm: Rat = row
            .coeffs
            .values()
            .fold(Rat::zero(), |acc, c| acc + c.abs());
        let norm = if norm < Rat::one() { Rat::one() } else { norm };
        let scaled = slack.scale(&norm.recip());
        delta = Some(match delta {
            None => scaled,
            Some(d) => {
                if alpha::poly_sign(&ctx.alpha, &scaled.sub(&d))? < 0 {
                    scaled
                } else {
                    d
                }
            }
        });
    }
    let delta = delta.expect("nonempty atom list yields rows");
    debug_assert!(alpha::poly_sign(&ctx.alpha, &delta)? > 0);
    let delta_lb = positive_lower_bound(&ctx.alpha, &delta)?;

    // Per-variable windows, retried with narrower windows if the exact final
    // check were ever to fail (it cannot, by the slack argument; the retry
    // keeps the engine self-correcting).
    let mut halfwidth = &delta_lb / rat_i(4);
    for _attempt in 0..3 {
        let mut per_var: BTreeMap<VarId, Vec<DecimalWindow>> = BTreeMap::new();
        for (key, value) in &sample {
            let center = rational_near(&ctx.alpha, value, &(&delta_lb / rat_i(8)))?;
            per_var.entry(key.0).or_default().push(DecimalWindow {
                level: key.1,
                lo: &center - &halfwidth,
                hi: &center + &halfwidth,
            });
        }
        let mut witness: BTreeMap<VarId, BigInt> = BTreeMap::new();
        let mut all_found = true;
        for (var, windows) in &per_var {
            match kronecker_search(ctx, windows, ctx.cfg.budget)? {
                Some(n) => {
                    witness.insert(*var, n);
                }
                None => {
                    all_found = false;
                    break;
                }
            }
        }
        if !all_found {
            return Ok(NonalgOutcome::BudgetExhausted);
        }
        let mut verified = true;
        for atom in atoms {
            if !atom_holds(ctx, atom, &witness)? {
                verified = false;
                break;
            }
        }
        if verified {
            return Ok(NonalgOutcome::Witness(witness));
        }
        halfwidth /= rat_i(2);
    }
    Ok(NonalgOutcome::BudgetExhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctx::BeattyCtx;
    use crate::rat::rat_big;

    fn atom(terms: Vec<((VarId, u32), i64)>, rhs: AlphaPoly) -> FracAtom {
        FracAtom {
            terms: terms
                .into_iter()
                .map(|(k, n)| (k, BigInt::from(n)))
                .collect(),
            rhs,
        }
    }

    fn alpha_minus(k: i64) -> AlphaPoly {
        AlphaPoly::alpha_pow(1).sub(&AlphaPoly::from_int(&BigInt::from(k)))
    }

    #[test]
    fn contradictory_window_yields_certificate_with_residual() {
        // frac(z) < alpha - 3 and frac(z) > 4 - alpha cannot both hold: their
        // combination demands 0 < 2*alpha - 7, which is false.
        let ctx = BeattyCtx::pi_default();
        let atoms = vec![
            atom(vec![((0, 0), 1)], alpha_minus(3)),
            atom(vec![((0, 0), -1)], alpha_minus(4)),
        ];
        match solve_nonalg(&ctx, &["z".to_string()], &atoms).unwrap() {
            NonalgOutcome::Infeasible { certificate, .. } => {
                assert!(
                    certificate.iter().any(|l| l.contains("2*alpha - 7")),
                    "certificate must show the residual: {certificate:?}"
                );
                assert!(certificate.len() >= 3, "residual plus two atoms");
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn single_window_finds_exact_witness() {
        let ctx = BeattyCtx::pi_default();
        let atoms = vec![atom(vec![((0, 0), 1)], alpha_minus(3))];
        match solve_nonalg(&ctx, &["x".to_string()], &atoms).unwrap() {
            NonalgOutcome::Witness(w) => {
                let n = &w[&0];
                assert!(atom_holds(&ctx, &atoms[0], &w).unwrap());
                assert!(!n.is_zero());
                // Determinism: a second run returns the same witness.
                match solve_nonalg(&ctx, &["x".to_string()], &atoms).unwrap() {
                    NonalgOutcome::Witness(w2) => assert_eq!(w, w2),
                    other => panic!("{other:?}"),
                }
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn coupled_levels_of_one_variable_are_hit_together() {
        // frac(x) < 1/4 and frac(f(x)) > 1/2 simultaneously.
        let ctx = BeattyCtx::pi_default();
        let atoms = vec![
            atom(vec![((0, 0), 1)], AlphaPoly::from_rat(rat_frac(1, 4))),
            atom(vec![((0, 1), -1)], AlphaPoly::from_rat(rat_frac(-1, 2))),
        ];
        match solve_nonalg(&ctx, &["x".to_string()], &atoms).unwrap() {
            NonalgOutcome::Witness(w) => {
                for a in &atoms {
                    assert!(atom_holds(&ctx, a, &w).unwrap());
                }
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn two_variables_search_independently() {
        // frac(x) + 2*frac(y) < 1/2.
        let ctx = BeattyCtx::pi_default();
        let atoms = vec![atom(
            vec![((0, 0), 1), ((1, 0), 2)],
            AlphaPoly::from_rat(rat_frac(1, 2)),
        )];
        match solve_nonalg(&ctx, &["x".to_string(), "y".to_string()], &atoms).unwrap() {
            NonalgOutcome::Witness(w) => {
                assert!(w.contains_key(&0) && w.contains_key(&1));
                assert!(atom_holds(&ctx, &atoms[0], &w).unwrap());
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn out_of_box_demands_are_infeasible() {
        // frac(x) > 2 contradicts frac(x) < 1.
        let ctx = BeattyCtx::pi_default();
        let atoms = vec![atom(
            vec![((0, 0), -1)],
            AlphaPoly::from_int(&BigInt::from(-2)),
        )];
        match solve_nonalg(&ctx, &["x".to_string()], &atoms).unwrap() {
            NonalgOutcome::Infeasible { certificate, .. } => {
                assert!(certificate.iter().any(|l| l.contains("frac(x) < 1")));
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn kronecker_search_respects_order_and_exactness() {
        // The first positive hit must be returned: {alpha n} < 0.15 first
        // happens at n = 1 for the circle constant (value alpha - 3).
        let ctx = BeattyCtx::pi_default();
        let windows = vec![DecimalWindow {
            level: 0,
            lo: rat_frac(1, 10),
            hi: rat_frac(3, 20),
        }];
        let hit = kronecker_search(&ctx, &windows, 1000).unwrap();
        assert_eq!(hit, Some(BigInt::one()));
        // An empty window never matches.
        let empty = vec![DecimalWindow {
            level: 0,
            lo: rat_frac(1, 2),
            hi: rat_frac(1, 2),
        }];
        assert_eq!(kronecker_search(&ctx, &empty, 50).unwrap(), None);
    }

    #[test]
    fn fm_certificate_parents_point_at_the_combining_rows() {
        let ctx = BeattyCtx::pi_default();
        let mut c0 = BTreeMap::new();
        c0.insert(0usize, Rat::one());
        let mut c1 = BTreeMap::new();
        c1.insert(0usize, -Rat::one());
        let rows = vec![
            FmIneq::original(0, c0, alpha_minus(3), true),
            FmIneq::original(1, c1, alpha_minus(4), true),
        ];
        match fm_solve(&ctx.alpha, rows).unwrap() {
            FmOutcome::Infeasible {
                residual, parents, ..
            } => {
                assert_eq!(parents, vec![0, 1]);
                assert_eq!(residual.to_string(), "2*alpha - 7");
            }
            FmOutcome::Feasible(_) => panic!("expected infeasibility"),
        }
    }

    #[test]
    fn fm_sample_satisfies_all_rows() {
        // 1/4 < d0 < 3/4, d0 + d1 < 1, d1 > 1/8: sample must satisfy all.
        let ctx = BeattyCtx::pi_default();
        let mk = |pairs: Vec<(usize, i64)>| -> BTreeMap<usize, Rat> {
            pairs.into_iter().map(|(k, n)| (k, rat_i(n))).collect()
        };
        let rows = vec![
            FmIneq::original(
                0,
                mk(vec![(0, -1)]),
                AlphaPoly::from_rat(rat_frac(-1, 4)),
                true,
            ),
            FmIneq::original(
                1,
                mk(vec![(0, 1)]),
                AlphaPoly::from_rat(rat_frac(3, 4)),
                true,
            ),
            FmIneq::original(2, mk(vec![(0, 1), (1, 1)]), AlphaPoly::one(), true),
            FmIneq::original(
                3,
                mk(vec![(1, -1)]),
                AlphaPoly::from_rat(rat_frac(-1, 8)),
                true,
            ),
        ];
        match fm_solve(&ctx.alpha, rows.clone()).unwrap() {
            FmOutcome::Feasible(sample) => {
                for row in &rows {
                    let mut v = AlphaPoly::zero();
                    for (k, c) in &row.coeffs {
                        v = v.add(&sample[k].scale(c));
                    }
                    let sign = alpha::poly_sign(&ctx.alpha, &v.sub(&row.rhs)).unwrap();
                    assert!(sign < 0, "row must hold strictly at the sample");
                }
            }
            FmOutcome::Infeasible { .. } => panic!("rows are feasible"),
        }
    }

    #[test]
    fn negative_candidates_are_reached_after_positive_ones() {
        // A window around {alpha * -1} = 1 - (alpha - 3) = 4 - alpha
        // ~ 0.858 that nothing positive small hits... use a tight window
        // centered at 4 - alpha with rational endpoints.
        let ctx = BeattyCtx::pi_default();
        let center = rat_big(BigInt::from(8584073)) / rat_big(BigInt::from(10000000));
        let w = rat_frac(1, 2000000);
        let windows = vec![DecimalWindow {
            level: 0,
            lo: &center - &w,
            hi: &center + &w,
        }];
        // Budget large enough that SOME candidate (positive or negative)
        // hits; the point is only that the search terminates and verifies.
        if let Some(n) = kronecker_search(&ctx, &windows, 3000).unwrap() {
            let d = ctx.frac_chain_poly(&n, 0).unwrap();
            let lo = AlphaPoly::from_rat(&center - &w);
            let hi = AlphaPoly::from_rat(&center + &w);
            assert!(alpha::poly_sign(&ctx.alpha, &d.sub(&lo)).unwrap() > 0);
            assert!(alpha::poly_sign(&ctx.alpha, &hi.sub(&d)).unwrap() > 0);
        }
    }
}
