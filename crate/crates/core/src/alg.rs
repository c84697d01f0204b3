//! Equation solving over chain symbols and the top-level decision driver.
//!
//! A flattened case (see [`crate::syntax::flatten`]) is a conjunction of
//! integer-linear equations over *chain symbols* `f^pow(inner * var)` plus
//! strict comparisons between sums of chain decimals. This module decides a
//! case exactly with a small set of mutually recursive reductions, each of
//! which either closes the case or strictly shrinks it:
//!
//! 1. **Unit rewrite** — every chain with a non-unit inner multiplier is
//!    rewritten into unit chains plus carry branches. After this step the
//!    per-variable linear coefficient of a row is `sum n_p alpha^p` over
//!    distinct powers, which vanishes only when every `n_p` does; a vanishing
//!    coefficient therefore means the variable genuinely dropped out.
//! 2. **Row reduction** — the equations are Gauss-reduced over the chain
//!    symbols; an inconsistent combination refutes the case outright.
//! 3. **Pinned chains** — a row with a single symbol pins its value; the
//!    finitely many preimages are substituted and explored.
//! 4. **Integer rows** — a row using only level-zero chains is an ordinary
//!    linear Diophantine equation: a gcd test refutes it, a unit coefficient
//!    eliminates a variable, and the two-variable case is parametrized by the
//!    extended gcd. Each elimination reduces the live variable count.
//! 5. **One-variable rows** — `|H(x) - F x| < B` for the linearization
//!    `F = sum n c alpha^p` and an explicit gap `B`, so `H(x) = A` confines
//!    `x` to a computable interval which is enumerated exactly.
//! 6. **Same-class rows** — when every per-variable coefficient is a rational
//!    multiple of one value `F`, the integer combination `S = sum P_j x_j`
//!    is confined to an interval as above; each fiber `S = s` adds an integer
//!    row and recurses.
//! 7. **Cross-class rows** — the row is split into two halves with an
//!    integer slack `m` that is scanned outward from a centered start. The
//!    scan is not exhaustive, so exhausting it yields an honest
//!    `feasible-no-witness`, never an unsatisfiability claim.
//!
//! Unsatisfiability is only ever reported when every branch is refuted by a
//! complete argument (closed-false branches, inconsistent rows, failed
//! divisibility, exhausted complete enumerations, or an infeasible decimal
//! relaxation). Witnesses are re-verified against the original system before
//! they are reported.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::alpha::{self, AlphaPoly, AlphaRat};
use crate::ctx::BeattyCtx;
use crate::error::{Error, Result};
use crate::oracle;
use crate::outcome::SolveOutcome;
use crate::rat::{rat_big, Rat};
use crate::relax::{self, NonalgOutcome};
use crate::syntax::{
    self, rewrite_case, AlgAtom, CanonCase, CaseSubst, ChainKey, FracAtom, LinComb, System, Term,
    VarId,
};

/// Defensive bound on reduction nesting. Every reduction strictly shrinks
/// the case, so realistic inputs stay far below this; hitting it yields an
/// honest budget verdict instead of a wrong answer.
const MAX_DEPTH: u32 = 64;

/// Certificate lines kept from each refuted branch when merging.
const CERT_LINES_PER_BRANCH: usize = 6;

/// Refuted branches quoted in a merged certificate before eliding.
const CERT_BRANCH_CAP: usize = 64;

/// Hard bound on the slack scan of a cross-class row split.
const SCAN_HARD_CAP: u64 = 20_000;

// ---------------------------------------------------------------------------
// Linear views of terms
// ---------------------------------------------------------------------------

/// Reads a term as a single linear combination of chains, without any case
/// splitting. Returns `None` when the term cannot be put in that shape
/// syntactically (an `f` whose argument mixes variables, carries a constant
/// offset, or scales an inner chain), i.e. when carry analysis is required.
fn term_lincomb(t: &Term) -> Option<LinComb> {
    match t {
        Term::Int(n) => Some(LinComb::constant(n.clone())),
        Term::Var(v) => {
            let mut l = LinComb::default();
            l.add_chain(ChainKey::linear(*v), BigInt::one());
            Some(l)
        }
        Term::Add(ts) => {
            let mut acc = LinComb::default();
            for t in ts {
                acc = acc.add(&term_lincomb(t)?);
            }
            Some(acc)
        }
        Term::Mul(n, inner) => Some(term_lincomb(inner)?.scale(n)),
        Term::F { pow, arg } => {
            let a = term_lincomb(arg)?;
            if *pow == 0 {
                return Some(a);
            }
            if !a.konst.is_zero() || a.chains.len() != 1 {
                return None;
            }
            let (key, coeff) = a.chains.iter().next().expect("single chain");
            let new_key = if key.pow == 0 {
                ChainKey {
                    var: key.var,
                    pow: *pow,
                    inner: coeff.clone(),
                }
            } else if coeff.is_one() {
                ChainKey {
                    var: key.var,
                    pow: key.pow + *pow,
                    inner: key.inner.clone(),
                }
            } else {
                return None;
            };
            let mut l = LinComb::default();
            l.add_chain(new_key, BigInt::one());
            Some(l)
        }
    }
}

/// Evaluates a one-variable combination at `x`.
fn eval_lin_at(ctx: &BeattyCtx, lin: &LinComb, x: &BigInt) -> Result<BigInt> {
    let mut acc = lin.konst.clone();
    for (key, n) in &lin.chains {
        acc += n * key.eval(ctx, x)?;
    }
    Ok(acc)
}

/// Per-variable linear coefficients of a combination: the variable `v`
/// contributes `sum n * inner * alpha^pow` over its chains. Variables whose
/// coefficient cancels to zero are omitted.
fn var_coefficients(lin: &LinComb) -> BTreeMap<VarId, AlphaPoly> {
    let mut out: BTreeMap<VarId, AlphaPoly> = BTreeMap::new();
    for (key, n) in &lin.chains {
        let contrib = AlphaPoly::alpha_pow(key.pow as usize).scale(&rat_big(n * &key.inner));
        let slot = out.entry(key.var).or_insert_with(AlphaPoly::zero);
        *slot = slot.add(&contrib);
    }
    out.retain(|_, p| !p.is_zero());
    out
}

/// Gap terms `(coefficient, level)` of a combination; the drift bound of a
/// chain depends only on its level, not on the inner multiplier.
fn gap_terms(lin: &LinComb) -> Vec<(BigInt, u32)> {
    lin.chains.iter().map(|(k, n)| (n.clone(), k.pow)).collect()
}

/// Integer bounds on `x` with `F * x` in the open interval `(lo, hi)`,
/// padded outward by the floor/ceiling rounding. `F` must be nonzero.
fn candidate_interval(
    ctx: &BeattyCtx,
    f_poly: &AlphaPoly,
    lo: &Rat,
    hi: &Rat,
) -> Result<(BigInt, BigInt)> {
    let sign = alpha::poly_sign(&ctx.alpha, f_poly)?;
    debug_assert!(sign != 0, "candidate interval needs a nonzero coefficient");
    let a = AlphaRat::ratio(AlphaPoly::from_rat(lo.clone()), f_poly.clone());
    let b = AlphaRat::ratio(AlphaPoly::from_rat(hi.clone()), f_poly.clone());
    let (first, second) = if sign > 0 { (a, b) } else { (b, a) };
    Ok((
        alpha::floor_of(&ctx.alpha, &first)?,
        alpha::ceil_of(&ctx.alpha, &second)?,
    ))
}

// ---------------------------------------------------------------------------
// One-variable equations
// ---------------------------------------------------------------------------

/// Solution set of a one-variable equation `H(x) = A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OneVarSolutions {
    /// The complete (possibly empty) list of solutions, ascending.
    Finite(Vec<BigInt>),
    /// `H` is the constant `A`: every integer is a solution.
    AllIntegers,
}

/// Solves `h(x) = a` for a carry-free one-variable expression `h`: a sum of
/// terms `n * f^k(c * x)` plus a constant.
///
/// The linearization `|h(x) - konst - F x| < B` with
/// `F = sum n c alpha^k` and an explicit gap `B` confines every solution to
/// a computable interval, which is enumerated and checked exactly; the
/// returned list is complete. When `F` vanishes while `h` still varies, no
/// finite interval exists and the request is reported as unsupported unless
/// the gap already rules every integer out.
pub fn solve_one_var(ctx: &BeattyCtx, h: &Term, a: &BigInt) -> Result<OneVarSolutions> {
    let lin = term_lincomb(h).ok_or_else(|| {
        Error::Unsupported(
            "the expression must be a carry-free sum of terms n * f^k(c * x)".to_string(),
        )
    })?;
    let vars: BTreeSet<VarId> = lin.chains.keys().map(|k| k.var).collect();
    if vars.len() > 1 {
        return Err(Error::Unsupported(
            "the expression must use a single variable".to_string(),
        ));
    }
    if lin.chains.is_empty() {
        return Ok(if &lin.konst == a {
            OneVarSolutions::AllIntegers
        } else {
            OneVarSolutions::Finite(Vec::new())
        });
    }
    let mut f_poly = AlphaPoly::zero();
    for (k, n) in &lin.chains {
        f_poly = f_poly.add(&AlphaPoly::alpha_pow(k.pow as usize).scale(&rat_big(n * &k.inner)));
    }
    let gap = ctx.linearization_gap(&gap_terms(&lin))?;
    let shift = a - &lin.konst;
    if f_poly.is_zero() {
        // |h(x) - konst| < gap for every x, so a target at or beyond the gap
        // is impossible; inside the gap, no finite candidate interval exists.
        if rat_big(shift.abs()) >= gap {
            return Ok(OneVarSolutions::Finite(Vec::new()));
        }
        return Err(Error::Unsupported(
            "the linear coefficient vanishes while the expression varies; \
             no finite candidate interval exists"
                .to_string(),
        ));
    }
    let center = rat_big(shift);
    let (x_lo, x_hi) = candidate_interval(ctx, &f_poly, &(&center - &gap), &(&center + &gap))?;
    let mut out = Vec::new();
    let mut x = x_lo;
    while x <= x_hi {
        if &eval_lin_at(ctx, &lin, &x)? == a {
            out.push(x.clone());
        }
        x += 1;
    }
    Ok(OneVarSolutions::Finite(out))
}

// ---------------------------------------------------------------------------
// Coefficient classes and preimages
// ---------------------------------------------------------------------------

/// Groups coefficient values into rational-dependence classes. Each class is
/// a list of `(index, ratio)` with `polys[index] = ratio * polys[rep]`, the
/// representative being the class's first member (ratio 1). Classes appear
/// in first-occurrence order. Inputs must be nonzero.
pub fn dependence_classes(polys: &[AlphaPoly]) -> Vec<Vec<(usize, Rat)>> {
    let mut classes: Vec<Vec<(usize, Rat)>> = Vec::new();
    let mut reps: Vec<usize> = Vec::new();
    'outer: for (i, p) in polys.iter().enumerate() {
        debug_assert!(!p.is_zero(), "class analysis needs nonzero coefficients");
        for (c, rep_idx) in reps.iter().enumerate() {
            if let Some(r) = alpha::is_rational_multiple(&polys[*rep_idx], p) {
                classes[c].push((i, r));
                continue 'outer;
            }
        }
        reps.push(i);
        classes.push(vec![(i, Rat::one())]);
    }
    classes
}

/// All integers `x` with `chain(x) = value`, ascending. For `pow = 0` this
/// is a divisibility test; for higher levels the floor preimage interval is
/// pulled back one level at a time.
fn chain_preimages(ctx: &BeattyCtx, key: &ChainKey, value: &BigInt) -> Result<Vec<BigInt>> {
    let mut targets = vec![value.clone()];
    if key.pow >= 1 {
        let alpha_poly = AlphaPoly::alpha_pow(1);
        for _ in 0..key.pow {
            let mut next = Vec::new();
            for t in &targets {
                next.extend(ctx.floor_preimages(&alpha_poly, t)?);
            }
            next.sort();
            next.dedup();
            targets = next;
            if targets.is_empty() {
                break;
            }
        }
    }
    let mut out = Vec::new();
    for w in targets {
        let (q, r) = w.div_rem(&key.inner);
        if r.is_zero() {
            out.push(q);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Row reduction over chain symbols
// ---------------------------------------------------------------------------

/// Result of Gauss reduction of the equation rows over chain symbols.
struct Echelon {
    /// Equivalent reduced rows with primitive integer coefficients.
    rows: Vec<LinComb>,
    /// True when some combination reduced to `0 = c`, `c` nonzero.
    contradiction: bool,
}

/// Row-reduces the equations, treating every distinct chain as an
/// independent symbol. Rational row operations preserve the solution set of
/// the rows as linear constraints on the symbol values, so the reduced rows
/// are equivalent to the input for every interpretation of the symbols.
fn echelon(atoms: &[AlgAtom]) -> Echelon {
    let symbols: Vec<ChainKey> = atoms
        .iter()
        .flat_map(|a| a.lhs.chains.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let cols = symbols.len();
    let mut rows: Vec<(Vec<Rat>, Rat)> = atoms
        .iter()
        .map(|a| {
            let coeffs = symbols
                .iter()
                .map(|s| {
                    a.lhs
                        .chains
                        .get(s)
                        .map(|n| rat_big(n.clone()))
                        .unwrap_or_else(Rat::zero)
                })
                .collect();
            (coeffs, rat_big(a.lhs.konst.clone()))
        })
        .collect();
    let mut r = 0;
    for col in 0..cols {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i].0[col].is_zero()) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = rows[r].0[col].clone().recip();
        for c in rows[r].0.iter_mut() {
            let v = &*c * &inv;
            *c = v;
        }
        rows[r].1 = &rows[r].1 * &inv;
        for j in 0..rows.len() {
            if j == r || rows[j].0[col].is_zero() {
                continue;
            }
            let factor = rows[j].0[col].clone();
            for k in 0..cols {
                let v = &rows[j].0[k] - &(&factor * &rows[r].0[k]);
                rows[j].0[k] = v;
            }
            rows[j].1 = &rows[j].1 - &(&factor * &rows[r].1);
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let mut out = Vec::new();
    let mut contradiction = false;
    for (coeffs, konst) in rows {
        if coeffs.iter().all(|c| c.is_zero()) {
            if !konst.is_zero() {
                contradiction = true;
            }
            continue;
        }
        out.push(primitive_row(&symbols, &coeffs, &konst));
    }
    Echelon {
        rows: out,
        contradiction,
    }
}

/// Converts a rational row into a primitive integer combination with a
/// deterministic sign (first nonzero coefficient positive).
fn primitive_row(symbols: &[ChainKey], coeffs: &[Rat], konst: &Rat) -> LinComb {
    let mut denom_lcm = BigInt::one();
    for c in coeffs.iter().chain(std::iter::once(konst)) {
        denom_lcm = denom_lcm.lcm(c.denom());
    }
    let scaled: Vec<BigInt> = coeffs
        .iter()
        .chain(std::iter::once(konst))
        .map(|c| c.numer() * (&denom_lcm / c.denom()))
        .collect();
    let mut g = BigInt::zero();
    for v in &scaled {
        g = g.gcd(v);
    }
    if g.is_zero() {
        g = BigInt::one();
    }
    let lead = scaled
        .iter()
        .find(|v| !v.is_zero())
        .cloned()
        .unwrap_or_else(BigInt::one);
    if lead.is_negative() {
        g = -g;
    }
    let mut lin = LinComb::constant(&scaled[coeffs.len()] / &g);
    for (i, s) in symbols.iter().enumerate() {
        let v = &scaled[i] / &g;
        if !v.is_zero() {
            lin.add_chain(s.clone(), v);
        }
    }
    lin
}

// ---------------------------------------------------------------------------
// Case driver
// ---------------------------------------------------------------------------

/// A decision recorded while exploring cases, replayed after the verdict to
/// measure the precision that certifies it.
enum ReplayOp {
    /// Re-check the sign of an exact value.
    Sign(AlphaPoly),
    /// Re-derive the integer bounds of a bounded enumeration.
    Enum { f: AlphaPoly, lo: Rat, hi: Rat },
}

/// Verdict for one flattened case.
enum CaseVerdict {
    /// A satisfying assignment of the case's variables (internal ids).
    Sat(BTreeMap<VarId, BigInt>),
    /// Every branch of the case was refuted; the lines explain how.
    Unsat(Vec<String>),
    /// A search budget ran out before a witness or a refutation was found.
    NoWitness,
}

/// Appends a branch refutation to a merged certificate, bounded in size.
fn push_cert(certs: &mut Vec<String>, header: &str, lines: &[String]) {
    if certs.len() >= CERT_BRANCH_CAP {
        if certs.len() == CERT_BRANCH_CAP {
            certs.push("... (more refuted branches omitted)".to_string());
        }
        return;
    }
    certs.push(header.to_string());
    for l in lines.iter().take(CERT_LINES_PER_BRANCH) {
        certs.push(format!("  {}", l));
    }
    if lines.len() > CERT_LINES_PER_BRANCH {
        certs.push(format!(
            "  ... ({} more lines)",
            lines.len() - CERT_LINES_PER_BRANCH
        ));
    }
}

struct Driver<'a> {
    ctx: &'a BeattyCtx,
    /// Shared variable table; substitutions may append parameters.
    vars: Vec<String>,
    cases_explored: u64,
    replay: Vec<ReplayOp>,
}

impl Driver<'_> {
    fn fresh_param(&mut self) -> VarId {
        let id = self.vars.len();
        self.vars.push(format!("#t{}", id));
        id
    }

    /// Decides one case. Every return path is either a verified reduction
    /// (`Sat` carries bindings for all substituted variables, `Unsat` only
    /// follows complete refutations) or the honest `NoWitness`.
    fn solve_case(&mut self, case: &CanonCase, depth: u32) -> Result<CaseVerdict> {
        self.cases_explored += 1;
        self.ctx.warn_cases(self.cases_explored);
        if self.cases_explored > self.ctx.cfg.case_limit || depth > MAX_DEPTH {
            return Ok(CaseVerdict::NoWitness);
        }
        // Stage 1: rewrite non-unit chains so a vanishing per-variable
        // coefficient can only mean the variable is absent.
        if case
            .alg
            .iter()
            .any(|a| a.lhs.chains.keys().any(|k| k.pow >= 1 && !k.inner.is_one()))
        {
            let subs = rewrite_case(self.ctx, &mut self.vars, case, &CaseSubst::Unitize)?;
            return self.solve_subcases(&subs, depth, "unit rewrite");
        }
        // Stage 2: row-reduce the equations.
        let ech = echelon(&case.alg);
        if ech.contradiction {
            return Ok(CaseVerdict::Unsat(vec![
                "the equations combine to 0 = c for a nonzero integer c".to_string(),
            ]));
        }
        let work = CanonCase {
            alg: ech.rows.into_iter().map(|lhs| AlgAtom { lhs }).collect(),
            frac: case.frac.clone(),
            derived: Vec::new(),
        };
        // Stage 3: equations exhausted; the decimal engine decides.
        if work.alg.is_empty() {
            return self.solve_fracs(&work);
        }
        // Stage 4: a row pinning a single chain.
        if let Some(i) = work.alg.iter().position(|a| a.lhs.chains.len() == 1) {
            return self.solve_pinned(&work, i, depth);
        }
        // Stage 5: a pure integer row.
        if let Some(i) = work
            .alg
            .iter()
            .position(|a| a.lhs.chains.keys().all(|k| k.pow == 0))
        {
            return self.solve_integer_row(&work, i, depth);
        }
        // Stage 6: a row over a single variable.
        if let Some(i) = work.alg.iter().position(|a| {
            let mut vs = a.lhs.chains.keys().map(|k| k.var);
            let first = vs.next();
            vs.all(|v| Some(v) == first)
        }) {
            return self.solve_single_var_row(&work, i, depth);
        }
        // Stage 7: a genuinely multi-variable row.
        self.solve_multi_var_row(&work, 0, depth)
    }

    /// Explores rewritten sub-cases in order: first witness wins, budget
    /// verdicts are sticky, and only a full sweep of refutations is a
    /// refutation.
    fn solve_subcases(
        &mut self,
        subs: &[CanonCase],
        depth: u32,
        what: &str,
    ) -> Result<CaseVerdict> {
        if subs.is_empty() {
            return Ok(CaseVerdict::Unsat(vec![format!(
                "every branch of the {} is closed false",
                what
            )]));
        }
        let mut saw_budget = false;
        let mut certs: Vec<String> = Vec::new();
        for (i, sub) in subs.iter().enumerate() {
            match self.solve_case(sub, depth + 1)? {
                CaseVerdict::Sat(env) => return Ok(CaseVerdict::Sat(env)),
                CaseVerdict::Unsat(lines) => {
                    push_cert(&mut certs, &format!("{} branch {}:", what, i + 1), &lines);
                }
                CaseVerdict::NoWitness => saw_budget = true,
            }
        }
        if saw_budget {
            Ok(CaseVerdict::NoWitness)
        } else {
            Ok(CaseVerdict::Unsat(certs))
        }
    }

    /// Decides a case with no equations left: defers to the decimal engine.
    fn solve_fracs(&mut self, case: &CanonCase) -> Result<CaseVerdict> {
        match relax::solve_nonalg(self.ctx, &self.vars, &case.frac)? {
            NonalgOutcome::Witness(env) => Ok(CaseVerdict::Sat(env)),
            NonalgOutcome::Infeasible {
                certificate,
                residual,
            } => {
                self.replay.push(ReplayOp::Sign(residual));
                Ok(CaseVerdict::Unsat(certificate))
            }
            NonalgOutcome::BudgetExhausted => Ok(CaseVerdict::NoWitness),
        }
    }

    /// A row `c * chain + k = 0` pins the chain value; its finitely many
    /// argument preimages are substituted one by one. The preimage set is
    /// complete, so refuting every candidate refutes the case.
    fn solve_pinned(
        &mut self,
        work: &CanonCase,
        row_idx: usize,
        depth: u32,
    ) -> Result<CaseVerdict> {
        let row = &work.alg[row_idx].lhs;
        let (key, coeff) = row.chains.iter().next().expect("pinned row has one chain");
        let key = key.clone();
        let coeff = coeff.clone();
        let rhs = -row.konst.clone();
        let (value, rem) = rhs.div_rem(&coeff);
        if !rem.is_zero() {
            return Ok(CaseVerdict::Unsat(vec![format!(
                "a chain value is pinned to the non-integer {}/{}",
                rhs, coeff
            )]));
        }
        let candidates = chain_preimages(self.ctx, &key, &value)?;
        if candidates.is_empty() {
            return Ok(CaseVerdict::Unsat(vec![format!(
                "the value {} is outside the range of the pinned chain",
                value
            )]));
        }
        let mut saw_budget = false;
        let mut certs = Vec::new();
        for x0 in &candidates {
            let subs = rewrite_case(
                self.ctx,
                &mut self.vars,
                work,
                &CaseSubst::Const(key.var, x0),
            )?;
            match self.solve_subcases(&subs, depth, "pinned-value substitution")? {
                CaseVerdict::Sat(mut env) => {
                    env.insert(key.var, x0.clone());
                    return Ok(CaseVerdict::Sat(env));
                }
                CaseVerdict::Unsat(lines) => {
                    push_cert(&mut certs, &format!("candidate {} refuted:", x0), &lines);
                }
                CaseVerdict::NoWitness => saw_budget = true,
            }
        }
        if saw_budget {
            Ok(CaseVerdict::NoWitness)
        } else {
            Ok(CaseVerdict::Unsat(certs))
        }
    }

    /// Substitutes `v := rep` (a level-zero affine combination), explores the
    /// carry branches, and on success recovers `v`'s value from the binding.
    fn substitute_affine(
        &mut self,
        work: &CanonCase,
        v: VarId,
        rep: &LinComb,
        depth: u32,
    ) -> Result<CaseVerdict> {
        let subs = rewrite_case(self.ctx, &mut self.vars, work, &CaseSubst::Affine(v, rep))?;
        match self.solve_subcases(&subs, depth, "affine substitution")? {
            CaseVerdict::Sat(mut env) => {
                let mut value = rep.konst.clone();
                for (k, n) in &rep.chains {
                    debug_assert!(k.pow == 0 && k.inner.is_one());
                    value += n * env.get(&k.var).cloned().unwrap_or_default();
                }
                env.insert(v, value);
                Ok(CaseVerdict::Sat(env))
            }
            other => Ok(other),
        }
    }

    /// Decides with a pure integer row: gcd refutation, unit-coefficient
    /// elimination, extended-gcd parametrization of two variables, or a
    /// pairwise merge that shrinks wider rows toward those cases.
    fn solve_integer_row(
        &mut self,
        work: &CanonCase,
        row_idx: usize,
        depth: u32,
    ) -> Result<CaseVerdict> {
        let row = work.alg[row_idx].lhs.clone();
        let coeffs: Vec<(VarId, BigInt)> =
            row.chains.iter().map(|(k, n)| (k.var, n.clone())).collect();
        debug_assert!(coeffs.len() >= 2, "single-symbol rows are pinned earlier");
        let mut g = BigInt::zero();
        for (_, c) in &coeffs {
            g = g.gcd(c);
        }
        if !(&row.konst % &g).is_zero() {
            return Ok(CaseVerdict::Unsat(vec![format!(
                "the integer row has coefficient gcd {} which does not divide {}",
                g, -&row.konst
            )]));
        }
        if let Some((v, c)) = coeffs.iter().find(|(_, c)| c.abs().is_one()) {
            // c v + rest + konst = 0 with c = +-1, so v = -c (rest + konst).
            let mut rep = LinComb::constant(-(c * &row.konst));
            for (k, n) in &row.chains {
                if k.var == *v {
                    continue;
                }
                rep.add_chain(k.clone(), -(c * n));
            }
            return self.substitute_affine(work, *v, &rep, depth);
        }
        let (v1, c1) = coeffs[0].clone();
        let (v2, c2) = coeffs[1].clone();
        let eg = c1.extended_gcd(&c2);
        let step1 = &c2 / &eg.gcd;
        let step2 = -(&c1 / &eg.gcd);
        if coeffs.len() == 2 {
            // All solutions of c1 v1 + c2 v2 + konst = 0 are
            // (v1, v2) = (x0 t0 + step1 t, y0 t0 - ...) for the particular
            // solution scaled by t0 = -konst / gcd and a free parameter t.
            let t0 = -&row.konst / &eg.gcd;
            let base1 = &eg.x * &t0;
            let base2 = &eg.y * &t0;
            let param = self.fresh_param();
            let mut rep1 = LinComb::constant(base1.clone());
            rep1.add_chain(ChainKey::linear(param), step1.clone());
            let mut rep2 = LinComb::constant(base2.clone());
            rep2.add_chain(ChainKey::linear(param), step2.clone());
            let first = rewrite_case(
                self.ctx,
                &mut self.vars,
                work,
                &CaseSubst::Affine(v1, &rep1),
            )?;
            if first.is_empty() {
                return Ok(CaseVerdict::Unsat(vec![
                    "every carry branch of the parameter substitution is closed false".to_string(),
                ]));
            }
            let mut saw_budget = false;
            let mut certs = Vec::new();
            for (i, sub) in first.iter().enumerate() {
                let subs2 =
                    rewrite_case(self.ctx, &mut self.vars, sub, &CaseSubst::Affine(v2, &rep2))?;
                match self.solve_subcases(&subs2, depth, "parameter substitution")? {
                    CaseVerdict::Sat(mut env) => {
                        let tv = env.get(&param).cloned().unwrap_or_default();
                        env.insert(v1, &base1 + &step1 * &tv);
                        env.insert(v2, &base2 + &step2 * &tv);
                        return Ok(CaseVerdict::Sat(env));
                    }
                    CaseVerdict::Unsat(lines) => {
                        push_cert(&mut certs, &format!("carry branch {}:", i + 1), &lines);
                    }
                    CaseVerdict::NoWitness => saw_budget = true,
                }
            }
            return if saw_budget {
                Ok(CaseVerdict::NoWitness)
            } else {
                Ok(CaseVerdict::Unsat(certs))
            };
        }
        // Three or more variables, none with a unit coefficient: merge the
        // first two along their gcd direction. The pairs with
        // c1 v1 + c2 v2 = gcd * w are exactly (x0 w + step1 t, y0 w - ...),
        // so the row loses one variable and the recursion converges to the
        // two-variable case.
        let w = self.fresh_param();
        let t = self.fresh_param();
        let mut rep1 = LinComb::default();
        rep1.add_chain(ChainKey::linear(w), eg.x.clone());
        rep1.add_chain(ChainKey::linear(t), step1.clone());
        let mut rep2 = LinComb::default();
        rep2.add_chain(ChainKey::linear(w), eg.y.clone());
        rep2.add_chain(ChainKey::linear(t), step2.clone());
        let first = rewrite_case(
            self.ctx,
            &mut self.vars,
            work,
            &CaseSubst::Affine(v1, &rep1),
        )?;
        if first.is_empty() {
            return Ok(CaseVerdict::Unsat(vec![
                "every carry branch of the merge substitution is closed false".to_string(),
            ]));
        }
        let mut saw_budget = false;
        let mut certs = Vec::new();
        for (i, sub) in first.iter().enumerate() {
            let subs2 = rewrite_case(self.ctx, &mut self.vars, sub, &CaseSubst::Affine(v2, &rep2))?;
            match self.solve_subcases(&subs2, depth, "merge substitution")? {
                CaseVerdict::Sat(mut env) => {
                    let wv = env.get(&w).cloned().unwrap_or_default();
                    let tv = env.get(&t).cloned().unwrap_or_default();
                    env.insert(v1, &eg.x * &wv + &step1 * &tv);
                    env.insert(v2, &eg.y * &wv + &step2 * &tv);
                    return Ok(CaseVerdict::Sat(env));
                }
                CaseVerdict::Unsat(lines) => {
                    push_cert(&mut certs, &format!("carry branch {}:", i + 1), &lines);
                }
                CaseVerdict::NoWitness => saw_budget = true,
            }
        }
        if saw_budget {
            Ok(CaseVerdict::NoWitness)
        } else {
            Ok(CaseVerdict::Unsat(certs))
        }
    }

    /// Decides with a one-variable row via the complete bounded enumeration.
    fn solve_single_var_row(
        &mut self,
        work: &CanonCase,
        row_idx: usize,
        depth: u32,
    ) -> Result<CaseVerdict> {
        let row = work.alg[row_idx].lhs.clone();
        let var = row.chains.keys().next().expect("nonempty row").var;
        let terms = gap_terms(&row);
        let f_poly = self.ctx.linear_coefficient(&terms);
        if f_poly.is_zero() {
            // Unit chains at distinct levels cannot cancel; defensive only.
            debug_assert!(false, "unit-chain row with vanishing coefficient");
            return Ok(CaseVerdict::NoWitness);
        }
        let gap = self.ctx.linearization_gap(&terms)?;
        let target = -row.konst.clone();
        let center = rat_big(target.clone());
        let lo = &center - &gap;
        let hi = &center + &gap;
        self.replay.push(ReplayOp::Enum {
            f: f_poly.clone(),
            lo: lo.clone(),
            hi: hi.clone(),
        });
        let (x_lo, x_hi) = candidate_interval(self.ctx, &f_poly, &lo, &hi)?;
        let mut saw_budget = false;
        let mut certs = Vec::new();
        let mut x = x_lo.clone();
        while x <= x_hi {
            if self.ctx.eval_one_var(&terms, &x)? == target {
                let subs =
                    rewrite_case(self.ctx, &mut self.vars, work, &CaseSubst::Const(var, &x))?;
                match self.solve_subcases(&subs, depth, "bounded-interval candidate")? {
                    CaseVerdict::Sat(mut env) => {
                        env.insert(var, x.clone());
                        return Ok(CaseVerdict::Sat(env));
                    }
                    CaseVerdict::Unsat(lines) => {
                        push_cert(&mut certs, &format!("candidate {} refuted:", x), &lines);
                    }
                    CaseVerdict::NoWitness => saw_budget = true,
                }
            }
            x += 1;
        }
        if saw_budget {
            Ok(CaseVerdict::NoWitness)
        } else {
            certs.insert(
                0,
                format!(
                    "every integer candidate in [{}, {}] for the one-variable row is refuted",
                    x_lo, x_hi
                ),
            );
            Ok(CaseVerdict::Unsat(certs))
        }
    }

    /// Decides with a multi-variable row: a single dependence class yields a
    /// complete fiber enumeration; several classes fall back to the decimal
    /// precheck and the scanned row split.
    fn solve_multi_var_row(
        &mut self,
        work: &CanonCase,
        row_idx: usize,
        depth: u32,
    ) -> Result<CaseVerdict> {
        let row = work.alg[row_idx].lhs.clone();
        let per_var = var_coefficients(&row);
        let vars_in_row: Vec<VarId> = per_var.keys().cloned().collect();
        debug_assert!(
            vars_in_row.len() >= 2,
            "single-variable rows are handled earlier"
        );
        let polys: Vec<AlphaPoly> = vars_in_row.iter().map(|v| per_var[v].clone()).collect();
        let classes = dependence_classes(&polys);
        if classes.len() == 1 {
            return self.solve_same_class_row(work, &row, &vars_in_row, &classes[0], depth);
        }
        // The decimal atoms alone may already be contradictory.
        if let Some((certificate, residual)) =
            relax::fracs_infeasible(self.ctx, &self.vars, &work.frac)?
        {
            self.replay.push(ReplayOp::Sign(residual));
            return Ok(CaseVerdict::Unsat(certificate));
        }
        self.scan_row_split(work, row_idx, &row, &vars_in_row, &classes, depth)
    }

    /// Same-class row: every per-variable coefficient is `r_j * F`, so with
    /// `Q` the common denominator of the `r_j` and `P_j = r_j Q`, the row
    /// value differs from `(F / Q) * sum P_j x_j` by less than the gap. The
    /// combination is confined to a complete interval; each fiber adds the
    /// integer row `sum P_j x_j = s` and recurses.
    fn solve_same_class_row(
        &mut self,
        work: &CanonCase,
        row: &LinComb,
        vars_in_row: &[VarId],
        class: &[(usize, Rat)],
        depth: u32,
    ) -> Result<CaseVerdict> {
        let mut q = BigInt::one();
        for (_, r) in class {
            q = q.lcm(r.denom());
        }
        let p_coeffs: Vec<BigInt> = class
            .iter()
            .map(|(_, r)| r.numer() * (&q / r.denom()))
            .collect();
        let rep_var = vars_in_row[class[0].0];
        let f_rep = var_coefficients(row)
            .remove(&rep_var)
            .expect("representative has a coefficient");
        let f_scaled = f_rep.scale(&Rat::new(BigInt::one(), q.clone()));
        let gap = self.ctx.linearization_gap(&gap_terms(row))?;
        let center = rat_big(-row.konst.clone());
        let lo = &center - &gap;
        let hi = &center + &gap;
        self.replay.push(ReplayOp::Enum {
            f: f_scaled.clone(),
            lo: lo.clone(),
            hi: hi.clone(),
        });
        let (s_lo, s_hi) = candidate_interval(self.ctx, &f_scaled, &lo, &hi)?;
        let mut saw_budget = false;
        let mut certs = Vec::new();
        let mut s = s_lo.clone();
        while s <= s_hi {
            let mut fiber = LinComb::constant(-s.clone());
            for ((idx, _), p) in class.iter().zip(&p_coeffs) {
                fiber.add_chain(ChainKey::linear(vars_in_row[*idx]), p.clone());
            }
            let mut sub = work.clone();
            sub.alg.push(AlgAtom { lhs: fiber });
            match self.solve_case(&sub, depth + 1)? {
                CaseVerdict::Sat(env) => return Ok(CaseVerdict::Sat(env)),
                CaseVerdict::Unsat(lines) => {
                    push_cert(&mut certs, &format!("fiber {} refuted:", s), &lines);
                }
                CaseVerdict::NoWitness => saw_budget = true,
            }
            s += 1;
        }
        if saw_budget {
            Ok(CaseVerdict::NoWitness)
        } else {
            certs.insert(
                0,
                format!(
                    "every fiber in [{}, {}] of the variable combination is refuted",
                    s_lo, s_hi
                ),
            );
            Ok(CaseVerdict::Unsat(certs))
        }
    }

    /// Cross-class row: splits the row into the first class's half and the
    /// rest, linked by an integer slack `m` scanned outward from the
    /// centered start. The scan is finite and not exhaustive, so it can
    /// produce a witness or run out of budget, never an unsat claim.
    fn scan_row_split(
        &mut self,
        work: &CanonCase,
        row_idx: usize,
        row: &LinComb,
        vars_in_row: &[VarId],
        classes: &[Vec<(usize, Rat)>],
        depth: u32,
    ) -> Result<CaseVerdict> {
        let class_vars: BTreeSet<VarId> = classes[0].iter().map(|(i, _)| vars_in_row[*i]).collect();
        let mut lhs1 = LinComb::default();
        let mut lhs2 = LinComb::constant(row.konst.clone());
        for (k, n) in &row.chains {
            if class_vars.contains(&k.var) {
                lhs1.add_chain(k.clone(), n.clone());
            } else {
                lhs2.add_chain(k.clone(), n.clone());
            }
        }
        // Both halves hit an integer near a multiple of their range-window
        // constants, so about 64 coincidences fit under this cap.
        let k1 = self.ctx.range_window_constant(&gap_terms(&lhs1))?;
        let k2 = self.ctx.range_window_constant(&gap_terms(&lhs2))?;
        let prod = &k1 * &k2 * BigInt::from(64u32) + 64u32;
        let cap = prod
            .to_u64()
            .map_or(SCAN_HARD_CAP, |v| v.min(SCAN_HARD_CAP));
        let m0 = -&row.konst / 2;
        let mut saw_budget = false;
        for k in 0..cap {
            let m = scan_offset(&m0, k);
            let mut atom1 = lhs1.clone();
            atom1.konst = -m.clone();
            let mut atom2 = lhs2.clone();
            atom2.konst = &lhs2.konst + &m;
            let mut sub = work.clone();
            sub.alg[row_idx] = AlgAtom { lhs: atom1 };
            sub.alg.insert(row_idx + 1, AlgAtom { lhs: atom2 });
            match self.solve_case(&sub, depth + 1)? {
                CaseVerdict::Sat(env) => return Ok(CaseVerdict::Sat(env)),
                CaseVerdict::Unsat(_) => {}
                CaseVerdict::NoWitness => saw_budget = true,
            }
        }
        let _ = saw_budget;
        Ok(CaseVerdict::NoWitness)
    }
}

/// Scan order around a center: `m0, m0+1, m0-1, m0+2, ...`.
fn scan_offset(m0: &BigInt, k: u64) -> BigInt {
    if k == 0 {
        m0.clone()
    } else if k % 2 == 1 {
        m0 + BigInt::from(k.div_ceil(2))
    } else {
        m0 - BigInt::from(k / 2)
    }
}

// ---------------------------------------------------------------------------
// Top-level driver
// ---------------------------------------------------------------------------

/// Builds the reported witness map: every declared (non-internal) variable
/// with its value.
fn witness_map(sys: &System, env: &[BigInt]) -> BTreeMap<String, BigInt> {
    sys.vars
        .iter()
        .enumerate()
        .filter(|(_, n)| !n.starts_with('#'))
        .map(|(i, n)| (n.clone(), env[i].clone()))
        .collect()
}

/// Measures the certifying precision: the peak working precision needed to
/// re-verify the witness (for sat) or to replay every recorded decision (for
/// the other verdicts), starting from a reset peak counter.
fn certify(
    ctx: &BeattyCtx,
    sys: &System,
    witness: Option<&[BigInt]>,
    replay: &[ReplayOp],
) -> Result<u32> {
    ctx.alpha.reset_peak();
    match witness {
        Some(env) => {
            let ok = syntax::system_holds(ctx, sys, env)?;
            debug_assert!(ok, "reported witness must verify");
            let _ = ok;
        }
        None => {
            for op in replay {
                match op {
                    ReplayOp::Sign(p) => {
                        let _ = alpha::poly_sign(&ctx.alpha, p)?;
                    }
                    ReplayOp::Enum { f, lo, hi } => {
                        let _ = candidate_interval(ctx, f, lo, hi)?;
                    }
                }
            }
        }
    }
    Ok(ctx.alpha.peak_bits())
}

/// Cheap deterministic scan of a centered box around the origin; a hit is an
/// exact witness and short-circuits the case analysis.
fn smoke_scan(ctx: &BeattyCtx, sys: &System, occurring: &[VarId]) -> Result<Option<Vec<BigInt>>> {
    let base: i64 = match occurring.len() {
        1 => 2000,
        2 => 70,
        3 => 21,
        4 => 10,
        _ => 5,
    };
    let mut size = BigInt::from(base);
    // For a small alpha, reach past 1/alpha so level-one chains take more
    // than one value inside the box.
    let lb = ctx.alpha_lb()?;
    if lb.is_positive() && lb < Rat::one() {
        let inv = (Rat::one() / lb).ceil().to_integer() + 1;
        if inv > size {
            size = inv;
        }
    }
    let ranges: Vec<(BigInt, BigInt)> = (0..sys.vars.len())
        .map(|i| {
            if occurring.contains(&i) {
                (-size.clone(), size.clone())
            } else {
                (BigInt::zero(), BigInt::zero())
            }
        })
        .collect();
    let bx = oracle::SearchBox::new(ranges);
    if bx.total() > 500_000 {
        return Ok(None);
    }
    let report = oracle::brute_solve(ctx, sys, &bx, 1)?;
    Ok(report.hits.into_iter().next())
}

/// Decides a system: exact satisfiability with a verified witness, exact
/// unsatisfiability with a refutation certificate, or an honest
/// `feasible-no-witness` when a search budget ran out first.
pub fn solve_system(ctx: &BeattyCtx, sys: &System) -> Result<SolveOutcome> {
    let occurring = sys.occurring_vars();
    if occurring.is_empty() {
        let env = vec![BigInt::zero(); sys.vars.len()];
        let holds = syntax::system_holds(ctx, sys, &env)?;
        let mut out = if holds {
            SolveOutcome::sat(witness_map(sys, &env))
        } else {
            SolveOutcome::unsat(vec![
                "the variable-free system evaluates to false".to_string()
            ])
        };
        out.precision_bits = certify(ctx, sys, holds.then_some(env.as_slice()), &[])?;
        return Ok(out);
    }
    if let Some(env) = smoke_scan(ctx, sys, &occurring)? {
        let mut out = SolveOutcome::sat(witness_map(sys, &env));
        out.certificate = vec!["witness found by the bounded scan".to_string()];
        out.precision_bits = certify(ctx, sys, Some(&env), &[])?;
        return Ok(out);
    }
    let ds = syntax::desugar_congruences(sys);
    let split = syntax::flatten(ctx, &ds.system)?;
    let total = split.cases.len();
    let mut driver = Driver {
        ctx,
        vars: split.vars.clone(),
        cases_explored: 0,
        replay: Vec::new(),
    };
    let mut saw_budget = false;
    let mut certs: Vec<String> = Vec::new();
    for (i, case) in split.cases.iter().enumerate() {
        match driver.solve_case(case, 0)? {
            CaseVerdict::Sat(env) => {
                let full: Vec<BigInt> = (0..driver.vars.len())
                    .map(|id| env.get(&id).cloned().unwrap_or_default())
                    .collect();
                let mut env_orig: Vec<BigInt> = (0..sys.vars.len())
                    .map(|v| full.get(v).cloned().unwrap_or_default())
                    .collect();
                for rec in &ds.recoveries {
                    env_orig[rec.var] = &rec.scale * &full[rec.carrier] + &rec.offset;
                }
                let ok = syntax::system_holds(ctx, sys, &env_orig)?;
                debug_assert!(ok, "case witness must satisfy the original system");
                if ok {
                    let mut out = SolveOutcome::sat(witness_map(sys, &env_orig));
                    out.cases_explored = driver.cases_explored;
                    out.certificate = vec![format!("witness found in case {} of {}", i + 1, total)];
                    out.precision_bits = certify(ctx, sys, Some(&env_orig), &[])?;
                    return Ok(out);
                }
                saw_budget = true;
            }
            CaseVerdict::Unsat(lines) => {
                push_cert(&mut certs, &format!("case {} of {}:", i + 1, total), &lines);
            }
            CaseVerdict::NoWitness => saw_budget = true,
        }
    }
    let mut out = if total == 0 {
        let mut lines = vec!["every case of the boundary analysis is closed false".to_string()];
        lines.extend(split.notes.iter().cloned());
        SolveOutcome::unsat(lines)
    } else if saw_budget {
        SolveOutcome::feasible_no_witness(vec![
            "a search budget was exhausted before a witness or a refutation was found".to_string(),
        ])
    } else {
        SolveOutcome::unsat(certs)
    };
    out.cases_explored = driver.cases_explored;
    out.precision_bits = certify(ctx, sys, None, &driver.replay)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Derived procedures
// ---------------------------------------------------------------------------

/// Smallest positive `x` with `x = i (mod m)` and `f(x) = j (mod n)`, or
/// `None` if none is found within the configured budget. Every pair of
/// residue conditions is realizable, so the scan over the arithmetic
/// progression terminates quickly in practice.
pub fn solve_congruence_pair(
    ctx: &BeattyCtx,
    m: &BigInt,
    i: &BigInt,
    n: &BigInt,
    j: &BigInt,
) -> Result<Option<BigInt>> {
    if !m.is_positive() || !n.is_positive() {
        return Err(Error::Unsupported("moduli must be positive".to_string()));
    }
    let i = i.mod_floor(m);
    let j = j.mod_floor(n);
    let mut y = BigInt::zero();
    let budget = BigInt::from(ctx.cfg.budget);
    while y <= budget {
        let x = m * &y + &i;
        if x.is_positive() && ctx.apply_f(&x)?.mod_floor(n) == j {
            return Ok(Some(x));
        }
        y += 1;
    }
    Ok(None)
}

/// Finds `(x, y)` such that `h(x + l*y) = h(x) + l*h(y)` for every
/// `0 <= l <= n`, for a carry-free one-variable expression `h` built from
/// unit chains. Returns `None` when the search budget runs out (the
/// underlying windows are always realizable) or when no pair can exist.
///
/// The pair is found by requiring, at every chain level `i` below the
/// maximum, that the level-`i` decimal of `x` plus `n` times the level-`i`
/// decimal of `y` stays below one; floors then add level by level, making
/// `h` exactly additive along the progression. The returned pair is
/// re-verified exactly before it is reported.
pub fn find_progression(ctx: &BeattyCtx, h: &Term, n: u32) -> Result<Option<(BigInt, BigInt)>> {
    let lin = term_lincomb(h).ok_or_else(|| {
        Error::Unsupported(
            "the expression must be a carry-free sum of chains in one variable".to_string(),
        )
    })?;
    let hvars: BTreeSet<VarId> = lin.chains.keys().map(|k| k.var).collect();
    if hvars.len() > 1 {
        return Err(Error::Unsupported(
            "the expression must use a single variable".to_string(),
        ));
    }
    if lin.chains.keys().any(|k| !k.inner.is_one()) {
        return Err(Error::Unsupported(
            "inner chain multipliers are not supported here".to_string(),
        ));
    }
    if !lin.konst.is_zero() {
        // h(x) + l h(y) picks up (1 + l) times the constant while h(x + l y)
        // picks it up once; no pair can work for l >= 1.
        return Ok(None);
    }
    let depth = lin.chains.keys().map(|k| k.pow).max().unwrap_or(0);
    if depth == 0 {
        // Exactly linear: every pair works.
        return Ok(Some((BigInt::one(), BigInt::one())));
    }
    let n = n.max(1);
    let n_big = BigInt::from(n);
    let atoms: Vec<FracAtom> = (0..depth)
        .map(|level| {
            let mut terms = BTreeMap::new();
            terms.insert((0usize, level), BigInt::one());
            terms.insert((1usize, level), n_big.clone());
            FracAtom {
                terms,
                rhs: AlphaPoly::one(),
            }
        })
        .collect();
    let names = vec!["x".to_string(), "y".to_string()];
    match relax::solve_nonalg(ctx, &names, &atoms)? {
        NonalgOutcome::Witness(env) => {
            let x = env.get(&0).cloned().unwrap_or_else(BigInt::one);
            let y = env.get(&1).cloned().unwrap_or_else(BigInt::one);
            let hx = eval_lin_at(ctx, &lin, &x)?;
            let hy = eval_lin_at(ctx, &lin, &y)?;
            for l in 0..=n {
                let l_big = BigInt::from(l);
                let lhs = eval_lin_at(ctx, &lin, &(&x + &l_big * &y))?;
                if lhs != &hx + &l_big * &hy {
                    debug_assert!(false, "window conditions must force additivity");
                    return Ok(None);
                }
            }
            Ok(Some((x, y)))
        }
        NonalgOutcome::Infeasible { .. } => {
            debug_assert!(false, "progression windows are always realizable");
            Ok(None)
        }
        NonalgOutcome::BudgetExhausted => Ok(None),
    }
}
