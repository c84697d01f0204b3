//! `zalpha` — command line for the exact Beatty floor-function solver.
//!
//! Decides quantifier-free constraint systems over the integers extended
//! with `f(x) = floor(alpha*x)`, evaluates terms, enumerates box solutions,
//! searches chain decimals, and runs built-in invariant suites.
//!
//! Reports are byte-identical across runs and thread counts; wall-clock
//! timings are opt-in via `--timings` because they would break that
//! guarantee. JSON reports use one fixed schema for every subcommand:
//! `status`, `witness` (object mapping names to integers rendered as decimal
//! strings, or null), `cases_explored`, `precision_bits`, `certificate`
//! (array of strings), `elapsed_ms` (number with `--timings`, else null).

use std::collections::BTreeMap;
use std::io::Read;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use beatty_core::alg::{self, OneVarSolutions};
use beatty_core::alpha::{self, AlphaRat};
use beatty_core::oracle::{brute_solve, SearchBox};
use beatty_core::rat::Rat;
use beatty_core::relax::{kronecker_search, DecimalWindow};
use beatty_core::syntax::{eval_term, parse_system, parse_term, Term};
use beatty_core::{AlphaPoly, AlphaProvider, BeattyCtx, SolverConfig, Status};

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

/// Report rendering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Human-readable lines.
    Text,
    /// Fixed-schema JSON object.
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "zalpha",
    version,
    about = "Exact solver for integer constraints with f(x) = floor(alpha*x), alpha transcendental",
    long_about = None,
    arg_required_else_help = true
)]
struct Cli {
    /// Alpha: pi | e | ln2 | digits:PATH (default: $BEATTY_ALPHA, else pi).
    /// A digit file holds the integer part on line 1 and decimal digits on
    /// the following lines.
    #[arg(long, global = true)]
    alpha: Option<String>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Candidate budget for density-based witness searches.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: u64,

    /// Hard cap on alpha precision, in bits.
    #[arg(long, global = true, default_value_t = 1 << 20)]
    precision_cap: u32,

    /// Hard limit on case splits.
    #[arg(long, global = true, default_value_t = 1 << 20)]
    case_limit: u64,

    /// Worker threads for scans. Verdicts, reports, and statistics are
    /// identical for every value.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Include wall-clock elapsed_ms in reports. Off by default so that
    /// repeated runs produce byte-identical output.
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Decide a constraint system read from FILE (or stdin when FILE is -).
    /// Exits 0 sat, 1 unsat, 2 feasible-no-witness, 3 error.
    Solve {
        /// Path to the system, or - for stdin.
        file: String,
    },

    /// Evaluate an integer term under an assignment and print its value.
    Eval {
        /// Term, e.g. "f(f(x)) + 2*f(x) - 3".
        term: String,
        /// Comma-separated assignment, e.g. "x=1,y=-2". Every variable in
        /// the term needs a value.
        #[arg(long, default_value = "")]
        env: String,
    },

    /// List every solution of a system inside a finite box, by direct
    /// evaluation. The verdict is relative to the searched box.
    Oracle {
        /// Path to the system, or - for stdin.
        file: String,
        /// Comma-separated inclusive ranges, e.g. "x=-100..100,y=0..50".
        /// Variables not listed get the symmetric default range.
        #[arg(long, default_value = "")]
        r#box: String,
        /// Symmetric bound for variables missing from --box: each scans
        /// [-BOUND, BOUND].
        #[arg(long, default_value_t = 100)]
        bound: i64,
        /// Maximum number of solutions to list.
        #[arg(long, default_value_t = 10_000)]
        limit: usize,
    },

    /// Find an integer x whose chain decimals {alpha*f^level(x)} land in
    /// every target window simultaneously.
    Kronecker {
        /// Semicolon-separated open windows "LEVEL:(LO,HI)" with rational
        /// endpoints, e.g. "0:(1/2,3/5);1:(0,1/4)".
        #[arg(long)]
        targets: String,
    },

    /// Smallest positive x with x = I (mod M) and f(x) = J (mod N).
    Congpair {
        /// Modulus for x (positive).
        m: String,
        /// Residue for x.
        i: String,
        /// Modulus for f(x) (positive).
        n: String,
        /// Residue for f(x).
        j: String,
    },

    /// Find x, y such that h(x + l*y) = h(x) + l*h(y) for every 0 <= l <= N,
    /// for a one-variable expression h built from f-iterates.
    Progression {
        /// Expression, e.g. "f(x)" or "f(f(x)) + f(x)".
        term: String,
        /// Progression length.
        n: u32,
    },

    /// Run a built-in invariant suite on pseudo-random samples (fixed seed;
    /// output is deterministic). Exits 0 when every sample passes, 1
    /// otherwise.
    CheckAxioms {
        /// Suite: order | kronecker | range | K.
        #[arg(long)]
        suite: String,
        /// Sample count.
        #[arg(long, default_value_t = 200)]
        samples: u64,
    },
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Everything a subcommand reports, in both renderings.
struct Report {
    /// Verdict string (solve: sat | unsat | feasible-no-witness).
    status: String,
    /// Witness values as decimal strings, when a witness exists.
    witness: Option<BTreeMap<String, String>>,
    /// Cases or candidates explored.
    cases_explored: u64,
    /// Peak alpha precision (bits) needed to certify the result.
    precision_bits: u32,
    /// Audit trail lines.
    certificate: Vec<String>,
    /// Wall-clock milliseconds; filled only with --timings.
    elapsed_ms: Option<u64>,
    /// Text-format lines (JSON ignores these).
    text: Vec<String>,
}

fn print_text(r: &Report) {
    for line in &r.text {
        println!("{line}");
    }
    if let Some(ms) = r.elapsed_ms {
        println!("elapsed ms: {ms}");
    }
}

fn print_json(r: &Report) {
    let v = serde_json::json!({
        "status": r.status,
        "witness": r.witness,
        "cases_explored": r.cases_explored,
        "precision_bits": r.precision_bits,
        "certificate": r.certificate,
        "elapsed_ms": r.elapsed_ms,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&v).expect("serializing a report cannot fail")
    );
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            // Help and version requests go to stdout and exit 0; genuine
            // usage errors go to stderr and exit 3.
            let informational =
                matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if informational {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            };
        }
    };
    let start = Instant::now();
    match run(&cli) {
        Ok((mut report, code)) => {
            if cli.timings {
                report.elapsed_ms = Some(start.elapsed().as_millis().min(u64::MAX as u128) as u64);
            }
            match cli.format {
                Format::Text => print_text(&report),
                Format::Json => print_json(&report),
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<(Report, ExitCode)> {
    let spec = cli
        .alpha
        .clone()
        .or_else(|| std::env::var("BEATTY_ALPHA").ok().filter(|s| !s.is_empty()))
        .unwrap_or_else(|| "pi".to_string());
    let provider = AlphaProvider::parse_spec(&spec)?;
    let cfg = SolverConfig {
        budget: cli.budget,
        precision_cap: cli.precision_cap,
        case_limit: cli.case_limit,
        threads: cli.threads.max(1),
        ..SolverConfig::default()
    };
    let ctx = BeattyCtx::new(provider, cfg)?;
    match &cli.cmd {
        Cmd::Solve { file } => cmd_solve(&ctx, file),
        Cmd::Eval { term, env } => cmd_eval(&ctx, term, env),
        Cmd::Oracle {
            file,
            r#box,
            bound,
            limit,
        } => cmd_oracle(&ctx, file, r#box, *bound, *limit),
        Cmd::Kronecker { targets } => cmd_kronecker(&ctx, targets),
        Cmd::Congpair { m, i, n, j } => cmd_congpair(&ctx, m, i, n, j),
        Cmd::Progression { term, n } => cmd_progression(&ctx, term, *n),
        Cmd::CheckAxioms { suite, samples } => cmd_check_axioms(&ctx, suite, *samples),
    }
}

/// Reads a source file, with `-` meaning stdin.
fn read_source(file: &str) -> anyhow::Result<String> {
    if file == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .context("reading stdin")?;
        Ok(buf)
    } else {
        std::fs::read_to_string(file).with_context(|| format!("reading {file}"))
    }
}

/// Parses `"x=1,y=-2"` into a name map. Empty input is an empty map.
fn parse_assignments(s: &str) -> anyhow::Result<BTreeMap<String, BigInt>> {
    let mut out = BTreeMap::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, value) = part
            .split_once('=')
            .with_context(|| format!("expected NAME=INT, got '{part}'"))?;
        let name = name.trim().to_string();
        let value: BigInt = value
            .trim()
            .parse()
            .with_context(|| format!("invalid integer in '{part}'"))?;
        if out.insert(name.clone(), value).is_some() {
            bail!("variable '{name}' is assigned twice");
        }
    }
    Ok(out)
}

/// Parses a rational endpoint: `p/q` or a plain integer.
fn parse_rat(s: &str) -> anyhow::Result<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .with_context(|| format!("invalid numerator in '{s}'"))?;
        let d: BigInt = d
            .trim()
            .parse()
            .with_context(|| format!("invalid denominator in '{s}'"))?;
        if d.is_zero() {
            bail!("zero denominator in '{s}'");
        }
        Ok(Rat::new(n, d))
    } else {
        let n: BigInt = s
            .parse()
            .with_context(|| format!("invalid rational '{s}'"))?;
        Ok(Rat::from_integer(n))
    }
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

fn cmd_solve(ctx: &BeattyCtx, file: &str) -> anyhow::Result<(Report, ExitCode)> {
    let src = read_source(file)?;
    let sys = parse_system(&src)?;
    let out = alg::solve_system(ctx, &sys)?;
    let witness: Option<BTreeMap<String, String>> = out
        .witness
        .as_ref()
        .map(|m| m.iter().map(|(k, v)| (k.clone(), v.to_string())).collect());
    let mut text = vec![format!("status: {}", out.status.name())];
    if let Some(w) = &witness {
        for (k, v) in w {
            text.push(format!("{k} = {v}"));
        }
    }
    if !out.certificate.is_empty() {
        text.push("certificate:".to_string());
        for line in &out.certificate {
            text.push(format!("  {line}"));
        }
    }
    text.push(format!("cases explored: {}", out.cases_explored));
    text.push(format!("precision bits: {}", out.precision_bits));
    let code = match out.status {
        Status::Sat => ExitCode::SUCCESS,
        Status::Unsat => ExitCode::from(1),
        Status::FeasibleNoWitness => ExitCode::from(2),
    };
    Ok((
        Report {
            status: out.status.name().to_string(),
            witness,
            cases_explored: out.cases_explored,
            precision_bits: out.precision_bits,
            certificate: out.certificate,
            elapsed_ms: None,
            text,
        },
        code,
    ))
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

fn cmd_eval(ctx: &BeattyCtx, term: &str, env_str: &str) -> anyhow::Result<(Report, ExitCode)> {
    let (t, vars) = parse_term(term)?;
    let assignment = parse_assignments(env_str)?;
    for name in assignment.keys() {
        if !vars.contains(name) {
            bail!("--env assigns '{name}', which does not occur in the term");
        }
    }
    let mut env = Vec::with_capacity(vars.len());
    for v in &vars {
        match assignment.get(v) {
            Some(n) => env.push(n.clone()),
            None => bail!("variable '{v}' has no value; pass --env {v}=<int>"),
        }
    }
    ctx.alpha.reset_peak();
    let value = eval_term(ctx, &env, &t)?;
    let mut witness = BTreeMap::new();
    witness.insert("value".to_string(), value.to_string());
    Ok((
        Report {
            status: "ok".to_string(),
            witness: Some(witness),
            cases_explored: 0,
            precision_bits: ctx.alpha.peak_bits(),
            certificate: Vec::new(),
            elapsed_ms: None,
            text: vec![value.to_string()],
        },
        ExitCode::SUCCESS,
    ))
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

/// Parses `"x=-100..100,y=0..50"` into per-name inclusive ranges.
fn parse_box(s: &str) -> anyhow::Result<BTreeMap<String, (BigInt, BigInt)>> {
    let mut out = BTreeMap::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, range) = part
            .split_once('=')
            .with_context(|| format!("expected NAME=LO..HI, got '{part}'"))?;
        let (lo, hi) = range
            .split_once("..")
            .with_context(|| format!("expected LO..HI in '{part}'"))?;
        let lo: BigInt = lo
            .trim()
            .parse()
            .with_context(|| format!("invalid bound in '{part}'"))?;
        let hi: BigInt = hi
            .trim()
            .parse()
            .with_context(|| format!("invalid bound in '{part}'"))?;
        if lo > hi {
            bail!("empty range in '{part}': {lo} > {hi}");
        }
        if out.insert(name.trim().to_string(), (lo, hi)).is_some() {
            bail!("variable '{}' has two ranges", name.trim());
        }
    }
    Ok(out)
}

fn cmd_oracle(
    ctx: &BeattyCtx,
    file: &str,
    box_str: &str,
    bound: i64,
    limit: usize,
) -> anyhow::Result<(Report, ExitCode)> {
    let src = read_source(file)?;
    let sys = parse_system(&src)?;
    let named = parse_box(box_str)?;
    for name in named.keys() {
        if !sys.vars.contains(name) {
            bail!("--box names '{name}', which does not occur in the system");
        }
    }
    if bound < 0 {
        bail!("--bound must be nonnegative");
    }
    let ranges: Vec<(BigInt, BigInt)> = sys
        .vars
        .iter()
        .map(|v| {
            named
                .get(v)
                .cloned()
                .unwrap_or_else(|| (BigInt::from(-bound), BigInt::from(bound)))
        })
        .collect();
    ctx.alpha.reset_peak();
    let rep = brute_solve(ctx, &sys, &SearchBox::new(ranges), limit)?;
    let hit_lines: Vec<String> = rep
        .hits
        .iter()
        .map(|hit| {
            if sys.vars.is_empty() {
                "(ground system holds)".to_string()
            } else {
                sys.vars
                    .iter()
                    .zip(hit)
                    .map(|(v, n)| format!("{v} = {n}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            }
        })
        .collect();
    let witness: Option<BTreeMap<String, String>> = rep.hits.first().map(|hit| {
        sys.vars
            .iter()
            .cloned()
            .zip(hit.iter().map(|n| n.to_string()))
            .collect()
    });
    let status = if rep.hits.is_empty() { "unsat" } else { "sat" };
    let mut text = hit_lines.clone();
    text.push(format!("total: {}", rep.hits.len()));
    text.push(format!("scanned: {}", rep.scanned));
    if rep.truncated {
        text.push("truncated: solution limit reached, more may exist".to_string());
    }
    let mut certificate = hit_lines;
    certificate.push(format!(
        "verdict is relative to the searched box ({} candidates scanned)",
        rep.scanned
    ));
    if rep.truncated {
        certificate.push("solution list truncated at the limit".to_string());
    }
    Ok((
        Report {
            status: status.to_string(),
            witness,
            cases_explored: rep.scanned.min(u64::MAX as u128) as u64,
            precision_bits: ctx.alpha.peak_bits(),
            certificate,
            elapsed_ms: None,
            text,
        },
        ExitCode::SUCCESS,
    ))
}

// ---------------------------------------------------------------------------
// kronecker
// ---------------------------------------------------------------------------

/// Parses `"0:(1/2,3/5);1:(0,1/4)"` into decimal windows.
fn parse_targets(s: &str) -> anyhow::Result<Vec<DecimalWindow>> {
    let mut out = Vec::new();
    for part in s.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (level, window) = part
            .split_once(':')
            .with_context(|| format!("expected LEVEL:(LO,HI), got '{part}'"))?;
        let level: u32 = level
            .trim()
            .parse()
            .with_context(|| format!("invalid level in '{part}'"))?;
        let inner = window
            .trim()
            .strip_prefix('(')
            .and_then(|w| w.strip_suffix(')'))
            .with_context(|| format!("window must look like (LO,HI) in '{part}'"))?;
        let (lo, hi) = inner
            .split_once(',')
            .with_context(|| format!("expected two endpoints in '{part}'"))?;
        let lo = parse_rat(lo)?;
        let hi = parse_rat(hi)?;
        if lo < Rat::zero() || hi > Rat::one() || lo >= hi {
            bail!("window in '{part}' must satisfy 0 <= LO < HI <= 1");
        }
        out.push(DecimalWindow { level, lo, hi });
    }
    if out.is_empty() {
        bail!("--targets lists no windows");
    }
    Ok(out)
}

fn cmd_kronecker(ctx: &BeattyCtx, targets: &str) -> anyhow::Result<(Report, ExitCode)> {
    let windows = parse_targets(targets)?;
    ctx.alpha.reset_peak();
    let hit = kronecker_search(ctx, &windows, ctx.cfg.budget)?;
    let report = match hit {
        Some(n) => {
            let mut witness = BTreeMap::new();
            witness.insert("x".to_string(), n.to_string());
            Report {
                status: "sat".to_string(),
                witness: Some(witness),
                cases_explored: 0,
                precision_bits: ctx.alpha.peak_bits(),
                certificate: vec![format!(
                    "every chain decimal of {n} was verified inside its window"
                )],
                elapsed_ms: None,
                text: vec![format!("x = {n}")],
            }
        }
        None => Report {
            status: "feasible-no-witness".to_string(),
            witness: None,
            cases_explored: 0,
            precision_bits: ctx.alpha.peak_bits(),
            certificate: vec![format!(
                "no hit among candidates 1..={b} and -1..=-{b}; the windows remain dense",
                b = ctx.cfg.budget
            )],
            elapsed_ms: None,
            text: vec!["no integer found within budget".to_string()],
        },
    };
    Ok((report, ExitCode::SUCCESS))
}

// ---------------------------------------------------------------------------
// congpair
// ---------------------------------------------------------------------------

fn cmd_congpair(
    ctx: &BeattyCtx,
    m: &str,
    i: &str,
    n: &str,
    j: &str,
) -> anyhow::Result<(Report, ExitCode)> {
    let parse = |s: &str, what: &str| -> anyhow::Result<BigInt> {
        s.trim()
            .parse()
            .with_context(|| format!("invalid integer for {what}: '{s}'"))
    };
    let m = parse(m, "M")?;
    let i = parse(i, "I")?;
    let n = parse(n, "N")?;
    let j = parse(j, "J")?;
    ctx.alpha.reset_peak();
    let hit = alg::solve_congruence_pair(ctx, &m, &i, &n, &j)?;
    let report = match hit {
        Some(x) => {
            let mut witness = BTreeMap::new();
            witness.insert("x".to_string(), x.to_string());
            Report {
                status: "sat".to_string(),
                witness: Some(witness),
                cases_explored: 0,
                precision_bits: ctx.alpha.peak_bits(),
                certificate: vec![format!(
                    "x = {x} satisfies x = {} (mod {}) and f(x) = {} (mod {})",
                    i, m, j, n
                )],
                elapsed_ms: None,
                text: vec![format!("x = {x}")],
            }
        }
        None => Report {
            status: "feasible-no-witness".to_string(),
            witness: None,
            cases_explored: 0,
            precision_bits: ctx.alpha.peak_bits(),
            certificate: vec![
                "no hit within budget; such x exist for every residue pair".to_string()
            ],
            elapsed_ms: None,
            text: vec!["no solution within budget".to_string()],
        },
    };
    Ok((report, ExitCode::SUCCESS))
}

// ---------------------------------------------------------------------------
// progression
// ---------------------------------------------------------------------------

fn cmd_progression(ctx: &BeattyCtx, term: &str, n: u32) -> anyhow::Result<(Report, ExitCode)> {
    let (t, _vars) = parse_term(term)?;
    ctx.alpha.reset_peak();
    let hit = alg::find_progression(ctx, &t, n)?;
    let report = match hit {
        Some((x, y)) => {
            let mut witness = BTreeMap::new();
            witness.insert("x".to_string(), x.to_string());
            witness.insert("y".to_string(), y.to_string());
            Report {
                status: "sat".to_string(),
                witness: Some(witness),
                cases_explored: 0,
                precision_bits: ctx.alpha.peak_bits(),
                certificate: vec![format!(
                    "h(x + l*y) = h(x) + l*h(y) verified exactly for l = 0..={n}"
                )],
                elapsed_ms: None,
                text: vec![format!("x = {x}"), format!("y = {y}")],
            }
        }
        None => Report {
            status: "none".to_string(),
            witness: None,
            cases_explored: 0,
            precision_bits: ctx.alpha.peak_bits(),
            certificate: vec![
                "no pair found: the expression admits none, or the search budget ran out"
                    .to_string(),
            ],
            elapsed_ms: None,
            text: vec!["no pair found".to_string()],
        },
    };
    Ok((report, ExitCode::SUCCESS))
}

// ---------------------------------------------------------------------------
// check-axioms
// ---------------------------------------------------------------------------

/// One-variable expression families used by the range and step suites:
/// name and `(coefficient, f-iterate level)` pairs.
const FAMILIES: &[(&str, &[(i64, u32)])] = &[
    ("f(x)", &[(1, 1)]),
    ("f^2(x)", &[(1, 2)]),
    ("f(x)+x", &[(1, 1), (1, 0)]),
    ("2*f(x)-x", &[(2, 1), (-1, 0)]),
    ("f^2(x)+f(x)", &[(1, 2), (1, 1)]),
];

fn family_terms(idx: usize) -> Vec<(BigInt, u32)> {
    FAMILIES[idx]
        .1
        .iter()
        .map(|&(n, l)| (BigInt::from(n), l))
        .collect()
}

fn cmd_check_axioms(
    ctx: &BeattyCtx,
    suite: &str,
    samples: u64,
) -> anyhow::Result<(Report, ExitCode)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEA7_7E57);
    ctx.alpha.reset_peak();
    let canonical = match suite {
        s if s.eq_ignore_ascii_case("order") => "order",
        s if s.eq_ignore_ascii_case("kronecker") => "kronecker",
        s if s.eq_ignore_ascii_case("range") => "range",
        s if s.eq_ignore_ascii_case("k") => "K",
        other => bail!("unknown suite '{other}' (expected order, kronecker, range, or K)"),
    };
    let (passed, failures) = match canonical {
        "order" => suite_order(ctx, samples, &mut rng)?,
        "kronecker" => suite_kronecker(ctx, samples, &mut rng)?,
        "range" => suite_range(ctx, samples, &mut rng)?,
        _ => suite_step(ctx, samples, &mut rng)?,
    };
    let all_ok = passed == samples;
    let mut text = vec![format!("suite {canonical}: {passed}/{samples} passed")];
    const SHOWN: usize = 10;
    for line in failures.iter().take(SHOWN) {
        text.push(format!("failed: {line}"));
    }
    if failures.len() > SHOWN {
        text.push(format!("... and {} more failures", failures.len() - SHOWN));
    }
    let mut certificate = vec![format!("suite {canonical}: {passed}/{samples} passed")];
    certificate.extend(failures.iter().take(SHOWN).cloned());
    Ok((
        Report {
            status: if all_ok { "ok" } else { "failed" }.to_string(),
            witness: None,
            cases_explored: samples,
            precision_bits: ctx.alpha.peak_bits(),
            certificate,
            elapsed_ms: None,
            text,
        },
        if all_ok {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        },
    ))
}

/// Floor bracketing, monotonicity, and the two-valued successor step.
fn suite_order(
    ctx: &BeattyCtx,
    samples: u64,
    rng: &mut ChaCha8Rng,
) -> anyhow::Result<(u64, Vec<String>)> {
    let alpha_floor = alpha::floor_of(&ctx.alpha, &AlphaRat::from_poly(AlphaPoly::alpha_pow(1)))?;
    let mut passed = 0u64;
    let mut failures = Vec::new();
    for _ in 0..samples {
        let x = BigInt::from(rng.gen_range(-1_000_000i64..=1_000_000));
        let step = rng.gen_range(0i64..=1000);
        let y = &x + BigInt::from(step);
        let mut ok = true;
        // 0 <= alpha*x - f(x) < 1, exactly.
        let p = ctx.frac_poly(&x)?;
        if alpha::poly_sign(&ctx.alpha, &p)? < 0
            || alpha::poly_sign(&ctx.alpha, &p.sub(&AlphaPoly::one()))? >= 0
        {
            ok = false;
            failures.push(format!("x = {x}: fractional part escapes [0, 1)"));
        }
        // Monotone: x <= y implies f(x) <= f(y).
        if ok && ctx.apply_f(&x)? > ctx.apply_f(&y)? {
            ok = false;
            failures.push(format!("x = {x}, y = {y}: f is not monotone"));
        }
        // f(x+1) - f(x) is floor(alpha) or floor(alpha) + 1.
        if ok {
            let d = ctx.apply_f(&(&x + 1))? - ctx.apply_f(&x)?;
            if d != alpha_floor && d != &alpha_floor + 1 {
                ok = false;
                failures.push(format!("x = {x}: successor step {d} is out of range"));
            }
        }
        if ok {
            passed += 1;
        }
    }
    Ok((passed, failures))
}

/// Random decimal windows of width 1/20 are always hit, and hits verify.
fn suite_kronecker(
    ctx: &BeattyCtx,
    samples: u64,
    rng: &mut ChaCha8Rng,
) -> anyhow::Result<(u64, Vec<String>)> {
    let mut passed = 0u64;
    let mut failures = Vec::new();
    for _ in 0..samples {
        let two_levels = rng.gen_bool(0.5);
        let levels: &[u32] = if two_levels {
            &[0, 1]
        } else {
            &[rng.gen_range(0..=1)]
        };
        let windows: Vec<DecimalWindow> = levels
            .iter()
            .map(|&level| {
                let a = rng.gen_range(0i64..=37);
                let lo = Rat::new(BigInt::from(a), BigInt::from(40));
                let hi = &lo + Rat::new(BigInt::from(2), BigInt::from(40));
                DecimalWindow { level, lo, hi }
            })
            .collect();
        let desc: Vec<String> = windows
            .iter()
            .map(|w| format!("{}:({},{})", w.level, w.lo, w.hi))
            .collect();
        let desc = desc.join(";");
        match kronecker_search(ctx, &windows, ctx.cfg.budget)? {
            Some(n) => {
                let mut verified = true;
                for w in &windows {
                    let d = ctx.frac_chain_poly(&n, w.level)?;
                    let above =
                        alpha::poly_sign(&ctx.alpha, &d.sub(&AlphaPoly::from_rat(w.lo.clone())))?
                            > 0;
                    let below =
                        alpha::poly_sign(&ctx.alpha, &AlphaPoly::from_rat(w.hi.clone()).sub(&d))?
                            > 0;
                    if !above || !below {
                        verified = false;
                    }
                }
                if verified {
                    passed += 1;
                } else {
                    failures.push(format!("windows {desc}: hit {n} fails verification"));
                }
            }
            None => failures.push(format!("windows {desc}: no hit within budget")),
        }
    }
    Ok((passed, failures))
}

/// Every window of K consecutive values contains a value of H, and (when the
/// linear coefficient exceeds 1) close H-values force close arguments.
fn suite_range(
    ctx: &BeattyCtx,
    samples: u64,
    rng: &mut ChaCha8Rng,
) -> anyhow::Result<(u64, Vec<String>)> {
    let terms: Vec<Term> = FAMILIES
        .iter()
        .map(|(src, _)| parse_term(src).map(|(t, _)| t))
        .collect::<Result<_, _>>()?;
    let mut passed = 0u64;
    let mut failures = Vec::new();
    for _ in 0..samples {
        let idx = rng.gen_range(0..FAMILIES.len());
        let (name, _) = FAMILIES[idx];
        let coeffs = family_terms(idx);
        let k = ctx.range_window_constant(&coeffs)?;
        let k_i64 = k
            .to_i64()
            .context("range window constant does not fit in i64")?;
        let a = BigInt::from(rng.gen_range(-10_000i64..=10_000));
        let mut ok = true;
        // Forward: some x has H(x) in [a, a + K).
        let mut found = false;
        let mut target = a.clone();
        for _ in 0..k_i64 {
            match alg::solve_one_var(ctx, &terms[idx], &target)? {
                OneVarSolutions::AllIntegers => {
                    found = true;
                }
                OneVarSolutions::Finite(v) if !v.is_empty() => {
                    found = true;
                }
                OneVarSolutions::Finite(_) => {}
            }
            if found {
                break;
            }
            target += 1;
        }
        if !found {
            ok = false;
            failures.push(format!(
                "H = {name}: no value in the window [{a}, {a} + {k})"
            ));
        }
        // Reverse (needs linear coefficient > 1): arguments more than K
        // apart have H-values more than K apart.
        let f_poly = ctx.linear_coefficient(&coeffs);
        let reverse_applies = alpha::poly_sign(&ctx.alpha, &f_poly.sub(&AlphaPoly::one()))? > 0;
        if ok && reverse_applies {
            let x0 = BigInt::from(rng.gen_range(-10_000i64..=10_000));
            let gap = &k + BigInt::from(rng.gen_range(1i64..=100));
            let x1 = &x0 + &gap;
            let spread = (ctx.eval_one_var(&coeffs, &x1)? - ctx.eval_one_var(&coeffs, &x0)?).abs();
            if spread <= k {
                ok = false;
                failures.push(format!(
                    "H = {name}: arguments {x0} and {x1} are {gap} apart but values are within {k}"
                ));
            }
        }
        if ok {
            passed += 1;
        }
    }
    Ok((passed, failures))
}

/// Consecutive values of H never jump by the step bound or more.
fn suite_step(
    ctx: &BeattyCtx,
    samples: u64,
    rng: &mut ChaCha8Rng,
) -> anyhow::Result<(u64, Vec<String>)> {
    let mut passed = 0u64;
    let mut failures = Vec::new();
    for _ in 0..samples {
        let idx = rng.gen_range(0..FAMILIES.len());
        let (name, _) = FAMILIES[idx];
        let coeffs = family_terms(idx);
        let k = ctx.step_bound(&coeffs)?;
        let x = BigInt::from(rng.gen_range(-1_000_000i64..=1_000_000));
        let d = (ctx.eval_one_var(&coeffs, &(&x + 1))? - ctx.eval_one_var(&coeffs, &x)?).abs();
        if d < k {
            passed += 1;
        } else {
            failures.push(format!("H = {name}: step at x = {x} is {d}, bound is {k}"));
        }
    }
    Ok((passed, failures))
}
