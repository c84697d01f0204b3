//! Exact decision procedures for quantifier-free constraint systems over the
//! integers extended with the map `f(x) = floor(alpha * x)`, where `alpha` is
//! a fixed positive transcendental real (built-in `pi`, `e`, `ln2`, or a
//! user-supplied decimal digit file).
//!
//! The crate is organized as a pipeline:
//!
//! * [`alpha`] — exact arithmetic in the field Q(alpha): polynomials and
//!   rational functions in `alpha` with arbitrary-precision rational
//!   coefficients, plus sign / floor / comparison queries answered by
//!   interval refinement against a deterministic precision ladder.
//! * [`ctx`] — integer-level semantics: evaluating `f` and its iterates,
//!   fractional parts as exact degree-1 polynomials, step bounds, and
//!   preimage enumeration for `floor(F(alpha) * x) = A`.
//! * [`syntax`] — the constraint language: terms built from integer linear
//!   arithmetic, `f`-applications and `frac(t) = alpha*t - f(t)`, a
//!   recursive-descent parser, congruence desugaring, and normalization of a
//!   system into finitely many canonical cases.
//! * [`relax`] — the non-algebraic engine: strict linear relaxations over
//!   fractional-part variables, Fourier–Motzkin elimination with refutation
//!   certificates, rational target boxes, and a density-based witness search.
//! * [`alg`] — the algebraic engine: equation preprocessing, single-variable
//!   enumeration, class analysis of floor coefficients, slack decomposition,
//!   and the top-level solver driver combining every route.
//! * [`oracle`] — an independent brute-force reference: direct evaluation of
//!   original systems over finite boxes, used to cross-check the solver.
//!
//! All results are exact. Every satisfiable verdict carries a witness that
//! has been re-verified against the original input system; every unsatisfiable
//! verdict is backed by an enumeration of cases together with a refutation
//! certificate for each. Searches that exhaust their budget return a distinct
//! "feasible but no witness found" status rather than guessing.

#![warn(missing_docs)]
#![warn(clippy::all)]

pub mod alg;
pub mod alpha;
pub mod ctx;
pub mod error;
pub mod oracle;
pub mod outcome;
pub mod rat;
pub mod relax;
pub mod syntax;

pub use alpha::{AlphaPoly, AlphaProvider, AlphaRat};
pub use ctx::{BeattyCtx, SolverConfig};
pub use error::{Error, Result};
pub use outcome::{SolveOutcome, Status};
