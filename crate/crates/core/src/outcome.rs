//! Final verdicts reported by the solvers.

use std::collections::BTreeMap;

use num_bigint::BigInt;

/// Solver verdict for a constraint system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// A verified witness was found.
    Sat,
    /// The system has no integer solutions; a certificate explains why.
    Unsat,
    /// The system passed every feasibility test but the witness search
    /// exhausted its budget. Distinct from both other verdicts: nothing is
    /// claimed beyond "no witness found within budget".
    FeasibleNoWitness,
}

impl Status {
    /// Stable lowercase name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            Status::Sat => "sat",
            Status::Unsat => "unsat",
            Status::FeasibleNoWitness => "feasible-no-witness",
        }
    }
}

/// Outcome of a solve, including the data needed to reproduce and audit it.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    /// The verdict.
    pub status: Status,
    /// Verified witness (original variables only), present exactly for
    /// [`Status::Sat`].
    pub witness: Option<BTreeMap<String, BigInt>>,
    /// Number of case/branch units the canonical sequential exploration
    /// entered before the verdict was reached.
    pub cases_explored: u64,
    /// Nominal precision (bits of `alpha`) needed to certify the verdict:
    /// the ladder peak observed while re-verifying the reported result.
    pub precision_bits: u32,
    /// Human-readable audit trail: refutation chains for unsatisfiable
    /// verdicts, route notes otherwise.
    pub certificate: Vec<String>,
}

impl SolveOutcome {
    /// A satisfiable outcome with a verified witness.
    pub fn sat(witness: BTreeMap<String, BigInt>) -> Self {
        SolveOutcome {
            status: Status::Sat,
            witness: Some(witness),
            cases_explored: 0,
            precision_bits: 0,
            certificate: Vec::new(),
        }
    }

    /// An unsatisfiable outcome backed by a certificate.
    pub fn unsat(certificate: Vec<String>) -> Self {
        SolveOutcome {
            status: Status::Unsat,
            witness: None,
            cases_explored: 0,
            precision_bits: 0,
            certificate,
        }
    }

    /// A budget-exhausted outcome.
    pub fn feasible_no_witness(certificate: Vec<String>) -> Self {
        SolveOutcome {
            status: Status::FeasibleNoWitness,
            witness: None,
            cases_explored: 0,
            precision_bits: 0,
            certificate,
        }
    }
}
