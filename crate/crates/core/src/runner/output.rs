//! Recognizer for solver output.
//!
//! Line-oriented: an `ANSWER` line is followed by one line of facts, then
//! `UNSATISFIABLE`, `COST <int>` and `OPTIMUM FOUND` lines may appear in any
//! order. The last answer and the last cost win, so anytime optimizers may
//! print several improving answers.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::catalog::{OutputKeywords, Task};
use crate::syntax::{parse_facts, Atom};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Claim {
    SatWitness(BTreeSet<Atom>),
    Unsat,
    CostWitness(BTreeSet<Atom>, i64),
    OptimumFound(BTreeSet<Atom>, i64),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimKind {
    Sat,
    Unsat,
    Cost,
    Optimum,
    None,
}

impl ClaimKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClaimKind::Sat => "sat",
            ClaimKind::Unsat => "unsat",
            ClaimKind::Cost => "cost",
            ClaimKind::Optimum => "optimum",
            ClaimKind::None => "none",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "sat" => ClaimKind::Sat,
            "unsat" => ClaimKind::Unsat,
            "cost" => ClaimKind::Cost,
            "optimum" => ClaimKind::Optimum,
            "none" => ClaimKind::None,
            _ => return None,
        })
    }
}

impl Claim {
    pub fn kind(&self) -> ClaimKind {
        match self {
            Claim::SatWitness(_) => ClaimKind::Sat,
            Claim::Unsat => ClaimKind::Unsat,
            Claim::CostWitness(..) => ClaimKind::Cost,
            Claim::OptimumFound(..) => ClaimKind::Optimum,
            Claim::None => ClaimKind::None,
        }
    }

    pub fn cost(&self) -> Option<i64> {
        match self {
            Claim::CostWitness(_, c) | Claim::OptimumFound(_, c) => Some(*c),
            _ => None,
        }
    }

    pub fn atoms(&self) -> Option<&BTreeSet<Atom>> {
        match self {
            Claim::SatWitness(a) | Claim::CostWitness(a, _) | Claim::OptimumFound(a, _) => Some(a),
            Claim::Unsat | Claim::None => None,
        }
    }
}

/// The recognized claim and, when the output was rejected, why.
pub fn parse_solver_output(
    text: &str,
    task: Task,
    keywords: &OutputKeywords,
) -> (Claim, Option<String>) {
    let mut answer: Option<BTreeSet<Atom>> = None;
    let mut cost: Option<i64> = None;
    let (mut unsat, mut optimum) = (false, false);
    let mut lines = text.lines().enumerate();
    while let Some((k, line)) = lines.next() {
        let line = line.trim();
        if line == keywords.answer {
            let atoms = lines.next().map_or("", |(_, l)| l);
            match parse_facts(atoms) {
                Ok(a) => answer = Some(a.into_iter().collect()),
                Err(e) => {
                    return (
                        Claim::None,
                        Some(format!("malformed witness after line {}: {e}", k + 1)),
                    )
                }
            }
        } else if line == keywords.unsat {
            unsat = true;
        } else if line == keywords.optimum {
            optimum = true;
        } else if let Some(rest) = line.strip_prefix(keywords.cost.as_str()) {
            match rest.trim().parse::<i64>() {
                Ok(c) if rest.starts_with(char::is_whitespace) => cost = Some(c),
                _ => {
                    return (
                        Claim::None,
                        Some(format!("malformed cost on line {}", k + 1)),
                    )
                }
            }
        }
    }

    match (answer, unsat) {
        (Some(_), true) => (
            Claim::None,
            Some("both an answer and unsatisfiability reported".into()),
        ),
        (None, true) => (Claim::Unsat, None),
        (None, false) => (Claim::None, None),
        (Some(atoms), false) => match (task, cost) {
            (Task::Optimization, Some(c)) if optimum => (Claim::OptimumFound(atoms, c), None),
            (Task::Optimization, Some(c)) => (Claim::CostWitness(atoms, c), None),
            (Task::Optimization, None) => (
                Claim::None,
                Some("answer to an optimization problem without cost".into()),
            ),
            (_, _) => (Claim::SatWitness(atoms), None),
        },
    }
}
