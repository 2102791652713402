//! Domain scores, disqualification and leaderboards.
//!
//! Decision and query domains score `S(D) = N_S * 100 / N`. Optimization
//! domains score either
//!
//! ```text
//! S1(D) = Σ_I M_S(I) * 100 / (M * N)
//! S2(D) = N_S * 100 / N      (N_S counts confirmed optima and unsatisfiability)
//! ```
//!
//! where `M_S(I)` is the number of participants that produced nothing
//! strictly better than `S` on `I` (0 when `S` produced nothing). Any wrong
//! answer in a domain zeroes that domain.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::catalog::{Catalog, Category, Task};
use crate::classify::Subtrack;
use crate::runner::{ClaimKind, RunRecord, RunStatus};

pub type Score = Ratio<i128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Solved instances only, every domain.
    Decision,
    /// Relative solution quality in optimization domains.
    #[default]
    S1,
    /// Confirmed optima in optimization domains.
    S2,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoreError {
    #[error("domain `{domain}`, instance `{instance}`: {unsat:?} report unsatisfiable, {solution:?} present verified solutions")]
    InconsistentClaims {
        domain: String,
        instance: String,
        unsat: Vec<String>,
        solution: Vec<String>,
    },
    #[error("domain `{0}` has no instances to score")]
    NoInstances(String),
}

pub fn score_value(s: &Score) -> f64 {
    s.to_f64().unwrap_or(f64::NAN)
}

fn ser_score<S: Serializer>(s: &Score, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_f64(score_value(s))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainScore {
    pub system: String,
    pub domain: String,
    #[serde(serialize_with = "ser_score")]
    pub score: Score,
    pub disqualified: bool,
    pub solved: usize,
    /// Wall-clock over all attempted instances, timeouts at the full limit.
    pub runtime_s: f64,
}

/// What one system delivered on one optimization instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    NoAnswer,
    Unsat,
    Solution { cost: i64, confirmed: bool },
}

impl Outcome {
    pub fn of(record: &RunRecord) -> Outcome {
        if record.witness_ok == Some(false) {
            return Outcome::NoAnswer;
        }
        match (record.status, record.claim, record.cost) {
            (RunStatus::Solved, ClaimKind::Unsat, _) => Outcome::Unsat,
            (RunStatus::Solved, ClaimKind::Optimum, Some(cost)) => Outcome::Solution {
                cost,
                confirmed: true,
            },
            (RunStatus::Solved | RunStatus::Timeout, ClaimKind::Cost, Some(cost)) => {
                Outcome::Solution {
                    cost,
                    confirmed: false,
                }
            }
            _ => Outcome::NoAnswer,
        }
    }

    /// Lower is better: unsatisfiability, then cost, then confirmation.
    fn key(self) -> Option<(u8, i64, u8)> {
        match self {
            Outcome::NoAnswer => None,
            Outcome::Unsat => Some((0, 0, 0)),
            Outcome::Solution { cost, confirmed } => Some((1, cost, u8::from(!confirmed))),
        }
    }

    pub fn strictly_better(self, other: Outcome) -> bool {
        match (self.key(), other.key()) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            (None, _) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceComparison {
    pub instance: String,
    /// Every participant; absent answers are `NoAnswer`.
    pub outcomes: BTreeMap<String, Outcome>,
}

impl InstanceComparison {
    pub fn m(&self) -> usize {
        self.outcomes.len()
    }

    /// Participants with nothing strictly better than `system`, itself
    /// included; 0 when `system` has no answer.
    pub fn m_s(&self, system: &str) -> usize {
        let mine = self
            .outcomes
            .get(system)
            .copied()
            .unwrap_or(Outcome::NoAnswer);
        if mine == Outcome::NoAnswer {
            return 0;
        }
        self.outcomes
            .values()
            .filter(|o| !o.strictly_better(mine))
            .count()
    }
}

/// Per-instance comparisons over `participants`; an unrefuted
/// unsatisfiability claim next to a verified solution is an error.
pub fn compare_instances(
    domain: &str,
    records: &[&RunRecord],
    participants: &[String],
) -> Result<Vec<InstanceComparison>, ScoreError> {
    let mut by_instance: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        by_instance.entry(r.instance.as_str()).or_default().push(r);
    }
    let mut out = Vec::new();
    for (instance, rs) in by_instance {
        let unsat: Vec<String> = rs
            .iter()
            .filter(|r| Outcome::of(r) == Outcome::Unsat)
            .map(|r| r.system.clone())
            .collect();
        let solution: Vec<String> = rs
            .iter()
            .filter(|r| {
                r.witness_ok == Some(true) && matches!(Outcome::of(r), Outcome::Solution { .. })
            })
            .map(|r| r.system.clone())
            .collect();
        if !unsat.is_empty() && !solution.is_empty() {
            return Err(ScoreError::InconsistentClaims {
                domain: domain.to_string(),
                instance: instance.to_string(),
                unsat,
                solution,
            });
        }
        let mut outcomes: BTreeMap<String, Outcome> = participants
            .iter()
            .map(|p| (p.clone(), Outcome::NoAnswer))
            .collect();
        for r in rs {
            if let Some(slot) = outcomes.get_mut(&r.system) {
                *slot = Outcome::of(r);
            }
        }
        out.push(InstanceComparison {
            instance: instance.to_string(),
            outcomes,
        });
    }
    Ok(out)
}

fn runtime(records: &[&RunRecord], time_limit_s: f64) -> f64 {
    records
        .iter()
        .map(|r| match r.status {
            RunStatus::Timeout => r.wall_s.max(time_limit_s),
            _ => r.wall_s,
        })
        .sum()
}

fn disqualified(records: &[&RunRecord]) -> bool {
    records.iter().any(|r| r.witness_ok == Some(false))
}

fn ratio(numerator: usize, denominator: usize) -> Score {
    Ratio::new(numerator as i128 * 100, denominator as i128)
}

fn finish(
    system: &str,
    domain: &str,
    records: &[&RunRecord],
    score: Score,
    solved: usize,
    time_limit_s: f64,
) -> DomainScore {
    let dq = disqualified(records);
    DomainScore {
        system: system.to_string(),
        domain: domain.to_string(),
        score: if dq { Score::zero() } else { score },
        disqualified: dq,
        solved,
        runtime_s: runtime(records, time_limit_s),
    }
}

/// `S(D)` from one system's records in a domain of `n` instances.
pub fn score_decision(
    system: &str,
    domain: &str,
    records: &[&RunRecord],
    n: usize,
    time_limit_s: f64,
) -> DomainScore {
    let solved = records
        .iter()
        .filter(|r| r.status == RunStatus::Solved && r.claim != ClaimKind::None)
        .count();
    finish(
        system,
        domain,
        records,
        ratio(solved, n.max(1)),
        solved,
        time_limit_s,
    )
}

/// `S2(D)` from one system's records in a domain of `n` instances.
pub fn score_opt_s2(
    system: &str,
    domain: &str,
    records: &[&RunRecord],
    n: usize,
    time_limit_s: f64,
) -> DomainScore {
    let solved = records
        .iter()
        .filter(|r| {
            r.status == RunStatus::Solved
                && matches!(r.claim, ClaimKind::Optimum | ClaimKind::Unsat)
        })
        .count();
    finish(
        system,
        domain,
        records,
        ratio(solved, n.max(1)),
        solved,
        time_limit_s,
    )
}

/// `S1(D)` for every participant of a domain of `n` instances.
pub fn score_opt_s1(
    domain: &str,
    records: &[&RunRecord],
    participants: &[String],
    n: usize,
    time_limit_s: f64,
) -> Result<Vec<DomainScore>, ScoreError> {
    let comparisons = compare_instances(domain, records, participants)?;
    let m = participants.len().max(1) as i128;
    let denominator = m * n.max(1) as i128;
    Ok(participants
        .iter()
        .map(|p| {
            let mine: Vec<&RunRecord> =
                records.iter().copied().filter(|r| &r.system == p).collect();
            let total: i128 = comparisons.iter().map(|c| c.m_s(p) as i128).sum();
            let answered = comparisons.iter().filter(|c| c.m_s(p) > 0).count();
            finish(
                p,
                domain,
                &mine,
                Ratio::new(total * 100, denominator),
                answered,
                time_limit_s,
            )
        })
        .collect())
}

/// Scores of one domain for all `participants` under `scheme`; decision
/// and query domains always use `S(D)`.
pub fn score_domain(
    scheme: Scheme,
    task: Task,
    domain: &str,
    records: &[&RunRecord],
    participants: &[String],
    n: usize,
    time_limit_s: f64,
) -> Result<Vec<DomainScore>, ScoreError> {
    if n == 0 {
        return Err(ScoreError::NoInstances(domain.to_string()));
    }
    if task == Task::Optimization && scheme == Scheme::S1 {
        return score_opt_s1(domain, records, participants, n, time_limit_s);
    }
    Ok(participants
        .iter()
        .map(|p| {
            let mine: Vec<&RunRecord> =
                records.iter().copied().filter(|r| &r.system == p).collect();
            if task == Task::Optimization && scheme == Scheme::S2 {
                score_opt_s2(p, domain, &mine, n, time_limit_s)
            } else {
                score_decision(p, domain, &mine, n, time_limit_s)
            }
        })
        .collect())
}

/// Scores every domain that has records, for all systems of `category`.
/// `n` per domain comes from `domain_sizes` when given, otherwise from the
/// distinct instances in the log.
pub fn score_records(
    catalog: &Catalog,
    records: &[RunRecord],
    scheme: Scheme,
    category: Category,
    domain_sizes: Option<&BTreeMap<String, usize>>,
) -> Result<Vec<DomainScore>, ScoreError> {
    let participants: Vec<String> = catalog
        .systems_in(category)
        .iter()
        .map(|s| s.name.clone())
        .collect();
    let mut by_domain: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        if let Some(inst) = catalog.instance(&r.instance) {
            by_domain.entry(inst.domain.as_str()).or_default().push(r);
        }
    }
    let limit = catalog.config.time_limit_s as f64;
    let mut out = Vec::new();
    for domain in &catalog.domains {
        let Some(rs) = by_domain.get(domain.name.as_str()) else {
            continue;
        };
        let n = match domain_sizes.and_then(|s| s.get(&domain.name)) {
            Some(&n) => n,
            None => rs
                .iter()
                .map(|r| &r.instance)
                .collect::<BTreeSet<_>>()
                .len(),
        };
        out.extend(score_domain(
            scheme,
            domain.task,
            &domain.name,
            rs,
            &participants,
            n,
            limit,
        )?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeaderboardEntry {
    pub rank: usize,
    pub system: String,
    #[serde(serialize_with = "ser_score")]
    pub total: Score,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Leaderboard {
    pub overall: Vec<LeaderboardEntry>,
    pub subtracks: BTreeMap<Subtrack, Vec<LeaderboardEntry>>,
}

/// Orders `(system, total, runtime)` by descending total, then ascending
/// runtime; equal pairs share a rank.
pub fn rank_totals(totals: Vec<(String, Score, f64)>) -> Vec<LeaderboardEntry> {
    let mut totals = totals;
    totals.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then(a.2.partial_cmp(&b.2).unwrap_or(Ordering::Equal))
            .then_with(|| a.0.cmp(&b.0))
    });
    let mut out: Vec<LeaderboardEntry> = Vec::with_capacity(totals.len());
    for (k, (system, total, runtime_s)) in totals.into_iter().enumerate() {
        let rank = match out.last() {
            Some(prev) if prev.total == total && prev.runtime_s == runtime_s => prev.rank,
            _ => k + 1,
        };
        out.push(LeaderboardEntry {
            rank,
            system,
            total,
            runtime_s,
        });
    }
    out
}

fn board<'a>(scores: impl Iterator<Item = &'a DomainScore>) -> Vec<LeaderboardEntry> {
    let mut sums: BTreeMap<&str, (Score, f64)> = BTreeMap::new();
    for s in scores {
        let e = sums.entry(&s.system).or_insert((Score::zero(), 0.0));
        e.0 += s.score;
        e.1 += s.runtime_s;
    }
    rank_totals(
        sums.into_iter()
            .map(|(k, (t, r))| (k.to_string(), t, r))
            .collect(),
    )
}

/// Overall board plus one board per sub-track of the scored domains.
pub fn rank(scores: &[DomainScore], subtrack_of: impl Fn(&str) -> Option<Subtrack>) -> Leaderboard {
    let mut subtracks = BTreeMap::new();
    for t in Subtrack::ALL {
        let in_track: Vec<&DomainScore> = scores
            .iter()
            .filter(|s| subtrack_of(&s.domain) == Some(t))
            .collect();
        if !in_track.is_empty() {
            subtracks.insert(t, board(in_track.into_iter()));
        }
    }
    Leaderboard {
        overall: board(scores.iter()),
        subtracks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(
        system: &str,
        instance: &str,
        status: RunStatus,
        claim: ClaimKind,
        cost: Option<i64>,
    ) -> RunRecord {
        RunRecord {
            system: system.into(),
            instance: instance.into(),
            status,
            wall_s: 10.0,
            cpu_s: 10.0,
            peak_mem_bytes: 0,
            claim,
            cost,
            witness_path: None,
            witness_ok: None,
            diagnostic: None,
        }
    }

    fn solved(k: usize) -> Vec<RunRecord> {
        (0..k)
            .map(|i| {
                rec(
                    "a",
                    &format!("i{i}"),
                    RunStatus::Solved,
                    ClaimKind::Sat,
                    None,
                )
            })
            .collect()
    }

    #[test]
    fn decision() {
        let rs = solved(13);
        let refs: Vec<&RunRecord> = rs.iter().collect();
        let s = score_decision("a", "d", &refs, 20, 1200.0);
        assert_eq!(s.score, Ratio::from_integer(65));
        assert!(!s.disqualified);

        let mut rs = solved(20);
        rs[19].witness_ok = Some(false);
        let refs: Vec<&RunRecord> = rs.iter().collect();
        let s = score_decision("a", "d", &refs, 20, 1200.0);
        assert_eq!((s.score, s.disqualified), (Score::zero(), true));

        let s = score_decision("a", "d", &[], 20, 1200.0);
        assert_eq!((s.score, s.disqualified), (Score::zero(), false));
    }

    #[test]
    fn s1_worked_example() {
        let rs = [
            rec("A", "i", RunStatus::Solved, ClaimKind::Optimum, Some(7)),
            rec("B", "i", RunStatus::Timeout, ClaimKind::Cost, Some(7)),
        ];
        let refs: Vec<&RunRecord> = rs.iter().collect();
        let participants = ["A".to_string(), "B".into(), "C".into()];
        let cmp = compare_instances("d", &refs, &participants).unwrap();
        assert_eq!(
            (cmp[0].m_s("A"), cmp[0].m_s("B"), cmp[0].m_s("C")),
            (3, 2, 0)
        );
        let scores = score_opt_s1("d", &refs, &participants, 20, 1200.0).unwrap();
        let values: Vec<Score> = scores.iter().map(|s| s.score).collect();
        assert_eq!(
            values,
            [Ratio::from_integer(5), Ratio::new(10, 3), Score::zero()]
        );
    }

    #[test]
    fn s1_single_system_and_s2() {
        let rs: Vec<RunRecord> = (0..20)
            .map(|i| {
                rec(
                    "A",
                    &format!("i{i}"),
                    RunStatus::Timeout,
                    ClaimKind::Cost,
                    Some(i),
                )
            })
            .collect();
        let refs: Vec<&RunRecord> = rs.iter().collect();
        let s1 = score_opt_s1("d", &refs, &["A".to_string()], 20, 1200.0).unwrap();
        assert_eq!(s1[0].score, Ratio::from_integer(100));
        let s2 = score_opt_s2("A", "d", &refs, 20, 1200.0);
        assert_eq!(s2.score, Score::zero());
        assert_eq!(s2.runtime_s, 20.0 * 1200.0);

        let seven: Vec<RunRecord> = (0..7)
            .map(|i| {
                rec(
                    "A",
                    &format!("i{i}"),
                    RunStatus::Solved,
                    ClaimKind::Optimum,
                    Some(1),
                )
            })
            .collect();
        let refs: Vec<&RunRecord> = seven.iter().collect();
        assert_eq!(
            score_opt_s2("A", "d", &refs, 20, 1200.0).score,
            Ratio::from_integer(35)
        );
    }

    #[test]
    fn inconsistent_claims() {
        let mut sol = rec("B", "i", RunStatus::Solved, ClaimKind::Cost, Some(3));
        sol.witness_ok = Some(true);
        let rs = [
            rec("A", "i", RunStatus::Solved, ClaimKind::Unsat, None),
            sol,
        ];
        let refs: Vec<&RunRecord> = rs.iter().collect();
        let err = compare_instances("d", &refs, &["A".into(), "B".into()]).unwrap_err();
        assert!(matches!(err, ScoreError::InconsistentClaims { .. }));
    }

    #[test]
    fn ranking() {
        let r = rank_totals(vec![
            ("C".into(), Ratio::from_integer(2634), 1.0),
            ("A".into(), Ratio::from_integer(2665), 9.0),
            ("B".into(), Ratio::new(26559, 10), 1.0),
        ]);
        let order: Vec<&str> = r.iter().map(|e| e.system.as_str()).collect();
        assert_eq!(order, ["A", "B", "C"]);

        let r = rank_totals(vec![
            ("slow".into(), Ratio::from_integer(2185), 900.0),
            ("fast".into(), Ratio::from_integer(2185), 800.0),
        ]);
        assert_eq!((r[0].system.as_str(), r[0].rank, r[1].rank), ("fast", 1, 2));

        let r = rank_totals(vec![("only".into(), Score::zero(), 0.0)]);
        assert_eq!(r[0].rank, 1);
    }
}
