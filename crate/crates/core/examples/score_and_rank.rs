//! Scores under the three schemes on a small synthetic result set, then
//! the leaderboard with the runtime tie-break.

use aspcomp::catalog::Task;
use aspcomp::runner::{ClaimKind, RunRecord, RunStatus};
use aspcomp::scoring::{compare_instances, rank_totals, score_domain, score_value, Scheme};
use num_rational::Ratio;

fn record(
    system: &str,
    instance: &str,
    status: RunStatus,
    claim: ClaimKind,
    cost: Option<i64>,
    wall: f64,
) -> RunRecord {
    RunRecord {
        system: system.into(),
        instance: instance.into(),
        status,
        wall_s: wall,
        cpu_s: wall,
        peak_mem_bytes: 0,
        claim,
        cost,
        witness_path: None,
        witness_ok: None,
        diagnostic: None,
    }
}

pub fn run_example() -> anyhow::Result<()> {
    use ClaimKind::*;
    use RunStatus::*;
    let records = [
        record("A", "i1", Solved, Optimum, Some(7), 40.0),
        record("B", "i1", Timeout, Cost, Some(7), 1200.0),
        record("C", "i1", Memout, None, Option::None, 300.0),
        record("A", "i2", Timeout, Cost, Some(12), 1200.0),
        record("B", "i2", Timeout, Cost, Some(10), 1200.0),
        record("C", "i2", Solved, Unsat, Option::None, 5.0),
    ];
    let refs: Vec<&RunRecord> = records.iter().collect();
    let participants = ["A".to_string(), "B".into(), "C".into()];

    for c in compare_instances("Tour", &refs, &participants)? {
        let ms: Vec<String> = participants
            .iter()
            .map(|p| format!("{p}={}", c.m_s(p)))
            .collect();
        println!("{}: M_S {}", c.instance, ms.join(" "));
    }
    for scheme in [Scheme::S1, Scheme::S2, Scheme::Decision] {
        let scores = score_domain(
            scheme,
            Task::Optimization,
            "Tour",
            &refs,
            &participants,
            20,
            1200.0,
        )?;
        let line: Vec<String> = scores
            .iter()
            .map(|s| format!("{} {:.2}", s.system, score_value(&s.score)))
            .collect();
        println!("{scheme:?}: {}", line.join(", "));
    }

    let board = rank_totals(vec![
        ("idlv-clasp-dlv".into(), Ratio::from_integer(2634), 0.0),
        ("idlv+s".into(), Ratio::from_integer(2665), 0.0),
        ("idlv+-clasp-dlv".into(), Ratio::new(26559, 10), 0.0),
        ("tied, slower".into(), Ratio::from_integer(2185), 91_000.0),
        ("tied, faster".into(), Ratio::from_integer(2185), 87_000.0),
    ]);
    println!();
    for e in board {
        println!(
            "{:>2}. {:<16} {:>7.1} {:>8.0}",
            e.rank,
            e.system,
            score_value(&e.total),
            e.runtime_s
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
