//! Per solver and domain result tables, cactus data and sub-track shares.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::Catalog;
use crate::classify::Subtrack;
use crate::runner::{RunRecord, RunStatus};
use crate::scoring::{score_value, DomainScore, Score};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("no records in the requested scope")]
    EmptyScope,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainReportRow {
    pub solver: String,
    pub domain: String,
    pub score_s1: f64,
    pub score_s2: f64,
    pub sum_time_s: f64,
    /// Mean peak memory over solved runs; absent without solved runs.
    pub avg_mem_solved_bytes: Option<f64>,
    pub n_sol: usize,
    pub n_to: usize,
    pub n_mo: usize,
    pub n_oe: usize,
    pub disqualified: bool,
}

fn lookup<'a>(scores: &'a [DomainScore], solver: &str, domain: &str) -> Option<&'a DomainScore> {
    scores
        .iter()
        .find(|s| s.system == solver && s.domain == domain)
}

/// One row per solver and domain with records, in catalog domain order
/// and then by solver name. `s1` and `s2` are the scores under the two
/// optimization schemes (identical for decision and query domains).
pub fn build_report(
    catalog: &Catalog,
    records: &[RunRecord],
    s1: &[DomainScore],
    s2: &[DomainScore],
) -> Result<Vec<DomainReportRow>, ReportError> {
    let limit = catalog.config.time_limit_s as f64;
    let mut groups: BTreeMap<(usize, &str, &str), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let Some(inst) = catalog.instance(&r.instance) else {
            continue;
        };
        let order = catalog
            .domains
            .iter()
            .position(|d| d.name == inst.domain)
            .unwrap_or(usize::MAX);
        groups
            .entry((order, inst.domain.as_str(), r.system.as_str()))
            .or_default()
            .push(r);
    }
    if groups.is_empty() {
        return Err(ReportError::EmptyScope);
    }
    let mut rows = Vec::new();
    for ((_, domain, solver), rs) in groups {
        let count = |s: RunStatus| rs.iter().filter(|r| r.status == s).count();
        let solved: Vec<&&RunRecord> = rs
            .iter()
            .filter(|r| r.status == RunStatus::Solved)
            .collect();
        let avg_mem = (!solved.is_empty()).then(|| {
            solved.iter().map(|r| r.peak_mem_bytes as f64).sum::<f64>() / solved.len() as f64
        });
        let score = |table: &[DomainScore]| {
            lookup(table, solver, domain).map(|s| (score_value(&s.score), s.disqualified))
        };
        let (score_s1, dq1) = score(s1).unwrap_or((0.0, false));
        let (score_s2, dq2) = score(s2).unwrap_or((0.0, false));
        rows.push(DomainReportRow {
            solver: solver.to_string(),
            domain: domain.to_string(),
            score_s1,
            score_s2,
            sum_time_s: rs
                .iter()
                .map(|r| match r.status {
                    RunStatus::Timeout => r.wall_s.max(limit),
                    _ => r.wall_s,
                })
                .sum(),
            avg_mem_solved_bytes: avg_mem,
            n_sol: count(RunStatus::Solved),
            n_to: count(RunStatus::Timeout),
            n_mo: count(RunStatus::Memout),
            n_oe: count(RunStatus::OtherError),
            disqualified: dq1 || dq2,
        });
    }
    Ok(rows)
}

fn score_cell(value: f64, disqualified: bool) -> String {
    if disqualified {
        "0*".to_string()
    } else {
        format!("{value:.1}")
    }
}

fn mib(bytes: Option<f64>) -> String {
    bytes.map_or_else(
        || "-".to_string(),
        |b| format!("{:.0}", b / (1024.0 * 1024.0)),
    )
}

/// Aligned text: scores with one decimal, whole seconds, MiB, and `0*`
/// for disqualified entries.
pub fn render_report(rows: &[DomainReportRow]) -> String {
    let header = [
        "Solver",
        "Domain",
        "ScoreASP2015",
        "ScoreSolved",
        "Sum(Time)",
        "Avg(Mem)",
        "#Sol",
        "#TO",
        "#MO",
        "#OE",
    ];
    let cells: Vec<[String; 10]> = rows
        .iter()
        .map(|r| {
            [
                r.solver.clone(),
                r.domain.clone(),
                score_cell(r.score_s1, r.disqualified),
                score_cell(r.score_s2, r.disqualified),
                format!("{:.0}", r.sum_time_s),
                mib(r.avg_mem_solved_bytes),
                r.n_sol.to_string(),
                r.n_to.to_string(),
                r.n_mo.to_string(),
                r.n_oe.to_string(),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let mut line = |fields: Vec<&str>| {
        let mut text = String::new();
        for (k, (f, w)) in fields.iter().zip(&widths).enumerate() {
            if k > 0 {
                text.push_str("  ");
            }
            if k < 2 {
                let _ = write!(text, "{f:<w$}");
            } else {
                let _ = write!(text, "{f:>w$}");
            }
        }
        out.push_str(text.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for row in &cells {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

pub fn report_csv(rows: &[DomainReportRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "solver",
        "domain",
        "score_s1",
        "score_s2",
        "sum_time_s",
        "avg_mem_solved_bytes",
        "n_sol",
        "n_to",
        "n_mo",
        "n_oe",
        "disqualified",
    ])
    .expect("writing to memory");
    for r in rows {
        w.write_record([
            r.solver.clone(),
            r.domain.clone(),
            format!("{:.1}", r.score_s1),
            format!("{:.1}", r.score_s2),
            format!("{:.0}", r.sum_time_s),
            r.avg_mem_solved_bytes
                .map_or(String::new(), |m| format!("{m:.0}")),
            r.n_sol.to_string(),
            r.n_to.to_string(),
            r.n_mo.to_string(),
            r.n_oe.to_string(),
            r.disqualified.to_string(),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

/// Solve times of solved runs per solver, ascending; the k-th entry is the
/// time needed to solve k instances.
pub fn cactus_data(records: &[RunRecord]) -> BTreeMap<String, Vec<f64>> {
    let mut series: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.status == RunStatus::Solved) {
        series.entry(r.system.clone()).or_default().push(r.wall_s);
    }
    for times in series.values_mut() {
        times.sort_by(f64::total_cmp);
    }
    series
}

/// CSV with columns `solver,k,time_s`.
pub fn cactus_csv(series: &BTreeMap<String, Vec<f64>>) -> String {
    let mut out = String::from("solver,k,time_s\n");
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for (solver, times) in series {
        for (k, t) in times.iter().enumerate() {
            w.write_record([solver.clone(), (k + 1).to_string(), format!("{t:.3}")])
                .expect("writing to memory");
        }
    }
    out.push_str(
        &String::from_utf8(w.into_inner().expect("writing to memory"))
            .expect("csv output is utf-8"),
    );
    out
}

/// Percentage of each solver's total score earned per sub-track; all zero
/// for a solver without points.
pub fn subtrack_contribution(
    scores: &[DomainScore],
    subtrack_of: impl Fn(&str) -> Option<Subtrack>,
) -> BTreeMap<String, BTreeMap<Subtrack, f64>> {
    let mut sums: BTreeMap<String, BTreeMap<Subtrack, Score>> = BTreeMap::new();
    for s in scores {
        let Some(t) = subtrack_of(&s.domain) else {
            continue;
        };
        *sums
            .entry(s.system.clone())
            .or_default()
            .entry(t)
            .or_insert_with(Score::zero) += s.score;
    }
    sums.into_iter()
        .map(|(solver, per)| {
            let total: Score = per.values().fold(Score::zero(), |a, b| a + b);
            let shares = per
                .into_iter()
                .map(|(t, v)| {
                    let share = if total.is_zero() {
                        0.0
                    } else {
                        score_value(&(v * Score::from_integer(100) / total))
                    };
                    (t, share)
                })
                .collect();
            (solver, shares)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::ClaimKind;
    use num_rational::Ratio;

    fn rec(system: &str, status: RunStatus, wall: f64) -> RunRecord {
        RunRecord {
            system: system.into(),
            instance: "i".into(),
            status,
            wall_s: wall,
            cpu_s: wall,
            peak_mem_bytes: 1 << 20,
            claim: ClaimKind::None,
            cost: None,
            witness_path: None,
            witness_ok: None,
            diagnostic: None,
        }
    }

    #[test]
    fn cactus() {
        let rs = [
            rec("a", RunStatus::Solved, 30.0),
            rec("a", RunStatus::Solved, 10.0),
            rec("b", RunStatus::Timeout, 1200.0),
            rec("a", RunStatus::Solved, 20.0),
            rec("c", RunStatus::Solved, 5.0),
        ];
        let s = cactus_data(&rs);
        assert_eq!(s["a"], [10.0, 20.0, 30.0]);
        assert!(!s.contains_key("b"));
        assert_eq!(
            cactus_csv(&s),
            "solver,k,time_s\na,1,10.000\na,2,20.000\na,3,30.000\nc,1,5.000\n"
        );
    }

    fn score(domain: &str, value: Score) -> DomainScore {
        DomainScore {
            system: "s".into(),
            domain: domain.into(),
            score: value,
            disqualified: false,
            solved: 0,
            runtime_s: 0.0,
        }
    }

    #[test]
    fn contributions() {
        let scores = [
            score("d1", Ratio::from_integer(400)),
            score("d2", Ratio::from_integer(805)),
            score("d3", Ratio::new(10159, 10)),
            score("d4", Ratio::from_integer(450)),
        ];
        let track = |d: &str| {
            Subtrack::ALL
                .get(d[1..].parse::<usize>().ok()? - 1)
                .copied()
        };
        let shares = &subtrack_contribution(&scores, track)["s"];
        let total: f64 = shares.values().sum();
        assert!((total - 100.0).abs() < 1e-9);
        assert!((shares[&Subtrack::Extended] - 805.0 * 100.0 / 2670.9).abs() < 1e-9);

        let zero = subtrack_contribution(&[score("d1", Score::zero())], track);
        assert_eq!(zero["s"][&Subtrack::Normal], 0.0);
        let single = subtrack_contribution(&[score("d3", Ratio::from_integer(7))], track);
        assert_eq!(single["s"][&Subtrack::Weak], 100.0);
    }

    #[test]
    fn rendering() {
        let row = DomainReportRow {
            solver: "clasp".into(),
            domain: "Graph Colouring".into(),
            score_s1: 65.0,
            score_s2: 65.0,
            sum_time_s: 5123.4,
            avg_mem_solved_bytes: None,
            n_sol: 13,
            n_to: 7,
            n_mo: 0,
            n_oe: 0,
            disqualified: false,
        };
        let dq = DomainReportRow {
            disqualified: true,
            avg_mem_solved_bytes: Some(3.0 * 1024.0 * 1024.0),
            ..row.clone()
        };
        let text = render_report(&[row, dq]);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[1].contains("65.0") && lines[1].contains("5123") && lines[1].contains(" -"));
        assert!(lines[2].contains("0*") && !lines[2].contains("65.0"));
    }
}
