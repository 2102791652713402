//! Empirical hardness from reference-system runtimes, and curation of the
//! per-domain pools that selection draws from.
//!
//! With `t` ranging over the solving times of the reference systems:
//!
//! | class     | condition                                                          |
//! |-----------|--------------------------------------------------------------------|
//! | very easy | all solved, every `t <= 20`                                        |
//! | easy      | all solved, every `t < 120`, some `t > 20`                         |
//! | medium    | all solved, every `t < 1200`, some `t > 120`                       |
//! | hard      | some `t < 2400`, and some system did not finish within 1200 s      |
//! | too hard  | no system finished within 2400 s                                  |
//!
//! A memout, and an error while other systems ran normally, count as not
//! finishing at any horizon. Instances on which every system errs are
//! non-groundable. A timeout recorded at 1200 s says nothing about 2400 s.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Catalog, Domain, Hardness, InstanceRecord, RefOutcome, SatStatus, Task};

pub const EASY_LOW: f64 = 20.0;
pub const EASY_HIGH: f64 = 120.0;
pub const MEDIUM_HIGH: f64 = 1200.0;
pub const HARD_HIGH: f64 = 2400.0;

/// The four classes that enter selection, easiest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Easy,
    Medium,
    Hard,
    TooHard,
}

impl Class {
    pub const ALL: [Class; 4] = [Class::Easy, Class::Medium, Class::Hard, Class::TooHard];

    pub fn label(self) -> &'static str {
        match self {
            Class::Easy => "easy",
            Class::Medium => "medium",
            Class::Hard => "hard",
            Class::TooHard => "toohard",
        }
    }

    pub fn of(h: &Hardness) -> Option<Class> {
        match h {
            Hardness::Easy => Some(Class::Easy),
            Hardness::Medium => Some(Class::Medium),
            Hardness::Hard => Some(Class::Hard),
            Hardness::TooHard => Some(Class::TooHard),
            Hardness::VeryEasy | Hardness::Excluded(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HardnessError {
    #[error("no reference outcomes recorded")]
    MissingData,
}

enum Run {
    Solved(f64),
    Unfinished { horizon: f64 },
}

pub fn classify_instance(
    ref_runtimes: &BTreeMap<String, RefOutcome>,
) -> Result<Hardness, HardnessError> {
    if ref_runtimes.is_empty() {
        return Err(HardnessError::MissingData);
    }
    if ref_runtimes
        .values()
        .all(|o| matches!(o, RefOutcome::Error))
    {
        return Ok(Hardness::Excluded("non-groundable".into()));
    }
    let runs: Vec<Run> = ref_runtimes
        .values()
        .map(|o| match *o {
            RefOutcome::Solved(t) => Run::Solved(t),
            RefOutcome::Timeout(h) => Run::Unfinished {
                horizon: f64::from(h),
            },
            RefOutcome::Memout | RefOutcome::Error => Run::Unfinished {
                horizon: f64::INFINITY,
            },
        })
        .collect();

    let times: Vec<f64> = runs
        .iter()
        .filter_map(|r| match r {
            Run::Solved(t) => Some(*t),
            Run::Unfinished { .. } => None,
        })
        .collect();
    let all_solved = times.len() == runs.len();
    let all = |p: fn(f64) -> bool| all_solved && times.iter().all(|&t| p(t));
    let some = |p: fn(f64) -> bool| times.iter().any(|&t| p(t));

    if all(|t| t <= EASY_LOW) {
        return Ok(Hardness::VeryEasy);
    }
    if all(|t| t < EASY_HIGH) && some(|t| t > EASY_LOW) {
        return Ok(Hardness::Easy);
    }
    if all(|t| t < MEDIUM_HIGH) && some(|t| t > EASY_HIGH) {
        return Ok(Hardness::Medium);
    }
    let missed_1200 = runs.iter().any(|r| match r {
        Run::Solved(t) => *t > MEDIUM_HIGH,
        Run::Unfinished { horizon } => *horizon >= MEDIUM_HIGH,
    });
    if some(|t| t < HARD_HIGH) && missed_1200 {
        return Ok(Hardness::Hard);
    }
    let finished_2400 = |r: &Run| matches!(r, Run::Solved(t) if *t < HARD_HIGH);
    let missed_2400 = |r: &Run| match r {
        Run::Solved(t) => *t >= HARD_HIGH,
        Run::Unfinished { horizon } => *horizon >= HARD_HIGH,
    };
    if runs.iter().all(missed_2400) {
        return Ok(Hardness::TooHard);
    }
    let short_horizon = runs
        .iter()
        .any(|r| matches!(r, Run::Unfinished { horizon } if *horizon < HARD_HIGH));
    if short_horizon && !runs.iter().any(finished_2400) {
        return Ok(Hardness::Excluded("insufficient horizon".into()));
    }
    Ok(Hardness::Excluded("unclassifiable".into()))
}

/// Labels every instance from its reference outcomes. Instances without
/// outcomes keep a label they already have and are excluded otherwise.
pub fn classify_catalog(catalog: &mut Catalog) {
    for inst in &mut catalog.instances {
        if inst.ref_runtimes.is_empty() && inst.hardness.is_some() {
            continue;
        }
        inst.hardness = Some(
            classify_instance(&inst.ref_runtimes)
                .unwrap_or_else(|e| Hardness::Excluded(e.to_string())),
        );
    }
}

/// Curated instances of one domain, by class and satisfiability status.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedPool {
    pub domain: String,
    pub task: Option<Task>,
    pub cells: BTreeMap<Class, BTreeMap<SatStatus, Vec<String>>>,
    pub excluded: Vec<(String, String)>,
}

impl ClassifiedPool {
    pub fn cell(&self, class: Class, status: SatStatus) -> &[String] {
        self.cells
            .get(&class)
            .and_then(|c| c.get(&status))
            .map_or(&[], Vec::as_slice)
    }

    pub fn class_size(&self, class: Class) -> usize {
        self.cells
            .get(&class)
            .map_or(0, |c| c.values().map(Vec::len).sum())
    }

    pub fn len(&self) -> usize {
        Class::ALL.iter().map(|&c| self.class_size(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Retained ids in (class, status, id) order.
    pub fn ids(&self) -> Vec<&str> {
        self.cells
            .values()
            .flat_map(|c| c.values().flatten())
            .map(String::as_str)
            .collect()
    }
}

/// Splits a domain's classified instances into the pool and the excluded
/// list. Instances without a hardness are classified on the fly.
pub fn curate_pool(domain: &Domain, instances: &[&InstanceRecord]) -> ClassifiedPool {
    let mut pool = ClassifiedPool {
        domain: domain.name.clone(),
        task: Some(domain.task),
        ..ClassifiedPool::default()
    };
    for inst in instances {
        let hardness = inst.hardness.clone().unwrap_or_else(|| {
            classify_instance(&inst.ref_runtimes)
                .unwrap_or_else(|e| Hardness::Excluded(e.to_string()))
        });
        let class = match (&hardness, Class::of(&hardness)) {
            (_, Some(c)) => c,
            (Hardness::VeryEasy, _) => {
                pool.excluded.push((inst.id.clone(), "very easy".into()));
                continue;
            }
            (Hardness::Excluded(reason), _) => {
                pool.excluded.push((inst.id.clone(), reason.clone()));
                continue;
            }
            _ => unreachable!("every retained hardness maps to a class"),
        };
        if domain.task == Task::Optimization && inst.sat_status == SatStatus::Unsatisfiable {
            pool.excluded.push((
                inst.id.clone(),
                "unsatisfiable optimization instance".into(),
            ));
            continue;
        }
        let status = if class == Class::TooHard && domain.task != Task::Optimization {
            SatStatus::Unknown
        } else {
            inst.sat_status
        };
        pool.cells
            .entry(class)
            .or_default()
            .entry(status)
            .or_default()
            .push(inst.id.clone());
    }
    for cell in pool.cells.values_mut().flat_map(|c| c.values_mut()) {
        cell.sort();
    }
    pool
}

pub fn curate_catalog(catalog: &Catalog) -> Vec<ClassifiedPool> {
    catalog
        .domains
        .iter()
        .map(|d| curate_pool(d, &catalog.instances_of(d)))
        .collect()
}

/// Pool sizes in the layout of the benchmark table (`available` per cell).
pub fn pool_report_csv(catalog: &Catalog, pools: &[ClassifiedPool]) -> String {
    let mut out = String::from("domain,subtrack,task,class,sat_status,available,excluded\n");
    for pool in pools {
        let domain = catalog.domain(&pool.domain);
        let subtrack = domain
            .and_then(|d| d.subtrack)
            .map_or(String::new(), |s| s.number().to_string());
        let task = pool.task.map_or(String::new(), |t| t.to_string());
        for class in Class::ALL {
            let second = if class == Class::TooHard {
                SatStatus::Unknown
            } else {
                SatStatus::Unsatisfiable
            };
            for (status, label) in [
                (SatStatus::Satisfiable, "sat"),
                (second, status_label(second)),
            ] {
                let _ = writeln!(
                    out,
                    "{},{subtrack},{task},{},{label},{},",
                    csv_field(&pool.domain),
                    class.label(),
                    pool.cell(class, status).len()
                );
            }
        }
        let _ = writeln!(
            out,
            "{},{subtrack},{task},,,,{}",
            csv_field(&pool.domain),
            pool.excluded.len()
        );
    }
    out
}

fn status_label(s: SatStatus) -> &'static str {
    match s {
        SatStatus::Satisfiable => "sat",
        SatStatus::Unsatisfiable => "unsat",
        SatStatus::Unknown => "unknown",
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::table1::table1_catalog;

    fn runs(outcomes: &[RefOutcome]) -> BTreeMap<String, RefOutcome> {
        outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| (format!("r{i}"), *o))
            .collect()
    }

    fn class(outcomes: &[RefOutcome]) -> Hardness {
        classify_instance(&runs(outcomes)).unwrap()
    }

    use RefOutcome::{Error, Memout, Solved, Timeout};

    #[test]
    fn bullet_examples() {
        assert_eq!(
            class(&[Solved(25.0), Solved(60.0), Solved(100.0)]),
            Hardness::Easy
        );
        assert_eq!(
            class(&[Solved(10.0), Solved(15.0), Solved(18.0)]),
            Hardness::VeryEasy
        );
        assert_eq!(
            class(&[Solved(1500.0), Timeout(2400), Solved(900.0)]),
            Hardness::Hard
        );
        assert_eq!(class(&[Timeout(2400); 3]), Hardness::TooHard);
        assert_eq!(
            class(&[Solved(150.0), Solved(30.0), Solved(1199.0)]),
            Hardness::Medium
        );
    }

    #[test]
    fn boundaries_are_strict() {
        assert_eq!(
            class(&[Solved(120.0), Solved(120.0), Solved(50.0)]),
            Hardness::Excluded("unclassifiable".into())
        );
        assert_eq!(
            class(&[Solved(1200.0), Solved(300.0)]),
            Hardness::Excluded("unclassifiable".into())
        );
        assert_eq!(class(&[Solved(1300.0), Solved(300.0)]), Hardness::Hard);
    }

    #[test]
    fn horizons_memouts_and_errors() {
        assert_eq!(
            class(&[Timeout(1200), Timeout(1200)]),
            Hardness::Excluded("insufficient horizon".into())
        );
        assert_eq!(class(&[Timeout(1200), Solved(1800.0)]), Hardness::Hard);
        assert_eq!(class(&[Memout, Timeout(2400)]), Hardness::TooHard);
        assert_eq!(
            class(&[Error, Error]),
            Hardness::Excluded("non-groundable".into())
        );
        assert_eq!(class(&[Error, Solved(30.0)]), Hardness::Hard);
        assert_eq!(
            classify_instance(&BTreeMap::new()),
            Err(HardnessError::MissingData)
        );
    }

    #[test]
    fn permutation_invariant() {
        let a = [Solved(1500.0), Timeout(2400), Solved(900.0)];
        let mut b = a;
        b.reverse();
        assert_eq!(class(&a), class(&b));
    }

    #[test]
    fn graceful_graphs_pool() {
        let catalog = table1_catalog();
        let d = catalog.domain("Graceful Graphs").unwrap();
        let pool = curate_pool(d, &catalog.instances_of(d));
        let sizes: Vec<(usize, usize)> = Class::ALL
            .iter()
            .map(|&c| {
                let second = if c == Class::TooHard {
                    SatStatus::Unknown
                } else {
                    SatStatus::Unsatisfiable
                };
                (
                    pool.cell(c, SatStatus::Satisfiable).len(),
                    pool.cell(c, second).len(),
                )
            })
            .collect();
        assert_eq!(sizes, [(3, 0), (4, 1), (28, 2), (0, 21)]);
        assert!(pool.excluded.is_empty());
    }

    #[test]
    fn optimization_drops_unsat_and_curation_is_idempotent() {
        let mut catalog = table1_catalog();
        let name = "Traveling Salesperson";
        let extra = InstanceRecord {
            id: "tsp-extra".into(),
            domain: name.into(),
            path: "x".into(),
            ref_runtimes: runs(&[Solved(50.0), Solved(60.0)]),
            sat_status: SatStatus::Unsatisfiable,
            hardness: None,
        };
        catalog.instances.push(extra);
        catalog
            .domains
            .iter_mut()
            .find(|d| d.name == name)
            .unwrap()
            .instances
            .push("tsp-extra".into());
        let very_easy = InstanceRecord {
            id: "tsp-trivial".into(),
            domain: name.into(),
            path: "y".into(),
            ref_runtimes: runs(&[Solved(1.0)]),
            sat_status: SatStatus::Satisfiable,
            hardness: None,
        };
        catalog.instances.push(very_easy);
        catalog
            .domains
            .iter_mut()
            .find(|d| d.name == name)
            .unwrap()
            .instances
            .push("tsp-trivial".into());

        let d = catalog.domain(name).unwrap();
        let pool = curate_pool(d, &catalog.instances_of(d));
        assert_eq!(
            pool.excluded,
            [
                (
                    "tsp-extra".to_string(),
                    "unsatisfiable optimization instance".to_string()
                ),
                ("tsp-trivial".to_string(), "very easy".to_string())
            ]
        );
        let kept: Vec<&InstanceRecord> = pool
            .ids()
            .into_iter()
            .map(|id| catalog.instance(id).unwrap())
            .collect();
        let again = curate_pool(d, &kept);
        assert_eq!(again.cells, pool.cells);
        assert!(again.excluded.is_empty());
    }

    #[test]
    fn empty_domain() {
        let catalog = table1_catalog();
        let mut d = catalog.domains[0].clone();
        d.instances.clear();
        assert!(curate_pool(&d, &[]).is_empty());
    }

    #[test]
    fn report_matches_table_counts() {
        let catalog = table1_catalog();
        let pools = curate_catalog(&catalog);
        let csv = pool_report_csv(&catalog, &pools);
        assert!(csv.contains("Graceful Graphs,2,decision,hard,sat,28,\n"));
        assert!(csv.contains("Valves Location,3,optimization,toohard,unknown,23,\n"));
    }
}
