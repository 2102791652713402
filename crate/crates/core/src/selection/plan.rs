use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::balance::{balance, SelectionState};
use super::pick::{domain_rng, seeded_pick, SelectionRng};
use super::SelectError;
use crate::catalog::{CompetitionConfig, SatStatus, Task};
use crate::hardness::{Class, ClassifiedPool};

/// How picks beyond the mandated counts are distributed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FreePickPolicy {
    /// Uniformly from all remaining pool instances.
    #[default]
    Uniform,
    /// One at a time from the (class, status) cell with the fewest picks.
    Balanced,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellPlan {
    pub class: Class,
    pub status: SatStatus,
    pub available: usize,
    /// Lower bound from balancing.
    pub mandated: usize,
    /// All picks from this cell, mandated ones first.
    pub chosen: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionPlan {
    pub domain: String,
    pub seed: u64,
    pub hardness: SelectionState<Class>,
    pub status: Vec<SelectionState<SatStatus>>,
    pub cells: Vec<CellPlan>,
    /// Picks that fill a class up to its balanced count when its known
    /// statuses cannot supply it.
    pub top_up: Vec<String>,
    pub free_picks: Vec<String>,
}

impl SelectionPlan {
    pub fn chosen(&self) -> Vec<&str> {
        self.cells
            .iter()
            .flat_map(|c| c.chosen.iter().map(String::as_str))
            .collect()
    }

    pub fn total(&self) -> usize {
        self.cells.iter().map(|c| c.chosen.len()).sum()
    }

    pub fn class_count(&self, class: Class) -> usize {
        self.cells
            .iter()
            .filter(|c| c.class == class)
            .map(|c| c.chosen.len())
            .sum()
    }

    pub fn cell(&self, class: Class, status: SatStatus) -> Option<&CellPlan> {
        self.cells
            .iter()
            .find(|c| c.class == class && c.status == status)
    }
}

const STATUSES: [SatStatus; 3] = [
    SatStatus::Satisfiable,
    SatStatus::Unsatisfiable,
    SatStatus::Unknown,
];

/// Hardness balancing with `(n, m)`, then per class status balancing over
/// the known-status cells with `(select(x), 0)`, then seeded picks.
pub fn plan_domain(
    pool: &ClassifiedPool,
    config: &CompetitionConfig,
    policy: FreePickPolicy,
) -> Result<SelectionPlan, SelectError> {
    let n = config.n_select;
    if pool.len() < n {
        return Err(SelectError::PoolTooSmall {
            domain: pool.domain.clone(),
            size: pool.len(),
            needed: n,
        });
    }
    let classes: Vec<(Class, usize)> = Class::ALL
        .iter()
        .map(|&c| (c, pool.class_size(c)))
        .collect();
    let hardness = balance(&classes, n, config.m_free)?;
    let mut rng = domain_rng(config.seed, &pool.domain);

    let mut cells: Vec<CellPlan> = Vec::new();
    let mut status_states = Vec::new();
    let mut top_up = Vec::new();
    for &class in &Class::ALL {
        let select = hardness.select(&class) as usize;
        let known: Vec<(SatStatus, usize)> = [SatStatus::Satisfiable, SatStatus::Unsatisfiable]
            .iter()
            .map(|&s| (s, pool.cell(class, s).len()))
            .collect();
        let mut mandated = [0usize; 3];
        if select > 0 {
            if known.iter().any(|&(_, size)| size > 0) {
                let state = balance(&known, select, 0)?;
                mandated[0] = state.select(&SatStatus::Satisfiable) as usize;
                mandated[1] = state.select(&SatStatus::Unsatisfiable) as usize;
                status_states.push(state);
            } else {
                mandated[2] = select.min(pool.cell(class, SatStatus::Unknown).len());
            }
        }
        let start = cells.len();
        for (k, &status) in STATUSES.iter().enumerate() {
            let ids = pool.cell(class, status);
            if ids.is_empty() && mandated[k] == 0 {
                continue;
            }
            cells.push(CellPlan {
                class,
                status,
                available: ids.len(),
                mandated: mandated[k],
                chosen: seeded_pick(ids, mandated[k], &mut rng)?,
            });
        }

        let have: usize = mandated.iter().sum();
        if have < select {
            let taken: BTreeSet<String> = cells[start..]
                .iter()
                .flat_map(|c| c.chosen.iter().cloned())
                .collect();
            let rest: Vec<&String> = STATUSES
                .iter()
                .flat_map(|&s| pool.cell(class, s))
                .filter(|id| !taken.contains(*id))
                .collect();
            let extra = seeded_pick(&rest, (select - have).min(rest.len()), &mut rng)?;
            for id in &extra {
                let cell = cells[start..]
                    .iter_mut()
                    .find(|c| pool.cell(class, c.status).contains(id))
                    .expect("top-up id comes from a listed cell");
                cell.chosen.push(id.clone());
            }
            top_up.extend(extra);
        }
    }

    let mut plan = SelectionPlan {
        domain: pool.domain.clone(),
        seed: config.seed,
        hardness,
        status: status_states,
        cells,
        top_up,
        free_picks: Vec::new(),
    };
    let budget = n.min(pool.len()) - plan.total();
    free_picks(&mut plan, pool, budget, policy, &mut rng)?;
    Ok(plan)
}

fn free_picks(
    plan: &mut SelectionPlan,
    pool: &ClassifiedPool,
    budget: usize,
    policy: FreePickPolicy,
    rng: &mut SelectionRng,
) -> Result<(), SelectError> {
    let taken: BTreeSet<String> = plan.chosen().into_iter().map(String::from).collect();
    let remaining = |class: Class, status: SatStatus, taken: &BTreeSet<String>| -> Vec<String> {
        pool.cell(class, status)
            .iter()
            .filter(|id| !taken.contains(*id))
            .cloned()
            .collect()
    };
    let mut taken = taken;
    let mut picks: Vec<(Class, SatStatus, String)> = Vec::new();
    match policy {
        FreePickPolicy::Uniform => {
            let mut rest: Vec<(Class, SatStatus, String)> = Vec::new();
            for class in Class::ALL {
                for status in STATUSES {
                    for id in remaining(class, status, &taken) {
                        rest.push((class, status, id));
                    }
                }
            }
            let ids: Vec<&str> = rest.iter().map(|(_, _, id)| id.as_str()).collect();
            for id in seeded_pick(&ids, budget, rng)? {
                let (c, s, _) = rest
                    .iter()
                    .find(|(_, _, x)| *x == id)
                    .expect("picked from rest");
                picks.push((*c, *s, id));
            }
        }
        FreePickPolicy::Balanced => {
            for _ in 0..budget {
                let mut best: Option<(usize, Class, SatStatus)> = None;
                for class in Class::ALL {
                    for status in STATUSES {
                        if remaining(class, status, &taken).is_empty() {
                            continue;
                        }
                        let count = plan.cell(class, status).map_or(0, |c| c.chosen.len())
                            + picks
                                .iter()
                                .filter(|(c, s, _)| *c == class && *s == status)
                                .count();
                        if best.is_none_or(|(b, _, _)| count < b) {
                            best = Some((count, class, status));
                        }
                    }
                }
                let Some((_, class, status)) = best else {
                    break;
                };
                let id = seeded_pick(&remaining(class, status, &taken), 1, rng)?.remove(0);
                taken.insert(id.clone());
                picks.push((class, status, id));
            }
        }
    }
    for (class, status, id) in picks {
        match plan
            .cells
            .iter_mut()
            .find(|c| c.class == class && c.status == status)
        {
            Some(cell) => cell.chosen.push(id.clone()),
            None => plan.cells.push(CellPlan {
                class,
                status,
                available: pool.cell(class, status).len(),
                mandated: 0,
                chosen: vec![id.clone()],
            }),
        }
        plan.free_picks.push(id);
    }
    plan.cells.sort_by_key(|c| (c.class, c.status));
    Ok(())
}

/// Lower bounds per (class, status) cell without drawing any instance.
pub fn mandated_counts(
    domain: &str,
    sizes: &[(Class, SatStatus, usize)],
    task: Task,
    n: usize,
    m: usize,
) -> Result<Vec<(Class, SatStatus, usize)>, SelectError> {
    let mut pool = ClassifiedPool {
        domain: domain.to_string(),
        task: Some(task),
        ..ClassifiedPool::default()
    };
    for &(class, status, size) in sizes {
        let ids = (0..size)
            .map(|k| format!("{}-{status:?}-{k:05}", class.label()))
            .collect();
        pool.cells.entry(class).or_default().insert(status, ids);
    }
    let config = CompetitionConfig {
        n_select: n,
        m_free: m,
        ..CompetitionConfig::default()
    };
    let plan = plan_domain(&pool, &config, FreePickPolicy::Uniform)?;
    Ok(plan
        .cells
        .iter()
        .map(|c| (c.class, c.status, c.mandated))
        .collect())
}
