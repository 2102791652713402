//! Balanced selection of benchmark instances per domain.

pub mod balance;
mod pick;
mod plan;

use std::fmt::Write as _;

use thiserror::Error;

pub use balance::{balance, ClassQuantities, SelectionState};
pub use pick::{domain_rng, fnv1a64, seeded_pick, SelectionRng};
pub use plan::{mandated_counts, plan_domain, CellPlan, FreePickPolicy, SelectionPlan};

use crate::catalog::{CompetitionConfig, SatStatus};
use crate::hardness::{Class, ClassifiedPool};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectError {
    #[error("no class has any instance")]
    NoNonemptyClass,
    #[error("cannot draw {k} of {len} instances")]
    KTooLarge { k: usize, len: usize },
    #[error("domain `{domain}` has {size} usable instances, {needed} are needed")]
    PoolTooSmall {
        domain: String,
        size: usize,
        needed: usize,
    },
}

/// Plans every pool; domains that cannot be planned are returned with
/// their error instead.
pub fn plan_all(
    pools: &[ClassifiedPool],
    config: &CompetitionConfig,
    policy: FreePickPolicy,
) -> (Vec<SelectionPlan>, Vec<(String, SelectError)>) {
    let mut plans = Vec::new();
    let mut skipped = Vec::new();
    for pool in pools {
        match plan_domain(pool, config, policy) {
            Ok(p) => plans.push(p),
            Err(e) => skipped.push((pool.domain.clone(), e)),
        }
    }
    (plans, skipped)
}

/// One line per domain with `picked (available)` per cell, satisfiable
/// first, then unsatisfiable (unknown for the too-hard class).
pub fn render_plan_table(plans: &[SelectionPlan]) -> String {
    let width = plans
        .iter()
        .map(|p| p.domain.len())
        .max()
        .unwrap_or(6)
        .max(6);
    let mut out = format!("{:<width$}", "domain");
    for class in Class::ALL {
        let _ = write!(out, " | {:^19}", class.label());
    }
    out.push('\n');
    for plan in plans {
        let _ = write!(out, "{:<width$}", plan.domain);
        for class in Class::ALL {
            let second = if class == Class::TooHard {
                SatStatus::Unknown
            } else {
                SatStatus::Unsatisfiable
            };
            let cell = |s| {
                plan.cell(class, s)
                    .map_or((0, 0), |c| (c.chosen.len(), c.available))
            };
            let (a, b) = (cell(SatStatus::Satisfiable), cell(second));
            let _ = write!(
                out,
                " | {:>8} {:>10}",
                format!("{} ({})", a.0, a.1),
                format!("{} ({})", b.0, b.1)
            );
        }
        out.push('\n');
    }
    out
}
