//! Checking claims against the reference semantics where the ground
//! program is small enough; larger ones stay unverified (`None`).

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;

use super::output::{parse_solver_output, Claim};
use super::{ClaimKind, RunRecord};
use crate::catalog::{Catalog, Domain, SatStatus, Task};
use crate::ground::{ground_program_with, GroundProgram, GroundingOptions};
use crate::oracle::{
    check_witness, complete_witness, model_cost, optimal_cost, Interpretation, Optimum,
    DEFAULT_ATOM_CAP,
};
use crate::syntax::parse_program;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub base_dir: PathBuf,
    pub atom_cap: usize,
    pub grounding: GroundingOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            base_dir: PathBuf::from("."),
            atom_cap: DEFAULT_ATOM_CAP,
            grounding: GroundingOptions {
                max_instances: 100_000,
            },
        }
    }
}

fn ground_instance(
    catalog: &Catalog,
    instance: &str,
    opts: &VerifyOptions,
) -> Option<GroundProgram> {
    let record = catalog.instance(instance)?;
    let domain = catalog.domain(&record.domain)?;
    let read = |p: &str| fs::read_to_string(opts.base_dir.join(p)).ok();
    let mut program = parse_program(&read(&domain.encoding_path)?).ok()?;
    program.extend(parse_program(&read(&record.path)?).ok()?);
    ground_program_with(&program, &[], opts.grounding).ok()
}

/// Stable models agreeing with the witness on the domain's witness
/// predicates, or the witness itself when it is a full model.
fn models_for(
    program: &GroundProgram,
    domain: &Domain,
    atoms: &Interpretation,
    cap: usize,
) -> Option<Vec<Interpretation>> {
    if domain.witness_predicates.is_empty() {
        let ok = check_witness(program, atoms).ok()?;
        return Some(if ok { vec![atoms.clone()] } else { Vec::new() });
    }
    let shown: BTreeSet<String> = domain.witness_predicates.iter().cloned().collect();
    complete_witness(program, atoms, &shown, cap).ok()
}

fn check(
    catalog: &Catalog,
    record: &RunRecord,
    program: Option<&GroundProgram>,
    opts: &VerifyOptions,
) -> Option<bool> {
    let instance = catalog.instance(&record.instance)?;
    let domain = catalog.domain(&instance.domain)?;
    match (record.claim, instance.sat_status) {
        (ClaimKind::Unsat, SatStatus::Satisfiable) => return Some(false),
        (ClaimKind::Sat | ClaimKind::Cost | ClaimKind::Optimum, SatStatus::Unsatisfiable) => {
            return Some(false)
        }
        _ => {}
    }
    if domain.task == Task::Query {
        return None;
    }
    let program = program?;
    if record.claim == ClaimKind::Unsat {
        return match optimal_cost(program, opts.atom_cap).ok()? {
            Optimum::Unsat => Some(true),
            Optimum::Optimal { .. } => Some(false),
        };
    }
    let system = catalog.systems.iter().find(|s| s.name == record.system)?;
    let text = fs::read_to_string(record.witness_path.as_ref()?).ok()?;
    let (claim, _) = parse_solver_output(&text, domain.task, &system.output);
    if claim.kind() != record.claim || claim.cost() != record.cost {
        return Some(false);
    }
    let models = models_for(program, domain, claim.atoms()?, opts.atom_cap)?;
    if models.is_empty() {
        return Some(false);
    }
    let Some(claimed) = claim.cost() else {
        return Some(true);
    };
    let mut costs = Vec::new();
    for m in &models {
        costs.push(model_cost(program, m).ok()?);
    }
    if !costs.contains(&claimed) {
        return Some(false);
    }
    match claim {
        Claim::OptimumFound(..) => match optimal_cost(program, opts.atom_cap).ok()? {
            Optimum::Optimal { cost, .. } => Some(cost == claimed),
            Optimum::Unsat => Some(false),
        },
        _ => Some(true),
    }
}

/// Verdict on one record's claim; `None` when no claim was made or the
/// check is out of reach. A claim contradicting the instance's known
/// satisfiability status is wrong without further checking.
pub fn verify_record(catalog: &Catalog, record: &RunRecord, opts: &VerifyOptions) -> Option<bool> {
    if record.claim == ClaimKind::None {
        return None;
    }
    let program = ground_instance(catalog, &record.instance, opts);
    check(catalog, record, program.as_ref(), opts)
}

/// Fills `witness_ok` of every record, grounding each instance once.
pub fn verify_records(catalog: &Catalog, records: &mut [RunRecord], opts: &VerifyOptions) {
    let mut grounded: BTreeMap<String, Option<GroundProgram>> = BTreeMap::new();
    for record in records.iter_mut() {
        if record.claim == ClaimKind::None {
            continue;
        }
        let program = grounded
            .entry(record.instance.clone())
            .or_insert_with(|| ground_instance(catalog, &record.instance, opts));
        record.witness_ok = check(catalog, record, program.as_ref(), opts);
    }
}
