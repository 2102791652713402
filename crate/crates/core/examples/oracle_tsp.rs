//! Brute-force stable models of the choice-rule encoding: the two
//! Hamiltonian cycles, their costs and the optimum.

use std::fs;
use std::path::PathBuf;

use aspcomp::ground::ground_program;
use aspcomp::oracle::{
    enumerate_stable_models, model_cost, optimal_cost, Optimum, DEFAULT_ATOM_CAP,
};
use aspcomp::syntax::{parse_facts, parse_program};

pub fn run_example() -> anyhow::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/tsp");
    let mut program = parse_program(&fs::read_to_string(dir.join("advanced.lp"))?)?;
    program.extend(parse_program(&fs::read_to_string(
        dir.join("optimize.lp"),
    )?)?);
    let facts = parse_facts(&fs::read_to_string(dir.join("instance.lp"))?)?;
    let ground = ground_program(&program, &facts)?;

    let models = enumerate_stable_models(&ground, DEFAULT_ATOM_CAP)?;
    println!("{} stable models", models.len());
    for m in &models {
        let tour: Vec<String> = m
            .iter()
            .filter(|a| a.predicate == "cycle")
            .map(ToString::to_string)
            .collect();
        println!("  cost {:>2}: {}", model_cost(&ground, m)?, tour.join(" "));
    }
    if let Optimum::Optimal { cost, .. } = optimal_cost(&ground, DEFAULT_ATOM_CAP)? {
        println!("optimum {cost}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
