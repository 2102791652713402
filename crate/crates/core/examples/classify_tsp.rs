//! Sub-tracks of the three Hamiltonian-cycle encodings, with and without
//! the edge-cost weak constraint.

use std::fs;
use std::path::PathBuf;

use aspcomp::classify::{classify, HcfMode};
use aspcomp::syntax::{parse_facts, parse_program};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data/tsp")
        .join(name)
}

pub fn run_example() -> anyhow::Result<()> {
    let facts = parse_facts(&fs::read_to_string(data("instance.lp"))?)?;
    let weak = parse_program(&fs::read_to_string(data("optimize.lp"))?)?;
    println!("{:<12} {:>6} {:>12}", "encoding", "plain", "with costs");
    for name in ["basic", "advanced", "disjunctive"] {
        let program = parse_program(&fs::read_to_string(data(&format!("{name}.lp")))?)?;
        let plain = classify(&program, HcfMode::Ground(&facts))?;
        let mut optimizing = program.clone();
        optimizing.extend(weak.clone());
        let costs = classify(&optimizing, HcfMode::Ground(&facts))?;
        println!(
            "{name:<12} {:>6} {:>12}",
            plain.subtrack.to_string(),
            costs.subtrack.to_string()
        );
        if let Some(w) = &plain.hcf_witness {
            println!(
                "  head cycle through {} and {} in `{}`",
                w.atoms.0, w.atoms.1, w.rule
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
