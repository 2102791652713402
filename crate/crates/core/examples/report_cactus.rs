//! Result table, cactus data and sub-track shares from a results log.

use std::collections::BTreeMap;

use aspcomp::catalog::table1::table1_catalog;
use aspcomp::catalog::Category;
use aspcomp::report::{
    build_report, cactus_csv, cactus_data, render_report, subtrack_contribution,
};
use aspcomp::runner::parse_log;
use aspcomp::scoring::{score_records, Scheme};

const LOG: &str = "\
system,instance,status,wall_s,cpu_s,peak_mem_bytes,claim_kind,cost,witness_path
idlv+s,graph-colouring-easy-sat-000,solved,31.200,31.100,104857600,sat,,
idlv+s,graph-colouring-easy-unsat-000,solved,12.900,12.800,52428800,unsat,,
idlv+s,graph-colouring-medium-sat-000,timeout,1200.004,1199.900,734003200,none,,
idlv+s,graph-colouring-medium-unsat-000,solved,640.000,639.000,209715200,unsat,,
idlv+s,bayesian-network-learning-easy-sat-000,solved,88.000,87.500,314572800,optimum,412,
idlv+s,bayesian-network-learning-easy-sat-001,timeout,1200.010,1199.000,314572800,cost,530,
me-asp2,graph-colouring-easy-sat-000,solved,8.000,7.900,31457280,sat,,
me-asp2,graph-colouring-easy-unsat-000,memout,97.000,96.000,12884901888,none,,
me-asp2,graph-colouring-medium-sat-000,error,0.400,0.300,1048576,none,,
me-asp2,graph-colouring-medium-unsat-000,solved,1033.000,1030.000,419430400,unsat,,
me-asp2,bayesian-network-learning-easy-sat-000,timeout,1200.002,1199.000,104857600,cost,415,
";

pub fn run_example() -> anyhow::Result<()> {
    let catalog = table1_catalog();
    let records = parse_log(LOG)?;
    let sizes: BTreeMap<String, usize> = [
        ("Graph Colouring".to_string(), 20),
        ("Bayesian Network Learning".to_string(), 20),
    ]
    .into();
    let s1 = score_records(&catalog, &records, Scheme::S1, Category::SP, Some(&sizes))?;
    let s2 = score_records(&catalog, &records, Scheme::S2, Category::SP, Some(&sizes))?;

    print!(
        "{}",
        render_report(&build_report(&catalog, &records, &s1, &s2)?)
    );
    println!();
    print!("{}", cactus_csv(&cactus_data(&records)));
    println!();
    let shares = subtrack_contribution(&s1, |d| catalog.domain(d).and_then(|d| d.subtrack));
    for (solver, per) in shares {
        let parts: Vec<String> = per.iter().map(|(t, p)| format!("{t} {p:.1}%")).collect();
        println!("{solver}: {}", parts.join(", "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
