//! Selection over a catalog shaped like the 2017 benchmark pools: hardness
//! labels from reference runs, curation, then balanced seeded picks.

use aspcomp::catalog::table1::table1_catalog;
use aspcomp::hardness::{classify_catalog, curate_catalog};
use aspcomp::selection::{plan_all, render_plan_table, FreePickPolicy};

pub fn run_example() -> anyhow::Result<()> {
    let mut catalog = table1_catalog();
    classify_catalog(&mut catalog);
    let pools = curate_catalog(&catalog);
    let (plans, skipped) = plan_all(&pools, &catalog.config, FreePickPolicy::Uniform);

    print!("{}", render_plan_table(&plans));
    for (domain, e) in skipped {
        println!("skipped {domain}: {e}");
    }
    let first = &plans[0];
    println!(
        "\n{} (seed {}): {:?}",
        first.domain,
        first.seed,
        first.chosen()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
