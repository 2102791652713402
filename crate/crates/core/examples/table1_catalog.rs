//! The synthetic catalog mirroring the published pool sizes: domains,
//! participant systems and the per-cell pool report.

use aspcomp::catalog::table1::{table1_catalog, REFERENCE_SYSTEMS};
use aspcomp::catalog::Category;
use aspcomp::hardness::{classify_catalog, curate_catalog, pool_report_csv};

pub fn run_example() -> anyhow::Result<()> {
    let mut catalog = table1_catalog();
    println!(
        "{} domains, {} instances, reference systems {:?}",
        catalog.domains.len(),
        catalog.instances.len(),
        REFERENCE_SYSTEMS
    );
    for category in [Category::SP, Category::MP] {
        let names: Vec<&str> = catalog
            .systems_in(category)
            .iter()
            .map(|s| s.name.as_str())
            .collect();
        println!("{category:?}: {}", names.join(", "));
    }

    classify_catalog(&mut catalog);
    let report = pool_report_csv(&catalog, &curate_catalog(&catalog));
    println!();
    for line in report.lines().take(9) {
        println!("{line}");
    }
    println!("... {} rows", report.lines().count() - 1);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
