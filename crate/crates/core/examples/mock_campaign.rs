//! A complete dry run with stand-in solvers: three copies of the
//! four-node tour instance, one system that answers optimally, one that
//! times out holding a worse tour and one that crashes. The campaign is
//! interrupted after two jobs and resumed, then claims are checked and
//! scored.

use std::fs;
use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};

use aspcomp::catalog::{
    Catalog, Category, CompetitionConfig, Domain, Hardness, InstanceRecord, OutputKeywords,
    SatStatus, SystemEntry, Task,
};
use aspcomp::classify::Subtrack;
use aspcomp::hardness::curate_catalog;
use aspcomp::report::{build_report, render_report};
use aspcomp::runner::{read_log, run_campaign, verify_records, CampaignOptions, VerifyOptions};
use aspcomp::scoring::{score_records, Scheme};
use aspcomp::selection::{plan_all, FreePickPolicy};

const OPTIMAL: &str = "cycle(1,4). cycle(4,3). cycle(3,2). cycle(2,1).";
const WORSE: &str = "cycle(1,2). cycle(2,3). cycle(3,4). cycle(4,1).";

fn script(dir: &Path, name: &str, body: &str) -> anyhow::Result<()> {
    let path = dir.join(format!("{name}.sh"));
    fs::write(&path, format!("#!/bin/sh\n{body}\n"))?;
    fs::set_permissions(&path, fs::Permissions::from_mode(0o755))?;
    Ok(())
}

fn system(name: &str, dir: &Path) -> SystemEntry {
    SystemEntry {
        name: name.into(),
        team: "dry run".into(),
        category: Category::SP,
        launch_command: format!("{}/{name}.sh {{encoding}} {{instance}}", dir.display()),
        supported_subtracks: Subtrack::ALL.into_iter().collect(),
        output: OutputKeywords::default(),
    }
}

fn catalog(dir: &Path) -> anyhow::Result<Catalog> {
    let tsp = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/tsp");
    let encoding = fs::read_to_string(tsp.join("advanced.lp"))?
        + &fs::read_to_string(tsp.join("optimize.lp"))?;
    fs::write(dir.join("tsp.lp"), encoding)?;
    let ids = ["tsp-1", "tsp-2", "tsp-3"];
    for id in ids {
        fs::copy(tsp.join("instance.lp"), dir.join(format!("{id}.lp")))?;
    }
    script(
        dir,
        "optimal",
        &format!("echo ANSWER; echo '{OPTIMAL}'; echo COST 7; echo OPTIMUM FOUND"),
    )?;
    script(
        dir,
        "anytime",
        &format!("echo ANSWER; echo '{WORSE}'; echo COST 8; exec sleep 60"),
    )?;
    script(dir, "broken", "echo 'segmentation fault' >&2; exit 139")?;

    Ok(Catalog {
        config: CompetitionConfig {
            time_limit_s: 1,
            n_select: 3,
            m_free: 0,
            ..CompetitionConfig::default()
        },
        domains: vec![Domain {
            name: "Tour".into(),
            task: Task::Optimization,
            subtrack: Some(Subtrack::Extended),
            encoding_path: "tsp.lp".into(),
            instances: ids.iter().map(|s| s.to_string()).collect(),
            witness_predicates: vec!["cycle".into()],
        }],
        systems: ["optimal", "anytime", "broken"]
            .iter()
            .map(|n| system(n, dir))
            .collect(),
        instances: ids
            .iter()
            .map(|id| InstanceRecord {
                id: id.to_string(),
                domain: "Tour".into(),
                path: format!("{id}.lp"),
                ref_runtimes: Default::default(),
                sat_status: SatStatus::Satisfiable,
                hardness: Some(Hardness::Medium),
            })
            .collect(),
    })
}

pub fn run_example() -> anyhow::Result<()> {
    let tmp = tempfile::tempdir()?;
    let dir = tmp.path();
    let catalog = catalog(dir)?;
    let (plans, _) = plan_all(
        &curate_catalog(&catalog),
        &catalog.config,
        FreePickPolicy::Uniform,
    );
    let systems = catalog.systems_in(Category::SP);

    let mut opts = CampaignOptions::new(dir.join("results.csv"), dir.join("runs"));
    opts.base_dir = dir.to_path_buf();
    opts.workers = 3;
    opts.max_jobs = Some(2);
    let first = run_campaign(&catalog, &plans, &systems, &opts)?;
    println!(
        "first pass: {} executed, {} pending",
        first.executed, first.pending
    );
    opts.max_jobs = None;
    let second = run_campaign(&catalog, &plans, &systems, &opts)?;
    println!(
        "resumed: {} executed, {} already logged, at most {} in flight",
        second.executed, second.resumed, second.max_in_flight
    );

    for r in second.records.iter().filter(|r| r.diagnostic.is_some()) {
        println!(
            "{} {}: {}",
            r.system,
            r.instance,
            r.diagnostic.as_deref().unwrap_or("")
        );
    }
    let mut records = read_log(dir.join("results.csv"))?;
    let verify = VerifyOptions {
        base_dir: dir.to_path_buf(),
        ..VerifyOptions::default()
    };
    verify_records(&catalog, &mut records, &verify);
    for r in &records {
        println!(
            "{:<8} {:<6} {:<8} {:>5.2}s claim {:<8} cost {:<4} verified {:?}",
            r.system,
            r.instance,
            r.status.as_str(),
            r.wall_s,
            r.claim.as_str(),
            r.cost.map_or("-".into(), |c| c.to_string()),
            r.witness_ok
        );
    }

    let s1 = score_records(&catalog, &records, Scheme::S1, Category::SP, None)?;
    let s2 = score_records(&catalog, &records, Scheme::S2, Category::SP, None)?;
    println!();
    print!(
        "{}",
        render_report(&build_report(&catalog, &records, &s1, &s2)?)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
