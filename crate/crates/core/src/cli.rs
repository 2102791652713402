//! Command-line front end. Exit codes: 0 success, 2 invalid input, 3 data
//! error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::catalog::{
    import_ref_runtimes, load_manifest, save_manifest, Catalog, CatalogError, Category,
};
use crate::classify::{classify, HcfMode};
use crate::hardness::{classify_catalog, curate_catalog, pool_report_csv};
use crate::report::{
    build_report, cactus_csv, cactus_data, render_report, report_csv, subtrack_contribution,
};
use crate::runner::{
    read_log, run_campaign, verify_records, CampaignOptions, RunRecord, VerifyOptions,
};
use crate::scoring::{rank, score_records, score_value, DomainScore, Leaderboard, Scheme};
use crate::selection::{plan_all, render_plan_table, FreePickPolicy, SelectionPlan};
use crate::syntax::{parse_facts, parse_program};

#[derive(Debug, Parser)]
#[command(name = "aspcomp", version, about = "ASP solver competition harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the language features and sub-track of an encoding as JSON.
    Classify {
        encoding: PathBuf,
        /// Facts used to ground the program for the head-cycle check.
        #[arg(long)]
        facts: Option<PathBuf>,
        /// Decide head-cycle freeness on the predicate-level graph.
        #[arg(long = "abstract", conflicts_with = "facts")]
        abstract_: bool,
    },
    /// Label instances by hardness and print the pool sizes as CSV.
    Hardness {
        #[command(flatten)]
        manifest: ManifestArg,
        /// Reference runs to import (`instance_id,system,outcome,seconds`).
        #[arg(long)]
        ref_runs: Option<PathBuf>,
        /// Write the labelled manifest here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Choose the benchmark instances of every domain.
    Select {
        #[command(flatten)]
        manifest: ManifestArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t)]
        free_pick_policy: FreePickPolicy,
        /// Plan file (JSON); the summary table goes to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the systems of one category on the planned instances.
    Run {
        #[command(flatten)]
        manifest: ManifestArg,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value = "SP")]
        category: Category,
        /// Results log, appended to and resumed from.
        #[arg(long, default_value = "results.csv")]
        log: PathBuf,
        /// Directory for captured solver output.
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        /// Stop after this many jobs.
        #[arg(long)]
        max_jobs: Option<usize>,
    },
    /// Score every system per domain.
    Score {
        #[command(flatten)]
        scoring: ScoringArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank systems overall and per sub-track.
    Rank {
        #[command(flatten)]
        scoring: ScoringArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per solver and domain result table, cactus data and sub-track shares.
    Report {
        #[command(flatten)]
        scoring: ScoringArgs,
        /// Table destination; `.csv` and `.json` select those formats.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cactus plot data (`solver,k,time_s`).
        #[arg(long)]
        cactus: Option<PathBuf>,
        /// Sub-track shares of each solver's score (JSON).
        #[arg(long)]
        contributions: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ManifestArg {
    #[arg(long, default_value = "manifest.json")]
    pub manifest: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoringArgs {
    #[command(flatten)]
    pub manifest: ManifestArg,
    #[arg(long, default_value = "results.csv")]
    pub log: PathBuf,
    /// Plan whose selection sizes give the number of instances per domain.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub scheme: Scheme,
    #[arg(long, default_value = "SP")]
    pub category: Category,
    /// Trust every claim instead of checking small instances.
    #[arg(long)]
    pub no_verify: bool,
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Data(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::Data(m) => m,
        }
    }
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| data(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn manifest(arg: &ManifestArg) -> Result<(Catalog, PathBuf), CliError> {
    let catalog = load_manifest(&arg.manifest).map_err(|e| match e {
        CatalogError::Io(_) => data(format!("{}: {e}", arg.manifest.display())),
        e => invalid(format!("{}: {e}", arg.manifest.display())),
    })?;
    let base = arg
        .manifest
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    Ok((catalog, base))
}

fn read_plans(path: &Path) -> Result<Vec<SelectionPlan>, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

struct Scored {
    catalog: Catalog,
    records: Vec<RunRecord>,
    sizes: Option<BTreeMap<String, usize>>,
    scores: Vec<DomainScore>,
}

fn score_for(args: &ScoringArgs, scheme: Scheme) -> Result<Scored, CliError> {
    let (catalog, base) = manifest(&args.manifest)?;
    let mut records = read_log(&args.log).map_err(data)?;
    if !args.no_verify {
        let opts = VerifyOptions {
            base_dir: base,
            ..VerifyOptions::default()
        };
        verify_records(&catalog, &mut records, &opts);
    }
    let sizes = match &args.plan {
        Some(p) => Some(
            read_plans(p)?
                .into_iter()
                .map(|plan| (plan.domain.clone(), plan.total()))
                .collect::<BTreeMap<_, _>>(),
        ),
        None => None,
    };
    let scores =
        score_records(&catalog, &records, scheme, args.category, sizes.as_ref()).map_err(data)?;
    Ok(Scored {
        catalog,
        records,
        sizes,
        scores,
    })
}

fn subtrack_lookup(catalog: &Catalog) -> impl Fn(&str) -> Option<crate::classify::Subtrack> + '_ {
    |d| catalog.domain(d).and_then(|d| d.subtrack)
}

fn render_scores(scores: &[DomainScore]) -> String {
    let width = scores
        .iter()
        .map(|s| s.system.len())
        .max()
        .unwrap_or(6)
        .max(6);
    let dwidth = scores
        .iter()
        .map(|s| s.domain.len())
        .max()
        .unwrap_or(6)
        .max(6);
    let mut out = format!(
        "{:<width$}  {:<dwidth$}  {:>6}  {:>6}\n",
        "system", "domain", "score", "solved"
    );
    for s in scores {
        let value = if s.disqualified {
            "0*".to_string()
        } else {
            format!("{:.1}", score_value(&s.score))
        };
        out.push_str(&format!(
            "{:<width$}  {:<dwidth$}  {value:>6}  {:>6}\n",
            s.system, s.domain, s.solved
        ));
    }
    out
}

fn render_leaderboard(board: &Leaderboard) -> String {
    let mut out = String::new();
    let mut section = |title: String, entries: &[crate::scoring::LeaderboardEntry]| {
        out.push_str(&title);
        out.push('\n');
        for e in entries {
            out.push_str(&format!(
                "{:>3}  {:<24}  {:>8.1}  {:>9.0}\n",
                e.rank,
                e.system,
                score_value(&e.total),
                e.runtime_s
            ));
        }
    };
    section("overall".into(), &board.overall);
    for (t, entries) in &board.subtracks {
        section(format!("\nsub-track {t}"), entries);
    }
    out
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Classify {
            encoding,
            facts,
            abstract_,
        } => {
            let program = parse_program(&read(&encoding)?)
                .map_err(|e| invalid(format!("{}: {e}", encoding.display())))?;
            let facts = match &facts {
                Some(p) => {
                    parse_facts(&read(p)?).map_err(|e| invalid(format!("{}: {e}", p.display())))?
                }
                None => Vec::new(),
            };
            let mode = if abstract_ {
                HcfMode::Abstract
            } else {
                HcfMode::Ground(&facts)
            };
            let c = classify(&program, mode).map_err(invalid)?;
            emit(None, &json(&c))
        }
        Command::Hardness {
            manifest: m,
            ref_runs,
            out,
        } => {
            let (mut catalog, _) = manifest(&m)?;
            if let Some(p) = ref_runs {
                let file = fs::File::open(&p).map_err(|e| data(format!("{}: {e}", p.display())))?;
                import_ref_runtimes(&mut catalog, file).map_err(invalid)?;
            }
            classify_catalog(&mut catalog);
            let pools = curate_catalog(&catalog);
            if let Some(out) = out {
                save_manifest(&catalog, &out).map_err(data)?;
            }
            emit(None, &pool_report_csv(&catalog, &pools))
        }
        Command::Select {
            manifest: m,
            seed,
            free_pick_policy,
            out,
        } => {
            let (mut catalog, _) = manifest(&m)?;
            if let Some(seed) = seed {
                catalog.config.seed = seed;
            }
            classify_catalog(&mut catalog);
            let pools = curate_catalog(&catalog);
            let (plans, skipped) = plan_all(&pools, &catalog.config, free_pick_policy);
            for (domain, e) in &skipped {
                eprintln!("skipped {domain}: {e}");
            }
            match out {
                Some(path) => {
                    emit(Some(&path), &json(&plans))?;
                    emit(None, &render_plan_table(&plans))
                }
                None => emit(None, &json(&plans)),
            }
        }
        Command::Run {
            manifest: m,
            plan,
            workers,
            category,
            log,
            out,
            max_jobs,
        } => {
            let (catalog, base) = manifest(&m)?;
            let plans = read_plans(&plan)?;
            let systems = catalog.systems_in(category);
            let mut opts = CampaignOptions::new(log, out);
            opts.workers = workers;
            opts.category = category;
            opts.base_dir = base;
            opts.max_jobs = max_jobs;
            let report = run_campaign(&catalog, &plans, &systems, &opts).map_err(data)?;
            println!(
                "executed {} jobs, {} already logged, {} pending, at most {} in flight",
                report.executed, report.resumed, report.pending, report.max_in_flight
            );
            for r in report.records.iter().filter(|r| r.diagnostic.is_some()) {
                eprintln!(
                    "{} on {}: {}",
                    r.system,
                    r.instance,
                    r.diagnostic.as_deref().unwrap_or_default()
                );
            }
            Ok(())
        }
        Command::Score { scoring, out } => {
            let s = score_for(&scoring, scoring.scheme)?;
            match out {
                Some(path) => {
                    emit(Some(&path), &json(&s.scores))?;
                    emit(None, &render_scores(&s.scores))
                }
                None => emit(None, &json(&s.scores)),
            }
        }
        Command::Rank { scoring, out } => {
            let s = score_for(&scoring, scoring.scheme)?;
            let board = rank(&s.scores, subtrack_lookup(&s.catalog));
            match out {
                Some(path) => {
                    emit(Some(&path), &json(&board))?;
                    emit(None, &render_leaderboard(&board))
                }
                None => emit(None, &json(&board)),
            }
        }
        Command::Report {
            scoring,
            out,
            cactus,
            contributions,
        } => {
            let s1 = score_for(&scoring, Scheme::S1)?;
            let s2 = score_records(
                &s1.catalog,
                &s1.records,
                Scheme::S2,
                scoring.category,
                s1.sizes.as_ref(),
            )
            .map_err(data)?;
            let rows = build_report(&s1.catalog, &s1.records, &s1.scores, &s2).map_err(data)?;
            let text = match out
                .as_ref()
                .and_then(|p| p.extension())
                .and_then(|e| e.to_str())
            {
                Some("csv") => report_csv(&rows),
                Some("json") => json(&rows),
                _ => render_report(&rows),
            };
            emit(out.as_deref(), &text)?;
            if let Some(path) = cactus {
                emit(Some(&path), &cactus_csv(&cactus_data(&s1.records)))?;
            }
            if let Some(path) = contributions {
                let chosen = match scoring.scheme {
                    Scheme::S2 => &s2,
                    _ => &s1.scores,
                };
                let shares = subtrack_contribution(chosen, subtrack_lookup(&s1.catalog));
                emit(Some(&path), &json(&shares))?;
            }
            Ok(())
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
