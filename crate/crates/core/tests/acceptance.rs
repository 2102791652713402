//! Acceptance suite. Each criterion reports one PASS/FAIL line; the test
//! fails if any criterion does.
//!
//! Run with `cargo test -p aspcomp --test acceptance -- --nocapture`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use aspcomp::catalog::table1::{table1_catalog, table1_domains, DISCARDED};
use aspcomp::catalog::{
    Catalog, Category, CompetitionConfig, Domain, Hardness, InstanceRecord, OutputKeywords,
    SatStatus, SystemEntry, Task,
};
use aspcomp::classify::{classify, HcfMode, Subtrack};
use aspcomp::ground::{ground_program, GroundProgram};
use aspcomp::hardness::{curate_catalog, Class, ClassifiedPool};
use aspcomp::oracle::{
    check_witness, enumerate_stable_models, model_cost, optimal_cost, Interpretation, Optimum,
    DEFAULT_ATOM_CAP,
};
use aspcomp::runner::{
    read_log, run_campaign, run_job, CampaignOptions, ClaimKind, JobSpec, RunRecord, RunStatus,
};
use aspcomp::scoring::{rank_totals, score_domain, score_value, Scheme, Score};
use aspcomp::selection::{balance, mandated_counts, plan_domain, FreePickPolicy, SelectError};
use aspcomp::syntax::{parse_facts, parse_program, Atom, Term};

/// Wall-clock budget for the golden balancing computation.
const BALANCE_BUDGET: Duration = Duration::from_millis(1);
/// Wall-clock budget for evaluating every benchmark table row.
const TABLE1_BUDGET: Duration = Duration::from_secs(1);
/// Selection size and free picks of the competition.
const N_SELECT: usize = 20;
const M_FREE: usize = 1;
/// Random ground programs compared against the reference check.
const ORACLE_CASES: usize = 200;
const ORACLE_MAX_ATOMS: usize = 12;
/// Randomized scoring campaigns.
const SCORING_CASES: usize = 1000;
/// A 1200 s limit must fire by 1210 s; the scaled test keeps that ratio.
const SCALED_LIMIT: Duration = Duration::from_secs(2);
const TIMEOUT_SLACK_RATIO: f64 = 1210.0 / 1200.0;
/// Workers of the parallel single-processor campaign.
const SP_WORKERS: usize = 4;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn tsp(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data/tsp")
        .join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

// Criterion 1

fn graceful_graphs_balancing() -> Outcome {
    let sizes = [
        (Class::Easy, 3),
        (Class::Medium, 5),
        (Class::Hard, 30),
        (Class::TooHard, 21),
    ];
    let start = Instant::now();
    let state = balance(&sizes, N_SELECT, M_FREE).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let col = |f: fn(&aspcomp::selection::ClassQuantities<Class>) -> i64| -> Vec<i64> {
        state.classes.iter().map(f).collect()
    };
    let checks: [(&str, Vec<i64>, Vec<i64>); 4] = [
        ("gap", col(|c| c.gap), vec![1, -1, -26, -17]),
        ("available<", col(|c| c.available_lt), vec![0, 1, 0, -26]),
        (
            "available>",
            col(|c| c.available_gt),
            vec![-44, -43, -17, 0],
        ),
        ("select", col(|c| c.select), vec![3, 5, 4, 4]),
    ];
    ensure(state.target == 4, || format!("target {}", state.target))?;
    for (name, got, want) in checks {
        ensure(got == want, || format!("{name} {got:?}, expected {want:?}"))?;
    }
    let easy = &state.classes[0];
    let medium = &state.classes[1];
    ensure(easy.compensate_gt == 1, || {
        format!("compensate>(easy) {}", easy.compensate_gt)
    })?;
    ensure(easy.distribute_lt == 1, || {
        format!("distribute<(easy) {}", easy.distribute_lt)
    })?;
    ensure(medium.increase_lt == 1, || {
        format!("increase<(medium) {}", medium.increase_lt)
    })?;
    ensure(elapsed < BALANCE_BUDGET, || format!("took {elapsed:?}"))
}

// Criterion 2

fn table1_pool(catalog: &Catalog, domain: &str) -> ClassifiedPool {
    curate_catalog(catalog)
        .into_iter()
        .find(|p| p.domain == domain)
        .unwrap_or_else(|| panic!("no pool for {domain}"))
}

fn status_balancing() -> Outcome {
    let medium = balance(
        &[(SatStatus::Satisfiable, 4), (SatStatus::Unsatisfiable, 1)],
        5,
        0,
    )
    .map_err(|e| e.to_string())?;
    ensure(medium.selects() == [3, 1], || {
        format!("medium selects {:?}", medium.selects())
    })?;
    ensure(medium.total() == 4, || {
        format!("medium total {}", medium.total())
    })?;

    let catalog = table1_catalog();
    let config = CompetitionConfig {
        seed: 1,
        ..catalog.config.clone()
    };
    let plan = plan_domain(
        &table1_pool(&catalog, "Valves Location"),
        &config,
        FreePickPolicy::Uniform,
    )
    .map_err(|e| e.to_string())?;
    let too_hard = plan.hardness.select(&Class::TooHard);
    ensure(too_hard == 4, || format!("select(too hard) {too_hard}"))?;
    let state = plan
        .status
        .iter()
        .find(|s| s.n == too_hard && s.classes.iter().all(|c| c.label != SatStatus::Unknown))
        .ok_or("no status balancing over known statuses for too-hard")?;
    ensure(state.select(&SatStatus::Satisfiable) == 4, || {
        format!(
            "select(sat(too hard)) {}",
            state.select(&SatStatus::Satisfiable)
        )
    })?;
    let unknown = plan
        .cell(Class::TooHard, SatStatus::Unknown)
        .map_or(0, |c| c.mandated);
    ensure(unknown == 0, || {
        format!("{unknown} unknown instances mandated")
    })
}

// Criterion 3

fn table1_regression() -> Outcome {
    let catalog = table1_catalog();
    let config = CompetitionConfig {
        n_select: N_SELECT,
        m_free: M_FREE,
        ..catalog.config.clone()
    };
    let start = Instant::now();
    let mut retained = 0;
    let mut forced = Vec::new();
    for (domain, rows) in table1_domains() {
        let task = rows[0].task;
        let sizes: Vec<(Class, SatStatus, usize)> = rows
            .iter()
            .map(|r| (r.class, r.sat_status.sat_status(), r.available))
            .collect();
        let picked = |class: Class, status: Option<SatStatus>| -> usize {
            rows.iter()
                .filter(|r| {
                    r.class == class && status.is_none_or(|s| r.sat_status.sat_status() == s)
                })
                .filter_map(|r| r.selected)
                .sum()
        };
        let result = mandated_counts(&domain, &sizes, task, N_SELECT, M_FREE);
        if DISCARDED.contains(&domain.as_str()) {
            ensure(
                matches!(result, Err(SelectError::PoolTooSmall { .. })),
                || format!("{domain}: expected PoolTooSmall, got {result:?}"),
            )?;
            continue;
        }
        retained += 1;
        let cells = result.map_err(|e| format!("{domain}: {e}"))?;
        let total: usize = cells.iter().map(|c| c.2).sum();
        ensure(total <= N_SELECT, || {
            format!("{domain}: {total} mandated picks")
        })?;
        for class in Class::ALL {
            let lower: usize = cells.iter().filter(|c| c.0 == class).map(|c| c.2).sum();
            let table = picked(class, None);
            ensure(lower <= table, || {
                format!(
                    "{domain} {}: lower bound {lower} above picked {table}",
                    class.label()
                )
            })?;
        }
        for &(class, status, lower) in &cells {
            let table = picked(class, Some(status));
            ensure(lower <= table, || {
                format!(
                    "{domain} {} {status:?}: lower bound {lower} above picked {table}",
                    class.label()
                )
            })?;
        }

        // With a single non-empty cell every pick is determined.
        let nonempty: Vec<_> = rows.iter().filter(|r| r.available > 0).collect();
        if nonempty.len() == 1 {
            let plan = plan_domain(
                &table1_pool(&catalog, &domain),
                &config,
                FreePickPolicy::Uniform,
            )
            .map_err(|e| format!("{domain}: {e}"))?;
            let row = nonempty[0];
            let status = row.sat_status.sat_status();
            let got = plan.cell(row.class, status).map_or(0, |c| c.chosen.len());
            ensure(
                Some(got) == row.selected && plan.total() == N_SELECT,
                || format!("{domain}: picked {got}, table has {:?}", row.selected),
            )?;
            forced.push(domain);
        }
    }
    let elapsed = start.elapsed();
    ensure(retained == 35, || format!("{retained} retained domains"))?;
    ensure(!forced.is_empty(), || "no forced domain checked".into())?;
    ensure(
        forced.iter().any(|d| d == "Consistent Query Answering"),
        || format!("forced domains {forced:?}"),
    )?;
    ensure(elapsed < TABLE1_BUDGET, || format!("took {elapsed:?}"))
}

// Criterion 4

fn classifier_fixtures() -> Outcome {
    let facts = parse_facts(&tsp("instance.lp")).map_err(|e| e.to_string())?;
    let weak = parse_program(&tsp("optimize.lp")).map_err(|e| e.to_string())?;
    let expected = [
        ("basic.lp", 1, 3),
        ("advanced.lp", 2, 3),
        ("disjunctive.lp", 4, 4),
    ];
    for (file, plain_track, weak_track) in expected {
        let program = parse_program(&tsp(file)).map_err(|e| format!("{file}: {e}"))?;
        let plain = classify(&program, HcfMode::Ground(&facts)).map_err(|e| e.to_string())?;
        let mut with_costs = program.clone();
        with_costs.extend(weak.clone());
        let costs = classify(&with_costs, HcfMode::Ground(&facts)).map_err(|e| e.to_string())?;
        ensure(plain.subtrack.number() == plain_track, || {
            format!(
                "{file}: #{} expected #{plain_track}",
                plain.subtrack.number()
            )
        })?;
        ensure(costs.subtrack.number() == weak_track, || {
            format!(
                "{file} with costs: #{} expected #{weak_track}",
                costs.subtrack.number()
            )
        })?;
        if plain.subtrack == Subtrack::NonHcf {
            let witness = plain
                .hcf_witness
                .as_ref()
                .ok_or("non-HCF without witness")?;
            for atom in ["cycle(3,2)", "cycle(3,4)"] {
                ensure(witness.scc.iter().any(|a| a == atom), || {
                    format!("witness SCC {:?} lacks {atom}", witness.scc)
                })?;
            }
        }
    }
    Ok(())
}

// Criterion 5

/// Directed Hamiltonian cycles of the instance graph and their costs,
/// computed from the facts by trying every successor function.
fn hamiltonian_cycles(facts: &[Atom]) -> Vec<(BTreeSet<(i64, i64)>, i64)> {
    let int = |t: &Term| match t {
        Term::Integer(v) => *v,
        other => panic!("non-integer argument {other}"),
    };
    let mut nodes = BTreeSet::new();
    let mut succ: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    let mut cost = BTreeMap::new();
    for a in facts {
        let args: Vec<i64> = a.args.iter().map(int).collect();
        match a.predicate.as_str() {
            "node" => {
                nodes.insert(args[0]);
            }
            "edge" => succ.entry(args[0]).or_default().push(args[1]),
            "cost" => {
                cost.insert((args[0], args[1]), args[2]);
            }
            _ => {}
        }
    }
    let nodes: Vec<i64> = nodes.into_iter().collect();
    let mut choice = vec![0usize; nodes.len()];
    let mut out = Vec::new();
    loop {
        let next: BTreeMap<i64, i64> = nodes
            .iter()
            .zip(&choice)
            .map(|(&n, &k)| (n, succ[&n][k]))
            .collect();
        let mut seen = BTreeSet::new();
        let mut at = nodes[0];
        while seen.insert(at) {
            at = next[&at];
        }
        if at == nodes[0] && seen.len() == nodes.len() {
            let edges: BTreeSet<(i64, i64)> = next.into_iter().collect();
            let total = edges.iter().map(|e| cost[e]).sum();
            out.push((edges, total));
        }
        let mut k = 0;
        loop {
            if k == nodes.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < succ[&nodes[k]].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn tour(model: &Interpretation) -> BTreeSet<(i64, i64)> {
    model
        .iter()
        .filter(|a| a.predicate == "cycle")
        .map(|a| match (&a.args[0], &a.args[1]) {
            (Term::Integer(x), Term::Integer(y)) => (*x, *y),
            _ => panic!("non-integer cycle atom {a}"),
        })
        .collect()
}

/// Head, positive body and negative body atom indices.
type GroundRule = (Vec<usize>, Vec<usize>, Vec<usize>);

/// Stability by definition: a model of the reduct with no smaller model.
fn reference_stable(rules: &[GroundRule], set: u32) -> bool {
    let model_of_reduct = |m: u32| {
        rules.iter().all(|(head, pos, neg)| {
            if neg.iter().any(|&b| set >> b & 1 == 1) {
                return true;
            }
            let body = pos.iter().all(|&b| m >> b & 1 == 1);
            !body || head.iter().any(|&h| m >> h & 1 == 1)
        })
    };
    if !model_of_reduct(set) {
        return false;
    }
    let mut sub = set;
    while sub != 0 {
        sub = (sub - 1) & set;
        if model_of_reduct(sub) {
            return false;
        }
    }
    true
}

fn random_program(rng: &mut ChaCha8Rng) -> (usize, Vec<GroundRule>) {
    let atoms = rng.gen_range(1..=ORACLE_MAX_ATOMS);
    let count = rng.gen_range(1..=2 * atoms);
    let pick = |rng: &mut ChaCha8Rng, max: usize| -> Vec<usize> {
        let k = rng.gen_range(0..=max);
        let set: BTreeSet<usize> = (0..k).map(|_| rng.gen_range(0..atoms)).collect();
        set.into_iter().collect()
    };
    let rules = (0..count)
        .map(|_| {
            let mut head = pick(rng, 2);
            let pos = pick(rng, 2);
            let neg = pick(rng, 2);
            if head.is_empty() && pos.is_empty() && neg.is_empty() {
                head.push(rng.gen_range(0..atoms));
            }
            (head, pos, neg)
        })
        .collect();
    (atoms, rules)
}

fn render(rules: &[GroundRule]) -> String {
    let mut text = String::new();
    for (head, pos, neg) in rules {
        let head: Vec<String> = head.iter().map(|h| format!("p{h}")).collect();
        let body: Vec<String> = pos
            .iter()
            .map(|b| format!("p{b}"))
            .chain(neg.iter().map(|b| format!("not p{b}")))
            .collect();
        text.push_str(&head.join(" | "));
        if !body.is_empty() {
            text.push_str(" :- ");
            text.push_str(&body.join(", "));
        }
        text.push_str(".\n");
    }
    text
}

fn oracle_equivalence() -> Outcome {
    let facts = parse_facts(&tsp("instance.lp")).map_err(|e| e.to_string())?;
    let cycles = hamiltonian_cycles(&facts);
    let basic = parse_program(&tsp("basic.lp")).map_err(|e| e.to_string())?;
    let ground = ground_program(&basic, &facts).map_err(|e| e.to_string())?;
    let models = enumerate_stable_models(&ground, DEFAULT_ATOM_CAP).map_err(|e| e.to_string())?;
    let found: BTreeSet<_> = models.iter().map(tour).collect();
    let expected: BTreeSet<_> = cycles.iter().map(|c| c.0.clone()).collect();
    ensure(models.len() == 2 && found == expected, || {
        format!(
            "{} models {found:?}, expected cycles {expected:?}",
            models.len()
        )
    })?;

    let mut optimizing = basic;
    optimizing.extend(parse_program(&tsp("optimize.lp")).map_err(|e| e.to_string())?);
    let ground = ground_program(&optimizing, &facts).map_err(|e| e.to_string())?;
    let best = cycles.iter().min_by_key(|c| c.1).expect("a cycle exists");
    let published_tour: BTreeSet<(i64, i64)> = [(1, 4), (4, 3), (3, 2), (2, 1)].into();
    ensure(best.1 == 7 && best.0 == published_tour, || {
        format!("reference optimum {best:?}")
    })?;
    match optimal_cost(&ground, DEFAULT_ATOM_CAP).map_err(|e| e.to_string())? {
        Optimum::Optimal { cost, model } => {
            ensure(cost == 7 && tour(&model) == published_tour, || {
                format!("optimum {cost} with {:?}", tour(&model))
            })?;
            let recomputed = model_cost(&ground, &model).map_err(|e| e.to_string())?;
            ensure(recomputed == 7, || format!("model cost {recomputed}"))?;
        }
        Optimum::Unsat => return Err("optimization reported unsatisfiable".into()),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut disagreements = Vec::new();
    for case in 0..ORACLE_CASES {
        let (atoms, rules) = random_program(&mut rng);
        let text = render(&rules);
        let program = parse_program(&text).map_err(|e| format!("{e}\n{text}"))?;
        let ground: GroundProgram = ground_program(&program, &[]).map_err(|e| e.to_string())?;
        let enumerated: BTreeSet<Interpretation> =
            enumerate_stable_models(&ground, DEFAULT_ATOM_CAP)
                .map_err(|e| e.to_string())?
                .into_iter()
                .collect();
        for set in 0..1u32 << atoms {
            let interp: Interpretation = (0..atoms)
                .filter(|&a| set >> a & 1 == 1)
                .map(|a| Atom::new(format!("p{a}"), vec![]))
                .collect();
            let reference = reference_stable(&rules, set);
            let checked = check_witness(&ground, &interp).map_err(|e| e.to_string())?;
            let listed = enumerated.contains(&interp);
            if reference != checked || checked != listed {
                disagreements.push(format!(
                    "case {case} {interp:?}: reference {reference}, check {checked}, enumerate {listed}\n{text}"
                ));
            }
        }
    }
    ensure(disagreements.is_empty(), || {
        format!(
            "{} disagreements, first: {}",
            disagreements.len(),
            disagreements[0]
        )
    })
}

// Criterion 6

fn record(
    system: &str,
    instance: &str,
    status: RunStatus,
    claim: ClaimKind,
    cost: Option<i64>,
) -> RunRecord {
    RunRecord {
        system: system.into(),
        instance: instance.into(),
        status,
        wall_s: 1.0,
        cpu_s: 1.0,
        peak_mem_bytes: 0,
        claim,
        cost,
        witness_path: None,
        witness_ok: (claim != ClaimKind::None).then_some(true),
        diagnostic: None,
    }
}

/// Records for every participant over `n` instances whose satisfiability
/// is fixed up front, so no claims contradict each other.
fn random_domain(
    rng: &mut ChaCha8Rng,
    task: Task,
    domain: &str,
    participants: &[String],
    n: usize,
) -> Vec<RunRecord> {
    let mut out = Vec::new();
    for k in 0..n {
        let instance = format!("{domain}-{k}");
        let satisfiable = rng.gen_bool(0.7);
        let optimum = rng.gen_range(0..20);
        for p in participants {
            let r = match (rng.gen_range(0..5), satisfiable, task) {
                (0, ..) => record(p, &instance, RunStatus::Timeout, ClaimKind::None, None),
                (1, ..) => record(p, &instance, RunStatus::Memout, ClaimKind::None, None),
                (_, false, _) => record(p, &instance, RunStatus::Solved, ClaimKind::Unsat, None),
                (_, true, Task::Optimization) => {
                    let cost = optimum + rng.gen_range(0..3);
                    if cost == optimum && rng.gen_bool(0.5) {
                        record(
                            p,
                            &instance,
                            RunStatus::Solved,
                            ClaimKind::Optimum,
                            Some(cost),
                        )
                    } else if rng.gen_bool(0.5) {
                        record(
                            p,
                            &instance,
                            RunStatus::Timeout,
                            ClaimKind::Cost,
                            Some(cost),
                        )
                    } else {
                        record(p, &instance, RunStatus::Solved, ClaimKind::Cost, Some(cost))
                    }
                }
                (_, true, _) => record(p, &instance, RunStatus::Solved, ClaimKind::Sat, None),
            };
            out.push(r);
        }
    }
    out
}

fn scoring_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let limit = 1200.0;
    let hundred = Score::from_integer(100);
    for case in 0..SCORING_CASES {
        let participants: Vec<String> =
            (0..rng.gen_range(1..=5)).map(|k| format!("s{k}")).collect();
        let n = rng.gen_range(1..=8);
        let tasks = [Task::Decision, Task::Optimization];
        let records: Vec<Vec<RunRecord>> = tasks
            .iter()
            .enumerate()
            .map(|(d, &task)| random_domain(&mut rng, task, &format!("d{d}"), &participants, n))
            .collect();
        let score_all = |records: &[Vec<RunRecord>],
                         scheme: Scheme|
         -> Result<Vec<Vec<aspcomp::scoring::DomainScore>>, String> {
            tasks
                .iter()
                .zip(records)
                .enumerate()
                .map(|(d, (&task, rs))| {
                    let refs: Vec<&RunRecord> = rs.iter().collect();
                    score_domain(
                        scheme,
                        task,
                        &format!("d{d}"),
                        &refs,
                        &participants,
                        n,
                        limit,
                    )
                    .map_err(|e| format!("case {case}: {e}"))
                })
                .collect()
        };
        let s1 = score_all(&records, Scheme::S1)?;
        let s2 = score_all(&records, Scheme::S2)?;
        for s in s1.iter().chain(&s2).flatten() {
            ensure(
                s.score >= Score::from_integer(0) && s.score <= hundred,
                || {
                    format!(
                        "case {case}: {} {} scored {}",
                        s.system,
                        s.domain,
                        score_value(&s.score)
                    )
                },
            )?;
        }
        for (a, b) in s1[1].iter().zip(&s2[1]) {
            ensure(b.score <= a.score, || {
                format!(
                    "case {case}: {} S2 {} above S1 {}",
                    a.system,
                    score_value(&b.score),
                    score_value(&a.score)
                )
            })?;
        }
        // Decision scores count solved instances directly.
        for s in &s1[0] {
            let solved = records[0]
                .iter()
                .filter(|r| r.system == s.system && r.status == RunStatus::Solved)
                .count();
            ensure(
                s.score == Ratio::new(100 * solved as i128, n as i128),
                || {
                    format!(
                        "case {case}: {} decision score {}",
                        s.system,
                        score_value(&s.score)
                    )
                },
            )?;
        }

        // One wrong claim zeroes the offender in that domain only.
        let d = rng.gen_range(0..2);
        let Some(k) = records[d].iter().position(|r| r.claim != ClaimKind::None) else {
            continue;
        };
        let mut tainted = records.clone();
        tainted[d][k].witness_ok = Some(false);
        let offender = tainted[d][k].system.clone();
        let after = score_all(&tainted, Scheme::S1)?;
        let mine: Vec<_> = after
            .iter()
            .flatten()
            .filter(|s| s.system == offender)
            .collect();
        let zeroed: Vec<_> = mine.iter().filter(|s| s.disqualified).collect();
        ensure(
            zeroed.len() == 1
                && zeroed[0].domain == format!("d{d}")
                && zeroed[0].score == Score::from_integer(0),
            || format!("case {case}: disqualification of {offender} gave {mine:?}"),
        )?;
        let other = 1 - d;
        let before = s1[other]
            .iter()
            .find(|s| s.system == offender)
            .map(|s| s.score);
        let now = after[other]
            .iter()
            .find(|s| s.system == offender)
            .map(|s| s.score);
        ensure(before == now, || {
            format!("case {case}: other domain changed {before:?} -> {now:?}")
        })?;
        ensure(
            after.iter().flatten().filter(|s| s.disqualified).count() == 1,
            || format!("case {case}: more than one disqualified score"),
        )?;
    }

    let board = rank_totals(vec![
        ("idlv-clasp-dlv".into(), Ratio::from_integer(2634), 0.0),
        ("idlv+s".into(), Ratio::from_integer(2665), 0.0),
        ("idlv+-clasp-dlv".into(), Ratio::new(26559, 10), 0.0),
    ]);
    let order: Vec<&str> = board.iter().map(|e| e.system.as_str()).collect();
    ensure(
        order == ["idlv+s", "idlv+-clasp-dlv", "idlv-clasp-dlv"],
        || format!("order {order:?}"),
    )?;

    let board = rank_totals(vec![
        ("idlv-clasp-dlv".into(), Ratio::from_integer(2185), 91_000.0),
        ("me-asp".into(), Ratio::from_integer(2185), 87_000.0),
        (
            "idlv+-clasp-dlv".into(),
            Ratio::from_integer(2200),
            80_000.0,
        ),
        ("idlv+s".into(), Ratio::from_integer(2330), 85_000.0),
    ]);
    let order: Vec<(usize, &str)> = board.iter().map(|e| (e.rank, e.system.as_str())).collect();
    ensure(
        order
            == [
                (1, "idlv+s"),
                (2, "idlv+-clasp-dlv"),
                (3, "me-asp"),
                (4, "idlv-clasp-dlv"),
            ],
        || format!("tie order {order:?}"),
    )
}

// Criterion 7

fn script(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(format!("{name}.sh"));
    fs::write(&path, format!("#!/bin/sh\n{body}\n")).expect("write script");
    fs::set_permissions(&path, fs::Permissions::from_mode(0o755)).expect("chmod script");
    path.display().to_string()
}

fn mock_catalog(dir: &Path, systems: &[(&str, &str)], instances: usize) -> Catalog {
    fs::write(dir.join("enc.lp"), "a :- not b.\nb :- not a.\n").expect("write encoding");
    let ids: Vec<String> = (1..=instances).map(|k| format!("i{k}")).collect();
    for id in &ids {
        fs::write(dir.join(format!("{id}.lp")), "").expect("write instance");
    }
    Catalog {
        config: CompetitionConfig {
            time_limit_s: 1,
            n_select: instances,
            m_free: 0,
            ..CompetitionConfig::default()
        },
        domains: vec![Domain {
            name: "Mock".into(),
            task: Task::Decision,
            subtrack: Some(Subtrack::Normal),
            encoding_path: "enc.lp".into(),
            instances: ids.clone(),
            witness_predicates: Vec::new(),
        }],
        systems: systems
            .iter()
            .map(|(name, body)| SystemEntry {
                name: name.to_string(),
                team: "mock".into(),
                category: Category::SP,
                launch_command: format!("{} {{encoding}} {{instance}}", script(dir, name, body)),
                supported_subtracks: Subtrack::ALL.into_iter().collect(),
                output: OutputKeywords::default(),
            })
            .collect(),
        instances: ids
            .iter()
            .map(|id| InstanceRecord {
                id: id.clone(),
                domain: "Mock".into(),
                path: format!("{id}.lp"),
                ref_runtimes: Default::default(),
                sat_status: SatStatus::Satisfiable,
                hardness: Some(Hardness::Medium),
            })
            .collect(),
    }
}

fn plan_catalog(catalog: &Catalog) -> Result<Vec<aspcomp::selection::SelectionPlan>, String> {
    curate_catalog(catalog)
        .iter()
        .map(|p| {
            plan_domain(p, &catalog.config, FreePickPolicy::Uniform).map_err(|e| e.to_string())
        })
        .collect()
}

fn orchestrator() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    let catalog = mock_catalog(
        dir,
        &[
            ("steady", "echo ANSWER; echo 'a.'"),
            (
                "erratic",
                "case \"$2\" in *i1.lp) echo ANSWER; echo 'b.';; \
                 *i2.lp) exec sleep 60;; \
                 *) echo 'out of memory' >&2; exit 1;; esac",
            ),
        ],
        3,
    );
    let plans = plan_catalog(&catalog)?;
    let systems = catalog.systems_in(Category::SP);
    let mut opts = CampaignOptions::new(dir.join("results.csv"), dir.join("runs"));
    opts.base_dir = dir.to_path_buf();
    opts.workers = 2;
    opts.max_jobs = Some(2);
    let first = run_campaign(&catalog, &plans, &systems, &opts).map_err(|e| e.to_string())?;
    ensure(first.executed == 2 && first.pending == 4, || {
        format!(
            "interrupted pass ran {} and left {}",
            first.executed, first.pending
        )
    })?;
    let done: BTreeSet<(String, String)> = first
        .trace
        .iter()
        .map(|t| (t.system.clone(), t.instance.clone()))
        .collect();
    opts.max_jobs = None;
    let second = run_campaign(&catalog, &plans, &systems, &opts).map_err(|e| e.to_string())?;
    let rerun: BTreeSet<(String, String)> = second
        .trace
        .iter()
        .map(|t| (t.system.clone(), t.instance.clone()))
        .collect();
    ensure(
        second.resumed == 2 && second.executed == 4 && done.is_disjoint(&rerun),
        || format!("resume ran {rerun:?} after {done:?}"),
    )?;

    let records = read_log(dir.join("results.csv")).map_err(|e| e.to_string())?;
    let count = |s: RunStatus| records.iter().filter(|r| r.status == s).count();
    let (sol, to, mo, oe) = (
        count(RunStatus::Solved),
        count(RunStatus::Timeout),
        count(RunStatus::Memout),
        count(RunStatus::OtherError),
    );
    let pairs: BTreeSet<_> = records.iter().map(|r| (&r.system, &r.instance)).collect();
    ensure(
        records.len() == 6 && pairs.len() == 6 && sol + to + mo + oe == 6,
        || {
            format!(
                "{} records: {sol} sol, {to} to, {mo} mo, {oe} oe",
                records.len()
            )
        },
    )?;
    ensure((sol, to, mo) == (4, 1, 1), || {
        format!("{sol} sol, {to} to, {mo} mo, {oe} oe")
    })?;

    // Scaled timeout.
    let argv = vec![script(dir, "stuck", "sleep 30 & sleep 30")];
    let rec = run_job(&JobSpec {
        system: "stuck".into(),
        instance: "i1".into(),
        argv,
        cores: 1,
        cpu_set: None,
        time_limit: SCALED_LIMIT,
        mem_limit_bytes: 1 << 30,
        stdout_path: dir.join("runs/stuck/i1.out"),
        task: Task::Decision,
        keywords: OutputKeywords::default(),
    });
    let limit = SCALED_LIMIT.as_secs_f64();
    ensure(rec.status == RunStatus::Timeout, || {
        format!("status {:?}", rec.status)
    })?;
    ensure(
        rec.wall_s >= limit && rec.wall_s <= limit * TIMEOUT_SLACK_RATIO,
        || {
            format!(
                "timeout after {:.3} s, allowed [{limit}, {:.3}]",
                rec.wall_s,
                limit * TIMEOUT_SLACK_RATIO
            )
        },
    )?;

    // Parallel single-processor runs, one core each.
    let par = tempfile::tempdir().map_err(|e| e.to_string())?;
    let catalog = mock_catalog(
        par.path(),
        &[
            ("napper", "sleep 0.4; echo ANSWER; echo 'a.'"),
            ("dozer", "sleep 0.4; echo ANSWER; echo 'b.'"),
        ],
        4,
    );
    let plans = plan_catalog(&catalog)?;
    let systems = catalog.systems_in(Category::SP);
    let mut opts = CampaignOptions::new(par.path().join("results.csv"), par.path().join("runs"));
    opts.base_dir = par.path().to_path_buf();
    opts.workers = SP_WORKERS;
    let report = run_campaign(&catalog, &plans, &systems, &opts).map_err(|e| e.to_string())?;
    ensure(
        report.executed == 8 && report.max_in_flight == SP_WORKERS,
        || {
            format!(
                "{} executed, {} in flight",
                report.executed, report.max_in_flight
            )
        },
    )?;
    let overlap = report.trace.iter().any(|a| {
        report
            .trace
            .iter()
            .filter(|b| b.start < a.end && a.start < b.end)
            .count()
            == SP_WORKERS
    });
    ensure(overlap, || {
        "no instant with all workers busy in the trace".into()
    })?;
    ensure(
        report
            .trace
            .iter()
            .all(|t| t.cpus.as_ref().is_none_or(|c| c.len() == 1)),
        || "single-processor job pinned to more than one core".into(),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        ("1 balancing golden values", graceful_graphs_balancing),
        ("2 status balancing", status_balancing),
        ("3 benchmark table regression", table1_regression),
        ("4 classifier fixtures", classifier_fixtures),
        ("5 stable model oracle", oracle_equivalence),
        ("6 scoring properties", scoring_properties),
        ("7 orchestrator", orchestrator),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("PASS  {name}"),
            Err(why) => {
                println!("FAIL  {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
