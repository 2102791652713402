use std::collections::{BTreeSet, VecDeque};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{mpsc, Mutex};
use std::time::{Duration, Instant};

use serde::Serialize;

use super::job::{expand_template, path_string, run_job, JobSpec, TemplateVars};
use super::log::{read_log, LogWriter};
use super::{RunError, RunRecord};
use crate::catalog::{Catalog, Category, SystemEntry};
use crate::selection::SelectionPlan;

#[derive(Debug, Clone)]
pub struct CampaignOptions {
    pub workers: usize,
    pub category: Category,
    pub log_path: PathBuf,
    /// Captured solver output goes to `<out_dir>/<system>/<instance>.out`.
    pub out_dir: PathBuf,
    /// Encoding and instance paths in the catalog are relative to this.
    pub base_dir: PathBuf,
    /// CPUs jobs are pinned to; empty disables pinning.
    pub cpus: Vec<usize>,
    /// Stop dispatching after this many jobs.
    pub max_jobs: Option<usize>,
}

impl CampaignOptions {
    pub fn new(log_path: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        CampaignOptions {
            workers: 1,
            category: Category::SP,
            log_path: log_path.into(),
            out_dir: out_dir.into(),
            base_dir: PathBuf::from("."),
            cpus: host_cpus(),
            max_jobs: None,
        }
    }
}

/// CPUs this process may run on.
pub fn host_cpus() -> Vec<usize> {
    // SAFETY: cpu_set_t is plain data and the size passed matches it.
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        if libc::sched_getaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &mut set) != 0 {
            return Vec::new();
        }
        (0..libc::CPU_SETSIZE as usize)
            .filter(|&c| libc::CPU_ISSET(c, &set))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobTrace {
    pub system: String,
    pub instance: String,
    pub worker: usize,
    pub cpus: Option<Vec<usize>>,
    pub start: Duration,
    pub end: Duration,
}

#[derive(Debug, Clone, Default)]
pub struct CampaignReport {
    /// Records from earlier runs followed by the new ones, in log order.
    pub records: Vec<RunRecord>,
    pub executed: usize,
    pub resumed: usize,
    /// Pairs left for a later run because of `max_jobs`.
    pub pending: usize,
    pub max_in_flight: usize,
    pub trace: Vec<JobTrace>,
}

/// The (system, instance) pairs of a campaign: every selected instance for
/// every system supporting its domain's sub-track.
pub fn campaign_jobs(
    catalog: &Catalog,
    plans: &[SelectionPlan],
    systems: &[&SystemEntry],
) -> Vec<(String, String)> {
    let mut jobs = Vec::new();
    for plan in plans {
        let subtrack = catalog.domain(&plan.domain).and_then(|d| d.subtrack);
        for instance in plan.chosen() {
            for system in systems {
                if subtrack.is_none_or(|s| system.supported_subtracks.contains(&s)) {
                    jobs.push((system.name.clone(), instance.to_string()));
                }
            }
        }
    }
    jobs
}

fn file_component(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "._+-".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn job_spec(
    catalog: &Catalog,
    system: &SystemEntry,
    instance: &str,
    opts: &CampaignOptions,
) -> Result<JobSpec, RunError> {
    let unknown = |kind, name: &str| RunError::Unknown {
        kind,
        name: name.to_string(),
    };
    let record = catalog
        .instance(instance)
        .ok_or_else(|| unknown("instance", instance))?;
    let domain = catalog
        .domain(&record.domain)
        .ok_or_else(|| unknown("domain", &record.domain))?;
    let cfg = &catalog.config;
    let cores = match system.category {
        Category::SP => 1,
        Category::MP => cfg.mp_cores.max(1),
    };
    let resolve = |p: &str| path_string(&opts.base_dir.join(p));
    let (encoding, instance_path) = (resolve(&domain.encoding_path), resolve(&record.path));
    let argv = expand_template(
        &system.launch_command,
        &TemplateVars {
            encoding: &encoding,
            instance: &instance_path,
            cores,
            time_limit_s: cfg.time_limit_s,
            mem_limit_bytes: cfg.mem_limit_bytes,
        },
    );
    Ok(JobSpec {
        system: system.name.clone(),
        instance: instance.to_string(),
        argv,
        cores,
        cpu_set: None,
        time_limit: Duration::from_secs(cfg.time_limit_s),
        mem_limit_bytes: cfg.mem_limit_bytes,
        stdout_path: opts
            .out_dir
            .join(file_component(&system.name))
            .join(format!("{}.out", file_component(instance))),
        task: domain.task,
        keywords: system.output.clone(),
    })
}

fn worker_cpus(cpus: &[usize], worker: usize, cores: u32) -> Option<Vec<usize>> {
    if cpus.is_empty() {
        return None;
    }
    let k = cores as usize;
    let set: BTreeSet<usize> = (0..k)
        .map(|j| cpus[(worker * k + j) % cpus.len()])
        .collect();
    Some(set.into_iter().collect())
}

/// Runs every pair not yet in the log with a fixed pool of workers; one
/// writer appends each record as it arrives.
pub fn run_campaign(
    catalog: &Catalog,
    plans: &[SelectionPlan],
    systems: &[&SystemEntry],
    opts: &CampaignOptions,
) -> Result<CampaignReport, RunError> {
    let systems: Vec<&SystemEntry> = systems
        .iter()
        .copied()
        .filter(|s| s.category == opts.category)
        .collect();
    let earlier = read_log(&opts.log_path)?;
    let done: BTreeSet<(&str, &str)> = earlier
        .iter()
        .map(|r| (r.system.as_str(), r.instance.as_str()))
        .collect();
    let mut queue = VecDeque::new();
    let mut missing = 0;
    for (system, instance) in campaign_jobs(catalog, plans, &systems) {
        if done.contains(&(system.as_str(), instance.as_str())) {
            continue;
        }
        missing += 1;
        if opts.max_jobs.is_some_and(|k| queue.len() >= k) {
            continue;
        }
        let entry = systems
            .iter()
            .find(|s| s.name == system)
            .expect("jobs come from these systems");
        queue.push_back(job_spec(catalog, entry, &instance, opts)?);
    }

    let mut report = CampaignReport {
        resumed: earlier.len(),
        pending: missing - queue.len(),
        ..CampaignReport::default()
    };
    report.records = earlier;
    let mut writer = LogWriter::open(&opts.log_path)?;

    let queue = Mutex::new(queue);
    let in_flight = AtomicUsize::new(0);
    let max_in_flight = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let epoch = Instant::now();
    let (tx, rx) = mpsc::channel::<(RunRecord, JobTrace)>();
    let mut write_error = None;

    std::thread::scope(|scope| {
        for worker in 0..opts.workers.max(1) {
            let tx = tx.clone();
            let (queue, in_flight, max_in_flight, stop) =
                (&queue, &in_flight, &max_in_flight, &stop);
            scope.spawn(move || loop {
                if stop.load(Ordering::SeqCst) {
                    break;
                }
                let Some(mut spec) = queue.lock().expect("queue lock").pop_front() else {
                    break;
                };
                spec.cpu_set = worker_cpus(&opts.cpus, worker, spec.cores);
                let now = in_flight.fetch_add(1, Ordering::SeqCst) + 1;
                max_in_flight.fetch_max(now, Ordering::SeqCst);
                let start = epoch.elapsed();
                let record = run_job(&spec);
                let end = epoch.elapsed();
                in_flight.fetch_sub(1, Ordering::SeqCst);
                let trace = JobTrace {
                    system: spec.system,
                    instance: spec.instance,
                    worker,
                    cpus: spec.cpu_set,
                    start,
                    end,
                };
                if tx.send((record, trace)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (record, trace) in rx {
            if let Err(e) = writer.append(&record) {
                stop.store(true, Ordering::SeqCst);
                write_error.get_or_insert(RunError::Io {
                    path: opts.log_path.display().to_string(),
                    source: e,
                });
                continue;
            }
            report.executed += 1;
            report.records.push(record);
            report.trace.push(trace);
        }
    });

    if let Some(e) = write_error {
        return Err(e);
    }
    report.max_in_flight = max_in_flight.into_inner();
    Ok(report)
}
