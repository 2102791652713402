use std::fs::{self, File};
use std::io;
use std::os::unix::process::CommandExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use super::output::parse_solver_output;
use super::{RunRecord, RunStatus};
use crate::catalog::{OutputKeywords, Task};

/// Interval between memory samples of the solver's process group.
pub const MEM_SAMPLE_INTERVAL: Duration = Duration::from_millis(100);
const POLL_INTERVAL: Duration = Duration::from_millis(5);

/// Values substituted for `{encoding}`, `{instance}`, `{cores}`,
/// `{time_limit}` and `{mem_limit}` in a launch command.
#[derive(Debug, Clone)]
pub struct TemplateVars<'a> {
    pub encoding: &'a str,
    pub instance: &'a str,
    pub cores: u32,
    pub time_limit_s: u64,
    pub mem_limit_bytes: u64,
}

/// Splits `template` on whitespace and substitutes placeholders per word.
pub fn expand_template(template: &str, vars: &TemplateVars<'_>) -> Vec<String> {
    template
        .split_whitespace()
        .map(|word| {
            word.replace("{encoding}", vars.encoding)
                .replace("{instance}", vars.instance)
                .replace("{cores}", &vars.cores.to_string())
                .replace("{time_limit}", &vars.time_limit_s.to_string())
                .replace("{mem_limit}", &vars.mem_limit_bytes.to_string())
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct JobSpec {
    pub system: String,
    pub instance: String,
    pub argv: Vec<String>,
    /// 1 in the single-processor category.
    pub cores: u32,
    /// CPUs the job is pinned to, if any.
    pub cpu_set: Option<Vec<usize>>,
    pub time_limit: Duration,
    pub mem_limit_bytes: u64,
    /// Captured standard output; standard error goes next to it with an
    /// `.err` extension.
    pub stdout_path: PathBuf,
    pub task: Task,
    pub keywords: OutputKeywords,
}

impl JobSpec {
    pub fn stderr_path(&self) -> PathBuf {
        self.stdout_path.with_extension("err")
    }
}

const MEMORY_FAILURE_MARKERS: [&str; 6] = [
    "memory exhausted",
    "out of memory",
    "cannot allocate memory",
    "bad_alloc",
    "memoryerror",
    "memory allocation",
];

fn mentions_memory_failure(stderr: &str) -> bool {
    let lower = stderr.to_lowercase();
    MEMORY_FAILURE_MARKERS.iter().any(|m| lower.contains(m))
}

fn page_size() -> u64 {
    // SAFETY: sysconf has no preconditions.
    let p = unsafe { libc::sysconf(libc::_SC_PAGESIZE) };
    if p > 0 {
        p as u64
    } else {
        4096
    }
}

/// Resident memory summed over all processes in group `pgid`.
pub fn group_rss_bytes(pgid: i32) -> u64 {
    let Ok(entries) = fs::read_dir("/proc") else {
        return 0;
    };
    let mut pages = 0u64;
    for entry in entries.flatten() {
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        if !name.bytes().all(|b| b.is_ascii_digit()) {
            continue;
        }
        let Ok(stat) = fs::read_to_string(entry.path().join("stat")) else {
            continue;
        };
        // fields after the parenthesised command name: state ppid pgrp ...
        let Some(rest) = stat.rsplit_once(')').map(|(_, r)| r) else {
            continue;
        };
        let fields: Vec<&str> = rest.split_whitespace().collect();
        if fields.get(2).and_then(|f| f.parse::<i32>().ok()) == Some(pgid) {
            pages += fields
                .get(21)
                .and_then(|f| f.parse::<u64>().ok())
                .unwrap_or(0);
        }
    }
    pages * page_size()
}

fn seconds(tv: libc::timeval) -> f64 {
    tv.tv_sec as f64 + tv.tv_usec as f64 / 1e6
}

fn failed(spec: &JobSpec, diagnostic: String) -> RunRecord {
    RunRecord {
        system: spec.system.clone(),
        instance: spec.instance.clone(),
        status: RunStatus::OtherError,
        wall_s: 0.0,
        cpu_s: 0.0,
        peak_mem_bytes: 0,
        claim: super::ClaimKind::None,
        cost: None,
        witness_path: None,
        witness_ok: None,
        diagnostic: Some(diagnostic),
    }
}

fn configure(cmd: &mut Command, spec: &JobSpec) {
    let mem = spec.mem_limit_bytes as libc::rlim_t;
    let cpus = spec.cpu_set.clone();
    // SAFETY: only async-signal-safe calls between fork and exec.
    unsafe {
        cmd.pre_exec(move || {
            if libc::setpgid(0, 0) != 0 {
                return Err(io::Error::last_os_error());
            }
            let limit = libc::rlimit {
                rlim_cur: mem,
                rlim_max: mem,
            };
            if libc::setrlimit(libc::RLIMIT_AS, &limit) != 0 {
                return Err(io::Error::last_os_error());
            }
            if let Some(cpus) = &cpus {
                let mut set: libc::cpu_set_t = std::mem::zeroed();
                for &c in cpus {
                    libc::CPU_SET(c, &mut set);
                }
                if libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) != 0 {
                    return Err(io::Error::last_os_error());
                }
            }
            Ok(())
        });
    }
}

/// Runs one solver invocation under the wall-clock and address-space
/// limits of `spec`. Never fails: launch problems become `OtherError`.
pub fn run_job(spec: &JobSpec) -> RunRecord {
    let Some((program, args)) = spec.argv.split_first() else {
        return failed(spec, "empty launch command".into());
    };
    if let Some(dir) = spec.stdout_path.parent() {
        if let Err(e) = fs::create_dir_all(dir) {
            return failed(spec, format!("{}: {e}", dir.display()));
        }
    }
    let (stdout, stderr) = match (
        File::create(&spec.stdout_path),
        File::create(spec.stderr_path()),
    ) {
        (Ok(o), Ok(e)) => (o, e),
        (Err(e), _) | (_, Err(e)) => {
            return failed(spec, format!("{}: {e}", spec.stdout_path.display()))
        }
    };
    let mut cmd = Command::new(program);
    cmd.args(args)
        .stdin(Stdio::null())
        .stdout(stdout)
        .stderr(stderr);
    configure(&mut cmd, spec);

    let start = Instant::now();
    let child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) => return failed(spec, format!("cannot launch `{program}`: {e}")),
    };
    let pid = child.id() as libc::pid_t;

    let mut peak = 0u64;
    let mut next_sample = start;
    let mut killed: Option<RunStatus> = None;
    let wall;
    let mut status: libc::c_int = 0;
    // SAFETY: rusage is plain data.
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    loop {
        // SAFETY: pid is our unreaped child.
        let r = unsafe { libc::wait4(pid, &mut status, libc::WNOHANG, &mut usage) };
        if r == pid {
            wall = start.elapsed();
            break;
        }
        if r < 0 {
            let err = io::Error::last_os_error();
            if err.kind() == io::ErrorKind::Interrupted {
                continue;
            }
            return failed(spec, format!("waiting for `{program}`: {err}"));
        }
        let now = Instant::now();
        let elapsed = now - start;
        if elapsed >= spec.time_limit {
            killed = Some(RunStatus::Timeout);
        } else if now >= next_sample {
            peak = peak.max(group_rss_bytes(pid));
            next_sample = now + MEM_SAMPLE_INTERVAL;
            if peak > spec.mem_limit_bytes {
                killed = Some(RunStatus::Memout);
            }
        }
        if killed.is_some() {
            wall = elapsed;
            // SAFETY: signalling our own process group; the child is reaped below.
            unsafe {
                libc::killpg(pid, libc::SIGKILL);
                while libc::wait4(pid, &mut status, 0, &mut usage) < 0
                    && io::Error::last_os_error().kind() == io::ErrorKind::Interrupted
                {
                }
            }
            break;
        }
        std::thread::sleep(POLL_INTERVAL.min(spec.time_limit - elapsed));
    }
    // stray descendants that outlived the leader
    // SAFETY: as above.
    unsafe {
        libc::killpg(pid, libc::SIGKILL);
    }

    peak = peak.max(usage.ru_maxrss.max(0) as u64 * 1024);
    let text = fs::read_to_string(&spec.stdout_path).unwrap_or_default();
    let errors = fs::read_to_string(spec.stderr_path()).unwrap_or_default();
    let (claim, mut diagnostic) = parse_solver_output(&text, spec.task, &spec.keywords);
    let exited = libc::WIFEXITED(status);

    let status = match killed {
        Some(s) => s,
        None if exited && claim.kind() != super::ClaimKind::None => RunStatus::Solved,
        None if mentions_memory_failure(&errors) || peak > spec.mem_limit_bytes => {
            RunStatus::Memout
        }
        None => {
            if diagnostic.is_none() {
                diagnostic = Some(if exited {
                    format!(
                        "exit code {} without a recognized answer",
                        libc::WEXITSTATUS(status)
                    )
                } else {
                    format!("terminated by signal {}", libc::WTERMSIG(status))
                });
            }
            RunStatus::OtherError
        }
    };
    RunRecord {
        system: spec.system.clone(),
        instance: spec.instance.clone(),
        status,
        wall_s: wall.as_secs_f64(),
        cpu_s: seconds(usage.ru_utime) + seconds(usage.ru_stime),
        peak_mem_bytes: peak,
        claim: claim.kind(),
        cost: claim.cost(),
        witness_path: Some(path_string(&spec.stdout_path)),
        witness_ok: None,
        diagnostic,
    }
}

pub(crate) fn path_string(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::os::unix::fs::PermissionsExt;

    fn script(dir: &Path, name: &str, body: &str) -> String {
        let path = dir.join(name);
        fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
        fs::set_permissions(&path, fs::Permissions::from_mode(0o755)).unwrap();
        path_string(&path)
    }

    fn spec(dir: &Path, argv: Vec<String>, limit: Duration) -> JobSpec {
        JobSpec {
            system: "mock".into(),
            instance: "i1".into(),
            argv,
            cores: 1,
            cpu_set: None,
            time_limit: limit,
            mem_limit_bytes: 1 << 30,
            stdout_path: dir.join("out/i1.out"),
            task: Task::Decision,
            keywords: OutputKeywords::default(),
        }
    }

    #[test]
    fn template() {
        let vars = TemplateVars {
            encoding: "enc.lp",
            instance: "i.lp",
            cores: 8,
            time_limit_s: 1200,
            mem_limit_bytes: 42,
        };
        assert_eq!(
            expand_template(
                "solver --threads={cores} {encoding} {instance} -t {time_limit}",
                &vars
            ),
            ["solver", "--threads=8", "enc.lp", "i.lp", "-t", "1200"]
        );
    }

    #[test]
    fn solved_with_witness() {
        let dir = tempfile::tempdir().unwrap();
        let s = script(dir.path(), "sat.sh", "echo ANSWER; echo 'p(1). q.'");
        let rec = run_job(&spec(dir.path(), vec![s], Duration::from_secs(10)));
        assert_eq!(rec.status, RunStatus::Solved, "{:?}", rec.diagnostic);
        assert_eq!(rec.claim, super::super::ClaimKind::Sat);
        assert!(rec.wall_s < 10.0);
    }

    #[test]
    fn missing_command() {
        let dir = tempfile::tempdir().unwrap();
        let rec = run_job(&spec(
            dir.path(),
            vec!["/nonexistent/solver".into()],
            Duration::from_secs(1),
        ));
        assert_eq!(rec.status, RunStatus::OtherError);
        assert!(rec.diagnostic.unwrap().contains("cannot launch"));
    }

    #[test]
    fn crash_without_answer() {
        let dir = tempfile::tempdir().unwrap();
        let s = script(dir.path(), "crash.sh", "echo garbage; exit 3");
        let rec = run_job(&spec(dir.path(), vec![s], Duration::from_secs(5)));
        assert_eq!(rec.status, RunStatus::OtherError);
        assert!(rec.diagnostic.unwrap().contains("exit code 3"));
    }

    #[test]
    fn timeout_kills_whole_group() {
        let dir = tempfile::tempdir().unwrap();
        let s = script(dir.path(), "slow.sh", "sleep 30 & sleep 30");
        let limit = Duration::from_millis(300);
        let rec = run_job(&spec(dir.path(), vec![s], limit));
        assert_eq!(rec.status, RunStatus::Timeout);
        assert!(rec.wall_s >= 0.3 && rec.wall_s < 1.0, "{}", rec.wall_s);
    }

    #[test]
    fn allocation_failure_is_memout() {
        let dir = tempfile::tempdir().unwrap();
        let s = script(dir.path(), "hog.sh", "head -c 300000000 /dev/zero | tail");
        let mut spec = spec(dir.path(), vec![s], Duration::from_secs(20));
        spec.mem_limit_bytes = 64 << 20;
        let rec = run_job(&spec);
        assert_eq!(rec.status, RunStatus::Memout, "{:?}", rec.diagnostic);
    }
}
