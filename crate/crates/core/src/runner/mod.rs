//! Running systems on selected instances under resource limits.

mod campaign;
mod job;
mod log;
mod output;
mod verify;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use campaign::{campaign_jobs, run_campaign, CampaignOptions, CampaignReport, JobTrace};
pub use job::{
    expand_template, group_rss_bytes, run_job, JobSpec, TemplateVars, MEM_SAMPLE_INTERVAL,
};
pub use log::{format_record, parse_log, read_log, LogWriter, LOG_HEADER};
pub use output::{parse_solver_output, Claim, ClaimKind};
pub use verify::{verify_record, verify_records, VerifyOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Solved,
    Timeout,
    Memout,
    #[serde(rename = "error")]
    OtherError,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Solved => "solved",
            RunStatus::Timeout => "timeout",
            RunStatus::Memout => "memout",
            RunStatus::OtherError => "error",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "solved" => RunStatus::Solved,
            "timeout" => RunStatus::Timeout,
            "memout" => RunStatus::Memout,
            "error" => RunStatus::OtherError,
            _ => return None,
        })
    }
}

/// Outcome of one system on one instance. The witness atoms stay in the
/// captured output at `witness_path`; the record carries the claim kind
/// and cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub system: String,
    pub instance: String,
    pub status: RunStatus,
    pub wall_s: f64,
    pub cpu_s: f64,
    pub peak_mem_bytes: u64,
    pub claim: ClaimKind,
    pub cost: Option<i64>,
    pub witness_path: Option<String>,
    /// `None` until checked, or when the check was out of reach.
    pub witness_ok: Option<bool>,
    #[serde(skip)]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("results log line {line}: {message}")]
    Log { line: usize, message: String },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
}
