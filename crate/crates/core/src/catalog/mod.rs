//! Domains, instances, systems and competition settings, stored as one JSON
//! manifest with top-level keys `config`, `domains`, `systems` and
//! `instances`.

mod refruns;
pub mod table1;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::Subtrack;

pub use refruns::{export_ref_runtimes, import_ref_runtimes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Decision,
    Optimization,
    Query,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Decision => "decision",
            Task::Optimization => "optimization",
            Task::Query => "query",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SatStatus {
    Satisfiable,
    Unsatisfiable,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hardness {
    VeryEasy,
    Easy,
    Medium,
    Hard,
    TooHard,
    Excluded(String),
}

/// Outcome of one reference-system run on an instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefOutcome {
    Solved(f64),
    /// Did not finish within the given horizon in seconds.
    Timeout(u32),
    Memout,
    Error,
}

pub const HORIZONS: [u32; 2] = [1200, 2400];

impl RefOutcome {
    fn check(&self) -> Result<(), String> {
        match *self {
            RefOutcome::Solved(s) if !(s.is_finite() && s >= 0.0) => {
                Err(format!("solving time {s} is not a nonnegative duration"))
            }
            RefOutcome::Timeout(h) if !HORIZONS.contains(&h) => {
                Err(format!("timeout horizon {h} is neither 1200 nor 2400"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub name: String,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtrack: Option<Subtrack>,
    pub encoding_path: String,
    pub instances: Vec<String>,
    /// Predicates that make up a witness; empty means the whole model.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witness_predicates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceRecord {
    pub id: String,
    pub domain: String,
    pub path: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ref_runtimes: BTreeMap<String, RefOutcome>,
    pub sat_status: SatStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hardness: Option<Hardness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    SP,
    MP,
}

impl std::str::FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "SP" | "sp" => Ok(Category::SP),
            "MP" | "mp" => Ok(Category::MP),
            _ => Err(format!("unknown category `{s}`")),
        }
    }
}

/// Line markers a system prints; the defaults cover the usual conventions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputKeywords {
    pub answer: String,
    pub unsat: String,
    pub cost: String,
    pub optimum: String,
}

impl Default for OutputKeywords {
    fn default() -> Self {
        OutputKeywords {
            answer: "ANSWER".into(),
            unsat: "UNSATISFIABLE".into(),
            cost: "COST".into(),
            optimum: "OPTIMUM FOUND".into(),
        }
    }
}

impl OutputKeywords {
    fn is_default(&self) -> bool {
        *self == OutputKeywords::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemEntry {
    pub name: String,
    pub team: String,
    pub category: Category,
    /// Whitespace-separated tokens; `{encoding}`, `{instance}`, `{cores}`,
    /// `{time_limit}` and `{mem_limit}` are substituted per job.
    pub launch_command: String,
    pub supported_subtracks: BTreeSet<Subtrack>,
    #[serde(default, skip_serializing_if = "OutputKeywords::is_default")]
    pub output: OutputKeywords,
}

fn default_time_limit() -> u64 {
    1200
}
fn default_mem_limit() -> u64 {
    12 << 30
}
fn default_n_select() -> usize {
    20
}
fn default_m_free() -> usize {
    1
}
fn default_mp_cores() -> u32 {
    8
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompetitionConfig {
    #[serde(default = "default_time_limit")]
    pub time_limit_s: u64,
    #[serde(default = "default_mem_limit")]
    pub mem_limit_bytes: u64,
    #[serde(default = "default_n_select")]
    pub n_select: usize,
    #[serde(default = "default_m_free")]
    pub m_free: usize,
    #[serde(default)]
    pub seed: u64,
    /// Cores handed to each job in the MP category.
    #[serde(default = "default_mp_cores")]
    pub mp_cores: u32,
}

impl Default for CompetitionConfig {
    fn default() -> Self {
        CompetitionConfig {
            time_limit_s: default_time_limit(),
            mem_limit_bytes: default_mem_limit(),
            n_select: default_n_select(),
            m_free: default_m_free(),
            seed: 0,
            mp_cores: default_mp_cores(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("{line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("reference to undefined id `{0}`")]
    DanglingReference(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("invalid catalog: {0}")]
    Invalid(String),
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for CatalogError {
    fn from(e: std::io::Error) -> Self {
        CatalogError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Catalog {
    pub config: CompetitionConfig,
    pub domains: Vec<Domain>,
    pub systems: Vec<SystemEntry>,
    pub instances: Vec<InstanceRecord>,
}

impl Catalog {
    pub fn from_json(text: &str) -> Result<Self, CatalogError> {
        let catalog: Catalog = serde_json::from_str(text).map_err(|e| CatalogError::Parse {
            line: e.line(),
            col: e.column(),
            message: e.to_string(),
        })?;
        catalog.validate()?;
        Ok(catalog)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("catalog serializes");
        text.push('\n');
        text
    }

    pub fn validate(&self) -> Result<(), CatalogError> {
        let c = &self.config;
        if c.time_limit_s == 0 || c.mem_limit_bytes == 0 || c.n_select == 0 || c.mp_cores == 0 {
            return Err(CatalogError::Invalid(
                "limits, n_select and mp_cores must be positive".into(),
            ));
        }

        let mut domains = BTreeSet::new();
        for d in &self.domains {
            if !domains.insert(d.name.as_str()) {
                return Err(CatalogError::DuplicateId(d.name.clone()));
            }
            if d.subtrack == Some(Subtrack::Weak) && d.task != Task::Optimization {
                return Err(CatalogError::Invalid(format!(
                    "domain `{}` is in sub-track #3 but its task is {}",
                    d.name, d.task
                )));
            }
        }

        let mut instances: BTreeMap<&str, &InstanceRecord> = BTreeMap::new();
        for inst in &self.instances {
            if instances.insert(&inst.id, inst).is_some() {
                return Err(CatalogError::DuplicateId(inst.id.clone()));
            }
            if !domains.contains(inst.domain.as_str()) {
                return Err(CatalogError::DanglingReference(inst.domain.clone()));
            }
            for (system, outcome) in &inst.ref_runtimes {
                outcome.check().map_err(|m| {
                    CatalogError::Invalid(format!("instance `{}`, system `{system}`: {m}", inst.id))
                })?;
            }
        }

        let mut listed = BTreeSet::new();
        for d in &self.domains {
            for id in &d.instances {
                let inst = instances
                    .get(id.as_str())
                    .ok_or_else(|| CatalogError::DanglingReference(id.clone()))?;
                if inst.domain != d.name {
                    return Err(CatalogError::Invalid(format!(
                        "instance `{id}` is listed by `{}` but belongs to `{}`",
                        d.name, inst.domain
                    )));
                }
                if !listed.insert(id.as_str()) {
                    return Err(CatalogError::DuplicateId(id.clone()));
                }
            }
        }
        if let Some(missing) = self
            .instances
            .iter()
            .find(|i| !listed.contains(i.id.as_str()))
        {
            return Err(CatalogError::Invalid(format!(
                "instance `{}` is not listed by domain `{}`",
                missing.id, missing.domain
            )));
        }

        let mut systems = BTreeSet::new();
        for s in &self.systems {
            if !systems.insert((s.category, s.name.as_str())) {
                return Err(CatalogError::DuplicateId(s.name.clone()));
            }
        }
        Ok(())
    }

    pub fn domain(&self, name: &str) -> Option<&Domain> {
        self.domains.iter().find(|d| d.name == name)
    }

    pub fn instance(&self, id: &str) -> Option<&InstanceRecord> {
        self.instances.iter().find(|i| i.id == id)
    }

    pub fn instance_mut(&mut self, id: &str) -> Option<&mut InstanceRecord> {
        self.instances.iter_mut().find(|i| i.id == id)
    }

    /// Instances of a domain in the order the domain lists them.
    pub fn instances_of<'a>(&'a self, domain: &'a Domain) -> Vec<&'a InstanceRecord> {
        let by_id: BTreeMap<&str, &InstanceRecord> =
            self.instances.iter().map(|i| (i.id.as_str(), i)).collect();
        domain
            .instances
            .iter()
            .filter_map(|id| by_id.get(id.as_str()).copied())
            .collect()
    }

    pub fn systems_in(&self, category: Category) -> Vec<&SystemEntry> {
        self.systems
            .iter()
            .filter(|s| s.category == category)
            .collect()
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Catalog, CatalogError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| CatalogError::Io(format!("{}: {e}", path.display())))?;
    Catalog::from_json(&text)
}

/// Writes the manifest through a temporary file in the target directory and
/// renames it into place.
pub fn save_manifest(catalog: &Catalog, path: impl AsRef<Path>) -> Result<(), CatalogError> {
    catalog.validate()?;
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(catalog.to_json().as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| CatalogError::Io(e.to_string()))?;
    Ok(())
}
