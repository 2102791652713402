//! The 2017 benchmark-domain table: per domain and (hardness class, status)
//! cell, how many instances were available after curation and how many were
//! picked. [`table1_catalog`] turns the table into a catalog with synthetic
//! instances whose reference runtimes reproduce each cell's class.

use std::collections::BTreeMap;

use serde::Deserialize;

use super::{
    Catalog, Category, CompetitionConfig, Domain, InstanceRecord, OutputKeywords, RefOutcome,
    SatStatus, SystemEntry, Task,
};
use crate::classify::Subtrack;
pub use crate::hardness::Class;

pub const TABLE1_CSV: &str = include_str!("../../data/aspcomp2017_table1.csv");

/// Domains whose curated pool was too small to run.
pub const DISCARDED: [&str; 1] = ["Resource Allocation"];

pub const REFERENCE_SYSTEMS: [&str; 3] = ["clasp", "lp2normal2+clasp", "wasp-1.5"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Sat,
    Unsat,
    Unknown,
}

impl CellStatus {
    pub fn sat_status(self) -> SatStatus {
        match self {
            CellStatus::Sat => SatStatus::Satisfiable,
            CellStatus::Unsat => SatStatus::Unsatisfiable,
            CellStatus::Unknown => SatStatus::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Table1Row {
    pub domain: String,
    #[serde(deserialize_with = "subtrack")]
    pub subtrack: Subtrack,
    pub task: Task,
    pub class: Class,
    pub sat_status: CellStatus,
    pub available: usize,
    pub selected: Option<usize>,
}

fn subtrack<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Subtrack, D::Error> {
    let n = u8::deserialize(d)?;
    Subtrack::try_from(n).map_err(serde::de::Error::custom)
}

pub fn table1_rows() -> Vec<Table1Row> {
    csv::Reader::from_reader(TABLE1_CSV.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .expect("embedded table parses")
}

/// Rows grouped by domain, in table order.
pub fn table1_domains() -> Vec<(String, Vec<Table1Row>)> {
    let mut out: Vec<(String, Vec<Table1Row>)> = Vec::new();
    for row in table1_rows() {
        match out.last_mut() {
            Some((name, rows)) if *name == row.domain => rows.push(row),
            _ => out.push((row.domain.clone(), vec![row])),
        }
    }
    out
}

/// Reference outcomes, in [`REFERENCE_SYSTEMS`] order, that place an
/// instance in `class`.
pub fn reference_outcomes(class: Class) -> [RefOutcome; 3] {
    use RefOutcome::*;
    match class {
        Class::Easy => [Solved(25.0), Solved(60.0), Solved(100.0)],
        Class::Medium => [Solved(150.0), Solved(600.0), Solved(900.0)],
        Class::Hard => [Solved(1500.0), Timeout(2400), Solved(900.0)],
        Class::TooHard => [Timeout(2400); 3],
    }
}

pub fn slug(name: &str) -> String {
    name.to_lowercase()
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("-")
}

pub fn participant_systems() -> Vec<SystemEntry> {
    let all: Vec<Subtrack> = Subtrack::ALL.to_vec();
    let hcf_only = vec![Subtrack::Normal, Subtrack::Extended, Subtrack::Weak];
    let no_opt_hcf = vec![Subtrack::Normal, Subtrack::Extended];
    let no_opt = vec![Subtrack::Normal, Subtrack::Extended, Subtrack::NonHcf];
    let entries: [(&str, &str, Category, &Vec<Subtrack>); 14] = [
        ("lp2sat+lingeling", "Aalto", Category::SP, &no_opt_hcf),
        ("lp2sat+plingeling-mt", "Aalto", Category::MP, &no_opt_hcf),
        ("lp2mip", "Aalto", Category::SP, &hcf_only),
        ("lp2mip-mt", "Aalto", Category::MP, &hcf_only),
        ("lp2acycasp", "Aalto", Category::SP, &hcf_only),
        ("lp2acycpb", "Aalto", Category::SP, &hcf_only),
        ("lp2acycsat", "Aalto", Category::SP, &hcf_only),
        ("lp2normal+lp2sts", "Aalto", Category::SP, &no_opt),
        ("lp2normal+clasp", "Aalto", Category::SP, &all),
        ("me-asp2", "ME-ASP", Category::SP, &all),
        ("idlv-clasp-dlv", "UNICAL", Category::SP, &all),
        ("idlv+-clasp-dlv", "UNICAL", Category::SP, &all),
        ("idlv+-wasp-dlv", "UNICAL", Category::SP, &all),
        ("idlv+s", "UNICAL", Category::SP, &all),
    ];
    entries
        .into_iter()
        .map(|(name, team, category, tracks)| SystemEntry {
            name: name.into(),
            team: team.into(),
            category,
            launch_command: format!("{name} {{encoding}} {{instance}}"),
            supported_subtracks: tracks.iter().copied().collect(),
            output: OutputKeywords::default(),
        })
        .collect()
}

/// A catalog with one synthetic instance per available slot of every cell.
/// Instance ids are `<domain-slug>-<class>-<status>-<k>`.
pub fn table1_catalog() -> Catalog {
    let mut catalog = Catalog {
        config: CompetitionConfig::default(),
        systems: participant_systems(),
        ..Catalog::default()
    };
    for (name, rows) in table1_domains() {
        let s = slug(&name);
        let mut ids = Vec::new();
        for row in &rows {
            for k in 0..row.available {
                let id = format!(
                    "{s}-{}-{}-{k:03}",
                    row.class.label(),
                    match row.sat_status {
                        CellStatus::Sat => "sat",
                        CellStatus::Unsat => "unsat",
                        CellStatus::Unknown => "unknown",
                    }
                );
                let ref_runtimes: BTreeMap<String, RefOutcome> = REFERENCE_SYSTEMS
                    .iter()
                    .map(ToString::to_string)
                    .zip(reference_outcomes(row.class))
                    .collect();
                catalog.instances.push(InstanceRecord {
                    id: id.clone(),
                    domain: name.clone(),
                    path: format!("instances/{s}/{id}.asp"),
                    ref_runtimes,
                    sat_status: row.sat_status.sat_status(),
                    hardness: None,
                });
                ids.push(id);
            }
        }
        catalog.domains.push(Domain {
            name: name.clone(),
            task: rows[0].task,
            subtrack: Some(rows[0].subtrack),
            encoding_path: format!("encodings/{s}.asp"),
            instances: ids,
            witness_predicates: Vec::new(),
        });
    }
    catalog
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shape() {
        let domains = table1_domains();
        assert_eq!(domains.len(), 36);
        for (name, rows) in &domains {
            assert_eq!(rows.len(), 8, "{name}");
            assert!(rows
                .iter()
                .all(|r| r.task == rows[0].task && r.subtrack == rows[0].subtrack));
        }
        let total: usize = domains
            .iter()
            .flat_map(|(_, r)| r)
            .map(|r| r.available)
            .sum();
        assert_eq!(total, 4794);
    }

    #[test]
    fn picks_per_domain() {
        for (name, rows) in table1_domains() {
            let picked: Option<usize> = rows.iter().map(|r| r.selected).sum();
            match name.as_str() {
                "Resource Allocation" => assert_eq!(picked, None),
                // as printed in the table
                "Minimal Diagnosis" => assert_eq!(picked, Some(19)),
                _ => assert_eq!(picked, Some(20), "{name}"),
            }
        }
    }

    #[test]
    fn synthetic_catalog_is_valid() {
        let c = table1_catalog();
        c.validate().unwrap();
        assert_eq!(c.domains.len(), 36);
        assert_eq!(c.instances.len(), 4794);
        assert_eq!(c.systems.len(), 14);
        assert_eq!(c.systems_in(Category::MP).len(), 2);
        let back = Catalog::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("Knight Tour with Holes"), "knight-tour-with-holes");
        assert_eq!(slug("Visit-all"), "visit-all");
    }
}
