//! Reference-runtime logs: CSV with header `instance_id,system,outcome,seconds`
//! where `outcome` is one of `solved`, `timeout1200`, `timeout2400`,
//! `memout` or `error`. `seconds` is required for `solved` only.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Catalog, CatalogError, RefOutcome};

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    instance_id: String,
    system: String,
    outcome: String,
    seconds: Option<f64>,
}

fn outcome(row: &Row) -> Result<RefOutcome, String> {
    Ok(match (row.outcome.as_str(), row.seconds) {
        ("solved", Some(s)) => RefOutcome::Solved(s),
        ("solved", None) => return Err("solved outcome without seconds".into()),
        ("timeout1200", _) => RefOutcome::Timeout(1200),
        ("timeout2400", _) => RefOutcome::Timeout(2400),
        ("memout", _) => RefOutcome::Memout,
        ("error", _) => RefOutcome::Error,
        (other, _) => return Err(format!("unknown outcome `{other}`")),
    })
}

/// Merges a reference-runtime log into the catalog; later rows for the same
/// (instance, system) pair win. Returns the number of rows read.
pub fn import_ref_runtimes(
    catalog: &mut Catalog,
    reader: impl Read,
) -> Result<usize, CatalogError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut count = 0;
    for (k, row) in rdr.deserialize::<Row>().enumerate() {
        let line = k + 2;
        let row = row.map_err(|e| CatalogError::Parse {
            line: e.position().map_or(line, |p| p.line() as usize),
            col: 1,
            message: e.to_string(),
        })?;
        let outcome = outcome(&row).map_err(|message| CatalogError::Parse {
            line,
            col: 1,
            message,
        })?;
        let inst = catalog
            .instance_mut(&row.instance_id)
            .ok_or_else(|| CatalogError::DanglingReference(row.instance_id.clone()))?;
        inst.ref_runtimes.insert(row.system, outcome);
        count += 1;
    }
    catalog.validate()?;
    Ok(count)
}

pub fn export_ref_runtimes(catalog: &Catalog, writer: impl Write) -> Result<(), CatalogError> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| CatalogError::Io(e.to_string());
    for inst in &catalog.instances {
        for (system, o) in &inst.ref_runtimes {
            let (outcome, seconds) = match *o {
                RefOutcome::Solved(s) => ("solved".to_string(), Some(s)),
                RefOutcome::Timeout(h) => (format!("timeout{h}"), None),
                RefOutcome::Memout => ("memout".to_string(), None),
                RefOutcome::Error => ("error".to_string(), None),
            };
            w.serialize(Row {
                instance_id: inst.id.clone(),
                system: system.clone(),
                outcome,
                seconds,
            })
            .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}
