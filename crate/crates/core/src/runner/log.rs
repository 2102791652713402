//! Append-only CSV results log. Every record is flushed and synced before
//! the next one is written; a torn last line left by a crash is ignored on
//! reading and cut off when the log is reopened for writing.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Read, Write};
use std::path::Path;

use super::{ClaimKind, RunError, RunRecord, RunStatus};

pub const LOG_HEADER: &str =
    "system,instance,status,wall_s,cpu_s,peak_mem_bytes,claim_kind,cost,witness_path";

fn complete_lines(text: &str) -> &str {
    match text.rfind('\n') {
        Some(k) => &text[..=k],
        None => "",
    }
}

fn io_error(path: &Path, e: io::Error) -> RunError {
    RunError::Io {
        path: path.display().to_string(),
        source: e,
    }
}

pub fn format_record(r: &RunRecord) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record([
        r.system.as_str(),
        r.instance.as_str(),
        r.status.as_str(),
        &format!("{:.3}", r.wall_s),
        &format!("{:.3}", r.cpu_s),
        &r.peak_mem_bytes.to_string(),
        r.claim.as_str(),
        &r.cost.map(|c| c.to_string()).unwrap_or_default(),
        r.witness_path.as_deref().unwrap_or(""),
    ])
    .expect("writing to memory");
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

/// Parses log text; a missing header is accepted only for empty input.
pub fn parse_log(text: &str) -> Result<Vec<RunRecord>, RunError> {
    let text = complete_lines(text);
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| RunError::Log {
        line: 1,
        message: e.to_string(),
    })?;
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if header.iter().collect::<Vec<_>>().join(",") != LOG_HEADER {
        return Err(RunError::Log {
            line: 1,
            message: format!("expected header `{LOG_HEADER}`"),
        });
    }
    let mut out = Vec::new();
    for (k, row) in reader.records().enumerate() {
        let line = k + 2;
        let bad = |message: String| RunError::Log { line, message };
        let row = row.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| row.get(i).unwrap_or("");
        let number = |i: usize| -> Result<f64, RunError> {
            field(i)
                .parse::<f64>()
                .map_err(|_| bad(format!("bad number `{}`", field(i))))
        };
        let status =
            RunStatus::parse(field(2)).ok_or_else(|| bad(format!("bad status `{}`", field(2))))?;
        let claim =
            ClaimKind::parse(field(6)).ok_or_else(|| bad(format!("bad claim `{}`", field(6))))?;
        let cost = match field(7) {
            "" => None,
            c => Some(
                c.parse::<i64>()
                    .map_err(|_| bad(format!("bad cost `{c}`")))?,
            ),
        };
        out.push(RunRecord {
            system: field(0).to_string(),
            instance: field(1).to_string(),
            status,
            wall_s: number(3)?,
            cpu_s: number(4)?,
            peak_mem_bytes: field(5)
                .parse()
                .map_err(|_| bad(format!("bad memory `{}`", field(5))))?,
            claim,
            cost,
            witness_path: Some(field(8)).filter(|p| !p.is_empty()).map(String::from),
            witness_ok: None,
            diagnostic: None,
        });
    }
    Ok(out)
}

/// Records in a log file; a missing file is an empty log.
pub fn read_log(path: impl AsRef<Path>) -> Result<Vec<RunRecord>, RunError> {
    let path = path.as_ref();
    match fs::read_to_string(path) {
        Ok(text) => parse_log(&text),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(io_error(path, e)),
    }
}

/// The single writer of a results log.
#[derive(Debug)]
pub struct LogWriter {
    file: File,
}

impl LogWriter {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, RunError> {
        let path = path.as_ref();
        let err = |e| io_error(path, e);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(err)?;
        }
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)
            .map_err(err)?;
        let mut text = String::new();
        file.read_to_string(&mut text).map_err(err)?;
        let keep = complete_lines(&text).len();
        if keep < text.len() {
            file.set_len(keep as u64).map_err(err)?;
        }
        if keep == 0 {
            writeln!(file, "{LOG_HEADER}").map_err(err)?;
            file.sync_data().map_err(err)?;
        }
        Ok(LogWriter { file })
    }

    pub fn append(&mut self, record: &RunRecord) -> io::Result<()> {
        self.file.write_all(format_record(record).as_bytes())?;
        self.file.sync_data()
    }
}
