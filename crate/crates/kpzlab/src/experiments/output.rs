use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::Kind;
use crate::{Error, Result};

/// Provenance written at the top of every result file. It holds no timestamps or thread
/// counts, so reruns of one spec give identical bytes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub kind: Kind,
    pub spec_sha256: String,
    pub master_seed: u64,
    pub replicas: usize,
    pub version: String,
}

impl Meta {
    fn header_lines(&self) -> Vec<String> {
        vec![
            format!("# kind: {}", self.kind),
            format!("# spec_sha256: {}", self.spec_sha256),
            format!("# master_seed: {}", self.master_seed),
            format!("# replicas: {}", self.replicas),
            format!("# kpzlab: {}", self.version),
        ]
    }
}

/// A CSV table: named columns and rows of preformatted cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_columns(name: &str, columns: Vec<String>) -> Self {
        Table { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Formats cells with `Display`, which gives the shortest round-trip form for floats.
#[macro_export]
#[doc(hidden)]
macro_rules! cells {
    ($($x:expr),* $(,)?) => { vec![$(format!("{}", $x)),*] };
}

/// Result of one experiment kind: a JSON report plus optional CSV tables.
pub trait Outcome: Serialize {
    fn tables(&self) -> Vec<Table> {
        Vec::new()
    }

    /// Extra binary files as (file name, bytes).
    fn blobs(&self) -> Vec<(String, Vec<u8>)> {
        Vec::new()
    }
}

#[derive(Serialize, Deserialize)]
struct Document<T> {
    meta: Meta,
    result: T,
}

pub(crate) fn write_outcome<O: Outcome>(dir: &Path, meta: &Meta, outcome: &O) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let json_path = dir.join(format!("{}.json", meta.kind));
    let mut text = serde_json::to_string_pretty(&Document { meta: meta.clone(), result: outcome })?;
    text.push('\n');
    fs::write(&json_path, text)?;
    files.push(json_path);
    for table in outcome.tables() {
        let path = dir.join(format!("{}_{}.csv", meta.kind, table.name));
        let mut buf = Vec::new();
        for line in meta.header_lines() {
            writeln!(buf, "{line}")?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&table.columns).map_err(csv_err)?;
            for row in &table.rows {
                w.write_record(row).map_err(csv_err)?;
            }
            w.flush()?;
        }
        fs::write(&path, buf)?;
        files.push(path);
    }
    for (name, bytes) in outcome.blobs() {
        let path = dir.join(name);
        fs::write(&path, bytes)?;
        files.push(path);
    }
    Ok(files)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Reads a JSON result file back into its metadata and typed result.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<(Meta, T)> {
    let doc: Document<T> = serde_json::from_str(&fs::read_to_string(path)?)?;
    Ok((doc.meta, doc.result))
}

/// Reads a result CSV, returning the '#' header lines, the column names and the rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<String>, Vec<Vec<String>>)> {
    let mut reader = BufReader::new(fs::File::open(path)?);
    let mut header = Vec::new();
    let mut rest = String::new();
    let mut line = String::new();
    while reader.read_line(&mut line)? > 0 {
        if line.starts_with('#') && rest.is_empty() {
            header.push(line.trim_end().to_string());
        } else {
            rest.push_str(&line);
        }
        line.clear();
    }
    let mut r = csv::Reader::from_reader(rest.as_bytes());
    let columns = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()).map_err(csv_err))
        .collect::<Result<_>>()?;
    Ok((header, columns, rows))
}
