use std::path::Path;

use loadbal_core::workload::{load_workload, WorkloadFile};
use loadbal_core::Error;
use serde_json::Value;

use crate::Failure;

pub fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn read_workload(path: &Path) -> Result<WorkloadFile, Failure> {
    Ok(load_workload(&read(path)?)?)
}

pub fn to_json<T: serde::Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("in-memory values serialise");
    out.push(b'\n');
    out
}

/// Part index per item from a JSON object with an `assignment` array, a bare
/// JSON array, or whitespace-separated integers (one per line, as in METIS
/// `.part` files).
pub fn read_assignment(path: &Path) -> Result<Vec<usize>, Failure> {
    let bytes = read(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| parse_error(path, "not UTF-8"))?;
    parse_assignment(text).map_err(|m| parse_error(path, &m))
}

fn parse_error(path: &Path, msg: &str) -> Failure {
    Failure::Core(Error::Parse(format!("{}: {msg}", path.display())))
}

fn parse_assignment(text: &str) -> Result<Vec<usize>, String> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let array = match &value {
            Value::Array(items) => items,
            Value::Object(map) => match map.get("assignment") {
                Some(Value::Array(items)) => items,
                _ => return Err("expected an \"assignment\" array".into()),
            },
            _ => unreachable!("checked by the leading character"),
        };
        array
            .iter()
            .enumerate()
            .map(|(i, v)| {
                v.as_u64()
                    .map(|p| p as usize)
                    .ok_or_else(|| format!("assignment[{i}] is not a non-negative integer"))
            })
            .collect()
    } else {
        text.split_whitespace()
            .enumerate()
            .map(|(i, tok)| {
                tok.parse::<usize>()
                    .map_err(|_| format!("entry {i} ({tok:?}) is not a non-negative integer"))
            })
            .collect()
    }
}

/// Accumulates comma-separated rows in memory.
pub struct Csv {
    writer: csv::Writer<Vec<u8>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut csv = Csv {
            writer: csv::Writer::from_writer(Vec::new()),
        };
        csv.row(header);
        csv
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer
            .write_record(fields)
            .expect("writing to memory cannot fail");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer
            .into_inner()
            .expect("writing to memory cannot fail")
    }
}
