//! Tab-separated key/value records shared by the model files.

use std::io::BufRead;
use std::str::FromStr;

use crate::corpus::CaseMarker;
use crate::error::{Error, Result};

pub(crate) struct Record {
    pub line: usize,
    pub fields: Vec<String>,
}

pub(crate) fn records<R: BufRead>(reader: R) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(Record {
            line: i + 1,
            fields: line.split('\t').map(str::to_string).collect(),
        });
    }
    Ok(out)
}

pub(crate) fn number<T: FromStr>(line: usize, s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| Error::Format {
        line,
        message: format!("bad number '{s}': {e}"),
    })
}

pub(crate) fn case(line: usize, s: &str) -> Result<CaseMarker> {
    s.parse().map_err(|e: crate::corpus::UnknownCase| Error::Format {
        line,
        message: e.to_string(),
    })
}

pub(crate) fn unexpected(line: usize) -> Error {
    Error::Format {
        line,
        message: "unexpected record".into(),
    }
}
