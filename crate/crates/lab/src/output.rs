//! CSV and JSON rendering. Numbers use the shortest decimal form that
//! round-trips to the same `f64`; lines end in `\n`.

use std::path::{Path, PathBuf};

use crate::LabError;

/// Shortest round-trip decimal form of `v`.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

/// A header plus rows of preformatted fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// Rendered files of one experiment run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifacts {
    pub csv: Vec<u8>,
    /// Order study only: `{scheme: slope}`.
    pub summary: Option<Vec<u8>>,
}

/// Path of the JSON summary written next to `out`.
pub fn summary_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".summary.json");
    PathBuf::from(s)
}

pub fn write_artifacts(out: &Path, artifacts: &Artifacts) -> Result<(), LabError> {
    write_file(out, &artifacts.csv)?;
    if let Some(summary) = &artifacts.summary {
        write_file(&summary_path(out), summary)?;
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), LabError> {
    std::fs::write(path, bytes).map_err(|source| LabError::Output { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_round_trip() {
        for v in [0.1, 1e-13, 1.0, std::f64::consts::TAU, -2.5e300, 1.9999999999] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(1e-13), "1e-13");
    }

    #[test]
    fn csv_dialect() {
        let mut t = Table::new(vec!["a", "b"]);
        t.rows.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(String::from_utf8(t.to_csv()).unwrap(), "a,b\n1,\"x,y\"\n");
        assert_eq!(Table::new(vec!["h"]).to_csv(), b"h\n");
    }

    #[test]
    fn summary_sits_next_to_output() {
        assert_eq!(summary_path(Path::new("out/order.csv")), PathBuf::from("out/order.csv.summary.json"));
    }
}
