//! CSV tables with `# key,value` header lines.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use trendlab::{Error, Result};

/// Shortest round-trip formatting, so reruns are byte-identical.
pub fn num(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            ..Table::default()
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        let value = value.to_string().replace([',', '\n'], ";");
        self.header.push((key.into(), value));
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        trendlab::ingest::write_file(path, |f| {
            let mut w = BufWriter::new(f);
            for (k, v) in &self.header {
                writeln!(w, "# {k},{v}")?;
            }
            writeln!(w, "{}", self.columns.join(","))?;
            for r in &self.rows {
                writeln!(w, "{}", r.join(","))?;
            }
            w.flush()
        })
    }
}

/// The `# key,value` lines at the top of a table file.
pub fn read_header(path: &Path) -> Result<BTreeMap<String, String>> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut out = BTreeMap::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let Some(rest) = line.strip_prefix("# ") else { break };
        if let Some((k, v)) = rest.split_once(',') {
            out.insert(k.to_string(), v.to_string());
        }
    }
    Ok(out)
}
