//! CSV result tables with a commented metadata header. Floats are written
//! in shortest round-trip form so parse(emit(t)) == t exactly.

use crate::{Error, Result};
use std::io::Write;

#[derive(Clone, Debug, Default)]
pub struct ResultTable {
    /// Ordered metadata, emitted as `# key = value` lines.
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Per-row failure flags; failed rows may carry NaN values.
    pub failed: Vec<bool>,
}

impl PartialEq for ResultTable {
    fn eq(&self, other: &Self) -> bool {
        self.metadata == other.metadata
            && self.columns == other.columns
            && self.failed == other.failed
            && self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
            })
    }
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        ResultTable {
            metadata: Vec::new(),
            columns,
            rows: Vec::new(),
            failed: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "column count mismatch");
        self.rows.push(row);
        self.failed.push(false);
    }

    pub fn push_failed_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "column count mismatch");
        self.rows.push(row);
        self.failed.push(true);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push_str(",row_failed\n");
        for (row, failed) in self.rows.iter().zip(&self.failed) {
            let vals: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&vals.join(","));
            out.push_str(if *failed { ",1\n" } else { ",0\n" });
        }
        out
    }

    pub fn write_to(&self, path: &std::path::Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.emit().as_bytes())?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut metadata = Vec::new();
        let mut lines = text.lines().peekable();
        while let Some(line) = lines.peek() {
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                let (k, v) = rest
                    .split_once(" = ")
                    .ok_or_else(|| Error::TableParse(format!("bad metadata line: {line}")))?;
                metadata.push((k.to_string(), v.to_string()));
                lines.next();
            } else {
                break;
            }
        }
        let header = lines
            .next()
            .ok_or_else(|| Error::TableParse("missing header".into()))?;
        let mut columns: Vec<String> = header.split(',').map(|s| s.to_string()).collect();
        if columns.last().map(String::as_str) != Some("row_failed") {
            return Err(Error::TableParse("missing row_failed column".into()));
        }
        columns.pop();
        let mut rows = Vec::new();
        let mut failed = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != columns.len() + 1 {
                return Err(Error::TableParse(format!(
                    "row with {} fields, expected {}",
                    fields.len(),
                    columns.len() + 1
                )));
            }
            let mut row = Vec::with_capacity(columns.len());
            for f in &fields[..columns.len()] {
                row.push(
                    f.parse::<f64>()
                        .map_err(|e| Error::TableParse(format!("bad number '{f}': {e}")))?,
                );
            }
            failed.push(match fields[columns.len()] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::TableParse(format!("bad failed flag '{other}'")));
                }
            });
            rows.push(row);
        }
        Ok(ResultTable {
            metadata,
            columns,
            rows,
            failed,
        })
    }
}
