//! Tabular experiment reports with a deterministic CSV encoding.

use std::io::{self, Write};

/// Per-`n` table for one experiment suite.
///
/// The CSV has a single header line (`n` followed by [`columns`]) and one
/// line per row. Floats are written with 17 significant digits; missing
/// values (`NaN`) become empty cells.
///
/// [`columns`]: ExperimentReport::columns
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub suite: String,
    pub generator: String,
    pub function: String,
    pub tolerance: f64,
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub n: usize,
    pub values: Vec<f64>,
}

impl ExperimentReport {
    pub fn new(
        suite: impl Into<String>,
        generator: impl Into<String>,
        function: impl Into<String>,
        tolerance: f64,
        columns: &[&str],
    ) -> Self {
        Self {
            suite: suite.into(),
            generator: generator.into(),
            function: function.into(),
            tolerance,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Append a row; panics if `values` does not match the column count or
    /// `n` does not increase.
    pub fn push(&mut self, n: usize, values: Vec<f64>) {
        assert_eq!(values.len(), self.columns.len(), "row width mismatch");
        if let Some(last) = self.rows.last() {
            assert!(n > last.n, "rows must be ordered by increasing n");
        }
        self.rows.push(ReportRow { n, values });
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[idx]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["n".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut record = vec![row.n.to_string()];
            record.extend(row.values.iter().map(|&v| format_float(v)));
            w.write_record(&record)?;
        }
        w.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

/// 17 significant digits in scientific notation; `NaN` → empty.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.16e}")
    }
}
