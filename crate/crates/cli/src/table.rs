//! Long-format result tables and their CSV and JSON encodings.
//!
//! Values and standard errors are written with 15 significant digits. Any
//! such decimal survives a trip through `f64` unchanged, so parsing an
//! emitted table and emitting it again reproduces the same bytes.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::{CliError, Result};

pub const HEADER: [&str; 6] = ["W", "t", "observable", "value", "std_error", "N"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    #[serde(rename = "W")]
    pub disorder: f64,
    pub t: usize,
    pub observable: String,
    pub value: f64,
    pub std_error: Option<f64>,
    #[serde(rename = "N")]
    pub realizations: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ResultTable {
    pub rows: Vec<Row>,
}

/// Rounds to the nearest 15-significant-digit decimal.
pub fn round_sig15(v: f64) -> f64 {
    format_sig15(v).parse().expect("formatted float parses")
}

pub fn format_sig15(v: f64) -> String {
    format!("{v:.14e}")
}

impl ResultTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows whose observable matches `name` exactly, in table order.
    pub fn series<'a>(
        &'a self,
        disorder: f64,
        name: &'a str,
    ) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows
            .iter()
            .filter(move |r| r.disorder == disorder && r.observable == name)
    }

    pub fn get(&self, disorder: f64, t: usize, name: &str) -> Option<&Row> {
        self.rows
            .iter()
            .find(|r| r.disorder == disorder && r.t == t && r.observable == name)
    }

    pub fn check_finite(&self) -> Result<()> {
        for r in &self.rows {
            if !r.value.is_finite() || r.std_error.is_some_and(|e| !e.is_finite()) {
                return Err(CliError::NonFinite {
                    disorder: r.disorder,
                    time: r.t,
                    observable: r.observable.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.disorder.to_string(),
                r.t.to_string(),
                r.observable.clone(),
                format_sig15(r.value),
                r.std_error.map(format_sig15).unwrap_or_default(),
                r.realizations.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    pub fn read_csv<R: Read>(input: R) -> std::result::Result<Self, String> {
        let mut rdr = csv::Reader::from_reader(input);
        let header = rdr.headers().map_err(|e| e.to_string())?;
        if header.iter().ne(HEADER) {
            return Err(format!(
                "unexpected header {:?}",
                header.iter().collect::<Vec<_>>()
            ));
        }
        let mut rows = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| e.to_string())?;
            let at =
                |what: &str, e: &dyn std::fmt::Display| format!("row {}: {what}: {e}", line + 1);
            let float = |s: &str, what: &str| s.parse::<f64>().map_err(|e| at(what, &e));
            let int = |s: &str, what: &str| s.parse::<usize>().map_err(|e| at(what, &e));
            rows.push(Row {
                disorder: float(&rec[0], "W")?,
                t: int(&rec[1], "t")?,
                observable: rec[2].to_string(),
                value: float(&rec[3], "value")?,
                std_error: match &rec[4] {
                    "" => None,
                    s => Some(float(s, "std_error")?),
                },
                realizations: int(&rec[5], "N")?,
            });
        }
        Ok(ResultTable { rows })
    }

    /// JSON array of row objects with the same keys and precision as the CSV.
    pub fn to_json_string(&self) -> String {
        let rounded = ResultTable {
            rows: self
                .rows
                .iter()
                .map(|r| Row {
                    value: round_sig15(r.value),
                    std_error: r.std_error.map(round_sig15),
                    ..r.clone()
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&rounded).expect("rows serialize");
        s.push('\n');
        s
    }

    pub fn from_json_str(text: &str) -> std::result::Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv_string(),
            Format::Json => self.to_json_string(),
        }
    }

    /// Writes the table to `path`, or to standard output when `path` is
    /// `None`.
    pub fn emit(&self, format: Format, path: Option<&Path>) -> Result<()> {
        self.check_finite()?;
        let text = self.render(format);
        match path {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
            None => std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io("<stdout>", e)),
        }
    }

    pub fn load(path: &Path, format: Format) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let parsed = match format {
            Format::Csv => Self::read_csv(text.as_bytes()),
            Format::Json => Self::from_json_str(&text),
        };
        parsed.map_err(|message| CliError::Format {
            path: path.to_path_buf(),
            message,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(value: f64, std_error: Option<f64>) -> Row {
        Row {
            disorder: 0.2,
            t: 40,
            observable: "occupation[-3]".into(),
            value,
            std_error,
            realizations: 1000,
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(
            ResultTable::new().to_csv_string(),
            "W,t,observable,value,std_error,N\n"
        );
        assert_eq!(
            ResultTable::read_csv("W,t,observable,value,std_error,N\n".as_bytes()).unwrap(),
            ResultTable::new()
        );
    }

    #[test]
    fn single_row_round_trips() {
        let t = ResultTable {
            rows: vec![row(0.25, Some(1.5e-3))],
        };
        let csv = t.to_csv_string();
        assert_eq!(
            csv,
            "W,t,observable,value,std_error,N\n0.2,40,occupation[-3],2.50000000000000e-1,1.50000000000000e-3,1000\n"
        );
        assert_eq!(ResultTable::read_csv(csv.as_bytes()).unwrap(), t);
        assert_eq!(ResultTable::from_json_str(&t.to_json_string()).unwrap(), t);
    }

    #[test]
    fn emitted_text_is_a_fixed_point() {
        let t = ResultTable {
            rows: vec![
                row(0.1 + 0.2, None),
                row(std::f64::consts::PI * 1e-7, Some(2.0 / 3.0)),
            ],
        };
        let once = t.to_csv_string();
        let again = ResultTable::read_csv(once.as_bytes()).unwrap();
        assert_eq!(again.to_csv_string(), once);
        assert_eq!(again.rows[0].value, round_sig15(0.1 + 0.2));
        let json = t.to_json_string();
        assert_eq!(ResultTable::from_json_str(&json).unwrap(), again);
    }

    #[test]
    fn missing_error_is_null_in_json() {
        let t = ResultTable {
            rows: vec![row(1.0, None)],
        };
        assert!(t.to_json_string().contains("\"std_error\": null"));
        assert!(t.to_csv_string().ends_with(",1.00000000000000e0,,1000\n"));
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let t = ResultTable {
            rows: vec![row(f64::NAN, None)],
        };
        assert!(matches!(t.check_finite(), Err(CliError::NonFinite { .. })));
    }

    #[test]
    fn bad_header_is_an_error() {
        assert!(ResultTable::read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
