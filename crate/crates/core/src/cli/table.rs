//! In-memory result tables and their CSV form.

use std::fmt::Write as _;

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn fmt_opt_usize(x: Option<usize>) -> String {
    x.map(|n| n.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File name, e.g. `summary.csv`.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "{}", self.name);
        debug_assert!(row.iter().all(|c| !c.contains([',', '\n'])));
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// CSV text preceded by `#` provenance lines.
    pub fn to_csv(&self, provenance: &[String]) -> String {
        let mut s = String::new();
        for p in provenance {
            let _ = writeln!(s, "# {p}");
        }
        let _ = writeln!(s, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }

    /// Parses text written by [`Table::to_csv`]; `#` lines are skipped.
    pub fn from_csv(name: &str, text: &str) -> Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| format!("{name}: missing header"))?
            .split(',')
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row: Vec<String> = line.split(',').map(str::to_string).collect();
            if row.len() != header.len() {
                return Err(format!(
                    "{name}: data row {} has {} fields, expected {}",
                    i + 1,
                    row.len(),
                    header.len()
                ));
            }
            rows.push(row);
        }
        Ok(Self {
            name: name.to_string(),
            header,
            rows,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "header": self.header, "rows": self.rows })
    }
}

/// Provenance lines shared by every output file.
pub fn provenance(echo: &[String]) -> Vec<String> {
    let mut p = vec![
        format!("rqnn {}", crate::VERSION),
        format!("schema {SCHEMA_VERSION}"),
    ];
    p.extend(echo.iter().map(|e| format!("config {e}")));
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 12345.678901234567, f64::MAX] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_round_trip() {
        let mut t = Table::new("t.csv", &["a", "b"]);
        t.push(vec!["1".into(), String::new()]);
        let text = t.to_csv(&["x".into()]);
        assert_eq!(text, "# x\na,b\n1,\n");
        assert_eq!(Table::from_csv("t.csv", &text).unwrap(), t);
        assert!(Table::from_csv("t.csv", "a,b\n1\n").is_err());
    }
}
