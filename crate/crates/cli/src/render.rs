//! A command's result as one table plus a JSON value, and its three renderings.

use std::fmt::Write as _;

use lattice_area::{Error, Result};

use crate::args::Format;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub json: serde_json::Value,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Report { columns: columns.iter().map(|c| c.to_string()).collect(), ..Report::default() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Key/value report whose JSON form is the same object.
    pub fn key_values(pairs: Vec<(String, String)>, json: serde_json::Value) -> Self {
        let mut r = Report::new(&["key", "value"]);
        r.rows = pairs.into_iter().map(|(k, v)| vec![k, v]).collect();
        r.json = json;
        r
    }

    /// Table read back from CSV produced by the library's own writers.
    pub fn from_csv(bytes: &[u8], json: serde_json::Value) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
        let io = |e: csv::Error| Error::InternalInconsistency(format!("csv: {e}"));
        let columns = rdr.headers().map_err(io)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            rows.push(rec.map_err(io)?.iter().map(str::to_string).collect());
        }
        Ok(Report { columns, rows, json })
    }

    /// JSON rows keyed by column name, used when no richer structure exists.
    pub fn rows_as_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let obj = self.columns.iter().cloned().zip(r.iter().map(|v| serde_json::Value::String(v.clone())));
                    serde_json::Value::Object(obj.collect())
                })
                .collect(),
        )
    }
}

/// Renders the report, prefixed by the resolved configuration.
pub fn render(report: &Report, header: &[(String, String)], format: Format) -> String {
    match format {
        Format::Json => {
            let config: serde_json::Map<String, serde_json::Value> =
                header.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect();
            let json = if report.json.is_null() { report.rows_as_json() } else { report.json.clone() };
            let doc = serde_json::json!({ "config": config, "result": json });
            serde_json::to_string_pretty(&doc).unwrap() + "\n"
        }
        Format::Csv => {
            let mut out = comment_header(header);
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(&report.columns).unwrap();
            for r in &report.rows {
                wtr.write_record(r).unwrap();
            }
            out.push_str(&String::from_utf8(wtr.into_inner().unwrap()).unwrap());
            out
        }
        Format::Table => {
            let mut out = comment_header(header);
            let mut width: Vec<usize> = report.columns.iter().map(|c| c.chars().count()).collect();
            for r in &report.rows {
                for (w, v) in width.iter_mut().zip(r) {
                    *w = (*w).max(v.chars().count());
                }
            }
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
                padded.join("  ").trim_end().to_string() + "\n"
            };
            out.push_str(&line(&report.columns));
            let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
            out.push_str(&line(&rule));
            for r in &report.rows {
                out.push_str(&line(r));
            }
            out
        }
    }
}

fn comment_header(header: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in header {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renderings() {
        let mut r = Report::new(&["a", "bb"]);
        r.push(vec!["1".into(), "x,y".into()]);
        let header = vec![("command".to_string(), "test".to_string())];
        assert_eq!(render(&r, &header, Format::Csv), "# command = test\na,bb\n1,\"x,y\"\n");
        assert_eq!(render(&r, &header, Format::Table), "# command = test\na  bb\n-  ---\n1  x,y\n");
        let v: serde_json::Value = serde_json::from_str(&render(&r, &header, Format::Json)).unwrap();
        assert_eq!(v["result"][0]["bb"], "x,y");
        assert_eq!(v["config"]["command"], "test");
    }
}
