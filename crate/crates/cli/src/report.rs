use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Tsv,
    Json,
}

/// A finished command: header fields, a row table, and a JSON body.
///
/// The TSV rendering is `# key<TAB>value` lines followed by the table; the
/// JSON rendering merges the header into the body object.
pub struct Report {
    pub passed: bool,
    header: Vec<(String, Value)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    body: Value,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            passed: true,
            header: vec![("command".into(), json!(command))],
            columns: Vec::new(),
            rows: Vec::new(),
            body: json!({}),
        }
    }

    pub fn field(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.header.push((key.to_string(), value.into()));
        self
    }

    pub fn columns(mut self, columns: &[&'static str]) -> Self {
        self.columns = columns.to_vec();
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn body(mut self, body: Value) -> Self {
        self.body = body;
        self
    }

    pub fn passed(mut self, passed: bool) -> Self {
        self.passed = passed;
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Tsv => {
                let mut out = String::new();
                for (k, v) in self.header.iter().chain([("passed".to_string(), json!(self.passed))].iter()) {
                    let text = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    out.push_str(&format!("# {k}\t{text}\n"));
                }
                if !self.columns.is_empty() {
                    out.push_str(&self.columns.join("\t"));
                    out.push('\n');
                    for r in &self.rows {
                        out.push_str(&r.join("\t"));
                        out.push('\n');
                    }
                }
                out
            }
            Format::Json => {
                let mut obj = match &self.body {
                    Value::Object(m) => m.clone(),
                    Value::Null => serde_json::Map::new(),
                    other => {
                        let mut m = serde_json::Map::new();
                        m.insert("result".into(), other.clone());
                        m
                    }
                };
                for (k, v) in &self.header {
                    obj.insert(k.clone(), v.clone());
                }
                obj.insert("passed".into(), json!(self.passed));
                let mut text = serde_json::to_string_pretty(&Value::Object(obj)).expect("report serialises");
                text.push('\n');
                text
            }
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> std::io::Result<()> {
        let text = self.render(format);
        match out {
            Some(path) => std::fs::write(path, text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_layout() {
        let mut r = Report::new("demo").field("q", 2).columns(&["a", "b"]);
        r.row(vec!["1".into(), "x".into()]);
        assert_eq!(r.render(Format::Tsv), "# command\tdemo\n# q\t2\n# passed\ttrue\na\tb\n1\tx\n");
    }

    #[test]
    fn json_merges_header() {
        let r = Report::new("demo").field("q", 3).body(json!({"n": 1})).passed(false);
        let v: Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(v, json!({"command": "demo", "q": 3, "n": 1, "passed": false}));
    }
}
