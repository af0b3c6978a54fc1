use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{Map, Value};

use crate::CliResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Tabular result with a metadata header. CSV carries only the columns;
/// JSON carries `{"metadata": {...}, "rows": [{column: value}]}`.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub metadata: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            metadata: Map::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.columns.join(",");
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(csv_cell).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> = self.columns.iter().cloned().zip(r.iter().cloned()).collect();
                        Value::Object(obj)
                    })
                    .collect();
                let mut top = Map::new();
                top.insert("metadata".into(), Value::Object(self.metadata.clone()));
                top.insert("rows".into(), Value::Array(rows));
                let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("json values serialise");
                s.push('\n');
                s
            }
        }
    }

    /// Writes to `out`, or stdout when absent.
    pub fn emit(&self, format: Format, out: Option<&Path>) -> CliResult<()> {
        let text = self.render(format);
        match out {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn csv_cell(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(&["n", "a_n", "certified"]);
        t.meta("symbol", "scale:0.5").meta("n", 2);
        t.push(vec![json!(1), json!("1.0"), json!("certified")]);
        t.push(vec![json!(2), json!("0.5"), json!("heuristic")]);
        assert_eq!(t.render(Format::Csv), "n,a_n,certified\n1,1.0,certified\n2,0.5,heuristic\n");
        let v: Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(v["metadata"]["symbol"], "scale:0.5");
        assert_eq!(v["rows"][1]["a_n"], "0.5");
        let keys: Vec<&String> = v["rows"][0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["n", "a_n", "certified"]);
    }

    #[test]
    fn csv_quotes_embedded_commas() {
        let mut t = Table::new(&["x"]);
        t.push(vec![json!("a,b")]);
        assert_eq!(t.render(Format::Csv), "x\n\"a,b\"\n");
    }
}
