//! Reports: a title, key/value fields and tables, rendered as aligned text
//! or as a JSON tree with the same shape.

use serde_json::{json, Map, Value};

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub title: String,
    pub fields: Vec<(String, Value)>,
    pub tables: Vec<Table>,
    pub ok: bool,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), ok: true, ..Default::default() }
    }

    pub fn field(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.push((key.into(), value.into()));
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn to_json(&self) -> Value {
        let mut fields = Map::new();
        for (k, v) in &self.fields {
            fields.insert(k.clone(), v.clone());
        }
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|t| {
                let rows: Vec<Value> = t
                    .rows
                    .iter()
                    .map(|r| Value::Object(t.header.iter().cloned().zip(r.iter().map(|c| json!(c))).collect()))
                    .collect();
                json!({ "name": t.name, "columns": t.header, "rows": rows })
            })
            .collect();
        json!({ "report": self.title, "ok": self.ok, "fields": fields, "tables": tables })
    }

    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.title);
        let width = self.fields.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        for (k, v) in &self.fields {
            let text = match v {
                Value::String(s) => s.clone(),
                Value::Bool(b) => if *b { "yes" } else { "no" }.to_string(),
                other => other.to_string(),
            };
            out.push_str(&format!("  {k:<width$}  {text}\n"));
        }
        for t in &self.tables {
            out.push('\n');
            out.push_str(&render_table(t));
        }
        out
    }
}

fn render_table(t: &Table) -> String {
    let mut widths: Vec<usize> = t.header.iter().map(|h| h.chars().count()).collect();
    for r in &t.rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        format!("  {}\n", parts.join("  ").trim_end())
    };
    let mut out = format!("{}\n", t.name);
    out.push_str(&line(&t.header));
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&format!("  {}\n", rule.join("  ")));
    if t.rows.is_empty() {
        out.push_str("  (none)\n");
    }
    for r in &t.rows {
        out.push_str(&line(r));
    }
    out
}
