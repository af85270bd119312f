use std::collections::BTreeMap;
use std::fmt::Write;

use groupoid_lab::{DiagonalElement, LabeledGraph, ShadowedGraph};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

/// Output of one subcommand. Serialized as JSON with `--json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub result: Value,
    pub diagnostics: Vec<String>,
    pub truncated: bool,
    /// Human-readable rendering.
    #[serde(skip)]
    pub text: String,
    /// `(vertex, coefficient)` rows for CSV output.
    #[serde(skip)]
    pub rows: Option<Vec<(String, String)>>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs: Map::new(),
            result: Value::Null,
            diagnostics: Vec::new(),
            truncated: false,
            text: String::new(),
            rows: None,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.inputs.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
        self
    }

    pub fn graph_inputs(&mut self, path: &str, lg: &LabeledGraph) -> &mut Self {
        let g = lg.graph();
        self.input("graph", path)
            .input("vertices", g.num_vertices())
            .input("edges", g.num_edges())
            .input("max_label", lg.max_label())
            .input("labeling", lg.mode_name())
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.diagnostics.push(s.into());
    }

    /// Sets a diagonal element as the result, with table and CSV renderings.
    pub fn diagonal(&mut self, d: &DiagonalElement, g: &ShadowedGraph) {
        let rows = diagonal_rows(d, g);
        self.result = diagonal_json(d, g);
        self.text = table(&rows);
        self.rows = Some(rows);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Option<String> {
        let rows = self.rows.as_ref()?;
        let mut s = String::from("vertex,coefficient\n");
        for (v, c) in rows {
            let _ = writeln!(s, "{v},{c}");
        }
        Some(s)
    }

    pub fn to_text(&self) -> String {
        let mut s = self.text.clone();
        if !s.is_empty() && !s.ends_with('\n') {
            s.push('\n');
        }
        if self.truncated {
            s.push_str("truncated: budget exhausted, result incomplete\n");
        }
        for d in &self.diagnostics {
            let _ = writeln!(s, "note: {d}");
        }
        s
    }
}

pub fn diagonal_rows(d: &DiagonalElement, g: &ShadowedGraph) -> Vec<(String, String)> {
    d.render(g).into_iter().map(|(v, c)| (v, c.to_string())).collect()
}

/// `{vertex: "coefficient"}` over every vertex; coefficients are strings so
/// big integers survive any JSON reader.
pub fn diagonal_json(d: &DiagonalElement, g: &ShadowedGraph) -> Value {
    let m: BTreeMap<String, String> = diagonal_rows(d, g).into_iter().collect();
    json!(m)
}

/// Compact `{v1: 3, v2: 2}` form for notes.
pub fn diagonal_inline(d: &DiagonalElement, g: &ShadowedGraph) -> String {
    let parts: Vec<String> = diagonal_rows(d, g).into_iter().map(|(v, c)| format!("{v}: {c}")).collect();
    format!("{{{}}}", parts.join(", "))
}

pub fn table(rows: &[(String, String)]) -> String {
    let w = rows.iter().map(|(v, _)| v.chars().count()).max().unwrap_or(0).max("vertex".len());
    let mut s = format!("{:<w$}  coefficient\n", "vertex");
    for (v, c) in rows {
        let _ = writeln!(s, "{v:<w$}  {c}");
    }
    s
}
