//! Graph files: `{"vertices": [...], "edges": [{"id", "src", "dst", "label"?}]}`.

use std::collections::BTreeMap;
use std::fs;

use clap::ValueEnum;
use groupoid_lab::{DirectedGraph, LabeledGraph, LabelingMode, ShadowedGraph};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub id: String,
    pub src: String,
    pub dst: String,
    #[serde(default)]
    pub label: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LabelingChoice {
    /// Explicit labels if every edge has one, per-vertex if none has.
    Auto,
    PerVertex,
    Multiedge,
    Explicit,
}

pub fn parse_graph_str(text: &str, path: &str) -> Result<GraphFile, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Parse {
        path: path.to_string(),
        at: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}

pub fn read_graph_file(path: &str) -> Result<GraphFile, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_string(), source })?;
    parse_graph_str(&text, path)
}

/// Validates the graph and applies the labeling.
pub fn build(file: GraphFile, choice: LabelingChoice) -> Result<LabeledGraph, CliError> {
    let labels: BTreeMap<String, i64> = file.edges.iter().filter_map(|e| e.label.map(|l| (e.id.clone(), l))).collect();
    let edges = file.edges.into_iter().map(|e| (e.id, e.src, e.dst));
    let dg = DirectedGraph::new(file.vertices, edges);
    let report = dg.validate();
    if !report.is_valid() {
        return Err(CliError::Invalid(format!("invalid graph: {report}")));
    }
    let total = dg.edges().len();
    let g = ShadowedGraph::new(dg)?;
    let explicit = |labels| LabelingMode::Explicit { labels, require_per_vertex: false };
    let mode = match choice {
        LabelingChoice::PerVertex => LabelingMode::PerVertex,
        LabelingChoice::Multiedge => LabelingMode::MultiedgeIndex,
        LabelingChoice::Explicit => explicit(labels),
        LabelingChoice::Auto if labels.is_empty() => LabelingMode::PerVertex,
        LabelingChoice::Auto if labels.len() == total => explicit(labels),
        LabelingChoice::Auto => {
            return Err(CliError::Invalid(format!(
                "{} of {total} edges carry a label; label every edge or none, or pick --labeling",
                labels.len()
            )))
        }
    };
    Ok(LabeledGraph::new(g, mode)?)
}

pub fn load(path: &str, choice: LabelingChoice) -> Result<LabeledGraph, CliError> {
    build(read_graph_file(path)?, choice)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LABELED: &str = r#"{"vertices":["a","b"],"edges":[
        {"id":"x","src":"a","dst":"b","label":2},{"id":"y","src":"a","dst":"b","label":1}]}"#;
    const BARE: &str =
        r#"{"vertices":["a","b"],"edges":[{"id":"x","src":"a","dst":"b"},{"id":"y","src":"a","dst":"b"}]}"#;

    #[test]
    fn auto_picks_explicit_or_per_vertex() {
        let lg = build(parse_graph_str(LABELED, "t").unwrap(), LabelingChoice::Auto).unwrap();
        assert_eq!(lg.mode_name(), "explicit");
        let x = lg.graph().edge("x").unwrap();
        assert_eq!(lg.label(groupoid_lab::SignedEdge::forward(x)).0, 2);
        let lg = build(parse_graph_str(BARE, "t").unwrap(), LabelingChoice::Auto).unwrap();
        assert_eq!(lg.mode_name(), "per-vertex");
    }

    #[test]
    fn explicit_needs_every_label() {
        assert!(build(parse_graph_str(BARE, "t").unwrap(), LabelingChoice::Explicit).is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"vertices":["a"],"edges":[{"id":"x","src":"a","dst":"a","weight":3}]}"#;
        match parse_graph_str(text, "t") {
            Err(CliError::Parse { at, .. }) => assert_eq!(at, "edges[0].weight"),
            other => panic!("{other:?}"),
        }
    }
}
