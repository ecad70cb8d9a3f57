//! JSON file formats. Every document is parsed in two stages (syntax, then
//! schema) so diagnostics can point at a byte offset or at a key path.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::chart::{validate_chart, Chart, ChartDesc, ChartError};
use crate::compat::Bundle;
use crate::linalg::Q;
use crate::polyhedron::{Flow, Presentation};
use crate::trails::Trail;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("syntax error at byte {offset} (line {line}, column {column}): {message}")]
    Syntax { offset: usize, line: usize, column: usize, message: String },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Chart(#[from] ChartError),
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn syntax(text: &str, bytes: &[u8]) -> Result<Value, IoError> {
    serde_json::from_slice(bytes).map_err(|e| IoError::Syntax {
        offset: byte_offset(text, e.line(), e.column()),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Deserializes a document into `T`, reporting syntax errors by offset and
/// shape errors by the key path of the offending value.
pub fn parse_json<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, IoError> {
    let text = String::from_utf8_lossy(bytes);
    let value = syntax(&text, bytes)?;
    let mut track = serde_path_to_error::Track::new();
    let tracked = serde_path_to_error::Deserializer::new(&value, &mut track);
    T::deserialize(tracked).map_err(|e| IoError::Schema { path: track.path().to_string(), message: e.to_string() })
}

pub fn parse_chart(bytes: &[u8]) -> Result<Chart, IoError> {
    let desc: ChartDesc = parse_json(bytes)?;
    let edges: std::collections::BTreeSet<&str> = desc.edges.iter().map(|e| e.id.as_str()).collect();
    for (v, lists) in &desc.classes {
        for (c, list) in lists.iter().enumerate() {
            for (k, (e, _)) in list.iter().enumerate() {
                if !edges.contains(e.as_str()) {
                    return Err(IoError::Schema {
                        path: format!("classes.{v}[{c}][{k}]"),
                        message: format!("unknown edge `{e}`"),
                    });
                }
            }
        }
    }
    Ok(validate_chart(&desc)?)
}

pub fn read_chart(path: &std::path::Path) -> Result<Chart, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_chart(&bytes).map_err(|e| format!("{}: {e}", path.display()))
}

/// Canonical serialization: ids sorted, two-space indentation, trailing newline.
pub fn chart_to_json(chart: &Chart) -> String {
    to_pretty(&chart.to_desc())
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn q_string(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: num_bigint::BigInt = d.trim().parse().ok()?;
            if d == num_bigint::BigInt::from(0) {
                return None;
            }
            Some(Q::new(n.trim().parse().ok()?, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

/// Parses `e=1,f=2/3`; unlisted edges are zero.
pub fn parse_flow(chart: &Chart, spec: &str) -> Result<Flow, IoError> {
    let mut x = vec![Q::from_integer(0.into()); chart.num_edges()];
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = |m: &str| IoError::Schema { path: item.to_string(), message: m.to_string() };
        let (id, val) = item.split_once('=').or_else(|| item.split_once(':')).ok_or_else(|| bad("expected edge=value"))?;
        let e = chart.edge_index(id.trim()).ok_or_else(|| bad("unknown edge"))?;
        x[e] = parse_q(val).ok_or_else(|| bad("not a rational number"))?;
    }
    Ok(Flow(x))
}

pub fn flow_json(chart: &Chart, x: &[Q]) -> Value {
    let m: BTreeMap<&str, String> = chart.edge_ids().iter().map(String::as_str).zip(x.iter().map(q_string)).collect();
    json!(m)
}

pub fn indicator_json(chart: &Chart, ind: &[i64]) -> Value {
    let m: BTreeMap<&str, i64> = chart.edge_ids().iter().map(String::as_str).zip(ind.iter().copied()).collect();
    json!(m)
}

pub fn trail_json(chart: &Chart, t: &Trail) -> Value {
    let word: Vec<Value> = t
        .word
        .iter()
        .map(|o| json!({"edge": chart.edge_id(o.edge), "direction": if o.backward { "backward" } else { "forward" }}))
        .collect();
    json!({
        "kind": if t.is_route() { "route" } else { "band" },
        "label": chart.word_label(&t.word),
        "word": word,
        "indicator": indicator_json(chart, &t.indicator(chart.num_edges())),
    })
}

pub fn bundle_json(chart: &Chart, b: &Bundle) -> Value {
    json!({
        "routes": b.routes.iter().map(|t| chart.word_label(&t.word)).collect::<Vec<_>>(),
        "bands": b.bands.iter().map(|t| chart.word_label(&t.word)).collect::<Vec<_>>(),
        "maximal": b.maximal,
        "cap": b.cap,
    })
}

pub fn presentation_json(chart: &Chart, p: &Presentation) -> Value {
    json!({
        "edges": chart.edge_ids(),
        "vertices": p.vertices.iter().map(|v| v.iter().map(q_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "rays": p.rays.iter().map(|v| v.iter().map(q_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}
