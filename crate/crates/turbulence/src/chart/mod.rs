//! Turbulence charts: undirected multigraphs whose internal vertices split
//! their half-edges into two ordered classes.

mod classify;
mod iso;
mod surgery;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use classify::{classify_chart, ClassificationReport, Violation};
pub use iso::{charts_isomorphic, Isomorphism};
pub use surgery::{contract_idle_edge, delete_edges};
pub(crate) use classify::find_transition_cycle;
pub(crate) use surgery::Draft;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Internal,
    Fringe,
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexKind::Internal => f.write_str("internal"),
            VertexKind::Fringe => f.write_str("fringe"),
        }
    }
}

/// One end of an edge; `end` is 0 or 1 and indexes the stored end pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge {
    pub edge: usize,
    pub end: usize,
}

impl HalfEdge {
    pub fn partner(self) -> HalfEdge {
        HalfEdge { edge: self.edge, end: 1 - self.end }
    }
}

/// An edge traversed from one half-edge to the other. Forward runs from end 0
/// to end 1. The derived order (edge index, then forward before backward) is
/// the order every canonical form is built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OEdge {
    pub edge: usize,
    pub backward: bool,
}

impl OEdge {
    pub fn forward(edge: usize) -> OEdge {
        OEdge { edge, backward: false }
    }

    pub fn inv(self) -> OEdge {
        OEdge { edge: self.edge, backward: !self.backward }
    }

    pub fn tail(self) -> HalfEdge {
        HalfEdge { edge: self.edge, end: self.backward as usize }
    }

    pub fn head(self) -> HalfEdge {
        HalfEdge { edge: self.edge, end: 1 - self.backward as usize }
    }
}

/// Position of a half-edge relative to the framing of its class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Lonely,
    Low,
    High,
    /// Strictly between two other members; both high and low.
    Middle,
}

impl Status {
    pub fn is_high(self) -> bool {
        matches!(self, Status::High | Status::Middle)
    }

    pub fn is_low(self) -> bool {
        matches!(self, Status::Low | Status::Middle)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("{context} references unknown vertex `{vertex}`")]
    UnknownVertex { context: String, vertex: String },
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("class at `{vertex}` lists half-edge ({edge}, {end}), which is not incident to it")]
    DanglingHalfEdge { vertex: String, edge: String, end: usize },
    #[error("bad partition at `{vertex}`: {reason}")]
    BadPartition { vertex: String, reason: String },
    #[error("fringe vertex `{0}` carries class data")]
    FringeInClasses(String),
    #[error("vertex `{0}` has no incident edge")]
    IsolatedVertex(String),
    #[error("vertex `{vertex}` is declared {declared} but has degree {degree}")]
    KindMismatch { vertex: String, declared: VertexKind, degree: usize },
    #[error("edge `{0}` is not idle")]
    NotIdle(String),
    #[error("contracting `{0}` would leave a fringe vertex with several half-edges")]
    FringeMerge(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDesc {
    pub id: String,
    pub kind: VertexKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDesc {
    pub id: String,
    pub ends: [String; 2],
}

/// Raw, unvalidated chart description; this is also the JSON file layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartDesc {
    pub name: String,
    pub vertices: Vec<VertexDesc>,
    pub edges: Vec<EdgeDesc>,
    pub classes: BTreeMap<String, Vec<Vec<(String, usize)>>>,
}

/// A validated framed turbulence chart. Vertices and edges are indexed in
/// sorted id order, so iteration is deterministic.
#[derive(Clone, Debug)]
pub struct Chart {
    name: String,
    vertices: Vec<String>,
    kinds: Vec<VertexKind>,
    edges: Vec<String>,
    ends: Vec<[usize; 2]>,
    classes: Vec<Option<[Vec<HalfEdge>; 2]>>,
    slots: Vec<[Option<(usize, usize)>; 2]>,
    incident: Vec<Vec<HalfEdge>>,
    vindex: HashMap<String, usize>,
    eindex: HashMap<String, usize>,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.to_desc() == other.to_desc()
    }
}

pub fn validate_chart(desc: &ChartDesc) -> Result<Chart, ChartError> {
    let mut seen = BTreeSet::new();
    for id in desc.vertices.iter().map(|v| &v.id).chain(desc.edges.iter().map(|e| &e.id)) {
        if !seen.insert(id.clone()) {
            return Err(ChartError::DuplicateId(id.clone()));
        }
    }

    let mut vorder: Vec<&VertexDesc> = desc.vertices.iter().collect();
    vorder.sort_by(|a, b| a.id.cmp(&b.id));
    let vertices: Vec<String> = vorder.iter().map(|v| v.id.clone()).collect();
    let declared: Vec<VertexKind> = vorder.iter().map(|v| v.kind).collect();
    let vindex: HashMap<String, usize> =
        vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();

    let mut eorder: Vec<&EdgeDesc> = desc.edges.iter().collect();
    eorder.sort_by(|a, b| a.id.cmp(&b.id));
    let edges: Vec<String> = eorder.iter().map(|e| e.id.clone()).collect();
    let eindex: HashMap<String, usize> =
        edges.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();

    let mut ends = Vec::with_capacity(edges.len());
    let mut incident = vec![Vec::new(); vertices.len()];
    for (ei, e) in eorder.iter().enumerate() {
        let mut pair = [0usize; 2];
        for (k, vid) in e.ends.iter().enumerate() {
            let vi = *vindex.get(vid).ok_or_else(|| ChartError::UnknownVertex {
                context: format!("edge `{}`", e.id),
                vertex: vid.clone(),
            })?;
            pair[k] = vi;
            incident[vi].push(HalfEdge { edge: ei, end: k });
        }
        ends.push(pair);
    }

    for (vi, v) in vertices.iter().enumerate() {
        let degree = incident[vi].len();
        if degree == 0 {
            return Err(ChartError::IsolatedVertex(v.clone()));
        }
        let actual = if degree == 1 { VertexKind::Fringe } else { VertexKind::Internal };
        if actual != declared[vi] {
            return Err(ChartError::KindMismatch { vertex: v.clone(), declared: declared[vi], degree });
        }
    }

    let mut classes: Vec<Option<[Vec<HalfEdge>; 2]>> = vec![None; vertices.len()];
    let mut slots = vec![[None, None]; edges.len()];
    for (vid, lists) in &desc.classes {
        let vi = *vindex.get(vid).ok_or_else(|| ChartError::UnknownVertex {
            context: "classes".to_string(),
            vertex: vid.clone(),
        })?;
        if declared[vi] == VertexKind::Fringe {
            return Err(ChartError::FringeInClasses(vid.clone()));
        }
        if lists.len() != 2 {
            return Err(ChartError::BadPartition {
                vertex: vid.clone(),
                reason: format!("expected 2 classes, found {}", lists.len()),
            });
        }
        let mut pair: [Vec<HalfEdge>; 2] = [Vec::new(), Vec::new()];
        for (c, list) in lists.iter().enumerate() {
            if list.is_empty() {
                return Err(ChartError::BadPartition { vertex: vid.clone(), reason: format!("class {c} is empty") });
            }
            for (pos, (eid, end)) in list.iter().enumerate() {
                let dangling = || ChartError::DanglingHalfEdge { vertex: vid.clone(), edge: eid.clone(), end: *end };
                let ei = *eindex.get(eid).ok_or_else(dangling)?;
                if *end > 1 || ends[ei][*end] != vi {
                    return Err(dangling());
                }
                if slots[ei][*end].is_some() {
                    return Err(ChartError::BadPartition {
                        vertex: vid.clone(),
                        reason: format!("half-edge ({eid}, {end}) listed twice"),
                    });
                }
                slots[ei][*end] = Some((c, pos));
                pair[c].push(HalfEdge { edge: ei, end: *end });
            }
        }
        classes[vi] = Some(pair);
    }

    for (vi, v) in vertices.iter().enumerate() {
        if declared[vi] != VertexKind::Internal {
            continue;
        }
        if classes[vi].is_none() {
            return Err(ChartError::BadPartition { vertex: v.clone(), reason: "no classes given".into() });
        }
        for h in &incident[vi] {
            if slots[h.edge][h.end].is_none() {
                return Err(ChartError::BadPartition {
                    vertex: v.clone(),
                    reason: format!("half-edge ({}, {}) is in no class", edges[h.edge], h.end),
                });
            }
        }
    }

    Ok(Chart {
        name: desc.name.clone(),
        vertices,
        kinds: declared,
        edges,
        ends,
        classes,
        slots,
        incident,
        vindex,
        eindex,
    })
}

impl Chart {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Chart {
        self.name = name.to_string();
        self
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn edge_id(&self, e: usize) -> &str {
        &self.edges[e]
    }

    pub fn edge_ids(&self) -> &[String] {
        &self.edges
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vindex.get(id).copied()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.eindex.get(id).copied()
    }

    pub fn kind(&self, v: usize) -> VertexKind {
        self.kinds[v]
    }

    pub fn is_fringe(&self, v: usize) -> bool {
        self.kinds[v] == VertexKind::Fringe
    }

    pub fn internal_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(move |&v| !self.is_fringe(v))
    }

    pub fn fringe_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(move |&v| self.is_fringe(v))
    }

    pub fn ends(&self, e: usize) -> [usize; 2] {
        self.ends[e]
    }

    pub fn vertex_of(&self, h: HalfEdge) -> usize {
        self.ends[h.edge][h.end]
    }

    pub fn incident(&self, v: usize) -> &[HalfEdge] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.ends[e][0] == self.ends[e][1]
    }

    /// Number of fringe half-edges of `e` (0, 1 or 2).
    pub fn fringe_ends(&self, e: usize) -> usize {
        self.ends[e].iter().filter(|&&v| self.is_fringe(v)).count()
    }

    pub fn classes(&self, v: usize) -> Option<&[Vec<HalfEdge>; 2]> {
        self.classes[v].as_ref()
    }

    /// `(class, position)` of an internal half-edge; `None` at fringe vertices.
    pub fn slot(&self, h: HalfEdge) -> Option<(usize, usize)> {
        self.slots[h.edge][h.end]
    }

    pub fn class_of(&self, h: HalfEdge) -> Option<usize> {
        self.slot(h).map(|s| s.0)
    }

    pub fn status(&self, h: HalfEdge) -> Status {
        let Some((c, pos)) = self.slot(h) else { return Status::Lonely };
        let size = self.classes[self.vertex_of(h)].as_ref().expect("internal")[c].len();
        match (size, pos) {
            (1, _) => Status::Lonely,
            (_, 0) => Status::Low,
            (n, p) if p + 1 == n => Status::High,
            _ => Status::Middle,
        }
    }

    pub fn tail_vertex(&self, o: OEdge) -> usize {
        self.vertex_of(o.tail())
    }

    pub fn head_vertex(&self, o: OEdge) -> usize {
        self.vertex_of(o.head())
    }

    /// Whether `b` may directly follow `a` in a string.
    pub fn can_follow(&self, a: OEdge, b: OEdge) -> bool {
        let (h, t) = (a.head(), b.tail());
        if self.vertex_of(h) != self.vertex_of(t) {
            return false;
        }
        match (self.class_of(h), self.class_of(t)) {
            (Some(x), Some(y)) => x != y,
            _ => false,
        }
    }

    /// Half-edges after `a`: every oriented edge that may follow it.
    pub fn successors(&self, a: OEdge) -> Vec<OEdge> {
        let h = a.head();
        let Some((c, _)) = self.slot(h) else { return Vec::new() };
        let v = self.vertex_of(h);
        self.classes[v].as_ref().expect("internal")[1 - c]
            .iter()
            .map(|t| OEdge { edge: t.edge, backward: t.end == 1 })
            .collect()
    }

    /// Oriented edges leaving vertex `v`.
    pub fn leaving(&self, v: usize) -> Vec<OEdge> {
        self.incident[v].iter().map(|t| OEdge { edge: t.edge, backward: t.end == 1 }).collect()
    }

    pub fn all_oedges(&self) -> impl Iterator<Item = OEdge> {
        (0..self.edges.len()).flat_map(|e| [OEdge { edge: e, backward: false }, OEdge { edge: e, backward: true }])
    }

    pub fn is_ascending(&self, o: OEdge) -> bool {
        let t = self.status(o.tail());
        let h = self.status(o.head());
        (t.is_low() || t == Status::Lonely) && (h.is_high() || h == Status::Lonely)
    }

    pub fn is_descending(&self, o: OEdge) -> bool {
        self.is_ascending(o.inv())
    }

    pub fn is_steep(&self, e: usize) -> bool {
        let o = OEdge::forward(e);
        self.is_ascending(o) || self.is_descending(o)
    }

    pub fn to_desc(&self) -> ChartDesc {
        let vertices = self
            .vertices
            .iter()
            .zip(&self.kinds)
            .map(|(id, kind)| VertexDesc { id: id.clone(), kind: *kind })
            .collect();
        let edges = self
            .edges
            .iter()
            .zip(&self.ends)
            .map(|(id, [a, b])| EdgeDesc { id: id.clone(), ends: [self.vertices[*a].clone(), self.vertices[*b].clone()] })
            .collect();
        let mut classes = BTreeMap::new();
        for (v, cl) in self.classes.iter().enumerate() {
            if let Some(pair) = cl {
                let lists = pair
                    .iter()
                    .map(|list| list.iter().map(|h| (self.edges[h.edge].clone(), h.end)).collect())
                    .collect();
                classes.insert(self.vertices[v].clone(), lists);
            }
        }
        ChartDesc { name: self.name.clone(), vertices, edges, classes }
    }

    /// The same chart with every class order reversed.
    pub fn reversed_framing(&self) -> Chart {
        let mut desc = self.to_desc();
        for lists in desc.classes.values_mut() {
            for l in lists.iter_mut() {
                l.reverse();
            }
        }
        validate_chart(&desc).expect("reversing orders keeps validity")
    }

    pub fn word_label(&self, word: &[OEdge]) -> String {
        word.iter().map(|&o| self.oedge_label(o)).collect::<Vec<_>>().join(" ")
    }

    pub fn oedge_label(&self, o: OEdge) -> String {
        if o.backward {
            format!("{}^-1", self.edges[o.edge])
        } else {
            self.edges[o.edge].clone()
        }
    }
}
