//! Conversions between charts and the structures they generalize: framed
//! directed graphs, fringed algebras of gentle algebras, and signed graphs
//! with netflow `(2,0,...,0)`. Edge and arrow ids are carried over, so flows
//! correspond coordinatewise.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chart::{classify_chart, validate_chart, Chart, ChartDesc, ChartError, EdgeDesc, HalfEdge, Status, VertexDesc, VertexKind};
use crate::polyhedron::{equality_presentation, Presentation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("invalid directed graph: {0}")]
    InvalidDigraph(String),
    #[error("the chart is not gentle")]
    NotGentle,
    #[error("invalid fringed algebra: {0}")]
    InvalidAlgebra(String),
    #[error("the chart has a band, so no vertex order exists")]
    NotAcyclic,
    #[error("netflow must be (2,0,...,0), got {0:?}")]
    BadNetflow(Vec<i64>),
    #[error("invalid signed graph: {0}")]
    InvalidSignedGraph(String),
    #[error("rotation at `{0}` interleaves the two classes")]
    ClassesNotSeparated(String),
    #[error("rotation at `{0}` does not start at a class boundary")]
    MarkInsideClass(String),
    #[error("rotation at `{0}` is not a permutation of its half-edges")]
    BadRotation(String),
    #[error(transparent)]
    Chart(#[from] ChartError),
}

fn bad_dg(m: String) -> ConvertError {
    ConvertError::InvalidDigraph(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcDesc {
    pub id: String,
    pub tail: String,
    pub head: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexFraming {
    #[serde(rename = "in")]
    pub incoming: Vec<String>,
    #[serde(rename = "out")]
    pub outgoing: Vec<String>,
}

/// A directed multigraph with linear orders on `in(v)` and `out(v)` at each
/// vertex having both. Sources and sinks are inferred.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FramedDigraph {
    pub name: String,
    pub vertices: Vec<String>,
    pub edges: Vec<ArcDesc>,
    pub framing: BTreeMap<String, VertexFraming>,
}

impl FramedDigraph {
    fn degrees(&self) -> BTreeMap<&str, (Vec<&str>, Vec<&str>)> {
        let mut d: BTreeMap<&str, (Vec<&str>, Vec<&str>)> =
            self.vertices.iter().map(|v| (v.as_str(), (Vec::new(), Vec::new()))).collect();
        for e in &self.edges {
            if let Some(x) = d.get_mut(e.head.as_str()) {
                x.0.push(&e.id);
            }
            if let Some(x) = d.get_mut(e.tail.as_str()) {
                x.1.push(&e.id);
            }
        }
        d
    }

    /// Whether `v` has both incoming and outgoing edges.
    pub fn is_internal(&self, v: &str) -> bool {
        self.degrees().get(v).map(|(i, o)| !i.is_empty() && !o.is_empty()).unwrap_or(false)
    }

    /// Flow polytope: unit flow leaving the sources, conserved elsewhere.
    pub fn flow_presentation(&self) -> Presentation {
        let ids: BTreeMap<&str, usize> = {
            let mut v: Vec<&str> = self.edges.iter().map(|e| e.id.as_str()).collect();
            v.sort();
            v.into_iter().enumerate().map(|(i, e)| (e, i)).collect()
        };
        let n = ids.len();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut source_row = vec![0i64; n];
        for (ins, outs) in self.degrees().into_values() {
            if ins.is_empty() {
                for e in &outs {
                    source_row[ids[e]] += 1;
                }
            } else if !outs.is_empty() {
                let mut row = vec![0i64; n];
                for e in &ins {
                    row[ids[e]] += 1;
                }
                for e in &outs {
                    row[ids[e]] -= 1;
                }
                rows.push(row);
                rhs.push(0);
            }
        }
        rows.push(source_row);
        rhs.push(1);
        equality_presentation(&rows, &rhs, n)
    }
}

fn check_order(v: &str, side: &str, given: &[String], actual: &[&str]) -> Result<(), ConvertError> {
    let a: BTreeSet<&str> = given.iter().map(String::as_str).collect();
    let b: BTreeSet<&str> = actual.iter().copied().collect();
    if a != b || given.len() != actual.len() {
        return Err(bad_dg(format!("the {side} order at `{v}` must list each {side} edge once")));
    }
    Ok(())
}

/// Builds the chart of a framed digraph, first splitting every source or
/// sink of degree above one into degree-one copies `v#s1`, `v#s2`, ... in
/// edge-id order. Incoming edges form class 0 in framing order; outgoing
/// edges form class 1 in reversed framing order.
pub fn chart_of_framed_digraph(dg: &FramedDigraph) -> Result<Chart, ConvertError> {
    let known: BTreeSet<&str> = dg.vertices.iter().map(String::as_str).collect();
    for e in &dg.edges {
        for x in [&e.tail, &e.head] {
            if !known.contains(x.as_str()) {
                return Err(bad_dg(format!("edge `{}` references unknown vertex `{x}`", e.id)));
            }
        }
    }
    let degrees = dg.degrees();
    let mut vertices = Vec::new();
    let mut classes = BTreeMap::new();
    let mut rename: BTreeMap<(&str, usize), String> = BTreeMap::new();
    for (v, (ins, outs)) in &degrees {
        if ins.is_empty() && outs.is_empty() {
            return Err(bad_dg(format!("vertex `{v}` has no edges")));
        }
        if !ins.is_empty() && !outs.is_empty() {
            let f = dg.framing.get(*v).ok_or_else(|| bad_dg(format!("internal vertex `{v}` has no framing")))?;
            check_order(v, "in", &f.incoming, ins)?;
            check_order(v, "out", &f.outgoing, outs)?;
            let class0 = f.incoming.iter().map(|e| (e.clone(), 1)).collect();
            let class1 = f.outgoing.iter().rev().map(|e| (e.clone(), 0)).collect();
            classes.insert(v.to_string(), vec![class0, class1]);
            vertices.push(VertexDesc { id: v.to_string(), kind: VertexKind::Internal });
            continue;
        }
        // Half-edges at a source or sink, as (edge, end), in edge-id order.
        let mut halves: Vec<(&str, usize)> =
            ins.iter().map(|e| (*e, 1)).chain(outs.iter().map(|e| (*e, 0))).collect();
        halves.sort();
        if halves.len() == 1 {
            vertices.push(VertexDesc { id: v.to_string(), kind: VertexKind::Fringe });
            continue;
        }
        for (k, h) in halves.iter().enumerate() {
            let id = format!("{v}#s{}", k + 1);
            vertices.push(VertexDesc { id: id.clone(), kind: VertexKind::Fringe });
            rename.insert(*h, id);
        }
    }
    let edges = dg
        .edges
        .iter()
        .map(|e| {
            let end = |x: &String, k: usize| rename.get(&(e.id.as_str(), k)).cloned().unwrap_or_else(|| x.clone());
            EdgeDesc { id: e.id.clone(), ends: [end(&e.tail, 0), end(&e.head, 1)] }
        })
        .collect();
    Ok(validate_chart(&ChartDesc { name: dg.name.clone(), vertices, edges, classes })?)
}

/// The same digraph with every edge and every framing order reversed.
pub fn reverse_digraph(dg: &FramedDigraph) -> FramedDigraph {
    FramedDigraph {
        name: dg.name.clone(),
        vertices: dg.vertices.clone(),
        edges: dg.edges.iter().map(|e| ArcDesc { id: e.id.clone(), tail: e.head.clone(), head: e.tail.clone() }).collect(),
        framing: dg
            .framing
            .iter()
            .map(|(v, f)| {
                let rev = |l: &[String]| l.iter().rev().cloned().collect::<Vec<_>>();
                (v.clone(), VertexFraming { incoming: rev(&f.outgoing), outgoing: rev(&f.incoming) })
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowDesc {
    pub id: String,
    pub source: String,
    pub target: String,
}

/// A bound quiver whose internal vertices have two arrows in, two arrows
/// out and two zero relations, padded by fringe vertices of degree one.
/// A relation `[a, b]` forbids `a` followed by `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FringedAlgebra {
    pub name: String,
    pub vertices: Vec<VertexDesc>,
    pub arrows: Vec<ArrowDesc>,
    pub relations: Vec<[String; 2]>,
}

/// Arrows point from the low half-edge to the high one (the fringe end
/// counts as whichever the internal end is not); relations join the high
/// and low half-edges of each class.
pub fn fringed_algebra_of_gentle_chart(chart: &Chart) -> Result<FringedAlgebra, ConvertError> {
    if !classify_chart(chart).gentle {
        return Err(ConvertError::NotGentle);
    }
    let desc = chart.to_desc();
    let mut arrows = Vec::new();
    for e in 0..chart.num_edges() {
        let ends = chart.ends(e);
        // In a gentle chart exactly one end of every edge is low or the
        // other end is high; the arrow leaves from the low side.
        let low0 = match (chart.status(HalfEdge { edge: e, end: 0 }), chart.status(HalfEdge { edge: e, end: 1 })) {
            (Status::Low, _) => true,
            (_, Status::High) => true,
            _ => false,
        };
        let (s, t) = if low0 { (ends[0], ends[1]) } else { (ends[1], ends[0]) };
        arrows.push(ArrowDesc {
            id: chart.edge_id(e).to_string(),
            source: chart.vertex_id(s).to_string(),
            target: chart.vertex_id(t).to_string(),
        });
    }
    let mut relations = Vec::new();
    for v in chart.internal_vertices() {
        for list in chart.classes(v).expect("internal") {
            let (low, high) = (list[0], list[1]);
            relations.push([chart.edge_id(high.edge).to_string(), chart.edge_id(low.edge).to_string()]);
        }
    }
    relations.sort();
    Ok(FringedAlgebra { name: desc.name, vertices: desc.vertices, arrows, relations })
}

fn bad_alg(m: String) -> ConvertError {
    ConvertError::InvalidAlgebra(m)
}

/// The gentle chart of a fringed algebra: relation `[a, b]` at `v` makes
/// the class `(b, v) < (a, v)`.
pub fn chart_of_fringed_algebra(alg: &FringedAlgebra) -> Result<Chart, ConvertError> {
    let kinds: BTreeMap<&str, VertexKind> = alg.vertices.iter().map(|v| (v.id.as_str(), v.kind)).collect();
    let arrows: BTreeMap<&str, &ArrowDesc> = alg.arrows.iter().map(|a| (a.id.as_str(), a)).collect();
    let mut ins: BTreeMap<&str, usize> = BTreeMap::new();
    let mut outs: BTreeMap<&str, usize> = BTreeMap::new();
    for a in &alg.arrows {
        let (Some(&ks), Some(&kt)) = (kinds.get(a.source.as_str()), kinds.get(a.target.as_str())) else {
            return Err(bad_alg(format!("arrow `{}` references an unknown vertex", a.id)));
        };
        if ks == VertexKind::Fringe && kt == VertexKind::Fringe {
            return Err(bad_alg(format!("arrow `{}` joins two fringe vertices", a.id)));
        }
        *outs.entry(&a.source).or_default() += 1;
        *ins.entry(&a.target).or_default() += 1;
    }
    for (v, kind) in &kinds {
        let (i, o) = (ins.get(v).copied().unwrap_or(0), outs.get(v).copied().unwrap_or(0));
        let ok = match kind {
            VertexKind::Internal => i == 2 && o == 2,
            VertexKind::Fringe => i + o == 1,
        };
        if !ok {
            return Err(bad_alg(format!("vertex `{v}` has in-degree {i} and out-degree {o}")));
        }
    }
    let mut classes: BTreeMap<String, Vec<Vec<(String, usize)>>> = BTreeMap::new();
    let mut used_in = BTreeSet::new();
    let mut used_out = BTreeSet::new();
    for [a, b] in &alg.relations {
        let (Some(x), Some(y)) = (arrows.get(a.as_str()), arrows.get(b.as_str())) else {
            return Err(bad_alg(format!("relation {a}{b} names an unknown arrow")));
        };
        if x.target != y.source || kinds[x.target.as_str()] != VertexKind::Internal {
            return Err(bad_alg(format!("relation {a}{b} is not a path through an internal vertex")));
        }
        if !used_in.insert(a.as_str()) || !used_out.insert(b.as_str()) {
            return Err(bad_alg(format!("relation {a}{b} reuses an arrow end")));
        }
        classes.entry(x.target.clone()).or_default().push(vec![(b.clone(), 0), (a.clone(), 1)]);
    }
    for (v, kind) in &kinds {
        let count = classes.get(*v).map_or(0, Vec::len);
        if *kind == VertexKind::Internal && count != 2 {
            return Err(bad_alg(format!("vertex `{v}` has {count} relations, not two")));
        }
    }
    let desc = ChartDesc {
        name: alg.name.clone(),
        vertices: alg.vertices.clone(),
        edges: alg
            .arrows
            .iter()
            .map(|a| EdgeDesc { id: a.id.clone(), ends: [a.source.clone(), a.target.clone()] })
            .collect(),
        classes,
    };
    let chart = validate_chart(&desc)?;
    if !classify_chart(&chart).gentle {
        return Err(bad_alg("an oriented cycle avoids every relation".into()));
    }
    Ok(chart)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedEdge {
    pub id: String,
    /// Vertex numbers `i <= j` in `1..=n+1`.
    pub ends: [usize; 2],
    pub sign: Sign,
}

/// A signed graph on vertices `1..=vertices`. A negative edge is positively
/// incident to its smaller end and negatively to its larger end; a positive
/// edge is positively incident to both.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedGraph {
    pub name: String,
    pub vertices: usize,
    pub edges: Vec<SignedEdge>,
    pub netflow: Vec<i64>,
}

/// The vertex order behind a signed graph: chart vertex ids for `2..=n+1`
/// and the class taken as negative at each.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignedCertificate {
    pub order: Vec<String>,
    pub negative_class: Vec<usize>,
}

fn sorted_edges(sg: &SignedGraph) -> Vec<&SignedEdge> {
    let mut e: Vec<&SignedEdge> = sg.edges.iter().collect();
    e.sort_by(|a, b| a.id.cmp(&b.id));
    e
}

impl SignedGraph {
    fn validate(&self) -> Result<(), ConvertError> {
        let mut want = vec![0i64; self.vertices];
        if let Some(first) = want.first_mut() {
            *first = 2;
        }
        if self.netflow != want {
            return Err(ConvertError::BadNetflow(self.netflow.clone()));
        }
        for e in &self.edges {
            let [i, j] = e.ends;
            if i < 1 || i > j || j > self.vertices {
                return Err(ConvertError::InvalidSignedGraph(format!("edge `{}` has ends {i}, {j}", e.id)));
            }
            if i == j && e.sign == Sign::Minus {
                return Err(ConvertError::InvalidSignedGraph(format!("loop `{}` must be positive", e.id)));
            }
        }
        Ok(())
    }

    /// `+1` or `-1` incidence of the end `k` of an edge.
    fn incidence(e: &SignedEdge, k: usize) -> i64 {
        match (e.sign, k) {
            (Sign::Minus, 1) => -1,
            _ => 1,
        }
    }

    /// The signed flow polytope, computed directly from its definition.
    pub fn flow_presentation(&self) -> Result<Presentation, ConvertError> {
        self.validate()?;
        let edges = sorted_edges(self);
        let n = edges.len();
        let mut rows = vec![vec![0i64; n]; self.vertices];
        for (c, e) in edges.iter().enumerate() {
            for k in 0..2 {
                // Positive incidence consumes flow, negative supplies it.
                rows[e.ends[k] - 1][c] += Self::incidence(e, k);
            }
        }
        Ok(equality_presentation(&rows, &self.netflow, n))
    }
}

/// Orders the internal vertices greedily (least id first) so that one class
/// of each vertex only meets fringe vertices and earlier vertices, and signs
/// the edges accordingly. Fringe vertices become vertex 1.
pub fn signed_graph_of_acyclic_chart(chart: &Chart) -> Result<(SignedGraph, SignedCertificate), ConvertError> {
    let mut remaining: BTreeSet<usize> = chart.internal_vertices().collect();
    let mut number = vec![1usize; chart.num_vertices()];
    let mut negative = vec![0usize; chart.num_vertices()];
    let mut cert = SignedCertificate { order: Vec::new(), negative_class: Vec::new() };
    while !remaining.is_empty() {
        let pick = remaining.iter().find_map(|&v| {
            let classes = chart.classes(v).expect("internal");
            (0..2)
                .find(|&c| classes[c].iter().all(|h| !remaining.contains(&chart.vertex_of(h.partner()))))
                .map(|c| (v, c))
        });
        let (v, c) = pick.ok_or(ConvertError::NotAcyclic)?;
        remaining.remove(&v);
        number[v] = cert.order.len() + 2;
        negative[v] = c;
        cert.order.push(chart.vertex_id(v).to_string());
        cert.negative_class.push(c);
    }
    let is_negative = |h: HalfEdge| chart.class_of(h).map(|c| c == negative[chart.vertex_of(h)]);
    let mut edges = Vec::new();
    for e in 0..chart.num_edges() {
        let halves = [HalfEdge { edge: e, end: 0 }, HalfEdge { edge: e, end: 1 }];
        let mut ends = halves.map(|h| number[chart.vertex_of(h)]);
        let neg = halves.map(is_negative);
        // Some(true) marks a negative class; None a fringe end.
        let sign = if neg.contains(&Some(true)) { Sign::Minus } else { Sign::Plus };
        ends.sort();
        edges.push(SignedEdge { id: chart.edge_id(e).to_string(), ends, sign });
    }
    let vertices = cert.order.len() + 1;
    let mut netflow = vec![0i64; vertices];
    netflow[0] = 2;
    Ok((SignedGraph { name: chart.name().to_string(), vertices, edges, netflow }, cert))
}

/// Splits vertex 1 into fringe vertices `n1#s1`, `n1#s2`, ... (one per
/// half-edge, in edge-id order); vertex `j` becomes `n{j}` with the positive
/// half-edges in class 0 and the negative ones in class 1.
pub fn chart_of_signed_graph(sg: &SignedGraph) -> Result<Chart, ConvertError> {
    sg.validate()?;
    let edges = sorted_edges(sg);
    let mut vertices = Vec::new();
    let mut classes: BTreeMap<String, Vec<Vec<(String, usize)>>> = BTreeMap::new();
    let mut split = 0usize;
    let mut out_edges = Vec::new();
    for e in &edges {
        let mut ends: [String; 2] = Default::default();
        for k in 0..2 {
            let v = e.ends[k];
            ends[k] = if v == 1 {
                split += 1;
                let id = format!("n1#s{split}");
                vertices.push(VertexDesc { id: id.clone(), kind: VertexKind::Fringe });
                id
            } else {
                let id = format!("n{v}");
                let c = if SignedGraph::incidence(e, k) > 0 { 0 } else { 1 };
                classes.entry(id.clone()).or_insert_with(|| vec![Vec::new(), Vec::new()])[c].push((e.id.clone(), k));
                id
            };
        }
        out_edges.push(EdgeDesc { id: e.id.clone(), ends });
    }
    for (v, lists) in &classes {
        if lists.iter().any(Vec::is_empty) {
            return Err(ConvertError::InvalidSignedGraph(format!("vertex `{v}` lacks a positive or a negative edge")));
        }
        vertices.push(VertexDesc { id: v.clone(), kind: VertexKind::Internal });
    }
    let missing: Vec<usize> = (2..=sg.vertices).filter(|j| !classes.contains_key(&format!("n{j}"))).collect();
    if let Some(j) = missing.first() {
        return Err(ConvertError::InvalidSignedGraph(format!("vertex {j} has no edges")));
    }
    Ok(validate_chart(&ChartDesc { name: sg.name.clone(), vertices, edges: out_edges, classes })?)
}

/// Frames a chart from a clockwise rotation of half-edges at each internal
/// vertex, listed from a mark placed where the two classes meet. Each class
/// is ordered as the rotation meets it.
pub fn clockwise_framing(
    chart: &Chart,
    rotation: &BTreeMap<String, Vec<(String, usize)>>,
) -> Result<Chart, ConvertError> {
    let mut desc = chart.to_desc();
    for (v, lists) in desc.classes.iter_mut() {
        let rot = rotation.get(v).ok_or_else(|| ConvertError::BadRotation(v.clone()))?;
        let class_of = |h: &(String, usize)| lists.iter().position(|l| l.contains(h));
        let total: usize = lists.iter().map(Vec::len).sum();
        let unique: BTreeSet<&(String, usize)> = rot.iter().collect();
        if rot.len() != total || unique.len() != total || rot.iter().any(|h| class_of(h).is_none()) {
            return Err(ConvertError::BadRotation(v.clone()));
        }
        let labels: Vec<usize> = rot.iter().map(|h| class_of(h).expect("checked")).collect();
        let cyclic_changes = (0..total).filter(|&i| labels[i] != labels[(i + 1) % total]).count();
        if cyclic_changes > 2 {
            return Err(ConvertError::ClassesNotSeparated(v.clone()));
        }
        if labels[0] == labels[total - 1] {
            return Err(ConvertError::MarkInsideClass(v.clone()));
        }
        for (c, list) in lists.iter_mut().enumerate() {
            *list = rot.iter().zip(&labels).filter(|(_, &l)| l == c).map(|(h, _)| h.clone()).collect();
        }
    }
    Ok(validate_chart(&desc)?)
}
