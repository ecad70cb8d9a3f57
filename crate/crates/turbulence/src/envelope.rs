//! Local moves that turn any framed chart into a gentle one: degree
//! reduction, steepening, filling and band correction. The composed
//! pipeline records every move so the result can be replayed and undone.
//!
//! Processing order is canonical: the first vertex, class or edge by id
//! within each phase. Degree reduction always splits off one half-edge.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::chart::{
    charts_isomorphic, classify_chart, find_transition_cycle, Chart, ChartError, Draft, OEdge, Status,
    VertexKind,
};
use crate::polyhedron::{oracle_face_presentation, oracle_presentation, OracleMode};
use crate::trails::{canonicalize_trail, elementary_trails, TrailKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    #[error("no class of size greater than two at `{0}`")]
    NoOversizedClass(String),
    #[error("split index {a} is outside 1..={max}")]
    BadSplitIndex { a: usize, max: usize },
    #[error("edge `{0}` is already steep")]
    EdgeAlreadySteep(String),
    #[error("the chart has a class with more than two members")]
    NotSubFull,
    #[error("the chart is not full")]
    NotFull,
    #[error("edge `{0}` is not steep")]
    NotSteepEverywhere(String),
    #[error("the word is not a steep band")]
    BandNotSteep,
    #[error("class {class} at `{vertex}` is not a singleton")]
    NotSingleton { vertex: String, class: usize },
    #[error("move {0} cannot be undone by contraction")]
    NotInvertible(usize),
    #[error(transparent)]
    Chart(#[from] ChartError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    Above,
    Below,
}

/// One recorded move. Every field needed to replay it is stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum Move {
    DegreeReduce { vertex: String, class: usize, a: usize, new_vertex: String, delta_edge: String },
    Steepen { edge: String, new_vertex: String, delta_edges: [String; 2] },
    FillStep {
        vertex: String,
        class: usize,
        new_fringe_vertex: String,
        new_edge: String,
        placement: Placement,
        /// Set when the partner half-edge was lonely and the ascending
        /// convention chose the placement.
        by_convention: bool,
    },
    BandCorrect {
        band: Vec<String>,
        new_vertices: [String; 2],
        replaced_edge: String,
        /// The band runs along the replaced edge from end 1 to end 0.
        backward: bool,
        new_edges: [String; 3],
        fill_sublog: Vec<Move>,
    },
    Contract { edge: String },
}

pub type MoveLog = Vec<Move>;

fn chart_as_desc<S: Serializer>(chart: &Chart, s: S) -> Result<S::Ok, S::Error> {
    chart.to_desc().serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct GentleEnvelope {
    #[serde(serialize_with = "chart_as_desc")]
    pub envelope: Chart,
    #[serde(rename = "W")]
    pub w: BTreeSet<String>,
    pub log: MoveLog,
    /// Original edge id to the envelope edge carrying the same flow value.
    pub embedding: BTreeMap<String, String>,
}

fn replace_half(d: &mut Draft, vertex: &str, from: (&str, usize), to: (String, usize)) {
    if let Some(pair) = d.classes.get_mut(vertex) {
        for list in pair.iter_mut() {
            for h in list.iter_mut() {
                if h.0 == from.0 && h.1 == from.1 {
                    *h = to;
                    return;
                }
            }
        }
    }
}

fn apply(d: &mut Draft, mv: &Move) -> Result<(), EnvelopeError> {
    match mv {
        Move::DegreeReduce { vertex, class, a, new_vertex, delta_edge } => {
            let pair = d.classes.get_mut(vertex).ok_or_else(|| EnvelopeError::NoOversizedClass(vertex.clone()))?;
            let list = &mut pair[*class];
            if list.len() <= 2 {
                return Err(EnvelopeError::NoOversizedClass(vertex.clone()));
            }
            if *a < 1 || *a > list.len() - 2 {
                return Err(EnvelopeError::BadSplitIndex { a: *a, max: list.len() - 2 });
            }
            let upper = list.split_off(*a);
            list.push((delta_edge.clone(), 0));
            for (e, k) in &upper {
                d.edges.get_mut(e).expect("listed edge")[*k] = new_vertex.clone();
            }
            let mut classes: [Vec<(String, usize)>; 2] = Default::default();
            classes[*class] = upper;
            classes[1 - class] = vec![(delta_edge.clone(), 1)];
            d.edges.insert(delta_edge.clone(), [vertex.clone(), new_vertex.clone()]);
            d.kinds.insert(new_vertex.clone(), VertexKind::Internal);
            d.classes.insert(new_vertex.clone(), classes);
        }
        Move::Steepen { edge, new_vertex, delta_edges: [e1, e2] } => {
            let ends = d.edges.remove(edge).ok_or_else(|| ChartError::UnknownEdge(edge.clone()))?;
            replace_half(d, &ends[0], (edge, 0), (e1.clone(), 0));
            replace_half(d, &ends[1], (edge, 1), (e2.clone(), 1));
            d.edges.insert(e1.clone(), [ends[0].clone(), new_vertex.clone()]);
            d.edges.insert(e2.clone(), [new_vertex.clone(), ends[1].clone()]);
            d.kinds.insert(new_vertex.clone(), VertexKind::Internal);
            d.classes.insert(new_vertex.clone(), [vec![(e1.clone(), 1)], vec![(e2.clone(), 0)]]);
        }
        Move::FillStep { vertex, class, new_fringe_vertex, new_edge, placement, .. } => {
            let not_single = || EnvelopeError::NotSingleton { vertex: vertex.clone(), class: *class };
            let list = d.classes.get_mut(vertex).ok_or_else(not_single)?.get_mut(*class).ok_or_else(not_single)?;
            if list.len() != 1 {
                return Err(not_single());
            }
            match placement {
                Placement::Above => list.push((new_edge.clone(), 0)),
                Placement::Below => list.insert(0, (new_edge.clone(), 0)),
            }
            d.edges.insert(new_edge.clone(), [vertex.clone(), new_fringe_vertex.clone()]);
            d.kinds.insert(new_fringe_vertex.clone(), VertexKind::Fringe);
        }
        Move::BandCorrect { replaced_edge, backward, new_vertices: [p, q], new_edges: [f1, f2, f3], fill_sublog, .. } => {
            let ends = d.edges.remove(replaced_edge).ok_or_else(|| ChartError::UnknownEdge(replaced_edge.clone()))?;
            let te = *backward as usize;
            let (t, h) = (ends[te].clone(), ends[1 - te].clone());
            replace_half(d, &t, (replaced_edge, te), (f1.clone(), 0));
            replace_half(d, &h, (replaced_edge, 1 - te), (f3.clone(), 1));
            d.edges.insert(f1.clone(), [t, p.clone()]);
            d.edges.insert(f2.clone(), [p.clone(), q.clone()]);
            d.edges.insert(f3.clone(), [q.clone(), h]);
            for v in [p, q] {
                d.kinds.insert(v.clone(), VertexKind::Internal);
            }
            d.classes.insert(p.clone(), [vec![(f1.clone(), 1)], vec![(f2.clone(), 0)]]);
            d.classes.insert(q.clone(), [vec![(f2.clone(), 1)], vec![(f3.clone(), 0)]]);
            for step in fill_sublog {
                apply(d, step)?;
            }
        }
        Move::Contract { edge } => d.contract(edge)?,
    }
    Ok(())
}

fn built(d: &Draft) -> Chart {
    d.build().expect("moves preserve validity")
}

/// Replays a log from its input chart.
pub fn replay(chart: &Chart, log: &[Move]) -> Result<Chart, EnvelopeError> {
    let mut d = Draft::from_chart(chart);
    for mv in log {
        apply(&mut d, mv)?;
    }
    Ok(d.build()?)
}

fn oversized(chart: &Chart, v: usize) -> Option<usize> {
    chart.classes(v)?.iter().position(|l| l.len() > 2)
}

fn reduce_move(d: &Draft, vertex: &str, class: usize, a: usize) -> Move {
    let [new_vertex, delta_edge] = d.fresh(|k| [format!("v#dr{k}"), format!("e#delta{k}")]);
    Move::DegreeReduce { vertex: vertex.to_string(), class, a, new_vertex, delta_edge }
}

/// Splits the first oversized class at `vertex` after its `a` lowest members.
pub fn degree_reduce(chart: &Chart, vertex: &str, a: usize) -> Result<(Chart, Move), EnvelopeError> {
    let v = chart.vertex_index(vertex).ok_or_else(|| EnvelopeError::NoOversizedClass(vertex.to_string()))?;
    let class = oversized(chart, v).ok_or_else(|| EnvelopeError::NoOversizedClass(vertex.to_string()))?;
    let mut d = Draft::from_chart(chart);
    let mv = reduce_move(&d, vertex, class, a);
    apply(&mut d, &mv)?;
    Ok((built(&d), mv))
}

fn sub_full(chart: &Chart) -> bool {
    chart.internal_vertices().all(|v| oversized(chart, v).is_none())
}

fn needs_steepening(chart: &Chart, e: usize) -> bool {
    match chart.fringe_ends(e) {
        2 => true,
        0 => !chart.is_steep(e),
        _ => false,
    }
}

fn steepen_move(d: &Draft, edge: &str) -> Move {
    let [new_vertex, a, b] = d.fresh(|k| [format!("v#st{k}"), format!("e#st{k}a"), format!("e#st{k}b")]);
    Move::Steepen { edge: edge.to_string(), new_vertex, delta_edges: [a, b] }
}

/// Subdivides a fringe-to-fringe or non-steep internal edge through a new
/// vertex with two singleton classes.
pub fn steepen(chart: &Chart, edge: &str) -> Result<(Chart, Move), EnvelopeError> {
    if !sub_full(chart) {
        return Err(EnvelopeError::NotSubFull);
    }
    let e = chart.edge_index(edge).ok_or_else(|| ChartError::UnknownEdge(edge.to_string()))?;
    if !needs_steepening(chart, e) {
        return Err(EnvelopeError::EdgeAlreadySteep(edge.to_string()));
    }
    let mut d = Draft::from_chart(chart);
    let mv = steepen_move(&d, edge);
    apply(&mut d, &mv)?;
    Ok((built(&d), mv))
}

fn fill_move(d: &Draft, vertex: &str, class: usize, placement: Placement, by_convention: bool) -> Move {
    let [new_fringe_vertex, new_edge] = d.fresh(|k| [format!("v#fl{k}"), format!("e#fl{k}")]);
    Move::FillStep { vertex: vertex.to_string(), class, new_fringe_vertex, new_edge, placement, by_convention }
}

/// The first singleton class and the filling placement its partner dictates.
fn next_fill(chart: &Chart) -> Option<(usize, usize, Placement, bool)> {
    for v in chart.internal_vertices() {
        for (c, list) in chart.classes(v).expect("internal").iter().enumerate() {
            if let [h] = list[..] {
                let (placement, by_convention) = match chart.status(h.partner()) {
                    Status::High => (Placement::Above, false),
                    Status::Low => (Placement::Below, false),
                    // Lonely partner: make the stored direction ascending.
                    _ if h.end == 0 => (Placement::Above, true),
                    _ => (Placement::Below, true),
                };
                return Some((v, c, placement, by_convention));
            }
        }
    }
    None
}

fn check_steep(chart: &Chart) -> Result<(), EnvelopeError> {
    match (0..chart.num_edges()).find(|&e| !chart.is_steep(e)) {
        Some(e) => Err(EnvelopeError::NotSteepEverywhere(chart.edge_id(e).to_string())),
        None => Ok(()),
    }
}

/// Adds a fringe edge to every singleton class until the chart is full.
pub fn fill(chart: &Chart) -> Result<(Chart, Vec<Move>), EnvelopeError> {
    if !sub_full(chart) {
        return Err(EnvelopeError::NotSubFull);
    }
    check_steep(chart)?;
    let mut d = Draft::from_chart(chart);
    let mut current = chart.clone();
    let mut records = Vec::new();
    while let Some((v, c, placement, conv)) = next_fill(&current) {
        let mv = fill_move(&d, current.vertex_id(v), c, placement, conv);
        apply(&mut d, &mv)?;
        records.push(mv);
        current = built(&d);
    }
    Ok((current, records))
}

fn is_full(chart: &Chart) -> bool {
    chart.internal_vertices().all(|v| chart.classes(v).expect("internal").iter().all(|l| l.len() == 2))
}

fn band_move(d: &Draft, chart: &Chart, band: &[OEdge]) -> Result<Move, EnvelopeError> {
    let canonical = canonicalize_trail(chart, band).map_err(|_| EnvelopeError::BandNotSteep)?;
    if canonical.kind != TrailKind::Band {
        return Err(EnvelopeError::BandNotSteep);
    }
    let w = &canonical.word;
    let up = w.iter().all(|&o| chart.is_ascending(o));
    let down = w.iter().all(|&o| chart.is_descending(o));
    if !(up || down) {
        return Err(EnvelopeError::BandNotSteep);
    }
    let first = if up { w[0] } else { w[0].inv() };
    let [p, q, f1, f2, f3] = d.fresh(|k| {
        [format!("v#bc{k}a"), format!("v#bc{k}b"), format!("e#bc{k}a"), format!("e#bc{k}b"), format!("e#bc{k}c")]
    });

    // The outer edges stay ascending; the middle one is made descending.
    let mut scratch = d.clone();
    let skeleton = Move::BandCorrect {
        band: Vec::new(),
        new_vertices: [p.clone(), q.clone()],
        replaced_edge: chart.edge_id(first.edge).to_string(),
        backward: first.backward,
        new_edges: [f1, f2, f3],
        fill_sublog: Vec::new(),
    };
    apply(&mut scratch, &skeleton)?;
    let mut sublog = Vec::new();
    for (v, c, placement) in
        [(&p, 0, Placement::Below), (&p, 1, Placement::Below), (&q, 0, Placement::Above), (&q, 1, Placement::Above)]
    {
        let mv = fill_move(&scratch, v, c, placement, false);
        apply(&mut scratch, &mv)?;
        sublog.push(mv);
    }
    let Move::BandCorrect { new_vertices, replaced_edge, backward, new_edges, .. } = skeleton else { unreachable!() };
    Ok(Move::BandCorrect {
        band: w.iter().map(|&o| chart.oedge_label(o)).collect(),
        new_vertices,
        replaced_edge,
        backward,
        new_edges,
        fill_sublog: sublog,
    })
}

/// Breaks a steep band by routing its first edge through two new filled
/// vertices, the middle edge of the detour running against the band.
pub fn correct_band(chart: &Chart, band: &[OEdge]) -> Result<(Chart, Move), EnvelopeError> {
    if !is_full(chart) {
        return Err(EnvelopeError::NotFull);
    }
    check_steep(chart)?;
    let mut d = Draft::from_chart(chart);
    let mv = band_move(&d, chart, band)?;
    apply(&mut d, &mv)?;
    Ok((built(&d), mv))
}

fn retarget(embedding: &mut BTreeMap<String, String>, old: &str, new: &str) {
    for target in embedding.values_mut() {
        if target == old {
            *target = new.to_string();
        }
    }
}

/// Runs degree reduction, steepening, filling and band correction in turn.
pub fn gentle_envelope(chart: &Chart) -> GentleEnvelope {
    let mut d = Draft::from_chart(chart);
    let mut log = Vec::new();
    let mut w = BTreeSet::new();
    let mut embedding: BTreeMap<String, String> = chart.edge_ids().iter().map(|e| (e.clone(), e.clone())).collect();
    let mut current = chart.clone();

    loop {
        let found = current.internal_vertices().find_map(|v| oversized(&current, v).map(|c| (v, c)));
        let Some((v, c)) = found else { break };
        let mv = reduce_move(&d, current.vertex_id(v), c, 1);
        apply(&mut d, &mv).expect("oversized class");
        log.push(mv);
        current = built(&d);
    }

    while let Some(e) = (0..current.num_edges()).find(|&e| needs_steepening(&current, e)) {
        let mv = steepen_move(&d, current.edge_id(e));
        if let Move::Steepen { edge, delta_edges, .. } = &mv {
            retarget(&mut embedding, edge, &delta_edges[0]);
        }
        apply(&mut d, &mv).expect("edge present");
        log.push(mv);
        current = built(&d);
    }

    while let Some((v, c, placement, conv)) = next_fill(&current) {
        let mv = fill_move(&d, current.vertex_id(v), c, placement, conv);
        if let Move::FillStep { new_edge, .. } = &mv {
            w.insert(new_edge.clone());
        }
        apply(&mut d, &mv).expect("singleton class");
        log.push(mv);
        current = built(&d);
    }

    let ascending = |c: &Chart| {
        let c2 = c.clone();
        find_transition_cycle(c, &move |o| c2.is_ascending(o))
    };
    while let Some(cycle) = ascending(&current) {
        let mv = band_move(&d, &current, &cycle).expect("ascending cycles are steep bands");
        if let Move::BandCorrect { replaced_edge, new_edges, fill_sublog, .. } = &mv {
            retarget(&mut embedding, replaced_edge, &new_edges[0]);
            for step in fill_sublog {
                if let Move::FillStep { new_edge, .. } = step {
                    w.insert(new_edge.clone());
                }
            }
        }
        apply(&mut d, &mv).expect("band present");
        log.push(mv);
        current = built(&d);
    }

    GentleEnvelope { envelope: current, w, log, embedding }
}

fn rename_edge(d: &mut Draft, from: &str, to: &str) {
    if let Some(ends) = d.edges.remove(from) {
        d.edges.insert(to.to_string(), ends);
    }
    for pair in d.classes.values_mut() {
        for h in pair.iter_mut().flatten() {
            if h.0 == from {
                h.0 = to.to_string();
            }
        }
    }
}

/// Deletes `w` from the envelope and undoes the logged moves by contraction.
pub fn undo_envelope(env: &GentleEnvelope) -> Result<Chart, EnvelopeError> {
    let mut d = Draft::from_chart(&env.envelope);
    d.delete_cascade(&env.w)?;
    for (i, mv) in env.log.iter().enumerate().rev() {
        match mv {
            Move::DegreeReduce { delta_edge, .. } => d.contract(delta_edge)?,
            Move::Steepen { edge, delta_edges, .. } => {
                d.contract(&delta_edges[0])?;
                rename_edge(&mut d, &delta_edges[1], edge);
            }
            Move::FillStep { .. } => {}
            Move::BandCorrect { replaced_edge, new_edges, .. } => {
                d.contract(&new_edges[1])?;
                d.contract(&new_edges[2])?;
                rename_edge(&mut d, &new_edges[0], replaced_edge);
            }
            Move::Contract { .. } => return Err(EnvelopeError::NotInvertible(i)),
        }
    }
    Ok(d.build()?)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RoundTripReport {
    pub gentle: bool,
    pub isomorphic: bool,
    pub face_matches: bool,
    pub trails_correspond: bool,
    pub failures: Vec<String>,
}

impl RoundTripReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the envelope against its input: gentleness, recovery by
/// deletion and contraction, the face of the envelope polyhedron cut out by
/// `W`, and the correspondence of elementary trails.
pub fn verify_envelope_roundtrip(chart: &Chart, env: &GentleEnvelope) -> RoundTripReport {
    let mut r = RoundTripReport::default();
    let big = &env.envelope;

    r.gentle = classify_chart(big).gentle;
    if !r.gentle {
        r.failures.push("envelope is not gentle".into());
    }

    match undo_envelope(env) {
        Ok(back) if charts_isomorphic(&back, chart).is_some() => r.isomorphic = true,
        Ok(_) => r.failures.push("isomorphism: recovered chart differs from the input".into()),
        Err(e) => r.failures.push(format!("isomorphism: undo failed: {e}")),
    }

    let coords: Option<Vec<usize>> = chart
        .edge_ids()
        .iter()
        .map(|e| env.embedding.get(e).and_then(|t| big.edge_index(t)))
        .collect();
    let zero: Option<BTreeSet<usize>> = env.w.iter().map(|e| big.edge_index(e)).collect();
    let (Some(coords), Some(zero)) = (coords, zero) else {
        r.failures.push("embedding or W names an edge missing from the envelope".into());
        return r;
    };

    let face = oracle_face_presentation(big, &zero, OracleMode::Unit);
    match (face, oracle_presentation(chart, OracleMode::Unit)) {
        (Ok(face), Ok(own)) if face.project(&coords) == own => r.face_matches = true,
        (Ok(_), Ok(_)) => r.failures.push("face: projected face differs from the oracle presentation".into()),
        (Err(e), _) | (_, Err(e)) => r.failures.push(format!("face: {e}")),
    }

    let mut ours: Vec<(TrailKind, Vec<i64>)> =
        elementary_trails(chart).iter().map(|t| (t.kind, t.indicator(chart.num_edges()))).collect();
    let mut theirs: Vec<(TrailKind, Vec<i64>)> = elementary_trails(big)
        .iter()
        .map(|t| (t.kind, t.indicator(big.num_edges())))
        .filter(|(_, ind)| zero.iter().all(|&e| ind[e] == 0))
        .map(|(k, ind)| (k, coords.iter().map(|&i| ind[i]).collect()))
        .collect();
    ours.sort();
    theirs.sort();
    if ours == theirs {
        r.trails_correspond = true;
    } else {
        r.failures.push(format!("trails: {} elementary trails versus {} avoiding W", ours.len(), theirs.len()));
    }
    r
}
