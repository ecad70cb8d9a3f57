use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{Chart, OEdge};
use crate::trails::{canonicalize_trail, Trail};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: String,
    pub location: String,
    pub warning: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub full: bool,
    pub sub_full: bool,
    pub directable: bool,
    /// Edge id to `[tail, head]` vertex ids, when directable.
    pub orientation: Option<BTreeMap<String, [String; 2]>>,
    pub acyclic: bool,
    pub band_word: Option<Vec<String>>,
    #[serde(skip)]
    pub witness_band: Option<Trail>,
    pub locally_gentle: bool,
    pub gentle: bool,
    pub steep_edges: BTreeSet<String>,
    pub violations: Vec<Violation>,
}

pub fn classify_chart(chart: &Chart) -> ClassificationReport {
    let mut violations = Vec::new();
    let mut push = |rule: &str, location: String, warning: bool| {
        violations.push(Violation { rule: rule.to_string(), location, warning })
    };

    let mut full = true;
    let mut sub_full = true;
    for v in chart.internal_vertices() {
        for (c, list) in chart.classes(v).expect("internal").iter().enumerate() {
            if list.len() != 2 {
                full = false;
                push("full", format!("{} class {c} has {} members", chart.vertex_id(v), list.len()), false);
            }
            if list.len() > 2 {
                sub_full = false;
                push("sub-full", format!("{} class {c}", chart.vertex_id(v)), false);
            }
        }
    }

    for e in 0..chart.num_edges() {
        if chart.is_loop(e) {
            let [a, b] = [0, 1].map(|end| chart.class_of(super::HalfEdge { edge: e, end }));
            if a == b {
                push("same-class-loop", chart.edge_id(e).to_string(), true);
            }
        }
    }

    let orientation = direct(chart);
    if orientation.is_none() {
        push("directable", "parity constraints are inconsistent".into(), false);
    }

    let everything = |_: OEdge| true;
    let cycle = find_transition_cycle(chart, &everything);
    let witness_band = cycle.map(|w| canonicalize_trail(chart, &w).expect("transition cycles are bands"));
    if let Some(b) = &witness_band {
        push("acyclic", chart.word_label(&b.word), false);
    }

    let mut steep_edges = BTreeSet::new();
    let mut all_steep = true;
    let mut no_fringe_pair = true;
    for e in 0..chart.num_edges() {
        if chart.is_steep(e) {
            steep_edges.insert(chart.edge_id(e).to_string());
        } else {
            all_steep = false;
            push("steep", chart.edge_id(e).to_string(), false);
        }
        if chart.fringe_ends(e) == 2 {
            no_fringe_pair = false;
            push("fringe-to-fringe", chart.edge_id(e).to_string(), false);
        }
    }
    let locally_gentle = full && no_fringe_pair && all_steep;

    // A band of descending edges inverts to one of ascending edges.
    let ascending = |o: OEdge| chart.is_ascending(o);
    let monotone = find_transition_cycle(chart, &ascending);
    if let Some(w) = &monotone {
        push("monotone-band", chart.word_label(w), false);
    }
    let gentle = locally_gentle && monotone.is_none();

    ClassificationReport {
        full,
        sub_full,
        directable: orientation.is_some(),
        orientation,
        acyclic: witness_band.is_none(),
        band_word: witness_band.as_ref().map(|b| b.word.iter().map(|&o| chart.oedge_label(o)).collect()),
        witness_band,
        locally_gentle,
        gentle,
        steep_edges,
        violations,
    }
}

/// Union-find with parity: `x[v]` picks which class of `v` holds heads.
fn direct(chart: &Chart) -> Option<BTreeMap<String, [String; 2]>> {
    let n = chart.num_vertices();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut parity = vec![0u8; n];

    fn find(parent: &mut [usize], parity: &mut [u8], v: usize) -> (usize, u8) {
        let mut path = Vec::new();
        let mut r = v;
        while parent[r] != r {
            path.push(r);
            r = parent[r];
        }
        // Compress, accumulating parity from the root down.
        let mut acc = 0u8;
        for &u in path.iter().rev() {
            acc ^= parity[u];
            parity[u] = acc;
            parent[u] = r;
        }
        (r, if v == r { 0 } else { parity[v] })
    }

    for e in 0..chart.num_edges() {
        let h0 = super::HalfEdge { edge: e, end: 0 };
        let h1 = h0.partner();
        let (Some(c0), Some(c1)) = (chart.class_of(h0), chart.class_of(h1)) else { continue };
        let [u, w] = chart.ends(e);
        let want = (c0 ^ c1 ^ 1) as u8;
        if u == w {
            if want != 0 {
                return None;
            }
            continue;
        }
        let (ru, pu) = find(&mut parent, &mut parity, u);
        let (rw, pw) = find(&mut parent, &mut parity, w);
        if ru == rw {
            if pu ^ pw != want {
                return None;
            }
        } else {
            parent[ru] = rw;
            parity[ru] = pu ^ pw ^ want;
        }
    }

    let x: Vec<usize> = (0..n).map(|v| find(&mut parent, &mut parity, v).1 as usize).collect();
    let mut out = BTreeMap::new();
    for e in 0..chart.num_edges() {
        let [a, b] = chart.ends(e);
        let head_end = (0..2)
            .find(|&end| {
                let h = super::HalfEdge { edge: e, end };
                chart.class_of(h).map(|c| c == x[chart.vertex_of(h)]).unwrap_or(false)
            })
            .or_else(|| {
                // Fringe edge: its internal end decides; a fringe pair is free.
                (0..2).find(|&end| {
                    let other = super::HalfEdge { edge: e, end: 1 - end };
                    chart.class_of(other).map(|c| c != x[chart.vertex_of(other)]).unwrap_or(false)
                })
            })
            .unwrap_or(1);
        let (t, h) = if head_end == 1 { (a, b) } else { (b, a) };
        out.insert(chart.edge_id(e).to_string(), [chart.vertex_id(t).to_string(), chart.vertex_id(h).to_string()]);
    }
    Some(out)
}

/// A directed cycle in the transition digraph restricted to oriented edges
/// satisfying `allowed`, returned as the word it traverses.
pub(crate) fn find_transition_cycle(chart: &Chart, allowed: &dyn Fn(OEdge) -> bool) -> Option<Vec<OEdge>> {
    let node = |o: OEdge| 2 * o.edge + o.backward as usize;
    let oedge = |i: usize| OEdge { edge: i / 2, backward: i % 2 == 1 };
    let n = 2 * chart.num_edges();
    let mut color = vec![0u8; n];
    for start in 0..n {
        if color[start] != 0 || !allowed(oedge(start)) {
            continue;
        }
        let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        let succ_of = |i: usize| -> Vec<usize> {
            chart.successors(oedge(i)).into_iter().filter(|&o| allowed(o)).map(node).collect()
        };
        color[start] = 1;
        stack.push((start, succ_of(start), 0));
        while let Some(top) = stack.last_mut() {
            if top.2 < top.1.len() {
                let next = top.1[top.2];
                top.2 += 1;
                match color[next] {
                    0 => {
                        color[next] = 1;
                        let s = succ_of(next);
                        stack.push((next, s, 0));
                    }
                    1 => {
                        let pos = stack.iter().position(|f| f.0 == next).expect("on stack");
                        return Some(stack[pos..].iter().map(|f| oedge(f.0)).collect());
                    }
                    _ => {}
                }
            } else {
                color[top.0] = 2;
                stack.pop();
            }
        }
    }
    None
}
