use std::collections::BTreeMap;

use super::{Chart, HalfEdge, OEdge};

/// A structure-preserving bijection between two charts. Class labels may be
/// swapped per vertex; the order inside each class is preserved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub vertices: Vec<usize>,
    /// Edge image and whether its ends are swapped.
    pub edges: Vec<(usize, bool)>,
}

impl Isomorphism {
    pub fn map_oedge(&self, o: OEdge) -> OEdge {
        let (e, flip) = self.edges[o.edge];
        OEdge { edge: e, backward: o.backward ^ flip }
    }

    pub fn map_word(&self, w: &[OEdge]) -> Vec<OEdge> {
        w.iter().map(|&o| self.map_oedge(o)).collect()
    }

    pub fn edge_names(&self, a: &Chart, b: &Chart) -> BTreeMap<String, (String, bool)> {
        self.edges
            .iter()
            .enumerate()
            .map(|(e, &(f, flip))| (a.edge_id(e).to_string(), (b.edge_id(f).to_string(), flip)))
            .collect()
    }
}

struct State {
    half: Vec<[Option<HalfEdge>; 2]>,
    half_used: Vec<[bool; 2]>,
    vert: Vec<Option<usize>>,
    vert_used: Vec<bool>,
}

impl State {
    fn new(a: &Chart, b: &Chart) -> State {
        State {
            half: vec![[None, None]; a.num_edges()],
            half_used: vec![[false, false]; b.num_edges()],
            vert: vec![None; a.num_vertices()],
            vert_used: vec![false; b.num_vertices()],
        }
    }
}

fn assign_half(s: &mut State, x: HalfEdge, y: HalfEdge, queue: &mut Vec<(HalfEdge, HalfEdge)>) -> bool {
    match s.half[x.edge][x.end] {
        Some(prev) => prev == y,
        None => {
            if s.half_used[y.edge][y.end] {
                return false;
            }
            s.half[x.edge][x.end] = Some(y);
            s.half_used[y.edge][y.end] = true;
            queue.push((x, y));
            true
        }
    }
}

fn propagate(a: &Chart, b: &Chart, s: &mut State, seed: (HalfEdge, HalfEdge)) -> bool {
    let mut queue = Vec::new();
    if !assign_half(s, seed.0, seed.1, &mut queue) {
        return false;
    }
    while let Some((x, y)) = queue.pop() {
        if !assign_half(s, x.partner(), y.partner(), &mut queue) {
            return false;
        }
        let (vx, vy) = (a.vertex_of(x), b.vertex_of(y));
        match s.vert[vx] {
            Some(prev) if prev != vy => return false,
            Some(_) => {}
            None => {
                if s.vert_used[vy] || a.kind(vx) != b.kind(vy) || a.degree(vx) != b.degree(vy) {
                    return false;
                }
                s.vert[vx] = Some(vy);
                s.vert_used[vy] = true;
            }
        }
        let (Some((cx, px)), Some((cy, py))) = (a.slot(x), b.slot(y)) else { continue };
        if px != py {
            return false;
        }
        let (ka, kb) = (a.classes(vx).expect("internal"), b.classes(vy).expect("internal"));
        for (la, lb) in [(&ka[cx], &kb[cy]), (&ka[1 - cx], &kb[1 - cy])] {
            if la.len() != lb.len() {
                return false;
            }
            for (&hx, &hy) in la.iter().zip(lb.iter()) {
                if !assign_half(s, hx, hy, &mut queue) {
                    return false;
                }
            }
        }
    }
    true
}

fn components(a: &Chart) -> Vec<usize> {
    let mut comp = vec![usize::MAX; a.num_edges()];
    let mut next = 0;
    for start in 0..a.num_edges() {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = next;
        while let Some(e) = stack.pop() {
            for v in a.ends(e) {
                for h in a.incident(v) {
                    if comp[h.edge] == usize::MAX {
                        comp[h.edge] = next;
                        stack.push(h.edge);
                    }
                }
            }
        }
        next += 1;
    }
    // Representative (least) edge per component.
    let mut seeds = vec![usize::MAX; next];
    for (e, &c) in comp.iter().enumerate() {
        seeds[c] = seeds[c].min(e);
    }
    seeds
}

/// Finds an isomorphism from `a` to `b`, if one exists.
pub fn charts_isomorphic(a: &Chart, b: &Chart) -> Option<Isomorphism> {
    if a.num_edges() != b.num_edges() || a.num_vertices() != b.num_vertices() {
        return None;
    }
    let mut state = State::new(a, b);
    for seed in components(a) {
        let x = HalfEdge { edge: seed, end: 0 };
        let mut found = false;
        for f in 0..b.num_edges() {
            for end in 0..2 {
                if state.half_used[f][end] {
                    continue;
                }
                let mut trial = State {
                    half: state.half.clone(),
                    half_used: state.half_used.clone(),
                    vert: state.vert.clone(),
                    vert_used: state.vert_used.clone(),
                };
                if propagate(a, b, &mut trial, (x, HalfEdge { edge: f, end })) {
                    state = trial;
                    found = true;
                    break;
                }
            }
            if found {
                break;
            }
        }
        if !found {
            return None;
        }
    }
    if state.vert.iter().any(Option::is_none) || state.half_used.iter().flatten().any(|u| !u) {
        return None;
    }
    let edges = state
        .half
        .iter()
        .map(|pair| {
            let y = pair[0].expect("mapped");
            (y.edge, y.end == 1)
        })
        .collect();
    Some(Isomorphism { vertices: state.vert.into_iter().map(|v| v.expect("mapped")).collect(), edges })
}
