//! Routes and bands: strings between fringe vertices and closed strings.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::chart::{Chart, OEdge};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrailKind {
    Route,
    Band,
}

/// A trail in canonical form. Routes are the lesser of the word and its
/// inverse; bands are primitive and the least rotation of either direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trail {
    pub kind: TrailKind,
    pub word: Vec<OEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrailError {
    #[error("empty word")]
    Empty,
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("step {0} does not continue the string")]
    NotAString(usize),
    #[error("the word neither joins two fringe vertices nor closes up")]
    NotClosed,
    #[error("band is a proper power")]
    Imprimitive,
}

pub fn inverse(word: &[OEdge]) -> Vec<OEdge> {
    word.iter().rev().map(|o| o.inv()).collect()
}

pub fn is_string(chart: &Chart, word: &[OEdge]) -> bool {
    word.windows(2).all(|w| chart.can_follow(w[0], w[1]))
}

fn first_break(chart: &Chart, word: &[OEdge]) -> Option<usize> {
    word.windows(2).position(|w| !chart.can_follow(w[0], w[1])).map(|i| i + 1)
}

fn primitive(word: &[OEdge]) -> bool {
    let m = word.len();
    (1..m).filter(|p| m % p == 0).all(|p| (p..m).any(|i| word[i] != word[i - p]))
}

fn least_rotation(word: &[OEdge]) -> Vec<OEdge> {
    (0..word.len())
        .map(|r| word[r..].iter().chain(&word[..r]).copied().collect::<Vec<_>>())
        .min()
        .expect("non-empty")
}

pub fn canonical_route(word: &[OEdge]) -> Vec<OEdge> {
    let inv = inverse(word);
    if inv.as_slice() < word {
        inv
    } else {
        word.to_vec()
    }
}

pub fn canonical_band(word: &[OEdge]) -> Vec<OEdge> {
    least_rotation(word).min(least_rotation(&inverse(word)))
}

/// Validates a word and brings it into canonical form.
pub fn canonicalize_trail(chart: &Chart, word: &[OEdge]) -> Result<Trail, TrailError> {
    let (Some(&first), Some(&last)) = (word.first(), word.last()) else { return Err(TrailError::Empty) };
    if let Some(i) = first_break(chart, word) {
        return Err(TrailError::NotAString(i));
    }
    if chart.is_fringe(chart.tail_vertex(first)) && chart.is_fringe(chart.head_vertex(last)) {
        return Ok(Trail { kind: TrailKind::Route, word: canonical_route(word) });
    }
    if !chart.can_follow(last, first) {
        return Err(TrailError::NotClosed);
    }
    if !primitive(word) {
        return Err(TrailError::Imprimitive);
    }
    Ok(Trail { kind: TrailKind::Band, word: canonical_band(word) })
}

pub fn parse_word(chart: &Chart, tokens: &[String]) -> Result<Vec<OEdge>, TrailError> {
    tokens
        .iter()
        .map(|t| {
            let (id, backward) = match t.strip_suffix("^-1") {
                Some(base) => (base, true),
                None => (t.as_str(), false),
            };
            chart
                .edge_index(id)
                .map(|edge| OEdge { edge, backward })
                .ok_or_else(|| TrailError::UnknownEdge(id.to_string()))
        })
        .collect()
}

impl Trail {
    pub fn is_route(&self) -> bool {
        self.kind == TrailKind::Route
    }

    pub fn label(&self, chart: &Chart) -> String {
        chart.word_label(&self.word)
    }

    /// Number of traversals of each edge.
    pub fn indicator(&self, num_edges: usize) -> Vec<i64> {
        let mut x = vec![0i64; num_edges];
        for o in &self.word {
            x[o.edge] += 1;
        }
        x
    }

    /// Vertices entered by the word: every tail, plus the final head of a route.
    pub fn vertex_sequence(&self, chart: &Chart) -> Vec<usize> {
        let mut vs: Vec<usize> = self.word.iter().map(|&o| chart.tail_vertex(o)).collect();
        if self.is_route() {
            vs.push(chart.head_vertex(*self.word.last().expect("non-empty")));
        }
        vs
    }
}

fn counts(chart: &Chart, vs: &[usize]) -> Vec<usize> {
    let mut c = vec![0usize; chart.num_vertices()];
    for &v in vs {
        c[v] += 1;
    }
    c
}

/// Whether a route is elementary: simple, or a lollipop `s σ s⁻¹` whose stick
/// vertices are visited exactly twice and all others once.
pub fn route_is_elementary(chart: &Chart, word: &[OEdge]) -> bool {
    let t = Trail { kind: TrailKind::Route, word: word.to_vec() };
    let vs = t.vertex_sequence(chart);
    let c = counts(chart, &vs);
    if c.iter().all(|&k| k <= 1) {
        return true;
    }
    let inv = inverse(word);
    let m = word.len();
    let mut k = 0;
    while k < m && word[k] == inv[k] {
        k += 1;
    }
    if k == 0 || 2 * k >= m {
        return false;
    }
    let stick: BTreeSet<usize> = vs[..=k].iter().copied().collect();
    (0..chart.num_vertices()).all(|v| match c[v] {
        0 => true,
        1 => !stick.contains(&v),
        2 => stick.contains(&v),
        _ => false,
    }) && stick.len() == k + 1
}

/// Whether a band is elementary: a simple cycle, or a rotation of
/// `s σ₁ s⁻¹ σ₂` (with `s` possibly empty) whose `s` vertices occur twice and
/// all others once.
pub fn band_is_elementary(chart: &Chart, word: &[OEdge]) -> bool {
    let t = Trail { kind: TrailKind::Band, word: word.to_vec() };
    let vs = t.vertex_sequence(chart);
    let c = counts(chart, &vs);
    if c.iter().all(|&k| k <= 1) {
        return true;
    }
    let m = word.len();
    for r in 0..m {
        let w: Vec<OEdge> = word[r..].iter().chain(&word[..r]).copied().collect();
        let tv: Vec<usize> = w.iter().map(|&o| chart.tail_vertex(o)).collect();
        for k in 0..m {
            for a in 1..m {
                // Layout: s (k) σ₁ (a) s⁻¹ (k) σ₂ (rest ≥ 1).
                if 2 * k + a >= m {
                    break;
                }
                let s = &w[..k];
                if w[k + a..2 * k + a] != inverse(s)[..] {
                    continue;
                }
                // A lazy stick joins two loops at one vertex; each loop must
                // leave and return through the same class there, or the band
                // is merely two bands spliced together.
                if k == 0 && (tv[a] != tv[0] || chart.can_follow(w[a - 1], w[0])) {
                    continue;
                }
                let mut stick: BTreeSet<usize> = tv[..k].iter().copied().collect();
                stick.insert(if k == 0 { tv[0] } else { chart.head_vertex(w[k - 1]) });
                stick.insert(tv[0]);
                if stick.len() != k + 1 {
                    continue;
                }
                let ok = (0..chart.num_vertices()).all(|v| match c[v] {
                    0 => true,
                    1 => !stick.contains(&v),
                    2 => stick.contains(&v),
                    _ => false,
                });
                if ok {
                    return true;
                }
            }
        }
    }
    false
}

pub fn is_elementary(chart: &Chart, trail: &Trail) -> bool {
    match trail.kind {
        TrailKind::Route => route_is_elementary(chart, &trail.word),
        TrailKind::Band => band_is_elementary(chart, &trail.word),
    }
}

struct Walker<'a> {
    chart: &'a Chart,
    word: Vec<OEdge>,
    /// `verts[i]` is the tail of `word[i]`; the last entry is the current head.
    verts: Vec<usize>,
    seen: Vec<bool>,
    out: BTreeSet<Trail>,
}

impl<'a> Walker<'a> {
    fn new(chart: &'a Chart) -> Self {
        Walker { chart, word: Vec::new(), verts: Vec::new(), seen: vec![false; chart.num_vertices()], out: BTreeSet::new() }
    }

    fn push(&mut self, o: OEdge) {
        let h = self.chart.head_vertex(o);
        self.word.push(o);
        self.verts.push(h);
        self.seen[h] = true;
    }

    fn pop(&mut self) {
        let h = self.verts.pop().expect("non-empty");
        self.word.pop();
        self.seen[h] = false;
    }

    fn emit(&mut self, word: Vec<OEdge>) {
        if let Ok(t) = canonicalize_trail(self.chart, &word) {
            self.out.insert(t);
        }
    }

    fn routes_from(&mut self) {
        let last = *self.word.last().expect("started");
        let v = self.chart.head_vertex(last);
        if self.chart.is_fringe(v) {
            let w = self.word.clone();
            self.emit(w);
            return;
        }
        for s in self.chart.successors(last) {
            let w = self.chart.head_vertex(s);
            if !self.seen[w] {
                self.push(s);
                self.routes_from();
                self.pop();
            } else if let Some(j) = self.verts.iter().position(|&x| x == w) {
                // First return: the only way out is back along the stick.
                if j == 0 || !self.chart.can_follow(s, self.word[j - 1].inv()) {
                    continue;
                }
                let mut full = self.word.clone();
                full.push(s);
                full.extend(inverse(&self.word[..j]));
                self.emit(full);
            }
        }
    }

    /// Closes a second loop at `verts[0]` using only unseen vertices.
    fn second_loop(&mut self, anchor: usize, first: OEdge) {
        let last = *self.word.last().expect("started");
        for s in self.chart.successors(last) {
            let w = self.chart.head_vertex(s);
            if w == anchor {
                if self.chart.can_follow(s, first) {
                    let mut full = self.word.clone();
                    full.push(s);
                    self.emit(full);
                }
            } else if !self.seen[w] {
                self.push(s);
                self.second_loop(anchor, first);
                self.pop();
            }
        }
    }

    fn bands_from(&mut self) {
        let last = *self.word.last().expect("started");
        let first = self.word[0];
        let anchor = self.verts[0];
        for s in self.chart.successors(last) {
            let w = self.chart.head_vertex(s);
            if !self.seen[w] {
                self.push(s);
                self.bands_from();
                self.pop();
                continue;
            }
            let Some(j) = self.verts.iter().position(|&x| x == w) else { continue };
            if j == 0 {
                if self.chart.can_follow(s, first) {
                    let mut full = self.word.clone();
                    full.push(s);
                    self.emit(full);
                }
                // Lazy stick: a second loop hangs off the anchor.
                if self.chart.can_follow(s, first) {
                    continue;
                }
                let saved = self.word.len();
                self.word.push(s);
                self.second_loop(anchor, first);
                self.word.truncate(saved);
            } else {
                let back = self.word[j - 1].inv();
                if !self.chart.can_follow(s, back) {
                    continue;
                }
                let saved = self.word.len();
                self.word.push(s);
                let stick = inverse(&self.word[..j]);
                self.word.extend(stick);
                self.second_loop(anchor, first);
                self.word.truncate(saved);
            }
        }
    }
}

/// All elementary routes and bands, canonical and sorted.
pub fn elementary_trails(chart: &Chart) -> Vec<Trail> {
    let mut walker = Walker::new(chart);
    for f in chart.fringe_vertices() {
        for o in chart.leaving(f) {
            walker.verts = vec![f];
            walker.seen[f] = true;
            walker.push(o);
            walker.routes_from();
            walker.pop();
            walker.seen[f] = false;
        }
    }
    for o in chart.all_oedges() {
        let t = chart.tail_vertex(o);
        if chart.is_fringe(t) || chart.is_fringe(chart.head_vertex(o)) {
            continue;
        }
        walker.verts = vec![t];
        walker.seen[t] = true;
        if chart.head_vertex(o) == t {
            // A loop closes immediately.
            walker.word.push(o);
            if chart.can_follow(o, o) {
                walker.emit(vec![o]);
            }
            walker.verts.push(t);
            walker.second_loop(t, o);
            walker.verts.pop();
            walker.word.pop();
        } else {
            walker.push(o);
            walker.bands_from();
            walker.pop();
        }
        walker.seen[t] = false;
    }
    let chart_ref = walker.chart;
    walker.out.into_iter().filter(|t| is_elementary(chart_ref, t)).collect()
}

/// All routes and bands using each edge at most `cap` times.
pub fn capped_trails(chart: &Chart, cap: usize) -> Vec<Trail> {
    let mut out = BTreeSet::new();
    let mut used = vec![0usize; chart.num_edges()];
    let mut word = Vec::new();

    fn grow(
        chart: &Chart,
        cap: usize,
        used: &mut Vec<usize>,
        word: &mut Vec<OEdge>,
        out: &mut BTreeSet<Trail>,
        route: bool,
    ) {
        let last = *word.last().expect("started");
        if route && chart.is_fringe(chart.head_vertex(last)) {
            out.insert(Trail { kind: TrailKind::Route, word: canonical_route(word) });
            return;
        }
        if !route && chart.can_follow(last, word[0]) && primitive(word) {
            out.insert(Trail { kind: TrailKind::Band, word: canonical_band(word) });
        }
        for s in chart.successors(last) {
            if used[s.edge] < cap {
                used[s.edge] += 1;
                word.push(s);
                grow(chart, cap, used, word, out, route);
                word.pop();
                used[s.edge] -= 1;
            }
        }
    }

    for o in chart.all_oedges() {
        let from_fringe = chart.is_fringe(chart.tail_vertex(o));
        if !from_fringe && chart.is_fringe(chart.head_vertex(o)) {
            continue;
        }
        used[o.edge] += 1;
        word.push(o);
        grow(chart, cap, &mut used, &mut word, &mut out, from_fringe);
        word.pop();
        used[o.edge] -= 1;
    }
    out.into_iter().collect()
}
