use std::collections::{BTreeMap, BTreeSet};

use super::{validate_chart, Chart, ChartDesc, ChartError, EdgeDesc, VertexDesc, VertexKind};

/// Mutable, id-keyed working copy of a chart used by the surgery routines.
#[derive(Clone, Debug)]
pub(crate) struct Draft {
    pub name: String,
    pub kinds: BTreeMap<String, VertexKind>,
    pub edges: BTreeMap<String, [String; 2]>,
    pub classes: BTreeMap<String, [Vec<(String, usize)>; 2]>,
}

impl Draft {
    pub fn from_chart(chart: &Chart) -> Draft {
        let desc = chart.to_desc();
        Draft {
            name: desc.name,
            kinds: desc.vertices.into_iter().map(|v| (v.id, v.kind)).collect(),
            edges: desc.edges.into_iter().map(|e| (e.id, e.ends)).collect(),
            classes: desc
                .classes
                .into_iter()
                .map(|(v, mut l)| {
                    let b = l.pop().expect("two classes");
                    let a = l.pop().expect("two classes");
                    (v, [a, b])
                })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<Chart, ChartError> {
        let desc = ChartDesc {
            name: self.name.clone(),
            vertices: self.kinds.iter().map(|(id, &kind)| VertexDesc { id: id.clone(), kind }).collect(),
            edges: self.edges.iter().map(|(id, ends)| EdgeDesc { id: id.clone(), ends: ends.clone() }).collect(),
            classes: self.classes.iter().map(|(v, pair)| (v.clone(), pair.to_vec())).collect(),
        };
        validate_chart(&desc)
    }

    fn used(&self, id: &str) -> bool {
        self.kinds.contains_key(id) || self.edges.contains_key(id)
    }

    /// Smallest counter `k >= 1` for which every id produced by `make(k)` is unused.
    pub fn fresh<const N: usize>(&self, make: impl Fn(usize) -> [String; N]) -> [String; N] {
        (1..)
            .map(&make)
            .find(|ids| ids.iter().all(|id| !self.used(id)))
            .expect("unbounded counter")
    }

    /// `(vertex, class, position)` of a half-edge.
    pub fn locate(&self, edge: &str, end: usize) -> Option<(String, usize, usize)> {
        let v = &self.edges.get(edge)?[end];
        let pair = self.classes.get(v)?;
        for (c, list) in pair.iter().enumerate() {
            if let Some(p) = list.iter().position(|(e, k)| e == edge && *k == end) {
                return Some((v.clone(), c, p));
            }
        }
        None
    }

    fn degree(&self, v: &str) -> usize {
        self.edges.values().flat_map(|ends| ends.iter()).filter(|x| *x == v).count()
    }

    /// Removes the named edges and cascades: a vertex that loses a whole class
    /// takes its remaining edges with it. Returns every edge removed.
    pub fn delete_cascade(&mut self, ids: &BTreeSet<String>) -> Result<BTreeSet<String>, ChartError> {
        for id in ids {
            if !self.edges.contains_key(id) {
                return Err(ChartError::UnknownEdge(id.clone()));
            }
        }
        let mut removed = BTreeSet::new();
        let mut pending: BTreeSet<String> = ids.clone();
        while !pending.is_empty() {
            for id in &pending {
                self.edges.remove(id);
                removed.insert(id.clone());
            }
            for pair in self.classes.values_mut() {
                for list in pair.iter_mut() {
                    list.retain(|(e, _)| !pending.contains(e));
                }
            }
            pending.clear();
            let broken: Vec<String> = self
                .classes
                .iter()
                .filter(|(_, pair)| pair.iter().any(|l| l.is_empty()))
                .map(|(v, _)| v.clone())
                .collect();
            for v in broken {
                let pair = self.classes.remove(&v).expect("present");
                for (e, _) in pair.into_iter().flatten() {
                    pending.insert(e);
                }
            }
        }
        let orphans: Vec<String> = self.kinds.keys().filter(|v| self.degree(v) == 0).cloned().collect();
        for v in orphans {
            self.kinds.remove(&v);
            self.classes.remove(&v);
        }
        Ok(removed)
    }

    pub fn contract(&mut self, edge: &str) -> Result<(), ChartError> {
        let ends = self.edges.get(edge).ok_or_else(|| ChartError::UnknownEdge(edge.to_string()))?.clone();
        if ends[0] == ends[1] {
            return Err(ChartError::NotIdle(edge.to_string()));
        }
        let lonely = |end: usize| {
            self.locate(edge, end)
                .map(|(v, c, _)| self.classes[&v][c].len() == 1)
                .unwrap_or(false)
        };
        let end1 = if lonely(1) {
            1
        } else if lonely(0) {
            0
        } else {
            return Err(ChartError::NotIdle(edge.to_string()));
        };
        let (v1, c1, _) = self.locate(edge, end1).expect("located");
        let v2 = ends[1 - end1].clone();
        let other = self.classes[&v1][1 - c1].clone();

        if self.kinds[&v2] == VertexKind::Fringe {
            if other.len() != 1 {
                return Err(ChartError::FringeMerge(edge.to_string()));
            }
        } else {
            let (_, c2, p2) = self.locate(edge, 1 - end1).expect("internal end");
            let list = &mut self.classes.get_mut(&v2).expect("internal")[c2];
            list.splice(p2..=p2, other.iter().cloned());
        }

        self.edges.remove(edge);
        self.classes.remove(&v1);
        self.kinds.remove(&v1);
        for ends in self.edges.values_mut() {
            for x in ends.iter_mut() {
                if *x == v1 {
                    *x = v2.clone();
                }
            }
        }
        Ok(())
    }
}

/// Contracts an idle edge, one of whose half-edges is alone in its class at
/// an internal vertex. The merged vertex keeps the id of the far end.
pub fn contract_idle_edge(chart: &Chart, edge: &str) -> Result<Chart, ChartError> {
    let mut d = Draft::from_chart(chart);
    d.contract(edge)?;
    d.build()
}

/// Deletes edges. A vertex left with an empty class is removed together with
/// its remaining edges, and vertices left without edges disappear.
pub fn delete_edges(chart: &Chart, ids: &[&str]) -> Result<Chart, ChartError> {
    let mut d = Draft::from_chart(chart);
    d.delete_cascade(&ids.iter().map(|s| s.to_string()).collect())?;
    d.build()
}
