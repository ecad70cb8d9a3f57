//! The incompatibility relation induced by a framing, cliques and bundles.

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::chart::{classify_chart, Chart, HalfEdge, OEdge};
use crate::linalg::{self, Q};
use crate::trails::{capped_trails, inverse, Trail, TrailKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompatError {
    #[error("the chart has a band")]
    NotAcyclic,
}

/// Two trails run together along `shared` (empty when lazy) and the lower
/// one leaves below the upper one at both ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncompatibilityWitness {
    pub shared: Vec<OEdge>,
    /// For a lazy overlap: the vertex and the class the two trails leave through.
    pub lazy_at: Option<(usize, usize)>,
    pub lower_enter: OEdge,
    pub upper_enter: OEdge,
    pub lower_exit: OEdge,
    pub upper_exit: OEdge,
    /// True when `p` is the lower trail.
    pub p_is_lower: bool,
    pub p_pos: usize,
    pub q_pos: usize,
    /// Whether the overlap uses `q` read backwards.
    pub q_reversed: bool,
}

fn view(t: &Trail, reps: usize) -> Vec<OEdge> {
    match t.kind {
        TrailKind::Route => t.word.clone(),
        TrailKind::Band => t.word.iter().copied().cycle().take(t.word.len() * reps).collect(),
    }
}

fn position(chart: &Chart, h: HalfEdge) -> usize {
    chart.slot(h).expect("internal half-edge").1
}

/// The first incompatibility between `p` and `q`, scanning positions of `p`
/// and then of `q` (forwards before backwards).
pub fn find_incompatibility(chart: &Chart, p: &Trail, q: &Trail) -> Option<IncompatibilityWitness> {
    let (m, n) = (p.word.len(), q.word.len());
    let reps = (m + n).div_ceil(m.min(n)) + 2;
    let pv = view(p, reps);
    let qviews = [view(q, reps), {
        let mut w = q.word.clone();
        w = inverse(&w);
        view(&Trail { kind: q.kind, word: w }, reps)
    }];
    let p_starts = if p.kind == TrailKind::Band { m } else { m.saturating_sub(1) };
    let q_starts = if q.kind == TrailKind::Band { n } else { n.saturating_sub(1) };
    // Any overlap this long between periodic words never ends.
    let endless = m + n;

    for i in 1..=p_starts {
        for (rev, qv) in qviews.iter().enumerate() {
            for j in 1..=q_starts {
                let (a, b) = (pv[i - 1], qv[j - 1]);
                if a == b || chart.head_vertex(a) != chart.head_vertex(b) {
                    continue;
                }
                let mut len = 0;
                while i + len < pv.len() && j + len < qv.len() && pv[i + len] == qv[j + len] && len < endless {
                    len += 1;
                }
                if len >= endless || i + len >= pv.len() || j + len >= qv.len() {
                    continue;
                }
                let (c, d) = (pv[i + len], qv[j + len]);
                let (ha, hb) = (a.head(), b.head());
                let (tc, td) = (c.tail(), d.tail());
                if chart.class_of(ha) != chart.class_of(hb) || chart.class_of(tc) != chart.class_of(td) {
                    continue;
                }
                let enter = position(chart, ha).cmp(&position(chart, hb));
                let exit = position(chart, tc).cmp(&position(chart, td));
                if enter != exit || enter == Ordering::Equal {
                    continue;
                }
                let p_is_lower = enter == Ordering::Less;
                let (lower_enter, upper_enter, lower_exit, upper_exit) =
                    if p_is_lower { (a, b, c, d) } else { (b, a, d, c) };
                let lazy_at = (len == 0).then(|| (chart.vertex_of(tc), chart.class_of(tc).expect("internal")));
                return Some(IncompatibilityWitness {
                    shared: pv[i..i + len].to_vec(),
                    lazy_at,
                    lower_enter,
                    upper_enter,
                    lower_exit,
                    upper_exit,
                    p_is_lower,
                    p_pos: i,
                    q_pos: j,
                    q_reversed: rev == 1,
                });
            }
        }
    }
    None
}

pub fn compatible(chart: &Chart, p: &Trail, q: &Trail) -> bool {
    find_incompatibility(chart, p, q).is_none()
}

pub fn self_compatible(chart: &Chart, p: &Trail) -> bool {
    compatible(chart, p, p)
}

/// Pairwise-compatible trails. A clique is a bundle without bands.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bundle {
    pub routes: Vec<Trail>,
    pub bands: Vec<Trail>,
    pub maximal: bool,
    pub cap: Option<usize>,
}

impl Bundle {
    pub fn trails(&self) -> impl Iterator<Item = &Trail> {
        self.routes.iter().chain(self.bands.iter())
    }

    pub fn is_clique(&self) -> bool {
        self.bands.is_empty()
    }

    pub fn contains(&self, t: &Trail) -> bool {
        self.trails().any(|x| x == t)
    }
}

/// Maximal cliques of an undirected graph given by adjacency lists, each
/// sorted, in sorted order. Bron–Kerbosch with pivoting, outer loop in
/// degeneracy order.
pub fn maximal_cliques_of(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    // The diagonal carries self-compatibility, not adjacency.
    let adj: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i != j && adj[i][j]).collect()).collect();
    let adj = &adj[..];
    let mut out = Vec::new();

    fn bk(adj: &[Vec<bool>], r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() {
            if x.is_empty() {
                let mut c = r.clone();
                c.sort_unstable();
                out.push(c);
            }
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .copied()
            .max_by_key(|&u| (p.iter().filter(|&&w| adj[u][w]).count(), std::cmp::Reverse(u)))
            .expect("non-empty");
        let mut p = p;
        let mut x = x;
        let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
        for v in candidates {
            let np = p.iter().copied().filter(|&w| adj[v][w]).collect();
            let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
            r.push(v);
            bk(adj, r, np, nx, out);
            r.pop();
            p.retain(|&w| w != v);
            x.push(v);
        }
    }

    // Degeneracy order: repeatedly remove a vertex of least remaining degree.
    let mut removed = vec![false; n];
    let mut deg: Vec<usize> = (0..n).map(|v| (0..n).filter(|&w| w != v && adj[v][w]).count()).collect();
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n).filter(|&v| !removed[v]).min_by_key(|&v| (deg[v], v)).expect("remaining");
        removed[v] = true;
        order.push(v);
        for w in 0..n {
            if !removed[w] && w != v && adj[v][w] {
                deg[w] -= 1;
            }
        }
    }
    let rank: Vec<usize> = {
        let mut r = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            r[v] = i;
        }
        r
    };
    for &v in &order {
        let p = (0..n).filter(|&w| w != v && adj[v][w] && rank[w] > rank[v]).collect();
        let x = (0..n).filter(|&w| w != v && adj[v][w] && rank[w] < rank[v]).collect();
        bk(adj, &mut vec![v], p, x, &mut out);
    }
    out.sort();
    out
}

pub(crate) fn compatibility_matrix(chart: &Chart, trails: &[Trail]) -> Vec<Vec<bool>> {
    use rayon::prelude::*;
    let n = trails.len();
    let rows: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| j <= i && compatible(chart, &trails[i], &trails[j])).collect())
        .collect();
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..=i {
            adj[i][j] = rows[i][j];
            adj[j][i] = rows[i][j];
        }
    }
    adj
}

fn bundles_from(chart: &Chart, trails: Vec<Trail>, cap: Option<usize>) -> Vec<Bundle> {
    let adj = compatibility_matrix(chart, &trails);
    let keep: Vec<usize> = (0..trails.len()).filter(|&i| adj[i][i]).collect();
    let sub: Vec<Vec<bool>> = keep.iter().map(|&i| keep.iter().map(|&j| adj[i][j]).collect()).collect();
    let mut out: Vec<Bundle> = maximal_cliques_of(&sub)
        .into_iter()
        .map(|c| {
            let (routes, bands) = c.iter().map(|&k| trails[keep[k]].clone()).partition(|t: &Trail| t.is_route());
            Bundle { routes, bands, maximal: true, cap }
        })
        .collect();
    out.sort();
    out
}

/// Every maximal clique of an acyclic chart.
pub fn enumerate_maximal_cliques(chart: &Chart) -> Result<Vec<Bundle>, CompatError> {
    if !classify_chart(chart).acyclic {
        return Err(CompatError::NotAcyclic);
    }
    // Without bands an oriented edge occurs at most once per route.
    let routes = capped_trails(chart, 2);
    Ok(bundles_from(chart, routes, None))
}

/// Maximal bundles among the trails using each edge at most `cap` times.
pub fn enumerate_maximal_bundles_capped(chart: &Chart, cap: usize) -> Vec<Bundle> {
    bundles_from(chart, capped_trails(chart, cap), Some(cap))
}

#[derive(Clone, Debug, Serialize)]
pub struct AmplenessReport {
    pub valid_edges: Vec<String>,
    pub exceptional_trails: Vec<Vec<String>>,
    pub amply_framed: bool,
    pub reduced_space_complete: bool,
    /// False when bands exist, so the verdicts only cover trails within the cap.
    pub exact: bool,
    pub cap: usize,
}

pub fn ampleness_report(chart: &Chart, cap: usize) -> AmplenessReport {
    let trails = capped_trails(chart, cap);
    let adj = compatibility_matrix(chart, &trails);
    let exceptional: Vec<&Trail> =
        (0..trails.len()).filter(|&i| adj[i].iter().all(|&c| c)).map(|i| &trails[i]).collect();

    let e = chart.num_edges();
    let rows = crate::polyhedron::conservation_rows(chart);
    let basis = linalg::nullspace(&linalg::to_q(&rows), e);
    let valid: Vec<usize> = (0..e).filter(|&k| basis.iter().any(|b| b[k] != Q::from_integer(0.into()))).collect();

    let covered: Vec<bool> = (0..e).map(|k| exceptional.iter().any(|t| t.word.iter().any(|o| o.edge == k))).collect();
    let amply_framed = valid.iter().all(|&k| covered[k]);

    let gens: Vec<Vec<i64>> = exceptional.iter().map(|t| t.indicator(e)).collect();
    let reduced_space_complete = basis.iter().all(|b| {
        [false, true].iter().all(|&neg| {
            let target: Vec<Q> = b.iter().map(|x| if neg { -x.clone() } else { x.clone() }).collect();
            nonnegative_modulo(&target, &gens)
        })
    });

    AmplenessReport {
        valid_edges: valid.iter().map(|&k| chart.edge_id(k).to_string()).collect(),
        exceptional_trails: exceptional.iter().map(|t| t.word.iter().map(|&o| chart.oedge_label(o)).collect()).collect(),
        amply_framed,
        reduced_space_complete,
        exact: classify_chart(chart).acyclic,
        cap,
    }
}

/// Whether `target - Σ y_i gens[i] >= 0` for some real `y`.
fn nonnegative_modulo(target: &[Q], gens: &[Vec<i64>]) -> bool {
    // Variables: y⁺ (k), y⁻ (k), slack (e). Rows: Σ (y⁺-y⁻) g + s = target.
    let e = target.len();
    let k = gens.len();
    let mut a = vec![vec![Q::from_integer(0.into()); 2 * k + e]; e];
    for row in 0..e {
        for (i, g) in gens.iter().enumerate() {
            a[row][i] = Q::from_integer(g[row].into());
            a[row][k + i] = Q::from_integer((-g[row]).into());
        }
        a[row][2 * k + row] = Q::from_integer(1.into());
    }
    linalg::feasible(&a, target)
}
