//! Seeded random framed charts for sweeps and property tests.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::{validate_chart, Chart, ChartDesc, EdgeDesc, VertexDesc, VertexKind};

#[derive(Clone, Copy, Debug)]
pub struct GenParams {
    pub max_internal: usize,
    pub max_edges: usize,
    /// Percent chance that a new edge end goes to a fresh fringe vertex.
    pub fringe_percent: u32,
    pub allow_loops: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { max_internal: 5, max_edges: 10, fringe_percent: 35, allow_loops: true }
    }
}

/// A random valid framed chart. Every internal vertex gets degree at least
/// two and at least one fringe edge is present, so unit flows can exist.
pub fn random_chart(seed: u64, params: GenParams) -> Chart {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_edges = params.max_edges.max(2);
    let k = rng.gen_range(1..=params.max_internal.clamp(1, max_edges - 1));
    let m = rng.gen_range(k + 1..=max_edges);

    // The first edge is a fringe edge; afterwards, whenever the remaining
    // budget is tight, both ends go to vertices still short of degree two.
    let mut ends: Vec<(usize, Option<usize>)> = vec![(0, None)];
    let mut degree = vec![0usize; k];
    degree[0] = 1;
    while ends.len() < m {
        let left = m - ends.len();
        let short = |degree: &[usize]| (0..k).filter(|&v| degree[v] < 2).collect::<Vec<_>>();
        let deficit: usize = degree.iter().map(|&d| 2usize.saturating_sub(d)).sum();
        let must = deficit.saturating_sub(2 * (left - 1));
        let lacking = short(&degree);
        let a = if must >= 1 { *lacking.choose(&mut rng).expect("deficit") } else { rng.gen_range(0..k) };
        degree[a] += 1;
        let b = if must >= 2 {
            let lacking = short(&degree);
            Some(*lacking.choose(&mut rng).unwrap_or(&a))
        } else if rng.gen_range(0..100) < params.fringe_percent {
            None
        } else {
            let b = rng.gen_range(0..k);
            (b != a || params.allow_loops).then_some(b)
        };
        if let Some(b) = b {
            degree[b] += 1;
        }
        ends.push((a, b));
    }

    let vid = |v: usize| format!("v{v}");
    let mut vertices: Vec<VertexDesc> =
        (0..k).map(|v| VertexDesc { id: vid(v), kind: VertexKind::Internal }).collect();
    let mut edges = Vec::new();
    let mut incident: Vec<Vec<(String, usize)>> = vec![Vec::new(); k];
    for (i, (a, b)) in ends.iter().enumerate() {
        let id = format!("e{i:02}");
        let far = match b {
            Some(b) => vid(*b),
            None => {
                let f = format!("x{i:02}");
                vertices.push(VertexDesc { id: f.clone(), kind: VertexKind::Fringe });
                f
            }
        };
        // Random storage direction, so both end indices occur at fringe vertices.
        let pair = if rng.gen_bool(0.5) { [vid(*a), far] } else { [far, vid(*a)] };
        for (end, w) in pair.iter().enumerate() {
            if let Some(v) = w.strip_prefix('v') {
                incident[v.parse::<usize>().expect("own id")].push((id.clone(), end));
            }
        }
        edges.push(EdgeDesc { id, ends: pair });
    }
    let mut classes = BTreeMap::new();
    for (v, mut hs) in incident.into_iter().enumerate() {
        hs.shuffle(&mut rng);
        let cut = rng.gen_range(1..hs.len());
        let second = hs.split_off(cut);
        classes.insert(vid(v), vec![hs, second]);
    }
    let desc = ChartDesc { name: format!("random-{seed}"), vertices, edges, classes };
    validate_chart(&desc).expect("generator emits valid charts")
}

/// The same chart with every class order shuffled.
pub fn reframe(chart: &Chart, seed: u64) -> Chart {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut desc = chart.to_desc();
    for lists in desc.classes.values_mut() {
        for l in lists.iter_mut() {
            l.shuffle(&mut rng);
        }
    }
    validate_chart(&desc).expect("reordering keeps validity")
}
