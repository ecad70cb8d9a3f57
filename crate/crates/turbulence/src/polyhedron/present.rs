use super::Presentation;
use crate::chart::Chart;
use crate::compat::self_compatible;
use crate::linalg::{self, q, Q};
use crate::trails::{elementary_trails, Trail};

/// Vertices from elementary routes, rays from self-compatible elementary bands.
pub fn trail_presentation(chart: &Chart) -> Presentation {
    let n = chart.num_edges();
    let mut p = Presentation::default();
    for t in elementary_trails(chart) {
        let ind: Vec<Q> = t.indicator(n).into_iter().map(q).collect();
        if t.is_route() {
            p.vertices.insert(ind);
        } else if self_compatible(chart, &t) {
            p.rays.insert(linalg::primitive(&ind).into_iter().map(Q::from_integer).collect());
        }
    }
    p
}

/// Elementary routes that fail to be self-compatible. Expected to be empty.
pub fn non_self_compatible_elementary_routes(chart: &Chart) -> Vec<Trail> {
    elementary_trails(chart).into_iter().filter(|t| t.is_route() && !self_compatible(chart, t)).collect()
}
