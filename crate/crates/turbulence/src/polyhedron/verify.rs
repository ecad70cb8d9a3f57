use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::decompose::decompose_in;
use super::lattice::bundle_directions;
use super::{
    integer_points, normalized_volume, oracle_presentation, reference_lattice, simplex_check, Flow,
    OracleMode, Presentation,
};
use crate::chart::{classify_chart, Chart};
use crate::compat::{
    enumerate_maximal_bundles_capped, enumerate_maximal_cliques, self_compatible, Bundle, CompatError,
};
use crate::linalg::{self, q, Lp, Q};
use crate::trails::capped_trails;

fn affine_dim(p: &Presentation) -> usize {
    let Some(v0) = p.vertices.iter().next() else { return 0 };
    let mut dirs: Vec<Vec<Q>> =
        p.vertices.iter().skip(1).map(|v| v.iter().zip(v0).map(|(a, b)| a - b).collect()).collect();
    dirs.extend(p.rays.iter().cloned());
    linalg::rank(&dirs)
}

/// Whether the simplihedra of two bundles meet exactly in the simplihedron of
/// their common trails: no point of the intersection puts weight on a trail
/// outside the common part.
pub fn strongly_intersect(chart: &Chart, a: &Bundle, b: &Bundle) -> bool {
    let n = chart.num_edges();
    let ta: Vec<_> = a.trails().collect();
    let tb: Vec<_> = b.trails().collect();
    let cols = ta.len() + tb.len();
    let mut rows: Vec<Vec<Q>> = vec![vec![Q::zero(); cols]; n + 2];
    let mut objective = vec![Q::zero(); cols];
    for (k, t) in ta.iter().enumerate() {
        for (e, m) in t.indicator(n).into_iter().enumerate() {
            rows[e][k] = q(m);
        }
        if t.is_route() {
            rows[n][k] = q(1);
        }
        if !b.contains(t) {
            objective[k] = q(1);
        }
    }
    for (k, t) in tb.iter().enumerate() {
        let col = ta.len() + k;
        for (e, m) in t.indicator(n).into_iter().enumerate() {
            rows[e][col] = q(-m);
        }
        if t.is_route() {
            rows[n + 1][col] = q(1);
        }
        if !a.contains(t) {
            objective[col] = q(1);
        }
    }
    let mut rhs = vec![Q::zero(); n];
    rhs.push(q(1));
    rhs.push(q(1));
    match linalg::lp_max(&rows, &rhs, &objective) {
        Lp::Optimal { value, .. } => value.is_zero(),
        Lp::Infeasible => true,
        Lp::Unbounded => false,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TriangulationReport {
    pub dim: usize,
    pub simplices: usize,
    pub all_full_dimensional: bool,
    pub all_unimodular: bool,
    pub volume_sum: String,
    pub oracle_volume: Option<String>,
    pub strong_intersection_failures: Vec<(usize, usize)>,
    pub integer_points: usize,
    pub unexplained_integer_points: Vec<Vec<i64>>,
    pub pass: bool,
}

fn bounding_box(p: &Presentation, n: usize, slack: i64) -> Vec<i64> {
    (0..n)
        .map(|e| {
            let v = p.vertices.iter().map(|v| v[e].ceil().to_integer()).max().unwrap_or_default();
            let r = p.rays.iter().map(|r| r[e].to_integer()).max().unwrap_or_default();
            i64::try_from(v + r * slack).expect("small coordinates")
        })
        .collect()
}

/// Checks that the maximal cliques of an acyclic chart form a complete
/// unimodular triangulation of its polytope.
pub fn verify_triangulation(chart: &Chart) -> Result<TriangulationReport, CompatError> {
    let cliques = enumerate_maximal_cliques(chart)?;
    let n = chart.num_edges();
    let pres = oracle_presentation(chart, OracleMode::Unit).expect("desk scale");
    let dim = affine_dim(&pres);
    let points = integer_points(chart, &bounding_box(&pres, n, 0), None);
    let lattice = reference_lattice(&points);

    let mut all_full = true;
    let mut all_unimodular = true;
    let mut sum = BigInt::zero();
    for c in &cliques {
        match simplex_check(chart, c, &lattice) {
            Ok(r) => {
                all_full &= r.dim == dim;
                all_unimodular &= r.unimodular;
                if let Some(v) = r.normalized_volume {
                    sum += v.parse::<BigInt>().expect("integer");
                }
            }
            Err(_) => {
                all_full = false;
                all_unimodular = false;
            }
        }
    }
    let vertices: Vec<Vec<Q>> = pres.vertices.iter().cloned().collect();
    let oracle_volume = normalized_volume(&vertices, &lattice);

    let mut failures = Vec::new();
    for i in 0..cliques.len() {
        for j in i + 1..cliques.len() {
            if !strongly_intersect(chart, &cliques[i], &cliques[j]) {
                failures.push((i, j));
            }
        }
    }

    let routes: BTreeSet<Vec<i64>> = capped_trails(chart, 2)
        .into_iter()
        .filter(|t| t.is_route() && self_compatible(chart, t))
        .map(|t| t.indicator(n))
        .collect();
    let unexplained: Vec<Vec<i64>> = points.iter().filter(|p| !routes.contains(*p)).cloned().collect();

    let pass = all_full
        && all_unimodular
        && oracle_volume.as_ref() == Some(&sum)
        && failures.is_empty()
        && unexplained.is_empty();
    Ok(TriangulationReport {
        dim,
        simplices: cliques.len(),
        all_full_dimensional: all_full,
        all_unimodular,
        volume_sum: sum.to_string(),
        oracle_volume: oracle_volume.map(|v| v.to_string()),
        strong_intersection_failures: failures,
        integer_points: points.len(),
        unexplained_integer_points: unexplained,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CellReport {
    pub routes: usize,
    pub bands: usize,
    pub dim: usize,
    pub full_dimensional: bool,
    pub unimodular: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubdivisionReport {
    pub cap: usize,
    pub seed: u64,
    pub dim: usize,
    pub cells: Vec<CellReport>,
    pub all_simplicial: bool,
    pub strong_intersection_failures: Vec<(usize, usize)>,
    pub probes: usize,
    pub decomposed: usize,
    /// Probes covered only once the cap is raised by one.
    pub covered_after_escalation: usize,
    pub uncovered: usize,
    pub pass: bool,
}

/// Random point of the polyhedron: a positive convex combination of
/// vertices plus a nonnegative combination of rays.
pub(crate) fn probe(p: &Presentation, rng: &mut ChaCha8Rng) -> Vec<Q> {
    let n = p.vertices.iter().next().map_or(0, Vec::len);
    let weights: Vec<i64> = p.vertices.iter().map(|_| rng.gen_range(1..=60)).collect();
    let total: i64 = weights.iter().sum();
    let mut x = vec![Q::zero(); n];
    for (v, w) in p.vertices.iter().zip(&weights) {
        let f = Q::new((*w).into(), total.into());
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += &f * vi;
        }
    }
    for r in &p.rays {
        let f = Q::new(rng.gen_range(0..=12).into(), rng.gen_range(1..=4).into());
        for (xi, ri) in x.iter_mut().zip(r) {
            *xi += &f * ri;
        }
    }
    x
}

/// Checks the bundle subdivision restricted to trails within `cap`: cells
/// are simplicial, meet properly, and random points decompose.
pub fn verify_subdivision_capped(chart: &Chart, cap: usize, samples: usize, seed: u64) -> SubdivisionReport {
    let n = chart.num_edges();
    let pres = oracle_presentation(chart, OracleMode::Unit).expect("desk scale");
    let dim = affine_dim(&pres);
    let acyclic = classify_chart(chart).acyclic;
    let cells_of = |c: usize| -> Vec<Bundle> {
        let all = if acyclic {
            enumerate_maximal_cliques(chart).expect("acyclic")
        } else {
            enumerate_maximal_bundles_capped(chart, c)
        };
        all.into_iter().filter(|b| !b.routes.is_empty()).collect()
    };
    let cells = cells_of(cap);
    let points = integer_points(chart, &bounding_box(&pres, n, 1), None);
    let lattice = reference_lattice(&points);

    let mut all_simplicial = true;
    let mut reports = Vec::new();
    for c in &cells {
        let simplicial = bundle_directions(c, n).is_ok();
        all_simplicial &= simplicial;
        let r = simplex_check(chart, c, &lattice).ok();
        let cell_dim = r.as_ref().map_or(0, |r| r.dim);
        reports.push(CellReport {
            routes: c.routes.len(),
            bands: c.bands.len(),
            dim: cell_dim,
            full_dimensional: simplicial && cell_dim == dim,
            unimodular: r.is_some_and(|r| r.unimodular),
        });
    }

    let mut failures = Vec::new();
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            if !strongly_intersect(chart, &cells[i], &cells[j]) {
                failures.push((i, j));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut decomposed = 0;
    let mut escalated = 0;
    let mut uncovered = 0;
    let mut wider: Option<Vec<Bundle>> = None;
    for _ in 0..samples {
        let x = Flow(probe(&pres, &mut rng));
        if decompose_in(chart, &x, &cells).is_ok() {
            decomposed += 1;
            continue;
        }
        let w = wider.get_or_insert_with(|| cells_of(cap + 1));
        if decompose_in(chart, &x, w).is_ok() {
            escalated += 1;
        } else {
            uncovered += 1;
        }
    }

    let pass = all_simplicial && failures.is_empty() && (!acyclic || uncovered + escalated == 0);
    SubdivisionReport {
        cap,
        seed,
        dim,
        cells: reports,
        all_simplicial,
        strong_intersection_failures: failures,
        probes: samples,
        decomposed,
        covered_after_escalation: escalated,
        uncovered,
        pass,
    }
}
