//! Flows, the turbulence polyhedron and its presentations, decompositions
//! and subdivisions. Everything is exact.

mod decompose;
mod lattice;
mod oracle;
mod present;
mod verify;

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::chart::Chart;
use crate::linalg::{q, Q};

pub use decompose::{coefficients_in, decompose_flow, BundleCombination, DecomposeError};
pub use lattice::{
    integer_points, normalized_volume, reference_lattice, simplex_check, Lattice, SimplexError, SimplexReport,
};
pub use oracle::{equality_presentation, extreme_rays_bfs, extreme_rays_dd, oracle_face_presentation, oracle_presentation, OracleError, OracleMode, ORACLE_LIMIT};
pub use present::{non_self_compatible_elementary_routes, trail_presentation};
pub use verify::{verify_subdivision_capped, verify_triangulation, SubdivisionReport, TriangulationReport};

/// One row per internal vertex: class-0 half-edges count +1, class-1 half-edges -1.
pub fn conservation_rows(chart: &Chart) -> Vec<Vec<i64>> {
    chart
        .internal_vertices()
        .map(|v| {
            let mut row = vec![0i64; chart.num_edges()];
            for (c, list) in chart.classes(v).expect("internal").iter().enumerate() {
                for h in list {
                    row[h.edge] += if c == 0 { 1 } else { -1 };
                }
            }
            row
        })
        .collect()
}

/// Twice the strength functional: the number of fringe ends of each edge.
pub fn strength_row(chart: &Chart) -> Vec<i64> {
    (0..chart.num_edges()).map(|e| chart.fringe_ends(e) as i64).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct HRep {
    /// Conservation rows, then (for the unit polyhedron) the doubled strength row.
    pub equalities: Vec<Vec<i64>>,
    pub rhs: Vec<i64>,
    /// Every coordinate is constrained to be nonnegative.
    pub nonnegative: usize,
}

pub fn hrep(chart: &Chart, unit: bool) -> HRep {
    let mut equalities = conservation_rows(chart);
    let mut rhs = vec![0; equalities.len()];
    if unit {
        equalities.push(strength_row(chart));
        rhs.push(2);
    }
    HRep { equalities, rhs, nonnegative: chart.num_edges() }
}

/// An exact edge labelling.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Flow(pub Vec<Q>);

impl Flow {
    pub fn from_ints(v: &[i64]) -> Flow {
        Flow(v.iter().map(|&x| q(x)).collect())
    }

    pub fn strength(&self, chart: &Chart) -> Q {
        let twice: Q = self.0.iter().zip(strength_row(chart)).map(|(x, w)| x * q(w)).sum();
        twice / q(2)
    }

    pub fn conserved(&self, chart: &Chart) -> bool {
        conservation_rows(chart)
            .iter()
            .all(|row| row.iter().zip(&self.0).map(|(&w, x)| x * q(w)).sum::<Q>().is_zero())
    }

    pub fn nonnegative(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }

    pub fn integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }
}

/// Vertices and primitive integer rays of a pointed polyhedron.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Presentation {
    pub vertices: BTreeSet<Vec<Q>>,
    pub rays: BTreeSet<Vec<Q>>,
}

impl Presentation {
    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }

    /// Keeps the listed coordinates, in that order.
    pub fn project(&self, coords: &[usize]) -> Presentation {
        let pick = |v: &Vec<Q>| coords.iter().map(|&i| v[i].clone()).collect::<Vec<Q>>();
        Presentation {
            vertices: self.vertices.iter().map(pick).collect(),
            rays: self.rays.iter().map(pick).collect(),
        }
    }
}

pub fn as_ints(v: &[Q]) -> Option<Vec<i64>> {
    v.iter()
        .map(|x| if x.is_integer() { i64::try_from(x.to_integer()).ok() } else { None })
        .collect()
}
