use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use super::{conservation_rows, strength_row};
use crate::chart::Chart;
use crate::compat::Bundle;
use crate::linalg::{self, q, Q};

/// Integer unit nonnegative flows with `x[e] <= upper[e]` and, if given,
/// `weights · x <= limit`. Depth-first with interval pruning on each equation.
pub fn integer_points(chart: &Chart, upper: &[i64], budget: Option<(&[i64], i64)>) -> Vec<Vec<i64>> {
    let n = chart.num_edges();
    let mut rows = conservation_rows(chart);
    let mut rhs = vec![0i64; rows.len()];
    rows.push(strength_row(chart));
    rhs.push(2);

    let mut out = Vec::new();
    let mut x = vec![0i64; n];

    struct Ctx<'a> {
        rows: &'a [Vec<i64>],
        rhs: &'a [i64],
        upper: &'a [i64],
        budget: Option<(&'a [i64], i64)>,
    }

    fn feasible(ctx: &Ctx, x: &[i64], next: usize) -> bool {
        for (row, &b) in ctx.rows.iter().zip(ctx.rhs) {
            let fixed: i64 = (0..next).map(|e| row[e] * x[e]).sum();
            let (mut lo, mut hi) = (fixed, fixed);
            for e in next..x.len() {
                let w = row[e] * ctx.upper[e];
                if w < 0 {
                    lo += w;
                } else {
                    hi += w;
                }
            }
            if b < lo || b > hi {
                return false;
            }
        }
        if let Some((w, limit)) = ctx.budget {
            let used: i64 = (0..next).map(|e| w[e] * x[e]).sum();
            let slack: i64 = (next..x.len()).map(|e| w[e].min(0) * ctx.upper[e]).sum();
            if used + slack > limit {
                return false;
            }
        }
        true
    }

    fn go(ctx: &Ctx, x: &mut Vec<i64>, e: usize, out: &mut Vec<Vec<i64>>) {
        if e == x.len() {
            out.push(x.clone());
            return;
        }
        for v in 0..=ctx.upper[e] {
            x[e] = v;
            if feasible(ctx, x, e + 1) {
                go(ctx, x, e + 1, out);
            }
        }
        x[e] = 0;
    }

    let ctx = Ctx { rows: &rows, rhs: &rhs, upper, budget };
    if feasible(&ctx, &x, 0) {
        go(&ctx, &mut x, 0, &mut out);
    }
    out
}

/// The lattice generated by differences of a set of integer points, with an
/// echelon basis.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub basis: Vec<Vec<BigInt>>,
}

pub fn reference_lattice(points: &[Vec<i64>]) -> Lattice {
    let Some(first) = points.first() else { return Lattice { basis: Vec::new() } };
    let diffs: Vec<Vec<BigInt>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| BigInt::from(a - b)).collect())
        .collect();
    Lattice { basis: linalg::lattice_basis(&diffs) }
}

impl Lattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `v` in this basis, if `v` lies in the rational span.
    pub fn coords(&self, v: &[Q]) -> Option<Vec<Q>> {
        let k = self.basis.len();
        let n = v.len();
        let a: Vec<Vec<Q>> =
            (0..n).map(|i| (0..k).map(|r| Q::from_integer(self.basis[r][i].clone())).collect()).collect();
        linalg::solve_any(&a, v, k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplexError {
    #[error("bundle generators are affinely dependent")]
    DegenerateBundle,
    #[error("bundle has no route")]
    NoRoute,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplexReport {
    pub dim: usize,
    pub unimodular: bool,
    /// Index of the generated lattice inside the reference lattice restricted
    /// to the cell's span; absent if a generator falls outside the lattice.
    pub normalized_volume: Option<String>,
}

/// Edge directions of the simplihedron of a bundle: route differences and band indicators.
pub fn bundle_directions(bundle: &Bundle, n: usize) -> Result<Vec<Vec<Q>>, SimplexError> {
    let first = bundle.routes.first().ok_or(SimplexError::NoRoute)?.indicator(n);
    let mut dirs: Vec<Vec<Q>> = bundle.routes[1..]
        .iter()
        .map(|r| r.indicator(n).iter().zip(&first).map(|(a, b)| q(a - b)).collect())
        .collect();
    dirs.extend(bundle.bands.iter().map(|b| b.indicator(n).into_iter().map(q).collect()));
    if linalg::rank(&dirs) != dirs.len() {
        return Err(SimplexError::DegenerateBundle);
    }
    Ok(dirs)
}

pub fn simplex_check(chart: &Chart, bundle: &Bundle, lattice: &Lattice) -> Result<SimplexReport, SimplexError> {
    let dirs = bundle_directions(bundle, chart.num_edges())?;
    let dim = dirs.len();
    let mut coords = Vec::with_capacity(dim);
    for d in &dirs {
        match lattice.coords(d) {
            Some(c) if linalg::is_integral(&c) => coords.push(c.iter().map(|x| x.to_integer()).collect::<Vec<_>>()),
            _ => return Ok(SimplexReport { dim, unimodular: false, normalized_volume: None }),
        }
    }
    let divisors = linalg::smith_divisors(&coords);
    let volume: BigInt = divisors.iter().product();
    Ok(SimplexReport { dim, unimodular: divisors.iter().all(|d| d.is_one()), normalized_volume: Some(volume.to_string()) })
}

/// Normalized volume of a lattice polytope of the form `{x >= 0, A x = b}`,
/// given its vertices and the lattice of its affine span. Computed by
/// splitting into pyramids over the facets missing the first vertex.
pub fn normalized_volume(vertices: &[Vec<Q>], lattice: &Lattice) -> Option<BigInt> {
    let basis: Vec<Vec<Q>> =
        lattice.basis.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect();
    let all: Vec<usize> = (0..vertices.len()).collect();
    pyramid_volume(vertices, &all, &basis)
}

fn coords_in(basis: &[Vec<Q>], v: &[Q]) -> Option<Vec<Q>> {
    let k = basis.len();
    let a: Vec<Vec<Q>> = (0..v.len()).map(|i| (0..k).map(|r| basis[r][i].clone()).collect()).collect();
    linalg::solve_any(&a, v, k)
}

fn pyramid_volume(vertices: &[Vec<Q>], face: &[usize], basis: &[Vec<Q>]) -> Option<BigInt> {
    let d = basis.len();
    if d == 0 {
        return Some(BigInt::one());
    }
    let apex = &vertices[face[0]];
    let local: Vec<Vec<Q>> = face
        .iter()
        .map(|&i| {
            let diff: Vec<Q> = vertices[i].iter().zip(apex).map(|(a, b)| a - b).collect();
            coords_in(basis, &diff)
        })
        .collect::<Option<_>>()?;
    if local.iter().any(|c| !linalg::is_integral(c)) {
        return None;
    }

    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut total = BigInt::zero();
    for e in 0..apex.len() {
        if !apex[e].is_positive() {
            continue;
        }
        let members: Vec<usize> = (0..face.len()).filter(|&k| vertices[face[k]][e].is_zero()).collect();
        if members.is_empty() || !seen.insert(members.clone()) {
            continue;
        }
        let base = &local[members[0]];
        let span: Vec<Vec<Q>> =
            members[1..].iter().map(|&k| local[k].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
        if linalg::rank(&span) != d - 1 {
            continue;
        }
        // Primitive normal of the facet in local coordinates; its value at the
        // facet is the lattice distance from the apex (which sits at 0).
        let normal = linalg::primitive(&linalg::nullspace(&span, d)[0]);
        let height: BigInt = normal.iter().zip(base).map(|(a, b)| (Q::from_integer(a.clone()) * b).to_integer()).sum();
        // Lattice of the facet: integer kernel of the normal, lifted back.
        let ker = linalg::integer_kernel(&[normal], d);
        let sub_basis: Vec<Vec<Q>> = ker
            .iter()
            .map(|kv| {
                (0..apex.len())
                    .map(|i| kv.iter().zip(basis).map(|(c, row)| Q::from_integer(c.clone()) * &row[i]).sum())
                    .collect()
            })
            .collect();
        let sub_face: Vec<usize> = members.iter().map(|&k| face[k]).collect();
        total += height.abs() * pyramid_volume(vertices, &sub_face, &sub_basis)?;
    }
    Some(total)
}
