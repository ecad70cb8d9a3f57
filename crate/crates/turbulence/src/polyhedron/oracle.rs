use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::{conservation_rows, strength_row, Presentation};
use crate::chart::Chart;
use crate::linalg::{self, q, Q};

/// Subset enumeration is used up to this many edges, double description beyond.
pub const SUBSET_LIMIT: usize = 18;
pub const ORACLE_LIMIT: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Unit nonnegative flows.
    Unit,
    /// All nonnegative flows.
    Cone,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{edges} edges exceeds the oracle limit of {limit}")]
    TooLarge { edges: usize, limit: usize },
}

fn normalize(v: &[Q]) -> Vec<Q> {
    linalg::primitive(v).into_iter().map(Q::from_integer).collect()
}

fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == 0 || k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    'outer: loop {
        f(&idx);
        for i in (0..k).rev() {
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                continue 'outer;
            }
        }
        return;
    }
}

/// Extreme rays of `{x >= 0 : a x = 0}` by enumerating candidate supports:
/// a support whose column kernel is one-dimensional and strictly positive.
pub fn extreme_rays_bfs(a: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    let r = linalg::rank(a);
    let mut found = BTreeSet::new();
    for k in 1..=(r + 1).min(n) {
        for_each_subset(n, k, &mut |s: &[usize]| {
            let sub: Vec<Vec<Q>> = a.iter().map(|row| s.iter().map(|&j| row[j].clone()).collect()).collect();
            let ker = linalg::nullspace(&sub, k);
            if ker.len() != 1 {
                return;
            }
            let v = &ker[0];
            let pos = v.iter().all(|x| x.is_positive());
            let neg = v.iter().all(|x| x.is_negative());
            if !(pos || neg) {
                return;
            }
            let mut full = vec![Q::zero(); n];
            for (&j, x) in s.iter().zip(v) {
                full[j] = if pos { x.clone() } else { -x.clone() };
            }
            found.insert(normalize(&full));
        });
    }
    found.into_iter().collect()
}

/// Extreme rays of `{x >= 0 : a x = 0}` by the double description method on
/// a kernel parametrization `x = N y`.
pub fn extreme_rays_dd(a: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    let basis = linalg::nullspace(a, n);
    let d = basis.len();
    if d == 0 {
        return Vec::new();
    }
    // Inequality i reads Σ_k basis[k][i] y_k >= 0.
    let ineq: Vec<Vec<Q>> = (0..n).map(|i| (0..d).map(|k| basis[k][i].clone()).collect()).collect();
    let dot = |u: &[Q], v: &[Q]| -> Q { u.iter().zip(v).map(|(x, y)| x * y).sum() };
    let axpy = |u: &[Q], s: &Q, v: &[Q]| -> Vec<Q> { u.iter().zip(v).map(|(x, y)| x - s * y).collect() };

    let mut lineality: Vec<Vec<Q>> = (0..d)
        .map(|k| (0..d).map(|j| if j == k { Q::one() } else { Q::zero() }).collect())
        .collect();
    let mut rays: Vec<Vec<Q>> = Vec::new();
    let mut processed: Vec<usize> = Vec::new();

    for (i, row) in ineq.iter().enumerate() {
        if let Some(p) = lineality.iter().position(|l| !dot(row, l).is_zero()) {
            let mut l = lineality.remove(p);
            let mut s = dot(row, &l);
            if s.is_negative() {
                l = l.iter().map(|x| -x.clone()).collect();
                s = -s;
            }
            for other in lineality.iter_mut() {
                let f = dot(row, other) / &s;
                *other = axpy(other, &f, &l);
            }
            for r in rays.iter_mut() {
                let f = dot(row, r) / &s;
                *r = axpy(r, &f, &l);
            }
            rays.push(l);
            processed.push(i);
            continue;
        }
        let vals: Vec<Q> = rays.iter().map(|r| dot(row, r)).collect();
        let zero_set = |r: &[Q]| -> BTreeSet<usize> {
            processed.iter().copied().filter(|&j| dot(&ineq[j], r).is_zero()).collect()
        };
        let sets: Vec<BTreeSet<usize>> = rays.iter().map(|r| zero_set(r)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        let mut next: Vec<Vec<Q>> = (0..rays.len()).filter(|&k| !vals[k].is_negative()).map(|k| rays[k].clone()).collect();
        for &p in &plus {
            for &m in &minus {
                let common: BTreeSet<usize> = sets[p].intersection(&sets[m]).copied().collect();
                let adjacent = (0..rays.len())
                    .filter(|&k| k != p && k != m)
                    .all(|k| !common.is_subset(&sets[k]));
                if !adjacent {
                    continue;
                }
                let combo: Vec<Q> =
                    rays[m].iter().zip(&rays[p]).map(|(x, y)| &vals[p] * x - &vals[m] * y).collect();
                next.push(combo);
            }
        }
        rays = next;
        processed.push(i);
    }
    debug_assert!(lineality.is_empty());

    let mut out = BTreeSet::new();
    for y in rays {
        let x: Vec<Q> = (0..n).map(|i| dot(&ineq[i], &y)).collect();
        if x.iter().any(|v| !v.is_zero()) {
            out.insert(normalize(&x));
        }
    }
    out.into_iter().collect()
}

/// Independent vertex and ray enumeration from the conservation equations.
pub fn oracle_presentation(chart: &Chart, mode: OracleMode) -> Result<Presentation, OracleError> {
    let n = chart.num_edges();
    if n > ORACLE_LIMIT {
        return Err(OracleError::TooLarge { edges: n, limit: ORACLE_LIMIT });
    }
    let a = linalg::to_q(&conservation_rows(chart));
    let rays = if n <= SUBSET_LIMIT { extreme_rays_bfs(&a, n) } else { extreme_rays_dd(&a, n) };
    Ok(split_rays(chart, rays, mode))
}

/// The face of the flow polyhedron on which every listed edge carries zero,
/// by double description.
pub fn oracle_face_presentation(
    chart: &Chart,
    zero: &BTreeSet<usize>,
    mode: OracleMode,
) -> Result<Presentation, OracleError> {
    let n = chart.num_edges();
    let keep: Vec<usize> = (0..n).filter(|e| !zero.contains(e)).collect();
    if keep.len() > ORACLE_LIMIT {
        return Err(OracleError::TooLarge { edges: keep.len(), limit: ORACLE_LIMIT });
    }
    let full = conservation_rows(chart);
    let a: Vec<Vec<Q>> = full.iter().map(|row| keep.iter().map(|&j| q(row[j])).collect()).collect();
    let m = keep.len();
    // Faces of envelopes are tall and thin; subset enumeration is hopeless there.
    let reduced = extreme_rays_dd(&a, m);
    let rays = reduced
        .into_iter()
        .map(|r| {
            let mut x = vec![Q::zero(); n];
            for (&j, v) in keep.iter().zip(r) {
                x[j] = v;
            }
            x
        })
        .collect();
    Ok(split_rays(chart, rays, mode))
}

/// Vertices and rays of `{x >= 0 : a x = b}` for a pointed system, by
/// homogenizing with one extra coordinate.
pub fn equality_presentation(a: &[Vec<i64>], b: &[i64], n: usize) -> Presentation {
    let rows: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| row.iter().map(|&x| q(x)).chain(std::iter::once(q(-rhs))).collect())
        .collect();
    let rays = if n < SUBSET_LIMIT { extreme_rays_bfs(&rows, n + 1) } else { extreme_rays_dd(&rows, n + 1) };
    let mut p = Presentation::default();
    for r in rays {
        let t = r[n].clone();
        if t.is_zero() {
            p.rays.insert(r[..n].to_vec());
        } else {
            p.vertices.insert(r[..n].iter().map(|x| x / &t).collect());
        }
    }
    p
}

/// Extreme rays of the flow cone, sorted into unit vertices and recession rays.
pub(crate) fn split_rays(chart: &Chart, rays: Vec<Vec<Q>>, mode: OracleMode) -> Presentation {
    let n = chart.num_edges();
    let s = strength_row(chart);
    let mut p = Presentation::default();
    match mode {
        OracleMode::Cone => {
            p.vertices.insert(vec![Q::zero(); n]);
            p.rays.extend(rays);
        }
        OracleMode::Unit => {
            for r in rays {
                let twice: Q = r.iter().zip(&s).map(|(x, &w)| x * q(w)).sum();
                if twice.is_zero() {
                    p.rays.insert(r);
                } else {
                    let f = q(2) / twice;
                    p.vertices.insert(r.iter().map(|x| x * &f).collect());
                }
            }
        }
    }
    p
}
