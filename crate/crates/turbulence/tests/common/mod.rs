//! Shared helpers for the integration suites, including a brute-force
//! polyhedron oracle that shares no code with the library's.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use turbulence::chart::Chart;
use turbulence::io::read_chart;
use turbulence::linalg::Q;
use turbulence::polyhedron::Presentation;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> Chart {
    read_chart(&fixture_path(name)).unwrap_or_else(|e| panic!("{e}"))
}

/// Every chart fixture (the digraph fixture is excluded).
pub const CHARTS: [&str; 11] = [
    "bowtie",
    "contract-left",
    "contract-right",
    "kron-alt",
    "kron-face",
    "kron-h",
    "kron-nb",
    "moves",
    "square",
    "trapezoid-a",
    "trapezoid-b",
];

pub fn ints(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| Q::from_integer(x.into())).collect()
}

pub fn pres(vertices: &[&[i64]], rays: &[&[i64]]) -> Presentation {
    Presentation {
        vertices: vertices.iter().map(|v| ints(v)).collect(),
        rays: rays.iter().map(|v| ints(v)).collect(),
    }
}

fn r(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Row echelon form in place; returns the rank.
fn eliminate(m: &mut [Vec<BigRational>], cols: usize) -> usize {
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(row, p);
        let pivot = m[row][c].clone();
        for x in m[row].iter_mut() {
            *x = &*x / &pivot;
        }
        for i in 0..m.len() {
            if i != row && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pr = m[row].clone();
                for (x, y) in m[i].iter_mut().zip(pr) {
                    *x -= &f * y;
                }
            }
        }
        row += 1;
    }
    row
}

/// Conservation equations read straight off the serialized class lists.
fn equations(chart: &Chart) -> Vec<Vec<i64>> {
    let desc = chart.to_desc();
    let col = |id: &str| desc.edges.iter().position(|e| e.id == id).unwrap();
    let mut rows = Vec::new();
    for lists in desc.classes.values() {
        let mut row = vec![0i64; desc.edges.len()];
        for (side, list) in lists.iter().enumerate() {
            for (e, _) in list {
                row[col(e)] += if side == 0 { 1 } else { -1 };
            }
        }
        rows.push(row);
    }
    let fringe: BTreeSet<&str> =
        desc.vertices.iter().filter(|v| !desc.classes.contains_key(&v.id)).map(|v| v.id.as_str()).collect();
    rows.push(desc.edges.iter().map(|e| e.ends.iter().filter(|v| fringe.contains(v.as_str())).count() as i64).collect());
    rows
}

/// Solves `A_S x = b` on the columns `s`, if the columns are independent and
/// the system is consistent.
fn solve_on(a: &[Vec<i64>], b: &[i64], s: &[usize]) -> Option<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> =
        a.iter().zip(b).map(|(row, &bi)| s.iter().map(|&j| r(row[j])).chain([r(bi)]).collect()).collect();
    let rank = eliminate(&mut m, s.len());
    if rank < s.len() || m[rank..].iter().any(|row| !row[s.len()].is_zero()) {
        return None;
    }
    Some((0..s.len()).map(|i| m[i][s.len()].clone()).collect())
}

/// One-dimensional kernel of `A_S`, if it is one-dimensional.
fn circuit_on(a: &[Vec<i64>], s: &[usize]) -> Option<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = a.iter().map(|row| s.iter().map(|&j| r(row[j])).collect()).collect();
    let rank = eliminate(&mut m, s.len());
    if rank + 1 != s.len() {
        return None;
    }
    // Find the free column and back-substitute.
    let pivots: Vec<usize> =
        m[..rank].iter().map(|row| row.iter().position(|x| !x.is_zero()).unwrap()).collect();
    let free = (0..s.len()).find(|c| !pivots.contains(c)).unwrap();
    let mut x = vec![r(0); s.len()];
    x[free] = r(1);
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = -m[i][free].clone();
    }
    Some(x)
}

fn primitive(v: Vec<BigRational>) -> Vec<Q> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let w: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = w.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    w.into_iter().map(|x| Q::from_integer(x / &g)).collect()
}

/// Vertices and rays of the unit flow polyhedron by support enumeration:
/// a vertex is the unique solution on an independent support, a ray is a
/// sign-consistent circuit of the homogeneous system with zero strength.
pub fn brute_presentation(chart: &Chart) -> Presentation {
    let a = equations(chart);
    let n = chart.num_edges();
    assert!(n <= 16, "brute-force oracle is exponential");
    let mut rhs = vec![0i64; a.len()];
    *rhs.last_mut().unwrap() = 2;
    let mut out = Presentation::default();
    for mask in 1u32..(1 << n) {
        let s: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
        if let Some(x) = solve_on(&a, &rhs, &s) {
            if x.iter().all(|v| v.is_positive()) {
                let mut full = vec![Q::zero(); n];
                for (&j, v) in s.iter().zip(x) {
                    full[j] = v;
                }
                out.vertices.insert(full);
            }
        }
        if let Some(mut x) = circuit_on(&a, &s) {
            if x.iter().all(|v| v.is_negative()) {
                x = x.into_iter().map(|v| -v).collect();
            }
            if x.iter().all(|v| v.is_positive()) {
                let mut full = vec![r(0); n];
                for (&j, v) in s.iter().zip(x) {
                    full[j] = v;
                }
                out.rays.insert(primitive(full));
            }
        }
    }
    out
}
