//! Plots of low-dimensional flow polyhedra: an SVG drawing in dimension two
//! or less, an OBJ-style vertex and face list in dimension three.
//!
//! Coordinates come from a fixed affine projection: the first vertex is the
//! origin and the difference vectors (other vertices, then rays, in sorted
//! order) are orthonormalized greedily. Rays are clipped at `RAY_LENGTH`.

use std::fmt::Write as _;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::io::q_string;
use crate::linalg::{self, Q};
use crate::polyhedron::Presentation;

/// Display length of a recession ray, in projected units.
pub const RAY_LENGTH: f64 = 1.5;
const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("the polyhedron has dimension {0}; at most 3 can be drawn")]
    DimensionTooHigh(usize),
    #[error("the polyhedron has no vertices")]
    Empty,
}

/// A cell of a subdivision: its vertex generators and its rays.
#[derive(Clone, Debug)]
pub struct Cell {
    pub id: String,
    pub points: Vec<Vec<Q>>,
    pub rays: Vec<Vec<Q>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Rendering {
    Svg(String),
    Obj(String),
}

impl Rendering {
    pub fn text(&self) -> &str {
        match self {
            Rendering::Svg(s) | Rendering::Obj(s) => s,
        }
    }
}

fn to_f(v: &[Q]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Projection {
    origin: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

impl Projection {
    fn new(p: &Presentation) -> Result<(Projection, usize), RenderError> {
        let first = p.vertices.iter().next().ok_or(RenderError::Empty)?;
        let diffs: Vec<Vec<Q>> = p
            .vertices
            .iter()
            .skip(1)
            .map(|v| v.iter().zip(first).map(|(a, b)| a - b).collect())
            .chain(p.rays.iter().cloned())
            .collect();
        let dim = if diffs.is_empty() { 0 } else { linalg::rank(&diffs) };
        if dim > 3 {
            return Err(RenderError::DimensionTooHigh(dim));
        }
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for d in &diffs {
            let mut u = to_f(d);
            for b in &basis {
                let c = dot(&u, b);
                u.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            let norm = dot(&u, &u).sqrt();
            if norm > EPS {
                basis.push(u.into_iter().map(|x| x / norm).collect());
            }
        }
        Ok((Projection { origin: to_f(first), basis }, dim))
    }

    fn point(&self, v: &[Q], out: usize) -> Vec<f64> {
        let x: Vec<f64> = to_f(v).iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        (0..out).map(|i| self.basis.get(i).map_or(0.0, |b| dot(&x, b))).collect()
    }

    fn direction(&self, r: &[Q], out: usize) -> Vec<f64> {
        let x = to_f(r);
        let d: Vec<f64> = (0..out).map(|i| self.basis.get(i).map_or(0.0, |b| dot(&x, b))).collect();
        let n = dot(&d, &d).sqrt();
        d.into_iter().map(|c| c / n).collect()
    }
}

fn label(v: &[Q]) -> String {
    format!("({})", v.iter().map(q_string).collect::<Vec<_>>().join(","))
}

/// Convex hull in the plane, counterclockwise, collinear points dropped.
fn hull2(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() < EPS && (a[1] - b[1]).abs() < EPS);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= EPS {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= EPS {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Points of a region with its rays clipped.
fn clipped(proj: &Projection, points: &[Vec<Q>], rays: &[Vec<Q>], out: usize) -> Vec<Vec<f64>> {
    let base: Vec<Vec<f64>> = points.iter().map(|p| proj.point(p, out)).collect();
    let mut all = base.clone();
    for r in rays {
        let d = proj.direction(r, out);
        for b in &base {
            all.push(b.iter().zip(&d).map(|(x, y)| x + RAY_LENGTH * y).collect());
        }
    }
    all
}

fn svg(p: &Presentation, cells: &[Cell], proj: &Projection, dim: usize) -> String {
    let verts: Vec<Vec<Q>> = p.vertices.iter().cloned().collect();
    let rays: Vec<Vec<Q>> = p.rays.iter().cloned().collect();
    let outline = clipped(proj, &verts, &rays, 2);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for q in &outline {
        for i in 0..2 {
            lo[i] = lo[i].min(q[i]);
            hi[i] = hi[i].max(q[i]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1.0);
    let scale = 320.0 / span;
    let at = |q: &[f64]| -> (f64, f64) { (40.0 + (q[0] - lo[0]) * scale, 360.0 - (q[1] - lo[1]) * scale) };
    let poly = |pts: Vec<[f64; 2]>| -> String {
        hull2(pts)
            .iter()
            .map(|q| {
                let (x, y) = at(q);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let flat = |v: Vec<Vec<f64>>| -> Vec<[f64; 2]> { v.into_iter().map(|q| [q[0], q[1]]).collect() };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="400" height="400" viewBox="0 0 400 400">"#);
    let _ = writeln!(s, "<!-- dimension {dim}, {} vertices, {} rays, rays clipped at {RAY_LENGTH} -->", verts.len(), rays.len());
    let _ = writeln!(
        s,
        r#"<defs><marker id="arrow" markerWidth="8" markerHeight="8" refX="7" refY="4" orient="auto"><path d="M0,0 L8,4 L0,8 z"/></marker></defs>"#
    );
    let _ = writeln!(s, r##"<polygon id="polyhedron" points="{}" fill="#dde8f4" stroke="black"/>"##, poly(flat(outline)));
    for c in cells {
        let pts = flat(clipped(proj, &c.points, &c.rays, 2));
        let _ = writeln!(s, r#"<polygon id="{}" points="{}" fill="none" stroke="gray" stroke-dasharray="4 3"/>"#, c.id, poly(pts));
    }
    for (k, r) in rays.iter().enumerate() {
        let d = proj.direction(r, 2);
        for v in &verts {
            let a = proj.point(v, 2);
            let b: Vec<f64> = a.iter().zip(&d).map(|(x, y)| x + RAY_LENGTH * y).collect();
            let ((x1, y1), (x2, y2)) = (at(&a), at(&b));
            let _ = writeln!(
                s,
                r#"<line class="ray" data-ray="{k}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="black" marker-end="url(#arrow)"/>"#
            );
        }
    }
    for v in &verts {
        let (x, y) = at(&proj.point(v, 2));
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3"/>"#);
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" font-size="10">{}</text>"#, x + 5.0, y - 5.0, label(v));
    }
    s.push_str("</svg>\n");
    s
}

/// Facets of the hull of a small 3D point set, each as indices in cyclic order.
fn facets3(pts: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = pts.len();
    let sub = |a: &[f64], b: &[f64]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let cross = |u: [f64; 3], v: [f64; 3]| [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let d3 = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let normal = cross(sub(&pts[j], &pts[i]), sub(&pts[k], &pts[i]));
                if d3(normal, normal).sqrt() < EPS {
                    continue;
                }
                let side: Vec<f64> = pts.iter().map(|p| d3(normal, sub(p, &pts[i]))).collect();
                let (pos, neg) = (side.iter().any(|&x| x > EPS), side.iter().any(|&x| x < -EPS));
                if pos && neg {
                    continue;
                }
                let mut on: Vec<usize> = (0..n).filter(|&m| side[m].abs() <= EPS).collect();
                if on[0] != i || out.iter().any(|f| f.iter().min() == on.iter().min() && f.len() == on.len() && on.iter().all(|x| f.contains(x))) {
                    continue;
                }
                // Order around the centroid, outward normal.
                let n_out = if pos { [-normal[0], -normal[1], -normal[2]] } else { normal };
                let c: Vec<f64> = (0..3).map(|a| on.iter().map(|&m| pts[m][a]).sum::<f64>() / on.len() as f64).collect();
                let e1 = sub(&pts[on[0]], &c);
                let e2 = cross(n_out, e1);
                on.sort_by(|&a, &b| {
                    let (va, vb) = (sub(&pts[a], &c), sub(&pts[b], &c));
                    let ta = d3(va, e2).atan2(d3(va, e1));
                    let tb = d3(vb, e2).atan2(d3(vb, e1));
                    ta.partial_cmp(&tb).expect("finite")
                });
                out.push(on);
            }
        }
    }
    out
}

fn obj(p: &Presentation, cells: &[Cell], proj: &Projection, dim: usize) -> String {
    let verts: Vec<Vec<Q>> = p.vertices.iter().cloned().collect();
    let rays: Vec<Vec<Q>> = p.rays.iter().cloned().collect();
    let mut s = String::new();
    let _ = writeln!(s, "# dimension {dim}, {} vertices, {} rays, rays clipped at {RAY_LENGTH}", verts.len(), rays.len());
    let mut table: Vec<Vec<f64>> = Vec::new();
    let mut index = |q: Vec<f64>, s: &mut String, note: &str| -> usize {
        if let Some(i) = table.iter().position(|t| t.iter().zip(&q).all(|(a, b)| (a - b).abs() < EPS)) {
            return i + 1;
        }
        let _ = writeln!(s, "v {:.6} {:.6} {:.6}  # {note}", q[0], q[1], q[2]);
        table.push(q);
        table.len()
    };
    let vids: Vec<usize> = verts.iter().map(|v| index(proj.point(v, 3), &mut s, &label(v))).collect();
    for (k, r) in rays.iter().enumerate() {
        let d = proj.direction(r, 3);
        for (v, &vi) in verts.iter().zip(&vids) {
            let a = proj.point(v, 3);
            let b: Vec<f64> = a.iter().zip(&d).map(|(x, y)| x + RAY_LENGTH * y).collect();
            let bi = index(b, &mut s, &format!("ray {k} {} clipped", label(r)));
            let _ = writeln!(s, "l {vi} {bi}");
        }
    }
    let mut regions = vec![("polyhedron".to_string(), clipped(proj, &verts, &rays, 3))];
    regions.extend(cells.iter().map(|c| (c.id.clone(), clipped(proj, &c.points, &c.rays, 3))));
    for (name, mut pts) in regions {
        let mut unique: Vec<Vec<f64>> = Vec::new();
        for q in pts.drain(..) {
            if !unique.iter().any(|t| t.iter().zip(&q).all(|(a, b)| (a - b).abs() < EPS)) {
                unique.push(q);
            }
        }
        let pts = unique;
        let _ = writeln!(s, "g {name}");
        let ids: Vec<usize> = pts.iter().map(|q| index(q.clone(), &mut s, "clip")).collect();
        for f in facets3(&pts) {
            let _ = writeln!(s, "f {}", f.iter().map(|&m| ids[m].to_string()).collect::<Vec<_>>().join(" "));
        }
    }
    s
}

/// Draws the polyhedron `p` and the given cells.
pub fn render_projection(p: &Presentation, cells: &[Cell]) -> Result<Rendering, RenderError> {
    let (proj, dim) = Projection::new(p)?;
    if dim <= 2 {
        Ok(Rendering::Svg(svg(p, cells, &proj, dim)))
    } else {
        Ok(Rendering::Obj(obj(p, cells, &proj, dim)))
    }
}
