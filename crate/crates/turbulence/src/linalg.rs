//! Exact rational and integer linear algebra on small dense matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn to_q(m: &[Vec<i64>]) -> Vec<Vec<Q>> {
    m.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
}

pub fn vec_q(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    rref(&mut m.to_vec()).len()
}

/// A basis of `{x : m x = 0}` for `ncols` unknowns.
pub fn nullspace(m: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Some solution of `a x = b`, free unknowns set to zero.
pub fn solve_any(a: &[Vec<Q>], b: &[Q], ncols: usize) -> Option<Vec<Q>> {
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Q::zero(); ncols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][ncols].clone();
    }
    Some(x)
}

/// The unique solution of `a x = b`, if there is exactly one.
pub fn solve_unique(a: &[Vec<Q>], b: &[Q], ncols: usize) -> Option<Vec<Q>> {
    if rank(a) != ncols {
        return None;
    }
    solve_any(a, b, ncols)
}

pub fn det(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                for j in c..n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    d
}

/// Scales a nonzero rational vector to the primitive integer vector in the same direction.
pub fn primitive(v: &[Q]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn is_integral(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_integer())
}

pub enum Lp {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

struct Tableau {
    t: Vec<Vec<Q>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for x in self.t[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..self.t.len() {
            if i != r && !self.t[i][c].is_zero() {
                let f = self.t[i][c].clone();
                for j in 0..=self.width {
                    let d = &f * &self.t[r][j];
                    self.t[i][j] -= d;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `obj` over columns `< allowed` with Bland's rule; false if unbounded.
    fn run(&mut self, obj: &[Q], allowed: usize) -> bool {
        loop {
            let reduced = |j: usize, s: &Tableau| -> Q {
                let mut r = obj[j].clone();
                for (i, &b) in s.basis.iter().enumerate() {
                    r -= &obj[b] * &s.t[i][j];
                }
                r
            };
            let Some(enter) = (0..allowed).find(|&j| !self.basis.contains(&j) && reduced(j, self).is_positive())
            else {
                return true;
            };
            let mut best: Option<(Q, usize, usize)> = None;
            for i in 0..self.t.len() {
                if self.t[i][enter].is_positive() {
                    let ratio = &self.t[i][self.width] / &self.t[i][enter];
                    let better = match &best {
                        None => true,
                        Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            let Some((_, row, _)) = best else { return false };
            self.pivot(row, enter);
        }
    }
}

/// Maximizes `c·x` subject to `a x = b`, `x >= 0`, exactly.
pub fn lp_max(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> Lp {
    let m = a.len();
    let n = c.len();
    let width = n + m;
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row: Vec<Q> = a[i].iter().map(|x| if flip { -x.clone() } else { x.clone() }).collect();
        row.extend((0..m).map(|k| if k == i { Q::one() } else { Q::zero() }));
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.push(row);
    }
    let mut tab = Tableau { t, basis: (n..n + m).collect(), width };

    let phase1: Vec<Q> = (0..width).map(|j| if j < n { Q::zero() } else { -Q::one() }).collect();
    tab.run(&phase1, width);
    let infeasibility: Q = (0..m).filter(|&i| tab.basis[i] >= n).map(|i| tab.t[i][width].clone()).sum();
    if infeasibility.is_positive() {
        return Lp::Infeasible;
    }
    // Drive zero-valued artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, j);
                i += 1;
            } else {
                tab.t.remove(i);
                tab.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }

    let mut obj: Vec<Q> = c.to_vec();
    obj.extend((0..m).map(|_| Q::zero()));
    if !tab.run(&obj, n) {
        return Lp::Unbounded;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &bcol) in tab.basis.iter().enumerate() {
        if bcol < n {
            x[bcol] = tab.t[i][width].clone();
        }
    }
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    Lp::Optimal { x, value }
}

pub fn feasible(a: &[Vec<Q>], b: &[Q]) -> bool {
    let n = a.first().map_or(0, Vec::len);
    !matches!(lp_max(a, b, &vec![Q::zero(); n]), Lp::Infeasible)
}

/// Echelon basis of the integer lattice spanned by `rows`.
pub fn lattice_basis(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        loop {
            let pick = (r..m.len()).filter(|&i| !m[i][c].is_zero()).min_by_key(|&i| m[i][c].abs());
            let Some(p) = pick else { break };
            m.swap(r, p);
            let mut done = true;
            for i in r + 1..m.len() {
                if !m[i][c].is_zero() {
                    let f = m[i][c].div_floor(&m[r][c]);
                    for j in 0..cols {
                        let d = &f * &m[r][j];
                        m[i][j] -= d;
                    }
                    if !m[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                r += 1;
                break;
            }
        }
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    m
}

/// Basis of the integer solutions of `rows · x = 0` in `Z^d`.
pub fn integer_kernel(rows: &[Vec<BigInt>], d: usize) -> Vec<Vec<BigInt>> {
    // Row-reduce [Mᵀ | I] with unimodular operations; zero rows of the left
    // block carry kernel vectors on the right.
    let k = rows.len();
    let mut m: Vec<Vec<BigInt>> = (0..d)
        .map(|i| {
            let mut r: Vec<BigInt> = rows.iter().map(|row| row[i].clone()).collect();
            r.extend((0..d).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let mut top = 0;
    for c in 0..k {
        loop {
            let pick = (top..d).filter(|&i| !m[i][c].is_zero()).min_by_key(|&i| m[i][c].abs());
            let Some(p) = pick else { break };
            m.swap(top, p);
            let mut done = true;
            for i in top + 1..d {
                if !m[i][c].is_zero() {
                    let f = m[i][c].div_floor(&m[top][c]);
                    for j in 0..k + d {
                        let t = &f * &m[top][j];
                        m[i][j] -= t;
                    }
                    done &= m[i][c].is_zero();
                }
            }
            if done {
                top += 1;
                break;
            }
        }
    }
    m.into_iter().skip(top).map(|r| r[k..].to_vec()).collect()
}

/// Nonzero Smith normal form divisors of an integer matrix.
pub fn smith_divisors(mat: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a = mat.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero() && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { return out };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                let f = a[i][t].div_floor(&a[t][t]);
                if !f.is_zero() {
                    for j in t..cols {
                        let d = &f * &a[t][j];
                        a[i][j] -= d;
                    }
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                let f = a[t][j].div_floor(&a[t][t]);
                if !f.is_zero() {
                    for i in t..rows {
                        let d = &f * &a[i][t];
                        a[i][j] -= d;
                    }
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
    }
    out
}
