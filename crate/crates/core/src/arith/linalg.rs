//! Affine subspaces of F_q^n.

use crate::fq::{Fq, FqElem};

/// One linear equation `coeffs . x = rhs`.
#[derive(Clone, Debug)]
pub struct Equation {
    pub coeffs: Vec<FqElem>,
    pub rhs: FqElem,
}

/// `origin + span(dirs)`, with `dirs` linearly independent.
#[derive(Clone, Debug)]
pub struct Affine {
    pub origin: Vec<FqElem>,
    pub dirs: Vec<Vec<FqElem>>,
}

fn dot(f: &Fq, a: &[FqElem], b: &[FqElem]) -> FqElem {
    a.iter().zip(b).fold(FqElem::ZERO, |acc, (&x, &y)| if x.is_zero() || y.is_zero() { acc } else { f.add(acc, f.mul(x, y)) })
}

fn axpy(f: &Fq, y: &mut [FqElem], a: FqElem, x: &[FqElem]) {
    if a.is_zero() {
        return;
    }
    for (yi, &xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi = f.add(*yi, f.mul(a, xi));
        }
    }
}

/// Solves the system in `ncols` unknowns; `None` when inconsistent.
pub fn solve(f: &Fq, ncols: usize, eqs: &[Equation]) -> Option<Affine> {
    let mut rows: Vec<(Vec<FqElem>, FqElem)> = eqs.iter().map(|e| (e.coeffs.clone(), e.rhs)).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i].0[c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = f.inv_nz(rows[r].0[c]);
        let (mut pr, mut pb) = std::mem::take(&mut rows[r]);
        for x in pr.iter_mut() {
            *x = f.mul(*x, inv);
        }
        pb = f.mul(pb, inv);
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row.0[c].is_zero() {
                let fac = f.neg(row.0[c]);
                axpy(f, &mut row.0, fac, &pr);
                row.1 = f.add(row.1, f.mul(fac, pb));
            }
        }
        rows[r] = (pr, pb);
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    if rows[r..].iter().any(|(_, b)| !b.is_zero()) {
        return None;
    }
    let mut origin = vec![FqElem::ZERO; ncols];
    for (k, &pc) in pivots.iter().enumerate() {
        origin[pc] = rows[k].1;
    }
    let mut is_pivot = vec![false; ncols];
    for &pc in &pivots {
        is_pivot[pc] = true;
    }
    let dirs = (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![FqElem::ZERO; ncols];
            v[free] = FqElem::ONE;
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(rows[k].0[free]);
            }
            v
        })
        .collect();
    Some(Affine { origin, dirs })
}

impl Affine {
    pub fn full(n: usize) -> Affine {
        let dirs = (0..n)
            .map(|i| {
                let mut v = vec![FqElem::ZERO; n];
                v[i] = FqElem::ONE;
                v
            })
            .collect();
        Affine { origin: vec![FqElem::ZERO; n], dirs }
    }
    pub fn point(origin: Vec<FqElem>) -> Affine {
        Affine { origin, dirs: Vec::new() }
    }
    pub fn ambient(&self) -> usize {
        self.origin.len()
    }
    pub fn dim(&self) -> usize {
        self.dirs.len()
    }

    /// Intersection with the solutions of `eqs`.
    pub fn restrict(&self, f: &Fq, eqs: &[Equation]) -> Option<Affine> {
        if eqs.is_empty() {
            return Some(self.clone());
        }
        let sub: Vec<Equation> = eqs
            .iter()
            .map(|e| Equation {
                coeffs: self.dirs.iter().map(|d| dot(f, &e.coeffs, d)).collect(),
                rhs: f.sub(e.rhs, dot(f, &e.coeffs, &self.origin)),
            })
            .collect();
        let sol = solve(f, self.dirs.len(), &sub)?;
        let mut origin = self.origin.clone();
        for (lam, d) in sol.origin.iter().zip(&self.dirs) {
            axpy(f, &mut origin, *lam, d);
        }
        let dirs = sol
            .dirs
            .iter()
            .map(|mu| {
                let mut v = vec![FqElem::ZERO; self.ambient()];
                for (lam, d) in mu.iter().zip(&self.dirs) {
                    axpy(f, &mut v, *lam, d);
                }
                v
            })
            .collect();
        Some(Affine { origin, dirs })
    }

    /// Fixes the coordinates in `idx` to `vals`.
    pub fn fix(&self, f: &Fq, idx: &[usize], vals: &[FqElem]) -> Option<Affine> {
        let eqs: Vec<Equation> = idx
            .iter()
            .zip(vals)
            .map(|(&i, &v)| {
                let mut c = vec![FqElem::ZERO; self.ambient()];
                c[i] = FqElem::ONE;
                Equation { coeffs: c, rhs: v }
            })
            .collect();
        self.restrict(f, &eqs)
    }

    /// Rank of the projection onto the coordinates `idx`.
    pub fn projection_rank(&self, f: &Fq, idx: &[usize]) -> usize {
        let rows: Vec<Vec<FqElem>> = self.dirs.iter().map(|d| idx.iter().map(|&i| d[i]).collect()).collect();
        rank(f, rows)
    }

    /// Splits into the points of the projection onto `idx`: each item is the
    /// projected value together with the fiber above it.
    pub fn fibers(&self, f: &Fq, idx: &[usize]) -> Vec<(Vec<FqElem>, Affine)> {
        // echelonize dirs with respect to the projected coordinates
        let mut dirs = self.dirs.clone();
        let mut lead: Vec<Vec<FqElem>> = Vec::new();
        let mut r = 0;
        for &c in idx {
            let Some(p) = (r..dirs.len()).find(|&i| !dirs[i][c].is_zero()) else { continue };
            dirs.swap(r, p);
            let inv = f.inv_nz(dirs[r][c]);
            let pr: Vec<FqElem> = dirs[r].iter().map(|&x| f.mul(x, inv)).collect();
            for (i, d) in dirs.iter_mut().enumerate() {
                if i != r && !d[c].is_zero() {
                    let fac = f.neg(d[c]);
                    axpy(f, d, fac, &pr);
                }
            }
            dirs[r] = pr;
            r += 1;
        }
        let (head, tail) = dirs.split_at(r);
        lead.extend(head.iter().cloned());
        let q = f.q();
        let total = q.pow(r as u32);
        let mut out = Vec::with_capacity(total);
        for mut n in 0..total {
            let mut origin = self.origin.clone();
            for d in &lead {
                let lam = FqElem((n % q) as u16);
                n /= q;
                axpy(f, &mut origin, lam, d);
            }
            let proj = idx.iter().map(|&i| origin[i]).collect();
            out.push((proj, Affine { origin, dirs: tail.to_vec() }));
        }
        out
    }

    /// All points (only for small dimension).
    pub fn points(&self, f: &Fq) -> Vec<Vec<FqElem>> {
        let q = f.q();
        let total = q.pow(self.dirs.len() as u32);
        (0..total)
            .map(|mut n| {
                let mut v = self.origin.clone();
                for d in &self.dirs {
                    axpy(f, &mut v, FqElem((n % q) as u16), d);
                    n /= q;
                }
                v
            })
            .collect()
    }

    pub fn contains(&self, f: &Fq, x: &[FqElem]) -> bool {
        let mut eqs = Vec::new();
        for (i, &xi) in x.iter().enumerate() {
            let mut c = vec![FqElem::ZERO; self.ambient()];
            c[i] = FqElem::ONE;
            eqs.push(Equation { coeffs: c, rhs: xi });
        }
        self.restrict(f, &eqs).is_some()
    }
}

pub fn rank(f: &Fq, mut rows: Vec<Vec<FqElem>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = f.inv_nz(rows[r][c]);
        let pr: Vec<FqElem> = rows[r].iter().map(|&x| f.mul(x, inv)).collect();
        for row in rows.iter_mut().skip(r + 1) {
            if !row[c].is_zero() {
                let fac = f.neg(row[c]);
                axpy(f, row, fac, &pr);
            }
        }
        r += 1;
    }
    r
}
