//! Exhaustive search for unitary matrices over B in an affine family.
//!
//! The family is an affine F_q-subspace of M_3(B) cut out by linear
//! conditions (lattice maps, congruences, degree windows). Columns 0 and 2
//! are isotropic with h(g2, g0) = 1; fixing all but one coordinate of an
//! isotropic column makes isotropy linear in the last one, and column 1 is
//! then determined by the other two.

use crate::arith::linalg::{Affine, Equation};
use crate::ell::{EllElem, Ext};
use crate::error::{Error, Result};
use crate::fq::FqElem;
use crate::ideal::QuotRing;
use crate::local::lattice::{lmat_min_val, upper_inverse, LMat};
use crate::local::LocalElem;
use crate::poly::Poly;
use crate::unitary::{cross, herm, is_unitary, mat_det, Mat3, UMatrix, Vec3};

/// F_q-basis element t^pow or t^pow w of B.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mono {
    pub omega: bool,
    pub pow: usize,
}

impl Mono {
    pub fn elem(self, c: FqElem) -> EllElem {
        let p = Poly::monomial(c, self.pow);
        if self.omega {
            EllElem::from_polys(Poly::zero(), p)
        } else {
            EllElem::from_polys(p, Poly::zero())
        }
    }
    /// Pole order at Q.
    pub fn pole(self, d: usize) -> i64 {
        2 * self.pow as i64 + if self.omega { d as i64 } else { 0 }
    }
}

/// Monomials of B with pole order at most `m`, by increasing pole order.
pub fn monomials(d: usize, m: i64) -> Vec<Mono> {
    let mut out = Vec::new();
    let mut i = 0usize;
    loop {
        let mut any = false;
        for omega in [false, true] {
            let mono = Mono { omega, pow: i };
            if mono.pole(d) <= m {
                out.push(mono);
                any = true;
            }
        }
        if !any && 2 * i as i64 > m {
            break;
        }
        i += 1;
    }
    out.sort_by_key(|x| x.pole(d));
    out
}

/// Coordinates of a 3x3 matrix over B with per-entry pole bounds.
#[derive(Clone, Debug)]
pub struct Layout {
    pub mons: [[Vec<Mono>; 3]; 3],
    pub start: [[usize; 3]; 3],
    pub n: usize,
}

impl Layout {
    pub fn new(d: usize, bounds: [[i64; 3]; 3]) -> Layout {
        let mons: [[Vec<Mono>; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| monomials(d, bounds[i][j])));
        let mut start = [[0usize; 3]; 3];
        let mut n = 0;
        for i in 0..3 {
            for j in 0..3 {
                start[i][j] = n;
                n += mons[i][j].len();
            }
        }
        Layout { mons, start, n }
    }
    pub fn entry_idx(&self, i: usize, j: usize) -> std::ops::Range<usize> {
        self.start[i][j]..self.start[i][j] + self.mons[i][j].len()
    }
    pub fn col_idx(&self, j: usize) -> Vec<usize> {
        (0..3).flat_map(|i| self.entry_idx(i, j)).collect()
    }
    pub fn entry(&self, x: &[FqElem], i: usize, j: usize) -> EllElem {
        let mut a = vec![FqElem::ZERO; 0];
        let mut b = vec![FqElem::ZERO; 0];
        for (k, m) in self.mons[i][j].iter().enumerate() {
            let c = x[self.start[i][j] + k];
            if c.is_zero() {
                continue;
            }
            let v = if m.omega { &mut b } else { &mut a };
            if v.len() <= m.pow {
                v.resize(m.pow + 1, FqElem::ZERO);
            }
            v[m.pow] = c;
        }
        EllElem::from_polys(Poly::from_coeffs(a), Poly::from_coeffs(b))
    }
    pub fn column(&self, x: &[FqElem], j: usize) -> Vec3 {
        std::array::from_fn(|i| self.entry(x, i, j))
    }
    pub fn matrix(&self, x: &[FqElem]) -> Mat3 {
        std::array::from_fn(|i| std::array::from_fn(|j| self.entry(x, i, j)))
    }
    /// Writes entry (i, j) into `x`; false if it does not fit the layout.
    pub fn set_entry(&self, x: &mut [FqElem], i: usize, j: usize, v: &EllElem) -> bool {
        if !v.in_b() {
            return false;
        }
        let mut used = 0;
        for (k, m) in self.mons[i][j].iter().enumerate() {
            let p = if m.omega { &v.b.num } else { &v.a.num };
            let c = p.coeff(m.pow);
            x[self.start[i][j] + k] = c;
            if !c.is_zero() {
                used += 1;
            }
        }
        let total = v.a.num.coeffs().iter().chain(v.b.num.coeffs()).filter(|c| !c.is_zero()).count();
        used == total
    }
}

/// Linear equations forcing sum_k x[idx_k] * vals_k = target in B.
pub fn b_equations(n: usize, contribs: &[(usize, EllElem)], target: &EllElem) -> Vec<Equation> {
    let mut maxa = target.a.num.coeffs().len();
    let mut maxb = target.b.num.coeffs().len();
    for (_, v) in contribs {
        maxa = maxa.max(v.a.num.coeffs().len());
        maxb = maxb.max(v.b.num.coeffs().len());
    }
    let mut out = Vec::with_capacity(maxa + maxb);
    for (part, max) in [(false, maxa), (true, maxb)] {
        for k in 0..max {
            let mut coeffs = vec![FqElem::ZERO; n];
            let mut any = false;
            for (i, v) in contribs {
                let c = if part { v.b.num.coeff(k) } else { v.a.num.coeff(k) };
                if !c.is_zero() {
                    coeffs[*i] = c;
                    any = true;
                }
            }
            let rhs = if part { target.b.num.coeff(k) } else { target.a.num.coeff(k) };
            if any || !rhs.is_zero() {
                out.push(Equation { coeffs, rhs });
            }
        }
    }
    out
}

/// An affine family of matrices over B together with its defining equations.
#[derive(Clone, Debug)]
pub struct Family {
    pub layout: Layout,
    pub space: Affine,
}

pub struct Constraints {
    pub bounds: [[i64; 3]; 3],
    pub lattice: Option<(LMat, LMat)>,
    pub congruence: Option<QuotRing>,
}

impl Family {
    pub fn build(e: &Ext, c: &Constraints) -> Result<Option<Family>> {
        let f = e.fq();
        let layout = Layout::new(e.deg_d(), c.bounds);
        let n = layout.n;
        let mut eqs: Vec<Equation> = Vec::new();
        if let Some((t1, t2)) = &c.lattice {
            eqs.extend(lattice_equations(e, &layout, t1, t2)?);
        }
        if let Some(ring) = &c.congruence {
            for i in 0..3 {
                for j in 0..3 {
                    let target = ring.reduce(e, &if i == j { EllElem::one() } else { EllElem::zero() })?;
                    let reds: Vec<Vec<FqElem>> = layout.mons[i][j]
                        .iter()
                        .map(|m| ring.reduce(e, &m.elem(FqElem::ONE)))
                        .collect::<Result<_>>()?;
                    for (k, &rhs) in target.iter().enumerate() {
                        let mut coeffs = vec![FqElem::ZERO; n];
                        for (mi, red) in reds.iter().enumerate() {
                            coeffs[layout.start[i][j] + mi] = red[k];
                        }
                        eqs.push(Equation { coeffs, rhs });
                    }
                }
            }
        }
        let _ = f;
        Ok(crate::arith::linalg::solve(e.fq(), n, &eqs).map(|space| Family { layout, space }))
    }

    fn anchor_choice(&self, e: &Ext, s: &Affine, c: usize) -> usize {
        let f = e.fq();
        let mid: Vec<usize> = self.layout.entry_idx(1, c).collect();
        let cost = |a: usize| {
            let mut idx = mid.clone();
            idx.extend(self.layout.entry_idx(a, c));
            s.projection_rank(f, &idx)
        };
        if cost(0) < cost(2) {
            0
        } else {
            2
        }
    }

    /// Isotropic columns c of points of `s`, each with its fiber.
    fn isotropic_columns(&self, e: &Ext, s: &Affine, c: usize) -> Vec<(Vec3, Affine)> {
        let f = e.fq();
        let lay = &self.layout;
        let anchor = self.anchor_choice(e, s, c);
        let other = 2 - anchor;
        let mid: Vec<usize> = lay.entry_idx(1, c).collect();
        let anc: Vec<usize> = lay.entry_idx(anchor, c).collect();
        let oth: Vec<usize> = lay.entry_idx(other, c).collect();
        let mut idx = mid.clone();
        idx.extend(&anc);
        let mut out = Vec::new();
        for (_, fiber) in s.fibers(f, &idx) {
            let x1 = lay.entry(&fiber.origin, 1, c);
            let xa = lay.entry(&fiber.origin, anchor, c);
            if xa.is_zero() {
                if !x1.is_zero() {
                    continue;
                }
                // a unimodular column (u, 0, 0) or (0, 0, u) has u in F_q^*
                let Some(kc) = lay.mons[other][c].iter().position(|m| m.pow == 0 && !m.omega) else { continue };
                for u in f.elements().skip(1) {
                    let vals: Vec<FqElem> = (0..oth.len()).map(|k| if k == kc { u } else { FqElem::ZERO }).collect();
                    if let Some(fx) = fiber.fix(f, &oth, &vals) {
                        out.push((lay.column(&fx.origin, c), fx));
                    }
                }
                continue;
            }
            // T(x_other conj(x_anchor)) = -N(x1)
            let xa_c = e.conj(&xa);
            let contribs: Vec<(usize, EllElem)> = lay.mons[other][c]
                .iter()
                .enumerate()
                .map(|(k, m)| (oth[k], EllElem::new(e.trace(&e.mul(&m.elem(FqElem::ONE), &xa_c)), Default::default())))
                .collect();
            let rhs = EllElem::new(e.norm(&x1).neg(f), Default::default());
            let eqs = b_equations(lay.n, &contribs, &rhs);
            let Some(f2) = fiber.restrict(f, &eqs) else { continue };
            for (_, fx) in f2.fibers(f, &oth) {
                out.push((lay.column(&fx.origin, c), fx));
            }
        }
        out
    }

    /// Equations h(column j, x) = target.
    fn herm_equations(&self, e: &Ext, j: usize, x: &Vec3, target: &EllElem) -> Vec<Equation> {
        let lay = &self.layout;
        let mut contribs = Vec::new();
        for i in 0..3 {
            let xc = e.conj(&x[2 - i]);
            if xc.is_zero() {
                continue;
            }
            for (k, m) in lay.mons[i][j].iter().enumerate() {
                contribs.push((lay.start[i][j] + k, e.mul(&m.elem(FqElem::ONE), &xc)));
            }
        }
        b_equations(lay.n, &contribs, target)
    }

    /// All unitary matrices in the family (or the first one found).
    pub fn search(&self, e: &Ext, first_only: bool) -> Vec<UMatrix> {
        let f = e.fq();
        let lay = &self.layout;
        let r0 = self.space.projection_rank(f, &lay.col_idx(0));
        let r2 = self.space.projection_rank(f, &lay.col_idx(2));
        let c0 = if r2 < r0 { 2 } else { 0 };
        let c2 = 2 - c0;
        let mut out = Vec::new();
        for (x, fx) in self.isotropic_columns(e, &self.space, c0) {
            let mut eqs = self.herm_equations(e, c2, &x, &EllElem::one());
            eqs.extend(self.herm_equations(e, 1, &x, &EllElem::zero()));
            let Some(f2) = fx.restrict(f, &eqs) else { continue };
            for (y, fy) in self.isotropic_columns(e, &f2, c2) {
                let (g0, g2) = if c0 == 0 { (&x, &y) } else { (&y, &x) };
                if let Some(g) = self.complete(e, g0, g2, &fy) {
                    out.push(g);
                    if first_only {
                        return out;
                    }
                }
            }
        }
        out.sort();
        out
    }

    fn complete(&self, e: &Ext, g0: &Vec3, g2: &Vec3, fy: &Affine) -> Option<UMatrix> {
        let f = e.fq();
        let hc = |v: &Vec3| -> Vec3 { std::array::from_fn(|i| e.conj(&v[2 - i])) };
        let n = cross(e, &hc(g0), &hc(g2));
        let m: Mat3 = std::array::from_fn(|i| [g0[i].clone(), n[i].clone(), g2[i].clone()]);
        let det = mat_det(e, &m);
        let inv = e.inv(&det).ok()?;
        let g1: Vec3 = std::array::from_fn(|i| e.mul(&n[i], &inv));
        if !g1.iter().all(EllElem::in_b) || !herm(e, &g1, &g1).is_one() {
            return None;
        }
        let mut point = fy.origin.clone();
        for (i, gi) in g1.iter().enumerate() {
            if !self.layout.set_entry(&mut point, i, 1, gi) {
                return None;
            }
        }
        if !fy.contains(f, &point) {
            return None;
        }
        let mat: Mat3 = std::array::from_fn(|i| [g0[i].clone(), g1[i].clone(), g2[i].clone()]);
        debug_assert!(is_unitary(e, &mat));
        Some(UMatrix::new_unchecked(mat))
    }
}

/// Equations for T2^{-1} g T1 in M_3(O).
fn lattice_equations(e: &Ext, lay: &Layout, t1: &LMat, t2: &LMat) -> Result<Vec<Equation>> {
    let f = e.fq();
    let t2i = upper_inverse(f, t2)?;
    let v2 = lmat_min_val(&t2i).unwrap_or(0);
    let v1 = lmat_min_val(t1).unwrap_or(0);
    let prec = -v2 - v1 + 1;
    let n = lay.n;
    // emb[i][j][k]: expansion of the k-th monomial of entry (i, j)
    let mut rows: std::collections::BTreeMap<(usize, usize, i64), Vec<FqElem>> = Default::default();
    let mut cache: Vec<(Mono, LocalElem)> = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            for (k, m) in lay.mons[i][j].iter().enumerate() {
                let emb = match cache.iter().find(|(mm, _)| mm == m) {
                    Some((_, x)) => x.clone(),
                    None => {
                        let x = e.embed(&m.elem(FqElem::ONE), prec)?;
                        cache.push((*m, x.clone()));
                        x
                    }
                };
                let coord = lay.start[i][j] + k;
                for a in 0..3 {
                    if t2i[a][i].is_zero() {
                        continue;
                    }
                    let left = t2i[a][i].mul(f, &emb);
                    for b in 0..3 {
                        if t1[j][b].is_zero() {
                            continue;
                        }
                        let x = left.mul(f, &t1[j][b]);
                        if x.prec() < 0 {
                            return Err(Error::Precision("lattice equations".into()));
                        }
                        for (ex, c) in x.terms() {
                            if ex >= 0 {
                                break;
                            }
                            let row = rows.entry((a, b, ex)).or_insert_with(|| vec![FqElem::ZERO; n]);
                            row[coord] = f.add(row[coord], c);
                        }
                    }
                }
            }
        }
    }
    Ok(rows.into_values().map(|coeffs| Equation { coeffs, rhs: FqElem::ZERO }).collect())
}

/// Per-entry pole bounds for matrices mapping lattice T1 into lattice T2.
pub fn lattice_bounds(e: &Ext, t1: &LMat, t2: &LMat) -> Result<[[i64; 3]; 3]> {
    let f = e.fq();
    let t1i = upper_inverse(f, t1)?;
    let rowmin = |m: &LMat, i: usize| (0..3).filter_map(|k| m[i][k].val()).min().unwrap_or(i64::MAX / 8);
    let colmin = |m: &LMat, j: usize| (0..3).filter_map(|k| m[k][j].val()).min().unwrap_or(i64::MAX / 8);
    Ok(std::array::from_fn(|i| std::array::from_fn(|j| -(rowmin(t2, i) + colmin(&t1i, j)))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_order() {
        let m = monomials(1, 4);
        let poles: Vec<i64> = m.iter().map(|x| x.pole(1)).collect();
        assert_eq!(poles, vec![0, 1, 2, 3, 4]);
        assert!(monomials(3, -1).is_empty());
        assert_eq!(monomials(3, 2).len(), 2);
    }
}
