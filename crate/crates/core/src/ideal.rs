//! Ideals of B = A[w], the finite rings B/J, and the class group Pic(B).

use std::collections::HashSet;

use serde::Serialize;

use crate::ell::{EllElem, Ext};
use crate::error::{Error, Result};
use crate::fq::{Fq, FqElem};
use crate::poly::Poly;

/// A nonzero ideal, stored with its A-module Hermite basis
/// `alpha + beta w`, `gamma w` (alpha, gamma monic, deg beta < deg gamma).
#[derive(Clone, Debug)]
pub struct BIdeal {
    pub generators: Vec<EllElem>,
    pub alpha: Poly,
    pub beta: Poly,
    pub gamma: Poly,
}

impl PartialEq for BIdeal {
    fn eq(&self, o: &Self) -> bool {
        (&self.alpha, &self.beta, &self.gamma) == (&o.alpha, &o.beta, &o.gamma)
    }
}
impl Eq for BIdeal {}

impl std::hash::Hash for BIdeal {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (&self.alpha, &self.beta, &self.gamma).hash(state);
    }
}

fn as_polys(x: &EllElem) -> Result<(Poly, Poly)> {
    if !x.in_b() {
        return Err(Error::Validation("ideal generator is not in B".into()));
    }
    Ok((x.a.num.clone(), x.b.num.clone()))
}

impl BIdeal {
    pub fn new(e: &Ext, generators: Vec<EllElem>) -> Result<BIdeal> {
        let f = e.fq();
        let mut rows: Vec<(Poly, Poly)> = Vec::new();
        for g in &generators {
            let (a, b) = as_polys(g)?;
            // g and w g span the B-ideal as an A-module
            rows.push((b.mul(f, e.d()), a.clone()));
            rows.push((a, b.clone()));
        }
        let (alpha, beta, gamma) = module_hnf(f, rows)?;
        Ok(BIdeal { generators, alpha, beta, gamma })
    }

    fn from_hnf(alpha: Poly, beta: Poly, gamma: Poly) -> BIdeal {
        let generators = vec![
            EllElem::from_polys(alpha.clone(), beta.clone()),
            EllElem::from_polys(Poly::zero(), gamma.clone()),
        ];
        BIdeal { generators, alpha, beta, gamma }
    }

    pub fn unit(e: &Ext) -> BIdeal {
        let _ = e;
        Self::from_hnf(Poly::one(), Poly::zero(), Poly::one())
    }

    /// deg of the norm; also the F_q-dimension of B/J.
    pub fn norm_deg(&self) -> usize {
        (self.alpha.deg() + self.gamma.deg()) as usize
    }
    pub fn is_unit(&self) -> bool {
        self.norm_deg() == 0
    }

    /// Reduced representative of x modulo J, as coordinates (a', b').
    fn reduce_polys(&self, f: &Fq, a: &Poly, b: &Poly) -> (Poly, Poly) {
        let (q, a1) = a.divrem(f, &self.alpha);
        let b1 = b.sub(f, &q.mul(f, &self.beta)).rem(f, &self.gamma);
        (a1, b1)
    }

    pub fn reduce(&self, e: &Ext, x: &EllElem) -> Result<EllElem> {
        let (a, b) = as_polys(x)?;
        let (a1, b1) = self.reduce_polys(e.fq(), &a, &b);
        Ok(EllElem::from_polys(a1, b1))
    }

    pub fn contains(&self, e: &Ext, x: &EllElem) -> bool {
        match as_polys(x) {
            Ok((a, b)) => {
                let (a1, b1) = self.reduce_polys(e.fq(), &a, &b);
                a1.is_zero() && b1.is_zero()
            }
            Err(_) => false,
        }
    }

    pub fn mul(&self, e: &Ext, o: &BIdeal) -> Result<BIdeal> {
        let mut gens = Vec::new();
        for x in &self.generators {
            for y in &o.generators {
                gens.push(e.mul(x, y));
            }
        }
        let h = BIdeal::new(e, gens)?;
        Ok(Self::from_hnf(h.alpha, h.beta, h.gamma))
    }

    pub fn conj(&self, e: &Ext) -> Result<BIdeal> {
        let h = BIdeal::new(e, self.generators.iter().map(|x| e.conj(x)).collect())?;
        Ok(Self::from_hnf(h.alpha, h.beta, h.gamma))
    }

    pub fn pow(&self, e: &Ext, n: u32) -> Result<BIdeal> {
        let mut acc = BIdeal::unit(e);
        for _ in 0..n {
            acc = acc.mul(e, self)?;
        }
        Ok(acc)
    }

    /// A generator when the ideal is principal.
    pub fn principal_generator(&self, e: &Ext) -> Option<EllElem> {
        let f = e.fq();
        let n = self.norm_deg() as i64;
        let d = e.deg_d() as i64;
        // deg N(a + b w) = max(2 deg a, 2 deg b + d)
        let na = (n / 2 + 1) as usize;
        let nb = if n >= d { ((n - d) / 2 + 1) as usize } else { 0 };
        for b in Poly::all_below(f, nb) {
            for a in Poly::all_below(f, na) {
                if a.is_zero() && b.is_zero() {
                    continue;
                }
                let x = EllElem::from_polys(a, b.clone());
                let deg_n = e.norm(&x).num.deg();
                if deg_n == n && self.contains(e, &x) {
                    return Some(x);
                }
            }
        }
        None
    }

    pub fn is_principal(&self, e: &Ext) -> bool {
        self.principal_generator(e).is_some()
    }

    /// I ~ J iff I conj(J) is principal.
    pub fn equivalent(&self, e: &Ext, o: &BIdeal) -> Result<bool> {
        Ok(self.mul(e, &o.conj(e)?)?.is_principal(e))
    }

    pub fn to_json(&self, e: &Ext) -> IdealJson {
        let _ = e;
        IdealJson { alpha: self.alpha.to_ints(), beta: self.beta.to_ints(), gamma: self.gamma.to_ints() }
    }

    pub fn fmt(&self, e: &Ext) -> String {
        let f = e.fq();
        format!(
            "<{} + ({})w, ({})w>",
            self.alpha.fmt_with(f),
            self.beta.fmt_with(f),
            self.gamma.fmt_with(f)
        )
    }
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct IdealJson {
    pub alpha: Vec<u64>,
    pub beta: Vec<u64>,
    pub gamma: Vec<u64>,
}

/// Hermite basis (alpha, beta), (0, gamma) of the A-module spanned by `rows`.
fn module_hnf(f: &Fq, mut rows: Vec<(Poly, Poly)>) -> Result<(Poly, Poly, Poly)> {
    rows.retain(|(a, b)| !(a.is_zero() && b.is_zero()));
    loop {
        let nz: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i].0.is_zero()).collect();
        if nz.len() <= 1 {
            break;
        }
        let piv = *nz.iter().min_by_key(|&&i| rows[i].0.deg()).unwrap();
        let (pa, pb) = rows[piv].clone();
        for &i in &nz {
            if i == piv {
                continue;
            }
            let q = rows[i].0.divrem(f, &pa).0;
            rows[i] = (rows[i].0.sub(f, &q.mul(f, &pa)), rows[i].1.sub(f, &q.mul(f, &pb)));
        }
    }
    let piv = (0..rows.len())
        .find(|&i| !rows[i].0.is_zero())
        .ok_or_else(|| Error::Validation("ideal must be nonzero".into()))?;
    let (pa, pb) = rows.swap_remove(piv);
    let gamma = rows.iter().fold(Poly::zero(), |g, (_, b)| g.gcd(f, b));
    if gamma.is_zero() {
        return Err(Error::Validation("ideal must be nonzero".into()));
    }
    let li = f.inv_nz(pa.lead());
    let alpha = pa.scale(f, li);
    let beta = pb.scale(f, li).rem(f, &gamma);
    Ok((alpha, beta, gamma))
}

/// The finite ring B/J with elements stored as coordinate vectors.
#[derive(Clone, Debug)]
pub struct QuotRing {
    pub ideal: BIdeal,
    da: usize,
    dg: usize,
}

/// Coordinates of an element of B/J.
pub type QElem = Vec<FqElem>;

impl QuotRing {
    pub fn new(ideal: BIdeal) -> QuotRing {
        let da = ideal.alpha.deg() as usize;
        let dg = ideal.gamma.deg() as usize;
        QuotRing { ideal, da, dg }
    }
    pub fn dim(&self) -> usize {
        self.da + self.dg
    }
    pub fn size(&self, f: &Fq) -> usize {
        f.q().pow(self.dim() as u32)
    }
    fn pack(&self, a: &Poly, b: &Poly) -> QElem {
        let mut out = Vec::with_capacity(self.dim());
        out.extend((0..self.da).map(|i| a.coeff(i)));
        out.extend((0..self.dg).map(|i| b.coeff(i)));
        out
    }
    fn unpack(&self, x: &[FqElem]) -> (Poly, Poly) {
        (Poly::from_coeffs(x[..self.da].to_vec()), Poly::from_coeffs(x[self.da..].to_vec()))
    }
    pub fn reduce(&self, e: &Ext, x: &EllElem) -> Result<QElem> {
        let (a, b) = as_polys(x)?;
        let (a1, b1) = self.ideal.reduce_polys(e.fq(), &a, &b);
        Ok(self.pack(&a1, &b1))
    }
    pub fn lift(&self, x: &[FqElem]) -> EllElem {
        let (a, b) = self.unpack(x);
        EllElem::from_polys(a, b)
    }
    pub fn zero(&self) -> QElem {
        vec![FqElem::ZERO; self.dim()]
    }
    pub fn one(&self, e: &Ext) -> QElem {
        self.reduce(e, &EllElem::one()).unwrap()
    }
    pub fn add(&self, f: &Fq, x: &[FqElem], y: &[FqElem]) -> QElem {
        x.iter().zip(y).map(|(&a, &b)| f.add(a, b)).collect()
    }
    pub fn mul(&self, e: &Ext, x: &[FqElem], y: &[FqElem]) -> QElem {
        let f = e.fq();
        let (a1, b1) = self.unpack(x);
        let (a2, b2) = self.unpack(y);
        let a = a1.mul(f, &a2).add(f, &b1.mul(f, &b2).mul(f, e.d()));
        let b = a1.mul(f, &b2).add(f, &b1.mul(f, &a2));
        let (a, b) = self.ideal.reduce_polys(f, &a, &b);
        self.pack(&a, &b)
    }
}

/// A 3x3 matrix over B/J, flattened row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QMat(pub Vec<FqElem>);

impl QuotRing {
    pub fn mat_reduce(&self, e: &Ext, g: &crate::unitary::UMatrix) -> Result<QMat> {
        let mut out = Vec::with_capacity(9 * self.dim());
        for i in 0..3 {
            for j in 0..3 {
                out.extend(self.reduce(e, g.get(i, j))?);
            }
        }
        Ok(QMat(out))
    }
    pub fn mat_identity(&self, e: &Ext) -> QMat {
        let one = self.one(e);
        let zero = self.zero();
        let mut out = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                out.extend(if i == j { one.clone() } else { zero.clone() });
            }
        }
        QMat(out)
    }
    fn entry<'a>(&self, m: &'a QMat, i: usize, j: usize) -> &'a [FqElem] {
        let d = self.dim();
        &m.0[(3 * i + j) * d..(3 * i + j + 1) * d]
    }
    pub fn mat_mul(&self, e: &Ext, x: &QMat, y: &QMat) -> QMat {
        let f = e.fq();
        let mut out = Vec::with_capacity(x.0.len());
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = self.zero();
                for k in 0..3 {
                    let p = self.mul(e, self.entry(x, i, k), self.entry(y, k, j));
                    acc = self.add(f, &acc, &p);
                }
                out.extend(acc);
            }
        }
        QMat(out)
    }
}

/// Subgroup of a finite matrix group generated by `gens`.
pub fn qmat_closure(ring: &QuotRing, e: &Ext, gens: &[QMat], bound: usize) -> Result<Vec<QMat>> {
    let id = ring.mat_identity(e);
    let mut seen: HashSet<QMat> = HashSet::from([id.clone()]);
    let mut order = vec![id];
    let mut i = 0;
    let gens: Vec<QMat> = {
        let mut g: Vec<QMat> = gens.to_vec();
        g.sort();
        g.dedup();
        g
    };
    while i < order.len() {
        let x = order[i].clone();
        for g in &gens {
            let y = ring.mat_mul(e, &x, g);
            if seen.insert(y.clone()) {
                if seen.len() > bound {
                    return Err(Error::Cap(format!("image group exceeds {bound} elements")));
                }
                order.push(y);
            }
        }
        i += 1;
    }
    Ok(order)
}

#[derive(Clone, Debug)]
pub struct ClassGroupData {
    pub order: usize,
    pub representatives: Vec<BIdeal>,
}

/// All ideals with norm degree exactly n, in a deterministic order.
pub fn ideals_of_norm_degree(e: &Ext, n: usize) -> Vec<BIdeal> {
    let f = e.fq();
    let mut out = Vec::new();
    for da in 0..=n {
        let dg = n - da;
        for alpha in Poly::monic_of_degree(f, da) {
            for gamma in Poly::monic_of_degree(f, dg) {
                for beta in Poly::all_below(f, dg) {
                    if is_ideal_basis(f, e.d(), &alpha, &beta, &gamma) {
                        out.push(BIdeal::from_hnf(alpha.clone(), beta, gamma.clone()));
                    }
                }
            }
        }
    }
    out
}

fn in_module(f: &Fq, alpha: &Poly, beta: &Poly, gamma: &Poly, x: &Poly, y: &Poly) -> bool {
    let (q, r) = x.divrem(f, alpha);
    r.is_zero() && y.sub(f, &q.mul(f, beta)).rem(f, gamma).is_zero()
}

fn is_ideal_basis(f: &Fq, d: &Poly, alpha: &Poly, beta: &Poly, gamma: &Poly) -> bool {
    // w (x + y w) = y D + x w
    in_module(f, alpha, beta, gamma, &beta.mul(f, d), alpha) && in_module(f, alpha, beta, gamma, &gamma.mul(f, d), &Poly::zero())
}

/// Class group by enumerating ideals of norm degree at most `norm_bound`.
pub fn class_group(e: &Ext, norm_bound: usize, deg_limit: usize) -> Result<ClassGroupData> {
    if e.deg_d() > deg_limit {
        return Err(Error::Cap(format!("deg D = {} exceeds the class group limit {deg_limit}", e.deg_d())));
    }
    let mut reps: Vec<BIdeal> = Vec::new();
    for n in 0..=norm_bound {
        for ideal in ideals_of_norm_degree(e, n) {
            let mut new = true;
            for r in &reps {
                if ideal.equivalent(e, r)? {
                    new = false;
                    break;
                }
            }
            if new {
                reps.push(ideal);
            }
        }
    }
    Ok(ClassGroupData { order: reps.len(), representatives: reps })
}

/// Default class group computation: every class of a genus-g curve with a
/// ramified point at infinity has a representative of norm degree at most g.
pub fn class_group_default(e: &Ext) -> Result<ClassGroupData> {
    class_group(e, e.m() + 1, 3)
}

/// Affine points of y^2 = D(x) over F_q plus the point at infinity.
pub fn curve_point_count(e: &Ext) -> usize {
    let f = e.fq();
    let affine: usize = f
        .elements()
        .map(|x| {
            let v = e.d().eval(f, x);
            f.elements().filter(|&y| f.mul(y, y) == v).count()
        })
        .sum();
    affine + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(d: &[i64]) -> Ext {
        let f = Fq::new(3, 1, None).unwrap();
        let d = Poly::from_ints(&f, d);
        Ext::new(f, d).unwrap()
    }

    #[test]
    fn ideal_of_omega() {
        let e = ext(&[0, 1]);
        let j = BIdeal::new(&e, vec![EllElem::omega()]).unwrap();
        // (w) = t A + w A
        assert_eq!(j.alpha, Poly::t());
        assert!(j.beta.is_zero());
        assert!(j.gamma.is_one());
        assert_eq!(j.norm_deg(), 1);
        assert!(j.contains(&e, &EllElem::omega()));
        assert!(!j.contains(&e, &EllElem::one()));
        let j2 = j.pow(&e, 2).unwrap();
        assert_eq!(j2.norm_deg(), 2);
        assert_eq!(j2, BIdeal::new(&e, vec![EllElem::from_polys(Poly::t(), Poly::zero())]).unwrap());
    }

    #[test]
    fn class_numbers() {
        let e = ext(&[0, 1]);
        assert_eq!(class_group_default(&e).unwrap().order, 1);
        let e3 = ext(&[0, -1, 0, 1]);
        assert_eq!(curve_point_count(&e3), 4);
        assert_eq!(class_group_default(&e3).unwrap().order, 4);
    }

    #[test]
    fn quotient_ring_mul() {
        let e = ext(&[0, -1, 0, 1]);
        let j = BIdeal::new(&e, vec![EllElem::omega()]).unwrap();
        let r = QuotRing::new(j);
        let w = r.reduce(&e, &EllElem::omega()).unwrap();
        assert_eq!(w, r.zero());
        let x = EllElem::from_polys(Poly::from_ints(e.fq(), &[1, 1]), Poly::one());
        let y = EllElem::from_polys(Poly::from_ints(e.fq(), &[2, 0, 1]), Poly::t());
        let lhs = r.mul(&e, &r.reduce(&e, &x).unwrap(), &r.reduce(&e, &y).unwrap());
        assert_eq!(lhs, r.reduce(&e, &e.mul(&x, &y)).unwrap());
    }
}
