//! Unipotent radicals of boundary stabilizers, and finite-order census.

use std::collections::BTreeMap;

use serde::Serialize;

use super::linalg::{solve, Equation};
use super::search::{b_equations, monomials};
use super::{enumerate_members, SubgroupSpec};
use crate::ell::{EllElem, Ext};
use crate::error::{Error, Result};
use crate::fq::FqElem;
use crate::ideal::{BIdeal, QuotRing};
use crate::poly::Poly;
use crate::ratf::RatF;
use crate::unitary::{mk_guv, ua_unchecked, BPoint, UMatrix};

fn lcm(e: &Ext, a: &Poly, b: &Poly) -> Poly {
    let f = e.fq();
    let g = a.gcd(f, b);
    a.mul(f, b).div_exact(f, &g).expect("gcd divides").monic(f)
}

fn den_of(e: &Ext, x: &EllElem) -> Poly {
    lcm(e, &x.a.den, &x.b.den)
}

/// Elements g_xi^{-1} u_a(x, y) g_xi of the subgroup with x, y in
/// delta^{-2} B, numerators of pole order at most the window.
#[derive(Clone, Debug)]
pub struct CuspFiltration {
    pub point: BPoint,
    pub window: i64,
    /// (x, y, element), sorted by element
    pub elements: Vec<(EllElem, EllElem, UMatrix)>,
}

impl CuspFiltration {
    /// Elements with x = 0.
    pub fn center(&self) -> Vec<&UMatrix> {
        self.elements.iter().filter(|(x, _, _)| x.is_zero()).map(|(_, _, g)| g).collect()
    }
    /// One element for each value of x.
    pub fn quotient_basis(&self) -> Vec<&UMatrix> {
        let mut seen: BTreeMap<String, &UMatrix> = BTreeMap::new();
        for (x, _, g) in &self.elements {
            seen.entry(format!("{x:?}")).or_insert(g);
        }
        seen.into_values().collect()
    }
}

pub fn cusp_filtration(e: &Ext, xi: &BPoint, spec: &SubgroupSpec, window: i64) -> Result<CuspFiltration> {
    let f = e.fq();
    let g = mk_guv(e, xi);
    let gi = g.inv(e);
    let mut delta = Poly::one();
    for x in g.m().iter().flatten() {
        delta = lcm(e, &delta, &den_of(e, x));
    }
    let d2 = delta.mul(f, &delta);
    let d2r = RatF::from(d2.clone());
    let mons = monomials(e.deg_d(), window);
    let nm = mons.len();
    let n = 2 * nm;
    // basis values: coordinates 0..nm are x, nm..2nm are y
    let basis: Vec<EllElem> = mons
        .iter()
        .map(|m| e.mul_k(&m.elem(FqElem::ONE), &RatF::new(f, Poly::one(), d2.clone()).expect("nonzero")))
        .collect();
    let zero = EllElem::zero();
    let contrib = |k: usize| -> UMatrix {
        let u = if k < nm { ua_unchecked(e, &basis[k], &zero) } else { ua_unchecked(e, &zero, &basis[k - nm]) };
        let nmat: [[EllElem; 3]; 3] =
            std::array::from_fn(|i| std::array::from_fn(|j| if i == j { zero.clone() } else { u.get(i, j).clone() }));
        gi.mul(e, &UMatrix::new_unchecked(nmat)).mul(e, &g)
    };
    let contribs: Vec<UMatrix> = (0..n).map(contrib).collect();
    let mut big = Poly::one();
    for c in &contribs {
        for x in c.m().iter().flatten() {
            big = lcm(e, &big, &den_of(e, x));
        }
    }
    let bigr = RatF::from(big.clone());
    let mut modulus = BIdeal::new(e, vec![EllElem::from_polys(big.clone(), Poly::zero())])?;
    if let Some(j) = spec.level() {
        modulus = modulus.mul(e, j)?;
    }
    let ring = QuotRing::new(modulus);
    let mut eqs = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let reds: Vec<Vec<FqElem>> =
                contribs.iter().map(|c| ring.reduce(e, &e.mul_k(c.get(i, j), &bigr))).collect::<Result<_>>()?;
            for k in 0..ring.dim() {
                eqs.push(Equation { coeffs: reds.iter().map(|r| r[k]).collect(), rhs: FqElem::ZERO });
            }
        }
    }
    let space = solve(f, n, &eqs).expect("homogeneous system");
    let xidx: Vec<usize> = (0..nm).collect();
    let mut elements = Vec::new();
    for (_, fiber) in space.fibers(f, &xidx) {
        let xnum = mons
            .iter()
            .enumerate()
            .fold(EllElem::zero(), |acc, (k, m)| e.add(&acc, &m.elem(fiber.origin[k])));
        // d2 T(ynum) = -N(xnum), with x = xnum / d2 and y = ynum / d2
        let tcon: Vec<(usize, EllElem)> = mons
            .iter()
            .enumerate()
            .map(|(k, m)| (nm + k, EllElem::new(e.trace(&m.elem(FqElem::ONE)).mul(f, &d2r), RatF::zero())))
            .collect();
        let rhs = EllElem::new(e.norm(&xnum).neg(f), RatF::zero());
        let Some(fy) = fiber.restrict(f, &b_equations(n, &tcon, &rhs)) else { continue };
        for pt in fy.points(f) {
            let x = e.mul_k(&xnum, &RatF::new(f, Poly::one(), d2.clone())?);
            let ynum = mons.iter().enumerate().fold(EllElem::zero(), |acc, (k, m)| e.add(&acc, &m.elem(pt[nm + k])));
            let y = e.mul_k(&ynum, &RatF::new(f, Poly::one(), d2.clone())?);
            let el = gi.mul(e, &ua_unchecked(e, &x, &y)).mul(e, &g);
            debug_assert!(spec.is_member(e, &el));
            elements.push((x, y, el));
        }
    }
    elements.sort_by(|a, b| a.2.cmp(&b.2));
    if elements.len() <= 1 {
        return Err(Error::Window(format!("no nontrivial unipotent element with window {window}")));
    }
    Ok(CuspFiltration { point: xi.clone(), window, elements })
}

/// Order of g if it is at most `bound`.
pub fn element_order(e: &Ext, g: &UMatrix, bound: usize) -> Option<usize> {
    let mut x = g.clone();
    for k in 1..=bound {
        if x.is_identity() {
            return Some(k);
        }
        x = x.mul(e, g);
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct Census {
    pub deg_bound: i64,
    pub order_bound: usize,
    /// (order, count) over the finite-order elements found
    pub orders: Vec<(usize, usize)>,
    pub elements: usize,
}

impl Census {
    pub fn only_p_powers(&self, p: u64) -> bool {
        self.orders.iter().all(|&(o, _)| crate::quotient::euler::is_power_of(p, o))
    }
    pub fn has_order(&self, n: usize) -> bool {
        self.orders.iter().any(|&(o, _)| o == n)
    }
}

pub fn finite_order_census(e: &Ext, spec: &SubgroupSpec, deg_bound: i64, order_bound: usize) -> Result<Census> {
    let elems = enumerate_members(e, spec, deg_bound)?;
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for g in &elems {
        if let Some(o) = element_order(e, g, order_bound) {
            *hist.entry(o).or_default() += 1;
        }
    }
    Ok(Census { deg_bound, order_bound, orders: hist.into_iter().collect(), elements: elems.len() })
}
