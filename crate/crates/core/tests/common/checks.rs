//! Property bodies shared by the random suites and the acceptance run.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use unitree::local::{apartment_vertex, neighbors, tree_act, Vertex};
use unitree::unitary::{
    boundary_act, boundary_line, bruhat_decompose, is_unitary, line_act, line_boundary, mk_s, mk_torus, mk_ua, BPoint,
    UMatrix,
};
use unitree::*;

use super::*;

pub type Check = std::result::Result<(), TestCaseError>;
pub type RawEll = (RawRat, RawRat);

pub fn fq_axioms(e: &Ext, a: u16, b: u16, c: u16) -> Check {
    let f = e.fq();
    let q = f.q() as u16;
    let (a, b, c) = (FqElem(a % q), FqElem(b % q), FqElem(c % q));
    prop_assert_eq!(f.add(a, b), f.add(b, a));
    prop_assert_eq!(f.mul(a, b), f.mul(b, a));
    prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
    prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
    prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
    prop_assert_eq!(f.add(a, FqElem::ZERO), a);
    prop_assert_eq!(f.mul(a, FqElem::ONE), a);
    prop_assert_eq!(f.add(a, f.neg(a)), FqElem::ZERO);
    if a.is_zero() {
        prop_assert!(f.inv(a).is_err());
    } else {
        prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FqElem::ONE);
    }
    Ok(())
}

pub fn ell_axioms(e: &Ext, x: &RawEll, y: &RawEll, z: &RawEll) -> Check {
    let (x, y, z) = (ell(e, x), ell(e, y), ell(e, z));
    prop_assert_eq!(e.add(&x, &y), e.add(&y, &x));
    prop_assert_eq!(e.mul(&x, &y), e.mul(&y, &x));
    prop_assert_eq!(e.mul(&e.mul(&x, &y), &z), e.mul(&x, &e.mul(&y, &z)));
    prop_assert_eq!(e.mul(&x, &e.add(&y, &z)), e.add(&e.mul(&x, &y), &e.mul(&x, &z)));
    prop_assert_eq!(e.sub(&e.add(&x, &y), &y), x.clone());
    if !x.is_zero() {
        prop_assert!(e.mul(&x, &e.inv(&x).unwrap()).is_one());
    }
    Ok(())
}

pub fn conj_norm_trace(e: &Ext, x: &RawEll, y: &RawEll) -> Check {
    let f = e.fq();
    let (x, y) = (ell(e, x), ell(e, y));
    prop_assert_eq!(e.conj(&e.conj(&x)), x.clone());
    prop_assert_eq!(e.conj(&e.mul(&x, &y)), e.mul(&e.conj(&x), &e.conj(&y)));
    prop_assert_eq!(e.conj(&e.add(&x, &y)), e.add(&e.conj(&x), &e.conj(&y)));
    prop_assert_eq!(e.mul(&x, &e.conj(&x)), EllElem::new(e.norm(&x), RatF::zero()));
    prop_assert_eq!(e.add(&x, &e.conj(&x)), EllElem::new(e.trace(&x), RatF::zero()));
    prop_assert_eq!(e.norm(&e.mul(&x, &y)), e.norm(&x).mul(f, &e.norm(&y)));
    prop_assert_eq!(e.trace(&e.add(&x, &y)), e.trace(&x).add(f, &e.trace(&y)));
    Ok(())
}

pub fn valuation_axioms(e: &Ext, x: &RawEll, y: &RawEll) -> Check {
    let (x, y) = (ell(e, x), ell(e, y));
    prop_assert_eq!(e.val_q(&x).is_none(), x.is_zero());
    prop_assert_eq!(e.val_q(&e.conj(&x)), e.val_q(&x));
    if let (Some(a), Some(b)) = (e.val_q(&x), e.val_q(&y)) {
        prop_assert_eq!(e.val_q(&e.mul(&x, &y)), Some(a + b));
        if let Some(s) = e.val_q(&e.add(&x, &y)) {
            prop_assert!(s >= a.min(b));
            if a != b {
                prop_assert_eq!(s, a.min(b));
            }
        }
    }
    if let Some(v) = e.val_q(&EllElem::new(e.norm(&x), RatF::zero())) {
        prop_assert_eq!(v % 2, 0);
    }
    Ok(())
}

pub fn ua_group_law(e: &Ext, u: &RawEll, b: &RawRat, x: &RawEll, c: &RawRat) -> Check {
    let (u, v) = hpair(e, u, b);
    let (x, y) = hpair(e, x, c);
    let lhs = mk_ua(e, &u, &v).unwrap().mul(e, &mk_ua(e, &x, &y).unwrap());
    let w = e.sub(&e.add(&v, &y), &e.mul(&e.conj(&u), &x));
    prop_assert_eq!(lhs, mk_ua(e, &e.add(&u, &x), &w).unwrap());
    Ok(())
}

pub fn ua_commutator(e: &Ext, u: &RawEll, b: &RawRat, x: &RawEll, c: &RawRat) -> Check {
    let (u, v) = hpair(e, u, b);
    let (x, y) = hpair(e, x, c);
    let g = mk_ua(e, &u, &v).unwrap();
    let h = mk_ua(e, &x, &y).unwrap();
    let comm = g.mul(e, &h).mul(e, &g.inv(e)).mul(e, &h.inv(e));
    let w = e.sub(&e.mul(&u, &e.conj(&x)), &e.mul(&e.conj(&u), &x));
    prop_assert!(e.hpair0_check(&EllElem::zero(), &w));
    prop_assert_eq!(comm, mk_ua(e, &EllElem::zero(), &w).unwrap());
    Ok(())
}

pub fn constructor_unitary(e: &Ext, g: &RawGen) -> Check {
    prop_assert!(is_unitary(e, gen_matrix(e, g).m()));
    Ok(())
}

pub fn bruhat_recomposes(e: &Ext, gens: &[RawGen]) -> Check {
    let g = product(e, gens);
    prop_assert!(is_unitary(e, g.m()));
    let bf = bruhat_decompose(e, &g).unwrap();
    prop_assert!(bf.b.is_upper_triangular());
    prop_assert_eq!(bf.recompose(e), g);
    Ok(())
}

pub fn boundary_action_law(e: &Ext, g: &[RawGen], h: &[RawGen], xi: &RawPoint) -> Check {
    let (g, h, xi) = (product(e, g), product(e, h), point(e, xi));
    prop_assert_eq!(boundary_act(e, &UMatrix::identity(), &xi).unwrap(), xi.clone());
    let left = boundary_act(e, &g.mul(e, &h), &xi).unwrap();
    let right = boundary_act(e, &g, &boundary_act(e, &h, &xi).unwrap()).unwrap();
    prop_assert_eq!(left, right);
    Ok(())
}

pub fn line_equivariance(e: &Ext, g: &[RawGen], xi: &RawPoint) -> Check {
    let (g, xi) = (product(e, g), point(e, xi));
    let line = boundary_line(e, &xi);
    prop_assert_eq!(line_boundary(e, &line).unwrap(), xi.clone());
    let moved = boundary_act(e, &g, &xi).unwrap();
    prop_assert_eq!(boundary_line(e, &moved), line_act(e, &g, &line));
    if moved == BPoint::Infinity {
        prop_assert!(line_act(e, &g, &line).rep()[2].is_zero());
    }
    Ok(())
}

/// torus(x) v_i = v_{i - 2 val(x)} and s v_i = v_{-i}.
pub fn apartment_formulas(e: &Ext, x: &RawEll, i: i64) -> Check {
    let x = ell(e, x);
    let v = apartment_vertex(i);
    prop_assert_eq!(tree_act(e, &mk_s(e), &v).unwrap(), apartment_vertex(-i));
    if let Some(val) = e.val_q(&x) {
        let a = mk_torus(e, &x).unwrap();
        prop_assert_eq!(tree_act(e, &a, &v).unwrap(), apartment_vertex(i - 2 * val));
    }
    Ok(())
}

pub fn neighbor_equivariance(e: &Ext, g: &[RawGen], v: &Vertex) -> Check {
    let g = product(e, g);
    let gv = tree_act(e, &g, v).unwrap();
    let mut moved: Vec<Vertex> = neighbors(e, v).unwrap().iter().map(|w| tree_act(e, &g, w).unwrap()).collect();
    let mut direct = neighbors(e, &gv).unwrap();
    moved.sort();
    direct.sort();
    prop_assert_eq!(moved, direct);
    Ok(())
}
