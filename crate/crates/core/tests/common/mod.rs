#![allow(dead_code)]

pub mod checks;

use proptest::prelude::*;
use unitree::unitary::{mk_s, mk_torus, mk_ua, BPoint, UMatrix};
use unitree::*;

pub fn ext(p: u64, r: u32, d: &[i64]) -> Ext {
    let f = Fq::new(p, r, None).unwrap();
    let d = Poly::from_ints(&f, d);
    Ext::new(f, d).unwrap()
}

/// The contexts exercised by the random suites.
pub fn contexts() -> Vec<Ext> {
    vec![ext(3, 1, &[0, 1]), ext(3, 1, &[0, -1, 0, 1]), ext(5, 1, &[1, 1]), ext(3, 2, &[0, 1])]
}

/// Raw data for a rational function: numerator and monic denominator tail.
pub type RawRat = (Vec<u16>, Vec<u16>);

pub fn raw_rat() -> impl Strategy<Value = RawRat> + Clone {
    (prop::collection::vec(any::<u16>(), 0..4), prop::collection::vec(any::<u16>(), 0..3))
}

pub fn raw_ell() -> impl Strategy<Value = (RawRat, RawRat)> + Clone {
    (raw_rat(), raw_rat())
}

pub fn poly(f: &Fq, c: &[u16]) -> Poly {
    Poly::from_coeffs(c.iter().map(|&x| FqElem(x % f.q() as u16)).collect())
}

pub fn rat(f: &Fq, r: &RawRat) -> RatF {
    let mut den: Vec<FqElem> = r.1.iter().map(|&x| FqElem(x % f.q() as u16)).collect();
    den.push(FqElem::ONE);
    RatF::new(f, poly(f, &r.0), Poly::from_coeffs(den)).unwrap()
}

pub fn ell(e: &Ext, x: &(RawRat, RawRat)) -> EllElem {
    EllElem::new(rat(e.fq(), &x.0), rat(e.fq(), &x.1))
}

/// A pair in H(l,k): v = -N(u)/2 + b w with b in k.
pub fn hpair(e: &Ext, u: &(RawRat, RawRat), b: &RawRat) -> (EllElem, EllElem) {
    let f = e.fq();
    let u = ell(e, u);
    let half = f.inv(f.add(FqElem::ONE, FqElem::ONE)).unwrap();
    let a = e.norm(&u).neg(f).scale(f, half);
    let v = EllElem::new(a, rat(f, b));
    assert!(e.hpair_check(&u, &v));
    (u, v)
}

#[derive(Clone, Debug)]
pub enum RawGen {
    Ua((RawRat, RawRat), RawRat),
    Torus((RawRat, RawRat)),
    S,
}

pub fn raw_gen() -> impl Strategy<Value = RawGen> + Clone {
    prop_oneof![
        (raw_ell(), raw_rat()).prop_map(|(u, b)| RawGen::Ua(u, b)),
        raw_ell().prop_map(RawGen::Torus),
        Just(RawGen::S),
    ]
}

pub fn gen_matrix(e: &Ext, g: &RawGen) -> UMatrix {
    match g {
        RawGen::Ua(u, b) => {
            let (u, v) = hpair(e, u, b);
            mk_ua(e, &u, &v).unwrap()
        }
        RawGen::Torus(t) => {
            let t = ell(e, t);
            if t.is_zero() {
                mk_s(e)
            } else {
                mk_torus(e, &t).unwrap()
            }
        }
        RawGen::S => mk_s(e),
    }
}

pub fn product(e: &Ext, gens: &[RawGen]) -> UMatrix {
    gens.iter().fold(UMatrix::identity(), |acc, g| acc.mul(e, &gen_matrix(e, g)))
}

pub type RawPoint = Option<((RawRat, RawRat), RawRat)>;

pub fn raw_point() -> impl Strategy<Value = RawPoint> + Clone {
    prop::option::weighted(0.9, (raw_ell(), raw_rat()))
}

pub fn point(e: &Ext, x: &RawPoint) -> BPoint {
    match x {
        None => BPoint::Infinity,
        Some((u, b)) => {
            let (u, v) = hpair(e, u, b);
            BPoint::finite(e, u, v).unwrap()
        }
    }
}
