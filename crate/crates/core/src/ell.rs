//! The quadratic extension l = k(w), w^2 = D, and its order B = A[w].

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fq::{Fq, FqElem};
use crate::local::EmbedCache;
use crate::poly::Poly;
use crate::ratf::RatF;

/// `a + b w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EllElem {
    pub a: RatF,
    pub b: RatF,
}

impl EllElem {
    pub fn zero() -> EllElem {
        EllElem { a: RatF::zero(), b: RatF::zero() }
    }
    pub fn one() -> EllElem {
        EllElem { a: RatF::one(), b: RatF::zero() }
    }
    pub fn omega() -> EllElem {
        EllElem { a: RatF::zero(), b: RatF::one() }
    }
    pub fn new(a: RatF, b: RatF) -> EllElem {
        EllElem { a, b }
    }
    pub fn from_polys(a: Poly, b: Poly) -> EllElem {
        EllElem { a: a.into(), b: b.into() }
    }
    pub fn constant(c: FqElem) -> EllElem {
        EllElem { a: RatF::constant(c), b: RatF::zero() }
    }
    #[inline]
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }
    /// True when b = 0, i.e. the element lies in k.
    pub fn in_k(&self) -> bool {
        self.b.is_zero()
    }
    /// Membership in B = A[w].
    pub fn in_b(&self) -> bool {
        self.a.is_poly() && self.b.is_poly()
    }
}

pub(crate) struct ExtInner {
    pub fq: Fq,
    pub d: Poly,
    pub deg_d: usize,
    pub cache: EmbedCache,
}

/// Arithmetic context for l = F_q(t)(sqrt D), D squarefree of odd degree.
#[derive(Clone)]
pub struct Ext(pub(crate) Arc<ExtInner>);

impl std::fmt::Debug for Ext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Ext({:?}, D = {})", self.0.fq, self.0.d.fmt_with(&self.0.fq))
    }
}

impl PartialEq for Ext {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || (self.0.fq == o.0.fq && self.0.d == o.0.d)
    }
}
impl Eq for Ext {}

impl Ext {
    pub fn new(fq: Fq, d: Poly) -> Result<Ext> {
        if d.deg() < 1 || d.deg() % 2 == 0 {
            return Err(Error::Validation("D must have odd positive degree".into()));
        }
        if !d.is_squarefree(&fq) {
            return Err(Error::Validation("D must be squarefree".into()));
        }
        let deg_d = d.deg() as usize;
        let cache = EmbedCache::new(&fq, &d);
        Ok(Ext(Arc::new(ExtInner { fq, d, deg_d, cache })))
    }

    #[inline]
    pub fn fq(&self) -> &Fq {
        &self.0.fq
    }
    pub fn d(&self) -> &Poly {
        &self.0.d
    }
    /// deg D, odd.
    pub fn deg_d(&self) -> usize {
        self.0.deg_d
    }
    /// m with deg D = 2m + 1.
    pub fn m(&self) -> usize {
        (self.0.deg_d - 1) / 2
    }

    pub fn add(&self, x: &EllElem, y: &EllElem) -> EllElem {
        let f = self.fq();
        EllElem { a: x.a.add(f, &y.a), b: x.b.add(f, &y.b) }
    }
    pub fn sub(&self, x: &EllElem, y: &EllElem) -> EllElem {
        let f = self.fq();
        EllElem { a: x.a.sub(f, &y.a), b: x.b.sub(f, &y.b) }
    }
    pub fn neg(&self, x: &EllElem) -> EllElem {
        let f = self.fq();
        EllElem { a: x.a.neg(f), b: x.b.neg(f) }
    }
    pub fn mul(&self, x: &EllElem, y: &EllElem) -> EllElem {
        let f = self.fq();
        if x.b.is_zero() && y.b.is_zero() {
            return EllElem { a: x.a.mul(f, &y.a), b: RatF::zero() };
        }
        let bb = x.b.mul(f, &y.b).mul_poly(f, self.d());
        let a = x.a.mul(f, &y.a).add(f, &bb);
        let b = x.a.mul(f, &y.b).add(f, &x.b.mul(f, &y.a));
        EllElem { a, b }
    }
    pub fn scale(&self, x: &EllElem, c: FqElem) -> EllElem {
        let f = self.fq();
        EllElem { a: x.a.scale(f, c), b: x.b.scale(f, c) }
    }
    pub fn mul_k(&self, x: &EllElem, c: &RatF) -> EllElem {
        let f = self.fq();
        EllElem { a: x.a.mul(f, c), b: x.b.mul(f, c) }
    }
    pub fn conj(&self, x: &EllElem) -> EllElem {
        EllElem { a: x.a.clone(), b: x.b.neg(self.fq()) }
    }
    /// N(x) = a^2 - b^2 D.
    pub fn norm(&self, x: &EllElem) -> RatF {
        let f = self.fq();
        let bb = x.b.mul(f, &x.b).mul_poly(f, self.d());
        x.a.mul(f, &x.a).sub(f, &bb)
    }
    /// T(x) = 2a.
    pub fn trace(&self, x: &EllElem) -> RatF {
        x.a.add(self.fq(), &x.a)
    }
    pub fn norm_trace(&self, x: &EllElem) -> (RatF, RatF) {
        (self.norm(x), self.trace(x))
    }
    pub fn inv(&self, x: &EllElem) -> Result<EllElem> {
        let n = self.norm(x);
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.mul_k(&self.conj(x), &n.inv(self.fq())?))
    }
    pub fn div(&self, x: &EllElem, y: &EllElem) -> Result<EllElem> {
        Ok(self.mul(x, &self.inv(y)?))
    }
    pub fn pow(&self, x: &EllElem, mut e: u32) -> EllElem {
        let mut base = x.clone();
        let mut acc = EllElem::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Integer-normalized valuation at Q: 2 val_P on k, -deg D at w.
    pub fn val_q(&self, x: &EllElem) -> Option<i64> {
        let va = x.a.val_p().map(|v| 2 * v);
        let vb = x.b.val_p().map(|v| 2 * v - self.deg_d() as i64);
        match (va, vb) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// (u, v) lies in H(l,k): N(u) + T(v) = 0.
    pub fn hpair_check(&self, u: &EllElem, v: &EllElem) -> bool {
        self.norm(u).add(self.fq(), &self.trace(v)).is_zero()
    }
    /// (u, v) lies in H(l,k)^0: u = 0 and T(v) = 0.
    pub fn hpair0_check(&self, u: &EllElem, v: &EllElem) -> bool {
        u.is_zero() && self.trace(v).is_zero()
    }

    pub fn fmt(&self, x: &EllElem) -> String {
        let f = self.fq();
        match (x.a.is_zero(), x.b.is_zero()) {
            (true, true) => "0".into(),
            (false, true) => x.a.fmt_with(f),
            (true, false) => format!("({})w", x.b.fmt_with(f)),
            (false, false) => format!("{} + ({})w", x.a.fmt_with(f), x.b.fmt_with(f)),
        }
    }

    pub fn to_json(&self, x: &EllElem) -> EllJson {
        let rf = |r: &RatF| RatFJson { num: r.num.to_ints(), den: r.den.to_ints() };
        EllJson { a: rf(&x.a), b: rf(&x.b) }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct RatFJson {
    pub num: Vec<u64>,
    pub den: Vec<u64>,
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct EllJson {
    pub a: RatFJson,
    pub b: RatFJson,
}
