//! Truncated Laurent series in the uniformizer rho of the completion at Q.

use std::sync::Mutex;

use crate::ell::{EllElem, Ext};
use crate::error::{Error, Result};
use crate::fq::{Fq, FqElem};
use crate::poly::Poly;
use crate::ratf::RatF;

/// Precision marker of exact elements.
pub const EXACT: i64 = i64::MAX / 4;

fn clamp(p: i64) -> i64 {
    p.min(EXACT)
}

/// `sum c[i] rho^(v + i)` known modulo `rho^prec`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalElem {
    v: i64,
    c: Vec<FqElem>,
    prec: i64,
}

impl LocalElem {
    pub fn zero() -> LocalElem {
        LocalElem { v: 0, c: Vec::new(), prec: EXACT }
    }
    pub fn one() -> LocalElem {
        Self::monomial(FqElem::ONE, 0)
    }
    /// Zero modulo rho^prec.
    pub fn zero_mod(prec: i64) -> LocalElem {
        LocalElem { v: 0, c: Vec::new(), prec }
    }
    pub fn monomial(a: FqElem, e: i64) -> LocalElem {
        if a.is_zero() {
            return Self::zero();
        }
        LocalElem { v: e, c: vec![a], prec: EXACT }
    }
    /// `sum coeffs[i] rho^(v+i)` modulo rho^prec.
    pub fn from_coeffs(v: i64, coeffs: Vec<FqElem>, prec: i64) -> LocalElem {
        let mut out = LocalElem { v, c: coeffs, prec };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        let keep = (self.prec - self.v).clamp(0, self.c.len() as i64) as usize;
        self.c.truncate(keep);
        while self.c.last().is_some_and(|x| x.is_zero()) {
            self.c.pop();
        }
        let lead = self.c.iter().position(|x| !x.is_zero());
        match lead {
            None => {
                self.c.clear();
                self.v = 0;
            }
            Some(k) if k > 0 => {
                self.c.drain(..k);
                self.v += k as i64;
            }
            _ => {}
        }
    }

    #[inline]
    pub fn prec(&self) -> i64 {
        self.prec
    }
    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }
    /// True when the element is zero modulo its precision.
    #[inline]
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    /// Least exponent with a nonzero coefficient; `None` if zero at precision.
    #[inline]
    pub fn val(&self) -> Option<i64> {
        (!self.c.is_empty()).then_some(self.v)
    }
    /// Valuation, with the precision standing in for an unknown zero.
    fn val_or_prec(&self) -> i64 {
        if self.c.is_empty() {
            self.prec
        } else {
            self.v
        }
    }
    /// Largest exponent with a stored nonzero coefficient.
    pub fn top(&self) -> Option<i64> {
        (!self.c.is_empty()).then(|| self.v + self.c.len() as i64 - 1)
    }
    #[inline]
    pub fn coeff(&self, e: i64) -> FqElem {
        if e < self.v {
            return FqElem::ZERO;
        }
        self.c.get((e - self.v) as usize).copied().unwrap_or(FqElem::ZERO)
    }
    /// (exponent, coefficient) pairs of nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, FqElem)> + '_ {
        self.c.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(move |(i, &x)| (self.v + i as i64, x))
    }

    pub fn with_prec(&self, prec: i64) -> LocalElem {
        let mut out = self.clone();
        out.prec = out.prec.min(prec);
        out.normalize();
        out
    }
    /// Treat the stored terms as exact (used after reducing modulo a lattice).
    pub fn as_exact(&self) -> LocalElem {
        LocalElem { v: self.v, c: self.c.clone(), prec: EXACT }
    }
    /// Terms with exponent < e, as an exact element.
    pub fn below(&self, e: i64) -> LocalElem {
        let mut out = self.as_exact();
        out.prec = e;
        out.normalize();
        out.prec = EXACT;
        out
    }
    /// Terms with exponent >= e (exact part only).
    pub fn from_exp(&self, e: i64) -> LocalElem {
        let c = (e.max(self.v)..self.v + self.c.len() as i64).map(|k| self.coeff(k)).collect();
        LocalElem::from_coeffs(e.max(self.v), c, self.prec)
    }

    pub fn add(&self, f: &Fq, o: &LocalElem) -> LocalElem {
        let prec = self.prec.min(o.prec);
        if o.c.is_empty() {
            return self.with_prec(prec);
        }
        if self.c.is_empty() {
            return o.with_prec(prec);
        }
        let lo = self.v.min(o.v);
        let hi = (self.v + self.c.len() as i64).max(o.v + o.c.len() as i64).min(prec);
        if hi <= lo {
            return Self::zero_mod(prec);
        }
        let c = (lo..hi).map(|e| f.add(self.coeff(e), o.coeff(e))).collect();
        LocalElem::from_coeffs(lo, c, prec)
    }
    pub fn neg(&self, f: &Fq) -> LocalElem {
        LocalElem { v: self.v, c: self.c.iter().map(|&x| f.neg(x)).collect(), prec: self.prec }
    }
    pub fn sub(&self, f: &Fq, o: &LocalElem) -> LocalElem {
        self.add(f, &o.neg(f))
    }
    pub fn scale(&self, f: &Fq, a: FqElem) -> LocalElem {
        if a.is_zero() {
            return Self::zero();
        }
        LocalElem { v: self.v, c: self.c.iter().map(|&x| f.mul(x, a)).collect(), prec: self.prec }
    }
    /// Multiplication by rho^k.
    pub fn shift(&self, k: i64) -> LocalElem {
        LocalElem {
            v: if self.c.is_empty() { 0 } else { self.v + k },
            c: self.c.clone(),
            prec: if self.is_exact() { EXACT } else { self.prec + k },
        }
    }
    pub fn mul(&self, f: &Fq, o: &LocalElem) -> LocalElem {
        if (self.c.is_empty() && self.is_exact()) || (o.c.is_empty() && o.is_exact()) {
            return Self::zero();
        }
        let prec = clamp(
            (self.val_or_prec().saturating_add(o.prec)).min(o.val_or_prec().saturating_add(self.prec)),
        );
        if self.c.is_empty() || o.c.is_empty() {
            return Self::zero_mod(prec);
        }
        let v = self.v + o.v;
        let n = ((self.c.len() + o.c.len() - 1) as i64).min(prec - v).max(0) as usize;
        let mut c = vec![FqElem::ZERO; n];
        for (i, &x) in self.c.iter().enumerate() {
            if x.is_zero() || i >= n {
                continue;
            }
            for (j, &y) in o.c.iter().enumerate().take(n - i) {
                c[i + j] = f.add(c[i + j], f.mul(x, y));
            }
        }
        LocalElem::from_coeffs(v, c, prec)
    }

    /// Inverse, computed to absolute precision at most `want`.
    pub fn inv(&self, f: &Fq, want: i64) -> Result<LocalElem> {
        if self.c.is_empty() {
            return Err(Error::Precision("inverting an element that is zero at working precision".into()));
        }
        let v = self.v;
        if self.is_exact() && self.c.len() == 1 {
            return Ok(LocalElem::monomial(f.inv_nz(self.c[0]), -v));
        }
        if self.is_exact() && want >= EXACT {
            return Err(Error::Precision("inverse of a non-monomial needs a finite precision".into()));
        }
        let rel = if self.is_exact() { EXACT } else { self.prec - v };
        let prec = clamp((-v).saturating_add(rel)).min(want);
        let n = (prec + v).max(0) as usize;
        let a0i = f.inv_nz(self.c[0]);
        let mut b = vec![FqElem::ZERO; n];
        for k in 0..n {
            // sum_{i<=k} a_i b_{k-i} = delta_{k0}
            let mut s = if k == 0 { FqElem::ONE } else { FqElem::ZERO };
            for i in 1..=k.min(self.c.len().saturating_sub(1)) {
                s = f.sub(s, f.mul(self.c[i], b[k - i]));
            }
            b[k] = f.mul(s, a0i);
        }
        Ok(LocalElem::from_coeffs(-v, b, prec))
    }

    /// Galois conjugation rho -> -rho.
    pub fn conj(&self, f: &Fq) -> LocalElem {
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(i, &x)| if (self.v + i as i64).rem_euclid(2) == 1 { f.neg(x) } else { x })
            .collect();
        LocalElem { v: self.v, c, prec: self.prec }
    }

    /// Equality of the known parts at the common precision.
    pub fn agrees(&self, f: &Fq, o: &LocalElem) -> bool {
        self.sub(f, o).is_zero()
    }

    /// Coefficient list starting at exponent `v`, for serialization.
    pub fn digits(&self) -> (i64, Vec<u64>) {
        (self.v, self.c.iter().map(|x| x.0 as u64).collect())
    }
}

/// Expansions of t and w in F_q((rho)), rho = t^m / w.
pub struct EmbedCache {
    fq: Fq,
    d: Poly,
    exact: Option<(LocalElem, LocalElem)>,
    approx: Mutex<Option<(i64, LocalElem, LocalElem)>>,
}

impl EmbedCache {
    pub fn new(fq: &Fq, d: &Poly) -> EmbedCache {
        // D = c t gives s = 1/t = c rho^2 exactly, w = 1/rho
        let exact = (d.deg() == 1 && d.coeff(0).is_zero()).then(|| {
            let c = d.coeff(1);
            (LocalElem::monomial(fq.inv_nz(c), -2), LocalElem::monomial(FqElem::ONE, -1))
        });
        EmbedCache { fq: fq.clone(), d: d.clone(), exact, approx: Mutex::new(None) }
    }

    /// (t, w) with absolute precision at least `n` each.
    fn get(&self, n: i64) -> (LocalElem, LocalElem) {
        if let Some((t, w)) = &self.exact {
            return (t.clone(), w.clone());
        }
        let mut guard = self.approx.lock().unwrap();
        if let Some((have, t, w)) = guard.as_ref() {
            if *have >= n {
                return (t.clone(), w.clone());
            }
        }
        let f = &self.fq;
        let dd = self.d.deg();
        let m = (dd - 1) / 2;
        let work = (n.max(16) * 2).max(n + 2 * m + 12);
        // s = rho^2 * sum_i D_i s^(d-i), iterated from s = 0
        let rho2 = LocalElem::monomial(FqElem::ONE, 2);
        let mut s = LocalElem::zero_mod(work);
        for _ in 0..(work / 2 + 2) {
            let mut acc = LocalElem::zero();
            for i in 0..=dd {
                acc = acc.mul(f, &s).add(f, &LocalElem::monomial(self.d.coeff(i as usize), 0));
            }
            s = rho2.mul(f, &acc).with_prec(work);
        }
        let t = s.inv(f, EXACT).unwrap();
        let mut w = LocalElem::monomial(FqElem::ONE, -1);
        for _ in 0..m {
            w = w.mul(f, &t);
        }
        let have = t.prec().min(w.prec());
        *guard = Some((have, t.clone(), w.clone()));
        (t, w)
    }

    fn embed_poly_with(&self, p: &Poly, t: &LocalElem) -> LocalElem {
        let f = &self.fq;
        let mut acc = LocalElem::zero();
        for i in (0..p.coeffs().len()).rev() {
            acc = acc.mul(f, t).add(f, &LocalElem::monomial(p.coeff(i), 0));
        }
        acc
    }

    fn embed_ratf_with(&self, x: &RatF, t: &LocalElem, want: i64) -> Result<LocalElem> {
        let n = self.embed_poly_with(&x.num, t);
        if x.den.is_one() {
            return Ok(n);
        }
        let d = self.embed_poly_with(&x.den, t);
        Ok(n.mul(&self.fq, &d.inv(&self.fq, want + 2 * x.den.deg().max(0) + 4)?))
    }
}

impl Ext {
    /// Laurent expansion of x at Q, modulo rho^prec.
    pub fn embed(&self, x: &EllElem, prec: i64) -> Result<LocalElem> {
        if x.is_zero() {
            return Ok(LocalElem::zero());
        }
        let cache = &self.0.cache;
        let f = self.fq();
        let degs = [&x.a.num, &x.a.den, &x.b.num, &x.b.den].iter().map(|p| p.deg().max(0)).sum::<i64>();
        let mut work = prec + 2 * degs + 2 * self.deg_d() as i64 + 8;
        for _ in 0..8 {
            let (t, w) = cache.get(work);
            let a = cache.embed_ratf_with(&x.a, &t, work)?;
            let b = cache.embed_ratf_with(&x.b, &t, work)?;
            let r = a.add(f, &b.mul(f, &w));
            if r.prec() >= prec {
                return Ok(r.with_prec(prec));
            }
            work = 2 * work + 8;
        }
        Err(Error::Precision(format!("could not embed to precision {prec}")))
    }

    /// Exact expansion when t and w are exact (D = c t), else modulo rho^prec.
    pub fn embed_poly(&self, p: &Poly, prec: i64) -> Result<LocalElem> {
        self.embed(&EllElem::from_polys(p.clone(), Poly::zero()), prec)
    }
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
    fn d_equal_t_is_exact() {
        let e = ext(&[0, 1]);
        let t = e.embed(&EllElem::from_polys(Poly::t(), Poly::zero()), 10).unwrap();
        assert_eq!(t.val(), Some(-2));
        assert_eq!(t.terms().count(), 1);
        let w = e.embed(&EllElem::omega(), 10).unwrap();
        assert_eq!(w.val(), Some(-1));
        assert_eq!(w.terms().collect::<Vec<_>>(), vec![(-1, FqElem::ONE)]);
    }

    #[test]
    fn omega_squared_is_d() {
        let e = ext(&[0, -1, 0, 1]);
        let f = e.fq().clone();
        let w = e.embed(&EllElem::omega(), 30).unwrap();
        let d = e.embed_poly(e.d(), 30).unwrap();
        assert_eq!(w.val(), Some(-3));
        assert!(w.mul(&f, &w).agrees(&f, &d));
        assert!(w.conj(&f).agrees(&f, &w.neg(&f)));
    }

    #[test]
    fn inverse_roundtrip() {
        let e = ext(&[0, -1, 0, 1]);
        let f = e.fq().clone();
        let x = EllElem::from_polys(Poly::from_ints(&f, &[1, 1]), Poly::one());
        let lx = e.embed(&x, 20).unwrap();
        let li = lx.inv(&f, 20).unwrap();
        let prod = lx.mul(&f, &li);
        assert!(prod.agrees(&f, &LocalElem::one()));
        assert_eq!(e.embed(&e.inv(&x).unwrap(), 20).unwrap().val(), li.val());
    }

    #[test]
    fn precision_propagates() {
        let f = Fq::new(3, 1, None).unwrap();
        let a = LocalElem::from_coeffs(0, vec![FqElem(1), FqElem(2)], 5);
        let b = LocalElem::monomial(FqElem(1), -3);
        assert_eq!(a.mul(&f, &b).prec(), 2);
        assert_eq!(a.add(&f, &b).prec(), 5);
        assert!(LocalElem::zero_mod(4).val().is_none());
    }
}
