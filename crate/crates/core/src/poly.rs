//! Dense univariate polynomials over F_q.

use std::fmt::Write as _;

use crate::fq::{Fq, FqElem};

/// Little-endian coefficients without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    c: Vec<FqElem>,
}

/// Degree marker for the zero polynomial.
pub const DEG_ZERO: i64 = i64::MIN;

impl Poly {
    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }
    pub fn one() -> Poly {
        Poly { c: vec![FqElem::ONE] }
    }
    pub fn constant(a: FqElem) -> Poly {
        Poly::from_coeffs(vec![a])
    }
    /// `a * t^n`
    pub fn monomial(a: FqElem, n: usize) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![FqElem::ZERO; n + 1];
        c[n] = a;
        Poly { c }
    }
    pub fn t() -> Poly {
        Poly::monomial(FqElem::ONE, 1)
    }
    pub fn from_coeffs(mut c: Vec<FqElem>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }
    pub fn from_ints(f: &Fq, c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&x| f.from_int(x)).collect())
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.c
    }
    #[inline]
    pub fn coeff(&self, i: usize) -> FqElem {
        self.c.get(i).copied().unwrap_or(FqElem::ZERO)
    }
    #[inline]
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == FqElem::ONE
    }
    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }
    /// Degree, with `DEG_ZERO` for the zero polynomial.
    #[inline]
    pub fn deg(&self) -> i64 {
        if self.c.is_empty() {
            DEG_ZERO
        } else {
            self.c.len() as i64 - 1
        }
    }
    pub fn lead(&self) -> FqElem {
        self.c.last().copied().unwrap_or(FqElem::ZERO)
    }

    pub fn add(&self, f: &Fq, o: &Poly) -> Poly {
        let (long, short) = if self.c.len() >= o.c.len() { (self, o) } else { (o, self) };
        let mut c = long.c.clone();
        for (i, &x) in short.c.iter().enumerate() {
            c[i] = f.add(c[i], x);
        }
        Poly::from_coeffs(c)
    }
    pub fn neg(&self, f: &Fq) -> Poly {
        Poly { c: self.c.iter().map(|&x| f.neg(x)).collect() }
    }
    pub fn sub(&self, f: &Fq, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect();
        Poly::from_coeffs(c)
    }
    pub fn mul(&self, f: &Fq, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![FqElem::ZERO; self.c.len() + o.c.len() - 1];
        for (i, &x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in o.c.iter().enumerate() {
                c[i + j] = f.add(c[i + j], f.mul(x, y));
            }
        }
        Poly::from_coeffs(c)
    }
    pub fn scale(&self, f: &Fq, a: FqElem) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        Poly { c: self.c.iter().map(|&x| f.mul(x, a)).collect() }
    }
    /// Multiplication by t^n.
    pub fn shift(&self, n: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![FqElem::ZERO; n];
        c.extend_from_slice(&self.c);
        Poly { c }
    }
    pub fn pow(&self, f: &Fq, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base);
            }
            base = base.mul(f, &base);
            e >>= 1;
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, f: &Fq, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        if self.c.len() < d.c.len() {
            return (Poly::zero(), self.clone());
        }
        let li = f.inv_nz(d.lead());
        let mut r = self.c.clone();
        let mut qc = vec![FqElem::ZERO; self.c.len() - d.c.len() + 1];
        for k in (0..qc.len()).rev() {
            let top = r[k + d.c.len() - 1];
            if top.is_zero() {
                continue;
            }
            let m = f.mul(top, li);
            qc[k] = m;
            for (j, &dj) in d.c.iter().enumerate() {
                r[k + j] = f.sub(r[k + j], f.mul(m, dj));
            }
        }
        r.truncate(d.c.len() - 1);
        (Poly::from_coeffs(qc), Poly::from_coeffs(r))
    }
    pub fn rem(&self, f: &Fq, d: &Poly) -> Poly {
        self.divrem(f, d).1
    }
    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, f: &Fq, d: &Poly) -> Option<Poly> {
        let (q, r) = self.divrem(f, d);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self, f: &Fq) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(f, f.inv_nz(self.lead()))
    }
    pub fn is_monic(&self) -> bool {
        self.lead() == FqElem::ONE
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, f: &Fq, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(f, &b);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// Returns (g, s, t) with s*a + t*b = g monic.
    pub fn xgcd(&self, f: &Fq, o: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(f, &r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(f, &q.mul(f, &s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(f, &q.mul(f, &t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let li = f.inv_nz(r0.lead());
        (r0.scale(f, li), s0.scale(f, li), t0.scale(f, li))
    }

    pub fn derivative(&self, f: &Fq) -> Poly {
        let c = self.c.iter().enumerate().skip(1).map(|(i, &x)| f.mul(x, f.from_int(i as i64))).collect();
        Poly::from_coeffs(c)
    }
    pub fn is_squarefree(&self, f: &Fq) -> bool {
        !self.is_zero() && self.gcd(f, &self.derivative(f)).deg() == 0
    }
    pub fn eval(&self, f: &Fq, x: FqElem) -> FqElem {
        self.c.iter().rev().fold(FqElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// All polynomials of degree < n, in index order (zero first).
    pub fn all_below(f: &Fq, n: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = f.q();
        let total = q.checked_pow(n as u32).expect("enumeration too large");
        (0..total).map(move |mut idx| {
            let mut c = Vec::with_capacity(n);
            for _ in 0..n {
                c.push(FqElem((idx % q) as u16));
                idx /= q;
            }
            Poly::from_coeffs(c)
        })
    }

    /// Monic polynomials of degree exactly n.
    pub fn monic_of_degree(f: &Fq, n: usize) -> impl Iterator<Item = Poly> + '_ {
        Poly::all_below(f, n).map(move |p| p.add(f, &Poly::monomial(FqElem::ONE, n)))
    }

    pub fn fmt_with(&self, f: &Fq) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, &c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !s.is_empty() {
                s.push_str(" + ");
            }
            let cs = f.fmt_elem(c);
            let cs = if f.r() > 1 && i > 0 { format!("({cs})") } else { cs };
            match (i, c == FqElem::ONE) {
                (0, _) => s.push_str(&cs),
                (1, true) => s.push('t'),
                (1, false) => write!(s, "{cs}t").unwrap(),
                (_, true) => write!(s, "t^{i}").unwrap(),
                (_, false) => write!(s, "{cs}t^{i}").unwrap(),
            }
        }
        s
    }

    /// Coefficients as integers via the index encoding of F_q.
    pub fn to_ints(&self) -> Vec<u64> {
        self.c.iter().map(|x| x.0 as u64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_identity() {
        let f = Fq::new(5, 1, None).unwrap();
        let a = Poly::from_ints(&f, &[1, 2, 3, 4, 1]);
        let b = Poly::from_ints(&f, &[2, 0, 3]);
        let (q, r) = a.divrem(&f, &b);
        assert!(r.deg() < b.deg());
        assert_eq!(q.mul(&f, &b).add(&f, &r), a);
    }

    #[test]
    fn xgcd_bezout() {
        let f = Fq::new(3, 1, None).unwrap();
        let a = Poly::from_ints(&f, &[0, 2, 0, 1]);
        let b = Poly::from_ints(&f, &[1, 1, 1]);
        let (g, s, t) = a.xgcd(&f, &b);
        assert_eq!(s.mul(&f, &a).add(&f, &t.mul(&f, &b)), g);
        assert_eq!(g, a.gcd(&f, &b));
    }

    #[test]
    fn squarefree() {
        let f = Fq::new(3, 1, None).unwrap();
        assert!(Poly::from_ints(&f, &[0, -1, 0, 1]).is_squarefree(&f));
        assert!(!Poly::from_ints(&f, &[0, 0, 1]).is_squarefree(&f));
        assert_eq!(Poly::zero().deg(), DEG_ZERO);
    }

    #[test]
    fn formatting() {
        let f = Fq::new(3, 1, None).unwrap();
        assert_eq!(Poly::from_ints(&f, &[0, -1, 0, 1]).fmt_with(&f), "t^3 + 2t");
    }
}
