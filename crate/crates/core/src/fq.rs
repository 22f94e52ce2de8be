//! Finite fields F_q with q = p^r, p odd.
//!
//! Elements are small indices into precomputed tables; the index of
//! `c_0 + c_1 x + ... + c_{r-1} x^{r-1}` is `sum c_i p^i`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default upper bound on q.
pub const DEFAULT_Q_LIMIT: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FqElem(pub u16);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    p: u16,
    r: u16,
    q: u16,
    modulus: Vec<u16>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

/// Shared arithmetic context for one field.
#[derive(Clone)]
pub struct Fq(Arc<Tables>);

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}(p={}, modulus={:?})", self.q(), self.p(), self.0.modulus)
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}
impl Eq for Fq {}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

// dense little-endian polynomials over F_p, used only while building tables
fn pmod_trim(mut a: Vec<u16>) -> Vec<u16> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn pmod_rem(a: &[u16], m: &[u16], p: u16) -> Vec<u16> {
    let mut a = pmod_trim(a.to_vec());
    let m = pmod_trim(m.to_vec());
    let lead_inv = inv_mod(*m.last().unwrap(), p);
    while a.len() >= m.len() {
        let shift = a.len() - m.len();
        let c = (*a.last().unwrap() as u32 * lead_inv as u32 % p as u32) as u16;
        for (i, &mi) in m.iter().enumerate() {
            let sub = (c as u32 * mi as u32 % p as u32) as u16;
            a[shift + i] = (a[shift + i] + p - sub) % p;
        }
        a = pmod_trim(a);
    }
    a
}

fn inv_mod(a: u16, p: u16) -> u16 {
    (1..p).find(|&x| (a as u32 * x as u32) % p as u32 == 1).unwrap()
}

fn is_irreducible(m: &[u16], p: u16) -> bool {
    let deg = m.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    // trial division by all monic polynomials of degree 1..=deg/2
    for d in 1..=deg / 2 {
        let count = (p as usize).pow(d as u32);
        for idx in 0..count {
            let mut f = digits(idx, p, d);
            f.push(1);
            if pmod_rem(m, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn digits(mut idx: usize, p: u16, len: usize) -> Vec<u16> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((idx % p as usize) as u16);
        idx /= p as usize;
    }
    out
}

impl Fq {
    /// Builds F_{p^r}. With `modulus = None` the lexicographically smallest
    /// monic irreducible polynomial of degree r is used.
    pub fn new(p: u64, r: u32, modulus: Option<&[i64]>) -> Result<Fq> {
        Self::with_limit(p, r, modulus, DEFAULT_Q_LIMIT)
    }

    pub fn with_limit(p: u64, r: u32, modulus: Option<&[i64]>, q_limit: usize) -> Result<Fq> {
        if p == 2 {
            return Err(Error::Validation("characteristic 2 is not supported: p must be odd".into()));
        }
        if !is_prime(p) {
            return Err(Error::Validation(format!("p = {p} is not prime")));
        }
        if r == 0 {
            return Err(Error::Validation("r must be positive".into()));
        }
        let q = (p as usize).checked_pow(r).filter(|&q| q <= q_limit).ok_or_else(|| {
            Error::Validation(format!("q = {p}^{r} exceeds the configured limit {q_limit}"))
        })?;
        let p16 = p as u16;
        let r_us = r as usize;
        let modulus = match modulus {
            Some(m) => {
                let m: Vec<u16> = m.iter().map(|&c| c.rem_euclid(p as i64) as u16).collect();
                let m = pmod_trim(m);
                if m.len() != r_us + 1 || m[r_us] != 1 {
                    return Err(Error::Validation(format!("modulus must be monic of degree {r}")));
                }
                if !is_irreducible(&m, p16) {
                    return Err(Error::Validation("modulus is reducible over F_p".into()));
                }
                m
            }
            None if r == 1 => vec![0, 1],
            None => (0..(p as usize).pow(r))
                .map(|idx| {
                    let mut f = digits(idx, p16, r_us);
                    f.push(1);
                    f
                })
                .find(|f| is_irreducible(f, p16))
                .expect("irreducible polynomials exist in every degree"),
        };

        let q16 = q as u16;
        let vec_of = |i: usize| digits(i, p16, r_us);
        let idx_of = |v: &[u16]| v.iter().rev().fold(0usize, |acc, &c| acc * p as usize + c as usize);
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for a in 0..q {
            let va = vec_of(a);
            for b in 0..q {
                let vb = vec_of(b);
                let s: Vec<u16> = va.iter().zip(&vb).map(|(x, y)| (x + y) % p16).collect();
                add[a * q + b] = idx_of(&s) as u16;
                let mut prod = vec![0u16; 2 * r_us];
                for (i, &x) in va.iter().enumerate() {
                    for (j, &y) in vb.iter().enumerate() {
                        prod[i + j] = ((prod[i + j] as u32 + x as u32 * y as u32) % p as u32) as u16;
                    }
                }
                let mut red = if r == 1 { pmod_trim(prod) } else { pmod_rem(&prod, &modulus, p16) };
                red.resize(r_us, 0);
                mul[a * q + b] = idx_of(&red) as u16;
            }
        }
        let mut neg = vec![0u16; q];
        let mut inv = vec![0u16; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u16;
            if a != 0 {
                inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u16;
            }
        }
        Ok(Fq(Arc::new(Tables { p: p16, r: r as u16, q: q16, modulus, add, mul, neg, inv })))
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.0.p as u64
    }
    #[inline]
    pub fn r(&self) -> u32 {
        self.0.r as u32
    }
    #[inline]
    pub fn q(&self) -> usize {
        self.0.q as usize
    }
    pub fn modulus(&self) -> Vec<u64> {
        self.0.modulus.iter().map(|&c| c as u64).collect()
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.0.add[a.0 as usize * self.0.q as usize + b.0 as usize])
    }
    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.0.mul[a.0 as usize * self.0.q as usize + b.0 as usize])
    }
    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        FqElem(self.0.neg[a.0 as usize])
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(FqElem(self.0.inv[a.0 as usize]))
        }
    }

    /// Inverse of a known nonzero element.
    #[inline]
    pub fn inv_nz(&self, a: FqElem) -> FqElem {
        debug_assert!(!a.is_zero());
        FqElem(self.0.inv[a.0 as usize])
    }

    pub fn pow(&self, a: FqElem, mut e: u64) -> FqElem {
        let mut base = a;
        let mut acc = FqElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Image of an integer under Z -> F_p -> F_q.
    pub fn from_int(&self, n: i64) -> FqElem {
        FqElem(n.rem_euclid(self.p() as i64) as u16)
    }

    /// The class of x in F_p[x]/(modulus); equal to 0 when r = 1.
    pub fn generator(&self) -> FqElem {
        if self.r() == 1 {
            FqElem(0)
        } else {
            FqElem(self.0.p)
        }
    }

    pub fn from_coords(&self, coords: &[i64]) -> FqElem {
        assert!(coords.len() <= self.r() as usize);
        let p = self.p() as i64;
        FqElem(coords.iter().rev().fold(0i64, |acc, &c| acc * p + c.rem_euclid(p)) as u16)
    }

    pub fn coords(&self, a: FqElem) -> Vec<u64> {
        digits(a.0 as usize, self.0.p, self.r() as usize).into_iter().map(u64::from).collect()
    }

    /// All q elements, starting with 0.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        (0..self.0.q).map(FqElem)
    }

    pub fn fmt_elem(&self, a: FqElem) -> String {
        if self.r() == 1 {
            return a.0.to_string();
        }
        let c = self.coords(a);
        let terms: Vec<String> = c
            .iter()
            .enumerate()
            .filter(|(_, &ci)| ci != 0)
            .map(|(i, &ci)| match (i, ci) {
                (0, _) => ci.to_string(),
                (1, 1) => "x".into(),
                (1, _) => format!("{ci}x"),
                (_, 1) => format!("x^{i}"),
                _ => format!("{ci}x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    /// Frobenius-free square root search; q is tiny.
    pub fn sqrt(&self, a: FqElem) -> Option<FqElem> {
        self.elements().find(|&x| self.mul(x, x) == a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Fq {
        Fq::new(3, 1, None).unwrap()
    }

    #[test]
    fn small_arithmetic() {
        let f = f3();
        assert_eq!(f.add(FqElem(2), FqElem(2)), FqElem(1));
        assert_eq!(f.mul(FqElem(2), FqElem(2)), FqElem(1));
        assert_eq!(f.inv(FqElem(2)).unwrap(), FqElem(2));
        assert_eq!(f.inv(FqElem(1)).unwrap(), FqElem(1));
        assert!(f.inv(FqElem(0)).is_err());
    }

    #[test]
    fn f9_with_given_modulus() {
        let f = Fq::new(3, 2, Some(&[1, 0, 1])).unwrap();
        let x = f.generator();
        assert_eq!(f.mul(x, x), f.from_int(2));
        // inverse via the extended Euclid identity x * (2x) = 2x^2 = 1
        assert_eq!(f.inv(x).unwrap(), f.from_coords(&[0, 2]));
    }

    #[test]
    fn default_modulus_is_smallest_irreducible() {
        let f = Fq::new(3, 2, None).unwrap();
        assert_eq!(f.modulus(), vec![1, 0, 1]);
        let f5 = Fq::with_limit(5, 2, None, 25).unwrap();
        assert_eq!(f5.modulus(), vec![2, 0, 1]);
    }

    #[test]
    fn rejects_bad_contexts() {
        assert!(Fq::new(2, 1, None).is_err());
        assert!(Fq::new(9, 1, None).is_err());
        assert!(Fq::new(3, 2, Some(&[2, 0, 1])).is_err());
        assert!(Fq::new(3, 3, None).is_err());
    }

    #[test]
    fn enumeration_and_fermat() {
        for (p, r) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let f = Fq::new(p, r, None).unwrap();
            let all: Vec<_> = f.elements().collect();
            assert_eq!(all.len(), f.q());
            assert_eq!(all[0], FqElem::ZERO);
            let mut dedup = all.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), all.len());
            for &a in &all[1..] {
                assert_eq!(f.pow(a, f.q() as u64 - 1), FqElem::ONE);
                assert_eq!(f.inv_nz(f.inv_nz(a)), a);
            }
        }
    }

    #[test]
    fn axioms_exhaustive_f9() {
        let f = Fq::new(3, 2, None).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in f.elements() {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                }
            }
        }
    }
}
