//! The rational function field k = F_q(t).

use crate::error::{Error, Result};
use crate::fq::{Fq, FqElem};
use crate::poly::Poly;

/// `num / den` with `den` monic and coprime to `num`; zero is `0/1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatF {
    pub num: Poly,
    pub den: Poly,
}

impl Default for RatF {
    fn default() -> Self {
        RatF::zero()
    }
}

impl From<Poly> for RatF {
    fn from(num: Poly) -> Self {
        RatF { num, den: Poly::one() }
    }
}

impl RatF {
    pub fn zero() -> RatF {
        RatF { num: Poly::zero(), den: Poly::one() }
    }
    pub fn one() -> RatF {
        RatF { num: Poly::one(), den: Poly::one() }
    }
    pub fn constant(a: FqElem) -> RatF {
        Poly::constant(a).into()
    }

    pub fn new(f: &Fq, num: Poly, den: Poly) -> Result<RatF> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(f, num, den))
    }

    fn reduce(f: &Fq, num: Poly, den: Poly) -> RatF {
        if num.is_zero() {
            return RatF::zero();
        }
        if den.is_one() {
            return RatF { num, den };
        }
        let g = num.gcd(f, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(f, &g).unwrap(), den.div_exact(f, &g).unwrap())
        };
        let li = f.inv_nz(den.lead());
        RatF { num: num.scale(f, li), den: den.scale(f, li) }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
    /// True when the function lies in A = F_q[t].
    #[inline]
    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, f: &Fq, o: &RatF) -> RatF {
        if self.den.is_one() && o.den.is_one() {
            return self.num.add(f, &o.num).into();
        }
        if self.den == o.den {
            return Self::reduce(f, self.num.add(f, &o.num), self.den.clone());
        }
        let num = self.num.mul(f, &o.den).add(f, &o.num.mul(f, &self.den));
        Self::reduce(f, num, self.den.mul(f, &o.den))
    }
    pub fn neg(&self, f: &Fq) -> RatF {
        RatF { num: self.num.neg(f), den: self.den.clone() }
    }
    pub fn sub(&self, f: &Fq, o: &RatF) -> RatF {
        self.add(f, &o.neg(f))
    }
    pub fn mul(&self, f: &Fq, o: &RatF) -> RatF {
        if self.den.is_one() && o.den.is_one() {
            return self.num.mul(f, &o.num).into();
        }
        Self::reduce(f, self.num.mul(f, &o.num), self.den.mul(f, &o.den))
    }
    pub fn mul_poly(&self, f: &Fq, p: &Poly) -> RatF {
        if self.den.is_one() {
            return self.num.mul(f, p).into();
        }
        Self::reduce(f, self.num.mul(f, p), self.den.clone())
    }
    pub fn scale(&self, f: &Fq, a: FqElem) -> RatF {
        if a.is_zero() {
            return RatF::zero();
        }
        RatF { num: self.num.scale(f, a), den: self.den.clone() }
    }
    pub fn inv(&self, f: &Fq) -> Result<RatF> {
        RatF::new(f, self.den.clone(), self.num.clone())
    }
    pub fn div(&self, f: &Fq, o: &RatF) -> Result<RatF> {
        Ok(self.mul(f, &o.inv(f)?))
    }

    /// Valuation at the place at infinity: deg den - deg num; `None` for zero.
    pub fn val_p(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.den.deg() - self.num.deg())
    }

    pub fn fmt_with(&self, f: &Fq) -> String {
        if self.den.is_one() {
            self.num.fmt_with(f)
        } else {
            format!("({})/({})", self.num.fmt_with(f), self.den.fmt_with(f))
        }
    }
}
