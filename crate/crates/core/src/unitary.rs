//! SU(h)(k) for the hermitian form h(x, y) = x0 y2' + x1 y1' + x2 y0'
//! (primes denote conjugation), its boundary H(l,k) + {inf}, and fixed
//! points of finite p-subgroups.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::ell::{EllElem, EllJson, Ext};
use crate::error::{Error, Result};

pub type Mat3 = [[EllElem; 3]; 3];
pub type Vec3 = [EllElem; 3];

pub fn mat_identity() -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { EllElem::one() } else { EllElem::zero() }))
}

pub fn mat_mul(e: &Ext, a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = EllElem::zero();
            for k in 0..3 {
                if !a[i][k].is_zero() && !b[k][j].is_zero() {
                    acc = e.add(&acc, &e.mul(&a[i][k], &b[k][j]));
                }
            }
            acc
        })
    })
}

pub fn mat_apply(e: &Ext, a: &Mat3, x: &Vec3) -> Vec3 {
    std::array::from_fn(|i| (0..3).fold(EllElem::zero(), |acc, k| e.add(&acc, &e.mul(&a[i][k], &x[k]))))
}

pub fn mat_sub(e: &Ext, a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| e.sub(&a[i][j], &b[i][j])))
}

pub fn mat_det(e: &Ext, a: &Mat3) -> EllElem {
    let m = |x: &EllElem, y: &EllElem| e.mul(x, y);
    let t0 = m(&a[0][0], &e.sub(&m(&a[1][1], &a[2][2]), &m(&a[1][2], &a[2][1])));
    let t1 = m(&a[0][1], &e.sub(&m(&a[1][0], &a[2][2]), &m(&a[1][2], &a[2][0])));
    let t2 = m(&a[0][2], &e.sub(&m(&a[1][0], &a[2][1]), &m(&a[1][1], &a[2][0])));
    e.add(&e.sub(&t0, &t1), &t2)
}

/// h(x, y) = x^T H conj(y).
pub fn herm(e: &Ext, x: &Vec3, y: &Vec3) -> EllElem {
    (0..3).fold(EllElem::zero(), |acc, i| e.add(&acc, &e.mul(&x[i], &e.conj(&y[2 - i]))))
}

/// Plain cross product.
pub fn cross(e: &Ext, a: &Vec3, b: &Vec3) -> Vec3 {
    let c = |i: usize, j: usize| e.sub(&e.mul(&a[i], &b[j]), &e.mul(&a[j], &b[i]));
    [c(1, 2), c(2, 0), c(0, 1)]
}

/// det g = 1 and conj(g)^T H g = H.
pub fn is_unitary(e: &Ext, g: &Mat3) -> bool {
    if !mat_det(e, g).is_one() {
        return false;
    }
    let cols: [Vec3; 3] = std::array::from_fn(|j| std::array::from_fn(|i| g[i][j].clone()));
    // entry (i, j) of conj(g)^T H g is h(g_j, g_i)
    (0..3).all(|i| {
        (0..3).all(|j| {
            let hij = herm(e, &cols[j], &cols[i]);
            if i + j == 2 {
                hij.is_one()
            } else {
                hij.is_zero()
            }
        })
    })
}

/// An element of SU(h)(k).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UMatrix(Mat3);

impl UMatrix {
    pub fn new(e: &Ext, m: Mat3) -> Result<UMatrix> {
        if is_unitary(e, &m) {
            Ok(UMatrix(m))
        } else {
            Err(Error::NotUnitary)
        }
    }
    /// Wraps a matrix already known to be unitary.
    pub fn new_unchecked(m: Mat3) -> UMatrix {
        UMatrix(m)
    }
    pub fn identity() -> UMatrix {
        UMatrix(mat_identity())
    }
    #[inline]
    pub fn m(&self) -> &Mat3 {
        &self.0
    }
    pub fn get(&self, i: usize, j: usize) -> &EllElem {
        &self.0[i][j]
    }
    pub fn is_identity(&self) -> bool {
        self.0 == mat_identity()
    }
    pub fn mul(&self, e: &Ext, o: &UMatrix) -> UMatrix {
        UMatrix(mat_mul(e, &self.0, &o.0))
    }
    /// g^{-1} = H conj(g)^T H.
    pub fn inv(&self, e: &Ext) -> UMatrix {
        UMatrix(std::array::from_fn(|i| std::array::from_fn(|j| e.conj(&self.0[2 - j][2 - i]))))
    }
    pub fn conjugate_by(&self, e: &Ext, g: &UMatrix) -> UMatrix {
        g.mul(e, self).mul(e, &g.inv(e))
    }
    pub fn pow(&self, e: &Ext, n: u32) -> UMatrix {
        (0..n).fold(UMatrix::identity(), |acc, _| acc.mul(e, self))
    }
    pub fn is_upper_triangular(&self) -> bool {
        self.0[1][0].is_zero() && self.0[2][0].is_zero() && self.0[2][1].is_zero()
    }
    /// All entries lie in B.
    pub fn is_integral(&self) -> bool {
        self.0.iter().flatten().all(EllElem::in_b)
    }
    pub fn apply(&self, e: &Ext, x: &Vec3) -> Vec3 {
        mat_apply(e, &self.0, x)
    }
    /// Least Q-valuation among the entries.
    pub fn min_val(&self, e: &Ext) -> i64 {
        self.0.iter().flatten().filter_map(|x| e.val_q(x)).min().unwrap_or(0)
    }
    pub fn to_json(&self, e: &Ext) -> Vec<Vec<EllJson>> {
        self.0.iter().map(|row| row.iter().map(|x| e.to_json(x)).collect()).collect()
    }
    pub fn fmt(&self, e: &Ext) -> String {
        let rows: Vec<String> =
            self.0.iter().map(|r| r.iter().map(|x| e.fmt(x)).collect::<Vec<_>>().join(", ")).collect();
        format!("[{}]", rows.join(" / "))
    }
}

/// The unipotent element with rows (1, -u', v / 0, 1, u / 0, 0, 1).
pub fn mk_ua(e: &Ext, u: &EllElem, v: &EllElem) -> Result<UMatrix> {
    if !e.hpair_check(u, v) {
        return Err(Error::NotInH);
    }
    Ok(ua_unchecked(e, u, v))
}

pub(crate) fn ua_unchecked(e: &Ext, u: &EllElem, v: &EllElem) -> UMatrix {
    let z = EllElem::zero;
    let o = EllElem::one;
    UMatrix([[o(), e.neg(&e.conj(u)), v.clone()], [z(), o(), u.clone()], [z(), z(), o()]])
}

/// diag(t, t'/t, 1/t').
pub fn mk_torus(e: &Ext, t: &EllElem) -> Result<UMatrix> {
    if t.is_zero() {
        return Err(Error::Validation("torus parameter must be nonzero".into()));
    }
    let tc = e.conj(t);
    let z = EllElem::zero;
    Ok(UMatrix([
        [t.clone(), z(), z()],
        [z(), e.div(&tc, t)?, z()],
        [z(), z(), e.inv(&tc)?],
    ]))
}

/// antidiag(-1, -1, -1).
pub fn mk_s(e: &Ext) -> UMatrix {
    let z = EllElem::zero;
    let m = || e.neg(&EllElem::one());
    UMatrix([[z(), z(), m()], [z(), m(), z()], [m(), z(), z()]])
}

/// A point of the boundary H(l,k) + {inf}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BPoint {
    Infinity,
    Finite(EllElem, EllElem),
}

impl BPoint {
    pub fn finite(e: &Ext, u: EllElem, v: EllElem) -> Result<BPoint> {
        if e.hpair_check(&u, &v) {
            Ok(BPoint::Finite(u, v))
        } else {
            Err(Error::NotInH)
        }
    }
    pub fn to_json(&self, e: &Ext) -> serde_json::Value {
        match self {
            BPoint::Infinity => serde_json::Value::String("inf".into()),
            BPoint::Finite(u, v) => serde_json::json!({ "u": e.to_json(u), "v": e.to_json(v) }),
        }
    }
    pub fn fmt(&self, e: &Ext) -> String {
        match self {
            BPoint::Infinity => "inf".into(),
            BPoint::Finite(u, v) => format!("({}, {})", e.fmt(u), e.fmt(v)),
        }
    }
}

/// g_{u,v} = s u_a(u, v); the identity at infinity.
pub fn mk_guv(e: &Ext, pt: &BPoint) -> UMatrix {
    match pt {
        BPoint::Infinity => UMatrix::identity(),
        BPoint::Finite(u, v) => mk_s(e).mul(e, &ua_unchecked(e, u, v)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruhatForm {
    pub epsilon: u8,
    pub b: UMatrix,
    pub pair: Option<(EllElem, EllElem)>,
}

impl BruhatForm {
    pub fn recompose(&self, e: &Ext) -> UMatrix {
        match &self.pair {
            None => self.b.clone(),
            Some((x, y)) => ua_unchecked(e, x, y).mul(e, &mk_s(e)).mul(e, &self.b),
        }
    }
}

/// g = b, or g = u_a(x, y) s b with b upper triangular.
pub fn bruhat_decompose(e: &Ext, g: &UMatrix) -> Result<BruhatForm> {
    if !is_unitary(e, g.m()) {
        return Err(Error::NotUnitary);
    }
    if g.get(2, 0).is_zero() {
        return Ok(BruhatForm { epsilon: 0, b: g.clone(), pair: None });
    }
    let g20 = g.get(2, 0);
    let x = e.div(g.get(1, 0), g20)?;
    let y = e.div(g.get(0, 0), g20)?;
    let uinv = ua_unchecked(e, &e.neg(&x), &e.conj(&y));
    let b = mk_s(e).mul(e, &uinv).mul(e, g);
    if !b.is_upper_triangular() || !e.hpair_check(&x, &y) {
        return Err(Error::Invariant("Bruhat decomposition failed".into()));
    }
    Ok(BruhatForm { epsilon: 1, b, pair: Some((x, y)) })
}

/// The action of g on the boundary.
pub fn boundary_act(e: &Ext, g: &UMatrix, xi: &BPoint) -> Result<BPoint> {
    let m = g.mul(e, &mk_guv(e, xi).inv(e));
    let bf = bruhat_decompose(e, &m)?;
    Ok(match bf.pair {
        None => BPoint::Infinity,
        Some((x, y)) => BPoint::Finite(e.neg(&x), e.conj(&y)),
    })
}

/// An isotropic line, represented with first nonzero coordinate 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IsoLine(Vec3);

impl IsoLine {
    pub fn new(e: &Ext, v: &Vec3) -> Result<IsoLine> {
        let k = v.iter().position(|x| !x.is_zero()).ok_or(Error::Validation("zero vector".into()))?;
        if !herm(e, v, v).is_zero() {
            return Err(Error::Anisotropic);
        }
        let inv = e.inv(&v[k])?;
        Ok(IsoLine(std::array::from_fn(|i| e.mul(&v[i], &inv))))
    }
    pub fn rep(&self) -> &Vec3 {
        &self.0
    }
}

/// The isotropic line g_xi^{-1} (1, 0, 0).
pub fn boundary_line(e: &Ext, xi: &BPoint) -> IsoLine {
    let v = match xi {
        BPoint::Infinity => [EllElem::one(), EllElem::zero(), EllElem::zero()],
        BPoint::Finite(u, v) => [e.conj(v), e.neg(u), EllElem::one()],
    };
    IsoLine::new(e, &v).expect("boundary lines are isotropic")
}

pub fn line_boundary(e: &Ext, l: &IsoLine) -> Result<BPoint> {
    let r = l.rep();
    if !herm(e, r, r).is_zero() {
        return Err(Error::Anisotropic);
    }
    if r[2].is_zero() {
        return Ok(BPoint::Infinity);
    }
    let inv = e.inv(&r[2])?;
    let v = e.conj(&e.mul(&r[0], &inv));
    let u = e.neg(&e.mul(&r[1], &inv));
    BPoint::finite(e, u, v)
}

pub fn line_act(e: &Ext, g: &UMatrix, l: &IsoLine) -> IsoLine {
    IsoLine::new(e, &g.apply(e, l.rep())).expect("unitary maps preserve isotropy")
}

/// (g - 1)^3 = 0.
pub fn is_unipotent(e: &Ext, g: &UMatrix) -> bool {
    let n = mat_sub(e, g.m(), &mat_identity());
    let n3 = mat_mul(e, &mat_mul(e, &n, &n), &n);
    n3.iter().flatten().all(EllElem::is_zero)
}

/// Closure of `gens` under multiplication, failing beyond `bound` elements.
pub fn group_closure(e: &Ext, gens: &[UMatrix], bound: usize) -> Result<Vec<UMatrix>> {
    let mut seen: HashSet<UMatrix> = HashSet::new();
    let mut order = vec![UMatrix::identity()];
    seen.insert(UMatrix::identity());
    let mut queue = VecDeque::from([UMatrix::identity()]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(e, g);
            if seen.insert(y.clone()) {
                if seen.len() > bound {
                    return Err(Error::Cap(format!("group generated exceeds {bound} elements")));
                }
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(order)
}

/// Null space over l of the rows given, as a basis of column vectors.
pub fn nullspace(e: &Ext, rows: &[Vec3]) -> Vec<Vec3> {
    let mut m: Vec<Vec3> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..3 {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = e.inv(&m[r][c]).unwrap();
        m[r] = std::array::from_fn(|j| e.mul(&m[r][j], &inv));
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let fac = m[i][c].clone();
                m[i] = std::array::from_fn(|j| e.sub(&m[i][j], &e.mul(&fac, &m[r][j])));
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..3)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v: Vec3 = std::array::from_fn(|_| EllElem::zero());
            v[free] = EllElem::one();
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = e.neg(&m[k][free]);
            }
            v
        })
        .collect()
}

/// The unique boundary point fixed by the finite p-group generated by `gens`.
pub fn fixed_boundary_point(e: &Ext, gens: &[UMatrix], order_bound: usize) -> Result<BPoint> {
    let group = group_closure(e, gens, order_bound)?;
    let p = e.fq().p() as usize;
    let mut n = group.len();
    while n % p == 0 {
        n /= p;
    }
    if n != 1 {
        return Err(Error::Precondition(format!("group of order {} is not a p-group", group.len())));
    }
    let id = mat_identity();
    let rows: Vec<Vec3> = gens.iter().flat_map(|g| mat_sub(e, g.m(), &id)).collect();
    let fixed = nullspace(e, &rows);
    let v = match fixed.len() {
        1 => fixed[0].clone(),
        2 => {
            let h = |a: &Vec3, b: &Vec3| herm(e, a, b);
            let (f1, f2) = (&fixed[0], &fixed[1]);
            // x = a f1 + b f2 with h(x, f1) = h(x, f2) = 0
            let gram = [[h(f1, f1), h(f2, f1)], [h(f1, f2), h(f2, f2)]];
            let det = e.sub(&e.mul(&gram[0][0], &gram[1][1]), &e.mul(&gram[0][1], &gram[1][0]));
            if !det.is_zero() {
                return Err(Error::Precondition("common fixed plane is nondegenerate".into()));
            }
            let (a, b) = if !gram[0][0].is_zero() || !gram[0][1].is_zero() {
                (e.neg(&gram[0][1]), gram[0][0].clone())
            } else {
                (e.neg(&gram[1][1]), gram[1][0].clone())
            };
            let (a, b) = if a.is_zero() && b.is_zero() { (EllElem::one(), EllElem::zero()) } else { (a, b) };
            std::array::from_fn(|i| e.add(&e.mul(&a, &f1[i]), &e.mul(&b, &f2[i])))
        }
        0 => return Err(Error::Precondition("no common fixed vector".into())),
        _ => return Err(Error::Precondition("trivial group fixes every boundary point".into())),
    };
    let line = IsoLine::new(e, &v).map_err(|_| Error::Precondition("fixed vector is anisotropic".into()))?;
    line_boundary(e, &line)
}

#[derive(Serialize)]
pub struct BruhatJson {
    pub epsilon: u8,
    pub b: Vec<Vec<EllJson>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::Fq;
    use crate::poly::Poly;

    fn ext() -> Ext {
        let f = Fq::new(3, 1, None).unwrap();
        let d = Poly::from_ints(&f, &[0, 1]);
        Ext::new(f, d).unwrap()
    }

    fn elem(e: &Ext, a: &[i64], b: &[i64]) -> EllElem {
        EllElem::from_polys(Poly::from_ints(e.fq(), a), Poly::from_ints(e.fq(), b))
    }

    #[test]
    fn generators_are_unitary() {
        let e = ext();
        assert!(is_unitary(&e, mk_s(&e).m()));
        assert!(mk_s(&e).mul(&e, &mk_s(&e)).is_identity());
        assert!(mk_ua(&e, &EllElem::zero(), &EllElem::zero()).unwrap().is_identity());
        let v = elem(&e, &[], &[0, 1]);
        let u2a = mk_ua(&e, &EllElem::zero(), &v).unwrap();
        assert_eq!(u2a.get(0, 2), &v);
        assert!(u2a.get(0, 1).is_zero() && u2a.get(1, 2).is_zero());
        let t = elem(&e, &[1, 1], &[1]);
        assert!(is_unitary(&e, mk_torus(&e, &t).unwrap().m()));
        assert!(mk_torus(&e, &EllElem::one()).unwrap().is_identity());
        assert!(mk_ua(&e, &EllElem::one(), &EllElem::zero()).is_err());
    }

    #[test]
    fn non_unitary_diagonal() {
        let e = ext();
        let t = elem(&e, &[1], &[1]);
        let z = EllElem::zero;
        let m = [[t.clone(), z(), z()], [z(), EllElem::one(), z()], [z(), z(), e.inv(&t).unwrap()]];
        assert!(!is_unitary(&e, &m));
    }

    #[test]
    fn guv_display() {
        let e = ext();
        // u = w, v = -N(w)/2 = D/2 = 2t satisfies N(u) + T(v) = -t + 4t = 0 over F_3
        let u = EllElem::omega();
        let v = elem(&e, &[0, 2], &[]);
        let pt = BPoint::finite(&e, u.clone(), v.clone()).unwrap();
        let g = mk_guv(&e, &pt);
        let z = EllElem::zero;
        let m1 = || e.neg(&EllElem::one());
        let expected = [[z(), z(), m1()], [z(), m1(), e.neg(&u)], [m1(), e.conj(&u), e.neg(&v)]];
        assert_eq!(g.m(), &expected);
        assert_eq!(mk_guv(&e, &BPoint::finite(&e, z(), z()).unwrap()), mk_s(&e));
    }

    #[test]
    fn bruhat_of_s() {
        let e = ext();
        let bf = bruhat_decompose(&e, &mk_s(&e)).unwrap();
        assert_eq!(bf.epsilon, 1);
        assert_eq!(bf.pair, Some((EllElem::zero(), EllElem::zero())));
        assert!(bf.b.is_identity());
    }

    #[test]
    fn boundary_basics() {
        let e = ext();
        assert_eq!(
            boundary_act(&e, &mk_s(&e), &BPoint::Infinity).unwrap(),
            BPoint::Finite(EllElem::zero(), EllElem::zero())
        );
        let l = boundary_line(&e, &BPoint::Infinity);
        assert_eq!(l.rep(), &[EllElem::one(), EllElem::zero(), EllElem::zero()]);
        let l0 = boundary_line(&e, &BPoint::Finite(EllElem::zero(), EllElem::zero()));
        assert_eq!(l0.rep(), &[EllElem::zero(), EllElem::zero(), EllElem::one()]);
    }

    #[test]
    fn fixed_point_of_unipotent() {
        let e = ext();
        let v = elem(&e, &[], &[1]);
        let g = mk_ua(&e, &EllElem::zero(), &v).unwrap();
        assert_eq!(fixed_boundary_point(&e, std::slice::from_ref(&g), 81).unwrap(), BPoint::Infinity);
        let h = mk_s(&e);
        let conj = g.conjugate_by(&e, &h);
        let expect = boundary_act(&e, &h, &BPoint::Infinity).unwrap();
        assert_eq!(fixed_boundary_point(&e, &[conj], 81).unwrap(), expect);
        assert!(fixed_boundary_point(&e, &[UMatrix::identity()], 81).is_err());
    }
}
