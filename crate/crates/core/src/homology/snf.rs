//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// Invariants of a finitely generated abelian group Z^n / rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianInvariants {
    /// torsion divisors d_1 | d_2 | ..., each > 1
    #[serde(serialize_with = "ser_big")]
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

fn ser_big<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl AbelianInvariants {
    /// Number of torsion divisors divisible by p.
    pub fn p_rank(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.torsion.iter().filter(|d| (*d % &p).is_zero()).count()
    }
    pub fn torsion_is_p_group(&self, p: u64) -> bool {
        let p = BigInt::from(p);
        self.torsion.iter().all(|d| {
            let mut d = d.clone();
            while (&d % &p).is_zero() {
                d /= &p;
            }
            d.is_one()
        })
    }
}

/// Diagonal of the Smith normal form (nonzero entries only).
pub fn smith_diagonal(mut m: Vec<Vec<BigInt>>, ncols: usize) -> Vec<BigInt> {
    let nrows = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // pivot: smallest nonzero absolute value in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..ncols {
                if !m[i][j].is_zero() && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut done = true;
            for i in t + 1..nrows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                let pivot_row = m[t].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row).skip(t) {
                    *x -= &q * y;
                }
                if !m[i][t].is_zero() {
                    m.swap(t, i);
                    done = false;
                }
            }
            for j in t + 1..ncols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                for row in m.iter_mut().skip(t) {
                    let c = row[t].clone();
                    row[j] -= &q * c;
                }
                if !m[t][j].is_zero() {
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                    done = false;
                }
            }
            if done {
                // divisibility of the rest by the pivot
                let piv = m[t][t].clone();
                let bad = (t + 1..nrows).find(|&i| (t + 1..ncols).any(|j| !(&m[i][j] % &piv).is_zero()));
                match bad {
                    Some(i) => {
                        let r = m[i].clone();
                        for (x, y) in m[t].iter_mut().zip(&r).skip(t) {
                            *x += y;
                        }
                    }
                    None => break,
                }
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}

pub fn invariants(rows: Vec<Vec<BigInt>>, ncols: usize) -> AbelianInvariants {
    let diag = smith_diagonal(rows, ncols);
    let rank = diag.len();
    AbelianInvariants { torsion: diag.into_iter().filter(|d| !d.is_one()).collect(), free_rank: ncols - rank }
}

/// Integer lattice kept in echelon form, for absorbing many relators.
#[derive(Clone, Debug, Default)]
pub struct Lattice {
    ncols: usize,
    /// pivot column -> row with positive pivot
    rows: std::collections::BTreeMap<usize, Vec<i128>>,
}

impl Lattice {
    pub fn new(ncols: usize) -> Lattice {
        Lattice { ncols, rows: Default::default() }
    }
    pub fn insert(&mut self, mut v: Vec<i128>) {
        debug_assert_eq!(v.len(), self.ncols);
        let mut c = 0;
        while c < self.ncols {
            if v[c] == 0 {
                c += 1;
                continue;
            }
            match self.rows.remove(&c) {
                None => {
                    if v[c] < 0 {
                        v.iter_mut().for_each(|x| *x = -*x);
                    }
                    self.reduce_above(c, &mut v);
                    self.rows.insert(c, v);
                    return;
                }
                Some(mut r) => {
                    // gcd step on column c
                    let (mut a, mut b) = (r, v);
                    while b[c] != 0 {
                        let q = a[c].div_euclid(b[c]);
                        for (x, y) in a.iter_mut().zip(&b) {
                            *x -= q * y;
                        }
                        std::mem::swap(&mut a, &mut b);
                    }
                    if a[c] < 0 {
                        a.iter_mut().for_each(|x| *x = -*x);
                    }
                    r = a;
                    v = b;
                    let mut r2 = r;
                    self.reduce_above(c, &mut r2);
                    self.rows.insert(c, r2);
                    c += 1;
                }
            }
        }
    }
    fn reduce_above(&self, c: usize, v: &mut [i128]) {
        for (&k, r) in self.rows.range(c + 1..) {
            if v[k] != 0 {
                let q = v[k].div_euclid(r[k]);
                for (x, y) in v.iter_mut().zip(r) {
                    *x -= q * y;
                }
            }
        }
    }
    pub fn rows(&self) -> Vec<Vec<i128>> {
        self.rows.values().cloned().collect()
    }
}

pub fn to_big(rows: &[Vec<i128>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn small_examples() {
        // Z^2 / <(2, 4), (6, 8)> = Z/2 + Z/4
        let inv = invariants(big(&[&[2, 4], &[6, 8]]), 2);
        assert_eq!(inv.torsion, vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(inv.free_rank, 0);
        // Z/2 + Z/3 = Z/6
        let inv = invariants(big(&[&[2, 0], &[0, 3]]), 2);
        assert_eq!(inv.torsion, vec![BigInt::from(6)]);
        let inv = invariants(big(&[&[3, 0, 0]]), 3);
        assert_eq!(inv.free_rank, 2);
        assert_eq!(inv.p_rank(3), 1);
    }

    #[test]
    fn lattice_matches_direct() {
        let rows: Vec<Vec<i128>> = vec![vec![2, 4, 0], vec![6, 8, 3], vec![0, 0, 9], vec![4, 8, 0]];
        let mut l = Lattice::new(3);
        for r in &rows {
            l.insert(r.clone());
        }
        assert_eq!(invariants(to_big(&l.rows()), 3), invariants(to_big(&rows), 3));
    }
}
