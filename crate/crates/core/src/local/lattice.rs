//! O_E-lattices in E^3 and their column Hermite normal form.

use crate::error::{Error, Result};
use crate::fq::{Fq, FqElem};
use crate::local::series::{LocalElem, EXACT};

pub type LMat = [[LocalElem; 3]; 3];
pub type LVec = [LocalElem; 3];

pub fn lmat_zero() -> LMat {
    std::array::from_fn(|_| std::array::from_fn(|_| LocalElem::zero()))
}

pub fn lmat_identity() -> LMat {
    let mut m = lmat_zero();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = LocalElem::one();
    }
    m
}

pub fn lmat_mul(f: &Fq, a: &LMat, b: &LMat) -> LMat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            (0..3).fold(LocalElem::zero(), |acc, k| acc.add(f, &a[i][k].mul(f, &b[k][j])))
        })
    })
}

pub fn lmat_transpose(a: &LMat) -> LMat {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

pub fn lmat_conj(f: &Fq, a: &LMat) -> LMat {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].conj(f)))
}

/// H * a, H the antidiagonal matrix of ones (a row reversal).
pub fn lmat_h_left(a: &LMat) -> LMat {
    std::array::from_fn(|i| a[2 - i].clone())
}

/// Least valuation among the entries; `None` for the zero matrix.
pub fn lmat_min_val(a: &LMat) -> Option<i64> {
    a.iter().flatten().filter_map(LocalElem::val).min()
}

pub fn lmat_column(a: &LMat, j: usize) -> LVec {
    std::array::from_fn(|i| a[i][j].clone())
}

pub fn lmat_from_columns(cols: &[LVec; 3]) -> LMat {
    std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone()))
}

/// Exact inverse of an upper triangular matrix whose diagonal entries are monomials.
pub fn upper_inverse(f: &Fq, t: &LMat) -> Result<LMat> {
    let mut inv = lmat_zero();
    for i in 0..3 {
        if t[i][i].terms().count() != 1 || !t[i][i].is_exact() {
            return Err(Error::Invariant("upper_inverse needs monomial diagonal".into()));
        }
        inv[i][i] = t[i][i].inv(f, EXACT)?;
    }
    for j in 0..3 {
        for i in (0..j).rev() {
            // inv[i][j] = -inv[i][i] * sum_{i<k<=j} t[i][k] inv[k][j]
            let mut s = LocalElem::zero();
            for k in i + 1..=j {
                s = s.add(f, &t[i][k].mul(f, &inv[k][j]));
            }
            inv[i][j] = inv[i][i].mul(f, &s).neg(f);
        }
    }
    Ok(inv)
}

/// Column Hermite form of the O_E-span of `gens`, given that the span
/// contains rho^n O^3.
///
/// The result is upper triangular with diagonal rho^{e_i} and entry (i, j),
/// i < j, a Laurent polynomial with all exponents below e_i.
pub fn hnf(f: &Fq, gens: &[LVec], n: i64) -> Result<LMat> {
    let mut work: Vec<LVec> = Vec::with_capacity(gens.len() + 3);
    for g in gens {
        let mut col: LVec = std::array::from_fn(|_| LocalElem::zero());
        for i in 0..3 {
            if g[i].prec() < n {
                return Err(Error::Precision(format!(
                    "generator known modulo rho^{} but rho^{} is needed",
                    g[i].prec(),
                    n
                )));
            }
            col[i] = g[i].below(n);
        }
        work.push(col);
    }
    for i in 0..3 {
        let mut col: LVec = std::array::from_fn(|_| LocalElem::zero());
        col[i] = LocalElem::monomial(FqElem::ONE, n);
        work.push(col);
    }

    let mut out: [Option<LVec>; 3] = [None, None, None];
    let mut diag = [0i64; 3];
    for i in (0..3).rev() {
        let (pidx, e) = work
            .iter()
            .enumerate()
            .filter_map(|(k, g)| g[i].val().map(|v| (k, v)))
            .min_by_key(|&(k, v)| (v, k))
            .ok_or_else(|| Error::Invariant("lattice generators do not span".into()))?;
        let mut pivot = work.swap_remove(pidx);
        // normalize the pivot entry to rho^e
        let unit = pivot[i].shift(-e);
        if unit.terms().count() != 1 || unit.coeff(0) != FqElem::ONE {
            let vmin = (0..i).filter_map(|r| pivot[r].val()).min().unwrap_or(0).min(0);
            let uinv = unit.inv(f, n - vmin + 1)?;
            for r in 0..i {
                pivot[r] = pivot[r].mul(f, &uinv).below(n);
            }
        }
        pivot[i] = LocalElem::monomial(FqElem::ONE, e);
        for g in work.iter_mut() {
            if g[i].is_zero() {
                continue;
            }
            let c = g[i].shift(-e);
            for r in 0..i {
                g[r] = g[r].sub(f, &c.mul(f, &pivot[r])).below(n);
            }
            g[i] = LocalElem::zero();
        }
        diag[i] = e;
        out[i] = Some(pivot);
    }
    let mut cols: [LVec; 3] = out.map(|c| c.unwrap());
    for j in 1..3 {
        for i in (0..j).rev() {
            let high = cols[j][i].from_exp(diag[i]);
            if high.is_zero() {
                continue;
            }
            let c = high.shift(-diag[i]);
            let ci = cols[i].clone();
            for r in 0..=i {
                cols[j][r] = cols[j][r].sub(f, &c.mul(f, &ci[r])).below(n.max(diag[r]));
            }
        }
    }
    Ok(lmat_from_columns(&cols))
}

/// Diagonal exponents of a matrix in Hermite form.
pub fn hnf_diag(t: &LMat) -> [i64; 3] {
    std::array::from_fn(|i| t[i][i].val().expect("Hermite form has nonzero diagonal"))
}

/// Smallest n with rho^n O^3 contained in the lattice spanned by `t`.
pub fn containment_bound(f: &Fq, t: &LMat) -> Result<i64> {
    let inv = upper_inverse(f, t)?;
    Ok(-lmat_min_val(&inv).unwrap_or(0))
}

/// Is the lattice spanned by `a` contained in the one spanned by the Hermite form `b`?
pub fn contained_in(f: &Fq, a: &LMat, b: &LMat) -> Result<bool> {
    let binv = upper_inverse(f, b)?;
    let x = lmat_mul(f, &binv, a);
    Ok(x.iter().flatten().all(|e| e.val().is_none_or(|v| v >= 0)))
}

/// Hermite form of the dual lattice {x : h(x, y) in O for all y in L}.
pub fn dual(f: &Fq, t: &LMat) -> Result<LMat> {
    let inv = upper_inverse(f, t)?;
    let basis = lmat_h_left(&lmat_transpose(&lmat_conj(f, &inv)));
    // L is contained in rho^{-b} O^3, so the dual contains rho^b O^3
    let b = -lmat_min_val(t).unwrap_or(0);
    let cols: Vec<LVec> = (0..3).map(|j| lmat_column(&basis, j)).collect();
    hnf(f, &cols, b)
}

/// Scales a Hermite form by rho^k.
pub fn scale(t: &LMat, k: i64) -> LMat {
    std::array::from_fn(|i| std::array::from_fn(|j| t[i][j].shift(k)))
}
