//! Vertices of the Bruhat-Tits tree as classes of lattices L with
//! rho L^# <= L <= L^#.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::ell::Ext;
use crate::error::{Error, Result};
use crate::fq::{Fq, FqElem};
use crate::local::lattice::{
    containment_bound, contained_in, dual, hnf, hnf_diag, lmat_column, lmat_min_val, lmat_mul, scale,
    upper_inverse, LMat, LVec,
};
use crate::local::series::LocalElem;
use crate::unitary::UMatrix;

/// Canonical representative: the Hermite form scaled so that the diagonal
/// exponents sum to the type parity (0 for self-dual lattices, 1 otherwise).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    t: LMat,
    parity: u8,
}

/// A projective point of F_q^3, first nonzero coordinate 1.
pub type Line = [FqElem; 3];

impl Vertex {
    pub fn basis(&self) -> &LMat {
        &self.t
    }
    pub fn parity(&self) -> u8 {
        self.parity
    }
    pub fn diag(&self) -> [i64; 3] {
        hnf_diag(&self.t)
    }

    /// The standard lattice O^3.
    pub fn base() -> Vertex {
        apartment_vertex(0)
    }

    pub fn to_json(&self) -> VertexJson {
        let basis = self
            .t
            .iter()
            .map(|row| row.iter().map(|x| x.digits()).collect())
            .collect();
        VertexJson { basis, type_parity: self.parity }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct VertexJson {
    /// Row-major entries as (least exponent, coefficient digits).
    pub basis: Vec<Vec<(i64, Vec<u64>)>>,
    pub type_parity: u8,
}

fn scaling_for(t: &LMat) -> Result<(i64, u8)> {
    let s: i64 = hnf_diag(t).iter().sum();
    let k = (-s).div_euclid(3);
    match s + 3 * k {
        0 => Ok((k, 0)),
        1 => Ok((k, 1)),
        _ => {
            let k = k + 1;
            match s + 3 * k {
                0 => Ok((k, 0)),
                1 => Ok((k, 1)),
                _ => Err(Error::NotAVertex),
            }
        }
    }
}

/// Normalizes a Hermite form, checking rho L^# <= L <= L^#.
pub fn vertex_normalize(f: &Fq, t: &LMat) -> Result<Vertex> {
    let (k, parity) = scaling_for(t)?;
    let t = scale(t, k);
    let d = dual(f, &t)?;
    if !contained_in(f, &t, &d)? || !contained_in(f, &scale(&d, 1), &t)? {
        return Err(Error::NotAVertex);
    }
    Ok(Vertex { t, parity })
}

/// Normalizes the scaling only; the caller guarantees the class is a vertex.
fn vertex_trusted(t: &LMat) -> Result<Vertex> {
    let (k, parity) = scaling_for(t)?;
    Ok(Vertex { t: scale(t, k), parity })
}

/// Hermite form of the lattice spanned by `gens`, containing rho^n O^3.
pub fn lattice_from_gens(f: &Fq, gens: &[LVec], n: i64) -> Result<LMat> {
    hnf(f, gens, n)
}

/// diag(rho^{-floor(i/2)}, 1, rho^{ceil(i/2)}).
pub fn apartment_vertex(i: i64) -> Vertex {
    let a = [-(i.div_euclid(2)), 0, i - i.div_euclid(2)];
    let t: LMat = std::array::from_fn(|r| {
        std::array::from_fn(|c| if r == c { LocalElem::monomial(FqElem::ONE, a[r]) } else { LocalElem::zero() })
    });
    Vertex { t, parity: i.rem_euclid(2) as u8 }
}

/// Embeds the entries of g with enough precision to act on a lattice with
/// basis `t` and containment bound `n`.
fn act_matrix(e: &Ext, g: &UMatrix, t: &LMat, n: i64) -> Result<(LMat, i64)> {
    let w = (-g.min_val(e)).max(0);
    let target = n + w;
    let need = target - lmat_min_val(t).unwrap_or(0) + 1;
    let gl: [[Result<LocalElem>; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| e.embed(g.get(i, j), need)));
    let gl = transpose_result(gl)?;
    Ok((gl, target))
}

fn transpose_result(m: [[Result<LocalElem>; 3]; 3]) -> Result<LMat> {
    let mut out: LMat = std::array::from_fn(|_| std::array::from_fn(|_| LocalElem::zero()));
    for (i, row) in m.into_iter().enumerate() {
        for (j, x) in row.into_iter().enumerate() {
            out[i][j] = x?;
        }
    }
    Ok(out)
}

/// The vertex g . v.
pub fn tree_act(e: &Ext, g: &UMatrix, v: &Vertex) -> Result<Vertex> {
    let f = e.fq();
    let n = containment_bound(f, &v.t)?;
    let (gl, target) = act_matrix(e, g, &v.t, n)?;
    let gt = lmat_mul(f, &gl, &v.t);
    let cols: Vec<LVec> = (0..3).map(|j| lmat_column(&gt, j)).collect();
    let h = hnf(f, &cols, target)?;
    let out = vertex_trusted(&h)?;
    debug_assert_eq!(out.parity, v.parity);
    Ok(out)
}

/// T^{-1} g T modulo rho, for g stabilizing the lattice with basis T.
pub fn reduction_on(e: &Ext, g: &UMatrix, v: &Vertex) -> Result<[[FqElem; 3]; 3]> {
    let f = e.fq();
    let tinv = upper_inverse(f, &v.t)?;
    let need = -lmat_min_val(&tinv).unwrap_or(0) - lmat_min_val(&v.t).unwrap_or(0) + 1;
    let gl: [[Result<LocalElem>; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| e.embed(g.get(i, j), need)));
    let gl = transpose_result(gl)?;
    let x = lmat_mul(f, &lmat_mul(f, &tinv, &gl), &v.t);
    let mut out = [[FqElem::ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if x[i][j].val().is_some_and(|v| v < 0) {
                return Err(Error::Invariant("element does not stabilize the lattice".into()));
            }
            if x[i][j].prec() <= 0 {
                return Err(Error::Precision("reduction modulo rho".into()));
            }
            out[i][j] = x[i][j].coeff(0);
        }
    }
    Ok(out)
}

pub fn normalize_line(f: &Fq, x: &Line) -> Option<Line> {
    let k = x.iter().position(|c| !c.is_zero())?;
    let inv = f.inv_nz(x[k]);
    Some(std::array::from_fn(|i| f.mul(x[i], inv)))
}

/// All points of P^2(F_q) in a fixed order.
pub fn projective_points(f: &Fq) -> Vec<Line> {
    let mut out = Vec::new();
    for a in f.elements() {
        for b in f.elements() {
            out.push([FqElem::ONE, a, b]);
        }
    }
    for b in f.elements() {
        out.push([FqElem::ZERO, FqElem::ONE, b]);
    }
    out.push([FqElem::ZERO, FqElem::ZERO, FqElem::ONE]);
    out
}

pub fn mat_apply_fq(f: &Fq, m: &[[FqElem; 3]; 3], x: &Line) -> Line {
    std::array::from_fn(|i| (0..3).fold(FqElem::ZERO, |acc, k| f.add(acc, f.mul(m[i][k], x[k]))))
}

fn t_times_line(f: &Fq, t: &LMat, x: &Line, shift: i64) -> LVec {
    std::array::from_fn(|i| {
        (0..3).fold(LocalElem::zero(), |acc, k| acc.add(f, &t[i][k].scale(f, x[k]).shift(shift)))
    })
}

/// Gram matrix h(t_j, t_k) of the basis, reduced modulo rho.
fn reduced_gram(f: &Fq, t: &LMat) -> [[FqElem; 3]; 3] {
    std::array::from_fn(|j| {
        std::array::from_fn(|k| {
            let mut acc = LocalElem::zero();
            for i in 0..3 {
                acc = acc.add(f, &t[i][j].mul(f, &t[2 - i][k].conj(f)));
            }
            acc.coeff(0)
        })
    })
}

fn line_perp(f: &Fq, gram: &[[FqElem; 3]; 3], x: &Line) -> [Line; 2] {
    // linear form y -> sum_j x_j gram[j][k] y_k
    let form: [FqElem; 3] =
        std::array::from_fn(|k| (0..3).fold(FqElem::ZERO, |acc, j| f.add(acc, f.mul(x[j], gram[j][k]))));
    let piv = form.iter().position(|c| !c.is_zero()).expect("reduced form is nondegenerate");
    let others: Vec<usize> = (0..3).filter(|&k| k != piv).collect();
    let inv = f.inv_nz(form[piv]);
    std::array::from_fn(|n| {
        let free = others[n];
        let mut y = [FqElem::ZERO; 3];
        y[free] = FqElem::ONE;
        y[piv] = f.neg(f.mul(form[free], inv));
        y
    })
}

/// Neighbors of v, each labelled by the line of F_q^3 (in the basis of v)
/// that determines it, sorted by vertex.
pub fn neighbors_with_lines(e: &Ext, v: &Vertex) -> Result<Vec<(Line, Vertex)>> {
    let f = e.fq();
    let n = containment_bound(f, &v.t)?;
    let mut out = Vec::new();
    if v.parity == 0 {
        let gram = reduced_gram(f, &v.t);
        for x in projective_points(f) {
            let q = (0..3).fold(FqElem::ZERO, |acc, j| {
                (0..3).fold(acc, |acc, k| f.add(acc, f.mul(f.mul(x[j], gram[j][k]), x[k])))
            });
            if !q.is_zero() {
                continue;
            }
            let [w1, w2] = line_perp(f, &gram, &x);
            let mut gens: Vec<LVec> = (0..3).map(|j| lmat_column(&v.t, j).map(|c| c.shift(1))).collect();
            gens.push(t_times_line(f, &v.t, &w1, 0));
            gens.push(t_times_line(f, &v.t, &w2, 0));
            let m = hnf(f, &gens, n + 1)?;
            out.push((x, vertex_trusted(&m)?));
        }
    } else {
        for x in projective_points(f) {
            let mut gens: Vec<LVec> = (0..3).map(|j| lmat_column(&v.t, j)).collect();
            gens.push(t_times_line(f, &v.t, &x, -1));
            let m = hnf(f, &gens, n)?;
            if let Ok(w) = vertex_normalize(f, &m) {
                if w.parity == 0 {
                    out.push((x, w));
                }
            }
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(out)
}

pub fn neighbors(e: &Ext, v: &Vertex) -> Result<Vec<Vertex>> {
    Ok(neighbors_with_lines(e, v)?.into_iter().map(|(_, w)| w).collect())
}

/// Brute force: every index-q sub- and superlattice whose class is a vertex.
pub fn neighbors_bruteforce(e: &Ext, v: &Vertex) -> Result<Vec<Vertex>> {
    let f = e.fq();
    let n = containment_bound(f, &v.t)?;
    let mut out = Vec::new();
    let points = projective_points(f);
    // sublattices rho L + T W, W a plane given by its normal form c . y = 0
    for c in &points {
        let piv = c.iter().position(|x| !x.is_zero()).unwrap();
        let basis: Vec<Line> = (0..3)
            .filter(|&k| k != piv)
            .map(|k| {
                let mut y = [FqElem::ZERO; 3];
                y[k] = FqElem::ONE;
                y[piv] = f.neg(f.mul(c[k], f.inv_nz(c[piv])));
                y
            })
            .collect();
        let mut gens: Vec<LVec> = (0..3).map(|j| lmat_column(&v.t, j).map(|c| c.shift(1))).collect();
        gens.extend(basis.iter().map(|w| t_times_line(f, &v.t, w, 0)));
        if let Ok(w) = vertex_normalize(f, &hnf(f, &gens, n + 1)?) {
            out.push(w);
        }
    }
    for x in &points {
        let mut gens: Vec<LVec> = (0..3).map(|j| lmat_column(&v.t, j)).collect();
        gens.push(t_times_line(f, &v.t, x, -1));
        if let Ok(w) = vertex_normalize(f, &hnf(f, &gens, n)?) {
            out.push(w);
        }
    }
    out.retain(|w| w != v);
    out.sort();
    out.dedup();
    Ok(out)
}

/// Graph distance by breadth-first search, exploring at most `max` steps.
pub fn distance(e: &Ext, v: &Vertex, w: &Vertex, max: usize) -> Result<usize> {
    if v == w {
        return Ok(0);
    }
    let mut seen: HashMap<Vertex, usize> = HashMap::from([(v.clone(), 0)]);
    let mut queue = VecDeque::from([v.clone()]);
    while let Some(x) = queue.pop_front() {
        let d = seen[&x];
        if d >= max {
            continue;
        }
        for y in neighbors(e, &x)? {
            if seen.contains_key(&y) {
                continue;
            }
            if &y == w {
                return Ok(d + 1);
            }
            seen.insert(y.clone(), d + 1);
            queue.push_back(y);
        }
    }
    Err(Error::Window(format!("vertices are farther apart than {max}")))
}

/// A ball of the tree around the base vertex.
#[derive(Clone, Debug)]
pub struct Ball {
    pub vertices: Vec<Vertex>,
    pub depth: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    /// Neighbor indices inside the ball (complete for depth < radius).
    pub adj: Vec<Vec<usize>>,
    /// Neighbor lines in the basis of each vertex, aligned with `adj` for
    /// interior vertices.
    pub lines: Vec<Vec<Line>>,
    pub radius: usize,
    pub index: HashMap<Vertex, usize>,
}

impl Ball {
    pub fn base(&self) -> usize {
        0
    }
    pub fn len(&self) -> usize {
        self.vertices.len()
    }
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, nb) in self.adj.iter().enumerate() {
            for &b in nb {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Connected, acyclic, and every non-base vertex has exactly one
    /// neighbor closer to the base.
    pub fn check_tree(&self) -> bool {
        let nv = self.vertices.len();
        let ne = self.edges().len();
        if nv == 0 || ne + 1 != nv {
            return false;
        }
        let mut seen = vec![false; nv];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == nv
    }

    /// Valences of interior vertices grouped by type parity.
    pub fn valences(&self) -> [Vec<usize>; 2] {
        let mut out = [Vec::new(), Vec::new()];
        for (i, v) in self.vertices.iter().enumerate() {
            if self.depth[i] < self.radius {
                out[v.parity as usize].push(self.adj[i].len());
            }
        }
        out
    }
}

/// All vertices within distance `radius` of the base vertex.
pub fn build_ball(e: &Ext, radius: usize) -> Result<Ball> {
    build_ball_at(e, &Vertex::base(), radius)
}

pub fn build_ball_at(e: &Ext, center: &Vertex, radius: usize) -> Result<Ball> {
    let mut ball = Ball {
        vertices: vec![center.clone()],
        depth: vec![0],
        parent: vec![None],
        adj: vec![Vec::new()],
        lines: vec![Vec::new()],
        radius,
        index: HashMap::from([(center.clone(), 0)]),
    };
    let mut i = 0;
    while i < ball.vertices.len() {
        if ball.depth[i] < radius {
            let nb = neighbors_with_lines(e, &ball.vertices[i])?;
            for (line, w) in nb {
                let j = match ball.index.get(&w) {
                    Some(&j) => {
                        if Some(j) != ball.parent[i] {
                            return Err(Error::Invariant("cycle found while building ball".into()));
                        }
                        j
                    }
                    None => {
                        let j = ball.vertices.len();
                        ball.index.insert(w.clone(), j);
                        ball.vertices.push(w);
                        ball.depth.push(ball.depth[i] + 1);
                        ball.parent.push(Some(i));
                        ball.adj.push(Vec::new());
                        ball.lines.push(Vec::new());
                        j
                    }
                };
                ball.adj[i].push(j);
                ball.lines[i].push(line);
            }
        }
        i += 1;
    }
    for k in 1..ball.vertices.len() {
        if ball.depth[k] == radius {
            let p = ball.parent[k].unwrap();
            ball.adj[k].push(p);
        }
    }
    Ok(ball)
}
