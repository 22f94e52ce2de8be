//! Graphs of groups on quotient windows and their abelianizations.

pub mod snf;

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::cusp::cusp_filtration;
use crate::arith::{FiniteSubgroup, SubgroupSpec};
use crate::ell::Ext;
use crate::error::{Error, Result};
use crate::local::{tree_act, Ball};
use crate::quotient::cusps::CuspRay;
use crate::quotient::euler::EulerReport;
use crate::quotient::{BallLabels, GammaOrbits, QuotientGraph};
use crate::unitary::{fixed_boundary_point, BPoint, UMatrix};
use snf::{invariants, to_big, AbelianInvariants, Lattice};

#[derive(Clone, Debug)]
pub struct VertexGroup {
    pub ball_index: usize,
    pub group: FiniteSubgroup,
    pub gens: Vec<UMatrix>,
}

#[derive(Clone, Debug)]
pub struct EdgeGroup {
    pub ends: [usize; 2],
    pub gens: Vec<UMatrix>,
    /// images of `gens` in the two endpoint groups
    pub images: [Vec<UMatrix>; 2],
    pub order: usize,
    pub in_tree: bool,
}

#[derive(Clone, Debug)]
pub struct GraphOfGroups {
    pub vertices: Vec<VertexGroup>,
    pub edges: Vec<EdgeGroup>,
}

/// Elements of the subgroup fixing ball vertex `w`.
fn local_group(go: &GammaOrbits, labels: &BallLabels, spec: &SubgroupSpec, w: usize) -> FiniteSubgroup {
    let e = &go.e;
    let (r, g) = &labels.vertex[w];
    let gi = g.inv(e);
    let mut elements: Vec<UMatrix> = go.reps[*r]
        .stab
        .elements
        .iter()
        .filter(|k| spec.is_member(e, k))
        .map(|k| gi.mul(e, k).mul(e, g))
        .collect();
    elements.sort();
    FiniteSubgroup { elements }
}

/// Some element of the subgroup mapping ball vertex `from` to ball vertex `to`.
fn connecting(go: &GammaOrbits, labels: &BallLabels, spec: &SubgroupSpec, from: usize, to: usize) -> Result<UMatrix> {
    let e = &go.e;
    let (r1, g1) = &labels.vertex[from];
    let (r2, g2) = &labels.vertex[to];
    if r1 != r2 {
        return Err(Error::Invariant("vertices in different Γ-orbits".into()));
    }
    let g2i = g2.inv(e);
    for k in &go.reps[*r1].stab.elements {
        let c = g2i.mul(e, k).mul(e, g1);
        if spec.is_member(e, &c) {
            return Ok(c);
        }
    }
    Err(Error::Invariant("no connecting element in the subgroup".into()))
}

pub fn graph_of_groups(
    go: &GammaOrbits,
    ball: &Ball,
    labels: &BallLabels,
    qg: &QuotientGraph,
    spec: &SubgroupSpec,
) -> Result<GraphOfGroups> {
    let e = &go.e;
    let mut vertices = Vec::with_capacity(qg.vertices.len());
    for v in &qg.vertices {
        let group = local_group(go, labels, spec, v.ball_index);
        if group.order() != v.stab_order {
            return Err(Error::Invariant("vertex group order differs from the quotient".into()));
        }
        let gens = group.generators(e)?;
        vertices.push(VertexGroup { ball_index: v.ball_index, group, gens });
    }
    // spanning tree by BFS from the base orbit
    let adj = qg.adjacency();
    let mut in_tree = vec![false; qg.edges.len()];
    let mut seen = vec![false; qg.vertices.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(x) = queue.pop_front() {
        for &(y, k) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                in_tree[k] = true;
                queue.push_back(y);
            }
        }
    }
    let mut edges = Vec::with_capacity(qg.edges.len());
    for (k, ed) in qg.edges.iter().enumerate() {
        let child = ed.ball_child;
        let parent = ball.parent[child].expect("edge child has a parent");
        let (pa, pb) = if ball.vertices[parent].parity() == 0 { (parent, child) } else { (child, parent) };
        let ga = local_group(go, labels, spec, pa);
        let fixed: Vec<UMatrix> = ga
            .elements
            .iter()
            .filter(|t| tree_act(e, t, &ball.vertices[pb]).map(|w| w == ball.vertices[pb]).unwrap_or(false))
            .cloned()
            .collect();
        let eg = FiniteSubgroup { elements: fixed };
        if eg.order() != ed.stab_order {
            return Err(Error::Invariant("edge group order differs from the quotient".into()));
        }
        let gens = eg.generators(e)?;
        let mut images: [Vec<UMatrix>; 2] = [Vec::new(), Vec::new()];
        for (side, end) in [(0usize, pa), (1, pb)] {
            let target = &vertices[ed.ends[side]];
            let c = connecting(go, labels, spec, end, target.ball_index)?;
            let ci = c.inv(e);
            for t in &gens {
                let img = c.mul(e, t).mul(e, &ci);
                if !target.group.contains(&img) {
                    return Err(Error::Invariant("edge group not included in its endpoint group".into()));
                }
                images[side].push(img);
            }
        }
        edges.push(EdgeGroup { ends: ed.ends, gens, images, order: eg.order(), in_tree: in_tree[k] });
    }
    Ok(GraphOfGroups { vertices, edges })
}

/// Exponent-sum words for all elements over `gens`, and the relation
/// lattice of the abelianization (Schreier relators of the Cayley graph).
pub struct AbelianWords {
    pub words: HashMap<UMatrix, Vec<i128>>,
    pub relations: Lattice,
}

pub fn abelian_words(e: &Ext, group: &FiniteSubgroup, gens: &[UMatrix]) -> Result<AbelianWords> {
    let n = gens.len();
    let mut words: HashMap<UMatrix, Vec<i128>> = HashMap::new();
    let mut relations = Lattice::new(n);
    words.insert(UMatrix::identity(), vec![0; n]);
    let mut queue = VecDeque::from([UMatrix::identity()]);
    while let Some(x) = queue.pop_front() {
        let wx = words[&x].clone();
        for (s, g) in gens.iter().enumerate() {
            let y = x.mul(e, g);
            let mut w = wx.clone();
            w[s] += 1;
            match words.get(&y) {
                Some(wy) => {
                    let rel: Vec<i128> = w.iter().zip(wy).map(|(a, b)| a - b).collect();
                    if rel.iter().any(|&c| c != 0) {
                        relations.insert(rel);
                    }
                }
                None => {
                    if words.len() >= group.order() {
                        return Err(Error::Invariant("generators leave the group".into()));
                    }
                    words.insert(y.clone(), w);
                    queue.push_back(y);
                }
            }
        }
    }
    if words.len() != group.order() {
        return Err(Error::Invariant("generators do not generate the group".into()));
    }
    Ok(AbelianWords { words, relations })
}

/// Abelianization of a finite group given by its elements.
pub fn finite_abelianization(e: &Ext, group: &FiniteSubgroup, gens: &[UMatrix]) -> Result<AbelianInvariants> {
    let aw = abelian_words(e, group, gens)?;
    Ok(invariants(to_big(&aw.relations.rows()), gens.len()))
}

/// Abelianized fundamental group of the graph of groups.
pub fn abelianization(e: &Ext, gog: &GraphOfGroups) -> Result<AbelianInvariants> {
    let mut offset = Vec::with_capacity(gog.vertices.len());
    let mut ncols = 0;
    for v in &gog.vertices {
        offset.push(ncols);
        ncols += v.gens.len();
    }
    let loops = gog.edges.iter().filter(|x| !x.in_tree).count();
    let total = ncols + loops;
    let mut rows: Vec<Vec<i128>> = Vec::new();
    let mut words = Vec::with_capacity(gog.vertices.len());
    for (i, v) in gog.vertices.iter().enumerate() {
        let aw = abelian_words(e, &v.group, &v.gens)?;
        for r in aw.relations.rows() {
            let mut row = vec![0i128; total];
            row[offset[i]..offset[i] + r.len()].copy_from_slice(&r);
            rows.push(row);
        }
        words.push(aw.words);
    }
    for ed in &gog.edges {
        for k in 0..ed.gens.len() {
            let mut row = vec![0i128; total];
            for (side, sign) in [(0usize, 1i128), (1, -1)] {
                let v = ed.ends[side];
                let w = words[v].get(&ed.images[side][k]).ok_or_else(|| Error::Invariant("image outside vertex group".into()))?;
                for (j, c) in w.iter().enumerate() {
                    row[offset[v] + j] += sign * c;
                }
            }
            if row.iter().any(|&c| c != 0) {
                rows.push(row);
            }
        }
    }
    let mut lat = Lattice::new(total);
    for r in rows {
        lat.insert(r);
    }
    Ok(invariants(to_big(&lat.rows()), total))
}

/// Abelianization of the part of U_xi fixing the end of each cusp ray,
/// computed from the unipotent parametrization.
#[derive(Clone, Debug, Serialize)]
pub struct CuspPiece {
    pub ray_end: usize,
    pub point: String,
    pub window: i64,
    pub order: usize,
    pub invariants: AbelianInvariants,
}

pub fn cusp_pieces(
    go: &GammaOrbits,
    ball: &Ball,
    labels: &BallLabels,
    qg: &QuotientGraph,
    rays: &[CuspRay],
    spec: &SubgroupSpec,
    max_window: i64,
) -> Result<Vec<CuspPiece>> {
    let e = &go.e;
    let mut out = Vec::new();
    for ray in rays {
        let end = *ray.vertices.last().unwrap();
        let w = qg.vertices[end].ball_index;
        let vert = &ball.vertices[w];
        // the boundary point is read off from a generator set of the stabilizer
        let stab = local_group(go, labels, spec, w);
        let gens = stab.generators(e)?;
        let xi = fixed_boundary_point(e, &gens, stab.order() + 1)?;
        let mut prev: Option<Vec<UMatrix>> = None;
        let mut found = None;
        for win in 0..=max_window {
            let Ok(cf) = cusp_filtration(e, &xi, spec, win) else { continue };
            let mut fixing: Vec<UMatrix> = cf
                .elements
                .into_iter()
                .map(|(_, _, g)| g)
                .filter(|g| tree_act(e, g, vert).map(|x| &x == vert).unwrap_or(false))
                .collect();
            fixing.sort();
            if prev.as_ref() == Some(&fixing) && fixing.len() > 1 {
                found = Some((win - 1, fixing));
                break;
            }
            prev = Some(fixing);
        }
        let (win, elements) = found.ok_or_else(|| Error::Window(format!("cusp window up to {max_window} did not stabilize")))?;
        let group = FiniteSubgroup { elements };
        let gens = group.generators(e)?;
        let closed = group.contains(&UMatrix::identity())
            && gens.iter().all(|s| group.elements.iter().all(|x| group.contains(&x.mul(e, s))));
        if !closed {
            return Err(Error::Window("cusp window does not close up to a group".into()));
        }
        let invariants = finite_abelianization(e, &group, &gens)?;
        out.push(CuspPiece { ray_end: end, point: xi_label(e, &xi), window: win, order: group.order(), invariants });
    }
    Ok(out)
}

fn xi_label(e: &Ext, xi: &BPoint) -> String {
    xi.fmt(e)
}

/// Rank of H_1 of the quotient window relative to its unstable part.
pub fn relative_h1_rank(qg: &QuotientGraph) -> usize {
    let stable_v: Vec<usize> = (0..qg.vertices.len()).filter(|&i| qg.vertices[i].stable).collect();
    let col: HashMap<usize, usize> = stable_v.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let rows: Vec<Vec<BigInt>> = qg
        .edges
        .iter()
        .filter(|x| x.stable)
        .map(|x| {
            let mut r = vec![BigInt::from(0); stable_v.len()];
            if let Some(&c) = col.get(&x.ends[0]) {
                r[c] -= 1;
            }
            if let Some(&c) = col.get(&x.ends[1]) {
                r[c] += 1;
            }
            r
        })
        .collect();
    let nedges = rows.len();
    let rank = snf::smith_diagonal(rows, stable_v.len()).len();
    nedges - rank
}

#[derive(Clone, Debug, Serialize)]
pub struct RelHomReport {
    pub radius: usize,
    pub chi: i64,
    pub steinberg_rank: i64,
    pub h1_rel_rank: i64,
    pub abelianization: AbelianInvariants,
    pub cycle_rank: usize,
    pub torsion_p_rank: usize,
    pub cusp_p_rank: usize,
    pub free_rank_is_cycle_rank: bool,
    pub free_rank_bounded: bool,
    pub steinberg_matches: bool,
    pub torsion_matches_cusps: bool,
    pub torsion_is_p_group: bool,
    pub consistency: bool,
}

pub fn check_homology(
    e: &Ext,
    qg: &QuotientGraph,
    euler: &EulerReport,
    ab: &AbelianInvariants,
    cusps: &[CuspPiece],
) -> RelHomReport {
    let p = e.fq().p();
    let chi = euler.chi;
    let steinberg_rank = euler.l1 as i64 - euler.l0 as i64;
    let h1_rel_rank = relative_h1_rank(qg) as i64;
    let cycle_rank = qg.cycle_rank();
    let torsion_p_rank = ab.p_rank(p);
    let cusp_p_rank: usize = cusps.iter().map(|c| c.invariants.p_rank(p)).sum();
    let a = ab.free_rank == cycle_rank;
    let b = ab.free_rank as i64 <= -chi;
    let c = steinberg_rank == -chi && h1_rel_rank == -chi;
    let d = torsion_p_rank == cusp_p_rank;
    let t = ab.torsion_is_p_group(p);
    RelHomReport {
        radius: qg.radius,
        chi,
        steinberg_rank,
        h1_rel_rank,
        abelianization: ab.clone(),
        cycle_rank,
        torsion_p_rank,
        cusp_p_rank,
        free_rank_is_cycle_rank: a,
        free_rank_bounded: b,
        steinberg_matches: c,
        torsion_matches_cusps: d,
        torsion_is_p_group: t,
        consistency: a && b && c && d && t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::stabilizer;
    use crate::ell::EllElem;
    use crate::fq::Fq;
    use crate::ideal::BIdeal;
    use crate::local::apartment_vertex;
    use crate::poly::Poly;
    use crate::unitary::group_closure;
    use num_traits::ToPrimitive;

    fn ext(d: &[i64]) -> Ext {
        let f = Fq::new(3, 1, None).unwrap();
        let d = Poly::from_ints(&f, d);
        Ext::new(f, d).unwrap()
    }

    // |G^ab| = |G| / |[G, G]|
    fn commutator_index(e: &Ext, g: &FiniteSubgroup) -> usize {
        let mut comms = Vec::new();
        for a in &g.elements {
            for b in &g.elements {
                let c = a.mul(e, b).mul(e, &a.inv(e)).mul(e, &b.inv(e));
                comms.push(c);
            }
        }
        comms.sort();
        comms.dedup();
        g.order() / group_closure(e, &comms, g.order() + 1).unwrap().len()
    }

    #[test]
    fn finite_abelianization_matches_commutators() {
        let e = ext(&[0, 1]);
        let j = BIdeal::new(&e, vec![EllElem::omega()]).unwrap();
        for spec in [SubgroupSpec::Full, SubgroupSpec::congruence(j)] {
            for i in 0..3 {
                let g = stabilizer(&e, &spec, &apartment_vertex(i)).unwrap();
                let gens = g.generators(&e).unwrap();
                let ab = finite_abelianization(&e, &g, &gens).unwrap();
                assert_eq!(ab.free_rank, 0);
                let size: usize = ab.torsion.iter().map(|t| t.to_usize().unwrap()).product();
                assert_eq!(size, commutator_index(&e, &g), "vertex {i}");
            }
        }
    }
}
