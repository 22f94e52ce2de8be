//! Quotients of tree balls by Γ and by principal congruence subgroups.
//!
//! Orbits are found through the Γ-quotient: every ball vertex w gets a
//! representative r and some g in Γ with g.w = rep(r). For Γ_J, which is
//! normal in Γ, the Γ_J-orbits inside Γ.rep(r) are the cosets
//! π(g^{-1}) π(Γ_r) in π(Γ) ⊂ SL_3(B/J).

pub mod cusps;
pub mod euler;

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::arith::{stabilizer, transporter, FiniteSubgroup, SubgroupSpec};
use crate::ell::Ext;
use crate::error::{Error, Result};
use crate::fq::FqElem;
use crate::ideal::{qmat_closure, QMat, QuotRing};
use crate::local::tree::{mat_apply_fq, normalize_line, reduction_on};
use crate::local::tree::VertexJson;
use crate::local::{tree_act, Ball, Line, Vertex};
use crate::unitary::UMatrix;

type Red = [[FqElem; 3]; 3];

/// A Γ-orbit representative with its stabilizer and the action of the
/// stabilizer on the neighbors.
#[derive(Clone, Debug)]
pub struct RepData {
    pub vertex: Vertex,
    pub stab: FiniteSubgroup,
    reductions: Vec<Red>,
    pub lines: Vec<(Line, Vertex)>,
    /// line index -> orbit id under the stabilizer
    pub orbit_of: Vec<usize>,
    /// s in the stabilizer with s.neighbor(i) = neighbor(canon[orbit_of[i]])
    pub to_canon: Vec<UMatrix>,
    pub canon: Vec<usize>,
    pub orbit_size: Vec<usize>,
    /// orbit id -> (rep, h) with h.neighbor(canon) = rep vertex
    link: Vec<Option<(usize, UMatrix)>>,
}

/// Incrementally computed Γ-quotient of the tree.
#[derive(Debug)]
pub struct GammaOrbits {
    pub e: Ext,
    pub reps: Vec<RepData>,
}

impl GammaOrbits {
    pub fn new(e: &Ext) -> Result<GammaOrbits> {
        let mut go = GammaOrbits { e: e.clone(), reps: Vec::new() };
        let v = Vertex::base();
        let stab = stabilizer(e, &SubgroupSpec::Full, &v)?;
        go.add_rep(v, stab)?;
        Ok(go)
    }

    fn add_rep(&mut self, v: Vertex, stab: FiniteSubgroup) -> Result<usize> {
        let e = &self.e;
        let f = e.fq();
        let lines = crate::local::neighbors_with_lines(e, &v)?;
        let line_index: HashMap<Line, usize> = lines.iter().enumerate().map(|(i, (l, _))| (*l, i)).collect();
        let reductions: Vec<Red> = stab.elements.iter().map(|g| reduction_on(e, g, &v)).collect::<Result<_>>()?;
        let n = lines.len();
        let mut orbit_of = vec![usize::MAX; n];
        let mut to_canon = vec![UMatrix::identity(); n];
        let mut canon = Vec::new();
        let mut orbit_size = Vec::new();
        for i in 0..n {
            if orbit_of[i] != usize::MAX {
                continue;
            }
            let o = canon.len();
            canon.push(i);
            let mut size = 0;
            for (g, u) in stab.elements.iter().zip(&reductions) {
                let img = normalize_line(f, &mat_apply_fq(f, u, &lines[i].0)).expect("invertible reduction");
                let j = *line_index.get(&img).ok_or_else(|| Error::Invariant("line action leaves the neighbors".into()))?;
                if orbit_of[j] == usize::MAX {
                    orbit_of[j] = o;
                    to_canon[j] = g.inv(e);
                    size += 1;
                }
            }
            orbit_size.push(size);
        }
        let link = vec![None; canon.len()];
        self.reps.push(RepData { vertex: v, stab, reductions, lines, orbit_of, to_canon, canon, orbit_size, link });
        Ok(self.reps.len() - 1)
    }

    /// Index of neighbor `n` of rep `r`.
    pub fn locate(&self, r: usize, n: &Vertex) -> Result<usize> {
        self.reps[r]
            .lines
            .binary_search_by(|(_, w)| w.cmp(n))
            .map_err(|_| Error::Invariant("vertex is not a neighbor of its representative".into()))
    }

    /// The rep of the canonical neighbor of orbit `o` at rep `r`.
    pub fn resolve(&mut self, r: usize, o: usize) -> Result<(usize, UMatrix)> {
        if let Some(x) = &self.reps[r].link[o] {
            return Ok(x.clone());
        }
        let e = self.e.clone();
        let n = self.reps[r].lines[self.reps[r].canon[o]].1.clone();
        let stab = stabilizer(&e, &SubgroupSpec::Full, &n)?;
        let mut found = None;
        for (c, rep) in self.reps.iter().enumerate() {
            if rep.vertex.parity() != n.parity() || rep.stab.order() != stab.order() {
                continue;
            }
            if let Some(h) = transporter(&e, &SubgroupSpec::Full, &n, &rep.vertex)? {
                found = Some((c, h));
                break;
            }
        }
        let out = match found {
            Some(x) => x,
            None => (self.add_rep(n, stab)?, UMatrix::identity()),
        };
        self.reps[r].link[o] = Some(out.clone());
        Ok(out)
    }

    /// Stabilizer in Γ of the canonical edge of orbit `o` at rep `r`.
    pub fn edge_stab(&self, r: usize, o: usize) -> Vec<UMatrix> {
        let f = self.e.fq();
        let rep = &self.reps[r];
        let line = rep.lines[rep.canon[o]].0;
        rep.stab
            .elements
            .iter()
            .zip(&rep.reductions)
            .filter(|(_, u)| normalize_line(f, &mat_apply_fq(f, u, &line)) == Some(line))
            .map(|(g, _)| g.clone())
            .collect()
    }

    /// Generators of the image of Γ known so far: all rep stabilizers and links.
    pub fn known_elements(&self) -> Vec<UMatrix> {
        let mut out = Vec::new();
        for rep in &self.reps {
            out.extend(rep.stab.elements.iter().cloned());
            out.extend(rep.link.iter().flatten().map(|(_, h)| h.clone()));
        }
        out
    }
}

/// Γ-labels of the vertices and edges of a ball centered at the base.
#[derive(Clone, Debug)]
pub struct BallLabels {
    /// rep index and g with g.vertex = rep vertex
    pub vertex: Vec<(usize, UMatrix)>,
    /// for each non-base vertex, the edge to its parent: (rep of the parity-0
    /// end, orbit id, g mapping the edge to the canonical one)
    pub edge: Vec<Option<(usize, usize, UMatrix)>>,
}

pub fn label_ball(go: &mut GammaOrbits, ball: &Ball) -> Result<BallLabels> {
    if ball.vertices[0] != Vertex::base() {
        return Err(Error::Precondition("ball must be centered at the base vertex".into()));
    }
    let e = go.e.clone();
    let mut vertex: Vec<(usize, UMatrix)> = vec![(0, UMatrix::identity())];
    let mut edge = vec![None];
    for i in 1..ball.len() {
        let p = ball.parent[i].expect("non-base vertex has a parent");
        let (rp, gp) = vertex[p].clone();
        let n = tree_act(&e, &gp, &ball.vertices[i])?;
        let li = go.locate(rp, &n)?;
        let o = go.reps[rp].orbit_of[li];
        let s = go.reps[rp].to_canon[li].clone();
        let (rn, h) = go.resolve(rp, o)?;
        let sg = s.mul(&e, &gp);
        let gi = h.mul(&e, &sg);
        let lab = if ball.vertices[p].parity() == 0 {
            (rp, o, sg)
        } else {
            let m = tree_act(&e, &gi, &ball.vertices[p])?;
            let lj = go.locate(rn, &m)?;
            let o2 = go.reps[rn].orbit_of[lj];
            (rn, o2, go.reps[rn].to_canon[lj].mul(&e, &gi))
        };
        vertex.push((rn, gi));
        edge.push(Some(lab));
    }
    Ok(BallLabels { vertex, edge })
}

/// Left cosets of images of Γ-stabilizers in Q = π(Γ) ⊂ SL_3(B/J).
struct CosetKeys {
    ring: QuotRing,
    elems: Vec<QMat>,
    index: HashMap<QMat, u32>,
    /// per rep: (|π(Γ_r)|, coset id of each element of Q)
    vgroups: Vec<(usize, Vec<u32>)>,
    egroups: HashMap<(usize, usize), (usize, usize, Vec<u32>)>,
}

impl CosetKeys {
    fn new(go: &GammaOrbits, ring: &QuotRing, cap: usize) -> Result<CosetKeys> {
        let elems = congruence_image(go, ring, cap)?;
        let index = elems.iter().enumerate().map(|(i, x)| (x.clone(), i as u32)).collect();
        Ok(CosetKeys { ring: ring.clone(), elems, index, vgroups: Vec::new(), egroups: HashMap::new() })
    }
    fn table(&self, e: &Ext, group: &[UMatrix]) -> Result<(usize, Vec<u32>)> {
        let mut img: Vec<QMat> = group.iter().map(|g| self.ring.mat_reduce(e, g)).collect::<Result<_>>()?;
        img.sort();
        img.dedup();
        let mut ids = vec![u32::MAX; self.elems.len()];
        let mut next = 0;
        for i in 0..self.elems.len() {
            if ids[i] != u32::MAX {
                continue;
            }
            for h in &img {
                let j = self.lookup(&self.ring.mat_mul(e, &self.elems[i], h))?;
                ids[j as usize] = next;
            }
            next += 1;
        }
        Ok((img.len(), ids))
    }
    fn lookup(&self, x: &QMat) -> Result<u32> {
        self.index.get(x).copied().ok_or_else(|| Error::Invariant("element outside the congruence image".into()))
    }
    fn key(&self, e: &Ext, g: &UMatrix, table: &[u32]) -> Result<u32> {
        let x = self.ring.mat_reduce(e, &g.inv(e))?;
        Ok(table[self.lookup(&x)? as usize])
    }
}

/// Bound on |π(Γ)| for congruence quotients.
pub const IMAGE_CAP: usize = 1 << 20;

#[derive(Clone, Debug)]
pub struct QVertex {
    pub rep: Vertex,
    pub ball_index: usize,
    /// distance to the base of the first ball vertex in the orbit
    pub depth: usize,
    pub stab_order: usize,
    pub stable: bool,
    pub gamma_rep: usize,
}

#[derive(Clone, Debug)]
pub struct QEdge {
    /// (parity-0 end, parity-1 end)
    pub ends: [usize; 2],
    /// depth of the outer endpoint of the first ball edge in the orbit
    pub depth: usize,
    pub stab_order: usize,
    pub stable: bool,
    /// outer ball vertex of the first ball edge in the orbit
    pub ball_child: usize,
}

/// Quotient of a ball by a subgroup.
#[derive(Clone, Debug)]
pub struct QuotientGraph {
    pub vertices: Vec<QVertex>,
    pub edges: Vec<QEdge>,
    /// ball vertex -> vertex orbit
    pub vertex_of: Vec<usize>,
    /// ball vertex -> orbit of the edge to its parent
    pub edge_of: Vec<Option<usize>>,
    pub radius: usize,
}

pub fn quotient_ball(go: &mut GammaOrbits, ball: &Ball, spec: &SubgroupSpec) -> Result<QuotientGraph> {
    let labels = label_ball(go, ball)?;
    quotient_from_labels(go, ball, &labels, spec)
}

pub fn quotient_from_labels(
    go: &mut GammaOrbits,
    ball: &Ball,
    labels: &BallLabels,
    spec: &SubgroupSpec,
) -> Result<QuotientGraph> {
    let e = go.e.clone();
    let mut keys = match spec {
        SubgroupSpec::Full => None,
        SubgroupSpec::Congruence(ring) => Some(CosetKeys::new(go, ring, IMAGE_CAP)?),
    };
    if let Some(k) = keys.as_mut() {
        for rep in &go.reps {
            let t = k.table(&e, &rep.stab.elements)?;
            k.vgroups.push(t);
        }
    }
    let mut vmap: BTreeMap<(usize, Option<u32>), usize> = BTreeMap::new();
    let mut vertices: Vec<QVertex> = Vec::new();
    let mut vertex_of = Vec::with_capacity(ball.len());
    for (i, (r, g)) in labels.vertex.iter().enumerate() {
        let key = match &keys {
            None => (*r, None),
            Some(k) => (*r, Some(k.key(&e, g, &k.vgroups[*r].1)?)),
        };
        let id = *vmap.entry(key).or_insert_with(|| {
            let order = match &keys {
                None => go.reps[*r].stab.order(),
                Some(k) => go.reps[*r].stab.order() / k.vgroups[*r].0,
            };
            vertices.push(QVertex {
                rep: ball.vertices[i].clone(),
                ball_index: i,
                depth: ball.depth[i],
                stab_order: order,
                stable: order == 1,
                gamma_rep: *r,
            });
            vertices.len() - 1
        });
        vertex_of.push(id);
    }
    let mut emap: BTreeMap<(usize, usize, Option<u32>), usize> = BTreeMap::new();
    let mut edges: Vec<QEdge> = Vec::new();
    let mut edge_of = vec![None; ball.len()];
    for i in 1..ball.len() {
        let (r, o, g) = labels.edge[i].clone().expect("edge label");
        let gamma_order = go.reps[r].stab.order() / go.reps[r].orbit_size[o];
        let (key, order) = match keys.as_mut() {
            None => ((r, o, None), gamma_order),
            Some(k) => {
                if !k.egroups.contains_key(&(r, o)) {
                    let st = go.edge_stab(r, o);
                    debug_assert_eq!(st.len(), gamma_order);
                    let (m, t) = k.table(&e, &st)?;
                    k.egroups.insert((r, o), (m, st.len(), t));
                }
                let (m, n, t) = &k.egroups[&(r, o)];
                ((r, o, Some(k.key(&e, &g, t)?)), n / m)
            }
        };
        let p = ball.parent[i].unwrap();
        let ends = if ball.vertices[p].parity() == 0 { [vertex_of[p], vertex_of[i]] } else { [vertex_of[i], vertex_of[p]] };
        let id = *emap.entry(key).or_insert_with(|| {
            edges.push(QEdge { ends, depth: ball.depth[i], stab_order: order, stable: order == 1, ball_child: i });
            edges.len() - 1
        });
        if edges[id].ends != ends {
            return Err(Error::Invariant("edge orbit with inconsistent endpoints".into()));
        }
        edge_of[i] = Some(id);
    }
    Ok(QuotientGraph { vertices, edges, vertex_of, edge_of, radius: ball.radius })
}

/// π(Γ) in SL_3(B/J), generated by the images of everything found so far.
pub fn congruence_image(go: &GammaOrbits, ring: &QuotRing, bound: usize) -> Result<Vec<QMat>> {
    let e = &go.e;
    let mut gens: Vec<QMat> = go.known_elements().iter().map(|g| ring.mat_reduce(e, g)).collect::<Result<_>>()?;
    gens.sort();
    gens.dedup();
    qmat_closure(ring, e, &gens, bound)
}

impl QuotientGraph {
    /// The part seen from the ball of radius `r` <= radius.
    pub fn window(&self, r: usize) -> QuotientGraph {
        let keep_v: Vec<usize> = (0..self.vertices.len()).filter(|&i| self.vertices[i].depth <= r).collect();
        let mut new_id = vec![usize::MAX; self.vertices.len()];
        for (k, &i) in keep_v.iter().enumerate() {
            new_id[i] = k;
        }
        let vertices = keep_v.iter().map(|&i| self.vertices[i].clone()).collect();
        let keep_e: Vec<usize> = (0..self.edges.len()).filter(|&i| self.edges[i].depth <= r).collect();
        let mut new_e = vec![usize::MAX; self.edges.len()];
        for (k, &i) in keep_e.iter().enumerate() {
            new_e[i] = k;
        }
        let edges = keep_e
            .iter()
            .map(|&i| {
                let mut x = self.edges[i].clone();
                x.ends = x.ends.map(|v| new_id[v]);
                x
            })
            .collect();
        QuotientGraph {
            vertices,
            edges,
            vertex_of: self.vertex_of.iter().map(|&v| new_id.get(v).copied().unwrap_or(usize::MAX)).collect(),
            edge_of: self.edge_of.iter().map(|x| x.and_then(|i| new_e.get(i).copied()).filter(|&i| i != usize::MAX)).collect(),
            radius: r,
        }
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (k, ed) in self.edges.iter().enumerate() {
            adj[ed.ends[0]].push((ed.ends[1], k));
            adj[ed.ends[1]].push((ed.ends[0], k));
        }
        adj
    }

    pub fn components(&self) -> usize {
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut count = 0;
        for s in 0..self.vertices.len() {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &(y, _) in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        count
    }

    /// First Betti number of the quotient graph.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + self.components() - self.vertices.len()
    }

    pub fn is_tree(&self) -> bool {
        self.components() == 1 && self.cycle_rank() == 0
    }

    pub fn to_json(&self, rays: &[cusps::CuspRay]) -> QuotientJson {
        QuotientJson {
            radius: self.radius,
            orbits: self
                .vertices
                .iter()
                .map(|v| OrbitJson { rep: v.rep.to_json(), depth: v.depth, stabilizer_order: v.stab_order, stable: v.stable })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|x| EdgeJson { ends: x.ends, depth: x.depth, stabilizer_order: x.stab_order, stable: x.stable })
                .collect(),
            stabilizer_orders: self.vertices.iter().map(|v| v.stab_order).collect(),
            stable_flags: self.vertices.iter().map(|v| v.stable).collect(),
            cusp_rays: rays.iter().map(|r| r.vertices.clone()).collect(),
        }
    }

    pub fn to_dot(&self, rays: &[cusps::CuspRay]) -> String {
        let on_ray: std::collections::HashSet<usize> = rays.iter().flat_map(|r| r.vertices.iter().copied()).collect();
        let mut s = String::from("graph quotient {\n  node [shape=circle];\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let shape = if v.rep.parity() == 0 { "circle" } else { "box" };
            let style = if on_ray.contains(&i) { ", style=filled, fillcolor=lightgrey" } else { "" };
            s.push_str(&format!("  v{i} [label=\"{}\", shape={shape}{style}];\n", v.stab_order));
        }
        for ed in &self.edges {
            s.push_str(&format!("  v{} -- v{} [label=\"{}\"];\n", ed.ends[0], ed.ends[1], ed.stab_order));
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Serialize, Debug)]
pub struct OrbitJson {
    pub rep: VertexJson,
    pub depth: usize,
    pub stabilizer_order: usize,
    pub stable: bool,
}

#[derive(Serialize, Debug)]
pub struct EdgeJson {
    pub ends: [usize; 2],
    pub depth: usize,
    pub stabilizer_order: usize,
    pub stable: bool,
}

#[derive(Serialize, Debug)]
pub struct QuotientJson {
    pub radius: usize,
    pub orbits: Vec<OrbitJson>,
    pub edges: Vec<EdgeJson>,
    pub stabilizer_orders: Vec<usize>,
    pub stable_flags: Vec<bool>,
    pub cusp_rays: Vec<Vec<usize>>,
}
