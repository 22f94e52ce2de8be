//! Cusp rays and the stable/unstable split of a quotient window.

use serde::Serialize;

use super::QuotientGraph;

/// A path of vertex orbits from the base orbit to the window boundary.
#[derive(Clone, Debug, Serialize)]
pub struct CuspRay {
    pub vertices: Vec<usize>,
    pub orders: Vec<usize>,
    /// first index of the strictly increasing tail
    pub tail_start: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspReport {
    pub rays: Vec<CuspRay>,
    /// boundary paths whose profile does not end with three strictly
    /// increasing orders
    pub uncertified: Vec<CuspRay>,
}

/// Number of trailing orbits needed with strictly increasing orders.
pub const CERTIFY_LEN: usize = 3;

fn path_to_base(parent_of: &[Option<usize>], v: usize) -> Vec<usize> {
    let mut path = vec![v];
    let mut x = v;
    while let Some(p) = parent_of[x] {
        path.push(p);
        x = p;
    }
    path.reverse();
    path
}

/// Orbit parent: the orbit of the ball parent of the first ball vertex.
fn orbit_parents(qg: &QuotientGraph, ball_parent: &[Option<usize>]) -> Vec<Option<usize>> {
    qg.vertices.iter().map(|v| ball_parent[v.ball_index].map(|p| qg.vertex_of[p])).collect()
}

pub fn detect_cusp_rays(qg: &QuotientGraph, ball_parent: &[Option<usize>]) -> CuspReport {
    let parents = orbit_parents(qg, ball_parent);
    let mut rays = Vec::new();
    let mut uncertified = Vec::new();
    for (i, v) in qg.vertices.iter().enumerate() {
        if v.depth != qg.radius {
            continue;
        }
        let vertices = path_to_base(&parents, i);
        let orders: Vec<usize> = vertices.iter().map(|&x| qg.vertices[x].stab_order).collect();
        let mut tail_start = orders.len() - 1;
        while tail_start > 0 && orders[tail_start - 1] < orders[tail_start] {
            tail_start -= 1;
        }
        let ray = CuspRay { vertices, orders, tail_start };
        if ray.orders.len() - ray.tail_start >= CERTIFY_LEN {
            rays.push(ray);
        } else {
            uncertified.push(ray);
        }
    }
    CuspReport { rays, uncertified }
}

#[derive(Clone, Debug, Serialize)]
pub struct StableReport {
    pub stable_vertices: usize,
    pub unstable_vertices: usize,
    /// number of certified ray tails in each unstable component
    pub rays_per_component: Vec<usize>,
}

impl StableReport {
    pub fn one_ray_per_component(&self) -> bool {
        self.rays_per_component.iter().all(|&n| n == 1)
    }
}

pub fn classify_stable(qg: &QuotientGraph, rays: &[CuspRay]) -> StableReport {
    let n = qg.vertices.len();
    let mut comp = vec![usize::MAX; n];
    let adj = qg.adjacency();
    let mut ncomp = 0;
    for s in 0..n {
        if qg.vertices[s].stable || comp[s] != usize::MAX {
            continue;
        }
        comp[s] = ncomp;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &(y, k) in &adj[x] {
                if !qg.edges[k].stable && !qg.vertices[y].stable && comp[y] == usize::MAX {
                    comp[y] = ncomp;
                    stack.push(y);
                }
            }
        }
        ncomp += 1;
    }
    let mut rays_per_component = vec![0; ncomp];
    for r in rays {
        let last = *r.vertices.last().unwrap();
        if comp[last] != usize::MAX {
            rays_per_component[comp[last]] += 1;
        }
    }
    let stable_vertices = qg.vertices.iter().filter(|v| v.stable).count();
    StableReport { stable_vertices, unstable_vertices: n - stable_vertices, rays_per_component }
}
