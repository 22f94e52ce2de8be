//! Arithmetic subgroups of SU(h)(A): membership, vertex stabilizers,
//! transporters and bounded enumeration.

pub mod cusp;
pub mod linalg;
pub mod search;

use crate::ell::Ext;
use crate::error::{Error, Result};
use crate::ideal::{BIdeal, QuotRing};
use crate::local::Vertex;
use crate::unitary::{group_closure, UMatrix};
use search::{lattice_bounds, Constraints, Family};

/// The full group or the principal congruence subgroup of level J.
#[derive(Clone, Debug)]
pub enum SubgroupSpec {
    Full,
    Congruence(QuotRing),
}

impl SubgroupSpec {
    pub fn congruence(j: BIdeal) -> SubgroupSpec {
        if j.is_unit() {
            SubgroupSpec::Full
        } else {
            SubgroupSpec::Congruence(QuotRing::new(j))
        }
    }
    pub fn level(&self) -> Option<&BIdeal> {
        match self {
            SubgroupSpec::Full => None,
            SubgroupSpec::Congruence(r) => Some(&r.ideal),
        }
    }
    fn ring(&self) -> Option<QuotRing> {
        match self {
            SubgroupSpec::Full => None,
            SubgroupSpec::Congruence(r) => Some(r.clone()),
        }
    }
    pub fn is_member(&self, e: &Ext, g: &UMatrix) -> bool {
        if !g.is_integral() {
            return false;
        }
        match self {
            SubgroupSpec::Full => true,
            SubgroupSpec::Congruence(r) => match r.mat_reduce(e, g) {
                Ok(m) => m == r.mat_identity(e),
                Err(_) => false,
            },
        }
    }
}

fn lattice_family(e: &Ext, spec: &SubgroupSpec, from: &Vertex, to: &Vertex) -> Result<Option<Family>> {
    let bounds = lattice_bounds(e, from.basis(), to.basis())?;
    Family::build(
        e,
        &Constraints { bounds, lattice: Some((from.basis().clone(), to.basis().clone())), congruence: spec.ring() },
    )
}

/// Elements of the subgroup mapping `from` to `to`: the first one found.
pub fn transporter(e: &Ext, spec: &SubgroupSpec, from: &Vertex, to: &Vertex) -> Result<Option<UMatrix>> {
    if from.parity() != to.parity() {
        return Ok(None);
    }
    Ok(match lattice_family(e, spec, from, to)? {
        Some(fam) => fam.search(e, true).into_iter().next(),
        None => None,
    })
}

/// A finite group given by its full element list.
#[derive(Clone, Debug)]
pub struct FiniteSubgroup {
    pub elements: Vec<UMatrix>,
}

impl FiniteSubgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
    pub fn contains(&self, g: &UMatrix) -> bool {
        self.elements.binary_search(g).is_ok()
    }
    /// Closed under products and contains the identity.
    pub fn is_group(&self, e: &Ext) -> bool {
        self.contains(&UMatrix::identity())
            && self.elements.iter().all(|a| self.elements.iter().all(|b| self.contains(&a.mul(e, b))))
    }
    /// Smallest generating set found greedily.
    pub fn generators(&self, e: &Ext) -> Result<Vec<UMatrix>> {
        let mut gens: Vec<UMatrix> = Vec::new();
        let mut span = vec![UMatrix::identity()];
        for g in &self.elements {
            if span.binary_search(g).is_ok() {
                continue;
            }
            gens.push(g.clone());
            span = group_closure(e, &gens, self.order() + 1)?;
            span.sort();
            if span.len() == self.order() {
                break;
            }
        }
        Ok(gens)
    }
    pub fn intersect(&self, spec: &SubgroupSpec, e: &Ext) -> FiniteSubgroup {
        FiniteSubgroup { elements: self.elements.iter().filter(|g| spec.is_member(e, g)).cloned().collect() }
    }
}

/// The stabilizer of a vertex in the subgroup.
pub fn stabilizer(e: &Ext, spec: &SubgroupSpec, v: &Vertex) -> Result<FiniteSubgroup> {
    let fam = lattice_family(e, spec, v, v)?.ok_or_else(|| Error::Invariant("empty stabilizer family".into()))?;
    let elements = fam.search(e, false);
    if elements.is_empty() {
        return Err(Error::Invariant("stabilizer without identity".into()));
    }
    Ok(FiniteSubgroup { elements })
}

/// Members whose entries have pole order at Q at most `deg_bound`.
pub fn enumerate_members(e: &Ext, spec: &SubgroupSpec, deg_bound: i64) -> Result<Vec<UMatrix>> {
    if deg_bound < 0 {
        return Err(Error::Validation("degree bound must be nonnegative".into()));
    }
    let fam = Family::build(e, &Constraints { bounds: [[deg_bound; 3]; 3], lattice: None, congruence: spec.ring() })?;
    Ok(fam.map(|f| f.search(e, false)).unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::Fq;
    use crate::local::{apartment_vertex, tree_act};
    use crate::poly::Poly;
    use crate::unitary::is_unitary;

    fn ext(d: &[i64]) -> Ext {
        let f = Fq::new(3, 1, None).unwrap();
        let d = Poly::from_ints(&f, d);
        Ext::new(f, d).unwrap()
    }

    #[test]
    fn constant_members_brute_force() {
        let e = ext(&[0, 1]);
        let f = e.fq().clone();
        // oracle: every constant matrix over F_3
        let mut count = 0;
        for n in 0..3usize.pow(9) {
            let mut k = n;
            let m: crate::unitary::Mat3 = std::array::from_fn(|_| {
                std::array::from_fn(|_| {
                    let c = crate::fq::FqElem((k % 3) as u16);
                    k /= 3;
                    crate::ell::EllElem::constant(c)
                })
            });
            if is_unitary(&e, &m) {
                count += 1;
            }
        }
        let _ = f;
        let found = enumerate_members(&e, &SubgroupSpec::Full, 0).unwrap();
        assert_eq!(found.len(), count);
        assert_eq!(count, 24);
    }

    #[test]
    fn apartment_stabilizers() {
        let e = ext(&[0, 1]);
        let mut orders = Vec::new();
        for i in 0..5 {
            let v = apartment_vertex(i);
            let s = stabilizer(&e, &SubgroupSpec::Full, &v).unwrap();
            assert!(s.is_group(&e));
            for g in &s.elements {
                assert_eq!(tree_act(&e, g, &v).unwrap(), v);
            }
            orders.push(s.order());
        }
        assert_eq!(orders, vec![24, 18, 54, 162, 486]);
    }

    #[test]
    fn stabilizers_match_window_filter() {
        let e = ext(&[0, 1]);
        let window = enumerate_members(&e, &SubgroupSpec::Full, 2).unwrap();
        for i in 0..3 {
            let v = apartment_vertex(i);
            let s = stabilizer(&e, &SubgroupSpec::Full, &v).unwrap();
            let bound = s.elements.iter().map(|g| -g.min_val(&e)).max().unwrap();
            assert_eq!(bound, i);
            let filtered: Vec<_> =
                window.iter().filter(|g| tree_act(&e, g, &v).unwrap() == v).cloned().collect();
            assert_eq!(filtered, s.elements);
        }
    }
}
