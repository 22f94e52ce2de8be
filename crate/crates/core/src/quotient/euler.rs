//! Euler characteristic of a quotient window.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::QuotientGraph;
use crate::arith::SubgroupSpec;
use crate::error::{Error, Result};

pub fn is_power_of(p: u64, mut n: usize) -> bool {
    while n > 1 && (n as u64).is_multiple_of(p) {
        n /= p as usize;
    }
    n == 1
}

fn inv(n: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(n))
}

/// Σ 1/|Γ_v| over vertex orbits minus Σ 1/|Γ_e| over edge orbits.
pub fn eq1_partial(qg: &QuotientGraph) -> BigRational {
    let mut s = BigRational::zero();
    for v in &qg.vertices {
        s += inv(v.stab_order);
    }
    for e in &qg.edges {
        s -= inv(e.stab_order);
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct EulerReport {
    pub radius: usize,
    pub l0: usize,
    pub l1: usize,
    pub chi: i64,
    #[serde(serialize_with = "ser_ratio")]
    pub eq1_partial: BigRational,
    /// eq1_partial - chi - outer sphere contribution
    #[serde(serialize_with = "ser_ratio")]
    pub cancellation_residual: BigRational,
    /// contribution of unstable orbits first met on the outer sphere
    #[serde(serialize_with = "ser_ratio")]
    pub outer_contribution: BigRational,
    /// every unstable edge orbit has the stabilizer of its inner endpoint, and
    /// every unstable interior vertex orbit has exactly one such edge
    pub matched_pairs: bool,
    pub previous: (usize, usize),
    pub stable: bool,
}

fn ser_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Rational", 2)?;
    st.serialize_field("numerator", &r.numer().to_string())?;
    st.serialize_field("denominator", &r.denom().to_string())?;
    st.end()
}

fn stable_counts(qg: &QuotientGraph) -> (usize, usize) {
    (qg.vertices.iter().filter(|v| v.stable).count(), qg.edges.iter().filter(|e| e.stable).count())
}

/// Checks that all stabilizer orders in the window are powers of p.
pub fn only_p_torsion(qg: &QuotientGraph, p: u64) -> bool {
    qg.vertices.iter().all(|v| is_power_of(p, v.stab_order)) && qg.edges.iter().all(|e| is_power_of(p, e.stab_order))
}

/// l0, l1 and the stabilizer sum for the window, compared with radius - 1.
pub fn euler_report(qg: &QuotientGraph, spec: &SubgroupSpec, p: u64, allow_full: bool) -> Result<EulerReport> {
    if matches!(spec, SubgroupSpec::Full) && !allow_full {
        return Err(Error::Precondition("l0 - l1 needs a group without p'-torsion; use a congruence subgroup".into()));
    }
    if !only_p_torsion(qg, p) {
        return Err(Error::Precondition("p'-torsion observed in the window".into()));
    }
    if qg.radius == 0 {
        return Err(Error::Window("radius must be at least 1".into()));
    }
    let r = qg.radius;
    let (l0, l1) = stable_counts(qg);
    let previous = stable_counts(&qg.window(r - 1));
    let eq1 = eq1_partial(qg);
    let chi = l0 as i64 - l1 as i64;
    let mut outer = BigRational::zero();
    for v in &qg.vertices {
        if !v.stable && v.depth == r {
            outer += inv(v.stab_order);
        }
    }
    let residual = &eq1 - BigRational::from_integer(BigInt::from(chi)) - &outer;

    let mut matched = vec![0usize; qg.vertices.len()];
    let mut ok = true;
    for e in qg.edges.iter().filter(|e| !e.stable) {
        let [a, b] = e.ends;
        let inner = if qg.vertices[a].depth < qg.vertices[b].depth { a } else { b };
        if qg.vertices[inner].stab_order == e.stab_order {
            matched[inner] += 1;
        } else {
            ok = false;
        }
    }
    for (i, v) in qg.vertices.iter().enumerate() {
        if !v.stable && v.depth < r && matched[i] != 1 {
            ok = false;
        }
    }
    Ok(EulerReport {
        radius: r,
        l0,
        l1,
        chi,
        eq1_partial: eq1,
        cancellation_residual: residual,
        outer_contribution: outer,
        matched_pairs: ok,
        previous,
        stable: previous == (l0, l1),
    })
}
