//! Random suites for field, extension and unipotent arithmetic.

mod common;

use common::checks::*;
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn fq_field(ctx in 0usize..4, a in any::<u16>(), b in any::<u16>(), c in any::<u16>()) {
        fq_axioms(&contexts()[ctx], a, b, c)?;
    }

    #[test]
    fn ell_field(ctx in 0usize..4, x in raw_ell(), y in raw_ell(), z in raw_ell()) {
        ell_axioms(&contexts()[ctx], &x, &y, &z)?;
    }

    #[test]
    fn conjugation_norm_trace(ctx in 0usize..4, x in raw_ell(), y in raw_ell()) {
        conj_norm_trace(&contexts()[ctx], &x, &y)?;
    }

    #[test]
    fn valuation(ctx in 0usize..4, x in raw_ell(), y in raw_ell()) {
        valuation_axioms(&contexts()[ctx], &x, &y)?;
    }

    #[test]
    fn unipotent_group_law(ctx in 0usize..4, u in raw_ell(), b in raw_rat(), x in raw_ell(), c in raw_rat()) {
        ua_group_law(&contexts()[ctx], &u, &b, &x, &c)?;
    }

    #[test]
    fn unipotent_commutator(ctx in 0usize..4, u in raw_ell(), b in raw_rat(), x in raw_ell(), c in raw_rat()) {
        ua_commutator(&contexts()[ctx], &u, &b, &x, &c)?;
    }
}
