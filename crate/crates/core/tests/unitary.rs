//! Random suites for SU(h): constructors, Bruhat form and the boundary.

mod common;

use common::checks::*;
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn constructors_are_unitary(ctx in 0usize..4, g in raw_gen()) {
        constructor_unitary(&contexts()[ctx], &g)?;
    }

    #[test]
    fn bruhat_recomposition(ctx in 0usize..4, gens in prop::collection::vec(raw_gen(), 1..5)) {
        bruhat_recomposes(&contexts()[ctx], &gens)?;
    }

    #[test]
    fn boundary_action(
        ctx in 0usize..4,
        g in prop::collection::vec(raw_gen(), 1..4),
        h in prop::collection::vec(raw_gen(), 1..4),
        xi in raw_point(),
    ) {
        boundary_action_law(&contexts()[ctx], &g, &h, &xi)?;
    }

    #[test]
    fn boundary_lines_are_equivariant(ctx in 0usize..4, g in prop::collection::vec(raw_gen(), 1..4), xi in raw_point()) {
        line_equivariance(&contexts()[ctx], &g, &xi)?;
    }
}
