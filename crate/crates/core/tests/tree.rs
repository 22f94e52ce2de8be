//! Random suites for the action on the tree.

mod common;

use common::checks::*;
use common::*;
use proptest::prelude::*;
use unitree::local::build_ball;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn torus_and_flip(ctx in 0usize..4, x in raw_ell(), i in -6i64..=6) {
        apartment_formulas(&contexts()[ctx], &x, i)?;
    }

    #[test]
    fn neighbors_are_equivariant(ctx in 0usize..2, g in prop::collection::vec(raw_gen(), 1..3), k in any::<prop::sample::Index>()) {
        let e = &contexts()[ctx];
        let ball = build_ball(e, 2).unwrap();
        neighbor_equivariance(e, &g, &ball.vertices[k.index(ball.len())])?;
    }
}
