mod common;

use common::props::*;
use proptest::prelude::*;

const CASES: u32 = 256;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]
    #[test]
    fn double_point_involution_is_free_and_equivariant(f in any_map()) {
        involution_of_double_points(f)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]
    #[test]
    fn yang_index_survives_subdivision(case in free_involution()) {
        yang_under_subdivision(case)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]
    #[test]
    fn coboundary_of_coboundary_vanishes(case in cochain()) {
        coboundary_squares_to_zero(case)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]
    #[test]
    fn witnesses_are_antipodal(case in witness_case()) {
        witness_antipodal(case)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]
    #[test]
    fn general_position_is_affine_invariant(case in affine_case()) {
        general_position_affine_invariant(case)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]
    #[test]
    fn g_phi_is_open(case in g_phi_case()) {
        g_phi_open(case)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]
    #[test]
    fn files_round_trip_exactly(case in round_trip_case()) {
        files_round_trip(case)?;
    }
}
