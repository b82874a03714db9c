//! Property tests for the anisotropic index algebra.

use machslab_calculus::MultiIndex;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn aniso_length_matches_weighted_sum(dim in 2usize..=3, entries in prop::collection::vec(0usize..5, 5)) {
        let take = dim + 2;
        let alpha = &entries[..take];
        let m = MultiIndex::new(dim, alpha).unwrap();
        // Independent recomputation: time and tangential entries weigh 1,
        // the plain normal derivative weighs 2, the damped one weighs 1.
        let mut total = m.time();
        for j in 1..dim {
            total += m.tangential(j);
        }
        total += 2 * m.normal() + m.omega();
        prop_assert_eq!(m.aniso_length(), total);
    }

    #[test]
    fn tangential_only_iff_no_plain_normal_entry(dim in 2usize..=3, entries in prop::collection::vec(0usize..3, 5)) {
        // The wall-damped derivative is tangential at the boundary, so only the
        // plain normal slot disqualifies an index.
        let alpha = &entries[..dim + 2];
        let m = MultiIndex::new(dim, alpha).unwrap();
        prop_assert_eq!(m.is_tangential_only(), m.normal() == 0);
    }
}
