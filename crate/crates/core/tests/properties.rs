use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use profact::base::validate_id;
use profact::factorize::reedy;
use profact::gen::{random_nat_trans, random_poset};
use profact::json::{diagram_from_json, diagram_to_json};
use profact::procalc::{identity_pm, pm_leq};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reedy_report_passes(seed in any::<u64>(), n in 1usize..5, fiber in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = Arc::new(random_poset(&mut rng, n, 0.5));
        let f = random_nat_trans(&mut rng, shape, fiber);
        let r = reedy(&f).unwrap();
        prop_assert!(r.report.passed());
        prop_assert_eq!(r.verify(), r.report);
    }

    #[test]
    fn identity_is_reflexive(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = Arc::new(random_poset(&mut rng, n, 0.5));
        let f = random_nat_trans(&mut rng, shape, 3);
        let id = identity_pm(&f);
        prop_assert!(pm_leq(&f, &id, &id));
    }

    #[test]
    fn diagram_json_round_trip(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = Arc::new(random_poset(&mut rng, n, 0.5));
        let d = random_nat_trans(&mut rng, shape, 3).source().clone();
        let j = diagram_to_json(&d);
        let back = diagram_from_json(&j).unwrap();
        prop_assert_eq!(diagram_to_json(&back), j);
    }

    #[test]
    fn tuples_of_atoms_are_ids(parts in prop::collection::vec("[a-z0-9]{1,4}", 1..4)) {
        let id = format!("({})", parts.join(","));
        prop_assert!(validate_id(&id).is_ok());
        let unbalanced = format!("{})", id);
        prop_assert!(validate_id(&unbalanced).is_err());
    }
}
