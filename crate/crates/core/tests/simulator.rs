mod common;

use common::{census, oracle_events, random_walk};
use proptest::prelude::*;

#[test]
fn events_match_predicate_scan_on_ten_thousand_steps() {
    let mut fired = std::collections::BTreeMap::new();
    random_walk(10_000, 7, |prev, next, action, events| {
        let want = oracle_events(prev, next, action, next.config().events);
        assert_eq!(events, want.as_slice(), "action {action:?} from {}", prev.to_json());
        for e in events {
            *fired.entry(e.kind()).or_insert(0) += 1;
        }
    });
    assert_eq!(fired.len(), 3, "every event kind must be exercised: {fired:?}");
    assert!(fired.values().all(|&n| n >= 10), "{fired:?}");
}

#[test]
fn objects_are_conserved_over_a_hundred_thousand_steps() {
    random_walk(100_000, 11, |prev, next, _, _| {
        assert_eq!(census(prev), census(next));
        assert_eq!(next.step_count(), prev.step_count() + 1);
    });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn short_walks_agree_with_oracle(seed in any::<u64>()) {
        random_walk(200, seed, |prev, next, action, events| {
            let want = oracle_events(prev, next, action, next.config().events);
            assert_eq!(events, want.as_slice());
            assert_eq!(census(prev), census(next));
        });
    }
}
