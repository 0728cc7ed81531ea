mod common;

#[test]
fn protocol_invariants_hold_on_randomized_rollouts() {
    let (idle, partial, full) = common::check_protocol(500);
    assert!(idle > 0 && partial > 20 && full > 20, "coverage idle={idle} partial={partial} full={full}");
}
