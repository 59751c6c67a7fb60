mod common;

use ipm_sssp::{engine_initialize, DynamicGraph, EngineConfig};
use proptest::prelude::*;

#[test]
fn quick_suite_keeps_the_sandwich_and_valid_paths() {
    for case in common::quick_suite() {
        let o = common::run_case(&case);
        assert_eq!(o.error, None, "{}", o.label);
        assert!(
            o.sandwich_violations.is_empty(),
            "{}: {:?}",
            o.label,
            o.sandwich_violations
        );
        assert!(
            o.path_failures.is_empty(),
            "{}: {:?}",
            o.label,
            o.path_failures
        );
        assert!(
            o.dual_violations.is_empty(),
            "{}: {:?}",
            o.label,
            o.dual_violations
        );
        for s in &o.summaries {
            assert!(s.ipm_iterations as f64 <= s.step_bound);
        }
    }
}

#[test]
fn detector_reports_every_engineered_drop() {
    for seed in 0..6 {
        let o = common::run_detector_stream(&common::adversarial_stream(seed));
        assert_eq!(o.error, None, "{}", o.label);
        assert_eq!(o.terminated_at, None, "{}", o.label);
        assert!(!o.dropped.is_empty(), "{}", o.label);
        assert!(o.missed.is_empty(), "{:?}", o.missed);
        assert!(o.dual_violations.is_empty(), "{:?}", o.dual_violations);
    }
}

#[test]
fn detector_terminates_exactly_when_the_total_collapses() {
    for seed in 0..10 {
        let o = common::run_detector_stream(&common::collapse_stream(seed));
        assert_eq!(o.error, None, "{}", o.label);
        assert!(o.oracle_first.is_some(), "{}", o.label);
        assert_eq!(o.terminated_at, o.oracle_first, "{}", o.label);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimates_stay_within_the_sandwich(
        n in 2usize..7,
        levels in 0usize..3,
        raw in proptest::collection::vec((0usize..7, 0usize..7, 1u64..16), 1..20),
    ) {
        let mut config = EngineConfig::new(0.3);
        config.levels = levels;
        config.max_length = 16;
        config.accelerate = true;
        let mut engine = engine_initialize(&DynamicGraph::new(n, 0).unwrap(), config).unwrap();
        let mut arcs = Vec::new();
        for (u, v, l) in raw {
            let (u, v) = (u % n, v % n);
            engine.insert(u, v, l).unwrap();
            arcs.push((u, v, l));
            let exact = common::shortest(n, &arcs, 0);
            for x in 0..n {
                match (exact[x], engine.query_distance(x)) {
                    (Some(d), Some(e)) => prop_assert!(e >= d && e as f64 <= 1.3 * d as f64),
                    (None, None) => {}
                    other => prop_assert!(false, "reachability mismatch at {x}: {other:?}"),
                }
            }
        }
    }
}
