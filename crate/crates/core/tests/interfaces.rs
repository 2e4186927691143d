//! External-interface tests: the instance text format, policy files, trace
//! export, and bound-inputs files, plus property tests of the format and
//! selection invariants.

use bclab_core::bounds::{bound_table, BoundInputs};
use bclab_core::engine::{
    count_state_action_pairs, export_trace, solve_bnc, tree_size_cost, BncConfig, PenaltySpec,
};
use bclab_core::instance::{
    enumerate_integer_optimum, generate_instance, parse_instance, serialize_instance, Family,
    MipInstance, OptStatus,
};
use bclab_core::policy::{select_action, LinearScorer, PolicyBundle, Scorer};
use proptest::prelude::*;

#[test]
fn instance_file_fixture_matches_documented_format() {
    let text = "\
mip fixture 2 2 1
c 1 -2 0.5
row 1 1 0 <= 3
row -1 0 2 <= 1.25
ub 1 1 4
seed 99
";
    let inst = parse_instance(text).unwrap();
    assert_eq!(inst.name, "fixture");
    assert_eq!(inst.m(), 2);
    assert_eq!(inst.n1, 2);
    assert_eq!(inst.n2, 1);
    assert_eq!(inst.b, vec![3.0, 1.25]);
    assert_eq!(inst.seed, Some(99));
    // Re-serialized output parses back to the same instance.
    let again = parse_instance(&serialize_instance(&inst)).unwrap();
    assert_eq!(inst, again);
}

#[test]
fn policy_file_round_trip_through_disk() {
    let dir = std::env::temp_dir().join(format!("bclab-iface-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("policy.json");
    let bundle = PolicyBundle::reference();
    std::fs::write(&path, bundle.to_json().unwrap()).unwrap();
    let loaded = PolicyBundle::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(bundle, loaded);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn policy_file_rejects_dimension_mismatch() {
    let mut bundle = PolicyBundle::reference();
    bundle.cut.scorer = Scorer::Linear(LinearScorer { w: vec![1.0, 2.0] });
    let json = serde_json::to_string(&bundle).unwrap();
    assert!(PolicyBundle::from_json(&json).is_err());
}

#[test]
fn trace_export_recomputes_cost_and_pairs() {
    let inst = generate_instance(Family::Knapsack, 6, 0, 2, (1, 9), 5).unwrap();
    let cfg = BncConfig {
        max_rounds: 60,
        ..BncConfig::default()
    };
    let penalties = PenaltySpec::default();
    let (_, v, trace) = solve_bnc(&inst, &PolicyBundle::reference(), &cfg, &penalties).unwrap();
    assert_eq!(tree_size_cost(&trace, &penalties), v);
    assert_eq!(count_state_action_pairs(&trace), trace.q_counts);
    let text = export_trace(&trace);
    assert_eq!(text.lines().count(), trace.steps.len() + 1);
    for line in text.lines() {
        let parsed: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(parsed.is_object());
    }
}

#[test]
fn bound_inputs_file_drives_the_table() {
    let text = r#"{
        "d": 1,
        "m_rounds": 4,
        "types": [
            { "rho": 8, "w_dim": 4,
              "triple": { "region_factor": { "ln": 0.0 }, "region_exponent": 0, "degree": 1 } }
        ],
        "h": 60.0,
        "n_sample": 20,
        "delta": 0.1,
        "q_sums": [37.0]
    }"#;
    let inputs: BoundInputs = serde_json::from_str(text).unwrap();
    inputs.validate().unwrap();
    let rows = bound_table(&inputs).unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r.name).collect();
    assert!(names.contains(&"pdim-upper-bound"));
    assert!(names.contains(&"linear-pdim-bound"));
    assert!(names.contains(&"r-bound"));
    assert!(names.contains(&"uniform-convergence-rademacher"));
}

#[test]
fn solver_tracks_oracle_after_file_round_trip() {
    // Serialize, reload, and solve: the text format carries everything the
    // engine needs.
    let inst = generate_instance(Family::Covering, 5, 0, 3, (1, 9), 12).unwrap();
    let reloaded = parse_instance(&serialize_instance(&inst)).unwrap();
    let cfg = BncConfig {
        max_rounds: 100,
        ..BncConfig::default()
    };
    let (result, _, _) = solve_bnc(
        &reloaded,
        &PolicyBundle::reference(),
        &cfg,
        &PenaltySpec::default(),
    )
    .unwrap();
    let oracle = enumerate_integer_optimum(&inst, None).unwrap();
    assert_eq!(oracle.status, OptStatus::Optimal);
    assert!((result.value.unwrap() - oracle.value).abs() < 1e-6);
}

fn arbitrary_instance() -> impl Strategy<Value = MipInstance> {
    (
        prop_oneof![
            Just(Family::Knapsack),
            Just(Family::Packing),
            Just(Family::Covering)
        ],
        2usize..7,
        0usize..3,
        1usize..4,
        1i64..6,
        0i64..9,
        any::<u64>(),
    )
        .prop_map(|(family, n1, n2, m, lo, extra, seed)| {
            generate_instance(family, n1, n2, m, (lo, lo + extra), seed).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// parse . serialize is the identity on generated instances.
    #[test]
    fn prop_instance_round_trip(inst in arbitrary_instance()) {
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(inst, back);
    }

    /// Positive scaling and shifting never change the selected action.
    #[test]
    fn prop_selection_scale_invariant(
        scores in prop::collection::vec(-1e3f64..1e3, 1..12),
        lambda in 1e-3f64..1e3,
    ) {
        let scaled: Vec<f64> = scores.iter().map(|s| s * lambda).collect();
        prop_assert_eq!(select_action(&scores), select_action(&scaled));
    }

    /// The selected index is always a maximizer and the first one.
    #[test]
    fn prop_selection_is_first_argmax(
        scores in prop::collection::vec(-1e3f64..1e3, 1..12),
    ) {
        let idx = select_action(&scores).unwrap();
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(scores[idx], max);
        for (i, &s) in scores.iter().enumerate().take(idx) {
            prop_assert!(s < max, "earlier index {i} also attains the max");
        }
    }
}
