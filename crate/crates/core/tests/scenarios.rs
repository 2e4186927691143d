//! End-to-end runs of the two standard scenarios with both scorer kinds:
//! the search still matches the enumeration oracle whatever drives the
//! decisions, and the tuner improves over the worst draw when there is
//! anything to improve.

use bclab_core::engine::{solve_bnc, BncConfig, PenaltySpec};
use bclab_core::instance::{enumerate_integer_optimum, generate_instance, Family, OptStatus};
use bclab_core::lab::{erm_tune, ExperimentConfig, Scenario, ScorerKind};
use bclab_core::probe::ParamSampler;

fn scenario_cfg(scenario: Scenario, scorer: ScorerKind) -> ExperimentConfig {
    ExperimentConfig {
        name: format!("{scenario:?}-{scorer:?}"),
        n_train: 5,
        n_test: 5,
        n1: 6,
        m: 3,
        budget: 12,
        seed: 77,
        tuner_seed: 78,
        scenario,
        scorer,
        mlp_hidden: vec![3],
        bnc: BncConfig {
            max_rounds: 80,
            ..BncConfig::default()
        },
        ..ExperimentConfig::default()
    }
}

#[test]
fn every_scenario_matches_the_oracle() {
    for scenario in [Scenario::RootCuts, Scenario::ThreePolicy] {
        for scorer in [ScorerKind::Linear, ScorerKind::Mlp] {
            let cfg = scenario_cfg(scenario, scorer);
            let template = cfg.template();
            let ws = ParamSampler::new(4, 3).sample(template.param_count());
            for (i, w) in ws.iter().enumerate() {
                let bundle = template.assemble(w).unwrap();
                let inst =
                    generate_instance(Family::Knapsack, 6, 0, 2, (1, 9), 100 + i as u64).unwrap();
                let (result, _, _) =
                    solve_bnc(&inst, &bundle, &cfg.bnc, &PenaltySpec::default()).unwrap();
                let oracle = enumerate_integer_optimum(&inst, None).unwrap();
                assert_eq!(oracle.status, OptStatus::Optimal);
                assert!(
                    (result.value.unwrap() - oracle.value).abs() < 1e-6,
                    "{:?}/{:?} draw {i}: {:?} vs {}",
                    scenario,
                    scorer,
                    result.value,
                    oracle.value
                );
            }
        }
    }
}

/// Measured, not asserted: the gap trend as the sample grows under a fixed
/// seed stream. Printed for inspection with --nocapture.
#[test]
fn gap_trend_across_sample_sizes_is_reported() {
    let mut medians = Vec::new();
    for n in [10usize, 20, 40] {
        let cfg = ExperimentConfig {
            name: format!("gap-trend-n{n}"),
            n_train: n,
            n_test: n,
            budget: 24,
            seed: 5,
            tuner_seed: 6,
            bnc: BncConfig {
                max_rounds: 24,
                ..BncConfig::default()
            },
            ..ExperimentConfig::default()
        };
        let ws = cfg.sampler().sample(cfg.template().param_count());
        let gap = bclab_core::lab::measure_gap(&cfg, &ws).unwrap();
        let mut gaps: Vec<f64> = gap.per_w.iter().map(|g| g.gap).collect();
        gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = gaps[gaps.len() / 2];
        println!(
            "gap trend: n = {n:2} -> median gap {median:.4}, sup gap {:.4}",
            gap.sup_gap
        );
        medians.push(median);
    }
    assert_eq!(medians.len(), 3);
}

#[test]
fn erm_runs_on_all_scenarios() {
    for scenario in [Scenario::RootCuts, Scenario::ThreePolicy] {
        for scorer in [ScorerKind::Linear, ScorerKind::Mlp] {
            let cfg = scenario_cfg(scenario, scorer);
            let result = erm_tune(&cfg).unwrap();
            assert_eq!(result.draws.len(), cfg.budget);
            let worst = result
                .summaries
                .iter()
                .map(|s| s.train_mean)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(result.best_train_cost <= worst);
        }
    }
}
