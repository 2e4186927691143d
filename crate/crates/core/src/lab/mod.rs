//! The experiment harness: configs, ERM tuning, gap measurement, report
//! emission, and the verification suites.

mod config;
mod experiment;
mod verify;

pub use config::{ExperimentConfig, Scenario, ScorerKind, EXPERIMENT_SCHEMA};
pub use experiment::{
    emit_report, erm_tune, measure_gap, run_experiment, DrawSummary, ErmResult, GapMeasurement,
    Report, WGap, REPORT_SCHEMA,
};
pub use verify::{
    census_dominance_suite, degree_law_suite, determinism_suite, formula_crosscheck_suite,
    gap_dominance_suite, oracle_equivalence_suite, piecewise_constancy_suite,
    rademacher_chain_suite, run_verification, SuiteOutcome, VerificationReport, VerifyConfig,
};
