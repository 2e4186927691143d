//! Verification suites: each one checks a family of invariants end to end
//! and reports a pass/fail line. The default `VerifyConfig` carries the
//! sizes the acceptance gate pins; `run_verification` scales them down for
//! interactive desk runs.

use super::config::{ExperimentConfig, Scenario, ScorerKind};
use super::experiment::measure_gap;
use crate::bounds::{
    aux_inequality_fuzz, cost_structure, massart_estimate, mlp_pdim_bound, mlp_structure,
    pdim_upper_bound, q_worst_case, r_bound, rademacher_bound_empirical, sign_pattern_bound,
    uniform_convergence_pdim, uniform_convergence_rademacher, BoundInputs, MassartMode, MlpDims,
    StructureTriple, TypeInputs,
};
use crate::cuts::check_cut_validity;
use crate::engine::{
    count_state_action_pairs, solve_bnc, BncConfig, PenaltySpec, RunTrace, Termination,
};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::instance::{
    enumerate_integer_optimum, generate_instance, Family, MipInstance, OptStatus,
};
use crate::logmag::LogMag;
use crate::policy::{MlpScorer, MlpSpec, PolicyBundle, PolicyTemplate, SlotTemplate};
use crate::probe::{
    census_output_vectors, degree_probe, sample_cost_vectors, scan_slice, shatter_from_samples,
    ParamSampler, SliceSpec,
};
use crate::rng::SplitMix64;
use crate::simplex::{solve_lp, LpProblem, LpStatus};
use serde::Serialize;

/// Sizes of the verification suites. The defaults are the acceptance sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub oracle_instances: usize,
    pub oracle_max_rounds: usize,
    pub slice_instances: usize,
    pub slices_per_instance: usize,
    pub slice_grid: usize,
    pub census_instances: usize,
    pub census_samples: usize,
    pub chain_instances: usize,
    pub chain_samples: usize,
    pub gap_train: usize,
    pub gap_test: usize,
    pub gap_samples: usize,
    pub degree_fixtures: usize,
    pub fuzz_draws: usize,
    pub crosscheck_cases: usize,
    pub shatter_max_subset: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 20240,
            oracle_instances: 200,
            oracle_max_rounds: 200,
            slice_instances: 20,
            slices_per_instance: 5,
            slice_grid: 1024,
            census_instances: 5,
            census_samples: 10_000,
            chain_instances: 8,
            chain_samples: 1500,
            gap_train: 20,
            gap_test: 20,
            gap_samples: 200,
            degree_fixtures: 50,
            fuzz_draws: 100_000,
            crosscheck_cases: 100,
            shatter_max_subset: 5,
        }
    }
}

impl VerifyConfig {
    /// Scaled-down sizes for interactive runs.
    pub fn desk(seed: u64) -> Self {
        Self {
            seed,
            oracle_instances: 40,
            oracle_max_rounds: 200,
            slice_instances: 4,
            slices_per_instance: 2,
            slice_grid: 256,
            census_instances: 4,
            census_samples: 800,
            chain_instances: 6,
            chain_samples: 400,
            gap_train: 8,
            gap_test: 8,
            gap_samples: 40,
            degree_fixtures: 12,
            fuzz_draws: 10_000,
            crosscheck_cases: 40,
            shatter_max_subset: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl SuiteOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suites: Vec<SuiteOutcome>,
    pub all_passed: bool,
}

/// Mixed-family binary instance stream used by the oracle suites.
fn oracle_instance(seed_root: u64, i: usize) -> MipInstance {
    let family = match i % 3 {
        0 => Family::Knapsack,
        1 => Family::Packing,
        _ => Family::Covering,
    };
    let n1 = 4 + i % 7; // 4..=10
    let m = 1 + i % 6; // 1..=6
    let seed =
        SplitMix64::new(seed_root ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)).next_u64();
    generate_instance(family, n1, 0, m, (1, 9), seed).expect("oracle instance sizes are valid")
}

/// Small fractional-root knapsack fixtures for the probe suites. Instances
/// whose root relaxation is already integral are skipped so every fixture
/// actually exercises cut selection.
fn fractional_knapsacks(seed_root: u64, count: usize, n1: usize, m: usize) -> Vec<MipInstance> {
    let mut out = Vec::with_capacity(count);
    let mut i = 0u64;
    while out.len() < count && i < 10_000 {
        let seed = SplitMix64::new(seed_root ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15)).next_u64();
        i += 1;
        let inst = generate_instance(Family::Knapsack, n1, 0, m, (1, 9), seed)
            .expect("fixture sizes are valid");
        let sol = solve_lp(&LpProblem::new(&inst)).expect("fixture relaxation solves");
        if sol.status != LpStatus::Optimal {
            continue;
        }
        let fractional = (0..inst.n1).any(|j| {
            let f = sol.x[j] - sol.x[j].floor();
            f.min(1.0 - f) > 1e-6
        });
        if fractional {
            out.push(inst);
        }
    }
    out
}

fn probe_bnc_config(max_rounds: usize) -> BncConfig {
    BncConfig {
        max_rounds,
        root_cut_rounds: 2,
        kappa: 2,
        cut_cap: 6,
        ..BncConfig::default()
    }
}

struct OracleRun {
    matched: bool,
    terminated: bool,
    cuts_checked: usize,
    cuts_valid: bool,
    trace: RunTrace,
    caps: Vec<u64>,
    max_rounds: usize,
}

fn oracle_runs(vc: &VerifyConfig) -> Result<Vec<OracleRun>> {
    let policies = PolicyBundle::reference();
    let cfg = BncConfig {
        max_rounds: vc.oracle_max_rounds,
        root_cut_rounds: 1,
        kappa: 2,
        cut_cap: 8,
        ..BncConfig::default()
    };
    let penalties = PenaltySpec::default();
    let runs = map_indexed(vc.oracle_instances, |i| -> Result<OracleRun> {
        let inst = oracle_instance(vc.seed, i);
        let (result, _, trace) = solve_bnc(&inst, &policies, &cfg, &penalties)?;
        let terminated = result.termination != Termination::RoundLimit;
        let matched = if terminated {
            let oracle = enumerate_integer_optimum(&inst, None)?;
            match oracle.status {
                OptStatus::Optimal => result
                    .value
                    .map(|v| (v - oracle.value).abs() < 1e-6)
                    .unwrap_or(false),
                OptStatus::Infeasible => result.value.is_none(),
            }
        } else {
            true
        };
        let mut cuts_valid = true;
        for cut in &result.generated_cuts {
            if !check_cut_validity(cut, &inst)? {
                cuts_valid = false;
            }
        }
        Ok(OracleRun {
            matched,
            terminated,
            cuts_checked: result.generated_cuts.len(),
            cuts_valid,
            trace,
            caps: vec![
                cfg.max_rounds as u64,
                (cfg.cut_cap as u64).max(2),
                inst.n() as u64,
            ],
            max_rounds: cfg.max_rounds,
        })
    });
    runs.into_iter().collect()
}

/// Criterion: terminated runs match the enumeration oracle within 1e-6.
pub fn oracle_equivalence_suite(
    vc: &VerifyConfig,
) -> Result<(SuiteOutcome, SuiteOutcome, SuiteOutcome)> {
    let runs = oracle_runs(vc)?;
    let terminated = runs.iter().filter(|r| r.terminated).count();
    let mismatches = runs.iter().filter(|r| !r.matched).count();
    let oracle = SuiteOutcome::new(
        "oracle-equivalence",
        mismatches == 0 && terminated > 0,
        format!(
            "{terminated}/{} runs terminated before the round limit, {mismatches} mismatches",
            runs.len()
        ),
    );

    let cut_total: usize = runs.iter().map(|r| r.cuts_checked).sum();
    let cut_bad = runs.iter().filter(|r| !r.cuts_valid).count();
    let cuts = SuiteOutcome::new(
        "cut-validity",
        cut_bad == 0 && cut_total > 0,
        format!("{cut_total} generated cuts checked, {cut_bad} runs with invalid cuts"),
    );

    // Distinct-pair counts: recount from steps and compare against both the
    // live counters and the closed-form worst case.
    let mut q_ok = true;
    for run in &runs {
        let recount = count_state_action_pairs(&run.trace);
        if recount != run.trace.q_counts {
            q_ok = false;
        }
        for (k, &q) in run.trace.q_counts.iter().enumerate() {
            if q == 0 {
                continue;
            }
            let cap = q_worst_case(&run.caps, run.max_rounds as u64, k)?;
            if (q as f64).ln() > cap.ln + 1e-9 {
                q_ok = false;
            }
        }
    }
    let q_suite = SuiteOutcome::new(
        "q-bound-assertion",
        q_ok,
        format!(
            "{} traces recounted against the worst-case pair bound",
            runs.len()
        ),
    );
    Ok((oracle, cuts, q_suite))
}

fn slice_template(kind: ScorerKind) -> PolicyTemplate {
    match kind {
        ScorerKind::Linear => PolicyTemplate::root_cuts(SlotTemplate::Linear { dim: 4 }),
        ScorerKind::Mlp => PolicyTemplate::root_cuts(SlotTemplate::Mlp {
            spec: MlpSpec::relu(4, vec![4]),
        }),
    }
}

/// Criterion: scans of the cost along random parameter slices find a
/// piecewise-constant function, and doubling the grid changes nothing.
pub fn piecewise_constancy_suite(vc: &VerifyConfig) -> Result<SuiteOutcome> {
    let instances = fractional_knapsacks(vc.seed ^ 0x51, vc.slice_instances, 6, 3);
    let cfg = probe_bnc_config(16);
    let penalties = PenaltySpec::default();

    let mut violations = 0usize;
    let mut unstable = 0usize;
    let mut scans = 0usize;
    let mut breakpoints = 0usize;
    for kind in [ScorerKind::Linear, ScorerKind::Mlp] {
        let template = slice_template(kind);
        let dim = template.param_count();
        let mut rng = SplitMix64::new(vc.seed ^ 0x517 ^ kind as u64);
        for inst in &instances {
            for _ in 0..vc.slices_per_instance {
                let anchor: Vec<f64> = (0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect();
                let direction: Vec<f64> = (0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect();
                let spec = SliceSpec {
                    grid0: vc.slice_grid,
                    interval: (-1.5, 1.5),
                    ..SliceSpec::new(anchor.clone(), direction.clone())
                };
                scans += 1;
                let one = std::slice::from_ref(inst);
                let scan = match scan_slice(one, &template, &cfg, &penalties, &spec) {
                    Ok(s) => s,
                    Err(Error::StructuralViolation { .. }) => {
                        violations += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let doubled_spec = SliceSpec {
                    grid0: vc.slice_grid * 2,
                    ..spec
                };
                let doubled = match scan_slice(one, &template, &cfg, &penalties, &doubled_spec) {
                    Ok(s) => s,
                    Err(Error::StructuralViolation { .. }) => {
                        violations += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                breakpoints += scan.breakpoints.len();
                if scan.piece_values != doubled.piece_values
                    || scan.breakpoints.len() != doubled.breakpoints.len()
                    || scan
                        .breakpoints
                        .iter()
                        .zip(&doubled.breakpoints)
                        .any(|(a, b)| (a - b).abs() >= spec.bisect_tol)
                {
                    unstable += 1;
                }
            }
        }
    }
    Ok(SuiteOutcome::new(
        "piecewise-constancy",
        violations == 0 && unstable == 0 && scans > 0,
        format!(
            "{scans} slices ({breakpoints} breakpoints), {violations} violations, {unstable} unstable under grid doubling"
        ),
    ))
}

fn root_cut_linear_inputs(cfg: &BncConfig, n_sample: u64, q_cut_sum: f64, h: f64) -> BoundInputs {
    BoundInputs {
        d: 1,
        m_rounds: ((cfg.kappa * cfg.root_cut_rounds) as u64).max(1),
        types: vec![TypeInputs {
            rho: (cfg.cut_cap as u64).max(2),
            w_dim: 4,
            triple: StructureTriple::linear(),
        }],
        h,
        n_sample,
        delta: 0.1,
        q_sums: Some(vec![q_cut_sum.max(1.0)]),
        q_means: None,
    }
}

/// Criterion: the observed number of distinct cost vectors stays below the
/// closed-form bound evaluated at the observed pair counts.
pub fn census_dominance_suite(vc: &VerifyConfig) -> Result<(SuiteOutcome, SuiteOutcome)> {
    let instances = fractional_knapsacks(vc.seed ^ 0xCE, vc.census_instances, 6, 3);
    let template = slice_template(ScorerKind::Linear);
    let cfg = probe_bnc_config(16);
    let penalties = PenaltySpec::default();
    let sampler = ParamSampler::new(vc.census_samples, vc.seed ^ 0xCE2);
    let census = census_output_vectors(&instances, &template, &cfg, &penalties, &sampler)?;
    let inputs = root_cut_linear_inputs(
        &cfg,
        instances.len() as u64,
        census.q_sums[1],
        3.0 * cfg.max_rounds as f64,
    );
    let ln_r = r_bound(&inputs)?.ln();
    let count = census.distinct_count();
    let census_suite = SuiteOutcome::new(
        "census-dominance",
        (count as f64).ln() <= ln_r,
        format!(
            "{count} distinct vectors over {} samples vs ln bound {ln_r:.3}",
            census.sample_count
        ),
    );

    // Shattering sandwich on the same fixture.
    let vectors = sample_cost_vectors(&instances, &template, &cfg, &penalties, &sampler)?;
    let shatter = shatter_from_samples(&vectors, None, vc.shatter_max_subset)?;
    let pdim = pdim_upper_bound(&cost_structure(&inputs)?, inputs.total_w());
    let shatter_suite = SuiteOutcome::new(
        "shattering-sandwich",
        (shatter.size() as f64) <= pdim,
        format!(
            "shattered {} of {} instances vs pdim bound {pdim:.1}",
            shatter.size(),
            instances.len()
        ),
    );
    Ok((census_suite, shatter_suite))
}

/// Criterion: exact sign-average estimate <= its finite-class bound <= the
/// empirical Rademacher bound, all on one census fixture.
pub fn rademacher_chain_suite(vc: &VerifyConfig) -> Result<SuiteOutcome> {
    let instances = fractional_knapsacks(vc.seed ^ 0xAA, vc.chain_instances, 6, 3);
    let template = slice_template(ScorerKind::Linear);
    let cfg = probe_bnc_config(16);
    let penalties = PenaltySpec::default();
    let sampler = ParamSampler::new(vc.chain_samples, vc.seed ^ 0xAA2);
    let census = census_output_vectors(&instances, &template, &cfg, &penalties, &sampler)?;
    let h = 3.0 * cfg.max_rounds as f64;
    let massart = massart_estimate(&census.distinct, MassartMode::Exact)?;
    let inputs = root_cut_linear_inputs(&cfg, instances.len() as u64, census.q_sums[1], h);
    let rad = rademacher_bound_empirical(&inputs)?;
    let chain_ok = massart.estimate <= massart.bound + 1e-9 && massart.bound <= rad + 1e-9;
    Ok(SuiteOutcome::new(
        "rademacher-chain",
        chain_ok,
        format!(
            "estimate {:.4} <= massart bound {:.4} <= empirical bound {:.4}",
            massart.estimate, massart.bound, rad
        ),
    ))
}

/// Criterion: the measured sup train/test gap is dominated by both
/// uniform-convergence bounds at delta = 0.1 and H = 3M.
pub fn gap_dominance_suite(vc: &VerifyConfig) -> Result<SuiteOutcome> {
    let cfg = ExperimentConfig {
        name: "gap-fixture".into(),
        n_train: vc.gap_train,
        n_test: vc.gap_test,
        budget: vc.gap_samples,
        seed: vc.seed ^ 0x9A,
        tuner_seed: vc.seed ^ 0x9A2,
        scenario: Scenario::RootCuts,
        scorer: ScorerKind::Linear,
        bnc: probe_bnc_config(24),
        ..ExperimentConfig::default()
    };
    let ws = cfg.sampler().sample(cfg.template().param_count());
    let gap = measure_gap(&cfg, &ws)?;
    let h = 3.0 * cfg.bnc.max_rounds as f64;
    let inputs = root_cut_linear_inputs(&cfg.bnc, cfg.n_train as u64, gap.train_q_sums[1], h);
    let pdim = pdim_upper_bound(&cost_structure(&inputs)?, inputs.total_w());
    let uc_pdim = uniform_convergence_pdim(h, pdim, cfg.n_train as u64, 0.1);
    let rad = rademacher_bound_empirical(&inputs)?;
    let uc_rad = uniform_convergence_rademacher(h, rad, cfg.n_train as u64, 0.1);
    Ok(SuiteOutcome::new(
        "gap-dominance",
        gap.sup_gap <= uc_pdim && gap.sup_gap <= uc_rad,
        format!(
            "sup gap {:.4} vs pdim-route bound {uc_pdim:.2} and rademacher-route bound {uc_rad:.2}",
            gap.sup_gap
        ),
    ))
}

/// Criterion: within activation regions, ReLU nets with L hidden layers have
/// vanishing (L+1)-th finite differences along parameter lines that keep one
/// layer fixed.
pub fn degree_law_suite(vc: &VerifyConfig) -> Result<SuiteOutcome> {
    let mut rng = SplitMix64::new(vc.seed ^ 0xDE);
    let mut probed = 0usize;
    let mut failures = 0usize;
    for fixture in 0..vc.degree_fixtures {
        let layers = 1 + fixture % 3;
        let hidden: Vec<usize> = (0..layers)
            .map(|_| 2 + (rng.next_u64() % 3) as usize)
            .collect();
        let spec = MlpSpec::relu(4, hidden.clone());
        let w_len = spec.param_count();
        let w0: Vec<f64> = (0..w_len).map(|_| rng.uniform(-1.0, 1.0)).collect();
        // Leave the output layer's block fixed: the degree law counts the
        // hidden-layer composition.
        let out_block = hidden.last().unwrap() + 1;
        let dir: Vec<f64> = (0..w_len)
            .map(|i| {
                if i < w_len - out_block {
                    rng.uniform(-1.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect();
        let input: Vec<f64> = (0..4).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let scorer = MlpScorer::new(spec, w0.clone())?;
        let samples = layers + 3;
        for region in degree_probe(&scorer, &input, &w0, &dir, samples)? {
            if region.note.is_none() {
                probed += 1;
                if !(region.max_rel_diff <= 1e-6) {
                    failures += 1;
                }
                if let Some(d) = region.certified_degree {
                    if d > layers {
                        failures += 1;
                    }
                }
            }
        }
    }
    Ok(SuiteOutcome::new(
        "mlp-degree-law",
        failures == 0 && probed > 0,
        format!(
            "{probed} regions probed across {} fixtures, {failures} failures",
            vc.degree_fixtures
        ),
    ))
}

// Plainly-written reference evaluations of each closed-form bound; direct
// products and powers, no shared helpers or log-space arithmetic.
mod reference {
    use std::f64::consts::E;

    pub fn pdim(gamma: f64, big_gamma: f64, beta: f64, w: f64) -> f64 {
        4.0 * ((gamma * (2.0 * gamma + 1.0).ln())
            + w * (4.0 * E * beta + 1.0).ln()
            + (2.0 * big_gamma).ln())
    }

    pub fn cost_region_factor(
        d: usize,
        rhos: &[f64],
        gammas: &[f64],
        big_gammas: &[f64],
        betas: &[f64],
        ws: &[f64],
        m: f64,
    ) -> f64 {
        let rho_bar: f64 = rhos.iter().product();
        let gamma_tilde: f64 = gammas.iter().sum();
        let w: f64 = ws.iter().sum();
        let big_gamma_bar: f64 = big_gammas.iter().product();
        let sum_rho2_beta: f64 = rhos.iter().zip(betas).map(|(r, b)| r * r * b).sum();
        2f64.powi(d as i32)
            * rho_bar.powf((gamma_tilde + w) * (m + 1.0))
            * big_gamma_bar
            * (E * sum_rho2_beta / w).powf(w)
    }

    pub fn linear_pdim(d: usize, rhos: &[f64], w: f64, m: f64) -> f64 {
        let prod_rho: f64 = rhos.iter().product();
        let sum_ln_rho: f64 = rhos.iter().map(|r| r.ln()).sum();
        4.0 * (w * (3.0 * E).ln()
            + 2.0 * w * prod_rho.ln()
            + (d as f64 + 1.0) * 2f64.ln()
            + w * (m + 1.0) * sum_ln_rho)
    }

    pub fn mlp_region_factor(l: f64, w: f64, u: f64, p: f64, alpha: f64) -> f64 {
        2f64.powf(l) * alpha.powf(l * l * w) * (2.0 * E * p * u / w).powf(l * w)
    }

    pub fn r_bound(
        d: usize,
        big_gammas: &[f64],
        gammas: &[f64],
        qs: &[f64],
        rhos: &[f64],
        betas: &[f64],
        ws: &[f64],
    ) -> f64 {
        let w: f64 = ws.iter().sum();
        let big_gamma_bar: f64 = big_gammas.iter().product();
        let q_pow: f64 = qs.iter().zip(gammas).map(|(q, g)| q.powf(*g)).product();
        let sum: f64 = qs
            .iter()
            .zip(rhos)
            .zip(betas)
            .map(|((q, r), b)| q * r * b)
            .sum();
        2f64.powi(d as i32) * big_gamma_bar * q_pow * (E * sum / w).powf(w)
    }

    pub fn sign_pattern(n: f64, beta: f64, w: f64) -> f64 {
        if beta == 0.0 {
            1.0
        } else {
            2.0 * (2.0 * E * n * beta / w).powf(w)
        }
    }

    pub fn rademacher(
        h: f64,
        n: f64,
        d: usize,
        big_gammas: &[f64],
        gammas: &[f64],
        ws: &[f64],
        q_total: f64,
        rhos: &[f64],
        betas: &[f64],
    ) -> f64 {
        let w: f64 = ws.iter().sum();
        let gamma_tilde: f64 = gammas.iter().sum();
        let sum_rho_beta: f64 = rhos.iter().zip(betas).map(|(r, b)| r * b).sum();
        let ln_gamma_bar: f64 = big_gammas.iter().map(|g| g.ln()).sum();
        h * (2.0 / n
            * (d as f64
                + ln_gamma_bar
                + (gamma_tilde + w) * q_total.ln()
                + w * (E * sum_rho_beta / w).ln()))
        .sqrt()
    }

    pub fn uc_pdim(h: f64, pdim: f64, n: f64, delta: f64) -> f64 {
        h * ((pdim + (1.0 / delta).ln()) / n).sqrt()
    }

    pub fn uc_rad(h: f64, rad: f64, n: f64, delta: f64) -> f64 {
        rad + h * ((1.0 / delta).ln() / n).sqrt()
    }
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Criterion: every formula evaluator matches an independent plain-arithmetic
/// recomputation on randomized small inputs, the auxiliary inequalities fuzz
/// clean, and the MLP bound is exactly its three-stage composition.
pub fn formula_crosscheck_suite(vc: &VerifyConfig) -> Result<SuiteOutcome> {
    let mut rng = SplitMix64::new(vc.seed ^ 0xF0);
    let cases = vc.crosscheck_cases;
    let mut failures: Vec<String> = Vec::new();

    for case in 0..cases {
        // pdim_upper_bound
        let gamma = rng.int_in(0, 5) as u64;
        let beta = rng.int_in(0, 4) as u64;
        let w = rng.int_in(0, 6) as u64;
        let big_gamma = rng.uniform(1.0, 40.0);
        let t = StructureTriple::new(LogMag::from_value(big_gamma), gamma, beta);
        let ours = pdim_upper_bound(&t, w);
        let theirs = reference::pdim(gamma as f64, big_gamma, beta as f64, w as f64);
        if !rel_close(ours, theirs) {
            failures.push(format!("pdim case {case}: {ours} vs {theirs}"));
        }

        // cost_structure (small sizes keep the direct product finite)
        let d = rng.int_in(1, 2) as usize;
        let m = rng.int_in(1, 2) as u64;
        let mut types = Vec::new();
        let (mut rhos, mut gammas, mut big_gammas, mut betas, mut ws) =
            (vec![], vec![], vec![], vec![], vec![]);
        for _ in 0..d {
            let rho = rng.int_in(2, 4) as u64;
            let g = rng.int_in(0, 2) as u64;
            let b = rng.int_in(1, 2) as u64;
            let wk = rng.int_in(1, 3) as u64;
            let bg = rng.uniform(1.0, 10.0);
            types.push(TypeInputs {
                rho,
                w_dim: wk,
                triple: StructureTriple::new(LogMag::from_value(bg), g, b),
            });
            rhos.push(rho as f64);
            gammas.push(g as f64);
            big_gammas.push(bg);
            betas.push(b as f64);
            ws.push(wk as f64);
        }
        let inputs = BoundInputs {
            d,
            m_rounds: m,
            types,
            h: 1.0,
            n_sample: 50,
            delta: 0.5,
            q_sums: None,
            q_means: None,
        };
        let cost = cost_structure(&inputs)?;
        let direct =
            reference::cost_region_factor(d, &rhos, &gammas, &big_gammas, &betas, &ws, m as f64);
        if !rel_close(cost.region_factor.ln(), direct.ln()) {
            failures.push(format!("cost-structure case {case}"));
        }

        // linear_pdim_bound
        let d = rng.int_in(1, 3) as usize;
        let m = rng.int_in(1, 6) as u64;
        let types: Vec<TypeInputs> = (0..d)
            .map(|_| TypeInputs {
                rho: rng.int_in(2, 9) as u64,
                w_dim: rng.int_in(1, 5) as u64,
                triple: StructureTriple::linear(),
            })
            .collect();
        let rhos: Vec<f64> = types.iter().map(|t| t.rho as f64).collect();
        let w_total: f64 = types.iter().map(|t| t.w_dim as f64).sum();
        let inputs = BoundInputs {
            d,
            m_rounds: m,
            types,
            h: 1.0,
            n_sample: 50,
            delta: 0.5,
            q_sums: None,
            q_means: None,
        };
        let ours = crate::bounds::linear_pdim_bound(&inputs)?;
        let theirs = reference::linear_pdim(d, &rhos, w_total, m as f64);
        if !rel_close(ours, theirs) {
            failures.push(format!("linear-pdim case {case}: {ours} vs {theirs}"));
        }

        // mlp_structure
        let l = rng.int_in(1, 3) as u64;
        let wm = rng.int_in(4, 30) as u64;
        let u = rng.int_in(1, 8) as u64;
        let p = rng.int_in(1, 3) as u64;
        let alpha = rng.int_in(1, 2) as u64;
        let t = mlp_structure(&MlpDims {
            layers: l,
            params: wm,
            units: u,
            pieces: p,
            degree: alpha,
        })?;
        let direct =
            reference::mlp_region_factor(l as f64, wm as f64, u as f64, p as f64, alpha as f64);
        if !rel_close(t.region_factor.ln(), direct.ln()) {
            failures.push(format!("mlp-structure case {case}"));
        }
        if t.region_exponent != l * wm || t.degree != l * alpha.pow(l as u32) {
            failures.push(format!("mlp-structure sizes case {case}"));
        }

        // r_bound (single type keeps the reference simple)
        let rho = rng.int_in(2, 6) as u64;
        let g = rng.int_in(0, 2) as u64;
        let b = rng.int_in(1, 2) as u64;
        let wk = rng.int_in(1, 4) as u64;
        let bg = rng.uniform(1.0, 10.0);
        let q = rng.uniform(1.0, 60.0);
        let inputs = BoundInputs {
            d: 1,
            m_rounds: 2,
            types: vec![TypeInputs {
                rho,
                w_dim: wk,
                triple: StructureTriple::new(LogMag::from_value(bg), g, b),
            }],
            h: 1.0,
            n_sample: 50,
            delta: 0.5,
            q_sums: Some(vec![q]),
            q_means: None,
        };
        let ours = r_bound(&inputs)?;
        let theirs = reference::r_bound(
            1,
            &[bg],
            &[g as f64],
            &[q],
            &[rho as f64],
            &[b as f64],
            &[wk as f64],
        );
        if !rel_close(ours.ln(), theirs.ln()) {
            failures.push(format!("r-bound case {case}"));
        }

        // rademacher_bound_empirical on the same inputs
        let mut rad_inputs = inputs.clone();
        rad_inputs.h = rng.uniform(1.0, 50.0);
        rad_inputs.n_sample = 50 + rng.int_in(0, 50) as u64;
        let ours = rademacher_bound_empirical(&rad_inputs)?;
        let theirs = reference::rademacher(
            rad_inputs.h,
            rad_inputs.n_sample as f64,
            1,
            &[bg],
            &[g as f64],
            &[wk as f64],
            q,
            &[rho as f64],
            &[b as f64],
        );
        if !rel_close(ours, theirs) {
            failures.push(format!("rademacher case {case}: {ours} vs {theirs}"));
        }

        // sign_pattern_bound
        let w = rng.int_in(1, 5) as u64;
        let n = w + rng.int_in(0, 20) as u64;
        let beta = rng.int_in(0, 3) as u64;
        let ours = sign_pattern_bound(n, beta, w)?;
        let theirs = reference::sign_pattern(n as f64, beta as f64, w as f64);
        if !rel_close(ours.ln(), theirs.ln()) {
            failures.push(format!("sign-pattern case {case}"));
        }

        // uniform-convergence evaluators
        let h = rng.uniform(1.0, 100.0);
        let pd = rng.uniform(1.0, 500.0);
        let n = rng.int_in(1, 1000) as u64;
        let delta = rng.uniform(0.01, 0.5);
        if !rel_close(
            uniform_convergence_pdim(h, pd, n, delta),
            reference::uc_pdim(h, pd, n as f64, delta),
        ) {
            failures.push(format!("uc-pdim case {case}"));
        }
        let rad = rng.uniform(0.0, 20.0);
        if !rel_close(
            uniform_convergence_rademacher(h, rad, n, delta),
            reference::uc_rad(h, rad, n as f64, delta),
        ) {
            failures.push(format!("uc-rad case {case}"));
        }
    }

    // Composition identity, exact.
    for seed in 0..10u64 {
        let mut r = SplitMix64::new(vc.seed ^ 0xF1 ^ seed);
        let d = r.int_in(1, 3) as usize;
        let dims: Vec<MlpDims> = (0..d)
            .map(|_| {
                MlpDims::relu(
                    r.int_in(1, 3) as u64,
                    r.int_in(5, 60) as u64,
                    r.int_in(2, 16) as u64,
                )
            })
            .collect();
        let rhos: Vec<u64> = (0..d).map(|_| r.int_in(2, 30) as u64).collect();
        let m = r.int_in(1, 40) as u64;
        let direct = mlp_pdim_bound(&dims, &rhos, m)?;
        let types: Vec<TypeInputs> = dims
            .iter()
            .zip(&rhos)
            .map(|(dd, &rho)| {
                Ok(TypeInputs {
                    rho,
                    w_dim: dd.params,
                    triple: mlp_structure(dd)?,
                })
            })
            .collect::<Result<_>>()?;
        let inputs = BoundInputs {
            d,
            m_rounds: m,
            types,
            h: 1.0,
            n_sample: 1,
            delta: 0.5,
            q_sums: None,
            q_means: None,
        };
        let staged = pdim_upper_bound(&cost_structure(&inputs)?, inputs.total_w());
        if direct != staged {
            failures.push(format!("composition seed {seed}: {direct} vs {staged}"));
        }
    }

    // Auxiliary inequalities.
    let fuzz = aux_inequality_fuzz(vc.seed ^ 0xF2, vc.fuzz_draws)?;
    if !fuzz.violations.is_empty() {
        failures.push(format!("{} inequality violations", fuzz.violations.len()));
    }

    Ok(SuiteOutcome::new(
        "formula-crosschecks",
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "{cases} randomized cases per formula, {} fuzz draws, composition exact",
                vc.fuzz_draws
            )
        } else {
            failures.join("; ")
        },
    ))
}

/// Criterion: re-running the experiment pipeline produces byte-identical
/// reports.
pub fn determinism_suite(vc: &VerifyConfig) -> Result<SuiteOutcome> {
    let cfg = ExperimentConfig {
        name: "determinism-fixture".into(),
        n_train: 4,
        n_test: 4,
        budget: 8,
        census_samples: 64,
        slices_per_instance: 1,
        seed: vc.seed ^ 0xD7,
        tuner_seed: vc.seed ^ 0xD72,
        bnc: probe_bnc_config(16),
        ..ExperimentConfig::default()
    };
    let r1 = super::experiment::run_experiment(&cfg)?;
    let r2 = super::experiment::run_experiment(&cfg)?;
    let j1 = serde_json::to_string(&r1)?;
    let j2 = serde_json::to_string(&r2)?;
    let same = j1 == j2 && r1.census_csv == r2.census_csv && r1.scan_csvs == r2.scan_csvs;
    Ok(SuiteOutcome::new(
        "determinism",
        same,
        format!(
            "two pipeline runs compared over {} bytes of report",
            j1.len()
        ),
    ))
}

/// Runs every verification suite at desk scale for the given experiment
/// config. Refuses configs without instances.
pub fn run_verification(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let vc = VerifyConfig::desk(cfg.seed);
    let mut suites = Vec::new();
    let (oracle, cuts, qsuite) = oracle_equivalence_suite(&vc)?;
    suites.push(oracle);
    suites.push(cuts);
    suites.push(qsuite);
    suites.push(piecewise_constancy_suite(&vc)?);
    let (census, shatter) = census_dominance_suite(&vc)?;
    suites.push(census);
    suites.push(shatter);
    suites.push(rademacher_chain_suite(&vc)?);
    suites.push(gap_dominance_suite(&vc)?);
    suites.push(degree_law_suite(&vc)?);
    suites.push(formula_crosscheck_suite(&vc)?);
    suites.push(determinism_suite(&vc)?);
    let all_passed = suites.iter().all(|s| s.passed);
    Ok(VerificationReport { suites, all_passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_verification_passes() {
        let cfg = ExperimentConfig::default();
        let report = run_verification(&cfg).unwrap();
        for suite in &report.suites {
            assert!(suite.passed, "{}: {}", suite.name, suite.detail);
        }
        assert!(report.all_passed);
    }

    #[test]
    fn verification_refuses_empty_instance_set() {
        let mut cfg = ExperimentConfig::default();
        cfg.n_train = 0;
        assert!(run_verification(&cfg).is_err());
    }

    #[test]
    fn planted_cut_fault_is_detected() {
        // Decrementing a valid cut's rhs by 1 must cut off feasible points.
        let inst = generate_instance(Family::Knapsack, 5, 0, 2, (1, 9), 3).unwrap();
        let sol = solve_lp(&LpProblem::new(&inst)).unwrap();
        let cuts = crate::cuts::generate_candidate_cuts(
            &sol,
            &inst,
            4,
            crate::cuts::CutContext::default(),
        );
        let mut corrupted = 0;
        for mut cut in cuts {
            assert!(check_cut_validity(&cut, &inst).unwrap());
            cut.beta -= 1.0;
            if !check_cut_validity(&cut, &inst).unwrap() {
                corrupted += 1;
            }
        }
        assert!(corrupted > 0, "no corrupted cut was flagged");
    }
}
