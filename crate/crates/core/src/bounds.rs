//! Closed-form bound evaluators: structure triples for policy classes, the
//! induced piecewise-constant structure of the cost class, pseudo-dimension
//! and sign-pattern bounds, distinct-output and Rademacher bounds, and the
//! uniform-convergence estimates built from them.
//!
//! All logarithms are natural. Quantities that can overflow a double (region
//! counts, output-vector bounds) are computed and carried in log space.

use crate::error::{Error, Result};
use crate::logmag::LogMag;
use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};
use std::f64::consts::E;

/// A (region factor, region exponent, degree) record: any N functions of the
/// class split parameter space into at most `N^region_exponent * region_factor`
/// regions on which each function is a polynomial of degree at most `degree`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureTriple {
    pub region_factor: LogMag,
    pub region_exponent: u64,
    pub degree: u64,
}

impl StructureTriple {
    pub fn new(region_factor: LogMag, region_exponent: u64, degree: u64) -> Self {
        Self {
            region_factor,
            region_exponent,
            degree,
        }
    }

    /// The linear-scorer class: one region, each function a single degree-1
    /// polynomial.
    pub fn linear() -> Self {
        Self::new(LogMag::ONE, 0, 1)
    }

    pub fn is_linear(&self) -> bool {
        self.region_factor.ln().abs() < 1e-12 && self.region_exponent == 0 && self.degree == 1
    }
}

/// Per-action-type inputs for the bound calculators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeInputs {
    /// Cap on available actions per state (rho_k >= 2).
    pub rho: u64,
    /// Learnable parameter count (W_k).
    pub w_dim: u64,
    pub triple: StructureTriple,
}

/// The single argument record for the bound calculators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Number of action types (d).
    pub d: usize,
    /// Round limit (M).
    pub m_rounds: u64,
    pub types: Vec<TypeInputs>,
    /// Cost range bound (H).
    pub h: f64,
    /// Sample size (N).
    pub n_sample: u64,
    /// Confidence parameter, in (0, 1).
    pub delta: f64,
    /// Observed distinct state-action pair totals per type, summed over the
    /// sample, when available.
    #[serde(default)]
    pub q_sums: Option<Vec<f64>>,
    /// Mean distinct-pair counts per instance per type, when available.
    #[serde(default)]
    pub q_means: Option<Vec<f64>>,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.types.len() != self.d {
            return Err(Error::Parameter(format!(
                "inputs declare d={} but carry {} type records",
                self.d,
                self.types.len()
            )));
        }
        for (k, t) in self.types.iter().enumerate() {
            if t.rho < 2 {
                return Err(Error::Parameter(format!(
                    "type {}: availability cap must be at least 2",
                    k + 1
                )));
            }
        }
        if self.m_rounds == 0 {
            return Err(Error::Parameter("round limit must be at least 1".into()));
        }
        if !(self.h > 0.0) {
            return Err(Error::Parameter("cost range H must be positive".into()));
        }
        if self.n_sample == 0 {
            return Err(Error::Parameter("sample size must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Parameter(
                "delta must lie strictly inside (0, 1)".into(),
            ));
        }
        if let Some(q) = &self.q_sums {
            if q.len() != self.d {
                return Err(Error::Parameter(
                    "q_sums must have one entry per type".into(),
                ));
            }
        }
        if let Some(q) = &self.q_means {
            if q.len() != self.d {
                return Err(Error::Parameter(
                    "q_means must have one entry per type".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn total_w(&self) -> u64 {
        self.types.iter().map(|t| t.w_dim).sum()
    }

    pub fn total_region_exponent(&self) -> u64 {
        self.types.iter().map(|t| t.triple.region_exponent).sum()
    }

    fn ln_rho_bar(&self) -> f64 {
        self.types.iter().map(|t| (t.rho as f64).ln()).sum()
    }

    fn ln_gamma_bar(&self) -> f64 {
        self.types.iter().map(|t| t.triple.region_factor.ln()).sum()
    }
}

/// Pseudo-dimension bound from a structure triple of the dual class:
/// `4 (gamma ln(2 gamma + 1) + W ln(4 e beta + 1) + ln(2 Gamma))`.
pub fn pdim_upper_bound(triple: &StructureTriple, w_total: u64) -> f64 {
    let gamma = triple.region_exponent as f64;
    let beta = triple.degree as f64;
    let w = w_total as f64;
    4.0 * (gamma * (2.0 * gamma + 1.0).ln()
        + w * (4.0 * E * beta + 1.0).ln()
        + (2.0f64).ln()
        + triple.region_factor.ln())
}

/// Structure triple of the cost class induced by the per-type scoring
/// structures: region exponent `gamma~ + W`, degree 0, and region factor
/// `2^d rho_bar^((gamma~+W)(M+1)) Gamma_bar (e sum rho_k^2 beta_k / W)^W`.
pub fn cost_structure(inputs: &BoundInputs) -> Result<StructureTriple> {
    inputs.validate()?;
    let w = inputs.total_w();
    if w == 0 {
        return Err(Error::Parameter(
            "cost structure needs at least one learnable parameter".into(),
        ));
    }
    for (k, t) in inputs.types.iter().enumerate() {
        if t.triple.degree == 0 {
            return Err(Error::Parameter(format!(
                "type {}: the cost-structure hypothesis needs degree at least 1",
                k + 1
            )));
        }
    }
    let gamma_tilde = inputs.total_region_exponent();
    let gamma_prime = gamma_tilde + w;
    let sum_rho2_beta: f64 = inputs
        .types
        .iter()
        .map(|t| (t.rho as f64).powi(2) * t.triple.degree as f64)
        .sum();
    let ln_gamma_prime = inputs.d as f64 * (2.0f64).ln()
        + gamma_prime as f64 * (inputs.m_rounds + 1) as f64 * inputs.ln_rho_bar()
        + inputs.ln_gamma_bar()
        + w as f64 * (E * sum_rho2_beta / w as f64).ln();
    Ok(StructureTriple::new(
        LogMag::from_ln(ln_gamma_prime),
        gamma_prime,
        0,
    ))
}

/// Pseudo-dimension bound for linear scoring policies, evaluated from the
/// explicit constant-carrying expression
/// `4 (W ln(3e) + 2W ln(prod rho_k) + (d+1) ln 2 + W (M+1) sum ln rho_k)`.
pub fn linear_pdim_bound(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    for (k, t) in inputs.types.iter().enumerate() {
        if !t.triple.is_linear() {
            return Err(Error::Parameter(format!(
                "type {}: linear bound needs the (1, 0, 1) structure",
                k + 1
            )));
        }
    }
    let w = inputs.total_w() as f64;
    let ln_rho_bar = inputs.ln_rho_bar();
    Ok(4.0
        * (w * (3.0 * E).ln()
            + 2.0 * w * ln_rho_bar
            + (inputs.d as f64 + 1.0) * (2.0f64).ln()
            + w * (inputs.m_rounds + 1) as f64 * ln_rho_bar))
}

/// MLP architecture sizes used by the structure lemma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpDims {
    /// Hidden layer count (L).
    pub layers: u64,
    /// Total parameter count (W).
    pub params: u64,
    /// Total hidden units (U).
    pub units: u64,
    /// Activation piece count (p).
    pub pieces: u64,
    /// Activation degree (alpha).
    pub degree: u64,
}

impl MlpDims {
    pub fn relu(layers: u64, params: u64, units: u64) -> Self {
        Self {
            layers,
            params,
            units,
            pieces: 2,
            degree: 1,
        }
    }

    pub fn is_relu(&self) -> bool {
        self.pieces == 2 && self.degree == 1
    }
}

/// Structure triple of an MLP scorer class:
/// `(2^L alpha^(L^2 W) (2 e p U / W)^(L W), L W, L alpha^L)`.
pub fn mlp_structure(dims: &MlpDims) -> Result<StructureTriple> {
    let MlpDims {
        layers: l,
        params: w,
        units: u,
        pieces: p,
        degree: alpha,
    } = *dims;
    if l == 0 || w == 0 || u == 0 || p == 0 {
        return Err(Error::Parameter("mlp sizes must all be positive".into()));
    }
    if alpha == 0 {
        return Err(Error::Parameter(
            "activation degree 0 collapses the region factor; use degree >= 1".into(),
        ));
    }
    let ln_gamma = l as f64 * (2.0f64).ln()
        + (l * l * w) as f64 * (alpha as f64).ln()
        + (l * w) as f64 * (2.0 * E * p as f64 * u as f64 / w as f64).ln();
    let beta = l * alpha.pow(l.min(64) as u32);
    Ok(StructureTriple::new(LogMag::from_ln(ln_gamma), l * w, beta))
}

/// Pseudo-dimension bound for MLP scoring policies: the exact three-stage
/// composition of `mlp_structure`, `cost_structure`, and
/// `pdim_upper_bound`. The per-type `rho` caps come from `rhos`.
pub fn mlp_pdim_bound(mlps: &[MlpDims], rhos: &[u64], m_rounds: u64) -> Result<f64> {
    if mlps.is_empty() || mlps.len() != rhos.len() {
        return Err(Error::Parameter(
            "need one MLP spec and one rho per action type".into(),
        ));
    }
    let types: Vec<TypeInputs> = mlps
        .iter()
        .zip(rhos)
        .map(|(dims, &rho)| {
            Ok(TypeInputs {
                rho,
                w_dim: dims.params,
                triple: mlp_structure(dims)?,
            })
        })
        .collect::<Result<_>>()?;
    let inputs = BoundInputs {
        d: mlps.len(),
        m_rounds,
        types,
        h: 1.0,
        n_sample: 1,
        delta: 0.5,
        q_sums: None,
        q_means: None,
    };
    let cost = cost_structure(&inputs)?;
    Ok(pdim_upper_bound(&cost, inputs.total_w()))
}

/// Worst-case distinct state-action pairs of type `k` (0-based) in `m`
/// rounds: `rho_k * (prod rho)^m`. The plain value saturates to infinity on
/// overflow; the log form is always finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QWorstCase {
    pub ln: f64,
    pub value: f64,
}

pub fn q_worst_case(rhos: &[u64], m_rounds: u64, k: usize) -> Result<QWorstCase> {
    if k >= rhos.len() {
        return Err(Error::Parameter(format!("type index {k} out of range")));
    }
    if rhos.iter().any(|&r| r < 2) {
        return Err(Error::Parameter(
            "the worst-case pair bound assumes every rho >= 2".into(),
        ));
    }
    if m_rounds == 0 {
        return Err(Error::Parameter(
            "the worst-case pair bound assumes at least one round".into(),
        ));
    }
    let ln_bar: f64 = rhos.iter().map(|&r| (r as f64).ln()).sum();
    let ln = (rhos[k] as f64).ln() + m_rounds as f64 * ln_bar;
    let mut value = rhos[k] as f64;
    'outer: for _ in 0..m_rounds {
        for &r in rhos {
            value *= r as f64;
            if !value.is_finite() {
                break 'outer;
            }
        }
    }
    Ok(QWorstCase { ln, value })
}

/// Log of the bound on distinct output vectors over a sample:
/// `2^d Gamma_bar (prod Q_k^gamma_k) (e sum Q_k rho_k beta_k / W)^W`,
/// with `Q_k` the observed distinct-pair sums.
pub fn r_bound(inputs: &BoundInputs) -> Result<LogMag> {
    inputs.validate()?;
    let q = inputs
        .q_sums
        .as_ref()
        .ok_or_else(|| Error::Parameter("r_bound needs observed q_sums".into()))?;
    let w = inputs.total_w();
    if w == 0 {
        return Err(Error::Parameter(
            "r_bound needs at least one learnable parameter".into(),
        ));
    }
    let need = inputs.total_region_exponent() + w;
    if inputs.n_sample < need {
        return Err(Error::Parameter(format!(
            "sample size {} is below gamma~ + W = {need}",
            inputs.n_sample
        )));
    }
    if q.iter().any(|&v| v < 1.0) {
        return Err(Error::Parameter("each q sum must be at least 1".into()));
    }
    let sum_q_rho_beta: f64 = inputs
        .types
        .iter()
        .zip(q)
        .map(|(t, &qk)| qk * t.rho as f64 * t.triple.degree as f64)
        .sum();
    let ln = inputs.d as f64 * (2.0f64).ln()
        + inputs.ln_gamma_bar()
        + inputs
            .types
            .iter()
            .zip(q)
            .map(|(t, &qk)| t.triple.region_exponent as f64 * qk.ln())
            .sum::<f64>()
        + w as f64 * (E * sum_q_rho_beta / w as f64).ln();
    Ok(LogMag::from_ln(ln))
}

/// How the sign-average maximum is estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassartMode {
    /// Enumerate all 2^N sign vectors; needs N <= 20.
    Exact,
    MonteCarlo {
        seed: u64,
        draws: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassartEstimate {
    /// The estimated expectation of `max_j (1/N) <sigma, x_j>`.
    pub estimate: f64,
    /// The finite-class bound `max_j ||x_j - mean|| sqrt(2 ln r) / N`.
    pub bound: f64,
}

/// Estimates the sign-average maximum over a finite vector set and evaluates
/// the corresponding finite-class bound.
pub fn massart_estimate(vectors: &[Vec<f64>], mode: MassartMode) -> Result<MassartEstimate> {
    let r = vectors.len();
    if r == 0 {
        return Err(Error::Parameter(
            "massart estimate needs at least one vector".into(),
        ));
    }
    let n = vectors[0].len();
    if n == 0 || vectors.iter().any(|v| v.len() != n) {
        return Err(Error::Parameter(
            "vectors must be nonempty and of equal length".into(),
        ));
    }

    let max_over_signs = |sigma: &[f64]| -> f64 {
        vectors
            .iter()
            .map(|x| sigma.iter().zip(x).map(|(s, v)| s * v).sum::<f64>() / n as f64)
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let estimate = match mode {
        MassartMode::Exact => {
            if n > 20 {
                return Err(Error::Unsupported(format!(
                    "exact sign enumeration refused for N = {n} > 20"
                )));
            }
            let mut total = 0.0;
            let count = 1usize << n;
            let mut sigma = vec![0.0; n];
            for bits in 0..count {
                for (i, s) in sigma.iter_mut().enumerate() {
                    *s = if bits >> i & 1 == 1 { 1.0 } else { -1.0 };
                }
                total += max_over_signs(&sigma);
            }
            total / count as f64
        }
        MassartMode::MonteCarlo { seed, draws } => {
            if draws == 0 {
                return Err(Error::Parameter(
                    "monte-carlo mode needs at least one draw".into(),
                ));
            }
            let mut rng = SplitMix64::new(seed);
            let mut total = 0.0;
            let mut sigma = vec![0.0; n];
            for _ in 0..draws {
                for s in sigma.iter_mut() {
                    *s = if rng.next_u64() & 1 == 1 { 1.0 } else { -1.0 };
                }
                total += max_over_signs(&sigma);
            }
            total / draws as f64
        }
    };

    let mean: Vec<f64> = (0..n)
        .map(|i| vectors.iter().map(|v| v[i]).sum::<f64>() / r as f64)
        .collect();
    let max_dist = vectors
        .iter()
        .map(|v| {
            v.iter()
                .zip(&mean)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0f64, f64::max);
    let bound = max_dist * (2.0 * (r as f64).ln()).sqrt() / n as f64;
    Ok(MassartEstimate { estimate, bound })
}

/// Empirical Rademacher complexity bound from observed distinct-pair sums:
/// `H sqrt((2/N)(d + sum ln Gamma_k + (gamma~+W) ln(sum Q) + W ln(e sum rho beta / W)))`.
pub fn rademacher_bound_empirical(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let q = inputs
        .q_sums
        .as_ref()
        .ok_or_else(|| Error::Parameter("the empirical bound needs observed q_sums".into()))?;
    let w = inputs.total_w();
    if w == 0 {
        return Err(Error::Parameter(
            "the empirical bound needs learnable parameters".into(),
        ));
    }
    let gamma_w = inputs.total_region_exponent() + w;
    if inputs.n_sample < gamma_w {
        return Err(Error::Parameter(format!(
            "sample size {} is below gamma~ + W = {gamma_w}",
            inputs.n_sample
        )));
    }
    let q_total: f64 = q.iter().sum();
    if q_total < 1.0 {
        return Err(Error::Parameter(
            "observed q sums must total at least 1".into(),
        ));
    }
    let sum_rho_beta: f64 = inputs
        .types
        .iter()
        .map(|t| t.rho as f64 * t.triple.degree as f64)
        .sum();
    let inner = inputs.d as f64
        + inputs.ln_gamma_bar()
        + gamma_w as f64 * q_total.ln()
        + w as f64 * (E * sum_rho_beta / w as f64).ln();
    Ok(inputs.h * (2.0 * inner / inputs.n_sample as f64).sqrt())
}

/// Uniform-convergence bound via the pseudo-dimension:
/// `H sqrt((pdim + ln(1/delta)) / N)`, with the suppressed constant fixed
/// to 1.
pub fn uniform_convergence_pdim(h: f64, pdim: f64, n: u64, delta: f64) -> f64 {
    h * ((pdim + (1.0 / delta).ln()) / n as f64).sqrt()
}

/// Uniform-convergence bound via Rademacher complexity:
/// `rad + H sqrt(ln(1/delta) / N)`, suppressed constant 1.
pub fn uniform_convergence_rademacher(h: f64, rad: f64, n: u64, delta: f64) -> f64 {
    rad + h * ((1.0 / delta).ln() / n as f64).sqrt()
}

/// Expected (distribution-level) Rademacher bound for ReLU policies, from
/// per-instance mean pair counts `mu`:
/// `H sqrt((2/N)(d + L~ + (Lambda+W) ln(N sum mu) + W ln(e sum rho)))`.
pub fn expected_rademacher_bound(inputs: &BoundInputs, mlps: &[MlpDims]) -> Result<f64> {
    inputs.validate()?;
    if mlps.len() != inputs.d {
        return Err(Error::Parameter("need one MLP spec per action type".into()));
    }
    if mlps.iter().any(|m| !m.is_relu()) {
        return Err(Error::Parameter(
            "the expected bound is stated for ReLU activations".into(),
        ));
    }
    let mu = inputs
        .q_means
        .as_ref()
        .ok_or_else(|| Error::Parameter("the expected bound needs q_means".into()))?;
    let mu_total: f64 = mu.iter().sum();
    if mu_total <= 0.0 {
        return Err(Error::Parameter("mean pair counts must be positive".into()));
    }
    let lambda: u64 = mlps.iter().map(|m| m.layers * m.params).sum();
    let l_tilde: u64 = mlps.iter().map(|m| m.layers).sum();
    let w = inputs.total_w();
    let sum_rho: f64 = inputs.types.iter().map(|t| t.rho as f64).sum();
    let inner = inputs.d as f64
        + l_tilde as f64
        + (lambda + w) as f64 * (inputs.n_sample as f64 * mu_total).ln()
        + w as f64 * (E * sum_rho).ln();
    Ok(inputs.h * (2.0 * inner / inputs.n_sample as f64).sqrt())
}

/// Bound on the number of sign patterns of `n` degree-`beta` polynomials in
/// `w` variables: exactly 1 for degree 0, else `2 (2 e n beta / w)^w`.
pub fn sign_pattern_bound(n: u64, beta: u64, w: u64) -> Result<LogMag> {
    if beta == 0 {
        return Ok(LogMag::ONE);
    }
    if w == 0 || n < w {
        return Err(Error::Parameter(
            "the sign-pattern bound needs n >= w >= 1 for positive degree".into(),
        ));
    }
    let ln = (2.0f64).ln() + w as f64 * (2.0 * E * n as f64 * beta as f64 / w as f64).ln();
    Ok(LogMag::from_ln(ln))
}

/// One sampled counterexample from the inequality fuzzer.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzViolation {
    pub inequality: &'static str,
    pub inputs: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzReport {
    pub draws: usize,
    pub violations: Vec<FuzzViolation>,
}

fn log_uniform(rng: &mut SplitMix64) -> f64 {
    10f64.powf(rng.uniform(-3.0, 3.0))
}

/// Numerically fuzzes the three auxiliary inequalities on log-uniform
/// samples of [1e-3, 1e3], with 1e-12 relative slack. Violations are
/// reported, not panicked on; the expected report is empty.
pub fn aux_inequality_fuzz(seed: u64, draws: usize) -> Result<FuzzReport> {
    if draws == 0 {
        return Err(Error::Parameter("fuzzing needs at least one draw".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut violations = Vec::new();
    let slack = |a: f64, b: f64| 1e-12 * a.abs().max(b.abs()).max(1.0);

    for _ in 0..draws {
        // (1) ln a <= a/b + ln(b/e)
        let a = log_uniform(&mut rng);
        let b = log_uniform(&mut rng);
        let lhs = a.ln();
        let rhs = a / b + (b / E).ln();
        if lhs > rhs + slack(lhs, rhs) {
            violations.push(FuzzViolation {
                inequality: "log-vs-ratio",
                inputs: vec![a, b],
                lhs,
                rhs,
            });
        }

        // (2) prod a_k^(b_k) <= (sum a_k b_k / sum b_k)^(sum b_k), in logs.
        let d = rng.int_in(1, 4) as usize;
        let avals: Vec<f64> = (0..d).map(|_| log_uniform(&mut rng)).collect();
        let bvals: Vec<f64> = (0..d).map(|_| log_uniform(&mut rng)).collect();
        let sum_b: f64 = bvals.iter().sum();
        let sum_ab: f64 = avals.iter().zip(&bvals).map(|(a, b)| a * b).sum();
        let lhs: f64 = avals.iter().zip(&bvals).map(|(a, b)| b * a.ln()).sum();
        let rhs = sum_b * (sum_ab / sum_b).ln();
        if lhs > rhs + slack(lhs, rhs) {
            let mut inputs = avals.clone();
            inputs.extend(bvals.iter());
            violations.push(FuzzViolation {
                inequality: "weighted-power-mean",
                inputs,
                lhs,
                rhs,
            });
        }

        // (3) (e a / b1)^(b1) < (e a / b2)^(b2) for a >= b2 > b1, in logs.
        let b1 = log_uniform(&mut rng);
        let b2 = b1 * (1.0 + rng.uniform(1e-6, 2.0));
        let a3 = b2 * (1.0 + rng.uniform(0.0, 2.0));
        let lhs = b1 * (E * a3 / b1).ln();
        let rhs = b2 * (E * a3 / b2).ln();
        if lhs > rhs + slack(lhs, rhs) {
            violations.push(FuzzViolation {
                inequality: "increasing-entropy-power",
                inputs: vec![a3, b1, b2],
                lhs,
                rhs,
            });
        }
    }
    Ok(FuzzReport { draws, violations })
}

/// A named bound value for table output; large values stay in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub name: &'static str,
    pub rendered: String,
    pub note: &'static str,
}

/// Evaluates every applicable bound for the given inputs into table rows.
pub fn bound_table(inputs: &BoundInputs) -> Result<Vec<BoundRow>> {
    inputs.validate()?;
    let mut rows = Vec::new();
    let w = inputs.total_w();

    let cost = cost_structure(inputs)?;
    rows.push(BoundRow {
        name: "cost-structure-ln-region-factor",
        rendered: format!("{:.6}", cost.region_factor.ln()),
        note: "piecewise-constant cost class",
    });
    rows.push(BoundRow {
        name: "cost-structure-region-exponent",
        rendered: format!("{}", cost.region_exponent),
        note: "",
    });
    let pdim = pdim_upper_bound(&cost, w);
    rows.push(BoundRow {
        name: "pdim-upper-bound",
        rendered: format!("{pdim:.6}"),
        note: "",
    });
    if inputs.types.iter().all(|t| t.triple.is_linear()) {
        rows.push(BoundRow {
            name: "linear-pdim-bound",
            rendered: format!("{:.6}", linear_pdim_bound(inputs)?),
            note: "",
        });
    }
    let rhos: Vec<u64> = inputs.types.iter().map(|t| t.rho).collect();
    for k in 0..inputs.d {
        let q = q_worst_case(&rhos, inputs.m_rounds, k)?;
        rows.push(BoundRow {
            name: "q-worst-case",
            rendered: format!("type {}: {}", k + 1, LogMag::from_ln(q.ln)),
            note: "",
        });
    }
    rows.push(BoundRow {
        name: "uniform-convergence-pdim",
        rendered: format!(
            "{:.6}",
            uniform_convergence_pdim(inputs.h, pdim, inputs.n_sample, inputs.delta)
        ),
        note: "up to the suppressed constant",
    });
    if inputs.q_sums.is_some() {
        let r = r_bound(inputs)?;
        rows.push(BoundRow {
            name: "r-bound",
            rendered: format!("{r}"),
            note: "distinct output vectors",
        });
        let rad = rademacher_bound_empirical(inputs)?;
        rows.push(BoundRow {
            name: "rademacher-empirical",
            rendered: format!("{rad:.6}"),
            note: "",
        });
        rows.push(BoundRow {
            name: "uniform-convergence-rademacher",
            rendered: format!(
                "{:.6}",
                uniform_convergence_rademacher(inputs.h, rad, inputs.n_sample, inputs.delta)
            ),
            note: "up to the suppressed constant",
        });
    }
    Ok(rows)
}

/// Renders the bound table as CSV with a schema header.
pub fn bound_table_csv(rows: &[BoundRow]) -> String {
    let mut out = String::from("# bclab-bounds-v1\nname,value,note\n");
    for row in rows {
        out.push_str(&format!("{},{},{}\n", row.name, row.rendered, row.note));
    }
    out
}

/// Renders the bound table for humans.
pub fn bound_table_text(rows: &[BoundRow]) -> String {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::from("bound table (bclab-bounds-v1)\n");
    for row in rows {
        out.push_str(&format!("  {:width$}  {}", row.name, row.rendered));
        if !row.note.is_empty() {
            out.push_str(&format!("  [{}]", row.note));
        }
        out.push('\n');
    }
    out
}
