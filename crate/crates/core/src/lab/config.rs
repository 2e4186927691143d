//! Experiment configuration: instance streams, policy templates, tuner and
//! analysis settings. A config plus its seeds fully determines every output
//! byte of an experiment.

use crate::bounds::{mlp_structure, BoundInputs, MlpDims, StructureTriple, TypeInputs};
use crate::engine::BncConfig;
use crate::error::{Error, Result};
use crate::instance::{generate_instance, Family, MipInstance};
use crate::policy::{MlpSpec, PolicyTemplate, SlotTemplate};
use crate::probe::ParamSampler;
use crate::rng::{Fnv64, SplitMix64};
use serde::{Deserialize, Serialize};

pub const EXPERIMENT_SCHEMA: &str = "bclab-experiment-v1";

/// Which slots are learned, mirroring the two standard setups: cuts only
/// (depth-first nodes, product branching) or all three action types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    RootCuts,
    ThreePolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScorerKind {
    Linear,
    Mlp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema: String,
    pub name: String,
    /// Instance generator settings.
    pub family: String,
    pub n1: usize,
    pub n2: usize,
    pub m: usize,
    pub coeff_lo: i64,
    pub coeff_hi: i64,
    pub n_train: usize,
    pub n_test: usize,
    pub seed: u64,
    /// Search settings.
    pub bnc: BncConfig,
    /// Policy settings.
    pub scenario: Scenario,
    pub scorer: ScorerKind,
    pub mlp_hidden: Vec<usize>,
    /// Random-search tuner settings; parameters are drawn from
    /// [param_lo, param_hi]^W.
    pub budget: usize,
    pub tuner_seed: u64,
    pub param_lo: f64,
    pub param_hi: f64,
    /// Analysis toggles.
    pub slices_per_instance: usize,
    pub census_samples: usize,
    /// Confidence level for the uniform-convergence bounds.
    pub delta: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema: EXPERIMENT_SCHEMA.to_string(),
            name: "default".to_string(),
            family: "knapsack".to_string(),
            n1: 5,
            n2: 0,
            m: 2,
            coeff_lo: 1,
            coeff_hi: 9,
            n_train: 10,
            n_test: 10,
            seed: 1,
            bnc: BncConfig {
                max_rounds: 40,
                ..BncConfig::default()
            },
            scenario: Scenario::RootCuts,
            scorer: ScorerKind::Linear,
            mlp_hidden: vec![4],
            budget: 32,
            tuner_seed: 7,
            param_lo: -1.0,
            param_hi: 1.0,
            slices_per_instance: 2,
            census_samples: 512,
            delta: 0.1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema != EXPERIMENT_SCHEMA {
            return Err(Error::Validation(format!(
                "unknown config schema '{}'",
                self.schema
            )));
        }
        Family::parse(&self.family)?;
        if self.n_train == 0 {
            return Err(Error::Parameter("empty training instance set".into()));
        }
        if self.budget == 0 {
            return Err(Error::Parameter("tuner budget must be at least 1".into()));
        }
        if !(self.param_lo < self.param_hi) {
            return Err(Error::Parameter("empty parameter box".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Parameter(
                "delta must lie strictly inside (0, 1)".into(),
            ));
        }
        self.bnc.validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Stable hash of the serialized config; recorded in every report.
    pub fn config_hash(&self) -> Result<u64> {
        let text = serde_json::to_string(self)?;
        Ok(Fnv64::new().write_bytes(text.as_bytes()).finish())
    }

    fn instance_stream(&self, stream_tag: u64, count: usize) -> Result<Vec<MipInstance>> {
        let family = Family::parse(&self.family)?;
        let mut root = SplitMix64::new(self.seed);
        let stream_root = match stream_tag {
            0 => root.next_u64(),
            _ => {
                root.next_u64();
                root.next_u64()
            }
        };
        (0..count)
            .map(|i| {
                let seed =
                    SplitMix64::new(stream_root ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
                        .next_u64();
                generate_instance(
                    family,
                    self.n1,
                    self.n2,
                    self.m,
                    (self.coeff_lo, self.coeff_hi),
                    seed,
                )
            })
            .collect()
    }

    /// Training instances. The stream is prefix-stable: growing `n_train`
    /// keeps the earlier instances unchanged.
    pub fn train_instances(&self) -> Result<Vec<MipInstance>> {
        self.instance_stream(0, self.n_train)
    }

    pub fn test_instances(&self) -> Result<Vec<MipInstance>> {
        self.instance_stream(1, self.n_test)
    }

    fn learnable_slot(&self) -> SlotTemplate {
        match self.scorer {
            ScorerKind::Linear => SlotTemplate::Linear { dim: 4 },
            ScorerKind::Mlp => SlotTemplate::Mlp {
                spec: MlpSpec::relu(4, self.mlp_hidden.clone()),
            },
        }
    }

    pub fn template(&self) -> PolicyTemplate {
        match self.scenario {
            Scenario::RootCuts => PolicyTemplate::root_cuts(self.learnable_slot()),
            Scenario::ThreePolicy => PolicyTemplate::three_policy(
                self.learnable_slot(),
                self.learnable_slot(),
                self.learnable_slot(),
            ),
        }
    }

    pub fn sampler(&self) -> ParamSampler {
        ParamSampler {
            count: self.budget,
            seed: self.tuner_seed,
            lo: self.param_lo,
            hi: self.param_hi,
        }
    }

    fn scorer_structure(&self) -> (StructureTriple, u64) {
        match self.scorer {
            ScorerKind::Linear => (StructureTriple::linear(), 4),
            ScorerKind::Mlp => {
                let spec = MlpSpec::relu(4, self.mlp_hidden.clone());
                let dims = MlpDims::relu(
                    spec.layers() as u64,
                    spec.param_count() as u64,
                    spec.hidden_units() as u64,
                );
                (
                    mlp_structure(&dims).expect("relu structure is well-formed"),
                    spec.param_count() as u64,
                )
            }
        }
    }

    /// Bound-calculator inputs for this experiment. For the root-cut
    /// scenario the decision process has one learned action type whose
    /// effective round count is the number of cut picks, `kappa * R`; the
    /// three-policy scenario uses all action types with the standard
    /// availability caps (open nodes <= M, pool <= r, variables <= n).
    ///
    /// `q_sums` are the engine's per-type observations; the relevant entries
    /// are selected here.
    pub fn bound_inputs(&self, n_sample: u64, q_sums: Option<&[f64]>) -> Result<BoundInputs> {
        let (triple, w_dim) = self.scorer_structure();
        let h = 3.0 * self.bnc.max_rounds as f64;
        let inputs = match self.scenario {
            Scenario::RootCuts => BoundInputs {
                d: 1,
                m_rounds: ((self.bnc.kappa * self.bnc.root_cut_rounds) as u64).max(1),
                types: vec![TypeInputs {
                    rho: (self.bnc.cut_cap as u64).max(2),
                    w_dim,
                    triple,
                }],
                h,
                n_sample,
                delta: self.delta,
                q_sums: q_sums.map(|q| vec![q[1].max(1.0)]),
                q_means: None,
            },
            Scenario::ThreePolicy => BoundInputs {
                d: 3,
                m_rounds: self.bnc.max_rounds as u64,
                types: vec![
                    TypeInputs {
                        rho: (self.bnc.max_rounds as u64).max(2),
                        w_dim,
                        triple,
                    },
                    TypeInputs {
                        rho: ((self.m + self.bnc.max_rounds) as u64).max(2),
                        w_dim,
                        triple,
                    },
                    TypeInputs {
                        rho: ((self.n1 + self.n2) as u64).max(2),
                        w_dim,
                        triple,
                    },
                ],
                h,
                n_sample,
                delta: self.delta,
                q_sums: q_sums.map(|q| q.iter().map(|&v| v.max(1.0)).collect()),
                q_means: None,
            },
        };
        inputs.validate()?;
        Ok(inputs)
    }
}
