//! Scoring policies: feature extractors, linear and MLP scorers, and argmax
//! action selection with lexicographic tie-breaking.
//!
//! A policy slot pairs a versioned feature extractor with a scorer. Scorers
//! are pure maps from a feature vector to a real score; the fixed rules
//! (depth-first node order, product-rule branching) are expressed the same
//! way so the engine treats every decision uniformly.

use crate::cuts::Cut;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Coefficients with magnitude at most this count as zero in cut support.
const SUPPORT_TOL: f64 = 1e-12;
/// Degenerate-direction threshold for the directed cutoff distance.
const DCD_TOL: f64 = 1e-9;

/// Feature vector fed to a scorer.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean distance by which the LP point violates the cut:
/// `(alpha'x - beta) / ||alpha||`.
pub fn efficacy(x_lp: &[f64], cut: &Cut) -> Result<f64> {
    let na = norm2(&cut.alpha);
    if na <= SUPPORT_TOL {
        return Err(Error::Parameter("efficacy of an all-zero cut".into()));
    }
    Ok((dot(&cut.alpha, x_lp) - cut.beta) / na)
}

/// Cosine similarity magnitude between the cut normal and the objective,
/// in [0, 1].
pub fn objective_parallelism(c: &[f64], cut: &Cut) -> Result<f64> {
    let na = norm2(&cut.alpha);
    let nc = norm2(c);
    if na <= SUPPORT_TOL || nc <= SUPPORT_TOL {
        return Err(Error::Parameter(
            "objective parallelism needs nonzero vectors".into(),
        ));
    }
    Ok((dot(&cut.alpha, c).abs() / (na * nc)).min(1.0))
}

/// Violation measured along the direction from the LP point to the
/// incumbent. Degenerate cases (no incumbent, coincident points, direction
/// orthogonal to the cut) report 0 with the flag set so policies stay total.
pub fn directed_cutoff_distance(x_lp: &[f64], incumbent: Option<&[f64]>, cut: &Cut) -> (f64, bool) {
    let Some(inc) = incumbent else {
        return (0.0, true);
    };
    let dir: Vec<f64> = inc.iter().zip(x_lp).map(|(a, b)| a - b).collect();
    let nd = norm2(&dir);
    if nd <= DCD_TOL {
        return (0.0, true);
    }
    let along = dot(&cut.alpha, &dir).abs();
    if along <= DCD_TOL {
        return (0.0, true);
    }
    ((dot(&cut.alpha, x_lp) - cut.beta) / (along / nd), false)
}

/// Fraction of integer-constrained variables among the cut's support.
pub fn integral_support(cut: &Cut, n1: usize) -> Result<f64> {
    let nz = cut.alpha.iter().filter(|a| a.abs() > SUPPORT_TOL).count();
    if nz == 0 {
        return Err(Error::Parameter(
            "integral support of an all-zero cut".into(),
        ));
    }
    let nz_int = cut
        .alpha
        .iter()
        .take(n1)
        .filter(|a| a.abs() > SUPPORT_TOL)
        .count();
    Ok(nz_int as f64 / nz as f64)
}

/// The four cut features in their fixed order.
pub fn cut_features(
    x_lp: &[f64],
    incumbent: Option<&[f64]>,
    c: &[f64],
    cut: &Cut,
    n1: usize,
) -> Result<FeatureVector> {
    let eff = efficacy(x_lp, cut)?;
    let par = objective_parallelism(c, cut)?;
    let (dcd, _) = directed_cutoff_distance(x_lp, incumbent, cut);
    let sup = integral_support(cut, n1)?;
    Ok(FeatureVector(vec![eff, par, dcd, sup]))
}

/// Node features, version 1: (lp value normalized by the root lp value,
/// depth / max rounds, relative gap to the upper bound, creation-order
/// fraction). Missing quantities contribute 0; denominators carry +1 guards.
pub fn node_features(
    z_lp: Option<f64>,
    root_lp: Option<f64>,
    depth: usize,
    max_rounds: usize,
    upper_bound: f64,
    node_id: usize,
    created: usize,
) -> FeatureVector {
    let z_norm = match (z_lp, root_lp) {
        (Some(z), Some(r)) => z / (1.0 + r.abs()),
        _ => 0.0,
    };
    let depth_frac = depth as f64 / max_rounds.max(1) as f64;
    let rel_gap = match z_lp {
        Some(z) if upper_bound.is_finite() => (upper_bound - z) / (1.0 + upper_bound.abs()),
        _ => 0.0,
    };
    let creation_frac = node_id as f64 / (1.0 + created as f64);
    FeatureVector(vec![z_norm, depth_frac, rel_gap, creation_frac])
}

/// Branching features, version 1, for candidate variable `j` with LP value
/// `xj`: (fractionality, normalized objective weight, column density in the
/// base matrix, raw fractional part).
pub fn branch_features(xj: f64, j: usize, c: &[f64], a: &[Vec<f64>]) -> FeatureVector {
    let f = xj - xj.floor();
    let max_c = c.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let density = if a.is_empty() {
        0.0
    } else {
        a.iter().filter(|row| row[j].abs() > SUPPORT_TOL).count() as f64 / a.len() as f64
    };
    FeatureVector(vec![f.min(1.0 - f), c[j].abs() / (1.0 + max_c), density, f])
}

/// A piecewise-polynomial activation: `breakpoints` splits the line into
/// `breakpoints.len() + 1` pieces (piece i covers values up to and including
/// breakpoint i), and `pieces[i]` holds that piece's polynomial coefficients
/// in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Activation {
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Vec<f64>>,
}

impl Activation {
    /// max(0, z): pieces {(-inf, 0]: 0, (0, inf): z}.
    pub fn relu() -> Self {
        Self {
            breakpoints: vec![0.0],
            pieces: vec![vec![0.0], vec![0.0, 1.0]],
        }
    }

    /// The identity on the whole line (one piece, degree 1).
    pub fn identity() -> Self {
        Self {
            breakpoints: Vec::new(),
            pieces: vec![vec![0.0, 1.0]],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pieces.len() != self.breakpoints.len() + 1 {
            return Err(Error::Validation(
                "activation needs exactly one more piece than breakpoints".into(),
            ));
        }
        if self.pieces.iter().any(|p| p.is_empty()) {
            return Err(Error::Validation("empty activation piece".into()));
        }
        if self.breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation(
                "activation breakpoints must increase".into(),
            ));
        }
        Ok(())
    }

    /// Number of pieces (p).
    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// Maximum polynomial degree across pieces (alpha).
    pub fn degree(&self) -> usize {
        self.pieces.iter().map(|p| p.len() - 1).max().unwrap_or(0)
    }

    pub fn piece_index(&self, z: f64) -> usize {
        self.breakpoints.iter().filter(|&&b| z > b).count()
    }

    pub fn eval(&self, z: f64) -> f64 {
        let coeffs = &self.pieces[self.piece_index(z)];
        coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }
}

/// Shape of an MLP scorer: input width, hidden widths, one output, and the
/// activation applied after every hidden layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub activation: Activation,
}

impl MlpSpec {
    pub fn relu(input_dim: usize, hidden: Vec<usize>) -> Self {
        Self {
            input_dim,
            hidden,
            activation: Activation::relu(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::Validation(
                "mlp input dimension must be positive".into(),
            ));
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return Err(Error::Validation(
                "mlp needs at least one nonempty hidden layer".into(),
            ));
        }
        self.activation.validate()
    }

    /// Hidden layer count (L).
    pub fn layers(&self) -> usize {
        self.hidden.len()
    }

    /// Total hidden neurons (U).
    pub fn hidden_units(&self) -> usize {
        self.hidden.iter().sum()
    }

    /// Total parameter count (W): weights plus biases of every affine map,
    /// hidden and output.
    pub fn param_count(&self) -> usize {
        let mut w = 0;
        let mut prev = self.input_dim;
        for &h in &self.hidden {
            w += (prev + 1) * h;
            prev = h;
        }
        w + (prev + 1)
    }
}

/// An MLP scorer: spec plus a flat parameter vector. Layout is layer-major,
/// within a layer all weights first (output-neuron major, inputs in order)
/// and then the biases. This layout is a wire contract; traces and policy
/// files depend on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpScorer {
    pub spec: MlpSpec,
    pub w: Vec<f64>,
}

impl MlpScorer {
    pub fn new(spec: MlpSpec, w: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if w.len() != spec.param_count() {
            return Err(Error::Validation(format!(
                "mlp expects {} parameters, got {}",
                spec.param_count(),
                w.len()
            )));
        }
        Ok(Self { spec, w })
    }

    /// Forward pass; also reports the activation piece chosen by every
    /// hidden unit, which the structure probes use to delimit regions.
    pub fn forward_with_pattern(&self, input: &[f64]) -> Result<(f64, Vec<usize>)> {
        if input.len() != self.spec.input_dim {
            return Err(Error::Parameter(format!(
                "mlp input has {} entries, expected {}",
                input.len(),
                self.spec.input_dim
            )));
        }
        let mut pattern = Vec::with_capacity(self.spec.hidden_units());
        let mut cur: Vec<f64> = input.to_vec();
        let mut off = 0usize;
        for &h in &self.spec.hidden {
            let prev = cur.len();
            let mut next = Vec::with_capacity(h);
            for unit in 0..h {
                let ws = &self.w[off + unit * prev..off + (unit + 1) * prev];
                let bias = self.w[off + h * prev + unit];
                let pre = dot(ws, &cur) + bias;
                pattern.push(self.spec.activation.piece_index(pre));
                next.push(self.spec.activation.eval(pre));
            }
            off += (prev + 1) * h;
            cur = next;
        }
        let prev = cur.len();
        let ws = &self.w[off..off + prev];
        let bias = self.w[off + prev];
        Ok((dot(ws, &cur) + bias, pattern))
    }

    pub fn forward(&self, input: &[f64]) -> Result<f64> {
        self.forward_with_pattern(input).map(|(v, _)| v)
    }
}

/// Linear scorer `w' phi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearScorer {
    pub w: Vec<f64>,
}

/// Parameter-free built-in rules, expressed over the same feature vectors as
/// the learned scorers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedRule {
    /// Newest node first: scores the creation-order fraction.
    DepthFirstNode,
    /// Classic product rule on the fractional part: f (1 - f).
    ProductBranch,
}

/// A scoring function for one action type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scorer {
    Linear(LinearScorer),
    Mlp(MlpScorer),
    Fixed { rule: FixedRule },
}

impl Scorer {
    /// Learnable parameter count; fixed rules carry none.
    pub fn param_count(&self) -> usize {
        match self {
            Scorer::Linear(l) => l.w.len(),
            Scorer::Mlp(m) => m.spec.param_count(),
            Scorer::Fixed { .. } => 0,
        }
    }
}

/// Evaluates a scorer on a feature vector.
pub fn score(scorer: &Scorer, phi: &FeatureVector) -> Result<f64> {
    match scorer {
        Scorer::Linear(l) => {
            if l.w.len() != phi.len() {
                return Err(Error::Parameter(format!(
                    "linear scorer has {} weights but feature vector has {} entries",
                    l.w.len(),
                    phi.len()
                )));
            }
            Ok(dot(&l.w, &phi.0))
        }
        Scorer::Mlp(m) => m.forward(&phi.0),
        Scorer::Fixed { rule } => match rule {
            FixedRule::DepthFirstNode => Ok(phi.0[3]),
            FixedRule::ProductBranch => {
                let f = phi.0[3];
                Ok(f * (1.0 - f))
            }
        },
    }
}

/// Index of the best-scoring candidate; ties go to the smallest index, i.e.
/// the lexicographically first candidate in the canonical order. `None`
/// signals an empty candidate set (the round skips this action type).
pub fn select_action(scores: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &s) in scores.iter().enumerate() {
        match best {
            None => best = Some((i, s)),
            Some((_, bs)) if s > bs => best = Some((i, s)),
            _ => {}
        }
    }
    best.map(|(i, _)| i)
}

/// Versioned feature extractor identifiers. The node and branch definitions
/// are artifact conventions, so the version tag is part of the trace
/// contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtractorId {
    NodeV1,
    CutV1,
    BranchV1,
}

impl ExtractorId {
    pub fn output_dim(&self) -> usize {
        4
    }
}

/// One action type's policy: extractor plus scorer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySlot {
    pub extractor: ExtractorId,
    pub scorer: Scorer,
}

impl PolicySlot {
    fn validate(&self) -> Result<()> {
        let dim = self.extractor.output_dim();
        match &self.scorer {
            Scorer::Linear(l) if l.w.len() != dim => Err(Error::Validation(format!(
                "linear scorer dimension {} does not match extractor output {}",
                l.w.len(),
                dim
            ))),
            Scorer::Mlp(m) if m.spec.input_dim != dim => Err(Error::Validation(format!(
                "mlp input dimension {} does not match extractor output {}",
                m.spec.input_dim, dim
            ))),
            Scorer::Mlp(m) => MlpScorer::new(m.spec.clone(), m.w.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }
}

/// The full decision policy: one slot per action type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyBundle {
    pub schema: String,
    pub node: PolicySlot,
    pub cut: PolicySlot,
    pub branch: PolicySlot,
}

pub const POLICY_SCHEMA: &str = "bclab-policy-v1";

impl PolicyBundle {
    pub fn new(node: Scorer, cut: Scorer, branch: Scorer) -> Result<Self> {
        let bundle = Self {
            schema: POLICY_SCHEMA.to_string(),
            node: PolicySlot {
                extractor: ExtractorId::NodeV1,
                scorer: node,
            },
            cut: PolicySlot {
                extractor: ExtractorId::CutV1,
                scorer: cut,
            },
            branch: PolicySlot {
                extractor: ExtractorId::BranchV1,
                scorer: branch,
            },
        };
        bundle.validate()?;
        Ok(bundle)
    }

    /// Depth-first nodes, product-rule branching, hybrid linear cut weights.
    pub fn reference() -> Self {
        Self::new(
            Scorer::Fixed {
                rule: FixedRule::DepthFirstNode,
            },
            Scorer::Linear(LinearScorer {
                w: vec![1.0, 0.25, 0.25, 0.25],
            }),
            Scorer::Fixed {
                rule: FixedRule::ProductBranch,
            },
        )
        .expect("reference policy is well-formed")
    }

    pub fn validate(&self) -> Result<()> {
        self.node.validate()?;
        self.cut.validate()?;
        self.branch.validate()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bundle: PolicyBundle = serde_json::from_str(text)?;
        bundle.validate()?;
        Ok(bundle)
    }
}

/// Which slots of a policy are learnable, and their shapes. The flat
/// parameter vector is split across learnable slots in action-type order
/// (node, cut, branch).
#[derive(Debug, Clone, PartialEq)]
pub enum SlotTemplate {
    Fixed(Scorer),
    Linear { dim: usize },
    Mlp { spec: MlpSpec },
}

impl SlotTemplate {
    pub fn param_count(&self) -> usize {
        match self {
            SlotTemplate::Fixed(_) => 0,
            SlotTemplate::Linear { dim } => *dim,
            SlotTemplate::Mlp { spec } => spec.param_count(),
        }
    }

    fn assemble(&self, w: &[f64]) -> Result<Scorer> {
        Ok(match self {
            SlotTemplate::Fixed(s) => s.clone(),
            SlotTemplate::Linear { .. } => Scorer::Linear(LinearScorer { w: w.to_vec() }),
            SlotTemplate::Mlp { spec } => Scorer::Mlp(MlpScorer::new(spec.clone(), w.to_vec())?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTemplate {
    pub node: SlotTemplate,
    pub cut: SlotTemplate,
    pub branch: SlotTemplate,
}

impl PolicyTemplate {
    /// Root-cut scenario: only the cut scorer is learned.
    pub fn root_cuts(cut: SlotTemplate) -> Self {
        Self {
            node: SlotTemplate::Fixed(Scorer::Fixed {
                rule: FixedRule::DepthFirstNode,
            }),
            cut,
            branch: SlotTemplate::Fixed(Scorer::Fixed {
                rule: FixedRule::ProductBranch,
            }),
        }
    }

    /// All three action types learned.
    pub fn three_policy(node: SlotTemplate, cut: SlotTemplate, branch: SlotTemplate) -> Self {
        Self { node, cut, branch }
    }

    pub fn param_count(&self) -> usize {
        self.node.param_count() + self.cut.param_count() + self.branch.param_count()
    }

    pub fn assemble(&self, w: &[f64]) -> Result<PolicyBundle> {
        if w.len() != self.param_count() {
            return Err(Error::Parameter(format!(
                "template expects {} parameters, got {}",
                self.param_count(),
                w.len()
            )));
        }
        let (wn, rest) = w.split_at(self.node.param_count());
        let (wc, wb) = rest.split_at(self.cut.param_count());
        PolicyBundle::new(
            self.node.assemble(wn)?,
            self.cut.assemble(wc)?,
            self.branch.assemble(wb)?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::CutOrigin;

    fn cut(alpha: Vec<f64>, beta: f64) -> Cut {
        Cut {
            alpha,
            beta,
            origin: CutOrigin {
                node: 0,
                round: 0,
                source_row: 0,
            },
            id: 0,
        }
    }

    #[test]
    fn efficacy_formula() {
        assert!((efficacy(&[2.0, 0.0], &cut(vec![1.0, 0.0], 1.0)).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            efficacy(&[0.0, 0.0], &cut(vec![0.0, 2.0], 0.0)).unwrap(),
            0.0
        );
        assert!((efficacy(&[1.0, 1.0], &cut(vec![3.0, 4.0], 0.0)).unwrap() - 1.4).abs() < 1e-12);
        assert!(efficacy(&[0.0], &cut(vec![0.0], 0.0)).is_err());
    }

    #[test]
    fn parallelism_formula() {
        let c = vec![1.0, 0.0];
        assert!((objective_parallelism(&c, &cut(c.clone(), 0.0)).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            objective_parallelism(&c, &cut(vec![0.0, 1.0], 0.0)).unwrap(),
            0.0
        );
        let v = objective_parallelism(&c, &cut(vec![1.0, 1.0], 0.0)).unwrap();
        assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(objective_parallelism(&[0.0, 0.0], &cut(vec![1.0, 1.0], 0.0)).is_err());
    }

    #[test]
    fn dcd_formula_and_fallbacks() {
        let k = cut(vec![1.0, 0.0], 1.0);
        let (v, flagged) = directed_cutoff_distance(&[2.0, 0.0], Some(&[0.0, 0.0]), &k);
        assert!(!flagged);
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(directed_cutoff_distance(&[2.0, 0.0], None, &k), (0.0, true));
        assert_eq!(
            directed_cutoff_distance(&[2.0, 0.0], Some(&[2.0, 0.0]), &k),
            (0.0, true)
        );
        // Direction orthogonal to the cut normal.
        let k0 = cut(vec![1.0, 0.0], 0.0);
        assert_eq!(
            directed_cutoff_distance(&[1.0, 0.0], Some(&[1.0, 1.0]), &k0),
            (0.0, true)
        );
    }

    #[test]
    fn integral_support_counts() {
        assert_eq!(integral_support(&cut(vec![1.0, 1.0], 0.0), 2).unwrap(), 1.0);
        assert_eq!(integral_support(&cut(vec![0.0, 1.0], 0.0), 1).unwrap(), 0.0);
        assert_eq!(
            integral_support(&cut(vec![1.0, 0.0, 1.0], 0.0), 1).unwrap(),
            0.5
        );
        assert!(integral_support(&cut(vec![0.0, 0.0], 0.0), 1).is_err());
    }

    #[test]
    fn cut_feature_vector_composition() {
        // Efficacy example with objective (-1, 0) and no incumbent.
        let k = cut(vec![1.0, 0.0], 1.0);
        let phi = cut_features(&[2.0, 0.0], None, &[-1.0, 0.0], &k, 2).unwrap();
        assert_eq!(phi.0.len(), 4);
        assert!((phi.0[0] - 1.0).abs() < 1e-12);
        assert!((phi.0[1] - 1.0).abs() < 1e-12);
        assert_eq!(phi.0[2], 0.0);
        assert_eq!(phi.0[3], 1.0);
    }

    #[test]
    fn branch_fractionality_peaks_at_half() {
        let phi = branch_features(0.5, 0, &[1.0, 2.0], &[vec![1.0, 0.0]]);
        assert_eq!(phi.0[0], 0.5);
        assert_eq!(phi.0[3], 0.5);
    }

    #[test]
    fn node_feature_depth_zero_at_root() {
        let phi = node_features(None, None, 0, 10, f64::INFINITY, 0, 0);
        assert_eq!(phi.0[1], 0.0);
        assert!(phi.0.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn linear_score_is_projection() {
        let s = Scorer::Linear(LinearScorer {
            w: vec![1.0, 0.0, 0.0, 0.0],
        });
        let phi = FeatureVector(vec![0.5, 0.2, 0.1, 1.0]);
        assert_eq!(score(&s, &phi).unwrap(), 0.5);
        let bad = FeatureVector(vec![1.0]);
        assert!(score(&s, &bad).is_err());
    }

    #[test]
    fn zero_mlp_outputs_zero() {
        let spec = MlpSpec::relu(4, vec![3]);
        let s = MlpScorer::new(spec.clone(), vec![0.0; spec.param_count()]).unwrap();
        for input in [[0.0, 0.0, 0.0, 0.0], [1.0, -2.0, 0.5, 3.0]] {
            assert_eq!(s.forward(&input).unwrap(), 0.0);
        }
    }

    #[test]
    fn relu_mlp_hand_forward_pass() {
        // 1-1-1 net: hidden weight 2, hidden bias -1, output weight 3,
        // output bias 0, input 1 -> 3 * max(0, 2*1 - 1) = 3.
        let spec = MlpSpec::relu(1, vec![1]);
        let s = MlpScorer::new(spec, vec![2.0, -1.0, 3.0, 0.0]).unwrap();
        assert!((s.forward(&[1.0]).unwrap() - 3.0).abs() < 1e-12);
        // Inactive side of the hinge.
        assert_eq!(s.forward(&[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn mlp_param_count_matches_layout() {
        let spec = MlpSpec::relu(4, vec![3, 2]);
        // (4+1)*3 + (3+1)*2 + (2+1) = 15 + 8 + 3 = 26
        assert_eq!(spec.param_count(), 26);
        assert_eq!(spec.layers(), 2);
        assert_eq!(spec.hidden_units(), 5);
    }

    #[test]
    fn selection_breaks_ties_lexicographically() {
        assert_eq!(select_action(&[1.0, 1.0, 1.0]), Some(0));
        assert_eq!(select_action(&[0.2, 0.9, 0.9]), Some(1));
        assert_eq!(select_action(&[]), None);
    }

    #[test]
    fn selection_invariant_under_positive_scaling() {
        let mut rng = crate::rng::SplitMix64::new(3);
        for _ in 0..200 {
            let scores: Vec<f64> = (0..5).map(|_| rng.uniform(-2.0, 2.0)).collect();
            let lambda = rng.uniform(0.1, 10.0);
            let scaled: Vec<f64> = scores.iter().map(|s| s * lambda).collect();
            assert_eq!(select_action(&scores), select_action(&scaled));
        }
    }

    #[test]
    fn linear_score_midpoint_affinity() {
        // Score at the midpoint of two parameter vectors equals the midpoint
        // of the scores, to floating-point accuracy.
        let mut rng = crate::rng::SplitMix64::new(8);
        for _ in 0..100 {
            let phi = FeatureVector((0..4).map(|_| rng.uniform(-1.0, 1.0)).collect());
            let w1: Vec<f64> = (0..4).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let w2: Vec<f64> = (0..4).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let mid: Vec<f64> = w1.iter().zip(&w2).map(|(a, b)| (a + b) / 2.0).collect();
            let s1 = score(&Scorer::Linear(LinearScorer { w: w1 }), &phi).unwrap();
            let s2 = score(&Scorer::Linear(LinearScorer { w: w2 }), &phi).unwrap();
            let sm = score(&Scorer::Linear(LinearScorer { w: mid }), &phi).unwrap();
            assert!((sm - (s1 + s2) / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn policy_bundle_round_trips_through_json() {
        let bundle = PolicyBundle::reference();
        let json = bundle.to_json().unwrap();
        let back = PolicyBundle::from_json(&json).unwrap();
        assert_eq!(bundle, back);
    }

    #[test]
    fn template_assembly_splits_parameters() {
        let t = PolicyTemplate::root_cuts(SlotTemplate::Linear { dim: 4 });
        assert_eq!(t.param_count(), 4);
        let bundle = t.assemble(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        match &bundle.cut.scorer {
            Scorer::Linear(l) => assert_eq!(l.w, vec![1.0, 2.0, 3.0, 4.0]),
            other => panic!("unexpected scorer {other:?}"),
        }
        assert!(t.assemble(&[1.0]).is_err());
    }

    #[test]
    fn activation_piece_lookup() {
        let relu = Activation::relu();
        assert_eq!(relu.piece_index(-1.0), 0);
        assert_eq!(relu.piece_index(0.0), 0);
        assert_eq!(relu.piece_index(0.5), 1);
        assert_eq!(relu.eval(-3.0), 0.0);
        assert_eq!(relu.eval(2.0), 2.0);
        assert_eq!(relu.piece_count(), 2);
        assert_eq!(relu.degree(), 1);
    }
}
