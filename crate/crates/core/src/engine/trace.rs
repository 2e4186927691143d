//! Run traces, penalties, and the cost accounting over them.

use crate::rng::Fnv64;
use serde::Serialize;
use std::collections::BTreeSet;

/// Constant per-step penalties for the three action types. With the default
/// (0, 1, 2) the accumulated cost counts selected cuts once and branchings
/// twice, which tracks the number of nodes the tree grows by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySpec {
    pub node: f64,
    pub cut: f64,
    pub branch: f64,
}

impl Default for PenaltySpec {
    fn default() -> Self {
        Self {
            node: 0.0,
            cut: 1.0,
            branch: 2.0,
        }
    }
}

impl PenaltySpec {
    /// Penalty for one step. The full signature (state, action, round) is
    /// part of the contract; the built-ins only depend on the action type.
    pub fn penalty(
        &self,
        action_type: usize,
        _state_digest: u64,
        _action: u64,
        _round: usize,
    ) -> f64 {
        match action_type {
            0 => self.node,
            1 => self.cut,
            2 => self.branch,
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.node < 0.0 || self.cut < 0.0 || self.branch < 0.0 {
            return Err(crate::Error::Parameter(
                "penalties must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Upper bound on the total cost of a run with at most `max_rounds`
    /// rounds and at most `kappa` cut picks per round.
    pub fn total_bound(&self, max_rounds: usize, kappa: usize) -> f64 {
        let per_round = self.node + (self.cut * kappa as f64).max(self.branch);
        per_round * max_rounds as f64
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// Reached a terminal state (for branch-and-cut: the open list emptied).
    Exhausted,
    /// Bound gap closed to within the configured tolerance.
    GapReached,
    /// Hit the round limit.
    RoundLimit,
}

/// One decision step. `action_type` is 1-based (1 = node selection,
/// 2 = cut selection, 3 = branching) to match the trace file format.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub round: usize,
    pub action_type: usize,
    pub state_digest: u64,
    /// Candidate action ids in canonical order.
    pub candidates: Vec<u64>,
    pub chosen: u64,
    pub score_hash: u64,
}

/// Final bounds and incumbent of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceOutcome {
    pub x_star: Option<Vec<f64>>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub termination: Termination,
}

impl Default for TraceOutcome {
    fn default() -> Self {
        Self {
            x_star: None,
            lower_bound: f64::NEG_INFINITY,
            upper_bound: f64::INFINITY,
            termination: Termination::RoundLimit,
        }
    }
}

/// Full decision history of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub steps: Vec<TraceStep>,
    /// Distinct (state digest, action) pairs encountered per action type,
    /// counting every candidate at every decision point.
    pub q_counts: Vec<usize>,
    /// Accumulated penalty.
    pub v: f64,
    pub rounds: usize,
    pub outcome: TraceOutcome,
}

impl RunTrace {
    pub fn new(action_types: usize) -> Self {
        Self {
            steps: Vec::new(),
            q_counts: vec![0; action_types],
            v: 0.0,
            rounds: 0,
            outcome: TraceOutcome::default(),
        }
    }
}

/// Recomputes the accumulated penalty from the steps. Equal to `trace.v`
/// whenever the trace was produced with the same penalty spec.
pub fn tree_size_cost(trace: &RunTrace, penalties: &PenaltySpec) -> f64 {
    trace
        .steps
        .iter()
        .map(|s| penalties.penalty(s.action_type - 1, s.state_digest, s.chosen, s.round))
        .sum()
}

/// Recounts distinct (state digest, action) pairs per action type from the
/// step records. Matches the live `q_counts` of the trace.
pub fn count_state_action_pairs(trace: &RunTrace) -> Vec<usize> {
    let d = trace.q_counts.len();
    let mut sets: Vec<BTreeSet<(u64, u64)>> = vec![BTreeSet::new(); d];
    for step in &trace.steps {
        let k = step.action_type - 1;
        for &a in &step.candidates {
            sets[k].insert((step.state_digest, a));
        }
    }
    sets.into_iter().map(|s| s.len()).collect()
}

/// Deterministic hash of a score vector, recorded per step.
pub fn score_hash(scores: &[f64]) -> u64 {
    Fnv64::new().write_f64_slice(scores).finish()
}

#[derive(Serialize)]
struct TraceHeader<'a> {
    schema: &'a str,
    rounds: usize,
    v: f64,
    q_counts: &'a [usize],
    termination: Termination,
    lower_bound: f64,
    upper_bound: f64,
    has_incumbent: bool,
}

#[derive(Serialize)]
struct TraceStepRecord<'a> {
    round: usize,
    action_type: usize,
    state: &'a str,
    candidates: usize,
    chosen: u64,
    scores: &'a str,
}

/// Line-oriented trace export: a header record followed by one record per
/// step, stable field order. Digests are rendered as hex strings so the
/// lines survive JSON readers that mangle 64-bit integers.
pub fn export_trace(trace: &RunTrace) -> String {
    let mut out = String::new();
    let header = TraceHeader {
        schema: "bclab-trace-v1",
        rounds: trace.rounds,
        v: trace.v,
        q_counts: &trace.q_counts,
        termination: trace.outcome.termination,
        lower_bound: trace.outcome.lower_bound,
        upper_bound: trace.outcome.upper_bound,
        has_incumbent: trace.outcome.x_star.is_some(),
    };
    out.push_str(&serde_json::to_string(&header).expect("trace header serializes"));
    out.push('\n');
    for step in &trace.steps {
        let state = format!("{:#018x}", step.state_digest);
        let scores = format!("{:#018x}", step.score_hash);
        let rec = TraceStepRecord {
            round: step.round,
            action_type: step.action_type,
            state: &state,
            candidates: step.candidates.len(),
            chosen: step.chosen,
            scores: &scores,
        };
        out.push_str(&serde_json::to_string(&rec).expect("trace step serializes"));
        out.push('\n');
    }
    out
}
