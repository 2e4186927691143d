//! Branch-and-cut as a three-action-type sequential decision process: node
//! selection, cut selection, and branching, each driven by a policy slot.
//!
//! One round selects a node from the open list, solves its relaxation, and
//! then either prunes, records an incumbent, adds up to `kappa` cuts (root
//! rounds only), or branches on a fractional integer variable.

use super::process::{run_process, SequentialProcess};
use super::trace::{PenaltySpec, RunTrace, Termination};
use crate::cuts::{generate_candidate_cuts, Cut, CutContext, INT_TOL};
use crate::error::{Error, Result};
use crate::instance::MipInstance;
use crate::policy::{
    branch_features, cut_features, node_features, score, FeatureVector, PolicyBundle,
};
use crate::rng::Fnv64;
use crate::simplex::{solve_lp, LpProblem, LpSolution, LpStatus};
use serde::{Deserialize, Serialize};

/// Rule deciding between adding cuts and branching at a processed node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutVsBranchRule {
    /// Cut while the node is the root and fewer than `root_cut_rounds` cut
    /// rounds have run there; branch everywhere else.
    RootRounds,
}

/// Branch-and-cut controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BncConfig {
    /// Round limit M.
    pub max_rounds: usize,
    /// Terminate once `ub - lb` drops to this.
    pub eps_gap: f64,
    /// Cut rounds allowed at the root (R).
    pub root_cut_rounds: usize,
    /// Cuts selected per cut round (kappa).
    pub kappa: usize,
    /// Candidate-pool cap (r).
    pub cut_cap: usize,
    pub cut_vs_branch: CutVsBranchRule,
}

impl Default for BncConfig {
    fn default() -> Self {
        Self {
            max_rounds: 100,
            eps_gap: 1e-6,
            root_cut_rounds: 1,
            kappa: 2,
            cut_cap: 8,
            cut_vs_branch: CutVsBranchRule::RootRounds,
        }
    }
}

impl BncConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_rounds == 0 {
            return Err(Error::Parameter("max_rounds must be at least 1".into()));
        }
        if !(self.eps_gap >= 0.0) {
            return Err(Error::Parameter("eps_gap must be nonnegative".into()));
        }
        Ok(())
    }
}

/// A node of the search tree. `rows` accumulates the node's cuts and branch
/// bounds in insertion order; children inherit the parent's rows.
#[derive(Debug, Clone)]
pub struct BncNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub rows: Vec<(Vec<f64>, f64)>,
    /// Cached bound: the parent's solved value at creation, this node's own
    /// once solved.
    pub z_lp: Option<f64>,
    pub x_lp: Option<Vec<f64>>,
}

impl BncNode {
    fn rows_digest(&self) -> u64 {
        let mut h = Fnv64::new();
        h.write_usize(self.rows.len());
        for (coeffs, rhs) in &self.rows {
            h.write_f64_slice(coeffs).write_f64(*rhs);
        }
        h.finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    SelectNode,
    Cut,
    Branch,
    RoundDone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RoundMode {
    None,
    Pruned,
    Cut,
    Branch,
}

pub struct BncState {
    open: Vec<BncNode>,
    selected: Option<(BncNode, LpSolution)>,
    phase: Phase,
    mode: RoundMode,
    pool: Vec<Cut>,
    incumbent: Option<Vec<f64>>,
    ub: f64,
    lb: f64,
    root_lp_value: Option<f64>,
    created: usize,
    next_cut_id: u64,
    root_cut_rounds_done: usize,
    round: usize,
    /// Every candidate cut ever generated, kept for validity audits.
    generated_cuts: Vec<Cut>,
}

impl BncState {
    fn initial() -> Self {
        Self {
            open: vec![BncNode {
                id: 0,
                parent: None,
                depth: 0,
                rows: Vec::new(),
                z_lp: None,
                x_lp: None,
            }],
            selected: None,
            phase: Phase::SelectNode,
            mode: RoundMode::None,
            pool: Vec::new(),
            incumbent: None,
            ub: f64::INFINITY,
            lb: f64::NEG_INFINITY,
            root_lp_value: None,
            created: 1,
            next_cut_id: 0,
            root_cut_rounds_done: 0,
            round: 0,
            generated_cuts: Vec::new(),
        }
    }

    fn open_min_bound(&self) -> f64 {
        self.open
            .iter()
            .map(|n| n.z_lp.unwrap_or(f64::NEG_INFINITY))
            .fold(f64::INFINITY, f64::min)
    }

    fn insert_open(&mut self, node: BncNode) {
        let at = self.open.partition_point(|n| n.id < node.id);
        self.open.insert(at, node);
    }
}

struct BncProcess<'a> {
    inst: &'a MipInstance,
    policies: &'a PolicyBundle,
    cfg: &'a BncConfig,
}

impl BncProcess<'_> {
    fn fractional_vars(&self, sol: &LpSolution) -> Vec<u64> {
        (0..self.inst.n1)
            .filter(|&j| {
                let f = sol.x[j] - sol.x[j].floor();
                f.min(1.0 - f) > INT_TOL
            })
            .map(|j| j as u64)
            .collect()
    }

    fn is_integral(&self, sol: &LpSolution) -> bool {
        self.fractional_vars(sol).is_empty()
    }

    fn node_feature(&self, s: &BncState, node: &BncNode) -> FeatureVector {
        node_features(
            node.z_lp,
            s.root_lp_value,
            node.depth,
            self.cfg.max_rounds,
            s.ub,
            node.id,
            s.created,
        )
    }
}

impl SequentialProcess for BncProcess<'_> {
    type State = BncState;

    fn action_types(&self) -> usize {
        3
    }

    fn is_terminal(&self, s: &BncState) -> bool {
        (s.open.is_empty() && s.selected.is_none()) || s.ub - s.lb <= self.cfg.eps_gap
    }

    fn termination_reason(&self, s: &BncState) -> Termination {
        if s.ub - s.lb <= self.cfg.eps_gap {
            Termination::GapReached
        } else {
            Termination::Exhausted
        }
    }

    fn available(&self, s: &BncState, k: usize) -> Vec<u64> {
        match (k, s.phase) {
            (0, Phase::SelectNode) => s.open.iter().map(|n| n.id as u64).collect(),
            (1, Phase::Cut) => s.pool.iter().map(|c| c.id).collect(),
            (2, Phase::Branch) => {
                let (_, sol) = s.selected.as_ref().expect("branch phase has a node");
                self.fractional_vars(sol)
            }
            _ => Vec::new(),
        }
    }

    fn scores(&self, s: &BncState, k: usize, actions: &[u64]) -> Result<Vec<f64>> {
        match k {
            0 => actions
                .iter()
                .map(|&id| {
                    let node = s
                        .open
                        .iter()
                        .find(|n| n.id as u64 == id)
                        .ok_or_else(|| Error::Parameter(format!("unknown node {id}")))?;
                    score(&self.policies.node.scorer, &self.node_feature(s, node))
                })
                .collect(),
            1 => {
                let (_, sol) = s.selected.as_ref().expect("cut phase has a node");
                actions
                    .iter()
                    .map(|&id| {
                        let cut = s
                            .pool
                            .iter()
                            .find(|c| c.id == id)
                            .ok_or_else(|| Error::Parameter(format!("unknown cut {id}")))?;
                        let phi = cut_features(
                            &sol.x,
                            s.incumbent.as_deref(),
                            &self.inst.c,
                            cut,
                            self.inst.n1,
                        )?;
                        score(&self.policies.cut.scorer, &phi)
                    })
                    .collect()
            }
            2 => {
                let (_, sol) = s.selected.as_ref().expect("branch phase has a node");
                actions
                    .iter()
                    .map(|&a| {
                        let j = a as usize;
                        let phi = branch_features(sol.x[j], j, &self.inst.c, &self.inst.a);
                        score(&self.policies.branch.scorer, &phi)
                    })
                    .collect()
            }
            _ => Err(Error::Parameter(format!("unknown action type {k}"))),
        }
    }

    fn apply(&mut self, mut s: BncState, k: usize, action: u64) -> Result<BncState> {
        match k {
            0 => {
                let at = s
                    .open
                    .iter()
                    .position(|n| n.id as u64 == action)
                    .ok_or_else(|| Error::Parameter(format!("node {action} not open")))?;
                let mut node = s.open.remove(at);
                let mut problem = LpProblem::new(self.inst);
                problem.extra_rows = node.rows.clone();
                let sol = solve_lp(&problem).map_err(|e| {
                    Error::Parameter(format!("lp solve failed at node {}: {e}", node.id))
                })?;
                match sol.status {
                    LpStatus::Infeasible => {
                        s.phase = Phase::RoundDone;
                        s.mode = RoundMode::Pruned;
                        return Ok(s);
                    }
                    LpStatus::Unbounded => {
                        return Err(Error::Parameter(format!(
                            "relaxation unbounded at node {}",
                            node.id
                        )));
                    }
                    LpStatus::Optimal => {}
                }
                node.z_lp = Some(sol.value);
                node.x_lp = Some(sol.x.clone());
                if node.id == 0 && s.root_lp_value.is_none() {
                    s.root_lp_value = Some(sol.value);
                }
                if sol.value >= s.ub {
                    s.phase = Phase::RoundDone;
                    s.mode = RoundMode::Pruned;
                    return Ok(s);
                }
                if self.is_integral(&sol) {
                    s.ub = sol.value;
                    s.incumbent = Some(sol.x.clone());
                    let ub = s.ub;
                    s.open.retain(|n| n.z_lp.unwrap_or(f64::NEG_INFINITY) < ub);
                    s.phase = Phase::RoundDone;
                    s.mode = RoundMode::Pruned;
                    return Ok(s);
                }
                let cut_now = match self.cfg.cut_vs_branch {
                    CutVsBranchRule::RootRounds => {
                        node.id == 0
                            && s.root_cut_rounds_done < self.cfg.root_cut_rounds
                            && self.cfg.kappa > 0
                    }
                };
                if cut_now {
                    let ctx = CutContext {
                        node: node.id,
                        round: s.round,
                        next_id: s.next_cut_id,
                    };
                    let pool = generate_candidate_cuts(&sol, self.inst, self.cfg.cut_cap, ctx);
                    s.next_cut_id += pool.len() as u64;
                    s.generated_cuts.extend(pool.iter().cloned());
                    s.pool = pool;
                    s.phase = Phase::Cut;
                } else {
                    s.phase = Phase::Branch;
                }
                s.selected = Some((node, sol));
                Ok(s)
            }
            1 => {
                let at = s
                    .pool
                    .iter()
                    .position(|c| c.id == action)
                    .ok_or_else(|| Error::Parameter(format!("cut {action} not in pool")))?;
                let cut = s.pool.remove(at);
                let (node, _) = s.selected.as_mut().expect("cut phase has a node");
                node.rows.push((cut.alpha.clone(), cut.beta));
                Ok(s)
            }
            2 => {
                let (node, sol) = s.selected.take().expect("branch phase has a node");
                let j = action as usize;
                let xj = sol.x[j];
                let floor = xj.floor();
                let ceil = xj.ceil();
                let n = self.inst.n();
                let mut down_row = vec![0.0; n];
                down_row[j] = 1.0;
                let mut up_row = vec![0.0; n];
                up_row[j] = -1.0;

                let mut down_rows = node.rows.clone();
                down_rows.push((down_row, floor));
                let mut up_rows = node.rows;
                up_rows.push((up_row, -ceil));

                let down = BncNode {
                    id: s.created,
                    parent: Some(node.id),
                    depth: node.depth + 1,
                    rows: down_rows,
                    z_lp: node.z_lp,
                    x_lp: None,
                };
                let up = BncNode {
                    id: s.created + 1,
                    parent: Some(node.id),
                    depth: node.depth + 1,
                    rows: up_rows,
                    z_lp: node.z_lp,
                    x_lp: None,
                };
                s.created += 2;
                s.insert_open(down);
                s.insert_open(up);
                s.phase = Phase::RoundDone;
                s.mode = RoundMode::Branch;
                Ok(s)
            }
            _ => Err(Error::Parameter(format!("unknown action type {k}"))),
        }
    }

    fn digest(&self, s: &BncState) -> u64 {
        let mut h = Fnv64::new();
        h.write_u64(s.round as u64);
        h.write_u64(match s.phase {
            Phase::SelectNode => 0,
            Phase::Cut => 1,
            Phase::Branch => 2,
            Phase::RoundDone => 3,
        });
        h.write_u64(if s.ub.is_finite() {
            (s.ub * 1e6).round() as i64 as u64
        } else {
            u64::MAX
        });
        match &s.selected {
            Some((node, _)) => {
                h.write_u64(node.id as u64);
                h.write_u64(node.rows_digest());
            }
            None => {
                h.write_u64(u64::MAX);
            }
        }
        h.write_usize(s.open.len());
        for node in &s.open {
            h.write_u64(node.id as u64);
            h.write_u64(node.rows_digest());
        }
        h.finish()
    }

    fn picks_per_round(&self, _s: &BncState, k: usize) -> usize {
        if k == 1 {
            self.cfg.kappa.max(1)
        } else {
            1
        }
    }

    fn finish_round(&mut self, mut s: BncState) -> Result<BncState> {
        if s.phase == Phase::Cut {
            let (node, _) = s.selected.take().expect("cut phase has a node");
            if node.id == 0 {
                s.root_cut_rounds_done += 1;
            }
            s.insert_open(node);
            s.mode = RoundMode::Cut;
        }
        if matches!(s.mode, RoundMode::Cut | RoundMode::Branch) {
            s.lb = s.open_min_bound();
        }
        s.pool.clear();
        s.phase = Phase::SelectNode;
        s.mode = RoundMode::None;
        s.round += 1;
        Ok(s)
    }

    fn availability_caps(&self, max_rounds: usize) -> Vec<u64> {
        vec![
            (max_rounds as u64).max(2),
            (self.cfg.cut_cap as u64).max(2),
            (self.inst.n() as u64).max(2),
        ]
    }
}

/// Outcome of a branch-and-cut run.
#[derive(Debug, Clone, PartialEq)]
pub struct BncResult {
    pub status: BncStatus,
    /// Incumbent value (the final upper bound) when one was found.
    pub value: Option<f64>,
    pub x: Option<Vec<f64>>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub rounds: usize,
    pub termination: Termination,
    /// Every candidate cut generated during the run.
    pub generated_cuts: Vec<Cut>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BncStatus {
    /// Search completed (open list exhausted or gap closed) with an incumbent.
    Optimal,
    /// Search completed without any feasible point.
    Infeasible,
    /// Round limit hit first; bounds may still be open.
    RoundLimit,
}

/// Runs branch-and-cut on an instance under the given policy bundle.
pub fn solve_bnc(
    inst: &MipInstance,
    policies: &PolicyBundle,
    cfg: &BncConfig,
    penalties: &PenaltySpec,
) -> Result<(BncResult, f64, RunTrace)> {
    inst.validate()?;
    cfg.validate()?;
    policies.validate()?;
    let mut process = BncProcess {
        inst,
        policies,
        cfg,
    };
    let (state, v, mut trace) =
        run_process(&mut process, BncState::initial(), penalties, cfg.max_rounds)?;

    trace.outcome.lower_bound = state.lb;
    trace.outcome.upper_bound = state.ub;
    trace.outcome.x_star = state.incumbent.clone();
    let termination = trace.outcome.termination;
    let status = match (termination, &state.incumbent) {
        (Termination::RoundLimit, _) => BncStatus::RoundLimit,
        (_, Some(_)) => BncStatus::Optimal,
        (_, None) => BncStatus::Infeasible,
    };
    let result = BncResult {
        status,
        value: state.incumbent.as_ref().map(|_| state.ub),
        x: state.incumbent,
        lower_bound: state.lb,
        upper_bound: state.ub,
        rounds: trace.rounds,
        termination,
        generated_cuts: state.generated_cuts,
    };
    Ok((result, v, trace))
}
