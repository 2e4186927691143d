//! The generic sequential decision process: d action types per round, argmax
//! selection with lexicographic tie-breaking, penalty accumulation, terminal
//! states, and a round limit.

use super::trace::{score_hash, RunTrace, Termination, TraceStep};
use super::PenaltySpec;
use crate::error::{Error, Result};
use crate::policy::select_action;
use std::collections::BTreeSet;

/// A process the engine can drive. Implementations provide the action types,
/// candidate enumeration in canonical order, scoring, and transitions.
pub trait SequentialProcess {
    type State;

    fn action_types(&self) -> usize;

    fn is_terminal(&self, s: &Self::State) -> bool;

    /// Candidate action ids of type `k`, in the canonical (lexicographic)
    /// order that tie-breaking refers to.
    fn available(&self, s: &Self::State, k: usize) -> Vec<u64>;

    fn scores(&self, s: &Self::State, k: usize, actions: &[u64]) -> Result<Vec<f64>>;

    fn apply(&mut self, s: Self::State, k: usize, action: u64) -> Result<Self::State>;

    /// Stable digest of the state, used for trace identity and distinct
    /// state-action accounting, never for control flow.
    fn digest(&self, s: &Self::State) -> u64;

    /// How many type-`k` selections one round may perform. The base process
    /// takes one action per type per round; branch-and-cut raises this for
    /// cut selection to pick up to kappa cuts.
    fn picks_per_round(&self, _s: &Self::State, _k: usize) -> usize {
        1
    }

    /// Hook that runs at the end of every round (bookkeeping such as
    /// returning a node to the open list).
    fn finish_round(&mut self, s: Self::State) -> Result<Self::State> {
        Ok(s)
    }

    /// Per-type caps on the number of available actions, for the live
    /// distinct-pair assertion. Must all be at least 2.
    fn availability_caps(&self, max_rounds: usize) -> Vec<u64>;

    fn termination_reason(&self, _s: &Self::State) -> Termination {
        Termination::Exhausted
    }
}

/// Asserts `q <= rho_k * (prod rho)^M` in log space. The bound holds for
/// every run of the process; a failure is an engine bug.
fn assert_q_bound(q: usize, k: usize, caps: &[u64], max_rounds: usize) {
    if q == 0 {
        return;
    }
    let ln_bar: f64 = caps.iter().map(|&r| (r as f64).ln()).sum();
    let ln_bound = (caps[k] as f64).ln() + max_rounds as f64 * ln_bar;
    let ln_q = (q as f64).ln();
    assert!(
        ln_q <= ln_bound + 1e-9,
        "distinct state-action pairs of type {} exceed the worst-case bound: ln {} > ln cap {}",
        k + 1,
        ln_q,
        ln_bound
    );
}

/// Runs the process from `s0` for at most `max_rounds` rounds and returns
/// the final state, the accumulated penalty, and the full trace.
pub fn run_process<P: SequentialProcess>(
    process: &mut P,
    s0: P::State,
    penalties: &PenaltySpec,
    max_rounds: usize,
) -> Result<(P::State, f64, RunTrace)> {
    penalties.validate()?;
    let d = process.action_types();
    let caps = process.availability_caps(max_rounds);
    assert!(
        caps.len() == d && caps.iter().all(|&r| r >= 2),
        "caps must be >= 2 per type"
    );

    let mut trace = RunTrace::new(d);
    let mut pair_sets: Vec<BTreeSet<(u64, u64)>> = vec![BTreeSet::new(); d];
    let mut s = s0;
    let mut round = 0;
    let mut termination = Termination::RoundLimit;

    let abort = |trace: &mut RunTrace, rounds: usize, msg: String| -> Error {
        trace.rounds = rounds;
        Error::RunAborted {
            node: 0,
            msg,
            trace: Box::new(std::mem::take(trace)),
        }
    };

    while round < max_rounds {
        if process.is_terminal(&s) {
            termination = process.termination_reason(&s);
            break;
        }
        'types: for k in 0..d {
            let picks = process.picks_per_round(&s, k);
            for _ in 0..picks {
                let actions = process.available(&s, k);
                if actions.is_empty() {
                    continue 'types;
                }
                debug_assert!(actions.len() as u64 <= caps[k]);
                let digest = process.digest(&s);
                for &a in &actions {
                    pair_sets[k].insert((digest, a));
                }
                trace.q_counts[k] = pair_sets[k].len();
                assert_q_bound(trace.q_counts[k], k, &caps, max_rounds);

                let scores = match process.scores(&s, k, &actions) {
                    Ok(v) => v,
                    Err(e) => return Err(abort(&mut trace, round, e.to_string())),
                };
                let idx = select_action(&scores).expect("nonempty candidate set");
                let chosen = actions[idx];
                trace.v += penalties.penalty(k, digest, chosen, round);
                trace.steps.push(TraceStep {
                    round,
                    action_type: k + 1,
                    state_digest: digest,
                    candidates: actions,
                    chosen,
                    score_hash: score_hash(&scores),
                });
                s = match process.apply(s, k, chosen) {
                    Ok(next) => next,
                    Err(e) => return Err(abort(&mut trace, round, e.to_string())),
                };
                if process.is_terminal(&s) {
                    break 'types;
                }
            }
        }
        s = match process.finish_round(s) {
            Ok(next) => next,
            Err(e) => return Err(abort(&mut trace, round, e.to_string())),
        };
        round += 1;
        if process.is_terminal(&s) {
            termination = process.termination_reason(&s);
            break;
        }
    }

    trace.rounds = round;
    trace.outcome.termination = termination;
    let v = trace.v;
    Ok((s, v, trace))
}
