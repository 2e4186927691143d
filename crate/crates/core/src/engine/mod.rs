//! The sequential decision engine and its branch-and-cut instantiation.

mod bnc;
mod process;
mod trace;

pub use bnc::{solve_bnc, BncConfig, BncNode, BncResult, BncStatus, CutVsBranchRule};
pub use process::{run_process, SequentialProcess};
pub use trace::{
    count_state_action_pairs, export_trace, score_hash, tree_size_cost, PenaltySpec, RunTrace,
    Termination, TraceOutcome, TraceStep,
};
