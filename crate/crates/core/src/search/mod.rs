//! AND/OR branch and bound over a pseudo tree, guided by static heuristics
//! read off the messages of an elimination pass.

mod aobb;
mod heuristic;

pub use aobb::{aobb, aobb_with, AobbOptions, NodeKind, NodeRecord, SearchOutcome, SearchStats};
pub use heuristic::{build_heuristic, build_heuristic_with_budget, HeuristicTable, Scheme};
