use std::time::Duration;

use super::heuristic::HeuristicTable;
use crate::error::{usage, Result};
use crate::model::{Assignment, GraphicalModel, VarId};
use crate::ordering::PseudoTree;
use crate::trace::{Clock, Trace};

/// Slack applied toward not pruning, so ties with the incumbent survive.
const PRUNE_SLACK: f64 = 1e-12;
const POLL_EVERY: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Choice point for a variable.
    Or,
    /// Commitment of a variable to a value.
    And,
}

/// A visited node and the upper bound search used for it: `h` at OR nodes,
/// `g + Σ h(children)` at AND nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeRecord {
    pub kind: NodeKind,
    pub var: VarId,
    /// The variable's ancestors, plus the variable itself at AND nodes.
    pub context: Assignment,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchStats {
    /// OR and AND nodes expanded.
    pub nodes: u64,
    pub elapsed: f64,
    pub best_value: f64,
    /// Incumbent value whenever a better full solution is found.
    pub trace: Trace,
    pub timed_out: bool,
}

#[derive(Clone, Debug, Default)]
pub struct AobbOptions {
    pub time_limit: Option<Duration>,
    /// Disable to enumerate the full AND/OR tree.
    pub prune: bool,
    /// Start from a greedy descent down the heuristic.
    pub warm_start: bool,
    pub record_nodes: bool,
}

impl AobbOptions {
    pub fn new() -> Self {
        AobbOptions {
            prune: true,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Input-model value of `assignment`.
    pub value: f64,
    pub assignment: Assignment,
    pub stats: SearchStats,
    pub records: Vec<NodeRecord>,
}

impl SearchOutcome {
    pub fn is_exact(&self) -> bool {
        !self.stats.timed_out
    }
}

#[derive(Clone, Debug)]
struct Sol {
    value: f64,
    assign: Vec<(VarId, usize)>,
}

struct Search<'a> {
    h: &'a HeuristicTable,
    tree: &'a PseudoTree,
    cards: &'a [usize],
    opts: &'a AobbOptions,
    values: Vec<usize>,
    nodes: u64,
    clock: Clock,
    timed_out: bool,
    records: Vec<NodeRecord>,
    /// Best known solution of each pseudo-tree component.
    incumbents: Vec<Option<Sol>>,
    active_root: Option<(usize, VarId)>,
    trace: Trace,
    best_total: f64,
}

impl Search<'_> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes.is_multiple_of(POLL_EVERY) && self.clock.expired() {
            self.timed_out = true;
        }
        self.timed_out
    }

    fn record(&mut self, kind: NodeKind, var: VarId, bound: f64) {
        if !self.opts.record_nodes {
            return;
        }
        let mut context = Assignment::empty(self.values.len());
        if kind == NodeKind::And {
            context.set(var, self.values[var]);
        }
        for u in self.tree.ancestors(var) {
            context.set(u, self.values[u]);
        }
        self.records.push(NodeRecord {
            kind,
            var,
            context,
            bound,
        });
    }

    fn children_h(&self, v: VarId) -> Vec<f64> {
        self.tree
            .children(v)
            .iter()
            .map(|&c| self.h.h_in(c, &self.values))
            .collect()
    }

    /// Exact value of the subproblem below `v` if it reaches `alpha`.
    fn or_node(&mut self, v: VarId, alpha: f64) -> Option<Sol> {
        if self.tick() {
            return None;
        }
        if self.opts.record_nodes {
            let hv = self.h.h_in(v, &self.values);
            self.record(NodeKind::Or, v, hv);
        }
        let mut cands: Vec<(f64, usize, f64)> = (0..self.cards[v])
            .map(|x| {
                self.values[v] = x;
                let g = self.h.g_in(v, &self.values);
                let ub = g + self.children_h(v).iter().sum::<f64>();
                (ub, x, g)
            })
            .collect();
        cands.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut best: Option<Sol> = None;
        for (ub, x, g) in cands {
            let thr = best.as_ref().map_or(alpha, |b| b.value.max(alpha));
            if self.opts.prune && ub < thr - PRUNE_SLACK {
                break;
            }
            let sol = self.and_node(v, x, g, ub, thr);
            if let Some(s) = sol {
                if best.as_ref().is_none_or(|b| s.value > b.value) {
                    self.offer_root(v, &s);
                    best = Some(s);
                }
            }
            if self.timed_out {
                return None;
            }
        }
        best.filter(|b| b.value >= alpha - PRUNE_SLACK)
    }

    fn and_node(&mut self, v: VarId, x: usize, g: f64, ub: f64, thr: f64) -> Option<Sol> {
        if self.tick() {
            return None;
        }
        self.values[v] = x;
        self.record(NodeKind::And, v, ub);
        let hs = self.children_h(v);
        let mut rest: f64 = hs.iter().sum();
        let mut sol = Sol {
            value: g,
            assign: vec![(v, x)],
        };
        for (i, &c) in self.tree.children(v).iter().enumerate() {
            rest -= hs[i];
            let child_alpha = if self.opts.prune {
                thr - sol.value - rest
            } else {
                f64::NEG_INFINITY
            };
            let child = self.or_node(c, child_alpha)?;
            sol.value += child.value;
            sol.assign.extend(child.assign);
        }
        Some(sol)
    }

    fn offer_root(&mut self, v: VarId, s: &Sol) {
        let Some((k, root)) = self.active_root else {
            return;
        };
        if root != v {
            return;
        }
        if self.incumbents[k]
            .as_ref()
            .is_none_or(|b| s.value > b.value)
        {
            self.incumbents[k] = Some(s.clone());
            self.note_incumbent();
        }
    }

    fn note_incumbent(&mut self) {
        let mut total = self.h.constant();
        for inc in &self.incumbents {
            match inc {
                Some(s) => total += s.value,
                None => return,
            }
        }
        if total > self.best_total {
            self.best_total = total;
            self.trace.record(self.clock.elapsed(), total);
        }
    }

    /// Descends the pseudo tree picking the value with the largest
    /// `g + Σ h(children)` at each variable.
    fn greedy(&mut self, root: VarId) -> Sol {
        let mut sol = Sol {
            value: 0.0,
            assign: Vec::new(),
        };
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            let mut best = (f64::NEG_INFINITY, 0, 0.0);
            for x in 0..self.cards[v] {
                self.values[v] = x;
                let g = self.h.g_in(v, &self.values);
                let ub = g + self.children_h(v).iter().sum::<f64>();
                if ub > best.0 {
                    best = (ub, x, g);
                }
            }
            self.values[v] = best.1;
            sol.value += best.2;
            sol.assign.push((v, best.1));
            stack.extend(self.tree.children(v).iter().rev());
        }
        sol
    }
}

/// Depth-first AND/OR branch and bound with pruning and the given limit.
pub fn aobb(
    m: &GraphicalModel,
    h: &HeuristicTable,
    time_limit: Option<Duration>,
) -> Result<SearchOutcome> {
    aobb_with(
        m,
        h,
        &AobbOptions {
            time_limit,
            ..AobbOptions::new()
        },
    )
}

pub fn aobb_with(
    m: &GraphicalModel,
    h: &HeuristicTable,
    opts: &AobbOptions,
) -> Result<SearchOutcome> {
    let n = m.num_vars();
    if h.working_model().cards() != m.cards() {
        return usage("heuristic was built for a different model");
    }
    let tree = h.pseudo_tree();
    let roots = tree.roots().to_vec();
    let mut s = Search {
        h,
        tree,
        cards: m.cards(),
        opts,
        values: vec![0; n],
        nodes: 0,
        clock: Clock::start(opts.time_limit),
        timed_out: false,
        records: Vec::new(),
        incumbents: vec![None; roots.len()],
        active_root: None,
        trace: Trace::new(),
        best_total: f64::NEG_INFINITY,
    };
    if opts.warm_start {
        for (k, &r) in roots.iter().enumerate() {
            s.incumbents[k] = Some(s.greedy(r));
        }
        s.note_incumbent();
    }
    for (k, &r) in roots.iter().enumerate() {
        if s.timed_out {
            break;
        }
        let alpha = match (&s.incumbents[k], opts.prune) {
            (Some(inc), true) => inc.value,
            _ => f64::NEG_INFINITY,
        };
        s.active_root = Some((k, r));
        if let Some(sol) = s.or_node(r, alpha) {
            s.offer_root(r, &sol);
        }
    }
    for (k, &r) in roots.iter().enumerate() {
        if s.incumbents[k].is_none() {
            s.incumbents[k] = Some(s.greedy(r));
            s.note_incumbent();
        }
    }
    let mut values = vec![0; n];
    for inc in s.incumbents.iter().flatten() {
        for &(v, x) in &inc.assign {
            values[v] = x;
        }
    }
    let value = m.value_in(&values);
    let stats = SearchStats {
        nodes: s.nodes,
        elapsed: s.clock.elapsed(),
        best_value: value,
        trace: s.trace,
        timed_out: s.timed_out,
    };
    Ok(SearchOutcome {
        value,
        assignment: Assignment::full(values),
        stats,
        records: s.records,
    })
}
