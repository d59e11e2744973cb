use std::fmt;
use std::str::FromStr;

use crate::elimination::{Eliminator, MessageSet, DEFAULT_MEMORY_BUDGET};
use crate::error::{usage, Error, Result};
use crate::factor::Factor;
use crate::lp::{fglp, jglp, LpRun, StopRule};
use crate::model::{Assignment, GraphicalModel, VarId};
use crate::ordering::{build_pseudo_tree, EliminationOrder, PseudoTree};

/// Pipeline producing the messages behind a heuristic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Mbe,
    MbeMm,
    FglpMbe,
    Jglp,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Mbe, Scheme::MbeMm, Scheme::FglpMbe, Scheme::Jglp];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Mbe => "mbe",
            Scheme::MbeMm => "mbe-mm",
            Scheme::FglpMbe => "fglp+mbe",
            Scheme::Jglp => "jglp",
        }
    }

    pub fn is_iterative(self) -> bool {
        matches!(self, Scheme::FglpMbe | Scheme::Jglp)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown heuristic scheme {s:?}")))
    }
}

/// Static mini-bucket heuristic.
///
/// Search runs on the working functions the messages were computed from:
/// the input factors for `mbe` and `mbe-mm`, the shifted factors for
/// `fglp+mbe`, and the tightened cluster functions for `jglp`. All of them
/// sum to the input model.
#[derive(Clone, Debug)]
pub struct HeuristicTable {
    scheme: Scheme,
    order: EliminationOrder,
    tree: PseudoTree,
    working: GraphicalModel,
    constant: f64,
    /// Working functions assigned to each variable's bucket.
    bucket_fns: Vec<Vec<usize>>,
    messages: MessageSet,
    /// Indices into `messages` making up H(X_j).
    h_msgs: Vec<Vec<usize>>,
    lp: Option<LpRun>,
}

impl HeuristicTable {
    pub fn new(
        scheme: Scheme,
        order: EliminationOrder,
        tree: PseudoTree,
        working: GraphicalModel,
        messages: MessageSet,
        lp: Option<LpRun>,
    ) -> Result<Self> {
        let n = working.num_vars();
        if order.len() != n || tree.num_vars() != n {
            return usage("order, pseudo tree and model sizes differ");
        }
        let mut bucket_fns = vec![Vec::new(); n];
        let mut constant = 0.0;
        for (i, f) in working.factors().iter().enumerate() {
            match order.bucket_of(f.scope()) {
                Some(b) => bucket_fns[b].push(i),
                None => constant += f.values()[0],
            }
        }
        let mut h_msgs = vec![Vec::new(); n];
        for (k, msg) in messages.messages.iter().enumerate() {
            let mut at = Some(msg.origin);
            while let Some(a) = at {
                if Some(a) == msg.destination {
                    break;
                }
                h_msgs[a].push(k);
                at = tree.parent(a);
            }
            if at.is_none() && msg.destination.is_some() {
                return Err(Error::Inconsistent(format!(
                    "message from bucket {} to bucket {:?} does not follow the pseudo tree",
                    msg.origin, msg.destination
                )));
            }
        }
        Ok(HeuristicTable {
            scheme,
            order,
            tree,
            working,
            constant,
            bucket_fns,
            messages,
            h_msgs,
            lp,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn order(&self) -> &EliminationOrder {
        &self.order
    }

    pub fn pseudo_tree(&self) -> &PseudoTree {
        &self.tree
    }

    pub fn working_model(&self) -> &GraphicalModel {
        &self.working
    }

    pub fn messages(&self) -> &MessageSet {
        &self.messages
    }

    /// The iterative phase, for `fglp+mbe` and `jglp`.
    pub fn lp_run(&self) -> Option<&LpRun> {
        self.lp.as_ref()
    }

    /// Scalar working functions.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn bucket_functions(&self, v: VarId) -> impl Iterator<Item = &Factor> {
        self.bucket_fns[v]
            .iter()
            .map(|&i| &self.working.factors()[i])
    }

    pub fn h_messages(&self, v: VarId) -> impl Iterator<Item = &Factor> {
        self.h_msgs[v]
            .iter()
            .map(|&k| &self.messages.messages[k].payload)
    }

    /// Bound on the whole problem: the constant plus H of every root.
    pub fn root_bound(&self) -> f64 {
        let empty = vec![0; self.working.num_vars()];
        self.constant
            + self
                .tree
                .roots()
                .iter()
                .map(|&r| self.h_in(r, &empty))
                .sum::<f64>()
    }

    /// Upper bound on the best completion below `v` given `x`, which must
    /// assign `v` and all its ancestors.
    pub fn heuristic(&self, v: VarId, x: &Assignment) -> Result<f64> {
        let values = self.context_values(v, x)?;
        Ok(self.h_in(v, &values))
    }

    /// Sum of the working functions in `v`'s bucket under `x`, which must
    /// assign `v` and all its ancestors.
    pub fn bucket_cost(&self, v: VarId, x: &Assignment) -> Result<f64> {
        let values = self.context_values(v, x)?;
        Ok(self.g_in(v, &values))
    }

    fn context_values(&self, v: VarId, x: &Assignment) -> Result<Vec<usize>> {
        if v >= self.working.num_vars() || x.len() != self.working.num_vars() {
            return usage(format!("variable {v} or assignment size out of range"));
        }
        let mut values = vec![0; x.len()];
        for u in std::iter::once(v).chain(self.tree.ancestors(v)) {
            match x.get(u) {
                Some(val) => values[u] = val,
                None => return usage(format!("variable {u} on the path to {v} is unassigned")),
            }
        }
        Ok(values)
    }

    pub(crate) fn h_in(&self, v: VarId, values: &[usize]) -> f64 {
        self.h_msgs[v]
            .iter()
            .map(|&k| self.messages.messages[k].payload.value_in(values))
            .sum()
    }

    pub(crate) fn g_in(&self, v: VarId, values: &[usize]) -> f64 {
        self.bucket_fns[v]
            .iter()
            .map(|&i| self.working.factors()[i].value_in(values))
            .sum()
    }
}

/// Runs `scheme` with the default memory budget.
pub fn build_heuristic(
    m: &GraphicalModel,
    order: &EliminationOrder,
    z: usize,
    scheme: Scheme,
    stop: &StopRule,
) -> Result<HeuristicTable> {
    build_heuristic_with_budget(m, order, z, scheme, stop, DEFAULT_MEMORY_BUDGET)
}

pub fn build_heuristic_with_budget(
    m: &GraphicalModel,
    order: &EliminationOrder,
    z: usize,
    scheme: Scheme,
    stop: &StopRule,
    budget_bytes: u64,
) -> Result<HeuristicTable> {
    let tree = build_pseudo_tree(m, order);
    let elim = |model| Eliminator::new(model, order).with_budget(budget_bytes);
    let (working, messages, lp) = match scheme {
        Scheme::Mbe => (m.clone(), elim(m).mini_bucket(z)?.messages, None),
        Scheme::MbeMm => (m.clone(), elim(m).mbe_mm(z)?.messages, None),
        Scheme::FglpMbe => {
            let r = fglp(m, stop)?;
            let messages = elim(&r.model).mini_bucket(z)?.messages;
            (r.model, messages, Some(r.run))
        }
        Scheme::Jglp => {
            let jg = elim(m).join_graph(z)?;
            let r = jglp(jg, stop)?;
            let (_, messages) = r.graph.tree_pass()?;
            (r.graph.to_model()?, messages, Some(r.run))
        }
    };
    HeuristicTable::new(scheme, order.clone(), tree, working, messages, lp)
}
