//! Bucket elimination, mini-bucket elimination, mini-buckets with
//! max-marginal matching, and the mini-bucket join graph.
//!
//! All four share one scope-level [`plan`]: functions are placed in the
//! bucket of their earliest-eliminated variable, each bucket is split into
//! mini-buckets of at most `z + 1` variables, and every mini-bucket forwards
//! its scope (minus the bucket variable) to the bucket of the earliest
//! remaining variable. Because matching only rewrites tables and never
//! scopes, the plan computed up front is exactly the schedule every variant
//! executes, which is also what the memory gate inspects.

mod join_graph;
mod plan;

pub use join_graph::{Cluster, EdgeKind, JoinEdge, JoinGraph};
pub use plan::{partition_minibuckets, Bucket, MiniBucketPartition};

use crate::error::{usage, Result};
use crate::factor::Factor;
use crate::model::{Assignment, GraphicalModel, VarId};
use crate::ordering::EliminationOrder;
use plan::{Member, Plan};

/// Default memory budget for elimination tables: 3 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 3 << 30;

/// A λ function produced by processing one mini-bucket.
#[derive(Clone, Debug, PartialEq)]
pub struct Message {
    pub payload: Factor,
    /// Variable of the bucket that produced the message.
    pub origin: VarId,
    /// Index of the producing mini-bucket within its bucket.
    pub minibucket: usize,
    /// Bucket the message is placed in; `None` for scalar messages, which
    /// add straight into the bound.
    pub destination: Option<VarId>,
}

/// All messages of one elimination pass plus the constant contributed by
/// scalar input factors.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MessageSet {
    pub messages: Vec<Message>,
    pub constant: f64,
}

impl MessageSet {
    /// The bound the pass certifies: the constant plus every scalar message.
    pub fn root_bound(&self) -> f64 {
        self.constant
            + self
                .messages
                .iter()
                .filter(|msg| msg.destination.is_none())
                .map(|msg| msg.payload.values()[0])
                .sum::<f64>()
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactSolution {
    pub value: f64,
    pub assignment: Assignment,
    pub messages: MessageSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundResult {
    pub bound: f64,
    pub messages: MessageSet,
}

/// Functions of one bucket immediately before and after max-marginal
/// matching, handed to observers of [`Eliminator::mbe_mm_observed`].
#[derive(Debug)]
pub struct BucketMatch<'a> {
    pub var: VarId,
    pub before: &'a [Factor],
    pub after: &'a [Factor],
}

/// Balanced cost shift that gives every function the same max-marginal on
/// the variables common to all of them. The pointwise sum is unchanged.
pub fn match_max_marginals(functions: &[Factor]) -> Result<Vec<Factor>> {
    if functions.len() < 2 {
        return Ok(functions.to_vec());
    }
    let mut common: Vec<VarId> = functions[0].scope().to_vec();
    for f in &functions[1..] {
        common.retain(|v| f.contains(*v));
    }
    let gammas = functions
        .iter()
        .map(|f| f.max_marginal(&common))
        .collect::<Result<Vec<_>>>()?;
    let mut mean = gammas[0].clone();
    for g in &gammas[1..] {
        mean = mean.add(g)?;
    }
    let mean = mean.scaled(1.0 / functions.len() as f64);
    functions
        .iter()
        .zip(&gammas)
        .map(|(f, g)| f.shift(&mean.sub(g)?))
        .collect()
}

/// Runs elimination variants over one model and order under a memory budget.
#[derive(Clone, Copy, Debug)]
pub struct Eliminator<'a> {
    model: &'a GraphicalModel,
    order: &'a EliminationOrder,
    budget_bytes: u64,
}

struct Execution {
    /// Mini-bucket functions as eliminated (after matching, if any).
    functions: Vec<Factor>,
    messages: MessageSet,
}

impl<'a> Eliminator<'a> {
    pub fn new(model: &'a GraphicalModel, order: &'a EliminationOrder) -> Self {
        Eliminator {
            model,
            order,
            budget_bytes: DEFAULT_MEMORY_BUDGET,
        }
    }

    pub fn with_budget(mut self, bytes: u64) -> Self {
        self.budget_bytes = bytes;
        self
    }

    fn plan(&self, z: Option<usize>) -> Result<Plan> {
        if self.order.len() != self.model.num_vars() {
            return usage("elimination order does not match the model");
        }
        if z == Some(0) {
            return usage("z must be at least 1");
        }
        Plan::build(self.model, self.order, z, self.budget_bytes)
    }

    /// Bytes of table storage the schedule for `z` (or exact elimination
    /// for `None`) would allocate.
    pub fn estimate_bytes(&self, z: Option<usize>) -> Result<u128> {
        Ok(Plan::build(self.model, self.order, z, u64::MAX)?.bytes)
    }

    fn execute(
        &self,
        plan: &Plan,
        matching: bool,
        mut observer: Option<&mut dyn FnMut(&BucketMatch<'_>)>,
    ) -> Result<Execution> {
        let m = self.model;
        let mut lambdas: Vec<Option<Factor>> = vec![None; plan.clusters.len()];
        let mut functions = Vec::with_capacity(plan.clusters.len());
        let mut messages = MessageSet {
            messages: Vec::with_capacity(plan.clusters.len()),
            constant: plan.constant(m),
        };
        for (var, range) in plan.buckets() {
            let mut fs = Vec::with_capacity(range.len());
            for c in range.clone() {
                let mut acc: Option<Factor> = None;
                for member in &plan.clusters[c].members {
                    let f = match *member {
                        Member::Original(i) => &m.factors()[i],
                        Member::Message(from) => lambdas[from]
                            .as_ref()
                            .expect("messages are produced before they are consumed"),
                    };
                    acc = Some(match acc {
                        None => f.clone(),
                        Some(a) => a.combine(f)?,
                    });
                }
                fs.push(acc.expect("mini-buckets are never empty"));
            }
            if matching && fs.len() > 1 {
                let matched = match_max_marginals(&fs)?;
                if let Some(obs) = observer.as_mut() {
                    obs(&BucketMatch {
                        var,
                        before: &fs,
                        after: &matched,
                    });
                }
                fs = matched;
            }
            for (c, f) in range.zip(fs) {
                let lambda = f.max_eliminate(var)?;
                let destination = plan.clusters[c].parent.map(|p| plan.clusters[p].bucket);
                messages.messages.push(Message {
                    payload: lambda.clone(),
                    origin: var,
                    minibucket: plan.clusters[c].minibucket,
                    destination,
                });
                if destination.is_some() {
                    lambdas[c] = Some(lambda);
                }
                functions.push(f);
            }
        }
        Ok(Execution {
            functions,
            messages,
        })
    }

    /// Exact max-sum value and a maximizing assignment.
    pub fn exact(&self) -> Result<ExactSolution> {
        let plan = self.plan(None)?;
        let run = self.execute(&plan, false, None)?;
        let n = self.model.num_vars();
        let mut values = vec![0usize; n];
        let mut fn_of_bucket: Vec<Option<usize>> = vec![None; n];
        for (c, cl) in plan.clusters.iter().enumerate() {
            fn_of_bucket[cl.bucket] = Some(c);
        }
        for &v in self.order.as_slice().iter().rev() {
            let Some(c) = fn_of_bucket[v] else { continue };
            let f = &run.functions[c];
            let mut best = (f64::NEG_INFINITY, 0);
            for x in 0..self.model.card(v) {
                values[v] = x;
                let val = f.value_in(&values);
                if val > best.0 {
                    best = (val, x);
                }
            }
            values[v] = best.1;
        }
        Ok(ExactSolution {
            value: run.messages.root_bound(),
            assignment: Assignment::full(values),
            messages: run.messages,
        })
    }

    /// Plain mini-bucket elimination with bound `z`.
    pub fn mini_bucket(&self, z: usize) -> Result<BoundResult> {
        let plan = self.plan(Some(z))?;
        let run = self.execute(&plan, false, None)?;
        Ok(BoundResult {
            bound: run.messages.root_bound(),
            messages: run.messages,
        })
    }

    /// Mini-bucket elimination with one max-marginal matching step per
    /// bucket before its variable is eliminated.
    pub fn mbe_mm(&self, z: usize) -> Result<BoundResult> {
        self.run_mbe_mm(z, None)
    }

    /// [`Eliminator::mbe_mm`], reporting every bucket match to `observer`.
    pub fn mbe_mm_observed(
        &self,
        z: usize,
        observer: &mut dyn FnMut(&BucketMatch<'_>),
    ) -> Result<BoundResult> {
        self.run_mbe_mm(z, Some(observer))
    }

    fn run_mbe_mm(
        &self,
        z: usize,
        observer: Option<&mut dyn FnMut(&BucketMatch<'_>)>,
    ) -> Result<BoundResult> {
        let plan = self.plan(Some(z))?;
        let run = self.execute(&plan, true, observer)?;
        Ok(BoundResult {
            bound: run.messages.root_bound(),
            messages: run.messages,
        })
    }

    /// Mini-bucket join graph for bound `z`, one cluster per mini-bucket.
    pub fn join_graph(&self, z: usize) -> Result<JoinGraph> {
        let plan = self.plan(Some(z))?;
        JoinGraph::from_plan(self.model, self.order, &plan)
    }
}

pub fn bucket_elimination(m: &GraphicalModel, o: &EliminationOrder) -> Result<ExactSolution> {
    Eliminator::new(m, o).exact()
}

pub fn mini_bucket_elim(m: &GraphicalModel, o: &EliminationOrder, z: usize) -> Result<BoundResult> {
    Eliminator::new(m, o).mini_bucket(z)
}

pub fn mbe_mm(m: &GraphicalModel, o: &EliminationOrder, z: usize) -> Result<BoundResult> {
    Eliminator::new(m, o).mbe_mm(z)
}

pub fn join_graph_structuring(
    m: &GraphicalModel,
    o: &EliminationOrder,
    z: usize,
) -> Result<JoinGraph> {
    Eliminator::new(m, o).join_graph(z)
}
