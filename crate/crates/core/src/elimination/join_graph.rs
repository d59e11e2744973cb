use std::collections::BTreeSet;

use super::plan::{Member, Plan};
use super::{Message, MessageSet};
use crate::error::Result;
use crate::factor::Factor;
use crate::model::{GraphicalModel, VarId};
use crate::ordering::EliminationOrder;

/// One mini-bucket of the join graph. `function` is the sum of the input
/// factors assigned to the mini-bucket (zero if it only holds messages).
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub scope: Vec<VarId>,
    pub function: Factor,
    pub bucket: VarId,
    pub minibucket: usize,
    /// Cluster that receives this cluster's mini-bucket message.
    pub parent: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeKind {
    /// Child mini-bucket to the mini-bucket holding its message.
    Parent,
    /// Consecutive mini-buckets of the same bucket.
    Chain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinEdge {
    pub a: usize,
    pub b: usize,
    pub separator: Vec<VarId>,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JoinGraph {
    pub clusters: Vec<Cluster>,
    /// Sorted by the bucket position of `a`, then its mini-bucket index,
    /// parent arcs before chain arcs.
    pub edges: Vec<JoinEdge>,
    /// Sum of scalar input factors.
    pub constant: f64,
    cards: Vec<usize>,
    order: EliminationOrder,
}

fn intersect(a: &[VarId], b: &[VarId]) -> Vec<VarId> {
    a.iter()
        .copied()
        .filter(|v| b.binary_search(v).is_ok())
        .collect()
}

impl JoinGraph {
    pub(crate) fn from_plan(
        m: &GraphicalModel,
        o: &EliminationOrder,
        plan: &Plan,
    ) -> Result<JoinGraph> {
        let mut clusters = Vec::with_capacity(plan.clusters.len());
        for pc in &plan.clusters {
            let cards = pc.scope.iter().map(|&v| m.card(v)).collect();
            let mut function = Factor::zeros(pc.scope.clone(), cards)?;
            for member in &pc.members {
                if let Member::Original(i) = *member {
                    function = function.combine(&m.factors()[i])?;
                }
            }
            clusters.push(Cluster {
                scope: pc.scope.clone(),
                function,
                bucket: pc.bucket,
                minibucket: pc.minibucket,
                parent: pc.parent,
            });
        }
        let mut edges = Vec::new();
        for (c, cl) in clusters.iter().enumerate() {
            if let Some(p) = cl.parent {
                edges.push(JoinEdge {
                    a: c,
                    b: p,
                    separator: intersect(&cl.scope, &clusters[p].scope),
                    kind: EdgeKind::Parent,
                });
            }
        }
        for (_, range) in plan.buckets() {
            for c in range.start..range.end.saturating_sub(1) {
                edges.push(JoinEdge {
                    a: c,
                    b: c + 1,
                    separator: intersect(&clusters[c].scope, &clusters[c + 1].scope),
                    kind: EdgeKind::Chain,
                });
            }
        }
        edges.sort_by_key(|e| {
            let a = &clusters[e.a];
            (o.position(a.bucket), a.minibucket, e.kind)
        });
        Ok(JoinGraph {
            clusters,
            edges,
            constant: plan.constant(m),
            cards: m.cards().to_vec(),
            order: o.clone(),
        })
    }

    pub fn order(&self) -> &EliminationOrder {
        &self.order
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn functions(&self) -> impl Iterator<Item = &Factor> {
        self.clusters.iter().map(|c| &c.function)
    }

    /// Sum of cluster maxima plus the constant.
    pub fn decomposition_bound(&self) -> f64 {
        self.constant + self.functions().map(Factor::max_value).sum::<f64>()
    }

    /// Sum of all cluster functions at a dense full assignment.
    pub fn value_in(&self, values: &[usize]) -> f64 {
        self.constant + self.functions().map(|f| f.value_in(values)).sum::<f64>()
    }

    /// Cluster functions (and the constant, as a scalar factor) as a model
    /// over the original variables.
    pub fn to_model(&self) -> Result<GraphicalModel> {
        let mut fs: Vec<Factor> = self.functions().cloned().collect();
        if self.constant != 0.0 {
            fs.push(Factor::scalar(self.constant));
        }
        GraphicalModel::new(self.cards.clone(), fs)
    }

    /// Runs the mini-bucket dynamic program over the parent arcs only, on
    /// the current cluster functions. Returns the bound and the messages,
    /// tagged with origin and destination buckets like an elimination pass.
    pub fn tree_pass(&self) -> Result<(f64, MessageSet)> {
        let mut incoming: Vec<Option<Factor>> = vec![None; self.clusters.len()];
        let mut messages = MessageSet {
            messages: Vec::with_capacity(self.clusters.len()),
            constant: self.constant,
        };
        // clusters are stored in elimination order, so children come first
        for (c, cl) in self.clusters.iter().enumerate() {
            let f = match incoming[c].take() {
                Some(inc) => cl.function.combine(&inc)?,
                None => cl.function.clone(),
            };
            let lambda = f.max_eliminate(cl.bucket)?;
            let destination = cl.parent.map(|p| self.clusters[p].bucket);
            if let Some(p) = cl.parent {
                incoming[p] = Some(match incoming[p].take() {
                    Some(acc) => acc.combine(&lambda)?,
                    None => lambda.clone(),
                });
            }
            messages.messages.push(Message {
                payload: lambda,
                origin: cl.bucket,
                minibucket: cl.minibucket,
                destination,
            });
        }
        Ok((messages.root_bound(), messages))
    }

    /// Every variable's clusters form a connected subgraph through edges
    /// whose separators contain it.
    pub fn has_running_intersection(&self) -> bool {
        for v in 0..self.cards.len() {
            let holders: Vec<usize> = (0..self.clusters.len())
                .filter(|&c| self.clusters[c].scope.binary_search(&v).is_ok())
                .collect();
            let Some(&start) = holders.first() else {
                continue;
            };
            let mut seen = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(c) = stack.pop() {
                for e in &self.edges {
                    if e.separator.binary_search(&v).is_err() {
                        continue;
                    }
                    let other = if e.a == c {
                        e.b
                    } else if e.b == c {
                        e.a
                    } else {
                        continue;
                    };
                    if seen.insert(other) {
                        stack.push(other);
                    }
                }
            }
            if seen.len() != holders.len() {
                return false;
            }
        }
        true
    }
}
