use std::collections::BTreeSet;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::model::{GraphicalModel, VarId};
use crate::ordering::EliminationOrder;

/// The functions waiting in one variable's bucket.
#[derive(Clone, Debug, PartialEq)]
pub struct Bucket {
    pub var: VarId,
    pub residents: Vec<Factor>,
}

/// Mini-buckets of a bucket, as indices into its residents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MiniBucketPartition {
    pub groups: Vec<Vec<usize>>,
    /// Union scope of each group.
    pub scopes: Vec<Vec<VarId>>,
}

impl MiniBucketPartition {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// Greedy first-fit: residents sorted by decreasing arity, then
/// lexicographic scope, each joining the first mini-bucket that stays within
/// `z + 1` variables.
pub fn partition_minibuckets(b: &Bucket, z: usize) -> Result<MiniBucketPartition> {
    let scopes: Vec<&[VarId]> = b.residents.iter().map(Factor::scope).collect();
    partition_scopes(&scopes, Some(z))
}

/// `z = None` puts everything in one mini-bucket (exact elimination).
pub(crate) fn partition_scopes(
    scopes: &[&[VarId]],
    z: Option<usize>,
) -> Result<MiniBucketPartition> {
    let mut idx: Vec<usize> = (0..scopes.len()).collect();
    idx.sort_by(|&a, &b| {
        scopes[b]
            .len()
            .cmp(&scopes[a].len())
            .then_with(|| scopes[a].cmp(scopes[b]))
    });
    let limit = z.map(|z| z + 1).unwrap_or(usize::MAX);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut unions: Vec<BTreeSet<VarId>> = Vec::new();
    for i in idx {
        let s = scopes[i];
        if s.len() > limit {
            return Err(Error::InfeasibleZ {
                z: z.unwrap_or(0),
                msg: format!("a function over {s:?} has more than z + 1 variables"),
            });
        }
        let slot = unions
            .iter()
            .position(|u| u.len() + s.iter().filter(|v| !u.contains(v)).count() <= limit);
        match slot {
            Some(k) => {
                groups[k].push(i);
                unions[k].extend(s.iter().copied());
            }
            None => {
                groups.push(vec![i]);
                unions.push(s.iter().copied().collect());
            }
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    Ok(MiniBucketPartition {
        groups,
        scopes: unions
            .into_iter()
            .map(|u| u.into_iter().collect())
            .collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Member {
    Original(usize),
    /// The λ (or scope stand-in) produced by another planned cluster.
    Message(usize),
}

#[derive(Clone, Debug)]
pub(crate) struct PlannedCluster {
    pub bucket: VarId,
    pub minibucket: usize,
    pub scope: Vec<VarId>,
    pub members: Vec<Member>,
    /// Cluster that receives this cluster's message.
    pub parent: Option<usize>,
}

/// Scope-level schedule of a (mini-)bucket elimination pass.
#[derive(Clone, Debug)]
pub(crate) struct Plan {
    pub clusters: Vec<PlannedCluster>,
    /// `(bucket variable, cluster range)` in elimination order; buckets
    /// without functions are skipped.
    buckets: Vec<(VarId, Range<usize>)>,
    /// Input factors with an empty scope.
    scalars: Vec<usize>,
    pub bytes: u128,
}

impl Plan {
    pub fn build(
        m: &GraphicalModel,
        o: &EliminationOrder,
        z: Option<usize>,
        budget_bytes: u64,
    ) -> Result<Plan> {
        let n = m.num_vars();
        let mut pending: Vec<Vec<(Member, Vec<VarId>)>> = vec![Vec::new(); n];
        let mut scalars = Vec::new();
        for (i, f) in m.factors().iter().enumerate() {
            match o.bucket_of(f.scope()) {
                Some(b) => pending[b].push((Member::Original(i), f.scope().to_vec())),
                None => scalars.push(i),
            }
        }
        let mut clusters: Vec<PlannedCluster> = Vec::new();
        let mut buckets = Vec::new();
        let mut bytes: u128 = 0;
        for &var in o.as_slice() {
            let residents = std::mem::take(&mut pending[var]);
            if residents.is_empty() {
                continue;
            }
            let scopes: Vec<&[VarId]> = residents.iter().map(|r| r.1.as_slice()).collect();
            let part = partition_scopes(&scopes, z)?;
            let start = clusters.len();
            for (k, (group, scope)) in part.groups.iter().zip(part.scopes).enumerate() {
                let id = clusters.len();
                let members: Vec<Member> = group.iter().map(|&i| residents[i].0).collect();
                for member in &members {
                    if let Member::Message(from) = *member {
                        clusters[from].parent = Some(id);
                    }
                }
                let entries = scope
                    .iter()
                    .try_fold(1u128, |acc, &v| acc.checked_mul(m.card(v) as u128))
                    .unwrap_or(u128::MAX);
                bytes = bytes.saturating_add(entries.saturating_mul(8));
                if bytes > budget_bytes as u128 {
                    return Err(Error::Capacity(format!(
                        "bucket of variable {var} needs a table over {scope:?}; \
                         estimated {bytes} bytes exceeds the budget of {budget_bytes}"
                    )));
                }
                let forward: Vec<VarId> = scope.iter().copied().filter(|&v| v != var).collect();
                if let Some(dest) = o.bucket_of(&forward) {
                    pending[dest].push((Member::Message(id), forward));
                }
                clusters.push(PlannedCluster {
                    bucket: var,
                    minibucket: k,
                    scope,
                    members,
                    parent: None,
                });
            }
            buckets.push((var, start..clusters.len()));
        }
        Ok(Plan {
            clusters,
            buckets,
            scalars,
            bytes,
        })
    }

    pub fn buckets(&self) -> impl Iterator<Item = (VarId, Range<usize>)> + '_ {
        self.buckets.iter().cloned()
    }

    pub fn constant(&self, m: &GraphicalModel) -> f64 {
        self.scalars
            .iter()
            .map(|&i| m.factors()[i].values()[0])
            .sum()
    }
}
