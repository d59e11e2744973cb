//! Elimination orders, induced width and pseudo-trees.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{usage, Error, Result};
use crate::model::{GraphicalModel, VarId};

pub const DEFAULT_SEED: u64 = 42;

/// Undirected interaction graph of a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimalGraph {
    adj: Vec<BTreeSet<VarId>>,
}

impl PrimalGraph {
    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: VarId) -> &BTreeSet<VarId> {
        &self.adj[v]
    }

    pub fn has_edge(&self, a: VarId, b: VarId) -> bool {
        self.adj[a].contains(&b)
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(VarId, VarId)> {
        let mut out = Vec::new();
        for (a, ns) in self.adj.iter().enumerate() {
            out.extend(ns.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }
}

pub fn primal_graph(m: &GraphicalModel) -> PrimalGraph {
    let mut adj = vec![BTreeSet::new(); m.num_vars()];
    for f in m.factors() {
        let s = f.scope();
        for (i, &a) in s.iter().enumerate() {
            for &b in &s[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
    }
    PrimalGraph { adj }
}

/// A permutation of the variables; position 0 is eliminated first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationOrder {
    order: Vec<VarId>,
    position: Vec<usize>,
    width: usize,
}

impl EliminationOrder {
    /// Validates `order` against the model and records its induced width.
    pub fn new(m: &GraphicalModel, order: Vec<VarId>) -> Result<Self> {
        let width = induced_width(m, &order)?;
        let mut position = vec![0; order.len()];
        for (p, &v) in order.iter().enumerate() {
            position[v] = p;
        }
        Ok(EliminationOrder {
            order,
            position,
            width,
        })
    }

    /// Reads a whitespace-separated id list.
    pub fn parse(m: &GraphicalModel, text: &str) -> Result<Self> {
        let mut order = Vec::new();
        for (i, line) in text.lines().enumerate() {
            for tok in line.split_whitespace() {
                let v = tok.parse().map_err(|_| Error::Parse {
                    line: i + 1,
                    msg: format!("expected a variable id, found `{tok}`"),
                })?;
                order.push(v);
            }
        }
        Self::new(m, order)
    }

    pub fn as_slice(&self) -> &[VarId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Elimination position of `v`.
    pub fn position(&self, v: VarId) -> usize {
        self.position[v]
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// The earliest-eliminated variable of a scope, i.e. the bucket a
    /// function over that scope belongs to.
    pub fn bucket_of(&self, scope: &[VarId]) -> Option<VarId> {
        scope.iter().copied().min_by_key(|&v| self.position[v])
    }
}

impl fmt::Display for EliminationOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.order.iter().map(|v| v.to_string()).collect();
        f.write_str(&ids.join(" "))
    }
}

fn is_permutation(order: &[VarId], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// Largest number of later neighbors any vertex has when eliminated along
/// `order` on the primal graph.
pub fn induced_width(m: &GraphicalModel, order: &[VarId]) -> Result<usize> {
    if !is_permutation(order, m.num_vars()) {
        return usage("elimination order is not a permutation of the model's variables");
    }
    let mut adj = primal_graph(m).adj;
    let mut width = 0;
    for &v in order {
        let ns: Vec<VarId> = adj[v].iter().copied().collect();
        width = width.max(ns.len());
        eliminate_vertex(&mut adj, v, &ns);
    }
    Ok(width)
}

fn eliminate_vertex(adj: &mut [BTreeSet<VarId>], v: VarId, ns: &[VarId]) {
    for (i, &a) in ns.iter().enumerate() {
        adj[a].remove(&v);
        for &b in &ns[i + 1..] {
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }
    adj[v].clear();
}

fn fill_in(adj: &[BTreeSet<VarId>], v: VarId) -> usize {
    let ns: Vec<VarId> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in ns.iter().enumerate() {
        for &b in &ns[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Greedy min-fill ordering; ties are broken uniformly by a seeded RNG.
pub fn min_fill_order(m: &GraphicalModel, seed: u64) -> EliminationOrder {
    let n = m.num_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = primal_graph(m).adj;
    let mut alive = vec![true; n];
    let mut fill: Vec<usize> = (0..n).map(|v| fill_in(&adj, v)).collect();
    let mut order = Vec::with_capacity(n);
    let mut width = 0;
    let mut candidates = Vec::new();
    for _ in 0..n {
        let best = (0..n).filter(|&v| alive[v]).map(|v| fill[v]).min().unwrap();
        candidates.clear();
        candidates.extend((0..n).filter(|&v| alive[v] && fill[v] == best));
        let v = candidates[rng.gen_range(0..candidates.len())];
        let ns: Vec<VarId> = adj[v].iter().copied().collect();
        width = width.max(ns.len());
        eliminate_vertex(&mut adj, v, &ns);
        alive[v] = false;
        order.push(v);

        let mut touched: BTreeSet<VarId> = ns.iter().copied().collect();
        for &a in &ns {
            touched.extend(adj[a].iter().copied());
        }
        for u in touched {
            fill[u] = fill_in(&adj, u);
        }
    }
    let mut position = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        position[v] = p;
    }
    EliminationOrder {
        order,
        position,
        width,
    }
}

/// Runs min-fill with seeds `seed..seed + restarts` and keeps the narrowest
/// order, preferring the earliest seed on ties.
pub fn min_fill_restarts(m: &GraphicalModel, seed: u64, restarts: usize) -> EliminationOrder {
    (0..restarts.max(1) as u64)
        .map(|k| min_fill_order(m, seed.wrapping_add(k)))
        .min_by_key(EliminationOrder::width)
        .unwrap()
}

/// Rooted forest over the variables compatible with an elimination order.
///
/// Each component root is a child of an implicit super-root, so disconnected
/// components become independent AND branches during search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoTree {
    parent: Vec<Option<VarId>>,
    children: Vec<Vec<VarId>>,
    roots: Vec<VarId>,
    depth: Vec<usize>,
}

impl PseudoTree {
    pub fn num_vars(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: VarId) -> Option<VarId> {
        self.parent[v]
    }

    pub fn children(&self, v: VarId) -> &[VarId] {
        &self.children[v]
    }

    /// Children of the implicit super-root.
    pub fn roots(&self) -> &[VarId] {
        &self.roots
    }

    pub fn depth(&self, v: VarId) -> usize {
        self.depth[v]
    }

    /// Strict ancestors of `v`, nearest first.
    pub fn ancestors(&self, v: VarId) -> impl Iterator<Item = VarId> + '_ {
        std::iter::successors(self.parent[v], move |&u| self.parent[u])
    }

    pub fn is_ancestor_or_self(&self, a: VarId, v: VarId) -> bool {
        a == v || self.ancestors(v).any(|u| u == a)
    }

    /// `v` and all its descendants, preorder.
    pub fn subtree(&self, v: VarId) -> Vec<VarId> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.children[u].iter().rev());
        }
        out
    }

    /// True when every factor scope lies on one root-to-leaf path.
    pub fn is_valid_for(&self, m: &GraphicalModel) -> bool {
        m.factors().iter().all(|f| {
            let s = f.scope();
            let Some(&deepest) = s.iter().max_by_key(|&&v| self.depth[v]) else {
                return true;
            };
            s.iter().all(|&v| self.is_ancestor_or_self(v, deepest))
        })
    }
}

/// Parents each variable with the earliest-eliminated of its later
/// neighbors in the induced graph.
pub fn build_pseudo_tree(m: &GraphicalModel, o: &EliminationOrder) -> PseudoTree {
    let n = m.num_vars();
    let mut adj = primal_graph(m).adj;
    let mut parent = vec![None; n];
    for &v in o.as_slice() {
        let ns: Vec<VarId> = adj[v].iter().copied().collect();
        parent[v] = ns.iter().copied().min_by_key(|&u| o.position(u));
        eliminate_vertex(&mut adj, v, &ns);
    }
    let mut children = vec![Vec::new(); n];
    let mut roots = Vec::new();
    for (v, p) in parent.iter().enumerate() {
        match *p {
            Some(p) => children[p].push(v),
            None => roots.push(v),
        }
    }
    let mut depth = vec![0; n];
    // parents are eliminated later, so walk the order backwards
    for &v in o.as_slice().iter().rev() {
        if let Some(p) = parent[v] {
            depth[v] = depth[p] + 1;
        }
    }
    PseudoTree {
        parent,
        children,
        roots,
        depth,
    }
}
