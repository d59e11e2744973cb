//! Dense log-space factor tables and the max-sum factor algebra.
//!
//! A [`Factor`] stores one value per joint configuration of its scope. The
//! scope is kept sorted by variable id and the table is laid out row-major
//! with the last scope variable varying fastest, so two factors over the same
//! scope always share a layout.

use crate::error::{usage, Error, Result};
use crate::model::{Assignment, VarId};

/// Stand-in for `ln 0`. Arithmetic on the floor stays finite, so
/// `LOG_FLOOR - LOG_FLOOR == 0` and cost shifts never produce NaN.
pub const LOG_FLOOR: f64 = -1e30;

#[inline]
pub(crate) fn clamp(v: f64) -> f64 {
    if v < LOG_FLOOR || v.is_nan() {
        LOG_FLOOR
    } else {
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    scope: Vec<VarId>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

/// Visits every configuration of `cards` (last digit fastest) while tracking
/// one linear offset per stride vector.
pub(crate) fn walk<const K: usize>(
    cards: &[usize],
    strides: [&[usize]; K],
    mut visit: impl FnMut([usize; K]),
) {
    let total: usize = cards.iter().product();
    let mut digits = vec![0usize; cards.len()];
    let mut offs = [0usize; K];
    for _ in 0..total {
        visit(offs);
        let mut d = cards.len();
        while d > 0 {
            d -= 1;
            digits[d] += 1;
            for k in 0..K {
                offs[k] += strides[k][d];
            }
            if digits[d] < cards[d] {
                break;
            }
            for k in 0..K {
                offs[k] -= strides[k][d] * cards[d];
            }
            digits[d] = 0;
        }
    }
}

fn own_strides(cards: &[usize]) -> Vec<usize> {
    let mut strides = vec![0; cards.len()];
    let mut acc = 1;
    for i in (0..cards.len()).rev() {
        strides[i] = acc;
        acc *= cards[i];
    }
    strides
}

impl Factor {
    /// Builds a factor over a strictly increasing scope.
    pub fn new(scope: Vec<VarId>, cards: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if scope.len() != cards.len() {
            return usage("scope and cardinality lists differ in length");
        }
        if scope.windows(2).any(|w| w[0] >= w[1]) {
            return usage(format!("scope {scope:?} is not strictly increasing"));
        }
        if cards.contains(&0) {
            return usage("cardinalities must be at least 1");
        }
        let size = table_size(&cards)
            .ok_or_else(|| Error::Capacity(format!("table over {scope:?} overflows")))?;
        if size != values.len() {
            return usage(format!(
                "table has {} entries, scope {scope:?} needs {size}",
                values.len()
            ));
        }
        let values = values.into_iter().map(clamp).collect();
        Ok(Factor {
            scope,
            cards,
            values,
        })
    }

    /// Builds a factor from a table whose scope is given in arbitrary order
    /// (last listed variable fastest), re-laying it out in sorted order.
    pub fn from_table(scope: &[VarId], cards: &[usize], values: Vec<f64>) -> Result<Self> {
        if scope.len() != cards.len() {
            return usage("scope and cardinality lists differ in length");
        }
        let mut perm: Vec<usize> = (0..scope.len()).collect();
        perm.sort_by_key(|&i| scope[i]);
        if perm.windows(2).any(|w| scope[w[0]] == scope[w[1]]) {
            return usage(format!("scope {scope:?} repeats a variable"));
        }
        let expected = table_size(cards).unwrap_or(usize::MAX);
        if expected != values.len() {
            return usage(format!(
                "table has {} entries, scope {scope:?} needs {expected}",
                values.len()
            ));
        }
        let src_strides = own_strides(cards);
        let sorted_scope: Vec<VarId> = perm.iter().map(|&i| scope[i]).collect();
        let sorted_cards: Vec<usize> = perm.iter().map(|&i| cards[i]).collect();
        let mapped: Vec<usize> = perm.iter().map(|&i| src_strides[i]).collect();
        let mut out = Vec::with_capacity(values.len());
        walk(&sorted_cards, [&mapped], |[src]| out.push(values[src]));
        Factor::new(sorted_scope, sorted_cards, out)
    }

    /// A scalar (empty-scope) factor.
    pub fn scalar(value: f64) -> Self {
        Factor {
            scope: Vec::new(),
            cards: Vec::new(),
            values: vec![clamp(value)],
        }
    }

    pub fn zeros(scope: Vec<VarId>, cards: Vec<usize>) -> Result<Self> {
        let size = table_size(&cards).unwrap_or(usize::MAX);
        Factor::new(scope, cards, vec![0.0; size])
    }

    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn arity(&self) -> usize {
        self.scope.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_scalar(&self) -> bool {
        self.scope.is_empty()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.scope.binary_search(&v).is_ok()
    }

    pub fn card_of(&self, v: VarId) -> Option<usize> {
        self.scope.binary_search(&v).ok().map(|i| self.cards[i])
    }

    /// Largest table entry.
    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Strides of this table expressed over `target` (zero for variables the
    /// factor does not mention).
    fn strides_over(&self, target: &[VarId]) -> Vec<usize> {
        let own = own_strides(&self.cards);
        target
            .iter()
            .map(|v| match self.scope.binary_search(v) {
                Ok(i) => own[i],
                Err(_) => 0,
            })
            .collect()
    }

    /// Sum of two factors over the union of their scopes.
    pub fn combine(&self, other: &Factor) -> Result<Factor> {
        let (scope, cards) = union_scope(self, other)?;
        let sa = self.strides_over(&scope);
        let sb = other.strides_over(&scope);
        let mut values = Vec::with_capacity(table_size(&cards).unwrap_or(0));
        walk(&cards, [&sa, &sb], |[a, b]| {
            values.push(clamp(self.values[a] + other.values[b]));
        });
        Ok(Factor {
            scope,
            cards,
            values,
        })
    }

    /// Maximizes `v` out of the factor.
    pub fn max_eliminate(&self, v: VarId) -> Result<Factor> {
        if !self.contains(v) {
            return usage(format!("variable {v} is not in scope {:?}", self.scope));
        }
        let keep: Vec<VarId> = self.scope.iter().copied().filter(|&u| u != v).collect();
        Ok(self.project_max(&keep))
    }

    /// Max-projection onto `keep`, which must be a subset of the scope.
    pub fn max_marginal(&self, keep: &[VarId]) -> Result<Factor> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(v) = keep.iter().find(|v| !self.contains(**v)) {
            return usage(format!(
                "max-marginal variable {v} is not in scope {:?}",
                self.scope
            ));
        }
        Ok(self.project_max(&keep))
    }

    fn project_max(&self, keep: &[VarId]) -> Factor {
        let cards: Vec<usize> = keep.iter().map(|&v| self.card_of(v).unwrap()).collect();
        let out_strides_own = own_strides(&cards);
        let out_strides: Vec<usize> = self
            .scope
            .iter()
            .map(|v| match keep.binary_search(v) {
                Ok(i) => out_strides_own[i],
                Err(_) => 0,
            })
            .collect();
        let mut out = vec![f64::NEG_INFINITY; table_size(&cards).unwrap_or(0)];
        let mut i = 0;
        walk(&self.cards, [&out_strides], |[o]| {
            let v = self.values[i];
            if v > out[o] {
                out[o] = v;
            }
            i += 1;
        });
        Factor {
            scope: keep.to_vec(),
            cards,
            values: out,
        }
    }

    /// Adds `delta` (whose scope must be contained in this factor's scope)
    /// broadcast over the full table.
    pub fn shift(&self, delta: &Factor) -> Result<Factor> {
        if let Some(v) = delta.scope.iter().find(|v| !self.contains(**v)) {
            return usage(format!(
                "shift variable {v} is not in scope {:?}",
                self.scope
            ));
        }
        self.combine(delta)
    }

    /// Pointwise `self - other` over an identical scope.
    pub fn sub(&self, other: &Factor) -> Result<Factor> {
        self.zip_same(other, |a, b| a - b)
    }

    /// Pointwise `self + other` over an identical scope.
    pub fn add(&self, other: &Factor) -> Result<Factor> {
        self.zip_same(other, |a, b| a + b)
    }

    fn zip_same(&self, other: &Factor, op: impl Fn(f64, f64) -> f64) -> Result<Factor> {
        if self.scope != other.scope || self.cards != other.cards {
            return usage(format!(
                "scopes {:?} and {:?} differ",
                self.scope, other.scope
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| clamp(op(a, b)))
            .collect();
        Ok(Factor {
            scope: self.scope.clone(),
            cards: self.cards.clone(),
            values,
        })
    }

    /// Multiplies every entry by `c`.
    pub fn scaled(&self, c: f64) -> Factor {
        Factor {
            scope: self.scope.clone(),
            cards: self.cards.clone(),
            values: self.values.iter().map(|&v| clamp(v * c)).collect(),
        }
    }

    pub fn negated(&self) -> Factor {
        self.scaled(-1.0)
    }

    /// Fixes `v` to `value` and drops it from the scope.
    pub fn slice(&self, v: VarId, value: usize) -> Result<Factor> {
        let Ok(pos) = self.scope.binary_search(&v) else {
            return usage(format!("variable {v} is not in scope {:?}", self.scope));
        };
        if value >= self.cards[pos] {
            return usage(format!(
                "value {value} out of range for variable {v} (cardinality {})",
                self.cards[pos]
            ));
        }
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        cards.remove(pos);
        let src = self.strides_over(&scope);
        let base = own_strides(&self.cards)[pos] * value;
        let mut values = Vec::with_capacity(table_size(&cards).unwrap_or(0));
        walk(&cards, [&src], |[s]| values.push(self.values[base + s]));
        Ok(Factor {
            scope,
            cards,
            values,
        })
    }

    /// Renames scope variables through a strictly monotone map.
    pub(crate) fn relabel_monotone(&self, map: impl Fn(VarId) -> VarId) -> Factor {
        Factor {
            scope: self.scope.iter().map(|&v| map(v)).collect(),
            cards: self.cards.clone(),
            values: self.values.clone(),
        }
    }

    /// Linear table index of the configuration read from `values`, which is
    /// indexed by variable id.
    #[inline]
    pub fn index_in(&self, values: &[usize]) -> usize {
        let mut idx = 0;
        for (v, c) in self.scope.iter().zip(&self.cards) {
            idx = idx * c + values[*v];
        }
        idx
    }

    /// Entry selected by a dense value vector indexed by variable id.
    #[inline]
    pub fn value_in(&self, values: &[usize]) -> f64 {
        self.values[self.index_in(values)]
    }

    /// Entry selected by an assignment covering this factor's scope.
    pub fn value_at(&self, x: &Assignment) -> Result<f64> {
        let mut idx = 0;
        for (v, c) in self.scope.iter().zip(&self.cards) {
            let Some(val) = x.get(*v) else {
                return usage(format!("variable {v} is unassigned"));
            };
            if val >= *c {
                return usage(format!("value {val} out of range for variable {v}"));
            }
            idx = idx * c + val;
        }
        Ok(self.values[idx])
    }

    /// Per-entry configuration, decoded from a linear index.
    pub fn config_of(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.scope.len()];
        for i in (0..self.scope.len()).rev() {
            out[i] = idx % self.cards[i];
            idx /= self.cards[i];
        }
        out
    }
}

pub(crate) fn table_size(cards: &[usize]) -> Option<usize> {
    cards.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c))
}

fn union_scope(a: &Factor, b: &Factor) -> Result<(Vec<VarId>, Vec<usize>)> {
    let mut scope = Vec::with_capacity(a.scope.len() + b.scope.len());
    let mut cards = Vec::with_capacity(scope.capacity());
    let (mut i, mut j) = (0, 0);
    while i < a.scope.len() || j < b.scope.len() {
        let take_a = j == b.scope.len() || (i < a.scope.len() && a.scope[i] <= b.scope[j]);
        if take_a {
            if j < b.scope.len() && a.scope[i] == b.scope[j] {
                if a.cards[i] != b.cards[j] {
                    return Err(Error::Inconsistent(format!(
                        "variable {} has cardinality {} in one factor and {} in another",
                        a.scope[i], a.cards[i], b.cards[j]
                    )));
                }
                j += 1;
            }
            scope.push(a.scope[i]);
            cards.push(a.cards[i]);
            i += 1;
        } else {
            scope.push(b.scope[j]);
            cards.push(b.cards[j]);
            j += 1;
        }
    }
    Ok((scope, cards))
}
