//! Discrete variables, assignments and max-sum graphical models.

use std::fmt;

use crate::error::{usage, Error, Result};
use crate::factor::Factor;

pub type VarId = usize;

/// Default cap on the joint state space visited by [`brute_force_opt`].
pub const BRUTE_FORCE_CAP: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Variable {
    pub id: VarId,
    pub cardinality: usize,
}

/// Possibly partial map from variable id to value index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<Option<usize>>,
}

impl Assignment {
    pub fn empty(num_vars: usize) -> Self {
        Assignment {
            values: vec![None; num_vars],
        }
    }

    pub fn full(values: Vec<usize>) -> Self {
        Assignment {
            values: values.into_iter().map(Some).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: VarId) -> Option<usize> {
        self.values.get(v).copied().flatten()
    }

    pub fn set(&mut self, v: VarId, value: usize) {
        if v >= self.values.len() {
            self.values.resize(v + 1, None);
        }
        self.values[v] = Some(value);
    }

    pub fn unset(&mut self, v: VarId) {
        if let Some(slot) = self.values.get_mut(v) {
            *slot = None;
        }
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    /// Dense value vector if every variable is assigned.
    pub fn to_values(&self) -> Option<Vec<usize>> {
        self.values.iter().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, usize)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(v, x)| x.map(|x| (v, x)))
    }
}

impl fmt::Display for Assignment {
    /// Space-separated value indices; unassigned variables print as `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match x {
                Some(x) => write!(f, "{x}")?,
                None => f.write_str("-")?,
            }
        }
        Ok(())
    }
}

/// Variables plus a bag of log-space factors whose sum is the objective.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphicalModel {
    cards: Vec<usize>,
    factors: Vec<Factor>,
}

impl GraphicalModel {
    pub fn new(cards: Vec<usize>, factors: Vec<Factor>) -> Result<Self> {
        if let Some(v) = cards.iter().position(|&c| c == 0) {
            return Err(Error::Inconsistent(format!(
                "variable {v} has cardinality 0"
            )));
        }
        for (i, f) in factors.iter().enumerate() {
            for (&v, &c) in f.scope().iter().zip(f.cards()) {
                match cards.get(v) {
                    None => {
                        return Err(Error::Inconsistent(format!(
                            "factor {i} references unknown variable {v}"
                        )))
                    }
                    Some(&mc) if mc != c => {
                        return Err(Error::Inconsistent(format!(
                            "factor {i} gives variable {v} cardinality {c}, model says {mc}"
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(GraphicalModel { cards, factors })
    }

    pub fn num_vars(&self) -> usize {
        self.cards.len()
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn card(&self, v: VarId) -> usize {
        self.cards[v]
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn variables(&self) -> impl Iterator<Item = Variable> + '_ {
        self.cards
            .iter()
            .enumerate()
            .map(|(id, &cardinality)| Variable { id, cardinality })
    }

    pub fn max_arity(&self) -> usize {
        self.factors.iter().map(Factor::arity).max().unwrap_or(0)
    }

    /// Largest domain size (the `k` column of bound tables).
    pub fn max_card(&self) -> usize {
        self.cards.iter().copied().max().unwrap_or(0)
    }

    /// Same variables, different factor list.
    pub fn with_factors(&self, factors: Vec<Factor>) -> Result<Self> {
        GraphicalModel::new(self.cards.clone(), factors)
    }

    pub(crate) fn check_value_vec(&self, values: &[usize]) -> Result<()> {
        if values.len() != self.cards.len() {
            return usage(format!(
                "assignment covers {} variables, model has {}",
                values.len(),
                self.cards.len()
            ));
        }
        if let Some(v) = (0..values.len()).find(|&v| values[v] >= self.cards[v]) {
            return usage(format!("value {} out of range for variable {v}", values[v]));
        }
        Ok(())
    }

    /// Model value at a dense full assignment, without validation.
    #[inline]
    pub fn value_in(&self, values: &[usize]) -> f64 {
        self.factors.iter().map(|f| f.value_in(values)).sum()
    }
}

/// Total model value at a full assignment.
pub fn evaluate(m: &GraphicalModel, x: &Assignment) -> Result<f64> {
    let Some(values) = x.to_values() else {
        return usage("evaluate needs a full assignment");
    };
    m.check_value_vec(&values)?;
    Ok(m.value_in(&values))
}

/// Exhaustive maximization with the default state-space cap.
pub fn brute_force_opt(m: &GraphicalModel) -> Result<(f64, Assignment)> {
    brute_force_opt_capped(m, BRUTE_FORCE_CAP)
}

/// Exhaustive maximization; ties keep the lexicographically smallest
/// assignment (variable 0 most significant).
pub fn brute_force_opt_capped(m: &GraphicalModel, cap: u64) -> Result<(f64, Assignment)> {
    let space = m
        .cards()
        .iter()
        .try_fold(1u64, |acc, &c| acc.checked_mul(c as u64));
    match space {
        Some(s) if s <= cap => {}
        _ => {
            return Err(Error::Capacity(format!(
                "joint state space exceeds the brute-force cap of {cap}"
            )))
        }
    }
    let n = m.num_vars();
    let mut x = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    let mut best_x = x.clone();
    loop {
        let v = m.value_in(&x);
        if v > best {
            best = v;
            best_x.copy_from_slice(&x);
        }
        let mut d = n;
        loop {
            if d == 0 {
                return Ok((best, Assignment::full(best_x)));
            }
            d -= 1;
            x[d] += 1;
            if x[d] < m.card(d) {
                break;
            }
            x[d] = 0;
        }
    }
}
