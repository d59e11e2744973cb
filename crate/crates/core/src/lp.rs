//! Bound tightening by cost shifting: pairwise max-marginal matching, the
//! factor-graph coordinate descent (FGLP) and its join-graph counterpart
//! (JGLP). Every update rewrites tables without changing their sum.

use std::time::Duration;

use crate::elimination::{BoundResult, Eliminator, JoinGraph};
use crate::error::{usage, Result};
use crate::factor::Factor;
use crate::model::{GraphicalModel, VarId};
use crate::ordering::EliminationOrder;
use crate::trace::{BoundTrace, Clock};

pub const DEFAULT_EPS: f64 = 1e-8;

/// When an iterative solver stops. At least one of `max_sweeps` and
/// `time_limit` must be set; `eps` is the relative bound change per sweep
/// below which the solver counts as converged.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRule {
    pub max_sweeps: Option<usize>,
    pub time_limit: Option<Duration>,
    pub eps: f64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            max_sweeps: None,
            time_limit: Some(Duration::from_secs(30)),
            eps: DEFAULT_EPS,
        }
    }
}

impl StopRule {
    pub fn sweeps(n: usize) -> Self {
        StopRule {
            max_sweeps: Some(n),
            time_limit: None,
            eps: DEFAULT_EPS,
        }
    }

    pub fn time(limit: Duration) -> Self {
        StopRule {
            max_sweeps: None,
            time_limit: Some(limit),
            eps: DEFAULT_EPS,
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_sweeps(mut self, n: usize) -> Self {
        self.max_sweeps = Some(n);
        self
    }

    pub fn with_time(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_sweeps.is_none() && self.time_limit.is_none() {
            return usage("a stop rule needs a sweep cap or a time limit");
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return usage(format!("convergence epsilon {} is invalid", self.eps));
        }
        Ok(())
    }

    pub fn converged(&self, prev: f64, next: f64) -> bool {
        (prev - next).abs() <= self.eps * prev.abs().max(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxSweeps,
    TimeLimit,
}

/// Trace and termination details shared by the iterative solvers.
#[derive(Clone, Debug, PartialEq)]
pub struct LpRun {
    /// Bound before the first sweep, then after every sweep.
    pub trace: BoundTrace,
    pub sweeps: usize,
    pub reason: StopReason,
}

impl LpRun {
    pub fn bound(&self) -> f64 {
        self.trace.last().map(|p| p.value).unwrap_or(f64::INFINITY)
    }
}

fn drive(stop: &StopRule, initial: f64, mut sweep: impl FnMut() -> Result<f64>) -> Result<LpRun> {
    stop.validate()?;
    let clock = Clock::start(stop.time_limit);
    let mut trace = BoundTrace::new();
    trace.record(clock.elapsed(), initial);
    let mut prev = initial;
    let mut sweeps = 0;
    let reason = loop {
        if stop.max_sweeps.is_some_and(|cap| sweeps >= cap) {
            break StopReason::MaxSweeps;
        }
        if clock.expired() {
            break StopReason::TimeLimit;
        }
        let bound = sweep()?;
        sweeps += 1;
        trace.record(clock.elapsed(), bound);
        if stop.converged(prev, bound) {
            break StopReason::Converged;
        }
        prev = bound;
    };
    Ok(LpRun {
        trace,
        sweeps,
        reason,
    })
}

/// Sum of every table's maximum; scalar factors contribute their value.
pub fn decomposition_bound(factors: &[Factor]) -> f64 {
    factors.iter().map(Factor::max_value).sum()
}

/// Shifts half the max-marginal gap over the shared variables from one
/// factor to the other, leaving both with equal max-marginals there.
pub fn pairwise_match(fa: &Factor, fb: &Factor) -> Result<(Factor, Factor)> {
    let sep: Vec<VarId> = fa
        .scope()
        .iter()
        .copied()
        .filter(|&v| fb.contains(v))
        .collect();
    if sep.is_empty() {
        return usage(format!(
            "scopes {:?} and {:?} share no variable",
            fa.scope(),
            fb.scope()
        ));
    }
    let ga = fa.max_marginal(&sep)?;
    let gb = fb.max_marginal(&sep)?;
    let half = gb.sub(&ga)?.scaled(0.5);
    Ok((fa.shift(&half)?, fb.shift(&half.negated())?))
}

/// Coordinate descent on the decomposition bound of the input factors.
#[derive(Clone, Debug)]
pub struct Fglp {
    cards: Vec<usize>,
    factors: Vec<Factor>,
    incident: Vec<Vec<usize>>,
}

impl Fglp {
    pub fn new(m: &GraphicalModel) -> Self {
        let mut incident = vec![Vec::new(); m.num_vars()];
        for (i, f) in m.factors().iter().enumerate() {
            for &v in f.scope() {
                incident[v].push(i);
            }
        }
        Fglp {
            cards: m.cards().to_vec(),
            factors: m.factors().to_vec(),
            incident,
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn bound(&self) -> f64 {
        decomposition_bound(&self.factors)
    }

    /// Gives every factor over `v` the average of their max-marginals on `v`.
    pub fn update_variable(&mut self, v: VarId) -> Result<()> {
        let inc = &self.incident[v];
        if inc.len() < 2 {
            return Ok(());
        }
        let gammas = inc
            .iter()
            .map(|&i| self.factors[i].max_marginal(&[v]))
            .collect::<Result<Vec<_>>>()?;
        let mut mean = gammas[0].clone();
        for g in &gammas[1..] {
            mean = mean.add(g)?;
        }
        let mean = mean.scaled(1.0 / inc.len() as f64);
        for (&i, g) in inc.iter().zip(&gammas) {
            self.factors[i] = self.factors[i].shift(&mean.sub(g)?)?;
        }
        Ok(())
    }

    /// One pass over all variables in increasing id order; returns the new
    /// bound.
    pub fn sweep(&mut self) -> Result<f64> {
        for v in 0..self.cards.len() {
            self.update_variable(v)?;
        }
        Ok(self.bound())
    }

    pub fn run(&mut self, stop: &StopRule) -> Result<LpRun> {
        let initial = self.bound();
        drive(stop, initial, || self.sweep())
    }

    pub fn to_model(&self) -> Result<GraphicalModel> {
        GraphicalModel::new(self.cards.clone(), self.factors.clone())
    }
}

#[derive(Clone, Debug)]
pub struct FglpResult {
    /// Reparameterized model: same scopes, same total at every assignment.
    pub model: GraphicalModel,
    pub run: LpRun,
}

impl FglpResult {
    pub fn bound(&self) -> f64 {
        self.run.bound()
    }
}

pub fn fglp(m: &GraphicalModel, stop: &StopRule) -> Result<FglpResult> {
    let mut solver = Fglp::new(m);
    let run = solver.run(stop)?;
    Ok(FglpResult {
        model: solver.to_model()?,
        run,
    })
}

/// Pairwise matching over the edges of a mini-bucket join graph.
#[derive(Clone, Debug)]
pub struct Jglp {
    graph: JoinGraph,
}

impl Jglp {
    pub fn new(graph: JoinGraph) -> Self {
        Jglp { graph }
    }

    pub fn graph(&self) -> &JoinGraph {
        &self.graph
    }

    pub fn into_graph(self) -> JoinGraph {
        self.graph
    }

    pub fn bound(&self) -> f64 {
        self.graph.decomposition_bound()
    }

    pub fn update_edge(&mut self, e: usize) -> Result<()> {
        let (a, b) = (self.graph.edges[e].a, self.graph.edges[e].b);
        let (fa, fb) = pairwise_match(
            &self.graph.clusters[a].function,
            &self.graph.clusters[b].function,
        )?;
        self.graph.clusters[a].function = fa;
        self.graph.clusters[b].function = fb;
        Ok(())
    }

    /// One pass over every edge in the graph's fixed order; returns the new
    /// bound.
    pub fn sweep(&mut self) -> Result<f64> {
        for e in 0..self.graph.edges.len() {
            self.update_edge(e)?;
        }
        Ok(self.bound())
    }

    pub fn run(&mut self, stop: &StopRule) -> Result<LpRun> {
        let initial = self.bound();
        drive(stop, initial, || self.sweep())
    }
}

#[derive(Clone, Debug)]
pub struct JglpResult {
    pub graph: JoinGraph,
    pub run: LpRun,
}

impl JglpResult {
    pub fn bound(&self) -> f64 {
        self.run.bound()
    }
}

pub fn jglp(jg: JoinGraph, stop: &StopRule) -> Result<JglpResult> {
    let mut solver = Jglp::new(jg);
    let run = solver.run(stop)?;
    Ok(JglpResult {
        graph: solver.into_graph(),
        run,
    })
}

/// FGLP under `stop`, then mini-bucket elimination on the shifted factors.
pub fn fglp_then_mbe(
    m: &GraphicalModel,
    o: &EliminationOrder,
    z: usize,
    stop: &StopRule,
) -> Result<BoundResult> {
    let shifted = fglp(m, stop)?.model;
    Eliminator::new(&shifted, o).mini_bucket(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elimination::{join_graph_structuring, mini_bucket_elim};
    use crate::model::brute_force_opt;
    use crate::model::tests::m3;

    fn f(scope: Vec<VarId>, values: Vec<f64>) -> Factor {
        let cards = vec![2; scope.len()];
        Factor::new(scope, cards, values).unwrap()
    }

    #[test]
    fn decomposition_bound_of_m3() {
        assert_eq!(decomposition_bound(m3().factors()), 8.0);
        assert_eq!(decomposition_bound(&[f(vec![0], vec![1.5, -2.0])]), 1.5);
        assert_eq!(decomposition_bound(&[f(vec![0], vec![0.0, 0.0])]), 0.0);
    }

    #[test]
    fn pairwise_match_on_m3_pair() {
        let m = m3();
        let (fa, fb) = pairwise_match(&m.factors()[0], &m.factors()[2]).unwrap();
        assert_eq!(fa.values(), &[1.0, 2.0, 2.0, 0.0]);
        assert_eq!(fb.values(), &[2.0, -1.0, 0.0, 2.0]);
        assert_eq!(fa.max_value() + fb.max_value(), 4.0);
        let (fa2, fb2) = pairwise_match(&fa, &fb).unwrap();
        assert_eq!((fa2, fb2), (fa, fb));
        assert!(pairwise_match(&f(vec![0], vec![0., 1.]), &f(vec![1], vec![0., 1.])).is_err());
    }

    #[test]
    fn fglp_single_update_on_m3() {
        let m = m3();
        let mut s = Fglp::new(&m);
        assert_eq!(s.bound(), 8.0);
        s.update_variable(0).unwrap();
        assert_eq!(s.factors()[0].values(), &[1.0, 2.0, 2.0, 0.0]);
        assert_eq!(s.factors()[1], m.factors()[1]);
        assert_eq!(s.factors()[2].values(), &[2.0, -1.0, 0.0, 2.0]);
        assert_eq!(s.bound(), 7.0);
    }

    #[test]
    fn single_factor_is_a_fixed_point() {
        let m = GraphicalModel::new(vec![2, 2], vec![f(vec![0, 1], vec![1., 4., 2., 0.])]).unwrap();
        let r = fglp(&m, &StopRule::sweeps(10)).unwrap();
        assert_eq!(r.bound(), 4.0);
        assert_eq!(r.run.sweeps, 1);
        assert_eq!(r.run.reason, StopReason::Converged);
    }

    #[test]
    fn jglp_closes_the_m3_gap() {
        let m = m3();
        let o = EliminationOrder::new(&m, vec![0, 1, 2]).unwrap();
        let jg = join_graph_structuring(&m, &o, 1).unwrap();
        let r = jglp(jg, &StopRule::sweeps(10_000).with_eps(1e-9)).unwrap();
        assert_eq!(r.run.reason, StopReason::Converged);
        assert!((r.bound() - 7.0).abs() < 1e-6, "{}", r.bound());
        assert!(r.run.trace.is_non_increasing(1e-9));
    }

    #[test]
    fn zero_sweeps_leave_everything_alone() {
        let m = m3();
        let o = EliminationOrder::new(&m, vec![0, 1, 2]).unwrap();
        let r = fglp(&m, &StopRule::sweeps(0)).unwrap();
        assert_eq!(r.run.trace.len(), 1);
        assert_eq!(r.model, m);
        assert_eq!(
            fglp_then_mbe(&m, &o, 1, &StopRule::sweeps(0)).unwrap(),
            mini_bucket_elim(&m, &o, 1).unwrap()
        );
        let one = fglp_then_mbe(&m, &o, 1, &StopRule::sweeps(1))
            .unwrap()
            .bound;
        assert!(one <= mini_bucket_elim(&m, &o, 1).unwrap().bound + 1e-12);
        assert!(one >= brute_force_opt(&m).unwrap().0 - 1e-9);
    }

    #[test]
    fn stop_rule_needs_a_limit() {
        let s = StopRule {
            max_sweeps: None,
            time_limit: None,
            eps: 1e-8,
        };
        assert!(s.validate().is_err());
        assert!(StopRule::time(Duration::ZERO).validate().is_ok());
        let r = fglp(&m3(), &StopRule::time(Duration::ZERO)).unwrap();
        assert_eq!(r.run.reason, StopReason::TimeLimit);
    }
}
