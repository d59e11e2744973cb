//! Seeded random instances for tests, benchmarks and examples.

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::factor::Factor;
use crate::model::{GraphicalModel, VarId};

/// Shape of a random model; log-values are drawn from `U[-value_range, value_range]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomSpec {
    pub vars: (usize, usize),
    pub cards: (usize, usize),
    /// Extra factors per variable on top of one factor per variable.
    pub extra_factor_ratio: f64,
    /// Relative weights of unary, pairwise and ternary factors.
    pub arity_weights: [u32; 3],
    pub value_range: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            vars: (4, 10),
            cards: (2, 3),
            extra_factor_ratio: 0.5,
            arity_weights: [1, 3, 2],
            value_range: 5.0,
        }
    }
}

fn random_table(rng: &mut impl Rng, scope: Vec<VarId>, cards: &[usize], range: f64) -> Factor {
    let cs: Vec<usize> = scope.iter().map(|&v| cards[v]).collect();
    let len = cs.iter().product();
    let values = (0..len).map(|_| rng.gen_range(-range..=range)).collect();
    Factor::new(scope, cs, values).expect("generated scopes are sorted and distinct")
}

pub fn random_model_from(rng: &mut impl Rng, spec: &RandomSpec) -> GraphicalModel {
    let n = rng.gen_range(spec.vars.0..=spec.vars.1);
    let cards: Vec<usize> = (0..n)
        .map(|_| rng.gen_range(spec.cards.0..=spec.cards.1))
        .collect();
    let count = n + (n as f64 * spec.extra_factor_ratio).round() as usize;
    let total: u32 = spec.arity_weights.iter().sum();
    let mut factors = Vec::with_capacity(count);
    for _ in 0..count {
        let mut pick = rng.gen_range(0..total);
        let mut arity = 1;
        for (k, &w) in spec.arity_weights.iter().enumerate() {
            if pick < w {
                arity = k + 1;
                break;
            }
            pick -= w;
        }
        let mut scope = sample(rng, n, arity.min(n)).into_vec();
        scope.sort_unstable();
        factors.push(random_table(rng, scope, &cards, spec.value_range));
    }
    GraphicalModel::new(cards, factors).expect("generated models are consistent")
}

/// One model drawn with the default shape.
pub fn random_model(seed: u64) -> GraphicalModel {
    random_model_from(&mut ChaCha8Rng::seed_from_u64(seed), &RandomSpec::default())
}

/// `count` models drawn from one stream.
pub fn random_suite(count: usize, seed: u64) -> Vec<GraphicalModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = RandomSpec::default();
    (0..count)
        .map(|_| random_model_from(&mut rng, &spec))
        .collect()
}

/// Random tree over `n` variables: a pairwise factor per tree edge plus a
/// unary factor per variable.
pub fn random_tree_model(n: usize, max_card: usize, seed: u64) -> GraphicalModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cards: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=max_card.max(2))).collect();
    let mut factors = Vec::with_capacity(2 * n);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        factors.push(random_table(&mut rng, vec![u, v], &cards, 5.0));
    }
    for v in 0..n {
        factors.push(random_table(&mut rng, vec![v], &cards, 5.0));
    }
    GraphicalModel::new(cards, factors).expect("generated models are consistent")
}

/// `rows × cols` grid with pairwise factors on grid edges and unary factors.
pub fn grid_model(rows: usize, cols: usize, card: usize, seed: u64) -> GraphicalModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rows * cols;
    let cards = vec![card; n];
    let mut factors = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            factors.push(random_table(&mut rng, vec![v], &cards, 1.0));
            if c + 1 < cols {
                factors.push(random_table(&mut rng, vec![v, v + 1], &cards, 2.0));
            }
            if r + 1 < rows {
                factors.push(random_table(&mut rng, vec![v, v + cols], &cards, 2.0));
            }
        }
    }
    GraphicalModel::new(cards, factors).expect("generated models are consistent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::primal_graph;

    #[test]
    fn suite_respects_the_shape() {
        for m in random_suite(50, 7) {
            assert!((4..=10).contains(&m.num_vars()));
            assert!(m.cards().iter().all(|c| (2..=3).contains(c)));
            for f in m.factors() {
                assert!((1..=3).contains(&f.arity()));
                assert!(f.values().iter().all(|v| v.abs() <= 5.0));
            }
        }
        assert_eq!(random_suite(3, 1), random_suite(3, 1));
    }

    #[test]
    fn trees_have_n_minus_one_edges() {
        let m = random_tree_model(6, 3, 11);
        assert_eq!(primal_graph(&m).num_edges(), 5);
    }

    #[test]
    fn grid_edges() {
        let m = grid_model(3, 4, 2, 0);
        assert_eq!(primal_graph(&m).num_edges(), 3 * 3 + 2 * 4);
    }
}
