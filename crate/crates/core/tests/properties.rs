use proptest::prelude::*;

use costshift::elimination::{
    bucket_elimination, join_graph_structuring, match_max_marginals, mbe_mm, mini_bucket_elim,
};
use costshift::generate::random_model;
use costshift::lp::{decomposition_bound, fglp, jglp, pairwise_match, Fglp, StopRule};
use costshift::model::brute_force_opt;
use costshift::ordering::min_fill_order;
use costshift::search::{aobb_with, build_heuristic, AobbOptions, Scheme};
use costshift::{Factor, GraphicalModel};

const CARDS: [usize; 4] = [2, 3, 2, 3];

fn factor_on(scope: Vec<usize>) -> impl Strategy<Value = Factor> {
    let len: usize = scope.iter().map(|&v| CARDS[v]).product();
    prop::collection::vec(-5.0f64..5.0, len).prop_map(move |values| {
        let cards = scope.iter().map(|&v| CARDS[v]).collect();
        Factor::new(scope.clone(), cards, values).unwrap()
    })
}

fn any_factor() -> impl Strategy<Value = Factor> {
    prop::sample::subsequence(vec![0usize, 1, 2, 3], 1..=3).prop_flat_map(factor_on)
}

/// Two factors sharing at least one variable.
fn overlapping_pair() -> impl Strategy<Value = (Factor, Factor)> {
    (any_factor(), any_factor()).prop_filter("share a variable", |(a, b)| {
        a.scope().iter().any(|v| b.contains(*v))
    })
}

fn all_configs() -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &c in &CARDS {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..c).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

fn seeded_model() -> impl Strategy<Value = GraphicalModel> {
    any::<u64>().prop_map(random_model)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn combine_is_pointwise_sum(a in any_factor(), b in any_factor()) {
        let ab = a.combine(&b).unwrap();
        for x in all_configs() {
            prop_assert!(close(ab.value_in(&x), a.value_in(&x) + b.value_in(&x)));
        }
    }

    #[test]
    fn max_eliminate_takes_the_max(a in any_factor()) {
        let v = a.scope()[0];
        let m = a.max_eliminate(v).unwrap();
        for x in all_configs() {
            let best = (0..CARDS[v])
                .map(|k| {
                    let mut y = x.clone();
                    y[v] = k;
                    a.value_in(&y)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(close(m.value_in(&x), best));
        }
    }

    #[test]
    fn pairwise_match_preserves_sum_and_equalises((a, b) in overlapping_pair()) {
        let (a2, b2) = pairwise_match(&a, &b).unwrap();
        for x in all_configs() {
            prop_assert!(close(
                a2.value_in(&x) + b2.value_in(&x),
                a.value_in(&x) + b.value_in(&x)
            ));
        }
        let sep: Vec<usize> = a.scope().iter().copied().filter(|v| b.contains(*v)).collect();
        let ma = a2.max_marginal(&sep).unwrap();
        let mb = b2.max_marginal(&sep).unwrap();
        for (p, q) in ma.values().iter().zip(mb.values()) {
            prop_assert!(close(*p, *q));
        }
        prop_assert!(a2.max_value() + b2.max_value() <= a.max_value() + b.max_value() + 1e-9);
    }

    #[test]
    fn bucket_matching_tightens(fs in prop::collection::vec(any_factor(), 2..5)) {
        // every function in a bucket mentions the bucket variable
        let x1 = Factor::zeros(vec![1], vec![CARDS[1]]).unwrap();
        let fs: Vec<Factor> = fs.iter().map(|f| f.combine(&x1).unwrap()).collect();
        let out = match_max_marginals(&fs).unwrap();
        for x in all_configs() {
            let before: f64 = fs.iter().map(|f| f.value_in(&x)).sum();
            let after: f64 = out.iter().map(|f| f.value_in(&x)).sum();
            prop_assert!(close(before, after));
        }
        prop_assert!(decomposition_bound(&out) <= decomposition_bound(&fs) + 1e-9);
    }

    #[test]
    fn bounds_dominate_the_optimum(m in seeded_model(), z in 1usize..4) {
        prop_assume!(z + 1 >= m.max_arity());
        let (opt, _) = brute_force_opt(&m).unwrap();
        let o = min_fill_order(&m, 42);
        let exact = bucket_elimination(&m, &o).unwrap().value;
        prop_assert!(close(exact, opt));
        let stop = StopRule::sweeps(50);
        let bounds = [
            mini_bucket_elim(&m, &o, z).unwrap().bound,
            mbe_mm(&m, &o, z).unwrap().bound,
            fglp(&m, &stop).unwrap().bound(),
            jglp(join_graph_structuring(&m, &o, z).unwrap(), &stop).unwrap().bound(),
        ];
        for b in bounds {
            prop_assert!(b >= opt - 1e-9, "{b} < {opt}");
        }
    }

    #[test]
    fn fglp_keeps_the_model_total(m in seeded_model()) {
        let mut f = Fglp::new(&m);
        let mut prev = f.bound();
        for _ in 0..3 {
            let next = f.sweep().unwrap();
            prop_assert!(next <= prev + 1e-9);
            prev = next;
        }
        let shifted = f.to_model().unwrap();
        for x in sample_configs(&m) {
            prop_assert!(close(shifted.value_in(&x), m.value_in(&x)));
        }
    }

    #[test]
    fn join_graph_sums_to_the_model(m in seeded_model(), z in 1usize..4) {
        prop_assume!(z + 1 >= m.max_arity());
        let o = min_fill_order(&m, 42);
        let jg = join_graph_structuring(&m, &o, z).unwrap();
        prop_assert!(jg.has_running_intersection());
        let tight = jglp(jg.clone(), &StopRule::sweeps(5)).unwrap().graph;
        for x in sample_configs(&m) {
            prop_assert!(close(jg.value_in(&x), m.value_in(&x)));
            prop_assert!(close(tight.value_in(&x), m.value_in(&x)));
        }
    }

    #[test]
    fn pruning_does_not_change_the_answer(m in seeded_model(), z in 1usize..3, k in 0usize..4) {
        prop_assume!(z + 1 >= m.max_arity());
        let o = min_fill_order(&m, 42);
        let h = build_heuristic(&m, &o, z, Scheme::ALL[k], &StopRule::sweeps(20)).unwrap();
        let full = aobb_with(&m, &h, &AobbOptions::default()).unwrap();
        let pruned = aobb_with(&m, &h, &AobbOptions::new()).unwrap();
        prop_assert!(close(full.value, pruned.value));
        prop_assert!(pruned.stats.nodes <= full.stats.nodes);
        let (opt, _) = brute_force_opt(&m).unwrap();
        prop_assert!(close(pruned.value, opt));
    }

    #[test]
    fn heuristic_root_is_the_pass_bound(m in seeded_model(), z in 1usize..4) {
        prop_assume!(z + 1 >= m.max_arity());
        let o = min_fill_order(&m, 42);
        let stop = StopRule::sweeps(0);
        let h = build_heuristic(&m, &o, z, Scheme::Mbe, &stop).unwrap();
        prop_assert!(close(h.root_bound(), mini_bucket_elim(&m, &o, z).unwrap().bound));
        let h = build_heuristic(&m, &o, z, Scheme::MbeMm, &stop).unwrap();
        prop_assert!(close(h.root_bound(), mbe_mm(&m, &o, z).unwrap().bound));
    }
}

/// A handful of full configurations: all-zero, all-max and a few mixed.
fn sample_configs(m: &GraphicalModel) -> Vec<Vec<usize>> {
    let n = m.num_vars();
    let mut out = vec![vec![0; n], m.cards().iter().map(|c| c - 1).collect()];
    for s in 1..6 {
        out.push((0..n).map(|v| (v * s + s) % m.card(v)).collect());
    }
    out
}
