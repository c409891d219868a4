mod common;

use std::collections::HashSet;
use std::sync::Arc;

use mdlnet::format;
use mdlnet::score::{self, Penalty};
use mdlnet::table::{ml_parameters, JointTable};
use mdlnet::{dag, BayesNet, Dataset, Schema, Structure};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn schema_with(cards: &[usize]) -> Arc<Schema> {
    Arc::new(Schema::new(cards.iter().enumerate().map(|(i, &c)| (format!("V{i}"), c))).unwrap())
}

fn random_net(schema: &Arc<Schema>, r: &mut impl Rng) -> BayesNet {
    let g = common::random_structure(schema, 0.5, r);
    let cpts = (0..g.len())
        .map(|i| {
            (0..g.parent_configs(i))
                .flat_map(|_| common::random_distribution(schema.cardinality(i), r))
                .collect()
        })
        .collect();
    BayesNet::new(g, cpts).unwrap()
}

fn cards() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=3, 1..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn joint_sums_to_one(cards in cards(), seed in any::<u64>()) {
        let schema = schema_with(&cards);
        let net = random_net(&schema, &mut common::rng(seed));
        let size = schema.joint_size().unwrap();
        let total: f64 = (0..size).map(|k| net.joint_prob(&schema.decode(k)).unwrap()).sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn adding_an_edge_never_lowers_param_count(cards in cards(), seed in any::<u64>()) {
        let schema = schema_with(&cards);
        let mut r = common::rng(seed);
        let g = common::random_structure(&schema, 0.4, &mut r);
        for a in 0..g.len() {
            for b in 0..g.len() {
                if a == b || g.has_edge(a, b) {
                    continue;
                }
                let mut edges = g.edges();
                edges.push((a, b));
                if let Ok(h) = Structure::from_edges(schema.clone(), &edges) {
                    prop_assert!(h.param_count() >= g.param_count());
                    prop_assert_eq!(h.param_count(), common::direct_param_count(&h));
                }
            }
        }
    }

    #[test]
    fn sampling_is_deterministic(cards in cards(), seed in any::<u64>(), rows in 1usize..300) {
        let schema = schema_with(&cards);
        let net = random_net(&schema, &mut common::rng(seed));
        prop_assert_eq!(net.sample(rows, seed), net.sample(rows, seed));
    }

    #[test]
    fn likelihood_matches_row_sum_oracle(cards in cards(), seed in any::<u64>(), rows in 1usize..200) {
        let schema = schema_with(&cards);
        let mut r = common::rng(seed);
        let data = common::random_rows(&schema, rows, &mut r);
        let g = common::random_structure(&schema, 0.5, &mut r);
        let ll = score::log_likelihood(&g, &data).unwrap();
        let oracle = common::direct_ml_loglik(&g, &data);
        prop_assert!((ll - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()), "{} vs {}", ll, oracle);
        let via_params = ml_parameters(&g, &data).unwrap().log_likelihood(&data).unwrap();
        prop_assert!((ll - via_params).abs() <= 1e-9 * (1.0 + ll.abs()));
    }

    #[test]
    fn duplicating_rows_doubles_likelihood(cards in cards(), seed in any::<u64>(), rows in 1usize..200) {
        let schema = schema_with(&cards);
        let mut r = common::rng(seed);
        let data = common::random_rows(&schema, rows, &mut r);
        let doubled = Dataset::new(
            schema.clone(),
            data.rows().chain(data.rows()).map(<[usize]>::to_vec),
        )
        .unwrap();
        let g = common::random_structure(&schema, 0.5, &mut r);
        let ll = score::log_likelihood(&g, &data).unwrap();
        let ll2 = score::log_likelihood(&g, &doubled).unwrap();
        prop_assert!((ll2 - 2.0 * ll).abs() <= 1e-9 * (1.0 + ll.abs()));
    }

    #[test]
    fn row_order_invariance(cards in cards(), seed in any::<u64>(), rows in 1usize..200) {
        let schema = schema_with(&cards);
        let mut r = common::rng(seed);
        let data = common::random_rows(&schema, rows, &mut r);
        let mut shuffled: Vec<Vec<usize>> = data.rows().map(<[usize]>::to_vec).collect();
        shuffled.shuffle(&mut r);
        let shuffled = Dataset::new(schema.clone(), shuffled).unwrap();
        let g = common::random_structure(&schema, 0.5, &mut r);
        prop_assert_eq!(
            score::log_likelihood(&g, &data).unwrap(),
            score::log_likelihood(&g, &shuffled).unwrap()
        );
    }

    #[test]
    fn decomposition_identity(n in 2usize..=4, seed in any::<u64>(), extra in 0usize..60) {
        let schema = Arc::new(Schema::binary(n).unwrap());
        let mut r = common::rng(seed);
        let data = common::full_support_rows(&schema, (1 << n) + extra, &mut r);
        let g = common::random_structure(&schema, 0.5, &mut r);
        let emp = JointTable::empirical(&data).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let decomposed: f64 = (0..n)
            .map(|i| emp.cond_entropy(&[i], g.parents(i)).unwrap())
            .sum::<f64>()
            - emp.entropy(&all);
        let oracle = common::direct_kl_to_ml(&g, &data);
        let fitted = JointTable::from_net(&ml_parameters(&g, &data).unwrap()).unwrap();
        prop_assert!((decomposed - oracle).abs() <= 1e-9);
        prop_assert!((emp.entropy_distance(&fitted).unwrap() - oracle).abs() <= 1e-9);
        prop_assert!(decomposed >= -1e-12);
    }

    #[test]
    fn conditional_entropy_chain(cards in cards(), seed in any::<u64>()) {
        let schema = schema_with(&cards);
        let mut r = common::rng(seed);
        let probs = common::random_distribution(schema.joint_size().unwrap(), &mut r);
        let t = JointTable::new(schema.clone(), probs).unwrap();
        let mut vars: Vec<usize> = (0..schema.len()).collect();
        vars.shuffle(&mut r);
        let split = r.gen_range(0..=vars.len());
        let (given, rest) = vars.split_at(split);
        let targets = &rest[..r.gen_range(0..=rest.len())];
        let mut union: Vec<usize> = targets.iter().chain(given).copied().collect();
        union.sort_unstable();
        let lhs = t.cond_entropy(targets, given).unwrap();
        let rhs = t.entropy(&union) - t.entropy(given);
        prop_assert!((lhs - rhs).abs() <= 1e-9);
    }

    #[test]
    fn network_text_round_trip(cards in cards(), seed in any::<u64>()) {
        let schema = schema_with(&cards);
        let net = random_net(&schema, &mut common::rng(seed));
        let text = format::write_network(&net, "t");
        let parsed = format::parse_network(&text).unwrap();
        prop_assert_eq!(format::write_network(&parsed, "t"), text.clone());
        let again = format::parse_network(&format::write_network(&parsed, "t")).unwrap();
        prop_assert_eq!(again, parsed);
    }

    #[test]
    fn dataset_csv_round_trip(cards in cards(), seed in any::<u64>(), rows in 1usize..50) {
        let schema = schema_with(&cards);
        let data = common::random_rows(&schema, rows, &mut common::rng(seed));
        let text = format::write_dataset(&data);
        prop_assert_eq!(format::parse_dataset(&text, Some(&schema)).unwrap(), data);
    }

    #[test]
    fn markov_equivalent_pair_ties(seed in any::<u64>(), rows in 1usize..300) {
        let schema = Arc::new(Schema::binary(3).unwrap());
        let data = common::random_rows(&schema, rows, &mut common::rng(seed));
        let chain = Structure::from_edges(schema.clone(), &[(0, 1), (1, 2)]).unwrap();
        let reversed = Structure::from_edges(schema.clone(), &[(2, 1), (1, 0)]).unwrap();
        prop_assert_eq!(
            score::log_likelihood(&chain, &data).unwrap(),
            score::log_likelihood(&reversed, &data).unwrap()
        );
    }

    #[test]
    fn penalty_tokens_round_trip(c in 0.01f64..100.0, alpha in 0.01f64..0.99) {
        for p in [Penalty::constant(c).unwrap(), Penalty::HalfLog, Penalty::polynomial(alpha).unwrap()] {
            prop_assert_eq!(p.to_string().parse::<Penalty>().unwrap(), p);
        }
    }
}

#[test]
fn enumeration_matches_brute_force() {
    for n in 0..=4 {
        let schema =
            Arc::new(Schema::binary(n).unwrap_or_else(|_| Schema::new::<String>([]).unwrap()));
        let dags = dag::enumerate_dags(&schema).unwrap();
        let distinct: HashSet<Vec<(usize, usize)>> = dags.iter().map(Structure::edges).collect();
        assert_eq!(distinct.len(), dags.len());
        assert!(dags.iter().all(|g| common::is_acyclic(n, &g.edges())));
        assert_eq!(dags.len(), common::brute_force_dag_count(n));
    }
}
