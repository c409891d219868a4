//! Synthetic target networks used by the experiments and tests.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::network::{BayesNet, Schema, Structure};
use crate::rng;

// Binary net from (parent, child) edges and, per variable, P(X = 1) for each
// parent configuration.
fn binary_net(n: usize, edges: &[(usize, usize)], p_one: &[&[f64]]) -> BayesNet {
    let schema = Arc::new(Schema::binary(n).expect("valid schema"));
    let g = Structure::from_edges(schema, edges).expect("acyclic");
    let cpts = p_one
        .iter()
        .map(|rows| rows.iter().flat_map(|&p| [1.0 - p, p]).collect())
        .collect();
    BayesNet::new(g, cpts).expect("valid CPTs")
}

/// X → Y with θ_X(1) = 0.3, θ_{Y|X=0}(1) = 0.2, θ_{Y|X=1}(1) = 0.9.
pub fn xy_example() -> BayesNet {
    let schema = Arc::new(Schema::new([("X", 2), ("Y", 2)]).expect("valid schema"));
    let g = Structure::from_edges(schema, &[(0, 1)]).expect("acyclic");
    BayesNet::new(g, vec![vec![0.7, 0.3], vec![0.8, 0.2, 0.1, 0.9]]).expect("valid CPTs")
}

/// `n` independent uniform binary variables.
pub fn uniform(n: usize) -> BayesNet {
    let rows: Vec<&[f64]> = vec![&[0.5]; n];
    binary_net(n, &[], &rows)
}

/// Chain X0 → X1 → X2 with conditionals in [0.2, 0.8]. |G*| = 5.
pub fn chain3() -> BayesNet {
    binary_net(3, &[(0, 1), (1, 2)], &[&[0.3], &[0.2, 0.75], &[0.7, 0.25]])
}

/// Five binary variables with edges X0→X1, X0→X2, X1→X3, X2→X3, X3→X4 and
/// all conditionals in [0.2, 0.8]. |G*| = 11.
pub fn standard5() -> BayesNet {
    binary_net(
        5,
        &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)],
        &[
            &[0.35],
            &[0.25, 0.75],
            &[0.7, 0.2],
            &[0.2, 0.6, 0.45, 0.8],
            &[0.3, 0.75],
        ],
    )
}

/// Five binary variables, X_{i+1} a copy of X_i and X0 = 1 surely: every
/// CPT row is degenerate and (1,1,1,1,1) is the only consistent assignment.
pub fn deterministic5() -> BayesNet {
    binary_net(
        5,
        &[(0, 1), (1, 2), (2, 3), (3, 4)],
        &[&[1.0], &[0.0, 1.0], &[0.0, 1.0], &[0.0, 1.0], &[0.0, 1.0]],
    )
}

/// A random binary net: variables are ordered by a random permutation, each
/// forward pair becomes an edge with probability ½ (at most `max_parents`
/// per variable), and each P(X = 1 | π) is uniform in `[lo, hi]`.
pub fn random_binary(
    n: usize,
    max_parents: usize,
    lo: f64,
    hi: f64,
    seed: u64,
) -> Result<BayesNet> {
    if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
        return Err(Error::input(format!(
            "conditional range [{lo}, {hi}] is not inside [0, 1]"
        )));
    }
    let schema = Arc::new(Schema::binary(n)?);
    let mut r = rng::stream(seed, 0);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, r.gen_range(0..=i));
    }
    let mut parents = vec![Vec::new(); n];
    for b in 1..n {
        for a in 0..b {
            if parents[order[b]].len() < max_parents && r.gen_bool(0.5) {
                parents[order[b]].push(order[a]);
            }
        }
    }
    let g = Structure::new(schema, parents)?;
    let cpts = (0..n)
        .map(|i| {
            (0..g.parent_configs(i))
                .flat_map(|_| {
                    let p = r.gen_range(lo..=hi);
                    [1.0 - p, p]
                })
                .collect()
        })
        .collect();
    BayesNet::new(g, cpts)
}
