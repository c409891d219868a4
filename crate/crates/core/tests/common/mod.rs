//! Independent oracles and random-instance generators shared by the
//! integration tests. Nothing here calls the library's counting, scoring or
//! enumeration code.

#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use mdlnet::{Dataset, Schema, Structure};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Number of labeled DAGs on `n` nodes by filtering all off-diagonal
/// adjacency matrices for acyclicity.
pub fn brute_force_dag_count(n: usize) -> usize {
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    (0u64..1 << slots.len())
        .filter(|bits| {
            let edges: Vec<(usize, usize)> = slots
                .iter()
                .enumerate()
                .filter(|(k, _)| bits >> k & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            is_acyclic(n, &edges)
        })
        .count()
}

/// Acyclicity by repeatedly deleting nodes without incoming edges.
pub fn is_acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut alive = vec![true; n];
    loop {
        let source = (0..n).find(|&v| alive[v] && !edges.iter().any(|&(a, b)| b == v && alive[a]));
        match source {
            Some(v) => alive[v] = false,
            None => return alive.iter().all(|a| !a),
        }
    }
}

type FamilyCounts = HashMap<(usize, Vec<usize>, usize), u64>;
type ParentCounts = HashMap<(usize, Vec<usize>), u64>;

fn family_counts(g: &Structure, data: &Dataset) -> (FamilyCounts, ParentCounts) {
    let mut fam = HashMap::new();
    let mut pa = HashMap::new();
    for row in data.rows() {
        for i in 0..g.len() {
            let pv: Vec<usize> = g.parents(i).iter().map(|&p| row[p]).collect();
            *fam.entry((i, pv.clone(), row[i])).or_insert(0) += 1;
            *pa.entry((i, pv)).or_insert(0) += 1;
        }
    }
    (fam, pa)
}

/// Σ_rows log₂ θ̂(x_i | π_i) with θ̂ the empirical conditional frequencies,
/// summed row by row.
pub fn direct_ml_loglik(g: &Structure, data: &Dataset) -> f64 {
    let (fam, pa) = family_counts(g, data);
    data.rows()
        .map(|row| {
            (0..g.len())
                .map(|i| {
                    let pv: Vec<usize> = g.parents(i).iter().map(|&p| row[p]).collect();
                    let c = fam[&(i, pv.clone(), row[i])] as f64;
                    let n = pa[&(i, pv)] as f64;
                    (c / n).log2()
                })
                .sum::<f64>()
        })
        .sum()
}

/// D(P̂ ‖ P_{G,ω}) summed over the observed assignments.
pub fn direct_kl_to_ml(g: &Structure, data: &Dataset) -> f64 {
    let (fam, pa) = family_counts(g, data);
    let mut emp: HashMap<Vec<usize>, u64> = HashMap::new();
    for row in data.rows() {
        *emp.entry(row.to_vec()).or_insert(0) += 1;
    }
    let n = data.n_rows() as f64;
    emp.iter()
        .map(|(u, &c)| {
            let p_hat = c as f64 / n;
            let p_g: f64 = (0..g.len())
                .map(|i| {
                    let pv: Vec<usize> = g.parents(i).iter().map(|&p| u[p]).collect();
                    fam[&(i, pv.clone(), u[i])] as f64 / pa[&(i, pv)] as f64
                })
                .product();
            p_hat * (p_hat / p_g).log2()
        })
        .sum()
}

/// Σ (r_i − 1)·q_i written out directly.
pub fn direct_param_count(g: &Structure) -> u64 {
    let s = g.schema();
    (0..g.len())
        .map(|i| {
            let q: usize = g.parents(i).iter().map(|&p| s.cardinality(p)).product();
            ((s.cardinality(i) - 1) * q) as u64
        })
        .sum()
}

/// A random DAG: random variable order, each forward pair an edge with
/// probability `p_edge`.
pub fn random_structure(schema: &Arc<Schema>, p_edge: f64, r: &mut impl Rng) -> Structure {
    let n = schema.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(r);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.gen_bool(p_edge) {
                edges.push((order[a], order[b]));
            }
        }
    }
    Structure::from_edges(schema.clone(), &edges).unwrap()
}

/// A random sub-structure keeping each edge of `g` with probability ½.
pub fn random_substructure(g: &Structure, r: &mut impl Rng) -> Structure {
    let edges: Vec<(usize, usize)> = g.edges().into_iter().filter(|_| r.gen_bool(0.5)).collect();
    Structure::from_edges(g.schema().clone(), &edges).unwrap()
}

/// `n_rows` rows (≥ ‖U‖) covering every cell of the domain at least once,
/// the rest uniform, in shuffled order.
pub fn full_support_rows(schema: &Arc<Schema>, n_rows: usize, r: &mut impl Rng) -> Dataset {
    let size = schema.joint_size().unwrap();
    assert!(n_rows >= size);
    let mut rows: Vec<Vec<usize>> = (0..size).map(|k| schema.decode(k)).collect();
    while rows.len() < n_rows {
        rows.push(schema.decode(r.gen_range(0..size)));
    }
    rows.shuffle(r);
    Dataset::new(schema.clone(), rows).unwrap()
}

/// Uniformly random rows (support not guaranteed).
pub fn random_rows(schema: &Arc<Schema>, n_rows: usize, r: &mut impl Rng) -> Dataset {
    let rows = (0..n_rows)
        .map(|_| {
            (0..schema.len())
                .map(|i| r.gen_range(0..schema.cardinality(i)))
                .collect()
        })
        .collect::<Vec<Vec<usize>>>();
    Dataset::new(schema.clone(), rows).unwrap()
}

/// A random point in the interior of the probability simplex.
pub fn random_distribution(k: usize, r: &mut impl Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| r.gen_range(1e-3..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, qi)| pi * (pi / qi).log2())
        .sum()
}
