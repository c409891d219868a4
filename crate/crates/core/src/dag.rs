//! Enumeration of all labeled DAGs over a small variable set.
//!
//! DAGs are produced in lexicographic order of the row-major flattened
//! adjacency relation `a[0][1], a[0][2], .., a[n-1][n-2]` (diagonal
//! excluded), where `a[i][j] = 1` means `i -> j`. The empty graph comes first.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::network::{Schema, Structure};

pub const DEFAULT_ENUMERATION_LIMIT: usize = 5;

/// All DAGs over `n` nodes as per-node parent masks, `n` masks per DAG.
#[derive(Debug)]
pub struct DagList {
    n: usize,
    masks: Vec<u64>,
}

impl DagList {
    pub fn len(&self) -> usize {
        self.masks.len().checked_div(self.n).unwrap_or(1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, k: usize) -> &[u64] {
        &self.masks[k * self.n..(k + 1) * self.n]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u64]> + '_ {
        (0..self.len()).map(move |k| self.get(k))
    }
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<DagList>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<DagList>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Parent-mask listing of every DAG on `n` nodes, memoized per `n`.
pub fn dag_masks(n: usize, limit: usize) -> Result<Arc<DagList>> {
    if n > limit {
        return Err(Error::capacity(format!(
            "DAG enumeration over {n} variables exceeds limit {limit}"
        )));
    }
    if let Some(hit) = cache().lock().unwrap().get(&n) {
        return Ok(hit.clone());
    }
    let list = Arc::new(generate(n));
    cache().lock().unwrap().insert(n, list.clone());
    Ok(list)
}

fn generate(n: usize) -> DagList {
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut parents = vec![0u64; n];
    let mut masks = Vec::new();
    extend(&slots, 0, &mut parents, &mut masks);
    DagList { n, masks }
}

// Depth-first over adjacency slots, 0 before 1, pruning any edge that closes
// a cycle. Acyclic partial graphs always extend, so every leaf is a DAG.
fn extend(slots: &[(usize, usize)], k: usize, parents: &mut [u64], out: &mut Vec<u64>) {
    if k == slots.len() {
        out.extend_from_slice(parents);
        return;
    }
    extend(slots, k + 1, parents, out);
    let (from, to) = slots[k];
    if !reaches(parents, to, from) {
        parents[to] |= 1 << from;
        extend(slots, k + 1, parents, out);
        parents[to] &= !(1 << from);
    }
}

/// Whether `target` is reachable from `start` along directed edges.
pub(crate) fn reaches(parents: &[u64], start: usize, target: usize) -> bool {
    if start == target {
        return true;
    }
    let mut seen = 1u64 << start;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for (c, &pm) in parents.iter().enumerate() {
            if pm >> v & 1 == 1 && seen >> c & 1 == 0 {
                if c == target {
                    return true;
                }
                seen |= 1 << c;
                stack.push(c);
            }
        }
    }
    false
}

/// Every labeled DAG over `schema`, in canonical order.
pub fn enumerate_dags(schema: &Arc<Schema>) -> Result<Vec<Structure>> {
    enumerate_dags_with_limit(schema, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_dags_with_limit(schema: &Arc<Schema>, limit: usize) -> Result<Vec<Structure>> {
    let list = dag_masks(schema.len(), limit)?;
    Ok(list
        .iter()
        .map(|m| Structure::from_masks_unchecked(schema.clone(), m))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let counts: Vec<usize> = (0..=4).map(|n| dag_masks(n, 5).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 25, 543]);
    }

    #[test]
    fn two_node_order() {
        let s = Arc::new(Schema::binary(2).unwrap());
        let dags = enumerate_dags(&s).unwrap();
        let lists: Vec<String> = dags.iter().map(Structure::edge_list_string).collect();
        assert_eq!(lists, vec!["", "X1->X0", "X0->X1"]);
    }

    #[test]
    fn limit_is_enforced() {
        let s = Arc::new(Schema::binary(6).unwrap());
        let err = enumerate_dags(&s).unwrap_err();
        assert!(err.is_capacity());
        assert!(dag_masks(2, 1).unwrap_err().is_capacity());
    }
}
