//! Discrete Bayesian networks: variable schemas, DAG structures, conditional
//! probability tables and complete datasets.
//!
//! Assignments are encoded in mixed radix with variable 0 as the most
//! significant digit, so over two binary variables `(X, Y)` the cell order is
//! `00, 01, 10, 11`. Parent configurations use the same convention over the
//! (sorted) parent list.

use std::collections::HashSet;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

/// Largest number of variables a structure may carry (parent sets are
/// tracked as 64-bit masks).
pub const MAX_VARIABLES: usize = 64;

/// Tolerance on the sum of a conditional probability vector.
pub const CPT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub cardinality: usize,
}

/// Ordered, named discrete variables. The order fixes variable indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    vars: Vec<Variable>,
}

impl Schema {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let vars: Vec<Variable> = vars
            .into_iter()
            .map(|(name, cardinality)| Variable {
                name: name.into(),
                cardinality,
            })
            .collect();
        if vars.len() > MAX_VARIABLES {
            return Err(Error::capacity(format!(
                "{} variables (limit {MAX_VARIABLES})",
                vars.len()
            )));
        }
        let mut seen = HashSet::new();
        for v in &vars {
            if v.name.is_empty() || v.name.chars().any(char::is_whitespace) {
                return Err(Error::input(format!("bad variable name {:?}", v.name)));
            }
            if v.cardinality < 2 {
                return Err(Error::input(format!(
                    "variable {} has cardinality {} (must be >= 2)",
                    v.name, v.cardinality
                )));
            }
            if !seen.insert(v.name.as_str()) {
                return Err(Error::input(format!("duplicate variable name {}", v.name)));
            }
        }
        Ok(Schema { vars })
    }

    /// `n` binary variables named `X0..X{n-1}`.
    pub fn binary(n: usize) -> Result<Self> {
        Schema::new((0..n).map(|i| (format!("X{i}"), 2)))
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vars[i].name
    }

    pub fn cardinality(&self, i: usize) -> usize {
        self.vars[i].cardinality
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Number of cells in the joint domain of `vars`, or `None` on overflow.
    pub fn domain_size(&self, vars: &[usize]) -> Option<usize> {
        vars.iter()
            .try_fold(1usize, |acc, &v| acc.checked_mul(self.vars[v].cardinality))
    }

    /// ‖U‖, the size of the full joint domain.
    pub fn joint_size(&self) -> Option<usize> {
        self.vars
            .iter()
            .try_fold(1usize, |acc, v| acc.checked_mul(v.cardinality))
    }

    pub fn check_assignment(&self, assignment: &[usize]) -> Result<()> {
        if assignment.len() != self.len() {
            return Err(Error::input(format!(
                "assignment has {} values, schema has {} variables",
                assignment.len(),
                self.len()
            )));
        }
        for (i, (&value, var)) in assignment.iter().zip(&self.vars).enumerate() {
            if value >= var.cardinality {
                return Err(Error::input(format!(
                    "value {value} out of range for variable {} (index {i}, cardinality {})",
                    var.name, var.cardinality
                )));
            }
        }
        Ok(())
    }

    /// Mixed-radix index of an in-range assignment.
    pub fn encode(&self, assignment: &[usize]) -> usize {
        assignment
            .iter()
            .zip(&self.vars)
            .fold(0, |acc, (&v, var)| acc * var.cardinality + v)
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for (slot, var) in out.iter_mut().zip(&self.vars).rev() {
            *slot = index % var.cardinality;
            index /= var.cardinality;
        }
        out
    }
}

/// A DAG over a schema, stored as sorted parent lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    schema: Arc<Schema>,
    parents: Vec<Vec<usize>>,
}

impl Structure {
    pub fn empty(schema: Arc<Schema>) -> Self {
        let parents = vec![Vec::new(); schema.len()];
        Structure { schema, parents }
    }

    pub fn new(schema: Arc<Schema>, mut parents: Vec<Vec<usize>>) -> Result<Self> {
        let n = schema.len();
        if parents.len() != n {
            return Err(Error::input(format!(
                "{} parent lists for {n} variables",
                parents.len()
            )));
        }
        for (child, ps) in parents.iter_mut().enumerate() {
            ps.sort_unstable();
            for w in ps.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::input(format!(
                        "duplicate parent {} of {}",
                        schema.name(w[0]),
                        schema.name(child)
                    )));
                }
            }
            for &p in ps.iter() {
                if p >= n {
                    return Err(Error::input(format!("parent index {p} out of range")));
                }
                if p == child {
                    return Err(Error::input(format!(
                        "variable {} is its own parent",
                        schema.name(child)
                    )));
                }
            }
        }
        let s = Structure { schema, parents };
        if s.try_topological_order().is_none() {
            return Err(Error::input("parent relation contains a cycle"));
        }
        Ok(s)
    }

    /// Builds a structure from `(parent, child)` edges.
    pub fn from_edges(schema: Arc<Schema>, edges: &[(usize, usize)]) -> Result<Self> {
        let mut parents = vec![Vec::new(); schema.len()];
        for &(from, to) in edges {
            if to >= schema.len() {
                return Err(Error::input(format!("child index {to} out of range")));
            }
            parents[to].push(from);
        }
        Structure::new(schema, parents)
    }

    /// Builds a structure from per-variable parent bitmasks. The masks must
    /// describe an acyclic relation.
    pub(crate) fn from_masks_unchecked(schema: Arc<Schema>, masks: &[u64]) -> Self {
        let parents = masks
            .iter()
            .map(|&m| (0..schema.len()).filter(|&p| m >> p & 1 == 1).collect())
            .collect();
        Structure { schema, parents }
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    pub fn parents(&self, child: usize) -> &[usize] {
        &self.parents[child]
    }

    pub fn parent_mask(&self, child: usize) -> u64 {
        self.parents[child].iter().fold(0, |m, &p| m | 1 << p)
    }

    pub fn parent_masks(&self) -> Vec<u64> {
        (0..self.len()).map(|i| self.parent_mask(i)).collect()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.parents[to].binary_search(&from).is_ok()
    }

    /// All `(parent, child)` edges, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self
            .parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, c)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    fn try_topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut children = vec![Vec::new(); n];
        for (c, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        let mut ready: Vec<usize> = (0..n).rev().filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for &c in children[v].iter().rev() {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(c);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn topological_order(&self) -> Vec<usize> {
        self.try_topological_order()
            .expect("structure invariant: acyclic")
    }

    /// Number of parent configurations of `child`.
    pub fn parent_configs(&self, child: usize) -> usize {
        self.parents[child]
            .iter()
            .map(|&p| self.schema.cardinality(p))
            .product()
    }

    /// |G|: the number of independent parameters, Σ (r_i − 1)·q_i.
    pub fn param_count(&self) -> u64 {
        (0..self.len())
            .map(|i| (self.schema.cardinality(i) as u64 - 1) * self.parent_configs(i) as u64)
            .sum()
    }

    /// True iff every edge of `self` is an edge of `other`.
    pub fn is_substructure_of(&self, other: &Structure) -> Result<bool> {
        if self.schema != other.schema {
            return Err(Error::input("structures are over different schemas"));
        }
        Ok(self
            .parents
            .iter()
            .zip(&other.parents)
            .all(|(a, b)| a.iter().all(|p| b.binary_search(p).is_ok())))
    }

    /// Index of `child`'s parent configuration within `assignment`.
    pub fn parent_config(&self, child: usize, assignment: &[usize]) -> usize {
        self.parents[child].iter().fold(0, |acc, &p| {
            acc * self.schema.cardinality(p) + assignment[p]
        })
    }

    /// Space-separated `A->B` edge list; empty for the empty graph.
    pub fn edge_list_string(&self) -> String {
        self.edges()
            .iter()
            .map(|&(p, c)| format!("{}->{}", self.schema.name(p), self.schema.name(c)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses the output of [`Structure::edge_list_string`].
    pub fn parse_edge_list(schema: Arc<Schema>, text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for tok in text.split(|c: char| c.is_whitespace() || c == ',' || c == ';') {
            if tok.is_empty() {
                continue;
            }
            let (a, b) = tok
                .split_once("->")
                .ok_or_else(|| Error::input(format!("bad edge {tok:?}")))?;
            let from = schema
                .index_of(a)
                .ok_or_else(|| Error::input(format!("unknown variable {a:?}")))?;
            let to = schema
                .index_of(b)
                .ok_or_else(|| Error::input(format!("unknown variable {b:?}")))?;
            edges.push((from, to));
        }
        Structure::from_edges(schema, &edges)
    }
}

/// A structure plus one probability vector per parent configuration of each
/// variable. CPT `i` is stored row-major: `[config][value]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet {
    structure: Structure,
    cpts: Vec<Vec<f64>>,
}

impl BayesNet {
    pub fn new(structure: Structure, cpts: Vec<Vec<f64>>) -> Result<Self> {
        let schema = structure.schema().clone();
        if cpts.len() != structure.len() {
            return Err(Error::input(format!(
                "{} CPTs for {} variables",
                cpts.len(),
                structure.len()
            )));
        }
        for (i, cpt) in cpts.iter().enumerate() {
            let r = schema.cardinality(i);
            let q = structure.parent_configs(i);
            if cpt.len() != r * q {
                return Err(Error::input(format!(
                    "CPT of {} has {} entries, expected {}",
                    schema.name(i),
                    cpt.len(),
                    r * q
                )));
            }
            for (cfg, row) in cpt.chunks(r).enumerate() {
                if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                    return Err(Error::input(format!(
                        "CPT of {} row {cfg} has a negative or non-finite entry",
                        schema.name(i)
                    )));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > CPT_SUM_TOLERANCE {
                    return Err(Error::input(format!(
                        "CPT of {} row {cfg} sums to {sum}",
                        schema.name(i)
                    )));
                }
            }
        }
        Ok(BayesNet { structure, cpts })
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn schema(&self) -> &Arc<Schema> {
        self.structure.schema()
    }

    pub fn cpt(&self, child: usize) -> &[f64] {
        &self.cpts[child]
    }

    pub fn cpt_row(&self, child: usize, config: usize) -> &[f64] {
        let r = self.schema().cardinality(child);
        &self.cpts[child][config * r..(config + 1) * r]
    }

    /// P_B(u) = ∏_i θ(x_i | π_i).
    pub fn joint_prob(&self, assignment: &[usize]) -> Result<f64> {
        self.schema().check_assignment(assignment)?;
        Ok(self.joint_prob_unchecked(assignment))
    }

    pub(crate) fn joint_prob_unchecked(&self, assignment: &[usize]) -> f64 {
        (0..self.structure.len())
            .map(|i| {
                let cfg = self.structure.parent_config(i, assignment);
                self.cpt_row(i, cfg)[assignment[i]]
            })
            .product()
    }

    /// Σ_j log₂ P_B(u_j), summed row by row. `-inf` if some row has
    /// probability zero.
    pub fn log_likelihood(&self, data: &Dataset) -> Result<f64> {
        if data.schema() != self.schema() {
            return Err(Error::input("dataset schema does not match network"));
        }
        Ok(data
            .rows()
            .map(|row| self.joint_prob_unchecked(row).log2())
            .sum())
    }

    /// Draws `n_rows` independent rows by ancestral sampling.
    pub fn sample(&self, n_rows: usize, seed: u64) -> Dataset {
        self.sample_with(n_rows, &mut rng::stream(seed, 0))
    }

    pub fn sample_with(&self, n_rows: usize, rng: &mut StreamRng) -> Dataset {
        let n = self.structure.len();
        let order = self.structure.topological_order();
        let mut values = vec![0usize; n_rows * n];
        for row in values.chunks_mut(n.max(1)).take(n_rows) {
            for &i in &order {
                let cfg = self.structure.parent_config(i, row);
                row[i] = draw_categorical(self.cpt_row(i, cfg), rng.gen::<f64>());
            }
        }
        Dataset {
            schema: self.schema().clone(),
            values,
            n_rows,
        }
    }
}

/// Inverse-CDF draw; `u` in [0, 1). Zero-probability values are never drawn.
fn draw_categorical(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (v, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_positive = v;
            if u < acc {
                return v;
            }
        }
    }
    last_positive
}

/// Complete, integer-coded rows over a schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    schema: Arc<Schema>,
    values: Vec<usize>,
    n_rows: usize,
}

impl Dataset {
    pub fn new(schema: Arc<Schema>, rows: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let mut values = Vec::new();
        let mut n_rows = 0;
        for (j, row) in rows.into_iter().enumerate() {
            schema
                .check_assignment(&row)
                .map_err(|e| Error::input(format!("row {j}: {e}")))?;
            values.extend_from_slice(&row);
            n_rows += 1;
        }
        Ok(Dataset {
            schema,
            values,
            n_rows,
        })
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows == 0
    }

    pub fn row(&self, j: usize) -> &[usize] {
        let n = self.schema.len();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> + '_ {
        (0..self.n_rows).map(move |j| self.row(j))
    }

    /// The rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let mut values = Vec::with_capacity(indices.len() * self.schema.len());
        for &j in indices {
            values.extend_from_slice(self.row(j));
        }
        Dataset {
            schema: self.schema.clone(),
            values,
            n_rows: indices.len(),
        }
    }

    /// Cell counts over `vars` (mixed radix in the given order), restricted
    /// to `rows` when given.
    pub(crate) fn count_cells(&self, vars: &[usize], rows: Option<&[usize]>) -> Vec<u64> {
        let size = self
            .schema
            .domain_size(vars)
            .expect("family domain fits in memory");
        let mut counts = vec![0u64; size];
        let mut bump = |row: &[usize]| {
            let idx = vars
                .iter()
                .fold(0, |acc, &v| acc * self.schema.cardinality(v) + row[v]);
            counts[idx] += 1;
        };
        match rows {
            Some(rs) => rs.iter().for_each(|&j| bump(self.row(j))),
            None => self.rows().for_each(bump),
        }
        counts
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::input("dataset is empty"))
        } else {
            Ok(())
        }
    }
}
