//! Dense joint distributions over the full domain of a schema, with the
//! information-theoretic quantities used throughout: entropies (bits),
//! entropy distance, L1 distance, skewness and maximum-likelihood fitting.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::network::{BayesNet, Dataset, Schema, Structure};

/// Default cap on ‖U‖ for dense tables.
pub const DEFAULT_TABLE_CAPACITY: usize = 1 << 20;

const TABLE_SUM_TOLERANCE: f64 = 1e-9;

/// √(2 ln 2), the constant of the Pinsker-type bound.
pub fn pinsker_z() -> f64 {
    (2.0 * std::f64::consts::LN_2).sqrt()
}

/// A probability table over val(U), indexed by mixed-radix assignment code.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    schema: Arc<Schema>,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn new(schema: Arc<Schema>, probs: Vec<f64>) -> Result<Self> {
        let size = schema
            .joint_size()
            .ok_or_else(|| Error::capacity("joint domain size overflows"))?;
        if probs.len() != size {
            return Err(Error::input(format!(
                "table has {} entries, domain has {size}",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::input("table has a negative or non-finite entry"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > TABLE_SUM_TOLERANCE {
            return Err(Error::input(format!("table sums to {sum}")));
        }
        Ok(JointTable { schema, probs })
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, assignment: &[usize]) -> f64 {
        self.probs[self.schema.encode(assignment)]
    }

    /// The empirical distribution P̂ of `data`.
    pub fn empirical(data: &Dataset) -> Result<Self> {
        data.require_nonempty()?;
        let schema = data.schema().clone();
        check_capacity(&schema, DEFAULT_TABLE_CAPACITY)?;
        let all: Vec<usize> = (0..schema.len()).collect();
        let n = data.n_rows() as f64;
        let probs = data
            .count_cells(&all, None)
            .into_iter()
            .map(|c| c as f64 / n)
            .collect();
        Ok(JointTable { schema, probs })
    }

    /// P_B as a dense table.
    pub fn from_net(net: &BayesNet) -> Result<Self> {
        Self::from_net_with_capacity(net, DEFAULT_TABLE_CAPACITY)
    }

    pub fn from_net_with_capacity(net: &BayesNet, capacity: usize) -> Result<Self> {
        let schema = net.schema().clone();
        let size = check_capacity(&schema, capacity)?;
        let mut assignment = vec![0usize; schema.len()];
        let mut probs = Vec::with_capacity(size);
        for _ in 0..size {
            probs.push(net.joint_prob_unchecked(&assignment));
            increment(&schema, &mut assignment);
        }
        Ok(JointTable { schema, probs })
    }

    /// Marginal table over `vars` (in the given order).
    pub fn marginal(&self, vars: &[usize]) -> Vec<f64> {
        let size = self.schema.domain_size(vars).unwrap_or(0);
        let mut out = vec![0.0; size];
        let mut assignment = vec![0usize; self.schema.len()];
        for &p in &self.probs {
            let idx = vars.iter().fold(0, |acc, &v| {
                acc * self.schema.cardinality(v) + assignment[v]
            });
            out[idx] += p;
            increment(&self.schema, &mut assignment);
        }
        out
    }

    /// H(vars) in bits.
    pub fn entropy(&self, vars: &[usize]) -> f64 {
        entropy_bits(&self.marginal(vars))
    }

    /// H(targets | given) = H(targets ∪ given) − H(given), in bits.
    pub fn cond_entropy(&self, targets: &[usize], given: &[usize]) -> Result<f64> {
        let n = self.schema.len();
        let mut union = Vec::with_capacity(targets.len() + given.len());
        for &v in targets.iter().chain(given) {
            if v >= n {
                return Err(Error::input(format!("variable index {v} out of range")));
            }
            if union.contains(&v) {
                return Err(Error::input(format!(
                    "variable {} appears twice across targets and conditioning set",
                    self.schema.name(v)
                )));
            }
            union.push(v);
        }
        union.sort_unstable();
        let mut given_sorted = given.to_vec();
        given_sorted.sort_unstable();
        let h = self.entropy(&union) - self.entropy(&given_sorted);
        Ok(h.max(0.0))
    }

    /// D(self ‖ other) in bits; `+inf` if `other` misses part of the support.
    pub fn entropy_distance(&self, other: &JointTable) -> Result<f64> {
        self.same_schema(other)?;
        Ok(kl_bits(&self.probs, &other.probs))
    }

    /// Σ |P(x) − Q(x)|.
    pub fn l1_distance(&self, other: &JointTable) -> Result<f64> {
        self.same_schema(other)?;
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(p, q)| (p - q).abs())
            .sum())
    }

    /// `(min over all cells, min over positive cells)`.
    pub fn skewness(&self) -> (f64, f64) {
        let m_all = self.probs.iter().copied().fold(f64::INFINITY, f64::min);
        let m_pos = self
            .probs
            .iter()
            .copied()
            .filter(|&p| p > 0.0)
            .fold(f64::INFINITY, f64::min);
        (m_all, m_pos)
    }

    fn same_schema(&self, other: &JointTable) -> Result<()> {
        if self.schema == other.schema {
            Ok(())
        } else {
            Err(Error::input("tables are over different schemas"))
        }
    }
}

fn check_capacity(schema: &Schema, capacity: usize) -> Result<usize> {
    match schema.joint_size() {
        Some(size) if size <= capacity => Ok(size),
        _ => Err(Error::capacity(format!(
            "joint domain exceeds dense table capacity {capacity}"
        ))),
    }
}

fn increment(schema: &Schema, assignment: &mut [usize]) {
    for i in (0..assignment.len()).rev() {
        assignment[i] += 1;
        if assignment[i] < schema.cardinality(i) {
            return;
        }
        assignment[i] = 0;
    }
}

/// Shannon entropy of a probability vector, bits, with 0·log 0 = 0.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// Σ p log₂(p/q) with the usual conventions for zero entries.
pub fn kl_bits(p: &[f64], q: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            d += pi * (pi / qi).log2();
        }
    }
    d.max(0.0)
}

/// Maximum-likelihood parameters θ(x|π) = P̂(x|π) for structure `g`.
/// Parent configurations never seen in `data` get the uniform vector.
pub fn ml_parameters(g: &Structure, data: &Dataset) -> Result<BayesNet> {
    data.require_nonempty()?;
    if g.schema() != data.schema() {
        return Err(Error::input("structure and dataset schemas differ"));
    }
    let schema = g.schema();
    let cpts = (0..g.len())
        .map(|i| {
            let mut family: Vec<usize> = g.parents(i).to_vec();
            family.push(i);
            let r = schema.cardinality(i);
            let counts = data.count_cells(&family, None);
            counts
                .chunks(r)
                .flat_map(|row| {
                    let total: u64 = row.iter().sum();
                    row.iter().map(move |&c| {
                        if total == 0 {
                            1.0 / r as f64
                        } else {
                            c as f64 / total as f64
                        }
                    })
                })
                .collect()
        })
        .collect();
    BayesNet::new(g.clone(), cpts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_binary() -> Arc<Schema> {
        Arc::new(Schema::binary(2).unwrap())
    }

    fn four_rows() -> Dataset {
        Dataset::new(
            two_binary(),
            vec![vec![0, 0], vec![0, 1], vec![0, 0], vec![1, 1]],
        )
        .unwrap()
    }

    fn table(probs: &[f64]) -> JointTable {
        let n = probs.len().trailing_zeros() as usize;
        JointTable::new(Arc::new(Schema::binary(n).unwrap()), probs.to_vec()).unwrap()
    }

    #[test]
    fn empirical_counts() {
        let t = JointTable::empirical(&four_rows()).unwrap();
        assert_eq!(t.probs(), &[0.5, 0.25, 0.0, 0.25]);
        let empty = Dataset::new(two_binary(), Vec::<Vec<usize>>::new()).unwrap();
        assert!(JointTable::empirical(&empty).is_err());
    }

    #[test]
    fn net_table() {
        let g = Structure::from_edges(two_binary(), &[(0, 1)]).unwrap();
        let net = BayesNet::new(g, vec![vec![0.7, 0.3], vec![0.8, 0.2, 0.1, 0.9]]).unwrap();
        let t = JointTable::from_net(&net).unwrap();
        let expected = [0.56, 0.14, 0.03, 0.27];
        for (a, b) in t.probs().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let (m_all, m_pos) = t.skewness();
        assert!((m_all - 0.03).abs() < 1e-15 && (m_pos - 0.03).abs() < 1e-15);
    }

    #[test]
    fn net_table_capacity() {
        let schema = Arc::new(Schema::binary(21).unwrap());
        let net = BayesNet::new(Structure::empty(schema), vec![vec![0.5, 0.5]; 21]).unwrap();
        assert!(JointTable::from_net(&net).unwrap_err().is_capacity());
    }

    #[test]
    fn conditional_entropies() {
        let uniform = table(&[0.25; 4]);
        assert!((uniform.cond_entropy(&[0], &[1]).unwrap() - 1.0).abs() < 1e-12);
        let t = table(&[0.5, 0.25, 0.0, 0.25]);
        assert!((t.cond_entropy(&[0], &[]).unwrap() - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert!((t.cond_entropy(&[1], &[0]).unwrap() - 0.688_721_875_540_867_2).abs() < 1e-12);
        assert!(t.cond_entropy(&[0], &[0]).is_err());
    }

    #[test]
    fn distances() {
        let p = table(&[0.5, 0.5]);
        let q = table(&[0.25, 0.75]);
        assert_eq!(p.entropy_distance(&p).unwrap(), 0.0);
        assert!((p.entropy_distance(&q).unwrap() - 0.207_518_749_639_421_85).abs() < 1e-12);
        let point = table(&[1.0, 0.0]);
        assert!((point.entropy_distance(&p).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(p.entropy_distance(&point).unwrap(), f64::INFINITY);
        assert_eq!(p.l1_distance(&p).unwrap(), 0.0);
        assert_eq!(point.l1_distance(&table(&[0.0, 1.0])).unwrap(), 2.0);
        assert_eq!(p.l1_distance(&q).unwrap(), 0.5);
        assert!(p.l1_distance(&table(&[0.25; 4])).is_err());
    }

    #[test]
    fn skewness_values() {
        assert_eq!(table(&[0.25; 4]).skewness(), (0.25, 0.25));
        assert_eq!(table(&[0.5, 0.25, 0.0, 0.25]).skewness(), (0.0, 0.25));
    }

    #[test]
    fn ml_parameter_counting() {
        let data = four_rows();
        let g = Structure::from_edges(two_binary(), &[(0, 1)]).unwrap();
        let net = ml_parameters(&g, &data).unwrap();
        assert_eq!(net.cpt(0), &[0.75, 0.25]);
        assert_eq!(net.cpt(1), &[2.0 / 3.0, 1.0 / 3.0, 0.0, 1.0]);
        let net = ml_parameters(&Structure::empty(two_binary()), &data).unwrap();
        assert_eq!(net.cpt(1), &[0.5, 0.5]);

        let no_x1 = Dataset::new(two_binary(), vec![vec![0, 0], vec![0, 1]]).unwrap();
        let net = ml_parameters(&g, &no_x1).unwrap();
        assert_eq!(net.cpt_row(1, 1), &[0.5, 0.5]);
    }
}
