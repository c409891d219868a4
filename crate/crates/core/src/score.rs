//! Penalized MDL scores S_ψ(G) = LL(G) − |G|·ψ(N).
//!
//! The log-likelihood of a structure with maximum-likelihood parameters is
//! computed from counts, never row by row:
//!
//! ```text
//! LL(G) = −N Σ_i H(X_i | Π_i) = Σ_i [A(X_i ∪ Π_i) − A(Π_i)],   A(S) = Σ_cells c·log₂ c
//! ```
//!
//! with A(∅) = N·log₂ N. Terms are keyed by variable set and summed after
//! cancelling identical keys, in key order. Markov-equivalent structures
//! therefore get bitwise-identical log-likelihoods, so score ties are exact.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::network::{Dataset, Structure};

/// Per-parameter penalty weight ψ(N).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    /// ψ(N) = c (AIC-style).
    Constant(f64),
    /// ψ(N) = ½·log₂ N (BIC).
    HalfLog,
    /// ψ(N) = N^α, 0 < α < 1.
    Polynomial(f64),
}

impl Penalty {
    pub fn constant(c: f64) -> Result<Self> {
        if c > 0.0 && c.is_finite() {
            Ok(Penalty::Constant(c))
        } else {
            Err(Error::input(format!(
                "constant penalty must be positive, got {c}"
            )))
        }
    }

    pub fn polynomial(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Penalty::Polynomial(alpha))
        } else {
            Err(Error::input(format!(
                "polynomial exponent must lie in (0, 1), got {alpha}"
            )))
        }
    }

    pub fn weight(&self, n_samples: u64) -> Result<f64> {
        if n_samples < 1 {
            return Err(Error::input("penalty weight needs N >= 1"));
        }
        Ok(self.weight_f64(n_samples as f64))
    }

    pub(crate) fn weight_f64(&self, n: f64) -> f64 {
        match *self {
            Penalty::Constant(c) => c,
            Penalty::HalfLog => 0.5 * n.log2(),
            Penalty::Polynomial(alpha) => n.powf(alpha),
        }
    }
}

impl fmt::Display for Penalty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Penalty::Constant(c) => write!(f, "const:{c}"),
            Penalty::HalfLog => write!(f, "bic"),
            Penalty::Polynomial(a) => write!(f, "poly:{a}"),
        }
    }
}

impl FromStr for Penalty {
    type Err = Error;

    /// `const:<c>`, `bic` or `poly:<alpha>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::input(format!(
                "malformed penalty {s:?} (expected const:<c>, bic or poly:<alpha>)"
            ))
        };
        if s == "bic" {
            return Ok(Penalty::HalfLog);
        }
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        let value: f64 = value.parse().map_err(|_| bad())?;
        match kind {
            "const" => Penalty::constant(value),
            "poly" => Penalty::polynomial(value),
            _ => Err(bad()),
        }
    }
}

/// Result of scoring one structure.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub structure: Structure,
    pub log_likelihood: f64,
    pub penalty_weight: f64,
    pub param_count: u64,
    pub score: f64,
}

impl ScoreReport {
    pub const CSV_HEADER: [&'static str; 5] = ["structure", "ll", "psi", "params", "score"];

    pub(crate) fn new(structure: Structure, log_likelihood: f64, penalty_weight: f64) -> Self {
        let param_count = structure.param_count();
        let score = log_likelihood - param_count as f64 * penalty_weight;
        ScoreReport {
            structure,
            log_likelihood,
            penalty_weight,
            param_count,
            score,
        }
    }

    pub fn csv_record(&self) -> [String; 5] {
        [
            self.structure.edge_list_string(),
            crate::experiments::fmt_float(self.log_likelihood),
            crate::experiments::fmt_float(self.penalty_weight),
            self.param_count.to_string(),
            crate::experiments::fmt_float(self.score),
        ]
    }
}

/// Outcome of [`compare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    FirstBetter,
    SecondBetter,
    Tie,
}

/// A(S) = Σ c·log₂ c over the cell counts of `vars`, optionally restricted
/// to a subset of rows.
pub(crate) fn count_term(data: &Dataset, vars: &[usize], rows: Option<&[usize]>) -> f64 {
    let xlogx = |c: u64| {
        let c = c as f64;
        c * c.log2()
    };
    match data.schema().domain_size(vars) {
        Some(size) if size <= 1 << 22 => data
            .count_cells(vars, rows)
            .into_iter()
            .filter(|&c| c > 1)
            .map(xlogx)
            .sum(),
        _ => {
            let mut map: HashMap<Vec<usize>, u64> = HashMap::new();
            let mut bump = |row: &[usize]| {
                *map.entry(vars.iter().map(|&v| row[v]).collect())
                    .or_default() += 1;
            };
            match rows {
                Some(rs) => rs.iter().for_each(|&j| bump(data.row(j))),
                None => data.rows().for_each(bump),
            }
            let mut counts: Vec<u64> = map.into_values().filter(|&c| c > 1).collect();
            counts.sort_unstable();
            counts.into_iter().map(xlogx).sum()
        }
    }
}

pub(crate) fn mask_vars(mask: u64) -> Vec<usize> {
    (0..64).filter(|&v| mask >> v & 1 == 1).collect()
}

/// A signed A-term. `source` 0 is the full dataset; other sources are
/// sub-samples.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Term {
    pub source: u64,
    pub mask: u64,
    pub coef: i32,
    pub value: f64,
}

/// Sums terms after merging equal `(source, mask)` keys, in key order.
pub(crate) fn combine_terms(terms: &mut [Term]) -> f64 {
    terms.sort_unstable_by_key(|t| (t.source, t.mask));
    let mut total = 0.0;
    let mut i = 0;
    while i < terms.len() {
        let key = (terms[i].source, terms[i].mask);
        let value = terms[i].value;
        let mut coef = 0;
        while i < terms.len() && (terms[i].source, terms[i].mask) == key {
            coef += terms[i].coef;
            i += 1;
        }
        if coef != 0 {
            total += coef as f64 * value;
        }
    }
    total
}

/// Supplies the signed A-terms of each family.
pub(crate) trait FamilyTerms {
    fn push_family(&mut self, child: usize, parents: u64, out: &mut Vec<Term>);
}

/// Full-data terms, memoized per variable set.
pub(crate) struct FullDataTerms<'a> {
    data: &'a Dataset,
    cache: HashMap<u64, f64>,
}

impl<'a> FullDataTerms<'a> {
    pub fn new(data: &'a Dataset) -> Self {
        FullDataTerms {
            data,
            cache: HashMap::new(),
        }
    }

    pub fn term(&mut self, mask: u64) -> f64 {
        let data = self.data;
        *self
            .cache
            .entry(mask)
            .or_insert_with(|| count_term(data, &mask_vars(mask), None))
    }
}

impl FamilyTerms for FullDataTerms<'_> {
    fn push_family(&mut self, child: usize, parents: u64, out: &mut Vec<Term>) {
        let fam = parents | 1 << child;
        out.push(Term {
            source: 0,
            mask: fam,
            coef: 1,
            value: self.term(fam),
        });
        out.push(Term {
            source: 0,
            mask: parents,
            coef: -1,
            value: self.term(parents),
        });
    }
}

/// LL of the structure given by per-variable parent masks.
pub(crate) fn ll_from_masks<F: FamilyTerms + ?Sized>(
    terms: &mut F,
    masks: &[u64],
    scratch: &mut Vec<Term>,
) -> f64 {
    scratch.clear();
    for (child, &pm) in masks.iter().enumerate() {
        terms.push_family(child, pm, scratch);
    }
    combine_terms(scratch)
}

pub(crate) fn check_inputs(g: &Structure, data: &Dataset) -> Result<()> {
    data.require_nonempty()?;
    if g.schema() != data.schema() {
        return Err(Error::input("structure and dataset schemas differ"));
    }
    Ok(())
}

/// LL(G) = −N Σ_i H_P̂(X_i | Π_i), in bits.
pub fn log_likelihood(g: &Structure, data: &Dataset) -> Result<f64> {
    check_inputs(g, data)?;
    let mut terms = FullDataTerms::new(data);
    Ok(ll_from_masks(
        &mut terms,
        &g.parent_masks(),
        &mut Vec::new(),
    ))
}

/// S_ψ(G) = LL(G) − |G|·ψ(N). The structure-description term is omitted.
pub fn score(g: &Structure, data: &Dataset, penalty: Penalty) -> Result<ScoreReport> {
    let ll = log_likelihood(g, data)?;
    let psi = penalty.weight(data.n_rows() as u64)?;
    Ok(ScoreReport::new(g.clone(), ll, psi))
}

pub fn compare(
    g1: &Structure,
    g2: &Structure,
    data: &Dataset,
    penalty: Penalty,
) -> Result<Preference> {
    let s1 = score(g1, data, penalty)?.score;
    let s2 = score(g2, data, penalty)?.score;
    Ok(if s1 > s2 {
        Preference::FirstBetter
    } else if s2 > s1 {
        Preference::SecondBetter
    } else {
        Preference::Tie
    })
}
