//! Structure learning by maximizing the penalized score.
//!
//! * [`learn_exhaustive`] scores every DAG (n ≤ enumeration limit).
//! * [`learn_greedy`] hill-climbs with single-edge add/delete/reverse moves.
//! * [`learn_subsampled`] runs the exhaustive search but estimates each
//!   family's conditional entropy from a uniform sub-sample whose size comes
//!   from the entropy concentration bound ([`family_sample_size`]).
//!
//! Ties are broken by smaller |G|, then by earlier canonical order (for the
//! exhaustive searches) or earlier restart (greedy).

use std::collections::HashMap;

use rand::seq::index;
use rand::Rng;

use crate::bounds::entropy_deviation_log2_bound;
use crate::dag::{self, DEFAULT_ENUMERATION_LIMIT};
use crate::error::{Error, Result};
use crate::network::{BayesNet, Dataset, Schema, Structure};
use crate::rng;
use crate::score::{
    count_term, ll_from_masks, mask_vars, FamilyTerms, FullDataTerms, Penalty, ScoreReport, Term,
};
use crate::table::ml_parameters;

/// Rows used to estimate family skewness when none is supplied.
pub const PILOT_ROWS: usize = 4096;

const PILOT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnMode {
    Exhaustive,
    Greedy,
    Subsampled,
}

impl std::fmt::Display for LearnMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LearnMode::Exhaustive => "exhaustive",
            LearnMode::Greedy => "greedy",
            LearnMode::Subsampled => "subsampled",
        })
    }
}

#[derive(Debug, Clone)]
pub struct LearnResult {
    /// Learned structure with maximum-likelihood parameters fit on the full
    /// dataset.
    pub net: BayesNet,
    pub report: ScoreReport,
    pub candidates_evaluated: u64,
    pub mode: LearnMode,
    /// Sub-sample size N_{X_i} used for each family of the learned structure.
    pub per_family_sample_sizes: Option<Vec<usize>>,
}

/// Parameters of the sub-sampled learner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsampleOptions {
    pub eps: f64,
    pub delta: f64,
    pub seed: u64,
    /// Known lower bound on every cell probability; estimated from a pilot
    /// sub-sample when absent.
    pub min_prob: Option<f64>,
}

fn param_count_masks(schema: &Schema, masks: &[u64]) -> u64 {
    masks
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let q: u64 = mask_vars(m)
                .iter()
                .map(|&p| schema.cardinality(p) as u64)
                .product();
            (schema.cardinality(i) as u64 - 1) * q
        })
        .sum()
}

fn check_search_input(data: &Dataset) -> Result<()> {
    data.require_nonempty()
}

struct Best {
    index: usize,
    ll: f64,
    score: f64,
    params: u64,
}

fn exhaustive_search<F: FamilyTerms>(
    terms: &mut F,
    schema: &Schema,
    list: &dag::DagList,
    psi: f64,
) -> Best {
    let mut scratch = Vec::new();
    let mut best: Option<Best> = None;
    for (k, masks) in list.iter().enumerate() {
        let ll = ll_from_masks(terms, masks, &mut scratch);
        let params = param_count_masks(schema, masks);
        let score = ll - params as f64 * psi;
        let better = match &best {
            None => true,
            Some(b) => score > b.score || (score == b.score && params < b.params),
        };
        if better {
            best = Some(Best {
                index: k,
                ll,
                score,
                params,
            });
        }
    }
    best.expect("at least one DAG")
}

/// Exact argmax of the score over all DAGs, with the default enumeration
/// limit.
pub fn learn_exhaustive(data: &Dataset, penalty: Penalty) -> Result<LearnResult> {
    learn_exhaustive_with_limit(data, penalty, DEFAULT_ENUMERATION_LIMIT)
}

pub fn learn_exhaustive_with_limit(
    data: &Dataset,
    penalty: Penalty,
    limit: usize,
) -> Result<LearnResult> {
    check_search_input(data)?;
    let schema = data.schema();
    let list = dag::dag_masks(schema.len(), limit)?;
    let psi = penalty.weight(data.n_rows() as u64)?;
    let mut terms = FullDataTerms::new(data);
    let best = exhaustive_search(&mut terms, schema, &list, psi);
    let g = Structure::from_masks_unchecked(schema.clone(), list.get(best.index));
    debug_assert_eq!(g.param_count(), best.params);
    Ok(LearnResult {
        net: ml_parameters(&g, data)?,
        report: ScoreReport::new(g, best.ll, psi),
        candidates_evaluated: list.len() as u64,
        mode: LearnMode::Exhaustive,
        per_family_sample_sizes: None,
    })
}

/// Greedy hill-climbing from the empty graph plus `restarts − 1` random
/// starting DAGs. Each climb takes the best strictly improving single-edge
/// move until none is left.
pub fn learn_greedy(
    data: &Dataset,
    penalty: Penalty,
    restarts: usize,
    seed: u64,
) -> Result<LearnResult> {
    if restarts < 1 {
        return Err(Error::input("restarts must be >= 1"));
    }
    check_search_input(data)?;
    let schema = data.schema().clone();
    let n = schema.len();
    let psi = penalty.weight(data.n_rows() as u64)?;
    let mut terms = FullDataTerms::new(data);
    let mut scratch = Vec::new();
    let mut evaluated = 0u64;
    let mut eval = |masks: &[u64], evaluated: &mut u64| {
        *evaluated += 1;
        let ll = ll_from_masks(&mut terms, masks, &mut scratch);
        let params = param_count_masks(&schema, masks);
        (ll, ll - params as f64 * psi, params)
    };

    let mut best: Option<(Vec<u64>, f64, f64, u64)> = None;
    for restart in 0..restarts {
        let mut current = if restart == 0 {
            vec![0u64; n]
        } else {
            random_dag(n, &mut rng::stream(seed, restart as u64))
        };
        let (mut ll, mut sc, mut params) = eval(&current, &mut evaluated);
        loop {
            let mut step: Option<(Vec<u64>, f64, f64, u64)> = None;
            for from in 0..n {
                for to in 0..n {
                    if from == to {
                        continue;
                    }
                    let Some(cand) = apply_move(&current, from, to) else {
                        continue;
                    };
                    let (cll, csc, cp) = eval(&cand, &mut evaluated);
                    let threshold = step.as_ref().map_or(sc, |s| s.2);
                    if csc > threshold {
                        step = Some((cand, cll, csc, cp));
                    }
                }
            }
            match step {
                Some((cand, cll, csc, cp)) => {
                    current = cand;
                    ll = cll;
                    sc = csc;
                    params = cp;
                }
                None => break,
            }
        }
        let better = match &best {
            None => true,
            Some((_, _, bs, bp)) => sc > *bs || (sc == *bs && params < *bp),
        };
        if better {
            best = Some((current, ll, sc, params));
        }
    }
    let (masks, ll, _, _) = best.expect("restarts >= 1");
    let g = Structure::from_masks_unchecked(schema, &masks);
    Ok(LearnResult {
        net: ml_parameters(&g, data)?,
        report: ScoreReport::new(g, ll, psi),
        candidates_evaluated: evaluated,
        mode: LearnMode::Greedy,
        per_family_sample_sizes: None,
    })
}

/// The single-edge move on the pair `(from, to)`: delete or reverse an
/// existing `from -> to`, or add it when absent. `None` if the result
/// would be cyclic. Moves for `from -> to` present are deletion; reversal is
/// reached through the pair `(to, from)` below.
fn apply_move(masks: &[u64], from: usize, to: usize) -> Option<Vec<u64>> {
    let mut out = masks.to_vec();
    if masks[to] >> from & 1 == 1 {
        out[to] &= !(1 << from);
        return Some(out);
    }
    if masks[from] >> to & 1 == 1 {
        // reverse to -> from into from -> to
        out[from] &= !(1 << to);
    }
    if dag::reaches(&out, to, from) {
        return None;
    }
    out[to] |= 1 << from;
    Some(out)
}

fn random_dag(n: usize, rng: &mut rng::StreamRng) -> Vec<u64> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut masks = vec![0u64; n];
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.5) {
                masks[order[b]] |= 1 << order[a];
            }
        }
    }
    masks
}

/// Smallest N with (N+1)^card · 2^(−N·eps²/(3·log₂(1/m))) ≤ delta: enough
/// samples to estimate the entropy of a `card`-valued variable (all cell
/// probabilities ≥ m) within `eps` bits with confidence `1 − delta`.
pub fn family_sample_size(family_card: usize, m: f64, eps: f64, delta: f64) -> Result<u64> {
    if family_card < 2 {
        return Err(Error::input("family cardinality must be >= 2"));
    }
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::input(format!("eps must lie in (0, 1/4), got {eps}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::input(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if !(m > 0.0 && m <= 1.0 / family_card as f64) {
        return Err(Error::input(format!(
            "m must lie in (0, 1/{family_card}], got {m}"
        )));
    }
    Ok(family_sample_size_unchecked(family_card, m, eps, delta))
}

fn family_sample_size_unchecked(card: usize, m: f64, eps: f64, delta: f64) -> u64 {
    let target = delta.log2();
    let ok = |n: u64| entropy_deviation_log2_bound(n, card, m, eps) <= target;
    // log2 bound is concave in N and positive at 0, so the feasible set is
    // [N*, ∞).
    let mut hi = 1u64;
    while !ok(hi) {
        hi = hi.checked_mul(2).expect("sample size overflow");
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Entropy (bits) of the marginal over `vars`, estimated from `size` rows
/// drawn uniformly without replacement.
pub fn subsampled_entropy(
    data: &Dataset,
    vars: &[usize],
    size: usize,
    rng: &mut rng::StreamRng,
) -> Result<f64> {
    if size == 0 || size > data.n_rows() {
        return Err(Error::input(format!(
            "sub-sample size {size} outside 1..={}",
            data.n_rows()
        )));
    }
    let rows = index::sample(rng, data.n_rows(), size).into_vec();
    let k = size as f64;
    Ok(k.log2() - count_term(data, vars, Some(&rows)) / k)
}

struct FamilyEstimate {
    size: usize,
    source: u64,
    fam_value: f64,
    pa_value: f64,
}

struct SubsampledTerms<'a> {
    data: &'a Dataset,
    full: FullDataTerms<'a>,
    pilot: Vec<usize>,
    eps_term: f64,
    delta_term: f64,
    opts: SubsampleOptions,
    families: HashMap<(usize, u64), FamilyEstimate>,
}

impl<'a> SubsampledTerms<'a> {
    fn new(data: &'a Dataset, opts: SubsampleOptions) -> Self {
        let n = data.schema().len() as f64;
        let pilot_size = data.n_rows().min(PILOT_ROWS);
        let pilot = if opts.min_prob.is_some() {
            Vec::new()
        } else {
            index::sample(
                &mut rng::stream(opts.seed, PILOT_STREAM),
                data.n_rows(),
                pilot_size,
            )
            .into_vec()
        };
        SubsampledTerms {
            data,
            full: FullDataTerms::new(data),
            pilot,
            eps_term: opts.eps / (2.0 * n),
            delta_term: opts.delta / (2.0 * n),
            opts,
            families: HashMap::new(),
        }
    }

    /// Skewness used to size the estimate of H(vars).
    fn skewness(&self, vars: &[usize], card: usize) -> f64 {
        let ceiling = 1.0 / card as f64;
        let m = match self.opts.min_prob {
            Some(m) => m,
            None => {
                let counts = self.data.count_cells(vars, Some(&self.pilot));
                let min_pos = counts.iter().copied().filter(|&c| c > 0).min().unwrap_or(1);
                let est = min_pos as f64 / self.pilot.len() as f64;
                est.max(0.5 / self.data.n_rows() as f64)
            }
        };
        m.min(ceiling)
    }

    fn term_size(&self, vars: &[usize]) -> u64 {
        if vars.is_empty() {
            return 0;
        }
        let card = self
            .data
            .schema()
            .domain_size(vars)
            .expect("family domain fits");
        let m = self.skewness(vars, card);
        family_sample_size_unchecked(card, m, self.eps_term, self.delta_term)
    }

    fn estimate(&mut self, child: usize, parents: u64) -> &FamilyEstimate {
        if !self.families.contains_key(&(child, parents)) {
            let n_rows = self.data.n_rows();
            let fam = parents | 1 << child;
            let fam_vars = mask_vars(fam);
            let pa_vars = mask_vars(parents);
            let needed = self.term_size(&fam_vars).max(self.term_size(&pa_vars));
            let est = if needed >= n_rows as u64 {
                FamilyEstimate {
                    size: n_rows,
                    source: 0,
                    fam_value: self.full.term(fam),
                    pa_value: self.full.term(parents),
                }
            } else {
                let size = needed as usize;
                let source = family_stream(child, parents);
                let rows = index::sample(&mut rng::stream(self.opts.seed, source), n_rows, size)
                    .into_vec();
                let scale = n_rows as f64 / size as f64;
                FamilyEstimate {
                    size,
                    source,
                    fam_value: scale * count_term(self.data, &fam_vars, Some(&rows)),
                    pa_value: scale * count_term(self.data, &pa_vars, Some(&rows)),
                }
            };
            self.families.insert((child, parents), est);
        }
        &self.families[&(child, parents)]
    }
}

fn family_stream(child: usize, parents: u64) -> u64 {
    1 + ((child as u64) << 48 | parents)
}

impl FamilyTerms for SubsampledTerms<'_> {
    fn push_family(&mut self, child: usize, parents: u64, out: &mut Vec<Term>) {
        let est = self.estimate(child, parents);
        out.push(Term {
            source: est.source,
            mask: parents | 1 << child,
            coef: 1,
            value: est.fam_value,
        });
        out.push(Term {
            source: est.source,
            mask: parents,
            coef: -1,
            value: est.pa_value,
        });
    }
}

/// Exhaustive search where each family term comes from a sub-sample of size
/// N_{X_i}, sized with per-term budgets (eps/2n, delta/2n) and capped at N.
pub fn learn_subsampled(
    data: &Dataset,
    penalty: Penalty,
    opts: &SubsampleOptions,
) -> Result<LearnResult> {
    learn_subsampled_with_limit(data, penalty, opts, DEFAULT_ENUMERATION_LIMIT)
}

pub fn learn_subsampled_with_limit(
    data: &Dataset,
    penalty: Penalty,
    opts: &SubsampleOptions,
    limit: usize,
) -> Result<LearnResult> {
    check_search_input(data)?;
    let schema = data.schema().clone();
    let n = schema.len();
    let eps_term = opts.eps / (2.0 * n as f64);
    if !(opts.eps > 0.0 && eps_term < 0.25) {
        return Err(Error::input(format!(
            "eps {} gives per-term budget {eps_term}, which must lie in (0, 1/4)",
            opts.eps
        )));
    }
    if !(opts.delta > 0.0 && opts.delta < 1.0) {
        return Err(Error::input(format!(
            "delta must lie in (0, 1), got {}",
            opts.delta
        )));
    }
    if let Some(m) = opts.min_prob {
        if !(m > 0.0 && m <= 1.0) {
            return Err(Error::input(format!(
                "min probability must lie in (0, 1], got {m}"
            )));
        }
    }
    let list = dag::dag_masks(n, limit)?;
    let psi = penalty.weight(data.n_rows() as u64)?;
    let mut terms = SubsampledTerms::new(data, *opts);
    let best = exhaustive_search(&mut terms, &schema, &list, psi);
    let masks = list.get(best.index);
    let sizes = masks
        .iter()
        .enumerate()
        .map(|(i, &pm)| terms.estimate(i, pm).size)
        .collect();
    let g = Structure::from_masks_unchecked(schema, masks);
    Ok(LearnResult {
        net: ml_parameters(&g, data)?,
        report: ScoreReport::new(g, best.ll, psi),
        candidates_evaluated: list.len() as u64,
        mode: LearnMode::Subsampled,
        per_family_sample_sizes: Some(sizes),
    })
}
