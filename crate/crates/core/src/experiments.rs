//! Seeded Monte Carlo harnesses: scaled learning curves, empirical checks
//! of the Sanov and entropy-concentration bounds, and a minimality probe.
//!
//! Trials run in parallel on rayon. Each `(grid point, trial)` pair owns the
//! child stream [`rng::trial_stream_id`] of the root seed, and results are
//! reduced in trial order with compensated summation, so output is
//! identical for any thread count.

use std::io::Write;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;

use crate::bounds::{entropy_deviation_bound, sanov_bound};
use crate::error::{Error, Result};
use crate::learn::{self, LearnMode, LearnResult, SubsampleOptions};
use crate::network::{BayesNet, Dataset};
use crate::rng;
use crate::score::{Penalty, ScoreReport};
use crate::table::{entropy_bits, JointTable};

/// Float formatting shared by every CSV emitter: 12 significant digits in
/// scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut it = values.into_iter();
    while let Some(v) = it.next() {
        if !v.is_finite() {
            // compensation would turn inf into NaN
            return it.fold(sum + comp + v, |a, b| a + b);
        }
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    if !mean.is_finite() {
        return (mean, f64::INFINITY);
    }
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, (ss / (k - 1.0)).sqrt())
}

/// A row type with a fixed CSV layout.
pub trait CsvRow {
    fn header() -> Vec<&'static str>;
    fn record(&self) -> Vec<String>;
}

pub fn write_csv<W: Write, R: CsvRow>(out: W, rows: &[R]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(R::header())?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()
}

/// Renders rows as a CSV document.
pub fn to_csv_string<R: CsvRow>(rows: &[R]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

impl CsvRow for ScoreReport {
    fn header() -> Vec<&'static str> {
        ScoreReport::CSV_HEADER.to_vec()
    }

    fn record(&self) -> Vec<String> {
        self.csv_record().to_vec()
    }
}

impl CsvRow for crate::bounds::Thm39Report {
    fn header() -> Vec<&'static str> {
        Self::CSV_HEADER.to_vec()
    }

    fn record(&self) -> Vec<String> {
        self.csv_record().to_vec()
    }
}

/// Learner used inside an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Learner {
    Exhaustive,
    Greedy {
        restarts: usize,
    },
    Subsampled {
        eps: f64,
        delta: f64,
        min_prob: Option<f64>,
    },
}

impl Learner {
    pub fn mode(&self) -> LearnMode {
        match self {
            Learner::Exhaustive => LearnMode::Exhaustive,
            Learner::Greedy { .. } => LearnMode::Greedy,
            Learner::Subsampled { .. } => LearnMode::Subsampled,
        }
    }

    pub fn run(&self, data: &Dataset, penalty: Penalty, seed: u64) -> Result<LearnResult> {
        match *self {
            Learner::Exhaustive => learn::learn_exhaustive(data, penalty),
            Learner::Greedy { restarts } => learn::learn_greedy(data, penalty, restarts, seed),
            Learner::Subsampled {
                eps,
                delta,
                min_prob,
            } => learn::learn_subsampled(
                data,
                penalty,
                &SubsampleOptions {
                    eps,
                    delta,
                    seed,
                    min_prob,
                },
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub target: BayesNet,
    /// Strictly increasing sample sizes, each ≥ 2.
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub penalty: Penalty,
    pub seed: u64,
    pub learner: Learner,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n_samples: usize,
    pub trials: usize,
    pub mean_kl: f64,
    pub std_kl: f64,
    /// mean_kl · N / log₂ N.
    pub scaled_error: f64,
}

impl CsvRow for CurvePoint {
    fn header() -> Vec<&'static str> {
        vec!["n", "trials", "mean_kl", "std_kl", "scaled_error"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.n_samples.to_string(),
            self.trials.to_string(),
            fmt_float(self.mean_kl),
            fmt_float(self.std_kl),
            fmt_float(self.scaled_error),
        ]
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < 1 {
        return Err(Error::input("trials must be >= 1"));
    }
    Ok(())
}

/// Per-trial errors D(P* ‖ P_learned) at one grid point.
pub fn trial_errors(
    cfg: &ExperimentConfig,
    target_table: &JointTable,
    grid_index: usize,
) -> Result<Vec<f64>> {
    let n = cfg.n_grid[grid_index];
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(cfg.seed, rng::trial_stream_id(grid_index, t));
            let data = cfg.target.sample_with(n, &mut r);
            let learned = cfg.learner.run(&data, cfg.penalty, r.gen())?;
            let table = JointTable::from_net(&learned.net)?;
            target_table.entropy_distance(&table)
        })
        .collect()
}

/// Mean learned-network error at each grid size, scaled by N / log₂ N.
pub fn learning_curve(cfg: &ExperimentConfig) -> Result<Vec<CurvePoint>> {
    check_trials(cfg.trials)?;
    if cfg.n_grid.is_empty() || cfg.n_grid[0] < 2 || cfg.n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input(
            "sample-size grid must be nonempty, strictly increasing and start at >= 2",
        ));
    }
    let target = JointTable::from_net(&cfg.target)?;
    (0..cfg.n_grid.len())
        .map(|gi| {
            let errs = trial_errors(cfg, &target, gi)?;
            let (mean_kl, std_kl) = mean_std(&errs);
            let n = cfg.n_grid[gi];
            Ok(CurvePoint {
                n_samples: n,
                trials: cfg.trials,
                mean_kl,
                std_kl,
                scaled_error: mean_kl * n as f64 / (n as f64).log2(),
            })
        })
        .collect()
}

/// Empirical exceedance frequency next to its analytic bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPoint {
    pub n_samples: usize,
    pub eps: f64,
    pub trials: usize,
    pub empirical_freq: f64,
    /// Analytic bound clamped to at most 1.
    pub analytic_bound: f64,
}

impl CsvRow for TailPoint {
    fn header() -> Vec<&'static str> {
        vec!["n", "eps", "trials", "empirical_freq", "analytic_bound"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.n_samples.to_string(),
            fmt_float(self.eps),
            self.trials.to_string(),
            fmt_float(self.empirical_freq),
            fmt_float(self.analytic_bound),
        ]
    }
}

/// Fraction of `trials` datasets of size N whose empirical table is more
/// than `eps` bits from the target, with the Sanov bound for comparison.
pub fn sanov_mc(
    target: &BayesNet,
    n_samples: usize,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<TailPoint> {
    check_trials(trials)?;
    if n_samples < 1 {
        return Err(Error::input("sample size must be >= 1"));
    }
    let table = JointTable::from_net(target)?;
    let card_u = table.probs().len() as u64;
    let hits: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(seed, rng::trial_stream_id(0, t));
            let data = target.sample_with(n_samples, &mut r);
            let emp = JointTable::empirical(&data)?;
            Ok(emp.entropy_distance(&table)? > eps)
        })
        .collect::<Result<_>>()?;
    Ok(TailPoint {
        n_samples,
        eps,
        trials,
        empirical_freq: frequency(&hits),
        analytic_bound: sanov_bound(n_samples as u64, card_u, eps).min(1.0),
    })
}

fn frequency(hits: &[bool]) -> f64 {
    hits.iter().filter(|&&h| h).count() as f64 / hits.len() as f64
}

/// Fraction of `trials` samples of size N from the distribution `probs`
/// whose plug-in entropy misses the true entropy by more than `eps` bits,
/// next to the concentration bound with m = min(probs).
pub fn entropy_deviation_mc(
    probs: &[f64],
    n_samples: usize,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<TailPoint> {
    check_trials(trials)?;
    if n_samples < 1 {
        return Err(Error::input("sample size must be >= 1"));
    }
    let dist = WeightedIndex::new(probs).map_err(|e| Error::input(e.to_string()))?;
    let h = entropy_bits(probs);
    let m = probs.iter().copied().fold(f64::INFINITY, f64::min);
    let hits: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(seed, rng::trial_stream_id(0, t));
            let mut counts = vec![0u64; probs.len()];
            for _ in 0..n_samples {
                counts[dist.sample(&mut r)] += 1;
            }
            let freqs: Vec<f64> = counts
                .iter()
                .map(|&c| c as f64 / n_samples as f64)
                .collect();
            (entropy_bits(&freqs) - h).abs() > eps
        })
        .collect();
    Ok(TailPoint {
        n_samples,
        eps,
        trials,
        empirical_freq: frequency(&hits),
        analytic_bound: entropy_deviation_bound(n_samples as u64, probs.len(), m, eps).min(1.0),
    })
}

/// Counts of learned |G| below, equal to and above the target's |G*|.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimalityPoint {
    pub n_samples: usize,
    pub trials: usize,
    pub smaller: usize,
    pub equal: usize,
    pub larger: usize,
}

impl CsvRow for MinimalityPoint {
    fn header() -> Vec<&'static str> {
        vec!["n", "trials", "smaller", "equal", "larger"]
    }

    fn record(&self) -> Vec<String> {
        [
            self.n_samples,
            self.trials,
            self.smaller,
            self.equal,
            self.larger,
        ]
        .iter()
        .map(usize::to_string)
        .collect()
    }
}

/// Learns from `trials` samples of size N with the exhaustive learner and
/// tallies how the learned parameter count compares with the target's.
pub fn minimality_probe(
    target: &BayesNet,
    penalty: Penalty,
    n_samples: usize,
    trials: usize,
    seed: u64,
) -> Result<MinimalityPoint> {
    check_trials(trials)?;
    if n_samples < 1 {
        return Err(Error::input("sample size must be >= 1"));
    }
    let star = target.structure().param_count();
    let counts: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(seed, rng::trial_stream_id(0, t));
            let data = target.sample_with(n_samples, &mut r);
            Ok(learn::learn_exhaustive(&data, penalty)?.report.param_count)
        })
        .collect::<Result<_>>()?;
    let mut point = MinimalityPoint {
        n_samples,
        trials,
        smaller: 0,
        equal: 0,
        larger: 0,
    };
    for c in counts {
        match c.cmp(&star) {
            std::cmp::Ordering::Less => point.smaller += 1,
            std::cmp::Ordering::Equal => point.equal += 1,
            std::cmp::Ordering::Greater => point.larger += 1,
        }
    }
    Ok(point)
}

/// KL error of a single learned net against the target.
pub fn learned_error(target: &BayesNet, learned: &BayesNet) -> Result<f64> {
    JointTable::from_net(target)?.entropy_distance(&JointTable::from_net(learned)?)
}
