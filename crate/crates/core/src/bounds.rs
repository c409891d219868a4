//! Closed-form sample-complexity calculus for MDL structure learning.
//!
//! Every expression of the form (N+1)^K · 2^(−N·r) is evaluated as its base-2
//! logarithm `K·log₂(N+1) − N·r` first; the `*_bound` functions exponentiate
//! at the very end and may return `+inf` for vacuous settings. Callers clamp
//! to 1 for reporting.

use crate::error::{Error, Result};
use crate::score::Penalty;
use crate::table::pinsker_z;

/// log₂ of the Sanov bound (N+1)^‖U‖ · 2^(−N·eps).
pub fn sanov_log2_bound(n_samples: u64, card_u: u64, eps: f64) -> f64 {
    card_u as f64 * ((n_samples as f64) + 1.0).log2() - n_samples as f64 * eps
}

/// Upper bound on Pr(D(P̂_N ‖ P) > eps) for N samples over a domain of size
/// `card_u`.
pub fn sanov_bound(n_samples: u64, card_u: u64, eps: f64) -> f64 {
    sanov_log2_bound(n_samples, card_u, eps).exp2()
}

/// Rate ((1 − m)·m / 4)² of the skewed-sample bound.
pub fn skew_rate(m: f64) -> f64 {
    let r = (1.0 - m) * m / 4.0;
    r * r
}

pub fn skew_log2_bound(n_samples: u64, card_u: u64, m: f64) -> f64 {
    sanov_log2_bound(n_samples, card_u, skew_rate(m))
}

/// (N+1)^‖U‖ · 2^(−N·((1−m)m/4)²): bound on the probability that some
/// ML-fitted network's log-ratio to a target with skewness `m` exceeds
/// 2n·log₂(1/m).
pub fn skew_bound(n_samples: u64, card_u: u64, m: f64) -> f64 {
    skew_log2_bound(n_samples, card_u, m).exp2()
}

/// log₂ of (N+1)^card · 2^(−N·eps²/(3·log₂(1/m))), the bound on
/// Pr(|Ĥ − H| > eps) for the plug-in entropy of a `card`-valued variable
/// whose values all have probability ≥ m.
pub fn entropy_deviation_log2_bound(n_samples: u64, card: usize, m: f64, eps: f64) -> f64 {
    let rate = eps * eps / (3.0 * (1.0 / m).log2());
    card as f64 * ((n_samples as f64) + 1.0).log2() - n_samples as f64 * rate
}

pub fn entropy_deviation_bound(n_samples: u64, card: usize, m: f64, eps: f64) -> f64 {
    entropy_deviation_log2_bound(n_samples, card, m, eps).exp2()
}

// Smallest N >= 1 with `pred(N)`, for predicates that may fail on a short
// irregular prefix (N <= 16) but are upward closed afterwards.
fn first_true(pred: impl Fn(u64) -> bool, cap: u64) -> Option<u64> {
    const PREFIX: u64 = 16;
    if let Some(n) = (1..=PREFIX.min(cap)).find(|&n| pred(n)) {
        return Some(n);
    }
    if cap <= PREFIX {
        return None;
    }
    let mut lo = PREFIX;
    let mut hi = PREFIX;
    loop {
        hi = hi.saturating_mul(2).min(cap);
        if pred(hi) {
            break;
        }
        if hi == cap {
            return None;
        }
        lo = hi;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Whether N/ψ(N) compares favourably with `ratio`. Sample sizes where the
/// penalty vanishes (ψ(N) = 0, e.g. N = 1 under the half-log penalty) never
/// qualify.
fn ratio_holds(penalty: Penalty, n: u64, ratio: f64, strict: bool) -> bool {
    let psi = penalty.weight_f64(n as f64);
    if psi <= 0.0 {
        return false;
    }
    let lhs = n as f64 / psi;
    if strict {
        lhs > ratio
    } else {
        lhs >= ratio
    }
}

/// Minimal N with N/ψ(N) > g/eps: the ideal-sample size beyond which no
/// network more than `eps` away from the target can outscore it.
pub fn ideal_case_n(g: u64, eps: f64, penalty: Penalty) -> Result<u64> {
    if g < 1 {
        return Err(Error::input("g must be >= 1"));
    }
    if !(eps > 0.0) {
        return Err(Error::input(format!("eps must be positive, got {eps}")));
    }
    let ratio = g as f64 / eps;
    first_true(|n| ratio_holds(penalty, n, ratio, true), u64::MAX / 4)
        .ok_or_else(|| Error::capacity("ideal-case sample size overflows"))
}

/// F(y): the x ≥ 4 with x / log₂ x = y.
pub fn f_inverse(y: f64) -> Result<f64> {
    if !(y >= 2.0) || !y.is_finite() {
        return Err(Error::input(format!("F is defined for y >= 2, got {y}")));
    }
    let h = |x: f64| x / x.log2();
    let mut lo = 4.0;
    let mut hi = 8.0_f64.max(4.0 * y * y.log2());
    while h(hi) < y {
        hi *= 2.0;
    }
    while (hi - lo) > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if h(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The triangle-type error function
///
/// ```text
/// e(a, b, c, m) = [½·z·√b·(z/m)·s] / [1 − (z/m)·s] + a,   s = √(a + z·√b·c)
/// ```
///
/// `None` when z·s ≥ m (the function's domain condition) or the arguments
/// are out of range.
pub fn lemma37_e(a: f64, b: f64, c: f64, m: f64) -> Option<f64> {
    if !(a >= 0.0 && b >= 0.0 && c >= 0.0 && m > 0.0 && m <= 1.0) {
        return None;
    }
    let z = pinsker_z();
    let s = (a + z * b.sqrt() * c).sqrt();
    if z * s >= m {
        return None;
    }
    let r = z / m * s;
    Some(0.5 * z * b.sqrt() * r / (1.0 - r) + a)
}

/// Parameters of a learning problem for the bound calculus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem {
    /// n, the number of variables.
    pub n_vars: u32,
    /// ‖U‖, the joint domain size.
    pub card_u: u64,
    /// Skewness of the target: the smallest cell probability.
    pub m: f64,
    /// g = |G*| − |G_∅|.
    pub g: u64,
    pub penalty: Penalty,
}

impl Problem {
    pub fn new(n_vars: u32, card_u: u64, m: f64, g: u64, penalty: Penalty) -> Result<Self> {
        if n_vars < 1 {
            return Err(Error::input("n_vars must be >= 1"));
        }
        if n_vars < 64 && card_u < 1u64 << n_vars {
            return Err(Error::input(format!(
                "card_u {card_u} is smaller than 2^{n_vars}"
            )));
        }
        if !(m > 0.0 && m <= 1.0 / card_u as f64) {
            return Err(Error::input(format!(
                "m must lie in (0, 1/{card_u}], got {m}"
            )));
        }
        Ok(Problem {
            n_vars,
            card_u,
            m,
            g,
            penalty,
        })
    }

    /// c = 2n·log₂(1/m), the log-ratio threshold of non-skewed samples.
    pub fn skew_threshold(&self) -> f64 {
        2.0 * self.n_vars as f64 * (1.0 / self.m).log2()
    }
}

pub const CONDITION_SAMPLE_SIZE: &str = "sample-size";
pub const CONDITION_SKEWNESS: &str = "skewness";

/// Evaluation of the (ε, δ) guarantee at a given (a, b, N).
#[derive(Debug, Clone, PartialEq)]
pub struct Thm39Report {
    pub a: f64,
    pub b: f64,
    pub n_samples: u64,
    /// `None` when the skewness condition fails.
    pub epsilon: Option<f64>,
    pub delta: f64,
    pub valid: bool,
    pub violated_conditions: Vec<String>,
}

impl Thm39Report {
    pub const CSV_HEADER: [&'static str; 7] =
        ["a", "b", "n", "epsilon", "delta", "valid", "violated"];

    pub fn csv_record(&self) -> [String; 7] {
        use crate::experiments::fmt_float;
        [
            fmt_float(self.a),
            fmt_float(self.b),
            self.n_samples.to_string(),
            self.epsilon.map(fmt_float).unwrap_or_default(),
            fmt_float(self.delta),
            self.valid.to_string(),
            self.violated_conditions.join(";"),
        ]
    }
}

/// Given a, b, N: ε = e(a, b, 2n·log₂(1/m), m) and
/// δ = (N+1)^‖U‖ (2^(−N·b) + 2^(−N·((1−m)m/4)²)), together with the two
/// hypotheses N/ψ(N) ≥ g/a and z·√(a + z√b·c) < m.
pub fn thm39_eval(a: f64, b: f64, n_samples: u64, prob: &Problem) -> Thm39Report {
    let mut violated = Vec::new();
    if !sample_size_condition(prob, a, n_samples) {
        violated.push(CONDITION_SAMPLE_SIZE.to_string());
    }
    let epsilon = lemma37_e(a, b, prob.skew_threshold(), prob.m);
    if epsilon.is_none() {
        violated.push(CONDITION_SKEWNESS.to_string());
    }
    let delta = sanov_bound(n_samples, prob.card_u, b) + skew_bound(n_samples, prob.card_u, prob.m);
    Thm39Report {
        a,
        b,
        n_samples,
        epsilon,
        delta,
        valid: violated.is_empty(),
        violated_conditions: violated,
    }
}

fn sample_size_condition(prob: &Problem, a: f64, n: u64) -> bool {
    prob.g == 0 || ratio_holds(prob.penalty, n, prob.g as f64 / a, false)
}

/// Search settings for [`sample_complexity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Points per axis of the logarithmic (a, b) grid.
    pub grid: usize,
    /// Largest N considered.
    pub n_cap: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            grid: 64,
            n_cap: 1_000_000_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleComplexity {
    pub n_samples: u64,
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
    pub delta: f64,
}

fn log_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![hi];
    }
    let (llo, lhi) = (lo.log10(), hi.log10());
    (0..k)
        .map(|i| 10f64.powf(llo + (lhi - llo) * i as f64 / (k - 1) as f64))
        .collect()
}

/// Smallest N ≥ `from` with log₂ δ(N) ≤ `target_log2`, where δ(N) is the sum
/// of the Sanov and skew terms. Each term is unimodal in N and ≥ 1 before
/// its peak, so δ can only meet a target < 1 past both peaks, where it is
/// decreasing.
fn min_n_for_delta(card_u: u64, b: f64, m: f64, target_log2: f64, cap: u64) -> Option<u64> {
    let k = skew_rate(m);
    let delta_ok = |n: u64| {
        let s = sanov_log2_bound(n, card_u, b);
        let t = skew_log2_bound(n, card_u, m);
        log2_add(s, t) <= target_log2
    };
    let peak = card_u as f64 / (b.min(k) * std::f64::consts::LN_2);
    let start = (peak.ceil() as u64).clamp(1, cap);
    if !delta_ok(cap) {
        return None;
    }
    let (mut lo, mut hi) = (start, cap);
    if delta_ok(lo) {
        return Some(lo);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if delta_ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

fn log2_add(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (1.0 + (lo - hi).exp2()).log2()
}

/// Minimal N (over a logarithmic grid of (a, b)) for which the (ε, δ)
/// guarantee holds with ε ≤ `eps_target` and δ ≤ `delta_target`. `None`
/// when no grid point is feasible below the N cap.
pub fn sample_complexity(
    eps_target: f64,
    delta_target: f64,
    prob: &Problem,
) -> Result<Option<SampleComplexity>> {
    sample_complexity_with(eps_target, delta_target, prob, SearchOptions::default())
}

pub fn sample_complexity_with(
    eps_target: f64,
    delta_target: f64,
    prob: &Problem,
    opts: SearchOptions,
) -> Result<Option<SampleComplexity>> {
    if !(eps_target > 0.0 && eps_target < 1.0) || !(delta_target > 0.0 && delta_target < 1.0) {
        return Err(Error::input("eps and delta targets must lie in (0, 1)"));
    }
    if opts.grid < 1 || opts.n_cap < 1 {
        return Err(Error::input("search grid and cap must be positive"));
    }
    let c = prob.skew_threshold();
    let target_log2 = delta_target.log2();
    let mut best: Option<SampleComplexity> = None;
    for &a in &log_grid(eps_target * 1e-4, eps_target, opts.grid) {
        let n_psi = if prob.g == 0 {
            Some(1)
        } else {
            let ratio = prob.g as f64 / a;
            first_true(|n| ratio_holds(prob.penalty, n, ratio, false), opts.n_cap)
        };
        let Some(n_psi) = n_psi else { continue };
        for &b in &log_grid(1e-12, 1.0, opts.grid) {
            let Some(eps) = lemma37_e(a, b, c, prob.m) else {
                continue;
            };
            if eps > eps_target {
                continue;
            }
            let Some(n_delta) = min_n_for_delta(prob.card_u, b, prob.m, target_log2, opts.n_cap)
            else {
                continue;
            };
            let n = n_psi.max(n_delta);
            if best.is_none_or(|bst| n < bst.n_samples) {
                let report = thm39_eval(a, b, n, prob);
                debug_assert!(report.valid);
                best = Some(SampleComplexity {
                    n_samples: n,
                    a,
                    b,
                    epsilon: eps,
                    delta: report.delta,
                });
            }
        }
    }
    Ok(best)
}

/// Constant-free order of the sample complexity, for shape comparisons:
///
/// * half-log: F(‖U‖ + log₂(1/δ)) · (1/ε)^(4/3) · (1/m)²
/// * polynomial α: F(‖U‖ + log₂(1/δ)) · (1/ε)^(4/(3(1−α))) · g^(1/(1−α)) · (1/m)^(2/(1−α))
pub fn asymptotic_reference(eps: f64, delta: f64, prob: &Problem) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::input("eps and delta must lie in (0, 1)"));
    }
    let f = f_inverse(prob.card_u as f64 + (1.0 / delta).log2())?;
    let inv_m = 1.0 / prob.m;
    match prob.penalty {
        Penalty::HalfLog => Ok(f * (1.0 / eps).powf(4.0 / 3.0) * inv_m.powi(2)),
        Penalty::Polynomial(alpha) => {
            let k = 1.0 / (1.0 - alpha);
            Ok(f * (1.0 / eps).powf(4.0 * k / 3.0) * (prob.g as f64).powf(k) * inv_m.powf(2.0 * k))
        }
        Penalty::Constant(_) => Err(Error::input(
            "asymptotic reference is defined for half-log and polynomial penalties",
        )),
    }
}
