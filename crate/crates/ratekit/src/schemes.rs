//! Sum-rate formulas and optimizers of the cooperative schemes: the
//! single-stage scheme, four hierarchical scheduling methods with their
//! cluster-size chains and slot budgets, stage-count selection and the
//! throughput maximization over stages and expansion factor.

use std::fmt;
use std::str::FromStr;

use crate::coding::{effective_top_rate, rate_sequence_at, CodingRateSequence, RelayScheme};
use crate::error::{require, RateError, Result};
use crate::model::{interference_power_bound, local_rate, optimal_snr_single_stage, reuse_factor};
use crate::multihop::multihop_sum_rate_lower;

/// Hierarchical scheduling method. The four differ in which phases reuse
/// the spectrum and in how quantized observations are forwarded, which
/// shows up only through the throughput denominator and the slot budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HierMethod {
    M1,
    M2,
    M3,
    M4,
}

impl HierMethod {
    pub const ALL: [HierMethod; 4] = [
        HierMethod::M1,
        HierMethod::M2,
        HierMethod::M3,
        HierMethod::M4,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            HierMethod::M1 => "m1",
            HierMethod::M2 => "m2",
            HierMethod::M3 => "m3",
            HierMethod::M4 => "m4",
        }
    }
}

/// Which constant set drives the m3/m4 throughput penalties. The default
/// derivation constants carry the full proofs; the alternative reproduces
/// the looser penalty contrast for comparison runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstantVariant {
    #[default]
    Derivation,
    Theorem3,
}

impl ConstantVariant {
    pub fn label(&self) -> &'static str {
        match self {
            ConstantVariant::Derivation => "derivation",
            ConstantVariant::Theorem3 => "theorem3",
        }
    }
}

impl FromStr for ConstantVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "derivation" => Ok(ConstantVariant::Derivation),
            "theorem3" => Ok(ConstantVariant::Theorem3),
            other => Err(format!("unknown constants variant '{other}'")),
        }
    }
}

/// Any scheme the toolkit can evaluate end to end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    SingleStage,
    Hier(HierMethod),
    Multihop,
    OriginalHc,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::SingleStage => "single-stage",
            Method::Hier(m) => m.label(),
            Method::Multihop => "multihop",
            Method::OriginalHc => "original-hc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "single-stage" => Ok(Method::SingleStage),
            "m1" => Ok(Method::Hier(HierMethod::M1)),
            "m2" => Ok(Method::Hier(HierMethod::M2)),
            "m3" => Ok(Method::Hier(HierMethod::M3)),
            "m4" => Ok(Method::Hier(HierMethod::M4)),
            "multihop" => Ok(Method::Multihop),
            "original-hc" => Ok(Method::OriginalHc),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

/// Everything a scheme evaluation reports. The identity
/// sum_rate = coding_rate * packet_throughput holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBreakdown {
    /// Bits per symbol carried by each delivered message.
    pub coding_rate: f64,
    /// Delivered source-destination messages per slot.
    pub packet_throughput: f64,
    /// Bits per second per Hz over the whole network.
    pub sum_rate: f64,
    /// Per-stage cluster sizes, innermost first, rounded for reporting.
    pub cluster_sizes: Vec<u64>,
    pub t_used: usize,
    pub q_used: u32,
    /// Relaying chain behind the coding rate, when one was involved.
    pub relay_scheme: Option<RelayScheme>,
}

/// Throughput denominator of a t-stage hierarchical method.
pub fn denominator(
    method: HierMethod,
    t: usize,
    l: u32,
    q: u32,
    variant: ConstantVariant,
) -> f64 {
    let (tf, lf, qf) = (t as f64, l as f64, q as f64);
    match method {
        HierMethod::M1 => (1.0 + tf) * (lf * (1.0 + qf).sqrt()).powf(tf),
        HierMethod::M2 => {
            (1.0 + tf) * lf.powf(2.0 * tf / (tf + 1.0)) * (1.0 + qf).powf(tf / 2.0)
        }
        HierMethod::M3 | HierMethod::M4 => {
            let pen = match variant {
                ConstantVariant::Derivation => {
                    ((1.0 + qf) * qf.powf((tf - 1.0) / 2.0)).powf(tf / (tf + 1.0))
                }
                ConstantVariant::Theorem3 => {
                    ((1.0 + qf) * qf.powf(tf - 1.0)).powf(tf / (2.0 * (tf + 1.0)))
                }
            };
            if method == HierMethod::M3 {
                (tf + 1.0) * lf.powf(tf) * pen
            } else {
                (1.0 + tf) * lf.powf(2.0 * tf / (tf + 1.0)) * pen
            }
        }
    }
}

/// Throughput-optimal cluster sizes of a t-stage hierarchy, innermost
/// first, treated as continuous (no rounding, no clamping).
pub fn optimal_cluster_chain(method: HierMethod, n: f64, t: usize, l: u32, q: u32) -> Vec<f64> {
    let (lf, qf) = (l as f64, q as f64);
    if t == 1 {
        return vec![n.sqrt() / (lf * (1.0 + qf).sqrt())];
    }
    let tf = t as f64;
    let top = match method {
        HierMethod::M1 => n.powf(tf / (tf + 1.0)) / (lf * lf * (1.0 + qf)).powf(tf / 2.0),
        HierMethod::M2 => {
            (n / (lf * lf * (1.0 + qf).powf((tf + 1.0) / 2.0))).powf(tf / (tf + 1.0))
        }
        HierMethod::M3 => (n / ((1.0 + qf) * lf.powf(tf + 1.0) * qf.powf((tf - 1.0) / 2.0)))
            .powf(tf / (tf + 1.0)),
        HierMethod::M4 => {
            (n / ((1.0 + qf) * lf * lf * qf.powf((tf - 1.0) / 2.0))).powf(tf / (tf + 1.0))
        }
    };
    let mut sizes = vec![top];
    let mut x = top;
    for tau in (2..=t).rev() {
        let tauf = tau as f64;
        x = match method {
            HierMethod::M1 => {
                x.powf((tauf - 1.0) / tauf) / (lf * lf * (1.0 + qf)).powf((tauf - 1.0) / 2.0)
            }
            HierMethod::M2 => x.powf((tauf - 1.0) / tauf) / (1.0 + qf).powf((tauf - 1.0) / 2.0),
            HierMethod::M3 => {
                (x / (lf.powf(tauf) * qf.powf(tauf / 2.0))).powf((tauf - 1.0) / tauf)
            }
            HierMethod::M4 => x.powf((tauf - 1.0) / tauf) / qf.powf((tauf - 1.0) / 2.0),
        };
        sizes.push(x);
    }
    sizes.reverse();
    sizes
}

/// A configuration is usable when every continuous cluster size is at
/// least one node and the outermost cluster fits inside the network.
pub fn cluster_chain_feasible(method: HierMethod, n: f64, t: usize, l: u32, q: u32) -> bool {
    let sizes = optimal_cluster_chain(method, n, t, l, q);
    sizes.last().is_some_and(|top| *top <= n) && sizes.iter().all(|m| *m >= 1.0)
}

fn rounded_sizes(sizes: &[f64]) -> Vec<u64> {
    sizes.iter().map(|m| m.round() as u64).collect()
}

/// Breakdown of a hierarchical configuration once L is known; shared by
/// the public entry points and the searches.
fn hier_breakdown(
    method: HierMethod,
    n: u64,
    t: usize,
    l: u32,
    q: u32,
    coding_rate: f64,
    relay_scheme: Option<RelayScheme>,
    variant: ConstantVariant,
) -> Result<RateBreakdown> {
    let nf = n as f64;
    if !cluster_chain_feasible(method, nf, t, l, q) {
        return Err(RateError::Infeasible(format!(
            "{} with t={t}, L={l}, q={q} has no valid cluster chain at n={n}",
            method.label()
        )));
    }
    let tf = t as f64;
    let throughput = nf.powf(tf / (tf + 1.0)) / denominator(method, t, l, q, variant);
    Ok(RateBreakdown {
        coding_rate,
        packet_throughput: throughput,
        sum_rate: coding_rate * throughput,
        cluster_sizes: rounded_sizes(&optimal_cluster_chain(method, nf, t, l, q)),
        t_used: t,
        q_used: q,
        relay_scheme,
    })
}

/// Sum rate of a t-stage hierarchical method at a caller-supplied coding
/// rate, with L derived from the alpha-optimal operating point.
pub fn hier_sum_rate(
    method: HierMethod,
    n: u64,
    alpha: f64,
    t: usize,
    q: u32,
    coding_rate: f64,
    variant: ConstantVariant,
) -> Result<RateBreakdown> {
    require(n >= 4, "n", n as f64, "n >= 4")?;
    require(t >= 1, "t", t as f64, "t >= 1")?;
    require(q >= 1, "q", q as f64, "q >= 1")?;
    require(
        coding_rate >= 0.0,
        "coding_rate",
        coding_rate,
        "coding_rate >= 0",
    )?;
    let snr = optimal_snr_single_stage(alpha)?;
    let l = reuse_factor(snr, alpha)?;
    hier_breakdown(method, n, t, l, q, coding_rate, None, variant)
}

/// Single-stage cooperative scheme. Defaults to the alpha-optimal power
/// and the TIN reuse factor; explicit (snr, L) supported for sweeps.
pub fn single_stage_sum_rate(
    n: u64,
    alpha: f64,
    snr: Option<f64>,
    l: Option<u32>,
    q: u32,
) -> Result<RateBreakdown> {
    require(n >= 4, "n", n as f64, "n >= 4")?;
    require(q >= 1, "q", q as f64, "q >= 1")?;
    let snr = match snr {
        Some(s) => {
            require(s > 0.0, "snr", s, "snr > 0")?;
            s
        }
        None => optimal_snr_single_stage(alpha)?,
    };
    let l = match l {
        Some(l) => {
            require(l >= 2, "l", l as f64, "l >= 2")?;
            l
        }
        None => reuse_factor(snr, alpha)?,
    };
    let nf = n as f64;
    let p_i = interference_power_bound(n, snr, l, alpha)?.p_i;
    let r1 = local_rate(snr, p_i)?;
    let m = nf.sqrt() / (l as f64 * (1.0 + q as f64).sqrt());
    if m.round() < 1.0 {
        return Err(RateError::Infeasible(format!(
            "single-stage cluster size {m:.3} rounds below one node at n={n}, L={l}, q={q}"
        )));
    }
    let throughput = 0.5 * nf.sqrt() / (l as f64 * (1.0 + q as f64).sqrt());
    Ok(RateBreakdown {
        coding_rate: r1,
        packet_throughput: throughput,
        sum_rate: r1 * throughput,
        cluster_sizes: vec![m.round() as u64],
        t_used: 1,
        q_used: q,
        relay_scheme: None,
    })
}

/// Closed-form approximation of the single-stage sum rate at the optimal
/// operating point; exactly linear in sqrt(n).
pub fn approx_sum_rate(n: u64, alpha: f64) -> Result<f64> {
    require(n >= 1, "n", n as f64, "n >= 1")?;
    require(alpha >= 2.0, "alpha", alpha, "alpha >= 2")?;
    let ln2 = std::f64::consts::LN_2;
    Ok(alpha * (n as f64).sqrt()
        / ((2.0 * std::f64::consts::SQRT_2 * ln2) * 2f64.powf(3.0 / alpha + 1.0 / ln2)))
}

/// Slot count needed by the nested local-communication phases of one
/// t-stage cluster, with the cluster-size chain that attains it.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotBudget {
    /// Total slots.
    pub f_t: f64,
    /// Slots of the outermost exchange phase.
    pub exchange_slots: f64,
    /// Slots recursively consumed by the nested subclusters.
    pub nested_slots: f64,
    /// Subcluster sizes, innermost first (t-1 entries).
    pub cluster_sizes: Vec<f64>,
}

fn slot_method(method: HierMethod) -> Result<()> {
    if method == HierMethod::M1 {
        return Err(RateError::InvalidParameter {
            name: "method",
            value: 1.0,
            requirement: "slot budgets are defined for m2, m3 and m4",
        });
    }
    Ok(())
}

/// (exchange weight on n^2/M, nested weight on F_{t-1}) of the recursion.
fn slot_weights(method: HierMethod, l: u32, q: u32) -> (f64, f64) {
    let (lf, qf) = (l as f64, q as f64);
    match method {
        HierMethod::M2 => (lf * lf, 1.0 + qf),
        HierMethod::M3 => (1.0, lf * lf * qf),
        HierMethod::M4 => (lf * lf, qf),
        HierMethod::M1 => unreachable!(),
    }
}

fn slot_base(method: HierMethod, l: u32, x: f64) -> f64 {
    match method {
        HierMethod::M3 => x * x,
        _ => (l as f64) * (l as f64) * x * x,
    }
}

fn slot_closed_form(method: HierMethod, n: f64, t: usize, l: u32, q: u32) -> f64 {
    let (tf, lf, qf) = (t as f64, l as f64, q as f64);
    let growth = n.powf((tf + 1.0) / tf);
    match method {
        HierMethod::M2 => tf * lf * lf * (1.0 + qf).powf((tf - 1.0) / 2.0) * growth,
        HierMethod::M3 => tf * lf.powf(tf - 1.0) * qf.powf((tf - 1.0) / 2.0) * growth,
        HierMethod::M4 => tf * lf * lf * qf.powf((tf - 1.0) / 2.0) * growth,
        HierMethod::M1 => unreachable!(),
    }
}

/// Subcluster size minimizing the recursion at outer size x with tau
/// stages remaining.
fn slot_opt_m(method: HierMethod, x: f64, tau: usize, l: u32, q: u32) -> f64 {
    let (tauf, lf, qf) = (tau as f64, l as f64, q as f64);
    match method {
        HierMethod::M2 => x.powf((tauf - 1.0) / tauf) / (1.0 + qf).powf((tauf - 1.0) / 2.0),
        HierMethod::M3 => (x / (lf.powf(tauf) * qf.powf(tauf / 2.0))).powf((tauf - 1.0) / tauf),
        HierMethod::M4 => x.powf((tauf - 1.0) / tauf) / qf.powf((tauf - 1.0) / 2.0),
        HierMethod::M1 => unreachable!(),
    }
}

fn budget_with_chain(
    method: HierMethod,
    n: f64,
    t: usize,
    l: u32,
    q: u32,
    f_t: f64,
    chain_top_first: Vec<f64>,
) -> SlotBudget {
    let (exchange, nested) = if t == 1 {
        (f_t, 0.0)
    } else {
        let (a, b) = slot_weights(method, l, q);
        let m_top = chain_top_first[0];
        let inner = eval_budget(method, l, q, t - 1, m_top, &chain_top_first[1..]);
        (a * n * n / m_top, n / m_top * b * inner)
    };
    let mut sizes = chain_top_first;
    sizes.reverse();
    SlotBudget {
        f_t,
        exchange_slots: exchange,
        nested_slots: nested,
        cluster_sizes: sizes,
    }
}

/// Closed-form slot budget plus the recursion-optimal cluster chain.
pub fn slot_budget(method: HierMethod, n: f64, t: usize, l: u32, q: u32) -> Result<SlotBudget> {
    slot_method(method)?;
    require(n >= 1.0, "n", n, "n >= 1")?;
    require(t >= 1, "t", t as f64, "t >= 1")?;
    require(l >= 2, "l", l as f64, "l >= 2")?;
    require(q >= 1, "q", q as f64, "q >= 1")?;
    let mut chain = Vec::with_capacity(t.saturating_sub(1));
    let mut x = n;
    for tau in (2..=t).rev() {
        x = slot_opt_m(method, x, tau, l, q);
        chain.push(x);
    }
    Ok(budget_with_chain(
        method,
        n,
        t,
        l,
        q,
        slot_closed_form(method, n, t, l, q),
        chain,
    ))
}

/// Evaluates the slot recursion at outer size x given the subcluster
/// chain (top first) for the remaining tau stages.
fn eval_budget(method: HierMethod, l: u32, q: u32, tau: usize, x: f64, chain: &[f64]) -> f64 {
    if tau == 1 {
        return slot_base(method, l, x);
    }
    let (a, b) = slot_weights(method, l, q);
    let m = chain[0];
    x / m * (a * x + b * eval_budget(method, l, q, tau - 1, m, &chain[1..]))
}

const BUDGET_SWEEPS: usize = 300;
const GOLDEN_ITERS: usize = 120;

/// Numeric oracle for the closed forms: minimizes the slot recursion over
/// the subcluster chain by cyclic coordinate descent in log space, each
/// coordinate by golden-section search. The objective is convex in the
/// log sizes, so the descent reaches the global optimum.
pub fn slot_budget_recursive(
    method: HierMethod,
    n: f64,
    t: usize,
    l: u32,
    q: u32,
) -> Result<SlotBudget> {
    slot_method(method)?;
    require(n >= 1.0, "n", n, "n >= 1")?;
    require((1..=8).contains(&t), "t", t as f64, "1 <= t <= 8")?;
    require(l >= 2, "l", l as f64, "l >= 2")?;
    require(q >= 1, "q", q as f64, "q >= 1")?;
    if t == 1 {
        let base = slot_base(method, l, n);
        return Ok(budget_with_chain(method, n, t, l, q, base, Vec::new()));
    }
    let tf = t as f64;
    let mut xs: Vec<f64> = (1..t).map(|k| n.powf((tf - k as f64) / tf)).collect();
    // The lower bracket sits far below one node: the unconstrained optimum
    // of some configurations falls below M = 1 and the closed forms track
    // the unconstrained recursion.
    let (lo, hi) = ((1e-9f64).ln(), n.ln());
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let mut prev = eval_budget(method, l, q, t, n, &xs);
    for _ in 0..BUDGET_SWEEPS {
        for j in 0..xs.len() {
            let (mut a, mut b) = (lo, hi);
            let mut c = b - gr * (b - a);
            let mut d = a + gr * (b - a);
            for _ in 0..GOLDEN_ITERS {
                xs[j] = c.exp();
                let fc = eval_budget(method, l, q, t, n, &xs);
                xs[j] = d.exp();
                let fd = eval_budget(method, l, q, t, n, &xs);
                if fc < fd {
                    b = d;
                } else {
                    a = c;
                }
                c = b - gr * (b - a);
                d = a + gr * (b - a);
            }
            xs[j] = (0.5 * (a + b)).exp();
        }
        let cur = eval_budget(method, l, q, t, n, &xs);
        if (prev - cur).abs() <= 1e-14 * cur.abs() {
            return Ok(budget_with_chain(method, n, t, l, q, cur, xs));
        }
        prev = cur;
    }
    Err(RateError::NoConvergence {
        iterations: BUDGET_SWEEPS,
        last: prev,
    })
}

/// Literal closed form of the network-multiple-access cluster size as
/// printed; exceeds n for modest parameters, so callers must treat it as
/// a diagnostic and trust the numeric optimizer instead.
pub fn nmac3_literal_cluster_size(n: f64, t: usize, l: u32, q: u32) -> f64 {
    let (tf, lf, qf) = (t as f64, l as f64, q as f64);
    lf.powf(tf)
        * (1.0 + qf).powf(tf / (tf + 1.0))
        * qf.powf(tf * (tf - 1.0) / (2.0 * (tf + 1.0)))
        * n.powf(tf / (tf + 1.0))
}

/// Closed-form stage-count estimate for method 2 and its integer
/// recommendation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageCountEstimate {
    pub t_real: f64,
    pub t_int: usize,
}

/// Real-valued optimal stage count of method 2 from the closed form, with
/// the integer recommendation picked by evaluating the m2 throughput at
/// the two neighbouring integers (expansion factor 2 convention).
pub fn optimal_stage_count_m2(n: u64, l: u32) -> Result<StageCountEstimate> {
    require(l >= 2, "l", l as f64, "l >= 2")?;
    require(n as f64 > l as f64, "n", n as f64, "n > L")?;
    let ln3 = 3f64.ln();
    let t_real = -1.0 + (-1.0 + (1.0 + 2.0 * (n as f64 / l as f64).ln() * ln3).sqrt()) / ln3;
    let lo = (t_real.floor() as i64).max(1) as usize;
    let hi = (t_real.ceil() as i64).max(1) as usize;
    let thr = |t: usize| {
        (n as f64).powf(t as f64 / (t as f64 + 1.0))
            / denominator(HierMethod::M2, t, l, 2, ConstantVariant::Derivation)
    };
    let t_int = if thr(lo) >= thr(hi) { lo } else { hi };
    Ok(StageCountEstimate { t_real, t_int })
}

/// One-dimensional search for the throughput-maximizing stage count,
/// t in 1..=12, with per-stage coding rates; ties break toward smaller t.
pub fn optimal_stage_count_search(
    method: HierMethod,
    n: u64,
    alpha: f64,
    q: u32,
    relay_scheme: RelayScheme,
) -> Result<usize> {
    require(n >= 4, "n", n as f64, "n >= 4")?;
    const T_RANGE: usize = 12;
    let chain = rate_sequence_at(alpha, q, relay_scheme, T_RANGE, None, None)?;
    let mut best: Option<(usize, f64)> = None;
    for t in 1..=T_RANGE {
        if !cluster_chain_feasible(method, n as f64, t, chain.l, q) {
            continue;
        }
        let coding = stage_coding_rate(&chain, t)?;
        let r = coding * (n as f64).powf(t as f64 / (t as f64 + 1.0))
            / denominator(method, t, chain.l, q, ConstantVariant::Derivation);
        if best.is_none_or(|(_, br)| r > br) {
            best = Some((t, r));
        }
    }
    match best {
        Some((t, _)) => Ok(t),
        None => Err(RateError::Infeasible(format!(
            "no stage count in 1..=12 admits a valid cluster chain for {} at n={n}",
            method.label()
        ))),
    }
}

/// Coding rate used at stage count t: the local rate when the hierarchy is
/// flat, otherwise the stage-t rate capped by the interference-free top
/// relay step.
fn stage_coding_rate(chain: &CodingRateSequence, t: usize) -> Result<f64> {
    if t == 1 {
        Ok(chain.rates[0])
    } else {
        effective_top_rate(chain.rates[t - 1], chain.q, chain.snr, chain.relay_scheme)
    }
}

/// Maximizes the sum rate of a hierarchical method over t in 1..=8 and
/// q in {1, 2} with per-stage coding rates. Ties break toward smaller t,
/// then smaller q.
pub fn best_sum_rate(
    method: HierMethod,
    n: u64,
    alpha: f64,
    relay_scheme: RelayScheme,
    variant: ConstantVariant,
) -> Result<RateBreakdown> {
    best_with_l(method, n, alpha, relay_scheme, variant, None)
}

const BEST_T_MAX: usize = 8;
const BEST_QS: [u32; 2] = [1, 2];

fn best_with_l(
    method: HierMethod,
    n: u64,
    alpha: f64,
    relay_scheme: RelayScheme,
    variant: ConstantVariant,
    l: Option<u32>,
) -> Result<RateBreakdown> {
    require(n >= 4, "n", n as f64, "n >= 4")?;
    let chains: Vec<CodingRateSequence> = BEST_QS
        .iter()
        .map(|&q| rate_sequence_at(alpha, q, relay_scheme, BEST_T_MAX, None, l))
        .collect::<Result<_>>()?;
    let mut best: Option<(f64, usize, u32)> = None;
    for t in 1..=BEST_T_MAX {
        for chain in &chains {
            if !cluster_chain_feasible(method, n as f64, t, chain.l, chain.q) {
                continue;
            }
            let coding = stage_coding_rate(chain, t)?;
            let r = coding * (n as f64).powf(t as f64 / (t as f64 + 1.0))
                / denominator(method, t, chain.l, chain.q, variant);
            if best.is_none_or(|(br, _, _)| r > br) {
                best = Some((r, t, chain.q));
            }
        }
    }
    let Some((_, t, q)) = best else {
        return Err(RateError::Infeasible(format!(
            "no (t, q) in 1..=8 x {{1,2}} admits a valid cluster chain for {} at n={n}",
            method.label()
        )));
    };
    let chain = &chains[BEST_QS.iter().position(|&x| x == q).unwrap()];
    hier_breakdown(
        method,
        n,
        t,
        chain.l,
        q,
        stage_coding_rate(chain, t)?,
        Some(relay_scheme),
        variant,
    )
}

/// Reference hierarchical scheme with the reuse factor pinned to 3, the
/// noise-matched relaying chain and no time expansion, maximized over
/// t in 2..=8. The transmit power stays at the alpha-optimal value.
pub fn original_hc_baseline(n: u64, alpha: f64) -> Result<RateBreakdown> {
    require(n >= 4, "n", n as f64, "n >= 4")?;
    const L: u32 = 3;
    let chain = rate_sequence_at(alpha, 1, RelayScheme::Qf, BEST_T_MAX, None, Some(L))?;
    let mut best: Option<(f64, usize)> = None;
    for t in 2..=BEST_T_MAX {
        if !cluster_chain_feasible(HierMethod::M1, n as f64, t, L, 1) {
            continue;
        }
        let coding = stage_coding_rate(&chain, t)?;
        let r = coding * (n as f64).powf(t as f64 / (t as f64 + 1.0))
            / denominator(HierMethod::M1, t, L, 1, ConstantVariant::Derivation);
        if best.is_none_or(|(br, _)| r > br) {
            best = Some((r, t));
        }
    }
    let Some((_, t)) = best else {
        return Err(RateError::Infeasible(format!(
            "reference scheme has no valid cluster chain for t in 2..=8 at n={n}"
        )));
    };
    hier_breakdown(
        HierMethod::M1,
        n,
        t,
        L,
        1,
        stage_coding_rate(&chain, t)?,
        Some(RelayScheme::Qf),
        ConstantVariant::Derivation,
    )
}

/// One evaluation request against any scheme, with optional operating
/// point overrides (applied to single-stage and fixed-t hierarchical
/// evaluations; searches always run at the alpha-optimal point).
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub n: u64,
    pub alpha: f64,
    pub method: Method,
    /// Fixed stage count; None lets hierarchical methods search (t, q).
    pub t: Option<usize>,
    pub q: u32,
    pub relay_scheme: RelayScheme,
    pub snr: Option<f64>,
    pub l: Option<u32>,
    pub variant: ConstantVariant,
}

impl SchemeConfig {
    pub fn new(n: u64, alpha: f64, method: Method) -> Self {
        Self {
            n,
            alpha,
            method,
            t: None,
            q: 1,
            relay_scheme: RelayScheme::QmfOptimal,
            snr: None,
            l: None,
            variant: ConstantVariant::Derivation,
        }
    }

    pub fn compute(&self) -> Result<RateBreakdown> {
        require(self.n >= 4, "n", self.n as f64, "n >= 4")?;
        require(self.q >= 1, "q", self.q as f64, "q >= 1")?;
        match self.method {
            Method::SingleStage => {
                single_stage_sum_rate(self.n, self.alpha, self.snr, self.l, self.q)
            }
            Method::Multihop => multihop_sum_rate_lower(self.n, self.alpha),
            Method::OriginalHc => original_hc_baseline(self.n, self.alpha),
            Method::Hier(method) => match self.t {
                None => best_with_l(
                    method,
                    self.n,
                    self.alpha,
                    self.relay_scheme,
                    self.variant,
                    self.l,
                ),
                Some(t) => {
                    require(t >= 1, "t", t as f64, "t >= 1")?;
                    let chain = rate_sequence_at(
                        self.alpha,
                        self.q,
                        self.relay_scheme,
                        t,
                        self.snr,
                        self.l,
                    )?;
                    hier_breakdown(
                        method,
                        self.n,
                        t,
                        chain.l,
                        self.q,
                        stage_coding_rate(&chain, t)?,
                        Some(self.relay_scheme),
                        self.variant,
                    )
                }
            },
        }
    }
}
