//! Named verification suites: each runs a battery of numeric checks with
//! recorded seeds, prints one line per check plus a machine-readable
//! summary, and exits nonzero if anything fails. With --out the per-check
//! results are also written as CSV.

use ratekit::coding::relay_bound_check;
use ratekit::mimo::{
    c_of_beta, c_of_x, logdet_montecarlo, submodularity_check, Ensemble, FiniteChannelMatrix,
};
use ratekit::model::{
    interference_power_bound, interference_power_dominant, interference_power_exact,
    optimal_snr_single_stage, reuse_factor, GridNetwork,
};
use ratekit::multihop::relay_traffic_montecarlo;
use ratekit::schemes::{best_sum_rate, slot_budget, slot_budget_recursive, HierMethod};

use crate::config::{ConfigError, RunConfig};
use crate::output::{emit, Cell, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Monte-Carlo log-determinant against the large-system limit
    Rmt,
    /// Diminishing marginal log-det gains over receiver subsets
    Submodular,
    /// Concavity of the partial-array rate in the array fraction
    Concavity,
    /// Ring interference bound against the exact grid sum
    PiBound,
    /// Center-node relay traffic statistics
    Traffic,
    /// Closed-form slot budgets against numeric optimization
    FtOracle,
    /// One relaying stage never beats the rate it forwards
    Lemma1,
    /// Sum-rate ordering of the four hierarchical methods
    Ordering,
}

impl Suite {
    fn label(&self) -> &'static str {
        match self {
            Suite::Rmt => "rmt",
            Suite::Submodular => "submodular",
            Suite::Concavity => "concavity",
            Suite::PiBound => "pi-bound",
            Suite::Traffic => "traffic",
            Suite::FtOracle => "ft-oracle",
            Suite::Lemma1 => "lemma1",
            Suite::Ordering => "ordering",
        }
    }
}

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

fn ensemble_label(e: Ensemble) -> &'static str {
    match e {
        Ensemble::UniformPhase => "phase",
        Ensemble::ComplexGaussian => "gaussian",
    }
}

type SuiteResult = Result<Vec<Check>, CliError>;

fn rmt_suite(cfg: &RunConfig) -> SuiteResult {
    let m = cfg.n.unwrap_or(256) as usize;
    if !(2..=512).contains(&m) {
        return Err(ConfigError(format!("matrix size {m} outside 2..=512 (set via --n)")).into());
    }
    let mut checks = Vec::new();
    for ensemble in [Ensemble::ComplexGaussian, Ensemble::UniformPhase] {
        for x in [1.0, 10.0, 100.0] {
            let mc = logdet_montecarlo(m, x, ensemble, 100, cfg.seed).map_err(to_config)?;
            let limit = c_of_x(x).map_err(to_config)?;
            let err = (mc / limit - 1.0).abs();
            checks.push(check(
                format!("limit-{}-snr{x}", ensemble_label(ensemble)),
                err <= 0.02,
                format!("montecarlo {mc:.6} vs limit {limit:.6}, off {:.3}%", 100.0 * err),
            ));
        }
    }
    Ok(checks)
}

fn submodular_suite(cfg: &RunConfig) -> SuiteResult {
    let mut checks = Vec::new();
    let mut salt = 0;
    for ensemble in [Ensemble::ComplexGaussian, Ensemble::UniformPhase] {
        for m in [4usize, 8, 12] {
            for snr in [1.0, 100.0] {
                salt += 1;
                let h =
                    FiniteChannelMatrix::sample(m, ensemble, cfg.seed + salt).map_err(to_config)?;
                let ok = submodularity_check(&h, snr, 200, cfg.seed + 1000 + salt)
                    .map_err(to_config)?;
                checks.push(check(
                    format!("gains-{}-m{m}-snr{snr}", ensemble_label(ensemble)),
                    ok,
                    "200 random subset pairs".to_string(),
                ));
            }
        }
    }
    Ok(checks)
}

fn concavity_suite() -> SuiteResult {
    const H: f64 = 0.02;
    let mut checks = Vec::new();
    for snr in [0.5, 2.0, 10.0, 100.0, 1e4] {
        let mut worst_curv = f64::NEG_INFINITY;
        let mut monotone = true;
        let mut beta = H;
        while beta + H <= 1.0 + 1e-12 {
            let lo = c_of_beta(snr, beta - H).map_err(to_config)?;
            let mid = c_of_beta(snr, beta).map_err(to_config)?;
            let hi = c_of_beta(snr, (beta + H).min(1.0)).map_err(to_config)?;
            worst_curv = worst_curv.max(lo - 2.0 * mid + hi);
            monotone &= hi >= mid - 1e-12 && mid >= lo - 1e-12;
            beta += H;
        }
        checks.push(check(
            format!("fraction-curve-snr{snr}"),
            worst_curv <= 1e-9 && monotone,
            format!("largest second difference {worst_curv:.2e}, monotone {monotone}"),
        ));
    }
    Ok(checks)
}

fn pi_bound_suite(cfg: &RunConfig) -> SuiteResult {
    let n = cfg.n.unwrap_or(10_000);
    let grid = GridNetwork::new(n).map_err(to_config)?;
    let side = grid.side();
    let mut checks = Vec::new();
    for alpha in [2.5, 3.0, 5.0, 7.0, 11.0] {
        let snr = optimal_snr_single_stage(alpha).map_err(to_config)?;
        for l in [2u32, 3, 5, 7] {
            let bound = interference_power_bound(n, snr, l, alpha)
                .map_err(to_config)?
                .p_i;
            let mut worst_ratio: f64 = 0.0;
            for s in [2u64, 5, 10, 20] {
                if s * l as u64 >= side {
                    continue;
                }
                let exact = interference_power_exact(&grid, l, alpha, snr, s)
                    .map_err(to_config)?
                    .p_i;
                worst_ratio = worst_ratio.max(exact / bound);
            }
            checks.push(check(
                format!("ring-bound-alpha{alpha}-L{l}"),
                worst_ratio <= 1.0,
                format!("exact/bound at most {worst_ratio:.4}"),
            ));
        }
    }
    for alpha in [5.0, 6.0, 7.0, 9.0, 11.0] {
        let snr = optimal_snr_single_stage(alpha).map_err(to_config)?;
        let l = reuse_factor(snr, alpha).map_err(to_config)?;
        let full = interference_power_bound(n, snr, l, alpha)
            .map_err(to_config)?
            .p_i;
        let dom = interference_power_dominant(snr, l, alpha)
            .map_err(to_config)?
            .p_i;
        let share = dom / full;
        checks.push(check(
            format!("first-ring-share-alpha{alpha}"),
            share >= 0.9,
            format!("first ring carries {:.1}% of the bound", 100.0 * share),
        ));
    }
    Ok(checks)
}

fn traffic_suite(cfg: &RunConfig) -> SuiteResult {
    let n = cfg.n.unwrap_or(4_096);
    GridNetwork::new(n).map_err(to_config)?;
    let stats = relay_traffic_montecarlo(n, 100, cfg.seed).map_err(to_config)?;
    let root = (n as f64).sqrt();
    let cap = 2.0 * root;
    let mean = stats.mean_center;
    Ok(vec![
        check(
            "center-slab-cap",
            (stats.max_center as f64) <= cap,
            format!("per-trial center max {} vs cap {cap}", stats.max_center),
        ),
        check(
            "center-mean",
            (mean / root - 1.0).abs() <= 0.05,
            format!("mean center traffic {mean:.2} vs sqrt(n) = {root}"),
        ),
    ])
}

fn ft_oracle_suite() -> SuiteResult {
    let mut checks = Vec::new();
    for method in [HierMethod::M2, HierMethod::M3, HierMethod::M4] {
        let mut worst: f64 = 0.0;
        for t in 2..=5 {
            for q in [1, 2] {
                for l in 3..=7 {
                    for n in [1e3, 1e6] {
                        let closed = slot_budget(method, n, t, l, q).map_err(to_config)?.f_t;
                        let rec = slot_budget_recursive(method, n, t, l, q)
                            .map_err(to_config)?
                            .f_t;
                        worst = worst.max((rec / closed - 1.0).abs());
                    }
                }
            }
        }
        checks.push(check(
            format!("slots-{}", method.label()),
            worst < 1e-6,
            format!("80 configurations, worst relative gap {worst:.1e}"),
        ));
    }
    Ok(checks)
}

fn lemma1_suite() -> SuiteResult {
    let mut checks = Vec::new();
    for q in [1u32, 2, 4, 8, 16] {
        let mut all = true;
        let mut min_margin = f64::INFINITY;
        for k in 0..=17 {
            let alpha = 2.5 + 0.5 * k as f64;
            let res = relay_bound_check(alpha, q).map_err(to_config)?;
            all &= res.pass;
            min_margin = min_margin.min(res.margin_qmf.min(res.margin_qf));
        }
        checks.push(check(
            format!("one-step-q{q}"),
            all,
            format!("18 exponents, smallest margin {min_margin:.4}"),
        ));
    }
    Ok(checks)
}

fn ordering_suite(cfg: &RunConfig) -> SuiteResult {
    let mut checks = Vec::new();
    for k in 0..=12 {
        let n = 10f64.powf(2.0 + 0.25 * k as f64).round() as u64;
        let mut rates = Vec::new();
        for method in HierMethod::ALL {
            rates.push(
                best_sum_rate(method, n, cfg.alpha, cfg.scheme, cfg.constants)
                    .map_err(to_config)?
                    .sum_rate,
            );
        }
        let (r1, r2, r3, r4) = (rates[0], rates[1], rates[2], rates[3]);
        checks.push(check(
            format!("order-n{n}"),
            r4 >= r2 && r2 >= r3 && r3 >= r1,
            format!("m4 {r4:.2} >= m2 {r2:.2} >= m3 {r3:.2} >= m1 {r1:.2}"),
        ));
    }
    Ok(checks)
}

fn to_config(e: ratekit::RateError) -> CliError {
    ConfigError(e.to_string()).into()
}

pub fn run_verify(suite: Suite, cfg: &RunConfig) -> Result<i32, CliError> {
    let checks = match suite {
        Suite::Rmt => rmt_suite(cfg)?,
        Suite::Submodular => submodular_suite(cfg)?,
        Suite::Concavity => concavity_suite()?,
        Suite::PiBound => pi_bound_suite(cfg)?,
        Suite::Traffic => traffic_suite(cfg)?,
        Suite::FtOracle => ft_oracle_suite()?,
        Suite::Lemma1 => lemma1_suite()?,
        Suite::Ordering => ordering_suite(cfg)?,
    };
    let failures = checks.iter().filter(|c| !c.pass).count();
    for c in &checks {
        let tag = if c.pass { "ok" } else { "fail" };
        println!("[{tag}] {}: {}", c.name, c.detail);
    }
    println!(
        "suite={} checks={} failures={failures} seed={}",
        suite.label(),
        checks.len(),
        cfg.seed
    );
    if cfg.out.is_some() {
        let mut table = Table::new(&["check", "status", "detail"]);
        for c in &checks {
            table.push(vec![
                Cell::Text(c.name.clone()),
                Cell::Text(if c.pass { "pass" } else { "fail" }.into()),
                Cell::Text(c.detail.clone()),
            ]);
        }
        let header = cfg.csv_header(&format!("verify {}", suite.label()));
        emit(cfg.out.as_deref(), &table.to_csv(&header))?;
    }
    Ok(if failures > 0 { 1 } else { 0 })
}
