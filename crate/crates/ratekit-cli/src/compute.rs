//! Point evaluation shared by the compute and sweep commands: one output
//! row per (method, n) pair, carrying the resolved operating point and the
//! rate breakdown, with infeasible points reported in place.

use std::io;

use rayon::prelude::*;

use ratekit::model::{optimal_snr_multihop, optimal_snr_single_stage, reuse_factor};
use ratekit::multihop::multihop_sum_rate_lower;
use ratekit::schemes::{
    original_hc_baseline, HierMethod, Method, RateBreakdown, SchemeConfig,
};
use ratekit::RateError;

use crate::config::RunConfig;
use crate::output::{emit, Cell, OutputFormat, Table};

pub const ROW_COLUMNS: [&str; 11] = [
    "method",
    "n",
    "alpha",
    "t",
    "q",
    "L",
    "snr",
    "coding_rate",
    "packet_throughput",
    "sum_rate",
    "note",
];

pub const DEFAULT_N: u64 = 10_000;

pub struct Row {
    pub method: Method,
    pub n: u64,
    pub alpha: f64,
    pub l: Option<u32>,
    pub snr: Option<f64>,
    pub outcome: Result<RateBreakdown, RateError>,
}

impl Row {
    pub fn cells(&self) -> Vec<Cell> {
        let l_cell = match self.l {
            Some(l) => Cell::Count(l as u64),
            None => Cell::Float(f64::NAN),
        };
        let snr_cell = Cell::Float(self.snr.unwrap_or(f64::NAN));
        match &self.outcome {
            Ok(b) => vec![
                Cell::Text(self.method.label().into()),
                Cell::Count(self.n),
                Cell::Float(self.alpha),
                Cell::Count(b.t_used as u64),
                Cell::Count(b.q_used as u64),
                l_cell,
                snr_cell,
                Cell::Float(b.coding_rate),
                Cell::Float(b.packet_throughput),
                Cell::Float(b.sum_rate),
                Cell::Text(String::new()),
            ],
            Err(e) => vec![
                Cell::Text(self.method.label().into()),
                Cell::Count(self.n),
                Cell::Float(self.alpha),
                Cell::Float(f64::NAN),
                Cell::Float(f64::NAN),
                l_cell,
                snr_cell,
                Cell::Float(f64::NAN),
                Cell::Float(f64::NAN),
                Cell::Float(f64::NAN),
                Cell::Text(e.to_string()),
            ],
        }
    }
}

/// Stage-count search bounded by tmax, mirroring the library's full
/// search: t ascending outside, q ascending inside, strictly greater sum
/// rate wins, so defaults reproduce the library answer exactly. Power
/// overrides are ignored here; searches run at the alpha-optimal point.
fn hier_search(cfg: &RunConfig, method: HierMethod, n: u64) -> Result<RateBreakdown, RateError> {
    let qs: Vec<u32> = match cfg.q {
        Some(q) => vec![q],
        None => vec![1, 2],
    };
    let mut best: Option<RateBreakdown> = None;
    for t in 1..=cfg.tmax {
        for &q in &qs {
            let mut sc = SchemeConfig::new(n, cfg.alpha, Method::Hier(method));
            sc.t = Some(t);
            sc.q = q;
            sc.relay_scheme = cfg.scheme;
            sc.l = cfg.l;
            sc.variant = cfg.constants;
            if let Ok(b) = sc.compute() {
                if best.as_ref().is_none_or(|c| b.sum_rate > c.sum_rate) {
                    best = Some(b);
                }
            }
        }
    }
    best.ok_or_else(|| {
        RateError::Infeasible(format!(
            "no feasible stage count for {} at n={n} within t <= {}",
            method.label(),
            cfg.tmax
        ))
    })
}

pub fn eval_row(cfg: &RunConfig, method: Method, n: u64) -> Row {
    let alpha = cfg.alpha;
    let (l, snr, outcome) = match method {
        Method::Multihop => {
            let point = optimal_snr_multihop(alpha)
                .and_then(|snr| reuse_factor(snr, alpha).map(|l| (l, snr)));
            match point {
                Ok((l, snr)) => (Some(l), Some(snr), multihop_sum_rate_lower(n, alpha)),
                Err(e) => (None, None, Err(e)),
            }
        }
        Method::OriginalHc => match optimal_snr_single_stage(alpha) {
            Ok(snr) => (Some(3), Some(snr), original_hc_baseline(n, alpha)),
            Err(e) => (None, None, Err(e)),
        },
        Method::SingleStage | Method::Hier(_) => {
            let searching = matches!(method, Method::Hier(_)) && cfg.t.is_none();
            let snr_override = if searching { None } else { cfg.snr };
            let point = match snr_override {
                Some(s) => Ok(s),
                None => optimal_snr_single_stage(alpha),
            }
            .and_then(|snr| match cfg.l {
                Some(l) => Ok((l, snr)),
                None => reuse_factor(snr, alpha).map(|l| (l, snr)),
            });
            match point {
                Ok((l, snr)) => {
                    let res = match method {
                        Method::SingleStage => {
                            let mut sc = SchemeConfig::new(n, alpha, method);
                            sc.q = cfg.q.unwrap_or(1);
                            sc.snr = cfg.snr;
                            sc.l = cfg.l;
                            sc.compute()
                        }
                        Method::Hier(h) => match cfg.t {
                            None => hier_search(cfg, h, n),
                            Some(t) => {
                                let mut sc = SchemeConfig::new(n, alpha, method);
                                sc.t = Some(t);
                                sc.q = cfg.q.unwrap_or(1);
                                sc.relay_scheme = cfg.scheme;
                                sc.snr = cfg.snr;
                                sc.l = cfg.l;
                                sc.variant = cfg.constants;
                                sc.compute()
                            }
                        },
                        _ => unreachable!(),
                    };
                    (Some(l), Some(snr), res)
                }
                Err(e) => (None, None, Err(e)),
            }
        }
    };
    Row {
        method,
        n,
        alpha,
        l,
        snr,
        outcome,
    }
}

/// Evaluates a (method, n) grid in parallel, keeping grid order.
pub fn eval_grid(cfg: &RunConfig, points: &[(Method, u64)]) -> Vec<Row> {
    points
        .par_iter()
        .map(|&(m, n)| eval_row(cfg, m, n))
        .collect()
}

pub fn rows_table(rows: &[Row]) -> Table {
    let mut table = Table::new(&ROW_COLUMNS);
    for r in rows {
        table.push(r.cells());
    }
    table
}

pub fn run_compute(cfg: &RunConfig) -> io::Result<i32> {
    let methods = if cfg.methods.is_empty() {
        vec![Method::Hier(HierMethod::M4)]
    } else {
        cfg.methods.clone()
    };
    let ns: Vec<u64> = match cfg.n_range {
        Some(r) => r.log_grid().iter().map(|v| v.round() as u64).collect(),
        None => vec![cfg.n.unwrap_or(DEFAULT_N)],
    };
    let mut points = Vec::new();
    for &m in &methods {
        for &n in &ns {
            points.push((m, n));
        }
    }
    let rows = eval_grid(cfg, &points);
    let table = rows_table(&rows);
    let text = match cfg.format_or(OutputFormat::PrettyTable) {
        OutputFormat::Csv => table.to_csv(&cfg.csv_header("compute")),
        OutputFormat::PrettyTable => table.to_pretty(),
    };
    emit(cfg.out.as_deref(), &text)?;
    let feasible = rows.iter().filter(|r| r.outcome.is_ok()).count();
    Ok(if feasible == 0 { 1 } else { 0 })
}
