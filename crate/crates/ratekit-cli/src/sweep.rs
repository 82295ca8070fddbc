//! One-axis parameter sweeps. The grid is either the documented default
//! for the axis or an explicit LO:HI:POINTS request; points run in
//! parallel and rows come out in grid order.

use rayon::prelude::*;

use ratekit::schemes::{HierMethod, Method};

use crate::compute::{eval_row, rows_table, Row, DEFAULT_N};
use crate::config::{ConfigError, RangeSpec, RunConfig};
use crate::output::{emit, OutputFormat};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    /// Node count, geometric grid (default 10^2..10^5, 13 points)
    N,
    /// Reuse factor (default 2..12)
    #[value(name = "L", alias = "l")]
    L,
    /// Transmit SNR, geometric grid (default 2^6..2^44, 20 points)
    Snr,
    /// Pathloss exponent (default 3..11 step 0.25)
    Alpha,
    /// Stage count, hierarchical methods only (default 1..8)
    T,
    /// Expansion factor (default 1..4)
    Q,
}

fn axis_label(axis: Axis) -> &'static str {
    match axis {
        Axis::N => "n",
        Axis::L => "L",
        Axis::Snr => "snr",
        Axis::Alpha => "alpha",
        Axis::T => "t",
        Axis::Q => "q",
    }
}

/// Integer grid from a linear range request, deduplicated after rounding.
fn int_grid(range: &RangeSpec) -> Vec<u64> {
    let mut vals: Vec<u64> = range.lin_grid().iter().map(|v| v.round() as u64).collect();
    vals.dedup();
    vals
}

pub fn run_sweep(axis: Axis, cfg: &RunConfig) -> Result<i32, CliError> {
    let methods = if cfg.methods.is_empty() {
        vec![Method::Hier(HierMethod::M4)]
    } else {
        cfg.methods.clone()
    };
    let hier_only = methods.iter().all(|m| matches!(m, Method::Hier(_)));
    let no_fixed_point_methods = methods
        .iter()
        .all(|m| matches!(m, Method::Hier(_) | Method::SingleStage));
    match axis {
        Axis::T if !hier_only => {
            return Err(ConfigError(
                "sweep t only applies to hierarchical methods (m1..m4)".into(),
            )
            .into());
        }
        Axis::L | Axis::Snr | Axis::Q if !no_fixed_point_methods => {
            return Err(ConfigError(format!(
                "sweep {} needs methods that accept operating-point overrides (m1..m4, single-stage)",
                axis_label(axis)
            ))
            .into());
        }
        _ => {}
    }
    let n = cfg.n.unwrap_or(DEFAULT_N);
    // one RunConfig clone per grid point, with the axis value pinned
    let configs: Vec<(RunConfig, u64)> = match axis {
        Axis::N => {
            let range = cfg
                .n_range
                .or(cfg.range)
                .unwrap_or(RangeSpec { lo: 1e2, hi: 1e5, points: 13 });
            range
                .log_grid()
                .iter()
                .map(|v| (cfg.clone(), v.round() as u64))
                .collect()
        }
        Axis::L => {
            let grid = match &cfg.range {
                Some(r) => int_grid(r),
                None => (2..=12).collect(),
            };
            grid.into_iter()
                .map(|l| {
                    let mut c = cfg.clone();
                    c.l = Some(l as u32);
                    (c, n)
                })
                .collect()
        }
        Axis::Snr => {
            // stage searches pin the power, so the override would be lost
            if cfg.t.is_none() && methods.iter().any(|m| matches!(m, Method::Hier(_))) {
                return Err(ConfigError(
                    "sweep snr over a hierarchical method needs a fixed stage count (--t)".into(),
                )
                .into());
            }
            let grid = match &cfg.range {
                Some(r) => r.log_grid(),
                None => (0..20).map(|k| 2f64.powf(6.0 + 2.0 * k as f64)).collect(),
            };
            grid.into_iter()
                .map(|snr| {
                    let mut c = cfg.clone();
                    c.snr = Some(snr);
                    (c, n)
                })
                .collect()
        }
        Axis::Alpha => {
            let grid = match &cfg.range {
                Some(r) => r.lin_grid(),
                None => (0..=32).map(|k| 3.0 + 0.25 * k as f64).collect(),
            };
            grid.into_iter()
                .map(|alpha| {
                    let mut c = cfg.clone();
                    c.alpha = alpha;
                    (c, n)
                })
                .collect()
        }
        Axis::T => {
            let grid = match &cfg.range {
                Some(r) => int_grid(r),
                None => (1..=8).collect(),
            };
            for &t in &grid {
                if !(1..=8).contains(&t) {
                    return Err(ConfigError(format!("t grid value {t} outside 1..=8")).into());
                }
            }
            grid.into_iter()
                .map(|t| {
                    let mut c = cfg.clone();
                    c.t = Some(t as usize);
                    (c, n)
                })
                .collect()
        }
        Axis::Q => {
            let grid = match &cfg.range {
                Some(r) => int_grid(r),
                None => (1..=4).collect(),
            };
            for &q in &grid {
                if q < 1 {
                    return Err(ConfigError("q grid values must be >= 1".into()).into());
                }
            }
            grid.into_iter()
                .map(|q| {
                    let mut c = cfg.clone();
                    c.q = Some(q as u32);
                    (c, n)
                })
                .collect()
        }
    };
    let jobs: Vec<(&RunConfig, Method, u64)> = configs
        .iter()
        .flat_map(|(c, n)| methods.iter().map(move |&m| (c, m, *n)))
        .collect();
    let rows: Vec<Row> = jobs
        .par_iter()
        .map(|&(c, m, n)| eval_row(c, m, n))
        .collect();
    let table = rows_table(&rows);
    let text = match cfg.format_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let mut header = cfg.csv_header(&format!("sweep {}", axis_label(axis)));
            header.push(("points".into(), configs.len().to_string()));
            table.to_csv(&header)
        }
        OutputFormat::PrettyTable => table.to_pretty(),
    };
    emit(cfg.out.as_deref(), &text)?;
    let feasible = rows.iter().filter(|r| r.outcome.is_ok()).count();
    Ok(if feasible == 0 { 1 } else { 0 })
}
