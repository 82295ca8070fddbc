//! Coding-rate chains of recursive relaying: each stage feeds its rate as
//! backhaul budget to the next distributed MIMO stage, under a fixed
//! interference budget, until the sequence settles at its limit.

use crate::error::{require, RateError, Result};
use crate::mimo::{bisect_quantization, qf_rate_asymptotic, QmfChannelSpec};
use crate::model::{
    interference_power_bound, local_rate, optimal_snr_single_stage, reuse_factor,
};

/// How each relaying stage converts backhaul budget into a forwarded rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelayScheme {
    /// Distortion level optimized by bisection at every stage.
    QmfOptimal,
    /// Noise-matched distortion, no per-stage optimization.
    Qf,
}

impl RelayScheme {
    pub fn label(&self) -> &'static str {
        match self {
            RelayScheme::QmfOptimal => "qmf",
            RelayScheme::Qf => "qf",
        }
    }
}

/// Interference tail is evaluated on a fixed large network so the chain
/// depends on alpha and q only, not on the caller's network size.
const TAIL_N: u64 = 1_000_000;

const FIXED_POINT_CAP: usize = 10_000;

/// The per-stage rates R^(1), R^(2), ... of a relaying chain, with the
/// operating point they were computed at.
#[derive(Debug, Clone, PartialEq)]
pub struct CodingRateSequence {
    pub alpha: f64,
    pub q: u32,
    pub relay_scheme: RelayScheme,
    /// rates[t-1] holds the stage-t rate.
    pub rates: Vec<f64>,
    /// Limit of the chain when established separately, None otherwise.
    pub r_star: Option<f64>,
    /// Last two entries agree within 1e-9.
    pub converged: bool,
    /// Backhaul hit zero; remaining entries were filled with zeros.
    pub collapsed: bool,
    pub p_i: f64,
    pub snr: f64,
    pub l: u32,
}

/// One relaying stage: backhaul budget `r0` into forwarded rate, at array
/// noise-plus-interference `n0` and sum SNR `snr`.
pub fn relay_rate(scheme: RelayScheme, r0: f64, n0: f64, snr: f64) -> Result<f64> {
    if r0 == 0.0 {
        return Ok(0.0);
    }
    let spec = QmfChannelSpec::new(r0, n0, snr)?;
    Ok(match scheme {
        RelayScheme::QmfOptimal => bisect_quantization(&spec).0,
        RelayScheme::Qf => qf_rate_asymptotic(&spec),
    })
}

/// Chain at the alpha-optimal operating point: SNR from
/// `optimal_snr_single_stage`, reuse factor from the TIN rule, interference
/// from the ring bound on the reference tail network.
pub fn rate_sequence(
    alpha: f64,
    q: u32,
    relay_scheme: RelayScheme,
    t_max: usize,
) -> Result<CodingRateSequence> {
    rate_sequence_at(alpha, q, relay_scheme, t_max, None, None)
}

/// Chain with explicit overrides for the SNR or the reuse factor. Used by
/// schemes that pin L (the fixed-L baseline) or sweep the power.
pub fn rate_sequence_at(
    alpha: f64,
    q: u32,
    relay_scheme: RelayScheme,
    t_max: usize,
    snr: Option<f64>,
    l: Option<u32>,
) -> Result<CodingRateSequence> {
    require(q >= 1, "q", q as f64, "q >= 1")?;
    require(t_max >= 1, "t_max", t_max as f64, "t_max >= 1")?;
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
    let p_i = interference_power_bound(TAIL_N, snr, l, alpha)?.p_i;
    let mut rates = Vec::with_capacity(t_max);
    rates.push(local_rate(snr, p_i)?);
    let mut collapsed = false;
    for _ in 1..t_max {
        let prev = *rates.last().unwrap();
        if prev <= 0.0 {
            collapsed = true;
            rates.push(0.0);
            continue;
        }
        rates.push(relay_rate(relay_scheme, q as f64 * prev, p_i + 1.0, snr)?);
    }
    let converged =
        rates.len() >= 2 && (rates[rates.len() - 1] - rates[rates.len() - 2]).abs() < 1e-9;
    Ok(CodingRateSequence {
        alpha,
        q,
        relay_scheme,
        rates,
        r_star: None,
        converged,
        collapsed,
        p_i,
        snr,
        l,
    })
}

/// Limit of the chain: iterates the stage map from R^(1) until successive
/// values agree within `tol`, up to 10^4 steps.
pub fn rate_fixed_point(alpha: f64, q: u32, relay_scheme: RelayScheme, tol: f64) -> Result<f64> {
    require(tol > 0.0, "tol", tol, "tol > 0")?;
    let head = rate_sequence(alpha, q, relay_scheme, 1)?;
    let (p_i, snr) = (head.p_i, head.snr);
    let mut r = head.rates[0];
    for _ in 0..FIXED_POINT_CAP {
        let next = relay_rate(relay_scheme, q as f64 * r, p_i + 1.0, snr)?;
        if (next - r).abs() < tol {
            return Ok(next);
        }
        r = next;
    }
    Err(RateError::NoConvergence {
        iterations: FIXED_POINT_CAP,
        last: r,
    })
}

/// Top stage of a finite hierarchy sees no inter-cluster interference, so
/// its relay step runs at n0 = 1; the stage rate cannot exceed its input.
pub fn effective_top_rate(rt: f64, q: u32, snr: f64, relay_scheme: RelayScheme) -> Result<f64> {
    if rt <= 0.0 {
        return Ok(0.0);
    }
    Ok(rt.min(relay_rate(relay_scheme, q as f64 * rt, 1.0, snr)?))
}

/// Outcome of the one-step contraction check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayBoundCheck {
    /// Both margins are non-negative.
    pub pass: bool,
    /// R^(1) minus the relayed rate under the optimal-distortion scheme.
    pub margin_qmf: f64,
    /// Same margin under noise-matched distortion.
    pub margin_qf: f64,
}

/// Verifies that a single relaying stage never beats the local rate it is
/// fed from, for both schemes: relay(q R^(1), 1+P_I, SNR) <= R^(1).
pub fn relay_bound_check(alpha: f64, q: u32) -> Result<RelayBoundCheck> {
    let head = rate_sequence(alpha, q, RelayScheme::QmfOptimal, 1)?;
    let r1 = head.rates[0];
    let n0 = head.p_i + 1.0;
    let margin_qmf = r1 - relay_rate(RelayScheme::QmfOptimal, q as f64 * r1, n0, head.snr)?;
    let margin_qf = r1 - relay_rate(RelayScheme::Qf, q as f64 * r1, n0, head.snr)?;
    Ok(RelayBoundCheck {
        pass: margin_qmf >= 0.0 && margin_qf >= 0.0,
        margin_qmf,
        margin_qf,
    })
}
