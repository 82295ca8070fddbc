//! Network and channel primitives: the node grid, pathloss, TDMA reuse,
//! transmit-power rules and inter-cluster interference budgets.

use crate::error::{require, RateError, Result};

pub const LN2: f64 = std::f64::consts::LN_2;
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Unit-area square grid of `n` nodes, node (i, j) at (i/√n, j/√n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridNetwork {
    n: u64,
    side: u64,
}

impl GridNetwork {
    /// `n` must be a positive perfect square.
    pub fn new(n: u64) -> Result<Self> {
        let side = n.isqrt();
        if n == 0 || side * side != n {
            return Err(RateError::InvalidParameter {
                name: "n",
                value: n as f64,
                requirement: "a positive perfect square",
            });
        }
        Ok(Self { n, side })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn side(&self) -> u64 {
        self.side
    }

    /// Position of node (i, j) inside the unit square.
    pub fn position(&self, i: u64, j: u64) -> (f64, f64) {
        let s = self.side as f64;
        (i as f64 / s, j as f64 / s)
    }

    /// Minimum inter-node distance, 1/√n.
    pub fn min_distance(&self) -> f64 {
        1.0 / self.side as f64
    }
}

/// Distance-power pathloss: gain magnitude r^(-alpha/2) at distance r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathlossChannel {
    alpha: f64,
}

impl PathlossChannel {
    pub fn new(alpha: f64) -> Result<Self> {
        require(alpha >= 2.0, "alpha", alpha, "alpha >= 2")?;
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gain_magnitude(&self, r: f64) -> f64 {
        r.powf(-self.alpha / 2.0)
    }

    /// Received power at distance r for transmit power p.
    pub fn received_power(&self, p: f64, r: f64) -> f64 {
        p * r.powf(-self.alpha)
    }
}

/// Transmit-power rule: local phase at `snr_local`, distributed MIMO phase
/// splits `snr_mimo` across the array. The cap is enforced, never optimized
/// against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPolicy {
    pub snr_local: f64,
    pub snr_mimo: f64,
    pub snr_max: f64,
    pub cluster_area: f64,
}

impl PowerPolicy {
    pub const DEFAULT_SNR_MAX: f64 = 1.2089258196146292e24; // 2^80

    pub fn new(snr_local: f64, snr_mimo: f64, cluster_area: f64) -> Result<Self> {
        let policy = Self {
            snr_local,
            snr_mimo,
            snr_max: Self::DEFAULT_SNR_MAX,
            cluster_area,
        };
        require(
            snr_local > 0.0 && snr_local <= policy.snr_max,
            "snr_local",
            snr_local,
            "0 < snr_local <= snr_max",
        )?;
        require(
            snr_mimo > 0.0 && snr_mimo <= policy.snr_max,
            "snr_mimo",
            snr_mimo,
            "0 < snr_mimo <= snr_max",
        )?;
        require(cluster_area > 0.0, "cluster_area", cluster_area, "area > 0")?;
        Ok(policy)
    }

    /// Per-node transmit power in the local phase.
    pub fn local_power(&self, alpha: f64) -> f64 {
        self.snr_local.min(self.snr_max) * self.cluster_area.powf(alpha / 2.0)
    }

    /// Per-node transmit power when an array of `m` nodes shares the MIMO budget.
    pub fn mimo_per_node_power(&self, alpha: f64, m: u64) -> f64 {
        self.snr_mimo.min(self.snr_max) / m as f64 * self.cluster_area.powf(alpha / 2.0)
    }
}

/// Spatial reuse schedule: cluster (u, v) is active in slot (u mod L, v mod L).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TdmaConfig {
    l: u32,
}

impl TdmaConfig {
    pub fn new(l: u32) -> Result<Self> {
        require(l >= 2, "L", l as f64, "L >= 2")?;
        Ok(Self { l })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// Fraction of clusters active in any one slot.
    pub fn active_fraction(&self) -> f64 {
        1.0 / (self.l as f64 * self.l as f64)
    }

    /// True when both clusters transmit in the same slot.
    pub fn co_active(&self, a: (u64, u64), b: (u64, u64)) -> bool {
        let l = self.l as u64;
        a.0 % l == b.0 % l && a.1 % l == b.1 % l
    }
}

/// How an interference power figure was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterferenceMethod {
    RingBound,
    Dominant,
    ExactGrid,
}

/// Normalized interference power relative to unit noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceBudget {
    pub p_i: f64,
    pub method: InterferenceMethod,
}

/// Smallest reuse factor that keeps interference below the noise-like
/// threshold: ceil(snr^(1/(2 alpha)) + 1).
pub fn reuse_factor(snr: f64, alpha: f64) -> Result<u32> {
    require(snr > 0.0, "snr", snr, "snr > 0")?;
    require(alpha >= 2.0, "alpha", alpha, "alpha >= 2")?;
    Ok((snr.powf(1.0 / (2.0 * alpha)) + 1.0).ceil() as u32)
}

/// Transmit SNR maximizing the single-stage sum rate, 2^(2(3 + alpha/ln 2)).
pub fn optimal_snr_single_stage(alpha: f64) -> Result<f64> {
    require(alpha >= 2.0, "alpha", alpha, "alpha >= 2")?;
    Ok(2f64.powf(2.0 * (3.0 + alpha / LN2)))
}

/// Transmit SNR maximizing the multihop sum rate, 2^(2(3 + alpha/(2 ln 2))).
pub fn optimal_snr_multihop(alpha: f64) -> Result<f64> {
    require(alpha >= 2.0, "alpha", alpha, "alpha >= 2")?;
    Ok(2f64.powf(2.0 * (3.0 + alpha / (2.0 * LN2))))
}

/// Ring-counting interference bound: sum over i = 1..floor(√n) of
/// 8 i snr (L i - 1)^(-alpha). Small terms are accumulated first.
pub fn interference_power_bound(n: u64, snr: f64, l: u32, alpha: f64) -> Result<InterferenceBudget> {
    require(n >= 1, "n", n as f64, "n >= 1")?;
    require(snr > 0.0, "snr", snr, "snr > 0")?;
    require(l >= 2, "L", l as f64, "L >= 2")?;
    require(alpha >= 2.0, "alpha", alpha, "alpha >= 2")?;
    let rings = n.isqrt();
    let lf = l as f64;
    let mut tot = 0.0;
    for i in (1..=rings).rev() {
        let i = i as f64;
        tot += 8.0 * i * (lf * i - 1.0).powf(-alpha);
    }
    Ok(InterferenceBudget {
        p_i: snr * tot,
        method: InterferenceMethod::RingBound,
    })
}

/// Nearest-ring approximation of the bound, its i = 1 term.
pub fn interference_power_dominant(snr: f64, l: u32, alpha: f64) -> Result<InterferenceBudget> {
    let full = interference_power_bound(1, snr, l, alpha)?;
    Ok(InterferenceBudget {
        p_i: full.p_i,
        method: InterferenceMethod::Dominant,
    })
}

/// Worst-case interference at the grid center: one transmitter per co-active
/// cluster, placed at the cluster node nearest the receiver.
pub fn interference_power_exact(
    grid: &GridNetwork,
    l: u32,
    alpha: f64,
    snr: f64,
    cluster_side: u64,
) -> Result<InterferenceBudget> {
    require(snr > 0.0, "snr", snr, "snr > 0")?;
    require(alpha >= 2.0, "alpha", alpha, "alpha >= 2")?;
    let tdma = TdmaConfig::new(l)?;
    let side = grid.side();
    if cluster_side == 0 || side % cluster_side != 0 {
        return Err(RateError::InvalidParameter {
            name: "cluster_side",
            value: cluster_side as f64,
            requirement: "a divisor of the grid side",
        });
    }
    let clusters = side / cluster_side;
    let (rx_i, rx_j) = (side / 2, side / 2);
    let rx_cluster = (rx_i / cluster_side, rx_j / cluster_side);
    let area = (cluster_side as f64 / side as f64).powi(2);
    let channel = PathlossChannel::new(alpha)?;
    let power = snr * area.powf(alpha / 2.0);
    let mut tot = 0.0;
    for u in 0..clusters {
        for v in 0..clusters {
            if (u, v) == rx_cluster || !tdma.co_active((u, v), rx_cluster) {
                continue;
            }
            // nearest node of cluster (u, v) to the receiver
            let i0 = rx_i.clamp(u * cluster_side, (u + 1) * cluster_side - 1);
            let j0 = rx_j.clamp(v * cluster_side, (v + 1) * cluster_side - 1);
            let di = (i0 as f64 - rx_i as f64) / side as f64;
            let dj = (j0 as f64 - rx_j as f64) / side as f64;
            tot += channel.received_power(power, di.hypot(dj));
        }
    }
    Ok(InterferenceBudget {
        p_i: tot,
        method: InterferenceMethod::ExactGrid,
    })
}

/// Single-user rate with interference treated as noise,
/// log2(1 + snr/(1 + p_i)).
pub fn local_rate(snr: f64, p_i: f64) -> Result<f64> {
    require(snr > 0.0, "snr", snr, "snr > 0")?;
    require(p_i >= 0.0, "p_i", p_i, "p_i >= 0")?;
    Ok((1.0 + snr / (1.0 + p_i)).log2())
}

/// Outcome of the interference-as-noise design inequality INR <= √snr.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TinCheck {
    pub holds: bool,
    /// Slack in dB, 10 log10(√snr / INR).
    pub margin_db: f64,
}

/// Checks (L-1)^(-alpha) snr <= √snr at the given operating point.
pub fn tin_condition_holds(snr: f64, l: u32, alpha: f64) -> Result<TinCheck> {
    require(snr > 0.0, "snr", snr, "snr > 0")?;
    require(l >= 2, "L", l as f64, "L >= 2")?;
    require(alpha >= 2.0, "alpha", alpha, "alpha >= 2")?;
    let inr = (l as f64 - 1.0).powf(-alpha) * snr;
    let threshold = snr.sqrt();
    Ok(TinCheck {
        holds: inr <= threshold,
        margin_db: 10.0 * (threshold / inr).log10(),
    })
}
