//! Multihop-routing baseline: closed-form lower and average sum rates at
//! the multihop-optimal power, and a Monte-Carlo oracle for the relay
//! traffic carried by a grid node under horizontal-then-vertical routing.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{require, RateError, Result};
use crate::model::{
    interference_power_bound, local_rate, optimal_snr_multihop, reuse_factor, GridNetwork,
};
use crate::schemes::RateBreakdown;

fn multihop_breakdown(n: u64, alpha: f64, throughput_denom: f64) -> Result<RateBreakdown> {
    require(n >= 4, "n", n as f64, "n >= 4")?;
    let snr = optimal_snr_multihop(alpha)?;
    let l = reuse_factor(snr, alpha)?;
    let p_i = interference_power_bound(n, snr, l, alpha)?.p_i;
    let r1 = local_rate(snr, p_i)?;
    let throughput = (n as f64).sqrt() / (throughput_denom * (l * l) as f64);
    Ok(RateBreakdown {
        coding_rate: r1,
        packet_throughput: throughput,
        sum_rate: r1 * throughput,
        // nearest-neighbour forwarding, no clustering
        cluster_sizes: vec![1],
        t_used: 1,
        q_used: 1,
        relay_scheme: None,
    })
}

/// Guaranteed multihop sum rate: local rate times sqrt(n)/(2L^2).
pub fn multihop_sum_rate_lower(n: u64, alpha: f64) -> Result<RateBreakdown> {
    multihop_breakdown(n, alpha, 2.0)
}

/// Average-traffic multihop sum rate, exactly twice the lower bound.
pub fn multihop_sum_rate_avg(n: u64, alpha: f64) -> Result<RateBreakdown> {
    multihop_breakdown(n, alpha, 1.0)
}

/// Relay-traffic statistics of horizontal-then-vertical routing under a
/// uniformly random fixed-point-free source-destination pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingTrafficStats {
    pub n: u64,
    pub trials: usize,
    pub seed: u64,
    /// Mean relay transits per node across trials, row-major.
    pub mean_traffic: Vec<f64>,
    /// Center-node transits of each trial.
    pub per_trial_center: Vec<u32>,
    pub mean_center: f64,
    /// Largest center-node count over the trials.
    pub max_center: u32,
    /// Largest count at any node over the trials.
    pub max_any: u32,
}

const DERANGEMENT_ATTEMPTS: usize = 10_000;

fn sample_derangement(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..DERANGEMENT_ATTEMPTS {
        perm.shuffle(rng);
        if perm.iter().enumerate().all(|(i, &p)| i != p) {
            return Ok(perm);
        }
    }
    Err(RateError::RejectionExceeded {
        attempts: DERANGEMENT_ATTEMPTS,
    })
}

/// Transit counts of one routing realization. Every route runs along the
/// source row first, then along the destination column; the bend node is
/// visited once and the endpoints are not transits.
fn route_counts(perm: &[usize], side: usize) -> Vec<u32> {
    let mut counts = vec![0u32; side * side];
    for (src, &dst) in perm.iter().enumerate() {
        let (r1, c1) = (src / side, src % side);
        let (r2, c2) = (dst / side, dst % side);
        let (ca, cb) = (c1.min(c2), c1.max(c2));
        for c in ca..=cb {
            let id = r1 * side + c;
            if id != src && id != dst {
                counts[id] += 1;
            }
        }
        let (ra, rb) = (r1.min(r2), r1.max(r2));
        for r in ra..=rb {
            if r == r1 {
                continue; // the bend already counted on the row sweep
            }
            let id = r * side + c2;
            if id != src && id != dst {
                counts[id] += 1;
            }
        }
    }
    counts
}

/// Runs `trials` independent pairings and aggregates per-node transit
/// counts. Deterministic for a given seed and worker-count independent.
pub fn relay_traffic_montecarlo(n: u64, trials: usize, seed: u64) -> Result<RoutingTrafficStats> {
    let grid = GridNetwork::new(n)?;
    require(trials >= 1, "trials", trials as f64, "trials >= 1")?;
    let side = grid.side() as usize;
    let center = (side / 2) * side + side / 2;
    let per_trial: Vec<Vec<u32>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64 + 1);
            let perm = sample_derangement(&mut rng, side * side)?;
            Ok(route_counts(&perm, side))
        })
        .collect::<Result<_>>()?;
    let mut mean_traffic = vec![0.0; side * side];
    let mut per_trial_center = Vec::with_capacity(trials);
    let mut max_any = 0u32;
    for counts in &per_trial {
        for (acc, &c) in mean_traffic.iter_mut().zip(counts) {
            *acc += c as f64;
            max_any = max_any.max(c);
        }
        per_trial_center.push(counts[center]);
    }
    for acc in &mut mean_traffic {
        *acc /= trials as f64;
    }
    let mean_center = per_trial_center.iter().map(|&c| c as f64).sum::<f64>() / trials as f64;
    let max_center = per_trial_center.iter().copied().max().unwrap_or(0);
    Ok(RoutingTrafficStats {
        n,
        trials,
        seed,
        mean_traffic,
        per_trial_center,
        mean_center,
        max_center,
        max_any,
    })
}
