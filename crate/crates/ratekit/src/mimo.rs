//! Rates of the distributed MIMO channel with finite backhaul: asymptotic
//! closed forms, the bisection for the optimal quantization level, exact
//! finite-size oracles and Monte-Carlo verification helpers.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{require, RateError, Result};
use crate::model::LOG2_E;

type C64 = Complex<f64>;

/// Distributed MIMO channel with finite backhaul, asymptotic array size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmfChannelSpec {
    r0: f64,
    n0: f64,
    snr: f64,
}

impl QmfChannelSpec {
    /// Backhaul `r0 >= 0` bits/symbol, noise-plus-interference `n0 >= 1`,
    /// sum transmit SNR `snr > 0`.
    pub fn new(r0: f64, n0: f64, snr: f64) -> Result<Self> {
        require(r0 >= 0.0, "r0", r0, "r0 >= 0")?;
        require(n0 >= 1.0, "n0", n0, "n0 >= 1")?;
        require(snr > 0.0, "snr", snr, "snr > 0")?;
        Ok(Self { r0, n0, snr })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    /// Quantization distortion bounds (σ², lower then upper) for r0 > 0.
    pub fn sigma_bounds(&self) -> (f64, f64) {
        // 1/(2^r0 - 1) written via e = 2^(-r0) so huge r0 cannot overflow
        let e = 2f64.powf(-self.r0);
        let scale = e / (1.0 - e);
        (self.n0 * scale, (self.n0 + self.snr) * scale)
    }
}

/// Quantization distortion power at one receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationLevel {
    pub sigma_q2: f64,
}

/// Entry distribution for sampled channel matrices. Both are i.i.d.,
/// zero mean, unit variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    /// exp(j theta) with uniform phase.
    UniformPhase,
    /// Standard circularly symmetric complex gaussian.
    ComplexGaussian,
}

/// A sampled m x m channel realization (row-major storage).
#[derive(Debug, Clone)]
pub struct FiniteChannelMatrix {
    m: usize,
    data: Vec<C64>,
    pub ensemble: Ensemble,
    pub seed: u64,
}

impl FiniteChannelMatrix {
    pub fn sample(m: usize, ensemble: Ensemble, seed: u64) -> Result<Self> {
        require(m >= 1, "m", m as f64, "m >= 1")?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self {
            m,
            data: sample_entries(&mut rng, m, ensemble),
            ensemble,
            seed,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.m + j]
    }

    fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    fn row_norm2(&self, i: usize) -> f64 {
        self.row(i).iter().map(|z| z.norm_sqr()).sum()
    }

    /// Gram matrix H H^H / m restricted to the given rows.
    fn gram_over_m(&self, rows: &[usize]) -> DMatrix<C64> {
        let k = rows.len();
        let mut g = DMatrix::zeros(k, k);
        for a in 0..k {
            let ra = self.row(rows[a]);
            for b in a..k {
                let rb = self.row(rows[b]);
                let mut acc = C64::new(0.0, 0.0);
                for (x, y) in ra.iter().zip(rb) {
                    acc += x * y.conj();
                }
                acc /= self.m as f64;
                g[(a, b)] = acc;
                g[(b, a)] = acc.conj();
            }
        }
        g
    }
}

fn sample_entries(rng: &mut ChaCha8Rng, m: usize, ensemble: Ensemble) -> Vec<C64> {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    (0..m * m)
        .map(|_| match ensemble {
            Ensemble::ComplexGaussian => {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re * inv_sqrt2, im * inv_sqrt2)
            }
            Ensemble::UniformPhase => {
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                C64::new(theta.cos(), theta.sin())
            }
        })
        .collect()
}

/// Base-2 log determinant of a Hermitian positive definite matrix.
fn logdet2_hpd(a: DMatrix<C64>) -> f64 {
    let chol = a.cholesky().expect("matrix must be positive definite");
    let l = chol.l();
    2.0 * (0..l.nrows()).map(|i| l[(i, i)].re.log2()).sum::<f64>()
}

/// logdet2(I + scale * diag(d)^(1/2) g diag(d)^(1/2)) for Hermitian psd g.
fn logdet2_scaled(g: &DMatrix<C64>, d: &[f64], scale: f64) -> f64 {
    let k = d.len();
    let mut a = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            a[(i, j)] = g[(i, j)] * (scale * (d[i] * d[j]).sqrt());
        }
        a[(i, i)] += C64::new(1.0, 0.0);
    }
    logdet2_hpd(a)
}

/// Symmetric-rate expression of the cooperative receive array,
/// strictly increasing with C(x) <= log2(1 + x) and C(0) = 0.
pub fn c_of_x(x: f64) -> Result<f64> {
    require(x >= 0.0, "x", x, "x >= 0")?;
    Ok(c_inner(x))
}

fn c_inner(x: f64) -> f64 {
    if x < 1e-12 {
        // leading series terms, the closed form is 0/0 at the origin
        return LOG2_E * x * (1.0 - x);
    }
    let s = (1.0 + 4.0 * x).sqrt();
    2.0 * ((1.0 + s) / 2.0).log2() - LOG2_E * (s - 1.0) / (s + 1.0)
}

/// Edge term of the asymptotic log-determinant,
/// F(x, z) = (√(x(1+√z)²+1) − √(x(1−√z)²+1))².
pub fn f_func(x: f64, z: f64) -> Result<f64> {
    require(x >= 0.0, "x", x, "x >= 0")?;
    require(z >= 0.0, "z", z, "z >= 0")?;
    Ok(f_inner(x, z))
}

fn f_inner(x: f64, z: f64) -> f64 {
    let s = z.sqrt();
    let a = (x * (1.0 + s) * (1.0 + s) + 1.0).sqrt();
    let b = (x * (1.0 - s) * (1.0 - s) + 1.0).sqrt();
    (a - b) * (a - b)
}

/// Large-system limit of (1/M) logdet2(I + (snr/M) H_k H_k^H) where H_k keeps
/// a fraction `beta` of the M receive rows. Concave in beta, equal to
/// `c_of_x(snr)` at beta = 1 and 0 at beta = 0.
pub fn c_of_beta(snr: f64, beta: f64) -> Result<f64> {
    require(snr >= 0.0, "snr", snr, "snr >= 0")?;
    require((0.0..=1.0).contains(&beta), "beta", beta, "0 <= beta <= 1")?;
    if beta == 0.0 || snr == 0.0 {
        return Ok(0.0);
    }
    let f = f_inner(snr, beta);
    Ok(beta * (1.0 + snr - f / 4.0).log2() + (1.0 + beta * snr - f / 4.0).log2()
        - LOG2_E / (4.0 * snr) * f)
}

/// Capacity ceiling of the channel, min{r0, C(snr/n0)}.
pub fn cutset_rate_asymptotic(spec: &QmfChannelSpec) -> f64 {
    spec.r0.min(c_inner(spec.snr / spec.n0))
}

/// Quantize-forward rate with the noise-matched distortion level,
/// C((2^r0 - 1) snr / (2^r0 n0 + snr)).
pub fn qf_rate_asymptotic(spec: &QmfChannelSpec) -> f64 {
    if spec.r0 == 0.0 {
        return 0.0;
    }
    // (g-1) snr / (g n0 + snr) rewritten via e = 2^(-r0); immune to 2^r0 overflow
    let e = 2f64.powf(-spec.r0);
    c_inner((1.0 - e) * spec.snr / (spec.n0 + e * spec.snr))
}

/// Rate at an explicit distortion level: the smaller of the backhaul branch
/// r0 - log2(1 + n0/σ²) and the array branch C(snr/(n0 + σ²)).
pub fn qmf_rate_asymptotic(spec: &QmfChannelSpec, sigma_q2: f64) -> Result<f64> {
    require(sigma_q2 > 0.0, "sigma_q2", sigma_q2, "sigma_q2 > 0")?;
    let b1 = spec.r0 - (1.0 + spec.n0 / sigma_q2).log2();
    let b2 = c_inner(spec.snr / (spec.n0 + sigma_q2));
    Ok(b1.min(b2))
}

/// Maximizes the two-branch rate over the distortion level by bisection on
/// the branch gap in log-σ² space. Returns `None` for the level when r0 = 0
/// (zero backhaul is degenerate, rate 0).
pub fn optimal_quantization(
    spec: &QmfChannelSpec,
    tol: f64,
) -> Result<(Option<QuantizationLevel>, f64)> {
    require(tol > 0.0, "tol", tol, "tol > 0")?;
    if spec.r0 == 0.0 {
        return Ok((None, 0.0));
    }
    let (rate, sigma_q2, gap) = bisect_quantization(spec);
    if gap.abs() > tol {
        return Err(RateError::NoConvergence {
            iterations: BISECT_ITERS,
            last: rate,
        });
    }
    Ok((Some(QuantizationLevel { sigma_q2 }), rate))
}

const BISECT_ITERS: usize = 200;

/// Full-precision inner bisection shared by the public optimizer and the
/// relaying chains. The branch gap is monotone in σ² and brackets with
/// opposite signs at the distortion bounds.
pub(crate) fn bisect_quantization(spec: &QmfChannelSpec) -> (f64, f64, f64) {
    let (s2_min, s2_max) = spec.sigma_bounds();
    let mut lo = s2_min.ln();
    let mut hi = s2_max.ln();
    let branches = |s2: f64| {
        let b1 = spec.r0 - (1.0 + spec.n0 / s2).log2();
        let b2 = c_inner(spec.snr / (spec.n0 + s2));
        (b1, b2)
    };
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        // keep σ² representable; r0 in the thousands underflows exp()
        let s2 = mid.exp().max(f64::MIN_POSITIVE);
        let (b1, b2) = branches(s2);
        if b1 - b2 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (b1 - b2).abs() < 1e-15 {
            break;
        }
    }
    let s2 = (0.5 * (lo + hi)).exp().max(f64::MIN_POSITIVE);
    let (b1, b2) = branches(s2);
    (b1.min(b2), s2, b1 - b2)
}

/// Exact finite-size rate: minimum over every receiver subset S of the
/// backhaul cost of S plus the array term of its complement, normalized
/// by the array size. `sigma_q2` holds one distortion power per receiver.
pub fn qmf_rate_finite(
    h: &FiniteChannelMatrix,
    r0: f64,
    n0: f64,
    snr: f64,
    sigma_q2: &[f64],
) -> Result<f64> {
    let m = h.m();
    const LIMIT: usize = 20;
    if m > LIMIT {
        return Err(RateError::TooLarge {
            m,
            limit: LIMIT,
            operation: "subset enumeration in qmf_rate_finite",
        });
    }
    require(r0 >= 0.0, "r0", r0, "r0 >= 0")?;
    require(n0 >= 1.0, "n0", n0, "n0 >= 1")?;
    require(snr > 0.0, "snr", snr, "snr > 0")?;
    if sigma_q2.len() != m {
        return Err(RateError::InvalidParameter {
            name: "sigma_q2.len",
            value: sigma_q2.len() as f64,
            requirement: "one distortion level per receiver",
        });
    }
    for &s2 in sigma_q2 {
        require(s2 > 0.0, "sigma_q2", s2, "sigma_q2 > 0")?;
    }
    let all: Vec<usize> = (0..m).collect();
    let gram = h.gram_over_m(&all);
    let penalty: Vec<f64> = sigma_q2
        .iter()
        .map(|s2| r0 - (1.0 + n0 / s2).log2())
        .collect();
    let coef: Vec<f64> = sigma_q2.iter().map(|s2| snr / (n0 + s2)).collect();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << m) {
        let mut v = 0.0;
        let mut comp = Vec::with_capacity(m);
        let mut d = Vec::with_capacity(m);
        for i in 0..m {
            if mask >> i & 1 == 1 {
                v += penalty[i];
            } else {
                comp.push(i);
                d.push(coef[i]);
            }
        }
        if !comp.is_empty() {
            let k = comp.len();
            let mut a = DMatrix::zeros(k, k);
            for (ai, &gi) in comp.iter().enumerate() {
                for (aj, &gj) in comp.iter().enumerate() {
                    a[(ai, aj)] = gram[(gi, gj)] * (d[ai] * d[aj]).sqrt();
                }
                a[(ai, ai)] += C64::new(1.0, 0.0);
            }
            v += logdet2_hpd(a);
        }
        best = best.min(v);
    }
    Ok(best / m as f64)
}

/// Finite-size capacity ceiling with the same subset structure but no
/// quantization penalty: (1/m) min over S of |S| r0 + logdet2 of the
/// complement array term at full snr/n0.
pub fn cutset_rate_finite(h: &FiniteChannelMatrix, r0: f64, n0: f64, snr: f64) -> Result<f64> {
    let m = h.m();
    const LIMIT: usize = 20;
    if m > LIMIT {
        return Err(RateError::TooLarge {
            m,
            limit: LIMIT,
            operation: "subset enumeration in cutset_rate_finite",
        });
    }
    require(r0 >= 0.0, "r0", r0, "r0 >= 0")?;
    require(n0 >= 1.0, "n0", n0, "n0 >= 1")?;
    require(snr > 0.0, "snr", snr, "snr > 0")?;
    let all: Vec<usize> = (0..m).collect();
    let gram = h.gram_over_m(&all);
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << m) {
        let mut v = 0.0;
        let mut comp = Vec::new();
        for i in 0..m {
            if mask >> i & 1 == 1 {
                v += r0;
            } else {
                comp.push(i);
            }
        }
        if !comp.is_empty() {
            let k = comp.len();
            let mut a = DMatrix::zeros(k, k);
            for (ai, &gi) in comp.iter().enumerate() {
                for (aj, &gj) in comp.iter().enumerate() {
                    a[(ai, aj)] = gram[(gi, gj)] * (snr / n0);
                }
                a[(ai, ai)] += C64::new(1.0, 0.0);
            }
            v += logdet2_hpd(a);
        }
        best = best.min(v);
    }
    Ok(best / m as f64)
}

/// Finite-size quantize-forward rate with the per-receiver noise-matched
/// distortion σ_i² = (n0 + (snr/m)‖h_i‖²)/(2^r0 - 1).
pub fn qf_rate_finite(h: &FiniteChannelMatrix, r0: f64, n0: f64, snr: f64) -> Result<f64> {
    let m = h.m();
    const LIMIT: usize = 256;
    if m > LIMIT {
        return Err(RateError::TooLarge {
            m,
            limit: LIMIT,
            operation: "qf_rate_finite",
        });
    }
    require(r0 >= 0.0, "r0", r0, "r0 >= 0")?;
    require(n0 >= 1.0, "n0", n0, "n0 >= 1")?;
    require(snr > 0.0, "snr", snr, "snr > 0")?;
    if r0 == 0.0 {
        return Ok(0.0);
    }
    let e = 2f64.powf(-r0);
    let all: Vec<usize> = (0..m).collect();
    let gram = h.gram_over_m(&all);
    let d: Vec<f64> = (0..m)
        .map(|i| {
            let per_user = snr / m as f64 * h.row_norm2(i);
            (1.0 - e) * snr / (n0 + e * per_user)
        })
        .collect();
    Ok(logdet2_scaled(&gram, &d, 1.0) / m as f64)
}

/// Mean of (1/m) logdet2(I + (snr/m) H H^H) over independent realizations.
/// Deterministic for a given seed and independent of worker count.
pub fn logdet_montecarlo(
    m: usize,
    snr: f64,
    ensemble: Ensemble,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    require(m >= 1, "m", m as f64, "m >= 1")?;
    require(snr >= 0.0, "snr", snr, "snr >= 0")?;
    require(trials >= 1, "trials", trials as f64, "trials >= 1")?;
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64 + 1);
            let data = sample_entries(&mut rng, m, ensemble);
            let h = FiniteChannelMatrix {
                m,
                data,
                ensemble,
                seed,
            };
            let rows: Vec<usize> = (0..m).collect();
            let gram = h.gram_over_m(&rows);
            let d = vec![1.0; m];
            logdet2_scaled(&gram, &d, snr) / m as f64
        })
        .collect();
    Ok(values.iter().sum::<f64>() / trials as f64)
}

/// Diminishing-returns check of f(S) = logdet2(I + (snr/m) H_S H_S^H) on
/// random nested subset pairs. True when every sampled triple satisfies
/// f(A + x) - f(A) >= f(B + x) - f(B) - 1e-9.
pub fn submodularity_check(
    h: &FiniteChannelMatrix,
    snr: f64,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    let m = h.m();
    const LIMIT: usize = 12;
    if m > LIMIT {
        return Err(RateError::TooLarge {
            m,
            limit: LIMIT,
            operation: "submodularity_check",
        });
    }
    require(snr > 0.0, "snr", snr, "snr > 0")?;
    require(trials >= 1, "trials", trials as f64, "trials >= 1")?;
    let full: u32 = (1 << m) - 1;
    let set_value = |mask: u32| -> f64 {
        if mask == 0 {
            return 0.0;
        }
        let rows: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let gram = h.gram_over_m(&rows);
        let d = vec![1.0; rows.len()];
        logdet2_scaled(&gram, &d, snr)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let b = loop {
            let mask = rng.gen::<u32>() & full;
            if mask != full {
                break mask;
            }
        };
        let a = b & rng.gen::<u32>();
        let outside: Vec<usize> = (0..m).filter(|i| b >> i & 1 == 0).collect();
        let x = outside[rng.gen_range(0..outside.len())];
        let gain_a = set_value(a | 1 << x) - set_value(a);
        let gain_b = set_value(b | 1 << x) - set_value(b);
        if gain_a < gain_b - 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_of_x_domain_and_origin() {
        assert!(c_of_x(-1e-9).is_err());
        assert_eq!(c_of_x(0.0).unwrap(), 0.0);
        let tiny = c_of_x(1e-15).unwrap();
        assert!((tiny / (LOG2_E * 1e-15) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn spec_validation() {
        assert!(QmfChannelSpec::new(-1.0, 1.0, 1.0).is_err());
        assert!(QmfChannelSpec::new(1.0, 0.5, 1.0).is_err());
        assert!(QmfChannelSpec::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn sigma_bounds_match_definitions() {
        let spec = QmfChannelSpec::new(4.0, 1.0, 100.0).unwrap();
        let (lo, hi) = spec.sigma_bounds();
        assert!((lo - 1.0 / 15.0).abs() < 1e-15);
        assert!((hi - 101.0 / 15.0).abs() < 1e-13);
    }

    #[test]
    fn finite_matrix_is_seed_deterministic() {
        let a = FiniteChannelMatrix::sample(4, Ensemble::UniformPhase, 7).unwrap();
        let b = FiniteChannelMatrix::sample(4, Ensemble::UniformPhase, 7).unwrap();
        assert_eq!(a.entry(2, 3), b.entry(2, 3));
        for i in 0..4 {
            for j in 0..4 {
                assert!((a.entry(i, j).norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn scalar_qmf_finite_matches_branches() {
        let h = FiniteChannelMatrix::sample(1, Ensemble::ComplexGaussian, 3).unwrap();
        let (r0, n0, snr) = (2.0, 1.0, 10.0);
        let s2 = 0.7;
        let v = qmf_rate_finite(&h, r0, n0, snr, &[s2]).unwrap();
        let g = h.entry(0, 0).norm_sqr();
        let backhaul = r0 - (1.0 + n0 / s2).log2();
        let array = (1.0 + snr / (n0 + s2) * g).log2();
        assert!((v - backhaul.min(array)).abs() < 1e-12);
    }

    #[test]
    fn size_limits_enforced() {
        let h = FiniteChannelMatrix::sample(21, Ensemble::UniformPhase, 1).unwrap();
        assert!(matches!(
            qmf_rate_finite(&h, 1.0, 1.0, 1.0, &vec![1.0; 21]),
            Err(RateError::TooLarge { .. })
        ));
        let h = FiniteChannelMatrix::sample(13, Ensemble::UniformPhase, 1).unwrap();
        assert!(matches!(
            submodularity_check(&h, 1.0, 1, 0),
            Err(RateError::TooLarge { .. })
        ));
    }

    #[test]
    fn montecarlo_zero_snr_is_exact_zero() {
        let v = logdet_montecarlo(8, 0.0, Ensemble::ComplexGaussian, 3, 1).unwrap();
        assert_eq!(v, 0.0);
    }
}
