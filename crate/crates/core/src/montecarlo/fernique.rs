use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{par_samples, McReport, Relation, Stats};
use crate::analysis::{ap_norm_p, NormOptions};
use crate::coeffs::CoefficientSequence;
use crate::error::{Error, Result};
use crate::gaf::sample_gaf;
use crate::measure::RadialMeasure;

/// Target for `P(φ ≤ τ)`.
pub const QUANTILE_TARGET: f64 = std::f64::consts::E / (1.0 + std::f64::consts::E);
/// Grid points are reported while `M e^{-2ⁿ}` is at least this.
const MIN_EXPECTED_COUNT: f64 = 10.0;

/// Constants of the Fernique argument for `φ` with
/// `c₂ φ(x) ≤ φ(√2 x) ≤ c₁ φ(x)` and `φ(x + y) ≤ c(φ(x) + φ(y))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerniqueConfig {
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub tau: f64,
    pub beta: f64,
    pub t_grid: Vec<f64>,
}

impl FerniqueConfig {
    /// `β = log 2 / log(c c₁²/c₂)` and `t_{n+1} = (c c₁²/c₂) t_n + t₀`,
    /// `t₀ = (c c₁/c₂) τ`, for `n = 0..len`.
    pub fn new(c: f64, c1: f64, c2: f64, tau: f64, len: usize) -> Self {
        let growth = c * c1 * c1 / c2;
        let t0 = c * c1 / c2 * tau;
        let t_grid = std::iter::successors(Some(t0), |t| Some(growth * t + t0)).take(len).collect();
        Self { c, c1, c2, tau, beta: 2f64.ln() / growth.ln(), t_grid }
    }

    /// A norm is subadditive and 1-homogeneous: `c = 1`, `c₁ = c₂ = √2`.
    pub fn for_norm(tau: f64, len: usize) -> Self {
        Self::new(1.0, std::f64::consts::SQRT_2, std::f64::consts::SQRT_2, tau, len)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerniqueRun {
    pub config: FerniqueConfig,
    pub reports: Vec<McReport>,
}

/// Smallest sample value `τ` with empirical `P(φ ≤ τ) ≥ q`.
fn empirical_quantile(sorted: &[f64], q: f64) -> f64 {
    let k = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[k - 1]
}

/// Empirical survival `P(‖F‖_{A^p(μ,s)} > t_n)` against `e^{-2ⁿ}`.
pub fn run_fernique_tail(
    a: &CoefficientSequence,
    mu: &RadialMeasure,
    p: f64,
    s: f64,
    m: usize,
    seed: u64,
) -> Result<FerniqueRun> {
    let start = Instant::now();
    if m == 0 {
        return Err(Error::Empty("sample set"));
    }
    if a.lp_radial_norm(mu, p, s)?.diverged {
        return Err(Error::Divergent { context: format!("‖a^(r)‖ in L^{p} on [0, {s}] for {a}") });
    }
    let opts = NormOptions::fast();
    let mut phi = par_samples(m, |i| -> Result<f64> {
        let f = sample_gaf(a, s, seed, i)?.polynomial();
        Ok(ap_norm_p(&f, mu, p, s, &[], &opts)?.root(p).value)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    phi.sort_by(f64::total_cmp);
    let tau = empirical_quantile(&phi, QUANTILE_TARGET);
    let len = (0..)
        .take_while(|&n| m as f64 * (-(2f64.powi(n))).exp() >= MIN_EXPECTED_COUNT)
        .count();
    let config = FerniqueConfig::for_norm(tau, len);
    let reports = config
        .t_grid
        .iter()
        .enumerate()
        .map(|(n, &t)| {
            let above = phi.len() - phi.partition_point(|&v| v <= t);
            let frac = above as f64 / m as f64;
            let stats = Stats {
                mean: frac,
                std_error: (frac * (1.0 - frac) / m as f64).sqrt(),
                count: m,
            };
            McReport::new("fernique_tail", seed)
                .param("coeffs", a)
                .param("measure", mu)
                .param("p", p)
                .param("s", s)
                .param("n", n)
                .param("t_n", t)
                .param("tau", tau)
                .param("beta", config.beta)
                .compare(stats, (-(2f64.powi(n as i32))).exp(), Relation::Leq)
                .timed(start)
        })
        .collect();
    Ok(FerniqueRun { config, reports })
}
