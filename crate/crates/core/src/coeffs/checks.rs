//! Analytic checkers: the dyadic block criterion, the Mittag-Leffler ratio
//! and the zero-product statistic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::IntegralResult;
use crate::quadrature::{integrate_interval, integrate_levels, DivergenceMonitor, Level, QuadOptions, Trend};
use crate::special::{ln_gamma, ln_recip_gamma, log_add};

/// Nonnegative sequences with closed-form generating functions and block sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum MmSequence {
    /// `c_k = c`.
    Constant { c: f64 },
    /// `c_k = binom(k + β, k) ~ k^β / Γ(β + 1)`, generating `(1 - r)^{-β-1}`.
    Binomial { beta: f64 },
    /// `c_{2^n} = 2^{nγ} n^δ` for `n ≥ 1`, zero elsewhere.
    Lacunary { gamma: f64, delta: f64 },
    /// `c_k = ρ^k`, `0 < ρ < 1`.
    Geometric { rho: f64 },
    /// Finitely many terms.
    Finite { values: Vec<f64> },
}

impl MmSequence {
    /// `ln Σ c_k r^k` at `r = 1 - t`.
    fn ln_generating(&self, t: f64) -> f64 {
        let ln_r = (-t).ln_1p();
        match self {
            Self::Constant { c } => c.ln() - t.ln(),
            Self::Binomial { beta } => -(beta + 1.0) * t.ln(),
            Self::Lacunary { gamma, delta } => {
                let mut acc = f64::NEG_INFINITY;
                for n in 1..1024 {
                    let nf = n as f64;
                    let pow = 2f64.powi(n);
                    let term = nf * gamma * std::f64::consts::LN_2 + delta * nf.ln() + pow * ln_r;
                    acc = log_add(acc, term);
                    if pow * t > 50.0 && term < acc - 40.0 {
                        break;
                    }
                }
                acc
            }
            Self::Geometric { rho } => -(-(rho * (1.0 - t))).ln_1p(),
            Self::Finite { values } => {
                let r = 1.0 - t;
                values.iter().rev().fold(0.0, |acc, c| acc * r + c).ln()
            }
        }
    }

    /// `ln Σ_{k=2^n}^{2^{n+1}-1} c_k`.
    fn ln_block(&self, n: u32) -> f64 {
        let lo = 2f64.powi(n as i32);
        let hi = 2.0 * lo - 1.0;
        match self {
            Self::Constant { c } => c.ln() + lo.ln(),
            Self::Binomial { beta } => {
                // Σ_{k≤K} binom(k+β, k) = binom(K+β+1, K)
                let ln_partial = |k: f64| ln_gamma(k + beta + 2.0) - ln_gamma(k + 1.0) - ln_gamma(beta + 2.0);
                let (a, b) = (ln_partial(hi), ln_partial(lo - 1.0));
                a + (-(b - a).exp()).ln_1p()
            }
            Self::Lacunary { gamma, delta } => {
                if n == 0 {
                    f64::NEG_INFINITY
                } else {
                    let nf = n as f64;
                    nf * gamma * std::f64::consts::LN_2 + delta * nf.ln()
                }
            }
            Self::Geometric { rho } => {
                // ρ^lo (1 - ρ^lo) / (1 - ρ)
                lo * rho.ln() + (-(lo * rho.ln()).exp()).ln_1p() - (-rho).ln_1p()
            }
            Self::Finite { values } => {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| (*k as f64) >= lo && (*k as f64) <= hi)
                    .map(|(_, v)| v)
                    .sum();
                s.ln()
            }
        }
    }
}

/// Outcome of the dyadic comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MmCheck {
    pub integral: IntegralResult,
    pub dyadic_sum: IntegralResult,
    pub agree: bool,
}

/// Compares `∫₀¹ (Σ c_k r^k)^q (1 - r)^α dr` with
/// `Σ_{n ≤ depth} 2^{-n(α+1)} (Σ_{k=2^n}^{2^{n+1}-1} c_k)^q`.
pub fn mm_dyadic_check(c: &MmSequence, q: f64, alpha: f64, depth: u32) -> Result<MmCheck> {
    if !(q > 0.0) {
        return Err(Error::OutOfRange {
            name: "q",
            value: q,
            expected: "q > 0",
        });
    }
    if !(alpha > -1.0) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            expected: "alpha > -1",
        });
    }
    if depth > 40 {
        return Err(Error::OutOfRange {
            name: "depth",
            value: depth as f64,
            expected: "depth <= 40",
        });
    }
    let opts = QuadOptions::default();
    // integrate in t = 1 - r over dyadic panels [2^{-j-1}, 2^{-j}]
    let h = |t: f64| (q * c.ln_generating(t) + alpha * t.ln()).exp();
    let panel = |j: usize| -> Result<Level> {
        let (a, b) = (0.5f64.powi(j as i32 + 1), 0.5f64.powi(j as i32));
        let est = match integrate_interval(h, a, b, &[], &opts) {
            Ok(est) => est,
            Err(Error::NonFiniteIntegrand { .. }) => {
                return Ok(Level {
                    value: f64::INFINITY,
                    error: 0.0,
                    regular: true,
                    last: false,
                })
            }
            Err(e) => return Err(e),
        };
        Ok(Level {
            value: est.value,
            error: est.error,
            regular: true,
            last: false,
        })
    };
    let out = integrate_levels(panel, None::<fn(usize) -> Result<f64>>, &opts)?;
    let integral = if out.diverged {
        IntegralResult::divergent()
    } else {
        IntegralResult::finite(out.value, out.error)
    };

    let mut monitor = DivergenceMonitor::new();
    let mut partial = 0.0;
    let mut dyadic_sum = IntegralResult::divergent();
    for n in 0..=depth {
        let ln_d = -(n as f64) * (alpha + 1.0) * std::f64::consts::LN_2 + q * c.ln_block(n);
        let d = if ln_d > 700.0 { f64::INFINITY } else { ln_d.exp() };
        partial += d;
        monitor.push(d, partial);
        match monitor.assess(1e-12, n == depth) {
            Trend::Diverged => break,
            Trend::Converged(tail) => {
                dyadic_sum = IntegralResult::finite(partial + tail, tail);
                break;
            }
            Trend::Undecided => {}
        }
    }
    Ok(MmCheck {
        integral,
        dyadic_sum,
        agree: integral.diverged == dyadic_sum.diverged,
    })
}

/// The 20-sequence corpus with `(c, q, α)` and the expected verdict
/// (`true` = both sides finite).
pub fn mm_corpus() -> Vec<(MmSequence, f64, f64, bool)> {
    use MmSequence::*;
    vec![
        (Constant { c: 1.0 }, 0.5, 0.0, true),
        (Constant { c: 1.0 }, 1.0, 0.0, false),
        (Constant { c: 1.0 }, 2.0, 0.0, false),
        (Constant { c: 1.0 }, 1.5, 1.0, true),
        (Constant { c: 1.0 }, 2.0, 1.0, false),
        (Constant { c: 3.0 }, 2.5, 1.0, false),
        (Constant { c: 1.0 }, 0.75, 0.0, true),
        (Finite { values: vec![1.0] }, 1.0, 0.0, true),
        (Finite { values: vec![1.0, 2.0, 3.0] }, 3.0, -0.5, true),
        (Binomial { beta: 1.0 }, 0.5, 0.0, false),
        (Binomial { beta: 1.0 }, 0.4, 0.0, true),
        (Binomial { beta: 0.5 }, 1.0, 1.0, true),
        (Binomial { beta: -0.5 }, 2.0, 0.0, false),
        (Binomial { beta: -0.5 }, 1.5, 0.0, true),
        (Binomial { beta: 2.0 }, 1.0, 2.5, true),
        (Lacunary { gamma: 1.0, delta: 0.0 }, 1.0, 0.0, false),
        (Lacunary { gamma: 1.0, delta: -2.0 }, 1.0, 0.0, true),
        (Lacunary { gamma: 1.0, delta: -1.0 }, 1.0, 0.0, false),
        (Lacunary { gamma: 0.5, delta: 0.0 }, 1.0, 0.0, true),
        (Geometric { rho: 0.9 }, 3.0, -0.5, true),
    ]
}

/// `e^{-t} t^b (log t)^c Σ_n tⁿ / (Γ(n + b) (log n)^c)`, with `log n`
/// replaced by `log 2` for `n < 2` and `1/Γ` vanishing at its poles.
pub fn stokes_ratio(t: f64, b: f64, c: f64, terms: usize) -> Result<f64> {
    if !(t > 0.0) || !(b >= 0.0) {
        return Err(Error::OutOfRange {
            name: "t, b",
            value: t.min(b),
            expected: "t > 0 and b >= 0",
        });
    }
    if c != 0.0 && t <= 1.0 {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            expected: "t > 1 when the log factor is present",
        });
    }
    let ln_t = t.ln();
    let mut sum = f64::NEG_INFINITY;
    let mut last = f64::NEG_INFINITY;
    for n in 0..terms {
        let nf = n as f64;
        let log_n = if n < 2 { std::f64::consts::LN_2 } else { nf.ln() };
        last = nf * ln_t + ln_recip_gamma(nf + b) - c * log_n.ln();
        sum = log_add(sum, last);
        if nf > t && last < sum + (1e-17f64).ln() {
            break;
        }
    }
    if last >= sum + (1e-16f64).ln() || !sum.is_finite() {
        return Err(Error::SearchBudget {
            what: "Stokes series",
            iterations: terms,
        });
    }
    let log_factor = if c == 0.0 { 0.0 } else { c * ln_t.ln() };
    Ok((-t + b * ln_t + log_factor + sum).exp())
}

/// `max_{1 ≤ n ≤ n_max} n^{-1/q} Π_{k ≤ n} 1/|z_k|` for increasing moduli.
pub fn horowitz_statistic(moduli: &[f64], q: f64, n_max: usize) -> Result<f64> {
    Ok(ln_horowitz_statistic(moduli, q, n_max)?.exp())
}

/// Logarithm of [`horowitz_statistic`]; finite even when the products
/// exceed the `f64` range.
pub fn ln_horowitz_statistic(moduli: &[f64], q: f64, n_max: usize) -> Result<f64> {
    if moduli.is_empty() || n_max == 0 {
        return Err(Error::Empty("modulus list"));
    }
    if !(q > 0.0) {
        return Err(Error::OutOfRange {
            name: "q",
            value: q,
            expected: "q > 0",
        });
    }
    if let Some(m) = moduli.iter().find(|m| !(**m > 0.0)) {
        return Err(Error::OutOfRange {
            name: "modulus",
            value: *m,
            expected: "positive moduli",
        });
    }
    if moduli.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Unsupported("moduli must be sorted increasingly".into()));
    }
    let mut ln_prod = 0.0;
    let mut best = f64::NEG_INFINITY;
    for (i, m) in moduli.iter().take(n_max).enumerate() {
        ln_prod -= m.ln();
        best = best.max(ln_prod - ((i + 1) as f64).ln() / q);
    }
    Ok(best)
}
