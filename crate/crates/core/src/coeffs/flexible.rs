//! Constructive sequence whose radial norm lies in `L^{p/2}(μ)` but in no
//! `L^{q/2}(μ)` with `q > p`.
//!
//! Exponents `n_k` grow doubly exponentially for the disk (`n_8` is about
//! `e^{1425}` at `p = 1`), so every block is stored through `ln n_k` and
//! `ln b_k`, and the radius `s(M)` through `x = -ln(1 - s)`.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::gamma_ur;

use super::{CoeffKind, CoefficientSequence};
use crate::error::{Error, Result};
use crate::measure::{MeasureKind, RadialMeasure};
use crate::quadrature::{integrate_panel, QuadOptions};
use crate::special::{ln_gamma, log_sum_exp};

const SEARCH_BUDGET: usize = 200;
/// Exponents below this are also stored as integers.
const EXACT_LIMIT: f64 = 9.0e15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexibleBlock {
    pub k: usize,
    /// `x = -ln(1 - s)` for `r_μ = 1`, or `s` itself for fock.
    pub s_coord: f64,
    pub ln_n: f64,
    /// `n_k` when it is exactly representable.
    pub n: Option<u64>,
    pub ln_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexibleSequence {
    pub p: f64,
    pub measure: RadialMeasure,
    pub blocks: Vec<FlexibleBlock>,
}

/// The measure in log coordinates `t`: `t = ln(-ln r)` when `r_μ = 1` and
/// `t = ln(pα r²/2)` for fock.
#[derive(Clone, Copy)]
enum LogCoords {
    Disk,
    Bergman(f64),
    Fock(f64),
}

impl LogCoords {
    fn of(mu: &RadialMeasure) -> Result<Self> {
        match mu.kind {
            MeasureKind::Disk => Ok(Self::Disk),
            MeasureKind::Bergman { alpha } => Ok(Self::Bergman(alpha)),
            MeasureKind::Fock { p, alpha } => Ok(Self::Fock(p * alpha)),
            MeasureKind::Atoms { .. } => Err(Error::Unsupported(
                "the flexible construction needs mass arbitrarily close to r_mu".into(),
            )),
        }
    }

    /// `ln(r^m)` for `m = e^{ln_m}`.
    fn ln_pow_r(self, ln_m: f64, t: f64) -> f64 {
        match self {
            Self::Disk | Self::Bergman(_) => -(ln_m + t).exp(),
            Self::Fock(c) => ln_m.exp() * 0.5 * (std::f64::consts::LN_2 - c.ln() + t),
        }
    }

    /// `ln(dμ/dt)`.
    fn ln_density(self, t: f64) -> f64 {
        let w = t.exp();
        match self {
            Self::Disk => std::f64::consts::LN_2 - 2.0 * w + t,
            Self::Bergman(alpha) => {
                std::f64::consts::LN_2 + alpha * (-(-2.0 * w).exp_m1()).ln() - w + t
            }
            Self::Fock(_) => -w + t,
        }
    }

    /// Integration window in `t` that carries all mass of `r^m dμ` for
    /// `ln m ∈ [ln_m_lo, ln_m_hi]`.
    fn window(self, ln_m_lo: f64, ln_m_hi: f64) -> (f64, f64) {
        match self {
            Self::Disk | Self::Bergman(_) => (-ln_m_hi.max(0.0) - 45.0, 5.0),
            Self::Fock(_) => (-45.0, ln_m_hi.max(ln_m_lo).max(0.0) + 4.0),
        }
    }
}

/// `ln ∫ e^{φ(t)} dt` over `[lo, hi]` with panels of width about 1/4,
/// evaluated at `n` and `2n` nodes per panel. Returns the value and the
/// relative difference between the two orders.
fn ln_line_integral<F: Fn(f64) -> f64>(phi: F, lo: f64, hi: f64, n: usize) -> Result<(f64, f64)> {
    let panels = (((hi - lo) * 4.0).ceil() as usize).max(1);
    let width = (hi - lo) / panels as f64;
    let mut coarse = Vec::with_capacity(panels);
    let mut fine = Vec::with_capacity(panels);
    // shift each panel by its own peak so nothing overflows
    for i in 0..panels {
        let a = lo + i as f64 * width;
        let b = a + width;
        let shift = phi(0.5 * (a + b)).max(phi(a)).max(phi(b));
        if shift == f64::NEG_INFINITY {
            continue;
        }
        for (dst, nodes) in [(&mut coarse, n), (&mut fine, 2 * n)] {
            let opts = QuadOptions::with_nodes(nodes, nodes);
            let est = integrate_panel(|t| (phi(t) - shift).exp(), a, b, &opts)?;
            if est.value > 0.0 {
                dst.push(shift + est.value.ln());
            }
        }
    }
    let (c, f) = (log_sum_exp(&coarse), log_sum_exp(&fine));
    Ok((f, (f - c).exp_m1().abs()))
}

impl FlexibleSequence {
    fn coords(&self) -> LogCoords {
        LogCoords::of(&self.measure).expect("validated at construction")
    }

    /// `ln ∫ r^m dμ` by quadrature in log coordinates, `m = e^{ln_m}`.
    pub fn ln_moment_quadrature(&self, ln_m: f64) -> Result<f64> {
        let c = self.coords();
        let (lo, hi) = c.window(ln_m, ln_m);
        Ok(ln_line_integral(|t| c.ln_pow_r(ln_m, t) + c.ln_density(t), lo, hi, 16)?.0)
    }

    /// Relative residual of `(∫ b_k^p r^{n_k p} dμ)^{2/p} = 2^{-k}` per block,
    /// with the moment evaluated by quadrature.
    pub fn normalization_residuals(&self) -> Result<Vec<f64>> {
        let ln_p = self.p.ln();
        self.blocks
            .iter()
            .map(|b| {
                let ln_int = self.p * b.ln_b + self.ln_moment_quadrature(b.ln_n + ln_p)?;
                let ln_norm = 2.0 / self.p * ln_int;
                Ok((ln_norm + b.k as f64 * std::f64::consts::LN_2).exp_m1().abs())
            })
            .collect()
    }

    /// `ln ‖b_j² r^{2n_j}‖_{q/2}` by quadrature.
    pub fn ln_single_block_norm(&self, j: usize, q: f64) -> Result<f64> {
        let b = self
            .blocks
            .iter()
            .find(|b| b.k == j)
            .ok_or(Error::OutOfRange {
                name: "j",
                value: j as f64,
                expected: "a constructed block index",
            })?;
        Ok(2.0 * b.ln_b + 2.0 / q * self.ln_moment_quadrature(b.ln_n + q.ln())?)
    }

    /// `ln ‖Σ_k b_k² r^{2n_k}‖_{q/2}` by quadrature, with its relative error.
    pub fn ln_sum_norm(&self, q: f64) -> Result<(f64, f64)> {
        let c = self.coords();
        let ln_lo = self.blocks.iter().map(|b| b.ln_n).fold(f64::INFINITY, f64::min);
        let ln_hi = self.blocks.iter().map(|b| b.ln_n).fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = c.window(ln_lo + 2f64.ln(), ln_hi + q.ln());
        let phi = |t: f64| {
            let terms: Vec<f64> = self
                .blocks
                .iter()
                .map(|b| 2.0 * b.ln_b + c.ln_pow_r(b.ln_n + std::f64::consts::LN_2, t))
                .collect();
            0.5 * q * log_sum_exp(&terms) + c.ln_density(t)
        };
        let (ln_int, rel) = ln_line_integral(phi, lo, hi, 16)?;
        Ok((2.0 / q * ln_int, rel))
    }

    /// The blocks as a sparse coefficient sequence, when every exponent is
    /// an exactly representable integer.
    pub fn to_coefficients(&self) -> Result<CoefficientSequence> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                b.n.map(|n| (n as f64, 2.0 * b.ln_b)).ok_or_else(|| {
                    Error::Unsupported(format!("block {} has exponent e^{:.1}", b.k, b.ln_n))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        CoefficientSequence::new(CoeffKind::Flexible { blocks })
    }
}

/// `ln(-ln s)` for `s = 1 - e^{-x}`.
fn ln_neg_ln_s(x: f64) -> f64 {
    let e = (-x).exp();
    if x > 30.0 {
        // -ln(1 - e) = e + e²/2 + ...
        -x + (0.5 * e).ln_1p()
    } else {
        (-(-e).ln_1p()).ln()
    }
}

/// Monotone bisection: smallest `x` in `[lo, ∞)` with `pred(x)`, found by
/// doubling the bracket and then bisecting.
fn bisect<P: Fn(f64) -> bool>(pred: P, lo: f64, step: f64, what: &'static str) -> Result<f64> {
    let (mut a, mut b) = (lo, lo + step);
    let mut iterations = 0;
    while !pred(b) {
        a = b;
        b = lo + 2.0 * (b - lo);
        iterations += 1;
        if iterations > SEARCH_BUDGET || !b.is_finite() {
            return Err(Error::SearchBudget {
                what,
                iterations: SEARCH_BUDGET,
            });
        }
    }
    for _ in 0..SEARCH_BUDGET {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if pred(mid) {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(b)
}

/// Builds the K blocks of the construction for `(μ, p)`.
pub fn flexible_sequence(mu: &RadialMeasure, p: f64, k_max: usize) -> Result<FlexibleSequence> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            expected: "p > 0",
        });
    }
    if k_max == 0 {
        return Err(Error::OutOfRange {
            name: "K",
            value: 0.0,
            expected: "K >= 1",
        });
    }
    let coords = LogCoords::of(mu)?;
    let mut blocks = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let m = 2f64.powi(k as i32);
        let q = p + 1.0 / m;
        // μ(s, r_μ) ≤ M^{-pq/(q-p)}
        let ln_target = -(p * q / (q - p)) * m.ln();
        let s_coord = match coords {
            LogCoords::Disk => bisect(
                |x| -x + (2.0 - (-x).exp()).ln() <= ln_target,
                0.0,
                1.0,
                "s(M)",
            )?,
            LogCoords::Bergman(alpha) => bisect(
                |x| bergman_ln_tail(alpha, x) <= ln_target,
                0.0,
                1.0,
                "s(M)",
            )?,
            LogCoords::Fock(c) => bisect(|s| -c * s * s / 2.0 <= ln_target, 0.0, 1.0, "s(M)")?,
        };
        // ∫_s r^{Np} dμ ≥ ½ ∫ r^{Np} dμ, searched over ln N
        let half_mass = |ln_n: f64| -> bool {
            let ln_m = ln_n + p.ln();
            match coords {
                LogCoords::Disk => {
                    // 1 - s^{m+2} ≥ ½
                    let ln_m2 = if ln_m > 40.0 { ln_m } else { (ln_m.exp() + 2.0).ln() };
                    ln_m2 + ln_neg_ln_s(s_coord) >= std::f64::consts::LN_2.ln()
                }
                LogCoords::Bergman(alpha) => {
                    let s = 1.0 - (-s_coord).exp();
                    let a = (ln_m.exp() + 1.0) / 2.0;
                    1.0 - beta_reg(a, alpha + 1.0, s * s) >= 0.5
                }
                LogCoords::Fock(c) => gamma_ur(ln_m.exp() / 2.0 + 1.0, c * s_coord * s_coord / 2.0) >= 0.5,
            }
        };
        let mut ln_n = bisect(half_mass, 0.0, 1.0, "N(M)")?;
        let mut n = None;
        if ln_n.exp() < EXACT_LIMIT {
            // round up to the integer N and keep the smallest that qualifies
            let mut int_n = ln_n.exp().ceil().max(1.0);
            while int_n > 1.0 && half_mass((int_n - 1.0).ln()) {
                int_n -= 1.0;
            }
            while !half_mass(int_n.ln()) {
                int_n += 1.0;
            }
            ln_n = int_n.ln();
            n = Some(int_n as u64);
        }
        if matches!(coords, LogCoords::Bergman(_)) && n.is_none() {
            return Err(Error::Unsupported(
                "bergman blocks beyond exactly representable exponents".into(),
            ));
        }
        // b^p ∫ r^{np} dμ = 2^{-kp/2}
        let ln_moment = closed_ln_moment(mu, ln_n + p.ln());
        let ln_b = (-(k as f64) * p / 2.0 * std::f64::consts::LN_2 - ln_moment) / p;
        blocks.push(FlexibleBlock {
            k,
            s_coord,
            ln_n,
            n,
            ln_b,
        });
    }
    Ok(FlexibleSequence {
        p,
        measure: mu.clone(),
        blocks,
    })
}

/// `ln μ(s, 1)` for the bergman measure at `s = 1 - e^{-x}`.
fn bergman_ln_tail(alpha: f64, x: f64) -> f64 {
    let e = (-x).exp();
    let y = e * (2.0 - e); // 1 - s²
    let a = alpha + 1.0;
    let ln_b = ln_gamma(a) + ln_gamma(0.5) - ln_gamma(a + 0.5);
    if y < 1e-8 {
        // I_y(a, 1/2) ≈ y^a / (a B(a, 1/2)) near 0, so μ(s, 1) ≈ y^a / a
        return a * (2f64.ln() - x + (-0.5 * e).ln_1p()) - a.ln();
    }
    ln_b + beta_reg(a, 0.5, y).ln()
}

/// Closed-form `ln ∫ r^m dμ` for `m = e^{ln_m}`, valid for huge `m`.
fn closed_ln_moment(mu: &RadialMeasure, ln_m: f64) -> f64 {
    match mu.kind {
        MeasureKind::Disk if ln_m > 40.0 => std::f64::consts::LN_2 - ln_m,
        _ => mu.ln_moment(ln_m.exp()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_block_disk_p2_closed_form() {
        let seq = flexible_sequence(&RadialMeasure::disk(), 2.0, 1).unwrap();
        let b = &seq.blocks[0];
        let n = b.n.unwrap() as f64;
        // b² ∫ r^{2n} 2r dr = b²/(n+1) = 1/2
        assert!((2.0 * b.ln_b - (0.5 * (n + 1.0)).ln()).abs() < 1e-12);
        assert!(seq.normalization_residuals().unwrap()[0] < 1e-8);
    }

    #[test]
    fn quadrature_moments_match_closed_forms() {
        for desc in ["disk", "bergman:alpha=0.5", "fock:p=2,alpha=1"] {
            let mu: RadialMeasure = desc.parse().unwrap();
            let seq = FlexibleSequence {
                p: 1.0,
                measure: mu.clone(),
                blocks: vec![],
            };
            for m in [0.5f64, 3.0, 40.0, 1e4] {
                let quad = seq.ln_moment_quadrature(m.ln()).unwrap();
                assert!((quad - mu.ln_moment(m)).abs() < 1e-9, "{desc} m={m}");
            }
        }
        // far beyond f64 exponents: ∫ r^m 2r dr = 2/(m+2)
        let seq = flexible_sequence(&RadialMeasure::disk(), 1.0, 1).unwrap();
        let quad = seq.ln_moment_quadrature(1400.0).unwrap();
        assert!((quad - (2f64.ln() - 1400.0)).abs() < 1e-9);
    }

    #[test]
    fn exponents_increase() {
        let seq = flexible_sequence(&RadialMeasure::disk(), 1.0, 8).unwrap();
        for w in seq.blocks.windows(2) {
            assert!(w[1].ln_n > w[0].ln_n);
        }
        assert!(seq.blocks[7].ln_n > 1000.0);
        assert!(seq.to_coefficients().is_err());
    }

    #[test]
    fn atoms_are_rejected() {
        let mu: RadialMeasure = "atoms:0.5:1".parse().unwrap();
        assert!(matches!(flexible_sequence(&mu, 1.0, 2), Err(Error::Unsupported(_))));
    }
}
