//! Truncated Gaussian analytic functions `F(z) = Σ_{n≤N} aₙζₙzⁿ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::CoefficientSequence;
use crate::error::{Error, Result};
use crate::poly::{complex_pairs, FactoredPolynomial, Polynomial};
use crate::rng::{complex_gaussian, sample_stream};
use crate::zeros::find_roots;

/// Default relative tail size `ε_trunc`.
pub const EPS_TRUNC: f64 = 1e-8;
/// Samples whose truncation degree exceeds this are refused.
pub const MAX_DEGREE: usize = 200_000;
/// Roots closer than this to the circle skip the quadrature cross-check.
pub const CROSS_CHECK_GAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GafSample {
    pub coeff_spec: String,
    pub seed: u64,
    pub sample_index: u64,
    pub degree: usize,
    pub working_radius: f64,
    /// Bound on `(Σ_{n>N} aₙ² s^{2n})^{1/2}`.
    pub tail_sigma: f64,
    /// `aₙζₙ` for `n = 0..=N`.
    #[serde(with = "complex_pairs")]
    pub coeffs: Vec<Complex64>,
}

impl GafSample {
    pub fn polynomial(&self) -> Polynomial {
        Polynomial::new(self.coeffs.clone())
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.polynomial().eval(z)
    }

    /// `ζ₀ = F(0)/a₀`.
    pub fn value_at_origin(&self) -> Complex64 {
        self.coeffs.first().copied().unwrap_or_default()
    }
}

/// Samples `F` at working radius `s` with the default `ε_trunc`.
pub fn sample_gaf(a: &CoefficientSequence, s: f64, seed: u64, sample_index: u64) -> Result<GafSample> {
    sample_gaf_with(a, s, seed, sample_index, EPS_TRUNC)
}

pub fn sample_gaf_with(
    a: &CoefficientSequence,
    s: f64,
    seed: u64,
    sample_index: u64,
    eps: f64,
) -> Result<GafSample> {
    let trunc = a.truncation(s, eps)?;
    if trunc.degree > MAX_DEGREE {
        return Err(Error::SearchBudget { what: "truncation degree", iterations: MAX_DEGREE });
    }
    let mut rng = sample_stream(seed, sample_index);
    let coeffs = (0..=trunc.degree as u64)
        .map(|n| complex_gaussian(&mut rng) * a.coeff(n))
        .collect();
    Ok(GafSample {
        coeff_spec: a.to_string(),
        seed,
        sample_index,
        degree: trunc.degree,
        working_radius: s,
        tail_sigma: (0.5 * trunc.ln_tail_sq).exp(),
        coeffs,
    })
}

pub fn evaluate(f: &Polynomial, z: Complex64) -> Complex64 {
    f.eval(z)
}

/// Jensen closed form with its optional quadrature cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleMeanLog {
    pub value: f64,
    /// Trapezoid value, present when no root is within [`CROSS_CHECK_GAP`]
    /// of the circle.
    pub quadrature: Option<f64>,
}

/// `exp ∫₀¹ log|f(re^{2πiθ})|^p dθ` from the roots of `f`.
pub fn circle_mean_log(f: &Polynomial, r: f64, p: f64) -> Result<CircleMeanLog> {
    let factored = factor(f)?;
    let value = factored.circle_mean_log(r, p);
    let near = factored
        .roots
        .iter()
        .any(|z| (z.norm() - r).abs() < CROSS_CHECK_GAP);
    let quadrature = (!near).then(|| f.circle_mean_log_quadrature(r, p, 64));
    Ok(CircleMeanLog { value, quadrature })
}

/// `f = lead · Π (z - z_k)` with roots repeated by multiplicity.
pub fn factor(f: &Polynomial) -> Result<FactoredPolynomial> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial { what: "circle_mean_log" });
    }
    let roots = find_roots(f)?;
    Ok(FactoredPolynomial {
        lead: f.leading(),
        roots: roots.expanded(),
    })
}

pub fn circle_mean_power(f: &Polynomial, r: f64, p: f64, nodes: usize) -> f64 {
    f.circle_mean_power(r, p, nodes).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::pairwise_sum;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_sample_is_constant() {
        let f = sample_gaf(&CoefficientSequence::basis(), 0.9, 3, 0).unwrap();
        assert_eq!(f.degree, 0);
        assert_eq!(f.coeffs.len(), 1);
        assert_eq!(f.tail_sigma, 0.0);
    }

    #[test]
    fn samples_are_reproducible() {
        let a = CoefficientSequence::unit();
        let f = sample_gaf(&a, 0.8, 11, 4).unwrap();
        let g = sample_gaf(&a, 0.8, 11, 4).unwrap();
        assert_eq!(f, g);
        let h = sample_gaf(&a, 0.8, 11, 5).unwrap();
        assert_ne!(f.coeffs, h.coeffs);
        let json = serde_json::to_string(&f).unwrap();
        let back: GafSample = serde_json::from_str(&json).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn tail_sigma_respects_eps() {
        for spec in ["unit", "geom:rho=0.9", "fock:p=2,alpha=1", "dyadic:alpha=0,p=2"] {
            let a: CoefficientSequence = spec.parse().unwrap();
            for s in [0.3, 0.7, 0.95] {
                let f = sample_gaf(&a, s, 1, 0).unwrap();
                let norm = a.weighted_l2_norm(s).unwrap();
                assert!(f.tail_sigma <= EPS_TRUNC * norm * (1.0 + 1e-12), "{spec} s={s}");
                // direct tail oracle
                let tail: f64 = (f.degree as u64 + 1..f.degree as u64 + 5000)
                    .map(|n| a.coeff(n).powi(2) * s.powi(2 * n as i32))
                    .sum();
                assert!(tail.sqrt() <= f.tail_sigma * (1.0 + 1e-9), "{spec} s={s}");
            }
        }
    }

    #[test]
    fn covariance_matches_norm() {
        let a = CoefficientSequence::unit();
        let z = c(0.3, 0.0);
        let vals: Vec<f64> = (0..10_000)
            .map(|i| sample_gaf(&a, 0.3, 5, i).unwrap().evaluate(z).norm_sqr())
            .collect();
        let n = vals.len() as f64;
        let mean = pairwise_sum(&vals) / n;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let expected = 1.0 / (1.0 - 0.09);
        assert!((mean - expected).abs() <= 3.0 * (var / n).sqrt(), "{mean} vs {expected}");
    }

    #[test]
    fn rotation_invariance_in_distribution() {
        let a: CoefficientSequence = "geom:rho=0.8".parse().unwrap();
        let r = 0.7;
        let samples: Vec<GafSample> = (0..4000).map(|i| sample_gaf(&a, r, 9, i).unwrap()).collect();
        let expected = a.weighted_l2_norm(r).unwrap().powi(2);
        for theta in [0.0, 1.0, 2.5] {
            let z = Complex64::from_polar(r, theta);
            let vals: Vec<f64> = samples.iter().map(|f| f.evaluate(z).norm_sqr()).collect();
            let n = vals.len() as f64;
            let mean = pairwise_sum(&vals) / n;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            assert!((mean - expected).abs() <= 3.0 * (var / n).sqrt(), "θ={theta}");
        }
    }

    #[test]
    fn circle_mean_log_examples() {
        let w = c(0.18, 0.24);
        let f = Polynomial::new(vec![-w, c(1.0, 0.0)]);
        let v = circle_mean_log(&f, 0.5, 1.0).unwrap();
        assert!((v.value - 0.5).abs() < 1e-14);
        assert!((v.quadrature.unwrap() - 0.5).abs() < 1e-12);
        let k = Polynomial::constant(c(0.0, 3.0));
        assert!((circle_mean_log(&k, 0.2, 2.5).unwrap().value - 3f64.powf(2.5)).abs() < 1e-12);
        let g = Polynomial::from_real(&[-2.0, 1.0]);
        assert!((circle_mean_log(&g, 1.0, 2.0).unwrap().value - 4.0).abs() < 1e-13);
        assert!(matches!(
            circle_mean_log(&Polynomial::new(vec![]), 1.0, 1.0),
            Err(Error::ZeroPolynomial { .. })
        ));
        let on_circle = Polynomial::from_real(&[-0.5, 1.0]);
        assert!(circle_mean_log(&on_circle, 0.5, 1.0).unwrap().quadrature.is_none());
    }

    #[test]
    fn cross_check_agrees_on_samples() {
        let a = CoefficientSequence::unit();
        for i in 0..20 {
            let f = sample_gaf(&a, 0.9, 2, i).unwrap().polynomial();
            for r in [0.5, 0.8] {
                let v = circle_mean_log(&f, r, 1.5).unwrap();
                let roots = factor(&f).unwrap().roots;
                if roots.iter().all(|z| (z.norm() - r).abs() >= 1e-3) {
                    let q = v.quadrature.unwrap();
                    assert!((q - v.value).abs() <= 1e-6 * v.value, "i={i} r={r}: {q} vs {}", v.value);
                }
            }
        }
    }
}
