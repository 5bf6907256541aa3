//! Complex polynomials and their circle means.

use std::cell::RefCell;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

/// Leading coefficients below this magnitude are dropped.
pub const LEADING_CUTOFF: f64 = 1e-300;
/// Relative agreement required between nested trapezoid rules.
pub const CIRCLE_REL_TOL: f64 = 1e-9;
/// Gauss nodes per panel of the graded circle rule.
/// Angular panels of the graded circle rule for factored polynomials:
/// panel edges at `θ_k ± 2^{j·log2(ratio)} δ`, `nodes`-point Gauss–Legendre per
/// panel, and the trapezoid tolerance used when no root is near the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradedRule {
    pub ratio: f64,
    pub nodes: usize,
    pub trapezoid_tol: f64,
}

impl GradedRule {
    pub const ACCURATE: Self = Self { ratio: 2.0, nodes: 16, trapezoid_tol: 1e-13 };
    /// About 1e-8 relative per panel.
    pub const FAST: Self = Self { ratio: 4.0, nodes: 8, trapezoid_tol: 1e-8 };
}

impl Default for GradedRule {
    fn default() -> Self {
        Self::ACCURATE
    }
}
/// Node-count ceiling for circle means.
pub const MAX_CIRCLE_NODES: usize = 1 << 16;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Polynomial with ascending coefficients `c_0 + c_1 z + ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    #[serde(with = "complex_pairs")]
    coeffs: Vec<Complex64>,
}

/// Trapezoid circle mean with its convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleMean {
    pub value: f64,
    pub nodes: usize,
    /// Relative change against the nested rule with half the nodes.
    pub rel_change: f64,
    pub low_accuracy: bool,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.norm() < LEADING_CUTOFF) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    /// Multiplicity of the root at the origin.
    pub fn origin_multiplicity(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.norm() == 0.0).count()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// `(f(z), f'(z))` by a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::new(Vec::new());
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn add_constant(&self, b: Complex64) -> Self {
        let mut coeffs = self.coeffs.clone();
        if coeffs.is_empty() {
            coeffs.push(b);
        } else {
            coeffs[0] += b;
        }
        Self::new(coeffs)
    }

    /// Drops trailing terms whose summed size on `|z| = r` is below
    /// `rel_tol` times the largest term there.
    pub fn truncated_for_radius(&self, r: f64, rel_tol: f64) -> Self {
        let sizes: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c.norm() * r.powi(n as i32))
            .collect();
        let peak = sizes.iter().copied().fold(0.0, f64::max);
        let mut keep = sizes.len();
        let mut tail = 0.0;
        while keep > 1 {
            tail += sizes[keep - 1];
            if tail > rel_tol * peak {
                break;
            }
            keep -= 1;
        }
        Self::new(self.coeffs[..keep].to_vec())
    }

    /// `f(r e^{2πik/m})` for `k = 0..m`, by one inverse FFT of the
    /// coefficients aliased modulo `m`.
    pub fn circle_values(&self, r: f64, m: usize) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let mut rn = 1.0;
        for (n, c) in self.coeffs.iter().enumerate() {
            buf[n % m] += c * rn;
            rn *= r;
        }
        let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(m));
        fft.process(&mut buf);
        buf
    }

    /// `∫₀¹ |f(re^{2πiθ})|^p dθ` by the trapezoid rule, doubling the node
    /// count from at least `max(nodes, 2·deg + 16)` until the nested rule
    /// agrees to [`CIRCLE_REL_TOL`].
    pub fn circle_mean_power(&self, r: f64, p: f64, nodes: usize) -> CircleMean {
        self.circle_mean_power_tol(r, p, nodes, CIRCLE_REL_TOL)
    }

    /// [`Self::circle_mean_power`] with a caller-chosen agreement tolerance.
    pub fn circle_mean_power_tol(&self, r: f64, p: f64, nodes: usize, rel_tol: f64) -> CircleMean {
        let mut m = nodes.max(2 * self.degree() + 16).next_power_of_two();
        loop {
            let vals = self.circle_values(r, m);
            let powers: Vec<f64> = vals.iter().map(|v| abs_pow(*v, p)).collect();
            let full = crate::special::pairwise_sum(&powers) / m as f64;
            let even: Vec<f64> = powers.iter().step_by(2).copied().collect();
            let half = crate::special::pairwise_sum(&even) / (m / 2) as f64;
            let rel_change = if full == 0.0 { 0.0 } else { ((full - half) / full).abs() };
            if rel_change <= rel_tol || m >= MAX_CIRCLE_NODES {
                return CircleMean {
                    value: full,
                    nodes: m,
                    rel_change,
                    low_accuracy: rel_change > rel_tol,
                };
            }
            m *= 2;
        }
    }

    /// Exact circle mean for even integer `p`: with `g = f^{p/2}`,
    /// `∫|f|^p = Σ |g_n|² r^{2n}` by Parseval. Returns the coefficients
    /// `|g_n|²` so the mean can be evaluated at many radii.
    pub fn parseval_weights(&self, p: u32) -> Vec<f64> {
        assert!(p.is_multiple_of(2) && p > 0, "Parseval path needs an even integer exponent");
        self.powi(p / 2).coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `exp ∫₀¹ log|f(re^{2πiθ})|^p dθ` by the trapezoid rule, doubling
    /// until the mean of `log|f|` moves by less than `1e-12`.
    pub fn circle_mean_log_quadrature(&self, r: f64, p: f64, nodes: usize) -> f64 {
        let mean_log = |m: usize| {
            let logs: Vec<f64> = self.circle_values(r, m).iter().map(|v| v.norm().ln()).collect();
            crate::special::pairwise_sum(&logs) / m as f64
        };
        let mut m = nodes.max(2 * self.degree() + 16).next_power_of_two();
        let mut prev = mean_log(m);
        while m < MAX_CIRCLE_NODES {
            m *= 2;
            let next = mean_log(m);
            let done = (next - prev).abs() <= 1e-12 * (1.0 + next.abs());
            prev = next;
            if done {
                break;
            }
        }
        (p * prev).exp()
    }
}

/// `|v|^p`, with square roots for the common exponents.
pub fn abs_pow(v: Complex64, p: f64) -> f64 {
    let sq = v.norm_sqr();
    if p == 1.0 {
        sq.sqrt()
    } else if p == 0.5 {
        sq.sqrt().sqrt()
    } else if p == 2.0 {
        sq
    } else {
        sq.powf(0.5 * p)
    }
}

/// Serde adapter writing complex lists as `[[re, im], ...]`.
pub(crate) mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

/// Evaluates `Σ w_n r^{2n}` for Parseval weights.
pub fn parseval_mean(weights: &[f64], r: f64) -> f64 {
    let r2 = r * r;
    weights.iter().rev().fold(0.0, |acc, w| acc * r2 + w)
}

/// A polynomial stored as `lead · Π (z - z_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactoredPolynomial {
    pub lead: Complex64,
    pub roots: Vec<Complex64>,
}

impl FactoredPolynomial {
    /// Jensen closed form `|c|^p Π_k max(r, |z_k|)^p`.
    pub fn circle_mean_log(&self, r: f64, p: f64) -> f64 {
        self.ln_circle_mean_log(r, p).exp()
    }

    /// Logarithm of [`Self::circle_mean_log`].
    pub fn ln_circle_mean_log(&self, r: f64, p: f64) -> f64 {
        let mut acc = self.lead.norm().ln();
        for z in &self.roots {
            acc += z.norm().max(r).ln();
        }
        p * acc
    }

    /// `ln |f(z)|` from the factored form.
    pub fn ln_abs(&self, z: Complex64) -> f64 {
        self.roots.iter().fold(self.lead.norm().ln(), |acc, w| acc + (z - w).norm().ln())
    }

    /// `ln Π_k |z - z_k|²` with one logarithm per rescaling.
    fn ln_abs_sq_roots(&self, z: Complex64) -> f64 {
        let mut prod = 1.0;
        let mut ln_acc = 0.0;
        for w in &self.roots {
            prod *= (z - w).norm_sqr();
            if !(1e-150..=1e150).contains(&prod) {
                ln_acc += prod.ln();
                prod = 1.0;
            }
        }
        ln_acc + prod.ln()
    }

    /// `∫₀¹ |f(re^{2πiθ})|^p dθ`. Roots within `r/4` of the circle get
    /// composite Gauss panels graded geometrically toward their angle; with
    /// none, the trapezoid rule converges geometrically and is used instead.
    pub fn circle_mean_power(&self, r: f64, p: f64) -> f64 {
        self.circle_mean_power_with(r, p, &GradedRule::ACCURATE)
    }

    pub fn circle_mean_power_with(&self, r: f64, p: f64, rule: &GradedRule) -> f64 {
        self.circle_means_with(r, &[p], rule)[0]
    }

    /// [`Self::circle_mean_power_with`] for several exponents from one set of
    /// angular nodes.
    pub fn circle_means_with(&self, r: f64, ps: &[f64], rule: &GradedRule) -> Vec<f64> {
        let ln_lead = self.lead.norm().ln();
        if self.roots.is_empty() {
            return ps.iter().map(|p| (p * ln_lead).exp()).collect();
        }
        if r == 0.0 {
            let ln0 = self.ln_abs(Complex64::new(0.0, 0.0));
            return ps.iter().map(|p| (p * ln0).exp()).collect();
        }
        let ln_abs = |theta: f64| ln_lead + 0.5 * self.ln_abs_sq_roots(Complex64::from_polar(r, theta));
        let mut cuts: Vec<f64> = Vec::new();
        for z in &self.roots {
            let delta = (z.norm() - r).abs();
            if delta >= 0.25 * r {
                continue;
            }
            let t0 = z.arg();
            cuts.push(t0);
            let mut d = (delta / r).max(1e-15);
            while d < PI {
                cuts.push(t0 + d);
                cuts.push(t0 - d);
                d *= rule.ratio;
            }
        }
        if cuts.is_empty() {
            let trap = |m: usize| -> Vec<f64> {
                let logs: Vec<f64> = (0..m).map(|k| ln_abs(TAU * k as f64 / m as f64)).collect();
                ps.iter()
                    .map(|p| {
                        let vals: Vec<f64> = logs.iter().map(|l| (p * l).exp()).collect();
                        crate::special::pairwise_sum(&vals) / m as f64
                    })
                    .collect()
            };
            let mut m = (2 * self.roots.len() + 16).next_power_of_two();
            let mut prev = trap(m);
            while m < MAX_CIRCLE_NODES {
                m *= 2;
                let next = trap(m);
                let done = next
                    .iter()
                    .zip(&prev)
                    .all(|(n, p)| (n - p).abs() <= rule.trapezoid_tol * n);
                prev = next;
                if done {
                    break;
                }
            }
            return prev;
        }
        let mut cuts: Vec<f64> = cuts.into_iter().map(|t| t.rem_euclid(TAU)).collect();
        cuts.push(0.0);
        cuts.push(TAU);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
        let gauss = crate::quadrature::legendre(rule.nodes);
        let mut panels = vec![Vec::with_capacity(cuts.len()); ps.len()];
        let mut logs = vec![0.0; gauss.nodes.len()];
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (half, mid) = (0.5 * (b - a), 0.5 * (b + a));
            for (l, x) in logs.iter_mut().zip(&gauss.nodes) {
                *l = ln_abs(mid + half * x);
            }
            for (p, acc) in ps.iter().zip(panels.iter_mut()) {
                let v: f64 = gauss.weights.iter().zip(&logs).map(|(wt, l)| wt * (p * l).exp()).sum();
                acc.push(v * half);
            }
        }
        panels.iter().map(|v| crate::special::pairwise_sum(v) / TAU).collect()
    }

    pub fn expand(&self) -> Polynomial {
        // ascending coefficients; multiply by (z - root) in place
        let mut coeffs = vec![self.lead];
        for root in &self.roots {
            coeffs.insert(0, Complex64::new(0.0, 0.0));
            for k in 0..coeffs.len() - 1 {
                let next = coeffs[k + 1];
                coeffs[k] -= root * next;
            }
        }
        Polynomial::new(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(Polynomial::new(vec![]).eval(c(0.3, 0.1)), c(0.0, 0.0));
        assert_eq!(Polynomial::from_real(&[1.0, 1.0]).eval(c(0.5, 0.0)), c(1.5, 0.0));
        assert_eq!(Polynomial::from_real(&[-0.25, 0.0, 1.0]).eval(c(0.5, 0.0)), c(0.0, 0.0));
        let p = Polynomial::from_real(&[1.0, 2.0, 0.0, 1e-320]);
        assert_eq!(p.degree(), 1);
    }

    #[test]
    fn circle_mean_power_examples() {
        let k = Polynomial::constant(c(2.0, 0.0));
        assert!((k.circle_mean_power(0.7, 3.0, 8).value - 8.0).abs() < 1e-14);
        let z = Polynomial::from_real(&[0.0, 1.0]);
        assert!((z.circle_mean_power(0.6, 1.5, 8).value - 0.6f64.powf(1.5)).abs() < 1e-14);
        let f = Polynomial::from_real(&[-1.0, 1.0]);
        assert!((f.circle_mean_power(0.5, 2.0, 8).value - 1.25).abs() < 1e-14);
        assert!((parseval_mean(&f.parseval_weights(2), 0.5) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn jensen_closed_form_examples() {
        let w = c(0.3 * 0.6, 0.3 * 0.8);
        let f = FactoredPolynomial { lead: c(1.0, 0.0), roots: vec![w] };
        assert!((f.circle_mean_log(0.5, 1.0) - 0.5).abs() < 1e-15);
        let k = FactoredPolynomial { lead: c(0.0, 3.0), roots: vec![] };
        assert!((k.circle_mean_log(0.4, 2.5) - 3f64.powf(2.5)).abs() < 1e-12);
        let g = FactoredPolynomial { lead: c(1.0, 0.0), roots: vec![c(2.0, 0.0)] };
        assert!((g.circle_mean_log(1.0, 2.0) - 4.0).abs() < 1e-14);
        assert!((g.expand().circle_mean_log_quadrature(1.0, 2.0, 64) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn graded_circle_mean_matches_trapezoid() {
        let f = FactoredPolynomial {
            lead: c(1.5, 0.0),
            roots: vec![c(0.5, 0.1), c(-0.3, 0.7), c(0.0, -0.2), c(1.2, 0.0)],
        };
        let expanded = f.expand();
        for r in [0.25, 0.45, 0.76, 0.9, 1.1] {
            for p in [0.5, 1.0, 2.5] {
                let graded = f.circle_mean_power(r, p);
                let trap = expanded.circle_mean_power(r, p, 4096).value;
                assert!((graded - trap).abs() <= 1e-9 * trap, "r={r} p={p}: {graded} vs {trap}");
            }
        }
        // a root 1e-7 off the circle: |z - a|^{1/2} against Parseval at p = 2
        let g = FactoredPolynomial { lead: c(1.0, 0.0), roots: vec![c(0.5 + 1e-7, 0.0), c(0.1, 0.3)] };
        let exact = parseval_mean(&g.expand().parseval_weights(2), 0.5);
        assert!((g.circle_mean_power(0.5, 2.0) - exact).abs() <= 1e-12 * exact);
        // |re^{iθ} - r|: mean of 2r|sin(πθ)| is 4r/π
        let h = FactoredPolynomial { lead: c(1.0, 0.0), roots: vec![c(0.6, 0.0)] };
        assert!((h.circle_mean_power(0.6, 1.0) - 2.4 / PI).abs() < 1e-12);
    }

    #[test]
    fn expand_matches_product() {
        let f = FactoredPolynomial { lead: c(2.0, 0.0), roots: vec![c(0.5, 0.0), c(-0.5, 0.0)] };
        let p = f.expand();
        let expected = [c(-0.5, 0.0), c(0.0, 0.0), c(2.0, 0.0)];
        for (a, b) in p.coeffs().iter().zip(expected) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    fn poly_strategy() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..25)
            .prop_map(|v| Polynomial::new(v.into_iter().map(|(a, b)| c(a, b)).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fft_matches_horner(p in poly_strategy(), r in 0.1f64..1.5) {
            let m = 64;
            let vals = p.circle_values(r, m);
            for (k, v) in vals.iter().enumerate() {
                let z = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / m as f64);
                prop_assert!((v - p.eval(z)).norm() <= 1e-12 * (1.0 + v.norm()));
            }
        }

        #[test]
        fn parseval_matches_quadrature(p in poly_strategy(), r in 0.1f64..1.2) {
            prop_assume!(!p.is_zero());
            for e in [2u32, 4] {
                let exact = parseval_mean(&p.parseval_weights(e), r);
                let quad = p.circle_mean_power(r, e as f64, 16).value;
                prop_assert!((exact - quad).abs() <= 1e-10 * exact.max(1e-300));
            }
        }

        #[test]
        fn am_gm_per_circle(p in poly_strategy(), r in 0.1f64..1.2, e in 0.3f64..4.0) {
            prop_assume!(!p.is_zero());
            let arith = p.circle_mean_power(r, e, 64).value;
            let geo = p.circle_mean_log_quadrature(r, e, 256);
            prop_assert!(arith >= geo * (1.0 - 1e-8));
        }
    }
}
