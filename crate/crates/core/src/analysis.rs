//! Weighted norms `‖f‖_{A^p(μ,s)}`, the geometric-mean functional, and the
//! per-sample inequality chain behind the quantitative uniqueness bound.

use std::cell::RefCell;
use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaf::{circle_mean_log, factor, GafSample};
use crate::measure::{IntegralResult, RadialMeasure};
use crate::poly::{parseval_mean, FactoredPolynomial, GradedRule, Polynomial, CIRCLE_REL_TOL};
use crate::quadrature::QuadOptions;
use crate::zeros::{find_roots, inner_zero_multiset, BOUNDARY_GAP};

/// Relative slack allowed on each line of the chain.
pub const CHAIN_SLACK: f64 = 1e-8;
/// Distance within which a zero of `F` counts as a zero of `f`.
pub const CONTAINMENT_TOL: f64 = 1e-6;

/// Radial and angular accuracy for the norm integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    pub quad: QuadOptions,
    pub circle_tol: f64,
    pub graded: GradedRule,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self { quad: QuadOptions::default(), circle_tol: CIRCLE_REL_TOL, graded: GradedRule::ACCURATE }
    }
}

impl NormOptions {
    /// Accuracy for single-sample chain reports: panels between zero radii
    /// are smooth enough for a short doubling schedule.
    pub fn chain() -> Self {
        Self { quad: QuadOptions::with_nodes(32, 128), circle_tol: CIRCLE_REL_TOL, graded: GradedRule::ACCURATE }
    }

    /// Per-sample accuracy for Monte Carlo loops.
    pub fn fast() -> Self {
        Self { quad: QuadOptions::fast(), circle_tol: 1e-5, graded: GradedRule::FAST }
    }
}

/// `‖f‖_{A^p(μ,s)}`.
pub fn ap_norm(f: &Polynomial, mu: &RadialMeasure, p: f64, s: f64) -> Result<IntegralResult> {
    Ok(ap_norm_p(f, mu, p, s, &[], &NormOptions::default())?.root(p))
}

/// `‖f‖^p_{A^p(μ,s)} = ∫₀^s ∫₀¹ |f(re^{2πiθ})|^p dθ dμ(r)`. Even integer `p`
/// goes through Parseval, and through the closed-form moments when `s = r_μ`.
pub fn ap_norm_p(
    f: &Polynomial,
    mu: &RadialMeasure,
    p: f64,
    s: f64,
    breakpoints: &[f64],
    opts: &NormOptions,
) -> Result<IntegralResult> {
    if !(p > 0.0) {
        return Err(Error::OutOfRange { name: "p", value: p, expected: "p > 0" });
    }
    if f.is_zero() {
        return Ok(IntegralResult::finite(0.0, 0.0));
    }
    let even = p.fract() == 0.0 && (p as u32).is_multiple_of(2) && p <= 8.0;
    if even {
        let weights = f.parseval_weights(p as u32);
        if s >= mu.r_mu {
            let v: f64 = weights
                .iter()
                .enumerate()
                .filter(|(_, w)| **w > 0.0)
                .map(|(n, w)| w * mu.moment(2.0 * n as f64))
                .sum();
            return Ok(IntegralResult::finite(v, 0.0));
        }
        let g = |r: f64| parseval_mean(&weights, r);
        return mu.integrate_with(&g, s, breakpoints, &opts.quad);
    }
    let g = |r: f64| {
        f.truncated_for_radius(r, 1e-17)
            .circle_mean_power_tol(r, p, 0, opts.circle_tol)
            .value
    };
    mu.integrate_with(&g, s, breakpoints, &opts.quad)
}

/// `‖f‖^p_{A^p(μ,s)}` for a factored polynomial: radial panels split at the
/// zero radii, graded circle rule at every node.
pub fn ap_norm_p_factored(
    f: &FactoredPolynomial,
    mu: &RadialMeasure,
    p: f64,
    s: f64,
    opts: &NormOptions,
) -> Result<IntegralResult> {
    let breaks: Vec<f64> = f.roots.iter().map(|z| z.norm()).filter(|&r| r > 0.0 && r < s).collect();
    let g = |r: f64| f.circle_mean_power_with(r, p, &opts.graded);
    mu.integrate_with(&g, s, &breaks, &opts.quad)
}

/// [`ap_norm_p_factored`] for several `(μ, p)` pairs. Circle means are
/// computed once per distinct radial node and shared between the pairs.
pub fn ap_norm_p_factored_multi(
    f: &FactoredPolynomial,
    pairs: &[(&RadialMeasure, f64)],
    s: f64,
    opts: &NormOptions,
) -> Result<Vec<IntegralResult>> {
    let breaks: Vec<f64> = f.roots.iter().map(|z| z.norm()).filter(|&r| r > 0.0 && r < s).collect();
    let mut ps: Vec<f64> = pairs.iter().map(|(_, p)| *p).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let cache: RefCell<HashMap<u64, Vec<f64>>> = RefCell::new(HashMap::new());
    pairs
        .iter()
        .map(|(mu, p)| {
            let idx = ps.iter().position(|q| q == p).expect("exponent listed");
            let g = |r: f64| {
                let mut cache = cache.borrow_mut();
                let means = cache
                    .entry(r.to_bits())
                    .or_insert_with(|| f.circle_means_with(r, &ps, &opts.graded));
                means[idx]
            };
            mu.integrate_with(&g, s, &breaks, &opts.quad)
        })
        .collect()
}

/// `∫₀^s exp ∫₀¹ log|f(re^{2πiθ})|^p dθ dμ(r)`, with the inner integral from
/// the Jensen closed form at every radial node.
pub fn geometric_mean_functional(f: &Polynomial, mu: &RadialMeasure, p: f64, s: f64) -> Result<IntegralResult> {
    geometric_mean_factored(&factor(f)?, mu, p, s, &QuadOptions::default())
}

pub fn geometric_mean_factored(
    f: &FactoredPolynomial,
    mu: &RadialMeasure,
    p: f64,
    s: f64,
    opts: &QuadOptions,
) -> Result<IntegralResult> {
    let breaks: Vec<f64> = f.roots.iter().map(|z| z.norm()).filter(|&r| r > 0.0 && r < s).collect();
    let ln_g = |r: f64| f.ln_circle_mean_log(r, p);
    mu.integrate_ln_with(&ln_g, s, &breaks, opts)
}

/// `|f(0)|^p ∫₀^s Π_{w∈W} max(r/|w|, 1)^p dμ(r)` for a zero set `W`. With
/// `W = Z_s(f)` this equals the geometric-mean functional of `f` on `[0, s]`.
pub fn jensen_product(f0: f64, zeros: &[Complex64], mu: &RadialMeasure, p: f64, s: f64, opts: &QuadOptions) -> Result<IntegralResult> {
    let radii: Vec<f64> = zeros.iter().map(|z| z.norm()).filter(|&r| r < s).collect();
    let ln_f0 = f0.ln();
    let ln_g = |r: f64| {
        let mut acc = ln_f0;
        for &a in &radii {
            if a < r {
                acc += (r / a).ln();
            }
        }
        p * acc
    };
    mu.integrate_ln_with(&ln_g, s, &radii, opts)
}

/// `|quadrature - closed form| / closed form` for the Jensen circle mean of
/// `f` at radius `r` with `p = 1`.
pub fn jensen_identity_residual(f: &Polynomial, r: f64) -> Result<f64> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial { what: "jensen_identity_residual" });
    }
    if f.eval(Complex64::new(0.0, 0.0)).norm() == 0.0 {
        return Err(Error::VanishesAtOrigin);
    }
    let v = circle_mean_log(f, r, 1.0)?;
    let q = v.quadrature.ok_or(Error::RootNearCircle { radius: r, tolerance: BOUNDARY_GAP })?;
    Ok((q - v.value).abs() / v.value)
}

/// One breached line of the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs - 1`; negative beyond the slack for a breach.
    pub margin: f64,
}

/// Every line of the AM–GM/Jensen chain for a witness `f` against a sample `F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    /// `‖f‖^p_{A^p(μ,s)}`.
    pub lhs_norm_p: f64,
    /// `∫ exp ∫ log|f|^p dμ` from the closed form `|c|^p Π max(r, |z|)^p`.
    pub geo_functional_f: f64,
    /// `|f(0)|^p ∫ Π_{Z(f)} max(r/|z|, 1)^p dμ`.
    pub jensen_product_f: f64,
    /// `|f(0)|^p ∫ Π_{Z_s(F)} max(r/|z|, 1)^p dμ`.
    #[serde(rename = "jensen_product_F")]
    pub jensen_product_big_f: f64,
    /// `|f(0)| / ‖f‖_{A^p(μ,s)}`.
    pub ratio: f64,
    /// `a₀|ζ₀| · (geo functional of F)^{-1/p}`.
    pub ratio_bound: f64,
    pub violations: Vec<Violation>,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_geq(name: &str, lhs: f64, rhs: f64, out: &mut Vec<Violation>) {
    if lhs < rhs * (1.0 - CHAIN_SLACK) {
        out.push(Violation { name: name.to_string(), lhs, rhs, margin: lhs / rhs - 1.0 });
    }
}

/// Evaluates the chain `‖f‖^p ≥ geo(f) = jensen(f) ≥ |f(0)/F(0)|^p geo(F)`
/// and the bound `|f(0)|/‖f‖ ≤ a₀|ζ₀| geo(F)^{-1/p}`.
pub fn amgm_chain_report(
    big_f: &GafSample,
    f: &Polynomial,
    mu: &RadialMeasure,
    p: f64,
    s: f64,
) -> Result<ChainReport> {
    let opts = NormOptions::chain();
    let f0 = f.eval(Complex64::new(0.0, 0.0)).norm();
    if f0 == 0.0 {
        return Err(Error::VanishesAtOrigin);
    }
    let big_poly = big_f.polynomial();
    let zs_big = inner_zero_multiset(&big_poly, s)?;
    let f_roots = find_roots(f)?;
    for &(w, m) in &zs_big.zeros {
        let covered: usize = f_roots
            .roots
            .iter()
            .filter(|(z, _)| (z - w).norm() <= CONTAINMENT_TOL)
            .map(|(_, k)| k)
            .sum();
        if covered < m {
            return Err(Error::Containment { zero: format!("{w} (multiplicity {m})") });
        }
    }
    let factored = FactoredPolynomial { lead: f.leading(), roots: f_roots.expanded() };
    let lhs = ap_norm_p_factored(&factored, mu, p, s, &opts)?.value;
    let geo_f = geometric_mean_factored(&factored, mu, p, s, &opts.quad)?.value;
    let jensen_f = jensen_product(f0, &factored.roots, mu, p, s, &opts.quad)?.value;
    let big_zeros = zs_big.expanded();
    let jensen_big = jensen_product(f0, &big_zeros, mu, p, s, &opts.quad)?.value;
    let big0 = big_f.value_at_origin().norm();
    let geo_big = jensen_product(big0, &big_zeros, mu, p, s, &opts.quad)?.value;
    let ratio = f0 / lhs.powf(1.0 / p);
    let ratio_bound = big0 * geo_big.powf(-1.0 / p);

    let mut violations = Vec::new();
    check_geq("am_gm", lhs, geo_f, &mut violations);
    check_geq("jensen_identity_lower", jensen_f, geo_f, &mut violations);
    check_geq("jensen_identity_upper", geo_f, jensen_f, &mut violations);
    check_geq("zero_containment", jensen_f, jensen_big, &mut violations);
    check_geq("bound_by_F", ratio_bound, ratio, &mut violations);
    Ok(ChainReport {
        lhs_norm_p: lhs,
        geo_functional_f: geo_f,
        jensen_product_f: jensen_f,
        jensen_product_big_f: jensen_big,
        ratio,
        ratio_bound,
        violations,
    })
}
