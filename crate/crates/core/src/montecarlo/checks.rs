use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bank::{certified_zeros, check_censoring, SampleBank};
use super::{par_samples, McReport, Relation, Stats};
use crate::analysis::{ap_norm_p, ap_norm_p_factored, ap_norm_p_factored_multi, jensen_product, NormOptions};
use crate::coeffs::CoefficientSequence;
use crate::error::{Error, Result};
use crate::gaf::sample_gaf;
use crate::measure::RadialMeasure;
use crate::poly::FactoredPolynomial;
use crate::quadrature::QuadOptions;
use crate::rng::{complex_gaussian, sample_stream};
use crate::special::gamma;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Witness function built from `Z_s(F)` for the quant checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    /// `p_{Z_s(F)}`.
    #[serde(rename = "pZ")]
    ZeroPolynomial,
    /// `p_{Z_s(F)} · (z + 2s)`, a factor without zeros in the closed disk.
    #[serde(rename = "pZ_times_shifted")]
    ShiftedFactor,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Witness::ZeroPolynomial => "pZ",
            Witness::ShiftedFactor => "pZ_times_shifted",
        })
    }
}

impl FromStr for Witness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pZ" | "pz" => Ok(Witness::ZeroPolynomial),
            "pZ_times_shifted" | "shifted" => Ok(Witness::ShiftedFactor),
            _ => Err(Error::parse(s, "expected pZ or pZ_times_shifted")),
        }
    }
}

/// `∫₀^s ‖a^(r)‖₂^p dμ`, refusing a divergent integral.
fn radial_integral(a: &CoefficientSequence, mu: &RadialMeasure, p: f64, s: f64) -> Result<f64> {
    let v = a.lp_radial_integral(mu, p, s, &QuadOptions::default())?;
    if v.diverged {
        return Err(Error::Divergent {
            context: format!("∫₀^{s} ‖a^(r)‖^{p} dμ for {a} and {mu}"),
        });
    }
    Ok(v.value)
}

/// The same sequence shifted so that `a₀ > 0`.
fn normalized(a: &CoefficientSequence) -> CoefficientSequence {
    if a.coeff(0) > 0.0 {
        a.clone()
    } else {
        a.with_leading_zeros_removed()
    }
}

fn base_report(name: &str, a: &CoefficientSequence, mu: &RadialMeasure, p: f64, s: f64, seed: u64) -> McReport {
    McReport::new(name, seed)
        .param("coeffs", a)
        .param("measure", mu)
        .param("p", p)
        .param("s", s)
}

/// Keeps the finite values and counts the rest as censored.
fn split_finite(values: Vec<Option<f64>>) -> (Vec<f64>, usize) {
    let total = values.len();
    let kept: Vec<f64> = values.into_iter().flatten().filter(|v| v.is_finite()).collect();
    let dropped = total - kept.len();
    (kept, dropped)
}

/// `E ‖F‖^p_{A^p(μ,s)} = Γ(1 + p/2) ∫₀^s ‖a^(r)‖₂^p dμ`.
pub fn run_tonelli_check(
    a: &CoefficientSequence,
    mu: &RadialMeasure,
    p: f64,
    s: f64,
    m: usize,
    seed: u64,
) -> Result<McReport> {
    let start = Instant::now();
    let integral = radial_integral(a, mu, p, s)?;
    let opts = NormOptions::fast();
    let values = par_samples(m, |i| -> Result<f64> {
        let f = sample_gaf(a, s, seed, i)?.polynomial();
        Ok(ap_norm_p(&f, mu, p, s, &[], &opts)?.value)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let bound = gamma(1.0 + p / 2.0) * integral;
    Ok(base_report("tonelli", a, mu, p, s, seed)
        .compare(Stats::of(&values), bound, Relation::Eq)
        .timed(start))
}

/// `|f(0)|` and the factored witness for one zero set.
fn witness(zeros: &[Complex64], kind: Witness, s: f64) -> (f64, FactoredPolynomial) {
    let mut roots = zeros.to_vec();
    if kind == Witness::ShiftedFactor {
        roots.push(Complex64::new(-2.0 * s, 0.0));
    }
    let f0 = roots.iter().map(|z| z.norm()).product();
    (f0, FactoredPolynomial { lead: Complex64::new(1.0, 0.0), roots })
}

/// Theorem quant with `f = p_{Z_s(F)}` (or the shifted witness):
/// `E |f(0)|/‖f‖_{A^p(μ,s)} ≤ √π a₀ / (∫₀^s ‖a^(r)‖₂^p dμ)^{1/p}`.
pub fn run_quant_check(
    a: &CoefficientSequence,
    mu: &RadialMeasure,
    p: f64,
    s: f64,
    m: usize,
    seed: u64,
    kind: Witness,
) -> Result<McReport> {
    let a = normalized(a);
    let bank = SampleBank::build(&a, s, m, seed)?;
    quant_report(&bank, &a, mu, p, kind)
}

pub fn quant_report(
    bank: &SampleBank,
    a: &CoefficientSequence,
    mu: &RadialMeasure,
    p: f64,
    kind: Witness,
) -> Result<McReport> {
    Ok(quant_reports(bank, a, &[(mu.clone(), p)], kind)?.remove(0))
}

/// One quant report per `(μ, p)` pair, sharing the witness circle means.
pub fn quant_reports(
    bank: &SampleBank,
    a: &CoefficientSequence,
    pairs: &[(RadialMeasure, f64)],
    kind: Witness,
) -> Result<Vec<McReport>> {
    let start = Instant::now();
    let s = bank.s;
    let opts = NormOptions::fast();
    let refs: Vec<(&RadialMeasure, f64)> = pairs.iter().map(|(mu, p)| (mu, *p)).collect();
    let per_sample = par_samples(bank.samples.len(), |i| {
        let zeros = bank.samples[i as usize].zeros.as_deref()?;
        let (f0, f) = witness(zeros, kind, s);
        let norms = ap_norm_p_factored_multi(&f, &refs, s, &opts).ok()?;
        Some(
            norms
                .iter()
                .zip(&refs)
                .map(|(n, (_, p))| if n.diverged { f64::NAN } else { f0 / n.value.powf(1.0 / p) })
                .collect::<Vec<f64>>(),
        )
    });
    pairs
        .iter()
        .enumerate()
        .map(|(k, (mu, p))| {
            let integral = radial_integral(a, mu, *p, s)?;
            let values = per_sample.iter().map(|x| x.as_ref().map(|v| v[k])).collect();
            let (values, censored) = split_finite(values);
            check_censoring(censored, bank.samples.len())?;
            let bound = SQRT_PI * a.coeff(0) / integral.powf(1.0 / p);
            Ok(base_report("quant", a, mu, *p, s, bank.seed)
                .param("witness", kind)
                .compare(Stats::of(&values), bound, Relation::Leq)
                .censored(censored)
                .timed(start))
        })
        .collect()
}

/// `∫₀^s exp ∫ log|F|^p dμ` for every certified sample, from `F(0)` and
/// `Z_s(F)` by Jensen's formula.
fn geometric_functionals(bank: &SampleBank, mu: &RadialMeasure, p: f64) -> Vec<Option<(f64, f64)>> {
    let quad = QuadOptions::fast();
    par_samples(bank.samples.len(), |i| {
        let x = &bank.samples[i as usize];
        let zeros = x.zeros.as_deref()?;
        let f0 = x.f0.norm();
        let geo = jensen_product(f0, zeros, mu, p, bank.s, &quad).ok()?;
        Some((f0, if geo.diverged { f64::INFINITY } else { geo.value }))
    })
}

/// Remark noslepian: `E (∫ exp ∫ log|F|^p)^{-1/p} ≤ √π / (∫₀^s ‖a^(r)‖₂^p dμ)^{1/p}`.
pub fn run_noslepian_check(
    a: &CoefficientSequence,
    mu: &RadialMeasure,
    p: f64,
    s: f64,
    m: usize,
    seed: u64,
) -> Result<McReport> {
    let bank = SampleBank::build(&normalized(a), s, m, seed)?;
    noslepian_report(&bank, &normalized(a), mu, p)
}

pub fn noslepian_report(bank: &SampleBank, a: &CoefficientSequence, mu: &RadialMeasure, p: f64) -> Result<McReport> {
    let start = Instant::now();
    let integral = radial_integral(a, mu, p, bank.s)?;
    let values = geometric_functionals(bank, mu, p)
        .into_iter()
        .map(|x| x.map(|(_, geo)| geo.powf(-1.0 / p)))
        .collect();
    let (values, censored) = split_finite(values);
    check_censoring(censored, bank.samples.len())?;
    let bound = SQRT_PI / integral.powf(1.0 / p);
    Ok(base_report("noslepian", a, mu, p, bank.s, bank.seed)
        .compare(Stats::of(&values), bound, Relation::Leq)
        .censored(censored)
        .timed(start))
}

/// Working radii `r_μ(1 - 2^{-j})`, or `2^{j/2}` for fock measures.
pub fn s_grid(mu: &RadialMeasure, js: &[u32]) -> Vec<f64> {
    js.iter()
        .map(|&j| {
            if mu.r_mu.is_finite() {
                mu.r_mu * (1.0 - 0.5f64.powi(j as i32))
            } else {
                2f64.powf(j as f64 / 2.0)
            }
        })
        .collect()
}

/// The noslepian estimate along an s-grid; passes when the last estimate is
/// at most half of the first.
pub fn run_noslepian_trend(
    a: &CoefficientSequence,
    mu: &RadialMeasure,
    p: f64,
    js: &[u32],
    m: usize,
    seed: u64,
) -> Result<McReport> {
    let start = Instant::now();
    let a = normalized(a);
    let grid = s_grid(mu, js);
    let mut estimates = Vec::with_capacity(grid.len());
    let mut censored = 0;
    for &s in &grid {
        let bank = SampleBank::build(&a, s, m, seed)?;
        let values = geometric_functionals(&bank, mu, p)
            .into_iter()
            .map(|x| x.map(|(_, geo)| geo.powf(-1.0 / p)))
            .collect();
        let (values, dropped) = split_finite(values);
        check_censoring(dropped, m)?;
        censored += dropped;
        estimates.push(Stats::of(&values).mean);
    }
    let (first, last) = match (estimates.first(), estimates.last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return Err(Error::Empty("s-grid")),
    };
    let fmt_list = |xs: &[f64]| xs.iter().map(|x| format!("{x:.6e}")).collect::<Vec<_>>().join(";");
    let ratio = last / first;
    let mut report = McReport::new("noslepian_trend", seed)
        .param("coeffs", &a)
        .param("measure", mu)
        .param("p", p)
        .param("s_grid", fmt_list(&grid))
        .param("estimates", fmt_list(&estimates))
        .verdict(ratio, ratio <= 0.5)
        .censored(censored);
    report.samples = m * grid.len();
    report.bound = Some(0.5);
    report.relation = Relation::Leq;
    Ok(report.timed(start))
}

/// Theorem quant3: `E |F(0)| (∫ exp ∫ log|F|^p)^{-1/p} ≤ √π a₀ / (∫₀^s ‖a^(r)‖₂^p dμ)^{1/p}`,
/// plus the fraction of samples with a finite functional.
pub fn run_quant3_check(
    a: &CoefficientSequence,
    mu: &RadialMeasure,
    p: f64,
    s: f64,
    m: usize,
    seed: u64,
) -> Result<Vec<McReport>> {
    let a = normalized(a);
    let bank = SampleBank::build(&a, s, m, seed)?;
    quant3_reports(&bank, &a, mu, p)
}

pub fn quant3_reports(bank: &SampleBank, a: &CoefficientSequence, mu: &RadialMeasure, p: f64) -> Result<Vec<McReport>> {
    let start = Instant::now();
    let s = bank.s;
    let integral = radial_integral(a, mu, p, s)?;
    let geo = geometric_functionals(bank, mu, p);
    let finite: Vec<f64> = geo
        .iter()
        .flatten()
        .map(|(_, g)| if g.is_finite() { 1.0 } else { 0.0 })
        .collect();
    let values = geo
        .into_iter()
        .map(|x| x.map(|(f0, g)| f0 * g.powf(-1.0 / p)))
        .collect();
    let (values, censored) = split_finite(values);
    check_censoring(censored, bank.samples.len())?;
    let tonelli = gamma(1.0 + p / 2.0);
    let bound = SQRT_PI * tonelli.powf(1.0 / p) * a.coeff(0) / (tonelli * integral).powf(1.0 / p);
    let main = base_report("quant3", a, mu, p, s, bank.seed)
        .compare(Stats::of(&values), bound, Relation::Leq)
        .censored(censored)
        .timed(start);
    let frac = Stats::of(&finite);
    let proxy = base_report("quant3_finite_fraction", a, mu, p, s, bank.seed)
        .param("radial_norm", "finite")
        .verdict(frac.mean, frac.mean >= 0.99);
    let mut proxy = proxy.censored(censored);
    proxy.samples = frac.count;
    proxy.std_error = frac.std_error;
    proxy.bound = Some(1.0);
    proxy.relation = Relation::Eq;
    Ok(vec![main, proxy])
}

/// `(a₀^{4N}(2N)! + 4|b₀|²a₀^{2N}N! + |b₀|⁴)^{1/(4N)} Γ((2N-1)/(4N-1))^{(4N-1)/(4N)}`.
pub fn quant2_constant(n: u32, a0: f64, b0: Complex64) -> f64 {
    let nf = n as f64;
    let fourth = fourth_moment(n, a0, b0);
    fourth.powf(1.0 / (4.0 * nf)) * gamma((2.0 * nf - 1.0) / (4.0 * nf - 1.0)).powf((4.0 * nf - 1.0) / (4.0 * nf))
}

/// `E |a₀^N ζ^N + b₀|⁴`.
fn fourth_moment(n: u32, a0: f64, b0: Complex64) -> f64 {
    let nf = n as f64;
    let b2 = b0.norm_sqr();
    a0.powf(4.0 * nf) * gamma(2.0 * nf + 1.0) + 4.0 * b2 * a0.powf(2.0 * nf) * gamma(nf + 1.0) + b2 * b2
}

/// Theorem quant2 with `G = F^N + b₀` and `f = p_{Z_s(G)}`:
/// `E (|f(0)|/‖f‖_{A^{p/N}(μ,s)})^{1/N} ≤ c / (∫₀^s ‖a^(r)‖₂^p dμ)^{1/p}`.
#[allow(clippy::too_many_arguments)]
pub fn run_quant2_check(
    a: &CoefficientSequence,
    mu: &RadialMeasure,
    p: f64,
    n: u32,
    b0: Complex64,
    s: f64,
    m: usize,
    seed: u64,
) -> Result<McReport> {
    if n == 0 {
        return Err(Error::OutOfRange { name: "N", value: 0.0, expected: "N >= 1" });
    }
    let start = Instant::now();
    let a = normalized(a);
    let integral = radial_integral(&a, mu, p, s)?;
    let q = p / n as f64;
    let opts = NormOptions::fast();
    let values = par_samples(m, |i| -> Result<Option<f64>> {
        let f = sample_gaf(&a, s, seed, i)?.polynomial();
        let g = f.powi(n).add_constant(b0);
        let Some(zeros) = certified_zeros(&g, s) else {
            return Ok(None);
        };
        let (f0, w) = witness(&zeros, Witness::ZeroPolynomial, s);
        let norm_q = ap_norm_p_factored(&w, mu, q, s, &opts)?;
        Ok((!norm_q.diverged).then(|| f0.powf(1.0 / n as f64) / norm_q.value.powf(1.0 / p)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (values, censored) = split_finite(values);
    check_censoring(censored, m)?;
    let bound = quant2_constant(n, a.coeff(0), b0) / integral.powf(1.0 / p);
    Ok(base_report("quant2", &a, mu, p, s, seed)
        .param("N", n)
        .param("b0", format!("{},{}", b0.re, b0.im))
        .compare(Stats::of(&values), bound, Relation::Leq)
        .censored(censored)
        .timed(start))
}

/// `E |ζ| / |ρζ + √(1-ρ²)ζ'| ≤ √π`.
pub fn run_slepian_check(rho: f64, m: usize, seed: u64) -> Result<McReport> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::OutOfRange { name: "rho", value: rho, expected: "0 <= rho <= 1" });
    }
    let start = Instant::now();
    let c = (1.0 - rho * rho).sqrt();
    let values = par_samples(m, |i| {
        let mut rng = sample_stream(seed, i);
        let z = complex_gaussian(&mut rng);
        let w = complex_gaussian(&mut rng);
        z.norm() / (z * rho + w * c).norm()
    });
    Ok(McReport::new("slepian", seed)
        .param("rho", rho)
        .compare(Stats::of(&values), SQRT_PI, Relation::Leq)
        .timed(start))
}

/// The three Gaussian facts behind Theorem quant2: the fourth moment of
/// `a₀^Nζ^N + b₀`, stochastic domination of `|ζ^N|` by `|ζ^N - α|`, and
/// `E |ζ^N - α|^{-β} ≤ Γ(1 - βN/2)`.
pub fn run_gaussian_moment_checks(
    n: u32,
    a0: f64,
    b0: Complex64,
    beta: f64,
    shift: Complex64,
    m: usize,
    seed: u64,
) -> Result<Vec<McReport>> {
    let nf = n as f64;
    if n == 0 || !(beta > 0.0 && beta < 2.0 / nf) {
        return Err(Error::OutOfRange { name: "beta", value: beta, expected: "N >= 1 and 0 < beta < 2/N" });
    }
    let start = Instant::now();
    let zeta_n = par_samples(m, |i| complex_gaussian(&mut sample_stream(seed, i)).powu(n));
    let shift_str = format!("{},{}", shift.re, shift.im);
    let base = |name: &str| McReport::new(name, seed).param("N", n);

    let fourth: Vec<f64> = zeta_n.iter().map(|w| (w * a0.powf(nf) + b0).norm_sqr().powi(2)).collect();
    let fourth = base("fourth_moment")
        .param("a0", a0)
        .param("b0", format!("{},{}", b0.re, b0.im))
        .compare(Stats::of(&fourth), fourth_moment(n, a0, b0), Relation::Eq)
        .timed(start);

    // radii at the quantiles k/21 of |ζ|^N, where P(|ζ|^N < t) = 1 - e^{-t^{2/N}}
    let mut worst: Option<Stats> = None;
    for k in 1..=20 {
        let t = (-(1.0 - k as f64 / 21.0).ln()).powf(nf / 2.0);
        let diffs: Vec<f64> = zeta_n
            .iter()
            .map(|w| (w.norm() < t) as u8 as f64 - ((w - shift).norm() < t) as u8 as f64)
            .collect();
        let st = Stats::of(&diffs);
        let z = |x: &Stats| if x.std_error > 0.0 { x.mean / x.std_error } else if x.mean < 0.0 { f64::NEG_INFINITY } else { f64::INFINITY };
        if worst.as_ref().is_none_or(|w| z(&st) < z(w)) {
            worst = Some(st);
        }
    }
    let domination = base("cdf_domination")
        .param("shift", &shift_str)
        .param("t_grid", "quantiles k/21 of |zeta|^N, k = 1..20")
        .compare(worst.expect("twenty radii"), 0.0, Relation::Geq)
        .timed(start);

    let neg: Vec<f64> = zeta_n.iter().map(|w| (w - shift).norm().powf(-beta)).collect();
    let negative = base("negative_moment")
        .param("beta", beta)
        .param("shift", &shift_str)
        .compare(Stats::of(&neg), gamma(1.0 - beta * nf / 2.0), Relation::Leq)
        .timed(start);

    Ok(vec![fourth, domination, negative])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> CoefficientSequence {
        s.parse().unwrap()
    }

    #[test]
    fn quant2_constant_examples() {
        let g13 = gamma(1.0 / 3.0);
        let c = quant2_constant(1, 1.0, Complex64::new(-1.0, 0.0));
        assert!((c - 7f64.powf(0.25) * g13.powf(0.75)).abs() < 1e-12);
        let c0 = quant2_constant(1, 1.0, Complex64::new(0.0, 0.0));
        assert!((c0 - 2f64.powf(0.25) * g13.powf(0.75)).abs() < 1e-12);
    }

    #[test]
    fn tonelli_basis_examples() {
        let disk = RadialMeasure::disk();
        let r = run_tonelli_check(&seq("basis"), &disk, 2.0, 1.0, 2000, 7).unwrap();
        assert!((r.bound.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.pass, "{r:?}");
        let r4 = run_tonelli_check(&seq("basis"), &disk, 4.0, 1.0, 2000, 7).unwrap();
        assert!((r4.bound.unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(
            run_tonelli_check(&seq("unit"), &disk, 2.0, 1.0, 10, 7),
            Err(Error::Divergent { .. }) | Err(Error::OutsideConvergence { .. })
        ));
    }

    #[test]
    fn basis_closed_forms() {
        let disk = RadialMeasure::disk();
        let b = seq("basis");
        let mass: f64 = 0.81;
        let q = run_quant_check(&b, &disk, 1.0, 0.9, 200, 1, Witness::ZeroPolynomial).unwrap();
        assert!((q.estimate - 1.0 / mass).abs() < 1e-10);
        assert!(q.std_error < 1e-12);
        assert!(q.pass);
        let q3 = run_quant3_check(&b, &disk, 2.0, 0.9, 200, 1).unwrap();
        assert!((q3[0].estimate - mass.powf(-0.5)).abs() < 1e-10);
        assert!((q3[0].bound.unwrap() - SQRT_PI * mass.powf(-0.5)).abs() < 1e-10);
        assert_eq!(q3[1].estimate, 1.0);
        // E|ζ|⁻¹ = √π: the basis case is the equality case of noslepian
        let n = run_noslepian_check(&b, &disk, 1.0, 0.9, 20_000, 2).unwrap();
        assert!((n.estimate - SQRT_PI / mass).abs() <= 4.0 * n.std_error, "{n:?}");
    }

    #[test]
    fn slepian_examples() {
        let r1 = run_slepian_check(1.0, 1000, 3).unwrap();
        assert!((r1.estimate - 1.0).abs() < 1e-15 && r1.std_error < 1e-15);
        let r0 = run_slepian_check(0.0, 20_000, 3).unwrap();
        assert!(r0.pass);
        assert!(run_slepian_check(1.5, 10, 3).is_err());
    }

    #[test]
    fn moment_examples() {
        let zero = Complex64::new(0.0, 0.0);
        let r = run_gaussian_moment_checks(1, 1.0, zero, 1.0, zero, 20_000, 5).unwrap();
        assert!((r[0].bound.unwrap() - 2.0).abs() < 1e-12);
        assert!(r[0].pass && r[1].pass && r[2].pass, "{r:?}");
        assert_eq!(r[1].estimate, 0.0);
        assert!((r[2].bound.unwrap() - SQRT_PI).abs() < 1e-12);
        let r2 = run_gaussian_moment_checks(2, 1.0, zero, 0.5, zero, 1000, 5).unwrap();
        assert_eq!((r2[1].estimate, r2[1].std_error), (0.0, 0.0));
        assert!(run_gaussian_moment_checks(2, 1.0, zero, 1.0, zero, 10, 5).is_err());
    }

    #[test]
    fn reports_ignore_thread_count() {
        let a = seq("unit");
        let disk = RadialMeasure::disk();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_quant_check(&a, &disk, 1.0, 0.7, 200, 9, Witness::ZeroPolynomial).unwrap())
        };
        assert_eq!(run(1).deterministic_json(), run(3).deterministic_json());
    }

    #[test]
    fn unit_disk_points_pass() {
        let a = seq("unit");
        let disk = RadialMeasure::disk();
        let t = run_tonelli_check(&a, &disk, 1.0, 0.9, 2000, 4).unwrap();
        assert!(t.pass, "{t:?}");
        let q = run_quant_check(&a, &disk, 0.5, 0.9, 1000, 3, Witness::ShiftedFactor).unwrap();
        assert!(q.pass, "{q:?}");
        let q2 = run_quant2_check(&a, &disk, 1.0, 2, Complex64::new(-1.0, 0.0), 0.8, 300, 3).unwrap();
        assert!(q2.pass, "{q2:?}");
    }
}
