//! Radial measures μ on (0, ∞) and integrals `∫₀^s g(r) dμ(r)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::descriptor::{parse_f64, parse_params, split_kind};
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_interval, integrate_levels, integrate_panel_right_weight, Level, QuadOptions,
};
use crate::special::ln_gamma;

/// Fock integrals are cut at `u = pαr²/2 = 700`, where `e^{-u}` underflows.
pub const FOCK_U_MAX: f64 = 700.0;
const FOCK_U0: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeasureKind {
    /// `2r dr` on `[0, 1]`.
    Disk,
    /// `2(1 - r²)^α dr` on `[0, 1]`.
    Bergman { alpha: f64 },
    /// `pα r e^{-pαr²/2} dr` on `(0, ∞)`.
    Fock { p: f64, alpha: f64 },
    /// Point masses `(radius, weight)`, radii in `(0, 1)`.
    Atoms { atoms: Vec<(f64, f64)> },
}

/// A finite radial measure with its support radius `r_μ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialMeasure {
    pub kind: MeasureKind,
    pub r_mu: f64,
}

/// Result of a radial integral. A divergent integral has `value = +∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub abs_error: f64,
    pub diverged: bool,
}

impl IntegralResult {
    pub fn finite(value: f64, abs_error: f64) -> Self {
        Self {
            value,
            abs_error,
            diverged: false,
        }
    }

    pub fn divergent() -> Self {
        Self {
            value: f64::INFINITY,
            abs_error: f64::INFINITY,
            diverged: true,
        }
    }

    /// `value^(1/p)`, with the error propagated to first order.
    pub fn root(self, p: f64) -> Self {
        if self.diverged {
            return self;
        }
        let v = self.value.powf(1.0 / p);
        let err = if self.value > 0.0 {
            v * self.abs_error / (p * self.value)
        } else {
            self.abs_error.powf(1.0 / p)
        };
        Self::finite(v, err)
    }
}

/// Integrand passed to the engine: either `g` itself or `ln g`.
#[derive(Clone, Copy)]
enum Integrand<'a> {
    Linear(&'a dyn Fn(f64) -> f64),
    Log(&'a dyn Fn(f64) -> f64),
}

impl Integrand<'_> {
    /// `g(r) · e^{ln_w}`.
    #[inline]
    fn weighted(&self, r: f64, ln_w: f64) -> f64 {
        match self {
            Integrand::Linear(g) => {
                let v = g(r);
                if v == 0.0 {
                    0.0
                } else {
                    v * ln_w.exp()
                }
            }
            Integrand::Log(lg) => {
                let l = lg(r);
                if l == f64::NEG_INFINITY {
                    0.0
                } else {
                    (l + ln_w).exp()
                }
            }
        }
    }
}

impl RadialMeasure {
    pub fn disk() -> Self {
        Self {
            kind: MeasureKind::Disk,
            r_mu: 1.0,
        }
    }

    pub fn bergman(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                expected: "alpha > -1 for the bergman measure",
            });
        }
        Ok(Self {
            kind: MeasureKind::Bergman { alpha },
            r_mu: 1.0,
        })
    }

    pub fn fock(p: f64, alpha: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::OutOfRange {
                name: "p",
                value: p,
                expected: "p > 0 for the fock measure",
            });
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                expected: "alpha > 0 for the fock measure",
            });
        }
        Ok(Self {
            kind: MeasureKind::Fock { p, alpha },
            r_mu: f64::INFINITY,
        })
    }

    pub fn atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Empty("atom list"));
        }
        for &(r, w) in &atoms {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::OutOfRange {
                    name: "atom radius",
                    value: r,
                    expected: "radius in (0, 1)",
                });
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::OutOfRange {
                    name: "atom weight",
                    value: w,
                    expected: "weight > 0",
                });
            }
        }
        Ok(Self {
            kind: MeasureKind::Atoms { atoms },
            r_mu: 1.0,
        })
    }

    pub fn is_fock(&self) -> bool {
        matches!(self.kind, MeasureKind::Fock { .. })
    }

    /// `μ((0, r_μ))`.
    pub fn total_mass(&self) -> f64 {
        match &self.kind {
            MeasureKind::Disk => 1.0,
            // ∫₀¹ 2(1-r²)^α dr = B(1/2, α+1)
            MeasureKind::Bergman { alpha } => (ln_gamma(0.5) + ln_gamma(alpha + 1.0)
                - ln_gamma(alpha + 1.5))
            .exp(),
            MeasureKind::Fock { .. } => 1.0,
            MeasureKind::Atoms { atoms } => atoms.iter().map(|(_, w)| w).sum(),
        }
    }

    /// `μ((s, r_μ))` in closed form.
    pub fn tail_mass(&self, s: f64) -> f64 {
        match &self.kind {
            MeasureKind::Disk => (1.0 - s * s).max(0.0),
            MeasureKind::Bergman { .. } => {
                let head = self
                    .integrate_radial(|_| 1.0, s.min(1.0))
                    .map(|r| r.value)
                    .unwrap_or(0.0);
                (self.total_mass() - head).max(0.0)
            }
            MeasureKind::Fock { p, alpha } => (-p * alpha * s * s / 2.0).exp(),
            MeasureKind::Atoms { atoms } => atoms.iter().filter(|(r, _)| *r > s).map(|(_, w)| w).sum(),
        }
    }

    fn check_radius(&self, s: f64) -> Result<()> {
        if s.is_nan() || s < 0.0 {
            return Err(Error::OutOfRange {
                name: "s",
                value: s,
                expected: "s >= 0",
            });
        }
        if s > self.r_mu * (1.0 + 1e-15) {
            return Err(Error::RadiusBeyondSupport { s, r_mu: self.r_mu });
        }
        Ok(())
    }

    /// `∫₀^s g dμ` with the default node schedule.
    pub fn integrate_radial<G: Fn(f64) -> f64>(&self, g: G, s: f64) -> Result<IntegralResult> {
        self.integrate_with(&g, s, &[], &QuadOptions::default())
    }

    /// `∫₀^s g dμ` with explicit breakpoints (radii where g is not smooth)
    /// and node schedule. `s = r_μ` triggers divergence detection.
    pub fn integrate_with(
        &self,
        g: &dyn Fn(f64) -> f64,
        s: f64,
        breakpoints: &[f64],
        opts: &QuadOptions,
    ) -> Result<IntegralResult> {
        self.integrate_impl(Integrand::Linear(g), s, breakpoints, opts)
    }

    /// As [`Self::integrate_with`], for an integrand supplied as `ln g`.
    /// Avoids overflow when `g` and the density are individually extreme.
    pub fn integrate_ln_with(
        &self,
        ln_g: &dyn Fn(f64) -> f64,
        s: f64,
        breakpoints: &[f64],
        opts: &QuadOptions,
    ) -> Result<IntegralResult> {
        self.integrate_impl(Integrand::Log(ln_g), s, breakpoints, opts)
    }

    fn integrate_impl(
        &self,
        g: Integrand<'_>,
        s: f64,
        breakpoints: &[f64],
        opts: &QuadOptions,
    ) -> Result<IntegralResult> {
        self.check_radius(s)?;
        let s = s.min(self.r_mu);
        match &self.kind {
            MeasureKind::Atoms { atoms } => {
                let mut total = 0.0;
                for &(r, w) in atoms {
                    if r <= s {
                        let v = g.weighted(r, w.ln());
                        if !v.is_finite() {
                            return Err(Error::NonFiniteIntegrand { at: r });
                        }
                        total += v;
                    }
                }
                Ok(IntegralResult::finite(total, 0.0))
            }
            MeasureKind::Disk => {
                let h = |r: f64| g.weighted(r, (2.0 * r).ln());
                self.unit_support(&h, None, s, breakpoints, opts, g)
            }
            MeasureKind::Bergman { alpha } => {
                let a = *alpha;
                let h = |r: f64| g.weighted(r, std::f64::consts::LN_2 + a * (1.0 - r * r).ln());
                self.unit_support(&h, Some(a), s, breakpoints, opts, g)
            }
            MeasureKind::Fock { p, alpha } => self.fock_integral(g, p * alpha, s, breakpoints, opts),
        }
    }

    /// Disk and bergman: native variable r on [0, 1].
    fn unit_support(
        &self,
        h: &dyn Fn(f64) -> f64,
        jacobi_alpha: Option<f64>,
        s: f64,
        breakpoints: &[f64],
        opts: &QuadOptions,
        g: Integrand<'_>,
    ) -> Result<IntegralResult> {
        let level_edge = |j: usize| 1.0 - 0.5f64.powi(j as i32);
        if s < 1.0 {
            let mut cuts: Vec<f64> = breakpoints.to_vec();
            let mut j = 1;
            while level_edge(j) < s && j < 60 {
                cuts.push(level_edge(j));
                j += 1;
            }
            let est = integrate_interval(h, 0.0, s, &cuts, opts)?;
            return Ok(IntegralResult::finite(est.value, est.error));
        }
        let panel = |j: usize| -> Result<Level> {
            let (a, b) = (level_edge(j), level_edge(j + 1));
            match integrate_interval(h, a, b, breakpoints, opts) {
                Ok(est) => Ok(Level {
                    value: est.value,
                    error: est.error,
                    regular: true,
                    last: false,
                }),
                Err(Error::NonFiniteIntegrand { .. }) => Ok(Level {
                    value: f64::INFINITY,
                    error: 0.0,
                    regular: true,
                    last: false,
                }),
                Err(e) => Err(e),
            }
        };
        let nodes = opts.initial_nodes.clamp(8, 128);
        let closure = |j: usize| -> Result<f64> {
            let a = level_edge(j + 1);
            let v = match jacobi_alpha {
                Some(alpha) => {
                    // absorb (1 - r)^α; the remaining factor is 2(1 + r)^α g(r)
                    let f = |r: f64| g.weighted(r, std::f64::consts::LN_2 + alpha * (1.0 + r).ln());
                    integrate_panel_right_weight(f, a, 1.0, alpha, nodes)
                }
                None => integrate_panel_right_weight(h, a, 1.0, 0.0, nodes),
            };
            // an unbounded tail simply never agrees with its successor
            Ok(v.unwrap_or(f64::INFINITY))
        };
        let out = integrate_levels(panel, Some(closure), opts)?;
        Ok(if out.diverged || !out.value.is_finite() {
            IntegralResult::divergent()
        } else {
            IntegralResult::finite(out.value, out.error)
        })
    }

    /// Fock: substitute `u = c r²/2`, so `dμ = e^{-u} du`.
    fn fock_integral(
        &self,
        g: Integrand<'_>,
        c: f64,
        s: f64,
        breakpoints: &[f64],
        opts: &QuadOptions,
    ) -> Result<IntegralResult> {
        let r_of = |u: f64| (2.0 * u / c).sqrt();
        let h = |u: f64| g.weighted(r_of(u), -u);
        let u_cuts: Vec<f64> = breakpoints.iter().map(|r| c * r * r / 2.0).collect();
        let level_edge = |j: usize| if j == 0 { 0.0 } else { FOCK_U0 * 2f64.powi(j as i32 - 1) };
        if s.is_finite() {
            let u_s = (c * s * s / 2.0).min(FOCK_U_MAX);
            let mut cuts = u_cuts;
            let mut j = 1;
            while level_edge(j) < u_s {
                cuts.push(level_edge(j));
                j += 1;
            }
            let est = integrate_interval(h, 0.0, u_s, &cuts, opts)?;
            return Ok(IntegralResult::finite(est.value, est.error));
        }
        let panel = |j: usize| -> Result<Level> {
            let a = level_edge(j);
            let b = level_edge(j + 1).min(FOCK_U_MAX);
            let last = b >= FOCK_U_MAX;
            let regular = !last || b == level_edge(j + 1);
            match integrate_interval(h, a, b, &u_cuts, opts) {
                Ok(est) => Ok(Level {
                    value: est.value,
                    error: est.error,
                    regular,
                    last,
                }),
                Err(Error::NonFiniteIntegrand { .. }) => Ok(Level {
                    value: f64::INFINITY,
                    error: 0.0,
                    regular: true,
                    last,
                }),
                Err(e) => Err(e),
            }
        };
        let out = integrate_levels(panel, None::<fn(usize) -> Result<f64>>, opts)?;
        Ok(if out.diverged || !out.value.is_finite() {
            IntegralResult::divergent()
        } else {
            IntegralResult::finite(out.value, out.error)
        })
    }

    /// `∫₀^{r_μ} r^m dμ` in closed form (used for moment-based constructions).
    pub fn moment(&self, m: f64) -> f64 {
        self.ln_moment(m).exp()
    }

    /// `ln ∫₀^{r_μ} r^m dμ`.
    pub fn ln_moment(&self, m: f64) -> f64 {
        match &self.kind {
            MeasureKind::Disk => std::f64::consts::LN_2 - (m + 2.0).ln(),
            // ∫₀¹ 2 r^m (1-r²)^α dr = B((m+1)/2, α+1)
            MeasureKind::Bergman { alpha } => {
                ln_gamma((m + 1.0) / 2.0) + ln_gamma(alpha + 1.0) - ln_gamma((m + 1.0) / 2.0 + alpha + 1.0)
            }
            // ∫ r^m c r e^{-cr²/2} dr = (2/c)^{m/2} Γ(m/2 + 1)
            MeasureKind::Fock { p, alpha } => {
                0.5 * m * (2.0 / (p * alpha)).ln() + ln_gamma(m / 2.0 + 1.0)
            }
            MeasureKind::Atoms { atoms } => {
                let terms: Vec<f64> = atoms.iter().map(|(r, w)| m * r.ln() + w.ln()).collect();
                crate::special::log_sum_exp(&terms)
            }
        }
    }
}

impl FromStr for RadialMeasure {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let (kind, body) = split_kind(input.trim());
        match kind {
            "disk" if body.is_empty() => Ok(Self::disk()),
            "bergman" => {
                let v = parse_params(input, body, &["alpha"], &[])?;
                Self::bergman(v[0].unwrap())
            }
            "fock" => {
                let v = parse_params(input, body, &["p", "alpha"], &[])?;
                Self::fock(v[0].unwrap(), v[1].unwrap())
            }
            "atoms" => {
                if body.is_empty() {
                    return Err(Error::parse(input, "atoms need at least one radius:weight pair"));
                }
                let mut atoms = Vec::new();
                for item in body.split(',') {
                    let (r, w) = item
                        .split_once(':')
                        .ok_or_else(|| Error::parse(input, format!("expected radius:weight, found `{item}`")))?;
                    atoms.push((parse_f64(input, r)?, parse_f64(input, w)?));
                }
                Self::atoms(atoms)
            }
            _ => Err(Error::parse(input, "unknown measure kind")),
        }
    }
}

impl fmt::Display for RadialMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MeasureKind::Disk => write!(f, "disk"),
            MeasureKind::Bergman { alpha } => write!(f, "bergman:alpha={alpha}"),
            MeasureKind::Fock { p, alpha } => write!(f, "fock:p={p},alpha={alpha}"),
            MeasureKind::Atoms { atoms } => {
                write!(f, "atoms:")?;
                for (i, (r, w)) in atoms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{r}:{w}")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(s: &str) -> RadialMeasure {
        s.parse().unwrap()
    }

    #[test]
    fn descriptors() {
        assert_eq!(m("disk").r_mu, 1.0);
        assert_eq!(m("fock:p=2,alpha=1").r_mu, f64::INFINITY);
        assert!("bergman:alpha=-1".parse::<RadialMeasure>().is_err());
        assert!("fock:p=0,alpha=1".parse::<RadialMeasure>().is_err());
        assert!("atoms:1:0.5".parse::<RadialMeasure>().is_err());
        assert!("square".parse::<RadialMeasure>().is_err());
        for s in ["disk", "bergman:alpha=0.5", "fock:p=2,alpha=1", "atoms:0.5:1,0.25:2"] {
            assert_eq!(m(s).to_string(), s);
        }
    }

    #[test]
    fn total_masses() {
        assert_eq!(m("disk").total_mass(), 1.0);
        assert!((m("bergman:alpha=1").total_mass() - 4.0 / 3.0).abs() < 1e-14);
        assert!((m("bergman:alpha=0").total_mass() - 2.0).abs() < 1e-14);
        for desc in ["disk", "bergman:alpha=1", "bergman:alpha=-0.5", "fock:p=2,alpha=1", "fock:p=0.5,alpha=3"] {
            let mu = m(desc);
            let res = mu.integrate_radial(|_| 1.0, mu.r_mu).unwrap();
            assert!(!res.diverged, "{desc}");
            assert!(
                (res.value - mu.total_mass()).abs() < 1e-9 * mu.total_mass(),
                "{desc}: {} vs {}",
                res.value,
                mu.total_mass()
            );
        }
    }

    #[test]
    fn spec_examples() {
        let disk = m("disk");
        assert!((disk.integrate_radial(|r| r * r, 1.0).unwrap().value - 0.5).abs() < 1e-12);
        assert!(disk.integrate_radial(|r| 1.0 / (1.0 - r * r), 1.0).unwrap().diverged);
        assert!(matches!(
            disk.integrate_radial(|_| 1.0, 1.5),
            Err(Error::RadiusBeyondSupport { .. })
        ));
        let atoms = m("atoms:0.5:1,0.75:2");
        assert_eq!(atoms.integrate_radial(|r| r, 0.6).unwrap().value, 0.5);
        assert_eq!(atoms.integrate_radial(|r| r, 1.0).unwrap().value, 2.0);
    }

    #[test]
    fn fock_moments_are_finite() {
        let mu = m("fock:p=2,alpha=1");
        for k in 0..12 {
            let res = mu.integrate_radial(|r| r.powi(k), f64::INFINITY).unwrap();
            assert!(!res.diverged);
            let exact = mu.moment(k as f64);
            assert!((res.value - exact).abs() < 1e-9 * exact, "k={k}");
        }
        // e^{r²} against 2r e^{-r²} is 2r dr on (0, ∞)
        assert!(mu.integrate_radial(|r| (r * r).exp(), f64::INFINITY).unwrap().diverged);
    }

    #[test]
    fn bergman_moments() {
        for alpha in [-0.5, 0.0, 1.0, 2.5] {
            let mu = RadialMeasure::bergman(alpha).unwrap();
            for k in [0.0, 1.0, 3.0, 7.5] {
                let res = mu.integrate_radial(|r| r.powf(k), 1.0).unwrap();
                let exact = mu.moment(k);
                assert!((res.value - exact).abs() < 1e-9 * exact, "alpha={alpha} k={k}");
            }
        }
    }

    #[test]
    fn endpoint_power_singularities() {
        let disk = m("disk");
        // ∫₀¹ (1-r)^{-1/2} 2r dr = 8/3
        let res = disk.integrate_radial(|r| (1.0 - r).powf(-0.5), 1.0).unwrap();
        assert!(!res.diverged);
        assert!((res.value - 8.0 / 3.0).abs() < 1e-7);
        assert!(disk.integrate_radial(|r| (1.0 - r).powf(-1.1), 1.0).unwrap().diverged);
        assert!(disk.integrate_radial(|r| 1.0 / (1.0 - r), 1.0).unwrap().diverged);
    }

    #[test]
    fn log_integrand_matches_linear() {
        let mu = m("fock:p=1,alpha=2");
        let lin = mu.integrate_radial(|r| (0.5 * r * r).exp(), f64::INFINITY).unwrap();
        let log = mu
            .integrate_ln_with(&|r| 0.5 * r * r, f64::INFINITY, &[], &QuadOptions::default())
            .unwrap();
        // ∫ e^{r²/2} 2r e^{-r²} dr = 2
        assert!((lin.value - 2.0).abs() < 1e-9);
        assert!((log.value - 2.0).abs() < 1e-9);
    }

    /// Brute-force midpoint oracle with 10⁶ points, using u = pαr²/2 for fock.
    fn riemann(mu: &RadialMeasure, g: &dyn Fn(f64) -> f64, s: f64) -> f64 {
        let n = 1_000_000;
        match mu.kind {
            MeasureKind::Fock { p, alpha } => {
                let c = p * alpha;
                let u_max = (c * s * s / 2.0).min(60.0);
                let h = u_max / n as f64;
                (0..n)
                    .map(|i| {
                        let u = (i as f64 + 0.5) * h;
                        g((2.0 * u / c).sqrt()) * (-u).exp()
                    })
                    .sum::<f64>()
                    * h
            }
            MeasureKind::Disk => {
                let h = s / n as f64;
                (0..n).map(|i| (i as f64 + 0.5) * h).map(|r| g(r) * 2.0 * r).sum::<f64>() * h
            }
            MeasureKind::Bergman { alpha } => {
                let h = s / n as f64;
                (0..n)
                    .map(|i| (i as f64 + 0.5) * h)
                    .map(|r| g(r) * 2.0 * (1.0 - r * r).powf(alpha))
                    .sum::<f64>()
                    * h
            }
            MeasureKind::Atoms { .. } => unreachable!(),
        }
    }

    #[test]
    fn agrees_with_riemann_oracle() {
        let g = |r: f64| (1.0 + r * r).sqrt() * (0.3 * r).cos().abs();
        for (desc, s) in [
            ("disk", 0.9),
            ("disk", 1.0),
            ("bergman:alpha=1", 0.95),
            ("bergman:alpha=2", 1.0),
            ("fock:p=2,alpha=1", 4.0),
            ("fock:p=2,alpha=1", f64::INFINITY),
        ] {
            let mu = m(desc);
            let q = mu.integrate_radial(g, s).unwrap().value;
            let oracle = riemann(&mu, &g, s);
            assert!((q - oracle).abs() <= 1e-8 * oracle, "{desc} s={s}: {q} vs {oracle}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn additivity(s1 in 0.05f64..0.9, frac in 0.05f64..0.95, k in 0.0f64..4.0) {
            let mu = m("bergman:alpha=0.5");
            let s2 = s1 + frac * (1.0 - s1);
            let g = |r: f64| r.powf(k) + 1.0;
            let a = mu.integrate_radial(g, s1).unwrap();
            let b = mu.integrate_radial(g, s2).unwrap();
            prop_assert!(b.value >= a.value);
            // the piece between s1 and s2 via breakpoint-split integration
            let mid = crate::quadrature::integrate_interval(
                |r: f64| g(r) * 2.0 * (1.0 - r * r).sqrt(), s1, s2, &[], &QuadOptions::default()
            ).unwrap();
            let gap = (b.value - a.value - mid.value).abs();
            prop_assert!(gap <= a.abs_error + b.abs_error + mid.error + 1e-13);
        }

        #[test]
        fn monotone_in_s(s1 in 0.0f64..6.0, ds in 0.0f64..3.0) {
            let mu = m("fock:p=1,alpha=0.5");
            let g = |r: f64| r.sin().abs();
            let a = mu.integrate_radial(g, s1).unwrap().value;
            let b = mu.integrate_radial(g, s1 + ds).unwrap().value;
            prop_assert!(b >= a - 1e-13);
        }
    }
}
