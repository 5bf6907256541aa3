//! Coefficient sequences `aₙ ≥ 0` and the radial norms `‖a^(r)‖₂`.

mod checks;
mod flexible;

pub use checks::{
    horowitz_statistic, ln_horowitz_statistic, mm_dyadic_check, mm_corpus, stokes_ratio, MmCheck, MmSequence,
};
pub use flexible::{flexible_sequence, FlexibleBlock, FlexibleSequence};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::descriptor::{parse_f64, parse_params, split_kind};
use crate::error::{Error, Result};
use crate::measure::{IntegralResult, RadialMeasure};
use crate::quadrature::QuadOptions;
use crate::special::{ln_gamma, log_add};

/// Relative accuracy of series sums.
pub const SERIES_REL_TOL: f64 = 1e-16;
const MAX_TERMS: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CoeffKind {
    Basis,
    Unit,
    Geometric {
        rho: f64,
    },
    /// `aₙ² = αⁿ / Γ(n + b)`, `b = 2/p` unless overridden.
    Fock {
        p: f64,
        alpha: f64,
        b: f64,
    },
    /// `aₙ² = αⁿ / (Γ(n + b) (log n)^c)`, `log n` replaced by `log 2` for n < 2.
    FockLog {
        p: f64,
        alpha: f64,
        c: f64,
        b: f64,
    },
    /// `a_{2^k}² = 2^{2k(α+1)/p} k^{-2/p}` for k ≥ 1, zero elsewhere.
    Dyadic {
        alpha: f64,
        p: f64,
    },
    /// Sparse `(n, ln aₙ²)` blocks of a constructed sequence.
    Flexible {
        blocks: Vec<(f64, f64)>,
    },
    Explicit {
        values: Vec<f64>,
    },
}

/// A coefficient sequence with an index shift: the effective coefficients
/// are `a'_n = a_{n - shift}` (zero for `n < shift`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSequence {
    pub kind: CoeffKind,
    pub shift: i64,
}

impl CoefficientSequence {
    pub fn new(kind: CoeffKind) -> Result<Self> {
        match &kind {
            CoeffKind::Geometric { rho } if !(*rho > 0.0) => {
                return Err(Error::OutOfRange {
                    name: "rho",
                    value: *rho,
                    expected: "rho > 0",
                })
            }
            CoeffKind::Fock { p, alpha, b } | CoeffKind::FockLog { p, alpha, b, .. }
                if !(*p > 0.0 && *alpha > 0.0 && *b > 0.0) =>
            {
                return Err(Error::OutOfRange {
                    name: "p, alpha",
                    value: p.min(*alpha),
                    expected: "p > 0, alpha > 0 and a positive gamma offset",
                })
            }
            CoeffKind::Dyadic { p, .. } if !(*p > 0.0) => {
                return Err(Error::OutOfRange {
                    name: "p",
                    value: *p,
                    expected: "p > 0",
                })
            }
            CoeffKind::Explicit { values } => {
                if values.is_empty() {
                    return Err(Error::Empty("explicit coefficient list"));
                }
                if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
                    return Err(Error::OutOfRange {
                        name: "coefficient",
                        value: *v,
                        expected: "finite and nonnegative",
                    });
                }
            }
            _ => {}
        }
        Ok(Self { kind, shift: 0 })
    }

    pub fn basis() -> Self {
        Self {
            kind: CoeffKind::Basis,
            shift: 0,
        }
    }

    pub fn unit() -> Self {
        Self {
            kind: CoeffKind::Unit,
            shift: 0,
        }
    }

    pub fn with_shift(mut self, shift: i64) -> Self {
        self.shift = shift;
        self
    }

    /// Index of the first nonzero unshifted coefficient.
    fn first_nonzero(&self) -> Option<f64> {
        self.base_terms().next().map(|(n, _)| n)
    }

    /// The same sequence shifted so that `a_0 ≠ 0`.
    pub fn with_leading_zeros_removed(&self) -> Self {
        let first = self.first_nonzero().unwrap_or(0.0);
        Self {
            kind: self.kind.clone(),
            shift: -(first as i64),
        }
    }

    /// `ln aₙ²` of the unshifted sequence at (real-valued) index `n`.
    fn base_ln_sq(&self, n: f64) -> f64 {
        match &self.kind {
            CoeffKind::Basis => {
                if n == 0.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            CoeffKind::Unit => 0.0,
            CoeffKind::Geometric { rho } => 2.0 * n * rho.ln(),
            CoeffKind::Fock { alpha, b, .. } => n * alpha.ln() - ln_gamma(n + b),
            CoeffKind::FockLog { alpha, c, b, .. } => {
                let log_n = if n < 2.0 { std::f64::consts::LN_2 } else { n.ln() };
                n * alpha.ln() - ln_gamma(n + b) - c * log_n.ln()
            }
            CoeffKind::Dyadic { alpha, p } => {
                if n < 2.0 || n.log2().fract() != 0.0 {
                    return f64::NEG_INFINITY;
                }
                let k = n.log2();
                2.0 * k * (alpha + 1.0) / p * std::f64::consts::LN_2 - 2.0 / p * k.ln()
            }
            CoeffKind::Flexible { blocks } => blocks
                .iter()
                .find(|(m, _)| *m == n)
                .map(|(_, l)| *l)
                .unwrap_or(f64::NEG_INFINITY),
            CoeffKind::Explicit { values } => {
                let idx = n as usize;
                if n.fract() != 0.0 || idx >= values.len() || values[idx] == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    2.0 * values[idx].ln()
                }
            }
        }
    }

    /// Nonzero unshifted terms `(n, ln aₙ²)` in increasing `n`.
    fn base_terms(&self) -> Box<dyn Iterator<Item = (f64, f64)> + '_> {
        match &self.kind {
            CoeffKind::Basis => Box::new(std::iter::once((0.0, 0.0))),
            CoeffKind::Dyadic { .. } => {
                Box::new((1..1024).map(move |k| {
                    let n = 2f64.powi(k);
                    (n, self.base_ln_sq(n))
                }))
            }
            CoeffKind::Flexible { blocks } => Box::new(blocks.iter().copied()),
            CoeffKind::Explicit { values } => Box::new(
                values
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v > 0.0)
                    .map(|(i, v)| (i as f64, 2.0 * v.ln())),
            ),
            _ => Box::new((0..).map(move |n| {
                let n = n as f64;
                (n, self.base_ln_sq(n))
            })),
        }
    }

    /// Nonzero shifted terms `(n, ln aₙ²)` with `n ≥ 0`.
    pub fn terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let shift = self.shift as f64;
        self.base_terms()
            .map(move |(n, l)| (n + shift, l))
            .filter(|(n, _)| *n >= 0.0)
    }

    /// `ln aₙ²` (shift applied); `-∞` for a zero coefficient.
    pub fn ln_coeff_sq(&self, n: u64) -> f64 {
        let m = n as f64 - self.shift as f64;
        if m < 0.0 {
            f64::NEG_INFINITY
        } else {
            self.base_ln_sq(m)
        }
    }

    /// `aₙ`.
    pub fn coeff(&self, n: u64) -> f64 {
        (0.5 * self.ln_coeff_sq(n)).exp()
    }

    /// Radius of convergence `R = 1 / limsup aₙ^{1/n}`.
    pub fn radius(&self) -> f64 {
        match &self.kind {
            CoeffKind::Unit | CoeffKind::Dyadic { .. } => 1.0,
            CoeffKind::Geometric { rho } => 1.0 / rho,
            _ => f64::INFINITY,
        }
    }

    /// Closed forms for the unshifted series `ln Σ aₙ² r^{2n}`.
    fn closed_ln_series(&self, r: f64) -> Option<f64> {
        match &self.kind {
            CoeffKind::Basis => Some(0.0),
            CoeffKind::Unit => Some(-(-r * r).ln_1p()),
            CoeffKind::Geometric { rho } => Some(-(-(rho * rho) * r * r).ln_1p()),
            _ => None,
        }
    }

    /// `ln ‖a^(r)‖₂²`. Errors when `r` is not inside the radius of convergence.
    pub fn ln_norm_sq(&self, r: f64) -> Result<f64> {
        let radius = self.radius();
        if !(r >= 0.0) || r >= radius {
            return Err(Error::OutsideConvergence { r, radius });
        }
        if r == 0.0 {
            return Ok(self.ln_coeff_sq(0));
        }
        let ln_r = r.ln();
        if let Some(v) = self.closed_ln_series(r) {
            // exact for the shift-free part; shifting multiplies by r^{2·shift}
            // except where negative shifts drop leading terms
            let dropped = self.base_terms().take_while(|(n, _)| *n + (self.shift as f64) < 0.0);
            let mut total = v;
            for (n, l) in dropped {
                total = log_sub(total, l + 2.0 * n * ln_r);
            }
            return Ok(total + 2.0 * self.shift as f64 * ln_r);
        }
        let mut sum = f64::NEG_INFINITY;
        for_each_with_tail(self.terms(), ln_r, |_, t, tail| {
            sum = log_add(sum, t);
            tail.is_some_and(|tl| tl - sum <= SERIES_REL_TOL.ln())
        })?;
        Ok(sum)
    }

    /// `‖a^(r)‖₂ = (Σ aₙ² r^{2n})^{1/2}`.
    pub fn weighted_l2_norm(&self, r: f64) -> Result<f64> {
        Ok((0.5 * self.ln_norm_sq(r)?).exp())
    }

    /// Smallest `N` with `Σ_{n>N} aₙ² s^{2n} ≤ ε² Σ_n aₙ² s^{2n}`, using the
    /// geometric-ratio majorant for the tail.
    pub fn truncation_degree(&self, s: f64, eps: f64) -> Result<usize> {
        Ok(self.truncation(s, eps)?.degree)
    }

    /// Degree from [`Self::truncation_degree`] with the tail bound it certifies.
    pub fn truncation(&self, s: f64, eps: f64) -> Result<Truncation> {
        let total = self.ln_norm_sq(s)?;
        if s == 0.0 {
            return Ok(Truncation { degree: 0, ln_tail_sq: f64::NEG_INFINITY, ln_norm_sq: total });
        }
        let target = total + 2.0 * eps.ln();
        let mut degree = 0.0;
        let mut ln_tail_sq = total;
        for_each_with_tail(self.terms(), s.ln(), |n, _, tail| {
            degree = n;
            match tail {
                Some(tl) if tl <= target => {
                    ln_tail_sq = tl;
                    true
                }
                _ => false,
            }
        })?;
        Ok(Truncation { degree: degree as usize, ln_tail_sq, ln_norm_sq: total })
    }

    /// `(∫₀^s ‖a^(r)‖₂^p dμ)^{1/p}`, or a divergence verdict.
    pub fn lp_radial_norm(&self, mu: &RadialMeasure, p: f64, s: f64) -> Result<IntegralResult> {
        Ok(self.lp_radial_integral(mu, p, s, &QuadOptions::default())?.root(p))
    }

    /// `∫₀^s ‖a^(r)‖₂^p dμ` (no root).
    pub fn lp_radial_integral(
        &self,
        mu: &RadialMeasure,
        p: f64,
        s: f64,
        opts: &QuadOptions,
    ) -> Result<IntegralResult> {
        if s > self.radius() {
            return Ok(IntegralResult::divergent());
        }
        let ln_g = |r: f64| match self.ln_norm_sq(r) {
            Ok(v) => 0.5 * p * v,
            Err(_) => f64::INFINITY,
        };
        mu.integrate_ln_with(&ln_g, s, &[], opts)
    }
}

/// `ln(e^a - e^b)` for `a ≥ b`.
fn log_sub(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    a + (-(b - a).exp()).ln_1p()
}

/// Truncation degree `N` at a working radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub degree: usize,
    /// Upper bound on `ln Σ_{n>N} aₙ² s^{2n}`.
    pub ln_tail_sq: f64,
    pub ln_norm_sq: f64,
}

/// Walks `(n, ln aₙ² + 2n ln r)` and calls `visit(n, ln term, ln tail bound)`
/// until it returns `true` or the terms run out. The tail bound is `None`
/// while the terms are still increasing or the ratio is not yet decreasing.
fn for_each_with_tail<I, V>(terms: I, ln_r: f64, mut visit: V) -> Result<()>
where
    I: Iterator<Item = (f64, f64)>,
    V: FnMut(f64, f64, Option<f64>) -> bool,
{
    let mut it = terms.map(|(n, l)| (n, l + 2.0 * n * ln_r)).peekable();
    let mut prev_ratio = f64::INFINITY;
    let mut count = 0usize;
    while let Some((n, t)) = it.next() {
        count += 1;
        if count > MAX_TERMS {
            return Err(Error::SearchBudget {
                what: "series truncation",
                iterations: MAX_TERMS,
            });
        }
        let tail = match it.peek() {
            None => Some(f64::NEG_INFINITY),
            Some(&(_, t_next)) => {
                let ln_ratio = t_next - t;
                if ln_ratio < 0.0 && ln_ratio <= prev_ratio {
                    prev_ratio = ln_ratio;
                    // Σ_{k>n} t_k ≤ t_{n+1} / (1 - ratio) for nonincreasing ratios
                    Some(t_next - (-ln_ratio.exp()).ln_1p())
                } else {
                    prev_ratio = ln_ratio;
                    None
                }
            }
        };
        if t.is_nan() {
            return Err(Error::NonFiniteIntegrand { at: n });
        }
        if visit(n, t, tail) {
            return Ok(());
        }
    }
    Ok(())
}

impl FromStr for CoefficientSequence {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let input = input.trim();
        let (main, shift) = match input.split_once(';') {
            Some((main, rest)) => {
                let value = rest
                    .strip_prefix("shift=")
                    .ok_or_else(|| Error::parse(input, "expected `;shift=<int>`"))?;
                let shift: i64 = value
                    .parse()
                    .map_err(|_| Error::parse(input, "shift must be an integer"))?;
                if shift < 0 {
                    return Err(Error::parse(input, "shift must be nonnegative"));
                }
                (main, shift)
            }
            None => (input, 0),
        };
        let (kind, body) = split_kind(main);
        let kind = match kind {
            "basis" if body.is_empty() => CoeffKind::Basis,
            "unit" if body.is_empty() => CoeffKind::Unit,
            "geom" => {
                let v = parse_params(input, body, &["rho"], &[])?;
                CoeffKind::Geometric { rho: v[0].unwrap() }
            }
            "fock" => {
                let v = parse_params(input, body, &["p", "alpha"], &["b"])?;
                let p = v[0].unwrap();
                CoeffKind::Fock {
                    p,
                    alpha: v[1].unwrap(),
                    b: v[2].unwrap_or(2.0 / p),
                }
            }
            "focklog" => {
                let v = parse_params(input, body, &["p", "alpha", "c"], &["b"])?;
                let p = v[0].unwrap();
                CoeffKind::FockLog {
                    p,
                    alpha: v[1].unwrap(),
                    c: v[2].unwrap(),
                    b: v[3].unwrap_or(2.0 / p),
                }
            }
            "dyadic" => {
                let v = parse_params(input, body, &["alpha", "p"], &[])?;
                CoeffKind::Dyadic {
                    alpha: v[0].unwrap(),
                    p: v[1].unwrap(),
                }
            }
            "explicit" => {
                let values = body
                    .split(',')
                    .map(|t| parse_f64(input, t))
                    .collect::<Result<Vec<_>>>()?;
                CoeffKind::Explicit { values }
            }
            _ => return Err(Error::parse(input, "unknown coefficient kind")),
        };
        Ok(Self::new(kind)?.with_shift(shift))
    }
}

impl fmt::Display for CoefficientSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            CoeffKind::Basis => write!(f, "basis")?,
            CoeffKind::Unit => write!(f, "unit")?,
            CoeffKind::Geometric { rho } => write!(f, "geom:rho={rho}")?,
            CoeffKind::Fock { p, alpha, b } => {
                write!(f, "fock:p={p},alpha={alpha}")?;
                if *b != 2.0 / p {
                    write!(f, ",b={b}")?;
                }
            }
            CoeffKind::FockLog { p, alpha, c, b } => {
                write!(f, "focklog:p={p},alpha={alpha},c={c}")?;
                if *b != 2.0 / p {
                    write!(f, ",b={b}")?;
                }
            }
            CoeffKind::Dyadic { alpha, p } => write!(f, "dyadic:alpha={alpha},p={p}")?,
            CoeffKind::Flexible { blocks } => write!(f, "flexible:{}blocks", blocks.len())?,
            CoeffKind::Explicit { values } => {
                write!(f, "explicit:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
            }
        }
        if self.shift != 0 {
            write!(f, ";shift={}", self.shift)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
