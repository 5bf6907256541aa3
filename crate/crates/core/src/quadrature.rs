//! Gauss rules and panel integration with divergence detection.
//!
//! Two entry points are used by the rest of the crate:
//! [`integrate_interval`] for integrals over a bounded interval on which the
//! integrand is finite, and [`integrate_levels`] for integrals toward a
//! singular or infinite endpoint, which are split into a sequence of
//! geometrically shrinking (or growing) panels and tested for divergence.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

type RuleCache = Mutex<HashMap<(usize, u64, u64), Arc<Rule>>>;

fn cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Legendre rule with `n` nodes, computed by Newton iteration on the
/// three-term recurrence.
pub fn legendre(n: usize) -> Arc<Rule> {
    assert!(n >= 1, "a Gauss rule needs at least one node");
    let key = (n, u64::MAX, u64::MAX);
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return rule.clone();
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let rule = Arc::new(Rule { nodes, weights });
    cache().lock().unwrap().insert(key, rule.clone());
    rule
}

/// Gauss–Jacobi rule for the weight `(1 - x)^a (1 + x)^b` on `[-1, 1]`,
/// computed with the Golub–Welsch eigenvalue method.
pub fn jacobi(n: usize, a: f64, b: f64) -> Arc<Rule> {
    assert!(n >= 1 && a > -1.0 && b > -1.0);
    let key = (n, a.to_bits(), b.to_bits());
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return rule.clone();
    }
    let ab = a + b;
    let diag: Vec<f64> = (0..n)
        .map(|k| {
            let k = k as f64;
            if k == 0.0 {
                (b - a) / (ab + 2.0)
            } else {
                (b * b - a * a) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
            }
        })
        .collect();
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            let num = 4.0 * k * (k + a) * (k + b) * (k + ab);
            let t = 2.0 * k + ab;
            (num / (t * t * (t + 1.0) * (t - 1.0))).sqrt()
        })
        .collect();
    let jm = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            diag[r]
        } else if r == c + 1 {
            off[c]
        } else if c == r + 1 {
            off[r]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jm);
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    let rule = Arc::new(Rule { nodes, weights });
    cache().lock().unwrap().insert(key, rule.clone());
    rule
}

/// Node schedule for panel integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub initial_nodes: usize,
    /// Relative agreement required between two successive node counts.
    pub rel_tol: f64,
    /// Node count is doubled up to this limit; equal to `initial_nodes`
    /// means a single fixed-order pass.
    pub max_nodes: usize,
    /// Maximum number of levels toward a singular or infinite endpoint.
    pub max_levels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            initial_nodes: 256,
            rel_tol: 1e-10,
            max_nodes: 2048,
            max_levels: 48,
        }
    }
}

impl QuadOptions {
    /// Fixed 16-node panels, used inside Monte Carlo loops where the
    /// per-sample quadrature error only has to sit far below the sampling error.
    pub fn fast() -> Self {
        Self {
            initial_nodes: 16,
            rel_tol: 1e-8,
            max_nodes: 16,
            max_levels: 48,
        }
    }

    pub fn with_nodes(initial_nodes: usize, max_nodes: usize) -> Self {
        Self {
            initial_nodes,
            max_nodes,
            ..Self::default()
        }
    }
}

/// Value and error estimate for a single panel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelEstimate {
    pub value: f64,
    pub error: f64,
}

fn apply_rule<F: FnMut(f64) -> f64>(rule: &Rule, f: &mut F, a: f64, b: f64) -> Result<f64> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut acc = 0.0;
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let at = mid + half * x;
        let v = f(at);
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand { at });
        }
        acc += w * v;
    }
    Ok(acc * half)
}

/// Gauss–Legendre on `[a, b]`, doubling the node count until two successive
/// values agree to `rel_tol`.
pub fn integrate_panel<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<PanelEstimate> {
    if b <= a {
        return Ok(PanelEstimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let mut n = opts.initial_nodes.max(1);
    let mut prev = apply_rule(&legendre(n), &mut f, a, b)?;
    if opts.max_nodes <= n {
        return Ok(PanelEstimate {
            value: prev,
            error: 0.0,
        });
    }
    loop {
        n *= 2;
        let next = apply_rule(&legendre(n), &mut f, a, b)?;
        let diff = (next - prev).abs();
        if diff <= opts.rel_tol * next.abs() || diff == 0.0 || n * 2 > opts.max_nodes {
            return Ok(PanelEstimate {
                value: next,
                error: diff,
            });
        }
        prev = next;
    }
}

/// `∫_a^b (b - x)^alpha f(x) dx` with the endpoint weight absorbed into a
/// Gauss–Jacobi rule. Used for the last panel next to a weighted endpoint.
pub fn integrate_panel_right_weight<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    alpha: f64,
    nodes: usize,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let rule = jacobi(nodes.min(512), alpha, 0.0);
    // b - x = (b - a)(1 - t)/2
    let scale = (0.5 * (b - a)).powf(alpha);
    Ok(scale * apply_rule(&rule, &mut f, a, b)?)
}

/// Integral over `[a, b]` split at the given breakpoints.
pub fn integrate_interval<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<PanelEstimate> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| *x > a && *x < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));
    let mut lo = a;
    let mut total = PanelEstimate {
        value: 0.0,
        error: 0.0,
    };
    for hi in cuts.into_iter().chain(std::iter::once(b)) {
        let est = integrate_panel(&mut f, lo, hi, opts)?;
        total.value += est.value;
        total.error += est.error;
        lo = hi;
    }
    Ok(total)
}

/// One panel of a level sequence.
#[derive(Debug, Clone, Copy)]
pub struct Level {
    pub value: f64,
    pub error: f64,
    /// `false` for a truncated panel whose width breaks the geometric
    /// pattern; such panels are summed but excluded from the trend tests.
    pub regular: bool,
    /// `true` once no further panels follow.
    pub last: bool,
}

/// Outcome of a level-sequence integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelOutcome {
    pub value: f64,
    pub error: f64,
    pub diverged: bool,
    pub levels: usize,
}

/// Partial integrals beyond this magnitude count as divergence.
pub const DIVERGENCE_CEILING: f64 = 1e12;
/// Increment ratio at or above which decay is treated as sub-geometric.
const SLOW_RATIO: f64 = 0.95;
/// Power-law decay exponent at or below which the increments are not summable.
const POWER_LAW_LIMIT: f64 = 1.25;

/// Classifies a sequence of nonnegative level increments.
#[derive(Debug, Default, Clone)]
pub struct DivergenceMonitor {
    increments: Vec<f64>,
    partials: Vec<f64>,
}

/// Verdict after a new increment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trend {
    Undecided,
    /// Converged; the payload is the estimated remaining tail.
    Converged(f64),
    Diverged,
}

impl DivergenceMonitor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, increment: f64, partial: f64) {
        self.increments.push(increment);
        self.partials.push(partial);
    }

    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    fn power_law_exponent(&self) -> Option<f64> {
        let n = self.increments.len();
        if n < 2 {
            return None;
        }
        let (d0, d1) = (self.increments[n - 2], self.increments[n - 1]);
        if d0 <= 0.0 || d1 <= 0.0 {
            return None;
        }
        let j = n as f64;
        Some((d0 / d1).ln() / (j / (j - 1.0)).ln())
    }

    /// Trend test after the latest increment. `final_level` forces a decision.
    pub fn assess(&self, rel_tol: f64, final_level: bool) -> Trend {
        let n = self.increments.len();
        let partial = *self.partials.last().unwrap_or(&0.0);
        if partial.abs() > DIVERGENCE_CEILING || !partial.is_finite() {
            return Trend::Diverged;
        }
        if n >= 2 && self.increments[n - 1] == 0.0 && self.increments[n - 2] == 0.0 {
            return Trend::Converged(0.0);
        }
        if n < 3 {
            return if final_level {
                Trend::Converged(*self.increments.last().unwrap_or(&0.0))
            } else {
                Trend::Undecided
            };
        }
        let d = &self.increments;
        let (d2, d1, d0) = (d[n - 3], d[n - 2], d[n - 1]);
        if d0 <= 0.0 {
            // signed integrands: fall back to the size of the last increment
            let tail = d0.abs().max(d1.abs());
            return if tail <= rel_tol * partial.abs() || final_level {
                Trend::Converged(tail)
            } else {
                Trend::Undecided
            };
        }
        let r1 = if d1 > 0.0 { d0 / d1 } else { f64::INFINITY };
        let r2 = if d2 > 0.0 { d1 / d2 } else { f64::INFINITY };
        if n >= 8 && r1 >= 1.0 && r2 >= 1.0 && partial > 2.0 * self.partials[n - 4] {
            return Trend::Diverged;
        }
        if r1 >= SLOW_RATIO && r2 >= SLOW_RATIO {
            let kappa = self.power_law_exponent().unwrap_or(0.0);
            if (n >= 10 || final_level) && kappa <= POWER_LAW_LIMIT {
                return Trend::Diverged;
            }
            if final_level {
                let j = n as f64;
                return Trend::Converged(d0 * j / (kappa - 1.0));
            }
            return Trend::Undecided;
        }
        let rho = r1.max(r2);
        if rho < 1.0 {
            let tail = d0 * rho / (1.0 - rho);
            if tail <= rel_tol * partial.abs() || final_level {
                return Trend::Converged(tail);
            }
        } else if final_level {
            return Trend::Diverged;
        }
        Trend::Undecided
    }
}

/// Integrates a sequence of panels produced by `panel(j)`, j = 0, 1, ...
///
/// `closure(j)`, when given, estimates everything beyond panel `j`; two
/// successive closed estimates agreeing to `opts.rel_tol` end the sequence.
pub fn integrate_levels<P, C>(mut panel: P, mut closure: Option<C>, opts: &QuadOptions) -> Result<LevelOutcome>
where
    P: FnMut(usize) -> Result<Level>,
    C: FnMut(usize) -> Result<f64>,
{
    let mut monitor = DivergenceMonitor::new();
    let mut partial = 0.0;
    let mut error = 0.0;
    let mut prev_closed: Option<f64> = None;
    for j in 0..opts.max_levels {
        let level = panel(j)?;
        partial += level.value;
        error += level.error;
        let final_level = level.last || j + 1 == opts.max_levels;
        if level.regular {
            monitor.push(level.value, partial);
        }
        let trend = monitor.assess(opts.rel_tol, final_level);
        if trend == Trend::Diverged {
            return Ok(LevelOutcome {
                value: f64::INFINITY,
                error: f64::INFINITY,
                diverged: true,
                levels: j + 1,
            });
        }
        if level.last {
            let tail = match trend {
                Trend::Converged(t) => t,
                _ => 0.0,
            };
            // a truncated final panel means the domain itself ended here
            let tail = if level.regular { tail } else { 0.0 };
            return Ok(LevelOutcome {
                value: partial + tail,
                error: error + tail,
                diverged: false,
                levels: j + 1,
            });
        }
        if let Some(close) = closure.as_mut() {
            let closed = partial + close(j)?;
            if let (Some(prev), true) = (prev_closed, closed.is_finite()) {
                let diff = (closed - prev).abs();
                if diff <= opts.rel_tol * closed.abs() && monitor.len() >= 2 {
                    return Ok(LevelOutcome {
                        value: closed,
                        error: error + diff,
                        diverged: false,
                        levels: j + 1,
                    });
                }
            }
            prev_closed = Some(closed);
        }
        match trend {
            Trend::Converged(tail) => {
                return Ok(LevelOutcome {
                    value: partial + tail,
                    error: error + tail,
                    diverged: false,
                    levels: j + 1,
                })
            }
            Trend::Diverged => unreachable!(),
            Trend::Undecided => {}
        }
        if final_level {
            break;
        }
    }
    // unreachable in practice: the final level always decides
    Ok(LevelOutcome {
        value: partial,
        error,
        diverged: false,
        levels: opts.max_levels,
    })
}
