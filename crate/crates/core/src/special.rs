//! Small numerical helpers shared across modules.

pub use statrs::function::gamma::{gamma, ln_gamma};

/// `ln(Σ exp(x_i))` without overflow. Returns `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Adds `b` to the log-domain accumulator `a`.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Pairwise summation. The result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `1 / Γ(x)`, which is zero at the poles `x ∈ {0, -1, -2, ...}`.
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// `ln(1/Γ(x))` with `-inf` at the poles. Only valid for `x > 0` or poles.
pub fn ln_recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        f64::NEG_INFINITY
    } else {
        -ln_gamma(x)
    }
}
