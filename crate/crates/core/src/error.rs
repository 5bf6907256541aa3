use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("cannot parse descriptor `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("parameter `{name}` = {value} is out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("radius {s} exceeds the measure support radius {r_mu}")]
    RadiusBeyondSupport { s: f64, r_mu: f64 },

    #[error("radius {r} is not inside the convergence radius {radius} of the coefficient sequence")]
    OutsideConvergence { r: f64, radius: f64 },

    #[error("integrand is not finite at interior node r = {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("search for {what} did not terminate within {iterations} iterations")]
    SearchBudget { what: &'static str, iterations: usize },

    #[error("the zero polynomial has no well-defined {what}")]
    ZeroPolynomial { what: &'static str },

    #[error("root finder did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("a zero lies within {tolerance:e} of the circle |z| = {radius}")]
    RootNearCircle { radius: f64, tolerance: f64 },

    #[error("polynomial vanishes at the origin")]
    VanishesAtOrigin,

    #[error("zero containment fails: zero {zero} of F has no matching zero of f")]
    Containment { zero: String },

    #[error("censoring rate {rate:.4} exceeds the limit {limit}")]
    Censoring { rate: f64, limit: f64 },

    #[error("radial integral diverges: {context}")]
    Divergent { context: String },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
