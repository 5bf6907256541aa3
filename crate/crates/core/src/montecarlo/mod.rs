//! Seeded Monte Carlo verifiers.
//!
//! Every sample `i` draws from its own stream `(seed, i)`, samples are mapped
//! in parallel and collected in index order, and sums are pairwise, so a
//! report depends only on `(seed, M)` and not on the worker count.

mod bank;
mod checks;
mod fernique;
mod fock_scan;

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::special::pairwise_sum;

pub use bank::{SampleBank, ZeroSample};
pub use checks::{
    noslepian_report, quant2_constant, quant3_reports, quant_report, quant_reports, run_gaussian_moment_checks,
    run_noslepian_check, run_noslepian_trend, run_quant2_check, run_quant3_check,
    run_quant_check, run_slepian_check, run_tonelli_check, s_grid, Witness,
};
pub use fernique::{run_fernique_tail, FerniqueConfig, FerniqueRun, QUANTILE_TARGET};
pub use fock_scan::{fock_s_grid, run_fock_membership_scan, FockFamily};

/// Multiple of the standard error allowed by every check.
pub const SE_SLACK: f64 = 3.0;
/// Largest tolerated fraction of uncertified samples.
pub const MAX_CENSORING: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Leq,
    Eq,
    Geq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Leq => "leq",
            Relation::Eq => "eq",
            Relation::Geq => "geq",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub estimate: f64,
    pub std_error: f64,
    pub bound: Option<f64>,
    pub relation: Relation,
    pub pass: bool,
    pub samples: usize,
    pub censored: usize,
    pub seed: u64,
    pub runtime_ms: u64,
}

/// `estimate relation bound` with `SE_SLACK · std_error` of room.
pub fn passes(estimate: f64, std_error: f64, bound: f64, relation: Relation) -> bool {
    let slack = SE_SLACK * std_error;
    match relation {
        Relation::Leq => estimate <= bound + slack,
        Relation::Geq => estimate >= bound - slack,
        Relation::Eq => (estimate - bound).abs() <= slack,
    }
}

impl McReport {
    pub fn new(name: impl Into<String>, seed: u64) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
            estimate: f64::NAN,
            std_error: 0.0,
            bound: None,
            relation: Relation::Leq,
            pass: false,
            samples: 0,
            censored: 0,
            seed,
            runtime_ms: 0,
        }
    }

    pub fn param(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Sets the statistic and bound, and computes `pass` from them.
    pub fn compare(mut self, stats: Stats, bound: f64, relation: Relation) -> Self {
        self.estimate = stats.mean;
        self.std_error = stats.std_error;
        self.samples = stats.count;
        self.bound = Some(bound);
        self.relation = relation;
        self.pass = passes(stats.mean, stats.std_error, bound, relation);
        self
    }

    /// Pass/fail from a qualitative verdict rather than a bound.
    pub fn verdict(mut self, estimate: f64, pass: bool) -> Self {
        self.estimate = estimate;
        self.pass = pass;
        self
    }

    pub fn censored(mut self, censored: usize) -> Self {
        self.censored = censored;
        self
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.runtime_ms = start.elapsed().as_millis() as u64;
        self
    }

    /// JSON value with `runtime_ms` removed, for reproducibility checks.
    pub fn deterministic_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("runtime_ms");
        }
        v
    }
}

/// Sample mean and its standard error `sd/√n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub std_error: f64,
    pub count: usize,
}

impl Stats {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: f64::NAN, std_error: f64::NAN, count: 0 };
        }
        let mean = pairwise_sum(values) / n as f64;
        if n == 1 {
            return Self { mean, std_error: 0.0, count: 1 };
        }
        let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
        let var = pairwise_sum(&sq) / (n - 1) as f64;
        Self { mean, std_error: (var / n as f64).sqrt(), count: n }
    }

    /// Exact value with no sampling error.
    pub fn exact(value: f64, count: usize) -> Self {
        Self { mean: value, std_error: 0.0, count }
    }
}

/// `f(i)` for `i in 0..m`, in parallel, returned in index order.
pub fn par_samples<T, F>(m: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..m as u64).into_par_iter().map(f).collect()
}
