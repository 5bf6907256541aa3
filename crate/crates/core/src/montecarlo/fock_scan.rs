use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{McReport, Relation};
use crate::coeffs::{CoeffKind, CoefficientSequence};
use crate::error::Result;
use crate::measure::RadialMeasure;
use crate::quadrature::QuadOptions;

/// `aₙ² = αⁿ / (Γ(n + b) (log n)^c)` with `b = 2/p` unless set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockFamily {
    pub p: f64,
    pub alpha: f64,
    pub b: Option<f64>,
    pub log_c: Option<f64>,
}

impl FockFamily {
    pub fn sequence(&self) -> Result<CoefficientSequence> {
        let b = self.b.unwrap_or(2.0 / self.p);
        let kind = match self.log_c {
            Some(c) => CoeffKind::FockLog { p: self.p, alpha: self.alpha, c, b },
            None => CoeffKind::Fock { p: self.p, alpha: self.alpha, b },
        };
        CoefficientSequence::new(kind)
    }

    /// Finite for `q > p`, and also at `q = p` with a log factor.
    pub fn expected_finite(&self, q: f64) -> bool {
        q > self.p || (q == self.p && self.log_c.is_some())
    }
}

/// `s_j = 2^{j/2}`, `j = 0..=16`.
pub fn fock_s_grid() -> Vec<f64> {
    (0..=16).map(|j| 2f64.powf(j as f64 / 2.0)).collect()
}

/// Verdict on `∫₀^∞ ‖a^(r)‖₂^q dμ_{fock(q,α)}` for each `q`, with the
/// partial integrals along [`fock_s_grid`] as evidence.
pub fn run_fock_membership_scan(family: &FockFamily, q_list: &[f64], seed: u64) -> Result<Vec<McReport>> {
    let a = family.sequence()?;
    let opts = QuadOptions::default();
    q_list
        .iter()
        .map(|&q| {
            let start = Instant::now();
            let mu = RadialMeasure::fock(q, family.alpha)?;
            let partials = fock_s_grid()
                .into_iter()
                .map(|s| a.lp_radial_integral(&mu, q, s, &opts).map(|v| v.value))
                .collect::<Result<Vec<_>>>()?;
            let total = a.lp_radial_integral(&mu, q, f64::INFINITY, &opts)?;
            let finite = !total.diverged;
            let expected = family.expected_finite(q);
            let growth = match partials.as_slice() {
                [.., x, y] => y / x,
                _ => f64::NAN,
            };
            let verdict = |f: bool| if f { "finite" } else { "divergent" };
            let mut report = McReport::new("fock_scan", seed)
                .param("coeffs", &a)
                .param("p", family.p)
                .param("alpha", family.alpha)
                .param("q", q)
                .param("verdict", verdict(finite))
                .param("expected", verdict(expected))
                .param("last_step_growth", format!("{growth:.6e}"))
                .param(
                    "partials",
                    partials.iter().map(|v| format!("{v:.6e}")).collect::<Vec<_>>().join(";"),
                )
                .verdict(total.value, finite == expected);
            report.relation = if expected { Relation::Leq } else { Relation::Geq };
            report.bound = Some(if expected { f64::MAX } else { f64::INFINITY });
            Ok(report.timed(start))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrected_family_matches_expectations() {
        let family = FockFamily { p: 2.0, alpha: 1.0, b: Some(2.0), log_c: None };
        let r = run_fock_membership_scan(&family, &[2.0, 4.0], 0).unwrap();
        assert!(r.iter().all(|x| x.pass), "{r:#?}");
        let log = FockFamily { log_c: Some(2.0), ..family };
        let r = run_fock_membership_scan(&log, &[2.0], 0).unwrap();
        assert!(r[0].pass, "{r:#?}");
    }

    #[test]
    fn literal_family_diverges_at_every_q() {
        // b = 2/p = 1: ‖a^(r)‖² = e^{αr²} exactly, so the integrand is ∝ r
        let family = FockFamily { p: 2.0, alpha: 1.0, b: None, log_c: None };
        let r = run_fock_membership_scan(&family, &[2.0, 4.0], 0).unwrap();
        assert!(r.iter().all(|x| x.params["verdict"] == "divergent"), "{r:#?}");
        assert!(r[0].pass && !r[1].pass);
    }
}
