use num_complex::Complex64;

use super::{par_samples, MAX_CENSORING};
use crate::coeffs::CoefficientSequence;
use crate::error::{Error, Result};
use crate::gaf::sample_gaf;
use crate::poly::Polynomial;
use crate::zeros::inner_zero_multiset;

/// `F(0)` and the certified zero set `Z_s(F)` of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSample {
    pub index: u64,
    pub f0: Complex64,
    /// Zeros in `0 < |z| < s` repeated by multiplicity, `None` if censored.
    pub zeros: Option<Vec<Complex64>>,
}

/// Zero sets of `M` samples, computed once and shared by every check at the
/// same `(a, s, seed, M)`.
#[derive(Debug, Clone)]
pub struct SampleBank {
    pub coeff_spec: String,
    pub s: f64,
    pub seed: u64,
    pub samples: Vec<ZeroSample>,
}

impl SampleBank {
    pub fn build(a: &CoefficientSequence, s: f64, m: usize, seed: u64) -> Result<Self> {
        let samples = par_samples(m, |i| -> Result<ZeroSample> {
            let f = sample_gaf(a, s, seed, i)?;
            let zeros = certified_zeros(&f.polynomial(), s);
            Ok(ZeroSample { index: i, f0: f.value_at_origin(), zeros })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let bank = Self { coeff_spec: a.to_string(), s, seed, samples };
        check_censoring(bank.censored(), m)?;
        Ok(bank)
    }

    pub fn censored(&self) -> usize {
        self.samples.iter().filter(|x| x.zeros.is_none()).count()
    }

    pub fn certified(&self) -> impl Iterator<Item = (Complex64, &[Complex64])> + '_ {
        self.samples
            .iter()
            .filter_map(|x| x.zeros.as_deref().map(|z| (x.f0, z)))
    }
}

/// `Z_s(f)` if the argument-principle count certifies it.
pub(crate) fn certified_zeros(f: &Polynomial, s: f64) -> Option<Vec<Complex64>> {
    match inner_zero_multiset(f, s) {
        Ok(w) if w.certified => Some(w.expanded()),
        _ => None,
    }
}

pub(crate) fn check_censoring(censored: usize, m: usize) -> Result<()> {
    let rate = censored as f64 / m.max(1) as f64;
    if rate > MAX_CENSORING {
        return Err(Error::Censoring { rate, limit: MAX_CENSORING });
    }
    Ok(())
}
