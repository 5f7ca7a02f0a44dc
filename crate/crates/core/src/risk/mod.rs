//! Risk mathematics for Gaussian-perturbed segment lengths.
//!
//! A segment of Euclidean length `c` has random length `L = c + C` with
//! `C ~ N(0, sigma^2)`. This module evaluates the alpha-level Value-at-Risk
//! and Conditional Value-at-Risk of `L` both in closed form and from samples,
//! sums segment CVaRs into the worst-case path length, and computes the
//! KL divergence and Markov-type exceedance bound used to certify a path
//! against a length threshold.

mod bound;
pub mod special;

pub use bound::{
    expectation_bound, kl_gaussian, markov_upper_bound, sigma_delta, GuaranteeInputs, MarkovBound,
    Z_99,
};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RiskError {
    #[error("confidence level alpha must lie in (0, 1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("standard deviation must be > 0, got {0}")]
    NonPositiveSigma(f64),
    #[error("segment cost must have c >= 0 and sigma >= 0, got c = {c}, sigma = {sigma}")]
    InvalidCost { c: f64, sigma: f64 },
    #[error("sample count n_c must be >= 2, got {0}")]
    TooFewSamples(usize),
    #[error("{0}")]
    InvalidGuarantee(String),
}

/// Random length of one edge: deterministic part `c` plus zero-mean noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentCost<T> {
    pub c: T,
    pub sigma: T,
}

impl<T: Real> SegmentCost<T> {
    pub fn new(c: T, sigma: T) -> Result<Self, RiskError> {
        let cost = SegmentCost { c, sigma };
        cost.validate()?;
        Ok(cost)
    }

    pub fn validate(&self) -> Result<(), RiskError> {
        let ok = self.c.is_finite()
            && self.sigma.is_finite()
            && self.c >= T::zero()
            && self.sigma >= T::zero();
        if ok {
            Ok(())
        } else {
            Err(RiskError::InvalidCost {
                c: self.c.as_f64(),
                sigma: self.sigma.as_f64(),
            })
        }
    }
}

/// Confidence level and per-segment sample budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskParams<T> {
    pub alpha: T,
    pub n_c: usize,
    pub rng_seed: u64,
}

impl<T: Real> RiskParams<T> {
    pub fn validate(&self) -> Result<(), RiskError> {
        check_alpha(self.alpha)?;
        if self.n_c < 2 {
            return Err(RiskError::TooFewSamples(self.n_c));
        }
        Ok(())
    }
}

fn check_alpha<T: Real>(alpha: T) -> Result<(), RiskError> {
    if alpha > T::zero() && alpha < T::one() {
        Ok(())
    } else {
        Err(RiskError::AlphaOutOfRange(alpha.as_f64()))
    }
}

/// Standard normal alpha-quantile, `sqrt(2) erf^-1(2 alpha - 1)`.
pub fn varsigma<T: Real>(alpha: T) -> Result<T, RiskError> {
    check_alpha(alpha)?;
    Ok(T::lit(special::varsigma_f64(alpha.as_f64())))
}

/// Closed-form `VaR_alpha(L) = c + varsigma(alpha) sigma`.
pub fn var_alpha<T: Real>(cost: &SegmentCost<T>, alpha: T) -> Result<T, RiskError> {
    Ok(cost.c + varsigma(alpha)? * cost.sigma)
}

/// Closed-form Gaussian tail mean `c + sigma phi(varsigma(alpha)) / (1 - alpha)`.
pub fn cvar_alpha<T: Real>(cost: &SegmentCost<T>, alpha: T) -> Result<T, RiskError> {
    let z = varsigma(alpha)?.as_f64();
    let tail = special::normal_pdf(z) / (1.0 - alpha.as_f64());
    Ok(cost.c + cost.sigma * T::lit(tail))
}

/// Sum of per-segment CVaRs: the worst-case length of a path.
pub fn worst_case_path_length<T: Real>(costs: &[SegmentCost<T>], alpha: T) -> Result<T, RiskError> {
    costs
        .iter()
        .try_fold(T::zero(), |acc, c| Ok(acc + cvar_alpha(c, alpha)?))
}

/// Sorted draws of one segment's random length.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCostSample<T> {
    values: Vec<T>,
}

impl<T: Real> EmpiricalCostSample<T> {
    pub fn from_values(mut values: Vec<T>) -> Self {
        values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        EmpiricalCostSample { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Draws `params.n_c` lengths `c + sigma Z`, sorted ascending.
pub fn sample_costs<T: Real, R: Rng + ?Sized>(
    cost: &SegmentCost<T>,
    params: &RiskParams<T>,
    rng: &mut R,
) -> EmpiricalCostSample<T> {
    let values = (0..params.n_c)
        .map(|_| cost.c + cost.sigma * T::standard_normal(rng))
        .collect();
    EmpiricalCostSample::from_values(values)
}

/// Empirical VaR: the `ceil(alpha n)`-th order statistic, i.e. the lowest
/// sample value whose empirical CDF reaches `alpha`.
pub fn var_empirical<T: Real>(sample: &EmpiricalCostSample<T>, alpha: T) -> T {
    let n = sample.len();
    assert!(n > 0, "empty cost sample");
    let scaled = alpha.as_f64() * n as f64;
    // Guard against alpha * n landing a hair above an integer.
    let k = (scaled - 1e-9 * n as f64).ceil().clamp(1.0, n as f64) as usize;
    sample.values[k - 1]
}

/// Empirical tail statistics of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalTail<T> {
    pub var: T,
    pub cvar: T,
    /// Number of draws at or above the empirical VaR.
    pub n_cvar: usize,
}

/// Mean of every draw at or above the empirical VaR.
pub fn cvar_empirical<T: Real>(sample: &EmpiricalCostSample<T>, alpha: T) -> EmpiricalTail<T> {
    let var = var_empirical(sample, alpha);
    let start = sample.values.partition_point(|v| *v < var);
    let tail = &sample.values[start..];
    if tail[0] == tail[tail.len() - 1] {
        // Constant tail: return it exactly rather than a rounded mean.
        return EmpiricalTail {
            var,
            cvar: var,
            n_cvar: tail.len(),
        };
    }
    let sum = tail.iter().fold(T::zero(), |a, &v| a + v);
    EmpiricalTail {
        var,
        cvar: sum / T::lit(tail.len() as f64),
        n_cvar: tail.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn cost(c: f64, s: f64) -> SegmentCost<f64> {
        SegmentCost::new(c, s).unwrap()
    }

    #[test]
    fn varsigma_values() {
        assert_eq!(varsigma(0.5).unwrap(), 0.0);
        // Bisection on erf to 1e-12, frozen.
        assert!((varsigma(0.9_f64).unwrap() - 1.281_551_565_544_601).abs() < 1e-10);
        assert!((varsigma(0.9_f64).unwrap() + varsigma(0.1).unwrap()).abs() < 1e-12);
        assert!(varsigma(1.0_f64).is_err());
        assert!(varsigma(0.0_f64).is_err());
        assert!(varsigma(f64::NAN).is_err());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(var_alpha(&cost(1.0, 0.0), 0.9).unwrap(), 1.0);
        assert_eq!(var_alpha(&cost(0.0, 1.0), 0.5).unwrap(), 0.0);
        assert!((var_alpha(&cost(2.0, 0.5), 0.9).unwrap() - 2.640_775_78).abs() < 1e-7);
        for a in [0.1, 0.5, 0.9] {
            assert_eq!(cvar_alpha(&cost(3.0, 0.0), a).unwrap(), 3.0);
        }
        assert!((cvar_alpha(&cost(0.0, 1.0), 0.5).unwrap() - 0.797_884_560_8).abs() < 1e-9);
        assert!(cvar_alpha(&cost(1.0, 1.0), 1.0).is_err());
    }

    #[test]
    fn worst_case_sums_segment_cvars() {
        let two = [cost(1.0, 1.0), cost(1.0, 1.0)];
        assert!((worst_case_path_length(&two, 0.5).unwrap() - 3.595_769_12).abs() < 1e-7);
        let plain = [cost(1.0, 0.0), cost(2.5, 0.0), cost(0.25, 0.0)];
        assert_eq!(worst_case_path_length(&plain, 0.9).unwrap(), 3.75);
        let one = [cost(2.0, 0.5)];
        assert_eq!(
            worst_case_path_length(&one, 0.9).unwrap(),
            cvar_alpha(&one[0], 0.9).unwrap()
        );
    }

    #[test]
    fn empirical_order_statistics() {
        let s = EmpiricalCostSample::from_values(vec![4.0, 1.0, 3.0, 2.0]);
        assert_eq!(s.values(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(var_empirical(&s, 0.5), 2.0);
        assert_eq!(var_empirical(&s, 0.9), 4.0);
        let t = cvar_empirical(&s, 0.5);
        assert_eq!(t.cvar, 3.0);
        assert_eq!(t.n_cvar, 3);
        // alpha * n = 7.000000000000001 must still pick the 7th statistic.
        let ten = EmpiricalCostSample::from_values((1..=10).map(f64::from).collect());
        assert_eq!(var_empirical(&ten, 0.7), 7.0);
    }

    #[test]
    fn zero_noise_sample_is_degenerate() {
        let params = RiskParams {
            alpha: 0.9,
            n_c: 50,
            rng_seed: 1,
        };
        let s = sample_costs(&cost(1.25, 0.0), &params, &mut stream(1, &[]));
        assert!(s.values().iter().all(|&v| v == 1.25));
        assert_eq!(cvar_empirical(&s, 0.9).cvar, 1.25);
    }

    #[test]
    fn sampling_is_deterministic_and_centered() {
        let params = RiskParams {
            alpha: 0.5,
            n_c: 100_000,
            rng_seed: 3,
        };
        let c = cost(2.0, 0.5);
        let a = sample_costs(&c, &params, &mut stream(3, &[9]));
        let b = sample_costs(&c, &params, &mut stream(3, &[9]));
        assert_eq!(a, b);
        let mean = a.values().iter().sum::<f64>() / a.len() as f64;
        assert!((mean - 2.0).abs() < 4.0 * 0.5 / (params.n_c as f64).sqrt());
    }

    #[test]
    fn empirical_converges_to_closed_form() {
        let params = RiskParams {
            alpha: 0.9,
            n_c: 100_000,
            rng_seed: 5,
        };
        let c = cost(2.0, 0.5);
        let s = sample_costs(&c, &params, &mut stream(5, &[]));
        assert!((var_empirical(&s, 0.9) - var_alpha(&c, 0.9).unwrap()).abs() < 5e-2);
        assert!((cvar_empirical(&s, 0.9).cvar - cvar_alpha(&c, 0.9).unwrap()).abs() < 1e-1);
    }

    #[test]
    fn params_validation() {
        assert!(RiskParams {
            alpha: 0.5,
            n_c: 2,
            rng_seed: 0
        }
        .validate()
        .is_ok());
        assert!(RiskParams {
            alpha: 0.5,
            n_c: 1,
            rng_seed: 0
        }
        .validate()
        .is_err());
        assert!(RiskParams {
            alpha: 1.0,
            n_c: 10,
            rng_seed: 0
        }
        .validate()
        .is_err());
        assert!(SegmentCost::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let c = SegmentCost::new(2.0_f32, 0.5).unwrap();
        let v = cvar_alpha(&c, 0.9_f32).unwrap();
        assert!((v - 2.877_49).abs() < 1e-4);
    }
}
