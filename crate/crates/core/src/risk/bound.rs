use serde::{Deserialize, Serialize};

use super::{check_alpha, RiskError};
use crate::scalar::Real;

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// `KL(N(mu1, sigma1^2) || N(mu2, sigma2^2))`.
pub fn kl_gaussian<T: Real>(mu1: T, sigma1: T, mu2: T, sigma2: T) -> Result<T, RiskError> {
    for s in [sigma1, sigma2] {
        if !(s > T::zero() && s.is_finite()) {
            return Err(RiskError::NonPositiveSigma(s.as_f64()));
        }
    }
    let half = T::lit(0.5);
    let dm = mu1 - mu2;
    Ok(
        (sigma2 / sigma1).ln() + (sigma1 * sigma1 + dm * dm) / (T::lit(2.0) * sigma2 * sigma2)
            - half,
    )
}

/// Standard deviation whose 99% two-sided interval is `+/- delta`.
pub fn sigma_delta<T: Real>(delta: T) -> Result<T, RiskError> {
    if !(delta > T::zero() && delta.is_finite()) {
        return Err(RiskError::InvalidGuarantee(format!(
            "delta must be > 0, got {delta}"
        )));
    }
    Ok(delta / T::lit(Z_99))
}

/// Inputs of the exceedance guarantee for an optimal worst-case path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeInputs<T> {
    /// Minimized sum of per-segment CVaRs.
    pub cvar_sum: T,
    pub l_max: T,
    pub delta: T,
    pub epsilon: T,
    pub alpha: T,
}

impl<T: Real> GuaranteeInputs<T> {
    pub fn validate(&self) -> Result<(), RiskError> {
        check_alpha(self.alpha)?;
        if !(self.l_max > T::zero() && self.l_max.is_finite()) {
            return Err(RiskError::InvalidGuarantee(format!(
                "L_max must be > 0, got {}",
                self.l_max
            )));
        }
        if !(self.delta > T::zero() && self.delta.is_finite()) {
            return Err(RiskError::InvalidGuarantee(format!(
                "delta must be > 0, got {}",
                self.delta
            )));
        }
        if !(self.epsilon >= T::zero() && self.epsilon.is_finite()) {
            return Err(RiskError::InvalidGuarantee(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        if !self.cvar_sum.is_finite() {
            return Err(RiskError::InvalidGuarantee(
                "CVaR sum must be finite".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovBound<T> {
    pub raw: T,
    /// `raw` clamped to `[0, 1]`.
    pub clamped: T,
}

impl<T: Real> MarkovBound<T> {
    /// A bound above one says nothing.
    pub fn is_vacuous(&self) -> bool {
        self.raw >= T::one()
    }
}

/// `P(L*_worst >= L_max) <= cvar_sum / L_max + epsilon / (alpha L_max)`.
pub fn markov_upper_bound<T: Real>(g: &GuaranteeInputs<T>) -> Result<MarkovBound<T>, RiskError> {
    g.validate()?;
    let raw = g.cvar_sum / g.l_max + g.epsilon / (g.alpha * g.l_max);
    Ok(MarkovBound {
        raw,
        clamped: raw.max(T::zero()).min(T::one()),
    })
}

/// `E[L*_worst] <= cvar_sum + epsilon / alpha`.
pub fn expectation_bound<T: Real>(g: &GuaranteeInputs<T>) -> Result<T, RiskError> {
    g.validate()?;
    Ok(g.cvar_sum + g.epsilon / g.alpha)
}
