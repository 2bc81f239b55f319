//! Concrete parent distributions used to check the exceedance bounds.

use serde::{Deserialize, Serialize};

use crate::quad;
use crate::refdist::OrderStatSpec;
use crate::specfun::beta_pdf;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Parent {
    /// `F(x) = 1 - exp(-x^k)`
    Weibull { shape: f64 },
    /// `F(x) = x^k` on `[0, 1]`
    Power { exponent: f64 },
    /// `F(x) = 1 - (1 - x)^k` on `[0, 1]`
    InvertedPower { exponent: f64 },
}

impl Parent {
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Weibull { shape } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x.powf(shape)).exp_m1()
                }
            }
            Self::Power { exponent } => x.clamp(0.0, 1.0).powf(exponent),
            Self::InvertedPower { exponent } => 1.0 - (1.0 - x.clamp(0.0, 1.0)).powf(exponent),
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            Self::Weibull { shape } => (-(-u).ln_1p()).powf(1.0 / shape),
            Self::Power { exponent } => u.powf(1.0 / exponent),
            Self::InvertedPower { exponent } => 1.0 - (1.0 - u).powf(1.0 / exponent),
        }
    }

    /// `E X_{i:n} = int_0^1 F^{-1}(u) beta_pdf(u; i, n-i+1) du`.
    pub fn expected_orderstat(&self, s: OrderStatSpec) -> Result<f64> {
        let (a, b) = s.beta_params();
        let r = quad::integrate(
            |u| self.quantile(u) * beta_pdf(u, a, b).unwrap_or(0.0),
            0.0,
            1.0,
            1e-13,
        )?;
        if !r.value.is_finite() {
            return Err(Error::Quadrature("non-finite order statistic mean".into()));
        }
        Ok(r.value)
    }

    /// `P(X <= E X_{i:n})`.
    pub fn exceedance(&self, s: OrderStatSpec) -> Result<f64> {
        Ok(self.cdf(self.expected_orderstat(s)?))
    }
}
