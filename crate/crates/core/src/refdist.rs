//! Reference distributions `G` and the closed-form means `E[G^{-1}(B_{i:n})]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::specfun::{digamma, harmonic};
use crate::{Error, Result};

/// The rank/sample-size pair identifying `X_{i:n}` and `B_{i:n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(u32, u32)", into = "(u32, u32)")]
pub struct OrderStatSpec {
    i: u32,
    n: u32,
}

impl OrderStatSpec {
    pub fn new(i: u32, n: u32) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::InvalidSpec { i, n });
        }
        Ok(Self { i, n })
    }

    /// The degenerate spec `(1, 1)`, i.e. the parent itself.
    pub fn parent() -> Self {
        Self { i: 1, n: 1 }
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Shape parameters `(i, n - i + 1)` of `B_{i:n}`.
    pub fn beta_params(&self) -> (f64, f64) {
        (self.i as f64, (self.n - self.i + 1) as f64)
    }
}

impl TryFrom<(u32, u32)> for OrderStatSpec {
    type Error = Error;
    fn try_from((i, n): (u32, u32)) -> Result<Self> {
        Self::new(i, n)
    }
}

impl From<OrderStatSpec> for (u32, u32) {
    fn from(s: OrderStatSpec) -> Self {
        (s.i, s.n)
    }
}

impl fmt::Display for OrderStatSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.i, self.n)
    }
}

impl FromStr for OrderStatSpec {
    type Err = Error;

    /// Parses `"i,n"`.
    fn from_str(s: &str) -> Result<Self> {
        let (i, n) = s
            .split_once(',')
            .ok_or_else(|| Error::InvalidArgument(format!("expected `i,n`, got `{s}`")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidArgument(format!("not a positive integer: `{t}`")))
        };
        Self::new(parse(i)?, parse(n)?)
    }
}

/// A possibly divergent mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Moment {
    Finite(f64),
    PosInfinity,
    NegInfinity,
}

impl Moment {
    /// The value as an `f64`, using `±inf` for the divergent cases.
    pub fn value(&self) -> f64 {
        match *self {
            Moment::Finite(v) => v,
            Moment::PosInfinity => f64::INFINITY,
            Moment::NegInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Moment::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Moment::Finite(_))
    }
}

/// Which end of the support an out-of-support argument fell past.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportSide {
    Below,
    Above,
}

/// A CDF value together with the clamping flag for out-of-support inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfEval {
    pub value: f64,
    pub clamped: Option<SupportSide>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReferenceDistribution {
    /// `U(x) = x` on `[0, 1]`
    Uniform,
    /// `E(x) = 1 - e^{-x}` on `[0, inf)`
    Exponential,
    /// `L(x) = 1/(1 + e^{-x})` on the real line
    Logistic,
    /// `LL(x) = x/(1 + x)` on `[0, inf)`
    LogLogistic1,
    /// `E_-(x) = e^{x}` on `(-inf, 0]`
    NegExponential,
    /// `LL_-(x) = 1/(1 - x)` on `(-inf, 0]`
    NegLogLogistic1,
}

impl ReferenceDistribution {
    pub const ALL: [ReferenceDistribution; 6] = [
        Self::Uniform,
        Self::Exponential,
        Self::Logistic,
        Self::LogLogistic1,
        Self::NegExponential,
        Self::NegLogLogistic1,
    ];

    /// Short symbol used in tables and on the command line.
    pub fn symbol(&self) -> &'static str {
        match self {
            Self::Uniform => "U",
            Self::Exponential => "E",
            Self::Logistic => "L",
            Self::LogLogistic1 => "LL",
            Self::NegExponential => "E-",
            Self::NegLogLogistic1 => "LL-",
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Uniform => (0.0, 1.0),
            Self::Exponential | Self::LogLogistic1 => (0.0, f64::INFINITY),
            Self::Logistic => (f64::NEG_INFINITY, f64::INFINITY),
            Self::NegExponential | Self::NegLogLogistic1 => (f64::NEG_INFINITY, 0.0),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.support().0 >= 0.0
    }

    /// CDF with an explicit flag when `x` lies outside the support.
    pub fn cdf(&self, x: f64) -> CdfEval {
        let (lo, hi) = self.support();
        if x < lo {
            return CdfEval {
                value: 0.0,
                clamped: Some(SupportSide::Below),
            };
        }
        if x > hi {
            return CdfEval {
                value: 1.0,
                clamped: Some(SupportSide::Above),
            };
        }
        CdfEval {
            value: self.cdf_in_support(x),
            clamped: None,
        }
    }

    /// CDF value, with `±inf` mapped to 1 and 0 (used when composing with a
    /// divergent mean).
    pub fn cdf_value(&self, x: f64) -> f64 {
        self.cdf(x).value
    }

    fn cdf_in_support(&self, x: f64) -> f64 {
        match self {
            Self::Uniform => x,
            Self::Exponential => -(-x).exp_m1(),
            Self::Logistic => 1.0 / (1.0 + (-x).exp()),
            Self::LogLogistic1 => x / (1.0 + x),
            Self::NegExponential => x.exp(),
            Self::NegLogLogistic1 => 1.0 / (1.0 - x),
        }
    }

    /// `ln G(x)` for `x` inside the support.
    pub fn ln_cdf(&self, x: f64) -> f64 {
        match self {
            Self::Uniform => x.ln(),
            Self::Exponential => (-(-x).exp_m1()).ln(),
            Self::Logistic => -(-x).exp().ln_1p(),
            Self::LogLogistic1 => x.ln() - x.ln_1p(),
            Self::NegExponential => x,
            Self::NegLogLogistic1 => -(-x).ln_1p(),
        }
    }

    /// `ln(1 - G(x))` for `x` inside the support.
    pub fn ln_sf(&self, x: f64) -> f64 {
        match self {
            Self::Uniform => (-x).ln_1p(),
            Self::Exponential => -x,
            Self::Logistic => -x.exp().ln_1p(),
            Self::LogLogistic1 => -x.ln_1p(),
            Self::NegExponential => (-x.exp_m1()).ln(),
            Self::NegLogLogistic1 => (-x).ln() - (-x).ln_1p(),
        }
    }

    /// Density `g(x)` inside the support.
    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Self::Uniform => 1.0,
            Self::Exponential => (-x).exp(),
            Self::Logistic => {
                let e = (-x.abs()).exp();
                e / ((1.0 + e) * (1.0 + e))
            }
            Self::LogLogistic1 => 1.0 / ((1.0 + x) * (1.0 + x)),
            Self::NegExponential => x.exp(),
            Self::NegLogLogistic1 => 1.0 / ((1.0 - x) * (1.0 - x)),
        }
    }

    /// `G^{-1}(p)` for `p` in the open unit interval.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain {
                what: "quantile",
                value: p,
            });
        }
        Ok(match self {
            Self::Uniform => p,
            Self::Exponential => -(-p).ln_1p(),
            Self::Logistic => p.ln() - (-p).ln_1p(),
            Self::LogLogistic1 => p / (1.0 - p),
            Self::NegExponential => p.ln(),
            Self::NegLogLogistic1 => -(1.0 - p) / p,
        })
    }

    /// `E[G^{-1}(B_{i:n})]` in closed form.
    ///
    /// `LogLogistic1` diverges at `i = n` and `NegLogLogistic1` at `i = 1`.
    pub fn expected_transformed_orderstat(&self, s: OrderStatSpec) -> Moment {
        let (i, n) = (s.i(), s.n());
        let (fi, fn_) = (i as f64, n as f64);
        // ranges below are nonempty because 1 <= i <= n
        let h = |lo: u32, hi: u32| harmonic(lo, hi).expect("valid harmonic range");
        match self {
            Self::Uniform => Moment::Finite(fi / (fn_ + 1.0)),
            Self::Exponential => Moment::Finite(h(n - i + 1, n)),
            Self::NegExponential => Moment::Finite(-h(i, n)),
            Self::Logistic => {
                let d =
                    digamma(fi).expect("positive") - digamma((n - i + 1) as f64).expect("positive");
                Moment::Finite(d)
            }
            Self::LogLogistic1 => {
                if i == n {
                    Moment::PosInfinity
                } else {
                    Moment::Finite(fi / (fn_ - fi))
                }
            }
            Self::NegLogLogistic1 => {
                if i == 1 {
                    Moment::NegInfinity
                } else {
                    Moment::Finite(-((n - i + 1) as f64) / (fi - 1.0))
                }
            }
        }
    }
}

impl fmt::Display for ReferenceDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for ReferenceDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Ok(match key.as_str() {
            "u" | "uniform" => Self::Uniform,
            "e" | "exp" | "exponential" => Self::Exponential,
            "l" | "logistic" => Self::Logistic,
            "ll" | "ll1" | "loglogistic" | "loglogistic1" => Self::LogLogistic1,
            "e-" | "negexp" | "negexponential" => Self::NegExponential,
            "ll-" | "negll" | "negll1" | "negloglogistic1" => Self::NegLogLogistic1,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown reference distribution `{s}`"
                )))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use ReferenceDistribution::*;

    fn spec(i: u32, n: u32) -> OrderStatSpec {
        OrderStatSpec::new(i, n).unwrap()
    }

    #[test]
    fn spec_validation_and_parsing() {
        assert!(OrderStatSpec::new(0, 3).is_err());
        assert!(OrderStatSpec::new(4, 3).is_err());
        assert_eq!("3, 10".parse::<OrderStatSpec>().unwrap(), spec(3, 10));
        assert!("3;10".parse::<OrderStatSpec>().is_err());
        assert!("11,10".parse::<OrderStatSpec>().is_err());
        assert_eq!(spec(3, 10).to_string(), "3,10");
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(LogLogistic1.cdf(1.0).value, 0.5);
        assert_eq!(Exponential.cdf(0.0).value, 0.0);
        assert!((NegExponential.cdf(-(2.0f64).ln()).value - 0.5).abs() < 1e-16);
    }

    #[test]
    fn cdf_flags_out_of_support() {
        let c = Uniform.cdf(1.5);
        assert_eq!(c.value, 1.0);
        assert_eq!(c.clamped, Some(SupportSide::Above));
        let c = Exponential.cdf(-0.1);
        assert_eq!(c.value, 0.0);
        assert_eq!(c.clamped, Some(SupportSide::Below));
        assert_eq!(NegLogLogistic1.cdf(0.2).clamped, Some(SupportSide::Above));
        assert_eq!(Logistic.cdf(-40.0).clamped, None);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(Uniform.quantile(0.3).unwrap(), 0.3);
        let p = 1.0 - (-1.0f64).exp();
        assert!((Exponential.quantile(p).unwrap() - 1.0).abs() < 1e-15);
        assert!((LogLogistic1.quantile(0.75).unwrap() - 3.0).abs() < 1e-15);
        assert!(Uniform.quantile(0.0).is_err());
        assert!(Uniform.quantile(1.0).is_err());
    }

    #[test]
    fn transformed_mean_examples() {
        let m = Uniform
            .expected_transformed_orderstat(spec(3, 10))
            .finite()
            .unwrap();
        assert_eq!(format!("{m:.3}"), "0.273");
        assert_eq!(
            LogLogistic1.expected_transformed_orderstat(spec(2, 10)),
            Moment::Finite(0.25)
        );
        let e = Exponential
            .expected_transformed_orderstat(spec(3, 10))
            .finite()
            .unwrap();
        assert!((e - 0.336_111_111_111_111_1).abs() < 1e-15);
        assert_eq!(format!("{:.4}", 1.0 - (-e).exp()), "0.2855");
        assert_eq!(
            LogLogistic1.expected_transformed_orderstat(spec(10, 10)),
            Moment::PosInfinity
        );
        assert_eq!(
            NegLogLogistic1.expected_transformed_orderstat(spec(1, 10)),
            Moment::NegInfinity
        );
        // E[-(1-B)/B] with B ~ beta(3, 8): -8/2
        assert_eq!(
            NegLogLogistic1.expected_transformed_orderstat(spec(3, 10)),
            Moment::Finite(-4.0)
        );
    }

    #[test]
    fn transformed_mean_nondecreasing_in_rank() {
        for g in ReferenceDistribution::ALL {
            for n in 1..=30 {
                let vals: Vec<f64> = (1..=n)
                    .map(|i| g.expected_transformed_orderstat(spec(i, n)).value())
                    .collect();
                for w in vals.windows(2) {
                    assert!(w[1] >= w[0], "{g} n={n}: {w:?}");
                }
            }
        }
    }

    #[test]
    fn parse_symbols() {
        for g in ReferenceDistribution::ALL {
            assert_eq!(g.symbol().parse::<ReferenceDistribution>().unwrap(), g);
        }
    }

    proptest! {
        #[test]
        fn cdf_inverts_quantile(p in 1e-6f64..(1.0 - 1e-6)) {
            for g in ReferenceDistribution::ALL {
                let x = g.quantile(p).unwrap();
                let back = g.cdf(x);
                prop_assert!(back.clamped.is_none());
                prop_assert!((back.value - p).abs() <= 1e-12, "{} p={} back={}", g, p, back.value);
            }
        }

        #[test]
        fn log_cdf_and_sf_are_consistent(p in 1e-6f64..(1.0 - 1e-6)) {
            for g in ReferenceDistribution::ALL {
                let x = g.quantile(p).unwrap();
                prop_assert!((g.ln_cdf(x).exp() - p).abs() <= 1e-12);
                prop_assert!((g.ln_sf(x).exp() - (1.0 - p)).abs() <= 1e-12);
            }
        }
    }
}
