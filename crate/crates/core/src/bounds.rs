//! Bounds on the exceedance probability `P(X <= E X_{i:n})`.
//!
//! For `F` in a class generated by `G`, Jensen's inequality applied to the
//! convex or concave composition `F^{-1} o G` brackets the probability by
//! `p^G_{i:n} = G(E[G^{-1}(B_{i:n})])`. Concave classes (ID, IHR, IOR, ILOR)
//! give an upper bound, convex ones (DD, DHR, DOR, DLOR, DRHR, DROR) a lower
//! bound.

use serde::{Deserialize, Serialize};

use crate::conditions::ShapeClass;
use crate::orderstat::TransformedOrderStat;
use crate::refdist::{Moment, OrderStatSpec, ReferenceDistribution};
use crate::specfun::harmonic;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundDirection {
    UpperBound,
    LowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceBound {
    pub g: ReferenceDistribution,
    pub s: OrderStatSpec,
    pub p: f64,
    pub direction: BoundDirection,
}

impl ExceedanceBound {
    /// The bound implied by `shape`; star-ordered classes have none.
    pub fn for_class(shape: ShapeClass, s: OrderStatSpec) -> Result<Self> {
        let direction = shape.bound_direction().ok_or(Error::UnsupportedClass {
            class: shape.name(),
            operation: "exceedance bound",
        })?;
        let g = shape.reference();
        Ok(Self {
            g,
            s,
            p: p_value(g, s),
            direction,
        })
    }
}

/// `p^G_{i:n} = G(E[G^{-1}(B_{i:n})])`.
pub fn p_value(g: ReferenceDistribution, s: OrderStatSpec) -> f64 {
    use ReferenceDistribution::*;
    let (i, n) = (s.i(), s.n());
    let h = |lo, hi| harmonic(lo, hi).expect("valid range");
    match g {
        Uniform => i as f64 / (n as f64 + 1.0),
        Exponential => -(-h(n - i + 1, n)).exp_m1(),
        LogLogistic1 => i as f64 / n as f64,
        NegExponential => (-h(i, n)).exp(),
        Logistic | NegLogLogistic1 => match g.expected_transformed_orderstat(s) {
            Moment::Finite(m) => g.cdf_value(m),
            Moment::PosInfinity => 1.0,
            Moment::NegInfinity => 0.0,
        },
    }
}

/// Rounds to three decimals, ties to even.
pub fn round3(x: f64) -> f64 {
    (x * 1000.0).round_ties_even() / 1000.0
}

/// `p^G_{i:n}` for `i = 1..n`, one row per reference distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTable {
    pub n: u32,
    pub gs: Vec<ReferenceDistribution>,
    pub rows: Vec<Vec<f64>>,
}

impl BoundTable {
    /// Header `G,i=1,...,i=n`, then one row per `G` at three decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("G");
        for i in 1..=self.n {
            out.push_str(&format!(",i={i}"));
        }
        out.push('\n');
        for (g, row) in self.gs.iter().zip(&self.rows) {
            out.push_str(g.symbol());
            for &p in row {
                out.push_str(&format!(",{:.3}", round3(p)));
            }
            out.push('\n');
        }
        out
    }
}

pub fn bound_table(n: u32, gs: &[ReferenceDistribution]) -> Result<BoundTable> {
    if n == 0 {
        return Err(Error::InvalidSpec { i: 1, n });
    }
    let rows = gs
        .iter()
        .map(|&g| {
            (1..=n)
                .map(|i| p_value(g, OrderStatSpec::new(i, n).expect("i in 1..=n")))
                .collect()
        })
        .collect();
    Ok(BoundTable {
        n,
        gs: gs.to_vec(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInterval {
    pub lower_class: ShapeClass,
    pub upper_class: ShapeClass,
    pub s: OrderStatSpec,
    pub lo: f64,
    pub hi: f64,
}

/// `[p^{G_lower}, p^{G_upper}]` for a parent that is in both classes.
pub fn exceedance_interval(
    lower_shape: ShapeClass,
    upper_shape: ShapeClass,
    s: OrderStatSpec,
) -> Result<BoundInterval> {
    let lower = ExceedanceBound::for_class(lower_shape, s)?;
    let upper = ExceedanceBound::for_class(upper_shape, s)?;
    if lower.direction != BoundDirection::LowerBound {
        return Err(Error::InvalidArgument(format!(
            "{lower_shape} gives an upper bound, not a lower one"
        )));
    }
    if upper.direction != BoundDirection::UpperBound {
        return Err(Error::InvalidArgument(format!(
            "{upper_shape} gives a lower bound, not an upper one"
        )));
    }
    if lower.p > upper.p {
        return Err(Error::Infeasible {
            lower: lower_shape.name(),
            upper: upper_shape.name(),
            lo: lower.p,
            hi: upper.p,
        });
    }
    Ok(BoundInterval {
        lower_class: lower_shape,
        upper_class: upper_shape,
        s,
        lo: lower.p,
        hi: upper.p,
    })
}

/// `E X_{i:n}` for the LL1 parent against `i/(n-i)` and `F^{-1}(i/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ll1Check {
    pub s: OrderStatSpec,
    /// Quadrature value of `E[B/(1-B)]`.
    pub expectation: Moment,
    pub closed_form: Moment,
    pub quantile_at_i_over_n: f64,
}

impl Ll1Check {
    pub fn abs_error(&self) -> f64 {
        match (self.expectation, self.closed_form) {
            (Moment::Finite(a), Moment::Finite(b)) => (a - b).abs(),
            (a, b) if a == b => 0.0,
            _ => f64::INFINITY,
        }
    }
}

pub fn ll1_characterization_check(s: OrderStatSpec) -> Result<Ll1Check> {
    let (i, n) = (s.i(), s.n());
    let w = TransformedOrderStat::new(ReferenceDistribution::LogLogistic1, s);
    let expectation = w.mean_by_quadrature(1e-12)?;
    let (closed_form, quantile_at_i_over_n) = if i == n {
        (Moment::PosInfinity, f64::INFINITY)
    } else {
        let q = ReferenceDistribution::LogLogistic1.quantile(i as f64 / n as f64)?;
        (Moment::Finite(i as f64 / (n - i) as f64), q)
    };
    Ok(Ll1Check {
        s,
        expectation,
        closed_form,
        quantile_at_i_over_n,
    })
}

/// Generalized inverse of the ECDF of sorted `data`: the smallest
/// observation whose ECDF value reaches `p`.
pub fn ecdf_quantile(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyData);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain {
            what: "ecdf quantile",
            value: p,
        });
    }
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    let n = sorted.len();
    // k/n >= p with a small allowance for p computed as i/n in floating point
    let k = ((p - 1e-12) * n as f64).ceil().max(1.0) as usize;
    Ok(sorted[k.min(n) - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PluginInterval {
    pub bounds: BoundInterval,
    pub lo: f64,
    pub hi: f64,
}

/// ECDF plug-in interval `[F_n^{-1}(p_lo), F_n^{-1}(p_hi)]` for `E X_{i:n}`,
/// with `n` the sample size.
pub fn ecdf_plugin_interval(
    data: &[f64],
    s: OrderStatSpec,
    lower_shape: ShapeClass,
    upper_shape: ShapeClass,
) -> Result<PluginInterval> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    if let Some(&bad) = data.iter().find(|x| !x.is_finite()) {
        return Err(Error::Domain {
            what: "observation",
            value: bad,
        });
    }
    if s.n() as usize != data.len() {
        return Err(Error::InvalidArgument(format!(
            "order statistic {s} does not match the sample size {}",
            data.len()
        )));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let bounds = exceedance_interval(lower_shape, upper_shape, s)?;
    Ok(PluginInterval {
        bounds,
        lo: ecdf_quantile(&sorted, bounds.lo)?,
        hi: ecdf_quantile(&sorted, bounds.hi)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ReferenceDistribution::*;
    use ShapeClass::*;

    fn spec(i: u32, n: u32) -> OrderStatSpec {
        OrderStatSpec::new(i, n).unwrap()
    }

    #[test]
    fn p_value_examples() {
        assert!((p_value(LogLogistic1, spec(3, 10)) - 0.3).abs() < 1e-15);
        assert_eq!(round3(p_value(NegExponential, spec(1, 10))), 0.053);
        assert!((p_value(Uniform, spec(5, 10)) - 5.0 / 11.0).abs() < 1e-15);
        assert_eq!(p_value(LogLogistic1, spec(10, 10)), 1.0);
        assert_eq!(p_value(NegLogLogistic1, spec(1, 10)), 0.0);
        assert_eq!(p_value(Logistic, spec(3, 5)), 0.5);
    }

    #[test]
    fn closed_forms_match_composition() {
        for n in 1..=30 {
            for i in 1..=n {
                let s = spec(i, n);
                for g in [Uniform, Exponential, LogLogistic1, NegExponential] {
                    if let Moment::Finite(m) = g.expected_transformed_orderstat(s) {
                        let generic = g.cdf_value(m);
                        assert!((p_value(g, s) - generic).abs() < 1e-10, "{g} {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn one_row_table() {
        let t = bound_table(1, &[LogLogistic1, Exponential, Uniform, NegExponential]).unwrap();
        assert_eq!(t.to_csv(), "G,i=1\nLL,1.000\nE,0.632\nU,0.500\nE-,0.368\n");
    }

    #[test]
    fn table_rows_are_ordered() {
        for n in 1..=40 {
            let t = bound_table(n, &[LogLogistic1, Exponential, Uniform, NegExponential]).unwrap();
            for k in 0..n as usize {
                for r in 0..3 {
                    assert!(
                        t.rows[r][k] >= t.rows[r + 1][k] - 1e-12,
                        "n={n} i={}",
                        k + 1
                    );
                }
            }
        }
    }

    #[test]
    fn worked_intervals() {
        let iv = exceedance_interval(DD, IHR, spec(3, 10)).unwrap();
        assert_eq!((round3(iv.lo), round3(iv.hi)), (0.273, 0.285));
        let iv = exceedance_interval(DRHR, IOR, spec(3, 10)).unwrap();
        assert_eq!((round3(iv.lo), round3(iv.hi)), (0.240, 0.300));
    }

    #[test]
    fn interval_validation() {
        assert!(matches!(
            exceedance_interval(DOR, ID, spec(3, 10)),
            Err(Error::Infeasible {
                lower: "DOR",
                upper: "ID",
                ..
            })
        ));
        assert!(exceedance_interval(IHR, DD, spec(3, 10)).is_err());
        assert!(exceedance_interval(DDA, IHR, spec(3, 10)).is_err());
    }

    #[test]
    fn ihr_dd_interval_is_always_feasible() {
        for n in 1..=50 {
            for i in 1..=n {
                let iv = exceedance_interval(DD, IHR, spec(i, n)).unwrap();
                assert!(iv.lo <= iv.hi);
            }
        }
    }

    #[test]
    fn ll1_examples() {
        for (i, n, v) in [(2, 10, 0.25), (5, 10, 1.0), (9, 10, 9.0)] {
            let c = ll1_characterization_check(spec(i, n)).unwrap();
            assert!(c.abs_error() < 1e-8, "({i},{n}): {:?}", c.expectation);
            assert!((c.quantile_at_i_over_n - v).abs() < 1e-14 * v);
        }
        let c = ll1_characterization_check(spec(4, 4)).unwrap();
        assert_eq!(c.expectation, Moment::PosInfinity);
        assert_eq!(c.abs_error(), 0.0);
    }

    #[test]
    fn ecdf_examples() {
        let data: Vec<f64> = (1..=10).map(f64::from).collect();
        let iv = ecdf_plugin_interval(&data, spec(5, 10), DD, IHR).unwrap();
        assert_eq!((iv.lo, iv.hi), (5.0, 5.0));
        assert_eq!(round3(iv.bounds.hi), 0.476);

        let iv = ecdf_plugin_interval(&[2.5; 7], spec(3, 7), DRHR, IOR).unwrap();
        assert_eq!((iv.lo, iv.hi), (2.5, 2.5));

        assert!(matches!(ecdf_quantile(&[], 0.5), Err(Error::EmptyData)));
        assert_eq!(ecdf_quantile(&[1.0, 2.0], 0.0).unwrap(), 1.0);
        assert_eq!(ecdf_quantile(&[1.0, 2.0], 0.5).unwrap(), 1.0);
        assert_eq!(ecdf_quantile(&[1.0, 2.0], 0.5000001).unwrap(), 2.0);
        assert_eq!(ecdf_quantile(&[1.0, 2.0], 1.0).unwrap(), 2.0);
    }
}
