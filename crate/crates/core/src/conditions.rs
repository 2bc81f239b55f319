//! Closed-form sufficient conditions for the increasing concave (ICV) and
//! increasing convex (ICX) orders between `X_{i:n}` and `X_{j:m}`.
//!
//! A shape class is a pair (transform class `H`, reference `G`) with
//! `F^{-1} o G` in `H`. For the convex-ordered classes the comparison reduces
//! to a rank condition plus `E[G^{-1}(B_{i:n})] >= E[G^{-1}(B_{j:m})]`, which
//! each class spells out in closed form. The conditions are sufficient only,
//! so a violated condition yields [`VerdictStatus::Undetermined`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::BoundDirection;
use crate::refdist::{OrderStatSpec, ReferenceDistribution};
use crate::specfun::{digamma, harmonic};
use crate::{Error, Result};

/// Generator class of the transform order: `F^{-1} o G` belongs to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Convex,
    Concave,
    StarShaped,
    AntiStarShaped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ShapeClass {
    /// decreasing density (concave CDF)
    DD,
    /// increasing density (convex CDF)
    ID,
    /// decreasing density on average
    DDA,
    /// increasing hazard rate
    IHR,
    /// decreasing hazard rate
    DHR,
    /// decreasing hazard rate on average
    DHRA,
    /// decreasing reversed hazard rate
    DRHR,
    /// increasing odds rate
    IOR,
    /// decreasing odds rate
    DOR,
    /// increasing log-odds rate
    ILOR,
    /// decreasing log-odds rate
    DLOR,
    /// class generated by the negative LL1 distribution
    DROR,
}

impl ShapeClass {
    pub const ALL: [ShapeClass; 12] = [
        Self::DD,
        Self::ID,
        Self::DDA,
        Self::IHR,
        Self::DHR,
        Self::DHRA,
        Self::DRHR,
        Self::IOR,
        Self::DOR,
        Self::ILOR,
        Self::DLOR,
        Self::DROR,
    ];

    /// Classes handled by [`check_icv`].
    pub const ICV_CATALOG: [ShapeClass; 4] = [Self::ID, Self::IHR, Self::IOR, Self::ILOR];
    /// Classes handled by [`check_icx`].
    pub const ICX_CATALOG: [ShapeClass; 6] = [
        Self::DD,
        Self::DHR,
        Self::DOR,
        Self::DLOR,
        Self::DRHR,
        Self::DROR,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::DD => "DD",
            Self::ID => "ID",
            Self::DDA => "DDA",
            Self::IHR => "IHR",
            Self::DHR => "DHR",
            Self::DHRA => "DHRA",
            Self::DRHR => "DRHR",
            Self::IOR => "IOR",
            Self::DOR => "DOR",
            Self::ILOR => "ILOR",
            Self::DLOR => "DLOR",
            Self::DROR => "DROR",
        }
    }

    pub fn reference(&self) -> ReferenceDistribution {
        use ReferenceDistribution::*;
        match self {
            Self::DD | Self::ID | Self::DDA => Uniform,
            Self::IHR | Self::DHR | Self::DHRA => Exponential,
            Self::DRHR => NegExponential,
            Self::IOR | Self::DOR => LogLogistic1,
            Self::ILOR | Self::DLOR => Logistic,
            Self::DROR => NegLogLogistic1,
        }
    }

    pub fn transform(&self) -> Transform {
        match self {
            Self::ID | Self::IHR | Self::IOR | Self::ILOR => Transform::Concave,
            Self::DD | Self::DHR | Self::DOR | Self::DLOR | Self::DRHR | Self::DROR => {
                Transform::Convex
            }
            Self::DDA | Self::DHRA => Transform::StarShaped,
        }
    }

    /// Side of `P(X <= E X_{i:n})` bounded by `p^G_{i:n}`; `None` for the
    /// star-ordered classes.
    pub fn bound_direction(&self) -> Option<BoundDirection> {
        match self.transform() {
            Transform::Concave => Some(BoundDirection::UpperBound),
            Transform::Convex => Some(BoundDirection::LowerBound),
            Transform::StarShaped | Transform::AntiStarShaped => None,
        }
    }
}

impl fmt::Display for ShapeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        Self::ALL
            .into_iter()
            .find(|c| c.name() == up)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown shape class `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Icv,
    Icx,
    Ss,
    St,
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Icv => "icv",
            Self::Icx => "icx",
            Self::Ss => "ss",
            Self::St => "st",
        })
    }
}

impl FromStr for OrderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "icv" => Ok(Self::Icv),
            "icx" => Ok(Self::Icx),
            "ss" => Ok(Self::Ss),
            "st" => Ok(Self::St),
            _ => Err(Error::InvalidArgument(format!("unknown order `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictStatus {
    Holds,
    Undetermined,
}

/// Outcome of a sufficient-condition check for `X_{i:n} >= X_{j:m}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub order: OrderKind,
    pub status: VerdictStatus,
    pub class: ShapeClass,
    pub a: OrderStatSpec,
    pub b: OrderStatSpec,
    pub condition_name: String,
    pub lhs_witness: f64,
    pub rhs_witness: f64,
    pub rank_condition: bool,
}

impl OrderVerdict {
    pub fn holds(&self) -> bool {
        self.status == VerdictStatus::Holds
    }
}

/// Sign of `sum_{k in pos} 1/k - sum_{k in neg} 1/k` for integer ranges,
/// with shared terms cancelled exactly before summation.
fn harmonic_difference(pos: &[(u32, u32)], neg: &[(u32, u32)]) -> f64 {
    let mut coef: BTreeMap<u32, i64> = BTreeMap::new();
    for &(lo, hi) in pos {
        for k in lo..=hi {
            *coef.entry(k).or_default() += 1;
        }
    }
    for &(lo, hi) in neg {
        for k in lo..=hi {
            *coef.entry(k).or_default() -= 1;
        }
    }
    coef.iter()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(&k, &c)| c as f64 / k as f64)
        .sum()
}

/// Inclusive `lo..=hi` range of harmonic terms.
type Range = (u32, u32);

/// `psi(p) - psi(q)` for positive integers as signed harmonic ranges:
/// returns (positive ranges, negative ranges).
fn digamma_gap_ranges(p: u32, q: u32) -> (Vec<Range>, Vec<Range>) {
    use std::cmp::Ordering::*;
    match p.cmp(&q) {
        Greater => (vec![(q, p - 1)], vec![]),
        Less => (vec![], vec![(p, q - 1)]),
        Equal => (vec![], vec![]),
    }
}

fn log_odds_gap(s: OrderStatSpec) -> f64 {
    let (i, n) = (s.i(), s.n());
    digamma(i as f64).expect("positive") - digamma((n - i + 1) as f64).expect("positive")
}

fn upper_harmonic(s: OrderStatSpec) -> f64 {
    harmonic(s.n() - s.i() + 1, s.n()).expect("valid range")
}

struct Condition {
    name: &'static str,
    lhs: f64,
    rhs: f64,
    satisfied: bool,
}

/// The mean comparison shared by the ICV and ICX catalogs.
fn mean_condition(shape: ShapeClass, a: OrderStatSpec, b: OrderStatSpec) -> Result<Condition> {
    let (i, n, j, m) = (a.i() as u64, a.n() as u64, b.i() as u64, b.n() as u64);
    let cond = match shape {
        ShapeClass::ID | ShapeClass::DD => Condition {
            name: "i/(n+1) >= j/(m+1)",
            lhs: i as f64 / (n + 1) as f64,
            rhs: j as f64 / (m + 1) as f64,
            satisfied: i * (m + 1) >= j * (n + 1),
        },
        ShapeClass::IOR | ShapeClass::DOR => Condition {
            name: "i/n >= j/m",
            lhs: i as f64 / n as f64,
            rhs: j as f64 / m as f64,
            satisfied: i * m >= j * n,
        },
        ShapeClass::IHR | ShapeClass::DHR => {
            let diff =
                harmonic_difference(&[(a.n() - a.i() + 1, a.n())], &[(b.n() - b.i() + 1, b.n())]);
            Condition {
                name: "sum_{k=n-i+1}^{n} 1/k >= sum_{k=m-j+1}^{m} 1/k",
                lhs: upper_harmonic(a),
                rhs: upper_harmonic(b),
                satisfied: diff >= 0.0,
            }
        }
        ShapeClass::ILOR | ShapeClass::DLOR => {
            let (pa, na) = digamma_gap_ranges(a.i(), a.n() - a.i() + 1);
            let (pb, nb) = digamma_gap_ranges(b.i(), b.n() - b.i() + 1);
            let pos: Vec<_> = pa.into_iter().chain(nb).collect();
            let neg: Vec<_> = na.into_iter().chain(pb).collect();
            Condition {
                name: "psi(i)-psi(n-i+1) >= psi(j)-psi(m-j+1)",
                lhs: log_odds_gap(a),
                rhs: log_odds_gap(b),
                satisfied: harmonic_difference(&pos, &neg) >= 0.0,
            }
        }
        ShapeClass::DRHR => Condition {
            name: "sum_{k=i}^{n} 1/k <= sum_{k=j}^{m} 1/k",
            lhs: harmonic(a.i(), a.n())?,
            rhs: harmonic(b.i(), b.n())?,
            satisfied: harmonic_difference(&[(b.i(), b.n())], &[(a.i(), a.n())]) >= 0.0,
        },
        ShapeClass::DROR => {
            if i == 1 && j == 1 {
                return Err(Error::BoundaryCase(
                    "DROR with i = j = 1: both transformed means are -inf; use the oracle probes instead"
                        .into(),
                ));
            }
            let side = |r: u64, s: u64| {
                if r == 1 {
                    f64::INFINITY
                } else {
                    s as f64 / (r - 1) as f64
                }
            };
            Condition {
                name: "n/(i-1) <= m/(j-1)",
                lhs: side(i, n),
                rhs: side(j, m),
                // n/(i-1) <= m/(j-1) with i = 1 meaning +inf
                satisfied: i > 1 && (j == 1 || n * (j - 1) <= m * (i - 1)),
            }
        }
        ShapeClass::DDA | ShapeClass::DHRA => {
            return Err(Error::UnsupportedClass {
                class: shape.name(),
                operation: "convex-order conditions",
            })
        }
    };
    Ok(cond)
}

fn verdict(
    order: OrderKind,
    shape: ShapeClass,
    a: OrderStatSpec,
    b: OrderStatSpec,
    rank_ok: bool,
    cond: Condition,
) -> OrderVerdict {
    let status = if rank_ok && cond.satisfied {
        VerdictStatus::Holds
    } else {
        VerdictStatus::Undetermined
    };
    OrderVerdict {
        order,
        status,
        class: shape,
        a,
        b,
        condition_name: format!("{}: {}", shape.name(), cond.name),
        lhs_witness: cond.lhs,
        rhs_witness: cond.rhs,
        rank_condition: rank_ok,
    }
}

fn identical(order: OrderKind, shape: ShapeClass, a: OrderStatSpec) -> OrderVerdict {
    OrderVerdict {
        order,
        status: VerdictStatus::Holds,
        class: shape,
        a,
        b: a,
        condition_name: format!("{}: identical order statistics", shape.name()),
        lhs_witness: 0.0,
        rhs_witness: 0.0,
        rank_condition: true,
    }
}

/// Sufficient condition for `X_{i:n} >=_icv X_{j:m}` when `F` is ID, IHR,
/// IOR or ILOR: `i >= j` plus the class inequality.
pub fn check_icv(shape: ShapeClass, a: OrderStatSpec, b: OrderStatSpec) -> Result<OrderVerdict> {
    if !ShapeClass::ICV_CATALOG.contains(&shape) {
        return Err(Error::UnsupportedClass {
            class: shape.name(),
            operation: "check_icv",
        });
    }
    if a == b {
        return Ok(identical(OrderKind::Icv, shape, a));
    }
    let cond = mean_condition(shape, a, b)?;
    Ok(verdict(OrderKind::Icv, shape, a, b, a.i() >= b.i(), cond))
}

/// Sufficient condition for `X_{i:n} >=_icx X_{j:m}` when `F` is DD, DHR,
/// DOR, DLOR, DRHR or DROR: `i <= j` plus the class inequality.
pub fn check_icx(shape: ShapeClass, a: OrderStatSpec, b: OrderStatSpec) -> Result<OrderVerdict> {
    if !ShapeClass::ICX_CATALOG.contains(&shape) {
        return Err(Error::UnsupportedClass {
            class: shape.name(),
            operation: "check_icx",
        });
    }
    if a == b {
        return Ok(identical(OrderKind::Icx, shape, a));
    }
    let cond = mean_condition(shape, a, b)?;
    Ok(verdict(OrderKind::Icx, shape, a, b, a.i() <= b.i(), cond))
}

/// `E X_{i:n} >= mu` for ID, ILOR and IHR parents (`check_icv` against the
/// parent itself).
pub fn check_mean_dominated_by_orderstat(
    shape: ShapeClass,
    s: OrderStatSpec,
) -> Result<OrderVerdict> {
    if ![ShapeClass::ID, ShapeClass::ILOR, ShapeClass::IHR].contains(&shape) {
        return Err(Error::UnsupportedClass {
            class: shape.name(),
            operation: "check_mean_dominated_by_orderstat",
        });
    }
    check_icv(shape, s, OrderStatSpec::parent())
}

/// `E X_{j:m} <= mu` for DD, DLOR, DHR and DRHR parents (`check_icx` with the
/// parent on the left).
pub fn check_mean_dominates_orderstat(shape: ShapeClass, s: OrderStatSpec) -> Result<OrderVerdict> {
    if ![
        ShapeClass::DD,
        ShapeClass::DLOR,
        ShapeClass::DHR,
        ShapeClass::DRHR,
    ]
    .contains(&shape)
    {
        return Err(Error::UnsupportedClass {
            class: shape.name(),
            operation: "check_mean_dominates_orderstat",
        });
    }
    check_icx(shape, OrderStatSpec::parent(), s)
}
