//! Independent numerical checks of order relations between transformed
//! beta order statistics.
//!
//! Each probe evaluates a characterizing function of both variables on a
//! grid and records the worst margin `lhs - rhs`:
//!
//! | order | function of `W`           |
//! |-------|---------------------------|
//! | ST    | `P(W > t)`                |
//! | SS    | `E[W; W >= x]` (`x >= 0`) |
//! | ICX   | `E[(W - t)_+]`            |
//! | ICV   | `E[min(W, t)]`            |
//!
//! A probe can falsify a claimed relation but never prove one.

pub mod mc;
pub mod parent;

use serde::{Deserialize, Serialize};

use crate::conditions::OrderKind;
use crate::orderstat::TransformedOrderStat;
use crate::refdist::Moment;
use crate::{Error, Result};

/// Margins below `-TOL_PROBE` count as violations.
pub const TOL_PROBE: f64 = 1e-9;
/// Quadrature tolerance used for every probe evaluation.
pub const PROBE_QUAD_TOL: f64 = 1e-12;
pub const MIN_GRID: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeVerdict {
    ConsistentWithHolds,
    ViolationFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderProbe {
    pub order: OrderKind,
    pub x_grid: Vec<f64>,
    pub min_margin: f64,
    pub argmin: f64,
    pub verdict: ProbeVerdict,
}

impl OrderProbe {
    pub fn consistent(&self) -> bool {
        self.verdict == ProbeVerdict::ConsistentWithHolds
    }
}

/// `lhs - rhs` with infinite values ordered as extended reals; equal
/// infinities give 0.
pub fn moment_margin(lhs: Moment, rhs: Moment) -> f64 {
    match (lhs, rhs) {
        (Moment::Finite(a), Moment::Finite(b)) => a - b,
        (a, b) if a == b => 0.0,
        (Moment::PosInfinity, _) | (_, Moment::NegInfinity) => f64::INFINITY,
        _ => f64::NEG_INFINITY,
    }
}

/// Grid of quantiles of both variables at levels evenly spread over
/// `[1e-4, 1 - 1e-4]`, sorted and deduplicated.
fn pooled_grid(
    a: &TransformedOrderStat,
    b: &TransformedOrderStat,
    size: usize,
) -> Result<Vec<f64>> {
    let per = size.div_ceil(2).max(2);
    let mut grid = Vec::with_capacity(2 * per + 1);
    for w in [a, b] {
        for k in 0..per {
            let p = 1e-4 + (1.0 - 2e-4) * k as f64 / (per - 1) as f64;
            grid.push(w.quantile(p)?);
        }
    }
    grid.retain(|x| x.is_finite());
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

fn run_probe<F>(order: OrderKind, x_grid: Vec<f64>, eval: F) -> Result<OrderProbe>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut argmin, mut min_margin) = (f64::NAN, f64::INFINITY);
    for &x in &x_grid {
        let m = eval(x)?;
        if m < min_margin || argmin.is_nan() {
            min_margin = m;
            argmin = x;
        }
    }
    let verdict = if min_margin < -TOL_PROBE {
        ProbeVerdict::ViolationFound
    } else {
        ProbeVerdict::ConsistentWithHolds
    };
    Ok(OrderProbe {
        order,
        x_grid,
        min_margin,
        argmin,
        verdict,
    })
}

fn check_grid_size(grid_size: usize) -> Result<()> {
    if grid_size < MIN_GRID {
        return Err(Error::InvalidArgument(format!(
            "probe grid needs at least {MIN_GRID} points, got {grid_size}"
        )));
    }
    Ok(())
}

/// `a >=_ss b` via `int_x^inf t dF_a >= int_x^inf t dF_b` on a grid that
/// includes `x = 0`.
pub fn probe_ss(
    a: &TransformedOrderStat,
    b: &TransformedOrderStat,
    grid_size: usize,
) -> Result<OrderProbe> {
    check_grid_size(grid_size)?;
    if !(a.g.is_nonnegative() && b.g.is_nonnegative()) {
        return Err(Error::InvalidArgument(
            "the star-shaped probe needs nonnegative reference distributions".into(),
        ));
    }
    let mut grid = pooled_grid(a, b, grid_size)?;
    grid.insert(0, 0.0);
    grid.dedup();
    run_probe(OrderKind::Ss, grid, |x| {
        Ok(moment_margin(
            a.upper_partial_mean_tol(x, PROBE_QUAD_TOL)?,
            b.upper_partial_mean_tol(x, PROBE_QUAD_TOL)?,
        ))
    })
}

/// `a >=_icx b` via the stop-loss transforms.
pub fn probe_icx(
    a: &TransformedOrderStat,
    b: &TransformedOrderStat,
    grid_size: usize,
) -> Result<OrderProbe> {
    check_grid_size(grid_size)?;
    let grid = pooled_grid(a, b, grid_size)?;
    run_probe(OrderKind::Icx, grid, |t| {
        Ok(moment_margin(
            a.stop_loss(t, PROBE_QUAD_TOL)?,
            b.stop_loss(t, PROBE_QUAD_TOL)?,
        ))
    })
}

/// `a >=_icv b` via `E[min(W, t)]`.
pub fn probe_icv(
    a: &TransformedOrderStat,
    b: &TransformedOrderStat,
    grid_size: usize,
) -> Result<OrderProbe> {
    check_grid_size(grid_size)?;
    let grid = pooled_grid(a, b, grid_size)?;
    run_probe(OrderKind::Icv, grid, |t| {
        Ok(moment_margin(
            a.expected_min(t, PROBE_QUAD_TOL)?,
            b.expected_min(t, PROBE_QUAD_TOL)?,
        ))
    })
}

/// `a >=_st b` via the survival functions.
pub fn probe_st(
    a: &TransformedOrderStat,
    b: &TransformedOrderStat,
    grid_size: usize,
) -> Result<OrderProbe> {
    check_grid_size(grid_size)?;
    let grid = pooled_grid(a, b, grid_size)?;
    run_probe(OrderKind::St, grid, |t| Ok(a.sf(t)? - b.sf(t)?))
}

pub fn probe(
    order: OrderKind,
    a: &TransformedOrderStat,
    b: &TransformedOrderStat,
    grid_size: usize,
) -> Result<OrderProbe> {
    match order {
        OrderKind::St => probe_st(a, b, grid_size),
        OrderKind::Ss => probe_ss(a, b, grid_size),
        OrderKind::Icx => probe_icx(a, b, grid_size),
        OrderKind::Icv => probe_icv(a, b, grid_size),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refdist::{OrderStatSpec, ReferenceDistribution::*};

    fn w(g: crate::ReferenceDistribution, i: u32, n: u32) -> TransformedOrderStat {
        TransformedOrderStat::new(g, OrderStatSpec::new(i, n).unwrap())
    }

    #[test]
    fn identical_pairs_have_zero_margin() {
        for g in [Uniform, Exponential, LogLogistic1] {
            let a = w(g, 3, 5);
            for order in [OrderKind::St, OrderKind::Ss, OrderKind::Icx, OrderKind::Icv] {
                let p = probe(order, &a, &a, 60).unwrap();
                assert_eq!(p.min_margin, 0.0, "{g} {order}");
                assert!(p.consistent());
            }
        }
    }

    #[test]
    fn ss_examples() {
        let p = probe_ss(&w(Uniform, 2, 3), &w(Uniform, 1, 3), 80).unwrap();
        assert!(p.consistent());
        let p = probe_ss(&w(Uniform, 2, 3), &w(Uniform, 3, 4), 80).unwrap();
        assert_eq!(p.verdict, ProbeVerdict::ViolationFound);
        // Z(0) = -0.1 and Z dips further, to -0.14375 at x = 1/2
        assert!(p.min_margin <= -0.1);
        assert!((p.min_margin + 0.14375).abs() < 1e-4);
        assert!(probe_ss(&w(Logistic, 1, 2), &w(Logistic, 1, 2), 60).is_err());
    }

    #[test]
    fn icx_icv_examples() {
        assert!(probe_icx(&w(Uniform, 2, 5), &w(Uniform, 3, 8), 60)
            .unwrap()
            .consistent());
        // E X_{1:5} = 0.2 against E X_{1:1} = 1
        let p = probe_icx(&w(Exponential, 1, 5), &w(Exponential, 1, 1), 60).unwrap();
        assert_eq!(p.verdict, ProbeVerdict::ViolationFound);
        assert!(probe_icv(&w(Exponential, 5, 5), &w(Exponential, 3, 3), 60)
            .unwrap()
            .consistent());
        assert!(
            probe_icv(&w(LogLogistic1, 2, 4), &w(LogLogistic1, 1, 2), 60)
                .unwrap()
                .consistent()
        );
    }

    #[test]
    fn infinite_moments_follow_extended_order() {
        assert_eq!(
            moment_margin(Moment::PosInfinity, Moment::Finite(3.0)),
            f64::INFINITY
        );
        assert_eq!(moment_margin(Moment::PosInfinity, Moment::PosInfinity), 0.0);
        assert_eq!(
            moment_margin(Moment::Finite(3.0), Moment::PosInfinity),
            f64::NEG_INFINITY
        );
        assert_eq!(
            moment_margin(Moment::NegInfinity, Moment::Finite(0.0)),
            f64::NEG_INFINITY
        );
        assert_eq!(
            moment_margin(Moment::Finite(0.0), Moment::NegInfinity),
            f64::INFINITY
        );
        let p = probe_icx(&w(LogLogistic1, 3, 3), &w(LogLogistic1, 2, 3), 50).unwrap();
        assert!(p.consistent());
        let p = probe_icx(&w(LogLogistic1, 2, 3), &w(LogLogistic1, 3, 3), 50).unwrap();
        assert_eq!(p.min_margin, f64::NEG_INFINITY);
    }

    #[test]
    fn small_grids_are_rejected() {
        assert!(probe_st(&w(Uniform, 1, 2), &w(Uniform, 1, 2), 10).is_err());
    }
}
