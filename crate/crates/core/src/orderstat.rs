//! Beta order statistics `B_{i:n}` and transformed order statistics
//! `G^{-1}(B_{i:n})`.
//!
//! Every expectation here goes through adaptive quadrature in the natural
//! variable `y = G^{-1}(u)`, with the density written as
//! `beta_pdf(G(y)) g(y)` and evaluated from `ln G(y)` and `ln(1 - G(y))`. This
//! keeps the integrands smooth where the quantile blows up and makes the
//! results an independent check on the closed forms in [`crate::refdist`].

use serde::{Deserialize, Serialize};

use crate::quad::{self, DEFAULT_ABS_TOL};
use crate::refdist::{Moment, OrderStatSpec, ReferenceDistribution};
use crate::specfun::{beta_ln_pdf_logs, log_beta, reg_inc_beta, reg_inc_beta_complement};
use crate::{Error, Result};

/// CDF of `B_{i:n}`: `I_x(i, n - i + 1)`.
pub fn beta_orderstat_cdf(s: OrderStatSpec, x: f64) -> Result<f64> {
    let (a, b) = s.beta_params();
    reg_inc_beta(x, a, b)
}

/// Survival function of `B_{i:n}`.
pub fn beta_orderstat_sf(s: OrderStatSpec, x: f64) -> Result<f64> {
    let (a, b) = s.beta_params();
    reg_inc_beta_complement(x, a, b)
}

/// Quantile of `B_{i:n}` by bisection on the CDF.
pub fn beta_orderstat_quantile(s: OrderStatSpec, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain {
            what: "beta quantile",
            value: p,
        });
    }
    if p == 0.0 || p == 1.0 {
        return Ok(p);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_orderstat_cdf(s, mid)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The random variable `G^{-1}(B_{i:n})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransformedOrderStat {
    pub g: ReferenceDistribution,
    pub s: OrderStatSpec,
}

impl TransformedOrderStat {
    pub fn new(g: ReferenceDistribution, s: OrderStatSpec) -> Self {
        Self { g, s }
    }

    fn ln_norm(&self) -> f64 {
        let (a, b) = self.s.beta_params();
        log_beta(a, b).expect("beta parameters are positive")
    }

    /// Closed-form mean, `+inf`/`-inf` when divergent.
    pub fn mean(&self) -> Moment {
        self.g.expected_transformed_orderstat(self.s)
    }

    pub fn cdf(&self, y: f64) -> Result<f64> {
        beta_orderstat_cdf(self.s, self.g.cdf_value(y))
    }

    pub fn sf(&self, y: f64) -> Result<f64> {
        let (lo, hi) = self.g.support();
        if y < lo {
            return Ok(1.0);
        }
        if y > hi {
            return Ok(0.0);
        }
        beta_orderstat_sf(self.s, self.g.cdf_value(y))
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        let u = beta_orderstat_quantile(self.s, p)?;
        if u <= 0.0 {
            return Ok(self.g.support().0);
        }
        if u >= 1.0 {
            return Ok(self.g.support().1);
        }
        self.g.quantile(u)
    }

    fn density_with_norm(&self, y: f64, ln_norm: f64) -> f64 {
        let (a, b) = self.s.beta_params();
        let ln_g = self.g.pdf(y).ln();
        let v = beta_ln_pdf_logs(self.g.ln_cdf(y), self.g.ln_sf(y), a, b, ln_norm) + ln_g;
        if v.is_nan() {
            0.0
        } else {
            v.exp()
        }
    }

    /// Density of `G^{-1}(B_{i:n})` at `y` (inside the support).
    pub fn density(&self, y: f64) -> f64 {
        self.density_with_norm(y, self.ln_norm())
    }

    /// `E[h(W)]` by quadrature over the support of `G`, restricted to
    /// `[from, to]`.
    pub fn expectation_over<H: Fn(f64) -> f64>(
        &self,
        h: H,
        from: f64,
        to: f64,
        tol: f64,
    ) -> Result<f64> {
        let (lo, hi) = self.g.support();
        let from = from.max(lo);
        let to = to.min(hi);
        if from >= to {
            return Ok(0.0);
        }
        let ln_norm = self.ln_norm();
        let f = |y: f64| {
            let d = self.density_with_norm(y, ln_norm);
            if d == 0.0 {
                0.0
            } else {
                h(y) * d
            }
        };
        // split at interior quantiles so the bulk of the mass cannot hide
        // between the nodes of a wide first panel
        let (a, b) = self.s.beta_params();
        let mu = a / (a + b);
        let sd = (a * b / ((a + b) * (a + b) * (a + b + 1.0))).sqrt();
        // and geometric knots toward an infinite end, where heavy tails
        // would otherwise sit inside one enormous panel
        let mut levels = vec![mu - 4.0 * sd, mu, mu + 4.0 * sd];
        if lo == f64::NEG_INFINITY {
            levels.extend((1..=12).map(|k| 10f64.powi(-k)));
        }
        if hi == f64::INFINITY {
            levels.extend((1..=12).map(|k| 1.0 - 10f64.powi(-k)));
        }
        let mut knots = vec![from];
        for u in levels {
            if !(u > 0.0 && u < 1.0) {
                continue;
            }
            let q = self.g.quantile(u)?;
            if q > from && q < to {
                knots.push(q);
            }
        }
        knots.push(to);
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let pieces = knots.len() - 1;
        let piece_tol = tol / pieces as f64;
        let mut total = 0.0;
        for w in knots.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let r = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => quad::integrate(&f, lo, hi, piece_tol)?,
                (true, false) => quad::integrate_to_infinity(&f, lo, piece_tol)?,
                (false, true) => quad::integrate_from_neg_infinity(&f, hi, piece_tol)?,
                (false, false) => quad::integrate_real_line(&f, 0.0, piece_tol)?,
            };
            total += r.value;
        }
        Ok(total)
    }

    /// `E[h(W)]` over the whole support.
    pub fn expectation<H: Fn(f64) -> f64>(&self, h: H, tol: f64) -> Result<f64> {
        self.expectation_over(h, f64::NEG_INFINITY, f64::INFINITY, tol)
    }

    fn upper_tail_diverges(&self) -> bool {
        self.g == ReferenceDistribution::LogLogistic1 && self.s.i() == self.s.n()
    }

    fn lower_tail_diverges(&self) -> bool {
        self.g == ReferenceDistribution::NegLogLogistic1 && self.s.i() == 1
    }

    /// Mean by quadrature; the divergent cases are detected from the tail
    /// exponents rather than integrated.
    pub fn mean_by_quadrature(&self, tol: f64) -> Result<Moment> {
        if self.upper_tail_diverges() {
            return Ok(Moment::PosInfinity);
        }
        if self.lower_tail_diverges() {
            return Ok(Moment::NegInfinity);
        }
        Ok(Moment::Finite(self.expectation(|y| y, tol)?))
    }

    /// `E[W 1{W >= x}] = int_x^inf t dF_W(t)`, the star-shaped order
    /// characterization integral. Only defined for nonnegative `G`.
    pub fn upper_partial_mean(&self, x: f64) -> Result<Moment> {
        self.upper_partial_mean_tol(x, DEFAULT_ABS_TOL)
    }

    pub fn upper_partial_mean_tol(&self, x: f64, tol: f64) -> Result<Moment> {
        if !self.g.is_nonnegative() {
            return Err(Error::InvalidArgument(format!(
                "upper partial mean needs a nonnegative reference distribution, got {}",
                self.g
            )));
        }
        if !(x >= 0.0) {
            return Err(Error::Domain {
                what: "upper_partial_mean",
                value: x,
            });
        }
        if self.upper_tail_diverges() {
            return Ok(Moment::PosInfinity);
        }
        Ok(Moment::Finite(self.expectation_over(
            |y| y,
            x,
            f64::INFINITY,
            tol,
        )?))
    }

    /// Stop-loss transform `E[(W - t)_+]`.
    pub fn stop_loss(&self, t: f64, tol: f64) -> Result<Moment> {
        if self.upper_tail_diverges() {
            return Ok(Moment::PosInfinity);
        }
        Ok(Moment::Finite(self.expectation_over(
            |y| y - t,
            t,
            f64::INFINITY,
            tol,
        )?))
    }

    /// `E[min(W, t)] = t - E[(t - W)_+]`.
    pub fn expected_min(&self, t: f64, tol: f64) -> Result<Moment> {
        if self.lower_tail_diverges() {
            return Ok(Moment::NegInfinity);
        }
        let lower = self.expectation_over(|y| t - y, f64::NEG_INFINITY, t, tol)?;
        Ok(Moment::Finite(t - lower))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ReferenceDistribution::*;

    fn spec(i: u32, n: u32) -> OrderStatSpec {
        OrderStatSpec::new(i, n).unwrap()
    }

    #[test]
    fn beta_cdf_examples() {
        for &x in &[0.0, 0.13, 0.5, 0.9, 1.0] {
            assert!((beta_orderstat_cdf(spec(1, 1), x).unwrap() - x).abs() < 1e-15);
        }
        assert!((beta_orderstat_cdf(spec(3, 3), 0.5).unwrap() - 0.125).abs() < 1e-15);
        assert!((beta_orderstat_cdf(spec(2, 3), 0.5).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn higher_rank_is_stochastically_larger() {
        for n in 2..=12 {
            for i in 2..=n {
                for k in 1..50 {
                    let x = k as f64 / 50.0;
                    let hi = beta_orderstat_cdf(spec(i, n), x).unwrap();
                    let lo = beta_orderstat_cdf(spec(i - 1, n), x).unwrap();
                    assert!(hi <= lo + 1e-15);
                }
            }
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let s = spec(4, 9);
        for &p in &[1e-4, 0.1, 0.5, 0.93, 0.9999] {
            let x = beta_orderstat_quantile(s, p).unwrap();
            assert!((beta_orderstat_cdf(s, x).unwrap() - p).abs() < 1e-13);
        }
    }

    #[test]
    fn upper_partial_mean_examples() {
        let t = TransformedOrderStat::new(Uniform, spec(1, 1));
        assert!((t.upper_partial_mean(0.0).unwrap().value() - 0.5).abs() < 1e-12);
        assert!((t.upper_partial_mean(0.5).unwrap().value() - 0.375).abs() < 1e-12);
        let t = TransformedOrderStat::new(Exponential, spec(3, 10));
        let want = t.mean().finite().unwrap();
        assert!((t.upper_partial_mean(0.0).unwrap().value() - want).abs() < 1e-10);
        let t = TransformedOrderStat::new(LogLogistic1, spec(5, 5));
        assert_eq!(t.upper_partial_mean(2.0).unwrap(), Moment::PosInfinity);
        assert!(TransformedOrderStat::new(Logistic, spec(1, 2))
            .upper_partial_mean(0.0)
            .is_err());
    }

    #[test]
    fn upper_partial_mean_is_nonincreasing() {
        for g in [Uniform, Exponential, LogLogistic1] {
            let t = TransformedOrderStat::new(g, spec(2, 6));
            let mut prev = f64::INFINITY;
            for k in 0..40 {
                let x = k as f64 * 0.05;
                let v = t.upper_partial_mean(x).unwrap().value();
                assert!(v <= prev + 1e-10, "{g} x={x}");
                prev = v;
            }
        }
        let t = TransformedOrderStat::new(Uniform, spec(2, 6));
        assert_eq!(t.upper_partial_mean(1.0).unwrap().value(), 0.0);
        let t = TransformedOrderStat::new(Exponential, spec(2, 6));
        assert!(t.upper_partial_mean(60.0).unwrap().value() < 1e-20);
    }

    #[test]
    fn stop_loss_and_expected_min_recover_the_mean() {
        // E(W - t)_+ + E min(W, t) = E W + ... evaluated at t below / above the bulk
        let t = TransformedOrderStat::new(Logistic, spec(3, 7));
        let mean = t.mean().finite().unwrap();
        let sl = t.stop_loss(-60.0, 1e-12).unwrap().value();
        assert!((sl - (mean + 60.0)).abs() < 1e-8);
        let em = t.expected_min(60.0, 1e-12).unwrap().value();
        assert!((em - mean).abs() < 1e-8);
    }

    #[test]
    fn divergent_tails_are_tagged() {
        let t = TransformedOrderStat::new(NegLogLogistic1, spec(1, 4));
        assert_eq!(t.expected_min(-1.0, 1e-10).unwrap(), Moment::NegInfinity);
        assert_eq!(t.mean_by_quadrature(1e-10).unwrap(), Moment::NegInfinity);
        let t = TransformedOrderStat::new(LogLogistic1, spec(4, 4));
        assert_eq!(t.stop_loss(1.0, 1e-10).unwrap(), Moment::PosInfinity);
    }
}
