//! Special functions: partial harmonic sums, digamma, log-gamma, log-beta and
//! the regularized incomplete beta function.
//!
//! Everything here is self-contained and pure.

use crate::{Error, Result};

/// Continued-fraction convergence tolerance for [`reg_inc_beta`].
pub const BETA_CF_TOL: f64 = 1e-14;
/// Iteration cap for the incomplete beta continued fraction.
pub const BETA_CF_MAX_ITER: usize = 300;

const DIGAMMA_SHIFT: f64 = 10.0;
const LN_GAMMA_SHIFT: f64 = 15.0;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_4;

/// Inclusive integer range `lo..=hi` for partial harmonic sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarmonicRange {
    lo: u64,
    hi: u64,
}

impl HarmonicRange {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo == 0 || lo > hi {
            return Err(Error::InvalidRange { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }
}

/// `sum_{k=lo}^{hi} 1/k`, accumulated from the largest denominator down.
pub fn harmonic_sum(r: HarmonicRange) -> f64 {
    (r.lo..=r.hi).rev().map(|k| 1.0 / k as f64).sum()
}

/// Convenience wrapper over [`harmonic_sum`] for `u32` bounds.
pub fn harmonic(lo: u32, hi: u32) -> Result<f64> {
    Ok(harmonic_sum(HarmonicRange::new(lo as u64, hi as u64)?))
}

/// Digamma function `psi(x)` for `x > 0`.
///
/// Shifts the argument up to `x >= 10` with `psi(x) = psi(x + 1) - 1/x` and
/// evaluates the asymptotic series with Bernoulli terms through `x^-14`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            what: "digamma",
            value: x,
        });
    }
    let mut shift = 0.0;
    let mut y = x;
    let mut terms = Vec::new();
    while y < DIGAMMA_SHIFT {
        terms.push(1.0 / y);
        y += 1.0;
    }
    // smallest terms first
    for t in terms.iter().rev() {
        shift += t;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(y.ln() - 0.5 * inv - series - shift)
}

/// `ln Gamma(x)` for `x > 0` via upward shift and the Stirling series.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            what: "ln_gamma",
            value: x,
        });
    }
    if x < LN_GAMMA_SHIFT && x.fract() == 0.0 {
        // (x-1)! is exact in f64 here
        let fact: f64 = (1..x as u32).map(f64::from).product();
        return Ok(fact.ln());
    }
    let mut y = x;
    let mut prod = 1.0;
    while y < LN_GAMMA_SHIFT {
        prod *= y;
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2
                * (1.0 / 360.0
                    - inv2
                        * (1.0 / 1260.0
                            - inv2
                                * (1.0 / 1680.0
                                    - inv2
                                        * (1.0 / 1188.0
                                            - inv2 * (691.0 / 360_360.0 - inv2 / 156.0))))));
    let stirling = (y - 0.5) * y.ln() - y + HALF_LN_2PI + series;
    Ok(stirling - prod.ln())
}

/// `ln B(a, b)`.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::Domain {
            what: "log_beta",
            value: if a > 0.0 { b } else { a },
        });
    }
    Ok(ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?)
}

/// Log-density of `beta(a, b)` given `ln u` and `ln(1 - u)`.
///
/// Taking logs as inputs lets callers pass exact tails (e.g. `-v` for
/// `ln(e^{-v})`) instead of rounding `u` first.
pub fn beta_ln_pdf_logs(ln_u: f64, ln_1mu: f64, a: f64, b: f64, ln_norm: f64) -> f64 {
    let mut s = -ln_norm;
    if a != 1.0 {
        s += (a - 1.0) * ln_u;
    }
    if b != 1.0 {
        s += (b - 1.0) * ln_1mu;
    }
    s
}

/// Density of `beta(a, b)` at `u`.
pub fn beta_pdf(u: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain {
            what: "beta_pdf",
            value: u,
        });
    }
    let ln_norm = log_beta(a, b)?;
    if u == 0.0 || u == 1.0 {
        let edge_exp = if u == 0.0 { a } else { b };
        return Ok(if edge_exp > 1.0 {
            0.0
        } else if edge_exp == 1.0 {
            (-ln_norm).exp()
        } else {
            f64::INFINITY
        });
    }
    Ok(beta_ln_pdf_logs(u.ln(), (-u).ln_1p(), a, b, ln_norm).exp())
}

/// Regularized incomplete beta `I_x(a, b)`.
///
/// Modified Lentz continued fraction; for `x > a/(a+b)` the symmetric form
/// `1 - I_{1-x}(b, a)` is evaluated instead.
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    check_beta_args(x, a, b)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    if x > a / (a + b) {
        Ok(1.0 - beta_cf(1.0 - x, b, a)?)
    } else {
        beta_cf(x, a, b)
    }
}

/// `1 - I_x(a, b)` without cancellation in the upper tail.
pub fn reg_inc_beta_complement(x: f64, a: f64, b: f64) -> Result<f64> {
    check_beta_args(x, a, b)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x == 1.0 {
        return Ok(0.0);
    }
    if x > a / (a + b) {
        beta_cf(1.0 - x, b, a)
    } else {
        Ok(1.0 - beta_cf(x, a, b)?)
    }
}

fn check_beta_args(x: f64, a: f64, b: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            what: "reg_inc_beta",
            value: x,
        });
    }
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::Domain {
            what: "reg_inc_beta shape",
            value: if a > 0.0 { b } else { a },
        });
    }
    Ok(())
}

fn beta_cf(x: f64, a: f64, b: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let ln_front = a * x.ln() + b * (-x).ln_1p() - log_beta(a, b)?;
    let front = ln_front.exp() / a;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut f = d;

    for m in 1..=BETA_CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let even = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + even * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + even / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        f *= d * c;

        let odd = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + odd * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + odd / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        f *= delta;

        if (delta - 1.0).abs() < BETA_CF_TOL {
            return Ok(front * f);
        }
    }
    Err(Error::NoConvergence {
        what: "incomplete beta continued fraction",
        iterations: BETA_CF_MAX_ITER,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    /// Composite Simpson rule; test-only oracle.
    fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
        let n = panels * 2;
        let h = (hi - lo) / n as f64;
        let mut s = f(lo) + f(hi);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(lo + k as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn harmonic_examples() {
        close(harmonic(8, 10).unwrap(), 0.336_111_111_111_111_1, 1e-15);
        assert_eq!(harmonic(1, 1).unwrap(), 1.0);
        close(harmonic(3, 10).unwrap(), 1.428_968_253_968_254, 1e-15);
    }

    #[test]
    fn harmonic_rejects_bad_ranges() {
        assert!(HarmonicRange::new(0, 3).is_err());
        assert!(HarmonicRange::new(5, 4).is_err());
    }

    #[test]
    fn digamma_reference_values() {
        // high-precision reference values
        let cases = [
            (0.001, -1_000.575_571_931_810_3),
            (0.5, -1.963_510_026_021_423_5),
            (1.0, -0.577_215_664_901_532_9),
            (6.0, 1.706_117_668_431_800_5),
            (10.25, 2.277_704_790_686_724),
            (100.0, 4.600_161_852_738_087),
            (1e6, 13.815_510_057_964_191),
        ];
        for (x, want) in cases {
            close(digamma(x).unwrap(), want, 1e-12);
        }
        close(digamma(2.0).unwrap() - digamma(1.0).unwrap(), 1.0, 1e-14);
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.5).is_err());
    }

    #[test]
    fn digamma_matches_harmonic_identity() {
        let lhs = digamma(3.0).unwrap() - digamma(11.0).unwrap();
        close(lhs, -harmonic(3, 10).unwrap(), 1e-13);
    }

    #[test]
    fn ln_gamma_reference_values() {
        let cases = [
            (0.001, 6.907_178_885_383_854),
            (0.5, 0.572_364_942_924_700_1),
            (1.0, 0.0),
            (2.0, 0.0),
            (6.0, 4.787_491_742_782_046),
            (10.25, 13.368_023_671_476_046),
            (100.0, 359.134_205_369_575_4),
        ];
        for (x, want) in cases {
            close(ln_gamma(x).unwrap(), want, 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn log_beta_examples() {
        close(log_beta(1.0, 1.0).unwrap(), 0.0, 1e-14);
        close(log_beta(2.0, 3.0).unwrap(), (1.0f64 / 12.0).ln(), 1e-13);
        // B(3, 8) = 2! 7! / 10! = 1/360
        let fact = |k: u64| (1..=k).product::<u64>() as f64;
        let exact = (fact(2) * fact(7) / fact(10)).ln();
        close(exact, -(360.0f64).ln(), 1e-15);
        let got = log_beta(3.0, 8.0).unwrap();
        assert!(((got - exact) / exact).abs() < 1e-12);
        assert!(log_beta(0.0, 1.0).is_err());
    }

    #[test]
    fn incomplete_beta_examples() {
        close(reg_inc_beta(0.5, 1.0, 1.0).unwrap(), 0.5, 1e-15);
        close(reg_inc_beta(0.2, 1.0, 3.0).unwrap(), 0.488, 1e-14);
        // polynomial CDF at 0.3 terminates: 0.6172172136 exactly
        close(reg_inc_beta(0.3, 3.0, 8.0).unwrap(), 0.617_217_213_6, 1e-13);
        let oracle = simpson(|t| 360.0 * t * t * (1.0 - t).powi(7), 0.0, 0.3, 2000);
        close(reg_inc_beta(0.3, 3.0, 8.0).unwrap(), oracle, 1e-10);
        assert_eq!(reg_inc_beta(0.0, 2.0, 5.0).unwrap(), 0.0);
        assert_eq!(reg_inc_beta(1.0, 2.0, 5.0).unwrap(), 1.0);
        assert!(reg_inc_beta(1.5, 2.0, 5.0).is_err());
        assert!(reg_inc_beta(-0.1, 2.0, 5.0).is_err());
    }

    #[test]
    fn incomplete_beta_against_simpson_grid() {
        for &(a, b) in &[(1.0, 1.0), (2.0, 5.0), (7.0, 3.0), (12.0, 13.0)] {
            let ln_norm = log_beta(a, b).unwrap();
            for &x in &[0.05, 0.2, 0.5, 0.77, 0.95] {
                let oracle = simpson(
                    |t| {
                        if t <= 0.0 || t >= 1.0 {
                            beta_pdf(t, a, b).unwrap()
                        } else {
                            beta_ln_pdf_logs(t.ln(), (-t).ln_1p(), a, b, ln_norm).exp()
                        }
                    },
                    0.0,
                    x,
                    20_000,
                );
                close(reg_inc_beta(x, a, b).unwrap(), oracle, 1e-10);
            }
        }
    }

    #[test]
    fn complement_is_accurate_in_the_tail() {
        // 1 - I_x(1, n) = (1 - x)^n exactly
        let x = 0.999;
        let got = reg_inc_beta_complement(x, 1.0, 10.0).unwrap();
        assert!(((got - (1.0f64 - x).powi(10)) / got).abs() < 1e-10);
    }

    #[test]
    fn beta_pdf_edges() {
        assert_eq!(beta_pdf(0.0, 2.0, 3.0).unwrap(), 0.0);
        close(beta_pdf(0.0, 1.0, 3.0).unwrap(), 3.0, 1e-13);
        assert!(beta_pdf(1.0, 2.0, 0.5).unwrap().is_infinite());
        close(beta_pdf(0.5, 2.0, 2.0).unwrap(), 1.5, 1e-13);
    }
}
