//! Paired Monte Carlo estimates of `E u(A)` and `E u(B)` for star-shaped `u`.
//!
//! Both order statistics come from one stream of standard exponentials
//! through the Renyi representation `B_{i:n} = S_i / S_{n+1}`, where `S_k` is
//! the `k`-th partial sum. Batches draw from independent ChaCha streams of a
//! single seed, so results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::orderstat::TransformedOrderStat;
use crate::refdist::ReferenceDistribution;
use crate::{Error, Result};

pub const MIN_SAMPLES: usize = 100_000;
const BATCH: usize = 4096;

/// Star-shaped functions on `[0, inf)`: `h(0) = 0` and `h(x)/x` nondecreasing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StarFn {
    /// `x^p`, `p >= 1`
    Power(f64),
    /// `(x - t)_+`, `t >= 0`
    Ramp(f64),
    /// `x 1[x >= t]`, `t >= 0`
    Truncated(f64),
}

impl StarFn {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Power(p) => x.powf(p),
            Self::Ramp(t) => (x - t).max(0.0),
            Self::Truncated(t) => {
                if x >= t {
                    x
                } else {
                    0.0
                }
            }
        }
    }

    pub fn is_star_shaped(&self) -> bool {
        match *self {
            Self::Power(p) => p >= 1.0,
            Self::Ramp(t) | Self::Truncated(t) => t >= 0.0,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Power(p) => format!("x^{p}"),
            Self::Ramp(t) => format!("(x-{t})+"),
            Self::Truncated(t) => format!("x*1[x>={t}]"),
        }
    }

    /// Powers 1, 1.5, 2, 3 plus ramps and truncations at the given points.
    pub fn standard_family(thresholds: &[f64]) -> Vec<StarFn> {
        let mut fns: Vec<StarFn> = [1.0, 1.5, 2.0, 3.0].into_iter().map(Self::Power).collect();
        for &t in thresholds {
            fns.push(Self::Ramp(t));
            fns.push(Self::Truncated(t));
        }
        fns
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McPair {
    pub function: StarFn,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_se: f64,
    pub rhs_se: f64,
    /// Standard error of the paired difference.
    pub diff_se: f64,
    pub heavy_tail: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    a: f64,
    a2: f64,
    b: f64,
    b2: f64,
    d2: f64,
    max_a: f64,
    max_b: f64,
}

impl Moments {
    fn merge(self, o: Self) -> Self {
        Self {
            n: self.n + o.n,
            a: self.a + o.a,
            a2: self.a2 + o.a2,
            b: self.b + o.b,
            b2: self.b2 + o.b2,
            d2: self.d2 + o.d2,
            max_a: self.max_a.max(o.max_a),
            max_b: self.max_b.max(o.max_b),
        }
    }
}

fn pairwise(parts: &[Moments]) -> Moments {
    match parts.len() {
        0 => Moments::default(),
        1 => parts[0],
        k => pairwise(&parts[..k / 2]).merge(pairwise(&parts[k / 2..])),
    }
}

/// `G^{-1}(S_k / S_total)` with `tail = S_total - S_k` passed separately.
fn transform(g: ReferenceDistribution, head: f64, tail: f64) -> f64 {
    use ReferenceDistribution::*;
    let total = head + tail;
    match g {
        Uniform => head / total,
        Exponential => total.ln() - tail.ln(),
        Logistic => head.ln() - tail.ln(),
        LogLogistic1 => head / tail,
        NegExponential => head.ln() - total.ln(),
        NegLogLogistic1 => -tail / head,
    }
}

fn sample_pair(w: &TransformedOrderStat, prefix: &[f64]) -> f64 {
    let (i, n) = (w.s.i() as usize, w.s.n() as usize);
    let head = prefix[i];
    let tail = prefix[n + 1] - prefix[i];
    transform(w.g, head, tail)
}

/// Paired estimates of `E u(A)` and `E u(B)` for each `u` in `fns`.
pub fn mc_expect_starshaped(
    a: &TransformedOrderStat,
    b: &TransformedOrderStat,
    fns: &[StarFn],
    samples: usize,
    seed: u64,
) -> Result<Vec<McPair>> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_SAMPLES} samples required, got {samples}"
        )));
    }
    if let Some(f) = fns.iter().find(|f| !f.is_star_shaped()) {
        return Err(Error::InvalidArgument(format!(
            "{} is not star-shaped",
            f.label()
        )));
    }
    let draws = a.s.n().max(b.s.n()) as usize + 1;
    let batches = samples.div_ceil(BATCH);
    let nf = fns.len();

    let per_batch: Vec<Vec<Moments>> = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch as u64);
            let count = BATCH.min(samples - batch * BATCH);
            let mut acc = vec![Moments::default(); nf];
            let mut prefix = vec![0.0; draws + 1];
            for _ in 0..count {
                for k in 0..draws {
                    let u: f64 = rng.gen();
                    prefix[k + 1] = prefix[k] - (-u).ln_1p();
                }
                // each variable uses its own n + 1 partial sums
                let xa = sample_pair(a, &prefix);
                let xb = sample_pair(b, &prefix);
                for (m, f) in acc.iter_mut().zip(fns) {
                    let (ua, ub) = (f.eval(xa), f.eval(xb));
                    m.n += 1.0;
                    m.a += ua;
                    m.a2 += ua * ua;
                    m.b += ub;
                    m.b2 += ub * ub;
                    m.d2 += (ua - ub) * (ua - ub);
                    m.max_a = m.max_a.max(ua.abs());
                    m.max_b = m.max_b.max(ub.abs());
                }
            }
            acc
        })
        .collect();

    let half = batches / 2;
    let out = (0..nf)
        .map(|k| {
            let parts: Vec<Moments> = per_batch.iter().map(|v| v[k]).collect();
            let all = pairwise(&parts);
            let first = pairwise(&parts[..half.max(1)]);
            let second = pairwise(&parts[half.max(1)..]);
            summarize(fns[k], all, first, second)
        })
        .collect();
    Ok(out)
}

fn se(sum: f64, sum2: f64, n: f64) -> f64 {
    let mean = sum / n;
    ((sum2 / n - mean * mean).max(0.0) / (n - 1.0)).sqrt()
}

fn summarize(function: StarFn, all: Moments, first: Moments, second: Moments) -> McPair {
    let n = all.n;
    let lhs = all.a / n;
    let rhs = all.b / n;
    let d = lhs - rhs;
    let diff_se = ((all.d2 / n - d * d).max(0.0) / (n - 1.0)).sqrt();
    // running-mean instability: halves disagree or one draw dominates
    let unstable = |s1: f64, q1: f64, n1: f64, s2: f64, q2: f64, n2: f64| {
        if n1 < 2.0 || n2 < 2.0 {
            return false;
        }
        let gap = (s1 / n1 - s2 / n2).abs();
        let band = (se(s1, q1, n1).powi(2) + se(s2, q2, n2).powi(2)).sqrt();
        gap > 5.0 * band
    };
    let heavy_tail = !lhs.is_finite()
        || !rhs.is_finite()
        || unstable(first.a, first.a2, first.n, second.a, second.a2, second.n)
        || unstable(first.b, first.b2, first.n, second.b, second.b2, second.n)
        || all.max_a > 0.05 * all.a.abs().max(f64::MIN_POSITIVE)
        || all.max_b > 0.05 * all.b.abs().max(f64::MIN_POSITIVE);
    McPair {
        function,
        lhs,
        rhs,
        lhs_se: se(all.a, all.a2, n),
        rhs_se: se(all.b, all.b2, n),
        diff_se,
        heavy_tail,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refdist::{Moment, OrderStatSpec, ReferenceDistribution::*};

    fn w(g: ReferenceDistribution, i: u32, n: u32) -> TransformedOrderStat {
        TransformedOrderStat::new(g, OrderStatSpec::new(i, n).unwrap())
    }

    #[test]
    fn identity_matches_closed_form_mean() {
        for (g, i, n) in [(Uniform, 3, 7), (Exponential, 2, 5), (Exponential, 6, 6)] {
            let a = w(g, i, n);
            let r = mc_expect_starshaped(&a, &a, &[StarFn::Power(1.0)], 100_000, 7).unwrap();
            let Moment::Finite(mean) = a.mean() else {
                unreachable!()
            };
            assert!((r[0].lhs - mean).abs() < 4.0 * r[0].lhs_se, "{g} {i} {n}");
            assert_eq!(r[0].lhs, r[0].rhs);
            assert_eq!(r[0].diff_se, 0.0);
            assert!(!r[0].heavy_tail);
        }
    }

    #[test]
    fn second_moment_of_uniform() {
        let a = w(Uniform, 1, 1);
        let r = mc_expect_starshaped(&a, &a, &[StarFn::Power(2.0)], 100_000, 11).unwrap();
        assert!((r[0].lhs - 1.0 / 3.0).abs() < 3.0 * r[0].lhs_se);
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let (a, b) = (w(Exponential, 2, 4), w(Exponential, 1, 3));
        let fns = StarFn::standard_family(&[0.5, 1.0]);
        let r1 = mc_expect_starshaped(&a, &b, &fns, 100_000, 42).unwrap();
        let r2 = mc_expect_starshaped(&a, &b, &fns, 100_000, 42).unwrap();
        assert_eq!(r1, r2);
        let r3 = mc_expect_starshaped(&a, &b, &fns, 100_000, 43).unwrap();
        assert_ne!(r1, r3);
    }

    #[test]
    fn heavy_tails_are_flagged() {
        // LL1 with i = n has infinite mean
        let a = w(LogLogistic1, 3, 3);
        let r = mc_expect_starshaped(&a, &a, &[StarFn::Power(1.0)], 100_000, 3).unwrap();
        assert!(r[0].heavy_tail);
    }

    #[test]
    fn input_validation() {
        let a = w(Uniform, 1, 2);
        assert!(mc_expect_starshaped(&a, &a, &[StarFn::Power(1.0)], 10, 0).is_err());
        assert!(mc_expect_starshaped(&a, &a, &[StarFn::Power(0.5)], 100_000, 0).is_err());
    }
}
