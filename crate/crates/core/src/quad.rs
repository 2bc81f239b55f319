//! Globally adaptive Gauss-Kronrod (G10/K21) integration.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error estimate drops below the absolute tolerance, or below the roundoff
//! floor `ROUNDOFF_FACTOR * eps * sum |panel values|` when that is larger.
//! Infinite ranges are mapped onto finite ones with `x = a + c t/(1-t)`; the
//! K21 nodes never touch the endpoints so integrable endpoint singularities
//! are fine.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

/// Default absolute tolerance used throughout the crate.
pub const DEFAULT_ABS_TOL: f64 = 1e-10;
/// Error estimates under this many ulps of the integral's scale are noise.
pub const ROUNDOFF_FACTOR: f64 = 50.0;
/// Maximum number of subintervals.
pub const MAX_SUBDIVISIONS: usize = 1 << 16;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_292_238_942,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Result<Segment> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for k in 0..10 {
        let dx = half * XGK[k];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[k] * (f1 + f2);
        if k % 2 == 1 {
            gauss += WG[k / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    if !value.is_finite() {
        return Err(Error::Quadrature(format!(
            "non-finite integrand on [{lo}, {hi}]"
        )));
    }
    let error = ((kronrod - gauss) * half).abs();
    Ok(Segment {
        lo,
        hi,
        value,
        error,
    })
}

/// Integrates `f` over the finite interval `[lo, hi]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    abs_tol: f64,
) -> Result<Integral> {
    if lo == hi {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Quadrature("finite bounds required".into()));
    }
    let (lo, hi, sign) = if lo < hi {
        (lo, hi, 1.0)
    } else {
        (hi, lo, -1.0)
    };

    let mut heap = BinaryHeap::new();
    let first = kronrod21(&mut f, lo, hi)?;
    let mut evaluations = 21;
    let mut total_err = first.error;
    let mut scale = first.value.abs();
    heap.push(first);
    let target = |scale: f64| abs_tol.max(ROUNDOFF_FACTOR * f64::EPSILON * scale);

    while total_err > target(scale) {
        if heap.len() >= MAX_SUBDIVISIONS {
            return Err(Error::Quadrature(format!(
                "subdivision cap reached with error estimate {total_err:e}"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // interval no longer divisible; accept its contribution
            total_err -= worst.error;
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            if heap.iter().all(|s| s.error == 0.0) {
                break;
            }
            continue;
        }
        let left = kronrod21(&mut f, worst.lo, mid)?;
        let right = kronrod21(&mut f, mid, worst.hi)?;
        evaluations += 42;
        total_err += left.error + right.error - worst.error;
        scale += left.value.abs() + right.value.abs() - worst.value.abs();
        heap.push(left);
        heap.push(right);
        if total_err <= target(scale) {
            // re-sum to wash out the drift of incremental updates
            total_err = heap.iter().map(|s| s.error).sum();
            scale = heap.iter().map(|s| s.value.abs()).sum();
        }
    }
    let value: f64 = heap.iter().map(|s| s.value).sum();
    Ok(Integral {
        value: sign * value,
        abs_error: total_err.max(0.0),
        evaluations,
    })
}

/// Integrates `f` over `[lo, +inf)`.
///
/// The map is `x = lo + c t/(1-t)` with `c = max(1, |lo|)`, so a tail
/// decaying like a power of `x` stays spread over `t` even far from 0.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    abs_tol: f64,
) -> Result<Integral> {
    let c = lo.abs().max(1.0);
    integrate(
        |t| {
            let s = 1.0 - t;
            let x = lo + c * t / s;
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                c * v / (s * s)
            }
        },
        0.0,
        1.0,
        abs_tol,
    )
}

/// Integrates `f` over `(-inf, hi]`.
pub fn integrate_from_neg_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    hi: f64,
    abs_tol: f64,
) -> Result<Integral> {
    integrate_to_infinity(|y| f(2.0 * hi - y), hi, abs_tol)
}

/// Integrates `f` over the whole real line, split at `pivot`.
pub fn integrate_real_line<F: FnMut(f64) -> f64>(
    mut f: F,
    pivot: f64,
    abs_tol: f64,
) -> Result<Integral> {
    let right = integrate_to_infinity(&mut f, pivot, 0.5 * abs_tol)?;
    let left = integrate_from_neg_infinity(&mut f, pivot, 0.5 * abs_tol)?;
    Ok(Integral {
        value: left.value + right.value,
        abs_error: left.abs_error + right.abs_error,
        evaluations: left.evaluations + right.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        let k: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn kronrod_is_exact_for_high_degree_polynomials() {
        for p in 0..=30 {
            let r = kronrod21(&mut |x: f64| x.powi(p), 0.0, 1.0).unwrap();
            assert!(
                (r.value - 1.0 / (p as f64 + 1.0)).abs() < 1e-14,
                "degree {p}"
            );
        }
    }

    #[test]
    fn adaptive_handles_log_singularity() {
        let r = integrate(|x| -x.ln(), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn semi_infinite_and_real_line() {
        let r = integrate_to_infinity(|x| x * (-x).exp(), 0.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
        let r = integrate_from_neg_infinity(|x| x.exp(), 0.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
        let r = integrate_real_line(|x| (-x * x).exp(), 0.3, 1e-12).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let r = integrate(|x| x, 1.0, 0.0, 1e-12).unwrap();
        assert!((r.value + 0.5).abs() < 1e-15);
    }
}
