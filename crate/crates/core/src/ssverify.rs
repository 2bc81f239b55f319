//! Star-shaped order between order statistics from DDA and DHRA parents.
//!
//! For nonnegative variables `X >=_ss Y` iff `int_x^inf t dF_X >= int_x^inf t dF_Y`
//! for all `x >= 0`. Both criteria below evaluate that difference, `Z`, for
//! the reference frame (`B_{i:n}` for DDA, `-ln(1 - B_{i:n})` for DHRA) and
//! ask whether it stays nonnegative. Since
//! `Z'(x) = x (f_b(x) - f_a(x))`, the interior critical points solve
//! `r^{i-j} (1-r)^{(n-i)-(m-j)} = B(i, n-i+1) / B(j, m-j+1)` in the beta
//! variable `r`, which [`solve_t`] handles in closed form.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::{OrderKind, OrderVerdict, ShapeClass, VerdictStatus};
use crate::orderstat::TransformedOrderStat;
use crate::refdist::{OrderStatSpec, ReferenceDistribution};
use crate::specfun::{digamma, harmonic, log_beta, reg_inc_beta_complement};
use crate::{Error, Result};

/// `Z >= -SS_TOL` counts as nonnegative.
pub const SS_TOL: f64 = 1e-12;
/// Number of uniform cells in the cross-check grid.
pub const GRID_POINTS: usize = 10_000;

const LOGIT_RANGE: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootRegime {
    /// `ab <= 0`: `a ln x + b ln(1-x)` is monotone.
    Monotone,
    /// `ab > 0`: one interior extremum at `a/(a+b)`.
    Unimodal,
}

/// Solutions of `x^a (1-x)^b = c` on `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<f64>,
    pub regime: RootRegime,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub ln_c: f64,
}

fn ln_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        -(-z).exp().ln_1p()
    } else {
        z - z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    let x = if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    };
    // keep roots strictly inside (0, 1) when x rounds to an endpoint
    x.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// Bisection for a sign change of `f` on `[lo, hi]` given the endpoint values.
fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, mut flo: f64) -> f64 {
    for _ in 0..2_000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Roots of `T_{a,b}(x) = x^a (1-x)^b = c` on `(0, 1)`.
///
/// At most one root when `ab <= 0` and at most two when `ab > 0`. The search
/// runs in the logit variable on the log-transformed equation, so roots far
/// into either tail are still bracketed.
pub fn solve_t(a: f64, b: f64, c: f64) -> RootSet {
    let mut set = solve_t_ln(a, b, c.ln());
    set.c = c;
    set
}

/// [`solve_t`] with the target given as `ln c`.
pub fn solve_t_ln(a: f64, b: f64, ln_c: f64) -> RootSet {
    let regime = if a * b > 0.0 {
        RootRegime::Unimodal
    } else {
        RootRegime::Monotone
    };
    let mut set = RootSet {
        roots: Vec::new(),
        regime,
        a,
        b,
        c: ln_c.exp(),
        ln_c,
    };
    if !ln_c.is_finite() || !a.is_finite() || !b.is_finite() || (a == 0.0 && b == 0.0) {
        return set;
    }
    let f = |z: f64| a * ln_sigmoid(z) + b * ln_sigmoid(-z) - ln_c;
    let (zl, zr) = (-LOGIT_RANGE, LOGIT_RANGE);

    match regime {
        RootRegime::Monotone => {
            let (fl, fr) = (f(zl), f(zr));
            if fl == 0.0 {
                set.roots.push(sigmoid(zl));
            } else if fr == 0.0 {
                set.roots.push(sigmoid(zr));
            } else if (fl > 0.0) != (fr > 0.0) {
                set.roots.push(sigmoid(bisect(&f, zl, zr, fl)));
            }
        }
        RootRegime::Unimodal => {
            // orient so the stationary point is a maximum
            let sgn = a.signum();
            let g = |z: f64| sgn * f(z);
            let (xs, ys) = (a / (a + b), b / (a + b));
            let zs = (a / b).ln();
            let peak = sgn * (a * xs.ln() + b * ys.ln() - ln_c);
            let scale = 1e-13 * (a.abs() + b.abs() + ln_c.abs() + 1.0);
            if peak.abs() <= scale {
                set.roots.push(xs);
            } else if peak > 0.0 {
                let (gl, gr) = (g(zl), g(zr));
                if gl < 0.0 {
                    set.roots.push(sigmoid(bisect(&g, zl, zs, gl)));
                }
                if gr < 0.0 {
                    set.roots.push(sigmoid(bisect(&g, zs, zr, peak)));
                }
            }
        }
    }
    set.roots.sort_by(f64::total_cmp);
    set.roots.dedup();
    set
}

fn beta_sf(x: f64, a: f64, b: f64) -> f64 {
    reg_inc_beta_complement(x, a, b).expect("order statistic parameters are positive")
}

/// `Z(x) = E[B_{i:n}; B_{i:n} > x] - E[B_{j:m}; B_{j:m} > x]`
/// `= i/(n+1) (1 - I_x(i+1, n-i+1)) - j/(m+1) (1 - I_x(j+1, m-j+1))`.
pub fn z_dda(a: OrderStatSpec, b: OrderStatSpec, x: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let x = x.clamp(0.0, 1.0);
    let part = |s: OrderStatSpec| {
        let (i, n) = (s.i() as f64, s.n() as f64);
        i / (n + 1.0) * beta_sf(x, i + 1.0, n - i + 1.0)
    };
    part(a) - part(b)
}

/// Closed-form `int_x^inf t dF(t)` for `-ln(1 - B_{i:n})` via the binomial
/// expansion, with `sum |terms| / |result|` as condition estimate.
fn dhra_part_closed_form(s: OrderStatSpec, x: f64) -> Option<(f64, f64)> {
    let (i, n) = (s.i() as u64, s.n() as u64);
    if n > 170 {
        return None;
    }
    // 1/B(i, n-i+1) = i C(n, i)
    let ln_norm = -log_beta(i as f64, (n - i + 1) as f64).ok()?;
    let mut binom = 1.0f64; // C(i-1, l)
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for l in 0..i {
        if l > 0 {
            binom *= (i - l) as f64 / l as f64;
        }
        let lambda = (n - i + 1 + l) as f64;
        let ln_mag = ln_norm + binom.ln() - lambda * x + (lambda * x).ln_1p() - 2.0 * lambda.ln();
        let mag = ln_mag.exp();
        if !mag.is_finite() {
            return None;
        }
        let term = if l % 2 == 0 { mag } else { -mag };
        sum += term;
        abs_sum += mag;
    }
    if sum <= 0.0 {
        return Some((sum, f64::INFINITY));
    }
    Some((sum, abs_sum / sum))
}

/// Closed form of [`z_dhra`], or `None` when the alternating sum is too
/// ill-conditioned (estimate at or above `1e8`).
pub fn z_dhra_closed_form(a: OrderStatSpec, b: OrderStatSpec, x: f64) -> Option<f64> {
    if !(x >= 0.0) {
        return None;
    }
    let (pa, ca) = dhra_part_closed_form(a, x)?;
    let (pb, cb) = dhra_part_closed_form(b, x)?;
    if ca < 1e8 && cb < 1e8 {
        Some(pa - pb)
    } else {
        None
    }
}

/// [`z_dhra`] by adaptive quadrature of the two tail integrals.
pub fn z_dhra_quadrature(a: OrderStatSpec, b: OrderStatSpec, x: f64) -> Result<f64> {
    let part = |s| {
        TransformedOrderStat::new(ReferenceDistribution::Exponential, s)
            .upper_partial_mean_tol(x, 1e-13)
            .map(|m| m.value())
    };
    Ok(part(a)? - part(b)?)
}

/// `Z(x) = int_x^inf t dF_a(t) - int_x^inf t dF_b(t)` for
/// `F_a, F_b` the laws of `-ln(1 - B_{i:n})` and `-ln(1 - B_{j:m})`.
///
/// Uses the binomial closed form when well conditioned and falls back to
/// quadrature otherwise. `x = +inf` gives the limit 0.
pub fn z_dhra(a: OrderStatSpec, b: OrderStatSpec, x: f64) -> f64 {
    if a == b || x == f64::INFINITY {
        return 0.0;
    }
    let x = x.max(0.0);
    z_dhra_closed_form(a, b, x)
        .unwrap_or_else(|| z_dhra_quadrature(a, b, x).expect("exponential tail integrals converge"))
}

/// Minimum of `f` on `[0, 1]` from a uniform grid with extra points in every
/// cell where `f` changes sign, polished by golden-section search.
pub fn dense_grid_min<F: Fn(f64) -> f64>(f: F, cells: usize) -> (f64, f64) {
    let cells = cells.max(2);
    let h = 1.0 / cells as f64;
    let values: Vec<f64> = (0..=cells).map(|k| f(k as f64 * h)).collect();
    let (mut arg, mut best) = (0usize, values[0]);
    for (k, &v) in values.iter().enumerate() {
        if v < best {
            arg = k;
            best = v;
        }
    }
    let (mut best_x, mut best_v) = (arg as f64 * h, best);
    for k in 0..cells {
        if (values[k] > 0.0) != (values[k + 1] > 0.0) {
            for s in 1..10 {
                let x = (k as f64 + s as f64 / 10.0) * h;
                let v = f(x);
                if v < best_v {
                    best_x = x;
                    best_v = v;
                }
            }
        }
    }
    let lo = (best_x - h).max(0.0);
    let hi = (best_x + h).min(1.0);
    let (x, v) = golden_min(&f, lo, hi);
    if v < best_v {
        (x, v)
    } else {
        (best_x, best_v)
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Star-shaped check result with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsVerdict {
    pub verdict: OrderVerdict,
    /// `Z` at the reference-frame origin; negative means no `>=_ss` relation.
    pub z_at_zero: f64,
    /// Critical points in the beta variable `r`.
    pub roots: RootSet,
    /// Roots for the target `B(i+1, n-i+1) / B(j+1, m-j+1)`, also evaluated.
    pub alt_roots: RootSet,
    /// Minimum of `Z` over endpoints and critical points, and where (in `r`).
    pub candidate_min: f64,
    pub candidate_argmin: f64,
    pub grid_min: f64,
    pub grid_argmin: f64,
    /// Whether the dense grid agrees in sign with the candidate minimum.
    pub grid_agrees: bool,
}

impl SsVerdict {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}

fn critical_roots(a: OrderStatSpec, b: OrderStatSpec) -> (RootSet, RootSet) {
    let (i, n, j, m) = (a.i() as f64, a.n() as f64, b.i() as f64, b.n() as f64);
    let ea = i - j;
    let eb = (n - i) - (m - j);
    let lb = |p: f64, q: f64| log_beta(p, q).expect("positive parameters");
    let ln_c = lb(i, n - i + 1.0) - lb(j, m - j + 1.0);
    let ln_c_alt = lb(i + 1.0, n - i + 1.0) - lb(j + 1.0, m - j + 1.0);
    (solve_t_ln(ea, eb, ln_c), solve_t_ln(ea, eb, ln_c_alt))
}

/// `z_of_r` evaluates `Z` in the beta variable `r in [0, 1]`.
fn ss_check<F: Fn(f64) -> f64 + Sync>(
    class: ShapeClass,
    a: OrderStatSpec,
    b: OrderStatSpec,
    z_of_r: F,
) -> SsVerdict {
    let (roots, alt_roots) = critical_roots(a, b);
    let mut candidates = vec![0.0, 1.0];
    candidates.extend(roots.roots.iter().copied());
    candidates.extend(alt_roots.roots.iter().copied());
    let (mut candidate_argmin, mut candidate_min) = (0.0, f64::INFINITY);
    for &r in &candidates {
        let z = z_of_r(r);
        if z < candidate_min {
            candidate_min = z;
            candidate_argmin = r;
        }
    }
    let z_at_zero = z_of_r(0.0);
    let (grid_argmin, grid_min) = dense_grid_min(&z_of_r, GRID_POINTS);
    let cand_ok = candidate_min >= -SS_TOL;
    let grid_ok = grid_min >= -SS_TOL;
    let grid_agrees = cand_ok == grid_ok;
    let status = if cand_ok && grid_ok {
        VerdictStatus::Holds
    } else {
        VerdictStatus::Undetermined
    };
    SsVerdict {
        verdict: OrderVerdict {
            order: OrderKind::Ss,
            status,
            class,
            a,
            b,
            condition_name: format!("{}: min Z >= 0 over critical points", class.name()),
            lhs_witness: candidate_min.min(grid_min),
            rhs_witness: 0.0,
            rank_condition: z_at_zero >= -SS_TOL,
        },
        z_at_zero,
        roots,
        alt_roots,
        candidate_min,
        candidate_argmin,
        grid_min,
        grid_argmin,
        grid_agrees,
    }
}

fn identical_ss(class: ShapeClass, a: OrderStatSpec) -> SsVerdict {
    let empty = RootSet {
        roots: Vec::new(),
        regime: RootRegime::Monotone,
        a: 0.0,
        b: 0.0,
        c: 1.0,
        ln_c: 0.0,
    };
    SsVerdict {
        verdict: OrderVerdict {
            order: OrderKind::Ss,
            status: VerdictStatus::Holds,
            class,
            a,
            b: a,
            condition_name: format!("{}: identical order statistics", class.name()),
            lhs_witness: 0.0,
            rhs_witness: 0.0,
            rank_condition: true,
        },
        z_at_zero: 0.0,
        roots: empty.clone(),
        alt_roots: empty,
        candidate_min: 0.0,
        candidate_argmin: 0.0,
        grid_min: 0.0,
        grid_argmin: 0.0,
        grid_agrees: true,
    }
}

/// Sufficient condition for `X_{i:n} >=_ss X_{j:m}` when `F` is DDA.
pub fn check_ss_dda(a: OrderStatSpec, b: OrderStatSpec) -> SsVerdict {
    if a == b {
        return identical_ss(ShapeClass::DDA, a);
    }
    ss_check(ShapeClass::DDA, a, b, |r| z_dda(a, b, r))
}

/// Sufficient condition for `X_{i:n} >=_ss X_{j:m}` when `F` is DHRA.
/// `Z` is evaluated at `x = -ln(1 - r)`, with `r = 1` the limit `x -> inf`.
pub fn check_ss_dhra(a: OrderStatSpec, b: OrderStatSpec) -> SsVerdict {
    if a == b {
        return identical_ss(ShapeClass::DHRA, a);
    }
    ss_check(ShapeClass::DHRA, a, b, |r| {
        if r >= 1.0 {
            0.0
        } else {
            z_dhra(a, b, -(-r).ln_1p())
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionCell {
    /// `X_{i:n} >=_ss X_{j:m}` via first-order dominance.
    #[serde(rename = "HoldsSS_ij")]
    HoldsSsIj,
    /// `X_{j:m} >=_ss X_{i:n}` via first-order dominance.
    #[serde(rename = "HoldsSS_ji")]
    HoldsSsJi,
    /// Identical order statistics.
    #[serde(rename = "HoldsSS_both")]
    HoldsSsBoth,
    /// `Z(0) < 0`: the means already rule out `X_{i:n} >=_ss X_{j:m}`.
    NoComparability,
    #[serde(rename = "NeedsCheck_Pass")]
    NeedsCheckPass,
    #[serde(rename = "NeedsCheck_Fail")]
    NeedsCheckFail,
}

impl RegionCell {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::HoldsSsIj => "HoldsSS_ij",
            Self::HoldsSsJi => "HoldsSS_ji",
            Self::HoldsSsBoth => "HoldsSS_both",
            Self::NoComparability => "NoComparability",
            Self::NeedsCheckPass => "NeedsCheck_Pass",
            Self::NeedsCheckFail => "NeedsCheck_Fail",
        }
    }
}

impl fmt::Display for RegionCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionEntry {
    pub i: u32,
    pub j: u32,
    pub cell: RegionCell,
}

/// A named polyline in the `(i, j)` plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSeries {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Classification of every `(i, j) in [1, n] x [1, m]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMap {
    pub class: ShapeClass,
    pub n: u32,
    pub m: u32,
    /// Row-major in `(i, j)`.
    pub cells: Vec<RegionEntry>,
}

impl RegionMap {
    pub fn get(&self, i: u32, j: u32) -> Option<RegionCell> {
        if i == 0 || j == 0 || i > self.n || j > self.m {
            return None;
        }
        Some(self.cells[((i - 1) * self.m + (j - 1)) as usize].cell)
    }

    pub fn count(&self, cell: RegionCell) -> usize {
        self.cells.iter().filter(|e| e.cell == cell).count()
    }

    /// CSV with header `i,j,class`, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,class\n");
        for e in &self.cells {
            out.push_str(&format!("{},{},{}\n", e.i, e.j, e.cell));
        }
        out
    }

    /// The first-order dominance line `j = i + m - n` and the `Z(0) = 0`
    /// boundary (`j = (m+1) i / (n+1)` for DDA, a harmonic-sum curve for DHRA).
    pub fn boundary_lines(&self) -> Vec<LineSeries> {
        let (n, m) = (self.n as f64, self.m as f64);
        let st = LineSeries {
            name: "j=i+m-n".into(),
            points: (0..=self.n).map(|i| (i as f64, i as f64 + m - n)).collect(),
        };
        let z0 = match self.class {
            ShapeClass::DHRA => LineSeries {
                name: "Z(0)=0".into(),
                points: (1..=self.n)
                    .map(|i| (i as f64, dhra_zero_mean_line(self.n, self.m, i)))
                    .collect(),
            },
            _ => LineSeries {
                name: "j=(m+1)i/(n+1)".into(),
                points: (0..=self.n)
                    .map(|i| (i as f64, (m + 1.0) * i as f64 / (n + 1.0)))
                    .collect(),
            },
        };
        vec![st, z0]
    }
}

/// Real `j` with `psi(m+1) - psi(m-j+1) = sum_{k=n-i+1}^{n} 1/k`.
fn dhra_zero_mean_line(n: u32, m: u32, i: u32) -> f64 {
    let target = harmonic(n - i + 1, n).expect("valid range");
    let psi_top = digamma(m as f64 + 1.0).expect("positive");
    let g = |j: f64| psi_top - digamma(m as f64 + 1.0 - j).expect("positive") - target;
    let (mut lo, mut hi) = (0.0, m as f64 + 1.0 - 1e-9);
    if g(hi) < 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn region_map<C, P>(
    class: ShapeClass,
    n: u32,
    m: u32,
    mean_below: C,
    passes: P,
) -> Result<RegionMap>
where
    C: Fn(u32, u32) -> bool + Sync,
    P: Fn(OrderStatSpec, OrderStatSpec) -> bool + Sync,
{
    if n == 0 || n > m {
        return Err(Error::InvalidArgument(format!(
            "region map needs 1 <= n <= m, got n={n}, m={m}"
        )));
    }
    let pairs: Vec<(u32, u32)> = (1..=n).flat_map(|i| (1..=m).map(move |j| (i, j))).collect();
    let cells = pairs
        .par_iter()
        .map(|&(i, j)| {
            let a = OrderStatSpec::new(i, n).expect("in range");
            let b = OrderStatSpec::new(j, m).expect("in range");
            let cell = if a == b {
                RegionCell::HoldsSsBoth
            } else if i >= j && n - i <= m - j {
                RegionCell::HoldsSsIj
            } else if i <= j && n - i >= m - j {
                RegionCell::HoldsSsJi
            } else if mean_below(i, j) {
                RegionCell::NoComparability
            } else if passes(a, b) {
                RegionCell::NeedsCheckPass
            } else {
                RegionCell::NeedsCheckFail
            };
            RegionEntry { i, j, cell }
        })
        .collect();
    Ok(RegionMap { class, n, m, cells })
}

/// Region map for DDA parents; cells are evaluated in parallel.
pub fn region_map_dda(n: u32, m: u32) -> Result<RegionMap> {
    let (n64, m64) = (n as u64, m as u64);
    region_map(
        ShapeClass::DDA,
        n,
        m,
        // j/(m+1) > i/(n+1)
        |i, j| j as u64 * (n64 + 1) > i as u64 * (m64 + 1),
        |a, b| check_ss_dda(a, b).holds(),
    )
}

/// Region map for DHRA parents; the `Z(0) < 0` boundary compares
/// `sum_{k=n-i+1}^{n} 1/k` with `sum_{k=m-j+1}^{m} 1/k`.
pub fn region_map_dhra(n: u32, m: u32) -> Result<RegionMap> {
    region_map(
        ShapeClass::DHRA,
        n,
        m,
        |i, j| {
            let ha = harmonic(n - i + 1, n).expect("valid range");
            let hb = harmonic(m - j + 1, m).expect("valid range");
            ha < hb
        },
        |a, b| check_ss_dhra(a, b).holds(),
    )
}
