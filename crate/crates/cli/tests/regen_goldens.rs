//! Regenerates the frozen region golden from the quadrature oracle alone.
//!
//! `cargo test -p tforder-cli --test regen_goldens -- --ignored`

use std::path::Path;

use tforder::oracle::probe_ss;
use tforder::quad;
use tforder::specfun::beta_pdf;
use tforder::{OrderStatSpec, ReferenceDistribution, TransformedOrderStat};

fn spec(i: u32, n: u32) -> OrderStatSpec {
    OrderStatSpec::new(i, n).unwrap()
}

fn tail(s: OrderStatSpec, x: f64) -> f64 {
    let (p, q) = s.beta_params();
    quad::integrate(|t| t * beta_pdf(t, p, q).unwrap(), x, 1.0, 1e-14)
        .unwrap()
        .value
}

/// Worst tail-integral margin on the pooled quantile grid and on a uniform
/// grid of 2001 points.
fn oracle_min(a: OrderStatSpec, b: OrderStatSpec) -> f64 {
    let g = ReferenceDistribution::Uniform;
    let p = probe_ss(
        &TransformedOrderStat::new(g, a),
        &TransformedOrderStat::new(g, b),
        400,
    )
    .unwrap();
    let dense = (0..=2000)
        .map(|k| {
            let x = k as f64 / 2000.0;
            tail(a, x) - tail(b, x)
        })
        .fold(f64::INFINITY, f64::min);
    p.min_margin.min(dense)
}

fn oracle_cell(i: u32, n: u32, j: u32, m: u32) -> &'static str {
    if i == j && n == m {
        "HoldsSS_both"
    } else if i >= j && n - i <= m - j {
        "HoldsSS_ij"
    } else if i <= j && n - i >= m - j {
        "HoldsSS_ji"
    } else if (j * (n + 1)) > (i * (m + 1)) {
        // the means already disagree
        "NoComparability"
    } else if oracle_min(spec(i, n), spec(j, m)) >= -1e-12 {
        "NeedsCheck_Pass"
    } else {
        "NeedsCheck_Fail"
    }
}

#[test]
#[ignore]
fn regenerate_region_dda_20_30() {
    let (n, m) = (20, 30);
    let mut out = String::from("i,j,class\n");
    for i in 1..=n {
        for j in 1..=m {
            out.push_str(&format!("{i},{j},{}\n", oracle_cell(i, n, j, m)));
        }
    }
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/region_dda_20_30.csv");
    std::fs::write(path, out).unwrap();
}
