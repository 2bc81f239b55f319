//! Command-line front end for `tforder`.
//!
//! Every command validates its inputs, computes a report in memory and only
//! then writes it, either to stdout or atomically to `--output`.

pub mod args;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;
use tforder::oracle::mc::{mc_expect_starshaped, McPair, StarFn};
use tforder::oracle::{self, OrderProbe, ProbeVerdict};
use tforder::ssverify::LineSeries;
use tforder::{
    bound_table, check_icv, check_icx, check_mean_dominated_by_orderstat,
    check_mean_dominates_orderstat, check_ss_dda, check_ss_dhra, ecdf_plugin_interval,
    region_map_dda, region_map_dhra, OrderKind, OrderStatSpec, OrderVerdict, ReferenceDistribution,
    RegionMap, ShapeClass, SsVerdict, Transform, TransformedOrderStat, VerdictStatus,
};

pub use args::{Cli, CommandArgs, OrderArg, OutputFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNDETERMINED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] tforder::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            _ => EXIT_ERROR,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parsed and validated invocation.
#[derive(Debug)]
pub struct RunConfig {
    pub command: CommandArgs,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub probe_tol: f64,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> CliResult<Self> {
        if !(cli.probe_tol > 0.0 && cli.probe_tol.is_finite()) {
            return Err(CliError::Usage("--probe-tol must be positive".into()));
        }
        let default_format = match cli.command {
            CommandArgs::Region(_) | CommandArgs::BoundsTable(_) => OutputFormat::Csv,
            _ => OutputFormat::Json,
        };
        Ok(Self {
            format: cli.format.unwrap_or(default_format),
            output: cli.output,
            probe_tol: cli.probe_tol,
            seed: cli.seed,
            command: cli.command,
        })
    }
}

/// Rendered output of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub body: String,
    pub exit_code: i32,
}

impl Report {
    fn done(body: String) -> Self {
        Self {
            body,
            exit_code: EXIT_OK,
        }
    }
}

fn status_code(status: VerdictStatus) -> i32 {
    match status {
        VerdictStatus::Holds => EXIT_OK,
        VerdictStatus::Undetermined => EXIT_UNDETERMINED,
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// `field,value` rows for the scalar parts of a report.
fn key_value_csv(rows: &[(&str, String)]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["field", "value"]).expect("in-memory write");
    for (k, v) in rows {
        w.write_record([*k, v.as_str()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn verdict_rows(v: &OrderVerdict) -> Vec<(&'static str, String)> {
    vec![
        ("order", v.order.to_string()),
        ("class", v.class.to_string()),
        ("a", v.a.to_string()),
        ("b", v.b.to_string()),
        ("status", format!("{:?}", v.status)),
        ("condition", v.condition_name.clone()),
        ("lhs_witness", v.lhs_witness.to_string()),
        ("rhs_witness", v.rhs_witness.to_string()),
        ("rank_condition", v.rank_condition.to_string()),
    ]
}

/// A probe with the verdict recomputed against the configured tolerance.
fn with_tolerance(mut p: OrderProbe, tol: f64) -> OrderProbe {
    p.verdict = if p.min_margin < -tol {
        ProbeVerdict::ViolationFound
    } else {
        ProbeVerdict::ConsistentWithHolds
    };
    p
}

#[derive(Debug, Serialize)]
struct CompareReport<'a> {
    verdict: &'a OrderVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    ss: Option<&'a SsVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    probe: Option<OrderProbe>,
}

fn default_order(class: ShapeClass) -> OrderArg {
    match class.transform() {
        Transform::Concave => OrderArg::Icv,
        Transform::Convex => OrderArg::Icx,
        Transform::StarShaped | Transform::AntiStarShaped => OrderArg::Ss,
    }
}

fn ss_check(class: ShapeClass, a: OrderStatSpec, b: OrderStatSpec) -> CliResult<SsVerdict> {
    match class {
        ShapeClass::DDA => Ok(check_ss_dda(a, b)),
        ShapeClass::DHRA => Ok(check_ss_dhra(a, b)),
        _ => Err(CliError::Usage(format!(
            "order ss needs class DDA or DHRA, got {class}"
        ))),
    }
}

fn need_b(b: Option<OrderStatSpec>, order: &str) -> CliResult<OrderStatSpec> {
    b.ok_or_else(|| CliError::Usage(format!("order {order} needs --b")))
}

pub fn cmd_compare(cfg: &RunConfig, args: &args::CompareArgs) -> CliResult<Report> {
    let class = args.class;
    let order = args.order.unwrap_or_else(|| default_order(class));
    let unsupported =
        |what: &str| CliError::Usage(format!("class {class} does not support order {what}"));

    let mut ss = None;
    let verdict = match order {
        OrderArg::Icv => {
            if !ShapeClass::ICV_CATALOG.contains(&class) {
                return Err(unsupported("icv"));
            }
            check_icv(class, args.a, need_b(args.b, "icv")?)?
        }
        OrderArg::Icx => {
            if !ShapeClass::ICX_CATALOG.contains(&class) {
                return Err(unsupported("icx"));
            }
            check_icx(class, args.a, need_b(args.b, "icx")?)?
        }
        OrderArg::Ss => {
            let v = ss_check(class, args.a, need_b(args.b, "ss")?)?;
            let verdict = v.verdict.clone();
            ss = Some(v);
            verdict
        }
        OrderArg::Mean => {
            if args.b.is_some() {
                return Err(CliError::Usage(
                    "order mean compares --a with the parent; drop --b".into(),
                ));
            }
            match class {
                ShapeClass::ID | ShapeClass::ILOR | ShapeClass::IHR => {
                    check_mean_dominated_by_orderstat(class, args.a)?
                }
                ShapeClass::DD | ShapeClass::DLOR | ShapeClass::DHR | ShapeClass::DRHR => {
                    check_mean_dominates_orderstat(class, args.a)?
                }
                _ => return Err(unsupported("mean")),
            }
        }
        OrderArg::St => return Err(unsupported("st")),
    };

    let probe = if args.with_oracle {
        let g = class.reference();
        let wa = TransformedOrderStat::new(g, verdict.a);
        let wb = TransformedOrderStat::new(g, verdict.b);
        Some(with_tolerance(
            oracle::probe(verdict.order, &wa, &wb, args.grid)?,
            cfg.probe_tol,
        ))
    } else {
        None
    };

    let body = match cfg.format {
        OutputFormat::Json => to_json(&CompareReport {
            verdict: &verdict,
            ss: ss.as_ref(),
            probe: probe.clone(),
        }),
        OutputFormat::Csv => {
            let mut rows = verdict_rows(&verdict);
            if let Some(p) = &probe {
                rows.push(("probe_min_margin", p.min_margin.to_string()));
                rows.push(("probe_argmin", p.argmin.to_string()));
                rows.push(("probe_verdict", format!("{:?}", p.verdict)));
            }
            key_value_csv(&rows)
        }
    };
    Ok(Report {
        body,
        exit_code: status_code(verdict.status),
    })
}

fn lines_csv(lines: &[LineSeries]) -> String {
    let mut out = String::from("series,i,j\n");
    for l in lines {
        for (i, j) in &l.points {
            out.push_str(&format!("{},{i},{j}\n", l.name));
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct RegionReport<'a> {
    #[serde(flatten)]
    map: &'a RegionMap,
    lines: Vec<LineSeries>,
}

pub fn cmd_region(cfg: &RunConfig, args: &args::RegionArgs) -> CliResult<Report> {
    if args.n == 0 || args.n > args.m {
        return Err(CliError::Usage(format!(
            "region needs 1 <= n <= m, got n={}, m={}",
            args.n, args.m
        )));
    }
    if let Some(p) = &args.lines {
        check_writable(p)?;
    }
    let map = match args.class {
        ShapeClass::DDA => region_map_dda(args.n, args.m)?,
        ShapeClass::DHRA => region_map_dhra(args.n, args.m)?,
        c => {
            return Err(CliError::Usage(format!(
                "region needs class DDA or DHRA, got {c}"
            )))
        }
    };
    let lines = map.boundary_lines();
    if let Some(p) = &args.lines {
        write_atomic(p, &lines_csv(&lines))?;
    }
    let body = match cfg.format {
        OutputFormat::Csv => map.to_csv(),
        OutputFormat::Json => to_json(&RegionReport { map: &map, lines }),
    };
    Ok(Report::done(body))
}

pub fn default_table_gs() -> Vec<ReferenceDistribution> {
    use ReferenceDistribution::*;
    vec![LogLogistic1, Exponential, Uniform, NegExponential]
}

pub fn cmd_bounds_table(cfg: &RunConfig, args: &args::BoundsTableArgs) -> CliResult<Report> {
    if args.n == 0 {
        return Err(CliError::Usage("bounds-table needs n >= 1".into()));
    }
    let gs = if args.gs.is_empty() {
        default_table_gs()
    } else {
        args.gs.clone()
    };
    let table = bound_table(args.n, &gs)?;
    let body = match cfg.format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => to_json(&table),
    };
    Ok(Report::done(body))
}

#[derive(Debug, Serialize)]
struct VerifySsReport<'a> {
    #[serde(flatten)]
    check: &'a SsVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    probe: Option<OrderProbe>,
}

pub fn cmd_verify_ss(cfg: &RunConfig, args: &args::VerifySsArgs) -> CliResult<Report> {
    let v = ss_check(args.class, args.a, args.b)?;
    let probe = if args.with_oracle {
        let g = args.class.reference();
        let p = oracle::probe_ss(
            &TransformedOrderStat::new(g, args.a),
            &TransformedOrderStat::new(g, args.b),
            args.grid,
        )?;
        Some(with_tolerance(p, cfg.probe_tol))
    } else {
        None
    };
    let body = match cfg.format {
        OutputFormat::Json => to_json(&VerifySsReport {
            check: &v,
            probe: probe.clone(),
        }),
        OutputFormat::Csv => {
            let mut rows = verdict_rows(&v.verdict);
            rows.extend([
                ("z_at_zero", v.z_at_zero.to_string()),
                ("roots", join(&v.roots.roots)),
                ("alt_roots", join(&v.alt_roots.roots)),
                ("candidate_min", v.candidate_min.to_string()),
                ("candidate_argmin", v.candidate_argmin.to_string()),
                ("grid_min", v.grid_min.to_string()),
                ("grid_argmin", v.grid_argmin.to_string()),
                ("grid_agrees", v.grid_agrees.to_string()),
            ]);
            if let Some(p) = &probe {
                rows.push(("probe_min_margin", p.min_margin.to_string()));
                rows.push(("probe_verdict", format!("{:?}", p.verdict)));
            }
            key_value_csv(&rows)
        }
    };
    Ok(Report {
        body,
        exit_code: status_code(v.verdict.status),
    })
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

/// Reads the first column of a CSV file as observations; a non-numeric first
/// row is treated as a header.
pub fn read_observations(path: &Path) -> CliResult<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut data = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let Some(field) = record.get(0) else { continue };
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(x) if x.is_finite() => data.push(x),
            _ if row == 0 => continue,
            _ => {
                return Err(CliError::Data(format!(
                    "{}: row {}: `{field}` is not a number",
                    path.display(),
                    row + 1
                )))
            }
        }
    }
    Ok(data)
}

#[derive(Debug, Serialize)]
struct DataIntervalReport {
    n: usize,
    i: u32,
    lower_class: ShapeClass,
    upper_class: ShapeClass,
    p_lo: f64,
    p_hi: f64,
    lo: f64,
    hi: f64,
}

pub fn cmd_data_interval(cfg: &RunConfig, args: &args::DataIntervalArgs) -> CliResult<Report> {
    let data = read_observations(&args.data)?;
    if data.is_empty() {
        return Err(tforder::Error::EmptyData.into());
    }
    let s = OrderStatSpec::new(args.i, data.len() as u32)?;
    let iv = ecdf_plugin_interval(&data, s, args.lower, args.upper)?;
    let report = DataIntervalReport {
        n: data.len(),
        i: args.i,
        lower_class: args.lower,
        upper_class: args.upper,
        p_lo: iv.bounds.lo,
        p_hi: iv.bounds.hi,
        lo: iv.lo,
        hi: iv.hi,
    };
    let body = match cfg.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => key_value_csv(&[
            ("n", report.n.to_string()),
            ("i", report.i.to_string()),
            ("lower_class", report.lower_class.to_string()),
            ("upper_class", report.upper_class.to_string()),
            ("p_lo", report.p_lo.to_string()),
            ("p_hi", report.p_hi.to_string()),
            ("lo", report.lo.to_string()),
            ("hi", report.hi.to_string()),
        ]),
    };
    Ok(Report::done(body))
}

#[derive(Debug, Serialize)]
struct ProbeReport {
    g: ReferenceDistribution,
    a: OrderStatSpec,
    b: OrderStatSpec,
    probe: OrderProbe,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<Vec<McPair>>,
}

pub fn cmd_probe(cfg: &RunConfig, args: &args::ProbeArgs) -> CliResult<Report> {
    let order = match args.order {
        OrderArg::Icv => OrderKind::Icv,
        OrderArg::Icx => OrderKind::Icx,
        OrderArg::Ss => OrderKind::Ss,
        OrderArg::St => OrderKind::St,
        OrderArg::Mean => return Err(CliError::Usage("probe orders are st, ss, icx, icv".into())),
    };
    if order == OrderKind::Ss && !args.g.is_nonnegative() {
        return Err(CliError::Usage(format!(
            "the ss probe needs a nonnegative G, got {}",
            args.g
        )));
    }
    if args.mc_samples.is_some() && order != OrderKind::Ss {
        return Err(CliError::Usage("--mc-samples applies to --order ss".into()));
    }
    let wa = TransformedOrderStat::new(args.g, args.a);
    let wb = TransformedOrderStat::new(args.g, args.b);
    let probe = with_tolerance(oracle::probe(order, &wa, &wb, args.grid)?, cfg.probe_tol);
    let monte_carlo = match args.mc_samples {
        Some(samples) => {
            let (lo, hi) = (
                wa.quantile(0.1)?.min(wb.quantile(0.1)?),
                wa.quantile(0.9)?.max(wb.quantile(0.9)?),
            );
            let ts: Vec<f64> = (0..5).map(|k| lo + (hi - lo) * k as f64 / 4.0).collect();
            let fns = StarFn::standard_family(&ts);
            Some(mc_expect_starshaped(&wa, &wb, &fns, samples, cfg.seed)?)
        }
        None => None,
    };
    let exit_code = if probe.verdict == ProbeVerdict::ConsistentWithHolds {
        EXIT_OK
    } else {
        EXIT_UNDETERMINED
    };
    let body = match cfg.format {
        OutputFormat::Json => to_json(&ProbeReport {
            g: args.g,
            a: args.a,
            b: args.b,
            probe,
            monte_carlo,
        }),
        OutputFormat::Csv => {
            let mut out = String::from("x,order,min_margin,argmin,verdict\n");
            for x in &probe.x_grid {
                out.push_str(&format!(
                    "{x},{},{},{},{:?}\n",
                    probe.order, probe.min_margin, probe.argmin, probe.verdict
                ));
            }
            out
        }
    };
    Ok(Report { body, exit_code })
}

/// Runs the configured command without writing anything.
pub fn run(cfg: &RunConfig) -> CliResult<Report> {
    if let Some(p) = &cfg.output {
        check_writable(p)?;
    }
    match &cfg.command {
        CommandArgs::Compare(a) => cmd_compare(cfg, a),
        CommandArgs::Region(a) => cmd_region(cfg, a),
        CommandArgs::BoundsTable(a) => cmd_bounds_table(cfg, a),
        CommandArgs::VerifySs(a) => cmd_verify_ss(cfg, a),
        CommandArgs::DataInterval(a) => cmd_data_interval(cfg, a),
        CommandArgs::Probe(a) => cmd_probe(cfg, a),
    }
}

fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

fn check_writable(path: &Path) -> CliResult<()> {
    let dir = parent_dir(path);
    if !dir.is_dir() {
        return Err(CliError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "parent directory does not exist",
            ),
        });
    }
    Ok(())
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp = tempfile::NamedTempFile::new_in(parent_dir(path)).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Parses `args`, runs the command, writes the output and returns the exit
/// code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| {
        let report = run(&cfg)?;
        match &cfg.output {
            Some(p) => write_atomic(p, &report.body)?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(report.body.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Io {
                        path: PathBuf::from("<stdout>"),
                        source,
                    })?;
            }
        }
        Ok(report.exit_code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("tforder: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn observations(contents: &str) -> CliResult<Vec<f64>> {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        read_observations(f.path())
    }

    #[test]
    fn header_blank_lines_and_extra_columns() {
        assert_eq!(
            observations("x\n1.5\n\n2,ignored\n 3 \n").unwrap(),
            vec![1.5, 2.0, 3.0]
        );
        assert_eq!(observations("0.5\n0.25\n").unwrap(), vec![0.5, 0.25]);
        assert!(observations("").unwrap().is_empty());
    }

    #[test]
    fn non_numbers_after_the_first_row_are_errors() {
        assert!(matches!(observations("1\nNaN\n"), Err(CliError::Data(_))));
        assert!(matches!(observations("1\nabc\n"), Err(CliError::Data(_))));
    }

    #[test]
    fn key_value_rows_are_quoted_when_needed() {
        assert_eq!(
            key_value_csv(&[("a", "3,5".into())]),
            "field,value\na,\"3,5\"\n"
        );
    }

    #[test]
    fn bare_file_names_resolve_to_the_working_directory() {
        assert_eq!(parent_dir(Path::new("out.csv")), Path::new("."));
        assert_eq!(parent_dir(Path::new("/tmp/out.csv")), Path::new("/tmp"));
    }
}
