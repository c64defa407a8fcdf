use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use super::plot::{boxplot_svg, BoxSeries};
use super::{ExperimentError, ExperimentKind, RunResult};
use crate::diagnostics::{Domain, ErgodicityReport};
use crate::kv::fmt_f64;

pub const ESTIMATE_COLUMNS: [&str; 10] = [
    "experiment",
    "d",
    "alpha_or_params",
    "method",
    "domain",
    "replicate",
    "estimate",
    "rel_error",
    "std_error",
    "gold",
];

/// One replicate estimate, as written to `estimates.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub experiment: ExperimentKind,
    pub d: usize,
    pub params: String,
    pub method: String,
    pub domain: Domain,
    pub replicate: usize,
    pub estimate: f64,
    pub rel_error: f64,
    pub std_error: f64,
    pub gold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Quartiles {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

/// Quartiles by linear interpolation between order statistics.
pub fn quartiles(values: &[f64]) -> Option<Quartiles> {
    if values.is_empty() || values.iter().any(|v| v.is_nan()) {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (v.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    };
    Some(Quartiles {
        min: v[0],
        q1: q(0.25),
        median: q(0.5),
        q3: q(0.75),
        max: v[v.len() - 1],
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io { path: path.display().to_string(), source }
}

fn csv_err(path: &Path, e: csv::Error) -> ExperimentError {
    ExperimentError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e.to_string()),
    }
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

/// Groups rows into panels `(d, params)` and series `(method, domain)`,
/// keeping first-appearance order.
fn panels(result: &RunResult) -> Vec<((usize, String), Vec<((String, Domain), Vec<&EstimateRow>)>)> {
    let mut out: Vec<((usize, String), Vec<((String, Domain), Vec<&EstimateRow>)>)> = Vec::new();
    for r in &result.rows {
        let key = (r.d, r.params.clone());
        let idx = match out.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                out.push((key, Vec::new()));
                out.len() - 1
            }
        };
        let series = &mut out[idx].1;
        let skey = (r.method.clone(), r.domain);
        match series.iter_mut().find(|(k, _)| *k == skey) {
            Some((_, v)) => v.push(r),
            None => series.push((skey, vec![r])),
        }
    }
    out
}

/// Writes every output of a run into `dir` and returns the paths written.
///
/// `estimates.csv`, `summary.csv`, `gold.csv`, `tuning.csv`, `failures.csv`
/// and one SVG boxplot per panel for the estimation studies;
/// `diagnostics.csv` and `reports.txt` for diagnostics. `config.kv`, when
/// given, records the effective configuration. `timing.txt` holds wall-clock
/// times and is the only file that differs between identical runs.
pub fn emit_outputs(result: &RunResult, dir: &Path, config: Option<&str>) -> Result<Vec<PathBuf>, ExperimentError> {
    let exp = result.experiment;
    if exp != ExperimentKind::Diagnostics && result.rows.is_empty() {
        return Err(ExperimentError::Numerical("run produced no estimates; nothing to emit".into()));
    }
    if exp == ExperimentKind::Diagnostics && result.reports.is_empty() {
        return Err(ExperimentError::Numerical("run produced no reports; nothing to emit".into()));
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    let name = exp.as_str().to_string();
    if let Some(text) = config {
        let p = dir.join("config.kv");
        fs::write(&p, text).map_err(io_err(&p))?;
        written.push(p);
    }
    if exp == ExperimentKind::Diagnostics {
        let p = dir.join("diagnostics.csv");
        let mut rows = Vec::new();
        for lr in &result.reports {
            let r = &lr.report;
            for (series, values) in &r.series {
                for (i, v) in values.iter().enumerate() {
                    let radius = r.radii.get(i).map(|x| fmt_f64(*x)).unwrap_or_default();
                    rows.push(vec![
                        name.clone(),
                        lr.d.to_string(),
                        lr.params.clone(),
                        r.probe.clone(),
                        r.domain.as_str().into(),
                        r.verdict.as_str().into(),
                        series.clone(),
                        i.to_string(),
                        radius,
                        fmt_f64(*v),
                    ]);
                }
            }
        }
        write_csv(
            &p,
            &["experiment", "d", "alpha_or_params", "probe", "domain", "verdict", "series", "index", "radius", "value"],
            rows,
        )?;
        written.push(p);
        let p = dir.join("reports.txt");
        let mut text = String::new();
        for lr in &result.reports {
            text.push_str(&format!("# d={} {}\n", lr.d, lr.params));
            text.push_str(&lr.report.render());
            text.push('\n');
        }
        fs::write(&p, text).map_err(io_err(&p))?;
        written.push(p);
        return Ok(written);
    }

    let p = dir.join("estimates.csv");
    write_csv(
        &p,
        &ESTIMATE_COLUMNS,
        result.rows.iter().map(|r| {
            vec![
                name.clone(),
                r.d.to_string(),
                r.params.clone(),
                r.method.clone(),
                r.domain.as_str().into(),
                r.replicate.to_string(),
                fmt_f64(r.estimate),
                fmt_f64(r.rel_error),
                fmt_f64(r.std_error),
                fmt_f64(r.gold),
            ]
        }),
    )?;
    written.push(p);

    let grouped = panels(result);
    let p = dir.join("summary.csv");
    let mut rows = Vec::new();
    for ((d, params), series) in &grouped {
        for ((method, domain), rs) in series {
            let est: Vec<f64> = rs.iter().map(|r| r.estimate).collect();
            let abs_rel: Vec<f64> = rs.iter().map(|r| r.rel_error.abs()).collect();
            let q = quartiles(&est).expect("finite estimates");
            let qa = quartiles(&abs_rel).expect("finite errors");
            let n = est.len() as f64;
            let mean = est.iter().sum::<f64>() / n;
            let sd = if est.len() > 1 {
                (est.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            rows.push(vec![
                name.clone(),
                d.to_string(),
                params.clone(),
                method.clone(),
                domain.as_str().into(),
                est.len().to_string(),
                fmt_f64(q.min),
                fmt_f64(q.q1),
                fmt_f64(q.median),
                fmt_f64(q.q3),
                fmt_f64(q.max),
                fmt_f64(mean),
                fmt_f64(sd),
                fmt_f64(qa.median),
                fmt_f64(rs[0].gold),
            ]);
        }
    }
    write_csv(
        &p,
        &[
            "experiment", "d", "alpha_or_params", "method", "domain", "count", "min", "q1", "median", "q3", "max", "mean",
            "std_dev", "median_abs_rel_error", "gold",
        ],
        rows,
    )?;
    written.push(p);

    let p = dir.join("gold.csv");
    write_csv(
        &p,
        &["experiment", "d", "alpha_or_params", "gold", "std_error", "source", "quadrature", "quadrature_error"],
        result.golds.iter().map(|g| {
            let (q, qe) = g.quadrature.map(|(a, b)| (fmt_f64(a), fmt_f64(b))).unwrap_or_default();
            vec![name.clone(), g.d.to_string(), g.params.clone(), fmt_f64(g.value), fmt_f64(g.std_error), g.source.clone(), q, qe]
        }),
    )?;
    written.push(p);

    let p = dir.join("tuning.csv");
    write_csv(
        &p,
        &["experiment", "d", "alpha_or_params", "method", "domain", "parameter", "value", "mse", "chosen"],
        result.tuning.iter().map(|t| {
            vec![
                name.clone(),
                t.d.to_string(),
                t.params.clone(),
                t.method.clone(),
                t.domain.as_str().into(),
                t.parameter.clone(),
                fmt_f64(t.value),
                fmt_f64(t.mse),
                t.chosen.to_string(),
            ]
        }),
    )?;
    written.push(p);

    let p = dir.join("failures.csv");
    write_csv(
        &p,
        &["experiment", "d", "alpha_or_params", "method", "domain", "phase", "replicate", "message"],
        result.failures.iter().map(|f| {
            vec![
                name.clone(),
                f.d.to_string(),
                f.params.clone(),
                f.method.clone(),
                f.domain.as_str().into(),
                f.phase.clone(),
                f.replicate.to_string(),
                f.message.clone(),
            ]
        }),
    )?;
    written.push(p);

    // MCMC panels show relative errors, the i.i.d. and pricing panels show estimates
    let show_rel = exp == ExperimentKind::McmcCauchy;
    for ((d, params), series) in &grouped {
        let boxes: Vec<BoxSeries> = series
            .iter()
            .map(|((method, domain), rs)| BoxSeries {
                label: format!("{method} {}", domain.as_str()),
                values: rs.iter().map(|r| if show_rel { r.rel_error } else { r.estimate }).collect(),
            })
            .collect();
        let reference = if show_rel { 0.0 } else { series[0].1[0].gold };
        let title = format!("{} d={d} {params}", exp.as_str());
        let ylabel = if show_rel { "relative error" } else { "estimate" };
        let svg = boxplot_svg(&title, ylabel, &boxes, Some(reference));
        let p = dir.join(format!("{}_d{d}_{}.svg", exp.subcommand(), file_stem(params)));
        fs::write(&p, svg).map_err(io_err(&p))?;
        written.push(p);
    }

    let p = dir.join("timing.txt");
    let mut f = fs::File::create(&p).map_err(io_err(&p))?;
    for (r, t) in result.rows.iter().zip(&result.wall_clock) {
        writeln!(f, "d={} {} {} {} replicate={} seconds={:.6}", r.d, r.params, r.method, r.domain.as_str(), r.replicate, t.as_secs_f64())
            .map_err(io_err(&p))?;
    }
    written.push(p);
    Ok(written)
}

/// Reads `estimates.csv` back.
pub fn parse_estimates_csv(text: &str) -> Result<Vec<EstimateRow>, ExperimentError> {
    let bad = |m: String| ExperimentError::Config(format!("estimates.csv: {m}"));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ESTIMATE_COLUMNS {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let f = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(format!("bad number `{}`", &rec[i])));
        let u = |i: usize| rec[i].parse::<usize>().map_err(|_| bad(format!("bad integer `{}`", &rec[i])));
        rows.push(EstimateRow {
            experiment: ExperimentKind::parse(&rec[0]).ok_or_else(|| bad(format!("unknown experiment `{}`", &rec[0])))?,
            d: u(1)?,
            params: rec[2].to_string(),
            method: rec[3].to_string(),
            domain: Domain::parse(&rec[4]).ok_or_else(|| bad(format!("unknown domain `{}`", &rec[4])))?,
            replicate: u(5)?,
            estimate: f(6)?,
            rel_error: f(7)?,
            std_error: f(8)?,
            gold: f(9)?,
        });
    }
    Ok(rows)
}

/// Reads `reports.txt` back, with the `(d, params)` of each report.
pub fn parse_reports_txt(text: &str) -> Result<Vec<(String, ErgodicityReport)>, ExperimentError> {
    let mut out = Vec::new();
    for block in text.split("\n\n").filter(|b| !b.trim().is_empty()) {
        let target = block
            .lines()
            .find_map(|l| l.strip_prefix("# "))
            .unwrap_or("")
            .to_string();
        let report = crate::diagnostics::parse_reports(block)
            .map_err(|e| ExperimentError::Config(format!("reports.txt: {e}")))?
            .into_iter()
            .next()
            .ok_or_else(|| ExperimentError::Config("reports.txt: empty record".into()))?;
        out.push((target, report));
    }
    Ok(out)
}
