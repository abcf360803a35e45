use std::path::PathBuf;

use cfinsler::classify::{classify_points, summarize, ClassificationReport, ToleranceConfig};
use cfinsler::fd::{fd_check, truncation_check, FdComparison, FdReport};
use cfinsler::identities::{run_suites, PointData};
use cfinsler::report::{
    point_record, scan_row, to_json, write_scan_csv, FdDocument, MetricEcho, PointRecord,
    ReportDocument, VerifyDocument, VerifyPoint, SCHEMA_VERSION,
};
use cfinsler::{Point, BUILTINS, MAX_ORDER};
use rayon::prelude::*;

use crate::config::{parse_suites, Command, Failure, Format, RunConfig};
use crate::text;

pub const VERIFY_TOL: f64 = 1e-7;
pub const FD_TOL: f64 = 1e-5;

/// What a command prints, and whether it counts as a pass.
pub struct Output {
    pub body: String,
    pub passed: bool,
}

fn ok(body: String) -> Output {
    Output { body, passed: true }
}

pub fn dispatch(cmd: Command) -> Result<(Output, Option<PathBuf>), Failure> {
    let (cfg, out) = match cmd {
        Command::List { format } => return Ok((list(format)?, None)),
        Command::Report(c) => {
            let cfg = RunConfig::resolve(c, None, Format::Json)?;
            let out = report(&cfg)?;
            (cfg, out)
        }
        Command::Verify { common, suites } => {
            let cfg = RunConfig::resolve(common, Some(10), Format::Json)?;
            let out = verify(&cfg, &suites)?;
            (cfg, out)
        }
        Command::Classify(c) => {
            let cfg = RunConfig::resolve(c, Some(20), Format::Json)?;
            let out = classify(&cfg)?;
            (cfg, out)
        }
        Command::Scan(c) => {
            let cfg = RunConfig::resolve(c, None, Format::Csv)?;
            let out = scan(&cfg)?;
            (cfg, out)
        }
        Command::FdCheck { common, step } => {
            let cfg = RunConfig::resolve(common, Some(5), Format::Json)?;
            let out = fd(&cfg, step)?;
            (cfg, out)
        }
    };
    Ok((out, cfg.out))
}

fn list(format: Format) -> Result<Output, Failure> {
    match format {
        Format::Text => Ok(ok(text::builtins())),
        Format::Json => Ok(ok(to_json(&BUILTINS.to_vec()))),
        Format::Csv => Err(Failure::Usage("list supports --format text|json".into())),
    }
}

/// Runs `f` over the points in parallel and returns the results in index order.
fn per_point<T: Send>(points: &[Point], f: impl Fn(usize, &Point) -> T + Sync + Send) -> Vec<T> {
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| f(i, p))
        .collect()
}

/// The first error by point index, so failures do not depend on scheduling.
fn first_error<T>(
    results: Vec<Result<T, cfinsler::Error>>,
    points: &[Point],
) -> Result<Vec<T>, Failure> {
    let mut out = Vec::with_capacity(results.len());
    for (r, p) in results.into_iter().zip(points) {
        match r {
            Ok(x) => out.push(x),
            Err(e) => return Err(Failure::AtPoint(out.len(), *p, e)),
        }
    }
    Ok(out)
}

fn tolerance(cfg: &RunConfig) -> Result<ToleranceConfig, Failure> {
    let t = cfg.tol.map(ToleranceConfig::with_tol).unwrap_or_default();
    t.validate()?;
    Ok(t)
}

fn records(
    cfg: &RunConfig,
    points: &[Point],
    tol: &ToleranceConfig,
) -> Vec<Result<PointRecord, cfinsler::Error>> {
    per_point(points, |i, p| point_record(&cfg.spec, i, p, cfg.order, tol))
}

fn report(cfg: &RunConfig) -> Result<Output, Failure> {
    let tol = tolerance(cfg)?;
    let points = cfg.points()?;
    let recs = records(cfg, &points, &tol);
    if cfg.format == Format::Csv {
        let rows: Vec<_> = recs
            .iter()
            .zip(&points)
            .enumerate()
            .map(|(i, (r, p))| scan_row(i, p, &r.clone().map_err(|e| e.to_string())))
            .collect();
        return csv(&rows);
    }
    let recs = first_error(recs, &points)?;
    let classes: Option<Vec<_>> = recs.iter().map(|r| r.classification.clone()).collect();
    let doc = ReportDocument {
        schema_version: SCHEMA_VERSION,
        metric: MetricEcho::new(&cfg.spec),
        order: cfg.order,
        seed: cfg.seed(),
        tolerance: tol,
        aggregate: classes.filter(|c| c.len() > 1).map(|c| summarize(&c)),
        points: recs,
    };
    Ok(ok(match cfg.format {
        Format::Text => text::report(&doc),
        _ => to_json(&doc),
    }))
}

fn verify(cfg: &RunConfig, names: &[String]) -> Result<Output, Failure> {
    cfg.require_format(&[Format::Json, Format::Text], "verify")?;
    let suites = parse_suites(names)?;
    let tol = cfg.tol.unwrap_or(VERIFY_TOL);
    let points = cfg.points()?;
    let results = per_point(
        &points,
        |index, p| -> Result<VerifyPoint, cfinsler::Error> {
            cfg.spec.check_domain(p)?;
            let pd = PointData::new(&cfg.spec, p, cfg.order)?;
            Ok(VerifyPoint {
                index,
                point: *p,
                suites: run_suites(&suites, &cfg.spec, &pd)?,
            })
        },
    );
    let doc = VerifyDocument::new(
        &cfg.spec,
        cfg.order,
        cfg.seed(),
        tol,
        first_error(results, &points)?,
    );
    let body = match cfg.format {
        Format::Text => text::verify(&doc),
        _ => to_json(&doc),
    };
    Ok(Output {
        passed: doc.passed,
        body,
    })
}

fn classify(cfg: &RunConfig) -> Result<Output, Failure> {
    cfg.require_format(&[Format::Json, Format::Text], "classify")?;
    let tol = tolerance(cfg)?;
    let points = cfg.points()?;
    let classes = classify_points(&cfg.spec, &points, cfg.order, &tol)?;
    let rep = ClassificationReport::new(&cfg.spec, cfg.order, cfg.seed(), &tol, classes);
    Ok(ok(match cfg.format {
        Format::Text => text::classify(&rep),
        _ => to_json(&rep),
    }))
}

fn csv(rows: &[Vec<String>]) -> Result<Output, Failure> {
    let mut buf = Vec::new();
    write_scan_csv(&mut buf, rows).map_err(|e| Failure::Io(format!("csv: {e}")))?;
    Ok(ok(
        String::from_utf8(buf).map_err(|e| Failure::Io(format!("csv: {e}")))?
    ))
}

fn scan(cfg: &RunConfig) -> Result<Output, Failure> {
    cfg.require_format(&[Format::Csv], "scan")?;
    let tol = tolerance(cfg)?;
    let points = cfg.points()?;
    let rows: Vec<_> = records(cfg, &points, &tol)
        .into_iter()
        .zip(&points)
        .enumerate()
        .map(|(i, (r, p))| scan_row(i, p, &r.map_err(|e| e.to_string())))
        .collect();
    csv(&rows)
}

fn fd(cfg: &RunConfig, step: f64) -> Result<Output, Failure> {
    cfg.require_format(&[Format::Json, Format::Text], "fd-check")?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Failure::Usage(format!(
            "--step must be positive, got {step}"
        )));
    }
    let tol = cfg.tol.unwrap_or(FD_TOL);
    let points = cfg.points()?;
    let hi = (cfg.order + 2).min(MAX_ORDER);
    let results = per_point(
        &points,
        |_, p| -> Result<(FdReport, Vec<FdComparison>), cfinsler::Error> {
            cfg.spec.check_domain(p)?;
            let rep = fd_check(&cfg.spec, p, cfg.order, step)?;
            let trunc = if hi > cfg.order {
                truncation_check(&cfg.spec, p, cfg.order, hi)?
            } else {
                Vec::new()
            };
            Ok((rep, trunc))
        },
    );
    let (reports, truncation): (Vec<_>, Vec<_>) =
        first_error(results, &points)?.into_iter().unzip();
    let worst = |xs: &mut dyn Iterator<Item = f64>| {
        xs.fold(0.0, |a: f64, b| {
            if a.is_nan() || b.is_nan() {
                f64::NAN
            } else {
                a.max(b)
            }
        })
    };
    let doc = FdDocument {
        schema_version: SCHEMA_VERSION,
        metric: MetricEcho::new(&cfg.spec),
        order: cfg.order,
        step,
        max_rel_deviation: worst(&mut reports.iter().map(FdReport::max_rel_deviation)),
        max_truncation_deviation: worst(
            &mut truncation.iter().flatten().map(|c| c.max_rel_deviation),
        ),
        points: reports,
        truncation,
    };
    let body = match cfg.format {
        Format::Text => text::fd(&doc, tol),
        _ => to_json(&doc),
    };
    Ok(Output {
        passed: doc.max_rel_deviation <= tol,
        body,
    })
}
