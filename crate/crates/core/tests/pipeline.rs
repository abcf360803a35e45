use cfinsler::classify::{classify_points, summarize, Flag, ToleranceConfig};
use cfinsler::identities::{run_suites, PointData, Suite};
use cfinsler::report::{
    from_json, point_record, scan_header, scan_row, to_json, write_scan_csv, PointRecord,
    VerifyDocument, VerifyPoint,
};
use cfinsler::sampling::sample_points;
use cfinsler::{Geometry, MetricSpec, Point};

const RANDERS: &str = "\
# Randers metric on the Hartogs triangle, written out by hand
let D = abs2(z1) - abs2(z2)
let beta = (z2*e1 - z1*e2)/D
let a2 = abs2(e1)/(1 - abs2(z1))^2 + abs2(beta)
let F = sqrt(a2) + sqrt(abs2(beta))
L = F^2
";

fn point() -> Point {
    Point::from_parts((0.5, 0.1), (0.1, -0.05), (1.0, 0.2), (0.4, -0.3))
}

#[test]
fn user_metric_matches_builtin() {
    let user = MetricSpec::from_dsl("randers-file", RANDERS).unwrap();
    let builtin = MetricSpec::builtin("hartogs-randers", &[]).unwrap();
    let a = PointData::new(&user, &point(), 6).unwrap();
    let b = PointData::new(&builtin, &point(), 6).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert!((a.geo.g[i][j].value() - b.geo.g[i][j].value()).norm() < 1e-13);
        }
    }
    for (x, y) in [
        (&a.inv.i, &b.inv.i),
        (&a.inv.k, &b.inv.k),
        (&a.inv.w, &b.inv.w),
    ] {
        assert!((x.value() - y.value()).norm() < 1e-11);
    }
}

#[test]
fn suites_hold_on_user_metric() {
    let m = MetricSpec::from_dsl("randers-file", RANDERS).unwrap();
    let pd = PointData::new(&m, &point(), 6).unwrap();
    for rep in run_suites(&Suite::ALL, &m, &pd).unwrap() {
        assert!(rep.passed(1e-7), "{:?}", rep.worst());
    }
}

#[test]
fn record_survives_json() {
    let m = MetricSpec::builtin("antonelli-shimada", &[]).unwrap();
    let p = sample_points(&m, 1, 3).unwrap()[0];
    let rec = point_record(&m, 0, &p, 6, &ToleranceConfig::default()).unwrap();
    let text = to_json(&rec);
    let back: PointRecord = from_json(&text).unwrap();
    assert_eq!(to_json(&back), text);
    assert!(back.classification.is_some());
}

#[test]
fn classification_is_consistent_on_samples() {
    let m = MetricSpec::builtin("hartogs-kropina", &[]).unwrap();
    let pts = sample_points(&m, 12, 11).unwrap();
    let cls = classify_points(&m, &pts, 6, &ToleranceConfig::default()).unwrap();
    let agg = summarize(&cls);
    assert_eq!(agg.inconsistent_points, 0);
    assert_eq!(agg.flags[&Flag::Berwald].yes, 12);
    assert_eq!(agg.flags[&Flag::PurelyHermitian].no, 12);
}

#[test]
fn verify_document_passes_on_euclidean() {
    let m = MetricSpec::builtin("euclidean", &[]).unwrap();
    let points: Vec<VerifyPoint> = sample_points(&m, 4, 1)
        .unwrap()
        .into_iter()
        .enumerate()
        .map(|(index, point)| {
            let pd = PointData::new(&m, &point, 6).unwrap();
            VerifyPoint {
                index,
                point,
                suites: run_suites(&Suite::ALL, &m, &pd).unwrap(),
            }
        })
        .collect();
    let doc = VerifyDocument::new(&m, 6, Some(1), 1e-7, points);
    assert!(doc.passed);
    assert_eq!(doc.summary.len(), Suite::ALL.len());
}

#[test]
fn scan_csv_has_one_line_per_point() {
    let m = MetricSpec::builtin("hartogs-hermitian", &[]).unwrap();
    let tol = ToleranceConfig::default();
    let pts = [
        point(),
        Point::from_parts((0.1, 0.0), (0.5, 0.0), (1.0, 0.0), (1.0, 0.0)),
    ];
    let rows: Vec<Vec<String>> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            scan_row(
                i,
                p,
                &point_record(&m, i, p, 5, &tol).map_err(|e| e.to_string()),
            )
        })
        .collect();
    let mut out = Vec::new();
    write_scan_csv(&mut out, &rows).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0].split(',').count(), scan_header().len());
    // second point lies outside the Hartogs triangle
    assert!(
        lines[2].contains("domain") || lines[2].contains("outside"),
        "{}",
        lines[2]
    );
}

#[test]
fn order_budget_is_reported() {
    let m = MetricSpec::builtin("hartogs-randers", &[]).unwrap();
    let geo = Geometry::new(&m, &point(), 3).unwrap();
    assert!(PointData::from_geometry(geo).is_err());
}
