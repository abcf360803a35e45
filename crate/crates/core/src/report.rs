//! Report documents, their JSON form (17 significant digits, byte-stable round trip)
//! and the CSV rows of a grid scan.

use std::collections::BTreeMap;
use std::io;

use num_complex::Complex64;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::classify::{
    classify_data, Aggregate, Flag, InvariantValues, PointClassification, ToleranceConfig,
    MIN_ORDER,
};
use crate::curvature::Sectional;
use crate::error::Result;
use crate::fd::{FdComparison, FdReport};
use crate::frame::HSCALAR_NAMES;
use crate::identities::{run_suite, PointData, Suite, SuiteReport};
use crate::metric::{MetricSource, MetricSpec};
use crate::point::Point;

type C = Complex64;

/// Bumped on any change of keys in the documents below.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricEcho {
    pub name: String,
    pub source: MetricSource,
    pub program: String,
    pub domain: Vec<String>,
}

impl MetricEcho {
    pub fn new(spec: &MetricSpec) -> MetricEcho {
        MetricEcho {
            name: spec.name.clone(),
            source: spec.source.clone(),
            program: spec.program_text.clone(),
            domain: spec.domain.iter().map(|d| d.description.clone()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub point: Point,
    #[serde(rename = "L")]
    pub lagrangian: f64,
    #[serde(rename = "F")]
    pub finsler: f64,
    /// `g_{11̄}, g_{12̄}, g_{21̄}, g_{22̄}` as `[re, im]`.
    pub g: Vec<[f64; 2]>,
    pub det_g: f64,
    #[serde(rename = "A")]
    pub a: C,
    #[serde(rename = "B")]
    pub b: C,
    /// `J U V X O Y E H`
    pub horizontal: BTreeMap<String, C>,
    pub invariants: InvariantValues,
    pub sectional: Sectional,
    /// Present when the order allows classification.
    pub classification: Option<PointClassification>,
    /// Max residual of every suite the order allows.
    pub suites: BTreeMap<Suite, f64>,
}

/// Everything reported at one point. Suites and classification that need a higher jet
/// order than `order` are left out.
pub fn point_record(
    spec: &MetricSpec,
    index: usize,
    point: &Point,
    order: usize,
    tol: &ToleranceConfig,
) -> Result<PointRecord> {
    spec.check_domain(point)?;
    let pd = PointData::new(spec, point, order)?;
    let (geo, fr) = (&pd.geo, &pd.fr);
    let classification = if order >= MIN_ORDER {
        Some(classify_data(&pd, tol)?)
    } else {
        None
    };
    let mut suites = BTreeMap::new();
    for s in Suite::ALL.into_iter().filter(|s| s.min_order() <= order) {
        suites.insert(s, run_suite(s, spec, &pd)?.max_residual());
    }
    Ok(PointRecord {
        index,
        point: *point,
        lagrangian: geo.lag.value().re,
        finsler: geo.fin.value().re,
        g: geo
            .g
            .iter()
            .flatten()
            .map(|x| [x.value().re, x.value().im])
            .collect(),
        det_g: geo.det.value().re,
        a: fr.a.value(),
        b: fr.b.value(),
        horizontal: HSCALAR_NAMES
            .iter()
            .zip(fr.hs.as_array())
            .map(|(n, x)| (n.to_string(), x.value()))
            .collect(),
        invariants: InvariantValues {
            i: pd.inv.i.value(),
            k: pd.inv.k.value(),
            w: pd.inv.w.value(),
        },
        sectional: Sectional::new(fr, &pd.curv, &pd.inv),
        classification,
        suites,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub metric: MetricEcho,
    pub order: usize,
    pub seed: Option<u64>,
    pub tolerance: ToleranceConfig,
    pub points: Vec<PointRecord>,
    pub aggregate: Option<Aggregate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyPoint {
    pub index: usize,
    pub point: Point,
    pub suites: Vec<SuiteReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub max_residual: f64,
    /// Name of the worst check and the index of its point.
    pub worst_check: Option<String>,
    pub worst_point: Option<usize>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyDocument {
    pub schema_version: u32,
    pub metric: MetricEcho,
    pub order: usize,
    pub seed: Option<u64>,
    pub tol: f64,
    pub points: Vec<VerifyPoint>,
    pub summary: Vec<SuiteSummary>,
    pub passed: bool,
}

impl VerifyDocument {
    pub fn new(
        spec: &MetricSpec,
        order: usize,
        seed: Option<u64>,
        tol: f64,
        points: Vec<VerifyPoint>,
    ) -> VerifyDocument {
        let mut summary: Vec<SuiteSummary> = Vec::new();
        for vp in &points {
            for rep in &vp.suites {
                let pos = match summary.iter().position(|s| s.suite == rep.suite) {
                    Some(p) => p,
                    None => {
                        summary.push(SuiteSummary {
                            suite: rep.suite,
                            max_residual: 0.0,
                            worst_check: None,
                            worst_point: None,
                            passed: true,
                        });
                        summary.len() - 1
                    }
                };
                let s = &mut summary[pos];
                s.passed &= rep.passed(tol);
                if let Some(w) = rep.worst() {
                    if s.worst_check.is_none() || !(w.residual <= s.max_residual) {
                        s.max_residual = w.residual;
                        s.worst_check = Some(w.name.clone());
                        s.worst_point = Some(vp.index);
                    }
                }
            }
        }
        let passed = summary.iter().all(|s| s.passed);
        VerifyDocument {
            schema_version: SCHEMA_VERSION,
            metric: MetricEcho::new(spec),
            order,
            seed,
            tol,
            points,
            summary,
            passed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdDocument {
    pub schema_version: u32,
    pub metric: MetricEcho,
    pub order: usize,
    pub step: f64,
    pub points: Vec<FdReport>,
    /// Order `order` against order `order + 2`, per point.
    pub truncation: Vec<Vec<FdComparison>>,
    pub max_rel_deviation: f64,
    pub max_truncation_deviation: f64,
}

/// Writes every finite float as `d.dddddddddddddddde±x` (17 significant digits); the
/// output parses back to the same bits and re-serializes to the same bytes.
struct Digits17 {
    pretty: serde_json::ser::PrettyFormatter<'static>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $t:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $t)*) -> io::Result<()> {
                self.pretty.$name(w $(, $arg)*)
            }
        )*
    };
}

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let fmt = Digits17 {
        pretty: serde_json::ser::PrettyFormatter::new(),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    value
        .serialize(&mut ser)
        .expect("report types serialize infallibly");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> serde_json::Result<T> {
    serde_json::from_str(text)
}

fn g17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

/// Fixed header of the scan CSV.
pub fn scan_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "index", "z1_re", "z1_im", "z2_re", "z2_im", "eta1_re", "eta1_im", "eta2_re", "eta2_im",
        "L", "F",
    ]
    .map(String::from)
    .to_vec();
    for q in ["I", "K", "W"] {
        h.push(format!("{q}_re"));
        h.push(format!("{q}_im"));
    }
    for s in ["Kv_l", "Kv_m", "Kh_lambda", "Kh_mu"] {
        h.push(format!("{s}_contraction"));
        h.push(format!("{s}_invariant"));
    }
    h.extend(Flag::ALL.iter().map(|f| f.name().to_string()));
    h.push("special_form".into());
    h.push("error".into());
    h
}

/// One CSV row; a failed point keeps its coordinates and fills only `error`.
pub fn scan_row(
    index: usize,
    point: &Point,
    rec: &std::result::Result<PointRecord, String>,
) -> Vec<String> {
    let mut row = vec![index.to_string()];
    for c in point.z.iter().chain(&point.eta) {
        row.push(g17(c.re));
        row.push(g17(c.im));
    }
    let width = scan_header().len();
    match rec {
        Ok(r) => {
            row.push(g17(r.lagrangian));
            row.push(g17(r.finsler));
            for c in [r.invariants.i, r.invariants.k, r.invariants.w] {
                row.push(g17(c.re));
                row.push(g17(c.im));
            }
            let s = &r.sectional;
            for p in [s.kv_l, s.kv_m, s.kh_lambda, s.kh_mu] {
                row.push(g17(p.contraction));
                row.push(g17(p.invariant));
            }
            match &r.classification {
                Some(c) => {
                    row.extend(Flag::ALL.iter().map(|f| c.verdict(*f).name().to_string()));
                    row.push(c.special_form.verdict.name().to_string());
                }
                None => row.extend(std::iter::repeat_n(String::new(), Flag::ALL.len() + 1)),
            }
            row.push(String::new());
        }
        Err(e) => {
            row.resize(width - 1, String::new());
            row.push(e.clone());
        }
    }
    row
}

pub fn write_scan_csv<W: io::Write>(out: W, rows: &[Vec<String>]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(scan_header())?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> ReportDocument {
        let m = MetricSpec::builtin("antonelli-shimada", &[("sigma".into(), "0".into())]).unwrap();
        let p: Point = "z=0,0; eta=1,1".parse().unwrap();
        let tol = ToleranceConfig::default();
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            metric: MetricEcho::new(&m),
            order: 6,
            seed: None,
            tolerance: tol.clone(),
            points: vec![point_record(&m, 0, &p, 6, &tol).unwrap()],
            aggregate: None,
        }
    }

    #[test]
    fn seventeen_digits() {
        let text = to_json(&doc());
        assert!(text.contains("1.4142135623730951e0"), "I missing");
        assert!(text.contains("\"schema_version\": 1"));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let text = to_json(&doc());
        let back: ReportDocument = from_json(&text).unwrap();
        assert_eq!(to_json(&back), text);
    }

    #[test]
    fn scan_rows_have_header_width() {
        let d = doc();
        let p = d.points[0].point;
        let ok = scan_row(0, &p, &Ok(d.points[0].clone()));
        let bad = scan_row(1, &p, &Err("domain violation".into()));
        assert_eq!(ok.len(), scan_header().len());
        assert_eq!(bad.len(), scan_header().len());
        assert_eq!(bad.last().unwrap(), "domain violation");
        let mut buf = Vec::new();
        write_scan_csv(&mut buf, &[ok, bad]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 3);
    }

    #[test]
    fn low_order_skips_classification() {
        let m = MetricSpec::builtin("euclidean", &[]).unwrap();
        let p: Point = "z=0,0; eta=1,0".parse().unwrap();
        let r = point_record(&m, 0, &p, 4, &ToleranceConfig::default()).unwrap();
        assert!(r.classification.is_none());
        assert!(!r.suites.contains_key(&Suite::Bianchi));
        assert!(r.suites.contains_key(&Suite::Frames));
    }
}
