//! Plain-text renderings for terminals. JSON stays the full-precision format.

use std::fmt::Write;

use cfinsler::classify::{ClassificationReport, Flag, FlagSummary};
use cfinsler::report::{FdDocument, ReportDocument, VerifyDocument};
use cfinsler::BUILTINS;
use num_complex::Complex64;

/// Shortest round-trip form, scientific when tiny, and no `-0`.
fn r(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x.abs() < 1e-4 || x.abs() >= 1e15 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn c(z: Complex64) -> String {
    if z.im == 0.0 {
        r(z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", r(z.re), r(-z.im))
    } else {
        format!("{}+{}i", r(z.re), r(z.im))
    }
}

pub fn builtins() -> String {
    let mut s = String::new();
    for b in BUILTINS {
        let _ = writeln!(s, "{}", b.name);
        let _ = writeln!(s, "  metric  {}", b.lagrangian);
        let _ = writeln!(s, "  params  {}", b.params);
        let _ = writeln!(s, "  domain  {}", b.domain);
    }
    s
}

pub fn report(doc: &ReportDocument) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "metric {}  order {}  points {}",
        doc.metric.name,
        doc.order,
        doc.points.len()
    );
    for rec in &doc.points {
        let _ = writeln!(s, "point {}  {}", rec.index, rec.point);
        let _ = writeln!(
            s,
            "  L={}  F={}  det_g={}",
            r(rec.lagrangian),
            r(rec.finsler),
            r(rec.det_g)
        );
        let _ = writeln!(s, "  A={}  B={}", c(rec.a), c(rec.b));
        let h: Vec<String> = rec
            .horizontal
            .iter()
            .map(|(k, v)| format!("{k}={}", c(*v)))
            .collect();
        let _ = writeln!(s, "  {}", h.join("  "));
        let inv = &rec.invariants;
        let _ = writeln!(s, "  I={}  K={}  W={}", c(inv.i), c(inv.k), c(inv.w));
        let sec = &rec.sectional;
        let _ = writeln!(
            s,
            "  sectional  v,l={}  v,m={}  h,lambda={}  h,mu={}",
            r(sec.kv_l.contraction),
            r(sec.kv_m.contraction),
            r(sec.kh_lambda.contraction),
            r(sec.kh_mu.contraction)
        );
        if let Some(cl) = &rec.classification {
            let flags: Vec<String> = cl
                .flags
                .iter()
                .map(|(f, v)| format!("{}={}", f.name(), v.verdict.name()))
                .collect();
            let _ = writeln!(s, "  {}", flags.join(" "));
            if !cl.violations.is_empty() {
                let _ = writeln!(s, "  inconsistent: {}", cl.violations.join("; "));
            }
        }
        if !rec.suites.is_empty() {
            let worst = rec.suites.values().fold(0.0f64, |a, &b| a.max(b));
            let _ = writeln!(s, "  worst identity residual {worst:.3e}");
        }
    }
    if let Some(a) = &doc.aggregate {
        let _ = writeln!(s, "aggregate over {} points", a.points);
        for (f, sum) in &a.flags {
            let _ = writeln!(s, "{}", summary_line(f.name(), sum));
        }
    }
    s
}

fn summary_line(name: &str, f: &FlagSummary) -> String {
    format!(
        "  {name:<18} {:<13} yes {:>3}  no {:>3}  ind {:>3}  {:?}  worst {:.3e}",
        f.verdict.name(),
        f.yes,
        f.no,
        f.indeterminate,
        f.consensus,
        f.worst_residual
    )
    .to_lowercase()
}

pub fn classify(rep: &ClassificationReport) -> String {
    let a = &rep.aggregate;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "metric {}  order {}  points {}  tol {:e}",
        rep.metric, rep.order, a.points, rep.tolerance.pass_tol
    );
    for f in Flag::ALL {
        let _ = writeln!(s, "{}", summary_line(f.name(), &a.flags[&f]));
    }
    let _ = writeln!(s, "{}", summary_line("special_form", &a.special_form));
    let branches: Vec<String> = a
        .branches
        .iter()
        .map(|(b, n)| format!("{b:?}={n}"))
        .collect();
    let _ = writeln!(s, "  branches {}", branches.join(" "));
    let _ = writeln!(s, "  worst I_|k {:.3e}", a.worst_i_horizontal);
    let _ = writeln!(s, "  inconsistent points {}", a.inconsistent_points);
    s
}

pub fn verify(doc: &VerifyDocument) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "metric {}  order {}  points {}  tol {:e}",
        doc.metric.name,
        doc.order,
        doc.points.len(),
        doc.tol
    );
    for sum in &doc.summary {
        let _ = writeln!(
            s,
            "  {:<22} {}  max {:.3e}  {}",
            sum.suite.name(),
            if sum.passed { "pass" } else { "FAIL" },
            sum.max_residual,
            match (&sum.worst_check, sum.worst_point) {
                (Some(c), Some(p)) => format!("worst: {c} at point {p}"),
                _ => String::new(),
            }
        );
    }
    let _ = writeln!(
        s,
        "{}",
        if doc.passed {
            "all suites pass"
        } else {
            "verification failed"
        }
    );
    s
}

pub fn fd(doc: &FdDocument, tol: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "metric {}  order {}  step {:e}",
        doc.metric.name, doc.order, doc.step
    );
    for (i, p) in doc.points.iter().enumerate() {
        let parts: Vec<String> = p
            .comparisons
            .iter()
            .map(|c| format!("{} {:.3e}", c.quantity, c.max_rel_deviation))
            .collect();
        let _ = writeln!(s, "  point {i}  {}", parts.join("  "));
    }
    let _ = writeln!(
        s,
        "max relative deviation {:.3e} (tol {tol:e})",
        doc.max_rel_deviation
    );
    let _ = writeln!(
        s,
        "max truncation deviation {:.3e}",
        doc.max_truncation_deviation
    );
    s
}
