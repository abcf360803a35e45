use std::path::PathBuf;
use std::process::{Command, Output};

use cfinsler::report::{from_json, to_json, ReportDocument};
use serde_json::Value;

const GENERIC: &str = "z=0.5+0.1i,0.1-0.05i; eta=1+0.2i,0.4-0.3i";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfinsler"))
        .args(args)
        .output()
        .unwrap()
}

fn run_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfinsler"))
        .args(args)
        .env(key, val)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(o)).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn c(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn list_shows_builtins() {
    let o = run(&["list"]);
    let s = stdout(&o);
    assert_eq!(code(&o), 0);
    for name in [
        "euclidean",
        "antonelli-shimada",
        "hartogs-randers",
        "hartogs-kropina",
        "hartogs-hermitian",
    ] {
        assert!(s.contains(name), "{name}");
    }
    assert!(s.contains("|z2| < |z1| < 1"));
    assert!(s.contains("sigma"));
    assert_eq!(
        json(&run(&["list", "--format", "json"]))
            .as_array()
            .unwrap()
            .len(),
        5
    );
}

#[test]
fn euclidean_report_has_zero_invariants() {
    let v = json(&run(&[
        "report",
        "--metric",
        "builtin:euclidean",
        "--point",
        "z=0,0; eta=1,0",
    ]));
    assert_eq!(v["schema_version"], 1);
    let inv = &v["points"][0]["invariants"];
    for k in ["i", "k", "w"] {
        assert_eq!(c(&inv[k]), (0.0, 0.0), "{k}");
    }
}

#[test]
fn antonelli_shimada_constant_sigma_has_i_root_two() {
    let o = run(&[
        "report",
        "--metric",
        "builtin:antonelli-shimada",
        "--param",
        "sigma=0",
        "--point",
        "z=0,0; eta=1,1",
    ]);
    let (re, im) = c(&json(&o)["points"][0]["invariants"]["i"]);
    assert!(
        (re - 2f64.sqrt()).abs() < 1e-12 && im.abs() < 1e-12,
        "{re} {im}"
    );
}

#[test]
fn report_json_round_trips() {
    let o = run(&[
        "report",
        "--metric",
        "builtin:hartogs-kropina",
        "--samples",
        "2",
        "--seed",
        "5",
    ]);
    let text = stdout(&o);
    let doc: ReportDocument = from_json(&text).unwrap();
    assert_eq!(to_json(&doc), text);
    assert!(doc.aggregate.is_some());
    assert!(text.contains("e-1") || text.contains("e0"));
}

#[test]
fn randers_generic_point_is_berwald() {
    let v = json(&run(&[
        "report",
        "--metric",
        "builtin:hartogs-randers",
        "--point",
        GENERIC,
    ]));
    assert_eq!(
        v["points"][0]["classification"]["flags"]["berwald"]["verdict"],
        "yes"
    );
}

#[test]
fn exit_codes() {
    let bad_beta = run(&[
        "report",
        "--metric",
        "builtin:hartogs-randers",
        "--point",
        "z=0.5,0.1; eta=1,0.2",
    ]);
    assert_eq!(code(&bad_beta), 2);
    assert!(String::from_utf8_lossy(&bad_beta.stderr).contains("beta"));
    let outside = run(&[
        "report",
        "--metric",
        "builtin:hartogs-hermitian",
        "--point",
        "z=0.1,0.5; eta=1,1",
    ]);
    assert_eq!(code(&outside), 2);
    assert_eq!(
        code(&run(&[
            "report",
            "--metric",
            "builtin:nope",
            "--point",
            GENERIC
        ])),
        3
    );
    assert_eq!(
        code(&run(&[
            "report",
            "--metric",
            "builtin:euclidean",
            "--point",
            "z=1"
        ])),
        3
    );
    assert_eq!(
        code(&run(&[
            "report",
            "--metric",
            "euclidean",
            "--point",
            GENERIC
        ])),
        3
    );
    assert_eq!(
        code(&run(&[
            "report",
            "--metric",
            "builtin:euclidean",
            "--point",
            GENERIC,
            "--order",
            "11"
        ])),
        3
    );
    assert_eq!(
        code(&run(&[
            "verify",
            "--metric",
            "builtin:euclidean",
            "--suite",
            "nope"
        ])),
        3
    );
    assert_eq!(code(&run(&["frobnicate"])), 3);
    assert_eq!(
        code(&run(&[
            "classify",
            "--metric",
            "builtin:euclidean",
            "--samples",
            "2",
            "--format",
            "csv"
        ])),
        3
    );
    let budget = run(&[
        "verify",
        "--metric",
        "builtin:euclidean",
        "--samples",
        "1",
        "--order",
        "5",
        "--suite",
        "bianchi",
    ]);
    assert_eq!(
        code(&budget),
        4,
        "{}",
        String::from_utf8_lossy(&budget.stderr)
    );
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn verify_passes_and_fails() {
    let o = run(&["verify", "--metric", "builtin:euclidean", "--samples", "3"]);
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["summary"].as_array().unwrap().len(), 10);

    let path = tmp("not-homogeneous.fin");
    std::fs::write(
        &path,
        "# negative control\nL = abs2(e1) + sqrt(abs2(e1)) + abs2(e2)\n",
    )
    .unwrap();
    let metric = format!("@{}", path.display());
    let o = run(&[
        "verify",
        "--metric",
        &metric,
        "--suite",
        "homogeneity",
        "--samples",
        "3",
    ]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"][0]["suite"], "homogeneity");
    assert_eq!(v["passed"], false);
}

#[test]
fn classify_randers_is_unanimously_berwald() {
    let v = json(&run(&[
        "classify",
        "--metric",
        "builtin:hartogs-randers",
        "--samples",
        "8",
        "--seed",
        "3",
    ]));
    let b = &v["aggregate"]["flags"]["berwald"];
    assert_eq!(b["yes"], 8);
    assert_eq!(b["consensus"], "unanimous");
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn runs_are_reproducible_and_thread_independent() {
    let args = [
        "classify",
        "--metric",
        "builtin:antonelli-shimada",
        "--samples",
        "6",
        "--seed",
        "9",
    ];
    let a = stdout(&run(&args));
    assert_eq!(a, stdout(&run(&args)));
    assert_eq!(a, stdout(&run_env(&args, "CFINSLER_THREADS", "1")));
    assert_eq!(code(&run_env(&args, "CFINSLER_THREADS", "many")), 3);
}

#[test]
fn scan_keeps_error_rows() {
    let o = run(&[
        "scan",
        "--metric",
        "builtin:hartogs-hermitian",
        "--grid",
        "z1=0.05:0.45:3,0; z2=0.1,0; eta=1,1",
    ]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("index,z1_re"));
    assert!(lines[0].ends_with(",error"));
    assert!(lines[1].contains("domain violation"));
    assert!(lines[3].ends_with(','));
}

#[test]
fn scan_disk_sigma_signs() {
    let o = run(&[
        "scan",
        "--metric",
        "builtin:antonelli-shimada",
        "--param",
        "sigma=disk-log",
        "--grid",
        "z1=-0.4:0.4:3,0.1; z2=0.2,-0.2:0.2:2; eta=1+0.5i,0.3-0.2i",
    ]);
    let s = stdout(&o);
    let mut lines = s.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (k, w) = (col("K_re"), col("W_re"));
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert!(f[k].parse::<f64>().unwrap() > 0.0);
        // W is positive here; the invariant formula gives W > 0 near the origin
        assert!(f[w].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn fd_check_and_out_file() {
    let path = tmp("fd.json");
    let o = run(&[
        "fd-check",
        "--metric",
        "builtin:antonelli-shimada",
        "--samples",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["max_rel_deviation"].as_f64().unwrap() <= 1e-5);
    assert!(v["max_truncation_deviation"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn text_formats_render() {
    let o = run(&[
        "report",
        "--metric",
        "builtin:hartogs-randers",
        "--point",
        GENERIC,
        "--format",
        "text",
    ]);
    assert!(stdout(&o).contains("berwald=yes"));
    let o = run(&[
        "verify",
        "--metric",
        "builtin:hartogs-randers",
        "--samples",
        "2",
        "--format",
        "text",
    ]);
    assert!(stdout(&o).contains("all suites pass"));
    let o = run(&[
        "fd-check",
        "--metric",
        "builtin:euclidean",
        "--samples",
        "2",
        "--format",
        "text",
    ]);
    assert!(stdout(&o).contains("max relative deviation"));
}
