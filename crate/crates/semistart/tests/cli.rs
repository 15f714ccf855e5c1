// printed table values, not approximations of constants
#![allow(clippy::approx_constant)]

use std::path::Path;
use std::process::{Command, Output};

fn semistart(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_semistart"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("SEMISTART_THREADS", t),
        None => cmd.env_remove("SEMISTART_THREADS"),
    };
    cmd.output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = semistart(args, None);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|f| f.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn bench_mise_reproduces_printed_row() {
    let (header, rows) = parse_csv(&ok(&["bench-mise", "--cases", "1", "--n", "100"]));
    assert_eq!(header, ["case", "n", "h_new", "mise_new", "h_trad", "mise_trad", "ratio"]);
    let expect = [1.0, 100.0, 0.7071, 0.0028, 0.4455, 0.0054, 0.5215];
    let tol = [0.0, 0.0, 5e-5, 5e-5, 5e-5, 5e-5, 5e-5];
    for ((v, e), t) in rows[0].iter().zip(expect).zip(tol) {
        assert!((v - e).abs() <= t, "{:?}", rows[0]);
    }
}

#[test]
fn bench_amise_reproduces_printed_row() {
    let (header, rows) = parse_csv(&ok(&["bench-amise", "--cases", "1"]));
    assert_eq!(header, ["case", "rho_trad", "rho_new", "rho1_trad", "rho1_new"]);
    let r = &rows[0];
    assert_eq!((r[0], r[2], r[4]), (1.0, 0.0, 0.0));
    assert!((r[1] - 0.7330).abs() < 5e-5 && (r[3] - 1.8933).abs() < 5e-5, "{r:?}");
}

#[test]
fn bench_outputs_are_valid_and_thread_independent() {
    let args = ["bench-mise", "--cases", "1,2,6", "--n", "25,100"];
    let one = semistart(&args, Some("1"));
    let many = semistart(&args, Some("4"));
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);
    let (_, rows) = parse_csv(std::str::from_utf8(&one.stdout).unwrap());
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().flatten().all(|v| v.is_finite()));
    let (_, rows) = parse_csv(&ok(&["bench-amise"]));
    assert_eq!(rows.len(), 15);
    assert!(rows.iter().flatten().all(|v| v.is_finite()));
}

#[test]
fn estimate_single_point_is_the_normal_density() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    std::fs::write(&data, "0\n").unwrap();
    let text = ok(&["estimate", "--start", "constant", "--h", "1", "--grid", "-1,1,3", data.to_str().unwrap()]);
    let (_, rows) = parse_csv(&text);
    assert!((rows[1][1] - 0.3989423).abs() < 1e-6, "{text}");
}

#[test]
fn identical_arguments_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = |tag: &str| {
        let sample = d.join(format!("s{tag}.csv"));
        let est = d.join(format!("e{tag}.csv"));
        let bw = d.join(format!("b{tag}.json"));
        ok(&["sample", "--case", "6", "--n", "150", "--seed", "9", "--out", sample.to_str().unwrap()]);
        let s = sample.to_str().unwrap();
        ok(&["estimate", "--method", "bcv", "--compare", "--out", est.to_str().unwrap(), s]);
        ok(&["bandwidth", "--method", "plugin", "--out", bw.to_str().unwrap(), s]);
        [sample, est, bw].map(|p| std::fs::read(p).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn sample_reads_mixture_json() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    std::fs::write(&m, r#"{"components":[{"p":0.5,"mu":-10,"sd":0.01},{"p":0.5,"mu":10,"sd":0.01}]}"#).unwrap();
    let text = ok(&["sample", "--mixture", m.to_str().unwrap(), "--n", "50", "--header"]);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["x"]);
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| (r[0].abs() - 10.0).abs() < 0.1));
    std::fs::write(&m, r#"{"components":[{"p":0.5,"mu":0,"sd":1}]}"#).unwrap();
    assert_eq!(semistart(&["sample", "--mixture", m.to_str().unwrap(), "--n", "5"], None).status.code(), Some(1));
}

#[test]
fn bandwidth_json_has_method_h_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.csv");
    ok(&["sample", "--case", "2", "--n", "100", "--out", s.to_str().unwrap()]);
    for method in ["rule_gamma", "rule_delta", "plugin", "bcv", "ucv"] {
        let text = ok(&["bandwidth", "--method", method, s.to_str().unwrap()]);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["method"], method);
        let h = v["h"].as_f64().unwrap();
        assert!(h > 0.0 && h <= v["diagnostics"]["h_os"].as_f64().unwrap() * (1.0 + 1e-12));
    }
}

#[test]
fn regress_and_gof_write_their_columns() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.csv");
    let rows: String = (0..40).map(|i| format!("{},{}\n", i as f64 / 40.0, 1.0 + i as f64 / 20.0)).collect();
    std::fs::write(&p, format!("x,y\n{rows}")).unwrap();
    let (header, out) = parse_csv(&ok(&["regress", "--header", "--h", "0.1", "--grid", "0.2,0.8,7", p.to_str().unwrap()]));
    assert_eq!(header, ["x", "m_hat", "m_classic"]);
    // an exact line is reproduced by the linear start
    for r in &out {
        assert!((r[1] - (1.0 + 2.0 * r[0])).abs() < 1e-4, "{r:?}");
    }
    let s = dir.path().join("s.csv");
    ok(&["sample", "--case", "1", "--n", "200", "--out", s.to_str().unwrap()]);
    let text = ok(&["gof", "--h", "0.5", "--grid", "-1,1,5", s.to_str().unwrap()]);
    assert!(text.starts_with("x,r_hat,log_r,z\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn exit_codes_distinguish_usage_from_domain_errors() {
    assert_eq!(semistart(&["estimate", "--h", "1", "--method", "bcv"], None).status.code(), Some(2));
    assert_eq!(semistart(&["bench-mise", "--cases", "1", "--n", "1"], None).status.code(), Some(2));
    assert_eq!(semistart(&["no-such-command"], None).status.code(), Some(2));
    let out = semistart(&["bench-amise", "--cases", "0"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1..=15"));
    assert!(!Path::new("/nonexistent/x.csv").exists());
    assert_eq!(semistart(&["estimate", "/nonexistent/x.csv"], None).status.code(), Some(1));
    assert_eq!(semistart(&["bench-amise"], Some("zero")).status.code(), Some(2));
}
