use std::fs;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewharmonic")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_skew_reports_and_exits_zero() {
    let out = bin(&["verify", "skew", "--p", "5", "--trials", "200", "--seed", "42"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["schema"], "skewharmonic-report/1");
    assert_eq!(r["config"]["seed"], 42);
    assert_eq!(r["pass"], true);
    let checks = r["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["param"] == "n=6 trials=200"));
    for c in checks {
        for key in ["name", "anchor", "residual", "tolerance", "stderr", "seed", "pass"] {
            assert!(c.get(key).is_some(), "{key} missing in {c}");
        }
    }
}

#[test]
fn verify_zeta_at_one_s() {
    let out = bin(&["verify", "zeta", "--q", "1", "--s", "0.7"]);
    assert!(out.status.success());
    let r = json(&out);
    let fe: Vec<_> = r["checks"].as_array().unwrap().iter().filter(|c| c["name"] == "zeta.functional_equation").collect();
    assert!(fe.len() >= 5);
    assert!(fe.iter().all(|c| c["residual"].as_f64().unwrap() <= 1e-8));
}

#[test]
fn failing_tolerance_sets_exit_status() {
    let out = bin(&["verify", "lie", "--p", "3", "--tol-override", "factorization=0"]);
    // the factorization residual is about 1e-16, not exactly zero
    let r = json(&out);
    let worst = r["checks"][0]["residual"].as_f64().unwrap();
    assert_eq!(out.status.success(), worst == 0.0);
    let out = bin(&["verify", "lie", "--p", "3", "--tol-override", "ad_xi=1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_csv_and_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small run\np = 3\nseed = 9\ntrials = 20\n").unwrap();
    let out_json = dir.path().join("r.json");
    let out_csv = dir.path().join("r.csv");
    let out = bin(&[
        "verify",
        "skew",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "11",
        "--out",
        out_json.to_str().unwrap(),
        "--csv",
        out_csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out_json).unwrap()).unwrap();
    assert_eq!(r["config"]["seed"], 11);
    assert_eq!(r["config"]["trials"], 20);
    let csv = fs::read_to_string(&out_csv).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("check,param,residual,tolerance,stderr"));
    assert_eq!(lines.count(), r["checks"].as_array().unwrap().len());
}

#[test]
fn bad_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "colour = blue\n").unwrap();
    let out = bin(&["verify", "skew", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
    assert!(!bin(&["verify", "skew", "--frobnicate"]).status.success());
    assert!(!bin(&["verify", "everything"]).status.success());
}

#[test]
fn reports_repeat_except_timing() {
    let run = || {
        let mut v = json(&bin(&["verify", "orbit", "--p", "3", "--seed", "5"]));
        v.as_object_mut().unwrap().remove("wall_time");
        v.to_string()
    };
    assert_eq!(run(), run());
}

#[test]
fn explore_nu_never_fails() {
    let out = bin(&["explore", "nu", "--p", "3"]);
    assert!(out.status.success());
    let r = json(&out);
    assert_eq!(r["fits"].as_array().unwrap().len(), 3);
    assert!(r["fits"][0][1]["deviation"].as_f64().unwrap() > 0.0);
}

#[test]
fn emit_plot_data_csv() {
    let out = bin(&["emit", "plot-data"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("curve,n,half_extent,residual"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    // each curve falls as the grid refines
    for curve in ["f_mu_isometry", "cubic_shift", "weyl_vs_group_fourier"] {
        let r: Vec<f64> = rows.iter().filter(|x| x[0] == curve).map(|x| x[3].parse().unwrap()).collect();
        assert!(r.len() >= 4, "{curve}");
        assert!(r[r.len() - 1] < r[0], "{curve}: {r:?}");
    }
}
