use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adsmass"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn normalize_reports_and_exit_codes() {
    let out = run(&["normalize", "--m", "2,0,0,0", "--xi", "0.5,0,0,0,0.3,0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let nf = &v["positivity"]["normal_form"];
    assert_eq!((f(&nf["m0"]), f(&nf["n1"]), f(&nf["r2"])), (2.0, 0.5, 0.3));
    assert_eq!(v["positivity"]["verdict"], "holds");

    // a failing verdict is still a successful run
    let out = run(&["normalize", "--m", "1,0,0,0", "--xi", "2,0,0,0,0,0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["positivity"]["verdict"], "fails");

    let out = run(&["normalize", "--m", "0.5,1,0,0", "--xi", "0,0,0,0,0,0"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not timelike"));
    assert_eq!(
        code(&run(&["normalize", "--m", "1,0,0", "--xi", "0,0,0,0,0,0"])),
        2
    );
}

#[test]
fn configuration_errors_exit_2() {
    assert_eq!(code(&run(&["charges", "--family", "nope"])), 2);
    assert_eq!(
        code(&run(&[
            "charges",
            "--family",
            "schwarzschild_ads",
            "--param",
            "mass=1"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "charges",
            "--family",
            "exact_hyperbolic",
            "--schedule",
            "5,4,6"
        ])),
        2
    );
    assert_eq!(code(&run(&["no-such-command"])), 2);
}

#[test]
fn charges_for_schwarzschild() {
    let out = run(&[
        "charges",
        "--family",
        "schwarzschild_ads",
        "--param",
        "m=1",
        "--dec-samples",
        "10",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let x0 = v["charges"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["label"] == "x0")
        .unwrap();
    assert!(x0["converged"].as_bool().unwrap());
    assert!((f(&x0["value"]) - 16.0 * std::f64::consts::PI).abs() < 1e-4);

    // identical runs emit identical bytes
    let again = run(&[
        "charges",
        "--family",
        "schwarzschild_ads",
        "--param",
        "m=1",
        "--dec-samples",
        "10",
    ]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn non_convergence_exits_1() {
    let out = run(&[
        "charges",
        "--family",
        "schwarzschild_ads",
        "--param",
        "m=1",
        "--schedule",
        "1,1.5,2",
        "--tol",
        "1e-12",
        "--dec-samples",
        "2",
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
}

#[test]
fn report_written_to_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nf.json");
    let args = [
        "normalize",
        "--m",
        "3,0.5,-1,0.25",
        "--xi",
        "0.1,0.2,0.3,-0.4,0.5,0.6",
    ];
    let stdout = run(&args).stdout;
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    assert_eq!(code(&run(&with_out)), 0);
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
    // every number survives a parse at full precision
    let v: Value = serde_json::from_slice(&stdout).unwrap();
    assert_eq!(f(&v["mass_vector"][1]), 0.5);
    assert_eq!(f(&v["xi"]["r"][0]), -0.4);
}

#[test]
fn verify_is_seeded() {
    let base = [
        "verify",
        "--samples",
        "50",
        "--sweep-samples",
        "200",
        "--suite",
        "lambda",
        "--suite",
        "minors",
    ];
    let with_seed = |s: &'static str| {
        let mut a = base.to_vec();
        a.extend(["--seed", s]);
        run(&a)
    };
    let (a, b, c) = (with_seed("7"), with_seed("7"), with_seed("8"));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let v = json(&a);
    assert_eq!(v["suites"].as_array().unwrap().len(), 2);
    assert!(v["passed"].as_bool().unwrap());
    assert_eq!(code(&run(&["verify", "--suite", "unknown"])), 2);
}

#[test]
fn corrupted_clifford_map_is_detected() {
    let out = run(&[
        "verify",
        "--samples",
        "50",
        "--sweep-samples",
        "100",
        "--suite",
        "clifford",
        "--corrupt-theta",
        "1e-3",
    ]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["suites"][0]["name"], "clifford");
    assert!(!v["suites"][0]["passed"].as_bool().unwrap());
}

#[test]
fn deccheck_on_vacuum() {
    let out = run(&[
        "deccheck",
        "--family",
        "schwarzschild_ads",
        "--param",
        "m=0.5",
        "--samples",
        "20",
        "--seed",
        "3",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("satisfied"));
}

fn export(path: &Path) {
    let radii: Vec<String> = (0..25)
        .map(|i| format!("{}", 3.0 + 0.25 * i as f64))
        .collect();
    let out = run(&[
        "export-grid",
        "--family",
        "schwarzschild_ads",
        "--param",
        "m=1",
        "--radii",
        &radii.join(","),
        "--n-theta",
        "16",
        "--n-phi",
        "16",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn grid_charges_match_the_analytic_family() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.json");
    export(&path);
    // radii between the grid nodes
    let schedule = "4.1,5.1,6.1,7.1,8.1";
    let grid = run(&[
        "charges",
        "--grid",
        path.to_str().unwrap(),
        "--schedule",
        schedule,
        "--dec-samples",
        "5",
    ]);
    assert_eq!(code(&grid), 0, "{}", String::from_utf8_lossy(&grid.stderr));
    let analytic = run(&[
        "charges",
        "--family",
        "schwarzschild_ads",
        "--param",
        "m=1",
        "--schedule",
        schedule,
        "--dec-samples",
        "5",
    ]);
    let (g, a) = (json(&grid), json(&analytic));
    let value = |v: &Value| {
        f(&v["charges"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["label"] == "x0")
            .unwrap()["value"])
    };
    let (vg, va) = (value(&g), value(&a));
    assert!((vg - va).abs() <= 1e-4 * va.abs(), "{vg} vs {va}");

    let outside = run(&[
        "charges",
        "--grid",
        path.to_str().unwrap(),
        "--schedule",
        "1,2,4",
        "--dec-samples",
        "5",
    ]);
    assert_ne!(code(&outside), 0);
}
