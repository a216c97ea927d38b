use glscov::cli::{run, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};
use glscov::psi::PsiFunction;
use serde_json::Value;

fn glscov(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("glscov").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json_ok(args: &[&str]) -> Value {
    let (code, out, err) = glscov(args);
    assert_eq!(code, EXIT_OK, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

const POWER1: &str = r#"{"kind":"power","m":1}"#;

#[test]
fn fundamental_at_e_minus_two() {
    let v = json_ok(&["fundamental", "--psi", POWER1, "--delta", "0.1353352832"]);
    assert!((v["value"].as_f64().unwrap() - 0.18394).abs() < 1e-5);
    assert!((v["argmax_p"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert_eq!(v["flags"][0], "interior");
}

#[test]
fn fundamental_batch_is_csv() {
    let (code, out, _) = glscov(&["fundamental", "--psi", POWER1, "--delta-grid", "1e-8,1e-2,5"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "delta,value,argmax_p,boundary");
    assert_eq!(lines.len(), 6);
}

#[test]
fn verify_small_campaign_has_no_violations() {
    let v = json_ok(&["verify", "--instances", "100", "--seed", "1"]);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["config"]["instances"], 100);
}

#[test]
fn davydov_at_zero_alpha() {
    let v = json_ok(&[
        "bound",
        "--theorem",
        "davydov",
        "--alpha",
        "0",
        "--p",
        "4",
        "--q",
        "4",
        "--norm-xi",
        "1",
        "--norm-eta",
        "1",
    ]);
    assert_eq!(v["value"].as_f64(), Some(0.0));
    assert_eq!(v["feasible"], true);
}

#[test]
fn infeasible_bound_serializes_infinity() {
    let v = json_ok(&["bound", "--theorem", "davydov", "--alpha", "0.1", "--p", "2", "--q", "2"]);
    assert_eq!(v["value"], "inf");
    assert_eq!(v["feasible"], false);
}

#[test]
fn example_bounds_refuse_large_alpha() {
    let (code, _, err) = glscov(&["bound", "--theorem", "example-5.1", "--psi", POWER1, "--alpha", "0.5"]);
    assert_eq!(code, EXIT_DOMAIN);
    let e: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(e["kind"], "domain");
    assert!(e["error"].as_str().unwrap().contains("holder"));
}

#[test]
fn example_5_1_constant() {
    let v = json_ok(&["bound", "--theorem", "example-5.1", "--psi", POWER1, "--alpha", "0.1353352832366127"]);
    assert!((v["value"].as_f64().unwrap() - 48.0).abs() < 1e-6);
}

#[test]
fn unknown_flag_is_usage_error() {
    let (code, out, err) = glscov(&["fundamental", "--psi", POWER1, "--delta", "0.1", "--bogus"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.is_empty());
    assert!(err.contains("Usage"));
    let (code, _, _) = glscov(&["nonsense"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn domain_error_is_one_json_line() {
    let (code, out, err) = glscov(&["fundamental", "--psi", POWER1, "--delta", "-1"]);
    assert_eq!(code, EXIT_DOMAIN);
    assert!(out.is_empty());
    assert_eq!(err.lines().count(), 1);
    let e: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(e["kind"], "domain");
    let (code, _, err) = glscov(&["fundamental", "--psi", r#"{"kind":"power","m":-1}"#, "--delta", "0.1"]);
    assert_eq!(code, EXIT_DOMAIN);
    assert!(serde_json::from_str::<Value>(err.trim()).is_ok());
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = glscov(&["--help"]);
    assert_eq!(code, EXIT_OK);
    for sub in ["psi", "fundamental", "tail", "bound", "factorization", "verify", "clt", "sharpness"] {
        assert!(out.contains(sub), "{sub} missing from help");
    }
}

#[test]
fn outputs_are_deterministic() {
    let runs = [
        vec!["sharpness", "--budget", "300", "--seed", "5"],
        vec!["verify", "--instances", "60", "--seed", "9"],
        vec![
            "clt",
            "--model",
            r#"{"kind":"finite_markov","transition":[[0.7,0.3],[0.3,0.7]],"values":[-1,1]}"#,
            "--K",
            "64",
            "--n-grid",
            "10,50",
            "--reps",
            "200",
            "--seed",
            "3",
        ],
    ];
    for args in runs {
        let a = glscov(&args);
        let b = glscov(&args);
        assert_eq!(a.0, EXIT_OK, "{}", a.2);
        assert_eq!(a.1, b.1, "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let (code, out, _) = glscov(&["fundamental", "--psi", POWER1, "--delta", "0.01", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn psi_file_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.json");
    std::fs::write(&path, r#"{"kind":"finite_support","b":3,"beta":0.5}"#).unwrap();
    let v = json_ok(&["psi", "--psi", path.to_str().unwrap(), "--zeta-with", POWER1, "--p-grid", "1.5,2,2.5"]);
    let emitted = serde_json::to_string(&v["psi"]).unwrap();
    let back = PsiFunction::from_json(&emitted).unwrap();
    let zeta =
        glscov::psi::product_zeta(&PsiFunction::finite_support(3.0, 0.5).unwrap(), &PsiFunction::power(1.0).unwrap());
    for p in [1.5, 2.0, 2.5, 2.9] {
        assert_eq!(back.value(p), zeta.value(p));
    }
    assert_eq!(v["points"].as_array().unwrap().len(), 3);
}

#[test]
fn tail_with_samples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.txt");
    std::fs::write(&path, "0.5\n-1.5\n2.0\n-0.1\n").unwrap();
    let (code, out, err) = glscov(&[
        "tail",
        "--psi",
        r#"{"kind":"power","m":2}"#,
        "--norm",
        "1",
        "--y-grid",
        "e,6,4",
        "--samples",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("y,bound,empirical"));
    assert_eq!(lines.count(), 4);
    let (code, _, _) = glscov(&["tail", "--psi", POWER1, "--norm", "1", "--y-grid", "1,2,3"]);
    assert_eq!(code, EXIT_DOMAIN);
}

#[test]
fn factorization_grid_csv() {
    let (code, out, _) = glscov(&[
        "factorization",
        "--psi",
        POWER1,
        "--nu",
        POWER1,
        "--alpha-grid",
        "0.0183156388887342,0.36787944117144233",
        "--beta-grid",
        "0.0183156388887342,0.36787944117144233",
    ]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "alpha,beta,lhs,rhs,holds");
    assert_eq!(rows.len(), 5);
    assert!(rows[1].ends_with("true"));
    assert!(rows[4].ends_with("false"));
}

#[test]
fn verify_writes_instance_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let set = dir.path().join("set.json");
    std::fs::write(&set, r#"[{"kind":"power","m":1},{"kind":"extremal","r":3}]"#).unwrap();
    let v = json_ok(&[
        "verify",
        "--instances",
        "30",
        "--seed",
        "2",
        "--psi-set",
        set.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(v["violations"], 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("alpha,beta,cov,tightest_bound,slack\n"));
    assert_eq!(text.lines().count(), 31);
}

#[test]
fn clt_report_shape() {
    let v = json_ok(&[
        "clt",
        "--model",
        r#"{"kind":"m_dependent","weights":[0.7071067811865476,0.7071067811865476],"innovation":"gaussian"}"#,
        "--K",
        "32",
        "--n-grid",
        "10,100",
        "--reps",
        "300",
    ]);
    for key in ["y_partial_sum", "z_partial_sum", "verdicts", "sigma_table"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["y_partial_sum"].as_f64(), Some(0.0));
    assert_eq!(v["profile_source"], "conservative");
    let rows = v["sigma_table"].as_array().unwrap();
    assert!((rows[1]["exact"].as_f64().unwrap() - 1.99).abs() < 1e-12);
    let (code, _, err) = glscov(&["clt", "--model", r#"{"kind":"user_samples","path":"/nonexistent"}"#]);
    assert_eq!(code, EXIT_DOMAIN);
    assert!(err.contains("profile"));
}

#[test]
fn generic_bound_matches_davydov() {
    let extremal = r#"{"kind":"extremal","r":4}"#;
    let g = json_ok(&["bound", "--theorem", "generic", "--kernel", "davydov", "--alpha", "0.01", "--psi", extremal]);
    let d = json_ok(&["bound", "--theorem", "davydov", "--alpha", "0.01", "--p", "4", "--q", "4"]);
    let (a, b) = (g["value"].as_f64().unwrap(), d["value"].as_f64().unwrap());
    assert!(((a - b) / b).abs() < 1e-9, "{a} vs {b}");
}
