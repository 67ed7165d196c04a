use std::process::Command;

use fracsym_cli::run_args;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("fracsym").chain(args.iter().copied());
    let code = run_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s.trim()).unwrap()
}

#[test]
fn classify_examples() {
    let (code, out, _) = run(&["classify", "--f", "x^2", "--g", "x"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["class"], "iv");

    let (code, out, _) = run(&["classify", "--f", "1", "--g", "1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["class"], "iii");
    assert!((v["lambda2"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let (code, out, _) = run(&["classify", "--f", "1", "--g", "3/(x+2)", "--beta", "0"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["class"], "ii");
    assert!((v["lambda1"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert!((v["lambda2"].as_f64().unwrap() - 3.0).abs() < 1e-8);
    assert_eq!(v["domain_used"], serde_json::json!([0.0, 2.0]));
}

#[test]
fn classify_errors() {
    let (code, _, err) = run(&["classify", "--f", "1/(x", "--g", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("byte 4"), "{err}");
    let (code, _, err) = run(&["classify", "--f", "x-1.5", "--g", "1"]);
    assert_eq!(code, 3, "{err}");
    let (code, _, _) = run(&["classify", "--f", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn solve_shape_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.csv");
    let p2 = dir.path().join("b.csv");
    for p in [&p1, &p2] {
        let (code, _, err) = run(&[
            "solve", "--family", "case2", "--alpha", "0.5", "--grid", "1,2,5,0.1,1,5", "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
    }
    let a = std::fs::read(&p1).unwrap();
    assert_eq!(a, std::fs::read(&p2).unwrap());
    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,t,u,v");
    assert_eq!(lines.len(), 26);
    // x outer, t inner
    assert!(lines[1].starts_with("1.0000000000000000e0,1.0000000000000001e-1,"));
    assert!(lines[2].starts_with("1.0000000000000000e0,3.2500000000000001e-1,"));
    assert!(lines[6].starts_with("1.2500000000000000e0,1.0000000000000001e-1,"));
    for l in &lines[1..] {
        assert_eq!(l.split(',').count(), 4);
    }
}

#[test]
fn solve_json_mirrors_csv() {
    let (_, csv, _) = run(&["solve", "--grid", "1,2,3,0.2,1,2"]);
    let (code, js, _) = run(&["solve", "--grid", "1,2,3,0.2,1,2", "--format", "json"]);
    assert_eq!(code, 0);
    let v = json(&js);
    let row: Vec<f64> = csv.lines().nth(2).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    for (i, k) in ["x", "t", "u", "v"].iter().enumerate() {
        // serde_json's default float parser may be off by an ulp
        let j = v[k][1].as_f64().unwrap();
        assert!((j - row[i]).abs() <= 4e-16 * row[i].abs(), "{k}: {j} vs {}", row[i]);
    }
}

#[test]
fn solve_errors() {
    let (code, _, err) = run(&["solve", "--family", "case3-w5", "--a1", "2", "--a2", "0"]);
    assert_eq!(code, 4);
    assert!(err.contains("(±1, a), (0, ±1), (0, 0)"), "{err}");

    let (code, _, err) = run(&["solve", "--family", "case1-small", "--alpha", "1.5"]);
    assert_eq!(code, 4, "{err}");

    let (code, _, err) = run(&[
        "solve", "--family", "case1-large", "--alpha", "1", "--lambda1", "0.1", "--grid",
        "1,2,3,0.5,5,3",
    ]);
    assert_eq!(code, 5);
    assert!(err.contains("delta = -1"), "{err}");

    let (code, _, _) = run(&["solve", "--grid", "1,2,1,0.1,1,5"]);
    assert_eq!(code, 2);

    // g of the wrong class for the family
    let (code, _, err) = run(&["solve", "--family", "case2", "--f", "x^2", "--g", "x"]);
    assert_eq!(code, 4, "{err}");
}

#[test]
fn verify_examples() {
    let (code, out, err) = run(&["verify"]);
    assert_eq!(code, 0, "{err}");
    let v = json(&out);
    let termwise = &v["residuals"][0];
    assert_eq!(termwise["method"], "termwise");
    assert!(termwise["rel_eq1"].as_f64().unwrap() <= 1e-10);
    assert!(termwise["rel_eq2"].as_f64().unwrap() <= 1e-10);

    let (code, _, err) = run(&["verify", "--perturb", "0.1"]);
    assert_eq!(code, 1);
    assert!(err.contains("exceeds tolerance"), "{err}");

    let (code, out, err) = run(&["verify", "--family", "case3-w4-small", "--alpha", "0.5", "--f", "1"]);
    assert_eq!(code, 0, "{err}");
    let v = json(&out);
    assert_eq!(v["residuals"][0]["method"], "numeric");
    assert!(v["residuals"][0]["rel_eq1"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn liealg_examples() {
    let (code, out, _) = run(&["liealg"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "[Vi,Vj]\tV1\tV2\tV3\tV4\nV1\t0\tV2\t0\t0\nV2\t-V2\t0\t0\t0\nV3\t0\t0\t0\t0\nV4\t0\t0\t0\t0\n"
    );
    let (code, _, _) = run(&["liealg", "--alpha", "2"]);
    assert_eq!(code, 0);
    let (code, _, err) = run(&["liealg", "--perturb", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("(1, 2)"), "{err}");
}

#[test]
fn specfun_eval() {
    let (code, out, _) = run(&["specfun", "eval", "ml", "--alpha", "2", "--beta", "1", "--z", "-1"]);
    assert_eq!(code, 0);
    assert!((json(&out)["re"].as_f64().unwrap() - 1f64.cos()).abs() < 1e-13);
    let (code, out, _) = run(&["specfun", "eval", "gamma", "--z", "5"]);
    assert_eq!(code, 0);
    assert!((json(&out)["re"].as_f64().unwrap() - 24.0).abs() < 1e-11);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_fracsym");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let o = status(&["liealg"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("[Vi,Vj]"));
    assert_eq!(status(&["classify", "--f", "1/(x", "--g", "1"]).status.code(), Some(2));
    assert_eq!(status(&["verify", "--perturb", "0.1"]).status.code(), Some(1));
    assert_eq!(status(&["bogus"]).status.code(), Some(2));
}
