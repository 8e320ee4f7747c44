use std::io::Write;
use std::process::{Command, Stdio};

use nhsim::cli::run;
use serde_json::Value;

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn nhsim(args: &[&str]) -> nhsim::cli::CommandResult {
    let argv = std::iter::once("nhsim").chain(args.iter().copied());
    run(argv, &mut &b""[..], None)
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("JSON payload")
}

#[test]
fn classify_dimer_at_exceptional_coupling() {
    let r = nhsim(&["classify", &data("dimer_at_1.json")]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    let witnesses = v["witnesses"].as_array().unwrap();
    let chiral = witnesses
        .iter()
        .find(|w| w["class"] == "chiral")
        .expect("chiral witness");
    assert!(chiral["residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn generate_pipes_into_classify() {
    let bin = env!("CARGO_BIN_EXE_nhsim");
    let gen = Command::new(bin)
        .args([
            "generate",
            "--class",
            "pseudo-hermitian",
            "--dim",
            "3",
            "--seed",
            "7",
        ])
        .output()
        .unwrap();
    assert!(gen.status.success());
    let mut child = Command::new(bin)
        .args(["classify", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&gen.stdout).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = json(std::str::from_utf8(&out.stdout).unwrap());
    assert!(v["classes"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c == "pseudo-hermitian"));
}

#[test]
fn scan_trimer_finds_ep3() {
    let r = nhsim(&[
        "scan",
        &data("trimer.json"),
        "--class",
        "pseudo-hermitian",
        "--grid",
        "gamma=0:3:101",
    ]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    let hit = r
        .stdout
        .lines()
        .map(json)
        .find(|c| (c["point"]["gamma"].as_f64().unwrap() - 1.41421356).abs() <= 1e-6 && c["order"] == 3);
    assert!(hit.is_some(), "{}", r.stdout);
}

#[test]
fn scan_output_is_stable_across_threads() {
    let base = [
        "scan",
        &data("dimer.json"),
        "--class",
        "psh",
        "--grid",
        "gamma=-2:2:101",
    ];
    let a = nhsim(&[&base[..], &["--threads", "1"]].concat());
    let b = nhsim(&[&base[..], &["--threads", "3"]].concat());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout.lines().count(), 2);
}

#[test]
fn scan_csv() {
    let r = nhsim(&[
        "--output",
        "csv",
        "scan",
        &data("dimer.json"),
        "--class",
        "psh",
        "--grid",
        "gamma=-2:2:41",
    ]);
    assert_eq!(r.exit_code, 0);
    let mut lines = r.stdout.lines();
    assert!(lines.next().unwrap().starts_with("gamma,order"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn certify_reports_order_and_exponent() {
    let r = nhsim(&[
        "certify",
        &data("dimer.json"),
        "--at",
        "-1",
        "--class",
        "pseudo-hermitian",
    ]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    assert_eq!(v["order"], 2);
    assert_eq!(v["is_ep"], true);
    let e = v["splitting"]["exponent"].as_f64().unwrap();
    assert!((0.45..=0.55).contains(&e));
    assert_eq!(v["constraints"][0]["label"], "Re det");
}

#[test]
fn witness_mismatch_is_domain_failure() {
    let r = nhsim(&[
        "generate",
        "--class",
        "pseudo-hermitian",
        "--dim",
        "3",
        "--seed",
        "1",
        "--non-normal",
    ]);
    let path = std::env::temp_dir().join(format!("nhsim-cli-{}.json", std::process::id()));
    std::fs::write(&path, &r.stdout).unwrap();
    let w = nhsim(&["witness", path.to_str().unwrap(), "--class", "self-skew-similar"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(w.exit_code, 1, "{}", w.stdout);
    assert!(w.stderr.starts_with("error:"));
}

#[test]
fn family_not_in_class_is_domain_failure() {
    // λ·diag(1, 2) has Re tr H = 3λ
    let family = r#"{"dim": 2, "params": 1, "terms": [
        {"matrix": {"dim": 2, "entries": [[[1,0],[0,0]],[[0,0],[2,0]]]}, "exponents": [1]}
    ]}"#;
    let r = run(
        ["nhsim", "scan", "-", "--class", "chiral", "--grid", "p0=-1:1:11"],
        &mut family.as_bytes(),
        None,
    );
    assert_eq!(r.exit_code, 1, "{}", r.stderr);
    assert!(r.stderr.contains("Re tr H"), "{}", r.stderr);
}

#[test]
fn usage_errors() {
    for args in [
        &["nonsense"][..],
        &["classify", "/nonexistent/matrix.json"],
        &[
            "scan",
            &data("dimer.json"),
            "--class",
            "psh",
            "--grid",
            "gamma=2:1:5",
        ],
        &[
            "scan",
            &data("dimer.json"),
            "--class",
            "psh",
            "--grid",
            "delta=0:1:5",
        ],
        &[
            "scan",
            &data("trimer.json"),
            "--class",
            "chiralish",
            "--grid",
            "gamma=0:1:5",
        ],
        &["certify", &data("trimer.json"), "--at", "1,2,3"],
        &["--output", "csv", "classify", &data("dimer_at_1.json")],
    ] {
        let r = nhsim(args);
        assert_eq!(r.exit_code, 2, "{args:?}: {}", r.stderr);
        assert_eq!(r.stderr.lines().count(), 1, "{args:?}");
    }
}

#[test]
fn tolerance_env_and_flag() {
    let args = ["nhsim", "classify", &data("dimer_at_1.json")];
    assert_eq!(run(args, &mut &b""[..], Some("nope")).exit_code, 2);
    assert_eq!(run(args, &mut &b""[..], Some("1e-6")).exit_code, 0);
    let with_flag = ["nhsim", "--tol", "1e-6", "classify", &data("dimer_at_1.json")];
    assert_eq!(run(with_flag, &mut &b""[..], Some("nope")).exit_code, 0);
}

#[test]
fn specht_and_generators() {
    let r = nhsim(&["specht", &data("dimer_at_1.json"), &data("dimer_at_1.json")]);
    assert_eq!(json(&r.stdout)["unitarily_similar"], true);
    let r = nhsim(&[
        "--output",
        "csv",
        "specht",
        &data("dimer_at_1.json"),
        &data("nilpotent.json"),
    ]);
    assert_eq!(r.stdout.lines().count(), 4);
    let r = nhsim(&["specht-generators", &data("dimer_at_1.json"), "--class", "chiral"]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    assert!(v["reports"][0]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["fit"]["found"] == true));
    let r = nhsim(&["specht-generators", "--class", "chiral", "--seed", "3"]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(json(&r.stdout)["class"], "chiral");
}

#[test]
fn output_is_byte_stable() {
    let a = nhsim(&["classify", &data("dimer_at_1.json")]);
    let b = nhsim(&["classify", &data("dimer_at_1.json")]);
    assert_eq!(a.stdout, b.stdout);
}
