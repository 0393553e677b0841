//! End-to-end tests of the command-line surface: exit codes, JSON shapes
//! and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn mlat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn write_temp(name: &str, content: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("mlat-test-{}-{}", std::process::id(), name));
    std::fs::write(&path, content).unwrap();
    path
}

#[test]
fn mon_index_prints_the_index() {
    let out = mlat(&["mon", "index", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "2");
    let out = mlat(&["mon", "index", "2"]);
    assert_eq!(stdout(&out).trim(), "1");
    let out = mlat(&["mon", "index", "30"]);
    assert_eq!(stdout(&out).trim(), "4");
}

#[test]
fn mon_verify_index_passes() {
    let out = mlat(&["mon", "verify-index", "--max", "200"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"mismatches\": []"));
}

#[test]
fn lattice_builtins_and_files() {
    let out = mlat(&["lattice", "signature", "Lk:4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"positive\": 3"));
    assert!(stdout(&out).contains("\"negative\": 20"));

    let path = write_temp("lattice.json", r#"{"name": "mine", "gram": [[0,1],[1,0]]}"#);
    let out = mlat(&["lattice", "show", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"det\": \"-1\""));

    // malformed JSON is an input error: exit 2
    let bad = write_temp("bad.json", r#"{"gram": [[0,1],[1"#);
    let out = mlat(&["lattice", "show", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lattice_perp_of_isotropic_vector_is_flagged() {
    let out = mlat(&["lattice", "perp", "U", "--v", "[1, 0]"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"degenerate\": true"), "{}", text);
    assert!(text.contains("\"rank\": 1"), "{}", text);
}

#[test]
fn disc_group_of_rank_one() {
    let path = write_temp("m6.json", r#"{"gram": [[-6]]}"#);
    let out = mlat(&["disc", "group", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"6\""), "{}", text);
    assert!(text.contains("11/6"), "{}", text);
}

#[test]
fn disc_action_takes_lattice_and_isometry() {
    // reflection in the rank-one generator of Lk:2 acts as -id
    use mukai_lattice::Isometry;
    use num_bigint::BigInt;
    use num_traits::{One, Zero};
    use std::sync::Arc;
    let lk = Arc::new(mukai_lattice::IntegralLattice::lk(2).unwrap());
    let mut u = vec![BigInt::zero(); 23];
    u[22] = BigInt::one();
    let r = Isometry::reflection(lk, &u).unwrap();
    let path = write_temp("rankone.json", &serde_json::to_string(&r).unwrap());
    let out = mlat(&["disc", "action", "Lk:2", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("\"sign_class\": \"minus_id\""));
    // mismatched lattice is an input error
    let out = mlat(&["disc", "action", "Lk:3", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn isom_check_verdicts() {
    let good = write_temp("swap.json", r#"{"lattice": "U", "matrix": [[0,1],[1,0]]}"#);
    let out = mlat(&["isom", "check", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"ok\": true"));

    let bad = write_temp("shear.json", r#"{"lattice": "U", "matrix": [[1,1],[0,1]]}"#);
    let out = mlat(&["isom", "check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("\"ok\": false"));
}

#[test]
fn isom_in_w_and_orient() {
    // the swap on U reverses orientation (it exchanges the two isotropic
    // rays and flips the positive direction e+f to itself... check by run)
    let refl = write_temp(
        "refl.json",
        r#"{"lattice": "U", "matrix": [[-1,0],[0,-1]]}"#,
    );
    let out = mlat(&["isom", "orient", refl.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("reversing"));
}

#[test]
fn mukai_subcommands() {
    let v = r#"{"r":1,"xi":[0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0],"a":-1}"#;
    let out = mlat(&["mukai", "fm-delta", v]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"r\": -1"));

    let out = mlat(&["mukai", "decompose",
        r#"{"r":2,"xi":[0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0],"a":-4}"#]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"m\": \"2\""));
    assert!(text.contains("\"k\": \"2\""));

    let out = mlat(&["mukai", "ample", "--alpha", "1", "--beta", "5"]);
    assert!(stdout(&out).contains("\"ample\": true"));
    let out = mlat(&["mukai", "ample", "--alpha", "1", "--beta", "1"]);
    assert!(stdout(&out).contains("\"ample\": false"));
}

#[test]
fn word_validate_and_eval() {
    let word = r#"{
        "source": {"r":1,"xi":[0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0],"a":-1},
        "steps": [{"op":"fm_delta"},{"op":"fm_delta"}]
    }"#;
    let path = write_temp("word.json", word);
    let out = mlat(&["word", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"reduced_length\": 0"), "{}", text);

    let out = mlat(&["word", "eval", "--functor", "phi_tilde", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let out = mlat(&["word", "eval", "--functor", "pt", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"loop\": true"));

    // a deform step that moves the vector is a validation failure: exit 1
    let dual_rows: Vec<Vec<i64>> = mukai_lattice::mukai::fm_dual_isometry()
        .matrix()
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_string().parse::<i64>().unwrap()).collect())
        .collect();
    let moving = serde_json::json!({
        "source": {"r": 1, "xi": vec![0i64; 22], "a": -2},
        "steps": [{"op": "deform", "matrix": dual_rows}]
    });
    let path = write_temp("badword.json", &moving.to_string());
    let out = mlat(&["word", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("\"valid\": false"));
}

#[test]
fn isom_search_finds_short_words() {
    use mukai_lattice::lattice::IntegralLattice;
    use mukai_lattice::Isometry;
    use num_bigint::BigInt;
    use std::sync::Arc;
    // generators: two transvections on U + U whose quotient is t(zbar, f)^-1
    let uu = Arc::new(IntegralLattice::direct_sum(&[
        &IntegralLattice::hyperbolic(),
        &IntegralLattice::hyperbolic(),
    ]));
    let vec4 = |xs: [i64; 4]| xs.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    let zbar = vec4([0, 0, 1, 0]);
    let r = 3;
    let g1 = Isometry::transvection(uu.clone(), &zbar, &vec4([1, -r, 0, 0])).unwrap();
    let g2 = Isometry::transvection(uu.clone(), &zbar, &vec4([1, -(r - 1), 0, 0])).unwrap();
    let target = Isometry::transvection(uu.clone(), &zbar, &vec4([0, 1, 0, 0]))
        .unwrap()
        .inverse();
    let g1p = write_temp("g1.json", &serde_json::to_string(&g1).unwrap());
    let g2p = write_temp("g2.json", &serde_json::to_string(&g2).unwrap());
    let tp = write_temp("target.json", &serde_json::to_string(&target).unwrap());
    let out = mlat(&[
        "isom",
        "search",
        tp.to_str().unwrap(),
        "--gen",
        g1p.to_str().unwrap(),
        "--gen",
        g2p.to_str().unwrap(),
        "--max-len",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("\"generator\""), "{}", text);

    // an unreachable target within a tiny bound exits 1
    let neg = write_temp(
        "neg.json",
        &serde_json::to_string(&Isometry::negation(uu.clone())).unwrap(),
    );
    let out = mlat(&[
        "isom",
        "search",
        neg.to_str().unwrap(),
        "--gen",
        g1p.to_str().unwrap(),
        "--max-len",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("\"word\": null"));
}

#[test]
fn verify_subset_and_report() {
    let report_path = std::env::temp_dir().join(format!("mlat-report-{}.json", std::process::id()));
    let out = mlat(&[
        "verify",
        "--suite",
        "index-formula,vector-arithmetic,fm-orientation",
        "--json",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("pass  index-formula"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["checks"].as_array().unwrap().len(), 3);
    for check in report["checks"].as_array().unwrap() {
        assert_eq!(check["status"], "pass");
    }
    // unknown suite id is an input error
    let out = mlat(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = mlat(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_output_files_are_byte_identical_for_equal_inputs() {
    let p1 = std::env::temp_dir().join(format!("mlat-d1-{}.json", std::process::id()));
    let p2 = std::env::temp_dir().join(format!("mlat-d2-{}.json", std::process::id()));
    let v = r#"{"r":3,"xi":[1,0,0,2,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,-1],"a":-5}"#;
    mlat(&["mukai", "fm-p", v, "--json", p1.to_str().unwrap()]);
    mlat(&["mukai", "fm-p", v, "--json", p2.to_str().unwrap()]);
    let a = std::fs::read(&p1).unwrap();
    let b = std::fs::read(&p2).unwrap();
    assert_eq!(a, b);
    assert!(!a.is_empty());
}
