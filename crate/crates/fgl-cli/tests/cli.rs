//! End-to-end tests against the built binary: known-answer vectors,
//! exit-code triage, determinism, round-trips.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fglcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fglcert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("fglcert-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn factor_known_answer_and_determinism() {
    let a = fglcert(&["factor", "--ell", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout_str(&a), "{\"ell\":7,\"a\":5}\n");
    let b = fglcert(&["factor", "--ell", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let c = fglcert(&["factor", "--ell", "5"]);
    assert_eq!(stdout_str(&c), "{\"ell\":5,\"a\":1}\n");
}

#[test]
fn deuring_polynomial_output() {
    let out = fglcert(&["deuring", "--ell", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout_str(&out),
        "{\"ell\":5,\"coeffs\":[\"1\",\"4\",\"1\"]}\n"
    );
}

#[test]
fn base_curve_report() {
    let out = fglcert(&["base-curve", "--ell", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["a"], 5);
    assert_eq!(v["b"], 2);
    assert_eq!(v["point_count"], 8);
    assert_eq!(v["trace"], 0);
    assert_eq!(v["lambda"]["value"], "2");
    assert_eq!(v["lambda"]["half_sum_form_vanishes"], true);
    assert_eq!(v["lambda"]["literal_form_vanishes"], false);
}

#[test]
fn refused_curve_exits_two() {
    let out = fglcert(&["certify-curve", "--ell", "5", "--coeffs", "1,0,0,1,0,0,1"]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["verdict"], "REFUSED");
}

#[test]
fn certified_curve_exits_zero() {
    let out = fglcert(&["certify-curve", "--ell", "7", "--coeffs", "1,0,2,0,2,0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["verdict"], "CERTIFIED_TAME");
    assert_eq!(v["alpha"], "1/48");
}

#[test]
fn fgl_r_known_answer() {
    let out = fglcert(&[
        "fgl-r",
        "--ell",
        "5",
        "--law",
        "product-supersingular",
        "--precision",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_str(&out), "{\"r\":2}\n");
}

#[test]
fn fgl_height_of_product() {
    let out = fglcert(&[
        "fgl-height",
        "--ell",
        "5",
        "--law",
        "product-supersingular",
        "--precision",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["height"], "4");
    // the additive law has infinite height
    let inf = fglcert(&[
        "fgl-height",
        "--ell",
        "5",
        "--law",
        "additive",
        "--precision",
        "2",
        "--cap",
        "27",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&inf)).unwrap();
    assert_eq!(v["height"], "INFINITE");
}

#[test]
fn certify_fgl_product_supersingular() {
    let out = fglcert(&[
        "certify-fgl",
        "--ell",
        "5",
        "--law",
        "product-supersingular",
        "--precision",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["verdict"], "CERTIFIED_TAME");
    assert_eq!(v["alpha"], "1/24");
    assert_eq!(v["checklist"].as_array().unwrap().len(), 8);
}

#[test]
fn law_json_round_trips_bit_exactly() {
    let out = fglcert(&[
        "fgl-build",
        "--ell",
        "5",
        "--law",
        "multiplicative",
        "--precision",
        "6",
        "--cap",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let dto: fgl_cli::json::LawDto = serde_json::from_str(&text).unwrap();
    let law = dto.to_law().unwrap();
    let again = serde_json::to_string(&fgl_cli::json::LawDto::from_law(&law)).unwrap() + "\n";
    assert_eq!(text, again, "serialize -> parse -> serialize must be exact");
}

#[test]
fn family_main_revalidates_through_certify_curve() {
    let out = fglcert(&[
        "family-main",
        "--ell",
        "5",
        "--offsets",
        "5,5,10,10",
        "--asym",
        "625,0,-1250",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["certificate"]["verdict"], "CERTIFIED_TAME");
    let coeffs: Vec<String> = v["curve"]["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap().to_string())
        .collect();
    let joined = coeffs.join(",");
    let re = fglcert(&["certify-curve", "--ell", "5", "--coeffs", &joined]);
    assert_eq!(re.status.code(), Some(0), "emitted curve must revalidate");
}

#[test]
fn family_corpus_is_deterministic_and_parallel_safe() {
    let args = [
        "family-primera",
        "--ell",
        "7",
        "--count",
        "6",
        "--seed",
        "42",
    ];
    let a = fglcert(&args);
    assert_eq!(a.status.code(), Some(0));
    let b = fglcert(&args);
    assert_eq!(a.stdout, b.stdout, "same seed, same bytes");
    assert_eq!(stdout_str(&a).lines().count(), 6);
    // --jobs must not change the output
    let mut pargs: Vec<&str> = args.to_vec();
    pargs.extend(["--jobs", "3"]);
    let c = fglcert(&pargs);
    assert_eq!(a.stdout, c.stdout, "parallel output must match serial");
    // every line revalidates
    for line in stdout_str(&a).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["certificate"]["verdict"], "CERTIFIED_TAME");
    }
}

#[test]
fn fgl_mul_closed_form_vector() {
    // [3] of the multiplicative law is 3Z + 3Z² + Z³
    let out = fglcert(&[
        "fgl-mul",
        "--ell",
        "5",
        "--law",
        "multiplicative",
        "--m",
        "3",
        "--precision",
        "6",
        "--cap",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["m"], 3);
    let terms = v["maps"][0]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 3);
    assert_eq!(terms[0]["e"][0], 1);
    assert_eq!(terms[0]["c"], "3");
    assert_eq!(terms[1]["e"][0], 2);
    assert_eq!(terms[1]["c"], "3");
    assert_eq!(terms[2]["e"][0], 3);
    assert_eq!(terms[2]["c"], "1");
}

#[test]
fn hensel_sample_lifts() {
    let out = fglcert(&["hensel", "--ell", "5", "--sample", "--precision", "24"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["root"][0], "625");
    assert_eq!(v["root"][1], "3125");
    assert_eq!(v["root_precision"], 22);
    assert_eq!(v["jacobian_valuation"], 2);
}

#[test]
fn hensel_system_file_and_rejection() {
    // a system violating the hypothesis gate: exit 2 with a rejection
    let path = tmp_path("hensel-reject.json");
    let system = serde_json::json!({
        "series": [
            {"ell": 5, "prec": 24, "nvars": 2, "cap": 4,
             "terms": [{"e": [0, 0], "c": "59604644775390600"}, {"e": [1, 0], "c": "5"}, {"e": [2, 0], "c": "1"}]},
            {"ell": 5, "prec": 24, "nvars": 2, "cap": 4,
             "terms": [{"e": [0, 0], "c": "59604644775390500"}, {"e": [0, 1], "c": "1"}]}
        ],
        "start": ["0", "0"]
    });
    std::fs::write(&path, serde_json::to_string(&system).unwrap()).unwrap();
    let out = fglcert(&[
        "hensel",
        "--ell",
        "5",
        "--system",
        path.to_str().unwrap(),
        "--precision",
        "24",
    ]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(2), "{}", stdout_str(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(v["rejected"].is_string());
}

#[test]
fn perturb_certify_triage() {
    let ok = fglcert(&[
        "perturb-certify",
        "--ell",
        "5",
        "--scale",
        "4",
        "--seed",
        "9",
        "--count",
        "5",
        "--cap",
        "27",
    ]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout_str(&ok));
    for line in stdout_str(&ok).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["verdict"], "CERTIFIED_TAME");
    }
    let refused = fglcert(&[
        "perturb-certify",
        "--ell",
        "5",
        "--scale",
        "3",
        "--seed",
        "9",
        "--count",
        "5",
        "--cap",
        "27",
    ]);
    assert_eq!(refused.status.code(), Some(2));
}

#[test]
fn output_file_and_usage_errors() {
    let path = tmp_path("factor.json");
    let out = fglcert(&["factor", "--ell", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let content = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(content, "{\"ell\":7,\"a\":5}\n");
    // unknown flag: usage error, exit 1 (2 is reserved for REFUSED)
    let bad = fglcert(&["factor", "--ell", "7", "--nonsense"]);
    assert_eq!(bad.status.code(), Some(1));
    // unknown law specifier
    let bad_law = fglcert(&["fgl-build", "--ell", "5", "--law", "nope"]);
    assert_eq!(bad_law.status.code(), Some(1));
    // composite ell is an error, not a refusal
    let bad_ell = fglcert(&["factor", "--ell", "9"]);
    assert_eq!(bad_ell.status.code(), Some(1));
}

#[test]
fn explain_renders_report_to_stderr() {
    let out = fglcert(&[
        "certify-curve",
        "--ell",
        "5",
        "--coeffs",
        "1,0,0,0,0,0,1",
        "--explain",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains("verdict: CERTIFIED_TAME"));
    assert!(err.contains("curve.good-reduction"));
    // canonical JSON still on stdout
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["verdict"], "CERTIFIED_TAME");
    // report format replaces the JSON body
    let rep = fglcert(&[
        "certify-curve",
        "--ell",
        "5",
        "--coeffs",
        "1,0,0,0,0,0,1",
        "--format",
        "report",
    ]);
    assert!(stdout_str(&rep).starts_with("subject:"));
}

#[test]
fn conjugate_law_profile() {
    let out = fglcert(&[
        "fgl-r",
        "--ell",
        "5",
        "--law",
        "conjugate-supersingular:seed=3",
        "--precision",
        "1",
        "--cap",
        "27",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_str(&out));
    assert_eq!(stdout_str(&out), "{\"r\":2}\n");
}
