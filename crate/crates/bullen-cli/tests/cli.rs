//! End-to-end tests of the command-line interface: exit codes, output
//! formats, and byte-level determinism across runs and worker counts.

use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_bullen-bounds");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_with_threads(args: &[&str], threads: &str) -> Output {
    Command::new(BIN)
        .args(args)
        .env("BULLEN_BOUNDS_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn bound_thm21_equality_cell() {
    let out = run(&[
        "bound", "--thm", "THM21", "--fn", "quadratic", "--a", "0", "--b", "1", "--x", "0.5",
        "--alpha", "1", "--beta", "1", "--s", "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("lhs = 8.3333333333333"), "{text}");
    assert!(text.contains("rhs = 8.3333333333333"), "{text}");
    assert!(text.contains("status = HOLDS"), "{text}");
}

#[test]
fn bound_thm31_on_degenerate_curvature_is_a_routing_error() {
    let out = run(&[
        "bound", "--thm", "THM31", "--fn", "quadratic", "--a", "0", "--b", "1", "--x", "0.5",
    ]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(
        err.contains("kappa") && err.contains("degenerate"),
        "unexpected message: {err}"
    );
}

#[test]
fn bound_ostrowski_uses_the_registry_m1() {
    let out = run(&[
        "bound", "--thm", "OSTROWSKI", "--fn", "exp1", "--a", "0", "--b", "1", "--x", "0.5",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    // 0.25 * M1 with M1 = e
    assert!(stdout(&out).contains("rhs = 6.79570457114761e-1"), "{}", stdout(&out));
}

#[test]
fn bound_rejects_unknown_ids_and_missing_certifications() {
    let out = run(&["bound", "--thm", "THM99", "--fn", "quadratic", "--a", "0", "--b", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "bound", "--thm", "THM21", "--fn", "power_s(1/2)", "--a", "0", "--b", "1", "--x", "0.5",
        "--s", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not certified"));
    let out = run(&["bound", "--thm", "THM21", "--fn", "nope", "--a", "0", "--b", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn integrate_quadratic_equality() {
    let out = run(&[
        "integrate", "--fn", "quadratic", "--uniform", "2", "--kind", "PROP2", "--s", "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("actual_error = 1.0416666666666"), "{text}");
    assert!(text.contains("apriori_bound = 1.0416666666666"), "{text}");
    assert!(text.contains("status = HOLDS"), "{text}");
}

#[test]
fn integrate_exp_prop1_equality() {
    let out = run(&["integrate", "--fn", "exp1", "--uniform", "1", "--kind", "PROP1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("status = HOLDS"), "{text}");
    assert!(text.contains("actual_error = 3.564926400578"), "{text}");
    assert!(text.contains("apriori_bound = 3.564926400578"), "{text}");
}

#[test]
fn integrate_linear_is_exact() {
    let out = run(&[
        "integrate", "--fn", "linear", "--uniform", "8", "--kind", "PROP2", "--s", "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("apriori_bound = 0"), "{text}");
    assert!(text.contains("status = HOLDS"), "{text}");
}

#[test]
fn integrate_random_partitions_are_seeded() {
    let args = [
        "integrate", "--fn", "exp1", "--random", "6", "--kind", "PROP1", "--seed", "7",
        "--format", "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn verify_json_is_byte_identical_across_runs_and_worker_counts() {
    let args = [
        "verify", "--functions", "quadratic,exp1", "--x-fracs", "0.25,0.5,0.75", "--weights",
        "1:1,1:2", "--intervals", "0:1", "--format", "json",
    ];
    let a = run_with_threads(&args, "1");
    let b = run_with_threads(&args, "4");
    let c = run(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b), "worker count changed the output bytes");
    assert_eq!(stdout(&a), stdout(&c));
    // sanity: it is JSON with the documented schema keys
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    for key in ["meta", "reports", "violations", "discrepancies"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn verify_csv_has_the_documented_columns() {
    let out = run(&[
        "verify", "--functions", "quadratic", "--s", "0.5", "--x-fracs", "0.5", "--weights",
        "1:1", "--intervals", "0:1", "--format", "csv",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.starts_with("theorem_id,fn_id,a,b,x,alpha,beta,s,p,q,lhs,rhs,slack,status\n"),
        "{text}"
    );
    assert!(text.contains("LEMMA21,quadratic,0,1,0.5,1,1"), "{text}");
    // the --s override lands in the s column of the THM21 rows
    assert!(text.contains("THM21,quadratic,0,1,0.5,1,1,0.5,,,"), "{text}");
}

#[test]
fn verify_full_default_suite_passes() {
    let out = run(&["verify"]);
    assert!(out.status.success(), "{}\n{}", stdout(&out), stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("asserted checks: all hold"), "{text}");
}

#[test]
fn verify_with_impossible_identity_tolerance_fails() {
    // The tabulated entry's interpolation bias (~1e-13) exceeds 1e-15, so the
    // identity rows must be reported as float-limit violations.
    let out = run(&[
        "verify", "--functions", "expsq", "--tol-identity", "1e-15", "--format", "text",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("VIOLATED LEMMA21"), "{}", stdout(&out));
}

#[test]
fn verify_writes_output_files() {
    let dir = std::env::temp_dir().join("bullen-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let out = run(&[
        "verify", "--functions", "linear", "--x-fracs", "0.5", "--weights", "1:1", "--intervals",
        "0:1", "--format", "json", "-o", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(serde_json::from_str::<serde_json::Value>(&written).is_ok());
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn list_functions_emits_registry_and_membership_targets() {
    let out = run(&["list-functions", "--format", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let functions = v["functions"].as_array().unwrap();
    assert!(functions.iter().any(|f| f["id"] == "power_s(1/2)"));
    assert!(functions.iter().any(|f| f["id"] == "expsq"
        && f["certifications"]["log_convex_f2"] == true));
    assert!(!v["membership_targets"].as_array().unwrap().is_empty());
    let text_out = run(&["list-functions"]);
    assert!(stdout(&text_out).contains("membership-only targets"));
}

#[test]
fn report_renders_the_discrepancy_document() {
    let out = run(&[
        "report", "--functions", "quadratic,exp1", "--x-fracs", "0.25,0.75", "--weights", "1:1",
        "--intervals", "0:1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("DISCREPANCY REPORT"), "{text}");
    assert!(text.contains("THM22_STATED_VS_DERIVED"), "{text}");
    assert!(text.contains("PROP2_PRINTED_VS_CORRECTED"), "{text}");
}
