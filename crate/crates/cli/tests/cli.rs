use std::process::{Command, Output};

use awq_core::densities::phi_free;

fn awq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_awq")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn csv_column(text: &str, name: &str) -> Vec<f64> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn eval_h2_on_a_grid() {
    let o = awq(&["eval", "H", "--n", "2", "--q", "0.5", "--grid", "-2:2:5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 6);
    assert!(text.ends_with('\n') && !text.contains('\r'));
    let v = csv_column(&text, "value");
    assert_eq!(v[2], -1.0);
    assert_eq!(csv_column(&text, "x")[2], 0.0);
}

#[test]
fn eval_phi_matches_free_closed_form() {
    let o = awq(&["eval", "phi", "--q", "0", "--y", "-0.3", "--z", "0.8", "--rho1", "0.4", "--rho2", "0.5", "--x", "0.5"]);
    assert!(o.status.success());
    let v = csv_column(&stdout(&o), "value")[0];
    let want = phi_free(0.5, -0.3, 0.4, 0.8, 0.5);
    assert!((v - want).abs() < 1e-12, "{v} vs {want}");
}

#[test]
fn eval_c0_is_one() {
    let o = awq(&["eval", "C", "--n", "0", "--q", "0.3", "--y", "0.2", "--z", "-0.4", "--rho1", "0.5", "--rho2", "0.6"]);
    assert!(o.status.success());
    assert_eq!(csv_column(&stdout(&o), "value"), vec![1.0]);
}

#[test]
fn every_selector_evaluates() {
    for sel in ["h", "H", "Q", "P", "B", "b", "U", "D", "A", "f_N", "f_CN", "phi", "C"] {
        let o = awq(&[
            "eval", sel, "--n", "3", "--q", "0.4", "--y", "0.3", "--z", "-0.2", "--rho1", "0.5", "--rho2", "-0.4", "--grid",
            "-0.5:0.5:3",
        ]);
        assert!(o.status.success(), "{sel}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    let base = ["eval", "f_CN", "--q", "0.3", "--y", "0.4", "--rho1", "0.6", "--grid", "-1.9:1.9:7"];
    let csv = stdout(&awq(&base));
    let mut js_args = base.to_vec();
    js_args.extend(["--format", "json"]);
    let js: serde_json::Value = serde_json::from_str(&stdout(&awq(&js_args))).unwrap();
    let rows = js.as_array().unwrap();
    assert_eq!(rows.len(), 7);
    for (row, v) in rows.iter().zip(csv_column(&csv, "value")) {
        assert_eq!(row["value"].as_f64().unwrap(), v);
        assert!(row["terms"].as_u64().unwrap() > 0);
    }
}

#[test]
fn eval_is_deterministic() {
    let args = ["eval", "A", "--n", "5", "--q", "-0.3", "--y", "0.1", "--z", "0.7", "--rho1", "0.3", "--rho2", "0.8", "--grid", "-2:2:41"];
    assert_eq!(awq(&args).stdout, awq(&args).stdout);
}

#[test]
fn precondition_violations_exit_2() {
    let cases: &[&[&str]] = &[
        &["eval", "H", "--q", "0.5", "--x", "0"],
        &["eval", "H", "--n", "65", "--q", "0.5", "--x", "0"],
        &["eval", "H", "--n", "2", "--q", "1.5", "--x", "0"],
        &["eval", "H", "--n", "2", "--q", "0.5", "--grid", "0:1:0"],
        &["eval", "phi", "--q", "0.5", "--rho1", "1.0", "--x", "0"],
        &["eval", "f_CN", "--q", "0", "--y", "2.5", "--x", "0"],
        &["eval", "Z", "--n", "1", "--q", "0", "--x", "0"],
        &["expand", "--n", "0", "--q", "0.5"],
        &["verify", "--check", "nosuch"],
        &["bogus"],
    ];
    for args in cases {
        let o = awq(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(!err.trim().is_empty(), "{args:?} gave no diagnostic");
    }
}

#[test]
fn density_endpoints_are_zero() {
    let o = awq(&["eval", "f_N", "--q", "0", "--grid", "-2:2:3"]);
    let v = csv_column(&stdout(&o), "value");
    assert_eq!((v[0], v[2]), (0.0, 0.0));
    assert!(v[1] > 0.0);
}

#[test]
fn verify_single_check() {
    let o = awq(&["verify", "--check", "orthogonality_H", "--nmax", "4", "--q", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("15 passed, 0 failed"));
}

#[test]
fn verify_all_at_one_q() {
    let o = awq(&["verify", "--all", "--q", "0.5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let js: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(js.as_array().unwrap().iter().all(|r| r["pass"] == true));
}

#[test]
fn verify_reports_failures_with_exit_1() {
    // an unattainable threshold turns quadrature checks red
    let o = awq(&["verify", "--check", "moments", "--q", "0.3", "--rho1", "0.5", "--rho2", "0.5", "--y", "0.1", "--z", "0.2", "--tol", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL moments"));
}

#[test]
fn expand_behaviour() {
    // no correlation: phi is the q-normal density and every partial sum is exact
    let o = awq(&["expand", "--n", "3", "--q", "0.4", "--y", "0.2", "--z", "0.1"]);
    assert!(o.status.success());
    assert!(csv_column(&stdout(&o), "abs_error").iter().all(|e| *e < 1e-15));

    let sup = |n: &str| {
        let o = awq(&["expand", "--n", n, "--q", "0.3", "--y", "0.5", "--z", "-0.5", "--rho1", "0.6", "--rho2", "0.6"]);
        assert!(o.status.success());
        csv_column(&stdout(&o), "abs_error").into_iter().fold(0.0, f64::max)
    };
    let (e10, e20, e40) = (sup("10"), sup("20"), sup("40"));
    assert!(e10 > e20 && e20 > e40, "{e10} {e20} {e40}");
    assert!(e40 < 1e-6);

    let o = awq(&["expand", "f_CN", "--n", "60", "--q", "0.5", "--y", "0.3", "--rho1", "0.6", "--grid", "-2.5:2.5:11"]);
    assert!(csv_column(&stdout(&o), "abs_error").iter().all(|e| *e < 1e-8));
    assert!(stdout(&o).starts_with("x,closed_form,partial_sum_N,abs_error\n"));
}
