use std::process::Command;

use septic_core::report::Report;

fn septic(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_septic"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn klein_group_passes() {
    let (code, out, _) = septic(&["verify", "--check", "septic.klein", "--order", "10"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().filter(|l| l.contains(" pass ")).count(), 5);
}

#[test]
fn unknown_check_is_usage_error() {
    let (code, _, err) = septic(&["verify", "--check", "nosuch"]);
    assert_eq!(code, 2);
    assert!(err.contains("nosuch"));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(septic(&["verify", "--order", "1/0"]).0, 2);
    assert_eq!(septic(&["verify", "--format", "xml"]).0, 2);
    assert_eq!(septic(&["verify", "--jobs", "0"]).0, 2);
    assert_eq!(septic(&["frobnicate"]).0, 2);
    assert_eq!(septic(&["dump", "--series", "nosuch", "--order", "3"]).0, 2);
}

#[test]
fn json_report_round_trips_and_matches_text() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = ["verify", "--check", "cubic", "--check", "products.jtp_1", "--order", "12", "--jobs", "2"];
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json", "--out", path.to_str().unwrap()]);
    let (code, stdout, _) = septic(&json_args);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let raw = std::fs::read_to_string(&path).unwrap();
    let report: Report = serde_json::from_str(&raw).unwrap();
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", raw);
    assert_eq!(report.order.as_deref(), Some("12"));
    assert_eq!(report.summary.pass, 4);
    assert_eq!(report.summary.pass, report.results.iter().filter(|r| r.status == "pass").count());
    let names: Vec<_> = report.results.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(names, ["cubic.deq_a", "cubic.deq_b3", "cubic.deq_p", "products.jtp_1"]);

    let value: serde_json::Value = serde_json::from_str(&raw).unwrap();
    for key in ["version", "order", "results", "summary"] {
        assert!(value.get(key).is_some(), "{key}");
    }
    let first = &value["results"][0];
    for key in ["name", "status", "order_verified", "first_failure", "elapsed_ms"] {
        assert!(first.get(key).is_some(), "{key}");
    }
    assert!(first["first_failure"].is_null());

    let (code, text, _) = septic(&args);
    assert_eq!(code, 0);
    for r in &report.results {
        let line = text.lines().find(|l| l.starts_with(&r.name)).unwrap();
        assert!(line.contains(&r.status));
    }
}

#[test]
fn dump_matches_known_coefficients() {
    let (code, out, _) = septic(&["dump", "--series", "x", "--order", "4"]);
    assert_eq!(code, 0);
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let exact: Vec<(&str, &str)> = rows.iter().map(|r| (r[0], r[2])).collect();
    assert_eq!(exact, [("1", "1"), ("2", "0"), ("3", "-1")]);

    let (_, out, _) = septic(&["dump", "--series", "E2", "--order", "3", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
    let coeffs: Vec<&str> = rows.as_array().unwrap().iter().map(|r| r["coefficient"].as_str().unwrap()).collect();
    assert_eq!(coeffs, ["1", "-24", "-72"]);

    let (_, out, _) = septic(&["dump", "--series", "j7", "--order", "0"]);
    assert!(out.lines().any(|l| l.starts_with("-1,1,1,")));
}

#[test]
fn dump_cyclotomic_series_as_coordinates() {
    let (code, out, _) = septic(&["dump", "--series", "e:1/7", "--order", "2", "--format", "json"]);
    assert_eq!(code, 0);
    let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
    let c = &rows[1]["coefficient"];
    assert_eq!(c["level"], 28);
    assert_eq!(c["coords"].as_array().unwrap().len(), 12);
}

#[test]
fn constants_listing() {
    let (code, out, _) = septic(&["constants"]);
    assert_eq!(code, 0);
    assert!(out.contains("sum of phis = 5"));
    let (code, out, _) = septic(&["constants", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["level"], 28);
    assert_eq!(v["bundles"][0]["phi_sum"], "5");
    assert_eq!(v["decomposition"][0]["exact"]["coords"].as_array().unwrap().len(), 12);
}

#[test]
fn list_shows_groups_and_orders() {
    let (code, out, _) = septic(&["list"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.starts_with("septic.system.deq_p") && l.contains("q^60")));
    assert!(out.lines().any(|l| l.starts_with("general.alpha_1_5.deqq")));
}

#[test]
fn fractional_order() {
    let (code, _, _) = septic(&["verify", "--check", "products.log_quotient_1", "--order", "3/8"]);
    assert_eq!(code, 0);
}

#[test]
fn full_suite_passes() {
    let (code, out, err) = septic(&["verify", "--all", "--format", "json"]);
    assert_eq!(code, 0, "{err}");
    let report: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(report.summary.fail + report.summary.precision_error, 0);
    assert_eq!(report.summary.pass, report.results.len());
    assert!(report.order.is_none());
}
