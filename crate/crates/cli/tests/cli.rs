use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_svcalc");

fn svcalc(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("SVCALC_DEFAULT_RESOLUTION")
        .output()
        .expect("failed to run svcalc")
}

fn ok_json(args: &[&str]) -> Value {
    let out = svcalc(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by a signal")
}

fn rows(v: &Value) -> Vec<Vec<f64>> {
    serde_json::from_value(v.clone()).unwrap()
}

fn field<'a>(report: &'a Value, side: &str) -> &'a Value {
    report["fields"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f["side"] == side)
        .unwrap()
}

fn anchor<'a>(field: &'a Value, y: &[f64]) -> &'a Value {
    field["anchors"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| serde_json::from_value::<Vec<f64>>(a["y"].clone()).unwrap() == y)
        .unwrap_or_else(|| panic!("no anchor {y:?}"))
}

fn scalars(v: &Value) -> Vec<f64> {
    rows(v).into_iter().map(|r| r[0]).collect()
}

#[test]
fn pairs_of_set_literals() {
    let r = ok_json(&["pairs", "--a", "[0, 3]", "--b", "[1]"]);
    assert_eq!(rows(&r["pairs"]), vec![vec![0.0, 1.0], vec![3.0, 1.0]]);
    assert_eq!(r["hausdorff"], 2.0);
    assert_eq!(scalars(&r["metric_difference"]), vec![-1.0, 2.0]);

    let r = ok_json(&[
        "pairs",
        "--a",
        "[[0, 0], [1, 2]]",
        "--b",
        "[[1, 2], [0, 0]]",
    ]);
    assert_eq!(r["hausdorff"], 0.0);
    assert_eq!(rows(&r["metric_difference"]), vec![vec![0.0, 0.0]]);
}

#[test]
fn pairs_csv() {
    let out = svcalc(&["pairs", "--a", "[0, 3]", "--b", "[1]", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "a_1,b_1,d_1,length");
    let last: Vec<f64> = lines[2].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(last, vec![3.0, 1.0, 2.0, 2.0]);
}

#[test]
fn pairs_of_function_values() {
    let r = ok_json(&[
        "pairs",
        "--svf",
        "interval_growth",
        "--x0",
        "0",
        "--x",
        "-0.5",
        "--resolution",
        "4",
    ]);
    assert_eq!(scalars(&r["a"]), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    assert_eq!(r["hausdorff"], 0.5);
}

#[test]
fn malformed_input_exits_with_2() {
    let out = svcalc(&["pairs", "--a", "[[0], [3]]", "--b", "[[1, 2]]"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension mismatch"));
    assert!(out.stdout.is_empty());

    for args in [
        &["pairs", "--a", "[0,", "--b", "[1]"][..],
        &["pairs", "--a", "[0]"],
        &["derivative", "--svf", "interval_growth"],
        &["derivative", "--svf", "nope", "--x0", "0"],
        &[
            "derivative",
            "--svf",
            "two_powers",
            "--params",
            "{\"alpha\": 2, \"beta\": 2}",
            "--x0",
            "1",
        ],
        &[
            "derivative",
            "--svf",
            "interval_growth",
            "--x0",
            "0",
            "--resolution",
            "1",
        ],
        &[
            "derivative",
            "--svf",
            "interval_growth",
            "--x0",
            "0",
            "--ratio",
            "1.5",
        ],
        &[
            "derivative",
            "--svf",
            "interval_growth",
            "--x0",
            "0",
            "--unknown",
        ],
        &["dd", "--svf", "interval_growth", "--x0", "0", "--x", "0"],
        &[
            "alpha",
            "--svf",
            "interval_growth",
            "--x0",
            "0",
            "--side",
            "both",
        ],
    ] {
        assert_eq!(code(&svcalc(args)), 2, "{args:?}");
    }
}

#[test]
fn domain_violations_exit_with_2() {
    for args in [
        &["derivative", "--svf", "interval_growth", "--x0", "0.9"][..],
        &["derivative", "--svf", "interval_growth", "--x0", "2"],
        &["order", "--svf", "two_powers", "--x0", "0.1"],
        &[
            "approx",
            "--svf",
            "interval_growth",
            "--x0",
            "0",
            "--x",
            "1.5",
        ],
    ] {
        let out = svcalc(args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn interval_growth_derivative() {
    let res = 64.0;
    let r = ok_json(&[
        "derivative",
        "--svf",
        "interval_growth",
        "--x0",
        "0",
        "--resolution",
        "64",
    ]);
    let right = scalars(&anchor(field(&r, "right"), &[1.0])["derivative_points"]);
    let grid: Vec<f64> = (0..=64).map(|k| k as f64 / res).collect();
    assert_eq!(right.len(), grid.len());
    for (d, g) in right.iter().zip(&grid) {
        assert!((d - g).abs() <= 2.0 / res, "{d} vs {g}");
    }
    let left = field(&r, "left");
    assert_eq!(
        scalars(&anchor(left, &[1.0])["derivative_points"]),
        vec![1.0]
    );
    assert_eq!(
        scalars(&anchor(left, &[0.5])["derivative_points"]),
        vec![0.0]
    );
    assert_eq!(r["fields"][0]["converged"], true);
}

#[test]
fn two_powers_derivative_at_the_crossing() {
    let r = ok_json(&[
        "derivative",
        "--svf",
        "two_powers",
        "--x0",
        "1",
        "--side",
        "right",
    ]);
    let f = field(&r, "right");
    let tol = f["conv_tol"].as_f64().unwrap();
    let d = scalars(&anchor(f, &[1.0])["derivative_points"]);
    assert_eq!(d.len(), 2);
    assert!(
        (d[0] - 1.0).abs() <= tol && (d[1] - 2.0).abs() <= tol,
        "{d:?}"
    );
}

#[test]
fn unconverged_derivative_exits_with_3_and_still_reports() {
    let args = [
        "derivative",
        "--svf",
        "smooth_singleton",
        "--params",
        "{\"f\": \"x^3\"}",
        "--x0",
        "0.5",
        "--conv-tol",
        "1e-15",
    ];
    let out = svcalc(&args);
    assert_eq!(code(&out), 3);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["fields"][0]["converged"], false);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("did not converge") && err.contains("anchor [0.125]"),
        "{err}"
    );

    for (cmd, extra) in [
        ("order", &[][..]),
        ("alpha", &[]),
        ("approx", &["--x", "0.6"]),
    ] {
        let a = [&[cmd][..], &args[1..], extra].concat();
        let out = svcalc(&a);
        assert_eq!(code(&out), 3, "{cmd}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
    }
}

fn fitted_slope(r: &Value) -> f64 {
    assert_eq!(r["fit"]["kind"], "fitted", "{r}");
    r["fit"]["slope"].as_f64().unwrap()
}

#[test]
fn order_of_strong_example_is_two() {
    let r = ok_json(&[
        "order",
        "--svf",
        "strong_example",
        "--x0",
        "0",
        "--resolution",
        "1024",
    ]);
    assert!((fitted_slope(&r) - 2.0).abs() <= 0.1);
    for s in r["curve"]["samples"].as_array().unwrap() {
        let (h, err) = (s["h"].as_f64().unwrap(), s["err"].as_f64().unwrap());
        assert!((err - h * h).abs() <= 8.0 * 2.5 / 1024.0, "h = {h}: {err}");
    }
}

#[test]
fn order_of_constant_is_exact() {
    let r = ok_json(&[
        "order",
        "--svf",
        "constant",
        "--params",
        "{\"intervals\": [[0, 1]]}",
        "--x0",
        "0",
    ]);
    assert_eq!(r["fit"]["kind"], "exact");
    assert!(r["curve"]["samples"]
        .as_array()
        .unwrap()
        .iter()
        .all(|s| s["err"] == 0.0));
}

#[test]
fn order_of_smooth_cubic_is_two() {
    let r = ok_json(&[
        "order",
        "--svf",
        "smooth_singleton",
        "--params",
        "{\"f\": \"x^3\"}",
        "--x0",
        "0.5",
    ]);
    assert!((fitted_slope(&r) - 2.0).abs() <= 0.1);
}

#[test]
fn alpha_of_strong_example_is_one() {
    let r = ok_json(&[
        "alpha",
        "--svf",
        "strong_example",
        "--x0",
        "0",
        "--resolution",
        "512",
    ]);
    assert_eq!(r["estimate"]["kind"], "fitted");
    assert!((r["estimate"]["slope"].as_f64().unwrap() - 1.0).abs() <= 0.1);
}

#[test]
fn approximant_at_half() {
    let r = ok_json(&[
        "approx",
        "--svf",
        "strong_example",
        "--x0",
        "0",
        "--x",
        "0.5",
        "--resolution",
        "1024",
    ]);
    let l = scalars(&r["approximant"]);
    let gap = l.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    assert!(l[0].abs() <= 2.5 / 1024.0 && (l[l.len() - 1] - 2.5).abs() <= 2.5 / 1024.0);
    assert!(gap <= 2.0 * 2.5 / 1024.0);
}

#[test]
fn divided_differences() {
    let r = ok_json(&["dd", "--svf", "two_powers", "--x0", "1", "--x", "1.5"]);
    let parts = r["anchored"].as_array().unwrap();
    assert_eq!(parts.len(), 1);
    // (1.5 − 1)/0.5 and (2.25 − 1)/0.5.
    assert_eq!(scalars(&parts[0]["value"]), vec![1.0, 2.5]);
    assert_eq!(scalars(&r["full"]), vec![1.0, 2.5]);
}

#[test]
fn csv_matches_json() {
    let base = ["order", "--svf", "strong_example", "--x0", "0"];
    let json = ok_json(&base);
    let out = svcalc(&[&base[..], &["--format", "csv"]].concat());
    assert!(out.status.success());
    let fit: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(fit, json["fit"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("h,err"));
    for (line, s) in lines.zip(json["curve"]["samples"].as_array().unwrap()) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(
            cells,
            vec![s["h"].as_f64().unwrap(), s["err"].as_f64().unwrap()]
        );
    }
}

#[test]
fn output_is_deterministic() {
    let args = [
        "order",
        "--svf",
        "two_curves_2d",
        "--x0",
        "1.5",
        "--resolution",
        "64",
    ];
    let a = svcalc(&args);
    let b = svcalc(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn piecewise_config_matches_the_gallery() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "strong.json",
        r#"{"svf": {"piecewise": {"domain": [-1, 1], "pieces": [
              {"from": -1, "to": 0, "intervals": [["0", "2 - x^2"]]},
              {"from": 0, "to": 1, "intervals": [["0", "2 + x"]], "points": ["-x^2"]}]}},
            "x0": 0, "sides": ["left", "right"], "resolution": 512,
            "ladder": {"rungs": 10}}"#,
    );
    let from_config = ok_json(&["order", "--config", &config]);
    let from_gallery = ok_json(&[
        "order",
        "--svf",
        "strong_example",
        "--x0",
        "0",
        "--resolution",
        "512",
        "--rungs",
        "10",
    ]);
    assert_eq!(from_config, from_gallery);
}

#[test]
fn config_output_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.csv");
    let config = write(
        dir.path(),
        "c.json",
        &format!(
            r#"{{"svf": {{"gallery": {{"name": "interval_growth"}}}}, "x0": 0, "resolution": 8,
                "output": {{"path": {:?}, "format": "csv"}}}}"#,
            report.to_str().unwrap()
        ),
    );
    let out = svcalc(&["derivative", "--config", &config, "--side", "left"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.starts_with("anchor_1,d_1,side,residual,converged\n"));
    assert_eq!(text.lines().count(), 1 + 9);

    let bad = write(dir.path(), "bad.json", r#"{"x0": 0, "resolutoin": 8}"#);
    assert_eq!(code(&svcalc(&["derivative", "--config", &bad])), 2);
    assert_eq!(
        code(&svcalc(&["derivative", "--config", "/nonexistent/c.json"])),
        2
    );
}

#[test]
fn resolution_from_environment() {
    let run = |env: &str, extra: &[&str]| {
        let out = Command::new(BIN)
            .args([
                "derivative",
                "--svf",
                "interval_growth",
                "--x0",
                "0",
                "--side",
                "right",
            ])
            .args(extra)
            .env("SVCALC_DEFAULT_RESOLUTION", env)
            .output()
            .unwrap();
        (
            code(&out),
            serde_json::from_slice::<Value>(&out.stdout).ok(),
        )
    };
    let (c, r) = run("16", &[]);
    assert_eq!(c, 0);
    assert_eq!(r.unwrap()["fields"][0]["resolution"], 16);
    let (_, r) = run("16", &["--resolution", "32"]);
    assert_eq!(r.unwrap()["fields"][0]["resolution"], 32);
    assert_eq!(run("many", &[]).0, 2);
}

#[test]
fn gallery_listing() {
    let r = ok_json(&["gallery", "list", "--format", "json"]);
    let names: Vec<&str> = r
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "two_powers",
            "interval_growth",
            "two_curves_2d",
            "strong_example",
            "constant",
            "smooth_singleton"
        ]
    );
    let out = svcalc(&["gallery", "list"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("strong_example"));
}
