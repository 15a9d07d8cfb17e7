use std::path::PathBuf;
use std::process::Command;

use mscs::cli::{
    run_captured, AnalyzeOutput, BoundsOutput, DistOutput, DominanceOutput, EvalOutput, SweepOutput,
    UcvOutput,
};
use mscs::coherence::CoherenceReport;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_captured(args)
}

/// Parses a `--json` document and checks it serializes back to the same value.
fn round_trip<T: DeserializeOwned + Serialize>(text: &str) -> T {
    let value: T = serde_json::from_str(text).expect("output matches its schema");
    let again = serde_json::to_value(&value).unwrap();
    let original: serde_json::Value = serde_json::from_str(text).unwrap();
    assert_eq!(again, original);
    value
}

#[test]
fn coherence_of_series_passes() {
    let (code, out, _) = run(&["coherence", "--structure", "series(c1,c2,c3)", "--max-state", "4"]);
    assert_eq!(code, 0);
    assert!(out.contains("overall: coherent"), "{out}");
    assert!(!out.contains("FAIL"));
}

#[test]
fn coherence_failure_exits_one() {
    let (code, out, _) = run(&[
        "coherence",
        "--structure",
        "parallel(c1, c1)",
        "--components",
        "2",
        "--max-state",
        "2",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("NOT coherent"));

    let (code, out, _) = run(&[
        "coherence",
        "--structure",
        "parallel(c1, c1)",
        "--components",
        "2",
        "--max-state",
        "2",
        "--json",
    ]);
    assert_eq!(code, 1);
    let report: CoherenceReport = round_trip(&out);
    assert!(!report.overall);
    assert_eq!(report.counterexamples.len(), 3);
}

#[test]
fn eval_prints_level() {
    let (code, out, _) = run(&[
        "eval",
        "--structure",
        "series(c1, parallel(c2, c3))",
        "--state",
        "0,2,1",
    ]);
    assert_eq!((code, out.as_str()), (0, "0\n"));
    let (code, out, _) = run(&[
        "eval",
        "--structure",
        "koon(2; c1,c2,c3)",
        "--state",
        "1,4,2",
        "--json",
    ]);
    assert_eq!(code, 0);
    let v: EvalOutput = round_trip(&out);
    assert_eq!(v.level, 2);
}

#[test]
fn eval_errors_exit_two() {
    let (code, out, err) = run(&["eval", "--structure", "series(c1)", "--state", "2"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.starts_with("error: parse error at byte 10"), "{err}");
    assert_eq!(err.lines().count(), 1);

    let (code, _, err) = run(&[
        "eval",
        "--structure",
        "series(c1, c2)",
        "--state",
        "1,5",
        "--max-state",
        "4",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("exceeds"));
    let (code, _, _) = run(&["eval", "--structure", "series(c1, c2)", "--state", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn ucv_lists_vectors() {
    let (code, out, _) = run(&[
        "ucv",
        "--structure",
        "parallel(c1, c2)",
        "--max-state",
        "2",
        "--level",
        "1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "[0,1]\n[1,0]\n");
    let (code, out, _) = run(&[
        "ucv",
        "--structure",
        "series(c1, c2)",
        "--max-state",
        "2",
        "--level",
        "1",
        "--json",
    ]);
    assert_eq!(code, 0);
    let u: UcvOutput = round_trip(&out);
    assert_eq!(u.vectors.len(), 1);
    assert_eq!(u.vectors[0].as_slice(), &[1, 1]);
    let (code, _, _) = run(&[
        "ucv",
        "--structure",
        "series(c1, c2)",
        "--max-state",
        "2",
        "--level",
        "3",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn dist_methods_agree() {
    let base = [
        "dist",
        "--structure",
        "series(c1, c2)",
        "--pmf",
        "0.5,0.5",
        "--pmf",
        "0.5,0.5",
        "--json",
    ];
    let mut exact = base.to_vec();
    exact.extend(["--method", "exact"]);
    let (code, out, _) = run(&exact);
    assert_eq!(code, 0);
    let e: DistOutput = round_trip(&out);
    assert_eq!(e.distribution.pmf, vec![0.75, 0.25]);

    let mut closed = base.to_vec();
    closed.extend(["--method", "closed"]);
    let (code, out, _) = run(&closed);
    assert_eq!(code, 0);
    let c: DistOutput = round_trip(&out);
    assert!((c.distribution.cdf[0] - 0.75).abs() < 1e-12);

    let mut mc = base.to_vec();
    mc.extend(["--method", "mc", "--samples", "100000", "--seed", "42"]);
    let (code, out, _) = run(&mc);
    assert_eq!(code, 0);
    let m: DistOutput = round_trip(&out);
    let est = m.estimates.unwrap();
    assert!((est[0].estimate - 0.75).abs() <= 6.0 * est[0].std_error);
    assert_eq!(run(&mc).1, out);
}

#[test]
fn dist_from_spec_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("dist.csv");
    let structure = format!(
        "series({})",
        (1..=6).map(|i| format!("c{i}")).collect::<Vec<_>>().join(", ")
    );
    let spec_path = dir.path().join("six.json");
    let six = r#"{"max_state": 4, "segments": [
        {"name": "a", "pmf": [0.0, 0.1, 0.3, 0.3, 0.3]}, {"name": "b", "pmf": [0.0, 0.1, 0.3, 0.3, 0.3]},
        {"name": "c", "pmf": [0.0, 0.1, 0.3, 0.3, 0.3]}, {"name": "d", "pmf": [0.0, 0.1, 0.3, 0.3, 0.3]},
        {"name": "e", "pmf": [0.0, 0.1, 0.3, 0.3, 0.3]}, {"name": "f", "pmf": [0.0, 0.1, 0.3, 0.3, 0.3]}]}"#;
    std::fs::write(&spec_path, six).unwrap();
    let (code, out, err) = run(&[
        "dist",
        "--structure",
        &structure,
        "--spec",
        spec_path.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 6);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("level,pmf,cdf\n"));
}

#[test]
fn closed_form_rejects_general_structures() {
    let (code, _, err) = run(&[
        "dist",
        "--structure",
        "koon(2; c1, c2, c3)",
        "--method",
        "closed",
        "--pmf",
        "0.5,0.5",
        "--pmf",
        "0.5,0.5",
        "--pmf",
        "0.5,0.5",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("closed forms"));
}

#[test]
fn bounds_hold_for_koon() {
    let (code, out, _) = run(&[
        "bounds",
        "--structure",
        "koon(2; c1, c2, c3)",
        "--pmf",
        "0.2,0.3,0.5",
        "--pmf",
        "0.1,0.6,0.3",
        "--pmf",
        "0.4,0.4,0.2",
        "--json",
    ]);
    assert_eq!(code, 0);
    let b: BoundsOutput = round_trip(&out);
    assert!(b.holds);
    assert_eq!(b.kind, None);
    assert_eq!(b.rows.len(), 3);
}

#[test]
fn dominance_subcommand() {
    let args = [
        "dominance",
        "--structure",
        "parallel(c1, c2)",
        "--pmf",
        "0.5,0.5",
        "--pmf",
        "0.5,0.5",
        "--primed-pmf",
        "0.1,0.9",
        "--primed-pmf",
        "0.1,0.9",
        "--json",
    ];
    let (code, out, _) = run(&args);
    assert_eq!(code, 0);
    let d: DominanceOutput = round_trip(&out);
    assert!(d.holds);

    let (code, _, err) = run(&[
        "dominance",
        "--structure",
        "parallel(c1, c2)",
        "--pmf",
        "0.1,0.9",
        "--pmf",
        "0.1,0.9",
        "--primed-pmf",
        "0.5,0.5",
        "--primed-pmf",
        "0.5,0.5",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("hypothesis"));
}

#[test]
fn pipeline_analyze_case_study() {
    let spec = data("case_study.json");
    let (code, out, _) = run(&["pipeline", "analyze", "--spec", &spec, "--level", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out, "0.6513215599\n");
    let (code, out, _) = run(&["pipeline", "analyze", "--spec", &spec, "--json"]);
    assert_eq!(code, 0);
    let a: AnalyzeOutput = round_trip(&out);
    assert_eq!(a.segments, 10);
    assert!((a.state1.unwrap() - a.cdf[1]).abs() < 1e-12);
    let (code, _, _) = run(&["pipeline", "analyze", "--spec", "/no/such/file.json"]);
    assert_eq!(code, 2);
}

#[test]
fn pipeline_sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let spec = data("above_average.json");
    let args = [
        "pipeline",
        "sweep",
        "--spec",
        &spec,
        "--trials",
        "250",
        "--seed",
        "7",
        "--out",
        csv.to_str().unwrap(),
    ];
    let (code, first, _) = run(&args);
    assert_eq!(code, 0);
    let (_, second, _) = run(&args);
    assert_eq!(first, second);
    assert!(first.contains("sample argmax"));
    let rows = mscs::pipeline::read_sweep_csv(&csv).unwrap();
    assert_eq!(rows.len(), 250);

    let mut json_args = args.to_vec();
    json_args.push("--json");
    let (_, out, _) = run(&json_args);
    let s: SweepOutput = round_trip(&out);
    assert_eq!(s.supremum, 1.0);
    assert!(rows.contains(&s.argmax));
}

#[test]
fn limit_flag_guards_enumeration() {
    let (code, _, err) = run(&[
        "coherence",
        "--structure",
        "series(c1, c2, c3)",
        "--max-state",
        "4",
        "--limit",
        "100",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("enumeration limit"), "{err}");
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["coherence", "--structure", "c1"]).0, 2);
    assert_eq!(run(&["dist", "--structure", "c1"]).0, 2);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("pipeline"));
}

#[test]
fn binary_exit_codes_and_env_limit() {
    let bin = env!("CARGO_BIN_EXE_mscs");
    let status = Command::new(bin)
        .args(["coherence", "--structure", "series(c1, c2)", "--max-state", "2"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));

    let limited = Command::new(bin)
        .env("MSCS_LIMIT", "4")
        .args(["coherence", "--structure", "series(c1, c2)", "--max-state", "2"])
        .output()
        .unwrap();
    assert_eq!(limited.status.code(), Some(2));

    let failing = Command::new(bin)
        .args([
            "coherence",
            "--structure",
            "parallel(c1, c1)",
            "--components",
            "2",
            "--max-state",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(failing.status.code(), Some(1));
}
