use std::path::Path;
use std::process::{Command, Output};

use latentsim_core::report::Report;
use latentsim_core::SimulationSummary;

fn latentsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latentsim"))
        .args(args)
        .output()
        .expect("run latentsim")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn simulate_table_has_published_layout() {
    let o = latentsim(&["simulate", "--iterations", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    for label in [
        "# of Latent Prints",
        "# of Decisions",
        "Correct IDs",
        "wrong finger",
        "incorrect person",
        "Inconclusive",
        "Correct Exclusions",
        "Erroneous Exclusions",
    ] {
        assert!(text.contains(label), "missing {label}");
    }
    assert!(text.contains("N/A"));
}

#[test]
fn table_numbers_are_rounded_json_numbers() {
    let json = stdout(&latentsim(&[
        "simulate",
        "--iterations",
        "30",
        "--seed",
        "4",
        "--format",
        "json",
    ]));
    let table = stdout(&latentsim(&[
        "simulate",
        "--iterations",
        "30",
        "--seed",
        "4",
    ]));
    let s = SimulationSummary::from_json(&json).unwrap();
    let wf = s
        .category(latentsim_core::DecisionCategory::WrongFingerId)
        .total;
    let cell = format!("{:.2} [{}, {}]", wf.mean, wf.lower, wf.upper);
    assert!(table.contains(&cell), "{cell} not in\n{table}");
}

#[test]
fn json_is_byte_identical_for_same_seed() {
    let args = [
        "report-all",
        "--iterations",
        "10",
        "--seed",
        "11",
        "--format",
        "json",
    ];
    let a = latentsim(&args);
    let b = latentsim(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn report_all_structure() {
    let o = latentsim(&["report-all", "--quick", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: Report = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.iterations, 50);
    assert_eq!(r.simulations.len(), 7);
    assert_eq!(r.estimates.len(), 4);
    assert!(!r.proportion_test.significant);
    let text = stdout(&latentsim(&["report-all", "--iterations", "10"]));
    assert_eq!(text.matches("== Experiment").count(), 7);
}

#[test]
fn seeds_differ_within_interval_width() {
    let run = |seed: &str| {
        let o = latentsim(&[
            "report-all",
            "--iterations",
            "200",
            "--seed",
            seed,
            "--format",
            "json",
        ]);
        serde_json::from_slice::<Report>(&o.stdout).unwrap()
    };
    let (a, b) = (run("1"), run("2"));
    assert_ne!(a, b);
    for (x, y) in a.simulations.iter().zip(&b.simulations) {
        let cx = x.summary.rows.inconclusive.total;
        let cy = y.summary.rows.inconclusive.total;
        assert!(
            (cx.mean - cy.mean).abs() < (cx.upper - cx.lower) as f64,
            "{}",
            x.preset
        );
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("est.csv");
    let o = latentsim(&[
        "estimate",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("variant,numerator"));
    assert!(text.contains("osac,42,3687,"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"seed": 3, "iterations": 5, "format": "json"}"#,
    );
    let o = latentsim(&["simulate", "--config", &cfg, "--iterations", "6"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = SimulationSummary::from_json(&stdout(&o)).unwrap();
    assert_eq!((s.seed, s.iterations), (3, 6));
}

#[test]
fn rate_file_with_bad_sum_exits_2_naming_rsp() {
    let dir = tempfile::tempdir().unwrap();
    let rates = write(
        dir.path(),
        "rates.json",
        r#"{"label": "bad", "rSP": {"correctId": 0.8, "inconclusive": 0.25}, "rSA": {"correctExclusion": 1.0}}"#,
    );
    let o = latentsim(&["simulate", "--rates", &rates, "--quick"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rSP"), "{}", stderr(&o));
}

#[test]
fn structural_zero_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let rates = write(
        dir.path(),
        "rates.json",
        r#"{"label": "bad", "rSP": {"correctId": 1.0}, "rSA": {"correctId": 0.5, "correctExclusion": 0.5}}"#,
    );
    let o = latentsim(&["simulate", "--rates", &rates]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rSA"), "{}", stderr(&o));
}

#[test]
fn valid_rate_file_runs() {
    let dir = tempfile::tempdir().unwrap();
    let rates = write(
        dir.path(),
        "rates.json",
        r#"{"label": "perfect", "rSP": {"correctId": 1.0}, "rSA": {"correctExclusion": 1.0}}"#,
    );
    let o = latentsim(&[
        "simulate",
        "--rates",
        &rates,
        "--iterations",
        "5",
        "--format",
        "csv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("wrongPersonId,total,0,0,0"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn counts_file_changes_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let counts = write(
        dir.path(),
        "counts.json",
        r#"{"scenarios": {
              "present": {"correctId": 90, "wrongFingerId": 1, "wrongPersonId": 1, "inconclusive": 5, "correctExclusion": 0, "erroneousExclusion": 3},
              "absent": {"correctId": 0, "wrongFingerId": 0, "wrongPersonId": 2, "inconclusive": 8, "correctExclusion": 40, "erroneousExclusion": 0}}}"#,
    );
    let o = latentsim(&["estimate", "--counts", &counts, "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[3]["numerator"], 4);
    assert_eq!(v[3]["denominator"], 150);
}

#[test]
fn malformed_counts_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let counts = write(
        dir.path(),
        "counts.json",
        r#"{"scenarios": {"present": {"correctExclusion": 3}, "absent": {}}}"#,
    );
    let o = latentsim(&["bayes", "--counts", &counts]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("counts"));
}

#[test]
fn degenerate_counts_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let counts = write(
        dir.path(),
        "counts.json",
        r#"{"scenarios": {"present": {"correctId": 5}, "absent": {"inconclusive": 4}}}"#,
    );
    // every decision is inconclusive or correct: the MDPD denominator excluding
    // inconclusives is zero
    let o = latentsim(&["estimate", "--counts", &counts]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn unknown_preset_and_usage_exit_2() {
    assert_eq!(
        latentsim(&["simulate", "--rates", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        latentsim(&["simulate", "--format", "xml"]).status.code(),
        Some(2)
    );
    assert_eq!(latentsim(&["nonsense"]).status.code(), Some(2));
    assert_eq!(latentsim(&["--help"]).status.code(), Some(0));
}

#[test]
fn bayes_table_mentions_deviation() {
    let o = latentsim(&["bayes"]);
    let text = stdout(&o);
    assert!(text.contains("35/4536"));
    assert!(text.contains("0.7%"));
}
