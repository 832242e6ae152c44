use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_typometrics");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let put = |name: &str, body: &str| std::fs::write(dir.path().join(name), body).unwrap();
    put(
        "four.csv",
        "actual,predicted,naive\n1,2,1\n2,2,1\n3,5,2\n4,3,3\n",
    );
    put("two.json", r#"{"actual": [1, 2], "predicted": [2, 4]}"#);
    put("zeros.csv", "actual,predicted\n0,1\n2,3\n4,4\n");
    put("bad.csv", "actual,predicted\n1,2\n2,2\n3,abc\n");
    put("empty.csv", "actual,predicted\n");
    put("history.csv", "actual\n1\n3\n2\n5\n");
    dir
}

#[test]
fn human_output_marks_percentages() {
    let dir = workspace();
    let out = run(dir.path(), &["eval", "four.csv", "-m", "MAE", "-m", "MAPE"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("MAE   1\n"), "{text}");
    assert!(text.contains("MAPE  47.916666666666664%"), "{text}");
}

#[test]
fn adhoc_composition_on_a_blank_cell() {
    let dir = workspace();
    let out = run(
        dir.path(),
        &[
            "eval",
            "two.json",
            "--compose",
            "distance=D4 normalizer=N1 aggregator=G1",
            "-o",
            "json",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let v = doc["metrics"][0]["value"].as_f64().unwrap();
    assert!((v - std::f64::consts::LN_2).abs() < 1e-12);
}

#[test]
fn ingest_problems_exit_2() {
    let dir = workspace();
    let out = run(dir.path(), &["eval", "bad.csv", "-m", "MAE"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
    let out = run(dir.path(), &["eval", "empty.csv", "-m", "MAE"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(dir.path(), &["eval", "missing.csv", "-m", "MAE"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_problems_exit_2() {
    let dir = workspace();
    for args in [
        &["eval", "four.csv"][..],
        &["eval", "four.csv", "-m", "MSPE2"],
        &["eval", "four.csv", "-m", "MASE"],
        &["eval", "four.csv", "--suite", "nope"],
        &["eval", "four.csv", "--compose", "distance=D9"],
    ] {
        assert_eq!(run(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn zero_actual_policies() {
    let dir = workspace();
    let out = run(
        dir.path(),
        &["eval", "zeros.csv", "-m", "MAPE", "-o", "json"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("ZeroDenominator"));

    let out = run(
        dir.path(),
        &[
            "eval",
            "zeros.csv",
            "-m",
            "MAPE",
            "-o",
            "json",
            "--on-zero-denominator",
            "skip",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["metrics"][0]["skipped"], 1);

    let out = run(
        dir.path(),
        &[
            "eval",
            "zeros.csv",
            "-m",
            "MAPE",
            "-o",
            "json",
            "--epsilon",
            "smallest-nonzero",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let action = &doc["metrics"][0]["actions"][0];
    assert_eq!(action["action"], "epsilon-corrected");
    assert_eq!(action["index"], 0);
    assert_eq!(action["corrected"], 2.0);
}

#[test]
fn benchmark_and_in_sample_sources() {
    let dir = workspace();
    let out = run(
        dir.path(),
        &[
            "eval",
            "four.csv",
            "-m",
            "MASE,RMAE",
            "--in-sample",
            "history.csv",
            "--benchmark",
            "naive",
            "-o",
            "json",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((doc["metrics"][0]["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    // MAE 1 against the naive column's MAE 0.75
    assert!((doc["metrics"][1]["value"].as_f64().unwrap() - 1.0 / 0.75).abs() < 1e-12);
}

#[test]
fn config_file_with_flag_override() {
    let dir = workspace();
    std::fs::write(
        dir.path().join("run.toml"),
        r#"
inputs = ["four.csv"]
metrics = ["ME"]
suites = ["mine"]
output = "delimited"

[[suite]]
name = "mine"
members = ["MdAE", "RAE:option2"]
"#,
    )
    .unwrap();
    let out = run(dir.path(), &["eval", "--config", "run.toml"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let names: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(names, ["ME", "MdAE", "RAE:option2"]);

    let out = run(
        dir.path(),
        &["eval", "--config", "run.toml", "-m", "MAE", "-o", "json"],
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["metrics"].as_array().unwrap().len(), 1);

    std::fs::write(dir.path().join("bad.toml"), "metricz = [\"MAE\"]\n").unwrap();
    assert_eq!(
        run(
            dir.path(),
            &["eval", "four.csv", "--config", "bad.toml", "-m", "MAE"]
        )
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn several_inputs_give_an_array_in_order() {
    let dir = workspace();
    let out = run(
        dir.path(),
        &["eval", "four.csv", "two.json", "-m", "MAE", "-o", "json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc[0]["input"], "four.csv");
    assert_eq!(doc[1]["input"], "two.json");
}

#[test]
fn output_file() {
    let dir = workspace();
    let out = run(
        dir.path(),
        &[
            "eval", "four.csv", "-m", "MAE", "-o", "json", "--out", "r.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    assert!(text.contains("\"version\""));
}

#[test]
fn chart_verb() {
    let dir = workspace();
    let plain = stdout(&run(dir.path(), &["chart"]));
    assert!(plain.contains("GMAE"));
    assert_eq!(plain, stdout(&run(dir.path(), &["chart"])));
    let blanks = stdout(&run(dir.path(), &["chart", "--blanks"]));
    assert!(blanks.contains("(D4, N1, G1)"));
    let csv = stdout(&run(dir.path(), &["chart", "--format", "delimited"]));
    assert!(csv.starts_with("distance,normalizer,aggregator,metric"));
    assert!(csv
        .lines()
        .any(|l| l.starts_with("D3,N5-min,G4,VSD c=1 min")));
    let md = stdout(&run(dir.path(), &["chart", "--format", "markdown"]));
    assert!(md.starts_with("# "));
}

#[test]
fn list_verb() {
    let dir = workspace();
    let out = run(
        dir.path(),
        &["list", "--category", "primary", "--format", "json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc.as_array().unwrap().len() >= 40);
    let cell = stdout(&run(dir.path(), &["list", "--cell", "D2,N2,G2"]));
    assert!(cell.contains("MdAPE"));
    let all = stdout(&run(dir.path(), &["list", "--all"]));
    assert!(all.contains("[out of scope]"));
}

#[test]
fn suites_verb() {
    let dir = workspace();
    let text = stdout(&run(dir.path(), &["suites"]));
    assert!(text.contains("percentage"));
    let json = stdout(&run(dir.path(), &["suites", "--format", "json"]));
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(doc
        .as_array()
        .unwrap()
        .iter()
        .any(|s| s["name"] == "bias-accuracy"));
}
