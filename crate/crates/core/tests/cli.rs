use std::process::{Command, Output};

use serde_json::Value;

fn denumerant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_denumerant"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn count(args: &[&str]) -> String {
    let out = denumerant(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out).trim().to_string()
}

#[test]
fn count_examples() {
    assert_eq!(
        count(&[
            "count",
            "--coeffs",
            "2,4,5",
            "--b",
            "214",
            "--method",
            "quasipoly"
        ]),
        "616"
    );
    assert_eq!(
        count(&["count", "--coeffs", "2,3,4,6", "--b", "826"]),
        "673785"
    );
    assert_eq!(count(&["count", "--coeffs", "2,4,5", "--b", "0"]), "1");
}

#[test]
fn every_applicable_method_prints_the_same_value() {
    let fixtures: &[(&str, &str)] = &[
        ("2,4,5", "214"),
        ("2,3,4,6", "826"),
        ("2,2,3,3,3,6,6", "49"),
        ("1,2,3,4,5,6,7", "101"),
        ("1,5,10,10", "9005"),
        ("3,5", "1234"),
        ("1,3,3,3", "17"),
    ];
    for (coeffs, b) in fixtures {
        let auto = count(&["count", "--coeffs", coeffs, "--b", b]);
        for method in [
            "oracle",
            "flat",
            "decimate",
            "quasipoly",
            "closed",
            "twovar",
        ] {
            let out = denumerant(&["count", "--coeffs", coeffs, "--b", b, "--method", method]);
            match out.status.code() {
                Some(0) => assert_eq!(stdout(&out).trim(), auto, "{coeffs} {b} {method}"),
                Some(3) => {}
                other => panic!("{coeffs} {b} {method}: exit {other:?}"),
            }
        }
    }
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| denumerant(args).status.code();
    assert_eq!(code(&["count", "--coeffs", "2,0", "--b", "3"]), Some(2));
    assert_eq!(code(&["count", "--coeffs", "2,4", "--b", "x"]), Some(2));
    assert_eq!(code(&["count", "--coeffs", "2,4,5"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(
        code(&["count", "--coeffs", "2,4,5", "--b", "214", "--method", "closed"]),
        Some(3)
    );
    assert_eq!(
        code(&["count", "--coeffs", "4,6", "--b", "10", "--method", "twovar"]),
        Some(3)
    );
    assert_eq!(
        code(&["poly", "--coeffs", "2,4,5", "--residue", "20"]),
        Some(2)
    );
    assert_eq!(
        code(&["bench", "--coeffs", "2,4,5", "--b", "1,,2"]),
        Some(2)
    );
}

#[test]
fn poly_rows() {
    let text = count(&["poly", "--coeffs", "1,1"]);
    assert!(text.contains("r=0 s=0 l=[1]  P = q + 1"), "{text}");

    let out = count(&["poly", "--coeffs", "2,4,5", "--residue", "14", "--json"]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let row = &doc["rows"][0];
    assert_eq!(row["r"], "14");
    assert_eq!(row["s"], "1");
    assert_eq!(row["l"], serde_json::json!(["6", "4"]));

    let out = count(&[
        "poly",
        "--coeffs",
        "2,2,3,3,3,6,6",
        "--residue",
        "4",
        "--json",
    ]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["rows"][0]["s"], "2");
    assert_eq!(doc["rows"][0]["l"], serde_json::json!(["3", "9", "0"]));
}

fn has_number(v: &Value) -> bool {
    match v {
        Value::Number(_) => true,
        Value::Array(xs) => xs.iter().any(has_number),
        Value::Object(m) => m.values().any(has_number),
        _ => false,
    }
}

#[test]
fn json_round_trips() {
    let outputs = [
        count(&["count", "--coeffs", "2,4,5", "--b", "214", "--json"]),
        count(&["poly", "--coeffs", "2,3,4,6", "--json"]),
        count(&[
            "bench",
            "--coeffs",
            "2,4,5",
            "--b",
            "214,10000000000",
            "--json",
        ]),
        count(&["verify", "--coeffs", "3,5", "--max-b", "60", "--json"]),
    ];
    for text in outputs {
        let doc: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&doc).unwrap(), text);
        assert!(!has_number(&doc), "{text}");
    }
    let doc: Value = serde_json::from_str(&count(&[
        "count", "--coeffs", "2,4,5", "--b", "214", "--json",
    ]))
    .unwrap();
    assert_eq!(doc["value"], "616");
    assert_eq!(doc["b"], "214");
}

#[test]
fn verify_examples() {
    for (coeffs, max_b) in [("2,4,5", "300"), ("7", "50"), ("6,10,15", "300")] {
        let out = denumerant(&[
            "verify", "--coeffs", coeffs, "--max-b", max_b, "--seed", "3",
        ]);
        let text = stdout(&out);
        assert_eq!(out.status.code(), Some(0), "{text}");
        assert!(!text.contains("FAIL"), "{text}");
    }
    let text = count(&["verify", "--coeffs", "6,10,15", "--max-b", "300"]);
    assert!(text.contains("gcd = 1"), "{text}");
}

#[test]
fn verify_is_deterministic_per_seed() {
    let run = |seed: &str| {
        count(&[
            "verify", "--coeffs", "2,3,7", "--max-b", "80", "--seed", seed,
        ])
    };
    let strip = |s: String| -> Vec<String> {
        s.lines()
            .filter(|l| l.contains("transform"))
            .map(|l| l.split(" values").next().unwrap().to_string())
            .collect()
    };
    assert_eq!(strip(run("11")), strip(run("11")));
}

#[test]
fn bench_marks_skipped_methods() {
    let out = count(&[
        "bench",
        "--coeffs",
        "2,4,5",
        "--b",
        "214,10000000000",
        "--json",
    ]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let second = &doc["reports"][1];
    assert!(second["skipped"]["oracle"].is_string());
    assert_eq!(second["results"]["quasipoly"], "1250000002000000001");
    assert_eq!(doc["reports"][0]["results"]["quasipoly"], "616");

    let out = count(&["bench", "--coeffs", "1,5,10,10", "--b", "9005", "--json"]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["reports"][0]["results"]["closed"], "244623302");

    let out = count(&["bench", "--coeffs", "1,2,3,4,5,6,7", "--b", "101", "--json"]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let results = doc["reports"][0]["results"].as_object().unwrap();
    assert!(results.len() >= 4);
    assert!(results.values().all(|v| v == "628998"));
    assert_eq!(doc["reports"][0]["agreement"], true);
}

#[test]
fn cache_is_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    let path_str = path.to_str().unwrap();
    let args = |b: &'static str| {
        vec![
            "count", "--coeffs", "2,4,5", "--b", b, "--method", "flat", "--cache", path_str,
        ]
    };
    assert_eq!(count(&args("214")), "616");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["version"], 1);
    assert_eq!(doc["flat"].as_array().unwrap().len(), 215);
    assert_eq!(doc["flat"][214], "616");

    // a shorter query is served from the file, which stays as it was
    assert_eq!(count(&args("14")), "6");
    let again: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(again, doc);

    // a tampered entry is caught by the recurrence check
    let mut bad = doc.clone();
    bad["flat"][100] = Value::String("1".into());
    std::fs::write(&path, serde_json::to_string(&bad).unwrap()).unwrap();
    assert_eq!(denumerant(&args("300")).status.code(), Some(2));

    let other = denumerant(&[
        "count", "--coeffs", "2,4,6", "--b", "10", "--method", "flat", "--cache", path_str,
    ]);
    assert_eq!(other.status.code(), Some(2));
}
