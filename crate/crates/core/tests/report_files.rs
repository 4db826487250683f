use std::fs;

use gaussrelay::report::{run, RunOptions, Value};
use gaussrelay::scenario::{parse_scenario, Output};

const SCN: &str = "\
name = files
modes = 1
outputs = decompose, eb, bound

[segment]
kind = loss
eta = 0.9

[segment]
kind = psa
gain = 3

[segment]
kind = loss
eta = 0.5

[sweep]
parameter = segment.2.gain
min = 1
max = 4
steps = 7
";

#[test]
fn writes_one_csv_per_table_and_a_summary() {
    let sc = parse_scenario(SCN).unwrap();
    let report = run(&sc, &sc.outputs, &RunOptions::default()).unwrap();
    assert!(report.passed());
    let dir = tempfile::tempdir().unwrap();
    let written = report.write(dir.path()).unwrap();
    let names: Vec<String> = written
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    for t in &report.tables {
        assert!(names.contains(&format!("{}.csv", t.name)), "{names:?}");
        assert_eq!(fs::read_to_string(dir.path().join(format!("{}.csv", t.name))).unwrap(), t.to_csv());
    }
    assert!(names.contains(&"summary.txt".to_string()));
    let eb = fs::read_to_string(dir.path().join("eb.csv")).unwrap();
    // header plus one row per sweep point
    assert_eq!(eb.lines().count(), 8);
}

#[test]
fn the_psa_sandwich_flips_at_its_threshold() {
    let sc = parse_scenario(SCN).unwrap();
    let report = run(&sc, &[Output::Thresholds], &RunOptions::default()).unwrap();
    let t = report.table("thresholds").unwrap();
    let col = |name: &str| t.header.iter().position(|h| *h == name).unwrap();
    let float = |v: &Value| match v {
        Value::Float(x) => *x,
        other => panic!("{other:?}"),
    };
    assert_eq!(t.rows.len(), 7);
    for row in &t.rows {
        let cf = float(&row[col("closed_form")]);
        let bi = float(&row[col("bisection")]);
        assert!((cf - 19.0).abs() < 1e-9 && (bi - cf).abs() < 1e-9, "{cf} {bi}");
    }
}
