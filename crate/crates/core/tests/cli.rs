use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coldopt::analysis::SWEEP_CSV_HEADER;
use coldopt::cli::{load_scenario, parse_model_fragment, SOLUTION_CSV_HEADER, VALIDATE_CSV_HEADER};
use coldopt::quality::read_dataset_csv;
use coldopt::QualityModel;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn baseline_text() -> String {
    std::fs::read_to_string(scenario("baseline.toml")).unwrap()
}

fn coldopt(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coldopt"))
        .args(args)
        .current_dir(dir)
        .env_remove("COLDOPT_THREADS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("process exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_scenario(dir: &Path, text: &str) -> String {
    let p = dir.join("s.toml");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_writes_default_solution_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = coldopt(&["solve", scenario("baseline.toml").to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), SOLUTION_CSV_HEADER);
    assert_eq!(rdr.records().count(), 9);
    let out = stdout(&o);
    assert!(out.contains("kkt residual"));
    assert!(out.contains("ordering") && out.contains("environment"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&coldopt(&[], d)), 2);
    assert_eq!(code(&coldopt(&["optimize"], d)), 2);
    assert_eq!(code(&coldopt(&["solve"], d)), 2);
    assert_eq!(code(&coldopt(&["solve", "missing.toml"], d)), 2);
    assert_eq!(code(&coldopt(&["gen-data", scenario("baseline.toml").to_str().unwrap(), "--n", "x", "--out", "a.csv"], d)), 2);
    assert_eq!(code(&coldopt(&["--help"], d)), 0);
}

#[test]
fn bad_scenarios_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let base = baseline_text();
    for (bad, needle) in [
        (base.replace("temp_lower = -5", "temp_lower = 6"), "temperature"),
        (base.replace("[limits]", "[limits]\ncolour = 1"), "colour"),
        (base.replace("schema = 1", "schema = 7"), "schema"),
        (base.replace("seed = 42", ""), "seed"),
        (base.replace("capacity = 1500", "capacity = [1500"), "line"),
    ] {
        let path = write_scenario(d, &bad);
        let o = coldopt(&["solve", &path, "--out", "x.csv"], d);
        assert_eq!(code(&o), 2, "{needle}: {}", stderr(&o));
        assert!(stderr(&o).contains(needle), "{needle}: {}", stderr(&o));
        assert!(!d.join("x.csv").exists());
    }
}

#[test]
fn infeasible_scenarios_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = coldopt(&["solve", scenario("paper_table4.toml").to_str().unwrap(), "--out", "x.csv"], d);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("quality_unreachable"));

    // 2 · (10000/20 + 100) = 1200 > 1000
    let path = write_scenario(d, &baseline_text().replace("capacity = 1500", "capacity = 1000"));
    let o = coldopt(&["solve", &path, "--out", "x.csv"], d);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("frequency_vs_space"), "{}", stderr(&o));
    assert!(stderr(&o).contains("witness frequency_vs_space: 1200"), "{}", stderr(&o));
}

#[test]
fn failed_validation_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // one sample has zero standard error, so any Monte Carlo miss is a failure
    let o = coldopt(&["validate", scenario("baseline.toml").to_str().unwrap(), "--out", "v.csv", "--samples", "1"], d);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(stdout(&o).contains("FAIL"));
    assert!(d.join("v.csv").exists());
}

#[test]
fn singular_fit_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut csv = String::from("T,HU,packaging,environment,quality\n");
    for i in 0..20 {
        csv.push_str(&format!("1.5,{},{},{},{}\n", 60 + i, i % 3 + 1, (i / 3) % 3 + 1, 50 + i));
    }
    std::fs::write(d.join("flat.csv"), csv).unwrap();
    let o = coldopt(&["fit", "flat.csv", "--out", "m.toml"], d);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("`T`"), "{}", stderr(&o));

    std::fs::write(d.join("bad.csv"), "a,b\n1,2\n").unwrap();
    assert_eq!(code(&coldopt(&["fit", "bad.csv", "--out", "m.toml"], d)), 2);
}

#[test]
fn invalid_thread_cap_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_coldopt"))
        .args(["solve", scenario("baseline.toml").to_str().unwrap(), "--out", "x.csv"])
        .current_dir(dir.path())
        .env("COLDOPT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("COLDOPT_THREADS"));
}

#[test]
fn thread_cap_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = format!("sweep{threads}.csv");
        let o = Command::new(env!("CARGO_BIN_EXE_coldopt"))
            .args([
                "sweep",
                scenario("baseline.toml").to_str().unwrap(),
                "--param",
                "B",
                "--from",
                "0.5",
                "--to",
                "6",
                "--steps",
                "6",
                "--out",
                &out,
            ])
            .current_dir(dir.path())
            .env("COLDOPT_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        outputs.push(std::fs::read(dir.path().join(&out)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn gen_data_then_fit_recovers_generator() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let text = format!(
        "{}\n[generator]\nnoise_std = 0.0\n\n[generator.true_model]\nx1 = -1.25\nx2 = 0.4\nx3 = 2.5\nx4 = -0.75\nintercept = 61.0\n",
        baseline_text()
    );
    let path = write_scenario(d, &text);
    let o = coldopt(&["gen-data", &path, "--n", "400", "--out", "data.csv"], d);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = coldopt(&["fit", "data.csv", "--out", "model.toml"], d);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let fitted = parse_model_fragment(&std::fs::read_to_string(d.join("model.toml")).unwrap()).unwrap();
    let truth = QualityModel { x1: -1.25, x2: 0.4, x3: 2.5, x4: -0.75, intercept: 61.0 };
    for (a, b) in [
        (fitted.x1, truth.x1),
        (fitted.x2, truth.x2),
        (fitted.x3, truth.x3),
        (fitted.x4, truth.x4),
        (fitted.intercept, truth.intercept),
    ] {
        assert!((a - b).abs() <= 1e-8, "{fitted:?}");
    }
}

#[test]
fn fitted_fragment_drops_into_a_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = coldopt(&["gen-data", scenario("baseline.toml").to_str().unwrap(), "--n", "2000", "--out", "data.csv"], d);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&coldopt(&["fit", "data.csv", "--out", "model.toml"], d)), 0);
    let fragment = std::fs::read_to_string(d.join("model.toml")).unwrap();
    let base = baseline_text();
    let start = base.find("[quality_model]").unwrap();
    let end = base.find("[rng]").unwrap();
    let merged = format!("{}{}\n{}", &base[..start], fragment, &base[end..]);
    let path = write_scenario(d, &merged);
    let file = load_scenario(Path::new(&path)).unwrap();
    assert!((file.model.x1 - -2.0).abs() < 0.2);
}

#[test]
fn dataset_csv_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = coldopt(&["gen-data", scenario("baseline.toml").to_str().unwrap(), "--n", "300", "--out", "data.csv"], d);
    assert_eq!(code(&o), 0);
    let bytes = std::fs::read(d.join("data.csv")).unwrap();
    let data = read_dataset_csv(&bytes[..]).unwrap();
    assert_eq!(data.len(), 300);
    let mut again = Vec::new();
    coldopt::quality::write_dataset_csv(&data, &mut again).unwrap();
    assert_eq!(again, bytes);
    assert!(bytes.ends_with(b"\n"));
}

#[test]
fn sweep_csv_and_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = coldopt(
        &[
            "sweep",
            scenario("baseline.toml").to_str().unwrap(),
            "--param",
            "h",
            "--from",
            "12",
            "--to",
            "24",
            "--steps",
            "13",
            "--out",
            "h.csv",
        ],
        d,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("non_decreasing=true"), "{}", stdout(&o));
    let text = std::fs::read_to_string(d.join("h.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), SWEEP_CSV_HEADER);
    let values: Vec<f64> = rdr.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(values.len(), 13);
    assert_eq!((values[0], values[12]), (12.0, 24.0));

    let o = coldopt(
        &["sweep", scenario("baseline.toml").to_str().unwrap(), "--param", "mu", "--from", "1", "--to", "2", "--steps", "3"],
        d,
    );
    assert_eq!(code(&o), 2);
    let o = coldopt(
        &["sweep", scenario("baseline.toml").to_str().unwrap(), "--param", "h", "--from", "1", "--to", "1", "--steps", "3"],
        d,
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn negative_sweep_bounds_parse() {
    let dir = tempfile::tempdir().unwrap();
    let o = coldopt(
        &[
            "sweep",
            scenario("baseline.toml").to_str().unwrap(),
            "--param",
            "Tl",
            "--from",
            "-5",
            "--to",
            "-1",
            "--steps",
            "3",
            "--out",
            "t.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn validate_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = coldopt(&["validate", scenario("baseline.toml").to_str().unwrap(), "--out", "v.csv", "--samples", "20000"], d);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = std::fs::read_to_string(d.join("v.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), VALIDATE_CSV_HEADER);
    assert!(rdr.records().all(|r| &r.unwrap()[4] == "true"));

    let o = coldopt(&["validate", scenario("paper_table4.toml").to_str().unwrap(), "--out", "w.csv", "--samples", "20000"], d);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
}
