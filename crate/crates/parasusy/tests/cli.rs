use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn write_config(dir: &TempDir, body: &str) -> std::path::PathBuf {
    let path = dir.path().join("run.toml");
    std::fs::write(&path, body).unwrap();
    path
}

fn parasusy(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parasusy"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const RSK_STANDARD: &str = r#"
variant = "RSK"
p = 2
alpha = [0, 0, 0]
f = ["1", "1"]
D = 40
"#;

const BD_SAMPLE: &str = r#"
variant = "BD"
p = 2
alpha = [1, "-1/2", "-1/2"]
g = "1"
D = 30
"#;

const OSSQM_SAMPLE: &str = r#"
variant = "OSSQM"
p = 2
alpha = [1, "-1/2", "-1/2"]
f_p = "1"
D = 30
mode = "exact"
"#;

#[test]
fn rsk_spectrum_sector_zero() {
    let dir = TempDir::new().unwrap();
    let out = parasusy(&["spectrum"], &write_config(&dir, RSK_STANDARD));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rows.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "variant",
            "mu",
            "n",
            "k",
            "nu",
            "grade",
            "energy_num",
            "energy_den",
            "group_id"
        ]
    );
    let sector0: Vec<(String, String)> = rows
        .records()
        .map(|r| r.unwrap())
        .filter(|r| &r[1] == "0")
        .map(|r| (r[6].to_string(), r[7].to_string()))
        .take(4)
        .collect();
    let expected = [("-1", "2"), ("5", "2"), ("5", "2"), ("5", "2")];
    let expected: Vec<(String, String)> = expected
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    assert_eq!(sector0, expected);
}

#[test]
fn bd_classification() {
    let dir = TempDir::new().unwrap();
    let out = parasusy(&["classify"], &write_config(&dir, BD_SAMPLE));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let c = json["classification"].as_array().unwrap();
    let verdicts: Vec<&str> = c.iter().map(|v| v["verdict"].as_str().unwrap()).collect();
    assert_eq!(verdicts, ["Unbroken", "Unbroken", "Broken"]);
    assert_eq!(c[0]["ground_energy"], "0/1");
    assert_eq!(c[1]["ground_energy"], "0/1");
    // g²(2) F(2) F(1) = (2 + 1/2)(1 + 1).
    assert_eq!(c[2]["ground_energy"], "5/1");
    assert_eq!(json["pass"], true);
}

#[test]
fn positivity_violation_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let body = RSK_STANDARD.replace("[0, 0, 0]", "[-1, -1, 2]");
    let out = parasusy(&["validate"], &write_config(&dir, &body));
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("PositivityViolated(0)"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn float_parameter_rejected_with_key_path() {
    let dir = TempDir::new().unwrap();
    let out = parasusy(
        &["validate"],
        &write_config(&dir, &BD_SAMPLE.replace("\"-1/2\", \"-1/2\"", "-0.5, -0.5")),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("alpha[1]"), "{}", stderr(&out));
}

#[test]
fn incompatible_unit_coefficients_rejected() {
    let dir = TempDir::new().unwrap();
    let body = BD_SAMPLE.replace("g = \"1\"", "bd_unit = true");
    let out = parasusy(&["validate"], &write_config(&dir, &body));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("incompatible"), "{}", stderr(&out));
}

#[test]
fn validate_accepts_good_config() {
    let dir = TempDir::new().unwrap();
    let out = parasusy(&["validate"], &write_config(&dir, OSSQM_SAMPLE));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("valid: OSSQM p=2"));
}

#[test]
fn verify_report_schema() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, OSSQM_SAMPLE);
    let out_dir = dir.path().join("artifacts");
    let out = parasusy(&["verify", "--out", out_dir.to_str().unwrap()], &config);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("report.json")).unwrap()).unwrap();
    for key in [
        "config",
        "relations",
        "reduction",
        "spectra",
        "classification",
        "checks",
        "pass",
    ] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(
        json["config"]["alpha"],
        serde_json::json!(["1/1", "-1/2", "-1/2"])
    );
    let rel = &json["relations"][0];
    for key in ["name", "w", "window", "residual", "pass"] {
        assert!(rel.get(key).is_some(), "relation missing {key}");
    }
    assert!(json["relations"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["pass"] == true));
    assert_eq!(json["classification"][2]["ground_energy"], "5/1");
}

#[test]
fn zero_tolerance_fails_checks() {
    let dir = TempDir::new().unwrap();
    let body = RSK_STANDARD
        .replace("[0, 0, 0]", "[1, \"-1/2\", \"-1/2\"]")
        .replace("\"1\", \"1\"", "\"n + 1\", \"n^2\"");
    let out = parasusy(&["verify", "--tol", "0"], &write_config(&dir, &body));
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["pass"], false);
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, BD_SAMPLE);
    let files = [
        ("verify", "report.json"),
        ("spectrum", "spectrum.csv"),
        ("spectrum", "degeneracy.csv"),
        ("classify", "classification.json"),
        ("dump-ops", "ops.csv"),
    ];
    let mut first = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        for (cmd, _) in files {
            let out = parasusy(&[cmd, "--out", out_dir.to_str().unwrap()], &config);
            assert_eq!(out.status.code(), Some(0), "{cmd}: {}", stderr(&out));
        }
        let contents: Vec<Vec<u8>> = files
            .iter()
            .map(|(_, f)| std::fs::read(out_dir.join(f)).unwrap())
            .collect();
        if first.is_empty() {
            first = contents;
        } else {
            assert_eq!(first, contents);
        }
    }
}

#[test]
fn dump_ops_layout() {
    let dir = TempDir::new().unwrap();
    let body = BD_SAMPLE.replace("D = 30", "D = 8");
    let out = parasusy(&["dump-ops"], &write_config(&dir, &body));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        reader.headers().unwrap(),
        vec!["op", "row", "col", "re", "im"]
    );
    let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let count = |op: &str| records.iter().filter(|r| &r[0] == op).count();
    assert_eq!(count("a"), 64);
    assert_eq!(count("Q"), 24 * 24);
    assert_eq!(count("T"), 64);
    // a[0, 1] = √F(1) = √2 for α_0 = 1.
    let a01 = records
        .iter()
        .find(|r| &r[0] == "a" && &r[1] == "0" && &r[2] == "1")
        .unwrap();
    assert_eq!(a01[3].parse::<f64>().unwrap(), 2f64.sqrt());
}

#[test]
fn missing_config_file_is_exit_two() {
    let out = parasusy(&["verify"], Path::new("/nonexistent/run.toml"));
    assert_eq!(out.status.code(), Some(2));
}
