//! Configuration handling, exit codes, reports and the inspection subcommands.

use std::path::{Path, PathBuf};
use std::process::Command;

use latfield::complex::{CubicalComplex, Factor};
use latfield::homology::is_cycle;
use latfield_cli::suites::spatial_cycles;
use latfield_cli::{run, run_path, CliError, ExperimentConfig};
use serde_json::{json, Value};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("latfield-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_latfield"))
}

fn circle(id: &str, torus: usize, real: usize) -> Value {
    json!({"id": id, "factors": ["TIME(6)", "CYCLE(5)"], "torus": torus, "real": real})
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn empty_suite_list_gives_empty_passing_report() {
    let dir = scratch("empty");
    let config = ExperimentConfig::parse(r#"{"name": "empty", "seed": 7, "output_dir": "unused"}"#).unwrap();
    let report = run(&config, &dir, 1).unwrap();
    assert!(report.suites.is_empty());
    let written = read_json(&dir.join("report.json"));
    assert_eq!(written["suites"], json!([]));
    assert_eq!(written["seed"], json!(7));
    assert_eq!(written["status"], json!("pass"));
    assert_eq!(std::fs::read_to_string(dir.join("results.csv")).unwrap().trim(), "suite,object,quantity,value,status");
}

#[test]
fn malformed_and_inconsistent_configs_are_rejected() {
    let cases = [
        "{ not json".to_string(),
        json!({"name": "x", "output_dir": "o", "suites": [{"id": "s", "check": "no_such_check"}]}).to_string(),
        json!({"name": "x", "output_dir": "o", "suites": [{"id": "s", "check": "sandwich", "objects": ["missing"]}]}).to_string(),
        json!({"name": "x", "output_dir": "o", "objects": [circle("a", 1, 0), circle("a", 1, 0)]}).to_string(),
        json!({"name": "x", "output_dir": "o", "objects": [circle("a", 1, 0)],
               "suites": [{"id": "report", "check": "sandwich", "objects": ["a"]}]})
        .to_string(),
    ];
    for text in cases {
        assert!(matches!(ExperimentConfig::parse(&text), Err(CliError::Config(_))), "{text}");
    }
}

#[test]
fn mismatched_groups_across_a_morphism_are_a_config_error() {
    let dir = scratch("groups");
    let config = json!({
        "name": "groups", "output_dir": dir.join("out"),
        "objects": [circle("u1", 1, 0), json!({"id": "r", "factors": ["TIME(8)", "CYCLE(5)"], "torus": 0, "real": 1})],
        "morphisms": [{"id": "f", "source": "u1", "target": "r", "kind": "translate", "offsets": [1, 0]}],
    });
    let path = write(&dir, "config.json", &config);
    assert!(matches!(run_path(&path, None, 1), Err(CliError::Config(_))));
    let status = binary().arg("run").arg(&path).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn failing_identity_names_the_witness_and_sets_exit_code() {
    let dir = scratch("failing");
    // The brute radical of an object with open spatial directions exceeds the prediction.
    let config = json!({
        "name": "failing", "seed": 3, "output_dir": dir.join("out"),
        "objects": [{"id": "p", "factors": ["TIME(6)", "PATH(5)", "PATH(5)"], "torus": 0, "real": 1}],
        "suites": [{"id": "rad", "check": "radical", "objects": ["p"], "variants": ["STANDARD"]}],
    });
    let path = write(&dir, "config.json", &config);
    match run_path(&path, None, 1) {
        Err(CliError::SuiteFailure { suite, witness }) => {
            assert_eq!(suite, "rad");
            assert!(witness.contains("p: E.radical_brute_equals_theorem"), "{witness}");
        }
        other => panic!("expected a suite failure, got {other:?}"),
    }
    let report = read_json(&dir.join("out/rad.json"));
    assert_eq!(report["status"], json!("fail"));
    assert!(report["seed"].is_u64());
    let status = binary().arg("run").arg(&path).status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn failing_control_does_not_gate_the_exit_code() {
    let dir = scratch("control");
    // A U(1) control is not separated, so the control fails; the run still passes.
    let config = json!({
        "name": "control", "output_dir": dir.join("out"),
        "objects": [circle("a", 1, 0), circle("b", 1, 0)],
        "suites": [{"id": "sep", "check": "separation", "object": "a", "control": "b"}],
    });
    let path = write(&dir, "config.json", &config);
    run_path(&path, None, 2).unwrap();
    let csv = std::fs::read_to_string(dir.join("out/results.csv")).unwrap();
    assert!(csv.contains("sep,b,basis_elements_separating,0/1,control-fails"), "{csv}");
    assert!(csv.contains("sep,a,basis_elements_separating,0/1,pass"), "{csv}");
}

#[test]
fn worker_count_comes_from_the_environment() {
    let dir = scratch("workers");
    let path = write(&dir, "config.json", &json!({"name": "w", "output_dir": dir.join("out")}));
    let bad = binary().arg("run").arg(&path).env("LATFIELD_WORKERS", "zero").status().unwrap();
    assert_eq!(bad.code(), Some(2));
    let good = binary().arg("run").arg(&path).env("LATFIELD_WORKERS", "3").status().unwrap();
    assert_eq!(good.code(), Some(0));
}

#[test]
fn describe_reports_counts_and_cohomology() {
    let dir = scratch("describe");
    let path = write(&dir, "object.json", &circle("c", 1, 0));
    let out = binary().arg("describe").arg(&path).arg("--phase-space").output().unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // TIME(6) x CYCLE(5): 30 vertices, 25 + 30 edges, 25 squares.
    assert_eq!(v["cells"], json!([30, 55, 25]));
    assert_eq!(v["betti"]["full"], json!([1, 1, 0]));
    assert_eq!(v["large_gauge"]["free_rank"], json!(1));
    assert_eq!(v["phase_space"]["E"], json!("2/1"));
}

#[test]
fn dump_green_stays_in_the_causal_future_and_past() {
    let dir = scratch("dump");
    let path = write(&dir, "object.json", &json!({"id": "g", "factors": ["TIME(7)", "CYCLE(6)"], "torus": 0, "real": 1}));
    let out = binary().args(["dump-green"]).arg(&path).arg("v3,v2").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let times = |key: &str| -> Vec<usize> {
        v[key].as_array().unwrap().iter().map(|e| e[0].as_str().unwrap().split(',').next().unwrap()[1..].parse().unwrap()).collect()
    };
    assert!(!times("retarded").is_empty() && times("retarded").iter().all(|&t| t > 3));
    assert!(!times("advanced").is_empty() && times("advanced").iter().all(|&t| t < 3));
    // Margin cells are rejected; so are malformed cells.
    assert!(!binary().arg("dump-green").arg(&path).arg("v0,v2").status().unwrap().success());
    assert_eq!(binary().arg("dump-green").arg(&path).arg("x3").status().unwrap().code(), Some(2));
}

#[test]
fn spatial_cycles_are_cycles() {
    let x = CubicalComplex::product(&[Factor::Time(5), Factor::Cycle(4), Factor::Path(3), Factor::Cycle(3)]).unwrap();
    for (k, expected) in [(0, 1), (1, 2), (2, 1), (3, 0)] {
        let cycles = spatial_cycles(&x, k, 2);
        assert_eq!(cycles.len(), expected);
        assert!(cycles.iter().all(|(_, s)| !s.is_zero() && is_cycle(&x, k, s)));
    }
}

#[test]
fn shipped_configs_parse() {
    for name in ["core", "path-radical"] {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("configs/{name}.json"));
        assert_eq!(ExperimentConfig::load(&path).unwrap().name, name);
    }
}
