//! Acceptance run: executes the shipped `core` configuration and checks
//! every acceptance criterion against the written reports, printing one line
//! per criterion. Exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use latfield_cli::{run_path, CliError};
use serde_json::Value;

struct Reports {
    dir: PathBuf,
}

#[derive(Clone, Debug)]
struct Row {
    object: String,
    quantity: String,
    value: String,
    status: String,
}

impl Reports {
    fn suite(&self, id: &str) -> (String, Vec<Row>) {
        let text = std::fs::read_to_string(self.dir.join(format!("{id}.json"))).unwrap_or_else(|e| panic!("report {id}: {e}"));
        let v: Value = serde_json::from_str(&text).unwrap();
        let rows = v["records"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| Row {
                object: r["object"].as_str().unwrap().into(),
                quantity: r["quantity"].as_str().unwrap().into(),
                value: r["value"].as_str().unwrap().into(),
                status: r["status"].as_str().unwrap().into(),
            })
            .collect();
        (v["status"].as_str().unwrap().into(), rows)
    }

    /// Status of `(object, quantity)` in a suite, if recorded.
    fn lookup(&self, suite: &str, object: &str, quantity: &str) -> Option<Row> {
        self.suite(suite).1.into_iter().find(|r| r.object == object && r.quantity == quantity)
    }

    fn passes(&self, suite: &str, object: &str, quantity: &str) -> bool {
        self.lookup(suite, object, quantity).is_some_and(|r| r.status == "pass")
    }

    fn value_passes(&self, suite: &str, object: &str, quantity: &str, value: &str) -> bool {
        self.lookup(suite, object, quantity).is_some_and(|r| r.status == "pass" && r.value == value)
    }

    fn control_holds(&self, suite: &str, object: &str, quantity: &str) -> bool {
        self.lookup(suite, object, quantity).is_some_and(|r| r.status == "control-holds")
    }

    fn suite_passes(&self, suite: &str) -> bool {
        let (status, rows) = self.suite(suite);
        status == "pass" && rows.iter().all(|r| r.status != "fail")
    }

    fn measured(&self, suite: &str, object: &str, quantity: &str) -> Option<u64> {
        self.lookup(suite, object, quantity).and_then(|r| r.value.strip_suffix("/1").and_then(|n| n.parse().ok()))
    }
}

fn criterion_1(r: &Reports) -> Result<String, String> {
    let objects = ["A_u1", "A_r", "B1", "B2", "C_u1", "C_r", "D_r", "D4_r"];
    let bad: Vec<&str> = objects.iter().copied().filter(|o| !r.passes("gauge_invariance", o, "einv_direct_equals_theorem")).collect();
    if bad.is_empty() {
        Ok(format!("einv_direct = einv_theorem on {}", objects.join(", ")))
    } else {
        Err(format!("mismatch on {bad:?}"))
    }
}

fn criterion_2(r: &Reports) -> Result<String, String> {
    let inclusions = r.passes("sandwich", "A_u1", "emin_in_einv") && r.passes("sandwich", "A_u1", "einv_in_emax");
    if inclusions && r.value_passes("sandwich", "A_u1", "emax_minus_einv", "1/1") {
        Ok("A_u1: E^min in E^inv in E^max, dim E^max - dim E^inv = 1".into())
    } else {
        Err(format!("{:?}", r.lookup("sandwich", "A_u1", "emax_minus_einv")))
    }
}

fn criterion_3(r: &Reports) -> Result<String, String> {
    let mut bad = Vec::new();
    for o in ["A_u1", "B1", "B2"] {
        for s in ["E", "E0"] {
            if !r.passes("radical", o, &format!("{s}.radical_brute_equals_theorem")) {
                bad.push(format!("{o} {s}"));
            }
        }
    }
    let witness = [
        "witness_exists",
        "witness_gauge_invariant",
        "witness_in_brute_radical",
        "witness_in_theorem_radical",
        "witness_has_no_zero_linear_part_representative",
    ];
    bad.extend(witness.iter().filter(|q| !r.passes("radical_witness", "D_r", q)).map(|q| format!("D_r {q}")));
    if !r.passes("radical_witness", "D_compact_r", "radical_classes_have_zero_linear_part_representatives") {
        bad.push("compact slice control".into());
    }
    if bad.is_empty() {
        Ok("brute radical = theorem on A_u1, B1, B2 (E and E0); D_r witness central with nonzero linear part".into())
    } else {
        Err(format!("failing: {bad:?}"))
    }
}

fn criterion_4(r: &Reports) -> Result<String, String> {
    let same = r.value_passes("separation", "A_u1", "basis_elements_separating", "0/1") && r.passes("separation", "A_u1", "connection_is_flat");
    let control = r.control_holds("separation", "A_r", "basis_elements_separating");
    match (same, control) {
        (true, true) => Ok("U(1): A=0 and A=pi*z agree on every E^inv basis element; R control separates them".into()),
        _ => Err(format!("u1 identical: {same}, real control separated: {control}")),
    }
}

fn criterion_5(r: &Reports) -> Result<String, String> {
    let objects = ["A_u1", "B1", "C_u1", "C_r", "C_u1_cone", "L_u1_cone", "D_r", "D4_r"];
    let identities = ["green_commutes_with_d", "green_commutes_with_delta", "propagator_skew_adjoint", "support_in_causal_cone"];
    let mut bad = Vec::new();
    for o in objects {
        if r.measured("green", o, "samples").unwrap_or(0) < 100 {
            bad.push(format!("{o}: fewer than 100 samples"));
        }
        for i in identities {
            if !r.passes("green", o, &format!("{i}.checked")) {
                bad.push(format!("{o}: {i}"));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("4 identities exact on 100 random compact sources for each of {} objects", objects.len()))
    } else {
        Err(format!("{bad:?}"))
    }
}

fn criterion_6(r: &Reports) -> Result<String, String> {
    let causal = r.passes("causality", "a_left&a_right", "nonzero_cross_entries")
        && r.passes("causality_3d", "h_left&h_right", "nonzero_cross_entries")
        && r.measured("causality_3d", "h_left&h_right", "cross_entries").unwrap_or(0) > 0
        && r.control_holds("causality_3d", "h_early&h_late", "nonzero_cross_entries");
    let slices = ["a_slab", "b1_slab"].iter().all(|m| ["E", "E0"].iter().all(|s| r.passes("timeslice", m, &format!("{s}.rank"))));
    match (causal, slices) {
        (true, true) => Ok("cross-Gram zero for spacelike blocks; slab embeddings are isomorphisms of E and E0".into()),
        _ => Err(format!("causality: {causal}, time-slice: {slices}")),
    }
}

fn criterion_7(r: &Reports) -> Result<String, String> {
    let e = r.passes("locality", "l_cone", "E.kernel_dim_positive") && r.passes("locality", "l_cone", "E.curvature_witness_in_kernel");
    let e0 = r.passes("locality", "l_cone", "E0.kernel_dim_zero");
    let k = r.lookup("locality", "l_cone", "E.kernel_dim_positive").map(|x| x.value).unwrap_or_default();
    match (e, e0) {
        (true, true) => Ok(format!("cone complement: STANDARD kernel {k} containing [F*(eta)], CHARGE_ZERO injective")),
        _ => Err(format!("standard: {e}, charge-zero: {e0}")),
    }
}

fn criterion_8(r: &Reports) -> Result<String, String> {
    let values = r.value_passes("charges", "B1", "psi_mag[0][1x2]/pi", "2/1") && r.value_passes("charges", "B2", "psi_mag[0][1x2]/pi", "4/1");
    let charges = r.suite_passes("charges");
    let natural = r.suite_passes("naturality");
    match (values, charges, natural) {
        (true, true, true) => Ok("Psi^mag = 2*pi*n for n = 1, 2; images central; Psi^el zero in E0; squares commute".into()),
        _ => Err(format!("values: {values}, centrality/E0: {charges}, naturality: {natural}")),
    }
}

fn criterion_9(r: &Reports) -> Result<String, String> {
    let quantities = [
        ("B1_slab", "defining_relation_failures"),
        ("B1_slab", "associativity_failures"),
        ("b1_slab", "multiplicative_failures"),
        ("b1_slab", "star_preserving_failures"),
        ("h_left&h_right", "noncommuting_cross_pairs"),
    ];
    let bad: Vec<_> = quantities.iter().filter(|(o, q)| !r.value_passes("ccr", o, q, "0/1")).collect();
    if bad.is_empty() && r.suite_passes("ccr") {
        Ok("CCR relation, associativity, star-homomorphism and disjoint commutation exact".into())
    } else {
        Err(format!("{bad:?}"))
    }
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn main() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/core.json");
    let scratch = std::env::temp_dir().join(format!("latfield-acceptance-{}", std::process::id()));
    let (first, second) = (scratch.join("first"), scratch.join("second"));
    let _ = std::fs::remove_dir_all(&scratch);

    let start = Instant::now();
    let run = |dir: &Path, workers: usize| match run_path(&config, Some(dir), workers) {
        Ok(_) => None,
        Err(CliError::SuiteFailure { suite, witness }) => Some(format!("suite {suite} failed: {witness}")),
        Err(e) => panic!("core did not run: {e}"),
    };
    let failure = run(&first, 1);
    let elapsed = start.elapsed();
    let again = run(&second, 2);
    let reports = Reports { dir: first.clone() };

    let criteria: Vec<(&str, Result<String, String>)> = vec![
        ("gauge invariance", criterion_1(&reports)),
        ("sandwich", criterion_2(&reports)),
        ("radical", criterion_3(&reports)),
        ("separation failure", criterion_4(&reports)),
        ("green identities", criterion_5(&reports)),
        ("causality and time-slice", criterion_6(&reports)),
        ("locality", criterion_7(&reports)),
        ("charges", criterion_8(&reports)),
        ("ccr", criterion_9(&reports)),
        ("determinism", {
            let (a, b) = (read_dir(&first), read_dir(&second));
            if a == b && again == failure {
                Ok(format!("{} report files byte-identical across runs with 1 and 2 workers", a.len()))
            } else {
                let differing: Vec<&String> = a.keys().filter(|k| a.get(*k) != b.get(*k)).collect();
                Err(format!("differing files: {differing:?}"))
            }
        }),
    ];
    let mut ok = failure.is_none();
    if let Some(f) = &failure {
        println!("core run: {f}");
    }
    for (i, (name, result)) in criteria.iter().enumerate() {
        match result {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                ok = false;
                println!("criterion {:>2} FAIL  {name}: {msg}", i + 1)
            }
        }
    }
    println!("core run time: {:.1} s", elapsed.as_secs_f64());
    let _ = std::fs::remove_dir_all(&scratch);
    if !ok {
        std::process::exit(1);
    }
}
