//! Report records, the per-suite recorder, and JSON/CSV output.

use std::path::Path;

use exactla::Q;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Status of one reported quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Asserted identity that holds.
    Pass,
    /// Asserted identity that fails.
    Fail,
    /// Reported value without an assertion.
    Measured,
    /// Negative control behaving as expected.
    ControlHolds,
    /// Negative control not behaving as expected; never gates the exit code.
    ControlFails,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Measured => "measured",
            Status::ControlHolds => "control-holds",
            Status::ControlFails => "control-fails",
        }
    }
}

/// Exact rational as `p/q`.
pub fn ratio(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn count(n: usize) -> String {
    format!("{n}/1")
}

pub fn flag(b: bool) -> String {
    count(b as usize)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub object: String,
    pub quantity: String,
    pub value: String,
    pub status: Status,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub check: String,
    pub seed: u64,
    pub status: Outcome,
    /// The first failing assertion, named by object and quantity.
    pub first_failure: Option<String>,
    pub records: Vec<Record>,
    /// Witness data: kernel vectors, nonzero Gram entries, failing samples.
    pub witness: Map<String, Value>,
}

/// Collects the records of one suite.
#[derive(Debug)]
pub struct Recorder {
    suite: String,
    check: String,
    seed: u64,
    records: Vec<Record>,
    first_failure: Option<String>,
    witness: Map<String, Value>,
}

impl Recorder {
    pub fn new(suite: &str, check: &str, seed: u64) -> Recorder {
        Recorder { suite: suite.into(), check: check.into(), seed, records: Vec::new(), first_failure: None, witness: Map::new() }
    }

    fn push(&mut self, object: &str, quantity: &str, value: String, status: Status) {
        self.records.push(Record { object: object.into(), quantity: quantity.into(), value, status });
    }

    /// Record an asserted identity.
    pub fn assert(&mut self, object: &str, quantity: &str, ok: bool, value: String) -> bool {
        if !ok && self.first_failure.is_none() {
            self.first_failure = Some(format!("{object}: {quantity} = {value}"));
        }
        self.push(object, quantity, value, if ok { Status::Pass } else { Status::Fail });
        ok
    }

    pub fn measure(&mut self, object: &str, quantity: &str, value: String) {
        self.push(object, quantity, value, Status::Measured);
    }

    /// Record a negative control; `holds` is whether it behaved as expected.
    pub fn control(&mut self, object: &str, quantity: &str, holds: bool, value: String) {
        self.push(object, quantity, value, if holds { Status::ControlHolds } else { Status::ControlFails });
    }

    /// Record an error that stopped the suite.
    pub fn error(&mut self, object: &str, message: String) {
        self.assert(object, "error", false, message);
    }

    pub fn witness(&mut self, key: &str, value: Value) {
        self.witness.insert(key.into(), value);
    }

    pub fn finish(self) -> SuiteReport {
        let status = if self.first_failure.is_none() { Outcome::Pass } else { Outcome::Fail };
        SuiteReport {
            suite: self.suite,
            check: self.check,
            seed: self.seed,
            status,
            first_failure: self.first_failure,
            records: self.records,
            witness: self.witness,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub check: String,
    pub status: Outcome,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub config: String,
    pub seed: u64,
    pub status: Outcome,
    /// The first failing suite and its witness.
    pub first_failure: Option<String>,
    pub suites: Vec<SuiteSummary>,
}

impl RunReport {
    pub fn new(config: &str, seed: u64, suites: &[SuiteReport]) -> RunReport {
        let summaries: Vec<SuiteSummary> = suites
            .iter()
            .map(|s| SuiteSummary { suite: s.suite.clone(), check: s.check.clone(), status: s.status, first_failure: s.first_failure.clone() })
            .collect();
        let first_failure = suites.iter().find_map(|s| s.first_failure.as_ref().map(|w| format!("{}: {w}", s.suite)));
        let status = if first_failure.is_none() { Outcome::Pass } else { Outcome::Fail };
        RunReport { config: config.into(), seed, status, first_failure, suites: summaries }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub const REPORT_FILE: &str = "report.json";
pub const CSV_FILE: &str = "results.csv";

/// Write one JSON file per suite, the run summary and the CSV table.
pub fn write_reports(dir: &Path, run: &RunReport, suites: &[SuiteReport]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    for s in suites {
        write_json(&dir.join(format!("{}.json", s.suite)), s)?;
    }
    write_json(&dir.join(REPORT_FILE), run)?;
    let mut w = csv::Writer::from_path(dir.join(CSV_FILE))?;
    w.write_record(["suite", "object", "quantity", "value", "status"])?;
    for s in suites {
        for r in &s.records {
            w.write_record([s.suite.as_str(), &r.object, &r.quantity, &r.value, r.status.as_str()])?;
        }
    }
    w.flush()?;
    Ok(())
}
