//! Scripted stub backend for deterministic orchestration runs without any
//! simulator binaries.
//!
//! A scenario file maps `topology/benchmark` keys to scripted outcomes:
//!
//! ```ini
//! [default]
//! functional = pass
//! duration = 900
//! interim:Core 0.IPC = 1.2
//!
//! [5C_5DL1_2IL1_2DL2_BP/vips]
//! functional = pass
//! functional_time = 6
//! duration = 900
//! interim:Core 0.IPC = 0.8
//! final:Global.IPC = 0.81
//! ```
//!
//! `interim:` values are what a probe sees, `final:`/`power:` entries
//! override the generated reports, `report_file` substitutes a whole
//! architectural report, and `duration`/`functional_time` feed the
//! simulated-time ledger.

use super::{Backend, BackendError, DetailedHandle, Precheck, SimJob};
use crate::report::{parse_stats_report, MetricReport, Scalar, Selector};
use std::path::Path;
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Scripted outcome for one job.
#[derive(Debug, Clone, PartialEq)]
pub struct JobScript {
    pub functional_pass: bool,
    pub functional_log: String,
    /// Simulated time units a functional run consumes.
    pub functional_time: f64,
    /// Simulated time units a full detailed run consumes.
    pub duration: f64,
    /// Metric values visible at probe time.
    pub interim: Vec<(String, f64)>,
    /// (section, key, value) overrides applied to the final report.
    pub final_overrides: Vec<(String, Scalar)>,
    pub power_overrides: Vec<(String, Scalar)>,
    pub report_text: Option<String>,
}

impl Default for JobScript {
    fn default() -> Self {
        JobScript {
            functional_pass: true,
            functional_log: "functional simulation ok".to_string(),
            functional_time: 1.0,
            duration: 10.0,
            interim: Vec::new(),
            final_overrides: Vec::new(),
            power_overrides: Vec::new(),
            report_text: None,
        }
    }
}

/// Scenario fixture: per-job scripts with a `[default]` fallback.
#[derive(Debug, Clone, Default)]
pub struct Scenario {
    jobs: Vec<(String, JobScript)>,
    fallback: JobScript,
}

impl Scenario {
    /// Parses scenario text; `base_dir` anchors relative `report_file`
    /// paths.
    pub fn from_text(text: &str, base_dir: Option<&Path>) -> Result<Scenario, ScenarioError> {
        let parsed = crate::ini::parse(text);
        let mut scenario = Scenario::default();
        for section in &parsed.sections {
            if section.name.is_empty() {
                continue;
            }
            let mut script = JobScript::default();
            for (key, value) in &section.entries {
                match key.as_str() {
                    "functional" => {
                        script.functional_pass = match value.as_str() {
                            "pass" => true,
                            "fail" => false,
                            other => {
                                return Err(ScenarioError::Invalid(format!(
                                    "[{}] functional must be pass or fail, got '{other}'",
                                    section.name
                                )))
                            }
                        }
                    }
                    "functional_log" => script.functional_log = value.clone(),
                    "functional_time" => script.functional_time = parse_time(&section.name, key, value)?,
                    "duration" => script.duration = parse_time(&section.name, key, value)?,
                    "report_file" => {
                        let path = match base_dir {
                            Some(dir) => dir.join(value),
                            None => value.into(),
                        };
                        script.report_text = Some(std::fs::read_to_string(path)?);
                    }
                    _ => {
                        if let Some(metric) = key.strip_prefix("interim:") {
                            let number: f64 = value.parse().map_err(|_| {
                                ScenarioError::Invalid(format!(
                                    "[{}] interim value '{value}' is not numeric",
                                    section.name
                                ))
                            })?;
                            script.interim.push((metric.trim().to_string(), number));
                        } else if let Some(path) = key.strip_prefix("final:") {
                            script
                                .final_overrides
                                .push((path.trim().to_string(), Scalar::parse(value)));
                        } else if let Some(path) = key.strip_prefix("power:") {
                            script
                                .power_overrides
                                .push((path.trim().to_string(), Scalar::parse(value)));
                        } else {
                            return Err(ScenarioError::Invalid(format!(
                                "[{}] unknown key '{key}'",
                                section.name
                            )));
                        }
                    }
                }
            }
            if section.name == "default" {
                scenario.fallback = script;
            } else {
                scenario.jobs.push((section.name.clone(), script));
            }
        }
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let text = std::fs::read_to_string(path)?;
        Scenario::from_text(&text, path.parent())
    }

    pub fn script_for(&self, key: &str) -> &JobScript {
        self.jobs.iter().find(|(k, _)| k == key).map(|(_, s)| s).unwrap_or(&self.fallback)
    }
}

fn parse_time(section: &str, key: &str, value: &str) -> Result<f64, ScenarioError> {
    let parsed: f64 = value
        .parse()
        .map_err(|_| ScenarioError::Invalid(format!("[{section}] {key} '{value}' is not numeric")))?;
    if parsed < 0.0 {
        return Err(ScenarioError::Invalid(format!("[{section}] {key} must be non-negative")));
    }
    Ok(parsed)
}

/// Accounting of everything the stub was asked to do, in scripted time
/// units. `time_skipped` is the detailed time early termination avoided.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StubLedger {
    pub functional_runs: usize,
    pub detailed_started: usize,
    pub completed: usize,
    pub aborted: usize,
    pub power_runs: usize,
    pub time_consumed: f64,
    pub time_skipped: f64,
    pub events: Vec<String>,
}

/// Backend that replays a [`Scenario`] instead of invoking simulators.
pub struct StubBackend {
    scenario: Scenario,
    ledger: Arc<Mutex<StubLedger>>,
}

impl StubBackend {
    pub fn new(scenario: Scenario) -> Self {
        StubBackend { scenario, ledger: Arc::new(Mutex::new(StubLedger::default())) }
    }

    /// Snapshot of the ledger so far.
    pub fn ledger(&self) -> StubLedger {
        self.ledger.lock().expect("ledger lock").clone()
    }
}

/// Applies a dotted-path override to a report: the longest existing section
/// prefix wins, otherwise the path splits at its first dot.
fn apply_override(report: &mut MetricReport, path: &str, value: &Scalar) {
    let mut best: Option<(String, String)> = None;
    for name in report.sections.keys() {
        if let Some(rest) = path.strip_prefix(name.as_str()) {
            if let Some(key) = rest.strip_prefix('.') {
                if best.as_ref().is_none_or(|(b, _)| name.len() > b.len()) {
                    best = Some((name.clone(), key.to_string()));
                }
            }
        }
    }
    let (section, key) = best.unwrap_or_else(|| match path.split_once('.') {
        Some((s, k)) => (s.to_string(), k.to_string()),
        None => ("Extra".to_string(), path.to_string()),
    });
    report.set(&section, &key, value.clone());
}

struct StubHandle {
    key: String,
    script: JobScript,
    probe_budget: f64,
    ledger: Arc<Mutex<StubLedger>>,
    finished: bool,
}

impl DetailedHandle for StubHandle {
    fn sample_metric(&mut self, key: &Selector) -> Result<Option<f64>, BackendError> {
        Ok(self.script.interim.iter().find(|(path, _)| *path == key.path).map(|(_, v)| *v))
    }

    fn wait(&mut self) -> Result<MetricReport, BackendError> {
        if !self.finished {
            self.finished = true;
            let mut ledger = self.ledger.lock().expect("ledger lock");
            ledger.completed += 1;
            ledger.time_consumed += self.script.duration;
            ledger.events.push(format!("{}: detailed-complete", self.key));
        }
        let base = self.script.report_text.as_deref().unwrap_or(crate::report::SAMPLE_ARCH_REPORT);
        let mut report = parse_stats_report(base)
            .map_err(|e| BackendError(format!("stub report unparseable: {e}")))?;
        for (path, value) in &self.script.final_overrides {
            apply_override(&mut report, path, value);
        }
        Ok(report)
    }

    fn abort(&mut self) {
        if self.finished {
            return;
        }
        self.finished = true;
        let consumed = self.probe_budget.min(self.script.duration);
        let mut ledger = self.ledger.lock().expect("ledger lock");
        ledger.aborted += 1;
        ledger.time_consumed += consumed;
        ledger.time_skipped += self.script.duration - consumed;
        ledger.events.push(format!("{}: detailed-abort", self.key));
    }
}

impl Backend for StubBackend {
    fn run_functional(&self, job: &SimJob) -> Result<Precheck, BackendError> {
        let script = self.scenario.script_for(&job.key());
        let mut ledger = self.ledger.lock().expect("ledger lock");
        ledger.functional_runs += 1;
        ledger.time_consumed += script.functional_time;
        ledger.events.push(format!(
            "{}: functional-{}",
            job.key(),
            if script.functional_pass { "pass" } else { "fail" }
        ));
        Ok(Precheck { passed: script.functional_pass, log: script.functional_log.clone() })
    }

    fn start_detailed(&self, job: &SimJob) -> Result<Box<dyn DetailedHandle>, BackendError> {
        let script = self.scenario.script_for(&job.key()).clone();
        {
            let mut ledger = self.ledger.lock().expect("ledger lock");
            ledger.detailed_started += 1;
            ledger.events.push(format!("{}: detailed-start", job.key()));
        }
        Ok(Box::new(StubHandle {
            key: job.key(),
            script,
            probe_budget: job.policy.probe_budget,
            ledger: Arc::clone(&self.ledger),
            finished: false,
        }))
    }

    fn run_power_stage(
        &self,
        job: &SimJob,
        _arch_report: &MetricReport,
    ) -> Result<MetricReport, BackendError> {
        let script = self.scenario.script_for(&job.key());
        {
            let mut ledger = self.ledger.lock().expect("ledger lock");
            ledger.power_runs += 1;
            ledger.events.push(format!("{}: power-complete", job.key()));
        }
        let mut report = MetricReport::default();
        report.set("Power", "TotalWatts", Scalar::Real(1.52));
        report.set("Power", "DynamicWatts", Scalar::Real(1.13));
        report.set("Power", "LeakageWatts", Scalar::Real(0.39));
        report.set("Area", "TotalMm2", Scalar::Real(8.81));
        for (path, value) in &script.power_overrides {
            apply_override(&mut report, path, value);
        }
        Ok(report)
    }
}
