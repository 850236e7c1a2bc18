//! Simulation batch orchestration: job planning over topology x benchmark
//! products, functional pre-checks, metric-based early termination, and a
//! bounded-parallelism runner over pluggable backends.

mod external;
mod plan;
mod stub;

pub use external::{CommandTemplates, ExternalBackend};
pub use plan::{load_plan, BackendChoice, Plan};
pub use stub::{Scenario, StubBackend, StubLedger};

use crate::emit::{emit_bundle, CacheProfile, EmitError};
use crate::graph::{generate, GraphError};
use crate::report::{MetricReport, ReportSource, ReportStage, Selector};
use crate::topo::TopologySpec;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};
use thiserror::Error;

/// One benchmark program in executable form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Benchmark {
    pub name: String,
    pub executable: PathBuf,
    pub args: Vec<String>,
    pub input_data: Vec<PathBuf>,
}

impl Benchmark {
    pub fn new(name: impl Into<String>, executable: impl Into<PathBuf>) -> Self {
        Benchmark {
            name: name.into(),
            executable: executable.into(),
            args: Vec::new(),
            input_data: Vec::new(),
        }
    }

    pub fn with_args(mut self, args: Vec<String>) -> Self {
        self.args = args;
        self
    }

    fn check_runnable(&self) -> Result<(), PlanError> {
        let paths = std::iter::once(&self.executable).chain(self.input_data.iter());
        for path in paths {
            if !path.is_file() {
                return Err(PlanError::BenchmarkUnrunnable(self.name.clone(), path.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Ge,
    Le,
    Gt,
    Lt,
}

impl Comparator {
    pub fn parse(text: &str) -> Option<Comparator> {
        match text {
            ">=" => Some(Comparator::Ge),
            "<=" => Some(Comparator::Le),
            ">" => Some(Comparator::Gt),
            "<" => Some(Comparator::Lt),
            _ => None,
        }
    }

    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::Ge => value >= threshold,
            Comparator::Le => value <= threshold,
            Comparator::Gt => value > threshold,
            Comparator::Lt => value < threshold,
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Ge => ">=",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Lt => "<",
        })
    }
}

/// Satisfaction condition checked once per job after the probe budget.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricCondition {
    pub key: Selector,
    pub comparator: Comparator,
    pub threshold: f64,
}

/// How the probe budget is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeBase {
    /// Sleep real seconds before probing.
    #[default]
    WallClock,
    /// Backend-reported simulated time; no real waiting.
    Simulated,
}

/// Pre-check and early-termination rules for a batch.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ControlPolicy {
    pub precheck: bool,
    pub metric: Option<MetricCondition>,
    /// Simulation time granted before the metric probe, in seconds for
    /// wall-clock runs or backend time units for simulated runs.
    pub probe_budget: f64,
    pub time_base: TimeBase,
}

impl ControlPolicy {
    pub fn validate(&self) -> Result<(), PlanError> {
        if self.metric.is_some() && self.probe_budget <= 0.0 {
            return Err(PlanError::InvalidPolicy(
                "probe_budget must be positive when a metric condition is set".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigPaths {
    pub mem: PathBuf,
    pub net: PathBuf,
}

/// One planned (topology, benchmark) simulation unit.
#[derive(Debug, Clone, PartialEq)]
pub struct SimJob {
    pub topology: TopologySpec,
    pub topology_name: String,
    pub benchmark: Benchmark,
    pub config_paths: ConfigPaths,
    pub workdir: PathBuf,
    pub policy: ControlPolicy,
}

impl SimJob {
    pub fn key(&self) -> String {
        format!("{}/{}", self.topology_name, self.benchmark.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobStatus {
    Completed,
    PrecheckFailed,
    EarlyTerminated,
    BackendError,
}

impl fmt::Display for JobStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JobStatus::Completed => "Completed",
            JobStatus::PrecheckFailed => "PrecheckFailed",
            JobStatus::EarlyTerminated => "EarlyTerminated",
            JobStatus::BackendError => "BackendError",
        })
    }
}

impl JobStatus {
    pub fn parse(text: &str) -> Option<JobStatus> {
        match text {
            "Completed" => Some(JobStatus::Completed),
            "PrecheckFailed" => Some(JobStatus::PrecheckFailed),
            "EarlyTerminated" => Some(JobStatus::EarlyTerminated),
            "BackendError" => Some(JobStatus::BackendError),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobResult {
    pub topology: String,
    pub benchmark: String,
    pub status: JobStatus,
    /// Architectural report first, power report second when present.
    pub reports: Vec<MetricReport>,
    pub wall_time: Duration,
    /// Metric value sampled at probe time, when a probe happened.
    pub probe_value: Option<f64>,
    pub warnings: Vec<String>,
    /// Pre-check log or backend error text.
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Error)]
#[error("backend error: {0}")]
pub struct BackendError(pub String);

/// Outcome of a functional pre-check run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Precheck {
    pub passed: bool,
    pub log: String,
}

/// Running detailed simulation. Abort must be idempotent, and sampling must
/// return within a bounded poll rather than blocking on completion.
pub trait DetailedHandle: Send {
    fn sample_metric(&mut self, key: &Selector) -> Result<Option<f64>, BackendError>;
    fn wait(&mut self) -> Result<MetricReport, BackendError>;
    fn abort(&mut self);
}

/// Adapter that runs simulations for jobs. Implementations must tolerate
/// concurrent calls on distinct jobs.
pub trait Backend: Send + Sync {
    fn run_functional(&self, job: &SimJob) -> Result<Precheck, BackendError>;
    fn start_detailed(&self, job: &SimJob) -> Result<Box<dyn DetailedHandle>, BackendError>;
    fn run_power_stage(
        &self,
        job: &SimJob,
        arch_report: &MetricReport,
    ) -> Result<MetricReport, BackendError>;
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("config emission failed for {name}: {source}")]
    EmissionFailed {
        name: String,
        #[source]
        source: EmitError,
    },
    #[error("generation failed for {name}: {source}")]
    GenerationFailed {
        name: String,
        #[source]
        source: GraphError,
    },
    #[error("workdir already exists: {0}")]
    WorkdirConflict(PathBuf),
    #[error("benchmark '{0}' is not runnable: missing {1}")]
    BenchmarkUnrunnable(String, PathBuf),
    #[error("invalid control policy: {0}")]
    InvalidPolicy(String),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Plans the cartesian product of topologies and benchmarks: emits configs
/// once per topology under `outdir/configs`, creates one workdir per job
/// under `outdir/jobs`, and attaches the control policy to every job.
pub fn plan_jobs(
    topologies: &[TopologySpec],
    benchmarks: &[Benchmark],
    policy: &ControlPolicy,
    outdir: &Path,
    profile: &CacheProfile,
) -> Result<Vec<SimJob>, PlanError> {
    policy.validate()?;
    for benchmark in benchmarks {
        benchmark.check_runnable()?;
    }
    let config_dir = outdir.join("configs");
    std::fs::create_dir_all(&config_dir)?;

    let mut jobs = Vec::with_capacity(topologies.len() * benchmarks.len());
    for spec in topologies {
        let name = spec
            .canonical_name()
            .map_err(|e| PlanError::GenerationFailed {
                name: "<invalid spec>".into(),
                source: e.into(),
            })?;
        let graph = generate(spec)
            .map_err(|e| PlanError::GenerationFailed { name: name.clone(), source: e })?;
        let bundle = emit_bundle(&graph, profile)
            .map_err(|e| PlanError::EmissionFailed { name: name.clone(), source: e })?;
        let mem = config_dir.join(format!("{name}.mem.ini"));
        let net = config_dir.join(format!("{name}.net.ini"));
        std::fs::write(&mem, &bundle.mem_config)?;
        std::fs::write(&net, &bundle.net_config)?;
        std::fs::write(config_dir.join(format!("{name}.graph.txt")), graph.to_edge_list())?;

        for benchmark in benchmarks {
            let workdir = outdir.join("jobs").join(&name).join(&benchmark.name);
            if workdir.exists() {
                return Err(PlanError::WorkdirConflict(workdir));
            }
            std::fs::create_dir_all(&workdir)?;
            jobs.push(SimJob {
                topology: spec.clone(),
                topology_name: name.clone(),
                benchmark: benchmark.clone(),
                config_paths: ConfigPaths { mem: mem.clone(), net: net.clone() },
                workdir,
                policy: policy.clone(),
            });
        }
    }
    Ok(jobs)
}

/// Runs the backend's functional mode for a job with pre-checking enabled.
pub fn run_precheck(job: &SimJob, backend: &dyn Backend) -> Result<Precheck, BackendError> {
    backend.run_functional(job)
}

fn failed_result(job: &SimJob, error: BackendError, started: Instant) -> JobResult {
    JobResult {
        topology: job.topology_name.clone(),
        benchmark: job.benchmark.name.clone(),
        status: JobStatus::BackendError,
        reports: Vec::new(),
        wall_time: started.elapsed(),
        probe_value: None,
        warnings: Vec::new(),
        detail: Some(error.0),
    }
}

/// Runs the detailed stage of one job whose pre-check (if any) has passed:
/// start, probe once after the budget, abort on an unmet condition, else run
/// to completion and collect the architectural and power reports.
pub fn run_job(job: &SimJob, backend: &dyn Backend) -> JobResult {
    let started = Instant::now();
    let mut warnings = Vec::new();
    let mut probe_value = None;

    let mut handle = match backend.start_detailed(job) {
        Ok(handle) => handle,
        Err(e) => return failed_result(job, e, started),
    };

    if let Some(condition) = &job.policy.metric {
        if job.policy.time_base == TimeBase::WallClock {
            std::thread::sleep(Duration::from_secs_f64(job.policy.probe_budget));
        }
        match handle.sample_metric(&condition.key) {
            Ok(Some(value)) => {
                probe_value = Some(value);
                if !condition.comparator.holds(value, condition.threshold) {
                    handle.abort();
                    return JobResult {
                        topology: job.topology_name.clone(),
                        benchmark: job.benchmark.name.clone(),
                        status: JobStatus::EarlyTerminated,
                        reports: Vec::new(),
                        wall_time: started.elapsed(),
                        probe_value,
                        warnings,
                        detail: Some(format!(
                            "{} = {} violates {} {}",
                            condition.key.path, value, condition.comparator, condition.threshold
                        )),
                    };
                }
            }
            Ok(None) => warnings.push(format!(
                "metric '{}' unavailable at probe time; running to completion",
                condition.key.path
            )),
            Err(e) => {
                handle.abort();
                return failed_result(job, e, started);
            }
        }
    }

    let mut arch = match handle.wait() {
        Ok(report) => report,
        Err(e) => return failed_result(job, e, started),
    };
    arch.source = Some(ReportSource {
        topology: job.topology_name.clone(),
        benchmark: job.benchmark.name.clone(),
        stage: ReportStage::Architectural,
    });

    let mut power = match backend.run_power_stage(job, &arch) {
        Ok(report) => report,
        Err(e) => return failed_result(job, e, started),
    };
    power.source = Some(ReportSource {
        topology: job.topology_name.clone(),
        benchmark: job.benchmark.name.clone(),
        stage: ReportStage::Power,
    });

    JobResult {
        topology: job.topology_name.clone(),
        benchmark: job.benchmark.name.clone(),
        status: JobStatus::Completed,
        reports: vec![arch, power],
        wall_time: started.elapsed(),
        probe_value,
        warnings,
        detail: None,
    }
}

/// Full pipeline for one job: pre-check (when enabled) gating the detailed
/// stage. A failing pre-check means the detailed stage never starts.
pub fn execute_job(job: &SimJob, backend: &dyn Backend) -> JobResult {
    let started = Instant::now();
    if job.policy.precheck {
        match run_precheck(job, backend) {
            Ok(outcome) if !outcome.passed => {
                return JobResult {
                    topology: job.topology_name.clone(),
                    benchmark: job.benchmark.name.clone(),
                    status: JobStatus::PrecheckFailed,
                    reports: Vec::new(),
                    wall_time: started.elapsed(),
                    probe_value: None,
                    warnings: Vec::new(),
                    detail: Some(outcome.log),
                };
            }
            Ok(_) => {}
            Err(e) => return failed_result(job, e, started),
        }
    }
    run_job(job, backend)
}

/// Executes jobs with at most `parallelism` detailed simulations in flight.
/// Results come back in job order; one job's failure never aborts the plan.
pub fn run_plan(jobs: &[SimJob], backend: &dyn Backend, parallelism: usize) -> Vec<JobResult> {
    let workers = parallelism.max(1).min(jobs.len().max(1));
    let next = Mutex::new(0usize);
    let results: Vec<Mutex<Option<JobResult>>> =
        jobs.iter().map(|_| Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = {
                    let mut guard = next.lock().expect("queue lock");
                    if *guard >= jobs.len() {
                        break;
                    }
                    let i = *guard;
                    *guard += 1;
                    i
                };
                let result = execute_job(&jobs[index], backend);
                *results[index].lock().expect("result lock") = Some(result);
            });
        }
    });

    results
        .into_iter()
        .map(|slot| slot.into_inner().expect("result lock").expect("every job ran"))
        .collect()
}

/// Writes per-job raw reports plus a `results.ini` index into `outdir`.
pub fn save_results(
    jobs: &[SimJob],
    results: &[JobResult],
    outdir: &Path,
) -> std::io::Result<PathBuf> {
    use crate::ini::{Ini, Section};
    let mut index = Ini::default();
    for (job, result) in jobs.iter().zip(results) {
        let mut section = Section::new(job.key());
        section.set("status", result.status.to_string());
        section.set("wall_time_ms", result.wall_time.as_millis().to_string());
        if let Some(value) = result.probe_value {
            section.set("probe_value", value.to_string());
        }
        section.set("workdir", job.workdir.display().to_string());
        for (report, file_name) in result.reports.iter().zip(["arch_report.ini", "power_report.ini"])
        {
            let path = job.workdir.join(file_name);
            std::fs::write(&path, report.to_text())?;
            let key = match report.source.as_ref().map(|s| s.stage) {
                Some(ReportStage::Power) => "power_report",
                _ => "arch_report",
            };
            section.set(key, path.display().to_string());
        }
        if let Some(detail) = &result.detail {
            section.set("detail", detail.replace('\n', " | "));
        }
        for warning in &result.warnings {
            section.set("warning", warning.clone());
        }
        index.sections.push(section);
    }
    let path = outdir.join("results.ini");
    std::fs::write(&path, index.to_text())?;
    Ok(path)
}

/// Loads a `results.ini` index (with its referenced reports) back into
/// job results, for the report extraction stage.
pub fn load_results(outdir: &Path) -> Result<Vec<JobResult>, PlanError> {
    let text = std::fs::read_to_string(outdir.join("results.ini"))?;
    let index = crate::ini::parse(&text);
    let mut results = Vec::new();
    for section in &index.sections {
        let (topology, benchmark) = section.name.split_once('/').ok_or_else(|| {
            PlanError::InvalidPlan(format!("bad results section name '{}'", section.name))
        })?;
        let status = section
            .get("status")
            .and_then(JobStatus::parse)
            .ok_or_else(|| PlanError::InvalidPlan(format!("bad status in '{}'", section.name)))?;
        let mut reports = Vec::new();
        for (key, stage) in
            [("arch_report", ReportStage::Architectural), ("power_report", ReportStage::Power)]
        {
            if let Some(path) = section.get(key) {
                let raw = std::fs::read_to_string(path)?;
                if let Ok(mut report) = crate::report::parse_stats_report(&raw) {
                    report.source = Some(ReportSource {
                        topology: topology.to_string(),
                        benchmark: benchmark.to_string(),
                        stage,
                    });
                    reports.push(report);
                }
            }
        }
        results.push(JobResult {
            topology: topology.to_string(),
            benchmark: benchmark.to_string(),
            status,
            reports,
            wall_time: Duration::from_millis(
                section.get("wall_time_ms").and_then(|v| v.parse().ok()).unwrap_or(0),
            ),
            probe_value: section.get("probe_value").and_then(|v| v.parse().ok()),
            warnings: section
                .entries
                .iter()
                .filter(|(k, _)| k == "warning")
                .map(|(_, v)| v.clone())
                .collect(),
            detail: section.get("detail").map(str::to_string),
        });
    }
    Ok(results)
}
