//! Backend that drives real simulator binaries through command templates.
//!
//! Templates are whitespace-split command lines with placeholders expanded
//! per job: `{mem_config}`, `{net_config}`, `{benchmark}`, `{args}`,
//! `{workdir}`, `{report_out}`, and `{power_input}` for the power stage.
//! A token that is exactly `{args}` splices the benchmark arguments in as
//! separate tokens.

use super::{Backend, BackendError, DetailedHandle, Precheck, SimJob};
use crate::report::{
    fill_power_template, parse_stats_report, MetricReport, Selector, DEFAULT_POWER_MAPPING,
    DEFAULT_POWER_TEMPLATE,
};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandTemplates {
    pub functional: String,
    pub detailed: String,
    pub power: Option<String>,
}

pub struct ExternalBackend {
    pub templates: CommandTemplates,
    pub power_template: String,
    pub power_mapping: Vec<(String, Selector)>,
}

impl ExternalBackend {
    pub fn new(templates: CommandTemplates) -> Self {
        ExternalBackend {
            templates,
            power_template: DEFAULT_POWER_TEMPLATE.to_string(),
            power_mapping: crate::report::load_power_mapping(DEFAULT_POWER_MAPPING),
        }
    }
}

fn expand(template: &str, job: &SimJob, report_out: &Path, power_input: Option<&Path>) -> Vec<String> {
    let mut tokens = Vec::new();
    for raw in template.split_whitespace() {
        if raw == "{args}" {
            tokens.extend(job.benchmark.args.iter().cloned());
            continue;
        }
        let mut token = raw.to_string();
        let pairs = [
            ("{mem_config}", job.config_paths.mem.display().to_string()),
            ("{net_config}", job.config_paths.net.display().to_string()),
            ("{benchmark}", job.benchmark.executable.display().to_string()),
            ("{args}", job.benchmark.args.join(" ")),
            ("{workdir}", job.workdir.display().to_string()),
            ("{report_out}", report_out.display().to_string()),
            (
                "{power_input}",
                power_input.map(|p| p.display().to_string()).unwrap_or_default(),
            ),
        ];
        for (needle, value) in pairs {
            token = token.replace(needle, &value);
        }
        tokens.push(token);
    }
    tokens
}

fn spawn(tokens: &[String], workdir: &Path) -> Result<Child, BackendError> {
    let (program, args) =
        tokens.split_first().ok_or_else(|| BackendError("empty command template".into()))?;
    Command::new(program)
        .args(args)
        .current_dir(workdir)
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| BackendError(format!("failed to spawn '{program}': {e}")))
}

fn run_to_completion(tokens: &[String], workdir: &Path) -> Result<(bool, String), BackendError> {
    let child = spawn(tokens, workdir)?;
    let output =
        child.wait_with_output().map_err(|e| BackendError(format!("wait failed: {e}")))?;
    let mut log = String::from_utf8_lossy(&output.stdout).into_owned();
    log.push_str(&String::from_utf8_lossy(&output.stderr));
    Ok((output.status.success(), log))
}

struct ExternalHandle {
    child: Option<Child>,
    report_path: PathBuf,
    interim_path: PathBuf,
}

impl DetailedHandle for ExternalHandle {
    fn sample_metric(&mut self, key: &Selector) -> Result<Option<f64>, BackendError> {
        // Non-blocking read of whatever interim statistics exist right now.
        let Ok(text) = std::fs::read_to_string(&self.interim_path) else {
            return Ok(None);
        };
        let Ok(report) = parse_stats_report(&text) else {
            return Ok(None);
        };
        Ok(key.resolve(&report).and_then(|s| s.as_f64()))
    }

    fn wait(&mut self) -> Result<MetricReport, BackendError> {
        let child = self
            .child
            .as_mut()
            .ok_or_else(|| BackendError("detailed simulation already finished".into()))?;
        let status = child.wait().map_err(|e| BackendError(format!("wait failed: {e}")))?;
        self.child = None;
        if !status.success() {
            return Err(BackendError(format!("detailed simulation exited with {status}")));
        }
        let text = std::fs::read_to_string(&self.report_path)
            .map_err(|e| BackendError(format!("missing report {}: {e}", self.report_path.display())))?;
        parse_stats_report(&text).map_err(|e| BackendError(format!("bad report: {e}")))
    }

    fn abort(&mut self) {
        if let Some(mut child) = self.child.take() {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

impl Backend for ExternalBackend {
    fn run_functional(&self, job: &SimJob) -> Result<Precheck, BackendError> {
        let log_path = job.workdir.join("functional.log");
        let tokens = expand(&self.templates.functional, job, &log_path, None);
        let (passed, log) = run_to_completion(&tokens, &job.workdir)?;
        let _ = std::fs::write(&log_path, &log);
        Ok(Precheck { passed, log })
    }

    fn start_detailed(&self, job: &SimJob) -> Result<Box<dyn DetailedHandle>, BackendError> {
        let report_path = job.workdir.join("arch_report.raw.ini");
        let tokens = expand(&self.templates.detailed, job, &report_path, None);
        let child = spawn(&tokens, &job.workdir)?;
        Ok(Box::new(ExternalHandle {
            child: Some(child),
            report_path,
            interim_path: job.workdir.join("interim_report.ini"),
        }))
    }

    fn run_power_stage(
        &self,
        job: &SimJob,
        arch_report: &MetricReport,
    ) -> Result<MetricReport, BackendError> {
        let Some(template) = &self.templates.power else {
            // No power simulator configured: skip with an empty report.
            return Ok(MetricReport::default());
        };
        let filled = fill_power_template(arch_report, &self.power_mapping, &self.power_template)
            .map_err(|e| BackendError(format!("power template: {e}")))?;
        let power_input = job.workdir.join("power_input.xml");
        std::fs::write(&power_input, filled)
            .map_err(|e| BackendError(format!("writing power input: {e}")))?;
        let report_path = job.workdir.join("power_report.raw.ini");
        let tokens = expand(template, job, &report_path, Some(&power_input));
        let (ok, log) = run_to_completion(&tokens, &job.workdir)?;
        if !ok {
            return Err(BackendError(format!("power simulation failed:\n{log}")));
        }
        let text = std::fs::read_to_string(&report_path)
            .map_err(|e| BackendError(format!("missing power report: {e}")))?;
        parse_stats_report(&text).map_err(|e| BackendError(format!("bad power report: {e}")))
    }
}
