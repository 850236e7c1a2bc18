//! Plan file loading: a single INI file describes the whole batch.
//!
//! ```ini
//! [Topologies]
//! list = topologies.txt
//!
//! [Benchmarks]
//! vips = /opt/benchmarks/vips --threads 4
//!
//! [Control]
//! precheck = true
//! metric = Core 0.IPC
//! comparator = >=
//! threshold = 1.0
//! probe_budget = 30
//! time_base = simulated
//!
//! [Run]
//! parallelism = 4
//! outdir = out
//!
//! [Backend]
//! type = stub
//! scenario = scenario.ini
//! ```
//!
//! Relative paths resolve against the plan file's directory. The optional
//! `[Backend]` section selects and configures the execution backend; CLI
//! flags can override it.

use super::{Comparator, ControlPolicy, MetricCondition, PlanError, TimeBase};
use super::{Benchmark, CommandTemplates};
use crate::report::Selector;
use crate::topo::{load_topology_list, TopologySpec};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendChoice {
    Stub { scenario: Option<PathBuf> },
    External { templates: CommandTemplates },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub topologies: Vec<TopologySpec>,
    pub benchmarks: Vec<Benchmark>,
    pub policy: ControlPolicy,
    pub parallelism: usize,
    pub outdir: PathBuf,
    pub backend: BackendChoice,
}

fn resolve(base: &Path, value: &str) -> PathBuf {
    let path = PathBuf::from(value);
    if path.is_absolute() {
        path
    } else {
        base.join(path)
    }
}

/// Loads and fully resolves a plan file. Topology list parse errors are
/// collected into one message so the designer sees every bad line at once.
pub fn load_plan(path: &Path) -> Result<Plan, PlanError> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let ini = crate::ini::parse(&text);

    let list_raw = ini
        .get("Topologies", "list")
        .ok_or_else(|| PlanError::InvalidPlan("[Topologies] needs a 'list' entry".into()))?;
    let list_path = resolve(&base, list_raw);
    let list_text = std::fs::read_to_string(&list_path)?;
    let mut topologies = Vec::new();
    let mut bad_lines = Vec::new();
    for (line_no, parsed) in load_topology_list(&list_text) {
        match parsed {
            Ok(spec) => topologies.push(spec),
            Err(e) => bad_lines.push(format!("{}:{line_no}: {e}", list_path.display())),
        }
    }
    if !bad_lines.is_empty() {
        return Err(PlanError::InvalidPlan(bad_lines.join("\n")));
    }

    let mut benchmarks = Vec::new();
    if let Some(section) = ini.section("Benchmarks") {
        for (name, command) in &section.entries {
            let mut parts = command.split_whitespace();
            let exe = parts.next().ok_or_else(|| {
                PlanError::InvalidPlan(format!("benchmark '{name}' has no executable"))
            })?;
            benchmarks.push(
                Benchmark::new(name.clone(), resolve(&base, exe))
                    .with_args(parts.map(str::to_string).collect()),
            );
        }
    }

    let mut policy = ControlPolicy::default();
    if let Some(control) = ini.section("Control") {
        if let Some(raw) = control.get("precheck") {
            policy.precheck = match raw {
                "true" | "yes" | "1" => true,
                "false" | "no" | "0" => false,
                other => {
                    return Err(PlanError::InvalidPlan(format!("bad precheck value '{other}'")))
                }
            };
        }
        if let Some(metric) = control.get("metric") {
            let comparator_raw = control
                .get("comparator")
                .ok_or_else(|| PlanError::InvalidPlan("metric set but no comparator".into()))?;
            let comparator = Comparator::parse(comparator_raw).ok_or_else(|| {
                PlanError::InvalidPlan(format!("bad comparator '{comparator_raw}'"))
            })?;
            let threshold: f64 = control
                .get("threshold")
                .ok_or_else(|| PlanError::InvalidPlan("metric set but no threshold".into()))?
                .parse()
                .map_err(|_| PlanError::InvalidPlan("threshold is not numeric".into()))?;
            policy.metric =
                Some(MetricCondition { key: Selector::new(metric), comparator, threshold });
        }
        if let Some(raw) = control.get("probe_budget") {
            policy.probe_budget = raw
                .parse()
                .map_err(|_| PlanError::InvalidPlan("probe_budget is not numeric".into()))?;
        }
        if let Some(raw) = control.get("time_base") {
            policy.time_base = match raw {
                "wallclock" => TimeBase::WallClock,
                "simulated" => TimeBase::Simulated,
                other => {
                    return Err(PlanError::InvalidPlan(format!("bad time_base '{other}'")))
                }
            };
        }
    }
    policy.validate()?;

    let parallelism = match ini.get("Run", "parallelism") {
        Some(raw) => raw
            .parse::<usize>()
            .ok()
            .filter(|&p| p >= 1)
            .ok_or_else(|| PlanError::InvalidPlan("parallelism must be a positive integer".into()))?,
        None => 1,
    };
    let outdir = resolve(
        &base,
        ini.get("Run", "outdir")
            .ok_or_else(|| PlanError::InvalidPlan("[Run] needs an 'outdir' entry".into()))?,
    );

    let backend = match ini.get("Backend", "type").unwrap_or("stub") {
        "stub" => BackendChoice::Stub {
            scenario: ini.get("Backend", "scenario").map(|s| resolve(&base, s)),
        },
        "external" => {
            let get = |key: &str| {
                ini.get("Backend", key).map(str::to_string).ok_or_else(|| {
                    PlanError::InvalidPlan(format!("external backend needs '{key}'"))
                })
            };
            BackendChoice::External {
                templates: CommandTemplates {
                    functional: get("functional_cmd")?,
                    detailed: get("detailed_cmd")?,
                    power: ini.get("Backend", "power_cmd").map(str::to_string),
                },
            }
        }
        other => return Err(PlanError::InvalidPlan(format!("unknown backend type '{other}'"))),
    };

    Ok(Plan { topologies, benchmarks, policy, parallelism, outdir, backend })
}
