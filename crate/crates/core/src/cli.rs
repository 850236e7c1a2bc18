//! Command-line front end: thin adapters from subcommands to library calls.
//!
//! Exit codes: 0 success, 1 usage or I/O problems, 2 validation violations
//! (bad names, graph or config violations), 3 partial run failures (some
//! jobs pre-check-failed or terminated early).

use crate::emit::{check_bundle_references, emit_bundle, CacheProfile};
use crate::graph::{generate, ArchGraph};
use crate::orchestrate::{
    load_plan, load_results, plan_jobs, run_plan, save_results, Backend, BackendChoice,
    CommandTemplates, ExternalBackend, JobStatus, Scenario, StubBackend,
};
use crate::report::{extract_params, load_selectors, render_csv, render_txt};
use crate::topo::{load_topology_list, parse_topology};
use crate::validate::validate_graph;
use clap::{Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "topoforge", version, about = "Multicore topology synthesis and simulation batch tool")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Txt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Stub,
    External,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate graphs and simulator configs for every topology in a list file
    Gen {
        /// Topology list: one name per line, '#' comments
        #[arg(long)]
        list: PathBuf,
        /// Output directory for config and graph files
        #[arg(long)]
        out: PathBuf,
        /// Cache profile overrides (INI)
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Print the generation method selected for topology names
    Classify {
        /// Topology names
        names: Vec<String>,
        /// Read names from a list file instead
        #[arg(long)]
        list: Option<PathBuf>,
    },
    /// Check graph dumps or emitted configs for structural violations
    Validate {
        /// Graph edge-list dump to validate
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Topology name to validate the graph against (defaults to the dump header)
        #[arg(long)]
        name: Option<String>,
        /// Memory config to cross-check for dangling references (needs --net)
        #[arg(long)]
        mem: Option<PathBuf>,
        /// Network config belonging to --mem
        #[arg(long)]
        net: Option<PathBuf>,
        /// Generate and validate every name in a topology list
        #[arg(long)]
        list: Option<PathBuf>,
    },
    /// Emit config files for a single topology name
    Emit {
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Execute a simulation plan file
    Run {
        #[arg(long)]
        plan: PathBuf,
        /// Override the plan's backend choice
        #[arg(long)]
        backend: Option<BackendKind>,
        /// Stub scenario fixture (overrides the plan's)
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Override the plan's parallelism
        #[arg(long)]
        parallelism: Option<usize>,
    },
    /// Extract selected parameters from run results into a table
    Report {
        /// Directory a `run` wrote results into
        #[arg(long)]
        results: PathBuf,
        /// Selector list file: `Section.Key` lines with optional ` as Alias`
        #[arg(long)]
        selectors: PathBuf,
        /// Output table path
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
}

fn load_profile(path: Option<&Path>) -> Result<CacheProfile, String> {
    match path {
        None => Ok(CacheProfile::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            CacheProfile::from_ini(&text).map_err(|e| e.to_string())
        }
    }
}

/// Runs one parsed invocation. Diagnostics go to `err`, data to `out` or to
/// files; the return value is the process exit code.
pub fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match run_command(cli.command, out, err) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            1
        }
    }
}

fn run_command(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    match command {
        Command::Gen { list, out: outdir, profile } => {
            let profile = load_profile(profile.as_deref())?;
            let text = std::fs::read_to_string(&list).map_err(|e| format!("{}: {e}", list.display()))?;
            std::fs::create_dir_all(&outdir).map_err(|e| e.to_string())?;
            let mut failures = 0usize;
            for (line_no, parsed) in load_topology_list(&text) {
                let spec = match parsed {
                    Ok(spec) => spec,
                    Err(e) => {
                        let _ = writeln!(err, "{}:{line_no}: {e}", list.display());
                        failures += 1;
                        continue;
                    }
                };
                let name = spec.canonical_name().expect("parsed specs are valid");
                let graph = match generate(&spec) {
                    Ok(graph) => graph,
                    Err(e) => {
                        let _ = writeln!(err, "{name}: {e}");
                        failures += 1;
                        continue;
                    }
                };
                let bundle = emit_bundle(&graph, &profile).map_err(|e| format!("{name}: {e}"))?;
                write_bundle(&outdir, &name, &graph, &bundle)?;
                let _ = writeln!(
                    out,
                    "{name} {} components={} connections={} loc={}",
                    graph.kind,
                    graph.components.len(),
                    graph.connections.len(),
                    bundle.total_loc()
                );
            }
            Ok(if failures == 0 { 0 } else { 2 })
        }

        Command::Classify { names, list } => {
            let mut all = names;
            if let Some(list) = list {
                let text =
                    std::fs::read_to_string(&list).map_err(|e| format!("{}: {e}", list.display()))?;
                for (_, parsed) in load_topology_list(&text) {
                    match parsed {
                        Ok(spec) => all.push(spec.canonical_name().expect("valid")),
                        Err(e) => {
                            let _ = writeln!(err, "{e}");
                            return Ok(2);
                        }
                    }
                }
            }
            if all.is_empty() {
                return Err("no topology names given".into());
            }
            let single = all.len() == 1;
            let mut failures = 0usize;
            for name in &all {
                match parse_topology(name).and_then(|s| crate::classify::classify(&s)) {
                    Ok(kind) => {
                        if single {
                            let _ = writeln!(out, "{kind}");
                        } else {
                            let _ = writeln!(out, "{name} {kind}");
                        }
                    }
                    Err(e) => {
                        let _ = writeln!(err, "{name}: {e}");
                        failures += 1;
                    }
                }
            }
            Ok(if failures == 0 { 0 } else { 2 })
        }

        Command::Validate { graph, name, mem, net, list } => {
            let mut violations = 0usize;
            let mut checked = false;
            if let Some(path) = graph {
                checked = true;
                let text =
                    std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                let parsed = ArchGraph::from_edge_list(&text).map_err(|e| e.to_string())?;
                let spec = match &name {
                    Some(n) => parse_topology(n).map_err(|e| e.to_string())?,
                    None => parsed.spec.clone(),
                };
                let report = validate_graph(&parsed, &spec);
                if report.ok() {
                    let _ = writeln!(out, "{}: ok", path.display());
                } else {
                    let _ = write!(err, "{report}");
                    violations += report.violations.len();
                }
            }
            if let (Some(mem), Some(net)) = (&mem, &net) {
                checked = true;
                let mem_text =
                    std::fs::read_to_string(mem).map_err(|e| format!("{}: {e}", mem.display()))?;
                let net_text =
                    std::fs::read_to_string(net).map_err(|e| format!("{}: {e}", net.display()))?;
                let findings = check_bundle_references(&mem_text, &net_text);
                if findings.is_empty() {
                    let _ = writeln!(out, "{}: references ok", mem.display());
                } else {
                    for finding in &findings {
                        let _ = writeln!(err, "{finding}");
                    }
                    violations += findings.len();
                }
            } else if mem.is_some() != net.is_some() {
                return Err("--mem and --net must be given together".into());
            }
            if let Some(list) = list {
                checked = true;
                let text =
                    std::fs::read_to_string(&list).map_err(|e| format!("{}: {e}", list.display()))?;
                for (line_no, parsed) in load_topology_list(&text) {
                    match parsed.map_err(|e| e.to_string()).and_then(|spec| {
                        generate(&spec).map_err(|e| e.to_string()).map(|g| (spec, g))
                    }) {
                        Ok((spec, graph)) => {
                            let report = validate_graph(&graph, &spec);
                            if !report.ok() {
                                let _ = write!(err, "{report}");
                                violations += report.violations.len();
                            }
                        }
                        Err(e) => {
                            let _ = writeln!(err, "{}:{line_no}: {e}", list.display());
                            violations += 1;
                        }
                    }
                }
                if violations == 0 {
                    let _ = writeln!(out, "{}: all topologies generate and validate", list.display());
                }
            }
            if !checked {
                return Err("nothing to validate; pass --graph, --mem/--net or --list".into());
            }
            Ok(if violations == 0 { 0 } else { 2 })
        }

        Command::Emit { name, out: outdir, profile } => {
            let profile = load_profile(profile.as_deref())?;
            let spec = match parse_topology(&name) {
                Ok(spec) => spec,
                Err(e) => {
                    let _ = writeln!(err, "{name}: {e}");
                    return Ok(2);
                }
            };
            let graph = generate(&spec).map_err(|e| e.to_string())?;
            let bundle = emit_bundle(&graph, &profile).map_err(|e| e.to_string())?;
            std::fs::create_dir_all(&outdir).map_err(|e| e.to_string())?;
            write_bundle(&outdir, &name, &graph, &bundle)?;
            for (class, lines) in bundle.loc_report() {
                let _ = writeln!(out, "{class} {lines}");
            }
            let _ = writeln!(out, "total {}", bundle.total_loc());
            Ok(0)
        }

        Command::Run { plan, backend, scenario, parallelism } => {
            let mut plan = load_plan(&plan).map_err(|e| e.to_string())?;
            match backend {
                Some(BackendKind::Stub) => {
                    plan.backend = BackendChoice::Stub { scenario: scenario.clone() }
                }
                Some(BackendKind::External) => {
                    if !matches!(plan.backend, BackendChoice::External { .. }) {
                        return Err("--backend external needs [Backend] commands in the plan".into());
                    }
                }
                None => {}
            }
            if let (BackendChoice::Stub { scenario: slot }, Some(path)) =
                (&mut plan.backend, scenario)
            {
                *slot = Some(path);
            }
            if let Some(p) = parallelism {
                plan.parallelism = p.max(1);
            }

            let jobs = plan_jobs(
                &plan.topologies,
                &plan.benchmarks,
                &plan.policy,
                &plan.outdir,
                &CacheProfile::default(),
            )
            .map_err(|e| e.to_string())?;

            let backend: Box<dyn Backend> = match &plan.backend {
                BackendChoice::Stub { scenario } => {
                    let scenario = match scenario {
                        Some(path) => Scenario::load(path).map_err(|e| e.to_string())?,
                        None => Scenario::default(),
                    };
                    Box::new(StubBackend::new(scenario))
                }
                BackendChoice::External { templates } => Box::new(ExternalBackend::new(
                    CommandTemplates { ..templates.clone() },
                )),
            };

            let results = run_plan(&jobs, backend.as_ref(), plan.parallelism);
            save_results(&jobs, &results, &plan.outdir).map_err(|e| e.to_string())?;
            let mut counts = [0usize; 4];
            for (job, result) in jobs.iter().zip(&results) {
                let _ = writeln!(out, "{} {}", job.key(), result.status);
                for warning in &result.warnings {
                    let _ = writeln!(err, "{}: warning: {warning}", job.key());
                }
                match result.status {
                    JobStatus::Completed => counts[0] += 1,
                    JobStatus::EarlyTerminated => counts[1] += 1,
                    JobStatus::PrecheckFailed => counts[2] += 1,
                    JobStatus::BackendError => counts[3] += 1,
                }
            }
            let _ = writeln!(
                out,
                "completed={} early-terminated={} precheck-failed={} backend-errors={}",
                counts[0], counts[1], counts[2], counts[3]
            );
            Ok(if counts[3] > 0 {
                1
            } else if counts[1] + counts[2] > 0 {
                3
            } else {
                0
            })
        }

        Command::Report { results, selectors, out: outfile, format } => {
            let loaded = load_results(&results).map_err(|e| e.to_string())?;
            let text = std::fs::read_to_string(&selectors)
                .map_err(|e| format!("{}: {e}", selectors.display()))?;
            let selectors = load_selectors(&text);
            if selectors.is_empty() {
                return Err("selector list is empty".into());
            }
            let table = extract_params(&loaded, &selectors);
            let rendered = match format {
                OutputFormat::Csv => render_csv(&table),
                OutputFormat::Txt => render_txt(&table),
            };
            std::fs::write(&outfile, rendered).map_err(|e| e.to_string())?;
            let _ = writeln!(out, "wrote {} rows to {}", table.rows.len(), outfile.display());
            Ok(0)
        }
    }
}

fn write_bundle(
    outdir: &Path,
    name: &str,
    graph: &ArchGraph,
    bundle: &crate::emit::ConfigBundle,
) -> Result<(), String> {
    let write = |suffix: &str, data: &str| {
        let path = outdir.join(format!("{name}.{suffix}"));
        std::fs::write(&path, data).map_err(|e| format!("{}: {e}", path.display()))
    };
    write("mem.ini", &bundle.mem_config)?;
    write("net.ini", &bundle.net_config)?;
    write("graph.txt", &graph.to_edge_list())
}
