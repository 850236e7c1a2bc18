//! End-to-end checks of the command-line surface: every subcommand is a
//! thin adapter over the library, with the documented exit codes.

mod common;

use clap::Parser;
use std::path::Path;
use topoforge::cli::{dispatch, Cli};
use topoforge::emit::{emit_bundle, CacheProfile};
use topoforge::graph::generate;
use topoforge::topo::parse_topology;

const REFERENCE_NAMES: [&str; 10] = [
    "2C_2L1_2L2_1L3",
    "4C_4DL1_2IL1_1L2",
    "3C_3DL1_3IL1_3DL2_1IL2_1L3",
    "2C_2DL1_2IL1_1DL2_1L3_BP",
    "4C_4DL1_2IL1_2DL2_2IL2_1L3_BP",
    "13C_9L1_5L2_3L3",
    "18C_9DL1_6IL1_3L2",
    "17C_11DL1_8IL1_5DL2_3IL2_2L3",
    "32C_23DL1_17IL1_12DL2_4L3_BP",
    "37C_28DL1_19IL1_13DL2_8IL2_5L3_BP",
];

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["topoforge"];
    argv.extend(args);
    let cli = Cli::try_parse_from(argv).expect("argument parsing");
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = dispatch(cli, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_reference_list(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("topologies.txt");
    std::fs::write(&path, REFERENCE_NAMES.join("\n") + "\n").unwrap();
    path
}

#[test]
fn classify_prints_kind_for_single_name() {
    let (code, out, _) = run(&["classify", "5C_5DL1_2IL1_2DL2_BP"]);
    assert_eq!(code, 0);
    assert_eq!(out, "Bypass2\n");
}

#[test]
fn classify_matches_library_on_list() {
    let dir = tempfile::tempdir().unwrap();
    let list = write_reference_list(dir.path());
    let (code, out, _) = run(&["classify", "--list", list.to_str().unwrap()]);
    assert_eq!(code, 0);
    for name in REFERENCE_NAMES {
        let kind = topoforge::classify::classify(&parse_topology(name).unwrap()).unwrap();
        assert!(out.contains(&format!("{name} {kind}")), "{name} missing from:\n{out}");
    }
}

#[test]
fn classify_bad_name_exits_two() {
    let (code, _, err) = run(&["classify", "2C_1L1_2L2"]);
    assert_eq!(code, 2);
    assert!(err.contains("rule violation"));
}

#[test]
fn gen_writes_bundles_matching_library_output() {
    let dir = tempfile::tempdir().unwrap();
    let list = write_reference_list(dir.path());
    let out_dir = dir.path().join("build");
    let (code, out, err) =
        run(&["gen", "--list", list.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 10);

    for name in REFERENCE_NAMES {
        let mem = std::fs::read_to_string(out_dir.join(format!("{name}.mem.ini"))).unwrap();
        let net = std::fs::read_to_string(out_dir.join(format!("{name}.net.ini"))).unwrap();
        let dump = std::fs::read_to_string(out_dir.join(format!("{name}.graph.txt"))).unwrap();
        // Thin adapter: byte-identical to direct library calls.
        let graph = generate(&parse_topology(name).unwrap()).unwrap();
        let bundle = emit_bundle(&graph, &CacheProfile::default()).unwrap();
        assert_eq!(mem, bundle.mem_config, "{name}");
        assert_eq!(net, bundle.net_config, "{name}");
        assert_eq!(dump, graph.to_edge_list(), "{name}");
    }
}

#[test]
fn gen_reports_bad_lines_and_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("list.txt");
    std::fs::write(&list, "1C_1L1\nBOGUS\n").unwrap();
    let out_dir = dir.path().join("build");
    let (code, out, err) =
        run(&["gen", "--list", list.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(out.contains("1C_1L1"));
    assert!(err.contains("BOGUS") || err.contains(":2:"));
    assert!(out_dir.join("1C_1L1.mem.ini").exists());
}

#[test]
fn validate_accepts_generated_dump_and_flags_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate(&parse_topology("5C_5DL1_2IL1_2DL2_BP").unwrap()).unwrap();
    let clean = dir.path().join("clean.graph.txt");
    std::fs::write(&clean, graph.to_edge_list()).unwrap();
    let (code, out, _) = run(&["validate", "--graph", clean.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("ok"));

    // Hand-corrupt: drop one connection line.
    let dump = graph.to_edge_list();
    let corrupted: Vec<&str> = dump.lines().filter(|l| !l.starts_with("core-3 -> il1-1")).collect();
    let bad = dir.path().join("bad.graph.txt");
    std::fs::write(&bad, corrupted.join("\n")).unwrap();
    let (code, _, err) = run(&["validate", "--graph", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(!err.is_empty(), "violation listing expected");
}

#[test]
fn validate_config_reference_check() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate(&parse_topology("2C_2L1_1L2").unwrap()).unwrap();
    let bundle = emit_bundle(&graph, &CacheProfile::default()).unwrap();
    let mem = dir.path().join("t.mem.ini");
    let net = dir.path().join("t.net.ini");
    std::fs::write(&mem, bundle.mem_config.replace("Geometry = geo-l1", "Geometry = geo-lX"))
        .unwrap();
    std::fs::write(&net, &bundle.net_config).unwrap();
    let (code, _, err) =
        run(&["validate", "--mem", mem.to_str().unwrap(), "--net", net.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("geo-lX") || err.contains("references missing"));
}

#[test]
fn validate_requires_an_input() {
    let (code, _, err) = run(&["validate"]);
    assert_eq!(code, 1);
    assert!(err.contains("nothing to validate"));
}

#[test]
fn emit_writes_single_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("one");
    let (code, out, _) =
        run(&["emit", "3C_3DL1_3IL1_3DL2_1IL2_1L3", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("total "));
    assert!(out_dir.join("3C_3DL1_3IL1_3DL2_1IL2_1L3.mem.ini").exists());
    assert!(out_dir.join("3C_3DL1_3IL1_3DL2_1IL2_1L3.net.ini").exists());

    let (code, _, _) = run(&["emit", "2C_1L1_2L2", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code, 2);
}

fn write_plan(dir: &Path, scenario: &str, control: &str) -> std::path::PathBuf {
    std::fs::write(dir.join("topologies.txt"), "1C_1L1\n2C_2L1\n3C_3L1\n").unwrap();
    std::fs::write(dir.join("bench.bin"), "x").unwrap();
    std::fs::write(dir.join("scenario.ini"), scenario).unwrap();
    let plan = format!(
        "[Topologies]\nlist = topologies.txt\n\n[Benchmarks]\nvips = bench.bin\n\n{control}\n[Run]\nparallelism = 2\noutdir = out\n\n[Backend]\ntype = stub\nscenario = scenario.ini\n"
    );
    let path = dir.join("plan.ini");
    std::fs::write(&path, plan).unwrap();
    path
}

#[test]
fn run_all_completed_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let plan = write_plan(dir.path(), "[default]\nduration = 10\n", "");
    let (code, out, err) = run(&["run", "--plan", plan.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("completed=3 early-terminated=0 precheck-failed=0 backend-errors=0"));
    assert!(dir.path().join("out/results.ini").exists());
    assert!(dir.path().join("out/jobs/1C_1L1/vips/arch_report.ini").exists());
}

#[test]
fn run_partial_failures_exit_three_and_report_extracts() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = "[default]\nduration = 100\ninterim:Core 0.IPC = 1.4\n\n[2C_2L1/vips]\nduration = 100\ninterim:Core 0.IPC = 0.5\n";
    let control = "[Control]\nmetric = Core 0.IPC\ncomparator = >=\nthreshold = 1.0\nprobe_budget = 10\ntime_base = simulated\n\n";
    let plan = write_plan(dir.path(), scenario, control);
    let (code, out, _) = run(&["run", "--plan", plan.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(out.contains("2C_2L1/vips EarlyTerminated"));

    // Extraction over the written results matches the library path.
    let selectors = dir.path().join("selectors.txt");
    std::fs::write(&selectors, "Global.IPC as ipc\nPower.TotalWatts as watts\n").unwrap();
    let table_path = dir.path().join("table.csv");
    let (code, out, _) = run(&[
        "report",
        "--results",
        dir.path().join("out").to_str().unwrap(),
        "--selectors",
        selectors.to_str().unwrap(),
        "--out",
        table_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("wrote 3 rows"));

    let written = std::fs::read_to_string(&table_path).unwrap();
    let results = topoforge::orchestrate::load_results(&dir.path().join("out")).unwrap();
    let loaded = topoforge::report::extract_params(
        &results,
        &topoforge::report::load_selectors("Global.IPC as ipc\nPower.TotalWatts as watts\n"),
    );
    assert_eq!(written, topoforge::report::render_csv(&loaded));
    // Early-terminated row keeps its probe value and empty metric cells.
    assert!(written.lines().any(|l| l.starts_with("2C_2L1,vips,EarlyTerminated,0.5,,")));

    let (code, _, _) = run(&[
        "report",
        "--results",
        dir.path().join("out").to_str().unwrap(),
        "--selectors",
        selectors.to_str().unwrap(),
        "--out",
        dir.path().join("table.txt").to_str().unwrap(),
        "--format",
        "txt",
    ]);
    assert_eq!(code, 0);
    assert!(std::fs::read_to_string(dir.path().join("table.txt")).unwrap().contains("ipc"));
}

#[test]
fn run_backend_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("topologies.txt"), "1C_1L1\n").unwrap();
    std::fs::write(dir.path().join("bench.bin"), "x").unwrap();
    let plan = dir.path().join("plan.ini");
    std::fs::write(
        &plan,
        "[Topologies]\nlist = topologies.txt\n\n[Benchmarks]\nvips = bench.bin\n\n[Run]\noutdir = out\n\n[Backend]\ntype = external\nfunctional_cmd = /nonexistent/sim {mem_config}\ndetailed_cmd = /nonexistent/sim {mem_config}\n",
    )
    .unwrap();
    let (code, out, _) = run(&["run", "--plan", plan.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("BackendError"));
}

#[test]
fn run_precheck_failures_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = "[default]\nduration = 10\n\n[3C_3L1/vips]\nfunctional = fail\n";
    let control = "[Control]\nprecheck = true\n\n";
    let plan = write_plan(dir.path(), scenario, control);
    let (code, out, _) = run(&["run", "--plan", plan.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(out.contains("3C_3L1/vips PrecheckFailed"));
    assert!(out.contains("completed=2"));
}
