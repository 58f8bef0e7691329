//! The `tpossp` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

use tpossp::generator::{generate, GeneratorConfig};
use tpossp::{read_instance, read_solution, validate_solution, write_instance, Instance, Request, RequestId};

fn tpossp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpossp")).args(args).env("TPOSSP_THREADS", "2").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = tpossp(args);
    assert!(out.status.success(), "tpossp {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generated(dir: &Path) -> std::path::PathBuf {
    let inst = dir.join("instance.json");
    ok(&["generate", "--hubs", "6", "--schedules", "12", "--requests", "6", "--seed", "5", "--out", s(&inst)]);
    inst
}

#[test]
fn generate_is_seeded() {
    let a = ok(&["generate", "--hubs", "5", "--schedules", "8", "--requests", "4", "--seed", "9"]);
    let b = ok(&["generate", "--hubs", "5", "--schedules", "8", "--requests", "4", "--seed", "9"]);
    let c = ok(&["generate", "--hubs", "5", "--schedules", "8", "--requests", "4", "--seed", "10"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(read_instance(a.as_bytes()).unwrap().requests().len(), 4);
}

#[test]
fn solve_writes_a_valid_solution() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generated(dir.path());
    let run = dir.path().join("run");
    ok(&["solve", s(&inst), "--mode", "stabilized", "--lagrangian", "--out", s(&run)]);
    for f in ["instance.json", "solution.json", "cg.json", "report.json"] {
        assert!(run.join(f).exists(), "{f} missing");
    }
    let inst = read_instance(&std::fs::read(run.join("instance.json")).unwrap()).unwrap();
    let sol = read_solution(&std::fs::read(run.join("solution.json")).unwrap(), &inst).unwrap();
    assert!(validate_solution(&inst, &sol).is_empty());

    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(run.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["summary"]["objective"], sol.objective());
    assert!(report["summary"]["lagrangian_bound"].is_i64());

    let out = ok(&["validate", s(&run.join("instance.json")), s(&run.join("solution.json"))]);
    assert!(out.contains("solution valid"));
}

#[test]
fn exact_engine_never_loses_to_column_generation() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generated(dir.path());
    let (cg, exact) = (dir.path().join("cg"), dir.path().join("exact"));
    ok(&["solve", s(&inst), "--out", s(&cg)]);
    ok(&["solve", s(&inst), "--engine", "exact", "--out", s(&exact)]);
    let objective = |d: &Path| {
        let inst = read_instance(&std::fs::read(d.join("instance.json")).unwrap()).unwrap();
        read_solution(&std::fs::read(d.join("solution.json")).unwrap(), &inst).unwrap().objective()
    };
    assert!(objective(&exact) <= objective(&cg));
}

#[test]
fn bound_and_reduce_emit_json() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generated(dir.path());
    let bound: serde_json::Value = serde_json::from_str(&ok(&["bound", s(&inst), "--bound-iterations", "50"])).unwrap();
    assert!(bound.is_object());
    let reduce: serde_json::Value = serde_json::from_str(&ok(&["reduce", s(&inst)])).unwrap();
    assert!(reduce.is_object() || reduce.is_array());

    let run = dir.path().join("b");
    ok(&["solve", s(&inst), "--engine", "bound", "--bound-iterations", "50", "--out", s(&run)]);
    assert!(run.join("bound.json").exists());
}

#[test]
fn report_as_csv() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generated(dir.path());
    let run = dir.path().join("run");
    ok(&["solve", s(&inst), "--format", "csv", "--out", s(&run)]);
    let csv = std::fs::read_to_string(run.join("report.csv")).unwrap();
    assert!(csv.starts_with("schema_version,label,"));
    assert_eq!(csv.lines().count(), 2);
    let schedules = std::fs::read_to_string(run.join("schedules.csv")).unwrap();
    assert!(schedules.lines().count() > 1);

    let out = ok(&["report", s(&run.join("instance.json")), s(&run.join("solution.json")), "--format", "csv"]);
    assert!(out.starts_with("schema_version,"));
}

#[test]
fn validate_rejects_broken_files() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generated(dir.path());
    let mut v: serde_json::Value = serde_json::from_slice(&std::fs::read(&inst).unwrap()).unwrap();
    v["legs"][0]["arrive"] = serde_json::json!(-5);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_vec(&v).unwrap()).unwrap();
    let out = tpossp(&["validate", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{not json").unwrap();
    assert_ne!(tpossp(&["validate", s(&garbage)]).status.code(), Some(0));
    assert_eq!(tpossp(&["validate", s(&dir.path().join("missing.json"))]).status.code(), Some(1));
    assert_eq!(tpossp(&["solve", s(&inst), "--paths", "lots"]).status.code(), Some(2));
}

#[test]
fn insert_keeps_the_base_plan() {
    let dir = tempfile::tempdir().unwrap();
    let cfg =
        GeneratorConfig { hubs: 6, schedules: 15, legs_per_schedule: 3, requests: 9, seed: 8, ..Default::default() };
    let all = generate(&cfg).unwrap();
    let (old, new) = all.requests().split_at(6);
    let base = Instance::new(all.hubs().to_vec(), all.schedules().to_vec(), all.legs().to_vec(), old.to_vec()).unwrap();
    let new: Vec<Request> =
        new.iter().enumerate().map(|(i, r)| Request { id: RequestId(old.len() + i), ..r.clone() }).collect();
    let inst = dir.path().join("base.json");
    std::fs::write(&inst, write_instance(&base)).unwrap();
    let new_file = dir.path().join("new.json");
    std::fs::write(&new_file, serde_json::to_vec(&new).unwrap()).unwrap();

    let run = dir.path().join("run");
    ok(&["solve", s(&inst), "--out", s(&run)]);
    let ins = dir.path().join("ins");
    ok(&["insert", s(&inst), "--base", s(&run.join("solution.json")), "--new", s(&new_file), "--out", s(&ins)]);

    let base_inst = read_instance(&std::fs::read(run.join("instance.json")).unwrap()).unwrap();
    let base_sol = read_solution(&std::fs::read(run.join("solution.json")).unwrap(), &base_inst).unwrap();
    let merged_inst = read_instance(&std::fs::read(ins.join("instance.json")).unwrap()).unwrap();
    let merged = read_solution(&std::fs::read(ins.join("solution.json")).unwrap(), &merged_inst).unwrap();
    assert_eq!(merged.paths.len(), 9);
    assert!(validate_solution(&merged_inst, &merged).is_empty());
    for (a, b) in base_sol.paths.iter().zip(&merged.paths) {
        assert_eq!(a.legs, b.legs);
    }
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(ins.join("insert.json")).unwrap()).unwrap();
    assert_eq!(summary["marginal_cost"], merged.objective() - base_sol.objective());
}
