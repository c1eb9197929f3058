use std::path::PathBuf;
use std::process::Command;

use cli_report::*;
use iis_core::systems::{field_lambda1, n1};
use iis_core::{Iis, Interval, IntervalPair};
use numberfield::{rat, FieldElement, FieldHandle};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thinsections"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("thinsections-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn corrupted_matrix_fails_verification() {
    let mut m = n1();
    m.set(0, 0, rat(4, 1));
    let rows = verify_rows(Scope::S1, &Inputs { n1: m, ..Inputs::default() }).unwrap();
    let residue = rows.iter().find(|r| r.claim == "s1.eigen.residue").unwrap();
    assert_eq!(residue.status, Status::Fail);
    assert!(rows.iter().any(|r| r.claim == "s1.eigen.kernel" && r.status == Status::Fail));
    assert_eq!(exit_code(&rows), 1);
}

#[test]
fn end_criterion_rows_carry_certificates() {
    let rows = verify_rows(Scope::S1, &Inputs::default()).unwrap();
    let r = rows.iter().find(|r| r.claim.starts_with("s1.end")).unwrap();
    assert_eq!(r.status, Status::ApproxPass);
    assert!(r.computed.starts_with("[0.44"));
    let rows = verify_rows(Scope::S2, &Inputs::default()).unwrap();
    let r = rows.iter().find(|r| r.claim == "s2.rauzy.period").unwrap();
    assert_eq!(r.status, Status::ExactPass);
}

#[test]
fn exact_pass_only_on_exact_checks() {
    for r in verify_rows(Scope::All, &Inputs::default()).unwrap() {
        if r.status == Status::ExactPass {
            assert_eq!(r.tolerance, "exact", "{}", r.claim);
        }
    }
}

#[test]
fn rauzy_run_reports_period_six() {
    let d = scratch("rauzy");
    let s = load_system("s1").unwrap();
    let out = run(RunKind::Rauzy, &s, 12, &RunOptions { emit_json: Some(d.clone()), svg: None }).unwrap();
    assert_eq!(out.report["period"], 6);
    assert_eq!(out.report["verified"], true);
    assert_eq!(out.exit_code(), 0);
    // every emitted state reloads and validates
    for k in 0..=out.steps_done {
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join(format!("step_{k:03}.json"))).unwrap()).unwrap();
        Iis::from_json(&v).unwrap();
    }
}

#[test]
fn rips_run_on_s2_finds_contraction_lambda() {
    let d = scratch("rips");
    let s = load_system("s2").unwrap();
    let out = run(RunKind::Rips, &s, 40, &RunOptions { emit_json: Some(d.clone()), svg: Some(d.clone()) }).unwrap();
    assert_eq!(out.report["period_steps"], 5);
    let approx = out.report["contraction_approx"].as_f64().unwrap();
    assert!((approx - 0.0791188645).abs() < 1e-9);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("step_007.json")).unwrap()).unwrap();
    band_rips::BandComplex::from_json(&v).unwrap();
    assert!(std::fs::read_to_string(d.join("step_007.svg")).unwrap().contains("<svg"));
}

/// Every point covered twice: no free subarc.
fn doubly_covered() -> Iis {
    let f = field_lambda1();
    let l = f.gen();
    let one = f.one();
    let two = &one + &one;
    let iv = |a: FieldElement, b: FieldElement| Interval::new(a, b);
    Iis::new(
        iv(f.zero(), two.clone()),
        vec![
            IntervalPair::new(iv(f.zero(), one.clone()), iv(one.clone(), two.clone())),
            IntervalPair::new(iv(f.zero(), &one - &l), iv(l.clone(), one.clone())),
            IntervalPair::new(iv(one.clone(), &two - &l), iv(&one + &l, two)),
        ],
    )
    .unwrap()
}

#[test]
fn halted_machine_exits_nonzero_with_artifacts() {
    let d = scratch("halt");
    let out = run(RunKind::Rips, &doubly_covered(), 5, &RunOptions { emit_json: Some(d.clone()), svg: None }).unwrap();
    assert_eq!(out.steps_done, 0);
    assert!(out.stopped.as_deref().unwrap().contains("halts"));
    assert_ne!(out.exit_code(), 0);
    assert!(d.join("step_000.json").exists());

    let path = d.join("system.json");
    std::fs::write(&path, serde_json::to_string(&doubly_covered().to_json()).unwrap()).unwrap();
    let st = bin().args(["run", "rips", "--system", path.to_str().unwrap(), "--steps", "3"]).output().unwrap();
    assert_ne!(st.status.code(), Some(0));
}

#[test]
fn verify_binary_is_deterministic_and_exits_one_on_fail_rows() {
    let a = bin().args(["verify", "--scope", "surface", "--json"]).output().unwrap();
    let b = bin().args(["verify", "--scope", "surface", "--json"]).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    // the stated symmetry centre is a fail row
    assert_eq!(a.status.code(), Some(1));
    let rows: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(rows.as_array().unwrap().iter().any(|r| r["status"] == "fail"));
}

#[test]
fn section_binary_writes_svg_and_json() {
    let d = scratch("section");
    let (svg, json) = (d.join("s.svg"), d.join("s.json"));
    let st = bin()
        .args(["section", "--example", "1", "--levels", "2", "--radius", "5", "--seed", "3"])
        .args(["--svg", svg.to_str().unwrap(), "--json", json.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["seed"], 3);
    assert_eq!(v["levels"].as_array().unwrap().len(), 2);
    assert!(v["first_level"]["components"].is_array());
}

#[test]
fn bad_precision_exits_with_code_two() {
    let st = bin()
        .env("THINSECTIONS_PRECISION", "zero")
        .args(["section", "--example", "1", "--level", "0.4", "--radius", "3"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = bin()
        .env("THINSECTIONS_PRECISION", "1e-8")
        .args(["section", "--example", "1", "--level", "0.4,0.5", "--radius", "3"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&st.stdout).contains("eps 1e-8"));
}
