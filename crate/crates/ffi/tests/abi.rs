use std::ffi::CStr;
use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use seqshare_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(seqshare_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn scenario_lifecycle_matches_closed_form() {
    let gammas = [0.4, 0.7, 1.0];
    let mut handle = ptr::null_mut();
    let status = unsafe {
        seqshare_scenario_new(
            SEQSHARE_STATE_BELL,
            SEQSHARE_MS1,
            SEQSHARE_CHANNEL_PHASE_FLIP,
            0.9,
            0.3,
            gammas.as_ptr(),
            gammas.len(),
            &mut handle,
        )
    };
    assert_eq!(status, SeqshareStatus::Ok);
    assert!(!handle.is_null());
    assert_eq!(unsafe { seqshare_scenario_observers(handle) }, 3);

    let mut short = [0.0; 2];
    assert_eq!(unsafe { seqshare_scenario_run(handle, short.as_mut_ptr(), 2) }, SeqshareStatus::BufferTooSmall);
    assert!(last_error().contains("need 3"));

    let mut values = [0.0; 3];
    assert_eq!(unsafe { seqshare_scenario_run(handle, values.as_mut_ptr(), 3) }, SeqshareStatus::Ok);
    assert!(last_error().is_empty());
    for (k, v) in values.iter().enumerate() {
        let mut closed = 0.0;
        let s = unsafe {
            seqshare_witness_closed(
                SEQSHARE_MS1,
                SEQSHARE_CHANNEL_PHASE_FLIP,
                k + 1,
                0.3,
                gammas.as_ptr(),
                3,
                0.9,
                &mut closed,
            )
        };
        assert_eq!(s, SeqshareStatus::Ok);
        assert!((v - closed).abs() < 1e-10, "{v} vs {closed}");
    }
    unsafe { seqshare_scenario_free(handle) };
    unsafe { seqshare_scenario_free(ptr::null_mut()) };
}

#[test]
fn tsirelson_through_handle() {
    let mut handle = ptr::null_mut();
    let g = [1.0];
    let status = unsafe {
        seqshare_scenario_new(SEQSHARE_STATE_BELL, SEQSHARE_MS1, SEQSHARE_CHANNEL_NOISELESS, 1.0, FRAC_PI_4, g.as_ptr(), 1, &mut handle)
    };
    assert_eq!(status, SeqshareStatus::Ok);
    let mut v = 0.0;
    assert_eq!(unsafe { seqshare_scenario_run(handle, &mut v, 1) }, SeqshareStatus::Ok);
    assert!((v - 2.0 * SQRT_2).abs() < 1e-10);
    unsafe { seqshare_scenario_free(handle) };
}

#[test]
fn invalid_arguments_report_errors() {
    let mut handle = ptr::null_mut();
    let g = [1.0];
    let status =
        unsafe { seqshare_scenario_new(SEQSHARE_STATE_BELL, 9, SEQSHARE_CHANNEL_NOISELESS, 1.0, 0.3, g.as_ptr(), 1, &mut handle) };
    assert_eq!(status, SeqshareStatus::InvalidArgument);
    assert!(handle.is_null());
    assert!(last_error().contains("strategy"));

    let status =
        unsafe { seqshare_scenario_new(SEQSHARE_STATE_GHZ, SEQSHARE_MS1, SEQSHARE_CHANNEL_NOISELESS, 1.0, 0.3, g.as_ptr(), 1, &mut handle) };
    assert_eq!(status, SeqshareStatus::InvalidArgument);

    let status =
        unsafe { seqshare_scenario_new(SEQSHARE_STATE_BELL, SEQSHARE_MS1, SEQSHARE_CHANNEL_NOISELESS, 1.0, 0.3, ptr::null(), 1, &mut handle) };
    assert_eq!(status, SeqshareStatus::NullPointer);

    let status = unsafe { seqshare_scenario_new(0, 1, 0, 1.0, 0.3, g.as_ptr(), 1, ptr::null_mut()) };
    assert_eq!(status, SeqshareStatus::NullPointer);

    let mut out = 0.0;
    let status = unsafe { seqshare_witness_closed(SEQSHARE_MS1, 7, 1, 0.3, g.as_ptr(), 1, 0.9, &mut out) };
    assert_eq!(status, SeqshareStatus::InvalidArgument);
    assert!(last_error().contains("channel"));
}

#[test]
fn gamma_sequence_marks_infeasible_tail() {
    let mut out = [0.0; 6];
    let mut feasible = 0usize;
    let status = unsafe {
        seqshare_gamma_sequence(SEQSHARE_MS1, SEQSHARE_CHANNEL_BIT_FLIP, 0.2, 0.1, 0.95, 6, out.as_mut_ptr(), &mut feasible)
    };
    assert_eq!(status, SeqshareStatus::Ok);
    assert!(feasible < 6);
    assert!(out[..feasible].iter().all(|g| g.is_finite() && *g <= 1.0));
    assert!(out[feasible..].iter().all(|g| g.is_infinite()));
    assert!((out[0] - 1.1 * 0.1f64.tan()).abs() < 1e-14);
}

#[test]
fn double_violation_solution_and_no_root() {
    let mut sol = SeqshareDoubleViolation::default();
    let status = unsafe { seqshare_solve_double_violation(SEQSHARE_MS1, SEQSHARE_CHANNEL_PHASE_FLIP, 0.5, 0.9, &mut sol) };
    assert_eq!(status, SeqshareStatus::Ok);
    assert!((sol.epsilon - 0.3014).abs() < 5e-4);
    assert!((sol.gamma1 - 0.3323).abs() < 5e-4);
    assert!(sol.witness1 > 2.0 && sol.witness2 > 2.0);

    let status = unsafe { seqshare_solve_double_violation(SEQSHARE_MS1, SEQSHARE_CHANNEL_BIT_FLIP, 0.5, 0.6, &mut sol) };
    assert_eq!(status, SeqshareStatus::Infeasible);
    assert!(!last_error().is_empty());
}

#[test]
fn errors_are_thread_local() {
    let mut out = 0.0;
    unsafe { seqshare_witness_closed(99, 0, 1, 0.3, ptr::null(), 0, 0.9, &mut out) };
    assert!(!last_error().is_empty());
    let other = std::thread::spawn(last_error).join().unwrap();
    assert!(other.is_empty());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(seqshare_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/seqshare.h")
}

fn compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().ok().filter(|o| o.status.success()).map(|_| cc)
}

#[test]
fn header_is_generated_and_declares_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "seqshare_scenario_new",
        "seqshare_scenario_free",
        "seqshare_scenario_run",
        "seqshare_witness_closed",
        "seqshare_gamma_sequence",
        "seqshare_solve_double_violation",
        "seqshare_last_error",
        "typedef struct SeqshareScenario SeqshareScenario;",
        "SEQSHARE_STATUS_INFEASIBLE = 3",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    let h = header();
    for lang in ["c", "c++"] {
        let out = Command::new(&cc).args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang]).arg(&h).output().unwrap();
        assert!(out.status.success(), "{lang}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "seqshare.h"

int main(void) {
    double g[1] = {1.0};
    SeqshareScenario *s = NULL;
    if (seqshare_scenario_new(SEQSHARE_STATE_BELL, SEQSHARE_MS1, SEQSHARE_CHANNEL_NOISELESS, 1.0,
                              0.78539816339744831, g, 1, &s) != SEQSHARE_STATUS_OK) return 1;
    double v = 0.0;
    if (seqshare_scenario_run(s, &v, 1) != SEQSHARE_STATUS_OK) return 2;
    seqshare_scenario_free(s);
    if (fabs(v - 2.0 * sqrt(2.0)) > 1e-10) return 3;
    SeqshareDoubleViolation d;
    if (seqshare_solve_double_violation(SEQSHARE_MS3, SEQSHARE_CHANNEL_BIT_FLIP, 0.8, 0.8, &d) != SEQSHARE_STATUS_OK) return 4;
    if (seqshare_scenario_new(SEQSHARE_STATE_BELL, 42, 0, 1.0, 0.3, g, 1, &s) != SEQSHARE_STATUS_INVALID_ARGUMENT) return 5;
    printf("%.6f %.6f\n", d.epsilon, d.gamma1);
    return 0;
}
"#;

fn static_lib() -> Option<PathBuf> {
    // tests/ binaries live in <target>/<profile>/deps
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libseqshare_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let (Some(cc), Some(lib)) = (compiler(), static_lib()) else {
        eprintln!("no C compiler or static library; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let out = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "link: {}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let text = String::from_utf8(run.stdout).unwrap();
    let nums: Vec<f64> = text.split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert!((nums[0] - 0.1123).abs() < 5e-4 && (nums[1] - 0.278067).abs() < 5e-4, "{text}");
}
