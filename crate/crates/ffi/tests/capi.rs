use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use flatlin::format::ReportDocument;
use flatlin_ffi::*;

fn fixture(name: &str) -> CString {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

struct Sys(*mut FlatlinSystem);

impl Drop for Sys {
    fn drop(&mut self) {
        unsafe { flatlin_system_free(self.0) }
    }
}

fn parse(name: &str) -> Sys {
    let text = fixture(name);
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { flatlin_system_parse(text.as_ptr(), &mut sys) }, FlatlinStatus::Ok);
    Sys(sys)
}

fn take(json: *mut c_char) -> ReportDocument {
    let s = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
    unsafe { flatlin_string_free(json) };
    ReportDocument::from_json(&s).unwrap()
}

#[test]
fn counts() {
    let sys = parse("academic.flat");
    unsafe {
        assert_eq!(flatlin_system_state_count(sys.0), 7);
        assert_eq!(flatlin_system_input_count(sys.0), 3);
        assert_eq!(flatlin_system_output_count(sys.0), 1);
    }
}

#[test]
fn verify_and_plan_academic() {
    let sys = parse("academic.flat");
    let mut out = ptr::null_mut();
    let st = unsafe { flatlin_run(sys.0, c"verify".as_ptr(), c"y".as_ptr(), ptr::null(), &mut out) };
    assert_eq!(st, FlatlinStatus::Ok);
    let doc = take(out);
    assert_eq!(doc.structure().unwrap().r.values, vec![4, 3, 4]);

    let opts = flatlin_options_default();
    let st = unsafe { flatlin_run(sys.0, c"plan".as_ptr(), ptr::null(), &opts, &mut out) };
    assert_eq!(st, FlatlinStatus::Ok);
    assert_eq!(take(out).plan.unwrap().d, vec![3, 1]);
}

#[test]
fn refuted_candidate_and_guard() {
    let sys = parse("example3_I.flat");
    let mut out = ptr::null_mut();
    let st = unsafe { flatlin_run(sys.0, c"verify".as_ptr(), c"bad_candidate".as_ptr(), ptr::null(), &mut out) };
    assert_eq!(st, FlatlinStatus::Failed);
    assert_eq!(take(out).verification.unwrap().failing_step, Some(8));

    let sys = parse("example1.flat");
    let mut opts = flatlin_options_default();
    opts.keep_order = true;
    let st = unsafe { flatlin_run(sys.0, c"plan".as_ptr(), ptr::null(), &opts, &mut out) };
    assert_eq!(st, FlatlinStatus::Failed);
    assert_eq!(take(out).error.unwrap().kind, "arrangement-violation");
    assert!(!flatlin_last_error().is_null());
}

#[test]
fn partition() {
    let sys = parse("rank2_synthetic.flat");
    let part = [0usize, 1];
    let r = [3i64, 2, 2];
    let mut out = ptr::null_mut();
    let st = unsafe {
        flatlin_check_partition(sys.0, ptr::null(), part.as_ptr(), 2, r.as_ptr(), 3, ptr::null(), &mut out)
    };
    assert_eq!(st, FlatlinStatus::Ok);
    assert!(take(out).partition.unwrap().holds);
}

#[test]
fn input_errors() {
    let bad = c"system s\nstates x1\ninputs u\ndyn x1' = u +\noutput y = x1\n";
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { flatlin_system_parse(bad.as_ptr(), &mut sys) }, FlatlinStatus::InputError);
    assert!(sys.is_null());
    let msg = unsafe { CStr::from_ptr(flatlin_last_error()) }.to_str().unwrap();
    assert!(msg.contains("line 4"), "{msg}");

    let invalid = [0xffu8, 0xfe, 0];
    let st = unsafe { flatlin_system_parse(invalid.as_ptr().cast(), &mut sys) };
    assert_eq!(st, FlatlinStatus::InvalidUtf8);

    let sys = parse("academic.flat");
    let mut out = ptr::null_mut();
    let st = unsafe { flatlin_run(sys.0, c"frobnicate".as_ptr(), ptr::null(), ptr::null(), &mut out) };
    assert_eq!(st, FlatlinStatus::InputError);
    assert!(out.is_null());
    let st = unsafe { flatlin_run(sys.0, c"verify".as_ptr(), c"nope".as_ptr(), ptr::null(), &mut out) };
    assert_eq!(st, FlatlinStatus::InputError);
    assert_eq!(take(out).exit_code, 2);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(flatlin_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn c_compiler() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .map(String::from)
}

#[test]
fn header_compiles_and_links() {
    let Some(cc) = c_compiler() else {
        panic!("no C compiler found");
    };
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let profile_dir = tmp.parent().unwrap().join(if cfg!(debug_assertions) { "debug" } else { "release" });
    let lib = profile_dir.join("libflatlin_ffi.a");
    let src = tmp.join("flatlin_smoke.c");
    let fixture_path = crate_dir.join("../core/fixtures/two_input_chain.flat");
    std::fs::write(
        &src,
        format!(
            r#"#include <stdio.h>
#include <string.h>
#include "flatlin.h"
int main(void) {{
    FILE *f = fopen("{path}", "rb");
    if (!f) return 20;
    static char buf[1 << 16];
    size_t len = fread(buf, 1, sizeof buf - 1, f);
    fclose(f);
    buf[len] = 0;
    FlatlinSystem *sys = NULL;
    if (flatlin_system_parse(buf, &sys) != FLATLIN_STATUS_OK) return 21;
    if (flatlin_system_state_count(sys) != 4) return 22;
    FlatlinOptions opts = flatlin_options_default();
    char *json = NULL;
    FlatlinStatus st = flatlin_run(sys, "plan", NULL, &opts, &json);
    if (st != FLATLIN_STATUS_OK || !json || !strstr(json, "\"minimal\": true")) return 23;
    flatlin_string_free(json);
    flatlin_system_free(sys);
    return 0;
}}
"#,
            path = fixture_path.display()
        ),
    )
    .unwrap();
    let check = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(crate_dir.join("include"))
        .arg(&src)
        .output()
        .unwrap();
    assert!(check.status.success(), "{}", String::from_utf8_lossy(&check.stderr));
    if !lib.exists() {
        panic!("static library not found at {}", lib.display());
    }
    let exe = tmp.join("flatlin_smoke");
    let link = Command::new(&cc)
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(link.status.success(), "{}", String::from_utf8_lossy(&link.stderr));
    let run = Command::new(&exe).status().unwrap();
    assert_eq!(run.code(), Some(0));
}
