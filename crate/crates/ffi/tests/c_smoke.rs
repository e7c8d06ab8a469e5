//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include <string.h>
#include "pkgamma.h"

int main(void) {
    PkEval e;
    if (pk_gamma(1.0, 1.0, 5.0, &e) != PK_STATUS_OK || e.value != 24.0) return 1;
    if (pk_gamma(1.0, 1.0, -2.0, &e) != PK_STATUS_POLE) return 2;
    if (strcmp(pk_last_error(), "pole at index 2") != 0) return 3;

    double upper[3] = {1.0, 1.0, 1.0};
    double lower[3] = {2.0, 1.0, 1.0};
    PkHyper *h = NULL;
    if (pk_hyper_new(upper, 1, lower, 1, &h) != PK_STATUS_OK) return 4;
    if (pk_hyper_eval(h, 1.0, &e) != PK_STATUS_OK) return 5;
    pk_hyper_free(h);
    if (fabs(e.value - (exp(1.0) - 1.0)) > 1e-14) return 6;

    PkAudit *a = NULL;
    if (pk_audit_run("psi", "p=1;k=2;x=1.1;m=2", 0.0, &a) != PK_STATUS_OK) return 7;
    if (!pk_audit_all_pass(a)) return 8;
    if (strncmp(pk_audit_report_json(a), "{", 1) != 0) return 9;
    pk_audit_free(a);
    puts("ok");
    return 0;
}
"#;

/// `target/<profile>`, two levels above this test executable.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().expect("test executable path");
    exe.parent()
        .and_then(Path::parent)
        .expect("target/<profile>/deps")
        .to_path_buf()
}

fn have_cc() -> bool {
    Command::new("cc")
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success())
}

#[test]
fn c_program_links_and_runs() {
    if !have_cc() {
        eprintln!("no C compiler on PATH; C smoke test not run");
        return;
    }
    // `cargo test` only builds the rlib; build (or refresh) the archive.
    let profile = profile_dir();
    let mut build = Command::new(env!("CARGO"));
    build.args(["build", "--lib", "-p", "pkgamma-ffi"]);
    if profile.file_name().is_some_and(|n| n == "release") {
        build.arg("--release");
    }
    assert!(
        build.status().unwrap().success(),
        "building the static library failed"
    );
    let lib = profile.join("libpkgamma_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();

    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");

    let out = Command::new(&bin).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
