//! Compiles and runs a small C program against the generated header and the
//! static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include <string.h>
#include "rdetail.h"

int main(void) {
    RdtDist *nu = NULL;
    RdtRde *rde = NULL;
    double v = 0.0;
    if (rdt_dist_nu_a(1.0, &nu) != RDT_STATUS_OK) return 10;
    if (rdt_dist_cdf(nu, 1.0, &v) != RDT_STATUS_OK || fabs(v - 0.5) > 1e-15) return 11;
    if (rdt_dist_quantile(nu, 0.9, &v) != RDT_STATUS_OK || !isinf(v)) return 12;
    if (rdt_rde_frozen_perc(3, &rde) != RDT_STATUS_OK) return 13;
    double roots[64];
    if (rdt_sample_roots(rde, nu, 3, 64, 1, roots) != RDT_STATUS_OK) return 14;
    if (rdt_dist_nu_a(7.0, NULL) != RDT_STATUS_NULL) return 15;
    RdtDist *bad = NULL;
    if (rdt_dist_nu_a(7.0, &bad) != RDT_STATUS_DOMAIN || strlen(rdt_last_error()) == 0) return 16;
    size_t k = 0;
    if (rdt_find_min_partition(1.0 / 3.0 - 1e-6, &k, &v) != RDT_STATUS_OK || k != 24) return 17;
    rdt_rde_free(rde);
    rdt_dist_free(nu);
    printf("ok %s\n", rdt_version());
    return 0;
}
"#;

/// The static library built alongside this test binary in `<target>/<profile>/deps/`.
fn static_lib() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().join("librdetail_ffi.a")
}

#[test]
fn c_program_links_and_runs() {
    let lib = static_lib();
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "smoke program exited with {:?}",
        out.status.code()
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
