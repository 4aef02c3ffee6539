//! Compiles and runs a small C program against the generated header and the
//! built static library, proving the ABI is consumable from C.

use std::path::PathBuf;
use std::process::Command;

/// The build's profile directory, derived from this test binary's own path
/// (`target/<profile>/deps/c_smoke-*`), so debug and release runs both link
/// the freshly built library.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().expect("test binary path");
    exe.parent()
        .and_then(|deps| deps.parent())
        .expect("target profile directory")
        .to_path_buf()
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "predgc.h"

int main(void) {
    PredgcTrace *trace = NULL;
    if (predgc_trace_generate(5, 2, 400, 0.9, 0.07, 0.03, &trace) != PREDGC_STATUS_OK) {
        fprintf(stderr, "generate failed: %s\n", predgc_last_error());
        return 1;
    }
    if (predgc_trace_alloc_count(trace) != 400) {
        return 2;
    }

    PredgcHeapConfig heap;
    predgc_heap_config_default(&heap);
    heap.eden_capacity_bytes = 8192;
    heap.survivor_capacity_bytes = 2048;

    PredgcReport *report = NULL;
    if (predgc_run_comparison(trace, &heap, NULL, false, &report) != PREDGC_STATUS_OK) {
        fprintf(stderr, "comparison failed: %s\n", predgc_last_error());
        return 3;
    }
    double base = 0.0, oracle = 0.0;
    predgc_report_arm_pause_cost(report, "baseline", &base);
    predgc_report_arm_pause_cost(report, "predictive_oracle", &oracle);
    if (!(oracle < base)) {
        return 4;
    }
    predgc_report_free(report);
    predgc_trace_free(trace);
    printf("c-smoke-ok\n");
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include_dir = manifest.join("include");
    assert!(
        include_dir.join("predgc.h").exists(),
        "generated header missing at {}",
        include_dir.display()
    );

    // `cargo test` leaves the unhashed staticlib in deps/; `cargo build`
    // also hardlinks it into the profile root.
    let profile = profile_dir();
    let staticlib = [
        profile.join("deps/libpredgc_capi.a"),
        profile.join("libpredgc_capi.a"),
    ]
    .into_iter()
    .find(|p| p.exists())
    .unwrap_or_else(|| panic!("staticlib missing under {}", profile.display()));

    let scratch = tempfile::tempdir().unwrap();
    let c_path = scratch.path().join("smoke.c");
    let bin_path = scratch.path().join("smoke");
    std::fs::write(&c_path, C_PROGRAM).unwrap();

    let compile = Command::new("cc")
        .arg(&c_path)
        .arg("-I")
        .arg(&include_dir)
        .arg(staticlib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&bin_path)
        .output()
        .expect("cc must be runnable");
    assert!(
        compile.status.success(),
        "cc failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&bin_path).output().expect("smoke binary runs");
    assert!(
        run.status.success(),
        "smoke binary exited {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "c-smoke-ok");
}
