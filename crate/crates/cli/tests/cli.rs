//! End-to-end checks of the `bclab` binary: every subcommand runs, and the
//! file outputs are deterministic.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bclab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bclab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn assert_ok(out: &Output, what: &str) {
    assert!(
        out.status.success(),
        "{what} failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bclab-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn gen_and_solve_round_trip() {
    let dir = temp_dir("solve");
    let out = bclab(
        &[
            "gen", "--family", "knapsack", "--n1", "6", "--m", "2", "--seed", "3", "--out", "inst",
        ],
        &dir,
    );
    assert_ok(&out, "gen");
    let inst = std::fs::read_dir(dir.join("inst"))
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let out = bclab(
        &[
            "solve",
            "--instance",
            inst.to_str().unwrap(),
            "--trace-out",
            dir.join("trace.jsonl").to_str().unwrap(),
        ],
        &dir,
    );
    assert_ok(&out, "solve");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("status"));
    let trace = std::fs::read_to_string(dir.join("trace.jsonl")).unwrap();
    assert!(trace.starts_with("{\"schema\":\"bclab-trace-v1\""));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gen_to_stdout_is_deterministic() {
    let dir = temp_dir("gen");
    let args = [
        "gen", "--family", "packing", "--n1", "4", "--m", "2", "--seed", "11",
    ];
    let a = bclab(&args, &dir);
    let b = bclab(&args, &dir);
    assert_ok(&a, "gen");
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).starts_with("mip packing-"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bounds_reads_an_inputs_file() {
    let dir = temp_dir("bounds");
    let inputs = r#"{
        "d": 1, "m_rounds": 4, "h": 60.0, "n_sample": 20, "delta": 0.1,
        "types": [{ "rho": 8, "w_dim": 4,
                    "triple": { "region_factor": { "ln": 0.0 },
                                "region_exponent": 0, "degree": 1 } }],
        "q_sums": [37.0]
    }"#;
    std::fs::write(dir.join("inputs.json"), inputs).unwrap();
    let out = bclab(
        &["bounds", "--inputs", "inputs.json", "--csv", "bounds.csv"],
        &dir,
    );
    assert_ok(&out, "bounds");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("pdim-upper-bound"));
    let csv = std::fs::read_to_string(dir.join("bounds.csv")).unwrap();
    assert!(csv.starts_with("# bclab-bounds-v1\n"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn erm_census_and_gap_emit_deterministic_files() {
    let dir = temp_dir("pipeline");
    let cfg = bclab_core::lab::ExperimentConfig {
        n_train: 4,
        n_test: 4,
        budget: 6,
        census_samples: 48,
        slices_per_instance: 1,
        bnc: bclab_core::engine::BncConfig {
            max_rounds: 16,
            ..Default::default()
        },
        ..Default::default()
    };
    std::fs::write(dir.join("cfg.json"), cfg.to_json().unwrap()).unwrap();

    let out = bclab(&["erm", "--config", "cfg.json", "--out", "out-erm"], &dir);
    assert_ok(&out, "erm");
    assert!(dir.join("out-erm/erm.json").exists());

    let out = bclab(
        &["census", "--config", "cfg.json", "--out", "out-census"],
        &dir,
    );
    assert_ok(&out, "census");
    assert!(dir.join("out-census/census.csv").exists());

    let out = bclab(&["scan", "--config", "cfg.json", "--out", "out-scan"], &dir);
    assert_ok(&out, "scan");
    assert!(dir.join("out-scan/scan_00_00.csv").exists());

    let g1 = bclab(&["gap", "--config", "cfg.json", "--out", "out-gap1"], &dir);
    assert_ok(&g1, "gap");
    let g2 = bclab(&["gap", "--config", "cfg.json", "--out", "out-gap2"], &dir);
    assert_ok(&g2, "gap");
    let r1 = std::fs::read(dir.join("out-gap1/report.json")).unwrap();
    let r2 = std::fs::read(dir.join("out-gap2/report.json")).unwrap();
    assert_eq!(r1, r2, "reports differ across reruns");
    std::fs::remove_dir_all(&dir).ok();
}
