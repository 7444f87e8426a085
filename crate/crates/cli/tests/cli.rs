//! End-to-end checks of the command-line interface: deterministic output,
//! thread-count invariance, exit codes and run manifests.

use clifford_spectra_cli::run;
use std::path::PathBuf;

fn argv(rest: &[&str]) -> Vec<String> {
    std::iter::once("clifford-spectra")
        .chain(rest.iter().copied())
        .map(String::from)
        .collect()
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("clifford-spectra-test-{}-{name}", std::process::id()));
    p
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[test]
fn deterministic_output_and_manifest() {
    let out1 = temp_path("det1.csv");
    let out2 = temp_path("det2.csv");
    for out in [&out1, &out2] {
        let code = run(&argv(&[
            "spectra",
            "--p",
            "1",
            "--n",
            "2",
            "--samples",
            "50",
            "--seed",
            "11",
            "--out",
            out.to_str().unwrap(),
        ]));
        assert_eq!(code, 0);
    }
    let d1 = std::fs::read(&out1).unwrap();
    let d2 = std::fs::read(&out2).unwrap();
    assert_eq!(d1, d2, "same seed and flags must give identical bytes");

    let manifest: serde_json::Value = serde_json::from_slice(
        &std::fs::read(out1.with_extension("csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["subcommand"], "spectra");
    assert_eq!(manifest["seed"], 11);
    assert_eq!(
        manifest["output_digest"],
        format!("{:016x}", fnv1a64(&d1)),
        "manifest digest must match the written bytes"
    );
    for out in [&out1, &out2] {
        let _ = std::fs::remove_file(out);
        let _ = std::fs::remove_file(out.with_extension("csv.manifest.json"));
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let out1 = temp_path("thr1.csv");
    let out4 = temp_path("thr4.csv");
    for (threads, out) in [("1", &out1), ("4", &out4)] {
        let code = run(&argv(&[
            "sample",
            "--p",
            "1",
            "--n",
            "2",
            "--samples",
            "40",
            "--seed",
            "5",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ]));
        assert_eq!(code, 0);
    }
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out4).unwrap());
    for out in [&out1, &out4] {
        let _ = std::fs::remove_file(out);
        let _ = std::fs::remove_file(out.with_extension("csv.manifest.json"));
    }
}

#[test]
fn exit_codes() {
    // Unknown flag: usage error.
    assert_eq!(run(&argv(&["spectra", "--does-not-exist"])), 1);
    // Unknown subcommand: usage error.
    assert_eq!(run(&argv(&["frobnicate"])), 1);
    // Infeasible exhaustive sweep is rejected, not silently sampled.
    assert_eq!(run(&argv(&["algebra", "--p", "9", "--exhaustive"])), 1);
    // Clean verification run.
    assert_eq!(run(&argv(&["algebra", "--p", "4", "--exhaustive"])), 0);
    // A verification failure is exit 2, never masked: an absurd tolerance
    // makes every identity report fail.
    assert_eq!(
        run(&argv(&[
            "identities", "--case", "real", "--n", "2", "--samples", "1", "--tol", "1e-30",
        ])),
        2
    );
    // Help is not an error.
    assert_eq!(run(&argv(&["--help"])), 0);
}

#[test]
fn bott_csv_row_content() {
    let out = temp_path("bott.csv");
    let code = run(&argv(&["bott", "--pmax", "8", "--out", out.to_str().unwrap()]));
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[5], "5,C[4],8,8,2,false,,,");
    assert_eq!(lines[8], "8,R[16],16,16,1,false,,,");
    let _ = std::fs::remove_file(&out);
    let _ = std::fs::remove_file(out.with_extension("csv.manifest.json"));
}

#[test]
fn config_file_defaults_and_flag_override() {
    let cfg = temp_path("defaults.conf");
    std::fs::write(&cfg, "seed=123\nsamples=30\n# comment\n").unwrap();
    let out_cfg = temp_path("cfg.csv");
    let out_flag = temp_path("flag.csv");
    assert_eq!(
        run(&argv(&[
            "spectra",
            "--p",
            "0",
            "--n",
            "2",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_cfg.to_str().unwrap(),
        ])),
        0
    );
    assert_eq!(
        run(&argv(&[
            "spectra", "--p", "0", "--n", "2", "--samples", "30", "--seed", "123", "--out",
            out_flag.to_str().unwrap(),
        ])),
        0
    );
    assert_eq!(
        std::fs::read(&out_cfg).unwrap(),
        std::fs::read(&out_flag).unwrap(),
        "config defaults must act exactly like flags"
    );
    // Explicit flag beats the config value.
    let out_override = temp_path("override.csv");
    assert_eq!(
        run(&argv(&[
            "spectra",
            "--p",
            "0",
            "--n",
            "2",
            "--seed",
            "7",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_override.to_str().unwrap(),
        ])),
        0
    );
    assert_ne!(std::fs::read(&out_cfg).unwrap(), std::fs::read(&out_override).unwrap());
    for f in [&cfg, &out_cfg, &out_flag, &out_override] {
        let _ = std::fs::remove_file(f);
        let _ = std::fs::remove_file(f.with_extension("csv.manifest.json"));
    }
}

#[test]
fn jsonl_simulation_snapshots_parse() {
    let out = temp_path("sim.jsonl");
    let code = run(&argv(&[
        "simulate",
        "--process",
        "coeff",
        "--case",
        "diagonal",
        "--roots",
        "-1,1",
        "--dt",
        "0.01",
        "--steps",
        "4",
        "--stride",
        "2",
        "--paths",
        "2",
        "--seed",
        "3",
        "--format",
        "jsonl",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut count = 0;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["values"].as_array().unwrap().len() == 2);
        count += 1;
    }
    assert_eq!(count, 2 * 3); // two paths × (t = 0, 0.02, 0.04)
    let _ = std::fs::remove_file(&out);
    let _ = std::fs::remove_file(out.with_extension("jsonl.manifest.json"));
}
