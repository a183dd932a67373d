//! End-to-end runs of the command-line binary on tiny inputs.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_embalg"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawning the binary");
    assert!(
        out.status.success(),
        "command {:?} failed\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf8 path")
}

#[test]
fn gen_data_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.bin");
    let b = dir.path().join("b.bin");
    for out in [&a, &b] {
        run_ok(&["gen-data", "--n", "12", "--res", "8", "--seed", "7", "--out", path_str(out)]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn config_file_sets_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "n = 12\nres = 8\nseed = 7\n").unwrap();

    let from_cfg = dir.path().join("cfg.bin");
    run_ok(&["gen-data", "--config", path_str(&cfg), "--out", path_str(&from_cfg)]);
    let from_flags = dir.path().join("flags.bin");
    run_ok(&["gen-data", "--n", "12", "--res", "8", "--seed", "7", "--out", path_str(&from_flags)]);
    assert_eq!(std::fs::read(&from_cfg).unwrap(), std::fs::read(&from_flags).unwrap());

    // An explicit flag beats the config entry; more records, bigger file.
    let overridden = dir.path().join("big.bin");
    run_ok(&["gen-data", "--config", path_str(&cfg), "--n", "16", "--out", path_str(&overridden)]);
    assert!(
        std::fs::read(&overridden).unwrap().len() > std::fs::read(&from_cfg).unwrap().len()
    );
}

#[test]
fn check_laws_writes_the_full_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("laws.csv");
    run_ok(&["check-laws", "--dim", "16", "--samples", "16", "--seed", "3", "--out", path_str(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 29, "header plus 28 pairs");
    assert!(lines[0].starts_with("pair,count,commutativity"));
    assert!(lines.iter().any(|l| l.starts_with("\"(max, min)\",8,")));
}

#[test]
fn rejects_unknown_inputs() {
    let out = bin().arg("no-such-command").output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));

    let out = bin().args(["gen-data", "--bogus-flag", "1", "--out", "x.bin"]).output().unwrap();
    assert!(!out.status.success());

    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.bin");
    run_ok(&["gen-data", "--n", "12", "--res", "8", "--out", path_str(&data)]);
    let out = bin()
        .args([
            "train-transport",
            "--data",
            path_str(&data),
            "--embed",
            "missing.bin",
            "--meet",
            "frobnicate",
            "--join",
            "min",
            "--out",
            "m.bin",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown operation"));
}

// One pass through the whole toolchain at miniature scale: data, autoencoder,
// coupling, baseline, both experiments, merged report.
#[test]
fn pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.bin");
    let embed = dir.path().join("embed.bin");
    let latents = dir.path().join("latents.bin");
    let riesz = dir.path().join("riesz.bin");
    let baseline = dir.path().join("baseline.bin");
    let perf = dir.path().join("perf.csv");
    let perf_bl = dir.path().join("perf_bl.csv");
    let cons = dir.path().join("cons.csv");
    let summary = dir.path().join("summary.txt");
    let plot_dir = dir.path().join("plots");

    run_ok(&["gen-data", "--n", "12", "--res", "8", "--seed", "5", "--out", path_str(&data)]);

    run_ok(&[
        "train-embed",
        "--data", path_str(&data),
        "--out", path_str(&embed),
        "--latents-out", path_str(&latents),
        "--latent-dim", "8",
        "--epochs", "1",
        "--batch", "4",
        "--points", "8",
        "--seed", "5",
    ]);

    let tiny_train = [
        "--epochs", "1",
        "--batch-terms", "2",
        "--points-per-term", "8",
        "--ell-max", "2",
        "--val-instances", "2",
        "--seed", "5",
    ];
    let mut args = vec![
        "train-transport",
        "--data", path_str(&data),
        "--embed", path_str(&embed),
        "--latents", path_str(&latents),
        "--meet", "max",
        "--join", "min",
        "--out", path_str(&riesz),
    ];
    args.extend_from_slice(&tiny_train);
    run_ok(&args);

    let mut args = vec![
        "train-baseline",
        "--data", path_str(&data),
        "--embed", path_str(&embed),
        "--kind", "symmetric",
        "--out", path_str(&baseline),
    ];
    args.extend_from_slice(&tiny_train);
    run_ok(&args);

    let tiny_eval = ["--num-points", "64", "--num-terms", "2", "--ell-max", "2", "--seed", "5"];
    let mut args = vec![
        "eval-iou",
        "--data", path_str(&data),
        "--embed", path_str(&embed),
        "--model", path_str(&riesz),
        "--out", path_str(&perf),
    ];
    args.extend_from_slice(&tiny_eval);
    let out = run_ok(&args);
    assert!(String::from_utf8_lossy(&out.stdout).contains("iou_mean"));

    let mut args = vec![
        "eval-consistency",
        "--data", path_str(&data),
        "--embed", path_str(&embed),
        "--model", path_str(&riesz),
        "--out", path_str(&cons),
        "--j-max", "2",
    ];
    args.extend_from_slice(&tiny_eval);
    run_ok(&args);

    // The coupling realizes its pair's laws exactly, so every rewrite keeps
    // the prediction and every per-term IoU is exactly 1.
    let cons_text = std::fs::read_to_string(&cons).unwrap();
    let mut per_term = 0;
    for line in cons_text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 8);
        if fields[4] == "iou" {
            per_term += 1;
            assert_eq!(fields[5], "1.0", "rewrite moved a prediction: {line}");
        }
    }
    assert!(per_term > 0, "no per-term rows in:\n{cons_text}");

    // Baseline evaluation exercises the second model loader arm.
    let mut args = vec![
        "eval-iou",
        "--data", path_str(&data),
        "--embed", path_str(&embed),
        "--model", path_str(&baseline),
        "--out", path_str(&perf_bl),
    ];
    args.extend_from_slice(&tiny_eval);
    run_ok(&args);

    let out = run_ok(&[
        "report",
        "--input", path_str(&perf),
        "--input", path_str(&perf_bl),
        "--input", path_str(&cons),
        "--out", path_str(&summary),
        "--plot-data", path_str(&plot_dir),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("pair_max_min"));
    assert!(stdout.contains("baseline_symmetric"));
    assert!(stdout.contains("consistency"));
    assert_eq!(std::fs::read_to_string(&summary).unwrap(), stdout);
    assert!(plot_dir.join("performance_iou_mean.csv").exists());
    assert!(plot_dir.join("consistency_iou_median.csv").exists());
}
