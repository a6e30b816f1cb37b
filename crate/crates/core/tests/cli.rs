//! End-to-end checks of the `bibc` binary: CSV shapes, report keys,
//! deterministic campaign output, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bibc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bibc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn detect_sim_emits_consistent_csv() {
    let out = bibc(&[
        "detect-sim",
        "--aps",
        "0,0;10,0",
        "--bd",
        "5,2",
        "--antennas",
        "2",
        "--tau-d",
        "2",
        "--snr-db",
        "5,10",
        "--trials",
        "20000",
        "--seed",
        "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "snr_db,mc_ber,ci_halfwidth,closed_form_pe"
    );
    for line in lines {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields.len(), 4);
        let (ber, half, pe) = (fields[1], fields[2], fields[3]);
        assert!(
            (ber - pe).abs() <= 3.0 * half.max(1e-4),
            "mc {ber} vs closed form {pe} at {} dB",
            fields[0]
        );
    }
}

#[test]
fn detect_sim_rejects_degenerate_device_position() {
    let out = bibc(&[
        "detect-sim",
        "--aps",
        "0,0;10,0",
        "--bd",
        "0,0",
        "--antennas",
        "1",
        "--tau-d",
        "1",
        "--snr-db",
        "5",
        "--trials",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3), "degenerate geometry exits 3");
}

#[test]
fn select_subcommands_write_reports() {
    let common = [
        "--num-aps",
        "12",
        "--coverage-side",
        "30",
        "--deploy-seed",
        "5",
        "--region-center",
        "9,9",
        "--region-side",
        "5",
    ];
    let mut args = vec!["select-ce"];
    args.extend_from_slice(&common);
    let out = bibc(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("selected_ce = "));
    assert!(text.contains("worst_point = "));
    assert!(text.contains("candidates:"));
    assert_eq!(text.matches("m_t = ").count(), 12, "one line per candidate");

    let mut args = vec!["select-pair"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&["--kappa", "3"]);
    let out = bibc(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("selected_reader = "));
    assert!(text.contains("candidate_set = "));
    assert!(text.contains("benchmark_pair = "));
}

#[test]
fn deployment_files_round_trip_through_the_cli() {
    let dir = std::env::temp_dir().join("bibc_cli_dep");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("deployment.txt");
    std::fs::write(
        &path,
        "antennas_per_ap = 4\ncoverage = 15 15 30 30\nap = 2 3\nap = 11 4\nap = 8 12\n",
    )
    .unwrap();
    let out = bibc(&[
        "select-pair",
        "--deployment",
        path.to_str().unwrap(),
        "--region-center",
        "8,8",
        "--region-side",
        "4",
        "--kappa",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // A malformed file is an exit-2 configuration error.
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "who knows\n").unwrap();
    let out = bibc(&[
        "select-pair",
        "--deployment",
        bad.to_str().unwrap(),
        "--region-center",
        "8,8",
        "--region-side",
        "4",
        "--kappa",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

fn write_campaign_config(path: &Path, seed: u64) {
    std::fs::write(
        path,
        format!(
            "k = 4\nkappa = 2\ncoverage_side = 30\nregion_side = 5\nantennas_per_ap = 8\n\
             gamma0 = 0\ngamma1 = 1\nsnr_min_db = 20\nsnr_max_db = 90\nsnr_step_db = 0.5\n\
             n_deployments = 16\nseed = {seed}\n"
        ),
    )
    .unwrap();
}

#[test]
fn campaign_outputs_are_reproducible_across_worker_counts() {
    let dir = std::env::temp_dir().join("bibc_cli_campaign");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.txt");
    write_campaign_config(&cfg, 11);

    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for (out_dir, workers) in [(&out_a, "1"), (&out_b, "8")] {
        let out = bibc(&[
            "campaign",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--workers",
            workers,
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["pe_curve_k4_kappa2.csv", "summary.txt"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between worker counts");
    }
    let csv = std::fs::read_to_string(out_a.join("pe_curve_k4_kappa2.csv")).unwrap();
    assert!(csv.starts_with("snr_db,pe_optimal,pe_benchmark\n"));
}

#[test]
fn campaign_exit_codes_reflect_the_failure_kind() {
    let dir = std::env::temp_dir().join("bibc_cli_campaign_err");
    std::fs::create_dir_all(&dir).unwrap();

    // Region larger than the coverage: infeasible geometry, exit 3.
    let cfg = dir.join("infeasible.txt");
    std::fs::write(
        &cfg,
        "k = 4\nkappa = 2\ncoverage_side = 10\nregion_side = 20\nn_deployments = 1\nseed = 1\n",
    )
    .unwrap();
    let out = bibc(&[
        "campaign",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));

    // Unknown key: invalid config, exit 2.
    let cfg = dir.join("invalid.txt");
    std::fs::write(&cfg, "nope = 1\n").unwrap();
    let out = bibc(&[
        "campaign",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("y").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn heatmap_and_pe_curve_emit_csv() {
    let out = bibc(&[
        "heatmap",
        "--aps",
        "2,3;14,5;9,16",
        "--antennas",
        "2",
        "--region-center",
        "8,8",
        "--region-side",
        "4",
        "--ce",
        "0",
        "--resolution",
        "0.5",
        "--snr-db",
        "40",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("x,y,objective,pe,is_worst\n"));
    assert_eq!(text.lines().count(), 1 + 8 * 8);
    assert_eq!(
        text.lines().filter(|l| l.ends_with(",1")).count(),
        1,
        "exactly one worst cell"
    );

    let out = bibc(&[
        "pe-curve",
        "--num-aps",
        "10",
        "--coverage-side",
        "30",
        "--deploy-seed",
        "7",
        "--region-center",
        "9,9",
        "--region-side",
        "5",
        "--kappa",
        "2",
        "--snr-min-db",
        "20",
        "--snr-max-db",
        "60",
        "--snr-step-db",
        "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("snr_db,pe_optimal,pe_benchmark\n"));
    for line in text.lines().skip(1) {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert!(fields[1] <= fields[2] + 1e-15, "optimal dominates pointwise");
    }
}
