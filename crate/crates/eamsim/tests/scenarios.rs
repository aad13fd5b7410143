//! End-to-end runs of the eamsim binary: argument handling, exit codes,
//! file layout, and byte-level determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn eamsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eamsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn selection_table_run_succeeds_and_repeats_identically() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "sel.conf",
        "scenario = selection-table\narm_count = 5\nqc_element = 0.3\n",
    );
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");

    for out in [&out_a, &out_b] {
        let run = eamsim(&["selection-table", "--config", &config, "--out", &out.to_string_lossy()]);
        assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    }
    for name in ["selection_table.csv", "selection_summary.txt"] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    let summary = fs::read_to_string(out_a.join("selection_summary.txt")).unwrap();
    assert!(summary.contains("allowed_count = 5"), "{summary}");
    assert!(summary.contains("angular_momentum_conservation = conserved"));

    let table = fs::read_to_string(out_a.join("selection_table.csv")).unwrap();
    assert_eq!(table.lines().next().unwrap(), "q1,q2,re,im,magnitude,allowed");
    assert_eq!(table.lines().count(), 26);
}

#[test]
fn triad_run_emits_series_and_honors_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "triad.conf",
        "# resonant run, short window\nscenario = triad\nt_max = 60.0\nsamples = 121\n",
    );
    let out = dir.path().join("out");
    let run = eamsim(&[
        "triad",
        "--config",
        &config,
        "--out",
        &out.to_string_lossy(),
        "--override",
        "detuning=1.05",
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("triad_timeseries.csv"));

    let summary = fs::read_to_string(out.join("triad_summary.txt")).unwrap();
    assert!(summary.contains("detuning = 1.05"), "{summary}");
    assert!(summary.contains("omega_qc = "));

    let series = fs::read_to_string(out.join("triad_timeseries.csv")).unwrap();
    let mut lines = series.lines();
    assert_eq!(
        lines.next().unwrap(),
        "time,donor_two_level,bell_two_level,entropy_two_level,donor_arm,bell_arm,entropy_arm"
    );
    assert_eq!(lines.count(), 121);
}

#[test]
fn decoupled_triad_stays_put() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "frozen.conf",
        "scenario = triad\nqc_element = 0.0\nt_max = 20.0\nsamples = 41\n",
    );
    let out = dir.path().join("out");
    let run = eamsim(&["triad", "--config", &config, "--out", &out.to_string_lossy()]);
    assert_eq!(run.status.code(), Some(0));

    let series = fs::read_to_string(out.join("triad_timeseries.csv")).unwrap();
    for line in series.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cells[1] - 1.0).abs() <= 1e-12, "donor moved: {line}");
        assert!(cells[2].abs() <= 1e-12, "bell populated: {line}");
        assert!((cells[4] - 1.0).abs() <= 1e-12, "arm donor moved: {line}");
    }
    let summary = fs::read_to_string(out.join("triad_summary.txt")).unwrap();
    assert!(summary.contains("fitted_frequency_two_level = none"));
}

#[test]
fn config_problems_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_string_lossy();

    // Missing file.
    let run = eamsim(&["triad", "--config", "/nonexistent/x.conf", "--out", &out]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("x.conf"));

    // Key that the scenario does not use, with its line number.
    let config = write_config(dir.path(), "bad_key.conf", "scenario = triad\neta = 2.0\n");
    let run = eamsim(&["triad", "--config", &config, "--out", &out]);
    assert_eq!(run.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("line 2") && stderr.contains("eta"), "{stderr}");

    // Model invariant violated: even arm count.
    let config = write_config(dir.path(), "even.conf", "scenario = triad\narm_count = 4\n");
    let run = eamsim(&["triad", "--config", &config, "--out", &out]);
    assert_eq!(run.status.code(), Some(2));

    // Malformed override.
    let config = write_config(dir.path(), "ok.conf", "scenario = triad\n");
    let run = eamsim(&["triad", "--config", &config, "--out", &out, "--override", "nonsense"]);
    assert_eq!(run.status.code(), Some(2));

    // Unknown subcommand is a usage error.
    let run = eamsim(&["entropy", "--config", &config]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn every_scenario_kind_runs_from_minimal_configs() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("triad", "scenario = triad\nt_max = 10.0\nsamples = 21\n"),
        (
            "entropy-map",
            "scenario = entropy-map\nt_max = 10.0\nsamples = 21\ngamma_samples = 3\n",
        ),
        (
            "chain",
            "scenario = chain\nhalf_length = 8\nt_max = 4.0\nsamples = 17\n",
        ),
        ("five-arm", "scenario = five-arm\nt_max = 20.0\nsamples = 41\n"),
        ("selection-table", "scenario = selection-table\n"),
    ];
    for (kind, text) in cases {
        let config = write_config(dir.path(), &format!("{kind}.conf"), text);
        let out = dir.path().join(kind);
        let run = eamsim(&[kind, "--config", &config, "--out", &out.to_string_lossy()]);
        assert_eq!(
            run.status.code(),
            Some(0),
            "{kind}: {}",
            String::from_utf8_lossy(&run.stderr)
        );
        let written = fs::read_dir(&out).unwrap().count();
        assert!(written >= 2, "{kind} wrote {written} files");
    }
}

#[test]
fn emitted_populations_stay_within_bounds_and_partition() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "chain.conf",
        "scenario = chain\nhalf_length = 12\nt_max = 6.0\nsamples = 25\n",
    );
    let out = dir.path().join("out");
    let run = eamsim(&["chain", "--config", &config, "--out", &out.to_string_lossy()]);
    assert_eq!(run.status.code(), Some(0));

    let series = fs::read_to_string(out.join("chain_timeseries.csv")).unwrap();
    for line in series.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        // time, donor, 12 pairs, wavefront: populations partition the basis.
        let pops = &cells[1..14];
        assert!(pops.iter().all(|p| (-1e-12..=1.0 + 1e-12).contains(p)));
        let total: f64 = pops.iter().sum();
        assert!((total - 1.0).abs() <= 1e-9, "row sums to {total}");
    }
}
