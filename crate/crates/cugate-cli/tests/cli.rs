//! End-to-end checks of the command-line interface: subcommand output,
//! determinism and the exit-status taxonomy (0 pass, 1 verification
//! failure, 2 usage/config error).

use std::path::PathBuf;
use std::process::{Command, Output};

fn cugate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cugate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn verify_controlled_not_passes() {
    let out = cugate(&[
        "verify", "--n", "2", "--alpha", "0.5", "--gamma", "1", "--delta", "1",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("steps: 15"), "{text}");
    assert!(text.contains("status: pass"), "{text}");
    assert!(text.contains("per_state_max_error"), "{text}");
}

#[test]
fn verify_with_impossible_tolerance_exits_one() {
    let out = cugate(&["verify", "--n", "2", "--gamma", "1", "--tolerance", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("status: fail"));
}

#[test]
fn verify_rejects_malformed_config_with_exit_two() {
    let dir = std::env::temp_dir();
    let path = dir.join("cugate_bad_config.toml");
    std::fs::write(&path, "this is [ not toml").unwrap();
    let out = cugate(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(&path, "unknown_key = 5\n").unwrap();
    let out = cugate(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_rejects_unknown_flag_with_exit_two() {
    let out = cugate(&["verify", "--frequency", "12"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_output_is_deterministic() {
    let args = [
        "verify", "--n", "3", "--alpha", "0.25", "--beta", "-1", "--gamma", "2.5", "--delta",
        "0.75",
    ];
    let first = stdout(&cugate(&args));
    let second = stdout(&cugate(&args));
    assert_eq!(first, second);
    assert!(first.contains("steps: 17"));
}

#[test]
fn verify_atom_mode_with_scaled_swap_coupling() {
    let dir = std::env::temp_dir();
    let path = dir.join("cugate_atom_config.toml");
    std::fs::write(
        &path,
        "mode = \"atom\"\n[couplings]\ng_rad_s = 5.8e9\ntarget_swap_scale = 1.3\n",
    )
    .unwrap();
    let out = cugate(&[
        "verify",
        "--config",
        path.to_str().unwrap(),
        "--n",
        "2",
        "--gamma",
        "1",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("mode: atom"));
}

#[test]
fn verify_trace_flag_prints_snapshots_for_three_qubits() {
    let out = cugate(&["verify", "--n", "3", "--gamma", "1", "--trace"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("trace:"), "{text}");
    assert!(text.contains("initial |110>|0>c"), "{text}");

    let out = cugate(&["verify", "--n", "2", "--trace"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn trace_subcommand_shows_photon_relay() {
    let out = cugate(&["trace", "--alpha", "0.5", "--gamma", "1", "--delta", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    // the photon-carrying branch picks up -i after the first relay step
    assert!(text.contains("U_1c: -i|010>|1>c"), "{text}");
    // idle branches never move
    assert!(text.contains("U_1+: +|000>|0>c"), "{text}");
}

#[test]
fn timing_reports_reference_device_numbers() {
    let out = cugate(&[
        "timing", "--n", "5", "--alpha", "1", "--beta", "2", "--gamma", "4", "--delta", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("coupling_rad_s"), "{text}");
    assert!(text.contains("budget_ns"), "{text}");
    assert!(text.contains("m_ss_over_m_sc"), "{text}");
    assert!(text.contains("negligible: true"), "{text}");

    // total budget: between 80 and 95 ns for the maximal-angle case at the
    // first-principles coupling rate
    let total_line = text
        .lines()
        .find(|l| l.trim_start().starts_with("total:"))
        .expect("total line");
    let value: f64 = total_line
        .split(':')
        .nth(1)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(value > 80.0 && value < 95.0, "total = {value} ns");
}

#[test]
fn timing_with_pinned_coupling_reproduces_reference_budget() {
    // With the coupling pinned to the quoted 5.8e9 rad/s, the
    // maximal-angle five-qubit budget lands within 5% of 81.1 ns.
    let path = std::env::temp_dir().join("cugate_pinned_coupling.toml");
    std::fs::write(&path, "[couplings]\ng_rad_s = 5.8e9\n").unwrap();
    let out = cugate(&[
        "timing",
        "--config",
        path.to_str().unwrap(),
        "--n",
        "5",
        "--alpha",
        "1",
        "--beta",
        "2",
        "--gamma",
        "4",
        "--delta",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("coupling_rad_s: 5.8e9"), "{text}");
    let total_line = text
        .lines()
        .find(|l| l.trim_start().starts_with("total:"))
        .expect("total line");
    let value: f64 = total_line
        .split(':')
        .nth(1)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((value - 81.1).abs() <= 0.05 * 81.1, "total = {value} ns");
}

#[test]
fn timing_with_explicit_device_file() {
    let fixture: PathBuf = [
        env!("CARGO_MANIFEST_DIR"),
        "..",
        "cugate",
        "data",
        "table1.toml",
    ]
    .iter()
    .collect();
    let out = cugate(&["timing", "--device", fixture.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let missing = std::env::temp_dir().join("cugate_missing_fields.toml");
    std::fs::write(&missing, "[squid]\nnu_20_ghz = 11.4\n").unwrap();
    let out = cugate(&["timing", "--device", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("missing required fields"), "{err}");
    assert!(err.contains("cavity.quality_factor"), "{err}");
}

#[test]
fn verify_derives_coupling_from_device_file() {
    let fixture: PathBuf = [
        env!("CARGO_MANIFEST_DIR"),
        "..",
        "cugate",
        "data",
        "table1.toml",
    ]
    .iter()
    .collect();
    let out = cugate(&[
        "verify",
        "--device",
        fixture.to_str().unwrap(),
        "--n",
        "2",
        "--gamma",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    // first-principles antinode rate from the bundled parameters
    let line = text
        .lines()
        .find(|l| l.trim_start().starts_with("coupling_rad_s:"))
        .expect("coupling line");
    let g: f64 = line.split(':').nth(1).unwrap().trim().parse().unwrap();
    assert!((g - 5.5e9).abs() < 0.1e9, "g = {g:e}");
    assert!(text.contains("status: pass"));
}

#[test]
fn counts_table_flags_the_crossover() {
    let out = cugate(&["counts", "3", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("n,this_work,barenco,bergholm\n"), "{text}");
    assert!(text.contains("5,21,29,32"), "{text}");
    assert!(
        text.contains("# crossover: this protocol wins from n = 5"),
        "{text}"
    );
    assert_eq!(text.lines().count(), 6);

    let single = stdout(&cugate(&["counts", "5", "5"]));
    assert!(single.contains("5,21,29,32"));

    let out = cugate(&["counts", "2", "6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_gamma_keeps_unit_fidelity() {
    let out = cugate(&[
        "sweep", "--param", "gamma", "--from", "0", "--to", "4", "--points", "8", "--n", "2",
        "--alpha", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 9); // header + 8 points
    for row in &rows[1..] {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], "gamma");
        let fidelity: f64 = fields[3].parse().unwrap();
        assert!((fidelity - 1.0).abs() < 1e-9, "{row}");
        let duration: f64 = fields[8].parse().unwrap();
        assert!(duration >= 0.0);
    }
    // duration grows with the rotation angle
    let first: f64 = rows[1].split(',').nth(8).unwrap().parse().unwrap();
    let last: f64 = rows[8].split(',').nth(8).unwrap().parse().unwrap();
    assert!(last > first);
}

#[test]
fn sweep_fock_cutoff_leaves_the_gate_unchanged() {
    let out = cugate(&[
        "sweep",
        "--param",
        "fock-cutoff",
        "--from",
        "1",
        "--to",
        "3",
        "--points",
        "3",
        "--n",
        "2",
        "--gamma",
        "1.5",
        "--delta",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4);
    let errors: Vec<f64> = rows[1..]
        .iter()
        .map(|r| r.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    for err in &errors {
        assert!(*err < 1e-9);
    }
}

#[test]
fn sweep_with_zero_points_emits_header_only() {
    let out = cugate(&["sweep", "--param", "alpha", "--from", "0", "--to", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("param,value,steps,"));
}

#[test]
fn sweep_rejects_unknown_parameter() {
    let out = cugate(&[
        "sweep", "--param", "bogus", "--from", "0", "--to", "1", "--points", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_report_to_file() {
    let path = std::env::temp_dir().join("cugate_report.txt");
    let _ = std::fs::remove_file(&path);
    let out = cugate(&[
        "verify",
        "--n",
        "2",
        "--gamma",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.contains("status: pass"));
}

#[test]
fn config_file_drives_a_full_run_and_schedule_dump() {
    let dir = std::env::temp_dir();
    let config_path = dir.join("cugate_full_run.toml");
    let schedule_path = dir.join("cugate_schedule_dump.txt");
    let _ = std::fs::remove_file(&schedule_path);
    std::fs::write(
        &config_path,
        format!(
            "n = 2\nfock_cutoff = 2\n[gate]\nalpha = 0.5\ngamma = 1.0\ndelta = 1.0\n\
             [timing]\ntau_a_ns = 0.5\ntau_uw_ns = 0.5\n\
             [output]\nschedule = \"{}\"\n",
            schedule_path.display()
        ),
    )
    .unwrap();
    let out = cugate(&["verify", "--config", config_path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let text = std::fs::read_to_string(&schedule_path).unwrap();
    assert!(text.starts_with("cugate-schedule v1\n"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("step ")).count(), 15);
    // round-trips through the parser byte-exactly
    let parsed = cugate::schedule::Schedule::parse(&text).unwrap();
    assert_eq!(parsed.to_text(), text);
}
