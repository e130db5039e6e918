use std::path::Path;
use std::process::{Command, Output};

fn starkskin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starkskin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = r#"{
  "gamma_values": [-0.5],
  "delta_values": [0.15, 1.0],
  "sizes": [8, 16],
  "schedule": {"steps": 60, "sample_stride": 20},
  "analyses": {"mutual_info": true, "cft_fit": true, "density_movie": true},
  "save_trajectories": true
}"#;

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&starkskin(&["--help"])), 0);
    assert_eq!(code(&starkskin(&["frobnicate"])), 2);
    assert_eq!(code(&starkskin(&["simulate", "--preset", "huge"])), 2);
}

#[test]
fn invalid_configurations_exit_with_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let odd = write_config(tmp.path(), "odd.json", r#"{"sizes": [9]}"#);
    let unknown = write_config(tmp.path(), "unknown.json", r#"{"sizez": [8]}"#);
    let gamma = write_config(tmp.path(), "gamma.json", r#"{"gamma_values": [1.5]}"#);
    for cfg in [&odd, &unknown, &gamma] {
        let out = starkskin(&["simulate", "--config", cfg]);
        assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn missing_inputs_exit_with_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.csv");
    let missing = missing.to_str().unwrap();
    assert_eq!(code(&starkskin(&["verify", missing])), 3);
    let out = tmp.path().to_str().unwrap();
    assert_eq!(code(&starkskin(&["export", "--kind", "s_vs_delta", "--input", missing, "--output", out])), 3);
    assert_eq!(code(&starkskin(&["collapse", "--input", missing, "--output", out])), 3);
    let cfg = tmp.path().join("absent.json");
    assert_eq!(code(&starkskin(&["simulate", "--config", cfg.to_str().unwrap()])), 3);
}

#[test]
fn simulate_then_verify_and_export() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.json", SMALL);
    let out_dir = tmp.path().join("run");
    let out_s = out_dir.to_str().unwrap();
    let run = starkskin(&["simulate", "--config", &cfg, "--output", out_s]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));

    let sweep = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert_eq!(
        sweep.lines().next().unwrap(),
        "gamma,delta,L,boundary,s_half_steady,s_half_raw_final,converged,wall_time_s"
    );
    assert_eq!(sweep.lines().count(), 5);

    assert_eq!(code(&starkskin(&["verify", out_s])), 0);
    let traj = std::fs::read_dir(out_dir.join("trajectories")).unwrap().next().unwrap().unwrap().path();
    let v = starkskin(&["verify", traj.to_str().unwrap()]);
    assert_eq!(code(&v), 0);
    assert!(String::from_utf8_lossy(&v.stdout).contains("PASS"));

    let fig = tmp.path().join("fig");
    let fig_s = fig.to_str().unwrap();
    let sweep_csv = out_dir.join("sweep.csv");
    let e = starkskin(&["export", "--kind", "s_vs_delta", "--input", sweep_csv.to_str().unwrap(), "--output", fig_s]);
    assert_eq!(code(&e), 0, "{}", String::from_utf8_lossy(&e.stderr));
    let table = std::fs::read_to_string(fig.join("s_vs_delta.csv")).unwrap();
    assert_eq!(table.lines().next().unwrap(), "delta,L,s_half");

    let density = std::fs::read_dir(out_dir.join("density")).unwrap().next().unwrap().unwrap().path();
    let e = starkskin(&["export", "--kind", "density_heatmap", "--input", density.to_str().unwrap(), "--output", fig_s]);
    assert_eq!(code(&e), 0, "{}", String::from_utf8_lossy(&e.stderr));

    // Tampering is caught by the manifest check.
    std::fs::write(&sweep_csv, "tampered\n").unwrap();
    assert_eq!(code(&starkskin(&["verify", out_s])), 1);
}

#[test]
fn worker_count_does_not_change_output_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.json", SMALL);
    let mut files = Vec::new();
    for (tag, workers) in [("one", "1"), ("three", "3")] {
        let dir = tmp.path().join(tag);
        let run = starkskin(&["simulate", "--config", &cfg, "--output", dir.to_str().unwrap(), "--workers", workers]);
        assert_eq!(code(&run), 0);
        files.push((
            std::fs::read(dir.join("sweep.csv")).unwrap(),
            std::fs::read(dir.join("mutual_info.csv")).unwrap(),
            std::fs::read(dir.join("manifest.json")).unwrap(),
        ));
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn failing_grid_point_gives_partial_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    // Forcing the eigenbasis propagator on the long tilt-free open chain is
    // numerically defective; the short chain still succeeds.
    let cfg = write_config(
        tmp.path(),
        "partial.json",
        r#"{
  "gamma_values": [-0.5],
  "delta_values": [0.0],
  "sizes": [8, 64],
  "schedule": {"steps": 20, "propagator": "biorthogonal"}
}"#,
    );
    let dir = tmp.path().join("run");
    let run = starkskin(&["simulate", "--config", &cfg, "--output", dir.to_str().unwrap()]);
    assert_eq!(code(&run), 1, "{}", String::from_utf8_lossy(&run.stdout));
    let sweep = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 3);
    assert!(sweep.contains("NaN"));
    let errors = std::fs::read_to_string(dir.join("sweep_errors.csv")).unwrap();
    assert!(errors.lines().count() == 2, "{errors}");
}
