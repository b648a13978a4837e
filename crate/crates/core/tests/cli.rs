use std::path::Path;
use std::process::{Command, Output};

use irspace::geometry::{Grid, Interpolation, MetricField, Trajectory, TrajectoryKind};
use nalgebra::DMatrix;

fn irspace(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irspace"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn summary(out: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("geodesic/summary.json")).unwrap()).unwrap()
}

#[test]
fn staged_run_then_rerun_is_up_to_date() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = irspace(&out, &["run", "synth"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stages = ["run", "ingest", "sessionize", "prespace", "embed", "fit", "diagnose"];
    let o = irspace(&out, &stages);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).matches(": done").count(), 6);
    assert!(out.join("diagnose/roughness.txt").is_file());

    let o = irspace(&out, &stages);
    assert!(o.status.success());
    assert_eq!(stdout(&o).matches(": up to date").count(), 6, "{}", stdout(&o));

    let o = irspace(&out, &["--force", "fit"]);
    assert_eq!(stdout(&o).trim(), "fit: done");
}

#[test]
fn changing_a_parameter_reruns_only_affected_stages() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    assert!(irspace(&out, &["run", "all"]).status.success());
    let o = irspace(&out, &["--set", "grid.lambda=0.01", "run", "all"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    for s in ["synth", "ingest", "sessionize", "prespace", "embed"] {
        assert!(text.contains(&format!("{s}: up to date")), "{text}");
    }
    for s in ["fit", "geodesic", "diagnose"] {
        assert!(text.contains(&format!("{s}: done")), "{text}");
    }
}

#[test]
fn bad_bm25_b_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = irspace(dir.path(), &["--set", "distance.bm25.b=1.5", "run", "synth"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("Bm25Params.b") && err.contains("[0, 1]"), "{err}");
}

#[test]
fn unknown_config_key_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[grid]\nnodes = 8\n").unwrap();
    let o = irspace(&dir.path().join("o"), &["--config", cfg.to_str().unwrap(), "synth"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nodes"), "{}", stderr(&o));
}

#[test]
fn missing_input_names_its_producer() {
    let dir = tempfile::tempdir().unwrap();
    let o = irspace(dir.path(), &["fit"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("embed"), "{}", stderr(&o));

    let o = irspace(dir.path(), &["ingest", "--input", "/nonexistent/log.tsv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("input.path"), "{}", stderr(&o));
}

#[test]
fn locked_output_directory_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join(".lock"), "").unwrap();
    let o = irspace(dir.path(), &["synth"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("locked"));
}

#[test]
fn probe_on_flat_field_moves_in_a_straight_line() {
    let dir = tempfile::tempdir().unwrap();
    let grid = Grid::uniform(&[-3.0; 3], &[3.0; 3], &[16; 3]).unwrap();
    let field = MetricField::constant(grid, &DMatrix::identity(3, 3), Interpolation::Cubic).unwrap();
    std::fs::create_dir_all(dir.path().join("fit")).unwrap();
    let mut buf = Vec::new();
    field.write_jsonl(&mut buf).unwrap();
    std::fs::write(dir.path().join("fit/metric.jsonl"), buf).unwrap();

    let o = irspace(dir.path(), &["geodesic", "--x0", "0,0,0", "--v0", "1,0,0", "--t-end", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let file = std::fs::File::open(dir.path().join("geodesic/trajectory.csv")).unwrap();
    let tr = Trajectory::read_csv(std::io::BufReader::new(file), TrajectoryKind::Geodesic).unwrap();
    let end = tr.last().unwrap();
    for (got, want) in end.x.iter().zip([1.0, 0.0, 0.0]) {
        assert!((got - want).abs() < 1e-8);
    }
    let s = summary(dir.path());
    assert!((s["energy"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!((s["length"].as_f64().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn probe_from_observed_thread_and_off_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert!(irspace(out, &["run", "synth", "ingest", "sessionize", "prespace", "embed", "fit"])
        .status
        .success());

    let o = irspace(out, &["geodesic"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = summary(out);
    assert!(s["samples"].as_u64().unwrap() >= 2);
    assert!(s["energy"].as_f64().unwrap().is_finite());

    let o = irspace(out, &["geodesic", "--x0", "0,0,1", "--v0", "50,0,0"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert_eq!(summary(out)["stop"], "boundary");
    assert!(out.join("geodesic/trajectory.csv").is_file());
    assert!(!out.join("geodesic/manifest.json").exists());

    let o = irspace(out, &["geodesic", "--x0", "100,0,1", "--v0", "1,0,0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn compare_against_another_environment() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(irspace(&a, &["run", "synth", "ingest", "sessionize", "prespace", "embed"]).status.success());
    let o = irspace(&b, &["--set", "synth.seed=2", "run", "synth", "ingest", "sessionize", "prespace", "embed"]);
    assert!(o.status.success());
    let other = b.join("embed/space.json");
    let o = irspace(&a, &["compare", "--other", other.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = std::fs::read_to_string(a.join("compare/report.txt")).unwrap();
    assert!(report.contains("correspondence_size = "), "{report}");

    let o = irspace(&a, &["compare"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_arguments_exit_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(irspace(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(irspace(dir.path(), &["run", "nope"]).status.code(), Some(1));
    assert_eq!(irspace(dir.path(), &["--help"]).status.code(), Some(0));
}
