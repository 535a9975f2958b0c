//! Command-line behavior: exit codes, frame ordering rules, and the
//! synth/track/eval pipeline.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn trackfuse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trackfuse")).args(args).output().unwrap()
}

fn run_in(args: Vec<String>) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trackfuse")).args(args).output().unwrap()
}

fn path_str(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(trackfuse(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(trackfuse(&["track"]).status.code(), Some(1));
    let out = trackfuse(&["synth", "--scenario", "bogus", "--out", "/tmp/ignored"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown scenario"));
}

#[test]
fn help_exits_zero() {
    assert_eq!(trackfuse(&["--help"]).status.code(), Some(0));
}

#[test]
fn synth_is_deterministic_per_seed() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let st = run_in(vec![
            "synth".into(),
            "--scenario".into(),
            "constant".into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            path_str(out),
        ]);
        assert!(st.status.success());
    }
    for name in ["frame_0000.ppm", "frame_0042.ppm", "frame_0099.ppm", "truth.csv"] {
        let fa = std::fs::read(a.join(name)).unwrap();
        let fb = std::fs::read(b.join(name)).unwrap();
        assert_eq!(fa, fb, "{name} differs between identical synth runs");
    }
}

#[test]
fn track_on_constant_scene_with_velocity_mean_stays_under_two_pixels() {
    let dir = tempdir().unwrap();
    let scene = dir.path().join("scene");
    assert!(run_in(vec![
        "synth".into(),
        "--scenario".into(),
        "constant".into(),
        "--out".into(),
        path_str(&scene),
    ])
    .status
    .success());

    let config = dir.path().join("cfg");
    std::fs::write(&config, "advect=true\nrng_seed=1\n").unwrap();
    let track_csv = dir.path().join("track.csv");
    assert!(run_in(vec![
        "track".into(),
        "--frames".into(),
        path_str(&scene),
        "--init".into(),
        "60,120,40,30".into(),
        "--config".into(),
        path_str(&config),
        "--out".into(),
        path_str(&track_csv),
    ])
    .status
    .success());

    let err_csv = dir.path().join("err.csv");
    let eval = run_in(vec![
        "eval".into(),
        "--pred".into(),
        path_str(&track_csv),
        "--truth".into(),
        path_str(&scene.join("truth.csv")),
        "--out".into(),
        path_str(&err_csv),
    ]);
    assert!(eval.status.success());
    let stdout = String::from_utf8_lossy(&eval.stdout);
    let mean: f64 = stdout
        .trim()
        .strip_prefix("mean_center_error=")
        .expect("eval prints the mean")
        .parse()
        .unwrap();
    assert!(mean < 2.0, "mean center error {mean}");

    let err_text = std::fs::read_to_string(&err_csv).unwrap();
    assert!(err_text.starts_with("frame,center_error\n"));
    assert!(err_text.trim_end().lines().last().unwrap().starts_with("mean,"));
}

#[test]
fn eval_with_mismatched_lengths_exits_two() {
    let dir = tempdir().unwrap();
    let pred = dir.path().join("pred.csv");
    let truth = dir.path().join("truth.csv");
    std::fs::write(
        &pred,
        "frame,x,y,vx,vy,hx,hy,pi_color,pi_texture,template_updated_color,template_updated_texture,ess\n\
         0,1.0,2.0,0.0,0.0,40.0,30.0,0.5,0.5,0,0,200.0\n",
    )
    .unwrap();
    std::fs::write(&truth, "frame,cx,cy,w,h\n0,1.0,2.0,40.0,30.0\n1,3.0,2.0,40.0,30.0\n").unwrap();
    let out = run_in(vec![
        "eval".into(),
        "--pred".into(),
        path_str(&pred),
        "--truth".into(),
        path_str(&truth),
        "--out".into(),
        path_str(&dir.path().join("e.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn frame_gaps_are_a_data_error() {
    let dir = tempdir().unwrap();
    let scene = dir.path().join("scene");
    assert!(run_in(vec![
        "synth".into(),
        "--scenario".into(),
        "constant".into(),
        "--out".into(),
        path_str(&scene),
    ])
    .status
    .success());
    std::fs::remove_file(scene.join("frame_0050.ppm")).unwrap();
    let out = run_in(vec![
        "track".into(),
        "--frames".into(),
        path_str(&scene),
        "--init".into(),
        "60,120,40,30".into(),
        "--out".into(),
        path_str(&dir.path().join("t.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gap"));
}

#[test]
fn malformed_init_is_a_usage_error() {
    let out = trackfuse(&["track", "--frames", "/tmp", "--init", "60,120", "--out", "/tmp/o.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_writes_one_column_per_mode() {
    let dir = tempdir().unwrap();
    let out_csv = dir.path().join("bench.csv");
    let st = run_in(vec![
        "bench".into(),
        "--scenario".into(),
        "constant".into(),
        "--runs".into(),
        "2".into(),
        "--modes".into(),
        "bma,texture-only".into(),
        "--out".into(),
        path_str(&out_csv),
    ]);
    assert!(st.status.success(), "{st:?}");
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("frame,bma,texture-only"));
    assert_eq!(lines.count(), 100);
    let stdout = String::from_utf8_lossy(&st.stdout);
    assert!(stdout.contains("bma: mean error"));

    let bad = run_in(vec![
        "bench".into(),
        "--scenario".into(),
        "constant".into(),
        "--runs".into(),
        "1".into(),
        "--modes".into(),
        "bma,warp".into(),
        "--out".into(),
        path_str(&out_csv),
    ]);
    assert_eq!(bad.status.code(), Some(1));
}
