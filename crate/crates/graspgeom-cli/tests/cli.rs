//! CLI contract tests: exit codes, file outputs, determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graspgeom"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("spawn")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn synth_writes_cloud_and_truth() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "synth", "--shape", "cylinder", "--radius", "0.03", "--height", "0.25", "--pose",
            "standing", "--seed", "42", "--out", "scene.pcd", "--truth", "truth.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("points"), "stdout: {stdout}");
    assert!(dir.path().join("scene.pcd").exists());
    let truth: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("truth.json")).unwrap())
            .unwrap();
    assert_eq!(truth["shape"]["kind"], "cylinder");
    assert_eq!(truth["plane_height"], 0.0);
}

#[test]
fn synth_rejects_negative_radius_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "synth", "--shape", "cylinder", "--radius", "-1", "--height", "0.2", "--out",
            "x.pcd",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn synth_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.pcd", "b.pcd"] {
        let out = run(
            &[
                "synth", "--shape", "box", "--wx", "0.1", "--wy", "0.06", "--wz", "0.04",
                "--pose", "lying-x", "--yaw", "0.4", "--seed", "9", "--out", name,
            ],
            dir.path(),
        );
        assert_eq!(code(&out), 0);
    }
    let a = std::fs::read(dir.path().join("a.pcd")).unwrap();
    let b = std::fs::read(dir.path().join("b.pcd")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn detect_full_chain_produces_plan() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "synth", "--shape", "cylinder", "--radius", "0.03", "--height", "0.25", "--pose",
            "standing", "--offset-x", "0.05", "--seed", "42", "--out", "scene.pcd", "--truth",
            "truth.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let out = run(
        &["detect", "--input", "scene.pcd", "--plan", "plan.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let plan: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("plan.json")).unwrap())
            .unwrap();
    // Tall cylinder: a side grasp whose positions obey X_c + h·u.
    assert_eq!(plan["mode"], "side");
    let g: Vec<f64> = plan["grasp_position"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let p: Vec<f64> = plan["pregrasp_position"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let u: Vec<f64> = plan["offset_axis"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for k in 0..3 {
        let expected = g[k] + (0.15 - 0.06) * u[k];
        assert!((p[k] - expected).abs() < 1e-12);
    }
    assert_eq!(plan["rotation"].as_array().unwrap().len(), 9);

    // Cross-check against the generator's ground truth: a side grasp at
    // centroid height, finger-length standoff from the cylinder axis.
    let truth: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("truth.json")).unwrap())
            .unwrap();
    let c = &truth["true_centroid"];
    let (cx, cy, cz) = (
        c["x"].as_f64().unwrap(),
        c["y"].as_f64().unwrap(),
        c["z"].as_f64().unwrap(),
    );
    assert!((g[2] - cz).abs() < 0.01, "grasp height {} vs centroid {cz}", g[2]);
    let lateral = ((g[0] - cx).powi(2) + (g[1] - cy).powi(2)).sqrt();
    assert!((lateral - 0.06).abs() < 0.015, "lateral standoff {lateral}");
}

#[test]
fn ply_format_round_trips_through_detect() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "synth", "--shape", "tube", "--radius", "0.045", "--inner-radius", "0.03",
            "--height", "0.05", "--pose", "standing", "--seed", "3", "--format", "ply",
            "--out", "scene.ply",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(
        &["detect", "--input", "scene.ply", "--plan", "plan.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("plan.json").exists());
}

#[test]
fn detect_on_table_only_cloud_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // A flat table cloud in camera coordinates (z ≈ 1.72 ahead of the camera).
    let mut text = String::from(
        "VERSION 0.7\nFIELDS x y z\nSIZE 8 8 8\nTYPE F F F\nCOUNT 1 1 1\nWIDTH 400\nHEIGHT 1\nVIEWPOINT 0 0 0 1 0 0 0\nPOINTS 400\nDATA ascii\n",
    );
    for i in 0..20 {
        for j in 0..20 {
            let x = -0.25 + 0.5 * i as f64 / 19.0;
            let y = -0.25 + 0.5 * j as f64 / 19.0;
            text.push_str(&format!("{x} {y} 1.72\n"));
        }
    }
    std::fs::write(dir.path().join("table.pcd"), text).unwrap();
    let out = run(
        &["detect", "--input", "table.pcd", "--plan", "plan.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn detect_oversized_object_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "synth", "--shape", "cylinder", "--radius", "0.06", "--height", "0.08", "--pose",
            "standing", "--seed", "5", "--out", "wide.pcd",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let out = run(
        &["detect", "--input", "wide.pcd", "--plan", "plan.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn detect_missing_input_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["detect", "--input", "nope.pcd", "--plan", "plan.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 4);
}

#[test]
fn unknown_method_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["eval", "--method", "best", "--report", "r.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn config_rejects_unknown_keys_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), r#"{"graper": {}}"#).unwrap();
    let out = run(
        &[
            "synth", "--shape", "sphere", "--radius", "0.04", "--out", "s.pcd", "--config",
            "cfg.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn compare_report_against_itself_gives_unit_pvalues() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["eval", "--method", "baseline", "--seed", "3", "--report", "r.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["compare", "r.json", "r.json"], dir.path());
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let pvalues: Vec<&str> = stdout
        .lines()
        .filter_map(|l| l.split("p = ").nth(1))
        .collect();
    assert_eq!(pvalues.len(), 4, "stdout: {stdout}");
    for p in pvalues {
        assert_eq!(p.trim(), "1");
    }
}

#[test]
fn debug_ply_dump_is_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "synth", "--shape", "box", "--wx", "0.08", "--wy", "0.05", "--wz", "0.04", "--seed",
            "2", "--out", "scene.pcd",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let out = run(
        &[
            "detect", "--input", "scene.pcd", "--plan", "plan.json", "--dump-debug-ply",
            "debug.ply",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("debug.ply")).unwrap();
    assert!(text.starts_with("ply\nformat ascii 1.0\n"));
}
