use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sltk::config::KEYS;
use sltk::pnm::write_pgm;
use sltk_core::scene::ring_edges;

fn sltk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sltk"))
        .args(args)
        .output()
        .expect("run sltk")
}

fn sample_scene() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes/disk.scene")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn track_scene_prints_jsonl() {
    let scene = sample_scene();
    let out = sltk(&[
        "track",
        "--scene",
        scene.to_str().unwrap(),
        "--format",
        "jsonl",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let lines: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 160);
    assert_eq!(lines[0]["modes"][0], "INITIALIZING");
    assert!(lines.iter().any(|l| l["z"].is_number()));
    for (i, l) in lines.iter().enumerate() {
        assert_eq!(l["frame"], i);
        assert_eq!(l.as_object().unwrap().len(), 12);
    }
}

#[test]
fn csv_header_is_opt_in() {
    let scene = sample_scene();
    let scene = scene.to_str().unwrap();
    let plain = stdout(&sltk(&["track", "--scene", scene, "--format", "csv"]));
    assert_eq!(plain.lines().count(), 160);
    let headed = stdout(&sltk(&[
        "track", "--scene", scene, "--format", "csv", "--header",
    ]));
    assert_eq!(headed.lines().count(), 161);
    assert!(headed
        .starts_with("frame,t_ms,modes,movement,compensation,centroid,area,inner,iters,x,y,z\n"));
}

#[test]
fn estimate_prints_one_object() {
    let dir = tempfile::tempdir().unwrap();
    let pgm = dir.path().join("e.pgm");
    let edges = ring_edges(160, 120, (80.0, 60.0), 30.0, 2.0);
    write_pgm(&pgm, 160, 120, edges.magnitudes()).unwrap();
    let out = sltk(&[
        "estimate",
        "--edges",
        pgm.to_str().unwrap(),
        "--inner",
        "80,60",
        "--algo",
        "nyray-raster",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["algo"], "nyray-raster");
    let c: Vec<i64> = v["centroid"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_i64().unwrap())
        .collect();
    assert!((c[0] - 80).abs() <= 1 && (c[1] - 60).abs() <= 1, "{c:?}");
    let area = v["area"].as_f64().unwrap();
    assert!((2800.0..4000.0).contains(&area), "{area}");
}

#[test]
fn estimate_rejects_unknown_algorithm() {
    let out = sltk(&[
        "estimate", "--edges", "x.pgm", "--inner", "1,1", "--algo", "fast",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nyray-raster"));
}

#[test]
fn missing_raw_file_is_named() {
    let out = sltk(&["track", "--raw", "missing.sltk"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.sltk"));
}

#[test]
fn conflicting_sources_are_rejected() {
    let scene = sample_scene();
    let out = sltk(&[
        "track",
        "--scene",
        scene.to_str().unwrap(),
        "--raw",
        "a.sltk",
    ]);
    assert!(!out.status.success());
}

#[test]
fn unknown_flag_and_bad_config_fail() {
    assert!(!sltk(&["track", "--frobnicate"]).status.success());
    let out = sltk(&["track", "--print-config", "--config", "no/such.conf"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no/such.conf"));
    let out = sltk(&["track", "--print-config", "--set", "colour=3"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn print_config_lists_the_defaults() {
    let out = sltk(&["track", "--print-config"]);
    assert!(out.status.success());
    let expected = [
        "5", "160", "120", "128", "10", "64", "16", "2", "8", "10", "1", "65536", "57600", "4800",
        "2000", "2000", "0.6", "0.02", "5", "90", "10,20", "0.9",
    ];
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), KEYS.len());
    for ((line, key), value) in lines.iter().zip(KEYS).zip(expected) {
        assert_eq!(*line, format!("{key} = {value}"));
    }
}

#[test]
fn overrides_reach_the_config() {
    let out = sltk(&[
        "track",
        "--print-config",
        "--set",
        "rays=32",
        "--set",
        "smoothing=0.5",
    ]);
    let text = stdout(&out);
    assert!(text.contains("rays = 32\n"));
    assert!(text.contains("smoothing = 0.5\n"));
}

#[test]
fn synth_then_track_raw() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("disk.sltk");
    let scene = sample_scene();
    let out = sltk(&[
        "synth",
        scene.to_str().unwrap(),
        "-o",
        raw.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let from_raw = sltk(&["track", "--raw", raw.to_str().unwrap()]);
    let from_scene = sltk(&["track", "--scene", scene.to_str().unwrap()]);
    assert!(from_raw.status.success());
    assert_eq!(from_raw.stdout, from_scene.stdout);
}

#[test]
fn selftest_passes() {
    let out = sltk(&["selftest"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).ends_with("0 failed\n"));
}
