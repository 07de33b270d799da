//! End-to-end tests of the command-line interface, driving the built
//! binary on small scenes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn polsar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polsar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tempdir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("polsar-cli-test-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn channel_bytes(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(format!("{name}.bin"))).unwrap()
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let root = tempdir("sim-det");
    let a = root.join("a");
    let b = root.join("b");
    for out in [&a, &b] {
        let res = polsar(&[
            "simulate",
            "--scene",
            "rank1",
            "--seed",
            "5",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    for ch in ["T11", "T22", "T12_im", "T23_re"] {
        assert_eq!(channel_bytes(&a, ch), channel_bytes(&b, ch), "channel {ch}");
    }
    let _ = fs::remove_dir_all(&root);
}

#[test]
fn single_look_simulation_warns() {
    let root = tempdir("sim-warn");
    let res = polsar(&[
        "simulate",
        "--scene",
        "rank1",
        "--looks",
        "1",
        "--out",
        root.join("s").to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(
        stderr.contains("rank-deficient"),
        "expected a rank warning, got: {stderr}"
    );
    let _ = fs::remove_dir_all(&root);
}

#[test]
fn filter_rejects_zero_iterations() {
    let root = tempdir("filter-iters");
    let bundle = root.join("s");
    assert!(polsar(&[
        "simulate",
        "--scene",
        "rank1",
        "--out",
        bundle.to_str().unwrap(),
    ])
    .status
    .success());
    let res = polsar(&[
        "filter",
        "--in",
        bundle.to_str().unwrap(),
        "--out",
        root.join("f").to_str().unwrap(),
        "--iters",
        "0",
    ]);
    assert!(!res.status.success());
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("iteration"), "stderr: {stderr}");
    let _ = fs::remove_dir_all(&root);
}

#[test]
fn filter_applies_distance_defaults_and_writes_metadata() {
    let root = tempdir("filter-defaults");
    let bundle = root.join("s");
    assert!(polsar(&[
        "simulate",
        "--scene",
        "rank1",
        "--out",
        bundle.to_str().unwrap(),
    ])
    .status
    .success());
    let out = root.join("kl");
    let res = polsar(&[
        "filter",
        "--in",
        bundle.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--distance",
        "kl",
        "--iters",
        "1",
        "--window",
        "5",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("gamma_r=3.11"), "stdout: {stdout}");
    let meta = fs::read_to_string(out.join("filter_meta.txt")).unwrap();
    assert!(meta.contains("distance=kl"));
    assert!(meta.lines().any(|l| l.starts_with("wall_ms=")));
    let _ = fs::remove_dir_all(&root);
}

#[test]
fn evaluate_truth_against_itself_is_zero_error() {
    let root = tempdir("eval-zero");
    let bundle = root.join("s");
    assert!(polsar(&[
        "simulate",
        "--scene",
        "rank1",
        "--seed",
        "2",
        "--out",
        bundle.to_str().unwrap(),
    ])
    .status
    .success());
    let res = polsar(&[
        "evaluate",
        "--truth",
        bundle.to_str().unwrap(),
        "--estimate",
        bundle.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("err_glob,0.000000"), "stdout: {stdout}");
    assert!(stdout.contains("err_edge,0.000000"), "stdout: {stdout}");

    let res = polsar(&[
        "evaluate",
        "--truth",
        bundle.to_str().unwrap(),
        "--estimate",
        bundle.to_str().unwrap(),
        "--pretty",
    ]);
    assert!(res.status.success());
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("zone 1") && stdout.contains("T23"), "stdout: {stdout}");
    let _ = fs::remove_dir_all(&root);
}

#[test]
fn evaluate_requires_labels_for_explicit_edge_error() {
    let root = tempdir("eval-edge");
    let bundle = root.join("s");
    assert!(polsar(&[
        "simulate",
        "--scene",
        "rank1",
        "--out",
        bundle.to_str().unwrap(),
    ])
    .status
    .success());
    // strip the bundle down to a bare T3 directory
    let bare = root.join("bare");
    fs::create_dir_all(&bare).unwrap();
    for entry in fs::read_dir(&bundle).unwrap() {
        let entry = entry.unwrap();
        let name = entry.file_name();
        let keep = name.to_string_lossy().ends_with(".bin")
            || name.to_string_lossy() == "header.txt";
        if keep {
            fs::copy(entry.path(), bare.join(&name)).unwrap();
        }
    }
    let res = polsar(&[
        "evaluate",
        "--truth",
        bare.to_str().unwrap(),
        "--estimate",
        bare.to_str().unwrap(),
        "--err-edge",
    ]);
    assert!(!res.status.success());
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("labels"), "stderr: {stderr}");
    let _ = fs::remove_dir_all(&root);
}

#[test]
fn custom_label_scene_roundtrip() {
    let root = tempdir("custom-scene");
    // hand-written two-class map and classes
    let labels_path = root.join("labels.lmap");
    let classes_path = root.join("classes.txt");
    let (w, h) = (12usize, 10usize);
    let mut labels = vec![0u8; w * h];
    for y in 0..h {
        for x in (w / 2)..w {
            labels[y * w + x] = 1;
        }
    }
    // write via a scratch program is overkill; reuse the library format
    {
        use polsar_core::raster::{write_class_config, write_label_raster};
        write_label_raster(&labels_path, w, h, &labels).unwrap();
        write_class_config(
            &classes_path,
            &polsar_core::constants::zone_matrices()[..2],
        )
        .unwrap();
    }
    let bundle = root.join("s");
    let res = polsar(&[
        "simulate",
        "--labels",
        labels_path.to_str().unwrap(),
        "--classes",
        classes_path.to_str().unwrap(),
        "--seed",
        "4",
        "--out",
        bundle.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("12x10"), "stdout: {stdout}");
    let _ = fs::remove_dir_all(&root);
}
