use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use trapsim::io::{decode_pgm, parse_config, RESULTS_HEADER};

fn trapsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trapsim")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

#[test]
fn ramsey_writes_table_config_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = trapsim(&["ramsey", "--out", "o", "--seed", "7", "--svg"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let o = dir.path().join("o");
    let csv = std::fs::read_to_string(o.join("ramsey.csv")).unwrap();
    let lines: Vec<_> = csv.split_terminator('\n').collect();
    assert_eq!(lines[0], RESULTS_HEADER);
    assert_eq!(lines.len(), 1 + 9 * 41);
    assert!(!csv.contains('\r'));

    let config = std::fs::read(o.join("config.json")).unwrap();
    let cfg = parse_config(&config).unwrap();
    assert_eq!(cfg.noise.rng_seed, 7);
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(o.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_sha256"], hex::encode(Sha256::digest(&config)));
    assert_eq!(manifest["seed"], 7);
    let svg = std::fs::read_to_string(o.join("ramsey.svg")).unwrap();
    assert_eq!(svg.matches("<g id=\"site-").count(), 9);
}

#[test]
fn seed_changes_measured_column_only() {
    let dir = tempfile::tempdir().unwrap();
    for (seed, name) in [("1", "a"), ("2", "b")] {
        assert!(trapsim(&["ramsey", "--out", name, "--seed", seed], dir.path()).status.success());
    }
    let read = |n: &str| std::fs::read_to_string(dir.path().join(n).join("ramsey.csv")).unwrap();
    let (a, b) = (read("a"), read("b"));
    assert_ne!(a, b);
    let ideal = |s: &str| s.lines().map(|l| l.split(',').take(4).collect::<Vec<_>>().join(",")).collect::<Vec<_>>();
    assert_eq!(ideal(&a), ideal(&b));
}

#[test]
fn checkerboard_mask_has_five_disks() {
    let dir = tempfile::tempdir().unwrap();
    assert!(trapsim(&["pattern", "--out", "o"], dir.path()).status.success());
    let (w, h, data) = decode_pgm(&std::fs::read(dir.path().join("o/mask.pgm")).unwrap()).unwrap();
    assert_eq!((w, h), (1024, 768));
    // flood-fill count of lit regions
    let mut seen = vec![false; data.len()];
    let mut sizes = Vec::new();
    for start in 0..data.len() {
        if data[start] == 0 || seen[start] {
            continue;
        }
        let mut size = 0;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(k) = stack.pop() {
            size += 1;
            let (c, r) = (k % w, k / w);
            let mut push = |cc: usize, rr: usize| {
                let n = rr * w + cc;
                if data[n] != 0 && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            };
            if c > 0 {
                push(c - 1, r);
            }
            if c + 1 < w {
                push(c + 1, r);
            }
            if r > 0 {
                push(c, r - 1);
            }
            if r + 1 < h {
                push(c, r + 1);
            }
        }
        sizes.push(size);
    }
    assert_eq!(sizes.len(), 5);
    // each disk covers about 80 pixel centres
    assert!(sizes.iter().all(|&n| (70..=90).contains(&n)), "{sizes:?}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "na.json", r#"{"imaging":{"numerical_aperture":1.5}}"#);
    write(dir.path(), "syntax.json", "{\"slm\": {\n}");
    write(dir.path(), "unknown.json", r#"{"slm":{"pixels":3}}"#);
    write(dir.path(), "blue.json", r#"{"beam":{"wavelength_nm":700}}"#);
    write(dir.path(), "late.json", r#"{"experiment":{"T_pi_ms":11}}"#);
    let code = |args: &[&str]| trapsim(args, dir.path()).status.code().unwrap();
    assert_eq!(code(&["traps", "--config", "na.json"]), 2);
    assert_eq!(code(&["traps", "--config", "syntax.json"]), 2);
    assert_eq!(code(&["traps", "--config", "unknown.json"]), 2);
    assert_eq!(code(&["traps", "--config", "blue.json"]), 3);
    assert_eq!(code(&["echo", "--config", "late.json"]), 3);
    assert_eq!(code(&["traps", "--config", "missing.json"]), 4);
    assert_eq!(code(&["traps", "--out", "o"]), 0);
    let stderr = String::from_utf8(trapsim(&["traps", "--config", "na.json"], dir.path()).stderr).unwrap();
    assert!(stderr.contains("imaging.numerical_aperture"));
}

#[test]
fn traps_table_lists_every_site() {
    let dir = tempfile::tempdir().unwrap();
    assert!(trapsim(&["traps", "--out", "o"], dir.path()).status.success());
    let csv = std::fs::read_to_string(dir.path().join("o/traps.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    let centre = csv.lines().find(|l| l.starts_with("25,25,")).unwrap();
    let depth: f64 = centre.split(',').nth(6).unwrap().parse().unwrap();
    assert!((57.0..=63.0).contains(&depth));
}

#[test]
fn image_of_loaded_sites() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", r#"{"experiment":{"trap_pattern":{"kind":"checkerboard","parity":1}}}"#);
    assert!(trapsim(&["image", "--config", "c.json", "--out", "o"], dir.path()).status.success());
    let (w, h, data) = decode_pgm(&std::fs::read(dir.path().join("o/image.pgm")).unwrap()).unwrap();
    assert!(w > 100 && h > 100);
    assert_eq!(data.iter().copied().max(), Some(255));
}
