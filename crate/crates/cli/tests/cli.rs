use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn tfl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfl"))
        .args(args)
        .arg("--out")
        .arg(dir.join("out"))
        .arg("--quiet")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out").join(name)).unwrap()).unwrap()
}

#[test]
fn tensions_for_three_four_five() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sigmas = 3, 4, 5\n");
    let out = tfl(dir.path(), &["tensions", "--config", &cfg]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = read_json(dir.path(), "tensions.json");
    let alphas: Vec<f64> = serde_json::from_value(v["alphas"].clone()).unwrap();
    let gammas: Vec<f64> = serde_json::from_value(v["gammas_deg"].clone()).unwrap();
    // law of cosines on the triangle with sides 3, 4, 5
    let cos = |a: f64, b: f64, c: f64| {
        ((a * a + b * b - c * c) / (2.0 * a * b))
            .acos()
            .to_degrees()
    };
    let expected = [
        180.0 - cos(4.0, 5.0, 3.0),
        180.0 - cos(3.0, 5.0, 4.0),
        180.0 - cos(3.0, 4.0, 5.0),
    ];
    for (a, e) in alphas.iter().zip([1.0, 2.0, 3.0]) {
        assert!((a - e).abs() < 1e-12);
    }
    for (g, e) in gammas.iter().zip(expected) {
        assert!((g - e).abs() < 1e-9, "{gammas:?} vs {expected:?}");
    }
    assert!((gammas[0] - 143.1301).abs() < 1e-4);
    let log = std::fs::read_to_string(dir.path().join("out/tensions.config.txt")).unwrap();
    assert!(log.contains("sigmas = 3, 4, 5"));
    assert!(log.contains("seed = 0"));
}

#[test]
fn chord_monotonicity_csv() {
    let dir = tempfile::tempdir().unwrap();
    let chord = r#"{"domain_radius": 1.0, "interfaces": [{"pair": [0, 1], "points": [[-0.8, 0.6], [0.8, 0.6]]}]}"#;
    std::fs::write(dir.path().join("chord.json"), chord).unwrap();
    let cfg = write_config(
        dir.path(),
        "polyline = chord.json\nr_min = 0.65\nr_max = 1.0\nr_count = 8\n",
    );
    let out = tfl(dir.path(), &["monotonicity", "--config", &cfg]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("out/monotonicity.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(
        header,
        ["r", "scaled_energy", "gamma", "fourth_power", "correction"]
    );
    let last: Vec<f64> = lines
        .last()
        .unwrap()
        .split(',')
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(last[0], 1.0);
    // chord of the unit circle at distance 0.6 has length 2 * 0.8
    assert!((last[2] - 1.6).abs() < 1e-8, "gamma(1) = {}", last[2]);
}

#[test]
fn unknown_command_exits_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = tfl(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn validation_and_numerical_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sigmas = 1, 1, 3\n");
    assert_eq!(
        tfl(dir.path(), &["tensions", "--config", &cfg])
            .status
            .code(),
        Some(2)
    );
    let cfg = write_config(dir.path(), "grid = missing.tfl\n");
    assert_eq!(
        tfl(dir.path(), &["minimize", "--config", &cfg])
            .status
            .code(),
        Some(2)
    );
    // a two-fluid grid has no junction to read
    let cfg = write_config(dir.path(), "scenario = vertical_split\nn = 16\n");
    let out = tfl(dir.path(), &["blowup", "--config", &cfg]);
    assert!(out.status.success());
    let v = read_json(dir.path(), "blowup.json");
    assert!(v["rescalings"][0]["junction"].is_null());
}

#[test]
fn same_seed_gives_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "scenario = three_arcs\nn = 32\nsweeps = 40\nrandom_init = true\nreplicas = 2\n",
    );
    let run = |sub: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_tfl"))
            .args([
                "minimize", "--config", &cfg, "--seed", "7", "--quiet", "--out",
            ])
            .arg(dir.path().join(sub))
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        [
            "minimize.json",
            "trace.csv",
            "minimized.tfl",
            "minimized.svg",
            "minimize.config.txt",
        ]
        .map(|f| std::fs::read(dir.path().join(sub).join(f)).unwrap())
    };
    let a = run("a");
    let b = run("b");
    assert!(a == b);
    let trace = String::from_utf8(a[1].clone()).unwrap();
    assert!(trace.starts_with("sweep,energy,phase\n"));
    assert!(String::from_utf8(a[4].clone())
        .unwrap()
        .contains("seed = 7"));
}

#[test]
fn cones_writes_svg_and_competitor() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cone = 0:60, 1:60, 0:60, 1:60, 2:60, 1:60\n");
    let out = tfl(dir.path(), &["cones", "--config", &cfg]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("out/cone.svg").exists());
    assert!(dir.path().join("out/competitor.svg").exists());
}
