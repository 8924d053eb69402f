use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lafair::mesh::{add_noise, icosphere, load_mesh};
use lafair::FilterConfig;
use serde_json::Value;
use tempfile::TempDir;

fn lafair(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lafair"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = lafair(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: PathBuf) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn gen_counts_and_manifest() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["gen", "sphere", "--subdiv", "3", "-o", "sphere.obj"]);
    let m = load_mesh(dir.path().join("sphere.obj")).unwrap();
    assert_eq!(m.vertex_count(), 642);

    ok(dir.path(), &["gen", "plane", "--n", "32", "-o", "plane.obj"]);
    let m = load_mesh(dir.path().join("plane.obj")).unwrap();
    assert_eq!((m.vertex_count(), m.face_count()), (1089, 2048));

    let manifest = json(dir.path().join("plane.manifest.json"));
    assert_eq!(manifest["command"], "gen");
    assert_eq!(manifest["schema_version"], 1);
    assert_eq!(manifest["config"]["resolution"], 32);
    assert_eq!(manifest["config"]["mesh"]["kind"], "plane");
}

#[test]
fn usage_errors_exit_nonzero() {
    let dir = TempDir::new().unwrap();
    assert!(!lafair(dir.path(), &["gen", "torus", "-o", "x.obj"]).status.success());
    let out = lafair(
        dir.path(),
        &["curve", "--alpha", "0", "--c1", "0", "--n", "1", "-o", "c.csv"],
    );
    assert!(!out.status.success());
    assert!(!dir.path().join("c.csv").exists());
    assert!(!lafair(dir.path(), &["filter", "missing.obj", "-o", "x.obj"]).status.success());
    ok(dir.path(), &["gen", "sphere", "--subdiv", "1", "-o", "s.obj"]);
    let bad = lafair(dir.path(), &["filter", "s.obj", "--ring-depth", "0", "-o", "x.obj"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("ring_depth"));
}

#[test]
fn filter_writes_report_and_reduces_residual() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["gen", "sphere", "--subdiv", "3", "-o", "sphere.obj"]);
    ok(
        dir.path(),
        &["noise", "sphere.obj", "--amplitude", "0.005", "--seed", "3", "-o", "noisy.obj"],
    );
    ok(dir.path(), &["filter", "noisy.obj", "--iters", "10", "-o", "fair.obj"]);
    let report = json(dir.path().join("fair.report.json"));
    let iterations = report["iterations"].as_array().unwrap();
    assert_eq!(iterations.len(), 10);
    for key in [
        "solved",
        "fallback",
        "frozen",
        "reverted",
        "max_displacement",
        "mean_k_residual",
        "elapsed_ms",
    ] {
        assert!(iterations[0].get(key).is_some(), "missing {key}");
    }
    let initial = report["initial_mean_k_residual"].as_f64().unwrap();
    let last = report["final_mean_k_residual"].as_f64().unwrap();
    assert!(last < initial);
    assert!(report["total_elapsed_ms"].as_f64().unwrap() > 0.0);
    assert_eq!(report["config"]["iterations"], 10);
}

#[test]
fn zero_iterations_copy_the_mesh() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["gen", "saddle", "--n", "6", "-o", "mesh.obj"]);
    ok(dir.path(), &["filter", "mesh.obj", "--iters", "0", "-o", "same.obj"]);
    let a = std::fs::read(dir.path().join("mesh.obj")).unwrap();
    let b = std::fs::read(dir.path().join("same.obj")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn curvature_csv_examples() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["gen", "plane", "--n", "8", "-o", "plane.obj"]);
    ok(dir.path(), &["curvature", "plane.obj", "-o", "plane.csv"]);
    let (header, rows) = csv_rows(dir.path().join("plane.csv"));
    assert_eq!(
        header,
        ["vertex_id", "x", "y", "z", "area", "deficit", "K", "is_boundary"]
    );
    assert_eq!(rows.len(), 81);
    for r in rows.iter().filter(|r| r[7] == "0") {
        assert!(r[6].parse::<f64>().unwrap().abs() < 1e-10);
    }

    ok(dir.path(), &["gen", "sphere", "--subdiv", "3", "-o", "s.obj"]);
    ok(dir.path(), &["curvature", "s.obj", "-o", "s.csv", "--ply", "s.ply"]);
    let (_, rows) = csv_rows(dir.path().join("s.csv"));
    assert_eq!(rows.len(), 642);
    let mean = rows.iter().map(|r| r[6].parse::<f64>().unwrap()).sum::<f64>() / 642.0;
    assert!((mean - 1.0).abs() < 0.05);

    let ply = std::fs::read(dir.path().join("s.ply")).unwrap();
    let end = b"end_header\n";
    let pos = ply.windows(end.len()).position(|w| w == end).unwrap() + end.len();
    let header = String::from_utf8_lossy(&ply[..pos]);
    assert!(header.contains("format binary_little_endian 1.0"));
    assert!(header.contains("element vertex 642"));
    assert_eq!(ply.len() - pos, 642 * (24 + 3) + 1280 * (1 + 12));
    let x = f64::from_le_bytes(ply[pos..pos + 8].try_into().unwrap());
    let first: f64 = rows[0][1].parse().unwrap();
    assert_eq!(x, first);
}

#[test]
fn metrics_examples() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["gen", "sphere", "--subdiv", "3", "-o", "s.obj"]);
    ok(dir.path(), &["metrics", "s.obj", "--reference", "s.obj", "-o", "self.json"]);
    assert_eq!(json(dir.path().join("self.json"))["rms_to_reference"], 0.0);

    // Every icosahedron vertex has the same curvature.
    ok(dir.path(), &["gen", "sphere", "--subdiv", "0", "-o", "ico.obj"]);
    ok(dir.path(), &["metrics", "ico.obj", "-o", "ico.json"]);
    let m = json(dir.path().join("ico.json"));
    let (j, area) = (m["j_las"].as_f64().unwrap(), m["area"].as_f64().unwrap());
    assert!((j - area).abs() < 1e-9);

    ok(
        dir.path(),
        &["noise", "s.obj", "--amplitude", "0.005", "--seed", "11", "-o", "n.obj"],
    );
    ok(dir.path(), &["metrics", "n.obj", "--reference", "s.obj", "-o", "n.json"]);
    let rms = json(dir.path().join("n.json"))["rms_to_reference"].as_f64().unwrap();
    let expected = add_noise(&icosphere(3, 1.0), 0.005, 11)
        .rms_distance(&icosphere(3, 1.0))
        .unwrap();
    assert!((rms - expected).abs() < 1e-15);
    assert!(rms > 0.0 && rms <= 0.005);

    ok(dir.path(), &["gen", "sphere", "--subdiv", "1", "-o", "small.obj"]);
    let out = lafair(dir.path(), &["metrics", "s.obj", "--reference", "small.obj", "-o", "x.json"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("mismatch"));
}

#[test]
fn curve_examples() {
    let dir = TempDir::new().unwrap();
    let out = ok(
        dir.path(),
        &["curve", "--alpha", "-1", "--s-max", "3", "--n", "2000", "-o", "c.csv"],
    );
    let slope: f64 = out
        .trim()
        .strip_prefix("lcg_slope: ")
        .unwrap()
        .parse()
        .unwrap();
    assert!((slope + 1.0).abs() < 1e-2);
    let (header, rows) = csv_rows(dir.path().join("c.csv"));
    assert_eq!(header, ["s", "x", "y", "theta", "kappa"]);
    assert_eq!(rows.len(), 2000);

    let tau = std::f64::consts::TAU.to_string();
    let out = ok(
        dir.path(),
        &["curve", "--alpha", "0", "--c0", "1", "--c1", "0", "--s-max", &tau, "--n", "400", "-o", "circle.csv"],
    );
    assert!(out.contains("undefined (constant curvature)"));
    let (_, rows) = csv_rows(dir.path().join("circle.csv"));
    let p = |r: &Vec<String>| (r[1].parse::<f64>().unwrap(), r[2].parse::<f64>().unwrap());
    let (a, b) = (p(&rows[0]), p(&rows[rows.len() - 1]));
    assert!((a.0 - b.0).hypot(a.1 - b.1) < 1e-9);

    let bad = lafair(
        dir.path(),
        &["curve", "--alpha", "1", "--c0", "-1", "--c1", "1", "--s-max", "2", "-o", "bad.csv"],
    );
    assert!(!bad.status.success());
}

#[test]
fn noise_is_reproducible() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["gen", "sphere", "--subdiv", "2", "-o", "s.obj"]);
    ok(dir.path(), &["noise", "s.obj", "--amplitude", "0", "-o", "zero.obj"]);
    assert_eq!(
        std::fs::read(dir.path().join("s.obj")).unwrap(),
        std::fs::read(dir.path().join("zero.obj")).unwrap()
    );
    for name in ["a.obj", "b.obj"] {
        ok(dir.path(), &["noise", "s.obj", "--amplitude", "0.01", "--seed", "5", "-o", name]);
    }
    assert_eq!(
        std::fs::read(dir.path().join("a.obj")).unwrap(),
        std::fs::read(dir.path().join("b.obj")).unwrap()
    );
    let manifest = json(dir.path().join("a.manifest.json"));
    assert_eq!(manifest["seed"], 5);
    assert!(!lafair(dir.path(), &["noise", "s.obj", "--amplitude=-1", "-o", "n.obj"]).status.success());
}

#[test]
fn replay_reproduces_outputs() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["gen", "sphere", "--subdiv", "2", "-o", "s.obj"]);
    ok(dir.path(), &["noise", "s.obj", "--amplitude", "0.01", "--seed", "9", "-o", "n.obj"]);
    ok(dir.path(), &["filter", "n.obj", "--iters", "3", "-o", "f.obj"]);
    let first = std::fs::read(dir.path().join("f.obj")).unwrap();
    std::fs::remove_file(dir.path().join("f.obj")).unwrap();
    std::fs::remove_file(dir.path().join("n.obj")).unwrap();
    ok(dir.path(), &["replay", "n.manifest.json"]);
    ok(dir.path(), &["replay", "f.manifest.json"]);
    assert_eq!(first, std::fs::read(dir.path().join("f.obj")).unwrap());
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["gen", "sphere", "--subdiv", "3", "-o", "s.obj"]);
    ok(dir.path(), &["noise", "s.obj", "--amplitude", "0.005", "--seed", "1", "-o", "n.obj"]);
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = Command::new(env!("CARGO_BIN_EXE_lafair"))
            .current_dir(dir.path())
            .env("LA_FAIR_THREADS", threads)
            .args(["filter", "n.obj", "--iters", "2", "-o", "f.obj"])
            .output()
            .unwrap();
        assert!(out.status.success());
        outputs.push(std::fs::read(dir.path().join("f.obj")).unwrap());
        assert_eq!(
            json(dir.path().join("f.manifest.json"))["threads"].as_u64(),
            Some(threads.parse().unwrap())
        );
    }
    assert_eq!(outputs[0], outputs[1]);

    let bad = Command::new(env!("CARGO_BIN_EXE_lafair"))
        .current_dir(dir.path())
        .env("LA_FAIR_THREADS", "zero")
        .args(["gen", "plane", "-o", "p.obj"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
}

#[test]
fn filter_config_json_defaults() {
    let cfg: FilterConfig = serde_json::from_str(r#"{"iterations": 3}"#).unwrap();
    assert_eq!(
        cfg,
        FilterConfig {
            iterations: 3,
            ..FilterConfig::default()
        }
    );
    let full = serde_json::to_value(FilterConfig::default()).unwrap();
    assert_eq!(full["boundary_policy"], "freeze");
    assert_eq!(full["range_expansions"], 8);
    assert_eq!(full["ring_depth"], 2);
}
