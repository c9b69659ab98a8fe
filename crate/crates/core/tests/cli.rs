use std::path::Path;
use std::process::{Command, Output};

use rollslide::mesh::load_obj;

fn rollslide(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rollslide")).args(args).output().expect("spawn rollslide")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Columns of a metrics CSV, keyed by header.
fn columns(path: &Path) -> Vec<(String, Vec<f64>)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let mut cols: Vec<(String, Vec<f64>)> =
        lines.next().unwrap().split(',').map(|h| (h.to_string(), Vec::new())).collect();
    for line in lines {
        for (i, v) in line.split(',').enumerate() {
            cols[i].1.push(v.parse().unwrap());
        }
    }
    cols
}

fn column<'a>(cols: &'a [(String, Vec<f64>)], name: &str) -> &'a [f64] {
    &cols.iter().find(|(h, _)| h == name).unwrap().1
}

#[test]
fn run_writes_consistent_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = rollslide(&[
        "run",
        "--scenario",
        "sphere-ring-inside",
        "--method",
        "geodesic",
        "--resolution",
        "coarse",
        "--duration",
        "0.5",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let cols = columns(&dir.path().join("metrics.csv"));
    let header: Vec<&str> = cols.iter().map(|(h, _)| h.as_str()).collect();
    assert_eq!(
        header,
        [
            "t",
            "separation",
            "alignment",
            "slippage",
            "sliding",
            "total_geodesic",
            "centroid_x",
            "centroid_y",
            "centroid_z"
        ]
    );
    let t = column(&cols, "t");
    assert_eq!(t.len(), 51);
    assert_eq!(t[0], 0.0);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["steps"], 50);
    let c = &summary["contacts"][0];
    let sep = column(&cols, "separation");
    let align = column(&cols, "alignment");
    let total = column(&cols, "total_geodesic");
    let slip = column(&cols, "slippage");
    let sliding = column(&cols, "sliding");
    let max_abs = |v: &[f64]| v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mean_align = align.iter().map(|a| 180.0 - a).sum::<f64>() / align.len() as f64;
    let close = |key: &str, v: f64| {
        let s = c[key].as_f64().unwrap();
        assert!((s - v).abs() <= 1e-12, "{key}: summary {s} vs csv {v}");
    };
    close("final_total_geodesic", *total.last().unwrap());
    close("max_abs_separation", max_abs(sep));
    close("mean_alignment_error", mean_align);
    close("final_slippage", *slip.last().unwrap());
    close("max_abs_slippage", max_abs(slip));
    close("max_sliding", max_abs(sliding));

    let trajectory: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("trajectory.json")).unwrap()).unwrap();
    assert_eq!(trajectory.as_array().unwrap().len(), 51);
}

#[test]
fn zero_duration_has_no_steps() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        rollslide(&["run", "--resolution", "coarse", "--duration", "0", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["steps"], 0);
    assert_eq!(column(&columns(&dir.path().join("metrics.csv")), "t"), [0.0]);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "scenario = \"sphere-ring-outside\"\nmethod = \"collision\"\nresolution = \"coarse\"\nduration = 1.0\n\n[gains]\nk_omega = 0.1\nk_v = 0.1\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = rollslide(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--duration",
        "0.2",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["method"], "collision");
    assert_eq!(summary["config"]["duration"], 0.2);
    assert_eq!(summary["config"]["gains"]["k_v"], 0.1);
    assert_eq!(summary["steps"], 20);
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&rollslide(&["run", "--dt=-1", "--out-dir", d])), 2);
    assert_eq!(code(&rollslide(&["run", "--tube-diameter", "25", "--out-dir", d])), 2);
    assert_eq!(code(&rollslide(&["run", "--scenario", "grasp-cylinder", "--method", "collision", "--out-dir", d])), 2);
    assert_eq!(code(&rollslide(&["run", "--scenario", "nonsense", "--out-dir", d])), 2);
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(code(&rollslide(&["run", "--config", cfg.to_str().unwrap(), "--out-dir", d])), 2);
    assert_eq!(code(&rollslide(&["run", "--config", "/nonexistent/run.toml", "--out-dir", d])), 2);
    assert_eq!(code(&rollslide(&["compare", "--runs", "sphere-ring-inside:geodesic", "--out-dir", d])), 2);
}

#[test]
fn gen_mesh_writes_loadable_obj() {
    let dir = tempfile::tempdir().unwrap();
    for shape in ["sphere", "ring-inside", "capsule", "box"] {
        let path = dir.path().join(format!("{shape}.obj"));
        let out = rollslide(&["gen-mesh", shape, "--resolution", "coarse", "--out", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let mesh = load_obj(&std::fs::read(&path).unwrap()).unwrap();
        assert!(mesh.num_faces() > 0);
    }
}

#[test]
fn compare_prints_every_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = rollslide(&[
        "compare",
        "--runs",
        "sphere-ring-inside:geodesic:coarse",
        "sphere-ring-inside:collision:coarse",
        "--duration",
        "0.3",
        "--out-dir",
        d,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("sphere-ring-inside:geodesic:coarse"));
    assert!(table.contains("sphere-ring-inside:collision:coarse"));

    // A previous run directory is read back rather than rerun.
    let again = rollslide(&["compare", "--runs", &format!("{d}/sphere-ring-inside_geodesic_coarse"), "--out-dir", d]);
    assert_eq!(code(&again), 0);
    let first = table.lines().find(|l| l.starts_with("sphere-ring-inside:geodesic")).unwrap();
    let reread = String::from_utf8(again.stdout).unwrap();
    let numbers = |l: &str| l.split_whitespace().skip(1).map(str::to_string).collect::<Vec<_>>();
    assert_eq!(numbers(first), numbers(reread.lines().nth(1).unwrap()));
}
