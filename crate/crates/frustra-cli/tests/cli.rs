use std::path::PathBuf;
use std::process::{Command, Output};

use frustra::io::{read_configurations_csv, read_exponents_csv, read_rows_csv, ExponentLine};
use frustra::scaling::Row;

fn frustra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frustra")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Vec<u8> {
    let out = frustra(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn rows(args: &[&str]) -> Vec<Row> {
    read_rows_csv(ok(args).as_slice()).unwrap()
}

fn value(rows: &[Row], observable: &str, index: usize) -> f64 {
    rows.iter().find(|r| r.observable == observable && r.index == index).unwrap().value
}

fn exponents(args: &[&str]) -> Vec<ExponentLine> {
    let out = frustra(args);
    assert!(out.status.code() == Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    read_exponents_csv(out.stdout.as_slice()).unwrap()
}

fn exponent(lines: &[ExponentLine], quantity: &str) -> Option<f64> {
    lines.iter().find(|l| l.quantity == quantity).map(|l| l.exponent)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("frustra-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn critical_point_of_the_trimer() {
    let r = rows(&["critical-point", "--jbar", "0.01", "--sites", "3"]);
    let gc = value(&r, "critical_coupling", 0);
    assert!((gc - 0.994987).abs() < 1e-6);
    // at g_c the two finite-momentum curvatures vanish, the uniform one is 6J̄
    assert!((value(&r, "origin_hessian_eigenvalue", 1) - 0.06).abs() < 1e-12);
    assert!(value(&r, "origin_hessian_eigenvalue", 2).abs() < 1e-12);
    assert!(value(&r, "origin_hessian_eigenvalue", 3).abs() < 1e-12);

    let r = rows(&["critical-point", "--jbar", "0", "--sites", "5"]);
    assert_eq!(value(&r, "critical_coupling", 0), 1.0);
}

#[test]
fn exit_codes() {
    let mismatch = frustra(&["critical-point", "--jbar", "0.6", "--sites", "3", "--sign", "negative"]);
    assert_eq!(mismatch.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&mismatch.stderr).contains("does not match"));
    assert_eq!(frustra(&["critical-point", "--sites", "4"]).status.code(), Some(2));
    assert_eq!(frustra(&["ground-state"]).status.code(), Some(2));
    assert_eq!(frustra(&["critical-point", "--bogus"]).status.code(), Some(2));
    assert_eq!(frustra(&["critical-point", "--jbar", "0.7", "--sites", "5"]).status.code(), Some(3));
    let threads = Command::new(env!("CARGO_BIN_EXE_frustra"))
        .args(["critical-point"])
        .env("FRUSTRA_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn frustrated_manifold_has_six_rows() {
    let out = ok(&["ground-state", "--jbar", "0.01", "--g", "1.0", "--manifold"]);
    let configs = read_configurations_csv(out.as_slice()).unwrap();
    assert_eq!(configs.len(), 6);
    assert!(configs.iter().all(|c| (c.energy - configs[0].energy).abs() < 1e-12));

    let single = read_configurations_csv(ok(&["ground-state", "--jbar", "0.01", "--g", "1.0"]).as_slice()).unwrap();
    assert_eq!(single.len(), 1);
    assert_eq!(single[0], configs[0]);
}

#[test]
fn normal_phase_ground_state() {
    let out = ok(&["ground-state", "--jbar", "0.01", "--g", "0.5"]);
    let c = &read_configurations_csv(out.as_slice()).unwrap()[0];
    assert_eq!(c.alphas, vec![0.0; 3]);
    assert!(c.thetas.iter().all(|t| *t == std::f64::consts::PI));
    let header = String::from_utf8(out).unwrap();
    assert!(header.lines().next().unwrap().ends_with("jx_1,jx_2,jx_3"));
}

#[test]
fn ground_state_json_carries_transverse_spin() {
    let out = ok(&["ground-state", "--jbar", "-0.01", "--g", "1.2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let first = &v["results"][0];
    assert_eq!(first["phase"], "non_frustrated_superradiant");
    assert_eq!(first["degeneracy"], 2);
    let thetas: Vec<f64> = serde_json::from_value(first["thetas"].clone()).unwrap();
    let phis: Vec<f64> = serde_json::from_value(first["phis"].clone()).unwrap();
    let jx: Vec<f64> = serde_json::from_value(first["jx"].clone()).unwrap();
    for i in 0..3 {
        assert!((jx[i] - thetas[i].sin() * phis[i].cos()).abs() < 1e-15);
    }
    assert_eq!(v["config"]["command"], "ground-state");
}

#[test]
fn spectrum_lists_every_mode() {
    let r = rows(&["spectrum", "--jbar", "0.01", "--g", "0.9", "--sites", "5"]);
    let energies: Vec<f64> = r.iter().filter(|r| r.observable == "energy").map(|r| r.value).collect();
    assert_eq!(energies.len(), 10);
    assert!(energies.windows(2).all(|w| w[1] >= w[0]));
    for k in 1..=10 {
        let w: f64 = r
            .iter()
            .filter(|r| r.observable == format!("mode{k}_cavity") || r.observable == format!("mode{k}_atom"))
            .map(|r| r.value * r.value)
            .sum();
        assert!((w - 1.0).abs() < 1e-12);
    }
}

#[test]
fn trimer_exponents() {
    let lines = exponents(&["exponents", "--jbar", "0.01", "--sites", "3"]);
    assert!((exponent(&lines, "gap_mf").unwrap() - 0.5).abs() < 0.03);
    assert!((exponent(&lines, "gap_f").unwrap() - 1.0).abs() < 0.05);

    let lines = exponents(&["exponents", "--jbar", "-0.01", "--sites", "3"]);
    assert!(exponent(&lines, "gap_f").is_none());
    assert!((exponent(&lines, "gap_mf").unwrap() - 0.5).abs() < 0.03);
    assert!((exponent(&lines, "normal_gap").unwrap() - 0.5).abs() < 0.03);
}

#[test]
fn pentamer_frustrated_exponent() {
    // the default window still sees the crossover out of the critical regime
    // for N = 5; the decade next to g_c resolves (N−1)/2
    let lines = exponents(&["exponents", "--jbar", "0.01", "--sites", "5", "--lo", "1e-4", "--hi", "1e-3"]);
    let gf = exponent(&lines, "gap_f").unwrap();
    assert!((gf - 2.0).abs() < 0.1, "{gf}");
}

#[test]
fn config_file_merges_under_flags() {
    let path = scratch("run.toml");
    std::fs::write(&path, "jbar = 0.0\nsites = 5\n").unwrap();
    let p = path.to_str().unwrap();
    let r = rows(&["critical-point", "--config", p]);
    assert_eq!(value(&r, "critical_coupling", 0), 1.0);
    assert_eq!(r.len(), 6);
    let r = rows(&["critical-point", "--config", p, "--sites", "3"]);
    assert_eq!(r.len(), 4);

    std::fs::write(&path, "jbar = 0.01\ncoupling = 1.0\n").unwrap();
    assert_eq!(frustra(&["critical-point", "--config", p]).status.code(), Some(2));
}

#[test]
fn identical_runs_give_identical_bytes() {
    let args = ["sweep", "--jbar", "0.01", "--lo", "1e-3", "--hi", "1e-2", "--per-decade", "3"];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_frustra"))
            .args(args)
            .env("FRUSTRA_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    let one = run("1");
    assert!(!one.is_empty());
    assert_eq!(one, run("1"));
    assert_eq!(one, run("4"));
}

#[test]
fn output_files_round_trip() {
    let csv = scratch("sweep.csv");
    let json = scratch("sweep.json");
    let base = ["sweep", "--jbar", "0.01", "--lo", "1e-3", "--hi", "1e-2", "--per-decade", "2"];
    let mut a = base.to_vec();
    a.extend(["--output", csv.to_str().unwrap()]);
    assert!(ok(&a).is_empty());
    let mut b = base.to_vec();
    b.extend(["--format", "json", "--output", json.to_str().unwrap()]);
    ok(&b);

    let from_csv = read_rows_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    let env: frustra::io::Envelope<Row> = frustra::io::read_json(std::fs::File::open(&json).unwrap()).unwrap();
    assert_eq!(from_csv, env.results);
    assert_eq!(env.config["window"]["lo"], 1e-3);
    // both sides of g_c, three points each, every observable
    assert_eq!(from_csv.iter().filter(|r| r.observable == "energy").count(), 6);
}
