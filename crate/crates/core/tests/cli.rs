use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kconn::qcp::{build_qcp, export_qcp, ExportFormat};
use kconn::Instance;

fn kconn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kconn")).args(args).env_remove("KCONN_SEED").output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const LINE3: &str = r#"{"dim":2,"h":1.0,"positions":[[0,0],[1,0],[2,0]]}"#;
const TRI: &str = r#"{"dim":2,"h":1.0,"positions":[[0,0],[1,0],[0.5,0.8]]}"#;

#[test]
fn check_reports_connectivity() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "tri.json", TRI);
    let out = kconn(&["check", "--instance", &tri, "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "k-connected: true");
    let line = write(dir.path(), "line3.json", LINE3);
    let out = kconn(&["check", "--instance", &line, "--k", "2", "--method", "brute"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "k-connected: false");
}

#[test]
fn restore_writes_verified_plan() {
    let dir = tempfile::tempdir().unwrap();
    let line = write(dir.path(), "line3.json", LINE3);
    let plan = dir.path().join("plan.json");
    let aug = dir.path().join("aug.json");
    let out = kconn(&["restore", "--instance", &line, "--k", "2", "--algo", "eascr", "--out", plan.to_str().unwrap(), "--dump-augmentation", aug.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&plan).unwrap()).unwrap();
    assert!((json["minmax"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    let edges: serde_json::Value = serde_json::from_str(&fs::read_to_string(&aug).unwrap()).unwrap();
    assert_eq!((edges[0]["i"].as_u64(), edges[0]["j"].as_u64()), (Some(0), Some(2)));

    let out = kconn(&["verify", "--instance", &line, "--plan", plan.to_str().unwrap(), "--k", "2", "--augmentation", aug.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("valid: true"));

    // The untouched path is not a valid 2-connected plan.
    let bad = write(dir.path(), "bad.json", r#"{"final_positions":[[0,0],[1,0],[2,0]],"minmax":0,"total":0,"per_robot":[0,0,0]}"#);
    let out = kconn(&["verify", "--instance", &line, "--plan", &bad, "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("valid: false"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let line = write(dir.path(), "line3.json", LINE3);
    assert_eq!(kconn(&["restore", "--instance", &line, "--k", "3", "--algo", "bt"]).status.code(), Some(2));
    assert_eq!(kconn(&["restore", "--instance", &line, "--k", "2", "--algo", "nb", "--dump-augmentation", "x.json"]).status.code(), Some(2));
    assert_eq!(kconn(&["restore", "--instance", &line, "--k", "3"]).status.code(), Some(1));
    assert_eq!(kconn(&["restore", "--instance", "/nonexistent.json", "--k", "2"]).status.code(), Some(1));
    assert_eq!(kconn(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(kconn(&["check", "--instance", &line]).status.code(), Some(2));
    assert_eq!(kconn(&["check", "--instance", &line, "--k", "2", "--method", "magic"]).status.code(), Some(2));
    assert_eq!(kconn(&["--help"]).status.code(), Some(0));
}

#[test]
fn gen_honours_seed_env() {
    let a = Command::new(env!("CARGO_BIN_EXE_kconn")).args(["gen", "--n", "8"]).env("KCONN_SEED", "17").output().unwrap();
    let b = kconn(&["gen", "--n", "8", "--seed", "17"]);
    let c = kconn(&["gen", "--n", "8", "--seed", "18"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(b.stdout, c.stdout);
    let inst = Instance::from_json(&String::from_utf8_lossy(&a.stdout)).unwrap();
    assert_eq!(inst.n(), 8);
}

#[test]
fn export_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let line = write(dir.path(), "line3.json", LINE3);
    let out = dir.path().join("m.qcp.txt");
    assert_eq!(kconn(&["export-qcp", "--instance", &line, "--k", "2", "--out", out.to_str().unwrap()]).status.code(), Some(0));
    let expected = export_qcp(&build_qcp(&Instance::from_json(LINE3).unwrap(), 2).unwrap(), ExportFormat::Text);
    assert_eq!(fs::read_to_string(out).unwrap(), expected);
}

#[test]
fn render_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let line = write(dir.path(), "line3.json", LINE3);
    let plan = dir.path().join("plan.json");
    assert_eq!(kconn(&["restore", "--instance", &line, "--k", "2", "--out", plan.to_str().unwrap()]).status.code(), Some(0));
    let svg = dir.path().join("a.svg");
    assert_eq!(kconn(&["render", "--instance", &line, "--plan", plan.to_str().unwrap(), "--out", svg.to_str().unwrap()]).status.code(), Some(0));
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let cfg = write(dir.path(), "bench.toml", "algos = [\"eascr\", \"nb\"]\nn = [8]\nk = 2\ntrials = 4\nseed = 5\n");
    let out_dir = dir.path().join("bench");
    // The flag overrides the config file's trial count.
    let out = kconn(&["bench", "--config", &cfg, "--trials", "2", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let trials = fs::read_to_string(out_dir.join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 1 + 2 * 2);
    assert!(trials.starts_with("algo,n,k,trial,seed,minmax,total,feasible"));
    assert!(out_dir.join("summary.csv").exists() && out_dir.join("runtime.csv").exists());
    assert_eq!(kconn(&["bench", "--algos", "bt", "--k", "3", "--n", "8", "--out", out_dir.to_str().unwrap()]).status.code(), Some(2));
}
