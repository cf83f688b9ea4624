use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_stochastic-channel");

const SMALL: &str = r#"
r = 2.8
seed = 17

[grid]
n_x = 16
n_z = 33
height = 1.0

[time]
horizon = 0.05
dt = 1e-3

[noise]
mode_cutoff = 4

[output]
snapshot_times = [0.05]
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(BIN)
        .arg(cmd)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn exponents_golden() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", "r = 2.8\n");
    let out = dir.path().join("out");
    let o = run("exponents", &cfg, &out, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&read(&out.join("exponents.json"))).unwrap();
    assert_eq!(v["depth"], 2);
    assert!((v["q_star"].as_f64().unwrap() - 10.0 / 7.0).abs() < 1e-12);
    let q: Vec<f64> = v["stokes_exps"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((q[0] - 1.4).abs() < 1e-12 && (q[1] - 1.75).abs() < 1e-12);
    assert!(out.join("manifest.json").exists());
}

#[test]
fn missing_r_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", "seed = 1\n");
    let out = dir.path().join("out");
    let o = run("exponents", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing field `r`"));
    assert!(!out.exists());
}

#[test]
fn supercritical_r_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", "r = 3.5\n");
    let out = dir.path().join("out");
    let o = run("run-linear", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid `r`"));
    assert!(!out.exists());
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for cmd in ["sample-noise", "run-full"] {
        assert!(run(cmd, &cfg, &a, &["--threads", "1"]).status.success());
        assert!(run(cmd, &cfg, &b, &["--threads", "2"]).status.success());
    }
    for f in ["noise.csv", "level_norms.csv", "energy_residual.csv", "telescoping_residual.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let header = read(&a.join("noise.csv"));
    assert_eq!(header.lines().next().unwrap(), "time,mode,re,im");
    assert!(a.join("snapshots").is_dir());
}

#[test]
fn manifest_replays_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run("run-linear", &cfg, &a, &["--seed", "99"]).status.success());
    let manifest: serde_json::Value = serde_json::from_str(&read(&a.join("manifest.json"))).unwrap();
    assert_eq!(manifest["seed"], 99);
    assert_eq!(manifest["command"], "run-linear");
    assert_eq!(manifest["sub_seeds"].as_array().unwrap().len(), 9);
    assert!(run("run-linear", &a.join("manifest.json"), &b, &[]).status.success());
    let replay: serde_json::Value = serde_json::from_str(&read(&b.join("manifest.json"))).unwrap();
    assert_eq!(replay["config_sha256"], manifest["config_sha256"]);
    for f in ["w_norms.csv", "weak_residual.csv", "blowup_profile.csv"] {
        assert_eq!(read(&a.join(f)), read(&b.join(f)), "{f}");
    }
    // a different seed gives a different path
    let c = dir.path().join("c");
    assert!(run("run-linear", &cfg, &c, &[]).status.success());
    assert_ne!(read(&a.join("w_norms.csv")), read(&c.join("w_norms.csv")));
}

#[test]
fn unstable_run_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("mode_cutoff = 4", "mode_cutoff = 4\nsigma0 = 1e6");
    let cfg = write_config(dir.path(), "c.toml", &text);
    let out = dir.path().join("out");
    let o = run("run-full", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("CFL"));
    assert!(!out.exists());
}
