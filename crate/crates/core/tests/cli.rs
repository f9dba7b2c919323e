use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn resonwave(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_resonwave"));
    cmd.args(args).env_remove("RESONWAVE_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn sorted_lines(path: &Path) -> Vec<String> {
    let mut lines: Vec<String> = std::fs::read_to_string(path).unwrap().lines().map(String::from).collect();
    lines.sort();
    lines
}

#[test]
fn bad_contour_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("delta_m2.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["contour"] = serde_json::json!({"eps": 0.6});
    let path = dir.path().join("bad.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let out = resonwave(&["resonances", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["message"].as_str().unwrap().contains("contour ordering violated"), "{err}");
    assert_eq!(err["exit_code"], 2);
}

#[test]
fn missing_config_and_bad_flags_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = resonwave(&["verify", "--config", "/nonexistent.json", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(resonwave(&["expand", "--frobnicate"], &[]).status.code(), Some(2));
}

#[test]
fn verify_passes_on_the_free_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = resonwave(
        &["verify", "--config", config("free.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap()],
        &[],
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.lines().all(|l| l.starts_with("PASS")));
    assert!(stdout.contains("bromwich_vs_dalembert"));
}

#[test]
fn manifest_lists_every_output() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, cfg) in [("resonances", "well5.json"), ("scan-alpha", "delta_sweep.json"), ("expand", "free.json")] {
        let out_dir = dir.path().join(cmd);
        let out = resonwave(
            &[cmd, "--config", config(cfg).to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "--tol", "1e-6"],
            &[],
        );
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let m = manifest(&out_dir);
        let mut listed: Vec<String> = m["files"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
        let mut present: Vec<String> = std::fs::read_dir(&out_dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        listed.sort();
        present.sort();
        assert_eq!(listed, present);
        assert_eq!(m["command"], cmd);
        assert_eq!(m["tol"], 1e-6);
        assert!(m["version"].as_str().unwrap().starts_with("resonwave-"));
    }
}

#[test]
fn rerun_replaces_previous_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let cfg = config("delta_sweep.json");
    resonwave(&["scan-alpha", "--config", cfg.to_str().unwrap(), "--out", d], &[]);
    resonwave(&["resonances", "--config", cfg.to_str().unwrap(), "--out", d], &[]);
    assert!(!dir.path().join("scan_alpha.csv").exists());
    assert!(dir.path().join("resonances.csv").exists());
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("delta_sweep.json");
    let mut tables = Vec::new();
    for (name, flag, env) in [("one", Some("1"), None), ("four", Some("4"), None), ("env", None, Some("3"))] {
        let out_dir = dir.path().join(name);
        let mut args = vec!["scan-alpha", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()];
        if let Some(n) = flag {
            args.extend(["--threads", n]);
        }
        let envs: Vec<(&str, &str)> = env.map(|n| ("RESONWAVE_THREADS", n)).into_iter().collect();
        assert_eq!(resonwave(&args, &envs).status.code(), Some(0));
        if let Some(n) = env {
            assert_eq!(manifest(&out_dir)["threads"], n.parse::<u64>().unwrap());
        }
        tables.push(sorted_lines(&out_dir.join("scan_alpha.csv")));
    }
    assert!(tables[0].len() > 1);
    assert_eq!(tables[0], tables[1]);
    assert_eq!(tables[0], tables[2]);
}

#[test]
fn bad_thread_variable_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = resonwave(
        &["resonances", "--config", config("free.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap()],
        &[("RESONWAVE_THREADS", "many")],
    );
    assert_eq!(out.status.code(), Some(2));
}
