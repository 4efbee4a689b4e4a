//! End-to-end checks of the `chanwit` binary: JSON in, JSON/CSV out, exit
//! codes as documented.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn chanwit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chanwit"))
        .args(args)
        .env_remove("CHANWIT_SEED")
        .output()
        .expect("binary runs")
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chanwit-cli-test-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

#[test]
fn utility_closedform_ampdamp() {
    let ch = write_temp(
        "ampdamp.json",
        r#"{"kind": "ampdamp", "params": {"eta": 0.5}}"#,
    );
    let g = write_temp("half.json", r#"{"g": [[0.5, 0.0], [0.0, 0.5]]}"#);
    let out = chanwit(&[
        "utility",
        "--channel",
        ch.to_str().unwrap(),
        "--game",
        g.to_str().unwrap(),
        "--mode",
        "closedform",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let expected = 0.5 * (1.0 + 0.5f64.sqrt());
    assert!((doc["value"].as_f64().unwrap() - expected).abs() < 1e-9);
    assert!(doc["provenance"]
        .as_str()
        .unwrap()
        .contains("amplitude_damping"));
}

#[test]
fn utility_closedform_identity() {
    let ch = write_temp(
        "identity.json",
        r#"{"kind": "identity", "params": {"d": 2}}"#,
    );
    let g = write_temp("half2.json", r#"{"g": [[0.5, 0.0], [0.0, 0.5]]}"#);
    let out = chanwit(&[
        "utility",
        "--channel",
        ch.to_str().unwrap(),
        "--game",
        g.to_str().unwrap(),
        "--mode",
        "closedform",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn utility_closedform_mode_rejects_raw_channels() {
    let ch = write_temp(
        "raw.json",
        r#"{"kind": "kraus", "din": 2, "dout": 2,
            "ops": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#,
    );
    let g = write_temp("half3.json", r#"{"g": [[0.5, 0.0], [0.0, 0.5]]}"#);
    let out = chanwit(&[
        "utility",
        "--channel",
        ch.to_str().unwrap(),
        "--game",
        g.to_str().unwrap(),
        "--mode",
        "closedform",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn utility_auto_falls_back_to_oracle() {
    // identity channel disguised as a raw Kraus list: no closed form, so
    // auto mode warns and runs the see-saw
    let ch = write_temp(
        "raw_id.json",
        r#"{"kind": "kraus", "din": 2, "dout": 2,
            "ops": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#,
    );
    let g = write_temp("half4.json", r#"{"g": [[0.5, 0.0], [0.0, 0.5]]}"#);
    let out = chanwit(&[
        "utility",
        "--channel",
        ch.to_str().unwrap(),
        "--game",
        g.to_str().unwrap(),
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("lower bound"));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!(doc["provenance"].as_str().unwrap().contains("seesaw"));
}

#[test]
fn utility_verify_mode_passes_on_named_channel() {
    let ch = write_temp(
        "pauli.json",
        r#"{"kind": "pauli", "params": {"lambda": [0.7, 0.1, 0.1, 0.1]}}"#,
    );
    let g = write_temp("g07.json", r#"{"g": [[0.7, 0.0], [0.0, 0.3]]}"#);
    let out = chanwit(&[
        "utility",
        "--channel",
        ch.to_str().unwrap(),
        "--game",
        g.to_str().unwrap(),
        "--mode",
        "verify",
        "--seed",
        "11",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["pass"], serde_json::Value::Bool(true));
}

#[test]
fn malformed_inputs_exit_2() {
    let ch = write_temp("bad.json", "{ not json");
    let g = write_temp("half5.json", r#"{"g": [[0.5, 0.0], [0.0, 0.5]]}"#);
    let out = chanwit(&[
        "utility",
        "--channel",
        ch.to_str().unwrap(),
        "--game",
        g.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = chanwit(&[
        "utility",
        "--channel",
        "/nonexistent.json",
        "--game",
        g.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_family_cloning_passes() {
    let out = chanwit(&["verify", "--family", "cloning"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("family,params,closed,oracle,delta,pass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn figure_output_is_deterministic() {
    let out_path = std::env::temp_dir().join(format!("chanwit-fig-{}.csv", std::process::id()));
    let a = chanwit(&[
        "figure",
        "--figure",
        "ampdamp",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(a.status.success());
    let first = fs::read(&out_path).unwrap();
    let b = chanwit(&[
        "figure",
        "--figure",
        "ampdamp",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(b.status.success());
    let second = fs::read(&out_path).unwrap();
    assert_eq!(first, second);
    assert_eq!(first.split(|&b| b == b'\n').count() - 1, 102);
    fs::remove_file(&out_path).ok();
}

#[test]
fn oracle_runs_are_seed_reproducible() {
    let ch = write_temp(
        "depol.json",
        r#"{"kind": "depolarizing", "params": {"lambda": 0.6, "d": 2}}"#,
    );
    let g = write_temp("unb.json", r#"{"g": [[0.5, -0.5], [-0.5, 0.5]]}"#);
    let run = || {
        let out = chanwit(&[
            "utility",
            "--channel",
            ch.to_str().unwrap(),
            "--game",
            g.to_str().unwrap(),
            "--mode",
            "oracle",
            "--seed",
            "123",
        ]);
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run(), run());
}
