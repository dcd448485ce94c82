use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hardy_choquard_cli::config::{Datum, Format, RunConfig};
use serde_json::Value;
use tempfile::TempDir;

const CUBIC: &str = r#"
seed = 7

[model]
d = 3
alpha = 2.0
p = 3.0

[grid]
n = 512
r_max = 30.0
grading = { kind = "algebraic", power = 2.0 }
"#;

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_hcnls"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn config_round_trip() {
    let mut cfg = RunConfig::parse(CUBIC).unwrap();
    assert_eq!(RunConfig::parse(&cfg.canonical()).unwrap(), cfg);
    cfg.datum = Some(Datum::Pseudoconformal {
        blowup_time: 1.0,
        lambda: 0.5,
        gamma: 0.1,
    });
    cfg.outputs.formats = vec![Format::Csv, Format::JsonLines];
    cfg.dynamics.snapshot_interval = Some(0.01);
    let text = cfg.canonical();
    let back = RunConfig::parse(&text).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.canonical(), text);
}

#[test]
fn config_errors_name_the_key() {
    let err = RunConfig::parse("[model]\nd = 3\nalpha = 2.0\np = 3.0\n").unwrap_err();
    assert!(err.to_string().contains("missing field `grid`"), "{err}");
    let err = RunConfig::parse(&format!(
        "{CUBIC}\n[solver]\ntol = 1e-7\nmax_iter = 10\nspeed = 2\n"
    ))
    .unwrap_err();
    assert!(err.to_string().contains("speed"), "{err}");
    let err = RunConfig::parse("[model]\nd = 3\nalpha = 2.0\n[grid]\nn = 64\nr_max = 10.0\n")
        .unwrap_err();
    assert!(err.to_string().contains("missing field `p`"), "{err}");
}

#[test]
fn missing_grid_block_exits_with_configuration_error() {
    let dir = TempDir::new().unwrap();
    let o = run(
        dir.path(),
        "[model]\nd = 3\nalpha = 2.0\np = 3.0\n",
        &["ground-state"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grid"));
}

#[test]
fn ground_state_document() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), CUBIC, &["ground-state"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = read_json(&dir.path().join("out/ground_state.json"));
    assert!((f(&doc["pohozaev"]["ratio_choquard"]) - 3.0).abs() < 3e-3);
    assert!((f(&doc["pohozaev"]["ratio_hardy"]) - 2.0).abs() < 2e-3);
    assert_eq!(doc["converged"], Value::Bool(true));
    assert!(dir.path().join("out/profile.txt").exists());
    let manifest = read_json(&dir.path().join("out/manifest.json"));
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(
        RunConfig::parse(manifest["config"].as_str().unwrap())
            .unwrap()
            .seed,
        7
    );
}

#[test]
fn excluded_exponent_is_reported() {
    let dir = TempDir::new().unwrap();
    let o = run(
        dir.path(),
        &CUBIC.replace("p = 3.0", "p = 5.0"),
        &["ground-state"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("excluded by Pohožaev"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn small_gaussian_completes_with_small_drift() {
    let dir = TempDir::new().unwrap();
    let cfg = CUBIC.replace("p = 3.0", "p = 2.2")
        + "\n[dynamics]\ndt0 = 1e-3\nt_end = 1.0\nblowup_factor = 1000.0\nsnapshot_interval = 0.05\n\n[datum]\nkind = \"gaussian\"\namplitude = 1.0\nwidth = 1.0\n";
    let o = run(dir.path(), &cfg, &["simulate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = read_json(&dir.path().join("out/summary.json"));
    assert_eq!(doc["status"]["kind"], "Completed");
    assert!(f(&doc["mass_drift"]) <= 1e-6);
    assert!(f(&doc["energy_drift"]) <= 1e-6);
    assert_eq!(doc["initial_verdict"]["verdict"], "GlobalCaseA");
    let csv = fs::read_to_string(dir.path().join("out/trajectory.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "t,mass,energy,hardy_norm,gamma,gamma_prime,gamma_second,dt"
    );
    assert_eq!(csv.lines().count(), 22);
}

#[test]
fn pseudoconformal_datum_blows_up_near_the_configured_time() {
    let dir = TempDir::new().unwrap();
    let cfg = CUBIC.replace("p = 3.0", "p = 2.3333333333333335")
        + "\n[dynamics]\ndt0 = 2e-3\nt_end = 2.0\nblowup_factor = 10.0\n\n[datum]\nkind = \"pseudoconformal\"\nblowup_time = 1.0\nlambda = 1.0\n";
    let o = run(dir.path(), &cfg, &["simulate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = read_json(&dir.path().join("out/summary.json"));
    assert_eq!(doc["status"]["kind"], "BlowUpDetected");
    assert!((f(&doc["status"]["t_est"]) - 1.0).abs() <= 0.05);
}

#[test]
fn malformed_datum_reports_the_line() {
    let dir = TempDir::new().unwrap();
    let datum = dir.path().join("datum.txt");
    fs::write(
        &datum,
        "# d=3 alpha=2 p=3 N=512 r_max=30\n# grading=algebraic:2\n1.0 2.0\n",
    )
    .unwrap();
    let o = run(
        dir.path(),
        CUBIC,
        &["classify", "--datum", datum.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn classify_prints_witnesses() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{CUBIC}\n[datum]\nkind = \"gaussian\"\namplitude = 3.0\nwidth = 1.0\n");
    let o = run(dir.path(), &cfg, &["--format", "json-lines", "classify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("verdict: BlowUpNegativeEnergy"), "{text}");
    assert!(text.contains("E(u0) vs 0"));
    let doc = read_json(&dir.path().join("out/verdict.json"));
    assert!(!doc["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn riesz_suite_passes() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), CUBIC, &["verify", "riesz"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS"));
}

#[test]
fn hgn_suite_is_deterministic() {
    let cfg = format!("{CUBIC}\n[verify]\ntrials = 50\n");
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let oa = run(a.path(), &cfg, &["--format", "json-lines", "verify", "hgn"]);
    let ob = run(b.path(), &cfg, &["--format", "json-lines", "verify", "hgn"]);
    assert_eq!(oa.status.code(), Some(0), "{}", stdout(&oa));
    assert_eq!(stdout(&oa), stdout(&ob));
    let ta = fs::read_to_string(a.path().join("out/hgn_trials.jsonl")).unwrap();
    assert_eq!(
        ta,
        fs::read_to_string(b.path().join("out/hgn_trials.jsonl")).unwrap()
    );
    assert_eq!(ta.lines().count(), 50);
    let first = read_json(&a.path().join("out/manifest.json"));
    run(a.path(), &cfg, &["--format", "json-lines", "verify", "hgn"]);
    let again = read_json(&a.path().join("out/manifest.json"));
    assert_eq!(first["config_sha256"], again["config_sha256"]);

    let other = run(
        a.path(),
        &cfg,
        &["--seed", "8", "--format", "json-lines", "verify", "hgn"],
    );
    assert_ne!(stdout(&other), stdout(&oa));
}

#[test]
fn virial_and_phase_suites_pass() {
    let dir = TempDir::new().unwrap();
    for suite in ["virial", "phase", "pohozaev"] {
        let o = run(dir.path(), CUBIC, &["verify", suite]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stdout(&o));
    }
    let o = run(dir.path(), CUBIC, &["verify", "blowup"]);
    assert_eq!(o.status.code(), Some(2));
}
