use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn paw(args: &[&str], config: &Path, out: &Path, seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_paw"));
    cmd.args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out);
    cmd.env_remove("PAW_SEED");
    if let Some(s) = seed {
        cmd.env("PAW_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("config.json");
    fs::write(&path, text).unwrap();
    path
}

fn summary(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

#[test]
fn clock_verify_d16() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let res = paw(&["clock", "verify"], &configs().join("clock_d16.json"), &out, None);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let s = summary(&out.join("clock_summary.json"));
    assert_eq!(s["pass"], Value::Bool(true));
    for check in s["checks"].as_array().unwrap() {
        assert!(check["value"].as_f64().unwrap() <= 1e-10);
    }
    let (header, rows) = csv_rows(&out.join("age_rate.csv"));
    assert_eq!(header, "n,energy,age_rate");
    assert_eq!(rows.len(), 16);
    let (header, _) = csv_rows(&out.join("conjugacy.csv"));
    assert_eq!(header, "index,time_shift_error,energy_shift_error");
}

#[test]
fn universe_born_qubit() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let res = paw(&["universe", "born"], &configs().join("universe_qubit.json"), &out, None);
    assert_eq!(res.status.code(), Some(0));
    let (header, rows) = csv_rows(&out.join("born.csv"));
    assert_eq!(
        header,
        "observable,m,t_m,outcome,p_conditional,p_born,abs_diff"
    );
    assert_eq!(rows.len(), 8 * 2);
    for r in rows {
        assert!(r[6].parse::<f64>().unwrap() <= 1e-10);
    }
}

#[test]
fn universe_evolve_both_clocks() {
    for name in ["universe_qubit.json", "universe_povm.json"] {
        let tmp = TempDir::new().unwrap();
        let out = tmp.path().join("out");
        let res = paw(&["universe", "evolve"], &configs().join(name), &out, None);
        assert_eq!(res.status.code(), Some(0), "{name}");
        let (header, rows) = csv_rows(&out.join("trajectory.csv"));
        assert_eq!(header, "m,t_m,norm,infidelity");
        assert_eq!(rows[0][3].parse::<f64>().unwrap(), 0.0);
        for r in rows {
            assert!(r[3].parse::<f64>().unwrap() <= 1e-10);
        }
    }
}

#[test]
fn arrow_entropy_columns() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let res = paw(&["arrow", "entropy"], &configs().join("arrow_zz.json"), &out, None);
    assert_eq!(res.status.code(), Some(0));
    let (header, rows) = csv_rows(&out.join("entropy.csv"));
    assert_eq!(header, "m,t_m,entropy,mutual_information");
    assert_eq!(rows.len(), 64);
    let peak = summary(&out.join("arrow_summary.json"))["peak_entropy"]
        .as_f64()
        .unwrap();
    assert!((peak - 2f64.ln()).abs() <= 1e-8);
}

#[test]
fn arrow_without_mutual_information() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        &tmp,
        r#"{"clock": {"kind": "povm"},
            "system": {"energies": [1.75, -0.75, -1.25, 0.25]},
            "bipartition": {"first": [1, 1], "second": [1, 0]}}"#,
    );
    let out = tmp.path().join("out");
    let res = paw(&["arrow", "entropy"], &cfg, &out, None);
    assert_eq!(res.status.code(), Some(0));
    let (header, rows) = csv_rows(&out.join("entropy.csv"));
    assert_eq!(header, "m,t_m,entropy");
    // |0⟩ on the second qubit is an eigenstate of its σz: no entanglement.
    for r in rows {
        assert!(r[2].parse::<f64>().unwrap() <= 1e-10);
    }
}

#[test]
fn povm_and_continuum_headers() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("povm");
    let res = paw(&["povm", "verify"], &configs().join("povm_three_level.json"), &out, None);
    assert_eq!(res.status.code(), Some(0));
    let (header, _) = csv_rows(&out.join("delta_sums.csv"));
    assert_eq!(header, "delta_r,energy_sum,re,im,abs,expected");
    let s = summary(&out.join("povm_summary.json"));
    assert_eq!(s["labels"], serde_json::json!([0, 2, 5]));

    let out = tmp.path().join("cont");
    let res = paw(
        &["continuum", "check"],
        &configs().join("continuum_three_level.json"),
        &out,
        None,
    );
    assert_eq!(res.status.code(), Some(0));
    let (header, rows) = csv_rows(&out.join("derivative.csv"));
    assert_eq!(header, "h,residual");
    assert_eq!(rows.len(), 4);
}

#[test]
fn irrational_povm_is_reported_not_asserted() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let res = paw(&["povm", "verify"], &configs().join("povm_sqrt2.json"), &out, None);
    assert_eq!(res.status.code(), Some(0));
    let s = summary(&out.join("povm_summary.json"));
    assert_eq!(s["exact"], Value::Bool(false));
    assert!(s["povm_identity_residual"].as_f64().unwrap() > 1e-6);
    assert_eq!(s["labels"], serde_json::json!([0, 29, 41]));
}

#[test]
fn missing_spectrum_writes_nothing() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, r#"{"clock": {"kind": "povm"}}"#);
    let out = tmp.path().join("out");
    let res = paw(&["povm", "verify"], &cfg, &out, None);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("energies"));
    assert!(!out.exists());
}

#[test]
fn config_errors_exit_two() {
    let cases = [
        (vec!["universe", "evolve"], r#"{"clock": {"kind": "hermitian"}}"#),
        (vec!["clock", "verify"], r#"{"clock": {"kind": "hermitian", "dim": 8}, "colour": 1}"#),
        (vec!["clock", "verify"], r#"{"clock": {"kind": "hermitian"}}"#),
        (vec!["clock", "verify"], "not json"),
        (
            vec!["universe", "evolve"],
            r#"{"clock": {"kind": "hermitian"},
                "system": {"energies": [0, 1, 1.4142135623730951], "coefficients": [1, 0, 0]}}"#,
        ),
        (
            vec!["universe", "evolve"],
            r#"{"clock": {"kind": "hermitian"},
                "system": {"energies": [0, 1], "coefficients": [1, 1]}}"#,
        ),
        (
            vec!["continuum", "check"],
            r#"{"clock": {"kind": "continuum", "energies": [0, 1, 2.5], "nodes": 4}}"#,
        ),
        (
            vec!["arrow", "entropy"],
            r#"{"clock": {"kind": "hermitian"}, "system": {"energies": [0, 1, 2]},
                "bipartition": {"first": [1, 0], "second": [1, 0]}}"#,
        ),
    ];
    for (args, text) in cases {
        let tmp = TempDir::new().unwrap();
        let cfg = write_config(&tmp, text);
        let out = tmp.path().join("out");
        let res = paw(&args, &cfg, &out, None);
        assert_eq!(res.status.code(), Some(2), "{text}");
        assert!(!out.exists(), "{text}");
    }
}

#[test]
fn incommensurate_message_suggests_povm() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        &tmp,
        r#"{"clock": {"kind": "hermitian"},
            "system": {"energies": [0, 1, 1.4142135623730951], "coefficients": [1, 0, 0]}}"#,
    );
    let res = paw(&["universe", "evolve"], &cfg, &tmp.path().join("out"), None);
    assert!(String::from_utf8_lossy(&res.stderr).contains("POVM"));
}

#[test]
fn tight_tolerance_exits_one_and_names_quantity() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let res = Command::new(env!("CARGO_BIN_EXE_paw"))
        .args(["clock", "verify", "--tolerance-scale", "1e-30", "--config"])
        .arg(configs().join("clock_d16.json"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("FAIL gram_error"));
    let s = summary(&out.join("clock_summary.json"));
    assert_eq!(s["pass"], Value::Bool(false));
    let scale = s["tolerance_scale"].as_f64().unwrap();
    assert!((scale / 1e-30 - 1.0).abs() < 1e-12);
}

#[test]
fn nonpositive_tolerance_scale_rejected() {
    let tmp = TempDir::new().unwrap();
    let res = Command::new(env!("CARGO_BIN_EXE_paw"))
        .args(["clock", "verify", "--tolerance-scale=-1", "--config"])
        .arg(configs().join("clock_d16.json"))
        .arg("--out")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(2));
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn outputs_are_byte_identical() {
    let runs = [
        (vec!["universe", "born"], "universe_povm.json"),
        (vec!["arrow", "entropy"], "arrow_zz.json"),
        (vec!["continuum", "check"], "continuum_three_level.json"),
    ];
    for (args, name) in runs {
        let tmp = TempDir::new().unwrap();
        let a = tmp.path().join("a");
        let b = tmp.path().join("b");
        paw(&args, &configs().join(name), &a, None);
        paw(&args, &configs().join(name), &b, None);
        assert_eq!(dir_contents(&a), dir_contents(&b), "{name}");
    }
}

#[test]
fn seed_controls_random_observables() {
    let tmp = TempDir::new().unwrap();
    let cfg = configs().join("universe_povm.json");
    let run = |dir: &str, seed: Option<&str>| {
        let out = tmp.path().join(dir);
        let res = paw(&["universe", "born"], &cfg, &out, seed);
        assert_eq!(res.status.code(), Some(0));
        fs::read(out.join("born.csv")).unwrap()
    };
    let a = run("a", Some("7"));
    let b = run("b", Some("7"));
    let c = run("c", Some("8"));
    assert_eq!(a, b);
    assert_ne!(a, c);

    let res = paw(&["universe", "born"], &cfg, &tmp.path().join("bad"), Some("seven"));
    assert_eq!(res.status.code(), Some(2));
    assert!(!tmp.path().join("bad").exists());
}
