use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn jumpexit(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jumpexit"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_passes_on_builtin_configs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["analytic.toml", "stable_half.toml", "stable_three_halves.toml", "censored.toml"] {
        let out = dir.path().join(name);
        let o = jumpexit(&["verify", "--config", &config(name)], &out);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        let report = fs::read_to_string(out.join("verify.csv")).unwrap();
        let rows: Vec<&str> = report.lines().skip(2).collect();
        assert!(rows.len() >= 7);
        for r in rows {
            assert!(r.ends_with(",pass"), "{name}: {r}");
            let value: f64 = r.split(',').nth(1).unwrap().parse().unwrap();
            assert!(value <= 1e-10);
        }
    }
}

#[test]
fn compare_on_analytic_config_is_within_three_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let o = jumpexit(&["compare", "--config", &config("analytic.toml"), "--seed", "3"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    let mut n = 0;
    for line in text.lines().skip(2) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let (t, s, z) = (f[0], f[1], f[4]);
        assert!(z.abs() <= 3.0, "t = {t}: z = {z}");
        assert!((s - (-0.1 * t).exp()).abs() < 3e-3);
        n += 1;
    }
    assert_eq!(n, 5);
}

#[test]
fn absorbing_set_outside_collar_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[domain]\nomega = [[0.0, 1.0]]\nomega_d = [[-1.0, 0.0], [2.5, 3.0]]\n").unwrap();
    let o = jumpexit(&["solve", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(report["kind"], "validation");
    assert_eq!(report["exit_code"], 2);
    assert!(report["message"].as_str().unwrap().contains("[2.5, 3]"));
}

#[test]
fn other_validation_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        "[grid]\nh = 0.5\n",
        "[kernel]\nlambda = 1.0\n[domain]\nlambda = 2.0\n",
        "[mc]\nn_paths = 0\n",
        "[kernel]\nfamily = \"truncated_stable\"\nepsilon = 0.0\n",
        "[grid]\nunknown = 1\n",
        "[domain]\nomega_d = \"empty\"\n",
    ];
    for (k, text) in cases.iter().enumerate() {
        let cfg = dir.path().join(format!("c{k}.toml"));
        fs::write(&cfg, text).unwrap();
        let o = jumpexit(&["moments", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
        assert_eq!(o.status.code(), Some(2), "{text}: {}", stderr(&o));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("stable_half.toml");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        for cmd in ["simulate", "solve", "moments"] {
            let o = jumpexit(&[cmd, "--config", &cfg, "--threads", threads], out);
            assert!(o.status.success(), "{}", stderr(&o));
        }
    }
    for f in ["ensemble.csv", "mc_survival.csv", "survival.csv", "met.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn every_output_carries_the_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let o = jumpexit(&["exit-time", "--config", &config("analytic.toml")], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let mut hashes = Vec::new();
    for entry in fs::read_dir(dir.path()).unwrap() {
        let text = fs::read_to_string(entry.unwrap().path()).unwrap();
        let first = text.lines().next().unwrap();
        let hash = first.strip_prefix("# config_hash=").expect("hash header");
        assert_eq!(hash.len(), 64);
        hashes.push(hash.to_string());
    }
    assert_eq!(hashes.len(), 3);
    assert!(hashes.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn seed_override_changes_hash_and_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    fs::write(&cfg, "[mc]\nn_paths = 200\nseed = 1\n").unwrap();
    let run = |seed: &str, out: &str| {
        let out = dir.path().join(out);
        let o = jumpexit(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", seed], &out);
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read_to_string(out.join("ensemble.csv")).unwrap()
    };
    let (one, two) = (run("1", "a"), run("2", "b"));
    assert_ne!(one.lines().next(), two.lines().next());
    assert_ne!(one.lines().nth(2), two.lines().nth(2));
    let resolved = fs::read_to_string(dir.path().join("b/config.resolved.toml")).unwrap();
    assert!(resolved.contains("seed = 2"));
    assert!(resolved.contains("t_max = "));
}

#[test]
fn path_regimes_are_emitted() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["compound_poisson", "stable_half", "stable_three_halves", "brownian"] {
        let out = dir.path().join(name);
        let o = jumpexit(&["paths", "--config", &config(&format!("paths/{name}.toml"))], &out);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        let text = fs::read_to_string(out.join("paths.csv")).unwrap();
        let mut ids = std::collections::BTreeSet::new();
        let mut t_last = 0.0f64;
        for line in text.lines().skip(2) {
            let f: Vec<&str> = line.split(',').collect();
            ids.insert(f[0].parse::<u64>().unwrap());
            t_last = t_last.max(f[1].parse().unwrap());
        }
        assert_eq!(ids.len(), 5, "{name}");
        assert!((t_last - 50.0).abs() < 1e-9, "{name}: {t_last}");
    }
}
