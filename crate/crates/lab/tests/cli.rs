use std::path::Path;
use std::process::{Command, Output};

use loewner_lab::config::{parse_args, parse_rendered, render};

fn lab(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_loewner-lab"));
    cmd.args(args).env_remove("LOEWNER_LAB_OUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("LOEWNER_LAB_OUT_DIR", d);
    }
    cmd.output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    lab(args, None).status.code().unwrap()
}

#[test]
fn exit_statuses() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["kdv-run", "--help"]), 0);
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["no-such-command"]), 2);
    assert_eq!(code(&["witt-check", "--order", "ten"]), 2);
    assert_eq!(code(&["witt-check", "--order", "1"]), 2);
    assert_eq!(code(&["sle-sample"]), 2);
    assert_eq!(code(&["lk-evolve", "--order", "500"]), 2);
    assert_eq!(code(&["kdv-run", "--amplitude", "3", "--dt", "0.05"]), 3);
    assert_eq!(code(&["witt-check", "--order", "3", "--out", "/nonexistent/dir/report.jsonl"]), 4);
    assert_eq!(code(&["golden-compare", "--report", "/nonexistent/a", "--golden", "/nonexistent/b"]), 4);
    assert_eq!(code(&["witt-check", "--config", "/nonexistent/run.cfg"]), 4);
}

#[test]
fn missing_seed_message() {
    let out = lab(&["circle-flow"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
    assert!(out.stdout.is_empty());
    assert_eq!(code(&["circle-flow", "--zero-noise", "--t-end", "0.01", "--dt", "1e-3"]), 0);
}

#[test]
fn line_json_shape() {
    let out = lab(&["kdv-run", "--modes", "8", "--dt", "1e-3", "--t-end", "0.01", "--every", "5"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let kinds: Vec<String> = text
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["kind"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(kinds.first().map(String::as_str), Some("header"));
    assert_eq!(kinds.iter().filter(|k| *k == "row").count(), 3);
    assert_eq!(&kinds[kinds.len() - 2..], ["summary", "diagnostics"]);
    assert!(!text.contains("wall_time_s"));
    let timed = lab(&["witt-check", "--order", "3", "--timing"], None);
    assert!(String::from_utf8_lossy(&timed.stdout).contains("wall_time_s"));
}

#[test]
fn golden_compare_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let args = ["geodesic", "--order", "3", "--steps", "200", "--seed", "4"];
    let run = |path: &Path, timing: bool| {
        let mut v: Vec<&str> = args.to_vec();
        v.extend(["--out", path.to_str().unwrap()]);
        if timing {
            v.push("--timing");
        }
        assert_eq!(code(&v), 0);
    };
    run(&a, false);
    run(&b, true);
    let cmp = |extra: &[&str]| {
        let mut v = vec!["golden-compare", "--report", a.to_str().unwrap(), "--golden", b.to_str().unwrap()];
        v.extend(extra);
        lab(&v, None)
    };
    let same = cmp(&[]);
    assert_eq!(same.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&same.stdout).starts_with("PASS"));

    let text = std::fs::read_to_string(&b).unwrap();
    let summary = text.lines().find(|l| l.contains("\"kind\":\"summary\"")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(summary).unwrap();
    let h = v["hamiltonian_relative_drift"].as_f64().unwrap();
    v["hamiltonian_relative_drift"] = (h + 1e-9).into();
    std::fs::write(&b, text.replace(summary, &v.to_string())).unwrap();
    let off = cmp(&[]);
    assert_eq!(off.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&off.stdout).contains("hamiltonian_relative_drift"));
    assert_eq!(cmp(&["--atol", "1e-8"]).status.code(), Some(0));

    std::fs::write(&b, text.lines().take(2).collect::<Vec<_>>().join("\n")).unwrap();
    assert_eq!(cmp(&[]).status.code(), Some(3));
    assert_eq!(cmp(&["--rtol", "-1"]).status.code(), Some(2));
}

#[test]
fn out_dir_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["witt-check", "--order", "3", "--format", "csv"], Some(dir.path()));
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("witt-check.csv")).unwrap();
    assert!(csv.starts_with("check,point,m,n,residual,exact_zero\n"));
    let explicit = dir.path().join("x.jsonl");
    let out = lab(&["witt-check", "--order", "3", "--out", explicit.to_str().unwrap()], Some(dir.path()));
    assert!(out.status.success());
    assert!(explicit.exists() && !dir.path().join("witt-check.jsonl").exists());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# kdv\ncommand=kdv-run\nmodes=8\ndt=0.001\nt_end=0.02\nevery=10\n").unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = lab(&["--config", c], None);
    let with_sub = lab(&["kdv-run", "--config", c], None);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, with_sub.stdout);
    let explicit = lab(&["kdv-run", "--modes", "8", "--dt", "0.001", "--t-end", "0.02", "--every", "10"], None);
    assert_eq!(from_file.stdout, explicit.stdout);
    let short = lab(&["kdv-run", "--modes", "8", "--dt", "0.001", "--T", "0.02", "--every", "10"], None);
    assert_eq!(short.stdout, explicit.stdout);
    let overridden = lab(&["kdv-run", "--config", c, "--modes", "16"], None);
    assert!(String::from_utf8_lossy(&overridden.stdout).contains("\"modes\":\"16\""));
    assert_eq!(code(&["witt-check", "--config", c]), 2);
    std::fs::write(&cfg, "modes 8\n").unwrap();
    assert_eq!(code(&["kdv-run", "--config", c]), 2);
}

#[test]
fn rendered_config_round_trips_and_reruns_identically() {
    let config = parse_args(["loewner-lab", "sle-sample", "--seed", "3", "--kappa", "3", "--z", "0.5:2", "--paths", "2"]).unwrap();
    let text = render(&config);
    assert!(text.starts_with("command=sle-sample\n"));
    let back = parse_rendered(&text).unwrap();
    assert_eq!(back, config);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("rendered.cfg");
    std::fs::write(&cfg, &text).unwrap();
    let a = lab(&["--config", cfg.to_str().unwrap()], None);
    let b = lab(&["sle-sample", "--seed", "3", "--kappa", "3", "--z", "0.5:2", "--paths", "2"], None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
