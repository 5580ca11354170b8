use std::path::Path;
use std::process::{Command, Output};

fn alphamap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alphamap")).args(args).output().expect("spawn alphamap")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn minimize_writes_result_profile_and_history() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv, hist) = (dir.path().join("r.json"), dir.path().join("p.csv"), dir.path().join("h.csv"));
    let run = alphamap(&[
        "minimize", "--alpha", "1.2", "--class-m", "2", "--nodes", "129",
        "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap(), "--history", hist.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let v = json(&out);
    assert_eq!(v["converged"], true);
    assert_eq!(v["certificate"]["ok"], true);
    assert_eq!(v["profile"]["m"], 2);
    let profile = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(profile.lines().next(), Some("r,f"));
    assert_eq!(profile.lines().count(), 130);
    let history = std::fs::read_to_string(&hist).unwrap();
    assert_eq!(history.lines().next(), Some("iter,energy,grad_norm"));
}

#[test]
fn minimize_accepts_its_own_profile_as_init() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.json");
    let profile = dir.path().join("p.json");
    assert_eq!(code(&alphamap(&["minimize", "--alpha", "1.3", "--class-m", "2", "--nodes", "65", "--out", first.to_str().unwrap()])), 0);
    std::fs::write(&profile, json(&first)["profile"].to_string()).unwrap();
    let second = dir.path().join("b.json");
    let init = format!("file:{}", profile.display());
    let run = alphamap(&["minimize", "--alpha", "1.3", "--class-m", "2", "--nodes", "65", "--init", &init, "--out", second.to_str().unwrap()]);
    assert_eq!(code(&run), 0);
    assert!(json(&second)["iterations"].as_u64().unwrap() <= 1);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["minimize", "--alpha", "0.9", "--class-m", "1"][..],
        &["minimize", "--alpha", "1.1"],
        &["minimize", "--alpha", "1.1", "--class-m", "1", "--init", "lambda:2"],
        &["minimize", "--alpha", "1.1", "--class-m", "1", "--nodes", "4"],
        &["minimize", "--alpha", "1.1", "--class-m", "1", "--init", "bogus"],
        &["minimize", "--alpha", "1.1", "--class-m", "1", "--quad-points", "12"],
        &["family", "--kind", "lambda"],
        &["sweep", "--class-m", "2", "--alpha-from", "1.02", "--alpha-to", "1.2", "--steps", "3"],
        &["no-such-command"],
    ] {
        assert_eq!(code(&alphamap(args)), 2, "{args:?}");
    }
}

#[test]
fn unreadable_init_file_is_a_usage_error() {
    let run = alphamap(&["minimize", "--alpha", "1.1", "--class-m", "2", "--nodes", "33", "--init", "file:/nonexistent/p.json"]);
    assert_eq!(code(&run), 2);
    assert!(String::from_utf8_lossy(&run.stderr).contains("/nonexistent/p.json"));
}

#[test]
fn iteration_cap_fails_certification() {
    let run = alphamap(&["minimize", "--alpha", "1.1", "--class-m", "2", "--nodes", "257", "--max-iters", "2"]);
    assert_eq!(code(&run), 1);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let out = dir.path().join("r.json");
    std::fs::write(&cfg, r#"{"alpha": 1.5, "class-m": 1, "nodes": 33}"#).unwrap();
    let run = alphamap(&["minimize", "--config", cfg.to_str().unwrap(), "--alpha", "1.2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0);
    let v = json(&out);
    assert_eq!(v["report"]["alpha"], 1.2);
    assert_eq!(v["profile"]["nodes"].as_array().unwrap().len(), 33);
}

#[test]
fn sweep_csv_has_fixed_header_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        let run = alphamap(&[
            "sweep", "--class-m", "2", "--alpha-from", "1.3", "--alpha-to", "1.1", "--steps", "3",
            "--nodes", "101", "--csv", path.to_str().unwrap(),
        ]);
        assert_eq!(code(&run), 0);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "alpha,e_alpha,dirichlet,degree,lower_bound,family_upper,e_max,r_conc,r_conc_pow,signed_gap_to_8pi,iters,grad_norm,converged"
    );
    assert_eq!(text.lines().count(), 5);
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
}

#[test]
fn verify_and_family_report() {
    let run = alphamap(&["verify", "--samples", "200"]);
    assert_eq!(code(&run), 0);
    assert!(String::from_utf8_lossy(&run.stdout).contains("PASS"));
    let dir = tempfile::tempdir().unwrap();
    let (out, csv) = (dir.path().join("f.json"), dir.path().join("f.csv"));
    let run = alphamap(&[
        "family", "--kind", "lambda", "--lambda", "3", "--alpha", "1.1",
        "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0);
    let v = json(&out);
    assert_eq!(v["params"]["kind"], "lambda");
    assert_eq!(v["certificate"]["ok_majorant"], true);
    assert!((v["report"]["e_max"].as_f64().unwrap() - 36.0).abs() < 0.5);
}
