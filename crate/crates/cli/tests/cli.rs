//! End-to-end CLI behavior: reproducible output, exit codes, config files,
//! file-backed descriptors, and report emission.

use std::process::{Command, Output};

fn formfact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_formfact"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn formfact_env(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_formfact"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

#[test]
fn certify_output_is_byte_identical_without_meta() {
    let args = [
        "hunt", "certify", "--form", "x^2+y^2", "--rhs", "factorial", "--range", "7:40",
        "--no-meta",
    ];
    let a = formfact(&args);
    let b = formfact(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn brocard_output_is_byte_identical_without_meta() {
    let args = ["hunt", "brocard", "--poly", "x^2-1", "--lmax", "30", "--no-meta"];
    let a = formfact(&args);
    let b = formfact(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unknown_dominated_reports_exit_one() {
    // Indefinite quadratic: no criterion, no complete search; the single
    // entry is an honest unknown.
    let out = formfact(&[
        "hunt", "certify", "--form", "x^2-2y^2", "--rhs", "factorial", "--range", "2:2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["entries"][0]["verdict"], "unknown");
}

#[test]
fn usage_errors_exit_two() {
    let out = formfact(&["hunt", "brocard", "--poly", "x^^2", "--lmax", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = formfact(&["hunt", "gaps", "--range", "11:100"]);
    assert_eq!(out.status.code(), Some(2)); // neither --residue nor --form
    let out = formfact(&["form", "info", "x^2+1"]);
    assert_eq!(out.status.code(), Some(2)); // not homogeneous
}

#[test]
fn report_file_and_outdir_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = formfact(&[
        "hunt", "family", "--arange", "4:6", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["all_pass"], true);

    // Relative --out goes through FORMFACT_OUTDIR.
    let out = formfact_env(
        &["hunt", "family", "--arange", "4:6", "--out", "nested/fam.json"],
        &[("FORMFACT_OUTDIR", dir.path().to_str().unwrap())],
    );
    assert!(out.status.success());
    assert!(dir.path().join("nested/fam.json").exists());
}

#[test]
fn config_file_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("formfact.conf");
    std::fs::write(&cfg, "# tiny materialization budget\ndigit_bound = 5\n").unwrap();
    let out = formfact(&[
        "hunt", "family", "--arange", "4:30", "--config",
        cfg.to_str().unwrap(),
    ]);
    // 30!/4 has far more than 5 digits: the digit bound must trip.
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("digit"), "stderr: {msg}");

    // Flags override the file.
    let out = formfact(&[
        "hunt", "family", "--arange", "4:30", "--config",
        cfg.to_str().unwrap(), "--digit-bound", "100000",
    ]);
    assert!(out.status.success());
}

#[test]
fn splitting_table_files_work() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("cubic.txt");
    std::fs::write(&table, "# sample cubic splitting data\n2 ramified\n3 1,1,1\n5 3\n").unwrap();
    let out = formfact(&[
        "pik", "count", "--table", table.to_str().unwrap(), "--n", "9",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // norm 9 = 3^2 over a totally split prime with three degree-1 primes:
    // multichoose(3, 2) = 6 ideals
    assert_eq!(v["count"], 6);

    // a prime missing from the table fails loudly
    let out = formfact(&[
        "pik", "count", "--table", table.to_str().unwrap(), "--n", "49",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn window_files_feed_generalized_factorials() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("squares.txt");
    let values: Vec<String> = (0..60i64).map(|k| (k * k).to_string()).collect();
    std::fs::write(&file, values.join("\n")).unwrap();
    let descriptor = format!("WINDOW {}", file.display());
    let out = formfact(&[
        "bharg", "order", "--set", &descriptor, "--p", "5", "--len", "5",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let vals: Vec<u64> = v["valuations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    assert_eq!(vals, vec![0, 0, 0, 1, 1, 2]);
}

#[test]
fn rep_test_cross_checks() {
    let out = formfact(&["rep", "test", "1,0,1", "45"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["criterion"]["verdict"], "representable");
    assert_eq!(v["brute_force"]["found"], true);
    assert_eq!(v["brute_force"]["witness"][0], "6");
    assert_eq!(v["brute_force"]["witness"][1], "3");
    assert_eq!(v["agree"], true);

    let out = formfact(&["rep", "test", "x^2+y^2", "21"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["criterion"]["verdict"], "not_representable");
    assert_eq!(v["brute_force"]["found"], false);
    assert_eq!(v["agree"], true);
}

#[test]
fn three_squares_subcommand() {
    let out = formfact(&["rep", "three-squares", "7"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["sum_of_three_squares"], false);
    let out = formfact(&["rep", "three-squares", "6"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["sum_of_three_squares"], true);
}

#[test]
fn fact_profile_has_legendre_exponents() {
    let out = formfact(&["fact", "profile", "--kind", "factorial", "--l", "10"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let pairs = v["exponents"].as_array().unwrap();
    assert_eq!(pairs[0][0], 2);
    assert_eq!(pairs[0][1], 8);
}

#[test]
fn density_csv_has_checkpoints() {
    let out = formfact(&[
        "form", "density", "x^2+y^2", "--upto", "4000", "--csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("bound,hits,sample,estimate"));
    assert!(text.lines().count() >= 4);
}

#[test]
fn form_info_reports_discriminants() {
    let out = formfact(&["form", "info", "2x^2+2y^2"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["degree"], 2);
    assert_eq!(v["content"], "2");
    assert_eq!(v["disc"], "-16");
    assert_eq!(v["disc_mod"], "-4");
    assert_eq!(v["irreducible"], true);
}

#[test]
fn cycletype_subcommand_matches_known_values() {
    let out = formfact(&["form", "cycletype", "x^3-2y^3", "--prime", "5"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["entries"][0]["status"], "good");
    assert_eq!(v["entries"][0]["cycle_type"][0], 1);
    assert_eq!(v["entries"][0]["cycle_type"][1], 2);
}

#[test]
fn parity_subcommand() {
    let out = formfact(&[
        "hunt", "parity", "--delta", "-4", "--rhs", "factorial", "--range", "2:7",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let entries = v["entries"].as_array().unwrap();
    let at = |l: u64| entries.iter().find(|e| e["l"] == l).unwrap();
    assert_eq!(at(2)["pass"], true);
    assert_eq!(at(7)["pass"], false);
    assert_eq!(at(7)["prime"], 7);
}
