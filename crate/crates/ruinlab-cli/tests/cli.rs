//! End-to-end checks of the binary: config validation and exit codes,
//! emission stability, format variants, and the documented report values.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicU32, Ordering};

static DIR_COUNTER: AtomicU32 = AtomicU32::new(0);

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "ruinlab-cli-{}-{}-{}",
        tag,
        std::process::id(),
        DIR_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn ruinlab(args: &[&str], envs: &[(&str, &str)]) -> (String, String, i32) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ruinlab"));
    cmd.args(args);
    cmd.env_remove("RUINLAB_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

const COUNTDOWN: &str = "\
[utility]
kind = sqrt
[model]
beta = 0.9
initial_assets = 100
[income]
kind = constant
mean = 0
[scenario]
kind = obligatory
c_fixed = 30
[simulation]
n_agents = 100
horizon = 50
master_seed = 3
[output]
path = OUT
";

fn write_config(dir: &Path, name: &str, text: &str, out: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text.replace("OUT", out)).unwrap();
    path
}

#[test]
fn validation_errors_exit_2_with_context() {
    let dir = scratch_dir("validation");
    let bad_key = write_config(&dir, "bad_key.conf", "[model]\nbta = 0.9\n", "x");
    let (_, stderr, code) = ruinlab(&["simulate", "--config", bad_key.to_str().unwrap()], &[]);
    assert_eq!(code, 2);
    assert!(stderr.contains("bta"), "stderr: {stderr}");

    let bad_beta = write_config(
        &dir,
        "bad_beta.conf",
        "[scenario]\npreset = general\n[model]\nbeta = 1.2\n",
        "x",
    );
    let (_, stderr, code) = ruinlab(&["simulate", "--config", bad_beta.to_str().unwrap()], &[]);
    assert_eq!(code, 2);
    assert!(stderr.contains("(0, 1)"), "stderr: {stderr}");

    let (_, stderr, code) = ruinlab(&["simulate", "--config", "/nonexistent.conf"], &[]);
    assert_eq!(code, 1);
    assert!(stderr.contains("cannot read"), "stderr: {stderr}");
}

#[test]
fn threads_env_must_be_a_positive_integer() {
    let (_, stderr, code) = ruinlab(&["verify", "lemma1"], &[("RUINLAB_THREADS", "abc")]);
    assert_eq!(code, 2);
    assert!(stderr.contains("RUINLAB_THREADS"));
}

#[test]
fn countdown_simulation_emits_the_exact_point_mass() {
    let dir = scratch_dir("countdown");
    let out = dir.join("run").to_str().unwrap().to_string();
    let config = write_config(&dir, "run.conf", COUNTDOWN, &out);
    let (stdout, _, code) = ruinlab(&["simulate", "--config", config.to_str().unwrap()], &[]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(format!("{out}.csv")).unwrap();
    assert_eq!(csv, "ruin_time,count\n3,100\nsurvived,0\n");
    assert!(stdout.contains("\"mode_ruin_time\": 3"));
    assert!(stdout.contains("\"median_ruin_time\": 3.0000000000000000e0"));
    // The summary echoes the resolved config.
    assert!(stdout.contains("config_echo"));
    assert!(stdout.contains("c_fixed = 3.0000000000000000e1"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = scratch_dir("stability");
    let out_a = dir.join("a").to_str().unwrap().to_string();
    let out_b = dir.join("b").to_str().unwrap().to_string();
    let config_a = write_config(&dir, "a.conf", COUNTDOWN, &out_a);
    let config_b = write_config(&dir, "b.conf", COUNTDOWN, &out_b);
    let (stdout_a, _, _) = ruinlab(&["simulate", "--config", config_a.to_str().unwrap()], &[]);
    let (stdout_b, _, _) = ruinlab(&["simulate", "--config", config_b.to_str().unwrap()], &[]);
    let strip = |s: &str, out: &str| s.replace(out, "OUT");
    assert_eq!(strip(&stdout_a, &out_a), strip(&stdout_b, &out_b));
    let csv_a = fs::read_to_string(format!("{out_a}.csv")).unwrap();
    let csv_b = fs::read_to_string(format!("{out_b}.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
}

#[test]
fn json_format_writes_a_single_document() {
    let dir = scratch_dir("jsonfmt");
    let out = dir.join("run").to_str().unwrap().to_string();
    let text = COUNTDOWN.replace("path = OUT", "format = json\npath = OUT");
    let config = write_config(&dir, "run.conf", &text, &out);
    let (_, _, code) = ruinlab(&["simulate", "--config", config.to_str().unwrap()], &[]);
    assert_eq!(code, 0);
    assert!(!PathBuf::from(format!("{out}.csv")).exists());
    let doc = fs::read_to_string(format!("{out}.json")).unwrap();
    assert!(doc.contains("\"histogram\""));
    assert!(doc.contains("\"survived\": 0"));
}

const CAKE_SOLVE: &str = "\
[utility]
kind = sqrt
[model]
beta = 0.5
initial_assets = 1
[income]
kind = constant
mean = 0
[scenario]
kind = true_agency
[grid]
a_min = 0
a_max = 10
n_points = 401
n_consumption_points = 129
[simulation]
n_agents = 20
horizon = 20
master_seed = 5
[output]
path = OUT
";

#[test]
fn solve_writes_policy_tables_and_custom_scenario_reads_them_back() {
    let dir = scratch_dir("custom");
    let out = dir.join("policy").to_str().unwrap().to_string();
    let config = write_config(&dir, "solve.conf", CAKE_SOLVE, &out);
    let (stdout, _, code) = ruinlab(&["solve", "--config", config.to_str().unwrap()], &[]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"converged\": true"));
    let csv = fs::read_to_string(format!("{out}.csv")).unwrap();
    assert!(csv.starts_with("asset,value,consumption\n"));
    assert_eq!(csv.lines().count(), 402);

    // Rough cake-eating share in the emitted table: c(a) ~ 0.75 a.
    let row: Vec<&str> = csv.lines().nth(200).unwrap().split(',').collect();
    let (asset, consumption): (f64, f64) = (row[0].parse().unwrap(), row[2].parse().unwrap());
    assert!((consumption / asset - 0.75).abs() < 0.02);

    let custom = format!(
        "[utility]\nkind = sqrt\n[model]\nbeta = 0.5\ninitial_assets = 4\n\
         [income]\nkind = constant\nmean = 0\n[scenario]\nkind = custom\npolicy_file = {out}.csv\n\
         [simulation]\nn_agents = 10\nhorizon = 30\nmaster_seed = 1\n[output]\npath = {}\n",
        dir.join("customrun").to_str().unwrap()
    );
    let custom_path = dir.join("custom.conf");
    fs::write(&custom_path, custom).unwrap();
    let (stdout, stderr, code) =
        ruinlab(&["simulate", "--config", custom_path.to_str().unwrap()], &[]);
    assert_eq!(code, 0, "stderr: {stderr}");
    // With no income the policy dissaves geometrically until the stock is
    // exhausted; every agent registers ruin at the same late period.
    assert!(stdout.contains("\"ruin_fraction\": 1.0000000000000000e0"));
    let median: f64 = stdout
        .split("\"median_ruin_time\": ")
        .nth(1)
        .and_then(|rest| rest.split(',').next())
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((5.0..30.0).contains(&median), "median {median}");
}

#[test]
fn solve_reruns_are_byte_identical() {
    let dir = scratch_dir("solve-stability");
    let out_a = dir.join("a").to_str().unwrap().to_string();
    let out_b = dir.join("b").to_str().unwrap().to_string();
    let config_a = write_config(&dir, "a.conf", CAKE_SOLVE, &out_a);
    let config_b = write_config(&dir, "b.conf", CAKE_SOLVE, &out_b);
    let (_, _, code_a) = ruinlab(&["solve", "--config", config_a.to_str().unwrap()], &[]);
    let (_, _, code_b) = ruinlab(
        &["solve", "--config", config_b.to_str().unwrap()],
        &[("RUINLAB_THREADS", "1")],
    );
    assert_eq!((code_a, code_b), (0, 0));
    // The policy tables carry no path echo, so they compare directly.
    let csv_a = fs::read_to_string(format!("{out_a}.csv")).unwrap();
    let csv_b = fs::read_to_string(format!("{out_b}.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
}

#[test]
fn solve_non_convergence_exits_3_with_diagnostics() {
    let dir = scratch_dir("nonconv");
    let text = CAKE_SOLVE.replace("[grid]", "[grid]\nmax_iterations = 1");
    let out = dir.join("x").to_str().unwrap().to_string();
    let config = write_config(&dir, "solve.conf", &text, &out);
    let (stdout, _, code) = ruinlab(&["solve", "--config", config.to_str().unwrap()], &[]);
    assert_eq!(code, 3);
    assert!(stdout.contains("\"converged\": false"));
    assert!(stdout.contains("final_residual"));
}

#[test]
fn bounds_reports_the_documented_values() {
    let (stdout, _, code) = ruinlab(
        &[
            "bounds", "--a0", "5", "--Y", "1", "--beta", "0.5", "--utility", "sqrt",
        ],
        &[],
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("\"threshold\": 4.0000000000000000e0"));
    assert!(stdout.contains("consume_all_preferred"));

    let (stdout, _, code) = ruinlab(
        &[
            "bounds", "--a0", "2", "--Y", "1", "--beta", "0.5", "--B", "1.2", "--delta", "0.1",
            "--eps", "0.1", "--T", "40",
        ],
        &[],
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("6.7379469990854"), "stdout: {stdout}");

    let (stdout, stderr, code) = ruinlab(
        &[
            "bounds", "--a0", "2", "--Y", "1", "--beta", "0.5", "--B", "0.9", "--delta", "0.1",
            "--eps", "0.1", "--T", "40",
        ],
        &[],
    );
    assert_eq!(code, 2);
    assert!(stdout.contains("mean subsistence"), "stdout: {stdout}");
    assert!(stderr.contains("inapplicable"));
}

#[test]
fn lookahead_rejects_odd_k_and_checks_the_lemma_grid() {
    let (_, _, code) = ruinlab(&["lookahead", "--k", "3"], &[]);
    assert_eq!(code, 2);

    let (stdout, _, code) = ruinlab(&["lookahead", "--lemma1-grid"], &[]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"pass\": true"));
}

#[test]
fn verify_exits_cleanly_on_each_named_sweep() {
    for name in ["thm1", "thm4", "thm5", "lemma1"] {
        let (stdout, stderr, code) = ruinlab(&["verify", name], &[]);
        assert_eq!(code, 0, "{name} failed: {stderr}");
        assert!(stdout.contains("\"pass\": true"), "{name}: {stdout}");
    }
    let (_, stderr, code) = ruinlab(&["verify", "thm9"], &[]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unknown verifier"));
}
