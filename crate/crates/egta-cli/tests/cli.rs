//! End-to-end runs of the `egta` binary: exit codes, file outputs, CSV
//! round-trips, and determinism across reruns.

use std::path::Path;
use std::process::{Command, Output};

fn egta(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_egta"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("exp.toml");
    std::fs::write(
        &path,
        r#"
[game]
kind = "example1"

[run]
seeds = [0, 1]
iterations = 5
initial = { policy = "fixed_index", index = 0 }
workers = 2

[[mss]]
kind = "nash"

[[mss]]
kind = "uniform"

[eval]
solvers = ["nash", "uniform"]
"#,
    )
    .unwrap();
    path
}

#[test]
fn psro_batch_writes_traces_and_curves() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path());
    let out = egta(&["psro", "--config", "exp.toml", "--out", "run"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    for name in [
        "game.json",
        "config.toml",
        "trace_nash_s0.json",
        "trace_uniform_s1.csv",
        "curves.csv",
    ] {
        assert!(tmp.path().join("run").join(name).exists(), "missing {name}");
    }

    // Rerunning into the same directory refuses without --overwrite.
    let again = egta(&["psro", "--config", "exp.toml", "--out", "run"], tmp.path());
    assert_eq!(again.status.code(), Some(1));
    let forced = egta(
        &["psro", "--config", "exp.toml", "--out", "run", "--overwrite"],
        tmp.path(),
    );
    assert!(forced.status.success());
}

#[test]
fn curves_csv_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path());
    let out = egta(&["psro", "--config", "exp.toml", "--out", "run"], tmp.path());
    assert!(out.status.success());

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(tmp.path().join("run/curves.csv"))
        .unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        vec!["run_id", "mss", "eval_solver", "iteration", "regret", "reference"]
    );
    let mut rows = 0;
    for record in reader.records() {
        let record = record.unwrap();
        let iteration: usize = record[3].parse().unwrap();
        let regret: f64 = record[4].parse().unwrap();
        assert!(iteration >= 1);
        assert!(regret >= 0.0);
        assert!(matches!(&record[5], "true_game" | "combined_game"));
        rows += 1;
    }
    assert!(rows > 0);

    // The golden example1 values survive the round trip: DO-under-NE starts
    // at 6 and converges to 0.
    let text = std::fs::read_to_string(tmp.path().join("run/curves.csv")).unwrap();
    assert!(text.starts_with("# config_hash="));
    assert!(text.contains("nash-s0,nash,nash,1,6.0,true_game"));
    assert!(text.contains("nash-s0,nash,nash,3,0.0,true_game"));

    // The flat trace CSV parses back into the rows that produced it.
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(tmp.path().join("run/trace_uniform_s0.csv"))
        .unwrap();
    let rows: Vec<(usize, usize, usize, bool)> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (
                r[0].parse().unwrap(),
                r[1].parse().unwrap(),
                r[2].parse().unwrap(),
                r[3].parse().unwrap(),
            )
        })
        .collect();
    let game = std::sync::Arc::new(egta::library::example1_game());
    let trace = egta::psro::run_psro(
        game,
        egta::solvers::MetaSolver::Uniform,
        vec![0, 0],
        5,
        0,
    )
    .unwrap();
    assert_eq!(rows, trace.csv_rows());
}

#[test]
fn seed_list_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path());
    let out = egta(
        &[
            "psro",
            "--config",
            "exp.toml",
            "--out",
            "run",
            "--seed-list",
            "7,9",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(tmp.path().join("run/trace_nash_s7.json").exists());
    assert!(tmp.path().join("run/trace_uniform_s9.json").exists());
    assert!(!tmp.path().join("run/trace_nash_s0.json").exists());
}

#[test]
fn reruns_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path());
    assert!(egta(&["psro", "--config", "exp.toml", "--out", "a"], tmp.path())
        .status
        .success());
    assert!(egta(&["psro", "--config", "exp.toml", "--out", "b"], tmp.path())
        .status
        .success());
    for name in ["curves.csv", "trace_uniform_s0.json", "game.json"] {
        let a = std::fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs across reruns");
    }
}

#[test]
fn generated_game_round_trips_bit_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let out = egta(
        &["generate", "--kind", "kuhn_normal_form", "--out", "kuhn.json"],
        tmp.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(tmp.path().join("kuhn.json")).unwrap();
    let game: egta::game::NormalFormGame = serde_json::from_str(&text).unwrap();
    assert_eq!(game.strategy_counts(), &[64, 64]);
    assert_eq!(&game, &egta::library::kuhn_normal_form());

    let bad = egta(&["generate", "--kind", "nonsense", "--out", "x.json"], tmp.path());
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn invalid_configs_are_rejected_with_field_names() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.toml");
    std::fs::write(
        &path,
        "[game]\nkind = \"example1\"\n\n[run]\nseeds = [0]\niterations = 0\n\n[[mss]]\nkind = \"nash\"\n",
    )
    .unwrap();
    let out = egta(&["psro", "--config", "bad.toml", "--out", "run"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("run.iterations"), "diagnostic: {stderr}");

    std::fs::write(
        &path,
        "[game]\nkind = \"example1\"\n\n[run]\nseeds = []\niterations = 3\n\n[[mss]]\nkind = \"nash\"\n",
    )
    .unwrap();
    let out = egta(&["psro", "--config", "bad.toml", "--out", "run2"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("run.seeds"));
}

#[test]
fn eval_subcommands_on_stored_traces() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path());
    assert!(egta(&["psro", "--config", "exp.toml", "--out", "run"], tmp.path())
        .status
        .success());

    let consistency = egta(
        &[
            "eval",
            "consistency",
            "--traces",
            "run/trace_nash_s0.json",
            "run/trace_uniform_s0.json",
            "--solver",
            "nash",
            "--out",
            "report",
        ],
        tmp.path(),
    );
    assert!(
        consistency.status.success(),
        "{}",
        String::from_utf8_lossy(&consistency.stderr)
    );
    assert!(tmp.path().join("report/report.json").exists());
    assert!(tmp.path().join("report/curves.csv").exists());
    let summary = std::fs::read_to_string(tmp.path().join("report/summary.txt")).unwrap();
    assert!(summary.contains("consistency_ok"));

    let select = egta(
        &[
            "eval",
            "select",
            "--traces",
            "run/trace_nash_s0.json",
            "run/trace_uniform_s0.json",
            "--candidates",
            "nash,uniform",
            "--out",
            "selection",
        ],
        tmp.path(),
    );
    assert!(
        select.status.success(),
        "{}",
        String::from_utf8_lossy(&select.stderr)
    );
    let stdout = String::from_utf8_lossy(&select.stdout);
    assert!(stdout.contains("nash"), "selection output: {stdout}");

    let combined = egta(
        &[
            "eval",
            "combined",
            "--traces",
            "run/trace_nash_s0.json",
            "run/trace_uniform_s0.json",
            "--solver",
            "nash",
            "--out",
            "combined",
        ],
        tmp.path(),
    );
    assert!(combined.status.success());
    let text = std::fs::read_to_string(tmp.path().join("combined/curves.csv")).unwrap();
    assert!(text.contains("combined_game"));
    assert!(text.contains("true_game"));
}

#[test]
fn mrcp_command_modes() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(egta(
        &["generate", "--kind", "example1", "--out", "game.json"],
        tmp.path()
    )
    .status
    .success());

    let projected = egta(
        &[
            "mrcp",
            "--game",
            "game.json",
            "--indices",
            "0,2;0,2",
            "--method",
            "projected",
            "--out",
            "mrcp.csv",
        ],
        tmp.path(),
    );
    assert!(projected.status.success());
    let text = std::fs::read_to_string(tmp.path().join("mrcp.csv")).unwrap();
    let regret: f64 = text
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert!(regret <= 4.0 + 1e-9);

    // Oversized grids fail with the numerical exit code.
    let generate = egta(
        &["generate", "--kind", "kuhn_normal_form", "--out", "kuhn.json"],
        tmp.path(),
    );
    assert!(generate.status.success());
    let fail = egta(
        &[
            "mrcp",
            "--game",
            "kuhn.json",
            "--indices",
            "0,1,2,3,4,5,6,7,8,9,10,11;0,1,2,3,4,5,6,7,8,9,10,11",
            "--method",
            "brute_force",
            "--grid-step",
            "0.01",
            "--out",
            "never.csv",
        ],
        tmp.path(),
    );
    assert_eq!(fail.status.code(), Some(2));
}

#[test]
fn reproduce_golden_targets() {
    let tmp = tempfile::tempdir().unwrap();
    let table2 = egta(&["reproduce", "--target", "table2", "--out", "t2"], tmp.path());
    assert!(table2.status.success());
    let stdout = String::from_utf8_lossy(&table2.stdout);
    assert!(stdout.contains("OK"));
    let csv = std::fs::read_to_string(tmp.path().join("t2/table2.csv")).unwrap();
    assert!(csv.contains("fp,4,0,a1|a2|a3,0.25|0.25|0.5"));

    let table7 = egta(&["reproduce", "--target", "table7", "--out", "t7"], tmp.path());
    assert!(table7.status.success());
    let csv = std::fs::read_to_string(tmp.path().join("t7/table7.csv")).unwrap();
    assert!(csv.contains("(a2,a2),10.0"));

    let unknown = egta(&["reproduce", "--target", "bogus", "--out", "x"], tmp.path());
    assert_eq!(unknown.status.code(), Some(1));
}
