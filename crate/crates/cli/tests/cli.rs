use std::path::Path;
use std::process::{Command, Output};

fn medcomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_medcomp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn compress_is_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.bin");
    let b = dir.path().join("b.bin");
    let args = [
        "compress", "--task", "bv", "--m", "200", "--eta", "0.2", "--seed", "17",
    ];
    let first = medcomp(&[&args[..], &["--compressed", path(&a)]].concat());
    let second = medcomp(&[&args[..], &["--compressed", path(&b)]].concat());
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn verify_passes_on_fresh_output_and_reports_other_samples() {
    let dir = tempfile::tempdir().unwrap();
    let cs = dir.path().join("cs.bin");
    let sample = dir.path().join("s.csv");
    let out = medcomp(&[
        "compress",
        "--seed",
        "3",
        "--compressed",
        path(&cs),
        "--sample-out",
        path(&sample),
    ]);
    assert!(out.status.success());

    let out = medcomp(&[
        "verify",
        "--compressed",
        path(&cs),
        "--sample",
        path(&sample),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows[0]["pass"], true);
    assert!(rows[0]["max_error"].as_f64().unwrap() <= 0.2);

    // A sample the scheme never saw: reported, never an error exit.
    let other = dir.path().join("other.csv");
    std::fs::write(&other, "x0,y\n0.0,1.0\n0.5,0.0\n1.0,1.0\n").unwrap();
    let out = medcomp(&[
        "verify",
        "--compressed",
        path(&cs),
        "--sample",
        path(&other),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().nth(1).unwrap().ends_with("false"));
}

#[test]
fn truncated_file_is_a_decode_error() {
    let dir = tempfile::tempdir().unwrap();
    let cs = dir.path().join("cs.bin");
    let sample = dir.path().join("s.csv");
    medcomp(&[
        "compress",
        "--compressed",
        path(&cs),
        "--sample-out",
        path(&sample),
    ]);
    let bytes = std::fs::read(&cs).unwrap();
    std::fs::write(&cs, &bytes[..bytes.len() / 2]).unwrap();
    let out = medcomp(&[
        "verify",
        "--compressed",
        path(&cs),
        "--sample",
        path(&sample),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[decode]"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cs = dir.path().join("cs.bin");
    let out = medcomp(&["compress", "--gamma", "0.3", "--compressed", path(&cs)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(medcomp(&["duality"]).status.code(), Some(2));
    assert_eq!(medcomp(&["nonsense"]).status.code(), Some(2));
    assert_eq!(medcomp(&["--help"]).status.code(), Some(0));
}

#[test]
fn weak_and_sparsify_failures_have_their_own_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cs = dir.path().join("cs.bin");
    // A subsample of one point cannot fit a BV target at η/2 on most of the mass.
    let out = medcomp(&[
        "compress",
        "--c1",
        "0.0001",
        "--max-retries",
        "0",
        "--compressed",
        path(&cs),
    ]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // One member per trial rarely matches the median everywhere.
    let out = medcomp(&[
        "compress",
        "--task",
        "lipschitz",
        "--l",
        "5",
        "--c1",
        "0.0078125",
        "--sparsify",
        "fixed",
        "--sparsify-n",
        "1",
        "--sparsify-trials",
        "1",
        "--compressed",
        path(&cs),
    ]);
    assert_eq!(
        out.status.code(),
        Some(5),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        "task = \"threshold\"\neta = 1.0\nm = 60\ntrials = 3\n",
    )
    .unwrap();
    let out = medcomp(&["weakstudy", "--config", path(&cfg), "--m", "80"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| first[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(col("task"), "threshold");
    assert_eq!(col("m"), "80");
    assert_eq!(col("c1"), "0.5");
    assert_eq!(text.lines().count(), 1 + 3 + 1);
}

#[test]
fn weakstudy_single_trial_and_reproducible() {
    let run = || medcomp(&["weakstudy", "--trials", "1", "--seed", "5"]);
    let a = run();
    assert!(a.status.success());
    assert_eq!(stdout(&a).lines().count(), 3);
    assert_eq!(a.stdout, run().stdout);
}

#[test]
fn sweep_keeps_stored_examples_constant_for_thresholds() {
    let out = medcomp(&[
        "sweep",
        "--task",
        "threshold",
        "--eta",
        "1",
        "--trials",
        "2",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let k: Vec<u64> = rows
        .iter()
        .map(|r| r["stored_examples"].as_u64().unwrap())
        .collect();
    assert!(k.iter().all(|&x| x == k[0]));
    assert_eq!(rows[0]["m"], 100);
    assert_eq!(rows[5]["m"], 10000);
}

#[test]
fn duality_rows_satisfy_their_bounds() {
    let out = medcomp(&[
        "duality",
        "--bv-ratios",
        "8,16",
        "--gray",
        "4",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for r in rows.as_array().unwrap() {
        assert_eq!(r["holds"], true, "{r}");
    }
    assert_eq!(rows[2]["kind"], "gray");
    assert_eq!(rows[2]["measured"], 4);
}

#[test]
fn duality_budget_is_reported_per_row() {
    let out = medcomp(&["duality", "--bv-ratios", "16", "--budget", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().nth(1).unwrap().ends_with(",budget"));
}
