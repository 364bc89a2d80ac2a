use std::path::Path;
use std::process::{Command, Output};

use pcfsort::key::ordered_bits_to_f64;
use pcfsort::{load_binary_u64, write_binary_u64};
use serde_json::Value;
use tempfile::TempDir;

fn pcfsort(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcfsort"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = pcfsort(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sort_three_keys() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("in.bin");
    let output = dir.path().join("out.bin");
    write_binary_u64(&input, &[5, 2, 9]).unwrap();
    let out = ok(&["sort", "--input", path_str(&input), "--out", path_str(&output)]);
    assert_eq!(load_binary_u64(&output).unwrap(), vec![2, 5, 9]);
    let report = stdout_json(&out);
    assert_eq!(report["n"], 3);
    assert_eq!(report["max_recursion_depth"], 0);
    assert_eq!(report["base_case_calls"], 1);
}

#[test]
fn introsort_fallback_on_presorted_input() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("in.bin");
    let output = dir.path().join("out.bin");
    let keys: Vec<u64> = (0..5000).rev().chain(0..5000).collect();
    write_binary_u64(&input, &keys).unwrap();
    ok(&[
        "sort",
        "--input",
        path_str(&input),
        "--out",
        path_str(&output),
        "--fallback=introsort",
        "--tau=100000",
    ]);
    let mut expected = keys.clone();
    expected.sort_unstable();
    assert_eq!(load_binary_u64(&output).unwrap(), expected);
}

#[test]
fn sort_uniform_report() {
    let dir = TempDir::new().unwrap();
    let keys = dir.path().join("keys.bin");
    let output = dir.path().join("sorted.bin");
    ok(&["gen", "--dist=uniform", "--n=10000", "--seed=3", "--out", path_str(&keys)]);
    let out = ok(&[
        "sort",
        "--input",
        path_str(&keys),
        "--key-type=f64",
        "--tau=64",
        "--exp=0.75",
        "--out",
        path_str(&output),
    ]);
    let report = stdout_json(&out);
    assert!(report["ops"]["total"].as_u64().unwrap() > 0);
    assert!(report["max_recursion_depth"].as_u64().unwrap() <= 5);
    for kind in ["arithmetic", "power", "comparison", "logical", "assignment", "memory_access"] {
        assert!(report["ops"][kind].is_u64(), "{kind}");
    }
    let sorted: Vec<f64> = load_binary_u64(&output)
        .unwrap()
        .into_iter()
        .map(ordered_bits_to_f64)
        .collect();
    assert_eq!(sorted.len(), 10000);
    assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn sort_csv_timestamps() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("trips.csv");
    let output = dir.path().join("out.bin");
    std::fs::write(
        &input,
        "id,pickup\n1,2016-01-01 00:00:10\n2,2016-01-01 00:00:00\n3,bad\n",
    )
    .unwrap();
    ok(&[
        "sort",
        "--input",
        path_str(&input),
        "--input-format=csv",
        "--column=1",
        "--out",
        path_str(&output),
    ]);
    assert_eq!(load_binary_u64(&output).unwrap(), vec![1451606400, 1451606410]);
}

#[test]
fn sort_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("in.bin");
    let output = dir.path().join("out.bin");
    std::fs::write(&input, [1u8, 0, 0]).unwrap();
    let out = pcfsort(&["sort", "--input", path_str(&input), "--out", path_str(&output)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!output.exists());

    write_binary_u64(&input, &[1, 2]).unwrap();
    let out = pcfsort(&["sort", "--input", path_str(&input), "--exp=1.5", "--out", path_str(&output)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not in (0, 1)"));
    assert!(!output.exists());
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.bin");
    let b = dir.path().join("b.bin");
    ok(&["gen", "--dist=uniform", "--n=1000", "--seed=1", "--out", path_str(&a)]);
    ok(&["gen", "--dist=uniform", "--n=1000", "--seed=1", "--out", path_str(&b)]);
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes.len(), 8 + 8000);
    assert_eq!(bytes, std::fs::read(&b).unwrap());
}

#[test]
fn gen_empty_and_invalid() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.bin");
    ok(&["gen", "--n=0", "--out", path_str(&empty)]);
    assert_eq!(std::fs::read(&empty).unwrap(), vec![0u8; 8]);

    let bad = dir.path().join("bad.bin");
    let out = pcfsort(&["gen", "--dist=normal", "--sigma=-1", "--n=10", "--out", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!bad.exists());
    let out = pcfsort(&["gen", "--dist=lognormal", "--sigma=0", "--n=10", "--out", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!bad.exists());
}

#[test]
fn bench_writes_scaling_csv() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| {
        vec![
            "bench".to_string(),
            "--dist=uniform".into(),
            "--n=1000,10000".into(),
            "--trials=2".into(),
            "--seed=7".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let a_args = args(&a);
    ok(&a_args.iter().map(String::as_str).collect::<Vec<_>>());
    let b_args = args(&b);
    ok(&b_args.iter().map(String::as_str).collect::<Vec<_>>());
    let text = std::fs::read_to_string(&a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("source,n,algorithm,mean_ops_per_n"));
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
}

#[test]
fn bench_from_key_file_and_missing_file() {
    let dir = TempDir::new().unwrap();
    let keys = dir.path().join("keys.bin");
    let out_path = dir.path().join("scaling.json");
    write_binary_u64(&keys, &(0..5000u64).map(|i| i * 7919 % 5003).collect::<Vec<_>>()).unwrap();
    ok(&[
        "bench",
        "--input",
        path_str(&keys),
        "--n=1000",
        "--trials=2",
        "--format=json",
        "--out",
        path_str(&out_path),
    ]);
    let records: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(records.as_array().unwrap().len(), 2);
    assert_eq!(records[0]["source"], "keys");

    let missing = dir.path().join("missing.bin");
    let out = pcfsort(&["bench", "--input", path_str(&missing), "--n=10", "--trials=1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failure_grid_two_by_two() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("grid.csv");
    ok(&[
        "failure-grid",
        "--n=10000",
        "--trials=1",
        "--x-values=0.2,0.8",
        "--y-values=0.2,0.8",
        "--out",
        path_str(&out_path),
    ]);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].contains("theoretical_bound_ln"));
    // a = 0.2 gives a tiny sample, K < 1, so the bound column is NA; the
    // fixed exponents default to 0.75.
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[2], "0.75");
        assert_eq!(fields[3], "0.75");
    }
    assert!(lines.iter().any(|l| l.contains(",NA,")));
}

#[test]
fn failure_grid_rejects_equal_axes() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("grid.csv");
    let out = pcfsort(&["failure-grid", "--x-axis=a", "--y-axis=a", "--out", path_str(&out_path)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out_path.exists());
}

#[test]
fn bound_examples() {
    let v = stdout_json(&ok(&["bound", "--p=31622", "--n=1000000"]));
    assert!((v["K"].as_f64().unwrap() - 497.9754).abs() < 1e-4);
    assert!((v["ln_bound"].as_f64().unwrap() - (-243.8)).abs() < 0.1);
    assert_eq!(v["applicable"], true);

    let v = stdout_json(&ok(&["bound", "--p=1000", "--n=10000"]));
    assert!((v["bound"].as_f64().unwrap() / 2.0e-9 - 1.0).abs() < 0.05);

    let v = stdout_json(&ok(&[
        "bound", "--alpha=1", "--beta=4", "--gamma=2", "--delta=2", "--n=2",
    ]));
    assert_eq!(v["K"], 0.0);
    assert_eq!(v["applicable"], false);
    assert!(v["bound"].is_null());
}

#[test]
fn help_documents_flags() {
    let out = ok(&["sort", "--help"]);
    let help = String::from_utf8_lossy(&out.stdout);
    for flag in ["--seed", "--tau", "--exp", "--exp-a", "--exp-d", "--fallback", "--out", "--key-type"] {
        assert!(help.contains(flag), "{flag} missing from help");
    }
    let out = ok(&["bench", "--help"]);
    let help = String::from_utf8_lossy(&out.stdout);
    for flag in ["--dist", "--n", "--trials", "--format", "--sigma"] {
        assert!(help.contains(flag), "{flag} missing from help");
    }
    let out = ok(&["failure-grid", "--help"]);
    let help = String::from_utf8_lossy(&out.stdout);
    for flag in ["--sigma1", "--sigma2", "--x-axis", "--fixed"] {
        assert!(help.contains(flag), "{flag} missing from help");
    }
}
