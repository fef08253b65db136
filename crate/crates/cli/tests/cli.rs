use std::path::Path;
use std::process::Command;

fn btwc(dir: &Path, threads: &str, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_btwc"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env("RAYON_NUM_THREADS", threads)
        .env_remove("BTWC_SEED")
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn noiseless_ler_is_zero_for_both_modes() {
    let dir = tempfile::tempdir().unwrap();
    let out = btwc(dir.path(), "2", &["ler", "--distance", "3", "--p", "0", "--trials", "1000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "ler.csv");
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# config: "));
    assert_eq!(lines.next().unwrap(), "d,p,trials,mode,failures,ler,ci_lo,ci_hi");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert_eq!(r[4], "0");
        assert_eq!(r[5], "0");
    }
}

#[test]
fn flags_override_config_file_and_seed_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, "seed = 5\ndistance = [3, 5]\np = 0.01\ncycles = 2e3\n").unwrap();
    let out = btwc(dir.path(), "2", &["coverage", "--config", cfg.to_str().unwrap(), "--distance", "7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "coverage.json")).unwrap();
    assert_eq!(json["config"]["seed"], 5);
    assert_eq!(json["config"]["distance"], serde_json::json!([7]));
    assert_eq!(json["config"]["cycles"], 2000);
    assert_eq!(json["results"].as_array().unwrap().len(), 1);
    let csv = read(dir.path(), "coverage.csv");
    assert_eq!(csv.lines().nth(1).unwrap(), "d,p,cycles,frac_all0,frac_local1,frac_complex,coverage");
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_btwc"))
        .args(["compress", "--distance", "3", "--p", "0.01", "--cycles", "1000", "--out"])
        .arg(dir.path())
        .env("BTWC_SEED", "99")
        .output()
        .unwrap();
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "compress.json")).unwrap();
    assert_eq!(json["config"]["seed"], 99);
    assert_eq!(
        read(dir.path(), "compress.csv").lines().nth(1).unwrap(),
        "d,p,raw_bits,afs_avg_bits,clique_avg_bits,afs_reduction,clique_reduction,ratio"
    );
}

#[test]
fn invalid_configs_fail_without_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["coverage", "--distance", "3,4", "--cycles", "100"],
        &["coverage", "--p", "1.5"],
        &["ler", "--distance", "2"],
        &["ler", "--mode", "fast"],
        &["bandwidth", "--percentile", "120"],
        &["bandwidth", "--q", "-0.1"],
        &["compress", "--cycles", "0"],
        &["coverage", "--cycles", "1.5"],
    ];
    for args in cases {
        let out = btwc(dir.path(), "1", args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
    assert_eq!(std::fs::read_dir(dir.path()).map(|d| d.count()).unwrap_or(0), 0);
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "sede = 3\n").unwrap();
    let out = btwc(dir.path(), "1", &["cost", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn bandwidth_trace_schema_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        btwc(dir.path(), "2", &["bandwidth", "--qubits", "100", "--q", "0.1", "--bandwidth", "100", "--cycles", "500"]);
    assert!(out.status.success());
    let csv = read(dir.path(), "bandwidth_trace.csv");
    assert_eq!(csv.lines().nth(1).unwrap(), "cycle,new,carryover,served,is_stall");
    assert_eq!(csv.lines().count(), 2 + 500);
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "bandwidth.json")).unwrap();
    assert_eq!(json["results"]["stall_cycles"], 0);
    assert_eq!(json["config"]["provisioned"], 100);
}

#[test]
fn cost_uses_library_file() {
    let dir = tempfile::tempdir().unwrap();
    let lib = dir.path().join("cells.txt");
    std::fs::write(&lib, "XOR2 1 1 1\nAND2 1 1 1\nOR2 1 1 1\nNOT 1 1 1\nDFF 1 1 1\nSPLIT 1 1 1\n").unwrap();
    let out = btwc(dir.path(), "1", &["cost", "--distance", "3", "--library", lib.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "cost.csv");
    let row: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
    let gates: u64 = row[1..7].iter().map(|x| x.parse::<u64>().unwrap()).sum();
    assert_eq!(row[7].parse::<u64>().unwrap(), gates);
}
