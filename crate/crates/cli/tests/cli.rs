use std::path::Path;
use std::process::{Command, Output};

fn rqboost(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rqboost"))
        .args(args)
        .env("RQBOOST_OUT", out)
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn solve_two_variable_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("two.qubo");
    std::fs::write(&p, "0 0 -1\n1 1 -1\n0 1 2\n").unwrap();
    for solver in ["brute", "sa"] {
        let v = stdout_json(&rqboost(&["solve", p.to_str().unwrap(), "--solver", solver], dir.path()));
        assert_eq!(v["energy"], -1.0, "{solver}");
        let bits: Vec<u64> = serde_json::from_value(v["assignment"].clone()).unwrap();
        assert_eq!(bits.iter().sum::<u64>(), 1);
    }
}

#[test]
fn parse_error_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.qubo");
    std::fs::write(&p, "0 0 -1\n# ok\n0 1 nope\n").unwrap();
    let o = rqboost(&["solve", p.to_str().unwrap()], dir.path());
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn clique_m12_has_49_chains() {
    let dir = tempfile::tempdir().unwrap();
    let v = stdout_json(&rqboost(&["embed", "clique", "-m", "12"], dir.path()));
    assert_eq!(v["num_chains"], 49);
}

#[test]
fn verify_reports_corrupted_embedding() {
    let dir = tempfile::tempdir().unwrap();
    let o = rqboost(&["embed", "clique", "-m", "2", "--n", "8"], dir.path());
    let report = stdout_json(&o);
    let good = dir.path().join("good.json");
    std::fs::write(&good, serde_json::to_string(&report).unwrap()).unwrap();
    let ok = rqboost(&["embed", "verify", good.to_str().unwrap(), "-m", "2", "--n", "8"], dir.path());
    assert_eq!(stdout_json(&ok)["valid"], true);

    // chain 1 now reuses chain 0's qubits
    let mut emb = report["embedding"].clone();
    let stolen = emb["chains"]["0"].clone();
    emb["chains"]["1"] = stolen;
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&emb).unwrap()).unwrap();
    let o = rqboost(&["embed", "verify", bad.to_str().unwrap(), "-m", "2", "--n", "8"], dir.path());
    assert!(!o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["valid"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("violation"));
}

#[test]
fn names_smoke_run_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--oracle", "sa", "--seed", "3", "names", "--folds", "2", "--resamples", "2"];
    let mut csvs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = rqboost(&args, &out);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let auc = std::fs::read_to_string(out.join("names").join("names_auc.csv")).unwrap();
        assert_eq!(auc.lines().count(), 1 + 3 * 2);
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("names").join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["seed"], 3);
        csvs.push(auc);
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn linsep_refuses_other_oracles() {
    let dir = tempfile::tempdir().unwrap();
    let o = rqboost(&["--oracle", "sa", "linsep"], dir.path());
    assert!(!o.status.success());
}
