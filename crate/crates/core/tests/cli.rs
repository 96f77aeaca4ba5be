use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_branchdiam"))
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn plain_outputs() {
    assert_eq!(run(&["constants", "--cp", "3"]), (0, "111\n".into()));
    assert_eq!(run(&["quotient", "--group", "grigorchuk", "--level", "3", "--order"]), (0, "128\n".into()));
    assert_eq!(run(&["quotient", "--group", "gupta-sidki:p=3", "--level", "2", "--order"]), (0, "27\n".into()));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["quotient", "--group", "gupta-sidki:p=9", "--level", "2"]).0, 2);
    let (code, out) = run(&["verify", "--suite", "relations", "--group", "grigorchuk"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "branchdiam-report/1");
    assert!(v["claims"].as_array().unwrap().iter().all(|c| c["status"] == "verified-exhaustive"));
    // the fourth commutator identity is false, so the suite reports a failure
    let (code, out) = run(&["verify", "--suite", "identities", "--group", "grigorchuk"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let failed: Vec<_> = v["claims"].as_array().unwrap().iter().filter(|c| c["status"] == "failed").collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["witness"]["first_failing_level"], 5);
}

#[test]
fn reports_are_reproducible_across_thread_counts() {
    let args = ["verify", "--suite", "lcs", "--group", "gupta-sidki:p=3", "--samples", "20"];
    let mut outs = Vec::new();
    for threads in ["1", "4", "4"] {
        let out = bin().args(args).env("RAYON_NUM_THREADS", threads).output().unwrap();
        outs.push(out.stdout);
    }
    assert!(!outs[0].is_empty());
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[1], outs[2]);
}

#[test]
fn report_file_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let p = path.to_str().unwrap();
    let (code, _) = run(&["--report", p, "--seed", "7", "constants", "--cp", "5"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
}
