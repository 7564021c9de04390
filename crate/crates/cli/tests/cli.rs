use std::path::Path;
use std::process::{Command, Output};

use hall_core::IsoClassTable;
use serde_json::Value;

fn hall(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hall"))
        .args(args)
        .env_remove("HALL_CACHE_DIR")
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn enumerate_writes_loadable_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let out = hall(&["enumerate", "--quiver", "a2", "--q", "2", "--dim", "1,1", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let table = IsoClassTable::from_json(&text).unwrap();
    assert_eq!(table.len(), 2);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["class_count"], 2);
}

#[test]
fn green_example() {
    let out = hall(&["green", "--quiver", "a2", "--q", "2", "--max-dim", "3", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["mismatches"], 0);
    assert_eq!(v["twist_sign"], "+1");
    assert!(v["v_unit"].is_string());
}

#[test]
fn shifts_example() {
    let out = hall(&["shifts", "--samples", "1000", "--seed", "42"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for q in ["a2", "kronecker", "jordan", "d4"] {
        assert!(text.lines().any(|l| l.starts_with(q) && l.ends_with("\t0")), "{text}");
    }
}

#[test]
fn shifts_with_printed_vertex_term_fails() {
    let out = hall(&["shifts", "--samples", "50", "--seed", "7", "--n-term", "printed", "--quiver", "a2"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn serre_example() {
    let out = hall(&["serre", "--quiver", "kronecker", "--q", "3"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("# relations\t2"));
}

#[test]
fn theorem_example() {
    let out = hall(&[
        "theorem", "--quiver", "a2", "--q", "2", "--alpha", "1,0", "--beta", "0,1", "--alphap", "0,1", "--betap", "1,0", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["instances"], 1);
    assert_eq!(v["all_equal"], true);
    assert_eq!(v["v_unit_used"], v["v_unit"]);
}

#[test]
fn theorem_rejects_unbalanced_dimensions() {
    let out = hall(&["theorem", "--quiver", "a2", "--alpha", "1,0", "--beta", "0,1", "--alphap", "1,1", "--betap", "1,0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn theorem_fails_at_a_wrong_unit() {
    let out = hall(&["theorem", "--quiver", "a2", "--max-dim", "2", "--v-unit", "+sqrt(q)"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn hall_product_and_coproduct() {
    // u_S1 * u_S2 = v^-1 (u_P + u_{S1+S2}) with v^-1 = √2/2 at q = 2
    let out = hall(&["hall", "--quiver", "a2", "--x", "1,0:0", "--y", "0,1:0"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("1,1:0\t1/2√2\n"), "{text}");
    assert!(text.contains("1,1:1\t1/2√2\n"), "{text}");

    let out = hall(&["hall", "--quiver", "a2", "--x", "1,1:0", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["terms"].as_array().unwrap().len(), 4);
}

#[test]
fn bialgebra_pair_and_sweep() {
    let out = hall(&["bialgebra", "--quiver", "a2", "--x", "1,0:0", "--y", "0,1:0"]);
    assert_eq!(code(&out), 0);
    let out = hall(&["bialgebra", "--quiver", "jordan", "--max-dim", "2"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&hall(&["bogus"])), 2);
    assert_eq!(code(&hall(&["green", "--quiver", "a2", "--no-such-flag"])), 2);
    assert_eq!(code(&hall(&["green", "--quiver", "a2", "--q", "6"])), 2);
    assert_eq!(code(&hall(&["green", "--quiver", "nope"])), 2);
    assert_eq!(code(&hall(&["green"])), 2);
    assert_eq!(code(&hall(&["hall", "--quiver", "a2", "--x", "1,0:9"])), 2);
    assert_eq!(code(&hall(&["enumerate", "--quiver", "kronecker", "--q", "3", "--dim", "3,3", "--budget", "1000"])), 2);
    assert_eq!(code(&hall(&["--help"])), 0);
}

#[test]
fn quiver_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.json");
    std::fs::write(&path, r#"{"vertices": ["a", "b"], "arrows": [{"src": "a", "tgt": "b"}]}"#).unwrap();
    let from_file = hall(&["green", "--quiver-file", path.to_str().unwrap(), "--max-dim", "2", "--format", "json"]);
    assert_eq!(code(&from_file), 0);
    assert_eq!(json(&from_file)["instances"], json(&hall(&["green", "--quiver", "a2", "--max-dim", "2", "--format", "json"]))["instances"]);
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let args = ["green", "--quiver", "jordan", "--q", "2", "--max-dim", "3", "--format", "json"];
    let first = hall(&args);
    let second = hall(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    assert_eq!(first.stdout, hall(&seq).stdout);

    let fuzz = ["shifts", "--samples", "200", "--seed", "9", "--format", "json"];
    assert_eq!(hall(&fuzz).stdout, hall(&fuzz).stdout);
}

fn cache_entries(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn cache_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["green", "--quiver", "kronecker", "--q", "2", "--max-dim", "3", "--format", "json"];
    let plain = hall(&args);

    let mut cached = args.to_vec();
    cached.extend(["--cache-dir", cache]);
    let cold = hall(&cached);
    let entries = cache_entries(dir.path());
    assert!(!entries.is_empty());
    let warm = hall(&cached);
    assert_eq!(plain.stdout, cold.stdout);
    assert_eq!(plain.stdout, warm.stdout);

    // the environment variable is honoured
    let via_env = Command::new(env!("CARGO_BIN_EXE_hall"))
        .args(args)
        .env("HALL_CACHE_DIR", cache)
        .output()
        .unwrap();
    assert_eq!(plain.stdout, via_env.stdout);

    // a corrupt entry is rebuilt with a warning, not trusted
    std::fs::write(&entries[entries.len() - 1], "{\"format\": 1, \"broken\": true}").unwrap();
    let repaired = hall(&cached);
    assert_eq!(code(&repaired), 0);
    assert_eq!(plain.stdout, repaired.stdout);
    assert!(String::from_utf8_lossy(&repaired.stderr).to_lowercase().contains("warn"));
}
