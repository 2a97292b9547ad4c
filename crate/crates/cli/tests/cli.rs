use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn compop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compop")).args(args).output().expect("spawn compop")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json_run(args: &[&str], dir: &Path, name: &str) -> (i32, Value) {
    let path = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    full.extend(["--format", "json", "--out", &p]);
    let o = compop(&full);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("no report: {}", String::from_utf8_lossy(&o.stderr)));
    (code(&o), serde_json::from_str(&text).unwrap())
}

#[test]
fn hs_scale_both_routes() {
    let dir = tempfile::tempdir().unwrap();
    let (c, doc) = json_run(&["hs", "--symbol", "scale:0.6", "--space", "D"], dir.path(), "hs.json");
    assert_eq!(c, 0);
    let routes = doc["summary"]["routes"].as_array().unwrap();
    assert_eq!(routes.len(), 2);
    for r in routes {
        let v = r["value"].as_f64().unwrap();
        assert!((v - 0.5625).abs() < 1e-6, "{r}");
    }
    assert_eq!(doc["summary"]["verdict"], "finite-evidence");
    assert_eq!(doc["meta"]["config"]["symbol"]["type"], "scale");
}

#[test]
fn diag_scale_is_compact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("diag.csv");
    let o = compop(&["diag", "--symbol", "scale:0.5", "--space", "p=2,alpha=0,beta=0", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("sweep,scale,angle,quotient\n"));
    assert!(csv.lines().skip(1).any(|l| l.starts_with("test-function,")));
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("diag.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["summary"]["compact"], "compact-evidence");
    assert_eq!(meta["meta"]["seed"], 20_240_601);
}

#[test]
fn capacity_of_a_point() {
    let dir = tempfile::tempdir().unwrap();
    let (c, doc) = json_run(&["capacity", "--set", "point:0"], dir.path(), "cap.json");
    assert_eq!(c, 0);
    assert_eq!(doc["summary"]["capacity"].as_f64(), Some(0.0));
    let seq: Vec<f64> = doc["summary"]["tube_sequence"].as_array().unwrap().iter().map(|p| p[1].as_f64().unwrap()).collect();
    assert!(seq.windows(2).all(|w| w[1] < w[0]), "{seq:?}");
}

#[test]
fn csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("n.csv");
    let run = || {
        let o = compop(&["norms", "--symbol", "blaschke:0.5", "--n-max", "16", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        (std::fs::read(&p).unwrap(), std::fs::read(dir.path().join("n.csv.meta.json")).unwrap())
    };
    let (a, ma) = run();
    let (b, mb) = run();
    assert_eq!(a, b);
    assert_eq!(ma, mb);
}

#[test]
fn strict_inconclusive_exits_2() {
    // D(zⁿ) = n grows, which decides nothing about C_φ
    let o = compop(&["norms", "--symbol", "identity", "--n-max", "16", "--strict"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let o = compop(&["norms", "--symbol", "identity", "--n-max", "16"]);
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with("n,dirichlet,hardy_sq,hardy_scaled,reliable\n"));
}

#[test]
fn usage_errors_name_the_field() {
    let o = compop(&["hs", "--symbol", "scale:0.5", "--m", "1000"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("grids.m"));

    let o = compop(&["diag", "--symbol", "scale:0.5", "--space", "p=1,alpha=3,beta=0"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("space"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"command": "hs", "symbol": {"type": "scale", "r": "half"}}"#).unwrap();
    let o = compop(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("symbol"), "{}", String::from_utf8_lossy(&o.stderr));

    let o = compop(&["hs"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn config_file_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("out.csv");
    let text = serde_json::json!({
        "command": "hs",
        "symbol": {"type": "scale", "r": 0.3},
        "space": {"kind": "h2"},
        "output": {"path": out, "format": "csv"}
    });
    std::fs::write(&cfg, text.to_string()).unwrap();
    let o = compop(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("route,panel,increment,partial\n"));
}

#[test]
fn verify_reports_each_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let (c, doc) = json_run(&["verify", "--criteria", "1,6"], dir.path(), "v.json");
    assert_eq!(c, 0);
    let crit = doc["summary"]["criteria"].as_array().unwrap();
    assert_eq!(crit.len(), 2);
    assert!(crit.iter().all(|x| x["status"] == "PASS"));
}

#[test]
fn constructions_run() {
    let dir = tempfile::tempdir().unwrap();
    let (c, doc) = json_run(&["construct-peak", "--set", "points:0,2"], dir.path(), "peak.json");
    assert_eq!(c, 0);
    assert_eq!(doc["summary"]["certificate_holds"], true);

    let (c, doc) = json_run(&["construct-outer", "--set", "point:0", "--weight", "loginv:2", "--checks"], dir.path(), "outer.json");
    assert_eq!(c, 0);
    assert_eq!(doc["summary"]["theorem_agree"], true);
    assert_eq!(doc["summary"]["lemma_within"], true);

    let o = compop(&["construct-outer", "--set", "point:0", "--weight", "loginv:0.5", "--require-disc-algebra"]);
    assert_eq!(code(&o), 1);

    let (c, doc) = json_run(&["construct-rec", "--set", "point:0"], dir.path(), "rec.json");
    assert_eq!(c, 0);
    assert_eq!(doc["summary"]["weighted"], "diverging");
    assert_eq!(doc["summary"]["hs_verdict"], "finite-evidence");
}
