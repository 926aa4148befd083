use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn pedbench(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pedbench")).args(args).current_dir(dir).output().unwrap()
}

fn ok(args: &[&str], dir: &Path) -> Output {
    let out = pedbench(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

/// Exit status and the single stderr line of a failing run.
fn fail(args: &[&str], dir: &Path) -> String {
    let out = pedbench(args, dir);
    assert!(!out.status.success(), "{args:?} should fail");
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error: kind="), "{err}");
    err
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap()
}

fn synth(dir: &Path, n: &str) {
    ok(&["synth-gen", "--n", n, "--seed", "3", "--out", "corpus"], dir);
}

#[test]
fn synth_evaluate_report() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth(dir, "150");
    for f in ["raw_tracks.jsonl", "full.jsonl", "motion_changes.jsonl", "build.json", "scripts.json", "config.toml"] {
        assert!(dir.join("corpus").join(f).is_file(), "{f}");
    }
    let build = json(dir.join("corpus/build.json"));
    assert_eq!(build["config"]["synth"]["seed"], 3);
    assert_eq!(build["counts"]["motion_changes"], 2 * build["counts"]["flagged"].as_u64().unwrap());

    let mut reports = Vec::new();
    for variant in ["full", "motion-changes"] {
        for p in ["cv", "da", "ensemble"] {
            let out = format!("eval/{p}-{variant}");
            ok(&["evaluate", "--instances", "corpus", "--predictor", p, "--variant", variant, "--out", &out], dir);
            reports.push(out);
        }
    }
    let ens = json(dir.join("eval/ensemble-full/report.json"));
    assert_eq!(ens["predictor"], "ensemble");
    assert_eq!(ens["report"]["variant"], "full");
    assert_eq!(ens["source"]["calibration"]["schedule"], "calibrated");
    assert!(ens["report"]["metrics"]["NLL"]["ensemble"]["3"].is_number());

    let mut args = vec!["report", "--out", "table"];
    args.extend(reports.iter().map(String::as_str));
    ok(&args, dir);
    let table = fs::read_to_string(dir.join("table/table.txt")).unwrap();
    assert!(table.lines().any(|l| l.contains("1 s") && l.contains("2 s") && l.contains("3 s")), "{table}");
    assert!(table.find("full").unwrap() < table.find("motion_changes").unwrap());
    for row in ["RMS      | cv", "         | da", "predRMS  | ensemble", "minADE   | ensemble", "NLL      | ensemble"] {
        assert!(table.contains(row), "{row} missing:\n{table}");
    }
    let merged = json(dir.join("table/report.json"));
    assert_eq!(merged["tables"].as_array().unwrap().len(), 2);
    assert_eq!(merged["sources"].as_array().unwrap().len(), 6);
}

#[test]
fn outputs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth(dir, "80");
    let files = ["report.json", "report.txt", "predictions.jsonl", "config.toml"];
    let run = |out: &str, threads: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_pedbench"));
        cmd.args(["evaluate", "--instances", "corpus/full.jsonl", "--predictor", "ensemble", "--out", out]).current_dir(dir);
        if let Some(t) = threads {
            cmd.env("PEDBENCH_THREADS", t);
        }
        assert!(cmd.output().unwrap().status.success());
        files.map(|f| fs::read(dir.join(out).join(f)).unwrap())
    };
    let a = run("a", None);
    let b = run("a", None);
    let c = run("c", Some("1"));
    assert_eq!(a, b);
    // Only the output path in the embedded config differs.
    assert_eq!(a[2], c[2]);
    let strip = |v: &[u8]| {
        let mut j: Value = serde_json::from_slice(v).unwrap();
        j["config"]["paths"]["out"] = Value::Null;
        j
    };
    assert_eq!(strip(&a[0]), strip(&c[0]));

    // The staged config reproduces the run on its own.
    ok(&["evaluate", "--config", "a/config.toml", "--predictor", "ensemble", "--out", "a"], dir);
    assert_eq!(fs::read(dir.join("a/report.json")).unwrap(), a[0]);

    let before = fs::read(dir.join("corpus/full.jsonl")).unwrap();
    synth(dir, "80");
    assert!(before == fs::read(dir.join("corpus/full.jsonl")).unwrap());
}

/// Straight walks sampled exactly at 2 Hz.
fn straight_walks(n: usize) -> String {
    let mut lines = String::new();
    for a in 0..n {
        let (vx, vy) = (0.5 + 0.05 * a as f64, 0.3 - 0.02 * a as f64);
        let samples: Vec<Value> = (0..17)
            .map(|k| {
                let t = k as f64 * 0.5;
                serde_json::json!({
                    "timestamp_us": k * 500_000,
                    "position": [a as f64 + vx * t, vy * t, 0.9],
                    "box_size": [0.6, 0.6, 1.7],
                    "yaw": vy.atan2(vx),
                })
            })
            .collect();
        let rec = serde_json::json!({ "agent_id": format!("walker-{a}"), "camera_view": "front", "samples": samples });
        lines.push_str(&rec.to_string());
        lines.push('\n');
    }
    lines
}

#[test]
fn constant_velocity_is_exact_on_straight_walks() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("raw.jsonl"), straight_walks(24)).unwrap();
    fs::write(dir.join("run.toml"), "[ensemble]\nschedule_source = \"default\"\n").unwrap();
    ok(&["build-dataset", "--raw", "raw.jsonl", "--out", "ds", "--config", "run.toml"], dir);
    ok(&["evaluate", "--instances", "ds", "--predictor", "cv", "--out", "cv", "--config", "run.toml"], dir);
    let r = json(dir.join("cv/report.json"));
    let row = r["report"]["metrics"]["RMS"]["cv"].as_object().unwrap();
    assert_eq!(row.len(), 3);
    for v in row.values() {
        assert!(v.as_f64().unwrap().abs() < 1e-9, "{row:?}");
    }
    assert_eq!(r["source"]["calibration"]["schedule"], "default");
}

#[test]
fn leakage_audit_separates_resample_modes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth(dir, "120");
    ok(&["leakage-audit", "--raw", "corpus/raw_tracks.jsonl", "--out", "lin"], dir);
    ok(&["leakage-audit", "--raw", "corpus/raw_tracks.jsonl", "--resample", "causal", "--out", "hold"], dir);
    let lin = json(dir.join("lin/leakage.json"));
    let hold = json(dir.join("hold/leakage.json"));
    assert_eq!(lin["resample"], "anti-causal");
    assert_eq!(hold["resample"], "causal");
    assert!(lin["summary"]["n_positive"].as_u64().unwrap() > 0);
    assert!(hold["summary"]["n_with_lead"].as_u64().unwrap() > 0);
    assert_eq!(hold["summary"]["n_positive"], 0);
}

#[test]
fn failures_are_one_line_and_leave_nothing_behind() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    let err = fail(&["build-dataset", "--raw", "missing.jsonl", "--out", "o1"], dir);
    assert!(err.contains("kind=Io"), "{err}");
    assert!(!dir.join("o1").exists());

    fs::write(dir.join("bad.jsonl"), "{\"agent_id\": 3}\n").unwrap();
    let err = fail(&["build-dataset", "--raw", "bad.jsonl", "--out", "o1"], dir);
    assert!(err.contains("kind=MalformedRecord"), "{err}");

    fs::write(dir.join("bad.toml"), "[task]\nhistory_s = 1\n").unwrap();
    let err = fail(&["synth-gen", "--config", "bad.toml", "--out", "o1"], dir);
    assert!(err.contains("kind=InvalidConfig"), "{err}");

    let err = fail(&["evaluate", "--horizons", "1,4", "--instances", "x", "--predictor", "cv"], dir);
    assert!(err.contains("kind=HorizonExceedsFuture"), "{err}");

    let err = fail(&["evaluate", "--bogus"], dir);
    assert!(err.contains("kind=Usage"), "{err}");

    synth(dir, "100");
    let err = fail(&["evaluate", "--instances", "corpus", "--predictor", "kalman", "--out", "o2"], dir);
    assert!(err.contains("kind=UnknownPredictor"), "{err}");
    assert!(!dir.join("o2").exists());

    // Predictions for only some instances are rejected, not skipped.
    ok(&["evaluate", "--instances", "corpus", "--predictor", "cv", "--out", "cv"], dir);
    let preds = fs::read_to_string(dir.join("cv/predictions.jsonl")).unwrap();
    let partial: String = preds.lines().skip(1).map(|l| format!("{l}\n")).collect();
    fs::write(dir.join("partial.jsonl"), partial).unwrap();
    fs::create_dir(dir.join("o3")).unwrap();
    let err = fail(&["evaluate", "--instances", "corpus", "--predictions", "partial.jsonl", "--out", "o3"], dir);
    assert!(err.contains("kind=MissingPrediction"), "{err}");
    assert_eq!(fs::read_dir(dir.join("o3")).unwrap().count(), 0);

    // The complete file scores like the built-in run.
    ok(&["evaluate", "--instances", "corpus", "--predictions", "cv/predictions.jsonl", "--predictor", "cv", "--out", "ext"], dir);
    let a = json(dir.join("cv/report.json"));
    let b = json(dir.join("ext/report.json"));
    assert_eq!(a["report"], b["report"]);
}
