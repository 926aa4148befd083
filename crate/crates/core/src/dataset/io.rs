//! Line-delimited JSON files: one record per line, blank lines ignored.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{DatasetError, PredictionInstance};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.display().to_string(), source }
}

pub fn write_jsonl_to<T: Serialize, W: Write>(records: &[T], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_jsonl<T: Serialize>(records: &[T], path: &Path) -> Result<(), DatasetError> {
    let file = File::create(path).map_err(io_err(path))?;
    write_jsonl_to(records, BufWriter::new(file)).map_err(io_err(path))
}

/// Parses records; errors carry the 1-based line number.
pub fn read_jsonl_from<T: DeserializeOwned, R: BufRead>(input: R) -> Result<Vec<T>, DatasetError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| DatasetError::MalformedRecord { line: i + 1, message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|e| DatasetError::MalformedRecord { line: i + 1, message: e.to_string() })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, DatasetError> {
    let file = File::open(path).map_err(io_err(path))?;
    read_jsonl_from(BufReader::new(file))
}

pub fn write_instances(instances: &[PredictionInstance], path: &Path) -> Result<(), DatasetError> {
    write_jsonl(instances, path)
}

pub fn read_instances(path: &Path) -> Result<Vec<PredictionInstance>, DatasetError> {
    read_jsonl(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{CropRef, Split};
    use crate::trajectory::{CameraView, TimedPoint};

    fn sample(i: usize) -> PredictionInstance {
        PredictionInstance {
            instance_id: format!("id{i}"),
            agent_id: "agent".into(),
            camera_view: CameraView::BackLeft,
            split: Split::Val,
            motion_change: i % 2 == 0,
            cv_ade: 0.1 + i as f64 / 3.0,
            history: (0..10).map(|k| TimedPoint::new(k * 100_000, k as f64 / 7.0, -1.0 / 3.0)).collect(),
            future: (10..40).map(|k| TimedPoint::new(k * 100_000, 1e-17 * k as f64, 12345.678_901_234_5)).collect(),
            crop_refs: (0..10)
                .map(|k| (k % 3 == 0).then(|| CropRef { frame_token: format!("f{k}"), center_u: 0.1, center_v: 2.0 / 3.0, side: 64.0 }))
                .collect(),
        }
    }

    #[test]
    fn wire_format_field_names() {
        let line = serde_json::to_string(&sample(0)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        for k in ["instance_id", "agent_id", "camera_view", "split", "motion_change", "cv_ade", "history", "future", "crop_refs"] {
            assert!(keys.contains(&k), "missing {k}");
        }
        assert_eq!(keys.len(), 9);
        assert_eq!(v["history"][1], serde_json::json!([100000, 1.0 / 7.0, -1.0 / 3.0]));
        assert_eq!(v["crop_refs"][1], serde_json::Value::Null);
        assert_eq!(v["crop_refs"][0]["frame_token"], "f0");
    }

    #[test]
    fn round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.jsonl");
        let items: Vec<_> = (0..1000).map(sample).collect();
        write_instances(&items, &path).unwrap();
        assert_eq!(read_instances(&path).unwrap(), items);

        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<&str> = text.lines().take(3).collect();
        let cut = &lines[1][..lines[1].len() / 2];
        lines[1] = cut;
        let broken = lines.join("\n");
        match read_jsonl_from::<PredictionInstance, _>(broken.as_bytes()) {
            Err(DatasetError::MalformedRecord { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected MalformedRecord, got {other:?}"),
        }

        let empty = dir.path().join("empty.jsonl");
        std::fs::write(&empty, "").unwrap();
        assert!(read_instances(&empty).unwrap().is_empty());
    }

    #[test]
    fn unknown_fields_rejected() {
        let mut v = serde_json::to_value(sample(1)).unwrap();
        v["extra"] = serde_json::json!(1);
        let line = serde_json::to_string(&v).unwrap();
        assert!(read_jsonl_from::<PredictionInstance, _>(line.as_bytes()).is_err());
    }
}
