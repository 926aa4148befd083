use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{MetricKind, MetricsError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub metric: MetricKind,
    pub predictor: String,
    /// (horizon in seconds, value)
    pub values: Vec<(f64, f64)>,
}

/// Metric values for one dataset variant, laid out like the usual
/// predictor-by-horizon comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub variant: String,
    pub n_instances: usize,
    pub rows: Vec<MetricRow>,
}

fn horizon_key(h: f64) -> String {
    format!("{h}")
}

impl ReportTable {
    pub fn value(&self, metric: MetricKind, predictor: &str, horizon_s: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.metric == metric && r.predictor == predictor)?
            .values
            .iter()
            .find(|(h, _)| (h - horizon_s).abs() < 1e-9)
            .map(|(_, v)| *v)
    }

    pub fn horizons(&self) -> Vec<f64> {
        let mut hs: Vec<f64> = Vec::new();
        for r in &self.rows {
            for (h, _) in &r.values {
                if !hs.iter().any(|x| (x - h).abs() < 1e-12) {
                    hs.push(*h);
                }
            }
        }
        hs.sort_by(f64::total_cmp);
        hs
    }

    /// `{variant, n_instances, metrics: {metric: {predictor: {horizon_s: value}}}}`
    pub fn to_json(&self) -> Value {
        let mut metrics: BTreeMap<&str, Map<String, Value>> = BTreeMap::new();
        for r in &self.rows {
            let per_h: Map<String, Value> = r.values.iter().map(|(h, v)| (horizon_key(*h), json!(v))).collect();
            metrics.entry(r.metric.as_str()).or_default().insert(r.predictor.clone(), Value::Object(per_h));
        }
        json!({
            "variant": self.variant,
            "n_instances": self.n_instances,
            "metrics": metrics,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, MetricsError> {
        let bad = |m: &str| MetricsError::Merge(format!("malformed report: {m}"));
        let variant = v["variant"].as_str().ok_or_else(|| bad("missing variant"))?.to_string();
        let n_instances = v["n_instances"].as_u64().ok_or_else(|| bad("missing n_instances"))? as usize;
        let metrics = v["metrics"].as_object().ok_or_else(|| bad("missing metrics"))?;
        let mut rows = Vec::new();
        for (name, per_pred) in metrics {
            let metric: MetricKind = name.parse().map_err(|e: String| bad(&e))?;
            for (pred, per_h) in per_pred.as_object().ok_or_else(|| bad("metric entry is not an object"))? {
                let mut values = Vec::new();
                for (h, val) in per_h.as_object().ok_or_else(|| bad("predictor entry is not an object"))? {
                    let h: f64 = h.parse().map_err(|_| bad("horizon key is not a number"))?;
                    values.push((h, val.as_f64().ok_or_else(|| bad("value is not a number"))?));
                }
                values.sort_by(|a, b| a.0.total_cmp(&b.0));
                rows.push(MetricRow { metric, predictor: pred.clone(), values });
            }
        }
        rows.sort_by_key(|r| r.metric);
        Ok(Self { variant, n_instances, rows })
    }

    /// Combines reports per variant. Reports of one variant must agree on
    /// the instance count and may not repeat a (metric, predictor) pair.
    pub fn merge(tables: &[ReportTable]) -> Result<Vec<ReportTable>, MetricsError> {
        let mut out: Vec<ReportTable> = Vec::new();
        for t in tables {
            match out.iter_mut().find(|o| o.variant == t.variant) {
                None => out.push(t.clone()),
                Some(o) => {
                    if o.n_instances != t.n_instances {
                        return Err(MetricsError::Merge(format!(
                            "variant {} has {} instances in one report and {} in another",
                            t.variant, o.n_instances, t.n_instances
                        )));
                    }
                    for r in &t.rows {
                        if o.rows.iter().any(|x| x.metric == r.metric && x.predictor == r.predictor) {
                            return Err(MetricsError::Merge(format!(
                                "{} for {} appears twice in variant {}",
                                r.metric, r.predictor, t.variant
                            )));
                        }
                        o.rows.push(r.clone());
                    }
                }
            }
        }
        for o in &mut out {
            // Stable: predictors keep first-seen order within a metric.
            o.rows.sort_by_key(|r| r.metric);
        }
        Ok(out)
    }
}

/// Plain-text table: one row per (metric, predictor), one column group per
/// variant with a column per horizon.
pub fn render_text(tables: &[ReportTable]) -> String {
    let mut keys: Vec<(MetricKind, String)> = Vec::new();
    let mut sorted: Vec<&ReportTable> = tables.iter().collect();
    sorted.sort_by_key(|t| if t.variant == "full" { 0 } else { 1 });
    for t in &sorted {
        for r in &t.rows {
            let k = (r.metric, r.predictor.clone());
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
    }
    keys.sort_by_key(|k| k.0);

    let name_w = keys.iter().map(|k| k.1.len()).max().unwrap_or(0).max(9);
    let cell = 8;
    let left = 8 + 3 + name_w;
    let groups: Vec<(String, Vec<f64>)> = sorted
        .iter()
        .map(|t| (format!("{} (n={})", t.variant, t.n_instances), t.horizons()))
        .collect();
    let group_w: Vec<usize> = groups.iter().map(|(label, hs)| (hs.len() * cell).max(label.len() + 2)).collect();

    let mut s = String::new();
    let _ = write!(s, "{:<left$}", "Dataset");
    for ((label, _), w) in groups.iter().zip(&group_w) {
        let _ = write!(s, " |{label:^w$}");
    }
    s.push('\n');
    let _ = write!(s, "{:<left$}", "Time Horizon");
    for ((_, hs), w) in groups.iter().zip(&group_w) {
        let cols: String = hs.iter().map(|h| format!("{:>cell$}", format!("{h} s"))).collect();
        let _ = write!(s, " |{cols:>w$}");
    }
    s.push('\n');
    let total = left + group_w.iter().map(|w| w + 2).sum::<usize>();
    s.push_str(&"-".repeat(total));
    s.push('\n');

    let mut prev_metric = None;
    for (metric, pred) in &keys {
        if prev_metric.is_some() && prev_metric != Some(*metric) {
            s.push_str(&"-".repeat(total));
            s.push('\n');
        }
        let label = if prev_metric == Some(*metric) { "" } else { metric.as_str() };
        prev_metric = Some(*metric);
        let _ = write!(s, "{label:<8} | {pred:<name_w$}");
        for (t, w) in sorted.iter().zip(&group_w) {
            let cols: String = t
                .horizons()
                .iter()
                .map(|&h| match t.value(*metric, pred, h) {
                    Some(v) => format!("{v:>cell$.3}"),
                    None => format!("{:>cell$}", "-"),
                })
                .collect();
            let _ = write!(s, " |{cols:>w$}");
        }
        s.push('\n');
    }
    s
}
