//! Multimodal trajectory metrics.
//!
//! For a prediction with modes `k` and ground truth `g`, `d_k(t)` is the
//! distance between mode `k`'s mean and `g` at step `t`, and `K_T` is the
//! step index of horizon `T`. By default every metric except minADE looks
//! at step `K_T` only; [`HorizonConvention::AveragedToHorizon`] averages
//! steps `1..=K_T` instead.

mod report;

pub use report::{render_text, MetricRow, ReportTable};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::PredictionInstance;
use crate::numeric;
use crate::predictors::{Cov2, ModePrediction, MultimodalPrediction, Predictor, PSD_TOLERANCE};
use crate::trajectory::TimedPoint;

/// Smallest covariance eigenvalue used when computing NLL, m².
pub const NLL_EPSILON: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("horizon step {step} outside the available {available} steps")]
    HorizonExceedsFuture { step: usize, available: usize },
    #[error("covariance is singular even after regularization (det {det})")]
    SingularCovariance { det: f64 },
    #[error("no prediction for instance {0}")]
    MissingPrediction(String),
    #[error("duplicate prediction for instance {0}")]
    DuplicatePrediction(String),
    #[error("invalid prediction for instance {instance_id}: {reason}")]
    InvalidPrediction { instance_id: String, reason: String },
    #[error("invalid horizon {0} s")]
    InvalidHorizon(f64),
    #[error("cannot merge reports: {0}")]
    Merge(String),
    #[error("empty dataset")]
    EmptyDataset,
}

impl MetricsError {
    pub fn kind(&self) -> &'static str {
        match self {
            MetricsError::HorizonExceedsFuture { .. } => "HorizonExceedsFuture",
            MetricsError::SingularCovariance { .. } => "SingularCovariance",
            MetricsError::MissingPrediction(_) => "MissingPrediction",
            MetricsError::DuplicatePrediction(_) => "DuplicatePrediction",
            MetricsError::InvalidPrediction { .. } => "InvalidPrediction",
            MetricsError::InvalidHorizon(_) => "InvalidHorizon",
            MetricsError::Merge(_) => "Merge",
            MetricsError::EmptyDataset => "EmptyDataset",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricKind {
    #[serde(rename = "RMS")]
    Rms,
    #[serde(rename = "predRMS")]
    PredRms,
    #[serde(rename = "minADE")]
    MinAde,
    #[serde(rename = "minFDE")]
    MinFde,
    #[serde(rename = "expRMS")]
    ExpRms,
    #[serde(rename = "NLL")]
    Nll,
}

impl MetricKind {
    pub const ALL: [MetricKind; 6] =
        [MetricKind::Rms, MetricKind::PredRms, MetricKind::MinAde, MetricKind::MinFde, MetricKind::ExpRms, MetricKind::Nll];
    pub const MULTIMODAL: [MetricKind; 5] =
        [MetricKind::PredRms, MetricKind::MinAde, MetricKind::MinFde, MetricKind::ExpRms, MetricKind::Nll];

    pub fn as_str(&self) -> &'static str {
        match self {
            MetricKind::Rms => "RMS",
            MetricKind::PredRms => "predRMS",
            MetricKind::MinAde => "minADE",
            MetricKind::MinFde => "minFDE",
            MetricKind::ExpRms => "expRMS",
            MetricKind::Nll => "NLL",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MetricKind::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown metric '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HorizonConvention {
    /// Displacement (or density) at the horizon step only.
    #[default]
    AtHorizon,
    /// Mean over every step up to the horizon.
    AveragedToHorizon,
}

/// Evaluation horizons in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HorizonSet {
    pub horizons_s: Vec<f64>,
}

impl Default for HorizonSet {
    fn default() -> Self {
        Self { horizons_s: vec![1.0, 2.0, 3.0] }
    }
}

impl HorizonSet {
    pub fn new(horizons_s: Vec<f64>) -> Self {
        Self { horizons_s }
    }

    /// Step index of every horizon at `rate_hz`, checked against
    /// `future_steps`.
    pub fn steps(&self, rate_hz: f64, future_steps: usize) -> Result<Vec<usize>, MetricsError> {
        self.horizons_s
            .iter()
            .map(|&h| {
                let k = h * rate_hz;
                if !(h > 0.0) || (k - k.round()).abs() > 1e-9 {
                    return Err(MetricsError::InvalidHorizon(h));
                }
                let k = k.round() as usize;
                if k > future_steps {
                    return Err(MetricsError::HorizonExceedsFuture { step: k, available: future_steps });
                }
                Ok(k)
            })
            .collect()
    }
}

impl FromStr for HorizonSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let horizons_s = s
            .split(',')
            .map(|p| p.trim().trim_end_matches('s').trim().parse::<f64>().map_err(|e| format!("bad horizon '{p}': {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if horizons_s.is_empty() {
            return Err("empty horizon list".into());
        }
        Ok(Self { horizons_s })
    }
}

fn check_step(k_t: usize, mode_steps: usize, gt_steps: usize) -> Result<(), MetricsError> {
    let available = mode_steps.min(gt_steps);
    if k_t == 0 || k_t > available {
        return Err(MetricsError::HorizonExceedsFuture { step: k_t, available });
    }
    Ok(())
}

fn check_pred(pred: &MultimodalPrediction, gt: &[TimedPoint], k_t: usize) -> Result<(), MetricsError> {
    let mode_steps = pred.modes.iter().map(|m| m.steps.len()).min().unwrap_or(0);
    check_step(k_t, mode_steps, gt.len())
}

/// Distance of `mode` from ground truth at 1-based step `k`.
fn dist(mode: &ModePrediction, gt: &[TimedPoint], k: usize) -> f64 {
    (mode.steps[k - 1].mean - gt[k - 1].pos).norm()
}

fn ade(mode: &ModePrediction, gt: &[TimedPoint], k_t: usize) -> f64 {
    numeric::mean((1..=k_t).map(|k| dist(mode, gt, k)))
}

/// Smallest mean displacement over steps `1..=k_t` across modes.
pub fn min_ade(pred: &MultimodalPrediction, gt: &[TimedPoint], k_t: usize) -> Result<f64, MetricsError> {
    check_pred(pred, gt, k_t)?;
    Ok(pred.modes.iter().map(|m| ade(m, gt, k_t)).fold(f64::INFINITY, f64::min))
}

/// Smallest displacement at step `k_t` across modes.
pub fn min_fde(pred: &MultimodalPrediction, gt: &[TimedPoint], k_t: usize) -> Result<f64, MetricsError> {
    check_pred(pred, gt, k_t)?;
    Ok(pred.modes.iter().map(|m| dist(m, gt, k_t)).fold(f64::INFINITY, f64::min))
}

/// Log density of a bivariate normal at offset `r`. The covariance is
/// regularized by raising its smallest eigenvalue to at least `eps`, so
/// well-conditioned matrices are used unchanged.
pub fn gaussian_log_density(r: (f64, f64), cov: &Cov2, eps: f64) -> Result<f64, MetricsError> {
    let (lo, _) = cov.eigenvalues();
    if !(lo >= -PSD_TOLERANCE) {
        return Err(MetricsError::SingularCovariance { det: cov.det() });
    }
    let shift = (eps - lo).max(0.0);
    let (a, b, c) = (cov.xx + shift, cov.xy, cov.yy + shift);
    let det = a * c - b * b;
    if !(det > 0.0) || !det.is_finite() {
        return Err(MetricsError::SingularCovariance { det });
    }
    let maha = (c * r.0 * r.0 - 2.0 * b * r.0 * r.1 + a * r.1 * r.1) / det;
    Ok(-std::f64::consts::TAU.ln() - 0.5 * det.ln() - 0.5 * maha)
}

fn nll_at(pred: &MultimodalPrediction, gt: &[TimedPoint], k: usize) -> Result<f64, MetricsError> {
    let g = gt[k - 1].pos;
    let terms = pred
        .modes
        .iter()
        .map(|m| {
            let s = &m.steps[k - 1];
            let r = g - s.mean;
            Ok(m.weight.ln() + gaussian_log_density((r.x, r.y), &s.cov, NLL_EPSILON)?)
        })
        .collect::<Result<Vec<f64>, MetricsError>>()?;
    Ok(-numeric::log_sum_exp(&terms))
}

/// Negative log-likelihood of the ground truth at step `k_t` under the
/// predicted Gaussian mixture, in nats.
pub fn nll(pred: &MultimodalPrediction, gt: &[TimedPoint], k_t: usize) -> Result<f64, MetricsError> {
    check_pred(pred, gt, k_t)?;
    nll_at(pred, gt, k_t)
}

fn nll_with(
    pred: &MultimodalPrediction,
    gt: &[TimedPoint],
    k_t: usize,
    conv: HorizonConvention,
) -> Result<f64, MetricsError> {
    check_pred(pred, gt, k_t)?;
    match conv {
        HorizonConvention::AtHorizon => nll_at(pred, gt, k_t),
        HorizonConvention::AveragedToHorizon => {
            let v = (1..=k_t).map(|k| nll_at(pred, gt, k)).collect::<Result<Vec<_>, _>>()?;
            Ok(numeric::mean(v))
        }
    }
}

fn sq_err(mode: &ModePrediction, gt: &[TimedPoint], k_t: usize, conv: HorizonConvention) -> f64 {
    match conv {
        HorizonConvention::AtHorizon => dist(mode, gt, k_t).powi(2),
        HorizonConvention::AveragedToHorizon => numeric::mean((1..=k_t).map(|k| dist(mode, gt, k).powi(2))),
    }
}

/// Squared error of the most probable mode for one instance.
pub fn pred_sq_err(
    pred: &MultimodalPrediction,
    gt: &[TimedPoint],
    k_t: usize,
    conv: HorizonConvention,
) -> Result<f64, MetricsError> {
    check_pred(pred, gt, k_t)?;
    let top = pred.most_probable().ok_or(MetricsError::InvalidPrediction {
        instance_id: pred.instance_id.clone(),
        reason: "no modes".into(),
    })?;
    Ok(sq_err(&pred.modes[top], gt, k_t, conv))
}

/// Weighted squared error across modes for one instance.
pub fn expected_sq_err(
    pred: &MultimodalPrediction,
    gt: &[TimedPoint],
    k_t: usize,
    conv: HorizonConvention,
) -> Result<f64, MetricsError> {
    check_pred(pred, gt, k_t)?;
    Ok(numeric::sum(pred.modes.iter().map(|m| m.weight * sq_err(m, gt, k_t, conv))))
}

fn rms_over<F>(pairs: &[(&MultimodalPrediction, &[TimedPoint])], f: F) -> Result<f64, MetricsError>
where
    F: Fn(&MultimodalPrediction, &[TimedPoint]) -> Result<f64, MetricsError>,
{
    if pairs.is_empty() {
        return Err(MetricsError::EmptyDataset);
    }
    let sq = pairs.iter().map(|(p, g)| f(p, g)).collect::<Result<Vec<_>, _>>()?;
    Ok(numeric::mean(sq).sqrt())
}

/// RMS error of the most probable mode over a dataset.
pub fn pred_rms(
    pairs: &[(&MultimodalPrediction, &[TimedPoint])],
    k_t: usize,
    conv: HorizonConvention,
) -> Result<f64, MetricsError> {
    rms_over(pairs, |p, g| pred_sq_err(p, g, k_t, conv))
}

/// Square root of the mean probability-weighted squared error.
pub fn exp_rms(
    pairs: &[(&MultimodalPrediction, &[TimedPoint])],
    k_t: usize,
    conv: HorizonConvention,
) -> Result<f64, MetricsError> {
    rms_over(pairs, |p, g| expected_sq_err(p, g, k_t, conv))
}

/// Options for [`evaluate`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub horizons: HorizonSet,
    pub rate_hz: f64,
    pub convention: HorizonConvention,
    pub variant: String,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            horizons: HorizonSet::default(),
            rate_hz: 10.0,
            convention: HorizonConvention::AtHorizon,
            variant: "full".into(),
        }
    }
}

/// Checks that every instance has exactly one well-formed prediction whose
/// timestamps follow the instance's future.
pub fn validate_predictions<'a>(
    instances: &[PredictionInstance],
    predictions: &'a [MultimodalPrediction],
) -> Result<BTreeMap<&'a str, &'a MultimodalPrediction>, MetricsError> {
    let mut by_id: BTreeMap<&str, &MultimodalPrediction> = BTreeMap::new();
    for p in predictions {
        if by_id.insert(p.instance_id.as_str(), p).is_some() {
            return Err(MetricsError::DuplicatePrediction(p.instance_id.clone()));
        }
    }
    for inst in instances {
        let p = by_id
            .get(inst.instance_id.as_str())
            .ok_or_else(|| MetricsError::MissingPrediction(inst.instance_id.clone()))?;
        let invalid = |reason: String| MetricsError::InvalidPrediction { instance_id: inst.instance_id.clone(), reason };
        p.validate().map_err(invalid)?;
        let steps = &p.modes[0].steps;
        if steps.len() < inst.future.len() {
            return Err(invalid(format!("{} steps, expected {}", steps.len(), inst.future.len())));
        }
        if let Some((j, _)) = steps.iter().zip(&inst.future).enumerate().find(|(_, (s, g))| s.t_us != g.t_us) {
            return Err(invalid(format!("step {j} timestamp does not match the ground truth")));
        }
    }
    Ok(by_id)
}

/// Scores `predictions` against `instances`. Unimodal predictors get the RMS
/// row only; multimodal ones get predRMS, minADE, minFDE, expRMS and NLL.
pub fn evaluate(
    instances: &[PredictionInstance],
    predictions: &[MultimodalPrediction],
    predictor: &str,
    unimodal: bool,
    opts: &EvalOptions,
) -> Result<ReportTable, MetricsError> {
    if instances.is_empty() {
        return Err(MetricsError::EmptyDataset);
    }
    let by_id = validate_predictions(instances, predictions)?;
    let future_steps = instances.iter().map(|i| i.future.len()).min().unwrap_or(0);
    let steps = opts.horizons.steps(opts.rate_hz, future_steps)?;
    let pairs: Vec<(&MultimodalPrediction, &[TimedPoint])> =
        instances.iter().map(|i| (by_id[i.instance_id.as_str()], i.future.as_slice())).collect();

    let metrics: &[MetricKind] = if unimodal { &[MetricKind::Rms] } else { &MetricKind::MULTIMODAL };
    let conv = opts.convention;
    let mut rows = Vec::new();
    for &metric in metrics {
        let values = steps
            .iter()
            .zip(&opts.horizons.horizons_s)
            .map(|(&k, &h)| {
                let per_instance = |f: &(dyn Fn(&MultimodalPrediction, &[TimedPoint]) -> Result<f64, MetricsError> + Sync)| {
                    pairs.par_iter().map(|(p, g)| f(p, g)).collect::<Result<Vec<f64>, _>>()
                };
                let v = match metric {
                    MetricKind::Rms | MetricKind::PredRms => {
                        numeric::mean(per_instance(&|p, g| pred_sq_err(p, g, k, conv))?).sqrt()
                    }
                    MetricKind::ExpRms => numeric::mean(per_instance(&|p, g| expected_sq_err(p, g, k, conv))?).sqrt(),
                    MetricKind::MinAde => numeric::mean(per_instance(&|p, g| min_ade(p, g, k))?),
                    MetricKind::MinFde => numeric::mean(per_instance(&|p, g| min_fde(p, g, k))?),
                    MetricKind::Nll => numeric::mean(per_instance(&|p, g| nll_with(p, g, k, conv))?),
                };
                Ok((h, v))
            })
            .collect::<Result<Vec<_>, MetricsError>>()?;
        rows.push(MetricRow { metric, predictor: predictor.to_string(), values });
    }
    Ok(ReportTable { variant: opts.variant.clone(), n_instances: instances.len(), rows })
}

/// Runs `predictor` over every instance, in instance order.
pub fn predict_all<P: Predictor + ?Sized>(predictor: &P, instances: &[PredictionInstance]) -> Vec<MultimodalPrediction> {
    instances.par_iter().map(|i| predictor.predict(i)).collect()
}

/// Predicts and scores in one go.
pub fn evaluate_predictor<P: Predictor + ?Sized>(
    predictor: &P,
    instances: &[PredictionInstance],
    opts: &EvalOptions,
) -> Result<ReportTable, MetricsError> {
    let preds = predict_all(predictor, instances);
    evaluate(instances, &preds, predictor.name(), predictor.is_unimodal(), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictors::ModeStep;
    use crate::trajectory::Vec2;

    fn gt(n: usize) -> Vec<TimedPoint> {
        (1..=n).map(|k| TimedPoint::new(k as i64 * 100_000, k as f64 * 0.1, 0.0)).collect()
    }

    /// Mode offset from ground truth by a constant vector.
    fn offset_mode(gt: &[TimedPoint], w: f64, off: (f64, f64), var: f64) -> ModePrediction {
        ModePrediction {
            weight: w,
            steps: gt
                .iter()
                .map(|g| ModeStep { t_us: g.t_us, mean: g.pos + Vec2::new(off.0, off.1), cov: Cov2::isotropic(var) })
                .collect(),
        }
    }

    fn pred(modes: Vec<ModePrediction>) -> MultimodalPrediction {
        MultimodalPrediction { instance_id: "i".into(), modes }
    }

    #[test]
    fn min_ade_fde_examples() {
        let g = gt(30);
        let p = pred(vec![offset_mode(&g, 0.5, (1.0, 0.0), 1.0), offset_mode(&g, 0.5, (0.0, 0.2), 1.0)]);
        assert!((min_ade(&p, &g, 30).unwrap() - 0.2).abs() < 1e-12);
        let single = pred(vec![offset_mode(&g, 1.0, (0.3, 0.4), 1.0)]);
        assert!((min_ade(&single, &g, 10).unwrap() - 0.5).abs() < 1e-12);

        let p = pred(vec![offset_mode(&g, 0.5, (3.0, 0.0), 1.0), offset_mode(&g, 0.5, (0.0, 1.0), 1.0)]);
        assert!((min_fde(&p, &g, 30).unwrap() - 1.0).abs() < 1e-12);
        let exact = pred(vec![offset_mode(&g, 1.0, (0.0, 0.0), 1.0)]);
        assert_eq!(min_fde(&exact, &g, 30).unwrap(), 0.0);
    }

    #[test]
    fn horizon_errors() {
        let g = gt(30);
        let p = pred(vec![offset_mode(&g, 1.0, (0.0, 0.0), 1.0)]);
        assert!(matches!(min_ade(&p, &g, 31), Err(MetricsError::HorizonExceedsFuture { .. })));
        assert!(matches!(nll(&p, &g, 0), Err(MetricsError::HorizonExceedsFuture { .. })));
        assert!(HorizonSet::new(vec![4.0]).steps(10.0, 30).is_err());
        assert!(HorizonSet::new(vec![0.25]).steps(10.0, 30).is_err());
        assert_eq!(HorizonSet::default().steps(10.0, 30).unwrap(), vec![10, 20, 30]);
    }

    #[test]
    fn rms_examples() {
        let g = gt(30);
        let p1 = pred(vec![offset_mode(&g, 1.0, (0.0, 0.0), 1.0)]);
        let p2 = pred(vec![offset_mode(&g, 1.0, (2.0, 0.0), 1.0)]);
        let conv = HorizonConvention::AtHorizon;
        assert!((pred_rms(&[(&p2, &g)], 30, conv).unwrap() - 2.0).abs() < 1e-12);
        let both = [(&p1, g.as_slice()), (&p2, g.as_slice())];
        assert!((pred_rms(&both, 30, conv).unwrap() - 2f64.sqrt()).abs() < 1e-12);

        let mix = pred(vec![offset_mode(&g, 0.75, (0.0, 0.0), 1.0), offset_mode(&g, 0.25, (0.0, 2.0), 1.0)]);
        assert!((exp_rms(&[(&mix, &g)], 30, conv).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(pred_rms(&[(&mix, &g)], 30, conv).unwrap(), 0.0);
    }

    #[test]
    fn nll_anchors() {
        let g = gt(30);
        let p = pred(vec![offset_mode(&g, 1.0, (0.0, 0.0), 1.0)]);
        assert!((nll(&p, &g, 30).unwrap() - std::f64::consts::TAU.ln()).abs() < 1e-12);
        let exact = -gaussian_log_density((0.0, 0.0), &Cov2::isotropic(1.0), 0.0).unwrap();
        assert!((exact - 1.837_877_066_409_345_3).abs() < 1e-12);
        let off = -gaussian_log_density((1.0, 0.0), &Cov2::isotropic(1.0), 0.0).unwrap();
        assert!((off - (std::f64::consts::TAU.ln() + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn nll_identical_modes_match_single() {
        let g = gt(30);
        let single = pred(vec![offset_mode(&g, 1.0, (0.3, -0.2), 0.5)]);
        let doubled = pred(vec![offset_mode(&g, 0.3, (0.3, -0.2), 0.5), offset_mode(&g, 0.7, (0.3, -0.2), 0.5)]);
        assert!((nll(&single, &g, 20).unwrap() - nll(&doubled, &g, 20).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn singular_covariance() {
        let c = Cov2 { xx: 1.0, xy: 1.0 + 1e-3, yy: 1.0 };
        assert!(matches!(gaussian_log_density((0.0, 0.0), &c, NLL_EPSILON), Err(MetricsError::SingularCovariance { .. })));
        // Zero covariance is rescued by the regularizer.
        let zero = gaussian_log_density((0.0, 0.0), &Cov2::default(), NLL_EPSILON).unwrap();
        assert!((zero - (-std::f64::consts::TAU.ln() - NLL_EPSILON.ln())).abs() < 1e-9);
        let nan = Cov2 { xx: f64::NAN, xy: 0.0, yy: 1.0 };
        assert!(gaussian_log_density((0.0, 0.0), &nan, NLL_EPSILON).is_err());
    }

    #[test]
    fn averaged_convention() {
        let g = gt(30);
        // Error grows linearly: 0.1 m per step.
        let mode = ModePrediction {
            weight: 1.0,
            steps: g
                .iter()
                .enumerate()
                .map(|(k, p)| ModeStep { t_us: p.t_us, mean: p.pos + Vec2::new(0.1 * (k + 1) as f64, 0.0), cov: Cov2::isotropic(1.0) })
                .collect(),
        };
        let p = pred(vec![mode]);
        let at = pred_rms(&[(&p, &g)], 10, HorizonConvention::AtHorizon).unwrap();
        let avg = pred_rms(&[(&p, &g)], 10, HorizonConvention::AveragedToHorizon).unwrap();
        assert!((at - 1.0).abs() < 1e-12);
        let expected = ((1..=10).map(|k| (0.1 * k as f64).powi(2)).sum::<f64>() / 10.0).sqrt();
        assert!((avg - expected).abs() < 1e-12);
    }

    #[test]
    fn metric_names_parse() {
        for m in MetricKind::ALL {
            assert_eq!(m.as_str().parse::<MetricKind>().unwrap(), m);
        }
        assert_eq!("1,2,3".parse::<HorizonSet>().unwrap(), HorizonSet::default());
        assert_eq!("0.5s, 1s".parse::<HorizonSet>().unwrap().horizons_s, vec![0.5, 1.0]);
    }
}
