//! Least-squares growth models with a held-out residual.
//!
//! Samples are ranked by `x`; even ranks train, odd ranks are held out, and
//! the report carries the largest relative residual `|y − ŷ| / |y|` on the
//! held-out half.

use serde::{Deserialize, Serialize};

use super::{distortion_envelope, DistortionSample, MetricError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `a·x + b`
    Linear,
    /// `a·log(x+1) + b`
    Log,
    /// `a·x^α`, fitted on log–log axes
    Power,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: FitModel,
    pub a: f64,
    pub b: f64,
    /// Exponent of the power model; `1` for the others.
    pub alpha: f64,
    pub max_relative_residual: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub x_min: f64,
    pub x_max: f64,
}

impl FitReport {
    pub fn predict(&self, x: f64) -> f64 {
        match self.model {
            FitModel::Linear => self.a * x + self.b,
            FitModel::Log => self.a * x.ln_1p() + self.b,
            FitModel::Power => self.a * x.powf(self.alpha),
        }
    }
}

/// Minimum sample count for distortion fits.
pub const MIN_DISTORTION_SAMPLES: usize = 8;
/// Minimum sample count for any fit: two to train, one held out.
pub const MIN_SAMPLES: usize = 3;

fn least_squares(pts: &[(f64, f64)]) -> Result<(f64, f64), MetricError> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 || !sxx.is_finite() {
        return Err(MetricError::DegenerateFit("training abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Fit `model` to `(x, y)` samples.
pub fn fit(samples: &[(f64, f64)], model: FitModel) -> Result<FitReport, MetricError> {
    if samples.len() < MIN_SAMPLES {
        return Err(MetricError::InsufficientSamples { need: MIN_SAMPLES, got: samples.len() });
    }
    let mut ranked = samples.to_vec();
    ranked.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    let train: Vec<(f64, f64)> = ranked.iter().step_by(2).copied().collect();
    let test: Vec<(f64, f64)> = ranked.iter().skip(1).step_by(2).copied().collect();
    let (a, b, alpha) = match model {
        FitModel::Linear => {
            let (a, b) = least_squares(&train)?;
            (a, b, 1.0)
        }
        FitModel::Log => {
            let t: Vec<(f64, f64)> = train.iter().map(|&(x, y)| (x.ln_1p(), y)).collect();
            let (a, b) = least_squares(&t)?;
            (a, b, 1.0)
        }
        FitModel::Power => {
            if train.iter().chain(test.iter()).any(|&(x, y)| x <= 0.0 || y <= 0.0) {
                return Err(MetricError::DegenerateFit("power model needs positive samples".into()));
            }
            let t: Vec<(f64, f64)> = train.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
            let (slope, icpt) = least_squares(&t)?;
            (icpt.exp(), 0.0, slope)
        }
    };
    let mut report = FitReport {
        model,
        a,
        b,
        alpha,
        max_relative_residual: 0.0,
        n_train: train.len(),
        n_test: test.len(),
        x_min: ranked[0].0,
        x_max: ranked[ranked.len() - 1].0,
    };
    report.max_relative_residual = test
        .iter()
        .map(|&(x, y)| {
            let r = (y - report.predict(x)).abs();
            if y == 0.0 {
                if r == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                r / y.abs()
            }
        })
        .fold(0.0, f64::max);
    Ok(report)
}

/// Fit ambient length as a function of intrinsic length along the
/// interior distortion envelope (see [`distortion_envelope`]).
pub fn fit_distortion(sample: &DistortionSample, model: FitModel) -> Result<FitReport, MetricError> {
    let pts = distortion_envelope(sample);
    if pts.len() < MIN_DISTORTION_SAMPLES {
        return Err(MetricError::InsufficientSamples { need: MIN_DISTORTION_SAMPLES, got: pts.len() });
    }
    fit(&pts, model)
}
