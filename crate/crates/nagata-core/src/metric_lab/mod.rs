//! Metric views, metric transforms and the distortion / quasi-norm
//! experiments built on word balls.

pub mod distortion;
pub mod fit;
pub mod karidi;
pub mod quotient;
pub mod word_metric;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use distortion::{distortion_envelope, subgroup_distortion, DistortionPair, DistortionSample};
pub use fit::{fit, fit_distortion, FitModel, FitReport};
pub use karidi::{karidi_comparison, karidi_norm, karidi_quasinorm, KaridiCoordinates, KaridiEstimate};
pub use quotient::{hausdorff_quotient, CosetNorm, HausdorffQuotient};
pub use word_metric::{GroupMetric, L1Metric, TableMetric};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("snowflake exponent must lie in (0, 1], got {0}")]
    BadExponent(f64),
    #[error("empty coset set")]
    EmptyCosets,
    #[error("need at least {need} samples, got {got}")]
    InsufficientSamples { need: usize, got: usize },
    #[error("fit is degenerate: {0}")]
    DegenerateFit(String),
    #[error("layer sizes {layers:?} do not match coordinate arity {arity}")]
    LayerMismatch { layers: Vec<usize>, arity: usize },
    #[error("no samples with word length above 1")]
    NoSamples,
    #[error("ball search for subgroup norms failed: {0}")]
    Ball(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Transform {
    Snowflake { alpha: f64 },
    Log,
    Min1,
    Max1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MicroMacro {
    Min1,
    Max1,
}

type DistFn<'a> = Arc<dyn Fn(usize, usize) -> f64 + Send + Sync + 'a>;

/// A finite carrier `0..len` with a distance oracle and the list of
/// transforms applied to it.
#[derive(Clone)]
pub struct MetricView<'a> {
    label: String,
    len: usize,
    base: DistFn<'a>,
    transforms: Vec<Transform>,
}

impl std::fmt::Debug for MetricView<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricView")
            .field("label", &self.label)
            .field("len", &self.len)
            .field("transforms", &self.transforms)
            .finish()
    }
}

impl<'a> MetricView<'a> {
    pub fn new(label: impl Into<String>, len: usize, d: impl Fn(usize, usize) -> f64 + Send + Sync + 'a) -> Self {
        MetricView { label: label.into(), len, base: Arc::new(d), transforms: Vec::new() }
    }

    /// Points of a word ball (or any element list) under a group metric.
    pub fn from_elements<E: Sync, M: GroupMetric<E>>(label: impl Into<String>, points: &'a [E], metric: &'a M) -> Self {
        Self::new(label, points.len(), move |i, j| metric.dist(&points[i], &points[j]) as f64)
    }

    /// The integers `lo..=hi` with `|x − y|`.
    pub fn integers(lo: i64, hi: i64) -> MetricView<'static> {
        let n = (hi - lo + 1).max(0) as usize;
        MetricView::new(format!("Z[{lo},{hi}]"), n, |i, j| (i as f64 - j as f64).abs())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn transforms(&self) -> &[Transform] {
        &self.transforms
    }

    /// Distance after all transforms. Runs of snowflakes are applied as one
    /// power with the product exponent, so `snowflake(snowflake(v,α),β)`
    /// and `snowflake(v,αβ)` agree bit for bit.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let mut d = (self.base)(i, j);
        let mut pending: Option<f64> = None;
        for t in &self.transforms {
            if let Transform::Snowflake { alpha } = t {
                pending = Some(pending.map_or(*alpha, |p| p * alpha));
                continue;
            }
            if let Some(p) = pending.take() {
                d = d.powf(p);
            }
            d = match t {
                Transform::Log => d.ln_1p(),
                Transform::Min1 => d.min(1.0),
                Transform::Max1 if i != j => d.max(1.0),
                _ => d,
            };
        }
        if let Some(p) = pending {
            d = d.powf(p);
        }
        d
    }

    fn with(&self, t: Transform) -> Self {
        let mut v = self.clone();
        v.transforms.push(t);
        v
    }
}

/// `d ↦ d^α`.
pub fn snowflake<'a>(v: &MetricView<'a>, alpha: f64) -> Result<MetricView<'a>, MetricError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(MetricError::BadExponent(alpha));
    }
    Ok(v.with(Transform::Snowflake { alpha }))
}

/// `d ↦ log(d + 1)`.
pub fn log_transform<'a>(v: &MetricView<'a>) -> MetricView<'a> {
    v.with(Transform::Log)
}

/// `d ↦ min(d, 1)` or, off the diagonal, `d ↦ max(d, 1)`.
pub fn micro_macro<'a>(v: &MetricView<'a>, mode: MicroMacro) -> MetricView<'a> {
    v.with(match mode {
        MicroMacro::Min1 => Transform::Min1,
        MicroMacro::Max1 => Transform::Max1,
    })
}

/// A failed metric axiom on a concrete triple.
#[derive(Clone, Debug, PartialEq)]
pub enum AxiomViolation {
    Symmetry { i: usize, j: usize },
    Identity { i: usize },
    Negative { i: usize, j: usize },
    Triangle { i: usize, j: usize, k: usize },
}

const TOL: f64 = 1e-12;

fn check_pair(v: &MetricView<'_>, i: usize, j: usize) -> Result<(), AxiomViolation> {
    let d = v.distance(i, j);
    if d < 0.0 || d.is_nan() {
        return Err(AxiomViolation::Negative { i, j });
    }
    if (d - v.distance(j, i)).abs() > TOL * (1.0 + d) {
        return Err(AxiomViolation::Symmetry { i, j });
    }
    if i == j && d != 0.0 {
        return Err(AxiomViolation::Identity { i });
    }
    Ok(())
}

fn check_triple(d: impl Fn(usize, usize) -> f64, i: usize, j: usize, k: usize) -> Result<(), AxiomViolation> {
    let lhs = d(i, k);
    let rhs = d(i, j) + d(j, k);
    if lhs > rhs + TOL * (1.0 + lhs) {
        return Err(AxiomViolation::Triangle { i, j, k });
    }
    Ok(())
}

/// Every pair and every triple of the carrier.
pub fn check_axioms_exhaustive(v: &MetricView<'_>) -> Result<(), AxiomViolation> {
    let n = v.len();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            check_pair(v, i, j)?;
            m[i * n + j] = v.distance(i, j);
        }
    }
    let d = |i: usize, j: usize| m[i * n + j];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                check_triple(d, i, j, k)?;
            }
        }
    }
    Ok(())
}

/// `samples` random triples (seeded), plus the pair axioms on their edges.
pub fn check_axioms_sampled(v: &MetricView<'_>, samples: usize, seed: u64) -> Result<(), AxiomViolation> {
    let n = v.len();
    if n == 0 {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        check_pair(v, i, j)?;
        check_pair(v, i, i)?;
        check_triple(|a, b| v.distance(a, b), i, j, k)?;
    }
    Ok(())
}

/// Exhaustive when the carrier has at most 500 points, otherwise 10⁵
/// sampled triples.
pub fn check_axioms(v: &MetricView<'_>) -> Result<(), AxiomViolation> {
    if v.len() <= 500 {
        check_axioms_exhaustive(v)
    } else {
        check_axioms_sampled(v, 100_000, 0x5eed)
    }
}
