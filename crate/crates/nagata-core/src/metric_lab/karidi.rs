//! Karidi's quasi-norm `D(p) = Σᵢ ‖x⃗ᵢ‖^{1/i}` on layered coordinates of a
//! nilpotent group, and its comparison with the word metric.
//!
//! Coordinates are taken as real numbers even for lattice points. The
//! comparison constant depends on the generating set and on the choice of
//! coordinates.

use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::group_models::{GroupModel, WordBall};

/// Sizes of the coordinate layers, first layer first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KaridiCoordinates {
    pub layers: Vec<usize>,
}

impl KaridiCoordinates {
    pub fn heisenberg() -> Self {
        KaridiCoordinates { layers: vec![2, 1] }
    }
    pub fn filiform4() -> Self {
        KaridiCoordinates { layers: vec![2, 1, 1] }
    }
    pub fn abelian(n: usize) -> Self {
        KaridiCoordinates { layers: vec![n] }
    }
    pub fn arity(&self) -> usize {
        self.layers.iter().sum()
    }
}

/// `D(1, x)` for coordinates `x`.
pub fn karidi_norm(spec: &KaridiCoordinates, x: &[f64]) -> Result<f64, MetricError> {
    if x.len() != spec.arity() {
        return Err(MetricError::LayerMismatch { layers: spec.layers.clone(), arity: x.len() });
    }
    let mut start = 0;
    let mut d = 0.0;
    for (i, &n) in spec.layers.iter().enumerate() {
        let norm = x[start..start + n].iter().map(|v| v * v).sum::<f64>().sqrt();
        d += norm.powf(1.0 / (i + 1) as f64);
        start += n;
    }
    Ok(d)
}

/// `D(p, q) = D(1, p⁻¹q)`.
pub fn karidi_quasinorm<G: GroupModel>(
    model: &G,
    spec: &KaridiCoordinates,
    p: &G::Elem,
    q: &G::Elem,
) -> Result<f64, MetricError> {
    let g = model.multiply(&model.inverse(p), q);
    let x: Vec<f64> = model.to_tuple(&g).into_iter().map(|v| v as f64).collect();
    karidi_norm(spec, &x)
}

/// `|D(p,q) − D(q,p)|`.
pub fn karidi_asymmetry<G: GroupModel>(
    model: &G,
    spec: &KaridiCoordinates,
    p: &G::Elem,
    q: &G::Elem,
) -> Result<f64, MetricError> {
    Ok((karidi_quasinorm(model, spec, p, q)? - karidi_quasinorm(model, spec, q, p)?).abs())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KaridiEstimate {
    /// `max(D/ℓ, ℓ/D)` over all samples.
    pub kappa_hat: f64,
    pub samples: usize,
    pub radius: u32,
    pub min_length: u32,
    pub max_length: u32,
    /// Element realising the maximum.
    pub worst: Vec<i64>,
}

/// Max-ratio estimate of the two-sided constant between `D(1, ·)` and the
/// word length, over ball elements with `ℓ > 1`.
pub fn karidi_comparison<G: GroupModel>(
    model: &G,
    ball: &WordBall<G::Elem>,
    spec: &KaridiCoordinates,
) -> Result<KaridiEstimate, MetricError> {
    let mut best = 0.0f64;
    let mut worst = Vec::new();
    let mut n = 0usize;
    let (mut lo, mut hi) = (u32::MAX, 0u32);
    for (g, l) in ball.iter() {
        if l <= 1 {
            continue;
        }
        let x: Vec<f64> = model.to_tuple(g).into_iter().map(|v| v as f64).collect();
        let d = karidi_norm(spec, &x)?;
        let lf = l as f64;
        let r = (d / lf).max(lf / d);
        if r > best {
            best = r;
            worst = model.to_tuple(g);
        }
        n += 1;
        lo = lo.min(l);
        hi = hi.max(l);
    }
    if n == 0 {
        return Err(MetricError::NoSamples);
    }
    Ok(KaridiEstimate { kappa_hat: best, samples: n, radius: ball.radius, min_length: lo, max_length: hi, worst })
}
