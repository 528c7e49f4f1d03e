//! Subgroup distortion: intrinsic vs ambient word length.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::group_models::ball::{bfs_until_found, DEFAULT_MEMORY_CAP_BYTES};
use crate::group_models::{GroupModel, WordBall};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionPair {
    pub intrinsic: f64,
    pub ambient: f64,
    /// Ambient length in the shell `ℓ ≥ R − 1`.
    pub boundary_flag: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionSample {
    pub subgroup: String,
    pub radius: u32,
    pub pairs: Vec<DistortionPair>,
    /// `max ℓ_G(s)` over subgroup generators `s`; ambient ≤ this · intrinsic.
    pub generator_inclusion_constant: Option<u32>,
    pub warning: Option<String>,
}

/// All `(‖h‖_H, ‖h‖_G)` for `h ∈ H ∩ ball`. Intrinsic norms come from a
/// breadth-first search in `H` grown until every such `h` is reached.
///
/// `identify` recognises subgroup elements, `embed` maps back into `G`.
pub fn subgroup_distortion<G: GroupModel, H: GroupModel>(
    ball: &WordBall<G::Elem>,
    sub: &H,
    label: &str,
    identify: impl Fn(&G::Elem) -> Option<H::Elem>,
    embed: impl Fn(&H::Elem) -> G::Elem,
) -> Result<DistortionSample, MetricError> {
    let mut found: Vec<(H::Elem, u32)> = Vec::new();
    for (g, l) in ball.iter() {
        if let Some(h) = identify(g) {
            found.push((h, l));
        }
    }
    let targets: Vec<H::Elem> = found.iter().map(|(h, _)| h.clone()).collect();
    let hball = bfs_until_found(sub, &targets, DEFAULT_MEMORY_CAP_BYTES).map_err(|e| MetricError::Ball(e.to_string()))?;
    let mut pairs: Vec<DistortionPair> = found
        .iter()
        .map(|(h, l)| DistortionPair {
            intrinsic: hball.length(h).expect("grown until found") as f64,
            ambient: *l as f64,
            boundary_flag: l + 1 >= ball.radius,
        })
        .collect();
    pairs.sort_by(|a, b| a.intrinsic.total_cmp(&b.intrinsic).then(a.ambient.total_cmp(&b.ambient)));
    let generator_inclusion_constant = sub
        .generators()
        .iter()
        .map(|s| ball.length(&embed(s)))
        .collect::<Option<Vec<u32>>>()
        .and_then(|v| v.into_iter().max());
    let warning = (pairs.len() <= 1).then(|| "subgroup meets the ball only in the identity".to_string());
    Ok(DistortionSample { subgroup: label.to_string(), radius: ball.radius, pairs, generator_inclusion_constant, warning })
}

/// The distortion function on the interior of the ball: for each ambient
/// length `n` realised by a non-shell subgroup element, the largest
/// intrinsic length among subgroup elements with ambient length `≤ n`.
/// Returned as `(intrinsic, ambient)` points; the identity is dropped.
pub fn distortion_envelope(sample: &DistortionSample) -> Vec<(f64, f64)> {
    let mut inner: Vec<&DistortionPair> = sample.pairs.iter().filter(|p| !p.boundary_flag && p.ambient > 0.0).collect();
    inner.sort_by(|a, b| a.ambient.total_cmp(&b.ambient).then(a.intrinsic.total_cmp(&b.intrinsic)));
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut best = 0.0f64;
    for p in inner {
        best = best.max(p.intrinsic);
        match out.last_mut() {
            Some(last) if last.1 == p.ambient => last.0 = best,
            _ => out.push((best, p.ambient)),
        }
    }
    out
}

/// CSV with columns `intrinsic,ambient,boundary_flag`.
pub fn write_distortion_csv(sample: &DistortionSample, w: impl Write) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["intrinsic", "ambient", "boundary_flag"])?;
    for p in &sample.pairs {
        out.write_record([p.intrinsic.to_string(), p.ambient.to_string(), p.boundary_flag.to_string()])?;
    }
    out.flush()?;
    Ok(())
}
