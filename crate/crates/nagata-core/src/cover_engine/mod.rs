//! Covers of word balls and their verification.
//!
//! A cover is a list of families, each a list of point sets. At scale `s`
//! the cover has control `D` when every `s`-scale component of every
//! family's union has diameter at most `D`. Verification computes those
//! components and their diameters exactly.

pub mod coloring;
pub mod components;
pub mod constructions;
pub mod greedy;

use std::collections::BTreeMap;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group_models::{GroupModel, ModelError};
use crate::metric_lab::{fit, FitModel, FitReport, GroupMetric, MetricError};
pub use components::{exact_diameter, graph_components, max_hop, s_scale_components, Space};
pub use constructions::{
    brick_cover, exact_sequence_cover, heisenberg_brick_cover, CentralExtension, HeisenbergOverPlane,
    HeisenbergTiling, PlaneOverLine, TrivialKernel,
};
pub use greedy::{carve, empirical_control_curve, ControlSample, InducedGraph};

#[derive(Debug, Error)]
pub enum CoverError {
    #[error("cover misses carrier point {0:?}")]
    NotCovering(Vec<i64>),
    #[error("cover set contains {0:?}, which is not in the carrier")]
    OutsideCarrier(Vec<i64>),
    #[error("preimage point {point:?} is {distance} from its anchor, beyond the quotient bound {bound}")]
    PreimageEscapes { point: Vec<i64>, distance: u64, bound: u64 },
    #[error("element {0:?} was expected in the kernel")]
    NotInKernel(Vec<i64>),
    #[error("could not colour the tiles of {clusters} points with {colors} colours in any layout")]
    ColoringFailed { clusters: usize, colors: usize },
    #[error("scale mismatch: {0}")]
    ScaleMismatch(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cover<E> {
    pub families: Vec<Vec<Vec<E>>>,
    pub scale: f64,
    pub claimed_bound: f64,
    pub construction: String,
    pub params: BTreeMap<String, f64>,
}

impl<E> Cover<E> {
    pub fn family_count(&self) -> usize {
        self.families.len()
    }
}

/// On-disk form of a cover: elements as integer tuples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverFile {
    pub model: String,
    pub radius: u32,
    pub scale: f64,
    pub claimed_bound: f64,
    pub construction: String,
    pub params: BTreeMap<String, f64>,
    pub families: Vec<Vec<Vec<Vec<i64>>>>,
}

impl CoverFile {
    pub fn from_cover<G: GroupModel>(model: &G, radius: u32, c: &Cover<G::Elem>) -> Self {
        CoverFile {
            model: model.name(),
            radius,
            scale: c.scale,
            claimed_bound: c.claimed_bound,
            construction: c.construction.clone(),
            params: c.params.clone(),
            families: c
                .families
                .iter()
                .map(|f| f.iter().map(|set| set.iter().map(|g| model.to_tuple(g)).collect()).collect())
                .collect(),
        }
    }

    pub fn to_cover<G: GroupModel>(&self, model: &G) -> Result<Cover<G::Elem>, ModelError> {
        let mut families = Vec::with_capacity(self.families.len());
        for f in &self.families {
            let mut sets = Vec::with_capacity(f.len());
            for set in f {
                sets.push(set.iter().map(|t| model.from_tuple(t)).collect::<Result<Vec<_>, _>>()?);
            }
            families.push(sets);
        }
        Ok(Cover {
            families,
            scale: self.scale,
            claimed_bound: self.claimed_bound,
            construction: self.construction.clone(),
            params: self.params.clone(),
        })
    }
}

/// Cayley graph of a group model (right multiplication by generators).
pub struct WordSpace<'a, G: GroupModel> {
    pub model: &'a G,
    gens: Vec<G::Elem>,
}

impl<'a, G: GroupModel> WordSpace<'a, G> {
    pub fn new(model: &'a G) -> Self {
        WordSpace { model, gens: model.generators() }
    }
}

impl<G: GroupModel> Space for WordSpace<'_, G> {
    type Node = G::Elem;
    fn neighbors(&self, x: &G::Elem, out: &mut Vec<G::Elem>) {
        out.extend(self.gens.iter().map(|s| self.model.multiply(x, s)));
    }
}

/// Verification result at one scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlEntry {
    pub scale: f64,
    pub families: usize,
    pub claimed_bound: f64,
    /// Largest component diameter over all components.
    pub verified_bound: f64,
    /// Largest diameter over components that avoid the shell `ℓ ≥ R − 1`.
    pub interior_bound: f64,
    pub components: usize,
    pub boundary_components: usize,
    /// Shell components whose (truncated) diameter already exceeds the claim.
    pub boundary_over_claim: usize,
    pub pass: bool,
}

/// Check `cover` against `carrier` at the cover's scale.
///
/// Components are taken in the word metric of `model` (paths may leave the
/// ball) and diameters are exact distances under `metric`. Components that
/// touch the shell are excluded from pass/fail since the ball truncates
/// them.
pub fn verify_control<G: GroupModel, M: GroupMetric<G::Elem> + ?Sized>(
    model: &G,
    cover: &Cover<G::Elem>,
    carrier: &[G::Elem],
    is_boundary: impl Fn(&G::Elem) -> bool,
    metric: &M,
) -> Result<ControlEntry, CoverError> {
    check_coverage(model, cover, carrier)?;
    let space = WordSpace::new(model);
    verify_with(cover, &is_boundary, |pts, s| graph_components(&space, pts, s), |pts| exact_diameter(pts, metric))
}

/// Same result as [`verify_control`] with pairwise component search and
/// pairwise diameters. Quadratic; a test oracle.
pub fn verify_control_bruteforce<G: GroupModel, M: GroupMetric<G::Elem> + ?Sized>(
    model: &G,
    cover: &Cover<G::Elem>,
    carrier: &[G::Elem],
    is_boundary: impl Fn(&G::Elem) -> bool,
    metric: &M,
) -> Result<ControlEntry, CoverError> {
    check_coverage(model, cover, carrier)?;
    verify_with(
        cover,
        &is_boundary,
        |pts, s| {
            let mut uf = components::UnionFind::new(pts.len());
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    if (metric.dist(&pts[i], &pts[j]) as f64) < s {
                        uf.union(i as u32, j as u32);
                    }
                }
            }
            uf.classes()
        },
        |pts| components::brute_diameter(pts, metric),
    )
}

fn check_coverage<G: GroupModel>(model: &G, cover: &Cover<G::Elem>, carrier: &[G::Elem]) -> Result<(), CoverError> {
    let carrier_set: FxHashSet<&G::Elem> = carrier.iter().collect();
    let mut covered: FxHashSet<&G::Elem> = FxHashSet::default();
    for fam in &cover.families {
        for set in fam {
            for g in set {
                if !carrier_set.contains(g) {
                    return Err(CoverError::OutsideCarrier(model.to_tuple(g)));
                }
                covered.insert(g);
            }
        }
    }
    if let Some(g) = carrier.iter().find(|g| !covered.contains(g)) {
        return Err(CoverError::NotCovering(model.to_tuple(g)));
    }
    Ok(())
}

/// Distinct points of a family, sorted.
fn family_points<E: Clone + Ord>(fam: &[Vec<E>]) -> Vec<E> {
    let mut pts: Vec<E> = fam.iter().flatten().cloned().collect();
    pts.sort_unstable();
    pts.dedup();
    pts
}

fn verify_with<E: Clone + Ord>(
    cover: &Cover<E>,
    is_boundary: &impl Fn(&E) -> bool,
    comps_of: impl Fn(&[E], f64) -> Vec<Vec<usize>>,
    diam_of: impl Fn(&[E]) -> u64,
) -> Result<ControlEntry, CoverError> {
    let s = cover.scale;
    let mut entry = ControlEntry {
        scale: s,
        families: cover.families.len(),
        claimed_bound: cover.claimed_bound,
        verified_bound: 0.0,
        interior_bound: 0.0,
        components: 0,
        boundary_components: 0,
        boundary_over_claim: 0,
        pass: false,
    };
    for fam in &cover.families {
        let pts = family_points(fam);
        for comp in comps_of(&pts, s) {
            let cp: Vec<E> = comp.iter().map(|&i| pts[i].clone()).collect();
            let d = diam_of(&cp) as f64;
            entry.components += 1;
            entry.verified_bound = entry.verified_bound.max(d);
            if cp.iter().any(is_boundary) {
                entry.boundary_components += 1;
                if d > cover.claimed_bound {
                    entry.boundary_over_claim += 1;
                }
            } else {
                entry.interior_bound = entry.interior_bound.max(d);
            }
        }
    }
    entry.pass = entry.interior_bound <= cover.claimed_bound;
    Ok(entry)
}

/// Two-variable control `D_f(r, R) = a·r + b·R` of a map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapControlSpec {
    pub a: f64,
    pub b: f64,
}

impl MapControlSpec {
    pub fn new(a: f64, b: f64) -> Option<Self> {
        (a >= 0.0 && b >= 0.0).then_some(MapControlSpec { a, b })
    }

    pub fn eval(&self, r: f64, big_r: f64) -> f64 {
        self.a * r + self.b * big_r
    }
}

/// `s ↦ D(s + 2R) + 2R`: control for the `R`-neighbourhood of a set
/// controlled by `D`.
pub fn neighborhood_enlarge<'a>(d: impl Fn(f64) -> f64 + 'a, r: f64) -> impl Fn(f64) -> f64 + 'a {
    move |s| d(s + 2.0 * r) + 2.0 * r
}

/// Linear control `C·s + k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearControl {
    pub c: f64,
    pub k: f64,
}

impl LinearControl {
    pub fn eval(&self, s: f64) -> f64 {
        self.c * s + self.k
    }

    /// Closed form of [`neighborhood_enlarge`] for linear controls.
    pub fn enlarge(&self, r: f64) -> LinearControl {
        LinearControl { c: self.c, k: self.k + 2.0 * r * self.c + 2.0 * r }
    }
}

/// Scales plus per-scale results and the linear fit across them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlCertificate {
    pub model: String,
    pub radius: u32,
    pub construction: String,
    pub families: usize,
    pub entries: Vec<ControlEntry>,
    pub fit: Option<FitReport>,
    pub fit_error: Option<String>,
    /// Every scale passes and the linear fit residual is below the limit.
    pub pass: bool,
}

/// Largest held-out relative residual accepted as linear.
pub const LINEAR_RESIDUAL_LIMIT: f64 = 0.25;

/// Combine per-scale entries; the fit is `verified_bound` against scale.
pub fn certify(model: &str, radius: u32, construction: &str, entries: Vec<ControlEntry>) -> ControlCertificate {
    let pts: Vec<(f64, f64)> = entries.iter().map(|e| (e.scale, e.verified_bound)).collect();
    let (fit, fit_error) = match fit(&pts, FitModel::Linear) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let linear = fit.as_ref().is_some_and(|f| f.max_relative_residual < LINEAR_RESIDUAL_LIMIT);
    let families = entries.iter().map(|e| e.families).max().unwrap_or(0);
    let pass = linear && entries.iter().all(|e| e.pass);
    ControlCertificate {
        model: model.to_string(),
        radius,
        construction: construction.to_string(),
        families,
        entries,
        fit,
        fit_error,
        pass,
    }
}
