//! Hausdorff quotient norms `‖gK‖ = min { ℓ(gk) : k ∈ K }` on a ball.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::group_models::{Element, WordBall};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetNorm {
    pub norm: u32,
    /// The minimum sits in the shell `ℓ ≥ R − 1`. Reported, but kept out of
    /// statistics like every other shell quantity.
    pub lower_bound_only: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HausdorffQuotient<K: Ord> {
    pub radius: u32,
    pub cosets: BTreeMap<K, CosetNorm>,
}

impl<K: Ord> HausdorffQuotient<K> {
    pub fn norm(&self, key: &K) -> Option<u32> {
        self.cosets.get(key).map(|c| c.norm)
    }

    pub fn interior(&self) -> impl Iterator<Item = (&K, u32)> {
        self.cosets.iter().filter(|(_, c)| !c.lower_bound_only).map(|(k, c)| (k, c.norm))
    }
}

/// Group the ball by coset key and keep the shortest representative length.
pub fn hausdorff_quotient<E: Element, K: Ord + Clone>(
    ball: &WordBall<E>,
    canonicalize: impl Fn(&E) -> K,
) -> Result<HausdorffQuotient<K>, MetricError> {
    let mut cosets: BTreeMap<K, CosetNorm> = BTreeMap::new();
    for (g, l) in ball.iter() {
        let key = canonicalize(g);
        cosets
            .entry(key)
            .and_modify(|c| c.norm = c.norm.min(l))
            .or_insert(CosetNorm { norm: l, lower_bound_only: false });
    }
    if cosets.is_empty() {
        return Err(MetricError::EmptyCosets);
    }
    for c in cosets.values_mut() {
        c.lower_bound_only = c.norm + 1 >= ball.radius;
    }
    Ok(HausdorffQuotient { radius: ball.radius, cosets })
}
