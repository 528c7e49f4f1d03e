//! Exact word metrics `d(x, y) = ℓ(x⁻¹y)`.

use crate::group_models::{ball::BallError, bfs_ball, GroupModel, WordBall};

pub trait GroupMetric<E>: Sync {
    fn dist(&self, x: &E, y: &E) -> u64;
}

/// ℓ¹ metric on ℤⁿ (the word metric of the standard generators).
#[derive(Clone, Copy, Debug, Default)]
pub struct L1Metric;

impl<const N: usize> GroupMetric<[i64; N]> for L1Metric {
    fn dist(&self, x: &[i64; N], y: &[i64; N]) -> u64 {
        x.iter().zip(y).map(|(a, b)| (a - b).unsigned_abs()).sum()
    }
}

/// Word metric read off a ball of lengths. Covers all pairs in a ball of
/// radius `R` when the table has radius at least `2R`.
pub struct TableMetric<'a, G: GroupModel> {
    pub model: &'a G,
    pub table: WordBall<G::Elem>,
}

impl<'a, G: GroupModel> TableMetric<'a, G> {
    pub fn new(model: &'a G, table_radius: u32) -> Result<Self, BallError> {
        Ok(TableMetric { model, table: bfs_ball(model, table_radius)? })
    }

    /// `ℓ(x⁻¹y)` if it lies within the table.
    pub fn try_dist(&self, x: &G::Elem, y: &G::Elem) -> Option<u64> {
        let g = self.model.multiply(&self.model.inverse(x), y);
        self.table.length(&g).map(u64::from)
    }
}

impl<G: GroupModel> GroupMetric<G::Elem> for TableMetric<'_, G> {
    /// Panics when `x⁻¹y` is outside the table; size the table first.
    fn dist(&self, x: &G::Elem, y: &G::Elem) -> u64 {
        self.try_dist(x, y).unwrap_or_else(|| {
            panic!("{x:?}⁻¹{y:?} lies outside the radius-{} length table", self.table.radius)
        })
    }
}
