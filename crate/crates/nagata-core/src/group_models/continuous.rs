//! The 4-dimensional filiform Lie group and grid shortest paths for its
//! left-invariant Riemannian metric.
//!
//! Group law in exponential coordinates (`[e₁,e₂]=e₃`, `[e₁,e₃]=e₄`):
//!
//! ```text
//! z₁ = x₁+y₁
//! z₂ = x₂+y₂
//! z₃ = x₃+y₃ + ½(−x₂y₁ + x₁y₂)
//! z₄ = x₄+y₄ + 1/12 (x₁−y₁)(−x₂y₁ + x₁y₂) + ½(−x₃y₁ + x₁y₃)
//! ```
//!
//! The metric is `Σ θᵢ²` for the left-invariant coframe `θ = J(x)⁻¹ dx`,
//! where `J(x)` is the differential of left translation by `x` at the
//! identity:
//!
//! ```text
//! θ₁ = dx₁
//! θ₂ = dx₂
//! θ₃ = ½x₂ dx₁ − ½x₁ dx₂ + dx₃
//! θ₄ = (½x₃ − ⅙x₁x₂) dx₁ + ⅙x₁² dx₂ − ½x₁ dx₃ + dx₄
//! ```
//!
//! It is the identity at the origin. The tests check it against the group
//! law numerically.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

pub type P4 = [f64; 4];

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid step must be positive, got {0}")]
    BadStep(f64),
    #[error("grid has {0} nodes, above the limit")]
    TooLarge(usize),
    #[error("target node unreachable (box too small)")]
    Disconnected,
    #[error("metric weight not positive and finite at {0:?}")]
    BadWeight(P4),
}

/// A connected Lie group on ℝ⁴ with a coframe given pointwise.
pub trait ContinuousGroupModel: Sync {
    fn name(&self) -> &str;
    fn multiply(&self, x: &P4, y: &P4) -> P4;
    fn inverse(&self, x: &P4) -> P4;
    /// Row `i` holds the coefficients of `θᵢ` in `dx₁..dx₄` at `x`.
    fn coframe(&self, x: &P4) -> [[f64; 4]; 4];

    /// `gᵢⱼ = Σₖ θₖᵢ θₖⱼ`.
    fn metric_tensor(&self, x: &P4) -> [[f64; 4]; 4] {
        let th = self.coframe(x);
        let mut g = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                g[i][j] = (0..4).map(|k| th[k][i] * th[k][j]).sum();
            }
        }
        g
    }

    /// Length of `v` at `x`.
    fn norm_at(&self, x: &P4, v: &P4) -> f64 {
        let th = self.coframe(x);
        th.iter()
            .map(|row| {
                let w: f64 = (0..4).map(|i| row[i] * v[i]).sum();
                w * w
            })
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Filiform4;

pub fn filiform4_model() -> Filiform4 {
    Filiform4
}

impl ContinuousGroupModel for Filiform4 {
    fn name(&self) -> &str {
        "filiform4"
    }

    fn multiply(&self, x: &P4, y: &P4) -> P4 {
        let w = -x[1] * y[0] + x[0] * y[1];
        [
            x[0] + y[0],
            x[1] + y[1],
            x[2] + y[2] + 0.5 * w,
            x[3] + y[3] + (x[0] - y[0]) * w / 12.0 + 0.5 * (-x[2] * y[0] + x[0] * y[2]),
        ]
    }

    fn inverse(&self, x: &P4) -> P4 {
        [-x[0], -x[1], -x[2], -x[3]]
    }

    fn coframe(&self, x: &P4) -> [[f64; 4]; 4] {
        let (x1, x2, x3) = (x[0], x[1], x[2]);
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.5 * x2, -0.5 * x1, 1.0, 0.0],
            [0.5 * x3 - x1 * x2 / 6.0, x1 * x1 / 6.0, -0.5 * x1, 1.0],
        ]
    }
}

/// Flat ℝ⁴ (identity coframe), the control case for the grid.
#[derive(Clone, Copy, Debug, Default)]
pub struct Euclidean4;

impl ContinuousGroupModel for Euclidean4 {
    fn name(&self) -> &str {
        "euclidean4"
    }
    fn multiply(&self, x: &P4, y: &P4) -> P4 {
        std::array::from_fn(|i| x[i] + y[i])
    }
    fn inverse(&self, x: &P4) -> P4 {
        std::array::from_fn(|i| -x[i])
    }
    fn coframe(&self, _x: &P4) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        m
    }
}

/// Length of the curve `t ↦ γ(t)`, `t ∈ [0,1]`, by composite Simpson with
/// `n` (even) panels and central-difference velocities.
pub fn curve_length<M: ContinuousGroupModel + ?Sized>(m: &M, gamma: impl Fn(f64) -> P4, n: usize) -> f64 {
    let n = n.max(2) & !1;
    let h = 1.0 / n as f64;
    let eps = 1e-6;
    let speed = |t: f64| {
        let a = gamma(t - eps);
        let b = gamma(t + eps);
        let v: P4 = std::array::from_fn(|i| (b[i] - a[i]) / (2.0 * eps));
        m.norm_at(&gamma(t), &v)
    };
    let mut s = speed(0.0) + speed(1.0);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * speed(k as f64 * h);
    }
    s * h / 3.0
}

/// Offsets used as grid edges: the 8 axis steps and the 24 steps moving two
/// coordinates by one cell each.
fn edge_offsets() -> Vec<[i32; 4]> {
    let mut out = Vec::new();
    for i in 0..4 {
        for s in [-1, 1] {
            let mut o = [0; 4];
            o[i] = s;
            out.push(o);
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            for si in [-1, 1] {
                for sj in [-1, 1] {
                    let mut o = [0; 4];
                    o[i] = si;
                    o[j] = sj;
                    out.push(o);
                }
            }
        }
    }
    out
}

/// Padding as a fraction of the query set's coordinate diameter.
pub const BOX_PADDING: f64 = 0.3;
/// Largest grid built by [`GridMetricGraph::around`].
pub const MAX_GRID_NODES: usize = 20_000_000;

/// Regular grid on a box, anchored so that `anchor` is a node. Edge weights
/// are the metric length of the edge vector at its midpoint.
pub struct GridMetricGraph<'m, M: ?Sized> {
    model: &'m M,
    pub h: f64,
    pub origin: P4,
    pub shape: [usize; 4],
    pub padding: f64,
    offsets: Vec<[i32; 4]>,
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f64, usize);
impl Eq for HeapItem {}
impl Ord for HeapItem {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl<'m, M: ContinuousGroupModel + ?Sized> GridMetricGraph<'m, M> {
    /// Grid covering the points' bounding box padded by
    /// `max(BOX_PADDING · diam, h)` on every side, with `points[0]` a node.
    pub fn around(model: &'m M, points: &[P4], h: f64) -> Result<Self, GridError> {
        if h.is_nan() || h <= 0.0 {
            return Err(GridError::BadStep(h));
        }
        let mut lo = points[0];
        let mut hi = points[0];
        for p in points {
            for i in 0..4 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let mut diam: f64 = 0.0;
        for p in points {
            for q in points {
                let d: f64 = (0..4).map(|i| (p[i] - q[i]).powi(2)).sum::<f64>().sqrt();
                diam = diam.max(d);
            }
        }
        let pad = (BOX_PADDING * diam).max(h);
        let anchor = points[0];
        let mut origin = [0.0; 4];
        let mut shape = [0usize; 4];
        for i in 0..4 {
            let below = ((anchor[i] - (lo[i] - pad)) / h).ceil() as i64;
            let above = (((hi[i] + pad) - anchor[i]) / h).ceil() as i64;
            origin[i] = anchor[i] - below as f64 * h;
            shape[i] = (below + above + 1) as usize;
        }
        let total: usize = shape.iter().product();
        if total > MAX_GRID_NODES {
            return Err(GridError::TooLarge(total));
        }
        Ok(GridMetricGraph { model, h, origin, shape, padding: pad, offsets: edge_offsets() })
    }

    pub fn node_count(&self) -> usize {
        self.shape.iter().product()
    }

    fn coords(&self, mut id: usize) -> [usize; 4] {
        let mut c = [0; 4];
        for i in (0..4).rev() {
            c[i] = id % self.shape[i];
            id /= self.shape[i];
        }
        c
    }

    fn id(&self, c: &[usize; 4]) -> usize {
        c.iter().zip(self.shape.iter()).fold(0, |acc, (&x, &n)| acc * n + x)
    }

    pub fn position(&self, id: usize) -> P4 {
        let c = self.coords(id);
        std::array::from_fn(|i| self.origin[i] + c[i] as f64 * self.h)
    }

    /// Nearest node to `p` (clamped into the box).
    pub fn nearest(&self, p: &P4) -> usize {
        let c: [usize; 4] = std::array::from_fn(|i| {
            let k = ((p[i] - self.origin[i]) / self.h).round();
            k.clamp(0.0, (self.shape[i] - 1) as f64) as usize
        });
        self.id(&c)
    }

    fn weight(&self, from: &P4, off: &[i32; 4]) -> Result<f64, GridError> {
        let v: P4 = std::array::from_fn(|i| off[i] as f64 * self.h);
        let mid: P4 = std::array::from_fn(|i| from[i] + 0.5 * v[i]);
        let w = self.model.norm_at(&mid, &v);
        if w.is_finite() && w > 0.0 {
            Ok(w)
        } else {
            Err(GridError::BadWeight(mid))
        }
    }

    /// Single-source Dijkstra; stops once every target is settled.
    pub fn distances_from(&self, src: usize, targets: &[usize]) -> Result<Vec<f64>, GridError> {
        let n = self.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        let mut left: Vec<usize> = targets.to_vec();
        dist[src] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapItem(0.0, src));
        while let Some(HeapItem(d, u)) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            left.retain(|&t| t != u);
            if left.is_empty() {
                break;
            }
            let cu = self.coords(u);
            let pu = self.position(u);
            for off in &self.offsets {
                let mut cv = [0usize; 4];
                let mut inside = true;
                for i in 0..4 {
                    let x = cu[i] as i64 + off[i] as i64;
                    if x < 0 || x >= self.shape[i] as i64 {
                        inside = false;
                        break;
                    }
                    cv[i] = x as usize;
                }
                if !inside {
                    continue;
                }
                let v = self.id(&cv);
                if done[v] {
                    continue;
                }
                let nd = d + self.weight(&pu, off)?;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(HeapItem(nd, v));
                }
            }
        }
        let out: Vec<f64> = targets.iter().map(|&t| dist[t]).collect();
        if out.iter().any(|d| !d.is_finite()) {
            return Err(GridError::Disconnected);
        }
        Ok(out)
    }
}

/// Grid shortest-path distance between `p` and `q`.
pub fn grid_distance<M: ContinuousGroupModel + ?Sized>(m: &M, p: &P4, q: &P4, h: f64) -> Result<f64, GridError> {
    if p == q {
        if h.is_nan() || h <= 0.0 {
            return Err(GridError::BadStep(h));
        }
        return Ok(0.0);
    }
    let g = GridMetricGraph::around(m, &[*p, *q], h)?;
    let s = g.nearest(p);
    let t = g.nearest(q);
    Ok(g.distances_from(s, &[t])?[0])
}

/// Result of a translated-set diameter computation.
#[derive(Clone, Debug, PartialEq)]
pub struct DiameterReport {
    pub diameter: f64,
    pub h: f64,
    pub padding: f64,
    pub grid_nodes: usize,
    pub points: Vec<P4>,
}

/// Max pairwise grid distance over the right translate `{p · g}` of `set`.
pub fn translated_set_diameter<M: ContinuousGroupModel + ?Sized>(
    m: &M,
    set: &[P4],
    translator: &P4,
    h: f64,
) -> Result<DiameterReport, GridError> {
    let pts: Vec<P4> = set.iter().map(|p| m.multiply(p, translator)).collect();
    if pts.len() < 2 {
        return Ok(DiameterReport { diameter: 0.0, h, padding: 0.0, grid_nodes: 0, points: pts });
    }
    let g = GridMetricGraph::around(m, &pts, h)?;
    let nodes: Vec<usize> = pts.iter().map(|p| g.nearest(p)).collect();
    let mut diam: f64 = 0.0;
    for i in 0..nodes.len() {
        let d = g.distances_from(nodes[i], &nodes[i + 1..])?;
        diam = d.into_iter().fold(diam, f64::max);
    }
    Ok(DiameterReport { diameter: diam, h, padding: g.padding, grid_nodes: g.node_count(), points: pts })
}

/// `k+1` equally spaced points of the segment `t·e_axis`, `t ∈ [0, c]`.
pub fn axis_interval(axis: usize, c: f64, k: usize) -> Vec<P4> {
    (0..=k)
        .map(|i| {
            let mut p = [0.0; 4];
            p[axis] = c * i as f64 / k as f64;
            p
        })
        .collect()
}
