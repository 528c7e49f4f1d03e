//! s-scale components and exact diameters.
//!
//! Chains use hops of length strictly below `s`. For integer metrics that
//! means hops of length at most `k = ⌈s⌉ − 1`.

use std::collections::VecDeque;
use std::hash::Hash;

use rustc_hash::FxHashMap;

use crate::metric_lab::{GroupMetric, MetricView};

/// Largest integer distance that still counts as `< s`.
pub fn max_hop(s: f64) -> u64 {
    if s <= 0.0 {
        0
    } else {
        (s.ceil() as u64).saturating_sub(1)
    }
}

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }

    /// Classes as sorted index lists, ordered by smallest member.
    pub fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: FxHashMap<u32, usize> = FxHashMap::default();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = self.find(i as u32);
            let slot = *by_root.entry(r).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[slot].push(i);
        }
        out
    }
}

/// `s`-scale components of the whole carrier of `v`, by checking every pair.
pub fn s_scale_components(v: &MetricView<'_>, s: f64) -> Vec<Vec<usize>> {
    let n = v.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if v.distance(i, j) < s {
                uf.union(i as u32, j as u32);
            }
        }
    }
    uf.classes()
}

/// A graph whose path metric is the metric used for components.
pub trait Space: Sync {
    type Node: Clone + Eq + Hash;
    fn neighbors(&self, x: &Self::Node, out: &mut Vec<Self::Node>);
}

/// Label pairs `(a, b)`, `a < b`, found by a multi-source breadth-first
/// search from labelled sources to depth `⌊k/2⌋`: every reported pair is at
/// distance `≤ k`, and any two sources at distance `≤ k` are linked by a
/// chain of reported pairs with each hop `≤ k`.
///
/// Proof sketch: along a geodesic of length `L ≤ k` between two sources,
/// every node is within `⌊L/2⌋ ≤ ⌊k/2⌋` of some source, so it is labelled;
/// where the label changes between adjacent nodes `u, v`, the two labels'
/// sources are at distance `≤ dep(u) + 1 + dep(v) ≤ L`.
pub fn voronoi_pairs<S: Space>(space: &S, sources: &[(S::Node, u32)], k: u64) -> Vec<(u32, u32)> {
    if k == 0 || sources.is_empty() {
        return Vec::new();
    }
    let t = k / 2;
    let mut seen: FxHashMap<S::Node, (u32, u32)> = FxHashMap::default();
    let mut queue: VecDeque<S::Node> = VecDeque::new();
    for (x, lab) in sources {
        if seen.insert(x.clone(), (*lab, 0)).is_none() {
            queue.push_back(x.clone());
        }
    }
    let mut buf = Vec::new();
    while let Some(u) = queue.pop_front() {
        let (lab, dep) = seen[&u];
        if dep as u64 >= t {
            continue;
        }
        buf.clear();
        space.neighbors(&u, &mut buf);
        for v in buf.drain(..) {
            if !seen.contains_key(&v) {
                seen.insert(v.clone(), (lab, dep + 1));
                queue.push_back(v);
            }
        }
    }
    let mut pairs = Vec::new();
    for (u, &(lu, du)) in &seen {
        buf.clear();
        space.neighbors(u, &mut buf);
        for v in &buf {
            if let Some(&(lv, dv)) = seen.get(v) {
                if lu < lv && (du + dv + 1) as u64 <= k {
                    pairs.push((lu, lv));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// `s`-scale components of distinct `points` in the path metric of `space`.
pub fn graph_components<S: Space>(space: &S, points: &[S::Node], s: f64) -> Vec<Vec<usize>> {
    let sources: Vec<(S::Node, u32)> = points.iter().cloned().zip(0u32..).collect();
    let mut uf = UnionFind::new(points.len());
    for (a, b) in voronoi_pairs(space, &sources, max_hop(s)) {
        uf.union(a, b);
    }
    uf.classes()
}

/// Exact diameter of `points` under `metric`.
///
/// Keeps, for every point, the upper bound `min_p d(x,p) + ecc(p)` over
/// the pivots `p` examined so far; repeatedly takes the point with the
/// largest bound as the next pivot and stops when no bound exceeds the
/// largest eccentricity found.
pub fn exact_diameter<E, M: GroupMetric<E> + ?Sized>(points: &[E], metric: &M) -> u64 {
    let n = points.len();
    if n < 2 {
        return 0;
    }
    let mut upper = vec![u64::MAX; n];
    let mut done = vec![false; n];
    let mut best = 0u64;
    let mut pivot = 0usize;
    let mut dists = vec![0u64; n];
    loop {
        done[pivot] = true;
        let mut ecc = 0;
        for (j, d) in dists.iter_mut().enumerate() {
            *d = metric.dist(&points[pivot], &points[j]);
            ecc = ecc.max(*d);
        }
        best = best.max(ecc);
        let mut next = None;
        let mut next_ub = 0;
        for j in 0..n {
            upper[j] = upper[j].min(dists[j] + ecc);
            if !done[j] && upper[j] > best && (next.is_none() || upper[j] > next_ub) {
                next = Some(j);
                next_ub = upper[j];
            }
        }
        match next {
            Some(j) => pivot = j,
            None => return best,
        }
    }
}

/// Diameter by checking every pair.
pub fn brute_diameter<E, M: GroupMetric<E> + ?Sized>(points: &[E], metric: &M) -> u64 {
    let mut best = 0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.max(metric.dist(&points[i], &points[j]));
        }
    }
    best
}

/// Colour clusters so that, for every colour, no two of its clusters lie
/// within distance `k` of each other (checked through [`voronoi_pairs`],
/// so each colour class's `k`-chains stay inside single clusters).
///
/// `nodes[i]` belongs to cluster `cluster_of[i]`. Conflict edges are
/// discovered lazily: colour, search each colour class for cross-cluster
/// pairs, add them as edges, repeat. `colorer` turns an adjacency list into
/// a colouring or gives up.
pub fn separate_clusters<S: Space>(
    space: &S,
    nodes: &[S::Node],
    cluster_of: &[u32],
    n_clusters: usize,
    k: u64,
    max_colors: u32,
    colorer: impl Fn(&[Vec<u32>]) -> Option<Vec<u32>>,
) -> Option<Vec<u32>> {
    let all: Vec<(S::Node, u32)> = nodes.iter().cloned().zip(cluster_of.iter().copied()).collect();
    let mut edges: rustc_hash::FxHashSet<(u32, u32)> = voronoi_pairs(space, &all, k).into_iter().collect();
    loop {
        let mut sorted: Vec<(u32, u32)> = edges.iter().copied().collect();
        sorted.sort_unstable();
        let adj = super::coloring::adjacency(n_clusters, &sorted);
        let color = colorer(&adj)?;
        if super::coloring::color_count(&color) > max_colors {
            return None;
        }
        let mut added = false;
        for c in 0..max_colors {
            let class: Vec<(S::Node, u32)> =
                all.iter().filter(|(_, cl)| color[*cl as usize] == c).cloned().collect();
            for p in voronoi_pairs(space, &class, k) {
                added |= edges.insert(p);
            }
        }
        if !added {
            return Some(color);
        }
    }
}
