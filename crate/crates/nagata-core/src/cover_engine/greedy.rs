//! Heuristic control curves from greedy cluster covers.
//!
//! At scale `s` and radius `ρ`: take the first uncovered point in BFS order
//! of the ball as a seed, give it the first colour none of whose clusters
//! is closer than `s`, and claim for it the uncovered points within `ρ`
//! that keep that separation. Repeat until the ball is covered or a seed
//! has no colour left among `n + 1`. The least `ρ` that succeeds gives the
//! sample `(s, 2ρ)`. Success is not monotone in `ρ` (at `ρ = R` one cluster
//! always works) so radii are scanned from zero.
//!
//! Distances here are those of the subgraph induced on the ball, which are
//! never shorter than the group's. The curve is an upper estimate of the
//! optimal control on that graph, not a certificate.

use serde::{Deserialize, Serialize};

use super::components::{max_hop, Space};
use crate::group_models::{GroupModel, WordBall};

/// Cayley graph restricted to the ball, in compressed adjacency form.
pub struct InducedGraph {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl InducedGraph {
    pub fn new<G: GroupModel>(model: &G, ball: &WordBall<G::Elem>) -> Self {
        let gens = model.generators();
        let mut offsets = Vec::with_capacity(ball.len() + 1);
        let mut targets = Vec::with_capacity(ball.len() * gens.len());
        offsets.push(0);
        for g in ball.elements() {
            for s in &gens {
                if let Some(j) = ball.index_of(&model.multiply(g, s)) {
                    targets.push(j as u32);
                }
            }
            offsets.push(targets.len() as u32);
        }
        InducedGraph { offsets, targets }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn adj(&self, u: u32) -> &[u32] {
        &self.targets[self.offsets[u as usize] as usize..self.offsets[u as usize + 1] as usize]
    }
}

impl Space for InducedGraph {
    type Node = u32;
    fn neighbors(&self, x: &u32, out: &mut Vec<u32>) {
        out.extend_from_slice(self.adj(*x));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlSample {
    pub scale: f64,
    /// `2ρ` for the least feasible `ρ`; `None` if even `ρ = R` failed.
    pub bound: Option<f64>,
    pub rho: Option<u32>,
    pub clusters: usize,
    pub colors: u32,
    pub families_target: usize,
    pub heuristic: bool,
}

/// One greedy pass at radius `rho`: for each uncovered point in seed order,
/// take the first colour whose existing clusters are all at distance
/// `> k` from it, then claim every uncovered point within `rho` of the seed
/// that is also at distance `> k` from that colour's clusters. Returns
/// `(clusters, colours used)`, or `None` when some seed is within `k` of
/// clusters of every colour.
pub fn carve(graph: &InducedGraph, rho: u32, k: u64, colors: u32) -> Option<(usize, u32)> {
    let n = graph.len();
    let mut covered = vec![false; n];
    // near[c][v]: v is within k of a cluster of colour c
    let mut near = vec![vec![false; n]; colors as usize];
    let mut stamp = vec![u32::MAX; n];
    let (mut frontier, mut next, mut members) = (Vec::new(), Vec::new(), Vec::new());
    let mut count = 0u32;
    let mut used = 0u32;
    for seed in 0..n as u32 {
        if covered[seed as usize] {
            continue;
        }
        let c = (0..colors).find(|&c| !near[c as usize][seed as usize])?;
        used = used.max(c + 1);
        let id = count;
        count += 1;
        let near_c = &mut near[c as usize];
        // grow
        members.clear();
        stamp[seed as usize] = id;
        frontier.clear();
        frontier.push(seed);
        for depth in 0..=rho {
            for &u in &frontier {
                if !covered[u as usize] && !near_c[u as usize] {
                    covered[u as usize] = true;
                    members.push(u);
                }
            }
            if depth == rho {
                break;
            }
            next.clear();
            for &u in &frontier {
                for &v in graph.adj(u) {
                    if stamp[v as usize] != id {
                        stamp[v as usize] = id;
                        next.push(v);
                    }
                }
            }
            std::mem::swap(&mut frontier, &mut next);
            if frontier.is_empty() {
                break;
            }
        }
        // mark the k-neighbourhood of the new cluster for its colour
        frontier.clear();
        frontier.extend_from_slice(&members);
        let mark = id + u32::MAX / 2;
        for &u in &members {
            stamp[u as usize] = mark;
        }
        for _ in 0..k {
            next.clear();
            for &u in &frontier {
                for &v in graph.adj(u) {
                    if stamp[v as usize] != mark {
                        stamp[v as usize] = mark;
                        next.push(v);
                    }
                }
            }
            for &v in &next {
                near_c[v as usize] = true;
            }
            std::mem::swap(&mut frontier, &mut next);
        }
    }
    Some((count as usize, used))
}

/// Control samples for `n + 1` families at each scale.
pub fn empirical_control_curve<G: GroupModel>(
    model: &G,
    ball: &WordBall<G::Elem>,
    n: usize,
    scales: &[f64],
) -> Vec<ControlSample> {
    let graph = InducedGraph::new(model, ball);
    let max_colors = n as u32 + 1;
    let cap = ball.radius;
    scales
        .iter()
        .map(|&s| {
            // feasibility is not monotone in rho, so scan upward
            let best = (0..=cap).find_map(|rho| {
                carve(&graph, rho, max_hop(s), max_colors).map(|(c, k)| (rho, c, k))
            });
            ControlSample {
                scale: s,
                bound: best.map(|(r, _, _)| 2.0 * r as f64),
                rho: best.map(|b| b.0),
                clusters: best.map_or(0, |b| b.1),
                colors: best.map_or(0, |b| b.2),
                families_target: n + 1,
                heuristic: true,
            }
        })
        .collect()
}
