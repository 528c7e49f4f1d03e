//! Graph colouring for cluster conflict graphs.

/// Adjacency lists for `n` nodes, built from an edge list.
pub fn adjacency(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a != b {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
    }
    for l in &mut adj {
        l.sort_unstable();
        l.dedup();
    }
    adj
}

/// First-fit colouring in node order.
pub fn first_fit(adj: &[Vec<u32>]) -> Vec<u32> {
    let mut color = vec![u32::MAX; adj.len()];
    let mut used = Vec::new();
    for v in 0..adj.len() {
        used.clear();
        used.extend(adj[v].iter().map(|&u| color[u as usize]).filter(|&c| c != u32::MAX));
        used.sort_unstable();
        used.dedup();
        let mut c = 0;
        for &u in &used {
            if u == c {
                c += 1;
            } else if u > c {
                break;
            }
        }
        color[v] = c;
    }
    color
}

/// Exact `k`-colouring by DSATUR-ordered backtracking, giving up after
/// `node_limit` search nodes. Deterministic: ties go to the lowest index.
pub fn k_color(adj: &[Vec<u32>], k: u32, node_limit: u64) -> Option<Vec<u32>> {
    let n = adj.len();
    let mut color = vec![u32::MAX; n];
    let mut budget = node_limit;
    fn pick(adj: &[Vec<u32>], color: &[u32]) -> Option<usize> {
        let mut best: Option<(usize, usize, usize)> = None;
        for v in 0..adj.len() {
            if color[v] != u32::MAX {
                continue;
            }
            let mut seen: Vec<u32> = adj[v].iter().map(|&u| color[u as usize]).filter(|&c| c != u32::MAX).collect();
            seen.sort_unstable();
            seen.dedup();
            let key = (seen.len(), adj[v].len());
            if best.is_none_or(|(_, s, d)| key > (s, d)) {
                best = Some((v, key.0, key.1));
            }
        }
        best.map(|b| b.0)
    }
    fn rec(adj: &[Vec<u32>], color: &mut [u32], k: u32, budget: &mut u64) -> Option<bool> {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let Some(v) = pick(adj, color) else {
            return Some(true);
        };
        for c in 0..k {
            if adj[v].iter().any(|&u| color[u as usize] == c) {
                continue;
            }
            color[v] = c;
            match rec(adj, color, k, budget) {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
        }
        color[v] = u32::MAX;
        Some(false)
    }
    match rec(adj, &mut color, k, &mut budget) {
        Some(true) => Some(color),
        _ => None,
    }
}

pub fn color_count(color: &[u32]) -> u32 {
    color.iter().copied().max().map_or(0, |m| m + 1)
}

pub fn is_proper(adj: &[Vec<u32>], color: &[u32]) -> bool {
    adj.iter().enumerate().all(|(v, l)| l.iter().all(|&u| color[u as usize] != color[v]))
}
