//! Explicit covers: staggered bricks on ℤⁿ, lattice tiles on the
//! Heisenberg group, and product covers over a central extension.

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use super::coloring::k_color;
use super::components::{exact_diameter, graph_components, max_hop, separate_clusters};
use super::{Cover, CoverError, WordSpace};
use crate::group_models::{heisenberg_central_length, GroupModel, Heisenberg, WordBall, Zn};
use crate::metric_lab::GroupMetric;

/// Staggered boxes on a ball of ℤⁿ with `n + 1` families.
///
/// Family `f` is shifted by `φ_f = ⌊f·L/(n+1)⌋` in every coordinate and
/// keeps the points whose coordinates all have residue in `[m, L−m)` modulo
/// `L`. With `m = ⌈k/2⌉`, where `k` is the largest distance below `s`,
/// boxes of one family are at least `s` apart; the excluded windows of the
/// families are disjoint in each coordinate, so each point is missed by at
/// most `n` families. `L = max(⌈3s⌉, 2m(n+1))`.
pub fn brick_cover<const N: usize>(ball: &WordBall<[i64; N]>, s: f64) -> Cover<[i64; N]> {
    let k = max_hop(s) as i64;
    let m = (k + 1) / 2;
    let nf = N as i64 + 1;
    let l = ((3.0 * s).ceil() as i64).max(2 * m * nf).max(1);
    let mut families: Vec<BTreeMap<[i64; N], Vec<[i64; N]>>> = vec![BTreeMap::new(); N + 1];
    for (x, _) in ball.iter() {
        for (f, fam) in families.iter_mut().enumerate() {
            let phi = (f as i64 * l) / nf;
            let inside = x.iter().all(|&xi| {
                let r = (xi - phi).rem_euclid(l);
                r >= m && r < l - m
            });
            if inside {
                let id: [i64; N] = std::array::from_fn(|i| (x[i] - phi).div_euclid(l));
                fam.entry(id).or_default().push(*x);
            }
        }
    }
    let side_diam = N as f64 * (l - 2 * m - 1).max(0) as f64;
    let claimed = (3.0 * s * (N as f64).sqrt()).max(side_diam);
    let mut params = BTreeMap::new();
    params.insert("L".into(), l as f64);
    params.insert("m".into(), m as f64);
    Cover {
        families: families.into_iter().map(|f| f.into_values().collect()).collect(),
        scale: s,
        claimed_bound: claimed,
        construction: "brick".into(),
        params,
    }
}

/// Lattice tiling of the Heisenberg group by left translates of the box
/// `[0,A)² × [0,A²)`.
///
/// Columns sit over the squares of a planar grid; with `bond` set, odd rows
/// of squares are shifted by `A/2` along the first axis. Column `(i, j)` is
/// based at `β = (iA + offset, jA, ψ)` with `ψ = ((zi·i + zj·j) mod q)·A²/q`,
/// and a point `g` lies in tile `(i, j, ⌊w/A²⌋)` where `β⁻¹g = (u, v, w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeisenbergTiling {
    pub a: i64,
    pub bond: bool,
    pub zi: i64,
    pub zj: i64,
    pub q: i64,
}

impl HeisenbergTiling {
    pub fn square(a: i64) -> Self {
        HeisenbergTiling { a, bond: false, zi: 0, zj: 0, q: 1 }
    }

    fn base(&self, i: i64, j: i64) -> [i64; 3] {
        let off = if self.bond { j.rem_euclid(2) * (self.a / 2) } else { 0 };
        let psi = (self.zi * i + self.zj * j).rem_euclid(self.q) * self.a * self.a / self.q;
        [i * self.a + off, j * self.a, psi]
    }

    pub fn tile(&self, g: &[i64; 3]) -> [i64; 3] {
        let j = g[1].div_euclid(self.a);
        let off = if self.bond { j.rem_euclid(2) * (self.a / 2) } else { 0 };
        let i = (g[0] - off).div_euclid(self.a);
        let f = Heisenberg.multiply(&Heisenberg.inverse(&self.base(i, j)), g);
        [i, j, f[2].div_euclid(self.a * self.a)]
    }

    /// Short label for reports.
    pub fn label(&self) -> String {
        if self.bond {
            format!("bond/z({},{})/{}", self.zi, self.zj, self.q)
        } else if self.q > 1 {
            format!("square/z({},{})/{}", self.zi, self.zj, self.q)
        } else {
            "square".into()
        }
    }
}

/// Upper bound on the diameter of one tile: for `f, f'` in the tile,
/// `f⁻¹f' = (p, q, r)` with `|p|, |q| < A` and
/// `(p,q,r) = (p,0,0)(0,q,0)(0,0,w)`, `|w| ≤ A² − 1 + (A−1)²`.
pub fn heisenberg_tile_bound(a: i64) -> u64 {
    2 * (a - 1) as u64 + heisenberg_central_length(a * a - 1 + (a - 1) * (a - 1))
}

/// Search budget for the exact 4-colouring of tiles.
pub const TILE_COLOR_BUDGET: u64 = 2_000_000;

/// Tile side multipliers tried, smallest first: `A = c·⌈s⌉`.
pub const TILE_SIDE_FACTORS: [i64; 5] = [3, 4, 6, 8, 12];

/// Layouts tried at each side length, in order.
pub fn tile_layouts(a: i64) -> Vec<HeisenbergTiling> {
    let t = |bond, zi, zj, q| HeisenbergTiling { a, bond, zi, zj, q };
    vec![t(true, 1, 0, 2), t(true, 2, 3, 4), t(true, 2, 1, 4), HeisenbergTiling::square(a)]
}

fn color_tiles(
    ball: &WordBall<[i64; 3]>,
    tiling: &HeisenbergTiling,
    s: f64,
) -> Option<(Vec<[i64; 3]>, Vec<u32>, Vec<u32>)> {
    let mut tile_ids: FxHashMap<[i64; 3], u32> = FxHashMap::default();
    let mut tiles: Vec<[i64; 3]> = Vec::new();
    let cluster_of: Vec<u32> = ball
        .elements()
        .iter()
        .map(|g| {
            let t = tiling.tile(g);
            *tile_ids.entry(t).or_insert_with(|| {
                tiles.push(t);
                (tiles.len() - 1) as u32
            })
        })
        .collect();
    let space = WordSpace::new(&Heisenberg);
    let colors = separate_clusters(&space, ball.elements(), &cluster_of, tiles.len(), max_hop(s), 4, |adj| {
        k_color(adj, 4, TILE_COLOR_BUDGET)
    })?;
    Some((tiles, cluster_of, colors))
}

/// Four-family cover of a Heisenberg ball by lattice tiles, with tiles
/// assigned to families by an exact 4-colouring of their conflict graph on
/// the ball (tiles closer than `s` get different families).
///
/// Side lengths `A = c·⌈s⌉` for `c` in [`TILE_SIDE_FACTORS`] and the layouts
/// of [`tile_layouts`] are tried in order; the first colourable one is used.
/// Claimed bound: [`heisenberg_tile_bound`]`(A)`.
pub fn heisenberg_brick_cover(ball: &WordBall<[i64; 3]>, s: f64) -> Result<Cover<[i64; 3]>, CoverError> {
    let base = (s.ceil() as i64).max(1);
    for (ci, c) in TILE_SIDE_FACTORS.iter().enumerate() {
        for (li, tiling) in tile_layouts(c * base).into_iter().enumerate() {
            let Some((tiles, cluster_of, colors)) = color_tiles(ball, &tiling, s) else {
                continue;
            };
            let mut fams: Vec<BTreeMap<[i64; 3], Vec<[i64; 3]>>> = vec![BTreeMap::new(); 4];
            for (g, &cl) in ball.elements().iter().zip(&cluster_of) {
                fams[colors[cl as usize] as usize].entry(tiles[cl as usize]).or_default().push(*g);
            }
            let mut params = BTreeMap::new();
            params.insert("A".into(), tiling.a as f64);
            params.insert("side_factor".into(), *c as f64);
            params.insert("side_factor_rank".into(), ci as f64);
            params.insert("layout".into(), li as f64);
            params.insert("tiles".into(), tiles.len() as f64);
            return Ok(Cover {
                families: fams.into_iter().map(|f| f.into_values().collect()).collect(),
                scale: s,
                claimed_bound: heisenberg_tile_bound(tiling.a) as f64,
                construction: "heis-brick".into(),
                params,
            });
        }
    }
    Err(CoverError::ColoringFailed { clusters: ball.len(), colors: 4 })
}

/// `1 → K → G → H → 1` with `K ≅ ℤ` central and a set-theoretic section.
pub trait CentralExtension {
    type G: GroupModel;
    type H: GroupModel;
    fn group(&self) -> &Self::G;
    fn quotient(&self) -> &Self::H;
    fn project(&self, g: &<Self::G as GroupModel>::Elem) -> <Self::H as GroupModel>::Elem;
    /// Lift of `h` along a geodesic word, so `ℓ_G(lift(h)) ≤ ℓ_H(h)`.
    fn lift(&self, h: &<Self::H as GroupModel>::Elem) -> <Self::G as GroupModel>::Elem;
    /// Coordinate of a kernel element; `None` outside the kernel.
    fn kernel_coordinate(&self, k: &<Self::G as GroupModel>::Elem) -> Option<i64>;
    /// `ℓ_G` of the kernel element with coordinate `n`; `None` if the kernel
    /// has no such element.
    fn kernel_length(&self, n: i64) -> Option<u64>;
}

/// Heisenberg group over ℤ² with `K` the centre.
pub struct HeisenbergOverPlane;

impl CentralExtension for HeisenbergOverPlane {
    type G = Heisenberg;
    type H = Zn<2>;
    fn group(&self) -> &Heisenberg {
        &Heisenberg
    }
    fn quotient(&self) -> &Zn<2> {
        &Zn::<2>
    }
    fn project(&self, g: &[i64; 3]) -> [i64; 2] {
        [g[0], g[1]]
    }
    fn lift(&self, h: &[i64; 2]) -> [i64; 3] {
        // x^p y^q
        [h[0], h[1], h[0] * h[1]]
    }
    fn kernel_coordinate(&self, k: &[i64; 3]) -> Option<i64> {
        (k[0] == 0 && k[1] == 0).then_some(k[2])
    }
    fn kernel_length(&self, n: i64) -> Option<u64> {
        Some(heisenberg_central_length(n))
    }
}

/// ℤ² over its second coordinate, `K = ℤ × {0}`.
pub struct PlaneOverLine;

impl CentralExtension for PlaneOverLine {
    type G = Zn<2>;
    type H = Zn<1>;
    fn group(&self) -> &Zn<2> {
        &Zn::<2>
    }
    fn quotient(&self) -> &Zn<1> {
        &Zn::<1>
    }
    fn project(&self, g: &[i64; 2]) -> [i64; 1] {
        [g[1]]
    }
    fn lift(&self, h: &[i64; 1]) -> [i64; 2] {
        [0, h[0]]
    }
    fn kernel_coordinate(&self, k: &[i64; 2]) -> Option<i64> {
        (k[1] == 0).then_some(k[0])
    }
    fn kernel_length(&self, n: i64) -> Option<u64> {
        Some(n.unsigned_abs())
    }
}

/// ℤ² over itself, `K` trivial.
pub struct TrivialKernel;

impl CentralExtension for TrivialKernel {
    type G = Zn<2>;
    type H = Zn<2>;
    fn group(&self) -> &Zn<2> {
        &Zn::<2>
    }
    fn quotient(&self) -> &Zn<2> {
        &Zn::<2>
    }
    fn project(&self, g: &[i64; 2]) -> [i64; 2] {
        *g
    }
    fn lift(&self, h: &[i64; 2]) -> [i64; 2] {
        *h
    }
    fn kernel_coordinate(&self, k: &[i64; 2]) -> Option<i64> {
        (*k == [0, 0]).then_some(0)
    }
    fn kernel_length(&self, n: i64) -> Option<u64> {
        (n == 0).then_some(0)
    }
}

/// Interval length `L_K` and control `D_K` of the two-family interval cover
/// of the kernel at scale `s`: intervals `[jL, (j+1)L)` alternate between
/// the families, `L` is the least length with `ℓ(L+1) ≥ s` (so same-family
/// intervals are `s`-separated), and `D_K = max_{0≤n<L} ℓ(n)`.
pub fn kernel_control<X: CentralExtension + ?Sized>(ext: &X, s: f64) -> (i64, u64) {
    let far = |n: i64| ext.kernel_length(n).is_none_or(|l| l as f64 >= s);
    let mut l = 1i64;
    while !far(l + 1) {
        l += 1;
    }
    let d = (0..l).filter_map(|n| ext.kernel_length(n)).max().unwrap_or(0);
    (l, d)
}

/// Cover of a ball of `G` from a cover of `H` at the same scale `s`.
///
/// For each `H`-family `j` and each `s`-component `W` of it, the preimage
/// of `W` lies within `B_H` (the verified `H` control) of the coset
/// `g₀K`, `g₀` a lift of an anchor of `W`. Writing `g = g₀·κ·lift(Δ)` puts
/// each preimage point at a kernel coordinate `κ`, which is sorted into the
/// two-family interval cover of `K` at scale `s + 2B_H`. The output has
/// `2·(number of H-families)` families indexed `(j, i)` and bound
/// `D_K(s + 2B_H) + 2B_H`.
pub fn exact_sequence_cover<X, MH>(
    ext: &X,
    ball: &WordBall<<X::G as GroupModel>::Elem>,
    cover_h: &Cover<<X::H as GroupModel>::Elem>,
    h_metric: &MH,
    s: f64,
) -> Result<Cover<<X::G as GroupModel>::Elem>, CoverError>
where
    X: CentralExtension,
    MH: GroupMetric<<X::H as GroupModel>::Elem>,
{
    if cover_h.scale != s {
        return Err(CoverError::ScaleMismatch(format!("quotient cover at {} vs {}", cover_h.scale, s)));
    }
    let (gm, hm) = (ext.group(), ext.quotient());
    let hspace = WordSpace::new(hm);
    type HE<X> = <<X as CentralExtension>::H as GroupModel>::Elem;
    // per family: element -> (component id, anchor)
    let mut comp_maps: Vec<FxHashMap<HE<X>, (u32, HE<X>)>> = Vec::new();
    let mut b_h = 0u64;
    for fam in &cover_h.families {
        let mut pts: Vec<HE<X>> = fam.iter().flatten().cloned().collect();
        pts.sort_unstable();
        pts.dedup();
        let mut map = FxHashMap::default();
        for (ci, comp) in graph_components(&hspace, &pts, s).into_iter().enumerate() {
            let cp: Vec<HE<X>> = comp.iter().map(|&i| pts[i].clone()).collect();
            b_h = b_h.max(exact_diameter(&cp, h_metric));
            let anchor = cp[0].clone();
            for p in cp {
                map.insert(p, (ci as u32, anchor.clone()));
            }
        }
        comp_maps.push(map);
    }
    let s_prime = s + 2.0 * b_h as f64;
    let (l_k, d_k) = kernel_control(ext, s_prime);
    let nh = cover_h.families.len();
    let mut out: Vec<BTreeMap<(u32, i64), Vec<<X::G as GroupModel>::Elem>>> = vec![BTreeMap::new(); 2 * nh];
    for g in ball.elements() {
        let w = ext.project(g);
        for (j, map) in comp_maps.iter().enumerate() {
            let Some((ci, anchor)) = map.get(&w) else { continue };
            let dist = h_metric.dist(anchor, &w);
            if dist > b_h {
                return Err(CoverError::PreimageEscapes { point: gm.to_tuple(g), distance: dist, bound: b_h });
            }
            let delta = hm.multiply(&hm.inverse(anchor), &w);
            let g0 = ext.lift(anchor);
            let u = ext.lift(&delta);
            let kappa = gm.multiply(&gm.multiply(&gm.inverse(&g0), g), &gm.inverse(&u));
            let n = ext.kernel_coordinate(&kappa).ok_or_else(|| CoverError::NotInKernel(gm.to_tuple(&kappa)))?;
            let m = n.div_euclid(l_k);
            let i = m.rem_euclid(2) as usize;
            out[2 * j + i].entry((*ci, m)).or_default().push(g.clone());
        }
    }
    let mut params = BTreeMap::new();
    params.insert("b_h".into(), b_h as f64);
    params.insert("d_k".into(), d_k as f64);
    params.insert("l_k".into(), l_k as f64);
    params.insert("s_prime".into(), s_prime);
    params.insert("h_families".into(), nh as f64);
    params.insert("k_families".into(), 2.0);
    Ok(Cover {
        families: out.into_iter().map(|f| f.into_values().collect()).collect(),
        scale: s,
        claimed_bound: (d_k + 2 * b_h) as f64,
        construction: "exact-seq".into(),
        params,
    })
}
