//! Concrete groups with exact multiplication.
//!
//! Discrete models implement [`GroupModel`]; their elements serialize to
//! integer tuples so balls and covers can be written to disk. The filiform
//! Lie group lives in [`continuous`].

pub mod ball;
pub mod continuous;

use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

pub use ball::{bfs_ball, bfs_ball_with_cap, BallError, WordBall};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("matrix {0:?} is not Anosov (need det 1 and |trace| > 2)")]
    NotAnosov([[i64; 2]; 2]),
    #[error("tuple {tuple:?} is not an element of {model}")]
    BadTuple { model: String, tuple: Vec<i64> },
    #[error("unknown model `{0}`")]
    UnknownModel(String),
}

pub trait Element: Clone + Eq + Hash + Ord + Debug + Send + Sync {}
impl<T: Clone + Eq + Hash + Ord + Debug + Send + Sync> Element for T {}

/// A finitely generated group with a fixed symmetric generating set.
pub trait GroupModel: Send + Sync {
    type Elem: Element;

    fn name(&self) -> String;
    fn identity(&self) -> Self::Elem;
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;
    /// Symmetric generator list, deterministic order.
    fn generators(&self) -> Vec<Self::Elem>;
    fn to_tuple(&self, a: &Self::Elem) -> Vec<i64>;
    fn from_tuple(&self, t: &[i64]) -> Result<Self::Elem, ModelError>;

    /// Stable fingerprint of the generator list (FNV-1a over the tuples).
    fn generator_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for g in self.generators() {
            for x in self.to_tuple(&g) {
                for b in x.to_le_bytes() {
                    h ^= b as u64;
                    h = h.wrapping_mul(0x0100_0000_01b3);
                }
            }
            h ^= 0xff;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        h
    }
}

/// `ℤⁿ` with the standard basis and its negatives.
#[derive(Clone, Copy, Debug, Default)]
pub struct Zn<const N: usize>;

impl<const N: usize> GroupModel for Zn<N> {
    type Elem = [i64; N];

    fn name(&self) -> String {
        format!("Z^{N}")
    }
    fn identity(&self) -> [i64; N] {
        [0; N]
    }
    fn multiply(&self, a: &[i64; N], b: &[i64; N]) -> [i64; N] {
        std::array::from_fn(|i| a[i] + b[i])
    }
    fn inverse(&self, a: &[i64; N]) -> [i64; N] {
        std::array::from_fn(|i| -a[i])
    }
    fn generators(&self) -> Vec<[i64; N]> {
        let mut out = Vec::with_capacity(2 * N);
        for i in 0..N {
            let mut e = [0; N];
            e[i] = 1;
            out.push(e);
            e[i] = -1;
            out.push(e);
        }
        out
    }
    fn to_tuple(&self, a: &[i64; N]) -> Vec<i64> {
        a.to_vec()
    }
    fn from_tuple(&self, t: &[i64]) -> Result<[i64; N], ModelError> {
        t.try_into().map_err(|_| ModelError::BadTuple { model: self.name(), tuple: t.to_vec() })
    }
}

/// ℓ¹ word length on ℤⁿ.
pub fn l1_norm<const N: usize>(a: &[i64; N]) -> u64 {
    a.iter().map(|x| x.unsigned_abs()).sum()
}

/// Integer Heisenberg group: `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
///
/// The continuous law `c + c' + ½(ab' − ba')` becomes this one under
/// `c ↦ c + ab/2`, so both describe the same group; the integer form keeps
/// lattice points in ℤ³.
#[derive(Clone, Copy, Debug, Default)]
pub struct Heisenberg;

pub fn heisenberg_model() -> Heisenberg {
    Heisenberg
}

impl GroupModel for Heisenberg {
    type Elem = [i64; 3];

    fn name(&self) -> String {
        "heisenberg".into()
    }
    fn identity(&self) -> [i64; 3] {
        [0; 3]
    }
    fn multiply(&self, g: &[i64; 3], h: &[i64; 3]) -> [i64; 3] {
        [g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]]
    }
    fn inverse(&self, g: &[i64; 3]) -> [i64; 3] {
        [-g[0], -g[1], -g[2] + g[0] * g[1]]
    }
    fn generators(&self) -> Vec<[i64; 3]> {
        vec![[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]]
    }
    fn to_tuple(&self, a: &[i64; 3]) -> Vec<i64> {
        a.to_vec()
    }
    fn from_tuple(&self, t: &[i64]) -> Result<[i64; 3], ModelError> {
        t.try_into().map_err(|_| ModelError::BadTuple { model: self.name(), tuple: t.to_vec() })
    }
}

/// Word length of the central element `(0,0,n)` for the standard generators:
/// `2⌈2√|n|⌉`, checked against breadth-first search in the tests.
pub fn heisenberg_central_length(n: i64) -> u64 {
    if n == 0 {
        return 0;
    }
    let m = 4 * n.unsigned_abs();
    let r = m.isqrt();
    let ceil = if r * r == m { r } else { r + 1 };
    2 * ceil
}

type Mat2 = [[i64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// `ℤ² ⋊_A ℤ` with `(v,t)(w,s) = (v + Aᵗw, t+s)`, elements `[v1, v2, t]`.
#[derive(Clone, Debug)]
pub struct SolLattice {
    a: Mat2,
    a_inv: Mat2,
}

pub fn sol_lattice_model(a: Mat2) -> Result<SolLattice, ModelError> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let tr = a[0][0] + a[1][1];
    if det != 1 || tr.abs() <= 2 {
        return Err(ModelError::NotAnosov(a));
    }
    let a_inv = [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]];
    Ok(SolLattice { a, a_inv })
}

impl SolLattice {
    pub fn matrix(&self) -> Mat2 {
        self.a
    }

    /// `Aᵗ` for any integer `t`.
    pub fn power(&self, t: i64) -> Mat2 {
        let base = if t >= 0 { self.a } else { self.a_inv };
        let mut out = [[1, 0], [0, 1]];
        let mut b = base;
        let mut e = t.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                out = mat_mul(&out, &b);
            }
            b = mat_mul(&b, &b);
            e >>= 1;
        }
        out
    }
}

impl GroupModel for SolLattice {
    type Elem = [i64; 3];

    fn name(&self) -> String {
        let a = self.a;
        format!("sol[{},{};{},{}]", a[0][0], a[0][1], a[1][0], a[1][1])
    }
    fn identity(&self) -> [i64; 3] {
        [0; 3]
    }
    fn multiply(&self, g: &[i64; 3], h: &[i64; 3]) -> [i64; 3] {
        let p = self.power(g[2]);
        [
            g[0] + p[0][0] * h[0] + p[0][1] * h[1],
            g[1] + p[1][0] * h[0] + p[1][1] * h[1],
            g[2] + h[2],
        ]
    }
    fn inverse(&self, g: &[i64; 3]) -> [i64; 3] {
        let p = self.power(-g[2]);
        [
            -(p[0][0] * g[0] + p[0][1] * g[1]),
            -(p[1][0] * g[0] + p[1][1] * g[1]),
            -g[2],
        ]
    }
    fn generators(&self) -> Vec<[i64; 3]> {
        vec![[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]
    }
    fn to_tuple(&self, a: &[i64; 3]) -> Vec<i64> {
        a.to_vec()
    }
    fn from_tuple(&self, t: &[i64]) -> Result<[i64; 3], ModelError> {
        t.try_into().map_err(|_| ModelError::BadTuple { model: self.name(), tuple: t.to_vec() })
    }
}

/// Element of `ℤ₂ ≀ ℤ²`: lit lamps (sorted, no repeats) and the cursor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LampState {
    pub cursor: [i32; 2],
    pub lamps: Vec<[i32; 2]>,
}

/// `ℤ₂ ≀ ℤ²` with generators: cursor moves `±e₁, ±e₂` and a toggle at the cursor.
#[derive(Clone, Copy, Debug, Default)]
pub struct Lamplighter;

pub fn lamplighter_model() -> Lamplighter {
    Lamplighter
}

fn sym_diff(a: &[[i32; 2]], b: impl Iterator<Item = [i32; 2]>) -> Vec<[i32; 2]> {
    let mut all: Vec<[i32; 2]> = a.to_vec();
    all.extend(b);
    all.sort_unstable();
    let mut out = Vec::with_capacity(all.len());
    let mut i = 0;
    while i < all.len() {
        if i + 1 < all.len() && all[i] == all[i + 1] {
            i += 2;
        } else {
            out.push(all[i]);
            i += 1;
        }
    }
    out
}

impl GroupModel for Lamplighter {
    type Elem = LampState;

    fn name(&self) -> String {
        "lamplighter".into()
    }
    fn identity(&self) -> LampState {
        LampState { cursor: [0, 0], lamps: Vec::new() }
    }
    fn multiply(&self, f: &LampState, g: &LampState) -> LampState {
        let p = f.cursor;
        LampState {
            cursor: [p[0] + g.cursor[0], p[1] + g.cursor[1]],
            lamps: sym_diff(&f.lamps, g.lamps.iter().map(|x| [x[0] + p[0], x[1] + p[1]])),
        }
    }
    fn inverse(&self, f: &LampState) -> LampState {
        let p = f.cursor;
        let mut lamps: Vec<[i32; 2]> = f.lamps.iter().map(|x| [x[0] - p[0], x[1] - p[1]]).collect();
        lamps.sort_unstable();
        LampState { cursor: [-p[0], -p[1]], lamps }
    }
    fn generators(&self) -> Vec<LampState> {
        let mv = |x, y| LampState { cursor: [x, y], lamps: Vec::new() };
        vec![
            mv(1, 0),
            mv(-1, 0),
            mv(0, 1),
            mv(0, -1),
            LampState { cursor: [0, 0], lamps: vec![[0, 0]] },
        ]
    }
    /// `[cx, cy, x1, y1, x2, y2, ...]`.
    fn to_tuple(&self, a: &LampState) -> Vec<i64> {
        let mut t = vec![a.cursor[0] as i64, a.cursor[1] as i64];
        for l in &a.lamps {
            t.push(l[0] as i64);
            t.push(l[1] as i64);
        }
        t
    }
    fn from_tuple(&self, t: &[i64]) -> Result<LampState, ModelError> {
        let bad = || ModelError::BadTuple { model: self.name(), tuple: t.to_vec() };
        if t.len() < 2 || t.len() % 2 != 0 {
            return Err(bad());
        }
        let conv = |x: i64| i32::try_from(x).map_err(|_| bad());
        let cursor = [conv(t[0])?, conv(t[1])?];
        let mut lamps = Vec::with_capacity(t.len() / 2 - 1);
        for c in t[2..].chunks(2) {
            lamps.push([conv(c[0])?, conv(c[1])?]);
        }
        let mut sorted = lamps.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted != lamps {
            return Err(bad());
        }
        Ok(LampState { cursor, lamps })
    }
}

/// The standard Anosov matrix `[[2,1],[1,1]]`.
pub const CAT_MAP: Mat2 = [[2, 1], [1, 1]];
