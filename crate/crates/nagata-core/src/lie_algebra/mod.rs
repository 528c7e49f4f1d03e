//! Lie algebras given by rational structure constants.
//!
//! `[e_i, e_j] = Σ_k c[i][j][k] e_k`, indices 0-based in the API and 1-based
//! in the text format:
//!
//! ```text
//! # filiform
//! name filiform4
//! dim 4
//! 1 2 3 1
//! 1 3 4 1
//! ```
//!
//! Only `i < j` entries are written; antisymmetry supplies the rest.

pub mod algebras;
pub mod linalg;

use std::fmt::Write as _;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use linalg::{q, q_frac, Q, QVec};
use linalg::{is_zero_vec, span_basis, span_contains, unit_vec, zero_vec};

#[derive(Debug, Error, PartialEq)]
pub enum LieError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("vector has length {got}, algebra has dimension {dim}")]
    DimensionMismatch { dim: usize, got: usize },
    #[error("index out of range in entry ({i}, {j}, {k}) for dimension {dim}")]
    IndexOutOfRange { i: usize, j: usize, k: usize, dim: usize },
    #[error("antisymmetry fails at c[{i}][{j}][{k}]")]
    Antisymmetry { i: usize, j: usize, k: usize },
    #[error("Jacobi identity fails on basis triple ({i}, {j}, {k})")]
    Jacobi { i: usize, j: usize, k: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    // c[(i * dim + j) * dim + k]
    c: Vec<Q>,
}

impl LieAlgebra {
    /// Build from the `i < j` entries (0-based), validating Jacobi.
    pub fn from_entries(
        name: impl Into<String>,
        dim: usize,
        entries: &[(usize, usize, usize, Q)],
    ) -> Result<Self, LieError> {
        if dim == 0 {
            return Err(LieError::ZeroDimension);
        }
        let mut c = vec![Q::zero(); dim * dim * dim];
        for (i, j, k, v) in entries {
            let (i, j, k) = (*i, *j, *k);
            if i >= dim || j >= dim || k >= dim || i == j {
                return Err(LieError::IndexOutOfRange { i, j, k, dim });
            }
            c[(i * dim + j) * dim + k] = v.clone();
            c[(j * dim + i) * dim + k] = -v.clone();
        }
        let l = LieAlgebra { name: name.into(), dim, c };
        l.check_jacobi()?;
        Ok(l)
    }

    /// Build from a full tensor `c[i][j][k]`, validating antisymmetry and Jacobi.
    pub fn from_tensor(name: impl Into<String>, tensor: Vec<Vec<Vec<Q>>>) -> Result<Self, LieError> {
        let dim = tensor.len();
        if dim == 0 {
            return Err(LieError::ZeroDimension);
        }
        let mut c = Vec::with_capacity(dim * dim * dim);
        for plane in &tensor {
            if plane.len() != dim {
                return Err(LieError::DimensionMismatch { dim, got: plane.len() });
            }
            for row in plane {
                if row.len() != dim {
                    return Err(LieError::DimensionMismatch { dim, got: row.len() });
                }
                c.extend(row.iter().cloned());
            }
        }
        let l = LieAlgebra { name: name.into(), dim, c };
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    if *l.coeff(i, j, k) != -l.coeff(j, i, k).clone() {
                        return Err(LieError::Antisymmetry { i, j, k });
                    }
                }
            }
        }
        l.check_jacobi()?;
        Ok(l)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, i: usize, j: usize, k: usize) -> &Q {
        &self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn tensor(&self) -> Vec<Vec<Vec<Q>>> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| self.coeff(i, j, k).clone()).collect()).collect())
            .collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    fn bracket_unchecked(&self, x: &[Q], y: &[Q]) -> QVec {
        let n = self.dim;
        let mut out = zero_vec(n);
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() || i == j {
                    continue;
                }
                let xy = &x[i] * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let ck = self.coeff(i, j, k);
                    if !ck.is_zero() {
                        *o += &xy * ck;
                    }
                }
            }
        }
        out
    }

    fn basis_bracket(&self, i: usize, j: usize) -> QVec {
        let n = self.dim;
        (0..n).map(|k| self.coeff(i, j, k).clone()).collect()
    }

    fn check_jacobi(&self) -> Result<(), LieError> {
        let n = self.dim;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let ei = unit_vec(n, i);
                    let ej = unit_vec(n, j);
                    let ek = unit_vec(n, k);
                    let a = self.bracket_unchecked(&ei, &self.basis_bracket(j, k));
                    let b = self.bracket_unchecked(&ej, &self.basis_bracket(k, i));
                    let c = self.bracket_unchecked(&ek, &self.basis_bracket(i, j));
                    let sum: QVec = (0..n).map(|t| &a[t] + &b[t] + &c[t]).collect();
                    if !is_zero_vec(&sum) {
                        return Err(LieError::Jacobi { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// Matrix of `ad(x)` acting on coordinate vectors: column `j` is `[x, e_j]`.
    pub fn ad(&self, x: &[Q]) -> Result<Vec<QVec>, LieError> {
        self.check_len(x)?;
        let n = self.dim;
        let cols: Vec<QVec> = (0..n).map(|j| self.bracket_unchecked(x, &unit_vec(n, j))).collect();
        Ok((0..n).map(|r| (0..n).map(|j| cols[j][r].clone()).collect()).collect())
    }

    fn check_len(&self, x: &[Q]) -> Result<(), LieError> {
        if x.len() != self.dim {
            return Err(LieError::DimensionMismatch { dim: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// Parse the text format described in the module docs.
    pub fn parse(text: &str) -> Result<Self, LieError> {
        let mut name = String::from("unnamed");
        let mut dim: Option<usize> = None;
        let mut entries = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| LieError::Parse { line: ln + 1, msg: msg.to_string() };
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "name" => name = toks[1..].join(" "),
                "dim" => {
                    if toks.len() != 2 {
                        return Err(err("expected `dim n`"));
                    }
                    dim = Some(toks[1].parse().map_err(|_| err("bad dimension"))?);
                }
                _ => {
                    let n = dim.ok_or_else(|| err("`dim` must come before entries"))?;
                    if toks.len() != 4 {
                        return Err(err("expected `i j k p/q`"));
                    }
                    let idx = |t: &str| -> Result<usize, LieError> {
                        let v: usize = t.parse().map_err(|_| err("bad index"))?;
                        if v == 0 || v > n {
                            return Err(err("index out of range"));
                        }
                        Ok(v - 1)
                    };
                    let (i, j, k) = (idx(toks[0])?, idx(toks[1])?, idx(toks[2])?);
                    if i >= j {
                        return Err(err("entries must have i < j"));
                    }
                    let v = linalg::parse_rational(toks[3]).ok_or_else(|| err("bad rational"))?;
                    entries.push((i, j, k, v));
                }
            }
        }
        let dim = dim.ok_or(LieError::Parse { line: 0, msg: "missing `dim` line".into() })?;
        Self::from_entries(name, dim, &entries)
    }

    pub fn to_text(&self) -> String {
        let n = self.dim;
        let mut s = format!("name {}\ndim {}\n", self.name, n);
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = self.coeff(i, j, k);
                    if !v.is_zero() {
                        let _ = writeln!(s, "{} {} {} {}", i + 1, j + 1, k + 1, linalg::format_rational(v));
                    }
                }
            }
        }
        s
    }
}

pub fn bracket(l: &LieAlgebra, x: &[Q], y: &[Q]) -> Result<QVec, LieError> {
    l.check_len(x)?;
    l.check_len(y)?;
    Ok(l.bracket_unchecked(x, y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    LowerCentral,
    Derived,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceChain {
    pub kind: ChainKind,
    /// Reduced row echelon bases, one per term.
    pub subspaces: Vec<Vec<QVec>>,
    pub dims: Vec<usize>,
}

impl SubspaceChain {
    pub fn reaches_zero(&self) -> bool {
        self.dims.last() == Some(&0)
    }
}

fn series(l: &LieAlgebra, kind: ChainKind) -> SubspaceChain {
    let n = l.dim;
    let full: Vec<QVec> = (0..n).map(|i| unit_vec(n, i)).collect();
    let mut subspaces = vec![full.clone()];
    let mut dims = vec![n];
    loop {
        let cur = subspaces.last().unwrap();
        let left: &[QVec] = match kind {
            ChainKind::LowerCentral => &full,
            ChainKind::Derived => cur,
        };
        let mut gens = Vec::new();
        for x in left {
            for y in cur {
                let b = l.bracket_unchecked(x, y);
                if !is_zero_vec(&b) {
                    gens.push(b);
                }
            }
        }
        let next = span_basis(&gens);
        let d = next.len();
        let stable = d == *dims.last().unwrap();
        subspaces.push(next);
        dims.push(d);
        if d == 0 || stable {
            break;
        }
    }
    SubspaceChain { kind, subspaces, dims }
}

/// `N¹ = L`, `N^{i+1} = [L, N^i]`, stopping at 0 or at the first repeat.
pub fn lower_central_series(l: &LieAlgebra) -> SubspaceChain {
    series(l, ChainKind::LowerCentral)
}

/// `L₁ = L`, `L_{i+1} = [L_i, L_i]`, stopping at 0 or at the first repeat.
pub fn derived_series(l: &LieAlgebra) -> SubspaceChain {
    series(l, ChainKind::Derived)
}

/// `B(e_i, e_j) = tr(ad e_i ∘ ad e_j)`.
pub fn killing_form(l: &LieAlgebra) -> Vec<QVec> {
    let n = l.dim;
    let mut b = vec![zero_vec(n); n];
    for i in 0..n {
        for j in i..n {
            let mut t = Q::zero();
            for k in 0..n {
                for m in 0..n {
                    let a = l.coeff(i, m, k);
                    let c = l.coeff(j, k, m);
                    if !a.is_zero() && !c.is_zero() {
                        t += a * c;
                    }
                }
            }
            b[i][j] = t.clone();
            b[j][i] = t;
        }
    }
    b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictedDim {
    Value(usize),
    RequiresCatalog,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub name: String,
    pub topological_dim: usize,
    pub nilpotency_degree: Option<usize>,
    pub is_abelian: bool,
    pub is_nilpotent: bool,
    pub is_solvable: bool,
    pub is_semisimple_by_killing: bool,
    pub lower_central_dims: Vec<usize>,
    pub derived_dims: Vec<usize>,
    pub killing_determinant: String,
    pub predicted_asdim_an: PredictedDim,
    pub hirsch_length: Option<usize>,
}

/// Dimension invariants predicted from the algebra alone.
///
/// Solvable algebras get `asdim_AN = dim`. Anything else needs group-level
/// data (maximal compact subgroups, centres) and is deferred to the catalog.
/// The Hirsch length follows the derived-series formula: the sum of the
/// dimensions of successive derived quotients, defined when the series
/// reaches zero. Classically the Hirsch length is taken over any polycyclic
/// series; for lattices in simply connected solvable groups both agree with
/// the dimension, and no attempt is made to reconcile the definitions beyond
/// that.
pub fn classify(l: &LieAlgebra) -> DimensionReport {
    let lcs = lower_central_series(l);
    let der = derived_series(l);
    let is_nilpotent = lcs.reaches_zero();
    let is_solvable = der.reaches_zero();
    let det = linalg::determinant(&killing_form(l));
    let is_semisimple_by_killing = !det.is_zero();
    let nilpotency_degree = if is_nilpotent { Some(lcs.dims.len() - 1) } else { None };
    let hirsch_length = if is_solvable {
        Some(der.dims.windows(2).map(|w| w[0] - w[1]).sum())
    } else {
        None
    };
    let predicted_asdim_an = if is_solvable {
        PredictedDim::Value(l.dim)
    } else {
        PredictedDim::RequiresCatalog
    };
    DimensionReport {
        name: l.name.clone(),
        topological_dim: l.dim,
        nilpotency_degree,
        is_abelian: l.is_abelian(),
        is_nilpotent,
        is_solvable,
        is_semisimple_by_killing,
        lower_central_dims: lcs.dims,
        derived_dims: der.dims,
        killing_determinant: linalg::format_rational(&det),
        predicted_asdim_an,
        hirsch_length,
    }
}

/// Sum of the rational ranks of successive quotients.
pub fn hirsch_length(quotient_ranks: &[usize]) -> usize {
    quotient_ranks.iter().sum()
}

/// `true` when every term of the chain is contained in its predecessor.
pub fn chain_is_descending(chain: &SubspaceChain) -> bool {
    chain.subspaces.windows(2).all(|w| span_contains(&w[0], &w[1]))
}

/// `true` when `sub` is an ideal of `sup`: `[sup, sub] ⊆ sub`.
pub fn is_ideal_of(l: &LieAlgebra, sup: &[QVec], sub: &[QVec]) -> bool {
    let mut brs = Vec::new();
    for x in sup {
        for y in sub {
            brs.push(l.bracket_unchecked(x, y));
        }
    }
    if sub.is_empty() {
        return brs.iter().all(|b| is_zero_vec(b));
    }
    span_contains(sub, &brs)
}
