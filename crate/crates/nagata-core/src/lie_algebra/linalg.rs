//! Exact linear algebra over the rationals.
//!
//! Spans are reduced with fraction-free integer elimination (pivot columns
//! chosen lowest index first) and then normalized to reduced row echelon
//! form, so the same input always yields the same basis.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;
pub type QVec = Vec<Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero_vec(n: usize) -> QVec {
    vec![Q::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> QVec {
    let mut v = zero_vec(n);
    v[i] = Q::one();
    v
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Scale a rational row to a primitive integer row (content 1, same direction).
fn to_primitive_int(row: &[Q]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in row {
        lcm = lcm.lcm(x.denom());
    }
    let mut ints: Vec<BigInt> = row
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    make_primitive(&mut ints);
    ints
}

fn make_primitive(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in row.iter() {
        g = g.gcd(x);
    }
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// Fraction-free row echelon form of a set of rows, returned as the reduced
/// row echelon basis of their span (zero rows dropped).
pub fn span_basis(rows: &[QVec]) -> Vec<QVec> {
    let ncols = match rows.first() {
        Some(r) => r.len(),
        None => return Vec::new(),
    };
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .filter(|r| !is_zero_vec(r))
        .map(|r| to_primitive_int(r))
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut top = 0;
    for col in 0..ncols {
        if top == m.len() {
            break;
        }
        let Some(p) = (top..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(top, p);
        for r in 0..m.len() {
            if r == top || m[r][col].is_zero() {
                continue;
            }
            let a = m[top][col].clone();
            let b = m[r][col].clone();
            let (head, tail) = if r < top {
                let (h, t) = m.split_at_mut(top);
                (&mut h[r], &t[0])
            } else {
                let (h, t) = m.split_at_mut(r);
                (&mut t[0], &h[top])
            };
            for (x, y) in head.iter_mut().zip(tail.iter()) {
                *x = &a * &*x - &b * y;
            }
            make_primitive(head);
        }
        pivots.push(col);
        top += 1;
    }
    m.truncate(top);
    m.into_iter()
        .zip(pivots)
        .map(|(row, pc)| {
            let lead = Q::from_integer(row[pc].clone());
            row.into_iter().map(|x| Q::from_integer(x) / &lead).collect()
        })
        .collect()
}

pub fn rank(rows: &[QVec]) -> usize {
    span_basis(rows).len()
}

/// `true` when every row of `sub` lies in the span of `sup`.
pub fn span_contains(sup: &[QVec], sub: &[QVec]) -> bool {
    let base = rank(sup);
    let mut all: Vec<QVec> = sup.to_vec();
    all.extend(sub.iter().cloned());
    rank(&all) == base
}

/// Determinant by Bareiss elimination on the integer matrix obtained by
/// clearing row denominators.
pub fn determinant(mat: &[QVec]) -> Q {
    let n = mat.len();
    if n == 0 {
        return Q::one();
    }
    let mut scale = Q::one();
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in mat {
        assert_eq!(row.len(), n, "determinant of a non-square matrix");
        let mut lcm = BigInt::one();
        for x in row {
            lcm = lcm.lcm(x.denom());
        }
        scale /= Q::from_integer(lcm.clone());
        m.push(row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect());
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(p) => {
                    m.swap(k, p);
                    sign = -sign;
                }
                None => return Q::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    Q::from_integer(sign * &m[n - 1][n - 1]) * scale
}

/// Parse `p/q`, `p` or `-p/q`.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() {
        return None;
    }
    Some(Q::new(n, d))
}

pub fn format_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn abs_is_one(x: &Q) -> bool {
    x.abs().is_one()
}
