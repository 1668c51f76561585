//! Exact matrices: rationals for lattice algebra, residues for mod-q work.
//!
//! The JSON exchange format for both kinds is
//! `{rows, cols, modulus?, entries}` with entries row-major, each entry either
//! an integer or a reduced `"p/q"` string with positive denominator.

use crate::rat::{format_rat, parse_rat};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("matrix must be non-empty")]
    Empty,
    #[error("modulus must be at least 2")]
    BadModulus,
    #[error("entry {0} out of range for modulus {1}")]
    EntryRange(BigInt, u64),
    #[error("columns are linearly dependent")]
    SingularColumns,
    #[error("matrix is singular")]
    Singular,
}

/// Dense matrix over the exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::Empty);
        }
        if entries.len() != rows * cols {
            return Err(MatrixError::DimMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![BigRational::zero(); rows * cols]).unwrap()
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigRational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> BigRational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self::new(rows, cols, entries).unwrap()
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_fn(rows.len(), rows[0].len(), |i, j| {
            BigRational::from_integer(BigInt::from(rows[i][j]))
        })
    }

    pub fn column_vector(v: &[BigRational]) -> Self {
        Self::new(v.len(), 1, v.to_vec()).unwrap()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigRational {
        &mut self.entries[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols)
                .map(|k| self.at(i, k) * other.at(k, j))
                .sum()
        }))
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::DimMismatch("matrix addition".into()));
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self.at(i, j) + other.at(i, j)
        }))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.at(i, j) * c)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.at(i, j).is_one()
                    } else {
                        self.at(i, j).is_zero()
                    }
                })
            })
    }

    pub fn is_integer(&self) -> bool {
        self.entries.iter().all(|e| e.denom().is_one())
    }

    /// Rank over Q by fraction-preserving Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let at = |m: &Vec<BigRational>, i: usize, j: usize| m[i * cols + j].clone();
        let mut rank = 0;
        for col in 0..cols {
            let pivot = (rank..rows).find(|&i| !at(&m, i, col).is_zero());
            let Some(p) = pivot else { continue };
            for j in 0..cols {
                m.swap(rank * cols + j, p * cols + j);
            }
            let inv = at(&m, rank, col).recip();
            for j in col..cols {
                let v = at(&m, rank, j) * &inv;
                m[rank * cols + j] = v;
            }
            for i in 0..rows {
                if i != rank && !at(&m, i, col).is_zero() {
                    let factor = at(&m, i, col);
                    for j in col..cols {
                        let v = at(&m, i, j) - at(&m, rank, j) * &factor;
                        m[i * cols + j] = v;
                    }
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    /// Inverse of a square matrix, or `Err(Singular)`.
    pub fn inverse(&self) -> Result<Self, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::DimMismatch("inverse of non-square".into()));
        }
        let n = self.rows;
        let mut aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.at(i, j).clone()
            } else if j - n == i {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        });
        for col in 0..n {
            let pivot = (col..n).find(|&i| !aug.at(i, col).is_zero());
            let Some(p) = pivot else {
                return Err(MatrixError::Singular);
            };
            for j in 0..2 * n {
                let tmp = aug.at(col, j).clone();
                *aug.at_mut(col, j) = aug.at(p, j).clone();
                *aug.at_mut(p, j) = tmp;
            }
            let inv = aug.at(col, col).recip();
            for j in 0..2 * n {
                let v = aug.at(col, j) * &inv;
                *aug.at_mut(col, j) = v;
            }
            for i in 0..n {
                if i != col && !aug.at(i, col).is_zero() {
                    let factor = aug.at(i, col).clone();
                    for j in 0..2 * n {
                        let v = aug.at(i, j) - aug.at(col, j) * &factor;
                        *aug.at_mut(i, j) = v;
                    }
                }
            }
        }
        Ok(Self::from_fn(n, n, |i, j| aug.at(i, j + n).clone()))
    }

    /// Solves `self * x = b` exactly; `None` when inconsistent.
    ///
    /// When the solution space has positive dimension an arbitrary member is
    /// returned (free variables set to zero).
    pub fn solve(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(b.len(), self.rows);
        let (rows, cols) = (self.rows, self.cols);
        let mut aug = RatMatrix::from_fn(rows, cols + 1, |i, j| {
            if j < cols {
                self.at(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0;
        for col in 0..cols {
            let pivot = (r..rows).find(|&i| !aug.at(i, col).is_zero());
            let Some(p) = pivot else { continue };
            for j in 0..=cols {
                let tmp = aug.at(r, j).clone();
                *aug.at_mut(r, j) = aug.at(p, j).clone();
                *aug.at_mut(p, j) = tmp;
            }
            let inv = aug.at(r, col).recip();
            for j in col..=cols {
                let v = aug.at(r, j) * &inv;
                *aug.at_mut(r, j) = v;
            }
            for i in 0..rows {
                if i != r && !aug.at(i, col).is_zero() {
                    let factor = aug.at(i, col).clone();
                    for j in col..=cols {
                        let v = aug.at(i, j) - aug.at(r, j) * &factor;
                        *aug.at_mut(i, j) = v;
                    }
                }
            }
            pivots.push(col);
            r += 1;
            if r == rows {
                break;
            }
        }
        for i in r..rows {
            if !aug.at(i, cols).is_zero() {
                return None;
            }
        }
        let mut x = vec![BigRational::zero(); cols];
        for (row, &col) in pivots.iter().enumerate() {
            x[col] = aug.at(row, cols).clone();
        }
        Some(x)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format_rat(self.at(i, j))).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Matrix over Z_q with an explicit modulus; entries are canonical residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModMatrix {
    rows: usize,
    cols: usize,
    modulus: u64,
    entries: Vec<u64>,
}

impl ModMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        modulus: u64,
        entries: Vec<u64>,
    ) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::Empty);
        }
        if modulus < 2 {
            return Err(MatrixError::BadModulus);
        }
        if entries.len() != rows * cols {
            return Err(MatrixError::DimMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        if let Some(e) = entries.iter().find(|&&e| e >= modulus) {
            return Err(MatrixError::EntryRange(BigInt::from(*e), modulus));
        }
        Ok(Self {
            rows,
            cols,
            modulus,
            entries,
        })
    }

    pub fn zero(rows: usize, cols: usize, modulus: u64) -> Self {
        Self::new(rows, cols, modulus, vec![0; rows * cols]).unwrap()
    }

    pub fn identity(n: usize, modulus: u64) -> Self {
        let mut m = Self::zero(n, n, modulus);
        for i in 0..n {
            m.entries[i * n + i] = 1 % modulus;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, modulus: u64, f: impl Fn(usize, usize) -> u64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j) % modulus);
            }
        }
        Self::new(rows, cols, modulus, entries).unwrap()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn at(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.cols + j] = v % self.modulus;
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.at(i, j)).collect()
    }

    /// `self * v mod q` for an integer vector `v` (any representatives).
    pub fn mul_vec(&self, v: &[i64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        let q = self.modulus as i128;
        (0..self.rows)
            .map(|i| {
                let mut acc: i128 = 0;
                for j in 0..self.cols {
                    acc = (acc + self.at(i, j) as i128 * v[j] as i128).rem_euclid(q);
                }
                acc as u64
            })
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols != other.rows || self.modulus != other.modulus {
            return Err(MatrixError::DimMismatch("mod-matrix product".into()));
        }
        let q = self.modulus as u128;
        Ok(Self::from_fn(self.rows, other.cols, self.modulus, |i, j| {
            let mut acc: u128 = 0;
            for k in 0..self.cols {
                acc = (acc + self.at(i, k) as u128 * other.at(k, j) as u128) % q;
            }
            acc as u64
        }))
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| self.at(i, j) == u64::from(i == j) % self.modulus))
    }

    /// Lifts residues to a rational matrix.
    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix::from_fn(self.rows, self.cols, |i, j| {
            BigRational::from_integer(BigInt::from(self.at(i, j)))
        })
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mod {}", self.modulus)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Integer linear algebra: Smith normal form and mod-q solving.
// ---------------------------------------------------------------------------

/// Smith normal form `U * M * V = D` over Z with unimodular `U`, `V`.
pub struct Smith {
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
    pub d: Vec<Vec<BigInt>>,
}

fn ident_big(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// Textbook Smith normal form; fine at desk scale.
pub fn smith_normal_form(m: &[Vec<BigInt>]) -> Smith {
    let rows = m.len();
    let cols = m[0].len();
    let mut d: Vec<Vec<BigInt>> = m.to_vec();
    let mut u = ident_big(rows);
    let mut v = ident_big(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // Find a nonzero pivot in the remaining block.
        let mut pivot = None;
        'search: for i in t..rows {
            for j in t..cols {
                if !d[i][j].is_zero() {
                    pivot = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        for row in d.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            // Clear column t by row operations.
            let mut done = true;
            for i in t + 1..rows {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_floor(&d[t][t]);
                for j in 0..cols {
                    let sub = &q * &d[t][j];
                    d[i][j] -= sub;
                }
                for j in 0..rows {
                    let sub = &q * &u[t][j];
                    u[i][j] -= sub;
                }
                if !d[i][t].is_zero() {
                    d.swap(t, i);
                    u.swap(t, i);
                    done = false;
                }
            }
            // Clear row t by column operations.
            for j in t + 1..cols {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_floor(&d[t][t]);
                for i in 0..rows {
                    let sub = &q * &d[i][t];
                    d[i][j] -= sub;
                }
                for i in 0..cols {
                    let sub = &q * &v[i][t];
                    v[i][j] -= sub;
                }
                if !d[t][j].is_zero() {
                    for row in d.iter_mut() {
                        row.swap(t, j);
                    }
                    for row in v.iter_mut() {
                        row.swap(t, j);
                    }
                    done = false;
                }
            }
            if done
                && (t + 1..rows).all(|i| d[i][t].is_zero())
                && (t + 1..cols).all(|j| d[t][j].is_zero())
            {
                break;
            }
        }
        t += 1;
    }
    Smith { u, v, d }
}

/// Solves `M y = b (mod q)` over the integers via the Smith form of `[M | qI]`.
///
/// Returns the first `cols(M)` coordinates of an integer solution, reduced to
/// canonical residues, or `None` when the congruence system is unsolvable.
pub fn solve_mod_q(m: &[Vec<BigInt>], b: &[BigInt], q: u64) -> Option<Vec<u64>> {
    let rows = m.len();
    let cols = m[0].len();
    assert_eq!(b.len(), rows);
    let qq = BigInt::from(q);
    // Augment with q*I so congruences become exact integer equations.
    let mut full: Vec<Vec<BigInt>> = Vec::with_capacity(rows);
    for (i, row) in m.iter().enumerate() {
        let mut r = row.clone();
        for k in 0..rows {
            r.push(if k == i { qq.clone() } else { BigInt::zero() });
        }
        full.push(r);
    }
    let snf = smith_normal_form(&full);
    let total = cols + rows;
    // U*b must be divisible by the diagonal.
    let ub: Vec<BigInt> = (0..rows)
        .map(|i| (0..rows).map(|k| &snf.u[i][k] * &b[k]).sum())
        .collect();
    let mut y = vec![BigInt::zero(); total];
    for (i, ubi) in ub.iter().enumerate() {
        let di = if i < total {
            snf.d[i][i].clone()
        } else {
            BigInt::zero()
        };
        if di.is_zero() {
            if !ubi.is_zero() {
                return None;
            }
        } else {
            let (quot, rem) = ubi.div_rem(&di);
            if !rem.is_zero() {
                return None;
            }
            y[i] = quot;
        }
    }
    // x = V y.
    let x: Vec<BigInt> = (0..cols)
        .map(|i| (0..total).map(|k| &snf.v[i][k] * &y[k]).sum())
        .collect();
    Some(
        x.iter()
            .map(|v| v.mod_floor(&qq).to_u64_digits().1.first().copied().unwrap_or(0))
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// JSON exchange format.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    modulus: Option<u64>,
    entries: Vec<serde_json::Value>,
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                if e.denom().is_one() {
                    match e.numer().to_string().parse::<i64>() {
                        Ok(n) => serde_json::Value::from(n),
                        Err(_) => serde_json::Value::from(format_rat(e)),
                    }
                } else {
                    serde_json::Value::from(format_rat(e))
                }
            })
            .collect();
        MatrixWire {
            rows: self.rows,
            cols: self.cols,
            modulus: None,
            entries,
        }
        .serialize(s)
    }
}

fn value_to_rat(v: &serde_json::Value) -> Result<BigRational, String> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(BigInt::from(i)))
            } else {
                Err(format!("non-integer numeric entry {n}"))
            }
        }
        serde_json::Value::String(s) => parse_rat(s),
        other => Err(format!("bad matrix entry {other}")),
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(d)?;
        if wire.modulus.is_some() {
            return Err(D::Error::custom("unexpected modulus on a rational matrix"));
        }
        let entries: Result<Vec<_>, _> = wire.entries.iter().map(value_to_rat).collect();
        RatMatrix::new(wire.rows, wire.cols, entries.map_err(D::Error::custom)?)
            .map_err(D::Error::custom)
    }
}

impl Serialize for ModMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixWire {
            rows: self.rows,
            cols: self.cols,
            modulus: Some(self.modulus),
            entries: self.entries.iter().map(|&e| serde_json::Value::from(e)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(d)?;
        let modulus = wire
            .modulus
            .ok_or_else(|| D::Error::custom("missing modulus on a mod-q matrix"))?;
        let entries: Result<Vec<u64>, String> = wire
            .entries
            .iter()
            .map(|v| {
                v.as_u64()
                    .ok_or_else(|| format!("bad residue entry {v}"))
            })
            .collect();
        ModMatrix::new(wire.rows, wire.cols, modulus, entries.map_err(D::Error::custom)?)
            .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn inverse_round_trip() {
        let m = RatMatrix::from_int_rows(&[vec![2, 1], vec![1, 1]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
    }

    #[test]
    fn rank_detects_dependence() {
        let m = RatMatrix::from_int_rows(&[vec![1, 2], vec![2, 4], vec![0, 0]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn solve_inconsistent_is_none() {
        let m = RatMatrix::from_int_rows(&[vec![1, 0], vec![1, 0]]);
        let b = vec![rat(1, 1), rat(2, 1)];
        assert!(m.solve(&b).is_none());
    }

    #[test]
    fn smith_diagonalizes() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(4), BigInt::from(4)],
            vec![BigInt::from(-6), BigInt::from(6), BigInt::from(12)],
            vec![BigInt::from(10), BigInt::from(4), BigInt::from(16)],
        ];
        let snf = smith_normal_form(&m);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(snf.d[i][j].is_zero());
                }
            }
        }
        // U*M*V == D
        let mul = |a: &Vec<Vec<BigInt>>, b: &Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
            (0..a.len())
                .map(|i| {
                    (0..b[0].len())
                        .map(|j| (0..b.len()).map(|k| &a[i][k] * &b[k][j]).sum())
                        .collect()
                })
                .collect()
        };
        let umv = mul(&mul(&snf.u, &m), &snf.v);
        assert_eq!(umv, snf.d);
    }

    #[test]
    fn solve_mod_q_composite_modulus() {
        // 2*y1 + 3*y2 = 1 mod 6 is solvable even though neither 2 nor 3 is a unit.
        let m = vec![vec![BigInt::from(2), BigInt::from(3)]];
        let b = vec![BigInt::one()];
        let y = solve_mod_q(&m, &b, 6).unwrap();
        assert_eq!((2 * y[0] + 3 * y[1]) % 6, 1);
    }

    #[test]
    fn json_rejects_unreduced() {
        let bad = r#"{"rows":1,"cols":1,"entries":["2/4"]}"#;
        assert!(serde_json::from_str::<RatMatrix>(bad).is_err());
        let good = r#"{"rows":1,"cols":2,"entries":["1/2",3]}"#;
        let m: RatMatrix = serde_json::from_str(good).unwrap();
        assert_eq!(*m.at(0, 1), rat(3, 1));
    }
}
