//! Prime fields GF(p) and dense matrices over them.
//!
//! All arithmetic is exact: elements are `u64` values in `[0, p)` and every
//! operation reduces modulo `p`. Matrices are stored row-major. Zero-sized
//! matrices (zero rows and/or zero columns) are first-class citizens because
//! grid modules routinely carry zero-dimensional spaces.

use std::ops::{Index, IndexMut};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime field GF(p), `2 <= p < 2^31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Builds the field, checking primality by trial division.
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || p > (1 << 31) {
            return Err(Error::Range(format!("modulus {p} outside [2, 2^31]")));
        }
        if !is_prime(p) {
            return Err(Error::Range(format!("modulus {p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    /// Multiplicative inverse of a nonzero element (Fermat).
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }

    fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Reduces an arbitrary integer into `[0, p)`.
    #[inline]
    pub fn reduce(&self, a: u64) -> u64 {
        a % self.p
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Dense matrix over GF(p), row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeFieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl PrimeFieldMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        PrimeFieldMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds a matrix from row vectors, validating entry ranges.
    pub fn from_rows(field: PrimeField, rows: usize, cols: usize, entries: &[Vec<u64>]) -> Result<Self> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "expected {rows}x{cols} entries, got {} rows",
                entries.len()
            )));
        }
        let mut m = Self::zeros(field, rows, cols);
        for (i, row) in entries.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v >= field.modulus() {
                    return Err(Error::Range(format!("entry {v} not reduced modulo {}", field.modulus())));
                }
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &PrimeFieldMatrix) -> PrimeFieldMatrix {
        assert_eq!(self.field, rhs.field, "field mismatch");
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matrix product");
        let p = self.field.modulus();
        let mut out = PrimeFieldMatrix::zeros(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out[(i, j)] + a * rhs[(k, j)] % p;
                    out[(i, j)] = v % p;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        let p = self.field.modulus();
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u64;
                for j in 0..self.cols {
                    acc = (acc + self[(i, j)] * v[j]) % p;
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &PrimeFieldMatrix) -> PrimeFieldMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (o, &r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o = self.field.add(*o, r);
        }
        out
    }

    pub fn neg(&self) -> PrimeFieldMatrix {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v = self.field.neg(*v);
        }
        out
    }

    /// Stacks `self` on top of `other` (same column count).
    pub fn vstack(&self, other: &PrimeFieldMatrix) -> PrimeFieldMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        PrimeFieldMatrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Places `self` to the left of `other` (same row count).
    pub fn hstack(&self, other: &PrimeFieldMatrix) -> PrimeFieldMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = PrimeFieldMatrix::zeros(self.field, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn take_columns(&self, idx: &[usize]) -> PrimeFieldMatrix {
        let mut out = PrimeFieldMatrix::zeros(self.field, self.rows, idx.len());
        for (jo, &ji) in idx.iter().enumerate() {
            for i in 0..self.rows {
                out[(i, jo)] = self[(i, ji)];
            }
        }
        out
    }

    pub fn take_rows(&self, idx: &[usize]) -> PrimeFieldMatrix {
        let mut out = PrimeFieldMatrix::zeros(self.field, idx.len(), self.cols);
        for (io, &ii) in idx.iter().enumerate() {
            for j in 0..self.cols {
                out[(io, j)] = self[(ii, j)];
            }
        }
        out
    }

    pub fn transpose(&self) -> PrimeFieldMatrix {
        let mut out = PrimeFieldMatrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// In-place reduced row echelon form. Returns the pivot columns.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let field = self.field;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| self[(i, c)] != 0) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = field.inv(self[(r, c)]);
            for j in c..cols {
                self[(r, j)] = field.mul(self[(r, j)], inv);
            }
            for i in 0..rows {
                if i != r && self[(i, c)] != 0 {
                    let f = self[(i, c)];
                    for j in c..cols {
                        let t = field.mul(f, self[(r, j)]);
                        self[(i, j)] = field.sub(self[(i, j)], t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce().len()
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<PrimeFieldMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = self.hstack(&PrimeFieldMatrix::identity(self.field, n));
        let pivots = aug.row_reduce();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let idx: Vec<usize> = (n..2 * n).collect();
        Some(aug.take_columns(&idx))
    }

    /// Solves `self * x = b` for each column of `b`. Returns `None` when some
    /// column is outside the column span.
    pub fn solve(&self, b: &PrimeFieldMatrix) -> Option<PrimeFieldMatrix> {
        assert_eq!(self.rows, b.rows);
        let mut aug = self.hstack(b);
        let pivots = aug.row_reduce();
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = PrimeFieldMatrix::zeros(self.field, self.cols, b.cols);
        for (r, &c) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[(c, j)] = aug[(r, self.cols + j)];
            }
        }
        Some(x)
    }
}

impl Index<(usize, usize)> for PrimeFieldMatrix {
    type Output = u64;
    fn index(&self, (i, j): (usize, usize)) -> &u64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for PrimeFieldMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut u64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Deterministic invertible matrix: draw entries from a seeded stream and
/// retry whole draws until the result has full rank. Retries consume the same
/// stream, so the output is a pure function of `(n, seed, p)`.
pub fn random_invertible(n: usize, seed: u64, field: PrimeField) -> PrimeFieldMatrix {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    random_invertible_from(n, &mut rng, field)
}

pub(crate) fn random_invertible_from<R: RngCore>(n: usize, rng: &mut R, field: PrimeField) -> PrimeFieldMatrix {
    loop {
        let mut m = PrimeFieldMatrix::zeros(field, n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = field.reduce(rng.next_u64());
            }
        }
        if m.rank() == n {
            return m;
        }
    }
}

/// Uniform-ish matrix with entries drawn from the stream (used by generators).
pub(crate) fn random_matrix_from<R: RngCore>(
    rows: usize,
    cols: usize,
    rng: &mut R,
    field: PrimeField,
) -> PrimeFieldMatrix {
    let mut m = PrimeFieldMatrix::zeros(field, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = field.reduce(rng.next_u64());
        }
    }
    m
}
