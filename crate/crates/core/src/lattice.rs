//! Lattice points, the skew deformation matrix, and box truncation windows.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real skew-symmetric `n x n` matrix of deformation angles.
///
/// Skew symmetry is exact: constructors either build it entry by entry from
/// the upper triangle or reject input that is not skew to the last bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SkewMatrix {
    pub fn zero(n: usize) -> Self {
        SkewMatrix {
            n,
            entries: vec![0.0; n * n],
        }
    }

    /// Two-dimensional matrix `[[0, t], [-t, 0]]`.
    pub fn planar(theta12: f64) -> Self {
        let mut m = Self::zero(2);
        m.set_upper(0, 1, theta12);
        m
    }

    /// The symplectic form `theta * [[0, 1_N], [-1_N, 0]]` in dimension `2N`.
    pub fn symplectic(theta: f64, half_dim: usize) -> Self {
        let mut m = Self::zero(2 * half_dim);
        for j in 0..half_dim {
            m.set_upper(j, half_dim + j, theta);
        }
        m
    }

    /// Build from strictly-upper-triangular entries listed row by row
    /// (`(0,1), (0,2), ..., (1,2), ...`).
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        let expected = n * n.saturating_sub(1) / 2;
        if upper.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: upper.len(),
            });
        }
        let mut m = Self::zero(n);
        let mut it = upper.iter();
        for j in 0..n {
            for k in (j + 1)..n {
                m.set_upper(j, k, *it.next().unwrap());
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty deformation matrix".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        for j in 0..n {
            if entries[j * n + j] != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "diagonal entry ({j},{j}) is nonzero"
                )));
            }
            for k in (j + 1)..n {
                if entries[j * n + k] != -entries[k * n + j] || !entries[j * n + k].is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "entries ({j},{k}) and ({k},{j}) are not exact negatives"
                    )));
                }
            }
        }
        Ok(SkewMatrix { n, entries })
    }

    fn set_upper(&mut self, j: usize, k: usize, value: f64) {
        self.entries[j * self.n + k] = value;
        self.entries[k * self.n + j] = -value;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[j * self.n + k]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// `r . Theta s`.
    pub fn pairing(&self, r: &LatticeIndex, s: &LatticeIndex) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.n {
            if r.0[j] == 0 {
                continue;
            }
            let row = &self.entries[j * self.n..(j + 1) * self.n];
            let mut inner = 0.0;
            for (k, &t) in row.iter().enumerate() {
                inner += t * s.0[k] as f64;
            }
            acc += r.0[j] as f64 * inner;
        }
        acc
    }

    /// `Theta s` as a real vector, for reuse across many left factors.
    pub fn apply(&self, s: &LatticeIndex) -> Vec<f64> {
        (0..self.n)
            .map(|j| {
                (0..self.n)
                    .map(|k| self.get(j, k) * s.0[k] as f64)
                    .sum()
            })
            .collect()
    }

    /// Entrywise map `theta_rs -> theta_rs / (k_r k_s)`; the integer product is
    /// formed first so that chained constructions round identically.
    pub fn scaled_down(&self, k: &[u64]) -> SkewMatrix {
        let mut m = SkewMatrix::zero(self.n);
        for r in 0..self.n {
            for s in (r + 1)..self.n {
                m.set_upper(r, s, self.get(r, s) / (k[r] * k[s]) as f64);
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&t| t == 0.0)
    }
}

/// A point of the integer lattice `Z^n`. Ordering is lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeIndex(pub Vec<i64>);

impl LatticeIndex {
    pub fn new(components: Vec<i64>) -> Self {
        LatticeIndex(components)
    }

    pub fn zero(n: usize) -> Self {
        LatticeIndex(vec![0; n])
    }

    /// Standard basis vector `e_axis` (zero-based axis).
    pub fn unit(n: usize, axis: usize) -> Self {
        let mut v = vec![0; n];
        v[axis] = 1;
        LatticeIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt()
    }

    pub fn scale_by(&self, k: &[u64]) -> LatticeIndex {
        LatticeIndex(self.0.iter().zip(k).map(|(&c, &m)| c * m as i64).collect())
    }
}

impl Add for &LatticeIndex {
    type Output = LatticeIndex;
    fn add(self, rhs: &LatticeIndex) -> LatticeIndex {
        LatticeIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeIndex {
    type Output = LatticeIndex;
    fn sub(self, rhs: &LatticeIndex) -> LatticeIndex {
        LatticeIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeIndex {
    type Output = LatticeIndex;
    fn neg(self) -> LatticeIndex {
        LatticeIndex(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Box `{k : |k_j| <= radius}` in `Z^n`, enumerated lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationWindow {
    n: usize,
    radius: u32,
}

impl TruncationWindow {
    pub fn new(n: usize, radius: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if radius == 0 {
            return Err(Error::InvalidParameter("window radius must be positive".into()));
        }
        Ok(TruncationWindow { n, radius })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    fn side(&self) -> usize {
        2 * self.radius as usize + 1
    }

    /// Number of lattice points, `(2R+1)^n`.
    pub fn len(&self) -> usize {
        self.side().pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: &LatticeIndex) -> bool {
        k.dim() == self.n && k.max_abs() <= self.radius as i64
    }

    /// Position of `k` in the lexicographic enumeration.
    pub fn index_of(&self, k: &LatticeIndex) -> Option<usize> {
        if !self.contains(k) {
            return None;
        }
        let r = self.radius as i64;
        let side = self.side();
        Some(
            k.0.iter()
                .fold(0usize, |acc, &c| acc * side + (c + r) as usize),
        )
    }

    pub fn point(&self, mut index: usize) -> LatticeIndex {
        let side = self.side();
        let mut comps = vec![0i64; self.n];
        for slot in comps.iter_mut().rev() {
            *slot = (index % side) as i64 - self.radius as i64;
            index /= side;
        }
        LatticeIndex(comps)
    }

    pub fn points(&self) -> Vec<LatticeIndex> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}
