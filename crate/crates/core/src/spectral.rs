//! Finite truncations of the torus spectral triple: the GNS representation,
//! the Dirac operator, commutators, the iterated representations `pi^s` and
//! Dirac spectra.
//!
//! Operators act on `l^2(window) (x) C^m`, possibly repeated `2^s` times.
//! Basis order is `(copy, lattice point, spinor component)` with the copy
//! index outermost and lattice points in lexicographic window order.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{max_abs, CMatrix, GammaSet};
use crate::error::{Error, Result};
use crate::lattice::{LatticeIndex, SkewMatrix, TruncationWindow};
use crate::torus::TorusElement;

/// Degeneracy tolerance for multiplicity reports.
pub const MULTIPLICITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    window: TruncationWindow,
    spinor_dim: usize,
    copies: usize,
    matrix: CMatrix,
}

impl TruncatedOperator {
    pub fn new(
        window: TruncationWindow,
        spinor_dim: usize,
        copies: usize,
        matrix: CMatrix,
    ) -> Result<Self> {
        let dim = window.len() * spinor_dim * copies;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(TruncatedOperator {
            window,
            spinor_dim,
            copies,
            matrix,
        })
    }

    pub fn window(&self) -> &TruncationWindow {
        &self.window
    }

    pub fn spinor_dim(&self) -> usize {
        self.spinor_dim
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `A (x) I_m`, lifting a scalar-sector operator to spinors.
    pub fn tensor_spinors(&self, m: usize) -> Result<Self> {
        if self.spinor_dim != 1 || self.copies != 1 {
            return Err(Error::InvalidParameter(
                "spinor lift expects a scalar-sector operator".into(),
            ));
        }
        Self::new(
            self.window,
            m,
            1,
            self.matrix.kronecker(&CMatrix::identity(m, m)),
        )
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    /// Column indices whose lattice point `p` satisfies `|p|_inf + margin <= R`,
    /// i.e. every shift of `p` by a vector of sup-norm at most `margin` stays
    /// in the window.
    pub fn interior_columns(&self, margin: i64) -> Vec<usize> {
        let per_copy = self.window.len() * self.spinor_dim;
        let r = self.window.radius() as i64;
        let mut cols = Vec::new();
        for copy in 0..self.copies {
            for (pi, p) in self.window.points().iter().enumerate() {
                if p.max_abs() + margin <= r {
                    for s in 0..self.spinor_dim {
                        cols.push(copy * per_copy + pi * self.spinor_dim + s);
                    }
                }
            }
        }
        cols
    }

    /// Max entrywise difference restricted to the given columns.
    pub fn max_diff_on_columns(&self, other: &TruncatedOperator, cols: &[usize]) -> f64 {
        let mut worst: f64 = 0.0;
        for &c in cols {
            let d = self.matrix.column(c) - other.matrix.column(c);
            worst = d.iter().map(|z| z.norm()).fold(worst, f64::max);
        }
        worst
    }

    /// Spectral norm of the submatrix formed by the given columns.
    pub fn norm_on_columns(&self, cols: &[usize]) -> f64 {
        let sub = self.matrix.select_columns(cols);
        spectral_norm(&sub)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn to_json(&self) -> OperatorJson {
        OperatorJson {
            dim: self.dim(),
            rows: self
                .matrix
                .row_iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

/// Wire form of a dense operator.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OperatorJson {
    pub dim: usize,
    pub rows: Vec<Vec<[f64; 2]>>,
}

pub(crate) fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

fn check_window(theta: &SkewMatrix, window: &TruncationWindow) -> Result<()> {
    if theta.dim() != window.dim() {
        return Err(Error::DimensionMismatch {
            expected: theta.dim(),
            got: window.dim(),
        });
    }
    Ok(())
}

/// GNS representation on the truncated `l^2(Z^n)`:
/// entry `(q, p) = a(q - p) exp(-i pi (q - p) . Theta p)`. Modes leaving the
/// window are dropped.
pub fn represent(a: &TorusElement, window: &TruncationWindow) -> Result<TruncatedOperator> {
    check_window(a.theta(), window)?;
    let dim = window.len();
    let mut m = CMatrix::zeros(dim, dim);
    for (col, p) in window.points().iter().enumerate() {
        let theta_p = a.theta().apply(p);
        for (k, c) in a.coeffs() {
            let q = k + p;
            if let Some(row) = window.index_of(&q) {
                let dot: f64 = k.0.iter().zip(&theta_p).map(|(&x, y)| x as f64 * y).sum();
                m[(row, col)] += c * Complex64::from_polar(1.0, -PI * dot);
            }
        }
    }
    TruncatedOperator::new(*window, 1, 1, m)
}

/// Block-diagonal operator with a given `m x m` block at each window point.
/// The block list is repeated over `copies`.
#[derive(Debug, Clone)]
pub struct BlockDiagonal {
    window: TruncationWindow,
    blocks: Vec<CMatrix>,
}

impl BlockDiagonal {
    pub fn from_fn(
        window: TruncationWindow,
        mut block: impl FnMut(&LatticeIndex) -> CMatrix,
    ) -> Self {
        let blocks = window.points().iter().map(&mut block).collect();
        BlockDiagonal { window, blocks }
    }

    pub fn block(&self, point: usize) -> &CMatrix {
        &self.blocks[point]
    }

    pub fn block_dim(&self) -> usize {
        self.blocks[0].nrows()
    }

    pub fn to_operator(&self, copies: usize) -> TruncatedOperator {
        let m = self.block_dim();
        let per_copy = self.blocks.len() * m;
        let mut out = CMatrix::zeros(per_copy * copies, per_copy * copies);
        for c in 0..copies {
            for (i, b) in self.blocks.iter().enumerate() {
                let off = c * per_copy + i * m;
                out.view_mut((off, off), (m, m)).copy_from(b);
            }
        }
        TruncatedOperator::new(self.window, m, copies, out).expect("consistent block layout")
    }

    /// `D X - X D` with `D` acting diagonally over all copies of `x`.
    pub fn commutator(&self, x: &TruncatedOperator) -> Result<TruncatedOperator> {
        let m = self.block_dim();
        if x.spinor_dim != m || x.window != self.window {
            return Err(Error::DimensionMismatch {
                expected: self.window.len() * m,
                got: x.window.len() * x.spinor_dim,
            });
        }
        let dim = x.dim();
        let nblocks = dim / m;
        let npts = self.blocks.len();
        let xm = &x.matrix;
        let mut out = CMatrix::zeros(dim, dim);
        // left multiplication, block row by block row
        for bi in 0..nblocks {
            let d = &self.blocks[bi % npts];
            let rows = xm.rows(bi * m, m);
            let prod = d * rows;
            out.rows_mut(bi * m, m).copy_from(&prod);
        }
        // right multiplication, block column by block column
        for bj in 0..nblocks {
            let d = &self.blocks[bj % npts];
            let cols = xm.columns(bj * m, m);
            let prod = cols * d;
            let mut target = out.columns_mut(bj * m, m);
            target -= prod;
        }
        TruncatedOperator::new(x.window, m, x.copies, out)
    }

    /// Sorted eigenvalues, computed block by block with a dense Hermitian
    /// solver.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .blocks
            .iter()
            .flat_map(hermitian_eigenvalues)
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `D = sum_mu delta_mu (x) gamma^mu`: block `sum_mu k_mu gamma^mu` at `k`.
/// Does not depend on the entries of `theta`.
pub fn dirac_blocks(theta: &SkewMatrix, window: &TruncationWindow) -> Result<BlockDiagonal> {
    check_window(theta, window)?;
    let gammas = GammaSet::new(theta.dim());
    Ok(BlockDiagonal::from_fn(*window, |k| {
        let v: Vec<f64> = k.0.iter().map(|&c| c as f64).collect();
        gammas.slash(&v)
    }))
}

pub fn dirac_matrix(theta: &SkewMatrix, window: &TruncationWindow) -> Result<TruncatedOperator> {
    Ok(dirac_blocks(theta, window)?.to_operator(1))
}

/// `[D, pi(a) (x) 1]` on the truncated space, formed by literal matrix
/// products.
pub fn dirac_commutator(a: &TorusElement, window: &TruncationWindow) -> Result<TruncatedOperator> {
    let d = dirac_blocks(a.theta(), window)?;
    let m = d.block_dim();
    let pa = represent(a, window)?.tensor_spinors(m)?;
    d.commutator(&pa)
}

/// `sum_mu pi(delta_mu a) (x) gamma^mu`, the form the commutator takes away
/// from the window boundary.
pub fn derivative_form(a: &TorusElement, window: &TruncationWindow) -> Result<TruncatedOperator> {
    let gammas = GammaSet::new(a.dim());
    let m = gammas.spinor_dim();
    let dim = window.len() * m;
    let mut out = CMatrix::zeros(dim, dim);
    for (mu, g) in gammas.matrices().iter().enumerate() {
        let rep = represent(&a.delta(mu)?, window)?;
        out += rep.matrix.kronecker(g);
    }
    TruncatedOperator::new(*window, m, 1, out)
}

/// Iterated representation: `pi^0 = pi`, and
/// `pi^{s+1}(a) = [[pi^s(a), 0], [[D, pi^s(a)], pi^s(a)]]` with `D` acting
/// diagonally. For `s >= 1` the scalar representation is lifted to spinors.
pub fn pi_s(a: &TorusElement, s: u32, window: &TruncationWindow) -> Result<TruncatedOperator> {
    let base = represent(a, window)?;
    if s == 0 {
        return Ok(base);
    }
    let d = dirac_blocks(a.theta(), window)?;
    let mut cur = base.tensor_spinors(d.block_dim())?;
    for _ in 0..s {
        let comm = d.commutator(&cur)?;
        let h = cur.dim();
        let mut next = CMatrix::zeros(2 * h, 2 * h);
        next.view_mut((0, 0), (h, h)).copy_from(&cur.matrix);
        next.view_mut((h, 0), (h, h)).copy_from(&comm.matrix);
        next.view_mut((h, h), (h, h)).copy_from(&cur.matrix);
        cur = TruncatedOperator::new(cur.window, cur.spinor_dim, cur.copies * 2, next)?;
    }
    Ok(cur)
}

/// `||a||_s = ||pi^s(a)||` on the truncated space.
pub fn seminorm_s(a: &TorusElement, s: u32, window: &TruncationWindow) -> Result<f64> {
    Ok(pi_s(a, s, window)?.spectral_norm())
}

/// Sorted Dirac eigenvalues for a window.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub window: TruncationWindow,
    pub theta: SkewMatrix,
}

impl SpectrumReport {
    /// Distinct eigenvalues with multiplicities, merging neighbours closer than
    /// [`MULTIPLICITY_TOL`].
    pub fn multiplicities(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &e in &self.eigenvalues {
            match out.last_mut() {
                Some((v, count)) if (e - *v).abs() <= MULTIPLICITY_TOL => *count += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }

    pub fn to_json(&self) -> SpectrumJson {
        SpectrumJson {
            eigenvalues: self.eigenvalues.clone(),
            window: self.window.radius(),
            n: self.window.dim(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpectrumJson {
    pub eigenvalues: Vec<f64>,
    pub window: u32,
    pub n: usize,
}

/// Largest assembled operator dimension the spectrum commands accept.
pub const SPECTRUM_CAP: usize = 20_000;

/// `(2R+1)^n * spinor_dim`, or `None` on overflow.
pub fn truncated_dim(n: usize, radius: u64) -> Option<usize> {
    let side = usize::try_from(radius).ok()?.checked_mul(2)?.checked_add(1)?;
    let mut dim = 1usize << (n / 2);
    for _ in 0..n {
        dim = dim.checked_mul(side)?;
    }
    Some(dim)
}

/// Rejects windows whose Dirac matrix would exceed [`SPECTRUM_CAP`].
pub fn check_spectrum_size(n: usize, radius: u64) -> Result<()> {
    match truncated_dim(n, radius) {
        Some(dim) if dim <= SPECTRUM_CAP => Ok(()),
        Some(dim) => Err(Error::SizeCap { dim, cap: SPECTRUM_CAP }),
        None => Err(Error::SizeCap { dim: usize::MAX, cap: SPECTRUM_CAP }),
    }
}

pub fn dirac_spectrum(theta: &SkewMatrix, window: &TruncationWindow) -> Result<SpectrumReport> {
    let blocks = dirac_blocks(theta, window)?;
    Ok(SpectrumReport {
        eigenvalues: blocks.eigenvalues(),
        window: *window,
        theta: theta.clone(),
    })
}

/// Dense reference: every eigenvalue of the assembled Dirac matrix.
pub fn dirac_spectrum_dense(theta: &SkewMatrix, window: &TruncationWindow) -> Result<Vec<f64>> {
    Ok(hermitian_eigenvalues(dirac_matrix(theta, window)?.matrix()))
}
