//! Hermitian Clifford generators `gamma^1..gamma^n` of size `2^floor(n/2)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// `gamma^i gamma^j + gamma^j gamma^i = 2 delta^{ij} I`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    n: usize,
    matrices: Vec<CMatrix>,
}

fn pauli(which: u8) -> CMatrix {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match which {
        1 => CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        2 => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        3 => CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
        _ => unreachable!(),
    }
}

impl GammaSet {
    /// Recursive doubling: from the set for `2k-1` axes, the set for `2k`
    /// is `{sigma_1 (x) gamma_i} + {sigma_2 (x) I}`, and `2k+1` appends
    /// `sigma_3 (x) I`. Starts from `gamma^1 = [1]`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Clifford dimension must be positive");
        let mut set = vec![CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0))];
        while set.len() < n {
            let size = set[0].nrows();
            if set.len() % 2 == 1 {
                let id = CMatrix::identity(size, size);
                let s1 = pauli(1);
                let mut next: Vec<CMatrix> = set.iter().map(|g| s1.kronecker(g)).collect();
                next.push(pauli(2).kronecker(&id));
                set = next;
            } else {
                let id = CMatrix::identity(size / 2, size / 2);
                set.push(pauli(3).kronecker(&id));
            }
        }
        debug_assert_eq!(set.len(), n);
        GammaSet { n, matrices: set }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn spinor_dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn gamma(&self, axis: usize) -> &CMatrix {
        &self.matrices[axis]
    }

    /// `sum_mu v_mu gamma^mu`.
    pub fn slash(&self, v: &[f64]) -> CMatrix {
        let m = self.spinor_dim();
        let mut out = CMatrix::zeros(m, m);
        for (g, &c) in self.matrices.iter().zip(v) {
            if c != 0.0 {
                out += g * Complex64::new(c, 0.0);
            }
        }
        out
    }

    /// Max entrywise residual of the Clifford relations.
    pub fn clifford_residual(&self) -> f64 {
        let m = self.spinor_dim();
        let id = CMatrix::identity(m, m);
        let mut worst: f64 = 0.0;
        for (i, gi) in self.matrices.iter().enumerate() {
            for (j, gj) in self.matrices.iter().enumerate() {
                let mut r = gi * gj + gj * gi;
                if i == j {
                    r -= &id * Complex64::new(2.0, 0.0);
                }
                worst = worst.max(max_abs(&r));
            }
        }
        worst
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.matrices
            .iter()
            .map(|g| max_abs(&(g - g.adjoint())))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
