//! Slow reference implementations. Nothing in here calls into the optimized
//! kernels it is compared against.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::covering::{CoveringSpec, MAX_GROUP_ORDER};
use crate::error::{Error, Result};
use crate::lattice::LatticeIndex;
use crate::torus::TorusElement;

/// Literal double loop over support pairs with the phase
/// `exp(-i pi sum_{j,k} r_j theta_jk s_k)`.
pub fn dense_star_oracle(a: &TorusElement, b: &TorusElement) -> Result<TorusElement> {
    if a.theta() != b.theta() {
        return Err(Error::ThetaMismatch);
    }
    let theta = a.theta();
    let n = theta.dim();
    let mut out: BTreeMap<LatticeIndex, Complex64> = BTreeMap::new();
    for (r, ar) in a.coeffs() {
        for (s, bs) in b.coeffs() {
            let mut form = 0.0;
            for j in 0..n {
                for k in 0..n {
                    form += r.0[j] as f64 * theta.get(j, k) * s.0[k] as f64;
                }
            }
            let p = LatticeIndex((0..n).map(|j| r.0[j] + s.0[j]).collect());
            let ph = Complex64::new((-PI * form).cos(), (-PI * form).sin());
            *out.entry(p).or_insert(Complex64::new(0.0, 0.0)) += ar * bs * ph;
        }
    }
    TorusElement::from_coeffs(theta, out)
}

/// Samples of a function on the uniform grid `{i / size}^n` of the torus,
/// stored row-major (last axis fastest).
#[derive(Debug, Clone)]
pub struct GridFunction {
    n: usize,
    size: usize,
    samples: Vec<Complex64>,
}

impl GridFunction {
    /// `f(x) = sum_p a(p) exp(2 pi i x . p)`. The grid must resolve every
    /// frequency of `a`.
    pub fn synthesize(a: &TorusElement, size: usize) -> Result<Self> {
        let n = a.dim();
        let need = 2 * a.radius() as usize + 1;
        if size < need {
            return Err(Error::InvalidParameter(format!(
                "grid of {size} points per axis cannot resolve frequency {}",
                a.radius()
            )));
        }
        let total = size.pow(n as u32);
        let mut samples = vec![Complex64::new(0.0, 0.0); total];
        for (i, slot) in samples.iter_mut().enumerate() {
            let x = grid_point(i, n, size);
            for (p, c) in a.coeffs() {
                let mut turns = 0.0;
                for (xj, pj) in x.iter().zip(&p.0) {
                    turns += *xj as f64 * *pj as f64 / size as f64;
                }
                let angle = 2.0 * PI * turns;
                *slot += c * Complex64::new(angle.cos(), angle.sin());
            }
        }
        Ok(GridFunction { n, size, samples })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn pointwise_mul(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.n != other.n || self.size != other.size {
            return Err(Error::DimensionMismatch {
                expected: self.samples.len(),
                got: other.samples.len(),
            });
        }
        Ok(GridFunction {
            n: self.n,
            size: self.size,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// Fourier coefficients `(1/size^n) sum_x f(x) exp(-2 pi i x . k)` for
    /// `|k|_inf <= radius`.
    pub fn coefficients(&self, radius: i64) -> Vec<(LatticeIndex, Complex64)> {
        let n = self.n;
        let side = (2 * radius + 1) as usize;
        let count = side.pow(n as u32);
        let norm = 1.0 / self.samples.len() as f64;
        let mut out = Vec::with_capacity(count);
        for t in 0..count {
            let mut rem = t;
            let mut k = vec![0i64; n];
            for j in (0..n).rev() {
                k[j] = (rem % side) as i64 - radius;
                rem /= side;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, f) in self.samples.iter().enumerate() {
                let x = grid_point(i, n, self.size);
                let mut turns = 0.0;
                for j in 0..n {
                    turns += x[j] as f64 * k[j] as f64 / self.size as f64;
                }
                let angle = -2.0 * PI * turns;
                acc += f * Complex64::new(angle.cos(), angle.sin());
            }
            out.push((LatticeIndex(k), acc * norm));
        }
        out
    }
}

fn grid_point(mut i: usize, n: usize, size: usize) -> Vec<usize> {
    let mut x = vec![0; n];
    for j in (0..n).rev() {
        x[j] = i % size;
        i /= size;
    }
    x
}

/// Commutative product through function values: synthesize both operands on
/// the grid, multiply pointwise, transform back.
pub fn sample_and_multiply(
    a: &TorusElement,
    b: &TorusElement,
    grid_size: usize,
) -> Result<TorusElement> {
    if !a.theta().is_zero() || !b.theta().is_zero() {
        return Err(Error::InvalidParameter(
            "grid oracle applies to the undeformed torus only".into(),
        ));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let radius = a.radius() + b.radius();
    if grid_size < 2 * radius as usize + 1 {
        return Err(Error::InvalidParameter(format!(
            "grid of {grid_size} points aliases product frequency {radius}"
        )));
    }
    let fa = GridFunction::synthesize(a, grid_size)?;
    let fb = GridFunction::synthesize(b, grid_size)?;
    let prod = fa.pointwise_mul(&fb)?;
    TorusElement::from_coeffs(a.theta(), prod.coefficients(radius))
}

/// `(1/|G|) sum_{g in G} g(a)`, summing every deck transformation literally.
pub fn brute_group_average(a: &TorusElement, spec: &CoveringSpec) -> Result<TorusElement> {
    let k = spec.multiplicities();
    let order: u64 = k.iter().product();
    if order > MAX_GROUP_ORDER {
        return Err(Error::GroupTooLarge {
            order,
            limit: MAX_GROUP_ORDER,
        });
    }
    let n = k.len();
    let mut acc: BTreeMap<LatticeIndex, Complex64> = BTreeMap::new();
    for t in 0..order {
        let mut rem = t;
        let mut g = vec![0u64; n];
        for j in (0..n).rev() {
            g[j] = rem % k[j];
            rem /= k[j];
        }
        for (l, c) in a.coeffs() {
            let angle: f64 = (0..n)
                .map(|j| 2.0 * PI * g[j] as f64 * l.0[j] as f64 / k[j] as f64)
                .sum();
            *acc.entry(l.clone()).or_insert(Complex64::new(0.0, 0.0)) +=
                c * Complex64::new(angle.cos(), angle.sin());
        }
    }
    let scale = 1.0 / order as f64;
    TorusElement::from_coeffs(a.theta(), acc.into_iter().map(|(l, c)| (l, c * scale)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SkewMatrix;

    fn idx(v: &[i64]) -> LatticeIndex {
        LatticeIndex::new(v.to_vec())
    }

    #[test]
    fn oracle_unitary_phase() {
        let t = SkewMatrix::from_upper(3, &[0.3, -0.2, 0.9]).unwrap();
        let k = idx(&[1, 2, -1]);
        let p = idx(&[0, -1, 3]);
        let uk = TorusElement::unitary(k.clone(), &t).unwrap();
        let up = TorusElement::unitary(p.clone(), &t).unwrap();
        let prod = dense_star_oracle(&uk, &up).unwrap();
        let expect = Complex64::from_polar(1.0, -PI * t.pairing(&k, &p));
        assert_eq!(prod.support_len(), 1);
        assert!((prod.coeff(&(&k + &p)) - expect).norm() < 1e-15);
    }

    #[test]
    fn grid_exponentials_multiply() {
        let t = SkewMatrix::zero(2);
        let a = TorusElement::unitary(idx(&[2, -1]), &t).unwrap();
        let b = TorusElement::unitary(idx(&[-1, 3]), &t).unwrap();
        let prod = sample_and_multiply(&a, &b, 16).unwrap();
        let expect = TorusElement::unitary(idx(&[1, 2]), &t).unwrap();
        assert!(prod.max_diff(&expect) < 1e-13);
    }

    #[test]
    fn grid_constant_multiplication() {
        let t = SkewMatrix::zero(2);
        let a = crate::torus::random_sparse_element(&t, 3, 10, 4);
        let two = TorusElement::identity(&t).scale(Complex64::new(2.0, 0.0));
        let prod = sample_and_multiply(&two, &a, 16).unwrap();
        assert!(prod.max_diff(&a.scale(Complex64::new(2.0, 0.0))) < 1e-12);
    }

    #[test]
    fn grid_rejects_aliasing_and_deformation() {
        let t = SkewMatrix::zero(2);
        let a = TorusElement::unitary(idx(&[4, 0]), &t).unwrap();
        assert!(sample_and_multiply(&a, &a, 16).is_err());
        let d = TorusElement::identity(&SkewMatrix::planar(0.1));
        assert!(sample_and_multiply(&d, &d, 16).is_err());
    }

    #[test]
    fn group_average_examples() {
        let s = CoveringSpec::new(&SkewMatrix::planar(0.5), &[2, 1]).unwrap();
        let u = TorusElement::unitary(idx(&[1, 0]), s.cover_theta()).unwrap();
        assert!(brute_group_average(&u, &s).unwrap().max_abs() < 1e-15);
        let trivial = CoveringSpec::new(&SkewMatrix::planar(0.5), &[1, 1]).unwrap();
        let w = crate::lattice::TruncationWindow::new(2, 2).unwrap();
        let a = crate::torus::random_element(trivial.cover_theta(), &w, 1.0, 2).unwrap();
        assert_eq!(brute_group_average(&a, &trivial).unwrap(), a);
        let huge = CoveringSpec::new(&SkewMatrix::zero(2), &[200, 200]).unwrap();
        assert!(brute_group_average(&a.with_theta(huge.cover_theta()).unwrap(), &huge).is_err());
    }
}
