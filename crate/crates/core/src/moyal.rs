//! Moyal plane in the `f_mn` matrix basis.
//!
//! An element of `S(R^2_theta)` is a rapidly decreasing matrix `c_mn` and the
//! twisted product is the matrix product. Here matrices are truncated to
//! `M x M`. Banded operations (ladder multiplications, derivations) spoil the
//! last rows and columns; `margin` counts how many are no longer trusted.
//!
//! Ladder and derivation identities use the `theta = 2` normalization.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::CMatrix;
use crate::error::{Error, Result};
use crate::spectral::spectral_norm;

/// Normalization under which the ladder relations hold with integer
/// coefficients.
pub const LADDER_THETA: f64 = 2.0;

/// Truncated Moyal element; `N > 1` is kept as a pure tensor of `N` factors.
#[derive(Debug, Clone, PartialEq)]
pub struct MoyalMatrix {
    theta: f64,
    order: usize,
    factors: Vec<CMatrix>,
    margin: usize,
}

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_nan() || theta <= 0.0 || !theta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "deformation parameter {theta} must be positive"
        )));
    }
    Ok(())
}

impl MoyalMatrix {
    pub fn new(theta: f64, coeffs: CMatrix) -> Result<Self> {
        check_theta(theta)?;
        if coeffs.nrows() != coeffs.ncols() || coeffs.nrows() == 0 {
            return Err(Error::InvalidParameter(format!(
                "coefficient matrix is {}x{}, expected square",
                coeffs.nrows(),
                coeffs.ncols()
            )));
        }
        Ok(MoyalMatrix {
            theta,
            order: coeffs.nrows(),
            factors: vec![coeffs],
            margin: 0,
        })
    }

    pub fn zero(theta: f64, order: usize) -> Result<Self> {
        Self::new(theta, CMatrix::zeros(order, order))
    }

    /// The basis element `f_mn`, i.e. the matrix unit `E_mn`.
    pub fn unit(theta: f64, order: usize, m: usize, n: usize) -> Result<Self> {
        if m >= order || n >= order {
            return Err(Error::InvalidParameter(format!(
                "index ({m},{n}) outside truncation {order}"
            )));
        }
        let mut c = CMatrix::zeros(order, order);
        c[(m, n)] = Complex64::new(1.0, 0.0);
        Self::new(theta, c)
    }

    /// `sum_m f_mm`.
    pub fn identity(theta: f64, order: usize) -> Result<Self> {
        Self::new(theta, CMatrix::identity(order, order))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn half_dim(&self) -> usize {
        self.factors.len()
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn with_margin(mut self, margin: usize) -> Self {
        self.margin = margin;
        self
    }

    pub fn factors(&self) -> &[CMatrix] {
        &self.factors
    }

    /// Coefficient matrix of an `N = 1` element.
    pub fn coeffs(&self) -> &CMatrix {
        &self.factors[0]
    }

    /// Full coefficient tensor as an `M^N x M^N` matrix.
    pub fn materialize(&self) -> CMatrix {
        let mut it = self.factors.iter();
        let first = it.next().unwrap().clone();
        it.fold(first, |acc, f| acc.kronecker(f))
    }

    fn check_compatible(&self, other: &MoyalMatrix) -> Result<()> {
        if self.theta != other.theta {
            return Err(Error::ThetaMismatch);
        }
        if self.order != other.order || self.half_dim() != other.half_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.order,
                got: other.order,
            });
        }
        Ok(())
    }

    /// Twisted product: the matrix product, factor by factor.
    pub fn product(&self, other: &MoyalMatrix) -> Result<MoyalMatrix> {
        self.check_compatible(other)?;
        Ok(MoyalMatrix {
            theta: self.theta,
            order: self.order,
            factors: self
                .factors
                .iter()
                .zip(&other.factors)
                .map(|(a, b)| a * b)
                .collect(),
            margin: self.margin.max(other.margin),
        })
    }

    pub fn add(&self, other: &MoyalMatrix) -> Result<MoyalMatrix> {
        self.check_compatible(other)?;
        if self.half_dim() != 1 {
            return Err(Error::InvalidParameter(
                "sums of pure tensors are not representable".into(),
            ));
        }
        Ok(MoyalMatrix {
            theta: self.theta,
            order: self.order,
            factors: vec![&self.factors[0] + &other.factors[0]],
            margin: self.margin.max(other.margin),
        })
    }

    /// Replace one factor by a new matrix, raising the margin by `extra`.
    fn map_factor(&self, factor: usize, extra: usize, f: impl FnOnce(&CMatrix) -> CMatrix) -> Result<Self> {
        if factor >= self.half_dim() {
            return Err(Error::InvalidParameter(format!(
                "factor {factor} out of range for N = {}",
                self.half_dim()
            )));
        }
        let mut out = self.clone();
        out.factors[factor] = f(&self.factors[factor]);
        out.margin += extra;
        Ok(out)
    }

    /// Max entrywise difference on the leading block that both margins trust.
    pub fn interior_diff(&self, other: &MoyalMatrix) -> f64 {
        let margin = self.margin.max(other.margin);
        let keep = self.order.saturating_sub(margin);
        self.factors
            .iter()
            .zip(&other.factors)
            .map(|(a, b)| {
                let d = a.view((0, 0), (keep, keep)) - b.view((0, 0), (keep, keep));
                d.iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Trace of the coefficient tensor.
    pub fn trace(&self) -> Complex64 {
        self.factors.iter().map(|f| f.trace()).product()
    }

    pub fn to_json(&self) -> MoyalJson {
        MoyalJson {
            theta: self.theta,
            order: self.order,
            half_dim: self.half_dim(),
            factors: self
                .factors
                .iter()
                .map(|f| {
                    f.row_iter()
                        .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(json: &MoyalJson) -> Result<Self> {
        check_theta(json.theta)?;
        if json.factors.len() != json.half_dim || json.half_dim == 0 {
            return Err(Error::Parse(format!(
                "expected {} factors, found {}",
                json.half_dim,
                json.factors.len()
            )));
        }
        let mut factors = Vec::with_capacity(json.half_dim);
        for rows in &json.factors {
            if rows.len() != json.order || rows.iter().any(|r| r.len() != json.order) {
                return Err(Error::Parse(format!(
                    "factor is not {0}x{0}",
                    json.order
                )));
            }
            factors.push(DMatrix::from_fn(json.order, json.order, |i, j| {
                let [re, im] = rows[i][j];
                Complex64::new(re, im)
            }));
        }
        Ok(MoyalMatrix {
            theta: json.theta,
            order: json.order,
            factors,
            margin: 0,
        })
    }
}

/// Wire form of a Moyal element.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MoyalJson {
    pub theta: f64,
    #[serde(rename = "M")]
    pub order: usize,
    #[serde(rename = "N")]
    pub half_dim: usize,
    pub factors: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Multipliers `a`, `a-bar`, `q`, `p`, `H` as truncated matrices.
///
/// Left multiplication by `a` realizes `a x f` and right multiplication
/// realizes `f x a`:
///
/// ```text
/// a x f_mn    = sqrt(2m)   f_{m-1,n}     f_mn x a    = sqrt(2n+2) f_{m,n+1}
/// abar x f_mn = sqrt(2m+2) f_{m+1,n}     f_mn x abar = sqrt(2n)   f_{m,n-1}
/// H x f_mn    = (2m+1) f_mn
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct LadderSet {
    pub a: CMatrix,
    pub abar: CMatrix,
    pub q: CMatrix,
    pub p: CMatrix,
    pub h: CMatrix,
}

impl LadderSet {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidParameter(
                "ladder operators need truncation order at least 2".into(),
            ));
        }
        let mut a = CMatrix::zeros(order, order);
        for m in 1..order {
            a[(m - 1, m)] = Complex64::new((2.0 * m as f64).sqrt(), 0.0);
        }
        let abar = a.transpose();
        let r2 = std::f64::consts::SQRT_2;
        let q = (&a + &abar) / Complex64::new(r2, 0.0);
        let p = (&a - &abar) / Complex64::new(0.0, r2);
        let h = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(order, |m, _| {
            Complex64::new(2.0 * m as f64 + 1.0, 0.0)
        }));
        Ok(LadderSet { a, abar, q, p, h })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// `op x f` on one factor; margin grows by one.
    pub fn left(&self, op: &CMatrix, x: &MoyalMatrix, factor: usize) -> Result<MoyalMatrix> {
        self.check(x)?;
        x.map_factor(factor, 1, |f| op * f)
    }

    /// `f x op` on one factor; margin grows by one.
    pub fn right(&self, op: &CMatrix, x: &MoyalMatrix, factor: usize) -> Result<MoyalMatrix> {
        self.check(x)?;
        x.map_factor(factor, 1, |f| f * op)
    }

    fn check(&self, x: &MoyalMatrix) -> Result<()> {
        if x.order() != self.order() {
            return Err(Error::DimensionMismatch {
                expected: self.order(),
                got: x.order(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    P,
    Q,
}

/// `d/dp f = -i (q x f - f x q)`, `d/dq f = i (p x f - f x p)` on the
/// given tensor factor.
pub fn moyal_partial_factor(x: &MoyalMatrix, factor: usize, axis: Axis) -> Result<MoyalMatrix> {
    if x.theta() != LADDER_THETA {
        return Err(Error::InvalidParameter(format!(
            "derivations are implemented for theta = {LADDER_THETA} only"
        )));
    }
    let ladder = LadderSet::new(x.order())?;
    let (op, scale) = match axis {
        Axis::P => (&ladder.q, Complex64::new(0.0, -1.0)),
        Axis::Q => (&ladder.p, Complex64::new(0.0, 1.0)),
    };
    x.map_factor(factor, 1, |f| (op * f - f * op) * scale)
}

pub fn moyal_partial(x: &MoyalMatrix, axis: Axis) -> Result<MoyalMatrix> {
    if x.half_dim() != 1 {
        return Err(Error::InvalidParameter(
            "use moyal_partial_factor for N > 1".into(),
        ));
    }
    moyal_partial_factor(x, 0, axis)
}

/// `r_k(c) = (sum theta^{2k} (m+1/2)^k (n+1/2)^k |c_mn|^2)^{1/2}`; for a pure
/// tensor the weights multiply across factors, so the seminorm does too.
pub fn seminorm_rk(x: &MoyalMatrix, k: u32) -> f64 {
    x.factors()
        .iter()
        .map(|c| {
            let mut acc = 0.0;
            for m in 0..c.nrows() {
                for n in 0..c.ncols() {
                    let w = x.theta().powi(2 * k as i32)
                        * (m as f64 + 0.5).powi(k as i32)
                        * (n as f64 + 0.5).powi(k as i32);
                    acc += w * c[(m, n)].norm_sqr();
                }
            }
            acc.sqrt()
        })
        .product()
}

/// `(Frobenius, spectral)` norms of the coefficient tensor.
pub fn norm_pair(x: &MoyalMatrix) -> (f64, f64) {
    let c = x.materialize();
    (c.norm(), spectral_norm(&c))
}

/// Pure tensor of `N = 1` factors.
pub fn tensor_combine(factors: &[MoyalMatrix]) -> Result<MoyalMatrix> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidParameter("no factors to combine".into()))?;
    for f in factors {
        if f.half_dim() != 1 {
            return Err(Error::InvalidParameter(
                "tensor factors must be N = 1 elements".into(),
            ));
        }
        first.check_compatible(f)?;
    }
    Ok(MoyalMatrix {
        theta: first.theta,
        order: first.order,
        factors: factors.iter().map(|f| f.factors[0].clone()).collect(),
        margin: factors.iter().map(|f| f.margin).max().unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_products() {
        let f01 = MoyalMatrix::unit(2.0, 4, 0, 1).unwrap();
        let f11 = MoyalMatrix::unit(2.0, 4, 1, 1).unwrap();
        assert_eq!(f01.product(&f11).unwrap(), f01);
        assert!(MoyalMatrix::unit(2.0, 4, 4, 0).is_err());
    }

    #[test]
    fn mismatches_rejected() {
        let x = MoyalMatrix::identity(2.0, 4).unwrap();
        let y = MoyalMatrix::identity(1.0, 4).unwrap();
        let z = MoyalMatrix::identity(2.0, 5).unwrap();
        assert!(matches!(x.product(&y), Err(Error::ThetaMismatch)));
        assert!(x.product(&z).is_err());
        assert!(MoyalMatrix::identity(-1.0, 3).is_err());
        assert!(MoyalMatrix::new(2.0, CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn ladder_examples() {
        let l = LadderSet::new(6).unwrap();
        let f10 = MoyalMatrix::unit(2.0, 6, 1, 0).unwrap();
        let got = l.left(&l.a, &f10, 0).unwrap();
        let expect = MoyalMatrix::unit(2.0, 6, 0, 0).unwrap().coeffs() * c(2f64.sqrt(), 0.0);
        assert!((got.coeffs() - expect).norm() < 1e-15);
        let f00 = MoyalMatrix::unit(2.0, 6, 0, 0).unwrap();
        assert_eq!(l.left(&l.h, &f00, 0).unwrap().coeffs(), f00.coeffs());
        assert!(LadderSet::new(1).is_err());
    }

    #[test]
    fn ladder_invariants() {
        let l = LadderSet::new(8).unwrap();
        assert_eq!(l.abar, l.a.transpose());
        for i in 0..8 {
            for j in 0..8 {
                let expect = if j == i + 1 { (2.0 * j as f64).sqrt() } else { 0.0 };
                assert_eq!(l.a[(i, j)], c(expect, 0.0));
                let h = if i == j { 2.0 * i as f64 + 1.0 } else { 0.0 };
                assert_eq!(l.h[(i, j)], c(h, 0.0));
            }
        }
    }

    #[test]
    fn partial_of_vacuum() {
        // Q has ones at (0,1) and (1,0), so -i(Q E00 - E00 Q) = -i E10 + i E01.
        let f00 = MoyalMatrix::unit(2.0, 5, 0, 0).unwrap();
        let d = moyal_partial(&f00, Axis::P).unwrap();
        assert_eq!(d.margin(), 1);
        for i in 0..5 {
            for j in 0..5 {
                let expect = match (i, j) {
                    (1, 0) => c(0.0, -1.0),
                    (0, 1) => c(0.0, 1.0),
                    _ => c(0.0, 0.0),
                };
                assert!((d.coeffs()[(i, j)] - expect).norm() < 1e-15, "({i},{j})");
            }
        }
        assert!(moyal_partial(&MoyalMatrix::identity(1.0, 4).unwrap(), Axis::P).is_err());
    }

    #[test]
    fn constants_have_zero_interior_derivative() {
        let id = MoyalMatrix::identity(2.0, 10).unwrap();
        for axis in [Axis::P, Axis::Q] {
            let d = moyal_partial(&id, axis).unwrap();
            let zero = MoyalMatrix::zero(2.0, 10).unwrap();
            assert!(d.interior_diff(&zero) < 1e-14);
        }
    }

    #[test]
    fn seminorm_values() {
        let f00 = MoyalMatrix::unit(2.0, 4, 0, 0).unwrap();
        assert!((seminorm_rk(&f00, 0) - 1.0).abs() < 1e-14);
        assert!((seminorm_rk(&f00, 1) - 1.0).abs() < 1e-14);
        assert_eq!(seminorm_rk(&MoyalMatrix::zero(2.0, 4).unwrap(), 3), 0.0);
    }

    #[test]
    fn norm_pair_examples() {
        let f00 = MoyalMatrix::unit(2.0, 4, 0, 0).unwrap();
        let (fr, sp) = norm_pair(&f00);
        assert!((fr - 1.0).abs() < 1e-15 && (sp - 1.0).abs() < 1e-15);
        let d = MoyalMatrix::identity(2.0, 2).unwrap();
        let (fr, sp) = norm_pair(&d);
        assert!((fr - 2f64.sqrt()).abs() < 1e-15 && (sp - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tensor_of_projections_is_idempotent() {
        let f00 = MoyalMatrix::unit(2.0, 4, 0, 0).unwrap();
        let t = tensor_combine(&[f00.clone(), f00.clone()]).unwrap();
        assert_eq!(t.half_dim(), 2);
        assert_eq!(t.product(&t).unwrap(), t);
        assert_eq!(t.materialize().nrows(), 16);
        let other = MoyalMatrix::unit(1.0, 4, 0, 0).unwrap();
        assert!(tensor_combine(&[f00, other]).is_err());
        assert!(tensor_combine(&[]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let x = MoyalMatrix::unit(2.0, 3, 1, 2).unwrap();
        let t = tensor_combine(&[x.clone(), x]).unwrap();
        let j = t.to_json();
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"M\":3") && text.contains("\"N\":2"));
        assert_eq!(MoyalMatrix::from_json(&j).unwrap(), t);
    }
}
