//! Smooth noncommutative torus: finitely supported Fourier coefficient maps
//! on `Z^n` with the twisted convolution product.
//!
//! The single phase convention used throughout the crate is
//!
//! ```text
//! (a * b)(p) = sum_{r + s = p} a(r) b(s) exp(-i pi r . Theta s)
//! ```
//!
//! Commutation relations, the GNS action and covering phases are all derived
//! from [`TorusElement::star`]; nothing else hard-codes a phase.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeIndex, SkewMatrix, TruncationWindow};

/// Coefficients with modulus below this are not stored.
pub const DEFAULT_PRUNE: f64 = 1e-300;

/// Element of `C^inf(T^n_Theta)` with finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusElement {
    theta: SkewMatrix,
    coeffs: BTreeMap<LatticeIndex, Complex64>,
}

impl TorusElement {
    pub fn zero(theta: &SkewMatrix) -> Self {
        TorusElement {
            theta: theta.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn identity(theta: &SkewMatrix) -> Self {
        let mut e = Self::zero(theta);
        e.coeffs
            .insert(LatticeIndex::zero(theta.dim()), Complex64::new(1.0, 0.0));
        e
    }

    /// The basis unitary `U_k` with `U_k(p) = delta_{kp}`.
    pub fn unitary(k: LatticeIndex, theta: &SkewMatrix) -> Result<Self> {
        Self::monomial(k, Complex64::new(1.0, 0.0), theta)
    }

    pub fn monomial(k: LatticeIndex, c: Complex64, theta: &SkewMatrix) -> Result<Self> {
        Self::from_coeffs(theta, [(k, c)])
    }

    /// Generator `u_j` (zero-based axis).
    pub fn generator(axis: usize, theta: &SkewMatrix) -> Result<Self> {
        if axis >= theta.dim() {
            return Err(Error::AxisOutOfRange {
                axis,
                n: theta.dim(),
            });
        }
        Self::unitary(LatticeIndex::unit(theta.dim(), axis), theta)
    }

    /// Builds an element, summing repeated keys and pruning negligible values.
    pub fn from_coeffs<I>(theta: &SkewMatrix, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (LatticeIndex, Complex64)>,
    {
        let n = theta.dim();
        let mut map: BTreeMap<LatticeIndex, Complex64> = BTreeMap::new();
        for (k, c) in coeffs {
            if k.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: k.dim(),
                });
            }
            *map.entry(k).or_default() += c;
        }
        Ok(Self::from_map(theta.clone(), map, DEFAULT_PRUNE))
    }

    pub(crate) fn from_map(
        theta: SkewMatrix,
        mut coeffs: BTreeMap<LatticeIndex, Complex64>,
        prune: f64,
    ) -> Self {
        coeffs.retain(|_, c| c.norm() >= prune && c.norm() > 0.0);
        TorusElement { theta, coeffs }
    }

    pub fn theta(&self) -> &SkewMatrix {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    pub fn coeffs(&self) -> &BTreeMap<LatticeIndex, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, k: &LatticeIndex) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|k_j|` over the support.
    pub fn radius(&self) -> i64 {
        self.coeffs.keys().map(|k| k.max_abs()).max().unwrap_or(0)
    }

    /// Same coefficients, reinterpreted over another deformation matrix.
    pub fn with_theta(&self, theta: &SkewMatrix) -> Result<Self> {
        if theta.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: theta.dim(),
            });
        }
        Ok(TorusElement {
            theta: theta.clone(),
            coeffs: self.coeffs.clone(),
        })
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(&LatticeIndex, Complex64) -> Complex64) -> Self {
        let map = self.coeffs.iter().map(|(k, &c)| (k.clone(), f(k, c))).collect();
        Self::from_map(self.theta.clone(), map, DEFAULT_PRUNE)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_coeffs(|_, c| c * s)
    }

    pub fn add(&self, other: &TorusElement) -> Result<Self> {
        self.check_same_theta(other)?;
        let mut map = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            *map.entry(k.clone()).or_default() += c;
        }
        Ok(Self::from_map(self.theta.clone(), map, DEFAULT_PRUNE))
    }

    pub fn sub(&self, other: &TorusElement) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Coefficientwise sup-norm of `self - other`, ignoring the deformation.
    pub fn max_diff(&self, other: &TorusElement) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, c) in &self.coeffs {
            worst = worst.max((c - other.coeff(k)).norm());
        }
        for (k, c) in &other.coeffs {
            if !self.coeffs.contains_key(k) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `sum_p |a(p)|^2`.
    pub fn l2_norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub(crate) fn check_same_theta(&self, other: &TorusElement) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        if self.theta != other.theta {
            return Err(Error::ThetaMismatch);
        }
        Ok(())
    }

    /// Twisted convolution with the default prune threshold.
    pub fn star(&self, other: &TorusElement) -> Result<Self> {
        self.star_pruned(other, DEFAULT_PRUNE)
    }

    pub fn star_pruned(&self, other: &TorusElement, prune: f64) -> Result<Self> {
        self.check_same_theta(other)?;
        let coeffs = twisted_convolution(&self.theta, &self.coeffs, &other.coeffs);
        Ok(Self::from_map(self.theta.clone(), coeffs, prune))
    }

    /// `a*(p) = conj(a(-p))`.
    pub fn involution(&self) -> Self {
        let map = self.coeffs.iter().map(|(k, c)| (-k, c.conj())).collect();
        Self::from_map(self.theta.clone(), map, DEFAULT_PRUNE)
    }

    /// Tracial state `tau(a) = a(0)`.
    pub fn trace(&self) -> Complex64 {
        self.coeff(&LatticeIndex::zero(self.dim()))
    }

    /// GNS inner product `tau(a* b)`. Only the zero mode of the product is
    /// formed.
    pub fn gns_inner(&self, other: &TorusElement) -> Result<Complex64> {
        self.check_same_theta(other)?;
        let mut acc = Complex64::default();
        for (s, bs) in &other.coeffs {
            let r = -s;
            if let Some(a) = self.coeffs.get(s) {
                // a*(r) = conj(a(-r)) = conj(a(s))
                acc += a.conj() * bs * phase(-PI * self.theta.pairing(&r, s));
            }
        }
        Ok(acc)
    }

    /// Derivation `delta_axis(U_k) = k_axis U_k` (zero-based axis).
    pub fn delta(&self, axis: usize) -> Result<Self> {
        if axis >= self.dim() {
            return Err(Error::AxisOutOfRange {
                axis,
                n: self.dim(),
            });
        }
        Ok(self.map_coeffs(|k, c| c * k.0[axis] as f64))
    }

    /// Deformed product on bigraded elements of the two-torus: for homogeneous
    /// `x` of bidegree `k` and `y` of bidegree `p`, `x * y = lambda^(p_1 k_2) xy`.
    /// Both operands must carry the undeformed structure.
    pub fn bigraded_star(&self, other: &TorusElement, lambda: Complex64) -> Result<Self> {
        if self.dim() != 2 || other.dim() != 2 {
            return Err(Error::InvalidParameter(
                "bigraded product is defined on the two-torus only".into(),
            ));
        }
        if !self.theta.is_zero() || !other.theta.is_zero() {
            return Err(Error::InvalidParameter(
                "bigraded product expects undeformed operands".into(),
            ));
        }
        if (lambda.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("lambda must have modulus 1".into()));
        }
        let mut map: BTreeMap<LatticeIndex, Complex64> = BTreeMap::new();
        for (k, xk) in &self.coeffs {
            for (p, yp) in &other.coeffs {
                let exponent = p.0[0] * k.0[1];
                *map.entry(k + p).or_default() += xk * yp * lambda.powi(exponent as i32);
            }
        }
        Ok(Self::from_map(self.theta.clone(), map, DEFAULT_PRUNE))
    }

    /// Gauge transform carrying `C^inf(T^2_{theta J})` onto the bigraded model:
    /// `U_k -> exp(i pi theta k_1 k_2) U_k`, landing on the undeformed torus.
    ///
    /// Intertwines the twisted product with [`TorusElement::bigraded_star`]
    /// at `lambda = exp(2 pi i theta)`; see [`bigraded_lambda`].
    pub fn cocycle_gauge(&self, theta: f64) -> Result<Self> {
        if self.dim() != 2 {
            return Err(Error::InvalidParameter(
                "gauge is defined on the two-torus only".into(),
            ));
        }
        let map = self
            .coeffs
            .iter()
            .map(|(k, c)| {
                let kk = (k.0[0] * k.0[1]) as f64;
                (k.clone(), c * phase(GAUGE_SIGN * PI * theta * kk))
            })
            .collect();
        Ok(Self::from_map(SkewMatrix::zero(2), map, DEFAULT_PRUNE))
    }

    pub fn to_json(&self) -> ElementJson {
        ElementJson {
            n: self.dim(),
            theta: self.theta.rows(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| CoeffJson {
                    k: k.0.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn from_json(json: &ElementJson) -> Result<Self> {
        let theta = SkewMatrix::from_rows(&json.theta)?;
        if theta.dim() != json.n {
            return Err(Error::DimensionMismatch {
                expected: json.n,
                got: theta.dim(),
            });
        }
        let mut map = BTreeMap::new();
        for entry in &json.coeffs {
            let k = LatticeIndex::new(entry.k.clone());
            if k.dim() != json.n {
                return Err(Error::DimensionMismatch {
                    expected: json.n,
                    got: k.dim(),
                });
            }
            if map.insert(k.clone(), Complex64::new(entry.re, entry.im)).is_some() {
                return Err(Error::Parse(format!("duplicate coefficient key {k}")));
            }
        }
        Ok(Self::from_map(theta, map, DEFAULT_PRUNE))
    }
}

/// Sign of the gauge phase, fixed by brute-force comparison of both
/// products (see the `gauge` tests).
pub const GAUGE_SIGN: f64 = 1.0;

/// Bigraded deformation parameter matched to `Theta = theta J` by
/// [`TorusElement::cocycle_gauge`].
pub fn bigraded_lambda(theta: f64) -> Complex64 {
    phase(2.0 * PI * theta)
}

#[inline]
pub(crate) fn phase(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// Operand pairs above this count are split into fixed chunks and summed in
/// chunk order, so results do not depend on the thread pool.
const PARALLEL_PAIRS: usize = 1 << 18;
const CHUNKS: usize = 8;

fn twisted_convolution(
    theta: &SkewMatrix,
    a: &BTreeMap<LatticeIndex, Complex64>,
    b: &BTreeMap<LatticeIndex, Complex64>,
) -> BTreeMap<LatticeIndex, Complex64> {
    let n = theta.dim();
    if a.is_empty() || b.is_empty() {
        return BTreeMap::new();
    }
    // bounding box of the Minkowski sum
    let bounds = |m: &BTreeMap<LatticeIndex, Complex64>| {
        let mut lo = vec![i64::MAX; n];
        let mut hi = vec![i64::MIN; n];
        for k in m.keys() {
            for j in 0..n {
                lo[j] = lo[j].min(k.0[j]);
                hi[j] = hi[j].max(k.0[j]);
            }
        }
        (lo, hi)
    };
    let (alo, ahi) = bounds(a);
    let (blo, bhi) = bounds(b);
    let lo: Vec<i64> = (0..n).map(|j| alo[j] + blo[j]).collect();
    let extent: Vec<usize> = (0..n)
        .map(|j| (ahi[j] + bhi[j] - lo[j] + 1) as usize)
        .collect();
    let box_len = extent
        .iter()
        .try_fold(1usize, |acc, &e| acc.checked_mul(e))
        .unwrap_or(usize::MAX);

    // b with Theta s precomputed once per right factor
    let rhs: Vec<(&LatticeIndex, Complex64, Vec<f64>)> =
        b.iter().map(|(s, &c)| (s, c, theta.apply(s))).collect();
    let lhs: Vec<(&LatticeIndex, Complex64)> = a.iter().map(|(r, &c)| (r, c)).collect();

    let pair_phase = |r: &LatticeIndex, theta_s: &[f64]| -> f64 {
        let dot: f64 = r.0.iter().zip(theta_s).map(|(&x, y)| x as f64 * y).sum();
        -PI * dot
    };

    if box_len <= 1 << 22 {
        let flat = |p: &[i64]| -> usize {
            p.iter()
                .zip(&lo)
                .zip(&extent)
                .fold(0usize, |acc, ((&c, &l), &e)| acc * e + (c - l) as usize)
        };
        let accumulate = |lhs: &[(&LatticeIndex, Complex64)]| {
            let mut buf = vec![Complex64::default(); box_len];
            let mut touched = vec![false; box_len];
            let mut p = vec![0i64; n];
            for (r, ar) in lhs {
                for (s, bs, ts) in &rhs {
                    for (pj, (rj, sj)) in p.iter_mut().zip(r.0.iter().zip(&s.0)) {
                        *pj = rj + sj;
                    }
                    let idx = flat(&p);
                    buf[idx] += ar * bs * phase(pair_phase(r, ts));
                    touched[idx] = true;
                }
            }
            (buf, touched)
        };
        let (buf, touched) = if lhs.len() * rhs.len() > PARALLEL_PAIRS && lhs.len() >= CHUNKS {
            let chunk = lhs.len().div_ceil(CHUNKS);
            let parts: Vec<_> = lhs.par_chunks(chunk).map(accumulate).collect();
            let mut parts = parts.into_iter();
            let (mut buf, mut touched) = parts.next().unwrap();
            for (pb, pt) in parts {
                for i in 0..box_len {
                    buf[i] += pb[i];
                    touched[i] |= pt[i];
                }
            }
            (buf, touched)
        } else {
            accumulate(&lhs)
        };
        let mut out = BTreeMap::new();
        for (i, (&c, &t)) in buf.iter().zip(&touched).enumerate() {
            if t {
                let mut rem = i;
                let mut comps = vec![0i64; n];
                for j in (0..n).rev() {
                    comps[j] = (rem % extent[j]) as i64 + lo[j];
                    rem /= extent[j];
                }
                out.insert(LatticeIndex(comps), c);
            }
        }
        out
    } else {
        let mut out: BTreeMap<LatticeIndex, Complex64> = BTreeMap::new();
        for (r, ar) in &lhs {
            for (s, bs, ts) in &rhs {
                *out.entry(*r + *s).or_default() += ar * bs * phase(pair_phase(r, ts));
            }
        }
        out
    }
}

/// Deterministic random element on a window with `|a(k)| <= (1+|k|)^(-decay)`.
pub fn random_element(
    theta: &SkewMatrix,
    window: &TruncationWindow,
    decay: f64,
    seed: u64,
) -> Result<TorusElement> {
    if decay.is_nan() || decay <= 0.0 {
        return Err(Error::InvalidParameter("decay must be positive".into()));
    }
    if window.dim() != theta.dim() {
        return Err(Error::DimensionMismatch {
            expected: theta.dim(),
            got: window.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let map = window
        .points()
        .into_iter()
        .map(|k| {
            let bound = (1.0 + k.norm()).powf(-decay);
            let mag = bound * rng.random::<f64>();
            let arg = 2.0 * PI * rng.random::<f64>();
            (k, Complex64::from_polar(mag, arg))
        })
        .collect();
    Ok(TorusElement::from_map(theta.clone(), map, DEFAULT_PRUNE))
}

/// Deterministic random element with `count` nonzero coefficients drawn
/// uniformly from the box of the given radius, entries in the unit disc.
pub fn random_sparse_element(
    theta: &SkewMatrix,
    radius: i64,
    count: usize,
    seed: u64,
) -> TorusElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = theta.dim();
    let mut map = BTreeMap::new();
    for _ in 0..count {
        let k = LatticeIndex((0..n).map(|_| rng.random_range(-radius..=radius)).collect());
        let mag = rng.random::<f64>();
        let arg = 2.0 * PI * rng.random::<f64>();
        map.insert(k, Complex64::from_polar(mag, arg));
    }
    TorusElement::from_map(theta.clone(), map, DEFAULT_PRUNE)
}

/// Wire form of a torus element.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ElementJson {
    pub n: usize,
    pub theta: Vec<Vec<f64>>,
    pub coeffs: Vec<CoeffJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CoeffJson {
    pub k: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(v: &[i64]) -> LatticeIndex {
        LatticeIndex::new(v.to_vec())
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unitary_basics() {
        let t = SkewMatrix::planar(0.5);
        let id = TorusElement::unitary(idx(&[0, 0]), &t).unwrap();
        assert_eq!(id, TorusElement::identity(&t));
        let u = TorusElement::unitary(idx(&[1, 0]), &t).unwrap();
        assert_eq!(u.coeffs().len(), 1);
        assert_eq!(u.coeff(&idx(&[1, 0])), c(1.0, 0.0));
        assert!(matches!(
            TorusElement::unitary(idx(&[2, -3, 1]), &t),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unitary_product_phase() {
        let t = SkewMatrix::planar(0.5);
        let u10 = TorusElement::unitary(idx(&[1, 0]), &t).unwrap();
        let u01 = TorusElement::unitary(idx(&[0, 1]), &t).unwrap();
        let p = u10.star(&u01).unwrap();
        assert_eq!(p.support_len(), 1);
        assert!((p.coeff(&idx(&[1, 1])) - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_deformation_is_plain_convolution() {
        let t = SkewMatrix::zero(2);
        let w = TruncationWindow::new(2, 2).unwrap();
        let a = random_element(&t, &w, 1.0, 1).unwrap();
        let b = random_element(&t, &w, 1.0, 2).unwrap();
        let p = a.star(&b).unwrap();
        let mut conv: BTreeMap<LatticeIndex, Complex64> = BTreeMap::new();
        for (r, x) in a.coeffs() {
            for (s, y) in b.coeffs() {
                *conv.entry(r + s).or_default() += x * y;
            }
        }
        let conv = TorusElement::from_map(t, conv, DEFAULT_PRUNE);
        assert!(p.max_diff(&conv) < 1e-14);
        assert!(p.max_diff(&b.star(&a).unwrap()) < 1e-14);
    }

    #[test]
    fn theta_mismatch_rejected() {
        let a = TorusElement::identity(&SkewMatrix::planar(0.1));
        let b = TorusElement::identity(&SkewMatrix::planar(0.2));
        assert!(matches!(a.star(&b), Err(Error::ThetaMismatch)));
        let c3 = TorusElement::identity(&SkewMatrix::zero(3));
        assert!(matches!(a.star(&c3), Err(Error::DimensionMismatch { .. })));
        assert!(a.gns_inner(&b).is_err());
    }

    #[test]
    fn involution_and_trace_on_unitaries() {
        let t = SkewMatrix::planar(0.37);
        let u = TorusElement::unitary(idx(&[2, -1]), &t).unwrap();
        assert_eq!(u.involution(), TorusElement::unitary(idx(&[-2, 1]), &t).unwrap());
        assert_eq!(TorusElement::identity(&t).trace(), c(1.0, 0.0));
        assert_eq!(
            TorusElement::unitary(idx(&[1, 0]), &t).unwrap().trace(),
            c(0.0, 0.0)
        );
    }

    #[test]
    fn gns_orthonormal_basis() {
        let t = SkewMatrix::from_upper(3, &[0.2, 0.7, -0.4]).unwrap();
        let w = TruncationWindow::new(3, 1).unwrap();
        for k in w.points() {
            for l in w.points() {
                let uk = TorusElement::unitary(k.clone(), &t).unwrap();
                let ul = TorusElement::unitary(l.clone(), &t).unwrap();
                let g = uk.gns_inner(&ul).unwrap();
                let expect = if k == l { 1.0 } else { 0.0 };
                assert!((g - c(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn delta_behaviour() {
        let t = SkewMatrix::planar(0.3);
        let u = TorusElement::unitary(idx(&[3, -2]), &t).unwrap();
        assert_eq!(u.delta(0).unwrap(), u.scale(c(3.0, 0.0)));
        assert_eq!(u.delta(1).unwrap(), u.scale(c(-2.0, 0.0)));
        assert!(TorusElement::identity(&t).delta(0).unwrap().is_zero());
        assert!(matches!(u.delta(2), Err(Error::AxisOutOfRange { .. })));
    }

    #[test]
    fn bigraded_unit_examples() {
        let t0 = SkewMatrix::zero(2);
        let lambda = phase(0.9);
        let u10 = TorusElement::unitary(idx(&[1, 0]), &t0).unwrap();
        let u01 = TorusElement::unitary(idx(&[0, 1]), &t0).unwrap();
        let u11 = TorusElement::unitary(idx(&[1, 1]), &t0).unwrap();
        assert!(u10.bigraded_star(&u01, lambda).unwrap().max_diff(&u11) < 1e-15);
        assert!(
            u01.bigraded_star(&u10, lambda)
                .unwrap()
                .max_diff(&u11.scale(lambda))
                < 1e-15
        );
        let t3 = TorusElement::identity(&SkewMatrix::zero(3));
        assert!(t3.bigraded_star(&t3, lambda).is_err());
    }

    #[test]
    fn gauge_examples() {
        let theta = 0.3;
        let t = SkewMatrix::planar(theta);
        let u10 = TorusElement::unitary(idx(&[1, 0]), &t).unwrap();
        let g = u10.cocycle_gauge(theta).unwrap();
        assert_eq!(g.coeff(&idx(&[1, 0])), c(1.0, 0.0));
        assert!(g.theta().is_zero());
        let u11 = TorusElement::unitary(idx(&[1, 1]), &t).unwrap();
        let g = u11.cocycle_gauge(theta).unwrap();
        assert!((g.coeff(&idx(&[1, 1])) - phase(PI * theta)).norm() < 1e-15);
    }

    #[test]
    fn random_element_properties() {
        let t = SkewMatrix::planar(0.1);
        let w = TruncationWindow::new(2, 8).unwrap();
        let a = random_element(&t, &w, 4.0, 9).unwrap();
        let b = random_element(&t, &w, 4.0, 9).unwrap();
        assert_eq!(a, b);
        for (k, v) in a.coeffs() {
            assert!(v.norm() <= (1.0 + k.norm()).powf(-4.0));
        }
        let other = random_element(&t, &w, 4.0, 10).unwrap();
        assert!(a.max_diff(&other) > 0.0);
        assert!(random_element(&t, &w, 0.0, 1).is_err());
    }

    #[test]
    fn json_roundtrip_and_duplicates() {
        let t = SkewMatrix::planar(0.25);
        let w = TruncationWindow::new(2, 1).unwrap();
        let a = random_element(&t, &w, 2.0, 3).unwrap();
        let json = a.to_json();
        assert!(json.coeffs.windows(2).all(|p| p[0].k < p[1].k));
        assert_eq!(TorusElement::from_json(&json).unwrap(), a);
        let mut dup = json.clone();
        dup.coeffs.push(dup.coeffs[0].clone());
        assert!(matches!(TorusElement::from_json(&dup), Err(Error::Parse(_))));
    }
}
