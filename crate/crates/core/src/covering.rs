//! Finite-fold coverings `C(T^n_Theta) -> C(T^n_Theta~)` with deck group
//! `Z_{k_1} x ... x Z_{k_n}`: embedding, deck action, the Hilbert-module
//! inner product, the equivariant connection and the lifted Dirac operator.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{CMatrix, GammaSet};
use crate::error::{Error, Result};
use crate::lattice::{LatticeIndex, SkewMatrix, TruncationWindow};
use crate::spectral::{represent, BlockDiagonal, TruncatedOperator};
use crate::torus::TorusElement;

/// Deck groups larger than this are not enumerated.
pub const MAX_GROUP_ORDER: u64 = 10_000;

/// Tolerance on the angle compatibility `exp(-2 pi i theta_rs) = exp(-2 pi i theta~_rs k_r k_s)`.
pub const COMPATIBILITY_TOL: f64 = 1e-13;

/// Off-lattice residue tolerated when reading a group sum back as a base element.
pub const RESIDUE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringSpec {
    k: Vec<u64>,
    base_theta: SkewMatrix,
    cover_theta: SkewMatrix,
}

impl CoveringSpec {
    /// Canonical covering: `theta~_rs = theta_rs / (k_r k_s)`.
    pub fn new(base_theta: &SkewMatrix, k: &[i64]) -> Result<Self> {
        let k = validate_multiplicities(base_theta.dim(), k)?;
        let cover_theta = base_theta.scaled_down(&k);
        Ok(CoveringSpec {
            k,
            base_theta: base_theta.clone(),
            cover_theta,
        })
    }

    /// Covering with an explicitly given cover matrix, which must satisfy the
    /// angle compatibility relation.
    pub fn with_cover_theta(
        base_theta: &SkewMatrix,
        cover_theta: &SkewMatrix,
        k: &[i64],
    ) -> Result<Self> {
        let k = validate_multiplicities(base_theta.dim(), k)?;
        if cover_theta.dim() != base_theta.dim() {
            return Err(Error::DimensionMismatch {
                expected: base_theta.dim(),
                got: cover_theta.dim(),
            });
        }
        let spec = CoveringSpec {
            k,
            base_theta: base_theta.clone(),
            cover_theta: cover_theta.clone(),
        };
        let res = spec.compatibility_residual();
        if res > COMPATIBILITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "cover matrix incompatible with base (residual {res:e})"
            )));
        }
        Ok(spec)
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.k
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    pub fn base_theta(&self) -> &SkewMatrix {
        &self.base_theta
    }

    pub fn cover_theta(&self) -> &SkewMatrix {
        &self.cover_theta
    }

    pub fn group_order(&self) -> u64 {
        self.k.iter().product()
    }

    /// `max_rs |exp(-2 pi i theta_rs) - exp(-2 pi i theta~_rs k_r k_s)|`.
    pub fn compatibility_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for s in 0..n {
                let lhs = Complex64::from_polar(1.0, -2.0 * PI * self.base_theta.get(r, s));
                let rhs = Complex64::from_polar(
                    1.0,
                    -2.0 * PI * self.cover_theta.get(r, s) * (self.k[r] * self.k[s]) as f64,
                );
                worst = worst.max((lhs - rhs).norm());
            }
        }
        worst
    }

    /// Every deck transformation, in lexicographic residue order.
    pub fn deck_elements(&self) -> Result<Vec<DeckElement>> {
        let order = self.group_order();
        if order > MAX_GROUP_ORDER {
            return Err(Error::GroupTooLarge {
                order,
                limit: MAX_GROUP_ORDER,
            });
        }
        let mut out = Vec::with_capacity(order as usize);
        let mut cur = vec![0u64; self.dim()];
        loop {
            out.push(DeckElement {
                residues: cur.clone(),
            });
            let mut j = self.dim();
            loop {
                if j == 0 {
                    return Ok(out);
                }
                j -= 1;
                cur[j] += 1;
                if cur[j] < self.k[j] {
                    break;
                }
                cur[j] = 0;
            }
        }
    }

    pub fn deck_element(&self, residues: &[i64]) -> Result<DeckElement> {
        if residues.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: residues.len(),
            });
        }
        Ok(DeckElement {
            residues: residues
                .iter()
                .zip(&self.k)
                .map(|(&p, &k)| p.rem_euclid(k as i64) as u64)
                .collect(),
        })
    }

    /// Whether `l` lies in `k_1 Z x ... x k_n Z`.
    pub fn in_base_lattice(&self, l: &LatticeIndex) -> bool {
        l.0.iter().zip(&self.k).all(|(&c, &k)| c.rem_euclid(k as i64) == 0)
    }

    pub fn to_json(&self) -> CoveringJson {
        CoveringJson {
            k: self.k.iter().map(|&k| k as i64).collect(),
            base_theta: self.base_theta.rows(),
            cover_theta: self.cover_theta.rows(),
        }
    }

    pub fn from_json(json: &CoveringJson) -> Result<Self> {
        let base = SkewMatrix::from_rows(&json.base_theta)?;
        let cover = SkewMatrix::from_rows(&json.cover_theta)?;
        Self::with_cover_theta(&base, &cover, &json.k)
    }
}

fn validate_multiplicities(n: usize, k: &[i64]) -> Result<Vec<u64>> {
    if k.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: k.len(),
        });
    }
    if let Some(bad) = k.iter().find(|&&x| x < 1) {
        return Err(Error::InvalidParameter(format!(
            "cover multiplicity {bad} is not positive"
        )));
    }
    Ok(k.iter().map(|&x| x as u64).collect())
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CoveringJson {
    pub k: Vec<i64>,
    pub base_theta: Vec<Vec<f64>>,
    pub cover_theta: Vec<Vec<f64>>,
}

/// Element `(p_1, ..., p_n)` of the deck group, residues reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeckElement {
    residues: Vec<u64>,
}

impl DeckElement {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn is_identity(&self) -> bool {
        self.residues.iter().all(|&p| p == 0)
    }

    pub fn compose(&self, other: &DeckElement, spec: &CoveringSpec) -> DeckElement {
        DeckElement {
            residues: self
                .residues
                .iter()
                .zip(&other.residues)
                .zip(&spec.k)
                .map(|((a, b), k)| (a + b) % k)
                .collect(),
        }
    }

    pub fn inverse(&self, spec: &CoveringSpec) -> DeckElement {
        DeckElement {
            residues: self
                .residues
                .iter()
                .zip(&spec.k)
                .map(|(&a, &k)| (k - a) % k)
                .collect(),
        }
    }

    /// Character `exp(2 pi i sum_j p_j l_j / k_j)`. Each product is reduced
    /// mod `k_j` first so trivial phases come out exactly 1.
    pub fn character(&self, l: &LatticeIndex, spec: &CoveringSpec) -> Complex64 {
        let turns: f64 = self
            .residues
            .iter()
            .zip(&l.0)
            .zip(&spec.k)
            .map(|((&p, &c), &k)| (p as i64 * c).rem_euclid(k as i64) as f64 / k as f64)
            .sum();
        if turns == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, 2.0 * PI * turns)
        }
    }
}

fn check_base(a: &TorusElement, spec: &CoveringSpec) -> Result<()> {
    if a.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: a.dim(),
        });
    }
    if a.theta() != &spec.base_theta {
        return Err(Error::ThetaMismatch);
    }
    Ok(())
}

fn check_cover(a: &TorusElement, spec: &CoveringSpec) -> Result<()> {
    if a.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: a.dim(),
        });
    }
    if a.theta() != &spec.cover_theta {
        return Err(Error::ThetaMismatch);
    }
    Ok(())
}

/// `u_j -> v_j^{k_j}`: the coefficient at `l` moves to `(k_1 l_1, ..., k_n l_n)`.
pub fn embed(a: &TorusElement, spec: &CoveringSpec) -> Result<TorusElement> {
    check_base(a, spec)?;
    TorusElement::from_coeffs(
        &spec.cover_theta,
        a.coeffs().iter().map(|(l, &c)| (l.scale_by(&spec.k), c)),
    )
}

/// Deck action on the cover algebra: the coefficient at `l` picks up the
/// character of `g` at `l`.
pub fn deck_action(
    g: &DeckElement,
    a: &TorusElement,
    spec: &CoveringSpec,
) -> Result<TorusElement> {
    if g.residues.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: g.residues.len(),
        });
    }
    if a.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: a.dim(),
        });
    }
    Ok(a.map_coeffs(|l, c| c * g.character(l, spec)))
}

/// Projection onto the fixed-point algebra: keeps exactly the coefficients on
/// `k_1 Z x ... x k_n Z`, which is what averaging over the group does.
pub fn invariant_projection(a: &TorusElement, spec: &CoveringSpec) -> Result<TorusElement> {
    if a.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: a.dim(),
        });
    }
    let kept = a
        .coeffs()
        .iter()
        .filter(|(l, _)| spec.in_base_lattice(l))
        .map(|(l, &c)| (l.clone(), c));
    TorusElement::from_coeffs(a.theta(), kept)
}

/// Inverse of [`embed`] on invariant elements. Coefficients off the
/// `K`-lattice must be below `tol` relative to the largest coefficient.
pub fn descend(c: &TorusElement, spec: &CoveringSpec, tol: f64) -> Result<TorusElement> {
    check_cover(c, spec)?;
    let scale = c.max_abs().max(1.0);
    let mut map = BTreeMap::new();
    for (l, &v) in c.coeffs() {
        if spec.in_base_lattice(l) {
            let base = LatticeIndex(
                l.0.iter()
                    .zip(&spec.k)
                    .map(|(&x, &k)| x / k as i64)
                    .collect(),
            );
            map.insert(base, v);
        } else if v.norm() > tol * scale {
            return Err(Error::Consistency(format!(
                "coefficient {v} at {l} lies off the base lattice"
            )));
        }
    }
    TorusElement::from_coeffs(&spec.base_theta, map)
}

/// `<a, b> = sum_{g in G} g(a* b)`, read back as an element of the base torus.
pub fn module_inner(
    a: &TorusElement,
    b: &TorusElement,
    spec: &CoveringSpec,
) -> Result<TorusElement> {
    check_cover(a, spec)?;
    check_cover(b, spec)?;
    let prod = a.involution().star(b)?;
    let mut sum = TorusElement::zero(&spec.cover_theta);
    for g in spec.deck_elements()? {
        sum = sum.add(&deck_action(&g, &prod, spec)?)?;
    }
    descend(&sum, spec, RESIDUE_TOL)
}

/// Formal sum `sum_mu terms[mu] (x) gamma^mu` with coefficients in the cover
/// algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionValue {
    terms: Vec<TorusElement>,
}

impl ConnectionValue {
    pub fn new(terms: Vec<TorusElement>) -> Result<Self> {
        if let Some(first) = terms.first() {
            if terms.len() > first.dim() {
                return Err(Error::InvalidParameter("more terms than axes".into()));
            }
            for t in &terms[1..] {
                first.check_same_theta(t)?;
            }
        }
        Ok(ConnectionValue { terms })
    }

    pub fn terms(&self) -> &[TorusElement] {
        &self.terms
    }

    pub fn term(&self, axis: usize) -> &TorusElement {
        &self.terms[axis]
    }

    /// Right module action by a base element, through the embedding.
    pub fn right_mul(&self, x: &TorusElement, spec: &CoveringSpec) -> Result<Self> {
        let ex = embed(x, spec)?;
        let terms = self
            .terms
            .iter()
            .map(|t| t.star(&ex))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConnectionValue { terms })
    }

    pub fn add(&self, other: &ConnectionValue) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .zip(&other.terms)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConnectionValue { terms })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ConnectionValue {
            terms: self.terms.iter().map(|t| t.scale(s)).collect(),
        }
    }

    pub fn act(&self, g: &DeckElement, spec: &CoveringSpec) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| deck_action(g, t, spec))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConnectionValue { terms })
    }

    pub fn max_diff(&self, other: &ConnectionValue) -> f64 {
        self.terms
            .iter()
            .zip(&other.terms)
            .map(|(a, b)| a.max_diff(b))
            .fold(0.0, f64::max)
    }

    /// `sum_mu pi(terms[mu]) (x) gamma^mu` on a truncation of the cover.
    pub fn to_operator(&self, window: &TruncationWindow) -> Result<TruncatedOperator> {
        let n = window.dim();
        let gammas = GammaSet::new(n);
        let m = gammas.spinor_dim();
        let dim = window.len() * m;
        let mut out = CMatrix::zeros(dim, dim);
        for (t, g) in self.terms.iter().zip(gammas.matrices()) {
            out += represent(t, window)?.into_matrix().kronecker(g);
        }
        TruncatedOperator::new(*window, m, 1, out)
    }
}

/// The connection determined by `nabla U~_l = sum_mu (l_mu / k_mu) U~_l (x) gamma^mu`.
pub fn connection_apply(a: &TorusElement, spec: &CoveringSpec) -> Result<ConnectionValue> {
    check_cover(a, spec)?;
    let terms = (0..spec.dim())
        .map(|mu| {
            let k = spec.k[mu] as f64;
            a.map_coeffs(|l, c| c * (l.0[mu] as f64 / k))
        })
        .collect();
    ConnectionValue::new(terms)
}

/// `max_{g, mu, l} |nabla(g a) - g nabla(a)|`.
pub fn equivariance_check(a: &TorusElement, spec: &CoveringSpec) -> Result<f64> {
    let base = connection_apply(a, spec)?;
    let mut worst: f64 = 0.0;
    for g in spec.deck_elements()? {
        let lhs = connection_apply(&deck_action(&g, a, spec)?, spec)?;
        let rhs = base.act(&g, spec)?;
        worst = worst.max(lhs.max_diff(&rhs));
    }
    Ok(worst)
}

/// Group average `(1/|G|) sum_g g^{-1} (nabla(g a))` of the connection.
pub fn averaged_connection(a: &TorusElement, spec: &CoveringSpec) -> Result<ConnectionValue> {
    let group = spec.deck_elements()?;
    let zero = TorusElement::zero(&spec.cover_theta);
    let mut acc = ConnectionValue::new(vec![zero; spec.dim()])?;
    for g in &group {
        let moved = connection_apply(&deck_action(g, a, spec)?, spec)?;
        acc = acc.add(&moved.act(&g.inverse(spec), spec)?)?;
    }
    Ok(acc.scale(Complex64::new(1.0 / group.len() as f64, 0.0)))
}

/// Lifted Dirac operator: block `sum_mu (l_mu / k_mu) gamma^mu` at cover point `l`.
pub fn lifted_dirac_blocks(
    spec: &CoveringSpec,
    window: &TruncationWindow,
) -> Result<BlockDiagonal> {
    if window.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: window.dim(),
        });
    }
    let gammas = GammaSet::new(spec.dim());
    Ok(BlockDiagonal::from_fn(*window, |l| {
        let v: Vec<f64> = l
            .0
            .iter()
            .zip(&spec.k)
            .map(|(&c, &k)| c as f64 / k as f64)
            .collect();
        gammas.slash(&v)
    }))
}

pub fn lifted_dirac_matrix(
    spec: &CoveringSpec,
    window: &TruncationWindow,
) -> Result<TruncatedOperator> {
    Ok(lifted_dirac_blocks(spec, window)?.to_operator(1))
}

/// A chain of coverings `T_theta <- T_{theta/m_1^2} <- T_{theta/m_2^2} <- ...`
/// with `m_j = p_1 ... p_j`.
#[derive(Debug, Clone)]
pub struct CoveringTower {
    base_theta: SkewMatrix,
    primes: Vec<u64>,
    levels: Vec<SkewMatrix>,
}

impl CoveringTower {
    pub fn build(base_theta: &SkewMatrix, primes: &[i64]) -> Result<Self> {
        let n = base_theta.dim();
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(
                "covering towers need an even-dimensional torus".into(),
            ));
        }
        if let Some(bad) = primes.iter().find(|&&p| p < 2) {
            return Err(Error::InvalidParameter(format!(
                "tower step {bad} is below 2"
            )));
        }
        let primes: Vec<u64> = primes.iter().map(|&p| p as u64).collect();
        let mut levels = vec![base_theta.clone()];
        let mut m = 1u64;
        for &p in &primes {
            m *= p;
            levels.push(base_theta.scaled_down(&vec![m; n]));
        }
        Ok(CoveringTower {
            base_theta: base_theta.clone(),
            primes,
            levels,
        })
    }

    pub fn depth(&self) -> usize {
        self.primes.len()
    }

    /// `m_j`, with `m_0 = 1`.
    pub fn multiplier(&self, level: usize) -> u64 {
        self.primes[..level].iter().product()
    }

    pub fn level_theta(&self, level: usize) -> &SkewMatrix {
        &self.levels[level]
    }

    pub fn base_theta(&self) -> &SkewMatrix {
        &self.base_theta
    }

    /// The covering of level `lower` by level `upper`.
    pub fn spec(&self, lower: usize, upper: usize) -> Result<CoveringSpec> {
        if lower > upper || upper > self.depth() {
            return Err(Error::InvalidParameter(format!(
                "no covering from level {upper} to level {lower}"
            )));
        }
        let ratio = (self.multiplier(upper) / self.multiplier(lower)) as i64;
        CoveringSpec::with_cover_theta(
            &self.levels[lower],
            &self.levels[upper],
            &vec![ratio; self.base_theta.dim()],
        )
    }

    /// Consecutive steps `j-1 -> j`.
    pub fn steps(&self) -> Result<Vec<CoveringSpec>> {
        (1..=self.depth()).map(|j| self.spec(j - 1, j)).collect()
    }

    /// `|G(upper | lower)|`.
    pub fn group_order(&self, lower: usize, upper: usize) -> u64 {
        let ratio = self.multiplier(upper) / self.multiplier(lower);
        ratio.pow(self.base_theta.dim() as u32)
    }

    /// Checks `0 -> G(u|m) -> G(u|l) -> G(m|l) -> 0` for `l < m < u`:
    /// orders multiply, the inclusion is injective, the reduction is onto,
    /// the image of the inclusion is the kernel of the reduction, and the
    /// reduction is compatible with the deck actions on embedded elements.
    pub fn exactness(&self, lower: usize, middle: usize, upper: usize) -> Result<ExactnessRow> {
        let big = self.spec(lower, upper)?;
        let top = self.spec(middle, upper)?;
        let bottom = self.spec(lower, middle)?;
        let orders_ok =
            self.group_order(lower, upper) == self.group_order(middle, upper) * self.group_order(lower, middle);

        let step = self.multiplier(middle) / self.multiplier(lower);
        let include = |g: &DeckElement| -> DeckElement {
            let r: Vec<i64> = g.residues.iter().map(|&p| (p * step) as i64).collect();
            big.deck_element(&r).expect("dimension")
        };
        let reduce = |g: &DeckElement| -> DeckElement {
            let r: Vec<i64> = g.residues.iter().map(|&p| p as i64).collect();
            bottom.deck_element(&r).expect("dimension")
        };
        let big_elems = big.deck_elements()?;
        let top_elems = top.deck_elements()?;
        let bottom_elems = bottom.deck_elements()?;

        let image: std::collections::BTreeSet<DeckElement> = top_elems.iter().map(include).collect();
        let injective = image.len() == top_elems.len();
        let reduced: std::collections::BTreeSet<DeckElement> = big_elems.iter().map(reduce).collect();
        let surjective = reduced.len() == bottom_elems.len();
        let kernel: std::collections::BTreeSet<DeckElement> = big_elems
            .iter()
            .filter(|g| reduce(g).is_identity())
            .cloned()
            .collect();
        let exact_middle = kernel == image;

        // g acting on the embedded middle algebra agrees with its reduction.
        let n = self.base_theta.dim();
        let probe_window = TruncationWindow::new(n, 1)?;
        let mid_embed = self.spec(middle, upper)?;
        let mut action_ok = true;
        for g in &big_elems {
            for l in probe_window.points() {
                let u = TorusElement::unitary(l, &self.levels[middle])?;
                let lhs = deck_action(g, &embed(&u, &mid_embed)?, &big)?;
                let rhs = embed(&deck_action(&reduce(g), &u, &bottom)?, &mid_embed)?;
                if lhs.max_diff(&rhs) > 1e-14 {
                    action_ok = false;
                }
            }
        }

        Ok(ExactnessRow {
            lower,
            middle,
            upper,
            order_upper_lower: self.group_order(lower, upper),
            order_upper_middle: self.group_order(middle, upper),
            order_middle_lower: self.group_order(lower, middle),
            orders_multiply: orders_ok,
            injective,
            surjective,
            exact_middle,
            action_compatible: action_ok,
        })
    }

    /// Every exactness triple `lower < middle < upper`.
    pub fn exactness_table(&self) -> Result<Vec<ExactnessRow>> {
        let mut rows = Vec::new();
        for l in 0..=self.depth() {
            for m in (l + 1)..=self.depth() {
                for u in (m + 1)..=self.depth() {
                    rows.push(self.exactness(l, m, u)?);
                }
            }
        }
        Ok(rows)
    }

    /// Max coefficient difference between the step-by-step embedding into the
    /// top level and the one-shot embedding.
    pub fn composition_residual(&self, a: &TorusElement) -> Result<f64> {
        let mut cur = a.clone();
        for step in self.steps()? {
            cur = embed(&cur, &step)?;
        }
        let direct = embed(a, &self.spec(0, self.depth())?)?;
        if cur.theta() != direct.theta() {
            return Err(Error::Consistency(
                "chained and direct embeddings land on different tori".into(),
            ));
        }
        Ok(cur.max_diff(&direct))
    }

    pub fn to_json(&self) -> Result<TowerJson> {
        let mut orders = Vec::new();
        for l in 0..=self.depth() {
            for u in (l + 1)..=self.depth() {
                orders.push(OrderJson {
                    lower: l,
                    upper: u,
                    order: self.group_order(l, u),
                });
            }
        }
        Ok(TowerJson {
            primes: self.primes.clone(),
            steps: self.steps()?.iter().map(CoveringSpec::to_json).collect(),
            orders,
            exactness: self.exactness_table()?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExactnessRow {
    pub lower: usize,
    pub middle: usize,
    pub upper: usize,
    pub order_upper_lower: u64,
    pub order_upper_middle: u64,
    pub order_middle_lower: u64,
    pub orders_multiply: bool,
    pub injective: bool,
    pub surjective: bool,
    pub exact_middle: bool,
    pub action_compatible: bool,
}

impl ExactnessRow {
    pub fn ok(&self) -> bool {
        self.orders_multiply
            && self.injective
            && self.surjective
            && self.exact_middle
            && self.action_compatible
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OrderJson {
    pub lower: usize,
    pub upper: usize,
    pub order: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TowerJson {
    pub primes: Vec<u64>,
    pub steps: Vec<CoveringJson>,
    pub orders: Vec<OrderJson>,
    pub exactness: Vec<ExactnessRow>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(v: &[i64]) -> LatticeIndex {
        LatticeIndex::new(v.to_vec())
    }

    fn spec23() -> CoveringSpec {
        CoveringSpec::new(&SkewMatrix::planar(0.5), &[2, 3]).unwrap()
    }

    #[test]
    fn canonical_cover_theta() {
        let s = spec23();
        assert_eq!(s.cover_theta().get(0, 1), 0.5 / 6.0);
        assert_eq!(s.group_order(), 6);
        assert!(s.compatibility_residual() <= COMPATIBILITY_TOL);
        let trivial = CoveringSpec::new(&SkewMatrix::planar(0.5), &[1, 1]).unwrap();
        assert_eq!(trivial.cover_theta(), trivial.base_theta());
    }

    #[test]
    fn bad_multiplicities() {
        let t = SkewMatrix::planar(0.5);
        assert!(matches!(
            CoveringSpec::new(&t, &[0, 3]),
            Err(Error::InvalidParameter(_))
        ));
        assert!(CoveringSpec::new(&t, &[-1, 3]).is_err());
        assert!(matches!(
            CoveringSpec::new(&t, &[2]),
            Err(Error::DimensionMismatch { .. })
        ));
        let wrong = SkewMatrix::planar(0.2);
        assert!(CoveringSpec::with_cover_theta(&t, &wrong, &[2, 3]).is_err());
    }

    #[test]
    fn offset_cover_theta_accepted_when_compatible() {
        let t = SkewMatrix::planar(0.5);
        let shifted = SkewMatrix::planar((0.5 + 1.0) / 6.0);
        let s = CoveringSpec::with_cover_theta(&t, &shifted, &[2, 3]).unwrap();
        assert!(s.compatibility_residual() < 1e-13);
    }

    #[test]
    fn deck_group_enumeration() {
        let s = spec23();
        let g = s.deck_elements().unwrap();
        assert_eq!(g.len(), 6);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let big = CoveringSpec::new(&SkewMatrix::zero(2), &[101, 100]).unwrap();
        assert!(matches!(big.deck_elements(), Err(Error::GroupTooLarge { .. })));
    }

    #[test]
    fn embed_unitary() {
        let s = spec23();
        let u = TorusElement::unitary(idx(&[1, 0]), s.base_theta()).unwrap();
        let e = embed(&u, &s).unwrap();
        assert_eq!(e, TorusElement::unitary(idx(&[2, 0]), s.cover_theta()).unwrap());
        let id = embed(&TorusElement::identity(s.base_theta()), &s).unwrap();
        assert_eq!(id, TorusElement::identity(s.cover_theta()));
        let wrong = TorusElement::identity(s.cover_theta());
        assert!(matches!(embed(&wrong, &s), Err(Error::ThetaMismatch)));
    }

    #[test]
    fn deck_phase_examples() {
        let s = spec23();
        let u = TorusElement::unitary(idx(&[1, 1]), s.cover_theta()).unwrap();
        let g = s.deck_element(&[1, 0]).unwrap();
        let moved = deck_action(&g, &u, &s).unwrap();
        assert!((moved.coeff(&idx(&[1, 1])) + Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let e = s.deck_element(&[0, 0]).unwrap();
        assert_eq!(deck_action(&e, &u, &s).unwrap(), u);
        assert!(deck_action(&DeckElement { residues: vec![1] }, &u, &s).is_err());
    }

    #[test]
    fn projection_examples() {
        let s = spec23();
        let u20 = TorusElement::unitary(idx(&[2, 0]), s.cover_theta()).unwrap();
        assert_eq!(invariant_projection(&u20, &s).unwrap(), u20);
        let u10 = TorusElement::unitary(idx(&[1, 0]), s.cover_theta()).unwrap();
        assert!(invariant_projection(&u10, &s).unwrap().is_zero());
    }

    #[test]
    fn inner_product_of_basis() {
        let s = spec23();
        let u = TorusElement::unitary(idx(&[1, 2]), s.cover_theta()).unwrap();
        let ip = module_inner(&u, &u, &s).unwrap();
        assert!(ip.max_diff(&TorusElement::identity(s.base_theta()).scale(Complex64::new(6.0, 0.0))) < 1e-13);
        let v = TorusElement::unitary(idx(&[0, 2]), s.cover_theta()).unwrap();
        assert!(module_inner(&u, &v, &s).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn connection_on_unitary() {
        let s = spec23();
        let u = TorusElement::unitary(idx(&[1, 1]), s.cover_theta()).unwrap();
        let c = connection_apply(&u, &s).unwrap();
        assert_eq!(c.term(0), &u.scale(Complex64::new(0.5, 0.0)));
        assert!(c.term(1).max_diff(&u.scale(Complex64::new(1.0 / 3.0, 0.0))) < 1e-16);
        let id = connection_apply(&TorusElement::identity(s.cover_theta()), &s).unwrap();
        assert!(id.terms().iter().all(TorusElement::is_zero));
    }

    #[test]
    fn equivariance_on_unitary_is_exact() {
        let s = spec23();
        let u = TorusElement::unitary(idx(&[1, -2]), s.cover_theta()).unwrap();
        assert_eq!(equivariance_check(&u, &s).unwrap(), 0.0);
    }

    #[test]
    fn lifted_blocks() {
        let s = spec23();
        let w = TruncationWindow::new(2, 6).unwrap();
        let b = lifted_dirac_blocks(&s, &w).unwrap();
        let zero = w.index_of(&idx(&[0, 0])).unwrap();
        assert_eq!(b.block(zero), &CMatrix::zeros(2, 2));
        assert_eq!(lifted_dirac_matrix(&s, &w).unwrap().hermiticity_residual(), 0.0);
    }

    #[test]
    fn tower_orders() {
        let t = CoveringTower::build(&SkewMatrix::planar(0.4), &[2, 3]).unwrap();
        assert_eq!(t.group_order(0, 1), 4);
        assert_eq!(t.group_order(0, 2), 36);
        assert_eq!(t.group_order(1, 2), 9);
        assert!(t.exactness(0, 1, 2).unwrap().ok());
        assert!(CoveringTower::build(&SkewMatrix::zero(3), &[2]).is_err());
        assert!(CoveringTower::build(&SkewMatrix::planar(0.1), &[1]).is_err());
    }

    #[test]
    fn single_step_tower_is_plain_covering() {
        let base = SkewMatrix::planar(0.4);
        let t = CoveringTower::build(&base, &[3]).unwrap();
        assert_eq!(t.spec(0, 1).unwrap(), CoveringSpec::new(&base, &[3, 3]).unwrap());
    }

    #[test]
    fn covering_json_roundtrip() {
        let s = spec23();
        assert_eq!(CoveringSpec::from_json(&s.to_json()).unwrap(), s);
    }
}
