//! Identity verification suites. Each case records the largest residual
//! seen over its samples together with the tolerance it is held to.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{CMatrix, GammaSet};
use crate::covering::{
    averaged_connection, connection_apply, deck_action, descend, embed, equivariance_check,
    invariant_projection, lifted_dirac_blocks, module_inner, CoveringSpec, CoveringTower,
};
use crate::error::Result;
use crate::lattice::{LatticeIndex, SkewMatrix, TruncationWindow};
use crate::moyal::{
    moyal_partial, norm_pair, seminorm_rk, tensor_combine, Axis, LadderSet, MoyalMatrix,
};
use crate::oracles::{brute_group_average, dense_star_oracle, sample_and_multiply};
use crate::spectral::{
    derivative_form, dirac_blocks, dirac_commutator, dirac_matrix, dirac_spectrum,
    dirac_spectrum_dense, pi_s, represent, TruncatedOperator,
};
use crate::torus::{bigraded_lambda, random_element, random_sparse_element, TorusElement};

/// One verified identity.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Case {
    pub id: String,
    /// The identity being checked, or `plumbing` for artifact-internal checks.
    pub anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Case {
    pub fn new(id: &str, anchor: &str, residual: f64, tolerance: f64) -> Self {
        Case {
            id: id.to_string(),
            anchor: anchor.to_string(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }

    /// Boolean check: residual 0 on success, 1 on failure.
    pub fn flag(id: &str, anchor: &str, ok: bool) -> Self {
        Case::new(id, anchor, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    fn retol(&mut self, tol: f64) {
        self.tolerance = tol;
        self.pass = self.residual <= tol;
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub cases: Vec<Case>,
    pub wall_time_s: f64,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(suite: &str, seed: u64, cases: Vec<Case>, wall_time_s: f64) -> Self {
        let pass = cases.iter().all(|c| c.pass);
        VerificationReport {
            suite: suite.to_string(),
            seed,
            cases,
            wall_time_s,
            pass,
        }
    }

    /// Holds every case to one tolerance instead of its own.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        for c in &mut self.cases {
            c.retol(tol);
        }
        self.pass = self.cases.iter().all(|c| c.pass);
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.pass)
    }
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_theta(n: usize, rng: &mut ChaCha8Rng) -> SkewMatrix {
    let upper: Vec<f64> = (0..n * (n - 1) / 2)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    SkewMatrix::from_upper(n, &upper).expect("sized")
}

/// Random test operand supported in radius 3: the full box for `n = 2`,
/// a sparse sample of it in higher dimension.
fn operand(theta: &SkewMatrix, seed: u64) -> TorusElement {
    if theta.dim() == 2 {
        let w = TruncationWindow::new(2, 3).expect("window");
        random_element(theta, &w, 2.0, seed).expect("valid decay")
    } else {
        random_sparse_element(theta, 3, 12, seed)
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Algebraic identities of `C^inf(T^n_Theta)` for `n = 2, 3, 4`.
pub fn torus_suite(seed: u64, samples_per_dim: usize) -> Result<Vec<Case>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut assoc, mut unit, mut invol, mut antihom, mut trace) = (0f64, 0f64, 0f64, 0f64, 0f64);
    let (mut leibniz, mut parts, mut comm, mut parseval, mut delta_star) =
        (0f64, 0f64, 0f64, 0f64, 0f64);
    for n in [2usize, 3, 4] {
        for _ in 0..samples_per_dim {
            let theta = random_theta(n, &mut rng);
            let a = operand(&theta, rng.random());
            let b = operand(&theta, rng.random());
            let c = operand(&theta, rng.random());
            let ab = a.star(&b)?;
            let ba = b.star(&a)?;
            assoc = assoc.max(ab.star(&c)?.max_diff(&a.star(&b.star(&c)?)?));
            unit = unit.max(TorusElement::identity(&theta).star(&a)?.max_diff(&a));
            invol = invol.max(a.involution().involution().max_diff(&a));
            antihom = antihom.max(
                ab.involution()
                    .max_diff(&b.involution().star(&a.involution())?),
            );
            trace = trace.max((ab.trace() - ba.trace()).norm());
            parseval = parseval.max((a.gns_inner(&a)? - c64(a.l2_norm_sqr(), 0.0)).norm());
            for mu in 0..n {
                let lhs = ab.delta(mu)?;
                let rhs = a.delta(mu)?.star(&b)?.add(&a.star(&b.delta(mu)?)?)?;
                leibniz = leibniz.max(lhs.max_diff(&rhs));
                let ibp = a.star(&b.delta(mu)?)?.trace() + a.delta(mu)?.star(&b)?.trace();
                parts = parts.max(ibp.norm());
                // delta(a*) = -(delta a)*
                delta_star = delta_star.max(
                    a.involution()
                        .delta(mu)?
                        .max_diff(&a.delta(mu)?.involution().scale(c64(-1.0, 0.0))),
                );
            }
            for j in 0..n {
                for k in 0..n {
                    let uj = TorusElement::generator(j, &theta)?;
                    let uk = TorusElement::generator(k, &theta)?;
                    let lhs = uj.star(&uk)?;
                    let rhs = uk
                        .star(&uj)?
                        .scale(Complex64::from_polar(1.0, -2.0 * PI * theta.get(j, k)));
                    comm = comm.max(lhs.max_diff(&rhs));
                }
            }
        }
    }
    Ok(vec![
        Case::new("torus.associativity", "(a*b)*c = a*(b*c)", assoc, 1e-12),
        Case::new("torus.unit", "1*a = a", unit, 0.0),
        Case::new("torus.involution_involutive", "(a^*)^* = a", invol, 0.0),
        Case::new("torus.involution_antihom", "(a*b)^* = b^* * a^*", antihom, 1e-13),
        Case::new("torus.trace_property", "tau(ab) = tau(ba)", trace, 1e-13),
        Case::new("torus.gns_parseval", "tau(a^* a) = sum |a(p)|^2", parseval, 1e-13),
        Case::new("torus.delta_leibniz", "delta(ab) = delta(a)b + a delta(b)", leibniz, 1e-13),
        Case::new(
            "torus.integration_by_parts",
            "tau(a delta b) = -tau((delta a) b)",
            parts,
            1e-13,
        ),
        Case::new("torus.delta_star", "delta(a^*) = -(delta a)^*", delta_star, 1e-13),
        Case::new(
            "torus.commutation",
            "u_j u_k = exp(-2 pi i theta_jk) u_k u_j",
            comm,
            1e-13,
        ),
    ])
}

/// Optimized kernels against the reference implementations.
pub fn oracle_suite(seed: u64, pairs: usize) -> Result<Vec<Case>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut star = 0f64;
    for i in 0..pairs {
        let n = if i % 4 == 3 { 3 } else { 2 };
        let theta = random_theta(n, &mut rng);
        let a = operand(&theta, rng.random());
        let b = operand(&theta, rng.random());
        star = star.max(a.star(&b)?.max_diff(&dense_star_oracle(&a, &b)?));
    }
    let zero = SkewMatrix::zero(2);
    let w4 = TruncationWindow::new(2, 4)?;
    let mut grid = 0f64;
    for _ in 0..3 {
        let a = random_element(&zero, &w4, 1.0, rng.random())?;
        let b = random_element(&zero, &w4, 1.0, rng.random())?;
        let lhs = sample_and_multiply(&a, &b, 32)?;
        grid = grid.max(lhs.max_diff(&dense_star_oracle(&a, &b)?));
        grid = grid.max(lhs.max_diff(&a.star(&b)?));
    }
    Ok(vec![
        Case::new("oracle.star_vs_dense", "twisted convolution, literal double sum", star, 1e-13),
        Case::new("oracle.grid_theta0", "Theta = 0 product is pointwise product", grid, 1e-10),
    ])
}

pub fn clifford_suite() -> Vec<Case> {
    let rel = max_of((1..=6).map(|n| GammaSet::new(n).clifford_residual()));
    let herm = max_of((1..=6).map(|n| GammaSet::new(n).hermiticity_residual()));
    vec![
        Case::new(
            "clifford.anticommutators",
            "gamma^i gamma^j + gamma^j gamma^i = 2 delta^ij",
            rel,
            1e-14,
        ),
        Case::new("clifford.hermitian", "gamma^mu hermitian", herm, 1e-14),
    ]
}

fn expected_planar_spectrum() -> Vec<f64> {
    let mut v = Vec::new();
    v.extend([-SQRT_2; 4]);
    v.extend([-1.0; 4]);
    v.extend([0.0; 2]);
    v.extend([1.0; 4]);
    v.extend([SQRT_2; 4]);
    v
}

fn sorted_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    max_of(a.iter().zip(b).map(|(x, y)| (x - y).abs()))
}

/// Truncated spectral triple: spectra, commutators, iterated representations.
pub fn dirac_suite(seed: u64) -> Result<Vec<Case>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd1ac);
    let mut cases = Vec::new();

    let theta = SkewMatrix::planar(0.3);
    let zero = SkewMatrix::zero(2);
    let mut iso = 0f64;
    let mut dense = 0f64;
    for r in 1..=4 {
        let w = TruncationWindow::new(2, r)?;
        let s0 = dirac_spectrum(&zero, &w)?.eigenvalues;
        let s1 = dirac_spectrum(&theta, &w)?.eigenvalues;
        iso = iso.max(sorted_diff(&s0, &s1));
        if r <= 2 {
            dense = dense.max(sorted_diff(&s1, &dirac_spectrum_dense(&theta, &w)?));
        }
    }
    cases.push(Case::new("dirac.isospectral", "spec D independent of Theta", iso, 1e-12));
    cases.push(Case::new("dirac.blockwise_vs_dense", "plumbing", dense, 1e-12));
    let w1 = TruncationWindow::new(2, 1)?;
    let s = dirac_spectrum(&theta, &w1)?.eigenvalues;
    cases.push(Case::new(
        "dirac.spectrum_n2_r1",
        "(sum k_mu gamma^mu)^2 = |k|^2",
        sorted_diff(&s, &expected_planar_spectrum()),
        1e-12,
    ));
    let w3 = TruncationWindow::new(3, 2)?;
    let d3 = dirac_matrix(&SkewMatrix::from_upper(3, &[0.1, 0.2, 0.3])?, &w3)?;
    cases.push(Case::new("dirac.hermitian", "D = D^dagger", d3.hermiticity_residual(), 0.0));

    // interior commutator identity: R = 8, support radius 3, interior radius 5
    let w8 = TruncationWindow::new(2, 8)?;
    let supp3 = TruncationWindow::new(2, 3)?;
    let mut comm = 0f64;
    for _ in 0..2 {
        let a = random_element(&theta, &supp3, 1.5, rng.random())?;
        let lhs = dirac_commutator(&a, &w8)?;
        let rhs = derivative_form(&a, &w8)?;
        comm = comm.max(lhs.max_diff_on_columns(&rhs, &lhs.interior_columns(3)));
    }
    cases.push(Case::new(
        "dirac.commutator_interior",
        "[D, a] = sum_mu delta_mu(a) gamma^mu",
        comm,
        1e-12,
    ));

    // interior homomorphism: supports of radius 2 each, margin 4
    let w6 = TruncationWindow::new(2, 6)?;
    let supp2 = TruncationWindow::new(2, 2)?;
    let mut hom = 0f64;
    for _ in 0..3 {
        let a = random_element(&theta, &supp2, 1.0, rng.random())?;
        let b = random_element(&theta, &supp2, 1.0, rng.random())?;
        let lhs = represent(&a.star(&b)?, &w6)?;
        let prod = represent(&a, &w6)?.matrix() * represent(&b, &w6)?.matrix();
        let rhs = TruncatedOperator::new(w6, 1, 1, prod)?;
        hom = hom.max(lhs.max_diff_on_columns(&rhs, &lhs.interior_columns(4)));
    }
    cases.push(Case::new("dirac.representation_interior", "pi(ab) = pi(a) pi(b)", hom, 1e-12));

    // seminorms
    let w2 = TruncationWindow::new(2, 2)?;
    let supp1 = TruncationWindow::new(2, 1)?;
    let mut mono = 0f64;
    for _ in 0..2 {
        let a = random_element(&theta, &supp1, 1.0, rng.random())?;
        let norms = (0..=3)
            .map(|s| Ok(pi_s(&a, s, &w2)?.spectral_norm()))
            .collect::<Result<Vec<f64>>>()?;
        for pair in norms.windows(2) {
            mono = mono.max(pair[0] - pair[1]);
        }
    }
    cases.push(Case::new("dirac.seminorm_monotone", "||a||_s <= ||a||_{s+1}", mono, 1e-12));
    let u = TorusElement::unitary(LatticeIndex::new(vec![1, -1]), &theta)?;
    let op = represent(&u, &w2)?;
    let unit_norm = (op.norm_on_columns(&op.interior_columns(1)) - 1.0).abs();
    cases.push(Case::new("dirac.unitary_norm", "||U_k|| = 1", unit_norm, 1e-12));

    // pi^1 lower-left block is the commutator
    let a = random_element(&theta, &supp1, 1.0, rng.random())?;
    let p1 = pi_s(&a, 1, &w2)?;
    let h = w2.len() * 2;
    let lower = p1.matrix().view((h, 0), (h, h)).into_owned();
    let c = dirac_commutator(&a, &w2)?;
    let diff = (lower - c.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    cases.push(Case::new("dirac.pi1_block", "pi^1(a) = [[a, 0], [[D,a], a]]", diff, 0.0));
    Ok(cases)
}

/// Checks for one finite covering.
pub fn covering_suite(spec: &CoveringSpec, seed: u64) -> Result<Vec<Case>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0fe);
    let n = spec.dim();
    let base = spec.base_theta();
    let cover = spec.cover_theta();
    let small = TruncationWindow::new(n, if n <= 2 { 2 } else { 1 })?;
    let group = spec.deck_elements()?;
    let order = spec.group_order() as f64;
    let mut cases = vec![Case::new(
        "cover.compatibility",
        "exp(-2 pi i theta_rs) = exp(-2 pi i theta~_rs k_r k_s)",
        spec.compatibility_residual(),
        1e-13,
    )];

    let draw_base = |rng: &mut ChaCha8Rng| random_element(base, &small, 1.5, rng.random());
    let draw_cover = |rng: &mut ChaCha8Rng| random_element(cover, &small, 1.5, rng.random());

    let mut hom = 0f64;
    for _ in 0..5 {
        let a = draw_base(&mut rng)?;
        let b = draw_base(&mut rng)?;
        hom = hom.max(embed(&a.star(&b)?, spec)?.max_diff(&embed(&a, spec)?.star(&embed(&b, spec)?)?));
        let inv = embed(&a.involution(), spec)?.max_diff(&embed(&a, spec)?.involution());
        hom = hom.max(inv);
    }
    cases.push(Case::new("cover.embedding_homomorphism", "u_j -> v_j^{k_j}", hom, 1e-13));

    // orthogonality of the cover basis
    let mut norm_res = 0f64;
    let mut orth = 0f64;
    let id_base = TorusElement::identity(base);
    for l in small.points() {
        let ul = TorusElement::unitary(l.clone(), cover)?;
        let ip = module_inner(&ul, &ul, spec)?;
        norm_res = norm_res.max(ip.max_diff(&id_base.scale(c64(order, 0.0))));
        for l2 in small.points() {
            if !spec.in_base_lattice(&(&l - &l2)) {
                let ul2 = TorusElement::unitary(l2, cover)?;
                orth = orth.max(module_inner(&ul, &ul2, spec)?.max_abs());
            }
        }
    }
    cases.push(Case::new("cover.inner_norm", "<U_l, U_l> = |G| 1", norm_res, 1e-13));
    cases.push(Case::new("cover.inner_orthogonal", "<U_l', U_l''> = 0", orth, 1e-13));

    let mut positivity = 0f64;
    let mut invariance = 0f64;
    let mut linear = 0f64;
    for _ in 0..3 {
        let a = draw_cover(&mut rng)?;
        let b = draw_cover(&mut rng)?;
        let x = draw_base(&mut rng)?;
        let aa = module_inner(&a, &a, spec)?;
        let tr = aa.trace();
        positivity = positivity.max((tr - c64(order * a.l2_norm_sqr(), 0.0)).norm());
        if tr.re < 0.0 {
            positivity = f64::INFINITY;
        }
        let ab = module_inner(&a, &b, spec)?;
        for g in &group {
            let moved = module_inner(&deck_action(g, &a, spec)?, &deck_action(g, &b, spec)?, spec)?;
            invariance = invariance.max(moved.max_diff(&ab));
        }
        let lhs = module_inner(&a, &b.star(&embed(&x, spec)?)?, spec)?;
        linear = linear.max(lhs.max_diff(&ab.star(&x)?));
    }
    cases.push(Case::new("cover.inner_positive", "tau<a,a> = |G| sum |a(l)|^2", positivity, 1e-12));
    cases.push(Case::new("cover.inner_invariant", "<ga, gb> = <a, b>", invariance, 1e-13));
    cases.push(Case::new("cover.inner_right_linear", "<a, b x> = <a, b> x", linear, 1e-13));

    // fixed-point algebra
    let mut fixed = 0f64;
    let mut idem = 0f64;
    let mut oracle = 0f64;
    let mut image = 0f64;
    for _ in 0..5 {
        let x = draw_base(&mut rng)?;
        let ex = embed(&x, spec)?;
        fixed = fixed.max(invariant_projection(&ex, spec)?.max_diff(&ex));
        let a = draw_cover(&mut rng)?;
        let pa = invariant_projection(&a, spec)?;
        idem = idem.max(invariant_projection(&pa, spec)?.max_diff(&pa));
        oracle = oracle.max(pa.max_diff(&brute_group_average(&a, spec)?));
        image = image.max(embed(&descend(&pa, spec, 0.0)?, spec)?.max_diff(&pa));
    }
    cases.push(Case::new("cover.projection_fixes_embedded", "P(embed x) = embed x", fixed, 0.0));
    cases.push(Case::new("cover.projection_image_embedded", "A = A~^G", image, 0.0));
    cases.push(Case::new("cover.projection_idempotent", "P P = P", idem, 0.0));
    cases.push(Case::new("cover.projection_vs_oracle", "(1/|G|) sum_g g(a)", oracle, 1e-14));

    // deck action
    let mut act_hom = 0f64;
    let mut act_mul = 0f64;
    let a = draw_cover(&mut rng)?;
    let b = draw_cover(&mut rng)?;
    let ab = a.star(&b)?;
    for g in &group {
        act_hom = act_hom.max(
            deck_action(g, &ab, spec)?
                .max_diff(&deck_action(g, &a, spec)?.star(&deck_action(g, &b, spec)?)?),
        );
        for h in group.iter().take(8) {
            let twice = deck_action(g, &deck_action(h, &a, spec)?, spec)?;
            act_mul = act_mul.max(twice.max_diff(&deck_action(&g.compose(h, spec), &a, spec)?));
        }
    }
    cases.push(Case::new("cover.deck_automorphism", "g(ab) = g(a) g(b)", act_hom, 1e-13));
    cases.push(Case::new("cover.deck_action", "g(h(a)) = (gh)(a)", act_mul, 1e-14));
    let free = group.iter().filter(|g| !g.is_identity()).all(|g| {
        (0..n).any(|j| {
            let l = LatticeIndex::unit(n, j);
            (g.character(&l, spec) - c64(1.0, 0.0)).norm() > 1e-12
        })
    });
    cases.push(Case::flag("cover.deck_nondegenerate", "G acts freely on the basis", free));

    // connection
    let mut leib = 0f64;
    let mut equiv = 0f64;
    let mut avg = 0f64;
    for _ in 0..3 {
        let a = draw_cover(&mut rng)?;
        let x = draw_base(&mut rng)?;
        let lhs = connection_apply(&a.star(&embed(&x, spec)?)?, spec)?;
        let first = connection_apply(&a, spec)?.right_mul(&x, spec)?;
        let mut second = Vec::new();
        for mu in 0..n {
            second.push(a.star(&embed(&x.delta(mu)?, spec)?)?);
        }
        let rhs = first.add(&crate::covering::ConnectionValue::new(second)?)?;
        leib = leib.max(lhs.max_diff(&rhs));
        equiv = equiv.max(equivariance_check(&a, spec)?);
        avg = avg.max(averaged_connection(&a, spec)?.max_diff(&connection_apply(&a, spec)?));
    }
    cases.push(Case::new("cover.connection_leibniz", "nabla(a x) = nabla(a) x + a [D, x]", leib, 1e-12));
    cases.push(Case::new("cover.connection_equivariant", "nabla(g a) = g nabla(a)", equiv, 1e-13));
    cases.push(Case::new(
        "cover.connection_averaging",
        "(1/|G|) sum g^-1 nabla(g a) = nabla(a)",
        avg,
        1e-13,
    ));
    if n == 2 {
        cases.push(Case::new(
            "cover.connection_leibniz_operator",
            "nabla(a x) = nabla(a) x + a [D, x]",
            connection_operator_residual(spec, &mut rng)?,
            1e-12,
        ));
    }
    cases.extend(lift_suite(spec, seed)?);
    Ok(cases)
}

/// Leibniz rule of the connection as operators on a truncation of the cover.
fn connection_operator_residual(spec: &CoveringSpec, rng: &mut ChaCha8Rng) -> Result<f64> {
    let n = spec.dim();
    let kmax = *spec.multiplicities().iter().max().unwrap() as i64;
    let radius = 2 + kmax + 4;
    let window = TruncationWindow::new(n, radius as u32)?;
    let supp = TruncationWindow::new(n, 1)?;
    let a = random_element(spec.cover_theta(), &supp, 1.0, rng.random())?;
    let x = random_element(spec.base_theta(), &supp, 1.0, rng.random())?;
    let ex = embed(&x, spec)?;
    let gammas = GammaSet::new(n);
    let m = gammas.spinor_dim();
    let lhs = connection_apply(&a.star(&ex)?, spec)?.to_operator(&window)?;
    let nabla_a = connection_apply(&a, spec)?.to_operator(&window)?;
    let lift = |op: TruncatedOperator| -> Result<CMatrix> { Ok(op.tensor_spinors(m)?.into_matrix()) };
    let pex = lift(represent(&ex, &window)?)?;
    let pa = lift(represent(&a, &window)?)?;
    let d = lifted_dirac_blocks(spec, &window)?;
    let dx = d.commutator(&TruncatedOperator::new(window, m, 1, pex.clone())?)?;
    let rhs = nabla_a.matrix() * &pex + &pa * dx.matrix();
    let rhs = TruncatedOperator::new(window, m, 1, rhs)?;
    let margin = 1 + kmax;
    Ok(lhs.max_diff_on_columns(&rhs, &lhs.interior_columns(margin)))
}

/// Lifted Dirac operator against the base one.
pub fn lift_suite(spec: &CoveringSpec, seed: u64) -> Result<Vec<Case>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x11f7);
    let n = spec.dim();
    let k = spec.multiplicities();
    let kmax = *k.iter().max().unwrap() as i64;
    let base_w = TruncationWindow::new(n, 2)?;
    let cover_w = TruncationWindow::new(n, (2 * kmax) as u32)?;
    let lifted = lifted_dirac_blocks(spec, &cover_w)?;
    let base = dirac_blocks(spec.base_theta(), &base_w)?;
    let mut restrict = 0f64;
    for (i, p) in base_w.points().iter().enumerate() {
        let l = p.scale_by(k);
        let j = cover_w.index_of(&l).expect("embedded point in window");
        let d = lifted.block(j) - base.block(i);
        restrict = restrict.max(d.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let zero_block = lifted
        .block(cover_w.index_of(&LatticeIndex::zero(n)).unwrap())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let herm = lifted.to_operator(1).hermiticity_residual();

    // [D~, embed(a)] = embedded derivative form, away from the boundary
    let mut comm = 0f64;
    if n == 2 {
        let w = TruncationWindow::new(n, (3 * kmax + 2) as u32)?;
        let m = GammaSet::new(n).spinor_dim();
        let a = random_element(spec.base_theta(), &TruncationWindow::new(n, 1)?, 1.0, rng.random())?;
        let ea = embed(&a, spec)?;
        let d = lifted_dirac_blocks(spec, &w)?;
        let lhs = d.commutator(&represent(&ea, &w)?.tensor_spinors(m)?)?;
        let gammas = GammaSet::new(n);
        let mut rhs = CMatrix::zeros(w.len() * m, w.len() * m);
        for mu in 0..n {
            let rep = represent(&embed(&a.delta(mu)?, spec)?, &w)?;
            rhs += rep.into_matrix().kronecker(gammas.gamma(mu));
        }
        let rhs = TruncatedOperator::new(w, m, 1, rhs)?;
        comm = lhs.max_diff_on_columns(&rhs, &lhs.interior_columns(kmax));
    }
    Ok(vec![
        Case::new("lift.restricts_to_base", "lifted D on embedded modes = D", restrict, 1e-13),
        Case::new("lift.zero_block", "plumbing", zero_block, 0.0),
        Case::new("lift.hermitian", "D~ = D~^dagger", herm, 0.0),
        Case::new("lift.commutator_embedded", "[D~, embed a] = embed [D, a]", comm, 1e-12),
    ])
}

/// Covering tower structure.
pub fn tower_suite(base: &SkewMatrix, primes: &[i64], seed: u64) -> Result<Vec<Case>> {
    let tower = CoveringTower::build(base, primes)?;
    let rows = tower.exactness_table()?;
    let mut cases = vec![Case::flag(
        "tower.exact_sequences",
        "0 -> G(u|m) -> G(u|l) -> G(m|l) -> 0",
        rows.iter().all(|r| r.ok()),
    )];
    let mut orders_ok = true;
    for l in 0..=tower.depth() {
        for m in l..=tower.depth() {
            for u in m..=tower.depth() {
                orders_ok &= tower.group_order(l, u)
                    == tower.group_order(l, m) * tower.group_order(m, u);
            }
        }
    }
    cases.push(Case::flag("tower.order_multiplicative", "|G(u|l)| = |G(u|m)| |G(m|l)|", orders_ok));
    let n = base.dim();
    let w = TruncationWindow::new(n, 2)?;
    let a = random_element(base, &w, 1.0, seed)?;
    cases.push(Case::new(
        "tower.embedding_composition",
        "embedding composites equal one-shot embedding",
        tower.composition_residual(&a)?,
        0.0,
    ));
    Ok(cases)
}

fn gaussian_integer_matrix(order: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(order, order, |_, _| {
        c64(rng.random_range(-4..=4) as f64, rng.random_range(-4..=4) as f64)
    })
}

fn decaying_matrix(order: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(order, order, |m, n| {
        let bound = (1.0 + m as f64 + n as f64).powi(-2);
        Complex64::from_polar(bound * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>())
    })
}

/// Moyal plane identities at truncation `order` with `theta = 2`.
pub fn moyal_suite(seed: u64, order: usize) -> Result<Vec<Case>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x303a);
    let theta = 2.0;
    let mut cases = Vec::new();

    // matrix unit table on a spread of indices including the boundary
    let picks: Vec<usize> = {
        let mut v: Vec<usize> = (0..order.min(6)).collect();
        for x in [order / 2, order - 2, order - 1] {
            if !v.contains(&x) {
                v.push(x);
            }
        }
        v
    };
    let mut table = 0f64;
    for &m in &picks {
        for &n in &picks {
            let fmn = MoyalMatrix::unit(theta, order, m, n)?;
            for &k in &picks {
                for &l in &picks {
                    let fkl = MoyalMatrix::unit(theta, order, k, l)?;
                    let expect = if n == k {
                        MoyalMatrix::unit(theta, order, m, l)?
                    } else {
                        MoyalMatrix::zero(theta, order)?
                    };
                    table = table.max(fmn.product(&fkl)?.interior_diff(&expect));
                }
            }
        }
    }
    cases.push(Case::new("moyal.unit_table", "f_mn x f_kl = delta_nk f_ml", table, 0.0));

    let ladder = LadderSet::new(order)?;
    let mut rel = 0f64;
    let mut ham = 0f64;
    let sq = |x: usize| (2.0 * x as f64).sqrt();
    for m in 0..order {
        for n in 0..order {
            let f = MoyalMatrix::unit(theta, order, m, n)?;
            let scaled = |mm: Option<usize>, nn: Option<usize>, s: f64| -> Result<MoyalMatrix> {
                match (mm, nn) {
                    (Some(a), Some(b)) if a < order && b < order => Ok(MoyalMatrix::new(
                        theta,
                        MoyalMatrix::unit(theta, order, a, b)?.coeffs() * c64(s, 0.0),
                    )?),
                    _ => MoyalMatrix::zero(theta, order),
                }
            };
            let checks = [
                (ladder.left(&ladder.a, &f, 0)?, scaled(m.checked_sub(1), Some(n), sq(m))?),
                (ladder.right(&ladder.a, &f, 0)?, scaled(Some(m), Some(n + 1), sq(n + 1))?),
                (ladder.left(&ladder.abar, &f, 0)?, scaled(Some(m + 1), Some(n), sq(m + 1))?),
                (ladder.right(&ladder.abar, &f, 0)?, scaled(Some(m), n.checked_sub(1), sq(n))?),
            ];
            for (got, expect) in &checks {
                rel = rel.max(got.interior_diff(&expect.clone().with_margin(1)));
            }
            let h = ladder.left(&ladder.h, &f, 0)?;
            ham = ham.max(h.interior_diff(&scaled(Some(m), Some(n), 2.0 * m as f64 + 1.0)?));
        }
    }
    cases.push(Case::new("moyal.ladder_relations", "a x f_mn = sqrt(2m) f_{m-1,n} and companions", rel, 0.0));
    cases.push(Case::new("moyal.hamiltonian", "H x f_mn = (2m+1) f_mn", ham, 0.0));

    let keep = order - 1;
    let id = CMatrix::identity(order, order);
    let block = |m: CMatrix| -> f64 {
        m.view((0, 0), (keep, keep))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    };
    let lowering = block(&ladder.abar * &ladder.a - (&ladder.h - &id));
    let raising = block(&ladder.a * &ladder.abar - (&ladder.h + &id));
    let ccr = block(&ladder.a * &ladder.abar - &ladder.abar * &ladder.a - &id * c64(2.0, 0.0));
    cases.push(Case::new("moyal.abar_a", "abar x a = H - 1", lowering, 1e-12));
    cases.push(Case::new("moyal.a_abar", "a x abar = H + 1", raising, 1e-12));
    cases.push(Case::new("moyal.ccr", "a abar - abar a = 2", ccr, 1e-12));

    let mut leib = 0f64;
    for _ in 0..3 {
        let x = MoyalMatrix::new(theta, decaying_matrix(order, &mut rng))?;
        let y = MoyalMatrix::new(theta, decaying_matrix(order, &mut rng))?;
        for axis in [Axis::P, Axis::Q] {
            let lhs = moyal_partial(&x.product(&y)?, axis)?;
            let rhs = moyal_partial(&x, axis)?
                .product(&y)?
                .add(&x.product(&moyal_partial(&y, axis)?)?)?;
            leib = leib.max(lhs.interior_diff(&rhs));
        }
    }
    cases.push(Case::new("moyal.leibniz", "d(f x g) = df x g + f x dg", leib, 1e-13));

    // exact arithmetic on Gaussian integers
    let x = MoyalMatrix::new(theta, gaussian_integer_matrix(order, &mut rng))?;
    let y = MoyalMatrix::new(theta, gaussian_integer_matrix(order, &mut rng))?;
    let z = MoyalMatrix::new(theta, gaussian_integer_matrix(order, &mut rng))?;
    let tr = (x.product(&y)?.trace() - y.product(&x)?.trace()).norm();
    cases.push(Case::new("moyal.trace_property", "tr(xy) = tr(yx)", tr, 0.0));
    let assoc = x.product(&y)?.product(&z)?.interior_diff(&x.product(&y.product(&z)?)?);
    cases.push(Case::new("moyal.associativity", "(xy)z = x(yz)", assoc, 0.0));
    let unit = MoyalMatrix::identity(theta, order)?.product(&x)?.interior_diff(&x);
    cases.push(Case::new("moyal.unit", "sum_m f_mm is the unit", unit, 0.0));

    let f00 = MoyalMatrix::unit(theta, order, 0, 0)?;
    cases.push(Case::new("moyal.r0_vacuum", "r_0(f_00) = 1", (seminorm_rk(&f00, 0) - 1.0).abs(), 1e-14));
    cases.push(Case::new("moyal.r1_vacuum", "r_1(f_00) = 1 at theta = 2", (seminorm_rk(&f00, 1) - 1.0).abs(), 1e-14));
    let mut ladder_rk = 0f64;
    let mut norms = 0f64;
    for _ in 0..3 {
        let x = MoyalMatrix::new(theta, decaying_matrix(order, &mut rng))?;
        for k in 0..3 {
            ladder_rk = ladder_rk.max(seminorm_rk(&x, k) - seminorm_rk(&x, k + 1));
        }
        let (fro, spec) = norm_pair(&x);
        norms = norms.max(spec - fro);
    }
    cases.push(Case::new("moyal.seminorm_ladder", "r_k <= r_{k+1} for theta = 2", ladder_rk.max(0.0), 0.0));
    cases.push(Case::new("moyal.spectral_le_frobenius", "||c||_op <= ||c||_2", norms.max(0.0), 1e-12));

    // tensor products, exact on Gaussian integers
    let small = order.min(8);
    let parts: Vec<MoyalMatrix> = (0..4)
        .map(|_| MoyalMatrix::new(theta, gaussian_integer_matrix(small, &mut rng)))
        .collect::<Result<_>>()?;
    let left = tensor_combine(&parts[0..2])?;
    let right = tensor_combine(&parts[2..4])?;
    let prod = left.product(&right)?;
    let direct = left.materialize() * right.materialize();
    let tens = (prod.materialize() - direct).iter().map(|z| z.norm()).fold(0.0, f64::max);
    cases.push(Case::new("moyal.tensor_factorizes", "(x1 (x) x2)(y1 (x) y2) = x1y1 (x) x2y2", tens, 0.0));
    let small_ladder = LadderSet::new(small)?;
    let acted = small_ladder.left(&small_ladder.a, &left, 0)?;
    let local = (acted.factors()[1].clone() - left.factors()[1].clone())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    cases.push(Case::new("moyal.tensor_locality", "plumbing", local, 0.0));
    Ok(cases)
}

/// Bigraded deformed product and its gauge equivalence with the twisted
/// product on the two-torus.
pub fn bigraded_suite(seed: u64) -> Result<Vec<Case>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb16a);
    let theta = 0.3;
    let t = SkewMatrix::planar(theta);
    let zero = SkewMatrix::zero(2);
    let lambda = bigraded_lambda(theta);
    let w3 = TruncationWindow::new(2, 3)?;

    let mut assoc = 0f64;
    for _ in 0..5 {
        let x = random_element(&zero, &w3, 2.0, rng.random())?;
        let y = random_element(&zero, &w3, 2.0, rng.random())?;
        let z = random_element(&zero, &w3, 2.0, rng.random())?;
        let lhs = x.bigraded_star(&y, lambda)?.bigraded_star(&z, lambda)?;
        let rhs = x.bigraded_star(&y.bigraded_star(&z, lambda)?, lambda)?;
        assoc = assoc.max(lhs.max_diff(&rhs));
    }

    // brute force over every basis pair, for each candidate convention
    let pts = w3.points();
    let convention_residual = |gauge_sign: f64, lambda_sign: f64| -> Result<f64> {
        let lam = Complex64::from_polar(1.0, lambda_sign * 2.0 * PI * theta);
        let gauge = |e: &TorusElement| -> Result<TorusElement> {
            let g = e.map_coeffs(|k, c| {
                c * Complex64::from_polar(1.0, gauge_sign * PI * theta * (k.0[0] * k.0[1]) as f64)
            });
            g.with_theta(&zero)
        };
        let mut worst = 0f64;
        for k in &pts {
            for p in &pts {
                let uk = TorusElement::unitary(k.clone(), &t)?;
                let up = TorusElement::unitary(p.clone(), &t)?;
                let lhs = gauge(&uk.star(&up)?)?;
                let rhs = gauge(&uk)?.bigraded_star(&gauge(&up)?, lam)?;
                worst = worst.max(lhs.max_diff(&rhs));
            }
        }
        Ok(worst)
    };
    let mut matching = Vec::new();
    for gs in [1.0, -1.0] {
        for ls in [1.0, -1.0] {
            if convention_residual(gs, ls)? <= 1e-13 {
                matching.push((gs, ls));
            }
        }
    }
    let unique = matching == vec![(1.0, 1.0)];

    let mut gauge_res = 0f64;
    for k in &pts {
        for p in &pts {
            let uk = TorusElement::unitary(k.clone(), &t)?;
            let up = TorusElement::unitary(p.clone(), &t)?;
            let lhs = uk.star(&up)?.cocycle_gauge(theta)?;
            let rhs = uk.cocycle_gauge(theta)?.bigraded_star(&up.cocycle_gauge(theta)?, lambda)?;
            gauge_res = gauge_res.max(lhs.max_diff(&rhs));
        }
    }
    for _ in 0..3 {
        let x = random_element(&t, &w3, 2.0, rng.random())?;
        let y = random_element(&t, &w3, 2.0, rng.random())?;
        let lhs = x.star(&y)?.cocycle_gauge(theta)?;
        let rhs = x.cocycle_gauge(theta)?.bigraded_star(&y.cocycle_gauge(theta)?, lambda)?;
        gauge_res = gauge_res.max(lhs.max_diff(&rhs));
    }
    Ok(vec![
        Case::new("bigraded.associativity", "(x*y)*z = x*(y*z)", assoc, 1e-13),
        Case::flag("bigraded.gauge_convention", "brute-force phase search", unique),
        Case::new(
            "bigraded.gauge_equivalence",
            "gauge(x star_Theta y) = gauge(x) * gauge(y)",
            gauge_res,
            1e-13,
        ),
    ])
}

/// Every suite at default scales.
pub fn verify_all(seed: u64, tolerance: Option<f64>) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut cases = Vec::new();
    cases.extend(torus_suite(seed, 34)?);
    cases.extend(oracle_suite(seed, 100)?);
    cases.extend(clifford_suite());
    cases.extend(dirac_suite(seed)?);
    let spec = CoveringSpec::new(&SkewMatrix::planar(0.5), &[2, 3])?;
    cases.extend(covering_suite(&spec, seed)?);
    cases.extend(tower_suite(&SkewMatrix::planar(0.5), &[2, 3, 5], seed)?);
    cases.extend(moyal_suite(seed, 32)?);
    cases.extend(bigraded_suite(seed)?);
    let report = VerificationReport::new("all", seed, cases, start.elapsed().as_secs_f64());
    Ok(match tolerance {
        Some(t) => report.with_tolerance(t),
        None => report,
    })
}
