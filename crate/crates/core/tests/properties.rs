use std::f64::consts::PI;

use nctorus::oracles::dense_star_oracle;
use nctorus::torus::{random_element, random_sparse_element};
use nctorus::{Complex64, LatticeIndex, SkewMatrix, TorusElement, TruncationWindow};
use proptest::prelude::*;

fn theta_strategy(n: usize) -> impl Strategy<Value = SkewMatrix> {
    prop::collection::vec(-1.0f64..1.0, n * (n - 1) / 2)
        .prop_map(move |upper| SkewMatrix::from_upper(n, &upper).unwrap())
}

fn setup() -> impl Strategy<Value = (SkewMatrix, u64, u64, u64)> {
    (2usize..=4).prop_flat_map(|n| (theta_strategy(n), any::<u64>(), any::<u64>(), any::<u64>()))
}

fn element(theta: &SkewMatrix, seed: u64) -> TorusElement {
    if theta.dim() == 2 {
        let w = TruncationWindow::new(2, 3).unwrap();
        random_element(theta, &w, 2.0, seed).unwrap()
    } else {
        random_sparse_element(theta, 3, 10, seed)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn associative((theta, s1, s2, s3) in setup()) {
        let (a, b, c) = (element(&theta, s1), element(&theta, s2), element(&theta, s3));
        let lhs = a.star(&b).unwrap().star(&c).unwrap();
        let rhs = a.star(&b.star(&c).unwrap()).unwrap();
        prop_assert!(lhs.max_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn unit_is_exact((theta, s1, _s2, _s3) in setup()) {
        let a = element(&theta, s1);
        let one = TorusElement::identity(&theta);
        prop_assert_eq!(one.star(&a).unwrap().max_diff(&a), 0.0);
        prop_assert_eq!(a.star(&one).unwrap().max_diff(&a), 0.0);
    }

    #[test]
    fn involution_reverses_products((theta, s1, s2, _s3) in setup()) {
        let (a, b) = (element(&theta, s1), element(&theta, s2));
        let lhs = a.star(&b).unwrap().involution();
        let rhs = b.involution().star(&a.involution()).unwrap();
        prop_assert!(lhs.max_diff(&rhs) <= 1e-13);
        prop_assert_eq!(a.involution().involution(), a);
    }

    #[test]
    fn trace_is_tracial((theta, s1, s2, _s3) in setup()) {
        let (a, b) = (element(&theta, s1), element(&theta, s2));
        let d = a.star(&b).unwrap().trace() - b.star(&a).unwrap().trace();
        prop_assert!(d.norm() <= 1e-13);
    }

    #[test]
    fn derivations((theta, s1, s2, _s3) in setup()) {
        let (a, b) = (element(&theta, s1), element(&theta, s2));
        let ab = a.star(&b).unwrap();
        for mu in 0..theta.dim() {
            let da = a.delta(mu).unwrap();
            let db = b.delta(mu).unwrap();
            let rhs = da.star(&b).unwrap().add(&a.star(&db).unwrap()).unwrap();
            prop_assert!(ab.delta(mu).unwrap().max_diff(&rhs) <= 1e-13);
            let parts = a.star(&db).unwrap().trace() + da.star(&b).unwrap().trace();
            prop_assert!(parts.norm() <= 1e-13);
        }
    }

    #[test]
    fn commutation_relation(theta in (2usize..=4).prop_flat_map(theta_strategy)) {
        let n = theta.dim();
        for j in 0..n {
            for k in 0..n {
                let uj = TorusElement::generator(j, &theta).unwrap();
                let uk = TorusElement::generator(k, &theta).unwrap();
                let phase = Complex64::from_polar(1.0, -2.0 * PI * theta.get(j, k));
                let rhs = uk.star(&uj).unwrap().scale(phase);
                prop_assert!(uj.star(&uk).unwrap().max_diff(&rhs) <= 1e-13);
            }
        }
    }

    #[test]
    fn matches_dense_oracle((theta, s1, s2, _s3) in setup()) {
        let (a, b) = (element(&theta, s1), element(&theta, s2));
        let fast = a.star(&b).unwrap();
        prop_assert!(fast.max_diff(&dense_star_oracle(&a, &b).unwrap()) <= 1e-13);
    }

    #[test]
    fn gns_inner_is_positive((theta, s1, _s2, _s3) in setup()) {
        let a = element(&theta, s1);
        let v = a.gns_inner(&a).unwrap();
        prop_assert!(v.re >= 0.0);
        prop_assert!((v.re - a.l2_norm_sqr()).abs() <= 1e-13 && v.im.abs() <= 1e-13);
    }
}

#[test]
fn unitary_product_phase() {
    let theta = SkewMatrix::planar(0.3);
    let k = LatticeIndex::new(vec![2, -1]);
    let p = LatticeIndex::new(vec![1, 3]);
    let prod = TorusElement::unitary(k.clone(), &theta)
        .unwrap()
        .star(&TorusElement::unitary(p.clone(), &theta).unwrap())
        .unwrap();
    assert_eq!(prod.support_len(), 1);
    let expected = Complex64::from_polar(1.0, -PI * theta.pairing(&k, &p));
    assert!((prod.coeff(&(&k + &p)) - expected).norm() < 1e-15);
}
