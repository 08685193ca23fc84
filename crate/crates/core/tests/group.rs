use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wigner_core::catalog;
use wigner_core::group::{inverse, multiply, CoadjointPoint, GroupElement, GroupModel, LieAlgebraElement};
use wigner_core::linalg::{self, Mat, Vector};

fn setup(idx: usize, seed: u64) -> (GroupModel, ChaCha8Rng) {
    let m = catalog::all().swap_remove(idx).model;
    ((*m).clone(), ChaCha8Rng::seed_from_u64(seed))
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_iterator(n, (0..n).map(|_| rng.gen_range(-1.5..1.5)))
}

fn close_mat(a: &Mat, b: &Mat, tol: f64) -> bool {
    (a - b).amax() <= tol * (1.0 + b.amax())
}

fn close_el(a: &GroupElement, b: &GroupElement, tol: f64) -> bool {
    close_mat(&a.h, &b.h, tol) && (&a.b - &b.b).amax() <= tol * (1.0 + b.b.amax())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn group_axioms(idx in 0usize..5, seed in any::<u64>()) {
        let (m, mut rng) = setup(idx, seed);
        let [g1, g2, g3] = [0; 3].map(|_| m.sample_element(&mut rng, 0.8, 1.5));
        let e = GroupElement::identity(m.n);
        prop_assert!(close_el(&multiply(&multiply(&g1, &g2), &g3), &multiply(&g1, &multiply(&g2, &g3)), 1e-12));
        prop_assert!(close_el(&multiply(&e, &g1), &g1, 0.0));
        prop_assert!(close_el(&multiply(&g1, &e), &g1, 0.0));
        let inv = inverse(&g1).unwrap();
        prop_assert!(close_el(&multiply(&g1, &inv), &e, 1e-12));
        prop_assert!(close_el(&multiply(&inv, &g1), &e, 1e-12));
    }

    #[test]
    fn adjoint_is_a_homomorphism(idx in 0usize..5, seed in any::<u64>()) {
        let (m, mut rng) = setup(idx, seed);
        let g1 = m.sample_element(&mut rng, 0.8, 1.5);
        let g2 = m.sample_element(&mut rng, 0.8, 1.5);
        let mh = m.adjoint_matrix_h(&(&g1.h * &g2.h)).unwrap();
        prop_assert!(close_mat(&mh, &(m.adjoint_matrix_h(&g1.h).unwrap() * m.adjoint_matrix_h(&g2.h).unwrap()), 1e-10));
        let mg = m.adjoint_matrix_g(&multiply(&g1, &g2)).unwrap();
        prop_assert!(close_mat(&mg, &(m.adjoint_matrix_g(&g1).unwrap() * m.adjoint_matrix_g(&g2).unwrap()), 1e-10));
    }

    #[test]
    fn adjoint_matches_conjugation(idx in 0usize..5, seed in any::<u64>()) {
        let (m, mut rng) = setup(idx, seed);
        let g = m.sample_element(&mut rng, 0.8, 1.5);
        let x = LieAlgebraElement::new(random_vec(&mut rng, m.n), random_vec(&mut rng, m.n));
        let a = g.affine();
        let conj = &a * m.algebra_matrix(&x) * linalg::inverse_guarded(&a, "affine").unwrap();
        let want = m.algebra_coords(&conj).unwrap().to_vec();
        let got = m.adjoint_matrix_g(&g).unwrap() * Vector::from_vec(x.to_vec());
        let err = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10 * (1.0 + want.iter().fold(0.0f64, |s, v| s.max(v.abs()))), "err {err}");
    }

    #[test]
    fn coadjoint_is_a_left_action(idx in 0usize..5, seed in any::<u64>()) {
        let (m, mut rng) = setup(idx, seed);
        let g1 = m.sample_element(&mut rng, 0.8, 1.5);
        let g2 = m.sample_element(&mut rng, 0.8, 1.5);
        let p = CoadjointPoint::new(random_vec(&mut rng, m.n), random_vec(&mut rng, m.n));
        let twice = m.coadjoint_apply(&g1, &m.coadjoint_apply(&g2, &p).unwrap()).unwrap();
        let once = m.coadjoint_apply(&multiply(&g1, &g2), &p).unwrap();
        let (a, b) = (Vector::from_vec(twice.to_vec()), Vector::from_vec(once.to_vec()));
        prop_assert!((&a - &b).amax() < 1e-10 * (1.0 + b.amax()));
        let e = m.coadjoint_apply(&GroupElement::identity(m.n), &p).unwrap();
        let moved = e.to_vec().iter().zip(p.to_vec()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(moved < 1e-14);
    }

    #[test]
    fn coadjoint_preserves_the_pairing(idx in 0usize..5, seed in any::<u64>()) {
        let (m, mut rng) = setup(idx, seed);
        let g = m.sample_element(&mut rng, 0.8, 1.5);
        let p = CoadjointPoint::new(random_vec(&mut rng, m.n), random_vec(&mut rng, m.n));
        let x = Vector::from_vec(LieAlgebraElement::new(random_vec(&mut rng, m.n), random_vec(&mut rng, m.n)).to_vec());
        let lhs = Vector::from_vec(m.coadjoint_apply(&g, &p).unwrap().to_vec()).dot(&x);
        let ad_inv_x = m.adjoint_matrix_g(&inverse(&g).unwrap()).unwrap() * &x;
        let rhs = Vector::from_vec(p.to_vec()).dot(&ad_inv_x);
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn modular_functions_are_multiplicative(idx in 0usize..5, seed in any::<u64>()) {
        let (m, mut rng) = setup(idx, seed);
        let g1 = m.sample_element(&mut rng, 0.8, 1.5);
        let g2 = m.sample_element(&mut rng, 0.8, 1.5);
        let (dg1, dh1) = m.modular_functions(&g1).unwrap();
        let (dg2, dh2) = m.modular_functions(&g2).unwrap();
        let (dg, dh) = m.modular_functions(&multiply(&g1, &g2)).unwrap();
        prop_assert!((dg - dg1 * dg2).abs() < 1e-10 * dg);
        prop_assert!((dh - dh1 * dh2).abs() < 1e-10 * dh);
    }

    #[test]
    fn haar_density_product_form(idx in 0usize..5, seed in any::<u64>()) {
        let (m, mut rng) = setup(idx, seed);
        let x_q = m.sample_x_q(&mut rng, 1.5);
        let x = LieAlgebraElement::new(x_q.clone(), random_vec(&mut rng, m.n));
        let factor = |a: &Mat| {
            let half = a * 0.5;
            linalg::det(&(linalg::matrix_exp(&-&half).unwrap() * linalg::sinch(&half, &m.series).unwrap()))
        };
        let xq = m.x_q_matrix(x_q.as_slice());
        let want = (factor(&xq) * factor(&m.ad(x_q.as_slice()).unwrap())).abs();
        let got = m.haar_density_g(&x).unwrap();
        prop_assert!((got - want).abs() < 1e-10 * want, "{got} vs {want}");
    }
}
