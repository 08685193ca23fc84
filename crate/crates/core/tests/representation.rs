use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wigner_core::catalog::{self, CatalogEntry};
use wigner_core::group::{multiply, GroupModel};
use wigner_core::linalg::{self, Vector};
use wigner_core::orbit;
use wigner_core::quadrature::QuadratureSpec;
use wigner_core::representation::{
    self as rep, admissibility_integral, duflo_moore_apply, inner_product, orthogonality_integral, rep_apply,
    OrbitFunction,
};

/// A Gaussian well inside orbit `label`: center `2·k_j`, width 0.25.
fn signal(e: &CatalogEntry, label: usize, rng: &mut ChaCha8Rng) -> OrbitFunction {
    let k = &e.model.orbits[label].representative;
    let center: Vec<f64> = k.iter().map(|v| 2.0 * v + rng.gen_range(-0.2..0.2)).collect();
    let slope: Vec<f64> = (0..k.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    OrbitFunction::gaussian_with(e.model.clone(), label, &center, 0.25, Complex64::new(0.6, 0.8), &slope).unwrap()
}

fn k_points(n: usize) -> usize {
    match n {
        2 => 96,
        3 => 48,
        _ => 26,
    }
}

#[test]
fn unitarity_on_every_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for e in catalog::all() {
        let m = &e.model;
        let trials = if m.n == 4 { 8 } else { 30 };
        for _ in 0..trials {
            let label = rng.gen_range(0..m.orbits.len());
            let f = signal(&e, label, &mut rng);
            let g = m.sample_element(&mut rng, 0.4, 2.0);
            let u = rep_apply(&g, &f).unwrap();
            let (a, b) = (f.norm_with(k_points(m.n)), u.norm_with(k_points(m.n)));
            assert!((a - b).abs() < 1e-6, "{}: {a} vs {b}", m.name);
        }
    }
}

#[test]
fn orbit_subspaces_are_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for e in catalog::all() {
        let m = &e.model;
        let f = signal(&e, 0, &mut rng);
        let g = m.sample_element(&mut rng, 0.5, 1.0);
        let u = rep_apply(&g, &f).unwrap();
        for _ in 0..200 {
            let k: Vec<f64> = (0..m.n).map(|_| rng.gen_range(-4.0..4.0)).collect();
            if orbit::classify_label(&k, m) != Some(0) {
                assert_eq!(u.evaluate(&k), Complex64::new(0.0, 0.0));
            }
        }
    }
}

#[test]
fn duflo_moore_density_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for e in catalog::all() {
        let m = &e.model;
        for _ in 0..50 {
            let o = &m.orbits[rng.gen_range(0..m.orbits.len())];
            let x = m.sample_x_q(&mut rng, 0.8);
            let k = linalg::matrix_exp(&m.x_q_matrix(x.as_slice()))
                .unwrap()
                .tr_mul(&Vector::from_column_slice(&o.representative));
            let hm = linalg::matrix_exp(&m.x_q_matrix(m.sample_x_q(&mut rng, 0.8).as_slice())).unwrap();
            let h = wigner_core::group::GroupElement::new(Vector::zeros(m.n), hm).unwrap();
            let (_, dh) = m.modular_functions(&h).unwrap();
            let lhs = orbit::duflo_moore_density(&h.h.tr_mul(&k), o, m).unwrap();
            let rhs = dh / linalg::det(&h.h).abs() * orbit::duflo_moore_density(&k, o, m).unwrap();
            assert!((lhs - rhs).abs() < 1e-10 * rhs.abs(), "{}: {lhs} vs {rhs}", m.name);
        }
    }
}

fn diagonal_quad(model: &GroupModel, half: f64) -> QuadratureSpec {
    QuadratureSpec::for_model(model, 48, half, 1e-3).unwrap()
}

#[test]
fn admissibility_matches_prediction() {
    let e = catalog::make_diagonal();
    let eta = OrbitFunction::gaussian(e.model.clone(), 0, &[2.0, 3.0], 0.3).unwrap();
    let r = admissibility_integral(&eta, &diagonal_quad(&e.model, 2.5)).unwrap();
    let c_norm = {
        let c = duflo_moore_apply(&eta, 1).unwrap();
        inner_product(&c, &c).re
    };
    assert!((r.predicted.re - c_norm * eta.norm().powi(2)).abs() < 1e-9 * c_norm);
    assert!(r.rel_err() < 0.05, "{r:?}");
    assert!(r.integral.im.abs() < 1e-9 * r.integral.re);
}

#[test]
fn admissibility_grows_toward_the_boundary() {
    let e = catalog::make_diagonal();
    let mut last = 0.0;
    for c in [2.5, 1.8, 1.2] {
        let eta = OrbitFunction::gaussian(e.model.clone(), 0, &[c, 2.0], 0.15).unwrap();
        let q = QuadratureSpec::for_model(&e.model, 96, 2.0, 1e-3).unwrap();
        let r = admissibility_integral(&eta, &q).unwrap();
        assert!(r.integral.re > last, "not monotone at center {c}: {}", r.integral.re);
        assert!(r.rel_err() < 0.05, "{r:?}");
        last = r.integral.re;
    }
}

#[test]
fn orthogonality_relation_rank_one() {
    let e = catalog::make_sim2();
    let m = e.model.clone();
    let eta1 = OrbitFunction::gaussian(m.clone(), 0, &[1.5, 0.5], 0.3).unwrap();
    let eta2 =
        OrbitFunction::gaussian_with(m.clone(), 0, &[1.4, 0.6], 0.3, Complex64::new(0.0, 1.0), &[0.3, -0.2]).unwrap();
    let phi1 = OrbitFunction::gaussian(m.clone(), 0, &[-1.0, 1.0], 0.4).unwrap();
    let phi2 =
        OrbitFunction::gaussian_with(m.clone(), 0, &[-1.1, 0.9], 0.4, Complex64::new(1.0, 0.0), &[0.5, 0.0]).unwrap();
    let q = QuadratureSpec::for_model(&m, 48, 3.0, 1e-3).unwrap();
    let r = orthogonality_integral(&eta1, &eta2, &phi1, &phi2, &q).unwrap();
    assert!(r.rel_err() < 0.05, "{r:?}");
}

#[test]
fn sesquilinear_inner_product() {
    let e = catalog::make_diagonal();
    let f = OrbitFunction::gaussian(e.model.clone(), 0, &[2.0, 3.0], 0.3).unwrap();
    let g = OrbitFunction::gaussian_with(e.model.clone(), 0, &[2.2, 2.8], 0.3, Complex64::new(1.0, 0.0), &[1.0, 0.0])
        .unwrap();
    let a = Complex64::new(0.3, -1.2);
    let base = inner_product(&f, &g);
    assert!((inner_product(&f.scaled(a), &g) - a.conj() * base).norm() < 1e-12);
    assert!((inner_product(&f, &g.scaled(a)) - a * base).norm() < 1e-12);
    let sum = f.add(&g).unwrap();
    // the sum is integrated on the union box, so only quadrature-level agreement is expected
    assert!((inner_product(&sum, &g) - base - inner_product(&g, &g)).norm() < 1e-9);
}

#[test]
fn sampled_signal_tracks_the_analytic_one() {
    let e = catalog::make_diagonal();
    let f = OrbitFunction::gaussian(e.model.clone(), 0, &[2.0, 3.0], 0.3).unwrap();
    let b = f.support_hint.clone();
    let grid = rep::SampledGrid::sample(b.lo.clone(), b.hi.clone(), vec![801, 801], |k| f.evaluate(k)).unwrap();
    let s = OrbitFunction::sampled(e.model.clone(), 0, grid, "sampled").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let k = [rng.gen_range(b.lo[0]..b.hi[0]), rng.gen_range(b.lo[1]..b.hi[1])];
        worst = worst.max((s.evaluate(&k) - f.evaluate(&k)).norm());
    }
    let peak = f.evaluate(&[2.0, 3.0]).norm();
    assert!(worst < 1e-4 * peak, "{worst}");
}

#[test]
fn diagonal_duflo_moore_factor() {
    let e = catalog::make_diagonal();
    let f = OrbitFunction::gaussian(e.model.clone(), 0, &[2.0, 3.0], 0.3).unwrap();
    let c = duflo_moore_apply(&f, 1).unwrap();
    let v = c.evaluate(&[2.0, 3.0]) / f.evaluate(&[2.0, 3.0]);
    assert!((v.re - 2.0 * PI / 6f64.sqrt()).abs() < 1e-12);
}

fn model_strategy() -> impl Strategy<Value = usize> {
    0usize..5
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homomorphism(idx in model_strategy(), seed in any::<u64>()) {
        let e = catalog::all().swap_remove(idx);
        let m: &Arc<GroupModel> = &e.model;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let label = rng.gen_range(0..m.orbits.len());
        let f = signal(&e, label, &mut rng);
        let g1 = m.sample_element(&mut rng, 0.5, 1.5);
        let g2 = m.sample_element(&mut rng, 0.5, 1.5);
        let lhs = rep_apply(&g1, &rep_apply(&g2, &f).unwrap()).unwrap();
        let rhs = rep_apply(&multiply(&g1, &g2), &f).unwrap();
        let center = Vector::from_column_slice(&lhs.support_hint.center());
        for _ in 0..20 {
            let k: Vec<f64> = center.iter().map(|c| c + rng.gen_range(-0.5..0.5)).collect();
            let (a, b) = (lhs.evaluate(&k), rhs.evaluate(&k));
            prop_assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()), "{a} vs {b}");
        }
    }

    #[test]
    fn exp_and_group_paths_agree(idx in model_strategy(), seed in any::<u64>()) {
        let e = catalog::all().swap_remove(idx);
        let m = &e.model;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = signal(&e, 0, &mut rng);
        let x_q = m.sample_x_q(&mut rng, 0.7);
        let x_p = Vector::from_iterator(m.n, (0..m.n).map(|_| rng.gen_range(-1.0..1.0)));
        let x = wigner_core::group::LieAlgebraElement { x_q, x_p };
        let a = rep::rep_apply_exp(&x, &f).unwrap();
        let g = wigner_core::group::inverse(&m.exp_map(&x).unwrap()).unwrap();
        let b = rep_apply(&g, &f).unwrap();
        let center = a.support_hint.center();
        for _ in 0..10 {
            let k: Vec<f64> = center.iter().map(|c| c + rng.gen_range(-0.4..0.4)).collect();
            prop_assert!((a.evaluate(&k) - b.evaluate(&k)).norm() < 1e-10);
        }
    }
}

/// Brute-force `∫ |⟨Û(b,h)η|φ⟩|² db` at fixed `h` against the Plancherel form
/// `(2π)ⁿ |det h| ∫ |η(kh)|² |φ(k)|² dk` used by the group integrals.
#[test]
fn translation_integral_matches_plancherel() {
    use wigner_core::group::GroupElement;
    use wigner_core::quadrature::gauss_legendre;

    let m = catalog::make_diagonal().model;
    let eta =
        OrbitFunction::gaussian_with(m.clone(), 0, &[2.6, 2.5], 0.3, Complex64::new(1.0, 0.0), &[0.4, -0.2]).unwrap();
    let phi = OrbitFunction::gaussian(m.clone(), 0, &[2.4, 2.7], 0.3).unwrap();
    let (a1, a2) = (1.1, 0.9);
    let h = linalg::Mat::from_diagonal(&Vector::from_vec(vec![a1, a2]));

    let (z, wz) = gauss_legendre(96);
    let half = 32.0;
    let mut direct = 0.0;
    for (x, wx) in z.iter().zip(&wz) {
        for (y, wy) in z.iter().zip(&wz) {
            let g = GroupElement { b: Vector::from_vec(vec![half * x, half * y]), h: h.clone() };
            let c = rep::inner_product_with(&rep_apply(&g, &eta).unwrap(), &phi, 64);
            direct += c.norm_sqr() * wx * wy * half * half;
        }
    }
    let sb = rep::SupportBox::around(&[2.4, 2.7], 2.1);
    let plancherel = (2.0 * PI).powi(2)
        * a1
        * a2
        * rep::integrate_box(&sb, 96, |k| {
            eta.evaluate(&[k[0] * a1, k[1] * a2]).norm_sqr() * phi.evaluate(k).norm_sqr()
        });
    assert!((direct - plancherel).abs() < 1e-8 * plancherel, "direct {direct} vs Plancherel {plancherel}");
}
