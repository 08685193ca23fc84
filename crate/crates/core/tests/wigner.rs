use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wigner_core::catalog;
use wigner_core::group::{CoadjointPoint, GroupElement};
use wigner_core::linalg::{sinch_scalar, Vector};
use wigner_core::quadrature::{QuadratureSpec, Rule};
use wigner_core::representation::OrbitFunction;
use wigner_core::wigner::{
    check_covariance, check_marginal, check_overlap, check_support, wigner_grid, wigner_point, Axis, PhaseSpaceGrid,
};

fn gl(lo: &[f64], hi: &[f64], points: usize) -> QuadratureSpec {
    QuadratureSpec::new(Rule::GaussLegendre, points, lo.to_vec(), hi.to_vec(), 1e-4).unwrap()
}

fn point(v: &[f64]) -> CoadjointPoint {
    let mut p = CoadjointPoint::from_slice(v);
    p.orbit_label = None;
    p
}

/// Closed-form two-dimensional integrand `e^{iγ_q·x}·conj(ψ(a))·φ(b)·weight(x)` by tensor Gauss–Legendre.
fn closed_form<W, A>(
    phi: &OrbitFunction,
    psi: &OrbitFunction,
    gamma: &[f64],
    quad: &QuadratureSpec,
    warp: A,
    weight: W,
) -> Complex64
where
    W: Fn(&[f64]) -> f64,
    A: Fn(&[f64], f64) -> ([f64; 2], [f64; 2]),
{
    let rule = quad.tensor();
    let mut x = vec![0.0; 2];
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..rule.len() {
        let w = rule.node(i, &mut x);
        let (a, b) = warp(&x, 1.0);
        let v = psi.evaluate(&a).conj() * phi.evaluate(&b) * weight(&x);
        s += v * Complex64::from_polar(w, gamma[0] * x[0] + gamma[1] * x[1]);
    }
    s / (2.0 * PI)
}

#[test]
fn diagonal_matches_closed_form() {
    let e = catalog::make_diagonal();
    let phi = OrbitFunction::gaussian(e.model.clone(), 0, &[2.0, 3.0], 0.3).unwrap();
    let psi =
        OrbitFunction::gaussian_with(e.model.clone(), 0, &[2.1, 2.8], 0.35, Complex64::new(1.0, 0.0), &[0.4, -0.3])
            .unwrap();
    let quad = gl(&[-2.0, -2.0], &[2.0, 2.0], 96);
    for gamma in [[0.3, -0.5, 2.0, 3.0], [1.0, 0.2, 2.2, 2.7], [-2.0, 1.5, 1.8, 3.2]] {
        let ours = wigner_point(&phi, &psi, &point(&gamma), &quad).unwrap();
        let (g3, g4) = (gamma[2], gamma[3]);
        let warp = |x: &[f64], _| {
            let (s1, s2) = (sinch_scalar(x[0] / 2.0), sinch_scalar(x[1] / 2.0));
            (
                [g3 * (x[0] / 2.0).exp() / s1, g4 * (x[1] / 2.0).exp() / s2],
                [g3 * (-x[0] / 2.0).exp() / s1, g4 * (-x[1] / 2.0).exp() / s2],
            )
        };
        let weight = |x: &[f64]| (g3 * g4).abs() / (sinch_scalar(x[0] / 2.0) * sinch_scalar(x[1] / 2.0));
        let closed = closed_form(&phi, &psi, &gamma, &quad, warp, weight);
        assert!((ours.value - closed).norm() < 1e-10 * (1.0 + closed.norm()), "{} vs {}", ours.value, closed);
        assert!(!ours.mixing);
    }
}

#[test]
fn sim2_matches_closed_form() {
    let e = catalog::make_sim2();
    let phi = OrbitFunction::gaussian(e.model.clone(), 0, &[1.5, 0.5], 0.3).unwrap();
    let psi = OrbitFunction::gaussian(e.model.clone(), 0, &[1.4, 0.7], 0.3).unwrap();
    let quad = gl(&[-2.0, -PI], &[2.0, PI], 96);
    for gamma in [[0.2, -0.3, 1.5, 0.6], [-1.0, 0.8, 1.3, 0.4]] {
        let ours = wigner_point(&phi, &psi, &point(&gamma), &quad).unwrap();
        let g = [gamma[2], gamma[3]];
        // γ_p·e^{±X/2}/sinch(X/2) with X = λI + θJ acting as the complex number λ + iθ
        let warp = |x: &[f64], _| {
            let z = Complex64::new(x[0], x[1]);
            let w = Complex64::new(g[0], -g[1]);
            let s = if z.norm() < 1e-12 { Complex64::new(1.0, 0.0) } else { (z / 2.0).sinh() / (z / 2.0) };
            let a = w * (z / 2.0).exp() / s;
            let b = w * (-z / 2.0).exp() / s;
            ([a.re, -a.im], [b.re, -b.im])
        };
        let weight = |x: &[f64]| {
            let (l, t) = (x[0], x[1]);
            let r = (g[0] * g[0] + g[1] * g[1]) * (l * l + t * t) / (2.0 * l.cosh() - 2.0 * t.cos());
            if r.is_finite() {
                r
            } else {
                g[0] * g[0] + g[1] * g[1]
            }
        };
        let closed = closed_form(&phi, &psi, &gamma, &quad, warp, weight);
        assert!((ours.value - closed).norm() < 1e-9 * (1.0 + closed.norm()), "{} vs {}", ours.value, closed);
    }
}

#[test]
fn hc_matches_closed_form() {
    let c = 2.0;
    let e = catalog::make_hc(c).unwrap();
    let phi = OrbitFunction::gaussian(e.model.clone(), 0, &[0.5, 2.0], 0.3).unwrap();
    let psi = OrbitFunction::gaussian(e.model.clone(), 0, &[0.4, 2.1], 0.3).unwrap();
    let quad = gl(&[-2.0, -2.0], &[2.0, 2.0], 96);
    let gamma = [0.4, -0.2, 0.45, 2.05];
    let ours = wigner_point(&phi, &psi, &point(&gamma), &quad).unwrap();
    let m = e.model.clone();
    let g = Vector::from_vec(vec![gamma[2], gamma[3]]);
    let warp = move |x: &[f64], _| {
        let xq = m.x_q_matrix(x);
        let a = wigner_core::linalg::f_minus_inverse(&xq, &m.series).unwrap().tr_mul(&g);
        let b = wigner_core::linalg::f_minus_inverse(&-xq, &m.series).unwrap().tr_mul(&g);
        ([a[0], a[1]], [b[0], b[1]])
    };
    let weight = |x: &[f64]| {
        let (s1, sc, sc1) =
            (sinch_scalar(x[0] / 2.0), sinch_scalar(c * x[0] / 2.0), sinch_scalar((c - 1.0) * x[0] / 2.0));
        gamma[3] * gamma[3] / sc * (sc1 / (s1 * sc)).sqrt()
    };
    let closed = closed_form(&phi, &psi, &gamma, &quad, warp, weight);
    assert!((ours.value - closed).norm() < 1e-10 * (1.0 + closed.norm()), "{} vs {}", ours.value, closed);
}

#[test]
fn fast_path_matches_direct_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for e in [catalog::make_diagonal(), catalog::make_sim2(), catalog::make_hc(2.0).unwrap()] {
        let m = e.model.clone();
        let center: Vec<f64> = m.orbits[0].representative.iter().map(|v| 2.0 * v + 0.3).collect();
        let phi = OrbitFunction::gaussian(m.clone(), 0, &center, 0.3).unwrap();
        let psi =
            OrbitFunction::gaussian_with(m.clone(), 0, &center, 0.3, Complex64::new(0.0, 1.0), &[0.5, 0.5]).unwrap();
        let lo: Vec<f64> = center.iter().map(|c| c - 0.6).collect();
        let hi: Vec<f64> = center.iter().map(|c| c + 0.6).collect();
        let grid = PhaseSpaceGrid::uniform(&m, 0, 4.0, 9, &lo, &hi, 5).unwrap();
        let base = QuadratureSpec::for_model(&m, 64, 2.0, 1e-4).unwrap();
        let w = wigner_grid(&phi, &psi, &grid, &base).unwrap();
        for _ in 0..5 {
            let (p, q) = (rng.gen_range(0..grid.p_len()), rng.gen_range(0..grid.q_len()));
            let direct = wigner_point(&phi, &psi, &grid.point(p, q), &w.meta.quadrature).unwrap();
            let diff = (direct.value - w.value(p, q)).norm();
            assert!(diff <= 1e-4 * w.max_abs(), "{}: {diff}", m.name);
        }
    }
}

#[test]
fn realness_for_equal_signals() {
    for e in [catalog::make_diagonal(), catalog::make_sim2(), catalog::make_quaternionic()] {
        let m = e.model.clone();
        let center: Vec<f64> = m.orbits[0].representative.iter().map(|v| 2.0 * v + 0.2).collect();
        let phi = OrbitFunction::gaussian_with(m.clone(), 0, &center, 0.3, Complex64::new(0.6, 0.8), &vec![0.3; m.n])
            .unwrap();
        let pts = if m.n == 4 { 16 } else { 48 };
        let quad = QuadratureSpec::for_model(&m, pts, 1.5, 1e-3).unwrap();
        let mut gamma = vec![0.7; m.n];
        gamma.extend(center.iter().map(|c| c + 0.1));
        let v = wigner_point(&phi, &phi, &point(&gamma), &quad).unwrap().value;
        assert!(v.im.abs() < 1e-9 * (1.0 + v.norm()), "{}: {v}", m.name);
    }
}

#[test]
fn sesquilinear_in_the_signals() {
    let e = catalog::make_diagonal();
    let m = e.model.clone();
    let phi = OrbitFunction::gaussian(m.clone(), 0, &[2.0, 3.0], 0.3).unwrap();
    let psi =
        OrbitFunction::gaussian_with(m.clone(), 0, &[2.2, 2.9], 0.3, Complex64::new(1.0, 0.0), &[1.0, 0.0]).unwrap();
    let quad = gl(&[-2.0, -2.0], &[2.0, 2.0], 64);
    let gamma = point(&[0.5, -0.4, 2.1, 2.95]);
    let base = wigner_point(&phi, &psi, &gamma, &quad).unwrap().value;
    let a = Complex64::new(0.7, -1.3);
    let left = wigner_point(&phi.scaled(a), &psi, &gamma, &quad).unwrap().value;
    let right = wigner_point(&phi, &psi.scaled(a), &gamma, &quad).unwrap().value;
    assert!((left - a * base).norm() < 1e-12 * base.norm());
    assert!((right - a.conj() * base).norm() < 1e-12 * base.norm());
}

#[test]
fn covariance_on_diagonal_and_sim2() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for e in [catalog::make_diagonal(), catalog::make_sim2()] {
        let m = e.model.clone();
        let center: Vec<f64> = m.orbits[0].representative.iter().map(|v| 2.0 * v + 0.3).collect();
        let phi = OrbitFunction::gaussian(m.clone(), 0, &center, 0.3).unwrap();
        let psi =
            OrbitFunction::gaussian_with(m.clone(), 0, &center, 0.35, Complex64::new(1.0, 0.0), &[0.3, -0.2]).unwrap();
        let g0 = m.sample_element(&mut rng, 0.3, 1.0);
        let probes: Vec<CoadjointPoint> = (0..4)
            .map(|_| {
                let mut v: Vec<f64> = (0..m.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                v.extend(center.iter().map(|c| c + rng.gen_range(-0.2..0.2)));
                m.coadjoint_apply(&g0, &point(&v)).unwrap()
            })
            .collect();
        let base = QuadratureSpec::default_for(&m);
        let r = check_covariance(&phi, &psi, &g0, &probes, &base).unwrap();
        assert!(r.max_rel_err < 1e-3, "{}: {r:?}", m.name);
        let id = check_covariance(&phi, &psi, &GroupElement::identity(m.n), &probes[..1], &base).unwrap();
        assert!(id.max_rel_err < 1e-12, "{id:?}");
    }
}

#[test]
fn overlap_and_isometry_on_small_grid() {
    let e = catalog::make_diagonal();
    let m = e.model.clone();
    let phi = OrbitFunction::gaussian(m.clone(), 0, &[2.0, 3.0], 0.3).unwrap();
    let psi =
        OrbitFunction::gaussian_with(m.clone(), 0, &[2.1, 2.9], 0.3, Complex64::new(1.0, 0.0), &[0.5, 0.0]).unwrap();
    let grid = PhaseSpaceGrid::uniform(&m, 0, 20.0, 48, &[0.7, 1.7], &[3.4, 4.3], 40).unwrap();
    let base = QuadratureSpec::for_model(&m, 96, 2.0, 1e-4).unwrap();
    let w1 = wigner_grid(&phi, &phi, &grid, &base).unwrap();
    let w2 = wigner_grid(&phi, &psi, &grid, &base).unwrap();
    let iso = check_overlap(&w1, &w1, &m).unwrap();
    assert!((iso.rhs.re - 1.0).abs() < 1e-8);
    assert!(iso.rel_err < 2e-2, "{iso:?}");
    let r = check_overlap(&w1, &w2, &m).unwrap();
    assert!(r.rel_err < 2e-2, "{r:?}");
    let b1 = OrbitFunction::bump(m.clone(), 0, &[1.6, 3.4], 0.5).unwrap();
    let b2 = OrbitFunction::bump(m.clone(), 0, &[2.8, 2.3], 0.5).unwrap();
    let w3 = wigner_grid(&b1, &b1, &grid, &base).unwrap();
    let w4 = wigner_grid(&b2, &b2, &grid, &base).unwrap();
    let o = check_overlap(&w3, &w4, &m).unwrap();
    assert_eq!(o.rhs, Complex64::new(0.0, 0.0));
    assert!(o.lhs.norm() < 1e-3, "{o:?}");
}

#[test]
fn marginal_on_diagonal() {
    let e = catalog::make_diagonal();
    let m = e.model.clone();
    let phi = OrbitFunction::gaussian(m.clone(), 0, &[2.0, 3.0], 0.3).unwrap();
    let grid = PhaseSpaceGrid::new(
        &m,
        0,
        vec![Axis::new(-40.0, 40.0, 128).unwrap(); 2],
        vec![Axis::new(1.0, 5.0, 9).unwrap(), Axis::new(2.0, 4.0, 5).unwrap()],
    )
    .unwrap();
    let base = QuadratureSpec::for_model(&m, 128, 2.0, 1e-5).unwrap();
    let w = wigner_grid(&phi, &phi, &grid, &base).unwrap();
    let r = check_marginal(&w, &m).unwrap();
    assert!(r.max_abs_err < 1e-3, "{r:?}");
    assert!(r.max_outside_support < 1e-6, "{r:?}");
    let psi =
        OrbitFunction::gaussian_with(m.clone(), 0, &[2.0, 3.0], 0.3, Complex64::new(1.0, 0.0), &[0.8, -0.5]).unwrap();
    let w = wigner_grid(&phi, &psi, &grid, &base).unwrap();
    let r = check_marginal(&w, &m).unwrap();
    assert!(r.max_abs_err < 1e-3, "{r:?}");
    assert!(r.max_abs_err_swapped > 10.0 * r.max_abs_err, "{r:?}");
}

#[test]
fn localized_near_signal_center() {
    let e = catalog::make_diagonal();
    let m = e.model.clone();
    let phi = OrbitFunction::gaussian(m.clone(), 0, &[2.0, 3.0], 0.25).unwrap();
    let grid = PhaseSpaceGrid::uniform(&m, 0, 6.0, 13, &[0.5, 0.5], &[4.0, 4.5], 15).unwrap();
    let w = wigner_grid(&phi, &phi, &grid, &QuadratureSpec::default_for(&m)).unwrap();
    let (idx, _) =
        w.values.iter().enumerate().fold((0, 0.0), |acc, (i, v)| if v.norm() > acc.1 { (i, v.norm()) } else { acc });
    let gp = grid.p_point(idx / grid.q_len());
    assert!((gp[0] - 2.0).abs() < 0.3 && (gp[1] - 3.0).abs() < 0.3, "{gp:?}");
}

#[test]
fn support_stays_on_dihedral_orbits() {
    let e = catalog::make_diagonal();
    let m = e.model.clone();
    let phi = OrbitFunction::gaussian(m.clone(), 0, &[2.0, 3.0], 0.3).unwrap();
    let grid = PhaseSpaceGrid::uniform(&m, 2, 3.0, 5, &[-4.0, 0.5], &[-0.5, 4.0], 8).unwrap();
    let r = check_support(&phi, &phi, &grid, &QuadratureSpec::default_for(&m)).unwrap();
    assert!(r.max_abs < 1e-6, "{r:?}");
    let e = catalog::make_hc(2.0).unwrap();
    let m = e.model.clone();
    let phi = OrbitFunction::gaussian(m.clone(), 0, &[0.5, 2.0], 0.3).unwrap();
    let grid = PhaseSpaceGrid::uniform(&m, 1, 3.0, 5, &[-2.0, -4.0], &[2.0, -0.5], 8).unwrap();
    let r = check_support(&phi, &phi, &grid, &QuadratureSpec::default_for(&m)).unwrap();
    assert!(r.max_abs < 1e-6, "{r:?}");
}

/// `γ_p` in O1 sees signals living in O2 through the sinch warp at large nilpotent coordinate.
#[test]
fn counterexample_leaks_from_o2_into_o1() {
    let e = catalog::make_counterexample3d();
    let m = e.model.clone();
    let gp = Vector::from_vec(vec![1.5, 0.0, 1.0]);
    let x_star = [-0.3, 6.0, 3.0];
    let xq = m.x_q_matrix(&x_star);
    let a = wigner_core::linalg::f_minus_inverse(&xq, &m.series).unwrap().tr_mul(&gp);
    let b = wigner_core::linalg::f_minus_inverse(&-xq, &m.series).unwrap().tr_mul(&gp);
    assert_eq!(wigner_core::orbit::classify_label(a.as_slice(), &m), Some(1));
    assert_eq!(wigner_core::orbit::classify_label(b.as_slice(), &m), Some(1));
    let psi = OrbitFunction::bump(m.clone(), 1, a.as_slice(), 1.0).unwrap();
    let phi = OrbitFunction::bump(m.clone(), 1, b.as_slice(), 1.0).unwrap();
    let quad = gl(&[-3.0, -9.0, -5.0], &[3.0, 9.0, 5.0], 48);
    let p = point(&[0.0, 0.0, 0.0, gp[0], gp[1], gp[2]]);
    let v = wigner_point(&phi, &psi, &p, &quad).unwrap();
    assert!(v.mixing);
    assert!(v.value.norm() > 1e-3, "{v:?}");
}
