mod common;

use common::{gaussian_vec, random_point};
use loewner_core::geodesic::*;
use loewner_core::loewner::CovectorMomenta;
use loewner_core::Complex64;

fn random_state(seed: u64, n: usize) -> HamiltonianState {
    let mut psi = gaussian_vec(300 + seed, n, 1.0);
    let len = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|z| *z /= len);
    HamiltonianState { c: random_point(400 + seed, n, 0.3), psibar: CovectorMomenta(psi) }
}

#[test]
fn constant_controls_closed_form_matches_integration() {
    for seed in 0..5 {
        let c0 = random_point(seed, 4, 0.5);
        let u = VelocityControls(gaussian_vec(50 + seed, 4, 0.7));
        let closed = geodesic_constant_controls(&c0, &u, 1.0).unwrap();
        let numeric = integrate_frozen_controls(&c0, &u, 1.0, 2000).unwrap();
        assert!(closed.max_abs_diff(&numeric) < 1e-9, "seed {seed}: {:e}", closed.max_abs_diff(&numeric));
    }
}

#[test]
fn speed_and_hamiltonian_conserved() {
    for seed in 0..10 {
        let pts = flow(&random_state(seed, 6), 1.0, 10_000).unwrap();
        let (h0, s0) = (pts[0].hamiltonian, pts[0].speed_squared);
        for p in &pts {
            assert!((p.hamiltonian - h0).abs() / h0 < 1e-8, "seed {seed}");
            let speed: f64 = p.u.iter().map(|x| x.norm_sqr()).sum();
            assert!((speed - s0).abs() / s0 < 1e-8, "seed {seed}");
            assert!((2.0 * lagrangian(&p.u) - p.hamiltonian).abs() < 1e-12 * h0);
        }
    }
}

#[test]
fn l_dot_matches_finite_differences() {
    let state = random_state(21, 5);
    let h = 1e-4;
    let pts = flow(&state, 2.0 * h, 2).unwrap();
    let analytic = l_dot(state.c.as_slice(), state.psibar.as_slice());
    // central difference around the midpoint, compared with l̇ there
    let mid = &pts[1].state;
    let at_mid = l_dot(mid.c.as_slice(), mid.psibar.as_slice());
    for k in 0..5 {
        let fd = (pts[2].l[k] - pts[0].l[k]) / (2.0 * h);
        assert!((fd - at_mid[k]).norm() < 1e-6, "k = {k}: {fd} vs {}", at_mid[k]);
        assert!((at_mid[k] - analytic[k]).norm() < 1e-2);
    }
}

#[test]
fn controls_round_trip() {
    for seed in 0..20 {
        let c = random_point(500 + seed, 7, 1.5);
        let u = gaussian_vec(600 + seed, 7, 1.0);
        let back = controls_from_velocity(&c, &velocity_from_controls(c.as_slice(), &u)).unwrap();
        for (a, b) in back.0.iter().zip(&u) {
            assert!((a - b).norm() < 1e-12);
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    assert_eq!(lagrangian(&[zero; 3]), 0.0);
}
