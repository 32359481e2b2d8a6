mod common;

use common::{gaussian_vec, random_point};
use loewner_core::loewner::*;
use loewner_core::{Complex64, SchlichtCoefficients};

/// Smooth driver number `seed`: a mixture of two moving kernels.
fn random_driver(seed: u64) -> CaratheodoryDriver {
    let r = gaussian_vec(1000 + seed, 3, 1.0);
    let (a, b, w) = (r[0], r[1], 0.2 + 0.6 * (r[2].re.tanh() + 1.0) / 2.0);
    CaratheodoryDriver::mixture(
        vec![w, 1.0 - w],
        vec![
            Box::new(move |t: f64| a.re + a.im * (2.0 * t).sin()),
            Box::new(move |t: f64| b.re * t + b.im * (3.0 * t).cos()),
        ],
    )
    .unwrap()
}

fn random_momenta(seed: u64, n: usize) -> CovectorMomenta {
    CovectorMomenta(gaussian_vec(2000 + seed, n, 0.5))
}

#[test]
fn spectrum_conserved_for_random_drivers() {
    for seed in 0..20 {
        let d = random_driver(seed);
        let pts = hamiltonian_flow(&d, &random_momenta(seed, 6), 1.0, 10_000, EvolutionMode::Subordination).unwrap();
        let drift = spectrum_drift(&pts);
        assert!(drift < 1e-8, "seed {seed}: {drift:e}");
    }
}

#[test]
fn spectrum_drift_is_fourth_order() {
    let d = random_driver(3);
    let psi = random_momenta(3, 6);
    let drift = |steps| spectrum_drift(&hamiltonian_flow(&d, &psi, 1.0, steps, EvolutionMode::Subordination).unwrap());
    let (coarse, fine) = (drift(20), drift(40));
    let ratio = coarse / fine;
    assert!(ratio > 12.0 && ratio < 20.0, "{coarse:e} / {fine:e} = {ratio}");
}

#[test]
fn normalization_is_structural() {
    let tr = ode_evolve(&random_driver(1), 1.0, 6, 100, EvolutionMode::Subordination).unwrap();
    for p in &tr.points {
        let s = p.c.to_series();
        assert_eq!(s.coeff(0), Complex64::new(0.0, 0.0));
        assert_eq!(s.coeff(1), Complex64::new(1.0, 0.0));
    }
}

#[test]
fn pde_semigroup() {
    let d = CaratheodoryDriver::mixture(vec![0.3, 0.7], vec![Box::new(|_| 0.4), Box::new(|_| -1.1)]).unwrap();
    let f0 = random_point(5, 6, 0.3);
    let mode = EvolutionMode::Subordination;
    let whole = pde_evolve(&f0, &d, 0.8, 800, mode).unwrap();
    let half = pde_evolve(&f0, &d, 0.3, 300, mode).unwrap();
    let split = pde_evolve(&half, &d, 0.5, 500, mode).unwrap();
    assert!(whole.max_abs_diff(&split) < 1e-10, "{:e}", whole.max_abs_diff(&split));
}

#[test]
fn pde_matches_characteristics() {
    let d = random_driver(7);
    let f0 = random_point(8, 6, 0.3);
    let t = 0.6;
    let via_pde = pde_evolve(&f0, &d, t, 2000, EvolutionMode::Subordination).unwrap();
    let w = ode_evolve(&d, t, 6, 2000, EvolutionMode::Subordination).unwrap();
    let via_w = characteristic_composition(&f0, w.last()).unwrap();
    assert!(via_pde.max_abs_diff(&via_w) < 1e-9, "{:e}", via_pde.max_abs_diff(&via_w));
}

#[test]
fn pde_is_f1_gauge_with_unit_rotation_control() {
    let f0 = random_point(9, 5, 0.4);
    let p1 = |t: f64| Complex64::new(0.5 * t.cos(), 0.2);
    let p2 = |t: f64| Complex64::new(-0.1, 0.3 * t);
    let d = CaratheodoryDriver::coefficients(vec![Box::new(p1), Box::new(p2)]);
    let via_pde = pde_evolve(&f0, &d, 0.7, 700, EvolutionMode::Alternate).unwrap();
    let controls = Controls::new(vec![Box::new(|_| Complex64::new(1.0, 0.0)), Box::new(p1), Box::new(p2)]);
    let via_f1 = alternate_evolve(&controls, &f0, 0.7, 700, Gauge::F1).unwrap();
    assert!(via_pde.max_abs_diff(&via_f1.last().c) < 1e-12);
}

#[test]
fn gauges_differ_by_graded_rescaling() {
    let f0 = random_point(10, 5, 0.4);
    let u0 = |t: f64| Complex64::new(0.3 + 0.1 * t, 0.4);
    let controls = || {
        Controls::new(vec![
            Box::new(u0) as TimeFn<Complex64>,
            Box::new(|t: f64| Complex64::new(t.sin(), 0.1)),
            Box::new(|_| Complex64::new(-0.2, 0.2)),
            Box::new(|t: f64| Complex64::new(0.0, t)),
        ])
    };
    let t = 0.9;
    let f1 = alternate_evolve(&controls(), &f0, t, 900, Gauge::F1).unwrap();
    let f2 = alternate_evolve(&controls(), &f0, t, 900, Gauge::F2).unwrap();
    // ℓ(t) = ∫ u_0
    let ell = Complex64::new(0.3 * t + 0.05 * t * t, 0.4 * t);
    for m in 1..=5 {
        let want = f1.last().c.c(m) * (-ell * m as f64).exp();
        assert!((f2.last().c.c(m) - want).norm() < 1e-11, "m = {m}");
    }
}

#[test]
fn subordination_velocity_decomposes_into_generators() {
    // along a subordination chain ċ = L_0 c + Σ p_k L_k c
    let d = random_driver(4);
    let tr = ode_evolve(&d, 0.5, 5, 50, EvolutionMode::Subordination).unwrap();
    let f0 = random_point(12, 5, 0.2);
    for s in tr.points.iter().step_by(10) {
        let f = characteristic_composition(&f0, s).unwrap();
        let p = d.p_coefficients(s.t, 5);
        let cdot = pde_rhs(&p, f.as_slice());
        let rotation: Vec<Complex64> = (1..=5).map(|m| f.c(m) * m as f64).collect();
        let rest: Vec<Complex64> = cdot.iter().zip(&rotation).map(|(a, b)| a - b).collect();
        let u = loewner_core::geodesic::controls_from_velocity(&f, &rest).unwrap();
        for k in 0..5 {
            assert!((u.0[k] - p[k]).norm() < 1e-12);
        }
    }
}

#[test]
fn trivial_driver_invariants_are_exact() {
    let psi = random_momenta(0, 5);
    let pts = hamiltonian_flow(&CaratheodoryDriver::trivial(), &psi, 1.0, 100, EvolutionMode::Subordination).unwrap();
    for p in &pts {
        assert_eq!(p.c, SchlichtCoefficients::identity(5).unwrap());
        assert_eq!(p.psibar, psi);
    }
    assert_eq!(spectrum_drift(&pts), 0.0);
}
