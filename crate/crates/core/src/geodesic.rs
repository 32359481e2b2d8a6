//! Hamiltonian flow of `H = Σ |l_k|²` on the coefficient body.
//!
//! `l_k = ψ̄_k + Σ_{j≥1} (j + 1) c_j ψ̄_{k+j}`. The controls `u_k = l̄_k` move
//! the point by `ċ = Σ_k u_k L_k(c)`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::loewner::CovectorMomenta;
use crate::ode;
use crate::series::{check_order, SchlichtCoefficients};

/// Generalised moments `u_1 … u_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityControls(pub Vec<Complex64>);

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianState {
    pub c: SchlichtCoefficients,
    pub psibar: CovectorMomenta,
}

/// One sample of a geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPoint {
    pub t: f64,
    pub state: HamiltonianState,
    pub l: Vec<Complex64>,
    /// `u = l̄`
    pub u: Vec<Complex64>,
    pub hamiltonian: f64,
    pub speed_squared: f64,
}

fn cj(c: &[Complex64], j: usize) -> Complex64 {
    if j == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        c[j - 1]
    }
}

/// `u_k = ċ_k − Σ_{j=1}^{k−1} (j + 1) c_j u_{k−j}`.
pub fn controls_from_velocity(c: &SchlichtCoefficients, cdot: &[Complex64]) -> Result<VelocityControls> {
    let n = cdot.len();
    if n != c.order() {
        return Err(Error::OrderMismatch { left: c.order(), right: n });
    }
    let c = c.as_slice();
    let mut u: Vec<Complex64> = Vec::with_capacity(n);
    for k in 1..=n {
        let mut acc = cdot[k - 1];
        for j in 1..k {
            acc -= cj(c, j) * (j + 1) as f64 * u[k - j - 1];
        }
        u.push(acc);
    }
    Ok(VelocityControls(u))
}

/// `ċ_n = u_n + Σ_{j=1}^{n−1} (j + 1) c_j u_{n−j}`.
pub fn velocity_from_controls(c: &[Complex64], u: &[Complex64]) -> Vec<Complex64> {
    (1..=u.len())
        .map(|m| {
            let mut acc = u[m - 1];
            for j in 1..m {
                acc += cj(c, j) * (j + 1) as f64 * u[m - j - 1];
            }
            acc
        })
        .collect()
}

/// `l_k = ψ̄_k + Σ_{j=1}^{n−k} (j + 1) c_j ψ̄_{k+j}`.
pub fn l_coefficients(c: &[Complex64], psibar: &[Complex64]) -> Vec<Complex64> {
    let n = psibar.len();
    (1..=n)
        .map(|k| {
            let mut acc = psibar[k - 1];
            for j in 1..=n - k {
                acc += cj(c, j) * (j + 1) as f64 * psibar[k + j - 1];
            }
            acc
        })
        .collect()
}

pub fn hamiltonian_value(state: &HamiltonianState) -> f64 {
    l_coefficients(state.c.as_slice(), state.psibar.as_slice())
        .iter()
        .map(|l| l.norm_sqr())
        .sum()
}

/// `½ Σ |u_k|²`.
pub fn lagrangian(u: &[Complex64]) -> f64 {
    0.5 * u.iter().map(|x| x.norm_sqr()).sum::<f64>()
}

fn flow_rhs(c: &[Complex64], psi: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    let l = l_coefficients(c, psi);
    let lbar: Vec<Complex64> = l.iter().map(|x| x.conj()).collect();
    let mut out = velocity_from_controls(c, &lbar);
    // ψ̄̇_p = −(p + 1) Σ_k l̄_k ψ̄_{k+p}
    out.extend((1..=n).map(|p| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=n - p {
            acc += lbar[k - 1] * psi[k + p - 1];
        }
        -acc * (p + 1) as f64
    }));
    out
}

/// `l̇_k = Σ_j (j − k) l̄_j l_{j+k}` at a state.
pub fn l_dot(c: &[Complex64], psibar: &[Complex64]) -> Vec<Complex64> {
    let n = psibar.len();
    let l = l_coefficients(c, psibar);
    (1..=n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=n - k {
                acc += l[j - 1].conj() * l[j + k - 1] * (j as f64 - k as f64);
            }
            acc
        })
        .collect()
}

fn point(t: f64, c: &[Complex64], psi: &[Complex64]) -> GeodesicPoint {
    let l = l_coefficients(c, psi);
    let u: Vec<Complex64> = l.iter().map(|x| x.conj()).collect();
    let h = l.iter().map(|x| x.norm_sqr()).sum();
    GeodesicPoint {
        t,
        state: HamiltonianState {
            c: SchlichtCoefficients::new(c.to_vec()).expect("order checked"),
            psibar: CovectorMomenta(psi.to_vec()),
        },
        l,
        u,
        hamiltonian: h,
        speed_squared: h,
    }
}

/// Integrates the `(c, ψ̄)` system for time `t_end` in `steps` RK4 steps.
pub fn flow(state0: &HamiltonianState, t_end: f64, steps: usize) -> Result<Vec<GeodesicPoint>> {
    let n = check_order(state0.c.order())?;
    if state0.psibar.0.len() != n {
        return Err(Error::OrderMismatch { left: n, right: state0.psibar.0.len() });
    }
    let mut y0 = state0.c.as_slice().to_vec();
    y0.extend_from_slice(state0.psibar.as_slice());
    let (times, states) = ode::rk4(|_, y| Ok(flow_rhs(&y[..n], &y[n..])), y0, 0.0, t_end, steps)?;
    Ok(times
        .into_iter()
        .zip(states)
        .map(|(t, y)| point(t, &y[..n], &y[n..]))
        .collect())
}

/// `c(s)` for constant controls, by exact integration of the graded system.
///
/// Each `c_n(s)` is a polynomial of degree `n` in `s`; the polynomials are
/// built order by order and evaluated at `s`.
pub fn geodesic_constant_controls(
    c0: &SchlichtCoefficients,
    u: &VelocityControls,
    s: f64,
) -> Result<SchlichtCoefficients> {
    let polys = constant_control_polynomials(c0, u)?;
    let v = polys
        .iter()
        .map(|p| p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * s + a))
        .collect();
    SchlichtCoefficients::new(v)
}

/// Coefficients in `s` of `c_1(s) … c_n(s)` under constant controls.
pub fn constant_control_polynomials(
    c0: &SchlichtCoefficients,
    u: &VelocityControls,
) -> Result<Vec<Vec<Complex64>>> {
    let n = c0.order();
    if u.0.len() != n {
        return Err(Error::OrderMismatch { left: n, right: u.0.len() });
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut polys: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for m in 1..=n {
        // derivative polynomial: u_m + Σ_j (j+1) c_j(s) u_{m-j}
        let mut d = vec![zero; m];
        d[0] = u.0[m - 1];
        for j in 1..m {
            let w = u.0[m - j - 1] * (j + 1) as f64;
            for (i, a) in polys[j - 1].iter().enumerate() {
                d[i] += a * w;
            }
        }
        let mut p = vec![c0.c(m)];
        p.extend(d.iter().enumerate().map(|(i, a)| a / (i + 1) as f64));
        polys.push(p);
    }
    Ok(polys)
}

/// Integrates `ċ = Σ u_k L_k(c)` with frozen controls by RK4.
pub fn integrate_frozen_controls(
    c0: &SchlichtCoefficients,
    u: &VelocityControls,
    s: f64,
    steps: usize,
) -> Result<SchlichtCoefficients> {
    let y = ode::rk4_final(|_, c| Ok(velocity_from_controls(c, &u.0)), c0.as_slice().to_vec(), 0.0, s, steps)?;
    SchlichtCoefficients::new(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sc(v: &[Complex64]) -> SchlichtCoefficients {
        SchlichtCoefficients::new(v.to_vec()).unwrap()
    }

    #[test]
    fn controls_examples() {
        let cdot = [cz(0.3, 1.0), cz(-2.0, 0.5), cz(1.0, 1.0)];
        let u = controls_from_velocity(&SchlichtCoefficients::identity(3).unwrap(), &cdot).unwrap();
        assert_eq!(u.0, cdot.to_vec());

        let c = sc(&[cz(0.7, -0.2), cz(0.1, 0.4)]);
        let cdot = [cz(1.5, 0.5), cz(-0.3, 2.0)];
        let u = controls_from_velocity(&c, &cdot).unwrap();
        assert!((u.0[1] - (cdot[1] - c.c(1) * 2.0 * cdot[0])).norm() < 1e-15);

        let c = sc(&[cz(0.7, -0.2), cz(0.1, 0.4), cz(-0.5, 0.3), cz(0.2, 0.2)]);
        let cdot = [cz(1.5, 0.5), cz(-0.3, 2.0), cz(0.0, -1.0), cz(2.0, 0.1)];
        let u = controls_from_velocity(&c, &cdot).unwrap();
        let back = velocity_from_controls(c.as_slice(), &u.0);
        for (a, b) in back.iter().zip(&cdot) {
            assert!((a - b).norm() < 1e-12);
        }
        // u = ċ / f' as series
        let p = crate::witt::polynomials(&c).p;
        for k in 1..=4 {
            let mut want = cdot[k - 1];
            for j in 1..k {
                want += p[j] * cdot[k - j - 1];
            }
            assert!((u.0[k - 1] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let zero = SchlichtCoefficients::identity(2).unwrap();
        let st = HamiltonianState { c: zero.clone(), psibar: CovectorMomenta(vec![cz(0.0, 0.0); 2]) };
        assert_eq!(hamiltonian_value(&st), 0.0);
        let st = HamiltonianState { c: zero, psibar: CovectorMomenta(vec![cz(1.0, 0.0), cz(0.0, 1.0)]) };
        assert_eq!(hamiltonian_value(&st), 2.0);
        let st = HamiltonianState {
            c: sc(&[cz(1.0, 0.0), cz(0.0, 0.0)]),
            psibar: CovectorMomenta(vec![cz(1.0, 0.0), cz(1.0, 0.0)]),
        };
        assert_eq!(hamiltonian_value(&st), 10.0);
    }

    #[test]
    fn frozen_flow_and_top_momentum() {
        let c0 = sc(&[cz(0.1, 0.2), cz(-0.3, 0.0), cz(0.05, 0.1)]);
        let st = HamiltonianState { c: c0.clone(), psibar: CovectorMomenta(vec![cz(0.0, 0.0); 3]) };
        let pts = flow(&st, 1.0, 10).unwrap();
        assert!(pts.iter().all(|p| p.state.c == c0));

        let st = HamiltonianState {
            c: c0,
            psibar: CovectorMomenta(vec![cz(0.3, 0.1), cz(-0.2, 0.4), cz(0.5, -0.6)]),
        };
        let pts = flow(&st, 1.0, 100).unwrap();
        assert!(pts.iter().all(|p| p.state.psibar.0[2] == cz(0.5, -0.6)));
    }

    #[test]
    fn constant_controls_closed_form() {
        let u = VelocityControls(vec![cz(1.0, 0.0), cz(0.0, 0.0), cz(0.0, 0.0)]);
        let c0 = SchlichtCoefficients::identity(3).unwrap();
        for s in [0.0, 0.5, 1.3] {
            let c = geodesic_constant_controls(&c0, &u, s).unwrap();
            assert!((c.c(1) - cz(s, 0.0)).norm() < 1e-15);
            assert!((c.c(2) - cz(s * s, 0.0)).norm() < 1e-15);
        }
        let c0 = sc(&[cz(0.2, -0.1), cz(0.3, 0.3)]);
        let zero = VelocityControls(vec![cz(0.0, 0.0); 2]);
        assert_eq!(geodesic_constant_controls(&c0, &zero, 2.0).unwrap(), c0);

        // c_2 = c_2(0) + (u_2 + 2 u_1 c_1(0)) s + u_1² s²
        let u = VelocityControls(vec![cz(0.4, 0.2), cz(-0.1, 0.3)]);
        let s = 0.8;
        let c = geodesic_constant_controls(&c0, &u, s).unwrap();
        let want = c0.c(2) + (u.0[1] + u.0[0] * c0.c(1) * 2.0) * s + u.0[0] * u.0[0] * s * s;
        assert!((c.c(2) - want).norm() < 1e-15);
    }
}
