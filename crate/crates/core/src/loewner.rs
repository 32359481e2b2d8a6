//! Löwner–Kufarev evolution in coefficient form.
//!
//! The subordination chain `w(z, t) = e^{-t} z (1 + Σ c_n(t) z^n)` solves
//! `ẇ = −w p(w, t)`, `w(z, 0) = z`. In terms of `f = e^t w` this is
//! `ḟ = −Σ_k p_k(t) e^{−kt} f^{k+1}`, a closed graded system for `c_1 … c_N`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{self, State};
use crate::series::{check_order, SchlichtCoefficients, TruncatedSeries};

pub type TimeFn<T> = Box<dyn Fn(f64) -> T + Send + Sync>;

/// Radius of the circle on which `Re p > 0` is certified.
pub const CERTIFICATE_RADIUS: f64 = 1.0 - 1e-3;
/// Number of equally spaced certificate angles.
pub const CERTIFICATE_ANGLES: usize = 256;

/// Control `p(ζ, t) = 1 + Σ p_k(t) ζ^k`.
pub enum CaratheodoryDriver {
    /// `p = (e^{iu} + ζ) / (e^{iu} − ζ)`.
    LoewnerKernel { u: TimeFn<f64> },
    /// Convex combination of kernels; the weights are normalised to sum 1.
    KernelMixture { weights: Vec<f64>, u: Vec<TimeFn<f64>> },
    /// Explicit `p_1, p_2, …`; missing coefficients are zero.
    Coefficients { p: Vec<TimeFn<Complex64>> },
}

impl core::fmt::Debug for CaratheodoryDriver {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::LoewnerKernel { .. } => f.write_str("LoewnerKernel"),
            Self::KernelMixture { weights, .. } => write!(f, "KernelMixture({} kernels)", weights.len()),
            Self::Coefficients { p } => write!(f, "Coefficients({} terms)", p.len()),
        }
    }
}

fn kernel_coefficient(u: f64, k: usize) -> Complex64 {
    Complex64::from_polar(2.0, -(k as f64) * u)
}

fn kernel_value(u: f64, zeta: Complex64) -> Complex64 {
    let e = Complex64::from_polar(1.0, u);
    (e + zeta) / (e - zeta)
}

impl CaratheodoryDriver {
    /// The trivial driver `p ≡ 1`.
    pub fn trivial() -> Self {
        Self::Coefficients { p: Vec::new() }
    }

    pub fn kernel(u: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::LoewnerKernel { u: Box::new(u) }
    }

    pub fn constant_kernel(u: f64) -> Self {
        Self::kernel(move |_| u)
    }

    pub fn mixture(weights: Vec<f64>, u: Vec<TimeFn<f64>>) -> Result<Self> {
        if weights.len() != u.len() || weights.is_empty() {
            return Err(Error::InvalidArgument("one weight per kernel required"));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| *w < 0.0) || !(total > 0.0) {
            return Err(Error::InvalidArgument("kernel weights must be non-negative"));
        }
        Ok(Self::KernelMixture {
            weights: weights.iter().map(|w| w / total).collect(),
            u,
        })
    }

    pub fn coefficients(p: Vec<TimeFn<Complex64>>) -> Self {
        Self::Coefficients { p }
    }

    /// `p_1(t) … p_n(t)`.
    pub fn p_coefficients(&self, t: f64, n: usize) -> Vec<Complex64> {
        match self {
            Self::LoewnerKernel { u } => {
                let u = u(t);
                (1..=n).map(|k| kernel_coefficient(u, k)).collect()
            }
            Self::KernelMixture { weights, u } => {
                let us: Vec<f64> = u.iter().map(|f| f(t)).collect();
                (1..=n)
                    .map(|k| {
                        weights
                            .iter()
                            .zip(&us)
                            .map(|(w, &u)| kernel_coefficient(u, k) * w)
                            .sum()
                    })
                    .collect()
            }
            Self::Coefficients { p } => (1..=n)
                .map(|k| p.get(k - 1).map_or(Complex64::new(0.0, 0.0), |f| f(t)))
                .collect(),
        }
    }

    /// `p(ζ, t)`.
    pub fn evaluate(&self, zeta: Complex64, t: f64) -> Complex64 {
        match self {
            Self::LoewnerKernel { u } => kernel_value(u(t), zeta),
            Self::KernelMixture { weights, u } => weights
                .iter()
                .zip(u)
                .map(|(w, u)| kernel_value(u(t), zeta) * w)
                .sum(),
            Self::Coefficients { p } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for f in p.iter().rev() {
                    acc = (acc + f(t)) * zeta;
                }
                acc + 1.0
            }
        }
    }

    /// Smallest `Re p` over the certificate circle.
    pub fn min_real_part(&self, t: f64) -> f64 {
        let tau = 2.0 * core::f64::consts::PI;
        (0..CERTIFICATE_ANGLES)
            .map(|a| {
                let zeta = Complex64::from_polar(CERTIFICATE_RADIUS, tau * a as f64 / CERTIFICATE_ANGLES as f64);
                self.evaluate(zeta, t).re
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn certify(&self, t: f64) -> Result<()> {
        let m = self.min_real_part(t);
        if m > 0.0 {
            Ok(())
        } else {
            Err(Error::DriverDomain { t, min_re: m })
        }
    }
}

/// Whether the positivity certificate is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvolutionMode {
    /// Carathéodory drivers only.
    #[default]
    Subordination,
    /// Any complex control.
    Alternate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionState {
    pub t: f64,
    pub c: SchlichtCoefficients,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<EvolutionState>,
}

impl Trajectory {
    fn from_ode(times: Vec<f64>, states: Vec<State>) -> Result<Self> {
        let points = times
            .into_iter()
            .zip(states)
            .map(|(t, c)| Ok(EvolutionState { t, c: SchlichtCoefficients::new(c)? }))
            .collect::<Result<_>>()?;
        Ok(Self { points })
    }

    pub fn last(&self) -> &EvolutionState {
        self.points.last().expect("trajectories are never empty")
    }
}

pub(crate) fn to_state(c: &SchlichtCoefficients) -> State {
    c.as_slice().to_vec()
}

fn schlicht(c: &[Complex64]) -> SchlichtCoefficients {
    SchlichtCoefficients::new(c.to_vec()).expect("order checked on entry")
}

/// `ċ` for the coefficient form of `ẇ = −w p(w, t)`.
pub fn ode_rhs(p: &[Complex64], t: f64, c: &[Complex64]) -> State {
    let n = c.len();
    let f = schlicht(c).to_series();
    let mut pow = f.clone();
    let mut acc = TruncatedSeries::zero(n + 1);
    for (k, pk) in p.iter().enumerate().take(n) {
        pow = pow.mul_truncated(&f);
        let w = -pk * libm::exp(-((k + 1) as f64) * t);
        acc = acc.add(&pow.scale(&w)).expect("same order");
    }
    (1..=n).map(|m| acc.coeff(m + 1)).collect()
}

fn check_steps(steps: usize) -> Result<()> {
    if steps == 0 {
        Err(Error::InvalidArgument("steps must be at least 1"))
    } else {
        Ok(())
    }
}

/// Integrates the coefficient system of `w` from `w(z, 0) = z`, returning the
/// normalised coefficients `c(t)` of `e^t w` at all grid times.
pub fn ode_evolve(
    driver: &CaratheodoryDriver,
    t_end: f64,
    order: usize,
    steps: usize,
    mode: EvolutionMode,
) -> Result<Trajectory> {
    ode_evolve_from(driver, &SchlichtCoefficients::identity(order)?, 0.0, t_end, steps, mode)
}

/// As [`ode_evolve`] from `w(z, t0) = e^{−t0} f_0(z)`.
pub fn ode_evolve_from(
    driver: &CaratheodoryDriver,
    c0: &SchlichtCoefficients,
    t0: f64,
    t_end: f64,
    steps: usize,
    mode: EvolutionMode,
) -> Result<Trajectory> {
    check_steps(steps)?;
    let n = check_order(c0.order())?;
    let rhs = |t: f64, c: &[Complex64]| {
        if mode == EvolutionMode::Subordination {
            driver.certify(t)?;
        }
        Ok(ode_rhs(&driver.p_coefficients(t, n), t, c))
    };
    let (times, states) = ode::rk4(rhs, to_state(c0), t0, t_end, steps)?;
    Trajectory::from_ode(times, states)
}

/// Limit estimate for `f = lim e^t w(·, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    /// `e^T w(·, T)` itself.
    pub raw: SchlichtCoefficients,
    /// Estimate with the `e^{−t}` and `e^{−2t}` tail terms removed.
    pub limit: SchlichtCoefficients,
    /// `max_n |c_n(T) − c_n(0.9 T)|`.
    pub raw_drift: f64,
    /// Size of the second-order tail correction.
    pub drift: f64,
}

/// Integrates to `T` and extrapolates the limit.
///
/// For a time-independent driver the tail is a power series in `e^{−t}`,
/// `c(t) = c(∞) + A e^{−t} + B e^{−2t} + …`. The estimate fits the first three
/// terms through the states at `0.8 T`, `0.9 T` and `T`. The drift is its
/// distance from the two-point fit that only removes `A e^{−t}`, and must not
/// exceed `tolerance`.
pub fn lk_limit(
    driver: &CaratheodoryDriver,
    t_end: f64,
    order: usize,
    steps: usize,
    tolerance: f64,
) -> Result<LimitEstimate> {
    if !(t_end > 0.0) {
        return Err(Error::InvalidArgument("horizon must be positive"));
    }
    let traj = ode_evolve(driver, t_end, order, steps, EvolutionMode::Subordination)?;
    let at = |frac: f64| {
        let i = libm::round(frac * steps as f64) as usize;
        &traj.points[i.min(steps)]
    };
    let (s0, s1, s2) = (at(0.8), at(0.9), traj.last());
    if s0.t == s1.t || s1.t == s2.t {
        return Err(Error::InvalidArgument("too few steps to resolve the tail"));
    }
    let two_point = {
        let q = libm::exp(s1.t - s2.t);
        let v: Vec<Complex64> = (1..=order)
            .map(|k| (s2.c.c(k) - s1.c.c(k) * q) / (1.0 - q))
            .collect();
        schlicht(&v)
    };
    // value at x = 0 of the quadratic through (e^{-t_i}, c(t_i))
    let pts = [s0, s1, s2];
    let x: Vec<f64> = pts.iter().map(|s| libm::exp(-s.t)).collect();
    let weights: Vec<f64> = (0..3)
        .map(|i| {
            (0..3)
                .filter(|&j| j != i)
                .map(|j| x[j] / (x[j] - x[i]))
                .product()
        })
        .collect();
    let v: Vec<Complex64> = (1..=order)
        .map(|k| pts.iter().zip(&weights).map(|(s, w)| s.c.c(k) * w).sum())
        .collect();
    let limit = schlicht(&v);
    let drift = limit.max_abs_diff(&two_point);
    let raw_drift = s2.c.max_abs_diff(&s1.c);
    if !(drift <= tolerance) {
        return Err(Error::NotConverged { drift, tolerance });
    }
    Ok(LimitEstimate {
        raw: s2.c.clone(),
        limit,
        raw_drift,
        drift,
    })
}

/// `ċ_m = m c_m + Σ_{k=1}^m p_k (m − k + 1) c_{m−k}`: the coefficient form of
/// `∂_t f = ζ f′ p` after the `e^t` normalisation.
pub fn pde_rhs(p: &[Complex64], c: &[Complex64]) -> State {
    let n = c.len();
    let ck = |k: usize| if k == 0 { Complex64::new(1.0, 0.0) } else { c[k - 1] };
    (1..=n)
        .map(|m| {
            let mut acc = c[m - 1] * m as f64;
            for k in 1..=m {
                acc += p[k - 1] * (m - k + 1) as f64 * ck(m - k);
            }
            acc
        })
        .collect()
}

/// Evolves `f_0` under `∂_t f = ζ f′ p(ζ, t)` and returns the normalised
/// `f(·, t_end)`.
pub fn pde_evolve(
    f0: &SchlichtCoefficients,
    driver: &CaratheodoryDriver,
    t_end: f64,
    steps: usize,
    mode: EvolutionMode,
) -> Result<SchlichtCoefficients> {
    check_steps(steps)?;
    let n = check_order(f0.order())?;
    let rhs = |t: f64, c: &[Complex64]| {
        if mode == EvolutionMode::Subordination {
            driver.certify(t)?;
        }
        Ok(pde_rhs(&driver.p_coefficients(t, n), c))
    };
    Ok(schlicht(&ode::rk4_final(rhs, to_state(f0), 0.0, t_end, steps)?))
}

/// `f_0 ∘ w^{−1}(·, t)` normalised, from a subordination state `c(t)`.
pub fn characteristic_composition(
    f0: &SchlichtCoefficients,
    w_state: &EvolutionState,
) -> Result<SchlichtCoefficients> {
    let w = w_state.c.to_series().scale(&Complex64::new(libm::exp(-w_state.t), 0.0));
    let winv = w.reversion()?;
    let g = TruncatedSeries::compose(&f0.to_series(), &winv)?;
    SchlichtCoefficients::normalized_from_series(&g)
}

/// Gauge of the alternate evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Gauge {
    /// `ċ_m = u_0 m c_m + Σ_{k≥1} u_k (m − k + 1) c_{m−k}`.
    #[default]
    F1,
    /// `ċ_m = Σ_{k≥1} u_k e^{−kℓ} (m − k + 1) c_{m−k}`, `ℓ̇ = u_0`, `ℓ(0) = 0`.
    F2,
}

/// Controls `u_0(t) … u_N(t)`; missing entries are zero.
pub struct Controls {
    pub u: Vec<TimeFn<Complex64>>,
}

impl Controls {
    pub fn new(u: Vec<TimeFn<Complex64>>) -> Self {
        Self { u }
    }

    pub fn at(&self, t: f64, n: usize) -> Vec<Complex64> {
        (0..=n)
            .map(|k| self.u.get(k).map_or(Complex64::new(0.0, 0.0), |f| f(t)))
            .collect()
    }
}

/// `ċ = Σ u_k L_k(c)` in the chosen gauge.
pub fn alternate_evolve(
    controls: &Controls,
    c0: &SchlichtCoefficients,
    t_end: f64,
    steps: usize,
    gauge: Gauge,
) -> Result<Trajectory> {
    check_steps(steps)?;
    let n = check_order(c0.order())?;
    let mut y0 = to_state(c0);
    y0.push(Complex64::new(0.0, 0.0)); // ℓ
    let rhs = |t: f64, y: &[Complex64]| {
        let u = controls.at(t, n);
        let (c, ell) = (&y[..n], y[n]);
        let ck = |k: usize| if k == 0 { Complex64::new(1.0, 0.0) } else { c[k - 1] };
        let mut out: State = (1..=n)
            .map(|m| {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 1..=m {
                    let uk = match gauge {
                        Gauge::F1 => u[k],
                        Gauge::F2 => u[k] * (-ell * k as f64).exp(),
                    };
                    acc += uk * (m - k + 1) as f64 * ck(m - k);
                }
                if gauge == Gauge::F1 {
                    acc += u[0] * m as f64 * c[m - 1];
                }
                acc
            })
            .collect();
        out.push(if gauge == Gauge::F2 { u[0] } else { Complex64::new(0.0, 0.0) });
        Ok(out)
    };
    let (times, states) = ode::rk4(rhs, y0, 0.0, t_end, steps)?;
    let states = states.into_iter().map(|mut y| {
        y.truncate(n);
        y
    });
    Trajectory::from_ode(times, states.collect())
}

/// Momenta `ψ̄_1 … ψ̄_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovectorMomenta(pub Vec<Complex64>);

impl CovectorMomenta {
    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianPoint {
    pub t: f64,
    pub c: SchlichtCoefficients,
    pub psibar: CovectorMomenta,
}

/// `ψ̄̇_j = −Σ_{m≥1} G_m ψ̄_{j+m}` with `G(z) = 1 − p(w) − w p′(w)`,
/// `w = e^{−t} f(z)`.
pub fn momenta_rhs(p: &[Complex64], t: f64, c: &[Complex64], psibar: &[Complex64]) -> State {
    let n = c.len();
    let f = schlicht(c).to_series().truncate(n);
    let mut pow = TruncatedSeries::one(n);
    let mut g = TruncatedSeries::zero(n);
    for (k, pk) in p.iter().enumerate().take(n) {
        pow = pow.mul_truncated(&f);
        let k = k + 1;
        let w = -pk * (k + 1) as f64 * libm::exp(-(k as f64) * t);
        g = g.add(&pow.scale(&w)).expect("same order");
    }
    (1..=n)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 1..=n - j {
                acc += g.coeff(m) * psibar[j + m - 1];
            }
            -acc
        })
        .collect()
}

/// Co-evolves `c(t)` and `ψ̄(t)` from `c(0) = 0`.
pub fn hamiltonian_flow(
    driver: &CaratheodoryDriver,
    psibar0: &CovectorMomenta,
    t_end: f64,
    steps: usize,
    mode: EvolutionMode,
) -> Result<Vec<HamiltonianPoint>> {
    check_steps(steps)?;
    let n = check_order(psibar0.0.len())?;
    let mut y0 = vec![Complex64::new(0.0, 0.0); n];
    y0.extend_from_slice(&psibar0.0);
    let rhs = |t: f64, y: &[Complex64]| {
        if mode == EvolutionMode::Subordination {
            driver.certify(t)?;
        }
        let p = driver.p_coefficients(t, n);
        let (c, psi) = y.split_at(n);
        let mut out = ode_rhs(&p, t, c);
        out.extend(momenta_rhs(&p, t, c, psi));
        Ok(out)
    };
    let (times, states) = ode::rk4(rhs, y0, 0.0, t_end, steps)?;
    Ok(times
        .into_iter()
        .zip(states)
        .map(|(t, y)| HamiltonianPoint {
            t,
            c: schlicht(&y[..n]),
            psibar: CovectorMomenta(y[n..].to_vec()),
        })
        .collect())
}

/// Coefficients `L_k = ψ̄_k + Σ_{j≥1} (j + 1) c_j ψ̄_{k+j}` of the negative
/// part of `f′ ψ̄`.
pub fn conserved_spectrum(c: &SchlichtCoefficients, psibar: &CovectorMomenta) -> Vec<Complex64> {
    let n = psibar.0.len();
    (1..=n)
        .map(|k| {
            let mut acc = psibar.0[k - 1];
            for j in 1..=n - k {
                acc += c.c(j) * (j + 1) as f64 * psibar.0[k + j - 1];
            }
            acc
        })
        .collect()
}

/// `max_k |L_k(t) − L_k(0)| / |L_k(0)|` over a trajectory.
pub fn spectrum_drift(points: &[HamiltonianPoint]) -> f64 {
    let Some(first) = points.first() else {
        return 0.0;
    };
    let l0 = conserved_spectrum(&first.c, &first.psibar);
    points
        .iter()
        .map(|p| {
            conserved_spectrum(&p.c, &p.psibar)
                .iter()
                .zip(&l0)
                .map(|(a, b)| (a - b).norm() / b.norm().max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}
