//! Periodic KdV on `[0, 2π)` by Fourier–Galerkin truncation.
//!
//! The flow is `u_t = ∂_x δH/δu` with `H = ∫ (½ u′² + u³) dx`, i.e.
//! `u_t = 6 u u′ − u‴`. Products are formed on a padded grid large enough
//! that no aliasing reaches the retained modes.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;

const TAU: f64 = 2.0 * core::f64::consts::PI;

/// Real field `u(x) = Σ_{|n|≤M} û_n e^{inx}`, `û_{−n} = conj(û_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicField {
    m: usize,
    /// `û_{−M} … û_M`
    modes: Vec<Complex64>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl PeriodicField {
    pub fn zero(m: usize) -> Self {
        Self { m, modes: vec![zero(); 2 * m + 1] }
    }

    /// From `û_{−M} … û_M`; the reality condition is imposed.
    pub fn from_modes(m: usize, modes: Vec<Complex64>) -> Result<Self> {
        if modes.len() != 2 * m + 1 {
            return Err(Error::InvalidArgument("need 2M+1 modes"));
        }
        let mut f = Self { m, modes };
        f.enforce_reality();
        Ok(f)
    }

    /// From the non-negative modes `û_0 … û_M`.
    pub fn from_positive_modes(positive: &[Complex64]) -> Result<Self> {
        if positive.is_empty() {
            return Err(Error::InvalidArgument("need at least the zero mode"));
        }
        let m = positive.len() - 1;
        let mut f = Self::zero(m);
        for (n, a) in positive.iter().enumerate() {
            f.set_mode(n as i64, *a);
        }
        f.enforce_reality();
        Ok(f)
    }

    pub fn constant(m: usize, a: f64) -> Self {
        let mut f = Self::zero(m);
        f.modes[m] = Complex64::new(a, 0.0);
        f
    }

    /// `a cos(kx) + b sin(kx)`.
    pub fn trig(m: usize, k: usize, a: f64, b: f64) -> Result<Self> {
        if k > m {
            return Err(Error::InvalidArgument("wavenumber above truncation"));
        }
        let mut f = Self::zero(m);
        if k == 0 {
            f.modes[m] = Complex64::new(a, 0.0);
        } else {
            f.set_mode(k as i64, Complex64::new(a / 2.0, -b / 2.0));
            f.set_mode(-(k as i64), Complex64::new(a / 2.0, b / 2.0));
        }
        Ok(f)
    }

    /// Samples `u` on a grid and keeps `|n| ≤ M`.
    pub fn sample(m: usize, u: impl Fn(f64) -> f64) -> Self {
        let l = grid_size(2 * m + 1);
        let values: Vec<f64> = (0..l).map(|j| u(TAU * j as f64 / l as f64)).collect();
        Self::from_physical(&values, m).expect("power-of-two grid")
    }

    pub fn truncation(&self) -> usize {
        self.m
    }

    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    /// `û_n`, zero outside `|n| ≤ M`.
    pub fn mode(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.m {
            zero()
        } else {
            self.modes[(n + self.m as i64) as usize]
        }
    }

    fn set_mode(&mut self, n: i64, a: Complex64) {
        let i = (n + self.m as i64) as usize;
        self.modes[i] = a;
    }

    pub fn enforce_reality(&mut self) {
        let m = self.m;
        self.modes[m].im = 0.0;
        for n in 1..=m {
            let a = (self.modes[m + n] + self.modes[m - n].conj()) * 0.5;
            self.modes[m + n] = a;
            self.modes[m - n] = a.conj();
        }
    }

    /// Same field with truncation `m`, padding or dropping modes.
    pub fn resize(&self, m: usize) -> Self {
        let mut f = Self::zero(m);
        let top = m.min(self.m) as i64;
        for n in -top..=top {
            f.set_mode(n, self.mode(n));
        }
        f
    }

    pub fn map_modes(&self, g: impl Fn(i64, Complex64) -> Complex64) -> Self {
        let m = self.m as i64;
        let mut f = Self {
            m: self.m,
            modes: (-m..=m).map(|n| g(n, self.mode(n))).collect(),
        };
        f.enforce_reality();
        f
    }

    /// `∂_x^k u`.
    pub fn derivative(&self, k: u32) -> Self {
        self.map_modes(|n, a| a * Complex64::new(0.0, n as f64).powu(k))
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.m.max(other.m);
        let (a, b) = (self.resize(m), other.resize(m));
        a.map_modes(|n, x| x + b.mode(n))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_modes(|_, a| a * s)
    }

    /// Values at `x_j = 2πj/L`, `L` a power of two `≥ 2M + 1`.
    pub fn to_physical(&self, l: usize) -> Result<Vec<f64>> {
        if l < 2 * self.m + 1 {
            return Err(Error::InvalidArgument("grid too coarse for the field"));
        }
        let mut buf = vec![zero(); l];
        for n in -(self.m as i64)..=self.m as i64 {
            buf[n.rem_euclid(l as i64) as usize] = self.mode(n);
        }
        fft::ifft(&mut buf)?;
        Ok(buf.iter().map(|z| z.re).collect())
    }

    /// Projection onto `|n| ≤ m` of grid values.
    pub fn from_physical(values: &[f64], m: usize) -> Result<Self> {
        let l = values.len();
        if l < 2 * m + 1 {
            return Err(Error::InvalidArgument("grid too coarse for the truncation"));
        }
        let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft::fft(&mut buf)?;
        let mut f = Self::zero(m);
        for n in -(m as i64)..=m as i64 {
            f.set_mode(n, buf[n.rem_euclid(l as i64) as usize] / l as f64);
        }
        f.enforce_reality();
        Ok(f)
    }

    /// Direct evaluation of the complex sum at `x`.
    pub fn evaluate_complex(&self, x: f64) -> Complex64 {
        let m = self.m as i64;
        (-m..=m).map(|n| self.mode(n) * Complex64::from_polar(1.0, n as f64 * x)).sum()
    }

    /// Largest `|Im u|` on the `2M+1` collocation grid.
    pub fn max_imaginary_on_grid(&self) -> f64 {
        let pts = 2 * self.m + 1;
        (0..pts)
            .map(|j| self.evaluate_complex(TAU * j as f64 / pts as f64).im.abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|u|` on a grid fine enough to resolve the field.
    pub fn max_abs(&self) -> f64 {
        self.to_physical(grid_size(4 * self.m + 1))
            .expect("grid large enough")
            .iter()
            .fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn max_mode_diff(&self, other: &Self) -> f64 {
        let m = self.m.max(other.m) as i64;
        (-m..=m).map(|n| (self.mode(n) - other.mode(n)).norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.modes.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

fn grid_size(min: usize) -> usize {
    min.next_power_of_two().max(2)
}

/// Projection onto `|n| ≤ m_out` of the pointwise product of the factors.
///
/// The grid has more than `Σ M_i + m_out` points, so aliased modes stay
/// outside the kept band; for two factors and `m_out = M` this is the 3/2 rule.
pub fn product(factors: &[&PeriodicField], m_out: usize) -> PeriodicField {
    let band: usize = factors.iter().map(|f| f.m).sum();
    let l = grid_size(band + m_out + 1).max(grid_size(2 * m_out + 1));
    let mut acc = vec![1.0; l];
    for f in factors {
        let v = f.to_physical(l).expect("grid large enough");
        for (a, b) in acc.iter_mut().zip(v) {
            *a *= b;
        }
    }
    PeriodicField::from_physical(&acc, m_out).expect("grid large enough")
}

/// `6 u u′ − u‴`, spectrally.
pub fn kdv_rhs(u: &PeriodicField) -> PeriodicField {
    let sq = product(&[u, u], u.m);
    sq.derivative(1).scale(3.0).sub(&u.derivative(3))
}

/// Fourier-space nonlinear term `3 i n (u²)^_n`.
fn nonlinear(u: &PeriodicField) -> PeriodicField {
    product(&[u, u], u.m).derivative(1).scale(3.0)
}

/// Largest admissible `dt · M · max|u|`.
pub const CFL_LIMIT: f64 = 0.5;

/// Integrating-factor RK4 for the KdV flow.
#[derive(Debug, Clone)]
pub struct KdvStepper {
    h: f64,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
}

impl KdvStepper {
    /// Linear part `−u‴` has symbol `i n³`; it is propagated exactly.
    pub fn new(m: usize, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidArgument("dt must be positive"));
        }
        let mm = m as i64;
        let phase = |n: i64, s: f64| Complex64::from_polar(1.0, (n * n * n) as f64 * s);
        Ok(Self {
            h,
            half: (-mm..=mm).map(|n| phase(n, h / 2.0)).collect(),
            full: (-mm..=mm).map(|n| phase(n, h)).collect(),
        })
    }

    fn apply(e: &[Complex64], u: &PeriodicField) -> PeriodicField {
        let m = u.m as i64;
        u.map_modes(|n, a| a * e[(n + m) as usize])
    }

    fn check_cfl(&self, u: &PeriodicField) -> Result<()> {
        if self.h * u.m as f64 * u.max_abs() > CFL_LIMIT {
            Err(Error::StepTooLarge("dt·M·max|u| exceeds 0.5"))
        } else {
            Ok(())
        }
    }

    pub fn step(&self, u: &PeriodicField, t: f64) -> Result<PeriodicField> {
        self.check_cfl(u)?;
        let h = self.h;
        let (e, e2) = (&self.half, &self.full);
        let k1 = nonlinear(u);
        let k2 = nonlinear(&Self::apply(e, &u.add(&k1.scale(h / 2.0))));
        let eu = Self::apply(e, u);
        let k3 = nonlinear(&eu.add(&k2.scale(h / 2.0)));
        let k4 = nonlinear(&Self::apply(e2, u).add(&Self::apply(e, &k3).scale(h)));
        let incr = Self::apply(e2, &k1)
            .add(&Self::apply(e, &k2.add(&k3)).scale(2.0))
            .add(&k4)
            .scale(h / 6.0);
        let next = Self::apply(e2, u).add(&incr);
        if !next.is_finite() {
            return Err(Error::Blowup { t: t + h });
        }
        Ok(next)
    }
}

/// Evolves to `T` with steps of at most `dt`.
pub fn kdv_evolve(u0: &PeriodicField, t_end: f64, dt: f64) -> Result<PeriodicField> {
    Ok(kdv_trajectory(u0, t_end, dt, usize::MAX)?.pop().expect("non-empty").1)
}

/// States at `t = 0`, every `every` steps and at `T`.
pub fn kdv_trajectory(u0: &PeriodicField, t_end: f64, dt: f64, every: usize) -> Result<Vec<(f64, PeriodicField)>> {
    if !(t_end >= 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidArgument("need T >= 0 and dt > 0"));
    }
    let steps = libm::ceil(t_end / dt).max(1.0) as usize;
    let h = t_end / steps as f64;
    let mut out = vec![(0.0, u0.clone())];
    if t_end == 0.0 {
        return Ok(out);
    }
    let stepper = KdvStepper::new(u0.m, h)?;
    let mut u = u0.clone();
    for i in 0..steps {
        u = stepper.step(&u, i as f64 * h)?;
        if (i + 1) % every.max(1) == 0 || i + 1 == steps {
            out.push(((i + 1) as f64 * h, u.clone()));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedIntegrals {
    /// `∫ u`
    pub i_minus1: f64,
    /// `∫ u²`
    pub i0: f64,
    /// `∫ (½ u′² + u³)`
    pub i1: f64,
}

/// The three integrals by Parseval; exact for the truncated field.
pub fn conserved(u: &PeriodicField) -> ConservedIntegrals {
    let m = u.m as i64;
    let i_minus1 = TAU * u.mode(0).re;
    let i0 = TAU * (-m..=m).map(|n| u.mode(n).norm_sqr()).sum::<f64>();
    let grad = (-m..=m).map(|n| 0.5 * (n * n) as f64 * u.mode(n).norm_sqr()).sum::<f64>();
    let cube = product(&[u, u, u], 0).mode(0).re;
    ConservedIntegrals { i_minus1, i0, i1: TAU * (grad + cube) }
}

/// Monomial `coef · u^a u′^b u″^c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityTerm {
    pub coef: f64,
    pub powers: [u32; 3],
}

/// Polynomial density `f(u, u′, u″)` of total degree at most 4.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Density {
    pub terms: Vec<DensityTerm>,
}

pub const MAX_DENSITY_DEGREE: u32 = 4;

impl Density {
    pub fn new(terms: Vec<DensityTerm>) -> Self {
        Self { terms }
    }

    pub fn term(mut self, coef: f64, powers: [u32; 3]) -> Self {
        self.terms.push(DensityTerm { coef, powers });
        self
    }

    /// `½ u′² + u³`.
    pub fn kdv_hamiltonian() -> Self {
        Self::default().term(0.5, [0, 2, 0]).term(1.0, [3, 0, 0])
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.powers.iter().sum()).max().unwrap_or(0)
    }

    /// `∂f/∂(slot)`.
    fn partial(&self, slot: usize) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|t| t.powers[slot] > 0)
                .map(|t| {
                    let mut p = t.powers;
                    p[slot] -= 1;
                    DensityTerm { coef: t.coef * t.powers[slot] as f64, powers: p }
                })
                .collect(),
        }
    }

    /// `f(u, u′, u″)` projected onto `|n| ≤ M`.
    fn evaluate(&self, u: &PeriodicField) -> PeriodicField {
        let slots = [u.clone(), u.derivative(1), u.derivative(2)];
        let mut acc = PeriodicField::zero(u.m);
        for t in &self.terms {
            let mut factors: Vec<&PeriodicField> = Vec::new();
            for (s, &p) in t.powers.iter().enumerate() {
                for _ in 0..p {
                    factors.push(&slots[s]);
                }
            }
            let term = if factors.is_empty() {
                PeriodicField::constant(u.m, 1.0)
            } else {
                product(&factors, u.m)
            };
            acc = acc.add(&term.scale(t.coef));
        }
        acc
    }
}

/// `δF/δu = ∂f/∂u − ∂_x ∂f/∂u′ + ∂_x² ∂f/∂u″`.
pub fn variational_derivative(density: &Density, u: &PeriodicField) -> Result<PeriodicField> {
    if density.degree() > MAX_DENSITY_DEGREE {
        return Err(Error::UnsupportedFunctional("density degree above 4"));
    }
    if density.terms.iter().any(|t| !t.coef.is_finite()) {
        return Err(Error::UnsupportedFunctional("non-finite coefficient"));
    }
    let e0 = density.partial(0).evaluate(u);
    let e1 = density.partial(1).evaluate(u).derivative(1);
    let e2 = density.partial(2).evaluate(u).derivative(2);
    Ok(e0.sub(&e1).add(&e2))
}

/// `s = v² + v′`, projected onto the band of `v`.
pub fn miura(v: &PeriodicField) -> PeriodicField {
    product(&[v, v], v.m).add(&v.derivative(1))
}

/// Largest mode of
/// `(∂_t − 6s∂_x + ∂_x³)s − (2v + ∂_x)(∂_t − 6v²∂_x + ∂_x³)v`
/// with `s = v² + v′` and `v_t = w` arbitrary; all products kept in full.
pub fn gardner_residual(v: &PeriodicField, w: &PeriodicField) -> f64 {
    let m = v.m.max(w.m);
    let (v, w) = (v.resize(m), w.resize(m));
    let full = 4 * m;
    let s = product(&[&v, &v], 2 * m).add(&v.derivative(1));
    let s_t = product(&[&v, &w], 2 * m).scale(2.0).add(&w.derivative(1));
    let sx = s.derivative(1);
    let lhs = s_t
        .resize(full)
        .sub(&product(&[&s, &sx], full).scale(6.0))
        .add(&s.derivative(3).resize(full));
    let vx = v.derivative(1);
    let q = w
        .resize(3 * m)
        .sub(&product(&[&v, &v, &vx], 3 * m).scale(6.0))
        .add(&v.derivative(3).resize(3 * m));
    let rhs = product(&[&v, &q], full).scale(2.0).add(&q.derivative(1).resize(full));
    lhs.max_mode_diff(&rhs)
}
