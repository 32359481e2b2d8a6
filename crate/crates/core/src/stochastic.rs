//! Chordal SLE and the regularised Brownian flow on the circle.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rng::NormalStream;

/// `(c, h) = ((6 − κ)(3κ − 8) / 2κ, (6 − κ) / 2κ)`.
pub fn central_charge(kappa: f64) -> Result<(f64, f64)> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidArgument("kappa must be positive"));
    }
    Ok(((6.0 - kappa) * (3.0 * kappa - 8.0) / (2.0 * kappa), (6.0 - kappa) / (2.0 * kappa)))
}

/// Same closed forms over the rationals, for `κ = p/q` given exactly.
pub fn central_charge_exact(kappa: &BigRational) -> Result<(BigRational, BigRational)> {
    if !kappa.is_positive() || kappa.is_zero() {
        return Err(Error::InvalidArgument("kappa must be positive"));
    }
    let r = |n: i64| BigRational::from_integer(n.into());
    let two_k = kappa * r(2);
    let c = (r(6) - kappa) * (kappa * r(3) - r(8)) / &two_k;
    let h = (r(6) - kappa) / two_k;
    Ok((c, h))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SleConfig {
    pub kappa: f64,
    pub t_end: f64,
    pub dt: f64,
    pub seed: u64,
    pub n_paths: usize,
}

impl SleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidArgument("kappa must be non-negative"));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidArgument("dt must be positive"));
        }
        if !(self.t_end >= self.dt) || !self.t_end.is_finite() {
            return Err(Error::InvalidArgument("horizon must be at least dt"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        libm::round(self.t_end / self.dt) as usize
    }

    /// Step actually used, so that `steps · dt = T`.
    pub fn step(&self) -> f64 {
        self.t_end / self.steps() as f64
    }
}

/// `ξ_t = √κ B_t` on the grid `t_i = i dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingPath {
    pub times: Vec<f64>,
    pub xi: Vec<f64>,
}

/// Path number `index` of the ensemble; fully determined by `(seed, index)`.
pub fn sample_driving(config: &SleConfig, index: u64) -> Result<DrivingPath> {
    config.validate()?;
    let steps = config.steps();
    let h = config.step();
    let scale = libm::sqrt(config.kappa * h);
    let mut rng = NormalStream::new(config.seed, index);
    let mut xi = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    xi.push(0.0);
    times.push(0.0);
    for i in 0..steps {
        let dx = if scale == 0.0 { 0.0 } else { scale * rng.next_normal() };
        xi.push(xi[i] + dx);
        times.push((i + 1) as f64 * h);
    }
    Ok(DrivingPath { times, xi })
}

/// Threshold on `Im g` below which a point counts as swallowed.
pub const SWALLOW_THRESHOLD: f64 = 1e-12;

/// One step of `ġ = 2 / (g − ξ)` with `ξ` frozen: `ξ + √((g − ξ)² + 4 dt)`,
/// root in the upper half-plane. `None` once the point reaches the real line.
pub fn slit_step(g: Complex64, xi: f64, dt: f64) -> Option<Complex64> {
    let d = g - xi;
    let mut s = (d * d + 4.0 * dt).sqrt();
    if s.im < 0.0 {
        s = -s;
    }
    let out = s + xi;
    if out.im > SWALLOW_THRESHOLD && out.re.is_finite() {
        Some(out)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SleTrajectory {
    /// `g(z, t_i)` for the grid times reached.
    pub values: Vec<Complex64>,
    /// Time at which the point left the domain.
    pub swallowed_at: Option<f64>,
}

impl SleTrajectory {
    pub fn last(&self) -> Complex64 {
        *self.values.last().expect("starts with z")
    }
}

pub fn sle_flow(z: Complex64, path: &DrivingPath) -> Result<SleTrajectory> {
    if !(z.im > 0.0) {
        return Err(Error::InvalidArgument("tracked point must lie in the upper half-plane"));
    }
    let mut values = Vec::with_capacity(path.xi.len());
    values.push(z);
    // carry w = (g - ξ_i)^2 so that frozen driving adds 4 dt without rounding
    // through a square root and back
    let mut w = z * z;
    for i in 0..path.xi.len() - 1 {
        let dt = path.times[i + 1] - path.times[i];
        let mut s = (w + 4.0 * dt).sqrt();
        if s.im < 0.0 {
            s = -s;
        }
        if !(s.im > SWALLOW_THRESHOLD) || !s.re.is_finite() {
            return Ok(SleTrajectory { values, swallowed_at: Some(path.times[i + 1]) });
        }
        values.push(s + path.xi[i]);
        let dxi = path.xi[i + 1] - path.xi[i];
        w = if dxi == 0.0 { w + 4.0 * dt } else { (s - dxi) * (s - dxi) };
    }
    Ok(SleTrajectory { values, swallowed_at: None })
}

/// Half-plane capacity read off `g(z, T) = z + hcap/z + …` at `z = 100i`.
pub fn hcap_estimate(path: &DrivingPath) -> Result<f64> {
    let z = Complex64::new(0.0, 100.0);
    let tr = sle_flow(z, path)?;
    Ok((z * (tr.last() - z)).re)
}

/// Analytic observable with its first two derivatives.
pub trait Observable: Sync {
    fn value(&self, z: Complex64) -> Complex64;
    fn d1(&self, z: Complex64) -> Complex64;
    fn d2(&self, z: Complex64) -> Complex64;
}

/// `z^a`, principal branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Power(pub f64);

impl Observable for Power {
    fn value(&self, z: Complex64) -> Complex64 {
        z.powf(self.0)
    }
    fn d1(&self, z: Complex64) -> Complex64 {
        z.powf(self.0 - 1.0) * self.0
    }
    fn d2(&self, z: Complex64) -> Complex64 {
        z.powf(self.0 - 2.0) * (self.0 * (self.0 - 1.0))
    }
}

/// Principal `log z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Log;

impl Observable for Log {
    fn value(&self, z: Complex64) -> Complex64 {
        z.ln()
    }
    fn d1(&self, z: Complex64) -> Complex64 {
        z.inv()
    }
    fn d2(&self, z: Complex64) -> Complex64 {
        -(z * z).inv()
    }
}

/// Observable given by three closures.
pub struct FnObservable<F, G, H> {
    pub f: F,
    pub df: G,
    pub d2f: H,
}

impl<F, G, H> Observable for FnObservable<F, G, H>
where
    F: Fn(Complex64) -> Complex64 + Sync,
    G: Fn(Complex64) -> Complex64 + Sync,
    H: Fn(Complex64) -> Complex64 + Sync,
{
    fn value(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }
    fn d1(&self, z: Complex64) -> Complex64 {
        (self.df)(z)
    }
    fn d2(&self, z: Complex64) -> Complex64 {
        (self.d2f)(z)
    }
}

/// `(κ/2) F″(z) + (2/z) F′(z)`.
pub fn drift_operator(f: &dyn Observable, z: Complex64, kappa: f64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::Singularity);
    }
    Ok(f.d2(z) * (kappa / 2.0) + f.d1(z) * 2.0 / z)
}

/// `F(k_T) − F(z_0)` for one path, `k_t = g_t(z_0) − ξ_t`; `None` if swallowed.
pub fn martingale_sample(f: &dyn Observable, z0: Complex64, config: &SleConfig, index: u64) -> Result<Option<Complex64>> {
    let path = sample_driving(config, index)?;
    let tr = sle_flow(z0, &path)?;
    if tr.swallowed_at.is_some() {
        return Ok(None);
    }
    let k = tr.last() - path.xi[path.xi.len() - 1];
    Ok(Some(f.value(k) - f.value(z0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MartingaleReport {
    pub empirical_drift: Complex64,
    pub predicted_drift: Complex64,
    /// Standard errors of the real and imaginary parts of the drift estimate.
    pub standard_error: (f64, f64),
    /// Largest of the two component z-scores; `None` when the standard error
    /// vanishes (deterministic driving).
    pub z_score: Option<f64>,
    pub abs_error: f64,
    pub paths: usize,
    pub swallowed: usize,
}

/// Largest tolerated swallowed fraction.
pub const MAX_SWALLOW_FRACTION: f64 = 0.01;

/// Combines per-path samples, in the order given, into a report.
pub fn martingale_report(
    f: &dyn Observable,
    z0: Complex64,
    config: &SleConfig,
    samples: &[Option<Complex64>],
) -> Result<MartingaleReport> {
    let total = samples.len();
    let kept: Vec<Complex64> = samples.iter().flatten().copied().collect();
    let swallowed = total - kept.len();
    if kept.len() < 2 || swallowed as f64 > MAX_SWALLOW_FRACTION * total as f64 {
        return Err(Error::UnreliableEstimate { swallowed, total });
    }
    let n = kept.len() as f64;
    let mean: Complex64 = kept.iter().sum::<Complex64>() / n;
    let (mut vr, mut vi) = (0.0, 0.0);
    for x in &kept {
        let d = x - mean;
        vr += d.re * d.re;
        vi += d.im * d.im;
    }
    let t = config.t_end;
    let se = (libm::sqrt(vr / (n - 1.0) / n) / t, libm::sqrt(vi / (n - 1.0) / n) / t);
    let empirical = mean / t;
    let predicted = drift_operator(f, z0, config.kappa)?;
    let diff = empirical - predicted;
    let z_score = if se.0 > 0.0 && se.1 > 0.0 {
        Some((diff.re / se.0).abs().max((diff.im / se.1).abs()))
    } else if se.0 > 0.0 {
        Some((diff.re / se.0).abs())
    } else if se.1 > 0.0 {
        Some((diff.im / se.1).abs())
    } else {
        None
    };
    Ok(MartingaleReport {
        empirical_drift: empirical,
        predicted_drift: predicted,
        standard_error: se,
        z_score,
        abs_error: diff.norm(),
        paths: total,
        swallowed,
    })
}

/// Sequential estimate of `(E F(k_T) − F(z_0)) / T` against the drift operator.
pub fn martingale_check(f: &dyn Observable, z0: Complex64, config: &SleConfig) -> Result<MartingaleReport> {
    config.validate()?;
    let samples = (0..config.n_paths as u64)
        .map(|i| martingale_sample(f, z0, config, i))
        .collect::<Result<Vec<_>>>()?;
    martingale_report(f, z0, config, &samples)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFlowConfig {
    pub r: f64,
    pub n_modes: usize,
    pub t_end: f64,
    pub dt: f64,
    pub seed: u64,
    pub grid: usize,
    /// Record the map every this many steps.
    pub output_every: usize,
}

impl CircleFlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::InvalidArgument("r must lie in (0, 1)"));
        }
        if self.n_modes < 2 {
            return Err(Error::InvalidArgument("at least two modes"));
        }
        if !(self.dt > 0.0) || !(self.t_end >= self.dt) {
            return Err(Error::InvalidArgument("need 0 < dt <= T"));
        }
        if self.grid < 2 || self.output_every == 0 {
            return Err(Error::InvalidArgument("grid >= 2 and output_every >= 1"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        libm::round(self.t_end / self.dt) as usize
    }
}

/// Source of the Brownian increments `ΔX_1 … ΔX_{2M}` of one step.
pub trait NoiseSource {
    fn increments(&mut self, dt: f64, out: &mut [f64]);
}

/// Increments from a counter-based stream.
pub struct StreamNoise(pub NormalStream);

impl StreamNoise {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self(NormalStream::new(seed, stream))
    }
}

impl NoiseSource for StreamNoise {
    fn increments(&mut self, dt: f64, out: &mut [f64]) {
        self.0.fill(out, libm::sqrt(dt));
    }
}

/// All increments zero.
pub struct ZeroNoise;

impl NoiseSource for ZeroNoise {
    fn increments(&mut self, _dt: f64, out: &mut [f64]) {
        out.fill(0.0);
    }
}

/// Grid maps `θ_j ↦ g(θ_j)` at the recorded times. Values are on the lifted
/// line; the map at `θ_j + 2πm` is `g(θ_j) + 2πm`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleFlow {
    pub theta: Vec<f64>,
    pub times: Vec<f64>,
    pub maps: Vec<Vec<f64>>,
}

impl CircleFlow {
    /// Lifted value at grid index `j` (any integer) of recorded map `k`.
    pub fn lifted(&self, k: usize, j: i64) -> f64 {
        let n = self.theta.len() as i64;
        let (q, r) = (j.div_euclid(n), j.rem_euclid(n));
        self.maps[k][r as usize] + 2.0 * core::f64::consts::PI * q as f64
    }
}

/// Whether `g` is strictly increasing on the grid including the wrap-around.
pub fn is_monotone(g: &[f64]) -> bool {
    g.windows(2).all(|w| w[1] > w[0])
        && g.first().zip(g.last()).is_some_and(|(a, b)| a + 2.0 * core::f64::consts::PI > *b)
}

/// Euler–Maruyama integration of
/// `dg = Σ_{n=2}^{M} rⁿ/√(n³−n) (cos(n g) dX_{2n} − sin(n g) dX_{2n−1})`.
pub fn circle_flow(config: &CircleFlowConfig, noise: &mut dyn NoiseSource) -> Result<CircleFlow> {
    config.validate()?;
    let tau = 2.0 * core::f64::consts::PI;
    let theta: Vec<f64> = (0..config.grid).map(|j| tau * j as f64 / config.grid as f64).collect();
    let weights: Vec<f64> = (2..=config.n_modes)
        .map(|n| {
            let n = n as f64;
            libm::pow(config.r, n) / libm::sqrt(n * n * n - n)
        })
        .collect();
    let steps = config.steps();
    let h = config.t_end / steps as f64;
    let mut g = theta.clone();
    let mut dx = vec![0.0; 2 * config.n_modes];
    let mut times = vec![0.0];
    let mut maps = vec![g.clone()];
    for step in 1..=steps {
        noise.increments(h, &mut dx);
        for x in g.iter_mut() {
            let mut inc = 0.0;
            for (i, w) in weights.iter().enumerate() {
                let n = i + 2;
                let (s, c) = libm::sincos(n as f64 * *x);
                // dX_{2n} pairs with cos, dX_{2n-1} with sin (1-based)
                inc += w * (dx[2 * n - 1] * c - dx[2 * n - 2] * s);
            }
            *x += inc;
        }
        if !is_monotone(&g) {
            return Err(Error::StepTooLarge("grid map lost monotonicity; reduce dt"));
        }
        if step % config.output_every == 0 || step == steps {
            times.push(step as f64 * h);
            maps.push(g.clone());
        }
    }
    Ok(CircleFlow { theta, times, maps })
}
