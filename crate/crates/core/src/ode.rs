//! Classical fixed-step Runge–Kutta on complex state vectors.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type State = Vec<Complex64>;

fn axpy(y: &[Complex64], h: f64, k: &[Complex64]) -> State {
    y.iter().zip(k).map(|(a, b)| a + b * h).collect()
}

/// One RK4 step of `y' = rhs(t, y)`.
pub fn rk4_step<F>(rhs: &mut F, t: f64, y: &[Complex64], h: f64) -> Result<State>
where
    F: FnMut(f64, &[Complex64]) -> Result<State>,
{
    let k1 = rhs(t, y)?;
    let k2 = rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = rhs(t + h, &axpy(y, h, &k3))?;
    let out: State = (0..y.len())
        .map(|i| y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0))
        .collect();
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Blowup { t: t + h });
    }
    Ok(out)
}

/// Integrates from `t0` to `t1` in `steps` equal steps; returns the states at
/// every grid time, `steps + 1` in total.
pub fn rk4<F>(mut rhs: F, y0: State, t0: f64, t1: f64, steps: usize) -> Result<(Vec<f64>, Vec<State>)>
where
    F: FnMut(f64, &[Complex64]) -> Result<State>,
{
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1"));
    }
    let h = (t1 - t0) / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(t0);
    states.push(y0);
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let next = rk4_step(&mut rhs, t, &states[i], h)?;
        times.push(if i + 1 == steps { t1 } else { t + h });
        states.push(next);
    }
    Ok((times, states))
}

/// As [`rk4`] but keeps only the final state.
pub fn rk4_final<F>(mut rhs: F, y0: State, t0: f64, t1: f64, steps: usize) -> Result<State>
where
    F: FnMut(f64, &[Complex64]) -> Result<State>,
{
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1"));
    }
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    for i in 0..steps {
        y = rk4_step(&mut rhs, t0 + i as f64 * h, &y, h)?;
    }
    Ok(y)
}
