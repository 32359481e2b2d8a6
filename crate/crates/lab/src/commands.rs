//! One function per subcommand, each producing a [`RunReport`].

use std::path::Path;

use loewner_core::geodesic::{self, HamiltonianState, VelocityControls};
use loewner_core::kdv::{self, PeriodicField};
use loewner_core::loewner::{self, CaratheodoryDriver, CovectorMomenta, EvolutionMode};
use loewner_core::poly::{Poly, VectorField};
use loewner_core::stochastic::{self, CircleFlowConfig, SleConfig, StreamNoise, ZeroNoise};
use loewner_core::witt;
use loewner_core::{Complex64, Scalar, SchlichtCoefficients};
use serde_json::Value;

use crate::config::*;
use crate::error::{LabError, Result};
use crate::parallel::ordered_map;
use crate::params::TimeFunction;
use crate::report::{complex_json, complex_list_json, float_json, Row, RunReport};
use crate::sampling::{gaussian_vec, random_exact, random_point};

fn usage(msg: impl Into<String>) -> LabError {
    LabError::Usage(msg.into())
}

fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| usage("stochastic runs need an explicit --seed"))
}

fn check_every(every: usize) -> Result<()> {
    if every == 0 {
        Err(usage("--every must be at least 1"))
    } else {
        Ok(())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

// ---- witt-check -----------------------------------------------------------

struct Residual {
    check: &'static str,
    point: usize,
    m: i64,
    n: i64,
    value: f64,
    exact_zero: bool,
}

fn max_modulus<S: Scalar>(v: &[S]) -> (f64, bool) {
    let zero = v.iter().all(|x| x.is_zero());
    (v.iter().map(|x| x.modulus()).fold(0.0, f64::max), zero)
}

fn algebra_residuals<S: Scalar>(f: &SchlichtCoefficients<S>, point: usize, out: &mut Vec<Residual>) -> Result<()> {
    let n = f.order();
    let mut push = |check, m: i64, k: i64, (value, exact_zero): (f64, bool)| {
        out.push(Residual { check, point, m, n: k, value, exact_zero })
    };
    for m in 1..=5usize {
        for k in m + 1..=5 {
            if m + k <= n {
                let r = witt::witt_commutator_residual(m, k, f)?;
                push("commutator", m as i64, k as i64, max_modulus(r.coeffs()));
            }
        }
    }
    let top = n.min(4) as i32;
    let fields: Vec<VectorField> = (1..=top).map(|j| witt::kirillov_field(j, n)).collect::<loewner_core::Result<_>>()?;
    for a in 0..fields.len() {
        for b in a + 1..fields.len() {
            for c in b + 1..fields.len() {
                let (x, y, z) = (&fields[a], &fields[b], &fields[c]);
                let sum = VectorField::bracket(&VectorField::bracket(x, y), z)
                    .add(&VectorField::bracket(&VectorField::bracket(y, z), x))
                    .add(&VectorField::bracket(&VectorField::bracket(z, x), y));
                let label = (a as i64 + 1) * 10 + b as i64 + 1;
                push("jacobi", label, c as i64 + 1, max_modulus(&sum.evaluate(f.as_slice())));
            }
        }
    }
    let mat = witt::dual_pairing_matrix(f);
    let dev: Vec<S> = mat
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(move |(j, x)| if i == j { x.clone() - S::one() } else { x.clone() })
        })
        .collect();
    push("dual_pairing", 0, 0, max_modulus(&dev));
    let l0 = witt::reconstruct_l0(f)?.truncate(n);
    let closed = witt::negative_generator_apply(0, f)?;
    push("l0_reconstruction", 0, 0, max_modulus(l0.sub(&closed)?.coeffs()));
    let p = witt::p_polynomials(n);
    let kmax = n.min(6);
    for k in 1..=kmax {
        let field = witt::kirillov_field(k as i32, n)?;
        for m in 0..=kmax {
            let want = if m < k { Poly::zero() } else { p[m - k].scale_int(m as i64 - 2 * k as i64 - 1) };
            let diff = field.derive(&p[m]).sub(&want);
            push("p_lowering", k as i64, m as i64, max_modulus(&[diff.evaluate(f.as_slice())]));
        }
    }
    Ok(())
}

pub fn witt_check(a: &WittCheckArgs, report: &mut RunReport) -> Result<()> {
    if a.order < 2 {
        return Err(usage("--order must be at least 2"));
    }
    let mut res = Vec::new();
    for point in 0..a.points {
        if a.exact {
            algebra_residuals(&random_exact(a.seed, point as u64, a.order)?, point, &mut res)?;
        } else {
            let f = random_point(a.seed, point as u64, a.order, 1.0)?;
            algebra_residuals(&f, point, &mut res)?;
            let small = random_point(a.seed, point as u64, a.order, 0.05)?;
            for j in 1..=3usize {
                let quad = witt::schaeffer_spencer(&small, j, a.nodes)?;
                let want = witt::kirillov_apply(j, &small)?;
                let d = quad.max_abs_diff(&want);
                res.push(Residual { check: "schaeffer_spencer", point, m: j as i64, n: 0, value: d, exact_zero: d == 0.0 });
            }
        }
    }
    let mut max = 0.0f64;
    let mut all_zero = true;
    for r in &res {
        report.push(
            Row::new()
                .text("check", r.check)
                .int("point", r.point as i64)
                .int("m", r.m)
                .int("n", r.n)
                .float("residual", r.value)
                .boolean("exact_zero", r.exact_zero),
        );
        if r.check != "schaeffer_spencer" {
            max = max.max(r.value);
            all_zero &= r.exact_zero;
        }
    }
    report.summary("checks", res.len());
    report.summary_f("max_algebraic_residual", max);
    report.summary("all_algebraic_exact_zero", all_zero);
    if !a.exact {
        let ss = res.iter().filter(|r| r.check == "schaeffer_spencer").map(|r| r.value).fold(0.0, f64::max);
        report.summary_f("max_schaeffer_spencer_error", ss);
        report.summary("schaeffer_spencer_calibration", complex_json(witt::schaeffer_spencer_calibration(a.nodes)?));
    }
    Ok(())
}

// ---- Löwner ---------------------------------------------------------------

fn build_driver(d: &DriverArgs) -> Result<CaratheodoryDriver> {
    Ok(match d.driver {
        DriverKind::Kernel => {
            let u = d.u;
            CaratheodoryDriver::kernel(move |t| u.eval(t))
        }
        DriverKind::Trivial => CaratheodoryDriver::trivial(),
        DriverKind::Coefficients => {
            let p = d.p.clone().ok_or_else(|| usage("--driver coefficients needs --p"))?;
            CaratheodoryDriver::coefficients(
                p.0.into_iter().map(|pk| Box::new(move |_: f64| pk) as loewner::TimeFn<Complex64>).collect(),
            )
        }
    })
}

fn mode(d: &DriverArgs) -> EvolutionMode {
    match d.mode {
        ModeArg::Subordination => EvolutionMode::Subordination,
        ModeArg::Alternate => EvolutionMode::Alternate,
    }
}

/// `(n + 1)(−e^{−iu})^n`: the rotated Koebe function.
pub fn koebe(u: f64, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, -(n as f64) * u) * (n as f64 + 1.0) * if n % 2 == 0 { 1.0 } else { -1.0 }
}

pub fn lk_evolve(a: &LkEvolveArgs, report: &mut RunReport) -> Result<()> {
    check_every(a.every)?;
    let driver = build_driver(&a.driver)?;
    let tr = loewner::ode_evolve(&driver, a.t_end, a.order, a.steps, mode(&a.driver))?;
    for (i, p) in tr.points.iter().enumerate() {
        if i % a.every == 0 || i == a.steps {
            report.push(Row::new().int("step", i as i64).float("t", p.t).complexes("c", p.c.as_slice()));
        }
    }
    let last = tr.last();
    report.summary("raw", complex_list_json(last.c.as_slice()));
    if a.driver.mode == ModeArg::Subordination {
        let est = loewner::lk_limit(&driver, a.t_end, a.order, a.steps, a.tolerance)?;
        report.summary("limit", complex_list_json(est.limit.as_slice()));
        report.summary_f("limit_drift", est.drift);
        report.summary_f("raw_drift", est.raw_drift);
        report.diagnostic_f("limit_drift", est.drift);
        if let (DriverKind::Kernel, TimeFunction::Const(u)) = (a.driver.driver, a.driver.u) {
            let dev = |c: &SchlichtCoefficients| (1..=a.order).map(|n| (c.c(n) - koebe(u, n)).norm()).fold(0.0, f64::max);
            report.summary_f("koebe_max_deviation", dev(&est.limit));
            report.summary_f("koebe_raw_deviation", dev(&est.raw));
        }
    }
    Ok(())
}

fn momenta(psi: &Option<crate::params::ComplexList>, seed: u64, n: usize) -> Result<CovectorMomenta> {
    match psi {
        Some(p) if p.0.len() == n => Ok(CovectorMomenta(p.0.clone())),
        Some(p) => Err(usage(format!("--psi has {} entries, order is {n}", p.0.len()))),
        None => Ok(CovectorMomenta(gaussian_vec(seed, 0, n, 0.5))),
    }
}

pub fn lk_conserved(a: &LkConservedArgs, report: &mut RunReport) -> Result<()> {
    check_every(a.every)?;
    let driver = build_driver(&a.driver)?;
    let psi = momenta(&a.psi, a.seed, a.order)?;
    let pts = loewner::hamiltonian_flow(&driver, &psi, a.t_end, a.steps, mode(&a.driver))?;
    let l0 = loewner::conserved_spectrum(&pts[0].c, &pts[0].psibar);
    for (i, p) in pts.iter().enumerate() {
        if i % a.every == 0 || i == a.steps {
            let l = loewner::conserved_spectrum(&p.c, &p.psibar);
            let drift = l.iter().zip(&l0).map(|(x, y)| (x - y).norm() / y.norm().max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
            report.push(Row::new().int("step", i as i64).float("t", p.t).complexes("l", &l).float("drift", drift));
        }
    }
    let drift = loewner::spectrum_drift(&pts);
    report.summary("initial_spectrum", complex_list_json(&l0));
    report.summary_f("max_relative_drift", drift);
    report.diagnostic_f("spectrum_drift", drift);
    Ok(())
}

// ---- geodesic -------------------------------------------------------------

pub fn geodesic(a: &GeodesicArgs, report: &mut RunReport) -> Result<()> {
    check_every(a.every)?;
    let c0 = random_point(a.seed, 1, a.order, a.c_norm)?;
    if let Some(u) = &a.controls {
        if u.0.len() != a.order {
            return Err(usage(format!("--controls has {} entries, order is {}", u.0.len(), a.order)));
        }
        let u = VelocityControls(u.0.clone());
        let closed = geodesic::geodesic_constant_controls(&c0, &u, a.t_end)?;
        let numeric = geodesic::integrate_frozen_controls(&c0, &u, a.t_end, a.steps)?;
        for n in 1..=a.order {
            report.push(
                Row::new()
                    .int("n", n as i64)
                    .complex("closed", closed.c(n))
                    .complex("integrated", numeric.c(n))
                    .float("diff", (closed.c(n) - numeric.c(n)).norm()),
            );
        }
        let d = closed.max_abs_diff(&numeric);
        report.summary_f("max_closed_form_diff", d);
        report.diagnostic_f("closed_form_diff", d);
        return Ok(());
    }
    let mut psi = gaussian_vec(a.seed, 2, a.order, 1.0);
    let len = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|z| *z *= a.psi_norm / len);
    let state = HamiltonianState { c: c0, psibar: CovectorMomenta(psi) };
    let pts = geodesic::flow(&state, a.t_end, a.steps)?;
    let (h0, s0) = (pts[0].hamiltonian, pts[0].speed_squared);
    let (mut dh, mut ds, mut dl) = (0.0f64, 0.0f64, 0.0f64);
    for (i, p) in pts.iter().enumerate() {
        dh = dh.max(rel(p.hamiltonian, h0));
        let speed: f64 = p.u.iter().map(|x| x.norm_sqr()).sum();
        ds = ds.max(rel(speed, s0));
        dl = dl.max((2.0 * geodesic::lagrangian(&p.u) - p.hamiltonian).abs());
        if i % a.every == 0 || i == a.steps {
            report.push(
                Row::new()
                    .int("step", i as i64)
                    .float("t", p.t)
                    .float("hamiltonian", p.hamiltonian)
                    .float("speed_squared", speed)
                    .complexes("c", p.state.c.as_slice()),
            );
        }
    }
    report.summary_f("hamiltonian_relative_drift", dh);
    report.summary_f("speed_relative_drift", ds);
    report.summary_f("lagrangian_identity_residual", dl);
    report.diagnostic_f("hamiltonian_drift", dh);
    Ok(())
}

// ---- stochastic -----------------------------------------------------------

pub fn sle_sample(a: &SleSampleArgs, report: &mut RunReport) -> Result<()> {
    check_every(a.every)?;
    let cfg = SleConfig { kappa: a.kappa, t_end: a.t_end, dt: a.dt, seed: require_seed(a.seed)?, n_paths: a.paths };
    cfg.validate()?;
    let z = a.z.0;
    let runs = ordered_map(a.paths as u64, 0, |i| -> Result<_> {
        let path = stochastic::sample_driving(&cfg, i)?;
        let tr = stochastic::sle_flow(z, &path)?;
        let hcap = stochastic::hcap_estimate(&path)?;
        Ok((path, tr, hcap))
    })?;
    let mut hcaps = Vec::new();
    let mut swallowed = 0usize;
    for (i, run) in runs.into_iter().enumerate() {
        let (path, tr, hcap) = run?;
        for (k, g) in tr.values.iter().enumerate() {
            if k % a.every == 0 || k + 1 == tr.values.len() {
                report.push(
                    Row::new()
                        .int("path", i as i64)
                        .int("step", k as i64)
                        .float("t", path.times[k])
                        .float("xi", path.xi[k])
                        .complex("g", *g),
                );
            }
        }
        if tr.swallowed_at.is_some() {
            swallowed += 1;
        }
        report.snapshots.push(serde_json::json!({
            "path": i,
            "swallowed_at": tr.swallowed_at.map(float_json),
            "hcap": float_json(hcap),
        }));
        hcaps.push(hcap);
    }
    let mean = hcaps.iter().sum::<f64>() / hcaps.len().max(1) as f64;
    report.summary_f("mean_hcap", mean);
    report.summary_f("hcap_relative_error", rel(mean, 2.0 * cfg.steps() as f64 * cfg.step()));
    report.summary("swallowed", swallowed);
    report.diagnostic("swallowed", swallowed);
    Ok(())
}

/// Row batches for the Monte Carlo report.
const MARTINGALE_BATCHES: usize = 10;

pub fn sle_martingale(a: &SleMartingaleArgs, report: &mut RunReport) -> Result<()> {
    let cfg = SleConfig { kappa: a.kappa, t_end: a.t_end, dt: a.dt, seed: require_seed(a.seed)?, n_paths: a.paths };
    cfg.validate()?;
    if matches!(a.observable, crate::params::ObservableArg::Martingale) && !(a.kappa > 0.0) {
        return Err(usage("the martingale observable needs kappa > 0"));
    }
    let f = a.observable.build(a.kappa);
    let z0 = a.z0.0;
    let samples = ordered_map(a.paths as u64, a.threads, |i| stochastic::martingale_sample(f.as_ref(), z0, &cfg, i))?
        .into_iter()
        .collect::<loewner_core::Result<Vec<_>>>()?;
    let per = a.paths.div_ceil(MARTINGALE_BATCHES).max(1);
    for (b, chunk) in samples.chunks(per).enumerate() {
        let kept: Vec<Complex64> = chunk.iter().flatten().copied().collect();
        let mean = kept.iter().sum::<Complex64>() / kept.len().max(1) as f64 / a.t_end;
        report.push(Row::new().int("batch", b as i64).int("paths", chunk.len() as i64).int("kept", kept.len() as i64).complex("drift", mean));
    }
    let rep = stochastic::martingale_report(f.as_ref(), z0, &cfg, &samples)?;
    report.summary("empirical_drift", complex_json(rep.empirical_drift));
    report.summary("predicted_drift", complex_json(rep.predicted_drift));
    report.summary("standard_error", Value::from(vec![float_json(rep.standard_error.0), float_json(rep.standard_error.1)]));
    report.summary("z_score", rep.z_score.map_or(Value::Null, float_json));
    report.summary_f("abs_error", rep.abs_error);
    report.summary("paths", rep.paths);
    report.summary("swallowed", rep.swallowed);
    let pass = match rep.z_score {
        Some(z) => z < 3.0,
        None => rep.abs_error < 1e-12,
    };
    report.summary("within_three_standard_errors", pass);
    report.diagnostic("swallowed", rep.swallowed);
    Ok(())
}

pub fn circle_flow(a: &CircleFlowArgs, report: &mut RunReport) -> Result<()> {
    let first = if a.zero_noise { a.seed.unwrap_or(0) } else { require_seed(a.seed)? };
    let cfg = CircleFlowConfig {
        r: a.r,
        n_modes: a.modes,
        t_end: a.t_end,
        dt: a.dt,
        seed: first,
        grid: a.grid,
        output_every: a.every,
    };
    cfg.validate()?;
    let flows = ordered_map(a.seeds, a.threads, |k| {
        let seed = first.wrapping_add(k);
        let c = CircleFlowConfig { seed, ..cfg };
        if a.zero_noise {
            stochastic::circle_flow(&c, &mut ZeroNoise)
        } else {
            stochastic::circle_flow(&c, &mut StreamNoise::new(seed, 0))
        }
    })?;
    let mut all_monotone = true;
    let mut max_disp = 0.0f64;
    for (k, flow) in flows.into_iter().enumerate() {
        let seed = first.wrapping_add(k as u64);
        let flow = match flow {
            Ok(f) => f,
            Err(loewner_core::Error::StepTooLarge(msg)) => {
                all_monotone = false;
                report.snapshots.push(serde_json::json!({ "seed": seed, "failure": msg }));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        for (t, g) in flow.times.iter().zip(&flow.maps) {
            let gap = (0..g.len()).map(|j| lifted_gap(g, j)).fold(f64::INFINITY, f64::min);
            let disp = g.iter().zip(&flow.theta).map(|(x, th)| (x - th).abs()).fold(0.0, f64::max);
            let mono = stochastic::is_monotone(g);
            all_monotone &= mono;
            max_disp = max_disp.max(disp);
            report.push(
                Row::new()
                    .int("seed", seed as i64)
                    .float("t", *t)
                    .float("min_gap", gap)
                    .float("max_displacement", disp)
                    .boolean("monotone", mono),
            );
        }
        let last = flow.maps.last().expect("initial map recorded");
        report.snapshots.push(serde_json::json!({
            "seed": seed,
            "t": float_json(*flow.times.last().expect("initial time recorded")),
            "map": last.iter().map(|x| float_json(*x)).collect::<Vec<_>>(),
        }));
    }
    report.summary("seeds", a.seeds);
    report.summary("all_monotone", all_monotone);
    report.summary_f("max_displacement", max_disp);
    report.summary("identity_exact", max_disp == 0.0);
    Ok(())
}

/// `g(θ_{j+1}) − g(θ_j)` with the wrap-around step lifted by 2π.
fn lifted_gap(g: &[f64], j: usize) -> f64 {
    let n = g.len();
    if j + 1 < n {
        g[j + 1] - g[j]
    } else {
        g[0] + 2.0 * std::f64::consts::PI - g[n - 1]
    }
}

// ---- KdV ------------------------------------------------------------------

/// Lines `n re im`, `0 ≤ n ≤ M`; `#` comments allowed.
pub fn read_modes_file(path: &Path, m: usize) -> Result<PeriodicField> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    let mut pos = vec![Complex64::new(0.0, 0.0); m + 1];
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || usage(format!("{}:{}: expected `n re im`", path.display(), i + 1));
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [n, re, im] = parts.as_slice() else { return Err(bad()) };
        let n: usize = n.parse().map_err(|_| bad())?;
        let (re, im): (f64, f64) = (re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?);
        if n > m {
            return Err(usage(format!("{}: mode {n} above truncation {m}", path.display())));
        }
        pos[n] = Complex64::new(re, im);
    }
    Ok(PeriodicField::from_positive_modes(&pos)?)
}

pub fn kdv_run(a: &KdvRunArgs, report: &mut RunReport) -> Result<()> {
    check_every(a.every)?;
    if a.modes == 0 {
        return Err(usage("--modes must be at least 1"));
    }
    let u0 = match a.init {
        KdvInit::Cosine => PeriodicField::trig(a.modes, 1, a.amplitude, 0.0)?,
        KdvInit::ModesFile => {
            let p = a.modes_file.as_ref().ok_or_else(|| usage("--init modes-file needs --modes-file"))?;
            read_modes_file(p, a.modes)?
        }
    };
    let traj = kdv::kdv_trajectory(&u0, a.t_end, a.dt, a.every)?;
    let c0 = kdv::conserved(&u0);
    let (mut d1, mut d0, mut dh, mut imag) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (t, u) in &traj {
        let c = kdv::conserved(u);
        d1 = d1.max((c.i_minus1 - c0.i_minus1).abs());
        d0 = d0.max(rel(c.i0, c0.i0));
        dh = dh.max(rel(c.i1, c0.i1));
        let im = u.max_imaginary_on_grid();
        imag = imag.max(im);
        report.push(
            Row::new()
                .float("t", *t)
                .float("i_minus1", c.i_minus1)
                .float("i0", c.i0)
                .float("i1", c.i1)
                .float("max_imaginary", im),
        );
        if a.snapshots {
            let modes: Vec<Complex64> = (0..=a.modes as i64).map(|n| u.mode(n)).collect();
            report.snapshots.push(serde_json::json!({ "t": float_json(*t), "modes": complex_list_json(&modes) }));
        }
    }
    report.summary_f("i_minus1_abs_drift", d1);
    report.summary_f("i0_rel_drift", d0);
    report.summary_f("i1_rel_drift", dh);
    report.summary_f("max_imaginary", imag);
    report.diagnostic_f("i1_rel_drift", dh);
    Ok(())
}
