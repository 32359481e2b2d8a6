//! Kirillov operators on coefficient space and the polynomial identities
//! around them.
//!
//! A point `c = (c_1, …, c_N)` stands for `f(z) = z(1 + Σ c_k z^k)`. The
//! operator `L_j` moves `f` by `δf = z^{j+1} f'` (for `j ≥ 1`), which in
//! coordinates is the polynomial vector field whose `∂/∂c_m` component is
//! `(m − j + 1) c_{m−j}` with `c_0 = 1`. The `∂/∂c_m` component is reported as
//! the coefficient of `z^{m+1}`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::poly::{Poly, VectorField};
use crate::scalar::Scalar;
use crate::series::{SchlichtCoefficients, TruncatedSeries};

/// Lowest generator index produced here.
pub const MIN_GENERATOR: i32 = -4;

fn c(k: usize, n: usize) -> Poly {
    Poly::coefficient_var(k, n)
}

/// Coefficients of `1/f′ = Σ P_k z^k` as polynomials, `P_0 … P_n`.
pub fn p_polynomials(n: usize) -> Vec<Poly> {
    let mut p = vec![Poly::integer(1)];
    for k in 1..=n {
        let mut acc = Poly::zero();
        for j in 1..=k {
            acc = acc.add(&c(j, n).scale_int(j as i64 + 1).mul(&p[k - j]));
        }
        p.push(acc.scale_int(-1));
    }
    p
}

/// Coefficients `R_0 … R_n` of `z/f(z)`.
fn inverse_polynomials(n: usize, top: usize) -> Vec<Poly> {
    let mut r = vec![Poly::integer(1)];
    for k in 1..=top {
        let mut acc = Poly::zero();
        for i in 1..=k {
            acc = acc.add(&c(i, n).mul(&r[k - i]));
        }
        r.push(acc.scale_int(-1));
    }
    r
}

/// The coefficient-space field of `L_j` on `(c_1, …, c_n)`.
///
/// Fields with `j ≥ 1` and `j = 0` are exact. For `j < 0` the components
/// involve `c_{m+|j|}`, so with `c_k = 0` above `n` only the components
/// `m ≤ n + j` are faithful; [`valid_components`] gives the cut-off.
pub fn kirillov_field(j: i32, n: usize) -> Result<VectorField> {
    let comps = match j {
        j if j >= 1 => {
            let j = j as usize;
            (1..=n)
                .map(|m| {
                    if m < j {
                        Poly::zero()
                    } else {
                        c(m - j, n).scale_int((m - j + 1) as i64)
                    }
                })
                .collect()
        }
        0 => (1..=n).map(|m| c(m, n).scale_int(m as i64)).collect(),
        -1 => (1..=n)
            .map(|m| {
                c(m + 1, n)
                    .scale_int(m as i64 + 2)
                    .sub(&c(1, n).mul(&c(m, n)).scale_int(2))
            })
            .collect(),
        -2 => {
            let r = inverse_polynomials(n, n + 2);
            let a = c(1, n).mul(&c(1, n)).sub(&c(2, n).scale_int(4));
            (1..=n)
                .map(|m| {
                    c(m + 2, n)
                        .scale_int(m as i64 + 3)
                        .sub(&r[m + 2])
                        .add(&a.mul(&c(m, n)))
                })
                .collect()
        }
        -3 => return Ok(VectorField::bracket(&kirillov_field(-2, n)?, &kirillov_field(-1, n)?)),
        -4 => {
            let b = VectorField::bracket(&kirillov_field(-3, n)?, &kirillov_field(-1, n)?);
            return Ok(b.scale(&BigRational::new(BigInt::from(1), BigInt::from(2))));
        }
        _ => return Err(Error::InvalidArgument("generator index below -4")),
    };
    Ok(VectorField::new(comps))
}

/// Number of leading components of [`kirillov_field`]`(j, n)` unaffected by
/// the truncation `c_k = 0, k > n`.
pub fn valid_components(j: i32, n: usize) -> usize {
    if j >= 0 {
        n
    } else {
        n.saturating_sub(j.unsigned_abs() as usize)
    }
}

/// Series of order `N + 1` whose `z^{m+1}` coefficient is `v[m-1]`.
fn components_to_series<S: Scalar>(v: Vec<S>) -> TruncatedSeries<S> {
    let n = v.len();
    let mut coeffs = vec![S::zero(); n + 2];
    for (i, x) in v.into_iter().enumerate() {
        coeffs[i + 2] = x;
    }
    TruncatedSeries::new(coeffs)
}

/// `L_j[f] = z^{j+1} f′(z)` for `j ≥ 1`, at order `N + 1`.
pub fn kirillov_apply<S: Scalar>(j: usize, f: &SchlichtCoefficients<S>) -> Result<TruncatedSeries<S>> {
    if j == 0 {
        return Err(Error::InvalidArgument("positive generator index required"));
    }
    let n = f.order();
    Ok(TruncatedSeries::from_fn(n + 1, |p| {
        // coefficient of z^p in z^{j+1} f' is (p-j) c_{p-j-1}
        if p < j + 1 {
            S::zero()
        } else {
            S::from_i64((p - j) as i64) * f.c(p - j - 1)
        }
    }))
}

/// `L_j[f]` obtained by evaluating the coefficient-space field at `c`.
pub fn kirillov_apply_coefficient_form<S: Scalar>(j: i32, f: &SchlichtCoefficients<S>) -> Result<TruncatedSeries<S>> {
    let field = kirillov_field(j, f.order())?;
    Ok(components_to_series(field.evaluate(f.as_slice())))
}

/// Closed forms `L_0[f] = zf′ − f`, `L_{-1}[f] = f′ − 2c_1 f − 1` and
/// `L_{-2}[f] = f′/z − 1/f − 3c_1 + (c_1² − 4c_2) f`, at order `N`.
pub fn negative_generator_apply<S: Scalar>(j: i32, f: &SchlichtCoefficients<S>) -> Result<TruncatedSeries<S>> {
    let n = f.order();
    let fs = f.to_series().truncate(n);
    match j {
        0 => Ok(TruncatedSeries::from_fn(n, |k| {
            if k < 2 {
                S::zero()
            } else {
                S::from_i64(k as i64 - 1) * f.c(k - 1)
            }
        })),
        -1 => {
            let fp = f.derivative_series();
            let two_c1 = S::from_i64(2) * f.c(1);
            let mut out = fp.sub(&fs.scale(&two_c1))?;
            out.coeffs_mut()[0] = out.coeff(0) - S::one();
            Ok(out)
        }
        -2 => {
            // f'/z - 1/f = (f' - z/f) / z, with both numerators taken at order N+1
            let g = TruncatedSeries::from_fn(n + 1, |k| f.c(k));
            let fp = TruncatedSeries::from_fn(n + 1, |k| S::from_i64(k as i64 + 1) * f.c(k));
            let num = fp.sub(&g.reciprocal()?)?;
            let mut out = TruncatedSeries::from_fn(n, |k| num.coeff(k + 1));
            let a = f.c(1) * f.c(1) - S::from_i64(4) * f.c(2);
            out = out.add(&fs.scale(&a))?;
            out.coeffs_mut()[0] = out.coeff(0) - S::from_i64(3) * f.c(1);
            Ok(out)
        }
        _ => Err(Error::InvalidArgument("closed forms exist for j = 0, -1, -2 only")),
    }
}

/// `(L_m L_n − L_n L_m)[f]` where `L_m L_n[f]` is `L_m[f]` differentiated
/// along `L_n`, i.e. `z^{m+1}(z^{n+1} f′)′`. Order `N + 1`.
pub fn witt_commutator<S: Scalar>(m: usize, n: usize, f: &SchlichtCoefficients<S>) -> Result<TruncatedSeries<S>> {
    let order = f.order();
    if order < m + n {
        return Err(Error::InsufficientOrder { needed: m + n, have: order });
    }
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("positive generator indices required"));
    }
    let lm = kirillov_field(m as i32, order)?;
    let ln = kirillov_field(n as i32, order)?;
    Ok(components_to_series(VectorField::bracket(&lm, &ln).evaluate(f.as_slice())))
}

/// `(L_m L_n − L_n L_m − (n − m) L_{m+n})[f]`; identically zero.
pub fn witt_commutator_residual<S: Scalar>(m: usize, n: usize, f: &SchlichtCoefficients<S>) -> Result<TruncatedSeries<S>> {
    let comm = witt_commutator(m, n, f)?;
    let rhs = kirillov_apply(m + n, f)?.scale(&S::from_i64(n as i64 - m as i64));
    comm.sub(&rhs)
}

/// `P`, `K` and `Π` evaluated at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialTriple<S = Complex64> {
    /// `P_0 … P_N`
    pub p: Vec<S>,
    /// `K_1 … K_N`
    pub k: Vec<S>,
    /// `Π_1 … Π_N`
    pub pi: Vec<S>,
}

pub fn polynomials<S: Scalar>(f: &SchlichtCoefficients<S>) -> PolynomialTriple<S> {
    let n = f.order();
    let mut p = vec![S::one()];
    for k in 1..=n {
        let mut acc = S::zero();
        for j in 1..=k {
            acc = acc + S::from_i64(j as i64 + 1) * f.c(j) * p[k - j].clone();
        }
        p.push(-acc);
    }
    let k: Vec<S> = (1..=n)
        .map(|m| {
            let mut acc = S::zero();
            for j in 1..m {
                acc = acc + S::from_i64((j * (m - j + 1)) as i64) * f.c(m - j) * f.c(j);
            }
            -acc
        })
        .collect();
    let pi = (1..=n)
        .map(|m| {
            let mut acc = S::from_i64(m as i64) * f.c(m);
            for j in 1..=m {
                acc = acc + k[m - j].clone() * p[j - 1].clone();
            }
            acc
        })
        .collect();
    PolynomialTriple { p, k, pi }
}

/// `Σ_m Π_m L_m[f]` at order `N + 1`.
pub fn reconstruct_l0<S: Scalar>(f: &SchlichtCoefficients<S>) -> Result<TruncatedSeries<S>> {
    let n = f.order();
    if n < 1 {
        return Err(Error::InsufficientOrder { needed: 1, have: n });
    }
    let tri = polynomials(f);
    let mut acc = TruncatedSeries::zero(n + 1);
    for (m, pi) in tri.pi.iter().enumerate() {
        acc = acc.add(&kirillov_apply(m + 1, f)?.scale(pi))?;
    }
    Ok(acc)
}

/// Row `n` holds the `dc_1 … dc_N` coefficients of
/// `ω_n = dc_n + Σ_{j<n} P_j dc_{n−j}`.
pub fn dual_one_forms<S: Scalar>(f: &SchlichtCoefficients<S>) -> Vec<Vec<S>> {
    let n = f.order();
    let p = polynomials(f).p;
    (1..=n)
        .map(|row| {
            (1..=n)
                .map(|col| if col <= row { p[row - col].clone() } else { S::zero() })
                .collect()
        })
        .collect()
}

/// `ω_n(L_k)` at `f`.
pub fn dual_pairing<S: Scalar>(f: &SchlichtCoefficients<S>, n: usize, k: usize) -> Result<S> {
    let order = f.order();
    if n < 1 || k < 1 || n > order || k > order {
        return Err(Error::InvalidArgument("pairing indices must lie in 1..=N"));
    }
    let p = polynomials(f).p;
    let mut acc = S::zero();
    for m in k..=n {
        acc = acc + p[n - m].clone() * S::from_i64((m - k + 1) as i64) * f.c(m - k);
    }
    Ok(acc)
}

/// Full `N × N` matrix `ω_n(L_k)`.
pub fn dual_pairing_matrix<S: Scalar>(f: &SchlichtCoefficients<S>) -> Vec<Vec<S>> {
    let n = f.order();
    (1..=n)
        .map(|r| (1..=n).map(|k| dual_pairing(f, r, k).expect("indices in range")).collect())
        .collect()
}

pub const DEFAULT_QUADRATURE_NODES: usize = 2048;
pub const DEFAULT_EVALUATION_RADIUS: f64 = 0.5;
const MIN_CONTOUR_SEPARATION: f64 = 1e-6;

/// Variation of `f` under the boundary field `−i w^j` by direct contour
/// quadrature,
///
/// `δf(z) = f(z)² / 2π ∫ (w f′(w) / f(w))² w^j / (f(w) − f(z)) dθ`,
/// `w = e^{iθ}`, with `quadrature_nodes` trapezoid nodes. The result is
/// sampled on `|z| = 0.5` and re-expanded; it should reproduce
/// `z^{j+1} f′` at order `N + 1`.
pub fn schaeffer_spencer(
    f: &SchlichtCoefficients<Complex64>,
    j: usize,
    quadrature_nodes: usize,
) -> Result<TruncatedSeries<Complex64>> {
    schaeffer_spencer_at_radius(f, j, quadrature_nodes, DEFAULT_EVALUATION_RADIUS)
}

pub fn schaeffer_spencer_at_radius(
    f: &SchlichtCoefficients<Complex64>,
    j: usize,
    quadrature_nodes: usize,
    radius: f64,
) -> Result<TruncatedSeries<Complex64>> {
    if quadrature_nodes < 4 {
        return Err(Error::InvalidArgument("at least 4 quadrature nodes"));
    }
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidArgument("evaluation radius must lie in (0, 1)"));
    }
    let n = f.order();
    let fs = f.to_series();
    let fp = fs.differentiate();
    let tau = 2.0 * core::f64::consts::PI;

    // boundary data: (w f'/f)^2 w^j and f(w)
    let boundary: Vec<(Complex64, Complex64)> = (0..quadrature_nodes)
        .map(|q| {
            let w = Complex64::from_polar(1.0, tau * q as f64 / quadrature_nodes as f64);
            let fw = fs.evaluate(w);
            let ratio = w * fp.evaluate(w) / fw;
            (ratio * ratio * w.powu(j as u32), fw)
        })
        .collect();
    if boundary.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(Error::IllConditionedContour { min_distance: 0.0 });
    }

    let degree = n + 1 + j;
    let samples = 2 * (degree + 1);
    let mut min_distance = f64::INFINITY;
    let values: Vec<Complex64> = (0..samples)
        .map(|s| {
            let z = Complex64::from_polar(radius, tau * s as f64 / samples as f64);
            let fz = fs.evaluate(z);
            let mut acc = Complex64::new(0.0, 0.0);
            for (g, fw) in &boundary {
                let d = fw - fz;
                min_distance = min_distance.min(d.norm());
                acc += g / d;
            }
            fz * fz * acc / quadrature_nodes as f64
        })
        .collect();
    if min_distance < MIN_CONTOUR_SEPARATION {
        return Err(Error::IllConditionedContour { min_distance });
    }

    // discrete Fourier coefficients on the sampling circle
    Ok(TruncatedSeries::from_fn(n + 1, |k| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, v) in values.iter().enumerate() {
            acc += v * Complex64::from_polar(1.0, -tau * (k * s) as f64 / samples as f64);
        }
        acc / (samples as f64 * libm::pow(radius, k as f64))
    }))
}

/// Ratio of the quadrature's `z²` coefficient to the exact value `1` for
/// `f(z) = z`, `j = 1`.
pub fn schaeffer_spencer_calibration(quadrature_nodes: usize) -> Result<Complex64> {
    let id = SchlichtCoefficients::identity(1)?;
    Ok(schaeffer_spencer(&id, 1, quadrature_nodes)?.coeff(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{exact_complex, exact_ratio, Exact};

    fn exact_f(c: &[((i64, i64), (i64, i64))]) -> SchlichtCoefficients<Exact> {
        SchlichtCoefficients::new(c.iter().map(|&(a, b)| exact_complex(a, b)).collect()).unwrap()
    }

    fn cf(v: &[f64]) -> SchlichtCoefficients<Complex64> {
        SchlichtCoefficients::new(v.iter().map(|&x| Complex64::new(x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn kirillov_examples() {
        let z = cf(&[0.0, 0.0, 0.0]);
        let l1 = kirillov_apply(1, &z).unwrap();
        assert_eq!(l1, TruncatedSeries::monomial(4, 2, Complex64::new(1.0, 0.0)));

        let f = cf(&[-2.0, 3.0, -4.0]);
        let l1 = kirillov_apply(1, &f).unwrap();
        let want: Vec<f64> = vec![0.0, 0.0, 1.0, -4.0, 9.0];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(l1.coeff(k), Complex64::new(*w, 0.0));
        }
    }

    #[test]
    fn negative_generators_annihilate_identity() {
        let z = cf(&[0.0; 5]);
        for j in [0, -1, -2] {
            assert!(negative_generator_apply(j, &z).unwrap().is_zero(), "j = {j}");
        }
    }

    #[test]
    fn closed_forms_match_fields() {
        let f = exact_f(&[((1, 2), (1, 3)), ((-2, 5), (0, 1)), ((3, 7), (1, 1)), ((1, 9), (-1, 4)), ((2, 1), (1, 5))]);
        for j in [0, -1, -2] {
            let closed = negative_generator_apply(j, &f).unwrap();
            let field = kirillov_apply_coefficient_form(j, &f).unwrap();
            let valid = valid_components(j, f.order());
            for m in 1..=valid.min(f.order() - 1) {
                assert_eq!(closed.coeff(m + 1), field.coeff(m + 1), "j = {j}, m = {m}");
            }
            // no z^0 or z^1 terms
            assert_eq!(closed.coeff(0), exact_ratio(0, 1));
            assert_eq!(closed.coeff(1), exact_ratio(0, 1));
        }
    }

    #[test]
    fn l_minus_two_first_component() {
        let f = exact_f(&[((1, 2), (1, 3)), ((-2, 5), (0, 1)), ((3, 7), (1, 1))]);
        let (c1, c2, c3) = (f.c(1), f.c(2), f.c(3));
        let want = Exact::from_i64(5) * c3 - Exact::from_i64(6) * c1.clone() * c2
            + Exact::from_i64(2) * c1.clone() * c1.clone() * c1;
        let l = negative_generator_apply(-2, &f).unwrap();
        assert_eq!(l.coeff(2), want);
    }

    #[test]
    fn commutator_example() {
        let z = cf(&[0.0; 3]);
        let comm = witt_commutator(1, 2, &z).unwrap();
        assert_eq!(comm, TruncatedSeries::monomial(4, 4, Complex64::new(1.0, 0.0)));
        assert!(witt_commutator_residual(1, 2, &z).unwrap().is_zero());
        assert!(witt_commutator_residual(2, 2, &cf(&[0.3, -0.1, 0.2, 0.5])).unwrap().is_zero());
        assert!(matches!(
            witt_commutator(2, 3, &z),
            Err(Error::InsufficientOrder { needed: 5, have: 3 })
        ));
    }

    #[test]
    fn exact_commutators_vanish() {
        let f = exact_f(&[
            ((3, 4), (-1, 2)),
            ((1, 5), (2, 3)),
            ((-7, 3), (1, 8)),
            ((2, 9), (0, 1)),
            ((5, 2), (-3, 7)),
            ((-1, 6), (4, 5)),
            ((1, 1), (1, 1)),
        ]);
        assert!(witt_commutator_residual(2, 3, &f).unwrap().is_zero());
    }

    #[test]
    fn brackets_with_negative_generators() {
        let n = 7;
        for (m, k) in [(-1, 1), (-2, 1), (-1, 2), (-2, -1), (-3, 1), (-1, 0), (-2, 0), (0, 3)] {
            let a = kirillov_field(m, n).unwrap();
            let b = kirillov_field(k, n).unwrap();
            let lhs = VectorField::bracket(&a, &b);
            let rhs = kirillov_field(m + k, n).unwrap();
            let factor = BigRational::from_integer(BigInt::from(k - m));
            let valid = n - (m.min(0).unsigned_abs() + k.min(0).unsigned_abs()) as usize;
            for i in 1..=valid {
                assert_eq!(
                    lhs.component(i),
                    &rhs.component(i).scale(&factor),
                    "bracket ({m},{k}) component {i}"
                );
            }
        }
    }

    #[test]
    fn polynomial_examples() {
        let z = cf(&[0.0; 4]);
        let t = polynomials(&z);
        assert_eq!(t.p[0], Complex64::new(1.0, 0.0));
        assert!(t.p[1..].iter().chain(&t.k).chain(&t.pi).all(|x| *x == Complex64::new(0.0, 0.0)));

        let f = exact_f(&[((2, 3), (1, 7)), ((-5, 4), (3, 2)), ((1, 3), (0, 1))]);
        let t = polynomials(&f);
        let (c1, c2) = (f.c(1), f.c(2));
        let two = Exact::from_i64(2);
        assert_eq!(t.p[1], -(two.clone() * c1.clone()));
        assert_eq!(t.p[2], Exact::from_i64(4) * c1.clone() * c1.clone() - Exact::from_i64(3) * c2.clone());
        assert_eq!(t.k[0], exact_ratio(0, 1));
        assert_eq!(t.k[1], -(two.clone() * c1.clone() * c1.clone()));
        assert_eq!(t.pi[0], c1.clone());
        assert_eq!(t.pi[1], two.clone() * c2 - two * c1.clone() * c1);
    }

    #[test]
    fn p_matches_reciprocal_of_derivative() {
        let f = exact_f(&[((2, 3), (1, 7)), ((-5, 4), (3, 2)), ((1, 3), (0, 1)), ((7, 2), (-1, 9))]);
        let r = f.derivative_series().reciprocal().unwrap();
        let t = polynomials(&f);
        assert_eq!(r.coeffs(), &t.p[..]);
        let sym: Vec<Exact> = p_polynomials(4).iter().map(|p| p.evaluate(f.as_slice())).collect();
        assert_eq!(sym, t.p);
    }

    #[test]
    fn l0_reconstruction() {
        let f = exact_f(&[((2, 3), (1, 7)), ((-5, 4), (3, 2)), ((1, 3), (0, 1)), ((7, 2), (-1, 9))]);
        let rec = reconstruct_l0(&f).unwrap();
        let l0 = negative_generator_apply(0, &f).unwrap();
        for k in 0..=f.order() {
            assert_eq!(rec.coeff(k), l0.coeff(k));
        }
        // full order N + 1 as well
        assert_eq!(rec.coeff(5), Exact::from_i64(4) * f.c(4));
    }

    #[test]
    fn dual_pairing_is_identity() {
        let f = exact_f(&[((2, 3), (1, 7)), ((-5, 4), (3, 2)), ((1, 3), (0, 1)), ((7, 2), (-1, 9))]);
        let m = dual_pairing_matrix(&f);
        for (i, row) in m.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert_eq!(*x, if i == j { Exact::from_i64(1) } else { Exact::from_i64(0) });
            }
        }
        assert!(dual_pairing(&f, 0, 1).is_err());
    }

    #[test]
    fn schaeffer_spencer_identity() {
        let id = cf(&[0.0; 3]);
        let s = schaeffer_spencer(&id, 1, DEFAULT_QUADRATURE_NODES).unwrap();
        let want = kirillov_apply(1, &id).unwrap();
        assert!(s.max_abs_diff(&want) < 1e-8, "{}", s.max_abs_diff(&want));
        let cal = schaeffer_spencer_calibration(DEFAULT_QUADRATURE_NODES).unwrap();
        assert!((cal - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
