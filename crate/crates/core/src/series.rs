//! Truncated power series `a_0 + a_1 z + … + a_N z^N`.
//!
//! Every operation keeps exactly `N + 1` coefficients; powers above `N` are
//! discarded as they are produced.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest truncation order accepted by the order-parametrised computations.
pub const MAX_ORDER: usize = 64;
/// Order used when a computation is not given one.
pub const DEFAULT_ORDER: usize = 10;

pub(crate) fn check_order(order: usize) -> Result<usize> {
    if order > MAX_ORDER {
        Err(Error::OrderTooLarge {
            order,
            max: MAX_ORDER,
        })
    } else {
        Ok(order)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<S = Complex64> {
    coeffs: Vec<S>,
}

impl<S: Scalar> TruncatedSeries<S> {
    /// Series with coefficients `a_0 … a_N`; the order is `coeffs.len() - 1`.
    ///
    /// An empty vector is read as the zero series of order 0.
    pub fn new(mut coeffs: Vec<S>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(S::zero());
        }
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![S::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, S::one())
    }

    pub fn constant(order: usize, value: S) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    /// `coef · z^power`, dropped entirely if `power > order`.
    pub fn monomial(order: usize, power: usize, coef: S) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = coef;
        }
        s
    }

    /// The identity map `z`.
    pub fn identity(order: usize) -> Self {
        Self::monomial(order, 1, S::one())
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> S) -> Self {
        Self {
            coeffs: (0..=order).map(f).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `z^k`; zero above the order.
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [S] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Change the order, dropping high powers or padding with zeros.
    pub fn truncate(&self, order: usize) -> Self {
        Self::from_fn(order, |k| self.coeff(k))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn check_same_order(&self, other: &Self) -> Result<()> {
        if self.order() == other.order() {
            Ok(())
        } else {
            Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_order(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() + b.clone()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_order(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() - b.clone()))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, factor: &S) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a.clone() * factor.clone()).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same_order(other)?;
        Ok(self.mul_truncated(other))
    }

    /// Cauchy product truncated at `min(self.order(), other.order())`.
    pub fn mul_truncated(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = vec![S::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self { coeffs: out }
    }

    /// `self · z^k` keeping the order.
    pub fn shift_up(&self, k: usize) -> Self {
        Self::from_fn(self.order(), |n| {
            if n >= k {
                self.coeffs[n - k].clone()
            } else {
                S::zero()
            }
        })
    }

    /// `outer(inner(z))`, Horner evaluation over series.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let order = outer.order().min(inner.order());
        let inner = inner.truncate(order);
        let mut acc = Self::constant(order, outer.coeff(order));
        for k in (0..order).rev() {
            acc = acc.mul_truncated(&inner);
            acc.coeffs[0] = acc.coeffs[0].clone() + outer.coeffs[k].clone();
        }
        Ok(acc)
    }

    /// Term-by-term derivative; the order drops by one (not below zero).
    pub fn differentiate(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::from_fn(self.order() - 1, |k| {
            S::from_i64(k as i64 + 1) * self.coeffs[k + 1].clone()
        })
    }

    /// The series `r` with `self · r = 1` through the order.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::SingularSeries);
        }
        let inv0 = S::one() / a0.clone();
        let mut r: Vec<S> = Vec::with_capacity(self.coeffs.len());
        r.push(inv0.clone());
        for n in 1..=self.order() {
            let mut acc = S::zero();
            for k in 1..=n {
                acc = acc + self.coeffs[k].clone() * r[n - k].clone();
            }
            r.push(-(acc * inv0.clone()));
        }
        Ok(Self { coeffs: r })
    }

    /// Compositional inverse of a series `a_1 z + a_2 z^2 + …` with `a_1 ≠ 0`.
    ///
    /// Coefficients are fixed one order at a time: if `self(r) = z + e z^k + …`
    /// then `r_k` is corrected by `-e / a_1`.
    pub fn reversion(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let order = self.order();
        if order == 0 {
            return Ok(Self::zero(0));
        }
        let a1 = self.coeffs[1].clone();
        if a1.is_zero() {
            return Err(Error::SingularSeries);
        }
        let inv1 = S::one() / a1;
        let mut r = Self::monomial(order, 1, inv1.clone());
        for k in 2..=order {
            let partial = Self::compose(&self.truncate(k), &r.truncate(k))?;
            let e = partial.coeffs[k].clone();
            r.coeffs[k] = r.coeffs[k].clone() - e * inv1.clone();
        }
        Ok(r)
    }
}

impl TruncatedSeries<Complex64> {
    /// Horner evaluation at a point.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
    }

    /// Largest coefficient modulus of `self - other` over the common range.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.order().max(other.order());
        (0..=n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// `f(z) = z (1 + c_1 z + … + c_N z^N)`: a point `(c_1, …, c_N)` of the
/// coefficient body.
#[derive(Debug, Clone, PartialEq)]
pub struct SchlichtCoefficients<S = Complex64> {
    c: Vec<S>,
}

impl<S: Scalar> SchlichtCoefficients<S> {
    /// `c[0]` is `c_1`; the order `N` is `c.len()`.
    pub fn new(c: Vec<S>) -> Result<Self> {
        check_order(c.len())?;
        Ok(Self { c })
    }

    /// The identity map `f(z) = z` at order `N`.
    pub fn identity(order: usize) -> Result<Self> {
        Self::new(vec![S::zero(); order])
    }

    pub fn order(&self) -> usize {
        self.c.len()
    }

    /// `c_k` for `k ≥ 1`, with `c_0 = 1` and zero above the order.
    pub fn c(&self, k: usize) -> S {
        if k == 0 {
            S::one()
        } else {
            self.c.get(k - 1).cloned().unwrap_or_else(S::zero)
        }
    }

    pub fn as_slice(&self) -> &[S] {
        &self.c
    }

    pub fn into_vec(self) -> Vec<S> {
        self.c
    }

    /// `f` as a series of order `N + 1`.
    pub fn to_series(&self) -> TruncatedSeries<S> {
        TruncatedSeries::from_fn(self.order() + 1, |k| {
            if k == 0 {
                S::zero()
            } else {
                self.c(k - 1)
            }
        })
    }

    /// Inverse of [`to_series`](Self::to_series); requires `a_0 = 0, a_1 = 1`.
    pub fn from_series(s: &TruncatedSeries<S>) -> Result<Self> {
        if s.order() == 0 || !s.coeff(0).is_zero() || !crate::scalar::is_one(&s.coeff(1)) {
            return Err(Error::NotNormalized);
        }
        Self::new((2..=s.order()).map(|k| s.coeff(k)).collect())
    }

    /// `f'(z)` as a series of order `N`.
    pub fn derivative_series(&self) -> TruncatedSeries<S> {
        TruncatedSeries::from_fn(self.order(), |k| S::from_i64(k as i64 + 1) * self.c(k))
    }
}

impl SchlichtCoefficients<Complex64> {
    /// Drops the leading coefficient: `F = a_1 z + a_2 z^2 + …` becomes
    /// `F / a_1`.
    pub fn normalized_from_series(s: &TruncatedSeries<Complex64>) -> Result<Self> {
        let a1 = s.coeff(1);
        if s.order() == 0 || s.coeff(0).norm() != 0.0 || a1.norm() == 0.0 {
            return Err(Error::NotNormalized);
        }
        Self::new((2..=s.order()).map(|k| s.coeff(k) / a1).collect())
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.to_series().evaluate(z)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.c.iter().map(|c| c.norm_sqr()).sum::<f64>())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.order().max(other.order());
        (1..=n)
            .map(|k| (self.c(k) - other.c(k)).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{exact_complex, Exact};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(v: &[f64]) -> TruncatedSeries {
        TruncatedSeries::new(v.iter().map(|&x| c(x, 0.0)).collect())
    }

    #[test]
    fn multiply_examples() {
        let a = real(&[1.0, 1.0, 0.0]);
        let b = real(&[1.0, -1.0, 0.0]);
        assert_eq!(a.multiply(&b).unwrap(), real(&[1.0, 0.0, -1.0]));

        let s = real(&[0.3, -2.0, 7.5]);
        assert_eq!(TruncatedSeries::one(2).multiply(&s).unwrap(), s);

        let p = real(&[1.0, 2.0, 3.0]);
        let q = real(&[1.0, 1.0, 0.0]);
        assert_eq!(p.multiply(&q).unwrap(), real(&[1.0, 3.0, 5.0]));
    }

    #[test]
    fn multiply_rejects_mismatched_orders() {
        let err = real(&[1.0, 1.0]).multiply(&real(&[1.0, 1.0, 1.0])).unwrap_err();
        assert_eq!(err, Error::OrderMismatch { left: 1, right: 2 });
    }

    #[test]
    fn compose_examples() {
        let inner = real(&[0.0, 1.0, 1.0, 0.0]);
        let z = TruncatedSeries::identity(3);
        assert_eq!(TruncatedSeries::compose(&z, &inner).unwrap(), inner);

        let z2 = real(&[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(
            TruncatedSeries::compose(&z2, &inner).unwrap(),
            real(&[0.0, 0.0, 1.0, 2.0])
        );

        let outer = real(&[0.5, -1.0, 4.0, 2.0]);
        assert_eq!(TruncatedSeries::compose(&outer, &z).unwrap(), outer);
    }

    #[test]
    fn compose_requires_zero_constant_inner() {
        let err = TruncatedSeries::compose(&real(&[0.0, 1.0]), &real(&[1.0, 1.0])).unwrap_err();
        assert_eq!(err, Error::NonzeroConstantTerm);
    }

    #[test]
    fn differentiate_examples() {
        let z3 = real(&[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(z3.differentiate(), real(&[0.0, 0.0, 3.0]));
        assert!(real(&[5.0]).differentiate().is_zero());
        let f = real(&[0.0, 1.0, -2.0, 3.0]);
        assert_eq!(f.differentiate(), real(&[1.0, -4.0, 9.0]));
    }

    #[test]
    fn reciprocal_examples() {
        assert_eq!(TruncatedSeries::<Complex64>::one(3).reciprocal().unwrap(), TruncatedSeries::one(3));
        let s = real(&[1.0, -1.0, 0.0, 0.0]);
        assert_eq!(s.reciprocal().unwrap(), real(&[1.0, 1.0, 1.0, 1.0]));
        assert_eq!(real(&[0.0, 1.0]).reciprocal().unwrap_err(), Error::SingularSeries);
    }

    #[test]
    fn reciprocal_of_derivative_gives_p_polynomials() {
        // 1/f' = 1 - 2c1 z + (4c1^2 - 3c2) z^2 + ...
        let c1 = exact_complex((2, 3), (-1, 5));
        let c2 = exact_complex((-7, 4), (1, 2));
        let f = SchlichtCoefficients::new(vec![c1.clone(), c2.clone()]).unwrap();
        let r = f.derivative_series().reciprocal().unwrap();
        let two = Exact::from_i64(2);
        let three = Exact::from_i64(3);
        let four = Exact::from_i64(4);
        assert_eq!(r.coeff(1), -(two * c1.clone()));
        assert_eq!(r.coeff(2), four * c1.clone() * c1 - three * c2);
    }

    #[test]
    fn reversion_inverts_composition() {
        let s = TruncatedSeries::new(vec![
            c(0.0, 0.0),
            c(0.5, 0.1),
            c(0.2, -0.3),
            c(-0.1, 0.05),
            c(0.07, 0.0),
        ]);
        let r = s.reversion().unwrap();
        let id = TruncatedSeries::compose(&s, &r).unwrap();
        assert!(id.max_abs_diff(&TruncatedSeries::identity(4)) < 1e-13);
        let id = TruncatedSeries::compose(&r, &s).unwrap();
        assert!(id.max_abs_diff(&TruncatedSeries::identity(4)) < 1e-13);
    }

    #[test]
    fn schlicht_series_round_trip() {
        let f = SchlichtCoefficients::new(vec![c(1.0, 2.0), c(-3.0, 0.5)]).unwrap();
        let s = f.to_series();
        assert_eq!(s.order(), 3);
        assert_eq!(SchlichtCoefficients::from_series(&s).unwrap(), f);
        assert!(SchlichtCoefficients::new(vec![c(0.0, 0.0); MAX_ORDER + 1]).is_err());
    }

    fn series_strategy(order: usize) -> impl Strategy<Value = TruncatedSeries> {
        proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), order + 1)
            .prop_map(|v| TruncatedSeries::new(v.into_iter().map(|(a, b)| c(a, b)).collect()))
    }

    fn rel_close(a: &TruncatedSeries, b: &TruncatedSeries, tol: f64) -> bool {
        let scale = a
            .coeffs()
            .iter()
            .chain(b.coeffs())
            .map(|x| x.norm())
            .fold(1.0, f64::max);
        a.max_abs_diff(b) <= tol * scale
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn multiply_is_commutative_and_associative(
            a in series_strategy(7), b in series_strategy(7), d in series_strategy(7)
        ) {
            let ab = a.multiply(&b).unwrap();
            prop_assert!(rel_close(&ab, &b.multiply(&a).unwrap(), 1e-14));
            let l = ab.multiply(&d).unwrap();
            let r = a.multiply(&b.multiply(&d).unwrap()).unwrap();
            prop_assert!(rel_close(&l, &r, 1e-12));
        }

        #[test]
        fn reciprocal_is_multiplicative_inverse(mut a in series_strategy(8)) {
            // keep the constant term away from zero
            a.coeffs_mut()[0] = c(1.0 + a.coeff(0).norm(), 0.0);
            let r = a.reciprocal().unwrap();
            let one = a.multiply(&r).unwrap();
            let err = one.max_abs_diff(&TruncatedSeries::one(8));
            let scale: f64 = a.coeffs().iter().zip(r.coeffs()).map(|(x, y)| x.norm() * y.norm()).sum::<f64>().max(1.0);
            prop_assert!(err <= 1e-12 * scale, "err {err}");
        }

        #[test]
        fn leibniz_rule(a in series_strategy(6), b in series_strategy(6)) {
            let lhs = a.multiply(&b).unwrap().differentiate();
            let rhs = a.differentiate().mul_truncated(&b.truncate(5))
                .add(&a.truncate(5).mul_truncated(&b.differentiate())).unwrap();
            prop_assert!(rel_close(&lhs, &rhs, 1e-12));
        }
    }

    #[test]
    fn exact_mode_ring_axioms() {
        let a = TruncatedSeries::new(vec![
            exact_complex((1, 2), (3, 4)),
            exact_complex((-2, 3), (0, 1)),
            exact_complex((5, 7), (-1, 9)),
        ]);
        let b = TruncatedSeries::new(vec![
            exact_complex((1, 1), (0, 1)),
            exact_complex((3, 5), (2, 3)),
            exact_complex((-1, 8), (1, 3)),
        ]);
        assert_eq!(a.multiply(&b).unwrap(), b.multiply(&a).unwrap());
        let r = b.reciprocal().unwrap();
        assert_eq!(b.multiply(&r).unwrap(), TruncatedSeries::one(2));
    }
}
