//! Sparse polynomials with rational coefficients in the variables `c_1, c_2, …`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Exponent vector; entry `i` is the power of `c_{i+1}`. Trailing zeros are
/// always trimmed so that equal monomials compare equal.
pub type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn mono_mul(a: &[u32], b: &[u32]) -> Monomial {
    let mut out = vec![0u32; a.len().max(b.len())];
    for (i, e) in a.iter().enumerate() {
        out[i] += e;
    }
    for (i, e) in b.iter().enumerate() {
        out[i] += e;
    }
    out
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(q: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), q);
        p
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(n)))
    }

    /// The variable `c_k`, `k ≥ 1`.
    pub fn var(k: usize) -> Self {
        assert!(k >= 1, "variables are c_1, c_2, ...");
        let mut m = vec![0u32; k];
        m[k - 1] = 1;
        let mut p = Self::zero();
        p.add_term(m, BigRational::one());
        p
    }

    /// `c_k` with the conventions `c_0 = 1` and `c_k = 0` for `k > n`.
    pub fn coefficient_var(k: usize, n: usize) -> Self {
        match k {
            0 => Self::integer(1),
            k if k > n => Self::zero(),
            k => Self::var(k),
        }
    }

    fn add_term(&mut self, m: Monomial, q: BigRational) {
        if q.is_zero() {
            return;
        }
        let m = trim(m);
        let cancelled = {
            let entry = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
            *entry += q;
            entry.is_zero()
        };
        if cancelled {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Largest variable index that occurs.
    pub fn max_var(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, q) in &other.terms {
            out.add_term(m.clone(), q.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * q);
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, qa) in &self.terms {
            for (mb, qb) in &other.terms {
                out.add_term(mono_mul(ma, mb), qa * qb);
            }
        }
        out
    }

    /// `∂/∂c_k`.
    pub fn partial(&self, k: usize) -> Self {
        let i = k - 1;
        let mut out = Self::zero();
        for (m, q) in &self.terms {
            let e = m.get(i).copied().unwrap_or(0);
            if e == 0 {
                continue;
            }
            let mut d = m.clone();
            d[i] -= 1;
            out.add_term(d, q * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Value at `c_k = c[k-1]`; variables past the end of `c` are zero.
    pub fn evaluate<S: Scalar>(&self, c: &[S]) -> S {
        let mut acc = S::zero();
        'terms: for (m, q) in &self.terms {
            let mut t = S::from_rational(q);
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let Some(x) = c.get(i) else {
                    continue 'terms;
                };
                for _ in 0..e {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }
}

/// Polynomial vector field `Σ_k V_k ∂/∂c_k` on `(c_1, …, c_N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    comps: Vec<Poly>,
}

impl VectorField {
    /// `comps[k-1]` is the `∂/∂c_k` component.
    pub fn new(comps: Vec<Poly>) -> Self {
        Self { comps }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, k: usize) -> &Poly {
        &self.comps[k - 1]
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    /// Directional derivative `Σ_k V_k ∂g/∂c_k`.
    pub fn derive(&self, g: &Poly) -> Poly {
        let top = g.max_var().min(self.dim());
        let mut out = Poly::zero();
        for k in 1..=top {
            let d = g.partial(k);
            if !d.is_zero() {
                out = out.add(&self.comps[k - 1].mul(&d));
            }
        }
        out
    }

    /// `{A, B}_k = B(A_k) − A(B_k)`.
    ///
    /// With this ordering the Kirillov fields satisfy
    /// `{L_m, L_n} = (n − m) L_{m+n}`.
    pub fn bracket(a: &Self, b: &Self) -> Self {
        let n = a.dim().min(b.dim());
        Self {
            comps: (0..n)
                .map(|i| b.derive(&a.comps[i]).sub(&a.derive(&b.comps[i])))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            comps: self.comps.iter().zip(&other.comps).map(|(x, y)| x.add(y)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            comps: self.comps.iter().zip(&other.comps).map(|(x, y)| x.sub(y)).collect(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self {
            comps: self.comps.iter().map(|x| x.scale(q)).collect(),
        }
    }

    pub fn evaluate<S: Scalar>(&self, c: &[S]) -> Vec<S> {
        self.comps.iter().map(|p| p.evaluate(c)).collect()
    }
}
