//! Numerical laboratory for Löwner-Kufarev contour dynamics and its Witt algebra
//! skeleton.
//!
//! Everything here is pure computation over truncated complex power series:
//!
//! * [`series`] – exact-order series arithmetic in floating point or exact
//!   rational mode.
//! * [`poly`] – sparse multivariate polynomials in the coefficients `c_k`,
//!   the carrier for coefficient-space vector fields.
//! * [`witt`] – Kirillov operators `L_j`, the `P`/`K`/`Π` recurrences, dual
//!   one-forms and the Schaeffer–Spencer variation.
//! * [`loewner`] – the Löwner-Kufarev ODE/PDE in coefficient form, the
//!   Hamiltonian (position, momentum) flow and its conserved co-vectors.
//! * [`geodesic`] – Hamiltonian field of `Σ|L_k|²` on the coefficient body.
//! * [`stochastic`] – chordal SLE sampling, drift operator, martingale checks
//!   and the regularized Brownian flow on the circle.
//! * [`kdv`] – periodic spectral KdV, conserved integrals, variational
//!   derivatives and the Miura map.
//!
//! The crate is `no_std` and only needs `alloc`; IO, configuration and the
//! command line live in the companion `loewner-lab` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod fft;
pub mod geodesic;
pub mod kdv;
pub mod loewner;
pub mod ode;
pub mod poly;
pub mod rng;
pub mod scalar;
pub mod series;
pub mod stochastic;
pub mod witt;

pub use error::{Error, Result};
pub use scalar::{Exact, Scalar};
pub use series::{SchlichtCoefficients, TruncatedSeries, DEFAULT_ORDER, MAX_ORDER};

pub use num_complex::Complex64;
