//! Numerical toolkit for fibered holomorphic maps over torus rotations.
//!
//! A map acts on `T^d x C` by
//! `(theta, z) -> (theta + alpha, sum_k c_k(theta) z^k)` where every
//! coefficient `c_k` is a trigonometric polynomial on the torus. The crate
//! provides the spectral arithmetic for those coefficients ([`trig`]), the map
//! type and its fiberwise invariants ([`fibered`]), linearization schemes
//! ([`linearize`]), Birkhoff-sum diagnostics ([`birkhoff`]), arithmetic of the
//! rotation vector ([`arith`]), invariant continua on indifferent maps
//! ([`continua`]) and file formats ([`io`]).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod birkhoff;
pub mod continua;
pub mod error;
pub mod fibered;
pub mod io;
pub mod linearize;
pub mod trig;

pub use error::{Error, Result};
pub use fibered::FiberedMap;
pub use num_complex::Complex64;
pub use trig::TrigPoly;
