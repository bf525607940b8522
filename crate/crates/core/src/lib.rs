//! Numerical core for small bipartite Bell scenarios.
//!
//! The crate computes local (deterministic) bounds, quantum values under
//! projective and POVM measurements, and lower/upper bounds on quantum
//! maxima via see-saw iteration and a dense semidefinite-programming
//! solver. It is `no_std` and only needs an allocator.
//!
//! Layering, bottom-up:
//!
//! - [`linalg`]: dense complex matrices, Hermitian operators, Jacobi
//!   eigensolvers.
//! - [`quantum`]: states, Bloch-vector projectors, POVMs, the Born rule and
//!   Neumark dilation of three-outcome qubit POVMs.
//! - [`bell`]: Bell functionals over marginal and joint probabilities,
//!   deterministic-strategy enumeration, quantum evaluation.
//! - [`sdp`]: primal-dual interior point solver for block-diagonal SDPs.
//! - [`optimize`]: the W optimization, see-saw, closed-form maximally
//!   entangled results, noise analysis and a level-1 moment-matrix bound.

#![no_std]
// `!(x > 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(unused_imports))]

extern crate alloc;

pub mod bell;
pub mod error;
pub mod linalg;
pub mod optimize;
pub mod quantum;
pub mod sdp;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
