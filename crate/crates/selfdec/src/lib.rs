//! Numerical toolkit for multiply selfdecomposable laws on the half line.
//!
//! A nonnegative infinitely divisible law is described here by its Levy
//! triplet with jump measure `Pi(dx) = k(x)/x dx`. The library provides:
//!
//! - the special functions the kernel formulas need ([`specialfn`]);
//! - double-exponential quadrature, root finding and scalar maximization
//!   ([`numerics`]);
//! - the Mellin-Euler operator `Theta(g)(x) = x g'(x)`, its discrete
//!   analogue `theta_c(g)(x) = g(x) - g(x/c)`, Hadamard-type fractional
//!   integrals, and finite-order monotonicity/complete-monotonicity
//!   certificates ([`theta`]);
//! - the exponential-ratio kernels `e_t`, `g_{alpha,t}`, `h_{alpha,t}`,
//!   their Mellin transforms, sign/monotonicity boundary constants, and the
//!   integer-valued staircase measure behind the bounded-density
//!   representation ([`kernels`]);
//! - seeded, reproducible Monte-Carlo verification of the distributional
//!   factorizations the kernels encode ([`montecarlo`]);
//! - a classifier that reports how many times selfdecomposable a triplet is,
//!   with per-order certificates and integrability checks ([`classify`]).
//!
//! Grid sweeps and sampling parallelize through rayon when the default
//! `parallel` feature is enabled; [`parallel::sequential`] forces the serial
//! path within a scope so both can be compared. Parallel and sequential
//! runs produce identical results.

pub mod classify;
mod error;
pub mod function;
pub mod grid;
pub mod kernels;
pub mod montecarlo;
pub mod numerics;
pub mod parallel;
pub mod specialfn;
pub mod theta;

pub use error::Error;
pub use function::ScalarFunction;
pub use grid::{GridSpec, Spacing};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
