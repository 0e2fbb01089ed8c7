//! Weighted equilibrium measures and capacities for polynomial-type weights on
//! a real segment, with the Gelfond-Schnirelman lower bound for the integral
//! of Chebyshev's psi-function built on top.

pub mod equilibrium;
pub mod error;
pub mod fekete;
pub mod gsbound;
pub mod poly;
pub mod primes;
pub mod quadrature;
pub mod weightspec;

pub use error::{Error, ErrorKind, Result};
