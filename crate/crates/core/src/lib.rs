//! Numerical Bohr-Sommerfeld-Heisenberg quantization.
//!
//! The crate models the set of quantized Lagrangian tori of an integrable
//! system as an integer lattice, builds shifting (ladder) operators and
//! quantized observables as banded complex matrices over the lattice basis,
//! and instantiates two worked systems: the 1-D harmonic oscillator and the
//! spin-s coadjoint orbits of SO(3), the latter integrated to a unitary
//! group representation. A separate module computes semiclassical spectra
//! of 1-DOF Hamiltonians from the action integral A(E) = (1/2π)∮p dq.

pub mod error;
pub mod grouprep;
pub mod lattice;
pub mod opalg;
pub mod oscillator;
pub mod quadrature;
pub mod quantize;
pub mod spectrum;
pub mod spin;

pub use error::{Error, Result};
pub use num_complex::Complex64;
