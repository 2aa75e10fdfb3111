//! Compressive interferometry toolkit.
//!
//! Simulates two-arm interferometers whose reference arm applies a
//! *generalized delay* — a unitary with the basis elements as eigenfunctions
//! and eigenvalues e^{−jnα} — and reconstructs sparse basis coefficients
//! from far fewer interferogram samples than the Nyquist grid requires.
//!
//! Pipeline: [`basis`] synthesizes signals from Hermite-Gaussian / Fourier /
//! flipped-Gaussian expansions; [`delay`] realizes the delay as an ideal
//! diagonal operator, a fractional Fourier transform kernel, or a physical
//! three-SLM cascade; [`interferometer`] records energies across a delay
//! schedule and normalizes them into linear measurements; [`sensing`] builds
//! the constrained cos/sin measurement matrices those interferograms induce
//! and audits their recoverability (isotropy, incoherence, concentration,
//! RIP); [`solvers`] recovers coefficients by basis pursuit, LASSO, the
//! Dantzig selector, an FT baseline, or least squares; [`experiments`] wires
//! the scenarios end to end with seeded Monte Carlo sweeps and CSV/SVG
//! artifacts.

pub mod basis;
pub mod delay;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod interferometer;
pub mod sensing;
pub mod solvers;

pub use error::{Error, Result};
