//! Quadrature eigenstates and wavefunctions of f-deformed oscillators.
//!
//! - [`deformation`]: deformation families, the brackets `[n]` and `Q`
//! - [`operators`]: truncated ladder, number and quadrature matrices
//! - [`polynomials`]: the orthonormal polynomials `J_n` and classical oracles
//! - [`spectral`]: Jacobi matrix, Gauss measure and the ground-state density
//! - [`wavefunction`]: `Ψ_n = e^{-inθ} J_n Ψ_0`, densities and eigenstates of `X_θ`
//! - [`cli`]: the `defquad` command line

pub mod cli;
pub mod deformation;
pub mod error;
pub mod operators;
pub mod polynomials;
pub mod spectral;
pub mod wavefunction;

pub use deformation::{validate, BracketSequence, Deformation, DeformationSpec};
pub use error::{Error, Result};
pub use spectral::{DensityEstimate, DensityMethod, DensityOptions, DiscreteMeasure};
