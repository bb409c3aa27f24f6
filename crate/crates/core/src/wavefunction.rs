//! Deformed Fock states in the quadrature representation,
//! `Ψ_n(x) = e^{-inθ} J_n(x) Ψ_0(x)`, with `Ψ_0 = +√w` taken real and
//! nonnegative, and the Fock expansion of the quadrature eigenstates
//! `|x_θ> = Ψ̄_0(x_θ) Σ_n J_n(x_θ) e^{inθ} |n>`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::deformation::{BracketSequence, Deformation};
use crate::error::{Error, Result};
use crate::operators::quadrature_matrix;
use crate::polynomials::recurrence;
use crate::spectral::{
    gauss_measure, ground_density, point_density, trapezoid, DensityEstimate, DensityMethod, DensityOptions,
    DiscreteMeasure,
};

/// Accepted range of the renormalization factor of an excited-state density.
pub const NORMALIZATION_WINDOW: (f64, f64) = (0.98, 1.02);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavefunctionSample {
    pub deformation: Deformation,
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub level: usize,
    pub theta: f64,
    /// Truncation used for `Ψ_0`.
    pub levels: usize,
}

impl WavefunctionSample {
    /// Builds `Ψ_n` on the grid of an existing ground density.
    pub fn from_density(density: &DensityEstimate, level: usize, theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidInput(format!("theta must be finite, got {theta}")));
        }
        let j = polynomial_column(density, level)?;
        let phase = Complex64::cis(-(level as f64) * theta);
        let values = density.density.iter().zip(&j).map(|(&w, &jn)| phase * (jn * w.sqrt())).collect();
        Ok(WavefunctionSample {
            deformation: density.deformation,
            grid: density.grid.clone(),
            values,
            level,
            theta,
            levels: density.levels,
        })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}

/// `J_level` at every grid point of `density`; errors if the recurrence
/// overflows where the density is nonzero.
fn polynomial_column(density: &DensityEstimate, level: usize) -> Result<Vec<f64>> {
    let owned;
    let seq: &BracketSequence = if density.brackets().levels() >= level.max(1) {
        density.brackets()
    } else {
        owned = density.deformation.bracket_sequence(level)?;
        &owned
    };
    density
        .grid
        .iter()
        .zip(&density.density)
        .map(|(&x, &w)| {
            let (values, overflow_at) = recurrence(seq, x, level);
            match overflow_at {
                None => Ok(values[level]),
                Some(_) if w == 0.0 => Ok(0.0),
                Some(k) => Err(Error::Overflow(format!("J_{k}({x}) exceeds 1e300 inside the support"))),
            }
        })
        .collect()
}

/// `Ψ_0 = +√w` on `grid`.
pub fn ground_wavefunction(
    def: &Deformation,
    grid: &[f64],
    levels: usize,
    options: &DensityOptions,
) -> Result<WavefunctionSample> {
    let density = ground_density(def, levels, grid, options)?;
    WavefunctionSample::from_density(&density, 0, 0.0)
}

/// `Ψ_n(x) = e^{-inθ} J_n(x) Ψ_0(x)` on `grid`.
pub fn state_wavefunction(
    def: &Deformation,
    level: usize,
    theta: f64,
    grid: &[f64],
    levels: usize,
    options: &DensityOptions,
) -> Result<WavefunctionSample> {
    let density = ground_density(def, levels, grid, options)?;
    WavefunctionSample::from_density(&density, level, theta)
}

/// `|Ψ_n|²` on a grid, renormalized to unit trapezoid integral.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityDensity {
    pub deformation: Deformation,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub level: usize,
    pub levels: usize,
    pub method: DensityMethod,
    pub eta: f64,
    /// Trapezoid integral before renormalization. Analytically 1; values
    /// outside [`NORMALIZATION_WINDOW`] mean the grid misses part of the state
    /// or the smoothing is too coarse.
    pub normalization: f64,
}

impl ProbabilityDensity {
    pub fn from_density(density: &DensityEstimate, level: usize) -> Result<Self> {
        let raw: Vec<f64> = match (&density.method, &density.measure) {
            (DensityMethod::SmoothedGauss, Some(measure)) => smoothed_excited(density, measure, level)?,
            _ => {
                let j = polynomial_column(density, level)?;
                density.density.iter().zip(&j).map(|(w, jn)| jn * jn * w).collect()
            }
        };
        let normalization = trapezoid(&density.grid, &raw);
        if !(normalization > 0.0 && normalization.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "|Psi_{level}|^2 vanishes on the grid; widen it to cover the support"
            )));
        }
        Ok(ProbabilityDensity {
            deformation: density.deformation,
            grid: density.grid.clone(),
            density: raw.iter().map(|v| v / normalization).collect(),
            level,
            levels: density.levels,
            method: density.method,
            eta: density.eta,
            normalization,
        })
    }

    pub fn peak(&self) -> f64 {
        self.density.iter().cloned().fold(0.0, f64::max)
    }

    pub fn normalization_ok(&self) -> bool {
        (NORMALIZATION_WINDOW.0..=NORMALIZATION_WINDOW.1).contains(&self.normalization)
    }
}

/// Kernel smoothing of the point masses `w_i J_n(x_i)²`, on the same scale as
/// the normalized ground density.
fn smoothed_excited(density: &DensityEstimate, measure: &DiscreteMeasure, level: usize) -> Result<Vec<f64>> {
    let seq = density.deformation.bracket_sequence(level.max(1))?;
    let j2: Vec<f64> = measure
        .nodes
        .iter()
        .zip(&measure.weights)
        .map(|(&x, &w)| {
            let (values, overflow_at) = recurrence(&seq, x, level);
            match overflow_at {
                None => values[level] * values[level],
                // mass is negligible wherever J_n overflows
                Some(_) if w < 1e-300 => 0.0,
                Some(_) => f64::INFINITY,
            }
        })
        .collect();
    if j2.iter().any(|v| v.is_infinite()) {
        return Err(Error::Overflow(format!("J_{level} overflows on a Gauss node carrying mass")));
    }
    Ok(density.grid.iter().map(|&x| measure.smoothed_with(x, density.eta, |i| j2[i]) / density.raw_integral).collect())
}

pub fn probability_density(
    def: &Deformation,
    level: usize,
    grid: &[f64],
    levels: usize,
    options: &DensityOptions,
) -> Result<ProbabilityDensity> {
    let density = ground_density(def, levels, grid, options)?;
    ProbabilityDensity::from_density(&density, level)
}

fn gauss_polynomials(def: &Deformation, nmax: usize, levels: usize) -> Result<(DiscreteMeasure, Vec<Vec<f64>>)> {
    if 2 * nmax >= levels {
        return Err(Error::InvalidInput(format!(
            "orthonormality checks need n < levels/2, got n={nmax}, levels={levels}"
        )));
    }
    let measure = gauss_measure(def, levels)?;
    let seq = def.bracket_sequence(nmax.max(1))?;
    let rows = measure
        .nodes
        .iter()
        .zip(&measure.weights)
        .map(|(&x, &w)| {
            let (values, overflow_at) = recurrence(&seq, x, nmax);
            if overflow_at.is_some() {
                if w == 0.0 {
                    return Ok(vec![0.0; nmax + 1]);
                }
                return Err(Error::Overflow(format!("J_n overflows at Gauss node {x}")));
            }
            Ok(values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((measure, rows))
}

/// `Σ_i w_i J_n(x_i)²` over the Gauss measure; exactly 1 for `n < levels/2`.
pub fn normalization(def: &Deformation, level: usize, levels: usize) -> Result<f64> {
    let (measure, rows) = gauss_polynomials(def, level, levels)?;
    Ok(measure.weights.iter().zip(&rows).map(|(w, j)| w * j[level] * j[level]).sum())
}

/// Gram matrix `G_mn = Σ_i w_i J_m(x_i) J_n(x_i)` for `m, n <= nmax`.
pub fn orthonormality_matrix(def: &Deformation, nmax: usize, levels: usize) -> Result<DMatrix<f64>> {
    let (measure, rows) = gauss_polynomials(def, nmax, levels)?;
    let mut gram = DMatrix::zeros(nmax + 1, nmax + 1);
    for (w, j) in measure.weights.iter().zip(&rows) {
        for m in 0..=nmax {
            for n in 0..=nmax {
                gram[(m, n)] += w * j[m] * j[n];
            }
        }
    }
    Ok(gram)
}

fn eigen_polynomials(def: &Deformation, x: f64, levels: usize) -> Result<Vec<f64>> {
    if levels < 4 {
        return Err(Error::InvalidInput(format!("eigenstate expansion needs at least 4 levels, got {levels}")));
    }
    let seq = def.bracket_sequence(levels)?;
    let (values, overflow_at) = recurrence(&seq, x, levels - 1);
    if let Some(k) = overflow_at {
        return Err(Error::Overflow(format!("J_{k}({x}) exceeds 1e300")));
    }
    Ok(values)
}

/// `c_n = Ψ̄_0(x_θ) J_n(x_θ) e^{inθ}` for `n < levels`.
pub fn eigenstate_coefficients(
    def: &Deformation,
    x_theta: f64,
    theta: f64,
    levels: usize,
    options: &DensityOptions,
) -> Result<Vec<Complex64>> {
    let j = eigen_polynomials(def, x_theta, levels)?;
    let psi0 = point_density(def, levels.max(8), x_theta, options)?.sqrt();
    Ok(j.iter().enumerate().map(|(n, &jn)| Complex64::cis(n as f64 * theta) * (psi0 * jn)).collect())
}

/// Max over the first `levels - 1` components of `|(X_θ u)_n - x_θ u_n|`,
/// where `u` is the unit-normalized coefficient vector. The last component is
/// excluded: it only vanishes when `x_θ` is a root of `J_levels`.
pub fn eigenstate_residual(def: &Deformation, x_theta: f64, theta: f64, levels: usize) -> Result<f64> {
    let j = eigen_polynomials(def, x_theta, levels)?;
    let norm = j.iter().map(|v| v * v).sum::<f64>().sqrt();
    let u = DVector::from_iterator(
        levels,
        j.iter().enumerate().map(|(n, &jn)| Complex64::cis(n as f64 * theta) * (jn / norm)),
    );
    let x = quadrature_matrix(def, levels, theta)?.entries;
    let applied = &x * &u;
    Ok((0..levels - 1).map(|n| (applied[n] - u[n] * x_theta).norm()).fold(0.0, f64::max))
}

/// `Ψ_0, ..., Ψ_nmax` at one abscissa from the two-term wavefunction recurrence
///
/// ```text
/// Ψ_1     = e^{-iθ}/√[1] · 2x/√(1+Q) · Ψ_0
/// Ψ_{n+1} = e^{-iθ}/√[n+1] · ( 2/√(1+Q) · x Ψ_n - √[n] Ψ_{n-1} e^{-iθ} )
/// ```
pub fn recurrence_states(
    def: &Deformation,
    x: f64,
    theta: f64,
    psi0: Complex64,
    nmax: usize,
) -> Result<Vec<Complex64>> {
    let mut states = vec![psi0];
    if nmax == 0 {
        return Ok(states);
    }
    let seq = def.bracket_sequence(nmax)?;
    let phase = Complex64::cis(-theta);
    let scale = 2.0 / (1.0 + def.deformation_q()).sqrt();
    states.push(phase / seq.values[1].sqrt() * (scale * x) * psi0);
    for n in 1..nmax {
        let next =
            phase / seq.values[n + 1].sqrt() * (states[n] * (scale * x) - states[n - 1] * phase * seq.values[n].sqrt());
        states.push(next);
    }
    Ok(states)
}
