//! The `J_n` recurrence viewed as a Jacobi operator.
//!
//! The truncated Jacobi matrix gives the Gauss measure (nodes are eigenvalues,
//! weights are squared first eigenvector components) and, through its
//! Stieltjes transform, a continuous estimate of the orthogonality weight
//! `w(x)`. Because `J_0 = 1` and the `J_n` are orthonormal, `w` is the ground
//! state probability density `|Ψ_0(x)|²`.
//!
//! Two regimes matter in practice:
//!
//! * slowly varying off-diagonals (harmonic, math-type): the measure has a
//!   smooth density and the continued fraction, closed with a square-root tail,
//!   resolves it with a tiny broadening `eta`;
//! * geometrically growing off-diagonals (physics-type, most (p,q)): the
//!   moment problem may be indeterminate and the `N`-level measure is a sum of
//!   well separated point masses. A density only exists after smoothing, and
//!   the result depends on `N` and `eta`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::deformation::{BracketSequence, Deformation};
use crate::error::{Error, Result};
use crate::polynomials::check_grid;

/// Symmetric tridiagonal matrix with zero diagonal and positive off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrix {
    offdiag: Vec<f64>,
}

impl JacobiMatrix {
    /// `offdiag[k]` couples rows `k` and `k+1`; the dimension is `len + 1`.
    pub fn from_offdiag(offdiag: Vec<f64>) -> Result<Self> {
        if let Some(b) = offdiag.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return Err(Error::InvalidInput(format!("Jacobi off-diagonals must be finite and positive, got {b}")));
        }
        Ok(JacobiMatrix { offdiag })
    }

    pub fn dim(&self) -> usize {
        self.offdiag.len() + 1
    }

    pub fn diagonal(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }
}

/// Truncated Jacobi matrix of the `J_n` recurrence on `levels` levels:
/// off-diagonals `b_1, ..., b_{levels-1}`.
pub fn jacobi_matrix(def: &Deformation, levels: usize) -> Result<JacobiMatrix> {
    if levels < 1 {
        return Err(Error::InvalidInput("Jacobi matrix needs at least one level".into()));
    }
    if levels == 1 {
        return JacobiMatrix::from_offdiag(Vec::new());
    }
    let seq = def.bracket_sequence(levels - 1)?;
    JacobiMatrix::from_offdiag(seq.offdiag)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// First entry of each normalized eigenvector, chosen nonnegative.
    pub first_components: Vec<f64>,
}

/// Maps `f64` to an integer with the same ordering, so bisection can split
/// the set of representable numbers instead of the real interval.
fn ordered(x: f64) -> i64 {
    let bits = x.to_bits() as i64;
    if bits < 0 {
        bits ^ i64::MAX
    } else {
        bits
    }
}

fn from_ordered(i: i64) -> f64 {
    let bits = if i < 0 { i ^ i64::MAX } else { i };
    f64::from_bits(bits as u64)
}

/// Number of eigenvalues strictly below `x` (Sturm count from the `LDLᵀ`
/// pivots of `T - x`).
fn sturm_count(off_sq: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut d = -x;
    if d.abs() < pivmin {
        d = -pivmin;
    }
    if d < 0.0 {
        count += 1;
    }
    for &b2 in off_sq {
        d = -x - b2 / d;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues and first eigenvector components of a Jacobi matrix.
///
/// Eigenvalues come from Sturm-sequence bisection over the ordered set of
/// doubles, which converges to neighbouring floats in at most 64 halvings and
/// keeps high relative accuracy for zero-diagonal matrices even when the
/// off-diagonals span many orders of magnitude. The first components come
/// from the eigenvector identity `v_k ∝ p_k(λ)`, where `p_k` are the
/// orthonormal polynomials of the matrix, so `v_0² = 1 / Σ_k p_k(λ)²`.
pub fn eig_sym_tridiag(jacobi: &JacobiMatrix) -> Result<TridiagEigen> {
    let dim = jacobi.dim();
    let off = jacobi.offdiag();
    if dim == 1 {
        return Ok(TridiagEigen { eigenvalues: vec![0.0], first_components: vec![1.0] });
    }
    let off_sq: Vec<f64> = off.iter().map(|b| b * b).collect();
    let max_sq = off_sq.iter().cloned().fold(0.0, f64::max);
    let pivmin = f64::MIN_POSITIVE * max_sq.max(1.0);
    // Gershgorin
    let bound = (0..dim)
        .map(|i| {
            let left = if i > 0 { off[i - 1] } else { 0.0 };
            let right = if i + 1 < dim { off[i] } else { 0.0 };
            left + right
        })
        .fold(0.0, f64::max)
        * (1.0 + 4.0 * f64::EPSILON);
    let cap = 50 * dim;

    let eigenvalues = (0..dim)
        .into_par_iter()
        .map(|k| {
            let mut lo = ordered(-bound);
            let mut hi = ordered(bound);
            let mut steps = 0;
            // invariant: count(lo) <= k < count(hi)
            while (hi as i128) - (lo as i128) > 1 {
                steps += 1;
                if steps > cap {
                    return Err(Error::Convergence { iterations: cap });
                }
                let mid = ((lo as i128 + hi as i128).div_euclid(2)) as i64;
                if sturm_count(&off_sq, from_ordered(mid), pivmin) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let (a, b) = (from_ordered(lo), from_ordered(hi));
            Ok(0.5 * a + 0.5 * b)
        })
        .collect::<Result<Vec<f64>>>()?;

    let first_components = eigenvalues.iter().map(|&lambda| christoffel_weight(off, lambda).sqrt()).collect();
    Ok(TridiagEigen { eigenvalues, first_components })
}

/// `1 / Σ_{k<dim} p_k(x)²` for the orthonormal polynomials of a zero-diagonal
/// Jacobi matrix. The recurrence state is rescaled whenever it grows large and
/// the scale is tracked in log form, so huge `|x|` gives a tiny weight instead
/// of an overflow.
fn christoffel_weight(off: &[f64], x: f64) -> f64 {
    const RESCALE: f64 = 1e100;
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sum = 1.0;
    let mut log_scale = 0.0;
    for k in 0..off.len() {
        let back = if k == 0 { 0.0 } else { off[k - 1] * prev };
        let mut next = (x * cur - back) / off[k];
        if next.abs() > RESCALE {
            let s = next.abs();
            next /= s;
            cur /= s;
            sum = sum / s / s;
            log_scale += s.ln();
        }
        sum += next * next;
        prev = cur;
        cur = next;
    }
    if log_scale == 0.0 {
        1.0 / sum
    } else {
        (-(sum.ln() + 2.0 * log_scale)).exp()
    }
}

/// Gauss quadrature rule of the `levels`-level truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Median gap between consecutive nodes among those carrying the central
    /// `fraction` of the mass (at least the two nodes nearest the median).
    pub fn core_spacing(&self, fraction: f64) -> Option<f64> {
        if self.len() < 2 {
            return None;
        }
        let tail = 0.5 * (1.0 - fraction) * self.total_mass();
        let mut acc = 0.0;
        let mut first = 0;
        while first + 1 < self.len() && acc + self.weights[first] <= tail {
            acc += self.weights[first];
            first += 1;
        }
        acc = 0.0;
        let mut last = self.len() - 1;
        while last > 0 && acc + self.weights[last] <= tail {
            acc += self.weights[last];
            last -= 1;
        }
        if last <= first {
            let mid = first.min(self.len() - 2);
            return Some(self.nodes[mid + 1] - self.nodes[mid]);
        }
        let mut gaps: Vec<f64> = self.nodes[first..=last].windows(2).map(|w| w[1] - w[0]).collect();
        gaps.sort_by(f64::total_cmp);
        Some(gaps[gaps.len() / 2])
    }

    /// Gaussian-kernel smoothing `Σ_i m_i φ((x - x_i)/σ)/σ` of the point masses
    /// `m_i = weights_i · g(x_i)`.
    pub fn smoothed_with(&self, x: f64, sigma: f64, g: impl Fn(usize) -> f64) -> f64 {
        let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        self.nodes
            .iter()
            .zip(&self.weights)
            .enumerate()
            .map(|(i, (&node, &w))| {
                let u = (x - node) / sigma;
                if u.abs() > 40.0 {
                    0.0
                } else {
                    w * g(i) * (-0.5 * u * u).exp() * norm
                }
            })
            .sum()
    }
}

/// Nodes and weights of the Gauss rule for the `J_n` (Golub–Welsch). The zeroth
/// moment is 1 because `J_0 = 1` is normalized.
pub fn gauss_measure(def: &Deformation, levels: usize) -> Result<DiscreteMeasure> {
    let eig = eig_sym_tridiag(&jacobi_matrix(def, levels)?)?;
    let weights = eig.first_components.iter().map(|c| c * c).collect();
    Ok(DiscreteMeasure { nodes: eig.eigenvalues, weights })
}

/// Off-diagonal ratio `b_{N}/b_{N-1}` beyond which the truncated measure is
/// treated as a set of separated point masses.
const GEOMETRIC_RATIO_TOL: f64 = 1e-2;

/// Relative change `|b_N - b_{N-1}| / b_N` below which the off-diagonals are
/// considered converged, i.e. the spectrum is bounded.
const CONVERGED_TOL: f64 = 1e-8;

/// How the off-diagonals behave at the truncation level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralRegime {
    /// Converged off-diagonals: bounded support with a smooth density.
    Bounded,
    /// Unbounded but slowly varying (e.g. `b_n ~ √n`): smooth density.
    SlowGrowth,
    /// Geometric growth or decay: the truncated measure is a sum of separated
    /// point masses and needs smoothing to be drawn as a curve.
    Geometric,
}

impl SpectralRegime {
    pub fn has_smooth_density(self) -> bool {
        !matches!(self, SpectralRegime::Geometric)
    }
}

pub fn spectral_regime(def: &Deformation, levels: usize) -> Result<SpectralRegime> {
    if levels < 2 {
        return Err(Error::InvalidInput("regime detection needs at least two levels".into()));
    }
    let seq = def.bracket_sequence(levels)?;
    Ok(regime_of(&seq))
}

fn regime_of(seq: &BracketSequence) -> SpectralRegime {
    let n = seq.levels();
    let (last, before) = (seq.b(n), seq.b(n - 1));
    if ((last - before) / last).abs() <= CONVERGED_TOL {
        SpectralRegime::Bounded
    } else if (last / before - 1.0).abs() <= GEOMETRIC_RATIO_TOL {
        SpectralRegime::SlowGrowth
    } else {
        SpectralRegime::Geometric
    }
}

/// Tail of the continued fraction beyond the truncation, modelled by constant
/// coefficients `b`: the root of `t = 1/(z - b² t)` with `t ~ 1/z` at infinity.
fn sqrt_terminator(z: Complex64, b: f64) -> Complex64 {
    let root = (z - 2.0 * b).sqrt() * (z + 2.0 * b).sqrt();
    (z - root) / (2.0 * b * b)
}

fn continued_fraction(seq: &BracketSequence, levels: usize, z: Complex64) -> Complex64 {
    // seq.b(levels) is the first coefficient outside the truncation
    let tail = sqrt_terminator(z, seq.b(levels));
    let mut g = 1.0 / (z - seq.b(levels).powi(2) * tail);
    for n in (1..levels).rev() {
        g = 1.0 / (z - seq.b(n).powi(2) * g);
    }
    g
}

/// `-(1/π) Im S(x + iη)` for the Stieltjes transform of the `levels`-level
/// Jacobi operator,
///
/// ```text
/// S(z) = 1/(z - b_1²/(z - b_2²/(... - b_{N-1}²/(z - b_N² t(z))))),
/// ```
///
/// closed with the square-root tail `t(z)` of constant coefficients `b_N`.
/// For slowly varying off-diagonals the tail removes the discreteness of the
/// truncation, so a small `eta` already yields a smooth curve.
pub fn stieltjes_density(def: &Deformation, levels: usize, x: f64, eta: f64) -> Result<f64> {
    check_stieltjes_args(levels, eta)?;
    let seq = def.bracket_sequence(levels)?;
    Ok(stieltjes_point(&seq, levels, x, eta))
}

fn check_stieltjes_args(levels: usize, eta: f64) -> Result<()> {
    if levels < 8 {
        return Err(Error::InvalidInput(format!("Stieltjes density needs at least 8 levels, got {levels}")));
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::InvalidInput(format!("eta must be positive, got {eta}")));
    }
    Ok(())
}

fn stieltjes_point(seq: &BracketSequence, levels: usize, x: f64, eta: f64) -> f64 {
    let s = continued_fraction(seq, levels, Complex64::new(x, eta));
    (-s.im / std::f64::consts::PI).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityMethod {
    Stieltjes,
    SmoothedGauss,
}

impl DensityMethod {
    /// Stieltjes when the truncated measure has a smooth density, smoothed
    /// Gauss otherwise.
    pub fn auto(def: &Deformation, levels: usize) -> Result<DensityMethod> {
        Ok(if spectral_regime(def, levels)?.has_smooth_density() {
            DensityMethod::Stieltjes
        } else {
            DensityMethod::SmoothedGauss
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DensityMethod::Stieltjes => "stieltjes",
            DensityMethod::SmoothedGauss => "smoothed-gauss",
        }
    }
}

impl fmt::Display for DensityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DensityMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stieltjes" => Ok(DensityMethod::Stieltjes),
            "smoothed-gauss" => Ok(DensityMethod::SmoothedGauss),
            other => Err(Error::InvalidInput(format!(
                "unknown density method '{other}' (expected stieltjes or smoothed-gauss)"
            ))),
        }
    }
}

/// Smallest broadening ever used.
pub const MIN_ETA: f64 = 1e-3;

/// Default broadening: `MIN_ETA` for the Stieltjes route (the tail already
/// smooths the curve) and the median node spacing of the central 99% of the
/// Gauss measure for the kernel route.
pub fn default_eta(def: &Deformation, levels: usize, method: DensityMethod) -> Result<f64> {
    match method {
        DensityMethod::Stieltjes => Ok(MIN_ETA),
        DensityMethod::SmoothedGauss => {
            let measure = gauss_measure(def, levels)?;
            Ok(kernel_width(&measure))
        }
    }
}

fn kernel_width(measure: &DiscreteMeasure) -> f64 {
    measure.core_spacing(0.99).map_or(MIN_ETA, |gap| gap.max(MIN_ETA))
}

/// Density method and broadening; `None` picks the defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DensityOptions {
    pub method: Option<DensityMethod>,
    pub eta: Option<f64>,
}

impl DensityOptions {
    pub fn new(method: DensityMethod, eta: f64) -> Self {
        DensityOptions { method: Some(method), eta: Some(eta) }
    }
}

/// Sampled orthogonality weight `w(x) = |Ψ_0(x)|²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub deformation: Deformation,
    pub grid: Vec<f64>,
    /// Normalized to unit trapezoid integral over `grid`.
    pub density: Vec<f64>,
    pub method: DensityMethod,
    pub levels: usize,
    pub eta: f64,
    pub regime: SpectralRegime,
    /// Trapezoid integral before the final renormalization.
    pub raw_integral: f64,
    /// Kept for the kernel route so excited-state densities can smooth
    /// `J_n²`-weighted masses.
    #[serde(skip)]
    pub measure: Option<DiscreteMeasure>,
    #[serde(skip)]
    pub(crate) brackets: BracketSequence,
}

impl DensityEstimate {
    pub fn at(&self, i: usize) -> f64 {
        self.density[i]
    }

    /// Largest sampled density value.
    pub fn peak(&self) -> f64 {
        self.density.iter().cloned().fold(0.0, f64::max)
    }

    pub fn brackets(&self) -> &BracketSequence {
        &self.brackets
    }
}

pub fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2).zip(values.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

/// Unnormalized ground density at one point, for callers that need `|Ψ_0|`
/// away from a grid.
pub fn point_density(def: &Deformation, levels: usize, x: f64, options: &DensityOptions) -> Result<f64> {
    let method = match options.method {
        Some(m) => m,
        None => DensityMethod::auto(def, levels)?,
    };
    match method {
        DensityMethod::Stieltjes => stieltjes_density(def, levels, x, options.eta.unwrap_or(MIN_ETA)),
        DensityMethod::SmoothedGauss => {
            let measure = gauss_measure(def, levels)?;
            let sigma = options.eta.unwrap_or_else(|| kernel_width(&measure));
            check_eta(sigma)?;
            Ok(measure.smoothed_with(x, sigma, |_| 1.0))
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("eta must be positive, got {eta}")))
    }
}

/// Ground-state density on `grid`, renormalized to unit trapezoid integral.
pub fn ground_density(
    def: &Deformation,
    levels: usize,
    grid: &[f64],
    options: &DensityOptions,
) -> Result<DensityEstimate> {
    check_grid(grid)?;
    if grid.len() < 2 {
        return Err(Error::InvalidInput("density grid needs at least two points".into()));
    }
    if levels < 8 {
        return Err(Error::InvalidInput(format!("density estimation needs at least 8 levels, got {levels}")));
    }
    let seq = def.bracket_sequence(levels)?;
    let regime = regime_of(&seq);
    let method = options.method.unwrap_or(if regime.has_smooth_density() {
        DensityMethod::Stieltjes
    } else {
        DensityMethod::SmoothedGauss
    });

    let (raw, eta, measure) = match method {
        DensityMethod::Stieltjes => {
            let eta = options.eta.unwrap_or(MIN_ETA);
            check_stieltjes_args(levels, eta)?;
            let raw: Vec<f64> = grid.par_iter().map(|&x| stieltjes_point(&seq, levels, x, eta)).collect();
            (raw, eta, None)
        }
        DensityMethod::SmoothedGauss => {
            let measure = gauss_measure(def, levels)?;
            let eta = options.eta.unwrap_or_else(|| kernel_width(&measure));
            check_eta(eta)?;
            let raw: Vec<f64> = grid.par_iter().map(|&x| measure.smoothed_with(x, eta, |_| 1.0)).collect();
            (raw, eta, Some(measure))
        }
    };
    let raw_integral = trapezoid(grid, &raw);
    if !(raw_integral > 0.0 && raw_integral.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "density vanishes on the grid [{}, {}]; widen it to cover the support",
            grid[0],
            grid[grid.len() - 1]
        )));
    }
    let density = raw.iter().map(|v| v / raw_integral).collect();
    Ok(DensityEstimate {
        deformation: *def,
        grid: grid.to_vec(),
        density,
        method,
        levels,
        eta,
        regime,
        raw_integral,
        measure,
        brackets: seq,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
    /// False when the off-diagonals are still changing at the truncation, so
    /// the interval keeps growing with `levels`.
    pub bounded: bool,
}

impl Support {
    pub fn contains(&self, x: f64) -> bool {
        (self.lo..=self.hi).contains(&x)
    }
}

/// Extreme Gauss nodes padded by three edge spacings.
pub fn support_estimate(def: &Deformation, levels: usize) -> Result<Support> {
    if levels < 8 {
        return Err(Error::InvalidInput(format!("support estimate needs at least 8 levels, got {levels}")));
    }
    let measure = gauss_measure(def, levels)?;
    let nodes = &measure.nodes;
    let n = nodes.len();
    let lo = nodes[0] - 3.0 * (nodes[1] - nodes[0]);
    let hi = nodes[n - 1] + 3.0 * (nodes[n - 1] - nodes[n - 2]);
    let bounded = spectral_regime(def, levels)? == SpectralRegime::Bounded;
    Ok(Support { lo, hi, bounded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn jacobi_examples() {
        let j = jacobi_matrix(&Deformation::HARMONIC, 3).unwrap();
        assert_eq!(j.dim(), 3);
        assert_eq!(j.diagonal(), vec![0.0; 3]);
        assert_relative_eq!(j.offdiag()[0], 0.5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(j.offdiag()[1], 1.0, max_relative = 1e-15);

        let j = jacobi_matrix(&Deformation::math_q(0.9).unwrap(), 2).unwrap();
        assert_relative_eq!(j.offdiag()[0], 0.6726812023536855, max_relative = 1e-15);

        let j = jacobi_matrix(&Deformation::math_q(1e-8).unwrap(), 5).unwrap();
        for b in j.offdiag() {
            assert_abs_diff_eq!(*b, 0.5, epsilon = 1e-8);
        }
        assert!(JacobiMatrix::from_offdiag(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn eigen_small_cases() {
        let e = eig_sym_tridiag(&JacobiMatrix::from_offdiag(vec![]).unwrap()).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0]);
        assert_eq!(e.first_components, vec![1.0]);

        let j = jacobi_matrix(&Deformation::math_q(0.9).unwrap(), 2).unwrap();
        let e = eig_sym_tridiag(&j).unwrap();
        assert_relative_eq!(e.eigenvalues[0], -0.6726812023536855, max_relative = 1e-15);
        assert_relative_eq!(e.eigenvalues[1], 0.6726812023536855, max_relative = 1e-15);
        for c in e.first_components {
            assert_relative_eq!(c * c, 0.5, max_relative = 1e-15);
        }
    }

    #[test]
    fn toeplitz_spectrum() {
        for n in [3usize, 10, 57] {
            let j = JacobiMatrix::from_offdiag(vec![0.5; n - 1]).unwrap();
            let e = eig_sym_tridiag(&j).unwrap();
            for (k, lambda) in e.eigenvalues.iter().enumerate() {
                let expected = ((n - k) as f64 * PI / (n + 1) as f64).cos();
                assert_abs_diff_eq!(*lambda, expected, epsilon = 1e-14);
            }
            // first component of the k-th Toeplitz eigenvector: √(2/(n+1)) sin(kπ/(n+1))
            for (k, c) in e.first_components.iter().enumerate() {
                let expected = (2.0 / (n + 1) as f64).sqrt() * ((n - k) as f64 * PI / (n + 1) as f64).sin();
                assert_abs_diff_eq!(*c, expected, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn harmonic_gauss_rule_matches_gauss_hermite() {
        let m = gauss_measure(&Deformation::HARMONIC, 20).unwrap();
        // nodes and weights of 20-point Gauss-Hermite, weights divided by √π
        let table = [
            (10, 0.24534070830090124, 0.2607930634495549),
            (11, 0.7374737285453944, 0.16173933398399998),
            (15, 2.7888060584281305, 0.00012882627996192928),
            (19, 5.387480890011233, 1.2578006724379234e-13),
        ];
        for (i, x, w) in table {
            assert_relative_eq!(m.nodes[i], x, max_relative = 1e-13);
            assert_relative_eq!(m.weights[i], w, max_relative = 1e-11);
            assert_relative_eq!(m.nodes[19 - i], -x, max_relative = 1e-13);
        }
    }

    #[test]
    fn measure_invariants() {
        for d in [
            Deformation::HARMONIC,
            Deformation::math_q(0.9).unwrap(),
            Deformation::physics_q(1.9).unwrap(),
            Deformation::pq(1.9, 0.5).unwrap(),
        ] {
            for n in [1usize, 2, 7, 32, 400] {
                let m = gauss_measure(&d, n).unwrap();
                assert_abs_diff_eq!(m.total_mass(), 1.0, epsilon = 1e-12);
                assert!(m.weights.iter().all(|w| *w >= 0.0));
                assert!(m.nodes.windows(2).all(|w| w[0] < w[1]));
                for k in 0..n {
                    let scale = m.nodes[k].abs().max(1.0);
                    assert!((m.nodes[k] + m.nodes[n - 1 - k]).abs() <= 1e-12 * scale, "{d} n={n} k={k}");
                }
            }
        }
        let m = gauss_measure(&Deformation::pq(1.5, 0.5).unwrap(), 1).unwrap();
        assert_eq!((m.nodes, m.weights), (vec![0.0], vec![1.0]));
    }

    #[test]
    fn stieltjes_examples() {
        let h = stieltjes_density(&Deformation::HARMONIC, 400, 0.0, 1e-3).unwrap();
        assert_abs_diff_eq!(h, 0.5642, epsilon = 2e-3);
        let c = stieltjes_density(&Deformation::math_q(1e-8).unwrap(), 400, 0.0, 1e-3).unwrap();
        assert_abs_diff_eq!(c, 2.0 / PI, epsilon = 1e-2);
        for d in [Deformation::math_q(0.5).unwrap(), Deformation::math_q(1e-8).unwrap()] {
            assert!(stieltjes_density(&d, 200, 10.0, 1e-6).unwrap() <= 1e-4);
        }
        assert!(stieltjes_density(&Deformation::HARMONIC, 200, 80.0, 1e-6).unwrap() <= 1e-4);
        assert!(stieltjes_density(&Deformation::HARMONIC, 7, 0.0, 1e-3).is_err());
        assert!(stieltjes_density(&Deformation::HARMONIC, 8, 0.0, 0.0).is_err());
    }

    #[test]
    fn harmonic_and_semicircle_densities() {
        let grid = linspace(-4.0, 4.0, 801);
        let opts = DensityOptions::new(DensityMethod::Stieltjes, 1e-3);
        let est = ground_density(&Deformation::HARMONIC, 400, &grid, &opts).unwrap();
        let err =
            grid.iter().zip(&est.density).map(|(x, d)| (d - (-x * x).exp() / PI.sqrt()).abs()).fold(0.0, f64::max);
        assert!(err <= 5e-3, "{err}");

        let grid = linspace(-1.5, 1.5, 601);
        let est = ground_density(&Deformation::math_q(1e-8).unwrap(), 400, &grid, &opts).unwrap();
        for (x, d) in grid.iter().zip(&est.density) {
            if x.abs() <= 0.95 {
                assert_abs_diff_eq!(*d, 2.0 / PI * (1.0 - x * x).sqrt(), epsilon = 5e-2);
            }
        }
    }

    #[test]
    fn density_methods_agree_for_math_type() {
        let grid = linspace(-3.2, 3.2, 641);
        let d = Deformation::math_q(0.8).unwrap();
        let a = ground_density(&d, 400, &grid, &DensityOptions::new(DensityMethod::Stieltjes, 1e-3)).unwrap();
        let b =
            ground_density(&d, 400, &grid, &DensityOptions { method: Some(DensityMethod::SmoothedGauss), eta: None })
                .unwrap();
        let err = a.density.iter().zip(&b.density).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(err <= 5e-2, "{err}");
    }

    #[test]
    fn density_properties() {
        let grid = linspace(-3.0, 3.0, 601);
        for d in [Deformation::math_q(0.3).unwrap(), Deformation::math_q(0.9).unwrap()] {
            let est = ground_density(&d, 400, &grid, &DensityOptions::default()).unwrap();
            assert_eq!(est.method, DensityMethod::Stieltjes);
            assert!((est.raw_integral - 1.0).abs() <= 0.02, "{}", est.raw_integral);
            assert!(est.density.iter().all(|v| *v >= 0.0));
            for i in 0..grid.len() {
                assert_abs_diff_eq!(est.density[i], est.density[grid.len() - 1 - i], epsilon = 1e-8);
            }
            let coarse = ground_density(&d, 200, &grid, &DensityOptions::default()).unwrap();
            let support = support_estimate(&d, 400).unwrap();
            let half = 0.45 * (support.hi - support.lo);
            let diff = grid
                .iter()
                .enumerate()
                .filter(|(_, x)| x.abs() <= half)
                .map(|(i, _)| (est.density[i] - coarse.density[i]).abs())
                .fold(0.0, f64::max);
            assert!(diff <= 1e-2, "{diff}");
        }
    }

    #[test]
    fn geometric_regime_uses_kernel() {
        for d in [Deformation::physics_q(1.5).unwrap(), Deformation::pq(1.3, 0.5).unwrap()] {
            assert_eq!(spectral_regime(&d, 400).unwrap(), SpectralRegime::Geometric);
            assert_eq!(DensityMethod::auto(&d, 400).unwrap(), DensityMethod::SmoothedGauss);
            let eta = default_eta(&d, 400, DensityMethod::SmoothedGauss).unwrap();
            assert!(eta > 0.1 && eta < 5.0, "{eta}");
        }
        assert_eq!(spectral_regime(&Deformation::HARMONIC, 400).unwrap(), SpectralRegime::SlowGrowth);
        assert_eq!(spectral_regime(&Deformation::math_q(0.9).unwrap(), 400).unwrap(), SpectralRegime::Bounded);
    }

    #[test]
    fn support_examples() {
        let s = support_estimate(&Deformation::math_q(1e-8).unwrap(), 200).unwrap();
        assert!(s.bounded);
        assert_abs_diff_eq!(s.lo, -1.0, epsilon = 0.02);
        assert_abs_diff_eq!(s.hi, 1.0, epsilon = 0.02);

        let s = support_estimate(&Deformation::HARMONIC, 200).unwrap();
        assert!(!s.bounded);
        // largest Hermite zero ~ √(2N)
        assert!(s.hi > 0.9 * 20.0 && s.hi < 1.1 * 20.0, "{}", s.hi);

        let s = support_estimate(&Deformation::math_q(0.9).unwrap(), 400).unwrap();
        assert!(s.lo >= -3.09 && s.hi <= 3.09, "{s:?}");
    }

    #[test]
    fn method_parsing() {
        assert_eq!("stieltjes".parse::<DensityMethod>().unwrap(), DensityMethod::Stieltjes);
        assert_eq!("smoothed-gauss".parse::<DensityMethod>().unwrap(), DensityMethod::SmoothedGauss);
        assert!("spline".parse::<DensityMethod>().is_err());
    }
}
