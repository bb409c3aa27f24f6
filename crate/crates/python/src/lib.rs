//! Python bindings: `import defquad`.

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use defquad_core::cli::verify::{self, Suite};
use defquad_core::deformation::{Deformation as CoreDeformation, DeformationSpec};
use defquad_core::polynomials as poly;
use defquad_core::spectral::{self, DensityMethod, DensityOptions};
use defquad_core::wavefunction as wf;
use defquad_core::{operators, Error};

fn to_py(e: Error) -> PyErr {
    if e.is_usage() {
        PyValueError::new_err(e.to_string())
    } else {
        PyArithmeticError::new_err(e.to_string())
    }
}

fn options(method: Option<&str>, eta: Option<f64>) -> PyResult<DensityOptions> {
    let method = match method {
        None | Some("auto") => None,
        Some(name) => Some(name.parse::<DensityMethod>().map_err(to_py)?),
    };
    Ok(DensityOptions { method, eta })
}

/// A validated deformation family.
#[pyclass(name = "Deformation", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyDeformation(CoreDeformation);

#[pymethods]
impl PyDeformation {
    #[staticmethod]
    fn harmonic() -> Self {
        PyDeformation(CoreDeformation::HARMONIC)
    }

    #[staticmethod]
    fn math_q(q: f64) -> PyResult<Self> {
        CoreDeformation::math_q(q).map(PyDeformation).map_err(to_py)
    }

    #[staticmethod]
    fn physics_q(q: f64) -> PyResult<Self> {
        CoreDeformation::physics_q(q).map(PyDeformation).map_err(to_py)
    }

    #[staticmethod]
    fn pq(p: f64, q: f64) -> PyResult<Self> {
        CoreDeformation::pq(p, q).map(PyDeformation).map_err(to_py)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.0.spec() {
            DeformationSpec::Harmonic => "harmonic",
            DeformationSpec::MathQ { .. } => "mathq",
            DeformationSpec::PhysicsQ { .. } => "physicsq",
            DeformationSpec::PQ { .. } => "pq",
        }
    }

    #[getter]
    fn q(&self) -> Option<f64> {
        match self.0.spec() {
            DeformationSpec::Harmonic => None,
            DeformationSpec::MathQ { q } | DeformationSpec::PhysicsQ { q } | DeformationSpec::PQ { q, .. } => Some(q),
        }
    }

    #[getter]
    fn p(&self) -> Option<f64> {
        match self.0.spec() {
            DeformationSpec::PQ { p, .. } => Some(p),
            _ => None,
        }
    }

    /// Commutator parameter `Q`.
    #[getter(Q)]
    fn big_q(&self) -> f64 {
        self.0.deformation_q()
    }

    fn bracket(&self, n: usize) -> PyResult<f64> {
        self.0.bracket(n).map_err(to_py)
    }

    /// `[0], [1], ..., [levels]`.
    fn brackets(&self, levels: usize) -> PyResult<Vec<f64>> {
        Ok(self.0.bracket_sequence(levels).map_err(to_py)?.values)
    }

    fn __repr__(&self) -> String {
        format!("Deformation({})", self.0.spec())
    }
}

/// Sampled `|Ψ_n|²` with the settings that produced it.
#[pyclass(name = "Density", frozen, get_all)]
struct PyDensity {
    grid: Vec<f64>,
    density: Vec<f64>,
    level: usize,
    levels: usize,
    method: String,
    eta: f64,
    normalization: f64,
}

#[pymethods]
impl PyDensity {
    fn peak(&self) -> f64 {
        self.density.iter().cloned().fold(0.0, f64::max)
    }

    fn __len__(&self) -> usize {
        self.grid.len()
    }
}

/// `J_0(x), ..., J_order(x)`.
#[pyfunction]
fn polynomials(d: &PyDeformation, x: f64, order: usize) -> PyResult<Vec<f64>> {
    let e = poly::eval_all(&d.0, x, order).map_err(to_py)?;
    match e.overflow_at {
        Some(k) => Err(PyArithmeticError::new_err(format!("J_{k}({x}) exceeds 1e300"))),
        None => Ok(e.values),
    }
}

#[pyfunction]
#[pyo3(signature = (d, dim, theta=0.0))]
fn quadrature_matrix(d: &PyDeformation, dim: usize, theta: f64) -> PyResult<Vec<Vec<Complex64>>> {
    let m = operators::quadrature_matrix(&d.0, dim, theta).map_err(to_py)?;
    Ok((0..dim).map(|i| (0..dim).map(|j| m.get(i, j)).collect()).collect())
}

#[pyfunction]
fn q_commutator_residual(d: &PyDeformation, dim: usize) -> PyResult<f64> {
    operators::q_commutator_residual(&d.0, dim).map_err(to_py)
}

#[pyfunction]
fn xp_commutator_residual(d: &PyDeformation, dim: usize) -> PyResult<f64> {
    operators::xp_commutator_residual(&d.0, dim).map_err(to_py)
}

/// Gauss nodes and weights of the `levels`-point rule.
#[pyfunction]
fn gauss_measure(d: &PyDeformation, levels: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let m = spectral::gauss_measure(&d.0, levels).map_err(to_py)?;
    Ok((m.nodes, m.weights))
}

/// `(lo, hi, bounded)`.
#[pyfunction]
#[pyo3(signature = (d, levels=400))]
fn support_estimate(d: &PyDeformation, levels: usize) -> PyResult<(f64, f64, bool)> {
    let s = spectral::support_estimate(&d.0, levels).map_err(to_py)?;
    Ok((s.lo, s.hi, s.bounded))
}

#[pyfunction]
#[pyo3(signature = (d, level, grid, levels=400, method=None, eta=None))]
fn probability_density(
    d: &PyDeformation,
    level: usize,
    grid: Vec<f64>,
    levels: usize,
    method: Option<&str>,
    eta: Option<f64>,
) -> PyResult<PyDensity> {
    let p = wf::probability_density(&d.0, level, &grid, levels, &options(method, eta)?).map_err(to_py)?;
    Ok(PyDensity {
        grid: p.grid,
        density: p.density,
        level: p.level,
        levels: p.levels,
        method: p.method.as_str().to_string(),
        eta: p.eta,
        normalization: p.normalization,
    })
}

/// `Ψ_n(x) = e^{-inθ} J_n(x) Ψ_0(x)` on a grid.
#[pyfunction]
#[pyo3(signature = (d, level, grid, theta=0.0, levels=400, method=None, eta=None))]
fn wavefunction(
    d: &PyDeformation,
    level: usize,
    grid: Vec<f64>,
    theta: f64,
    levels: usize,
    method: Option<&str>,
    eta: Option<f64>,
) -> PyResult<Vec<Complex64>> {
    let w = wf::state_wavefunction(&d.0, level, theta, &grid, levels, &options(method, eta)?).map_err(to_py)?;
    Ok(w.values)
}

#[pyfunction]
#[pyo3(signature = (d, x, theta=0.0, levels=32, method=None, eta=None))]
fn eigenstate_coefficients(
    d: &PyDeformation,
    x: f64,
    theta: f64,
    levels: usize,
    method: Option<&str>,
    eta: Option<f64>,
) -> PyResult<Vec<Complex64>> {
    wf::eigenstate_coefficients(&d.0, x, theta, levels, &options(method, eta)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (d, x, theta=0.0, levels=32))]
fn eigenstate_residual(d: &PyDeformation, x: f64, theta: f64, levels: usize) -> PyResult<f64> {
    wf::eigenstate_residual(&d.0, x, theta, levels).map_err(to_py)
}

/// Runs an invariant suite; returns the report as a JSON string.
#[pyfunction]
#[pyo3(signature = (suite="all", d=None, dim=verify::DEFAULT_ALGEBRA_DIM))]
fn run_verify(suite: &str, d: Option<&PyDeformation>, dim: usize) -> PyResult<String> {
    let suite = match suite {
        "algebra" => Suite::Algebra,
        "polynomials" => Suite::Polynomials,
        "measure" => Suite::Measure,
        "wavefunctions" => Suite::Wavefunctions,
        "all" => Suite::All,
        other => return Err(PyValueError::new_err(format!("unknown suite {other:?}"))),
    };
    let specs = d.map(|d| vec![d.0]);
    let report = verify::verify(suite, specs.as_deref(), dim);
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn defquad(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDeformation>()?;
    m.add_class::<PyDensity>()?;
    m.add_function(wrap_pyfunction!(polynomials, m)?)?;
    m.add_function(wrap_pyfunction!(quadrature_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(q_commutator_residual, m)?)?;
    m.add_function(wrap_pyfunction!(xp_commutator_residual, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_measure, m)?)?;
    m.add_function(wrap_pyfunction!(support_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(probability_density, m)?)?;
    m.add_function(wrap_pyfunction!(wavefunction, m)?)?;
    m.add_function(wrap_pyfunction!(eigenstate_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(eigenstate_residual, m)?)?;
    m.add("verify", wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
