//! Python bindings for the quadvortex core crate.

use num_complex::Complex64;
use pyo3::exceptions::{PyValueError, PyIOError};
use pyo3::prelude::*;

use quadvortex::exportio::to_json_string;
use quadvortex::fockspace::{self, Mode};
use quadvortex::modeconverter;
use quadvortex::quadfield::{self, GridSpec, LgOptions, OddNReading, Provenance, RadialForm};
use quadvortex::vortexdetect::{self, DetectionParams};
use quadvortex::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "SqueezeConfig", frozen)]
struct PySqueezeConfig(fockspace::SqueezeConfig);

#[pymethods]
impl PySqueezeConfig {
    #[new]
    #[pyo3(signature = (n_total, r, phi = std::f64::consts::FRAC_PI_4))]
    fn new(n_total: usize, r: f64, phi: f64) -> PyResult<Self> {
        fockspace::SqueezeConfig::new(n_total, r, phi).map(Self).map_err(py_err)
    }

    #[getter]
    fn n_total(&self) -> usize {
        self.0.n_total
    }

    #[getter]
    fn r(&self) -> f64 {
        self.0.r
    }

    #[getter]
    fn phi(&self) -> f64 {
        self.0.phi
    }

    fn __repr__(&self) -> String {
        format!("SqueezeConfig(n_total={}, r={}, phi={})", self.0.n_total, self.0.r, self.0.phi)
    }
}

#[pyclass(name = "TwoModeState", frozen)]
struct PyTwoModeState(fockspace::TwoModeState);

#[pymethods]
impl PyTwoModeState {
    #[new]
    fn new(truncation: usize, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        fockspace::TwoModeState::from_amplitudes(truncation, amplitudes).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn fock(truncation: usize, n1: usize, n2: usize) -> PyResult<Self> {
        fockspace::TwoModeState::fock(truncation, n1, n2).map(Self).map_err(py_err)
    }

    #[getter]
    fn truncation(&self) -> usize {
        self.0.truncation()
    }

    /// Amplitudes in basis order, index `k(k+1)/2 + n2` with `k = n1 + n2`.
    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn amplitude(&self, n1: usize, n2: usize) -> Complex64 {
        self.0.amplitude(n1, n2)
    }

    fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    fn __repr__(&self) -> String {
        format!("TwoModeState(truncation={})", self.0.truncation())
    }
}

#[pyclass(name = "PhotonDistribution", frozen)]
struct PyPhotonDistribution(fockspace::PhotonDistribution);

#[pymethods]
impl PyPhotonDistribution {
    #[getter]
    fn truncation(&self) -> usize {
        self.0.truncation()
    }

    fn joint(&self, n1: usize, n2: usize) -> f64 {
        self.0.joint(n1, n2)
    }

    /// `(n1, n2, p)` triples.
    fn joint_entries(&self) -> Vec<(usize, usize, f64)> {
        self.0.iter_joint().collect()
    }

    fn marginal_total(&self) -> Vec<f64> {
        self.0.marginal_total().to_vec()
    }

    fn marginal_a(&self) -> Vec<f64> {
        self.0.mode_marginal(Mode::A)
    }

    fn marginal_b(&self) -> Vec<f64> {
        self.0.mode_marginal(Mode::B)
    }

    fn off_diagonal_mass(&self) -> f64 {
        self.0.off_diagonal_mass()
    }

    fn to_json(&self) -> PyResult<String> {
        to_json_string(&self.0).map_err(py_err)
    }
}

#[pyclass(name = "ComplexField", frozen)]
struct PyComplexField(quadfield::ComplexField);

#[pymethods]
impl PyComplexField {
    /// Row-major samples on `[-extent, extent]^2`, `x` varying fastest.
    #[new]
    fn new(extent: f64, resolution: usize, values: Vec<Complex64>) -> PyResult<Self> {
        let grid = GridSpec::new(extent, resolution).map_err(py_err)?;
        quadfield::ComplexField::from_values(grid, values, Provenance::Synthetic)
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn extent(&self) -> f64 {
        self.0.grid().extent()
    }

    #[getter]
    fn resolution(&self) -> usize {
        self.0.grid().resolution()
    }

    fn coords(&self) -> Vec<f64> {
        self.0.grid().coords()
    }

    fn values(&self) -> Vec<Complex64> {
        self.0.values().to_vec()
    }

    fn amplitude(&self) -> Vec<f64> {
        quadfield::amplitude_map(&self.0)
    }

    fn phase(&self) -> Vec<f64> {
        quadfield::phase_map(&self.0).values().to_vec()
    }

    fn grid_norm_sqr(&self) -> f64 {
        self.0.grid_norm_sqr()
    }
}

#[pyfunction]
fn make_squeezed_input(cfg: &PySqueezeConfig) -> PyTwoModeState {
    PyTwoModeState(fockspace::make_squeezed_input(&cfg.0))
}

#[pyfunction]
fn apply_rotation(state: &PyTwoModeState, phi: f64) -> PyResult<PyTwoModeState> {
    modeconverter::apply_rotation(&state.0, phi).map(PyTwoModeState).map_err(py_err)
}

#[pyfunction]
fn joint_distribution(state: &PyTwoModeState) -> PyResult<PyPhotonDistribution> {
    fockspace::joint_distribution(&state.0).map(PyPhotonDistribution).map_err(py_err)
}

#[pyfunction]
fn diagonal_weight(state: &PyTwoModeState) -> f64 {
    fockspace::diagonal_weight(&state.0)
}

/// Returns `None` when the mean photon number is zero.
#[pyfunction]
fn mandel_q(dist: Vec<f64>) -> Option<f64> {
    fockspace::mandel_q(&dist).ok()
}

/// Audit report as a JSON document.
#[pyfunction]
fn run_audit(cfg: &PySqueezeConfig) -> PyResult<String> {
    let report = modeconverter::run_audit(&cfg.0).map_err(py_err)?;
    to_json_string(&report).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (state, extent = 6.0, resolution = 512))]
fn fock_field(state: &PyTwoModeState, extent: f64, resolution: usize) -> PyResult<PyComplexField> {
    let grid = GridSpec::new(extent, resolution).map_err(py_err)?;
    quadfield::eval_fock_field(&state.0, &grid).map(PyComplexField).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (cfg, extent = 6.0, resolution = 512, odd_n = "floor-residual", radial = "bare"))]
fn lg_field(cfg: &PySqueezeConfig, extent: f64, resolution: usize, odd_n: &str, radial: &str) -> PyResult<PyComplexField> {
    let odd_n = match odd_n {
        "floor-residual" => OddNReading::FloorResidual,
        "half-integer" => OddNReading::HalfInteger,
        other => return Err(PyValueError::new_err(format!("unknown odd_n reading {other:?}"))),
    };
    let radial = match radial {
        "bare" => RadialForm::Bare,
        "standard" => RadialForm::Standard,
        other => return Err(PyValueError::new_err(format!("unknown radial form {other:?}"))),
    };
    let grid = GridSpec::new(extent, resolution).map_err(py_err)?;
    quadfield::eval_lg_superposition(&cfg.0, &grid, LgOptions { odd_n, radial })
        .map(PyComplexField)
        .map_err(py_err)
}

/// Vortex report as a JSON document.
#[pyfunction]
#[pyo3(signature = (field, amplitude_floor = vortexdetect::DEFAULT_AMPLITUDE_FLOOR, merge_radius = vortexdetect::DEFAULT_MERGE_RADIUS))]
fn detect_vortices(field: &PyComplexField, amplitude_floor: f64, merge_radius: f64) -> PyResult<String> {
    let params = DetectionParams::new(amplitude_floor, merge_radius).map_err(py_err)?;
    let report = vortexdetect::detect_vortices(&field.0, &params).map_err(py_err)?;
    to_json_string(&report).map_err(py_err)
}

#[pymodule]
fn pyquadvortex(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySqueezeConfig>()?;
    m.add_class::<PyTwoModeState>()?;
    m.add_class::<PyPhotonDistribution>()?;
    m.add_class::<PyComplexField>()?;
    m.add_function(wrap_pyfunction!(make_squeezed_input, m)?)?;
    m.add_function(wrap_pyfunction!(apply_rotation, m)?)?;
    m.add_function(wrap_pyfunction!(joint_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(diagonal_weight, m)?)?;
    m.add_function(wrap_pyfunction!(mandel_q, m)?)?;
    m.add_function(wrap_pyfunction!(run_audit, m)?)?;
    m.add_function(wrap_pyfunction!(fock_field, m)?)?;
    m.add_function(wrap_pyfunction!(lg_field, m)?)?;
    m.add_function(wrap_pyfunction!(detect_vortices, m)?)?;
    Ok(())
}
