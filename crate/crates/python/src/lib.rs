//! Python module `dimerlab`: mean-field dynamics, exact spectra and
//! semiclassics of the two-site Bose–Hubbard model.

use ::dimerlab as core;
use core::geometry::{self, CylinderSpec, SpherePoint};
use core::{meanfield, quantum, semiclassics};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(dimerlab, NumericalError, PyException, "A computation failed to converge or diverged.");

fn py_err(e: core::Error) -> PyErr {
    if e.is_domain() {
        PyValueError::new_err(e.to_string())
    } else {
        NumericalError::new_err(format!("{}: {e}", e.code()))
    }
}

type Vec3 = (f64, f64, f64);

fn point(s: Vec3) -> SpherePoint {
    SpherePoint::new(s.0, s.1, s.2)
}

fn tuple(p: &SpherePoint) -> Vec3 {
    (p.x, p.y, p.z)
}

fn cylinder(a: f64, r: f64) -> PyResult<CylinderSpec> {
    CylinderSpec::new(a, r).map_err(py_err)
}

/// Mean-field parameters: bias ε, hopping v, interaction g = cN.
#[pyclass(name = "ModelParams", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyModelParams(meanfield::ModelParams);

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (v, g, epsilon = 0.0))]
    fn new(v: f64, g: f64, epsilon: f64) -> PyResult<Self> {
        meanfield::ModelParams::new(epsilon, v, g).map(Self).map_err(py_err)
    }

    #[getter]
    fn v(&self) -> f64 {
        self.0.v
    }

    #[getter]
    fn g(&self) -> f64 {
        self.0.g
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon
    }

    fn energy(&self, s: Vec3) -> f64 {
        meanfield::energy(&self.0, &point(s))
    }

    fn rhs(&self, s: Vec3) -> Vec3 {
        tuple(&meanfield::bloch_rhs(&self.0, &point(s)))
    }

    fn allowed_energy_range(&self) -> (f64, f64) {
        meanfield::allowed_energy_range(&self.0)
    }

    /// Closed-form period of the orbit at energy `e`.
    fn period(&self, e: f64) -> PyResult<f64> {
        meanfield::period_of_energy(&self.0, e).map_err(py_err)
    }

    /// Period of the orbit through the poles.
    fn pole_orbit_period(&self) -> PyResult<f64> {
        meanfield::pole_orbit_period(&self.0).map_err(py_err)
    }

    /// Stationary states as `(stability, (x, y, z), energy)`.
    fn fixed_points(&self) -> PyResult<Vec<(String, Vec3, f64)>> {
        let set = meanfield::fixed_points(&self.0).map_err(py_err)?;
        Ok(set
            .points
            .iter()
            .map(|f| (format!("{:?}", f.stability).to_lowercase(), tuple(&f.point), f.energy))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("ModelParams(v={}, g={}, epsilon={})", self.0.v, self.0.g, self.0.epsilon)
    }
}

/// Integrated mean-field orbit.
#[pyclass(name = "Trajectory", frozen)]
struct PyTrajectory(meanfield::Trajectory);

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.times.clone()
    }

    #[getter]
    fn states(&self) -> Vec<Vec3> {
        self.0.states.iter().map(tuple).collect()
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.0.energy
    }

    /// First-return time, or None.
    #[getter]
    fn period(&self) -> Option<f64> {
        self.0.period
    }

    #[getter]
    fn z_range(&self) -> (f64, f64) {
        self.0.z_range
    }

    #[getter]
    fn rel_energy_drift(&self) -> f64 {
        self.0.rel_energy_drift()
    }

    #[getter]
    fn max_norm_drift(&self) -> f64 {
        self.0.max_norm_drift
    }

    fn __len__(&self) -> usize {
        self.0.times.len()
    }
}

#[pyfunction]
#[pyo3(signature = (params, s0, t_end, rtol = meanfield::DEFAULT_RTOL))]
fn integrate(py: Python<'_>, params: PyModelParams, s0: Vec3, t_end: f64, rtol: f64) -> PyResult<PyTrajectory> {
    py.detach(|| meanfield::integrate(&params.0, point(s0), t_end, rtol)).map(PyTrajectory).map_err(py_err)
}

/// Curve family name for a cylinder displaced by `a` with radius `r`.
#[pyfunction]
fn classify(a: f64, r: f64) -> PyResult<&'static str> {
    Ok(geometry::classify(cylinder(a, r)?).name())
}

/// Spherical area inside the cylinder.
#[pyfunction]
fn area(a: f64, r: f64) -> PyResult<f64> {
    core::action::area(cylinder(a, r)?).map(|res| res.s_inside).map_err(py_err)
}

/// Points on the intersection curve as `(loop, hemisphere, (x, y, z))`.
#[pyfunction]
#[pyo3(signature = (a, r, samples = 200))]
fn sample_curve(a: f64, r: f64, samples: usize) -> PyResult<Vec<(usize, String, Vec3)>> {
    let pts = geometry::sample_curve(cylinder(a, r)?, samples).map_err(py_err)?;
    Ok(pts.iter().map(|s| (s.loop_index, s.hemisphere.name().to_string(), tuple(&s.point))).collect())
}

fn quantum_params(v: f64, g: Option<f64>, c: Option<f64>, n: usize, epsilon: f64) -> PyResult<quantum::QuantumParams> {
    match (g, c) {
        (Some(g), None) => quantum::QuantumParams::with_g(epsilon, v, g, n),
        (None, Some(c)) => quantum::QuantumParams::new(epsilon, v, c, n),
        _ => return Err(PyValueError::new_err("give exactly one of g or c")),
    }
    .map_err(py_err)
}

/// Exact N-particle eigensystem.
#[pyclass(name = "Spectrum", frozen)]
struct PySpectrum {
    params: quantum::QuantumParams,
    inner: quantum::Spectrum,
}

#[pymethods]
impl PySpectrum {
    #[new]
    #[pyo3(signature = (n, v = 1.0, *, g = None, c = None, epsilon = 0.0))]
    fn new(py: Python<'_>, n: usize, v: f64, g: Option<f64>, c: Option<f64>, epsilon: f64) -> PyResult<Self> {
        let params = quantum_params(v, g, c, n, epsilon)?;
        let inner = py.detach(|| quantum::eigensystem(&quantum::build_hamiltonian(&params))).map_err(py_err)?;
        Ok(Self { params, inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.params.n_particles
    }

    #[getter]
    fn energies(&self) -> Vec<f64> {
        self.inner.energies.clone()
    }

    fn energies_per_particle(&self) -> Vec<f64> {
        self.inner.energies_per_particle()
    }

    /// Eigenvector `i` (ascending energy) in the occupation basis.
    fn eigenvector(&self, i: usize) -> PyResult<Vec<f64>> {
        self.check(i)?;
        Ok(self.inner.eigenvector(i).to_vec())
    }

    fn count_above(&self, e_per_n: f64) -> usize {
        quantum::count_states_above(&self.inner, e_per_n)
    }

    /// Histogram of E/N as `(e_lo, e_hi, count, density)` rows.
    #[pyo3(signature = (n_bins = 30))]
    fn level_density(&self, n_bins: usize) -> PyResult<Vec<(f64, f64, usize, f64)>> {
        let bins = quantum::level_density(&self.inner, n_bins).map_err(py_err)?;
        Ok(bins.iter().map(|b| (b.e_lo, b.e_hi, b.count, b.rho)).collect())
    }

    /// Husimi distribution of eigenstate `i`.
    #[pyo3(signature = (i, n_theta = 200, n_phi = 200))]
    fn husimi(&self, py: Python<'_>, i: usize, n_theta: usize, n_phi: usize) -> PyResult<PyHusimi> {
        self.check(i)?;
        let state = self.inner.state(i);
        py.detach(|| quantum::husimi(&state, n_theta, n_phi)).map(PyHusimi).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.dim()
    }
}

impl PySpectrum {
    fn check(&self, i: usize) -> PyResult<()> {
        if i < self.inner.dim() {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!("state {i} out of range (dimension {})", self.inner.dim())))
        }
    }
}

/// `|⟨θ,φ|ψ⟩|²` on a (θ, φ) grid.
#[pyclass(name = "Husimi", frozen)]
struct PyHusimi(quantum::HusimiGrid);

#[pymethods]
impl PyHusimi {
    #[getter]
    fn thetas(&self) -> Vec<f64> {
        self.0.thetas.clone()
    }

    #[getter]
    fn phis(&self) -> Vec<f64> {
        self.0.phis.clone()
    }

    /// Rows over θ, columns over φ.
    #[getter]
    fn values(&self) -> Vec<Vec<f64>> {
        self.0.values.chunks(self.0.phis.len()).map(<[f64]>::to_vec).collect()
    }

    /// Grid integral with the (N+1)/4π normalization; ≈ 1.
    fn total(&self) -> f64 {
        self.0.total()
    }

    /// `(θ, φ, value)` of the grid maximum.
    fn argmax(&self) -> (f64, f64, f64) {
        let p = self.0.argmax();
        (p.theta, p.phi, p.value)
    }
}

/// Husimi distribution of the spin coherent state at (θ, φ).
#[pyfunction]
#[pyo3(signature = (theta, phi, n, n_theta = 200, n_phi = 200))]
fn coherent_husimi(theta: f64, phi: f64, n: usize, n_theta: usize, n_phi: usize) -> PyResult<PyHusimi> {
    quantum::husimi(&quantum::coherent_state(theta, phi, n), n_theta, n_phi).map(PyHusimi).map_err(py_err)
}

/// Bohr–Sommerfeld levels as `(index, energy, exact, branch)`.
#[pyfunction]
#[pyo3(signature = (n, v = 1.0, *, g = None, c = None))]
fn semiclassical_levels(
    py: Python<'_>,
    n: usize,
    v: f64,
    g: Option<f64>,
    c: Option<f64>,
) -> PyResult<Vec<(usize, f64, f64, &'static str)>> {
    let qp = quantum_params(v, g, c, n, 0.0)?;
    let cmp = py.detach(|| semiclassics::compare_with_exact(&qp)).map_err(py_err)?;
    Ok(cmp.iter().map(|c| (c.level.index, c.level.energy, c.exact, c.level.branch.name())).collect())
}

/// Enclosed action `S(E)` of the symmetric mean-field model.
#[pyfunction(name = "action")]
fn action_of_energy(params: PyModelParams, e: f64) -> PyResult<f64> {
    semiclassics::action_of_energy(&params.0, e).map_err(py_err)
}

#[pymodule]
fn dimerlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PySpectrum>()?;
    m.add_class::<PyHusimi>()?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(area, m)?)?;
    m.add_function(wrap_pyfunction!(sample_curve, m)?)?;
    m.add_function(wrap_pyfunction!(coherent_husimi, m)?)?;
    m.add_function(wrap_pyfunction!(semiclassical_levels, m)?)?;
    m.add_function(wrap_pyfunction!(action_of_energy, m)?)?;
    Ok(())
}
