//! Python module `centralspin`.

use std::path::PathBuf;

use centralspin_core::experiments::{self, FitForm, FitReport, RunConfig};
use centralspin_core::metrology::{self, SensingKind};
use centralspin_core::models::{sample_couplings, CouplingProfile, ModelSpec};
use centralspin_core::state::{probe_state, ProbeKind};
use centralspin_core::{BasisKind, Error, HilbertSpace};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(centralspin, CapacityError, PyException);
create_exception!(centralspin, ConvergenceError, PyException);

fn py_err(e: Error) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        3 => CapacityError::new_err(e.to_string()),
        4 => ConvergenceError::new_err(e.to_string()),
        _ => PyException::new_err(e.to_string()),
    }
}

fn sensing_kind(name: &str) -> PyResult<SensingKind> {
    match name {
        "local" | "local_epf" => Ok(SensingKind::LocalEpf),
        "global" | "global_qfi" => Ok(SensingKind::GlobalQfi),
        other => Err(PyValueError::new_err(format!("unknown sensing rule `{other}`"))),
    }
}

fn probe_kind(name: &str) -> PyResult<ProbeKind> {
    match name {
        "ring_x_polarized" | "x" => Ok(ProbeKind::RingXPolarized),
        "ring_z_stretched" | "z" => Ok(ProbeKind::RingZStretched),
        other => Err(PyValueError::new_err(format!("unknown probe `{other}`"))),
    }
}

/// A central-spin Hamiltonian family at fixed field.
#[pyclass(name = "Model", frozen)]
#[derive(Clone)]
struct PyModel {
    spec: ModelSpec,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    #[pyo3(signature = (n_ring, h=1.0, a=1.0, j=0.0))]
    fn ising_ring(n_ring: usize, h: f64, a: f64, j: f64) -> PyResult<Self> {
        ModelSpec::ising_ring(j, h, a, n_ring).map(|spec| Self { spec }).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (n_ring, h=1.0, a=1.0))]
    fn no_zeeman(n_ring: usize, h: f64, a: f64) -> PyResult<Self> {
        ModelSpec::no_zeeman(h, a, n_ring).map(|spec| Self { spec }).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (n_ring, h=1.0, a=1.0))]
    fn zzxx(n_ring: usize, h: f64, a: f64) -> PyResult<Self> {
        ModelSpec::zzxx(h, a, n_ring).map(|spec| Self { spec }).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (n_ring, h=1.0, a=1.0, delta=0.0))]
    fn xxz(n_ring: usize, h: f64, a: f64, delta: f64) -> PyResult<Self> {
        ModelSpec::xxz(h, a, delta, n_ring).map(|spec| Self { spec }).map_err(py_err)
    }

    /// Explicit couplings, or Gaussian-envelope couplings of mean 1 drawn from `seed`.
    #[staticmethod]
    #[pyo3(signature = (couplings=None, n_ring=None, seed=0, h=1.0))]
    fn inhomogeneous(couplings: Option<Vec<f64>>, n_ring: Option<usize>, seed: u64, h: f64) -> PyResult<Self> {
        let couplings = match (couplings, n_ring) {
            (Some(c), _) => c,
            (None, Some(n)) => sample_couplings(&CouplingProfile::default_gaussian(seed), n, 1.0).map_err(py_err)?,
            (None, None) => return Err(PyValueError::new_err("give couplings or n_ring")),
        };
        ModelSpec::inhomogeneous(h, couplings).map(|spec| Self { spec }).map_err(py_err)
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.spec.name()
    }

    #[getter]
    fn n_ring(&self) -> usize {
        self.spec.n_ring()
    }

    #[getter]
    fn field(&self) -> f64 {
        self.spec.field()
    }

    #[getter]
    fn is_collective(&self) -> bool {
        self.spec.is_collective()
    }

    /// Global QFI with respect to the field, by finite differences.
    #[pyo3(signature = (t, probe="ring_z_stretched", collective=None))]
    fn qfi(&self, t: f64, probe: &str, collective: Option<bool>) -> PyResult<f64> {
        let (space, psi) = self.setup(probe, collective)?;
        let h = self.spec.field();
        metrology::qfi_pure_fd(&self.spec, space, &psi, t, h, metrology::default_step(h), None)
            .map(|f| f.value)
            .map_err(py_err)
    }

    /// QFI of the central spin's reduced state, by finite differences.
    #[pyo3(signature = (t, probe="ring_x_polarized", collective=None))]
    fn local_qfi(&self, t: f64, probe: &str, collective: Option<bool>) -> PyResult<f64> {
        let (space, psi) = self.setup(probe, collective)?;
        let h = self.spec.field();
        metrology::local_qfi_fd(&self.spec, space, &psi, t, h, metrology::default_step(h), None)
            .map(|f| f.value)
            .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Model({}, n_ring={}, h={})", self.spec.name(), self.spec.n_ring(), self.spec.field())
    }
}

impl PyModel {
    fn setup(
        &self,
        probe: &str,
        collective: Option<bool>,
    ) -> PyResult<(HilbertSpace, centralspin_core::StateVector)> {
        let collective = collective.unwrap_or(self.spec.is_collective());
        let kind = if collective {
            BasisKind::CollectiveSector
        } else {
            BasisKind::FullProduct
        };
        let space = HilbertSpace::new(kind, self.spec.n_ring()).map_err(py_err)?;
        let psi = probe_state(space, probe_kind(probe)?).map_err(py_err)?;
        Ok((space, psi))
    }
}

#[pyfunction]
fn precession_frequency(a: f64, h: f64) -> PyResult<f64> {
    metrology::precession_frequency(a, h).map_err(py_err)
}

/// `pi / Omega` for "local", `2 pi / Omega` for "global".
#[pyfunction]
#[pyo3(signature = (a, h, rule="global"))]
fn sensing_time(a: f64, h: f64, rule: &str) -> PyResult<f64> {
    metrology::sensing_time(a, h, sensing_kind(rule)?).map_err(py_err)
}

/// `(alpha, beta, gamma)` of the field generator.
#[pyfunction]
fn generator_coeffs(a: f64, h: f64, t: f64) -> PyResult<(f64, f64, f64)> {
    let c = metrology::generator_coeffs_analytic(a, h, t).map_err(py_err)?;
    Ok((c.alpha, c.beta, c.gamma))
}

#[pyfunction]
fn qfi_analytic(a: f64, h: f64, n_ring: usize, t: f64) -> PyResult<f64> {
    metrology::qfi_stretched_probe(a, h, n_ring, t).map_err(py_err)
}

#[pyfunction]
fn qfi_analytic_t0(a: f64, h: f64, n_ring: usize) -> f64 {
    metrology::qfi_analytic_t0(a, h, n_ring)
}

#[pyfunction]
fn local_qfi_analytic(a: f64, h: f64, n_ring: usize) -> PyResult<f64> {
    metrology::local_qfi_analytic(a, h, n_ring).map_err(py_err)
}

/// `(F_max, theta, phi)` for the optimal product-superposition probe.
#[pyfunction]
fn fmax(a: f64, h: f64, n_ring: usize, t: f64) -> PyResult<(f64, f64, f64)> {
    let c = metrology::generator_coeffs_analytic(a, h, t).map_err(py_err)?;
    let (f, p) = metrology::fmax_and_optimal_probe(&c, n_ring).map_err(py_err)?;
    Ok((f, p.theta, p.phi))
}

#[pyfunction]
fn sql_reference(n_ring: usize, t: f64) -> f64 {
    metrology::sql_reference(n_ring, t)
}

fn outcome_dict<'py>(py: Python<'py>, o: &experiments::RunOutcome) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("name", &o.config.name)?;
    d.set_item("csv", o.curve.to_csv())?;
    let rows: Vec<(f64, &str, Option<f64>)> = o
        .curve
        .rows
        .iter()
        .map(|r| (r.sweep_value, r.method.as_str(), r.value.number()))
        .collect();
    d.set_item("rows", rows)?;
    d.set_item("failures", o.failures.iter().map(ToString::to_string).collect::<Vec<_>>())?;
    Ok(d)
}

/// Runs a JSON run configuration; writes files when `out` is given.
#[pyfunction]
#[pyo3(signature = (config_json, out=None))]
fn run_config<'py>(py: Python<'py>, config_json: &str, out: Option<PathBuf>) -> PyResult<Bound<'py, PyDict>> {
    let cfg = RunConfig::from_json(config_json).map_err(py_err)?;
    let outcome = py.allow_threads(|| experiments::run_config(&cfg)).map_err(py_err)?;
    if let Some(dir) = out {
        experiments::write_outputs(&dir, None, std::slice::from_ref(&outcome)).map_err(py_err)?;
    }
    outcome_dict(py, &outcome)
}

#[pyfunction]
#[pyo3(signature = (name, out, threads=1))]
fn run_preset<'py>(py: Python<'py>, name: &str, out: PathBuf, threads: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let outcomes = py
        .allow_threads(|| experiments::run_preset(name, &out, threads))
        .map_err(py_err)?;
    outcomes.iter().map(|o| outcome_dict(py, o)).collect()
}

/// Fits `power_law` or `quad` and returns the report as a dict.
#[pyfunction]
fn fit_scaling<'py>(py: Python<'py>, ns: Vec<f64>, values: Vec<f64>, form: &str) -> PyResult<Bound<'py, PyDict>> {
    let form: FitForm = form.parse().map_err(py_err)?;
    let d = PyDict::new(py);
    match experiments::fit_scaling(&ns, &values, form).map_err(py_err)? {
        FitReport::PowerLaw {
            slope,
            prefactor,
            residual,
            points,
        } => {
            d.set_item("form", "power_law")?;
            d.set_item("slope", slope)?;
            d.set_item("prefactor", prefactor)?;
            d.set_item("residual", residual)?;
            d.set_item("points", points)?;
        }
        FitReport::LinearPlusQuadratic {
            a,
            b,
            covariance,
            residual,
            points,
        } => {
            d.set_item("form", "linear_plus_quadratic")?;
            d.set_item("a", a)?;
            d.set_item("b", b)?;
            d.set_item("covariance", covariance.map(|r| r.to_vec()).to_vec())?;
            d.set_item("residual", residual)?;
            d.set_item("points", points)?;
        }
    }
    Ok(d)
}

#[pymodule]
fn centralspin(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", experiments::TOOL_VERSION)?;
    m.add("CapacityError", m.py().get_type::<CapacityError>())?;
    m.add("ConvergenceError", m.py().get_type::<ConvergenceError>())?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(precession_frequency, m)?)?;
    m.add_function(wrap_pyfunction!(sensing_time, m)?)?;
    m.add_function(wrap_pyfunction!(generator_coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(qfi_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(qfi_analytic_t0, m)?)?;
    m.add_function(wrap_pyfunction!(local_qfi_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(fmax, m)?)?;
    m.add_function(wrap_pyfunction!(sql_reference, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_preset, m)?)?;
    m.add_function(wrap_pyfunction!(fit_scaling, m)?)?;
    Ok(())
}
