use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ::bound_tunnel::classical::{self, CritOptions, Nu0Options};
use ::bound_tunnel::exponent::{self as lab, ScanPolicy};
use ::bound_tunnel::quantum::{self, ChannelBasis, Incidence, LatticeSpec};
use ::bound_tunnel::semiclassical::{self as sc, ContourSpec, F0Options};
use ::bound_tunnel::{BarrierSpec, Error};

fn py_err(e: Error) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Model parameters: oscillator frequency ω, coupling g and barrier family.
#[pyclass(name = "ModelParams", from_py_object)]
#[derive(Clone)]
struct PyModelParams {
    inner: ::bound_tunnel::ModelParams,
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (omega=0.5, g=0.2, barrier="gaussian", cutoff=30.0))]
    fn new(omega: f64, g: f64, barrier: &str, cutoff: f64) -> PyResult<Self> {
        let b = match barrier {
            "gaussian" => BarrierSpec::Gaussian { cutoff },
            "free" => BarrierSpec::Free,
            other => return Err(PyValueError::new_err(format!("unknown barrier family {other:?}"))),
        };
        let inner = ::bound_tunnel::ModelParams::new(omega, g, b).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    #[getter]
    fn g(&self) -> f64 {
        self.inner.coupling_g
    }

    fn __repr__(&self) -> String {
        format!("ModelParams(omega={}, g={}, barrier={:?})", self.inner.omega, self.inner.coupling_g, self.inner.barrier)
    }
}

#[pyclass(name = "ScatteringResult", get_all, skip_from_py_object)]
struct PyScattering {
    energy: f64,
    epsilon: f64,
    t_total: f64,
    r_total: f64,
    transmission: Vec<f64>,
    reflection: Vec<f64>,
    unitarity_defect: f64,
}

#[pyclass(name = "FitResult", get_all, skip_from_py_object)]
struct PyFit {
    epsilon: f64,
    f0: f64,
    f0_err: f64,
    intercept: f64,
    r2: f64,
    points: usize,
}

#[pyclass(name = "F0", get_all, skip_from_py_object)]
struct PyF0 {
    epsilon: f64,
    f0: f64,
    linear: f64,
    quadratic: f64,
    error: f64,
    nu_min: f64,
}

/// ν₀ from the δ → 0 extrapolation of sphaleron perturbations.
#[pyfunction]
fn find_nu0(params: &PyModelParams) -> PyResult<f64> {
    classical::find_nu0(&params.inner, &Nu0Options::default()).map(|r| r.value).map_err(py_err)
}

/// ε_crit for transmission from the classical oscillator ground state.
#[pyfunction]
fn find_epsilon_crit(params: &PyModelParams) -> PyResult<f64> {
    classical::find_epsilon_crit(&params.inner, &CritOptions::default()).map(|r| r.value).map_err(py_err)
}

/// V_{nn′}(X) in the oscillator basis n, n′ ≤ n0, as nested lists.
#[pyfunction]
fn potential_matrix(params: &PyModelParams, x: f64, n0: usize) -> Vec<Vec<f64>> {
    quantum::potential_matrix(&params.inner, x, n0).outer_iter().map(|r| r.to_vec()).collect()
}

/// Multichannel transmission at unscaled energy E.
#[pyfunction]
#[pyo3(signature = (params, energy, n0, a, n_x, n_in=0))]
fn solve_scattering(py: Python<'_>, params: &PyModelParams, energy: f64, n0: usize, a: f64, n_x: usize, n_in: usize) -> PyResult<PyScattering> {
    let p = params.inner;
    let lattice = LatticeSpec::new(a, n_x).map_err(py_err)?;
    let r = py
        .detach(|| quantum::solve_scattering(&p, energy, n_in, &lattice, &ChannelBasis::new(n0, p.omega), Incidence::Left))
        .map_err(py_err)?;
    Ok(PyScattering {
        energy: r.energy,
        epsilon: r.epsilon(),
        t_total: r.t_total,
        r_total: r.r_total,
        transmission: r.transmission,
        reflection: r.reflection,
        unitarity_defect: r.unitarity_defect,
    })
}

/// ln T₀ for each 1/g² at fixed ε with the automatic lattice/basis policy;
/// points outside the policy come back as NaN.
#[pyfunction]
fn scan_g(py: Python<'_>, params: &PyModelParams, epsilon: f64, inv_g2: Vec<f64>) -> PyResult<Vec<f64>> {
    let p = params.inner;
    let gs: Vec<f64> = inv_g2.iter().map(|v| 1.0 / v.sqrt()).collect();
    let s = py.detach(|| lab::scan_g(&p, epsilon, &gs, &ScanPolicy::default())).map_err(py_err)?;
    Ok(s.points.iter().map(|q| if q.usable() { q.ln_t0 } else { f64::NAN }).collect())
}

/// OLS of ln T₀ against 1/g².
#[pyfunction]
fn fit_exponent(epsilon: f64, inv_g2: Vec<f64>, ln_t0: Vec<f64>) -> PyResult<PyFit> {
    if inv_g2.len() != ln_t0.len() {
        return Err(PyValueError::new_err("inv_g2 and ln_t0 differ in length"));
    }
    let points = inv_g2
        .iter()
        .zip(&ln_t0)
        .map(|(&x, &y)| lab::ScanPoint {
            g: 1.0 / x.sqrt(),
            inv_g2: x,
            energy: epsilon * x,
            t0: y.exp(),
            ln_t0: y,
            transmission: Vec::new(),
            r_total: f64::NAN,
            unitarity_defect: 0.0,
            n0: 0,
            a: f64::NAN,
            n_x: 0,
            basis_change: None,
            excluded: None,
        })
        .collect();
    let f = lab::fit_exponent(&lab::ScanSeries { epsilon, points }).map_err(py_err)?;
    Ok(PyFit { epsilon, f0: f.f0, f0_err: f.f0_err, intercept: f.intercept, r2: f.r2, points: f.points })
}

/// Semiclassical F₀(ε) by continuation from the sphaleron and ν → 0 extrapolation.
#[pyfunction]
fn semiclassical_f0(py: Python<'_>, params: &PyModelParams, epsilons: Vec<f64>) -> PyResult<Vec<PyF0>> {
    let p = params.inner;
    let out = py.detach(|| sc::f0_at_energies(&p, &ContourSpec::default(), &epsilons, &F0Options::default())).map_err(py_err)?;
    out.into_iter()
        .map(|r| {
            let r = r.map_err(py_err)?;
            let x = r.extrapolation;
            Ok(PyF0 { epsilon: r.epsilon, f0: x.f0, linear: x.linear, quadratic: x.quadratic, error: x.error, nu_min: x.nu_min })
        })
        .collect()
}

#[pymodule(name = "bound_tunnel")]
pub fn bound_tunnel_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyScattering>()?;
    m.add_class::<PyFit>()?;
    m.add_class::<PyF0>()?;
    m.add_function(wrap_pyfunction!(find_nu0, m)?)?;
    m.add_function(wrap_pyfunction!(find_epsilon_crit, m)?)?;
    m.add_function(wrap_pyfunction!(potential_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(solve_scattering, m)?)?;
    m.add_function(wrap_pyfunction!(scan_g, m)?)?;
    m.add_function(wrap_pyfunction!(fit_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(semiclassical_f0, m)?)?;
    Ok(())
}
