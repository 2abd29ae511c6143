//! Python bindings for the `cyclic_wcl` crate.

use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cyclic_wcl::harness::{self, Algorithm};
use cyclic_wcl::signals::{self, Pulse, SampleBuffer};
use cyclic_wcl::{cyclo, localize, rng, theory, Point};

fn err(e: cyclic_wcl::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn points(locs: &[(f64, f64)]) -> Vec<Point> {
    locs.iter().map(|&(x, y)| Point::new(x, y)).collect()
}

fn algorithm(name: &str) -> PyResult<Algorithm> {
    Algorithm::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown algorithm '{name}'")))
}

/// Transmitted signal description.
#[pyclass(name = "SignalSpec", module = "cyclic_wcl_py", from_py_object)]
#[derive(Clone)]
pub struct PySignalSpec {
    pub inner: signals::SignalSpec,
}

#[pymethods]
impl PySignalSpec {
    /// Linearly modulated carrier. `rolloff = None` gives a rectangular pulse.
    #[staticmethod]
    #[pyo3(signature = (modulation, symbol_rate, carrier=0.0, rolloff=Some(1.0)))]
    fn single_carrier(modulation: u32, symbol_rate: f64, carrier: f64, rolloff: Option<f64>) -> PyResult<Self> {
        let pulse = match rolloff {
            Some(r) => Pulse::RaisedCosine { rolloff: r },
            None => Pulse::Rectangular,
        };
        let inner = signals::SignalSpec::single_carrier(modulation, symbol_rate, carrier).with_pulse(pulse);
        inner.validate().map_err(err)?;
        Ok(PySignalSpec { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (modulation, subcarriers, spacing, cp, carrier=0.0))]
    fn ofdm(modulation: u32, subcarriers: usize, spacing: f64, cp: f64, carrier: f64) -> PyResult<Self> {
        let inner = signals::SignalSpec::ofdm(modulation, subcarriers, spacing, cp, carrier);
        inner.validate().map_err(err)?;
        Ok(PySignalSpec { inner })
    }

    #[getter]
    fn cyclic_frequency(&self) -> f64 {
        self.inner.cyclic_frequency()
    }

    /// `n` baseband samples at rate `fs`, unit average power.
    fn generate(&self, n: usize, fs: f64, seed: u64) -> PyResult<Vec<Complex64>> {
        let buf = signals::generate(&self.inner, n, fs, &mut rng::seeded(seed)).map_err(err)?;
        Ok(buf.samples)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyfunction]
fn cac(samples: Vec<Complex64>, fs: f64, alpha: f64) -> PyResult<Complex64> {
    Ok(cyclo::cac(&SampleBuffer::new(samples, fs), alpha).map_err(err)?.value)
}

#[pyfunction]
fn ccc(u: Vec<Complex64>, v: Vec<Complex64>, fs: f64, alpha: f64) -> PyResult<Complex64> {
    Ok(cyclo::ccc(&SampleBuffer::new(u, fs), &SampleBuffer::new(v, fs), alpha).map_err(err)?.value)
}

/// Sample FVC of CAC realizations.
#[pyfunction]
fn fvc(values: Vec<Complex64>) -> PyResult<f64> {
    Ok(cyclo::fvc_from_values(&values).map_err(err)?.phi_hat)
}

#[pyfunction]
fn min_samples(fs: f64, alpha_t: f64, alpha_i: f64) -> PyResult<usize> {
    cyclo::min_samples(fs, alpha_t, alpha_i).map_err(err)
}

#[pyfunction]
fn wcl(locs: Vec<(f64, f64)>, powers: Vec<f64>) -> PyResult<(f64, f64)> {
    let e = localize::wcl(&points(&locs), &powers).map_err(err)?;
    Ok((e.x, e.y))
}

#[pyfunction(name = "cyclic_wcl")]
fn cyclic_centroid(locs: Vec<(f64, f64)>, strengths: Vec<f64>) -> PyResult<(f64, f64)> {
    let e = localize::cyclic_wcl(&points(&locs), &strengths).map_err(err)?;
    Ok((e.x, e.y))
}

#[pyfunction]
fn improved_cyclic_wcl(locs: Vec<(f64, f64)>, strengths: Vec<f64>, fvc: Vec<f64>, phi0: f64) -> PyResult<(f64, f64)> {
    let e = localize::improved_cyclic_wcl(&points(&locs), &strengths, &fvc, phi0).map_err(err)?;
    Ok((e.x, e.y))
}

/// Threshold picked by the clustering heuristic.
#[pyfunction]
fn suboptimal_threshold(locs: Vec<(f64, f64)>, strengths: Vec<f64>, fvc: Vec<f64>) -> PyResult<f64> {
    Ok(localize::suboptimal_threshold(&points(&locs), &strengths, &fvc).map_err(err)?.phi0)
}

/// Mean and covariance of the 12 CAC component coordinates.
#[pyclass(name = "ThetaStats", module = "cyclic_wcl_py", from_py_object)]
#[derive(Clone)]
pub struct PyThetaStats {
    pub inner: theory::ThetaStats,
}

#[pymethods]
impl PyThetaStats {
    #[getter]
    fn mean(&self) -> Vec<f64> {
        self.inner.mean.iter().copied().collect()
    }

    #[getter]
    fn cov(&self) -> Vec<Vec<f64>> {
        (0..12).map(|i| (0..12).map(|j| self.inner.cov[(i, j)]).collect()).collect()
    }

    #[getter]
    fn n_samples(&self) -> usize {
        self.inner.n_samples
    }
}

#[pyfunction]
fn theta_moments(st: &PySignalSpec, si: &PySignalSpec, n: usize, fs: f64, noise_var: f64) -> PyResult<PyThetaStats> {
    let inner = theory::theta_moments(&st.inner, &si.inner, n, fs, noise_var).map_err(err)?;
    Ok(PyThetaStats { inner })
}

#[pyfunction]
fn fvc_per_cr(p_t: Vec<f64>, p_i: Vec<f64>, stats: &PyThetaStats) -> PyResult<Vec<f64>> {
    theory::fvc_per_cr(&p_t, &p_i, &stats.inner).map_err(err)
}

/// Theoretical RMSE for the CRs flagged in `selected`. Locations are
/// relative to the target.
#[pyfunction]
fn rmse_theoretical(
    p_t: Vec<f64>,
    p_i: Vec<f64>,
    locs: Vec<(f64, f64)>,
    selected: Vec<bool>,
    stats: &PyThetaStats,
) -> PyResult<f64> {
    let r = theory::rmse_theoretical(&p_t, &p_i, &points(&locs), &selected, &stats.inner).map_err(err)?;
    Ok(r.epsilon)
}

/// Returns `(phi0_opt, eps_opt)`.
#[pyfunction]
fn optimal_threshold(
    p_t: Vec<f64>,
    p_i: Vec<f64>,
    locs: Vec<(f64, f64)>,
    fvc: Vec<f64>,
    stats: &PyThetaStats,
) -> PyResult<(f64, f64)> {
    let c = theory::optimal_threshold(&p_t, &p_i, &points(&locs), &fvc, &stats.inner).map_err(err)?;
    Ok((c.phi0_opt, c.eps_opt))
}

#[pyclass(name = "SweepConfig", module = "cyclic_wcl_py", from_py_object)]
#[derive(Clone)]
pub struct PySweepConfig {
    pub inner: harness::SweepConfig,
}

#[pymethods]
impl PySweepConfig {
    #[new]
    #[pyo3(signature = (text=""))]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PySweepConfig { inner: harness::SweepConfig::parse(text).map_err(err)? })
    }

    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        Ok(PySweepConfig { inner: harness::SweepConfig::from_file(&path).map_err(err)? })
    }

    #[getter]
    fn trials(&self) -> usize {
        self.inner.trials
    }

    #[setter]
    fn set_trials(&mut self, t: usize) {
        self.inner.trials = t;
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.base_seed
    }

    #[setter]
    fn set_seed(&mut self, s: u64) {
        self.inner.base_seed = s;
    }

    #[getter]
    fn theory(&self) -> bool {
        self.inner.theory
    }

    #[setter]
    fn set_theory(&mut self, on: bool) {
        self.inner.theory = on;
    }

    #[getter]
    fn algorithms(&self) -> Vec<&'static str> {
        self.inner.algorithms.iter().map(|a| a.name()).collect()
    }

    #[setter]
    fn set_algorithms(&mut self, names: Vec<String>) -> PyResult<()> {
        self.inner.algorithms = names.iter().map(|n| algorithm(n)).collect::<PyResult<_>>()?;
        Ok(())
    }

    /// Runs the sweep and returns one dict per CSV row.
    fn run<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let cfg = self.inner.clone();
        let result = py.detach(move || harness::run_sweep(&cfg)).map_err(err)?;
        result
            .rows
            .iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("sweep_value", &r.sweep_value)?;
                d.set_item("algorithm", &r.algorithm)?;
                d.set_item("rmse_m", r.rmse_m)?;
                d.set_item("trials", r.trials)?;
                d.set_item("mean_phi0", r.mean_phi0)?;
                d.set_item("seed", r.seed)?;
                Ok(d)
            })
            .collect()
    }

    fn run_csv(&self, py: Python<'_>) -> PyResult<String> {
        let cfg = self.inner.clone();
        let result = py.detach(move || harness::run_sweep(&cfg)).map_err(err)?;
        Ok(harness::to_csv_string(&result))
    }
}

#[pyfunction]
#[pyo3(signature = (algorithm, k, n, m=1, eta=harness::DEFAULT_ETA))]
fn ops_count(algorithm: &str, k: u64, n: u64, m: u64, eta: u64) -> PyResult<u64> {
    Ok(harness::ops_count(self::algorithm(algorithm)?, k, n, m, eta))
}

/// Adds every binding to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySignalSpec>()?;
    m.add_class::<PyThetaStats>()?;
    m.add_class::<PySweepConfig>()?;
    m.add_function(wrap_pyfunction!(cac, m)?)?;
    m.add_function(wrap_pyfunction!(ccc, m)?)?;
    m.add_function(wrap_pyfunction!(fvc, m)?)?;
    m.add_function(wrap_pyfunction!(min_samples, m)?)?;
    m.add_function(wrap_pyfunction!(wcl, m)?)?;
    m.add_function(wrap_pyfunction!(cyclic_centroid, m)?)?;
    m.add_function(wrap_pyfunction!(improved_cyclic_wcl, m)?)?;
    m.add_function(wrap_pyfunction!(suboptimal_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(theta_moments, m)?)?;
    m.add_function(wrap_pyfunction!(fvc_per_cr, m)?)?;
    m.add_function(wrap_pyfunction!(rmse_theoretical, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(ops_count, m)?)?;
    Ok(())
}

#[pymodule]
fn cyclic_wcl_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
