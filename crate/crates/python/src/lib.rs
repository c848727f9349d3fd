//! Python bindings: estimators, the system simulator, closed-form predictors
//! and the Monte Carlo tracking experiment.

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mrls::channel::{ChannelSpec, Impulse, InputKind};
use mrls::estimators::FilterParams;
use mrls::harness::{self, RunConfig};
use mrls::numerics::CVec;
use mrls::theory::{self, DerivedConstants, Implementation};
use mrls::MrlsError;

fn py_err(e: MrlsError) -> PyErr {
    match e {
        MrlsError::Io { .. } => PyIOError::new_err(e.to_string()),
        MrlsError::NumericalBreakdown { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn filter_params(
    taps: usize,
    lambda: Option<f64>,
    delta: f64,
    z: f64,
    layers_max: usize,
    noise_variance: f64,
) -> PyResult<FilterParams> {
    let mut p = FilterParams::with_taps(taps, noise_variance);
    if let Some(l) = lambda {
        p.lambda = l;
    }
    p.delta = delta;
    p.z = z;
    p.layers_max = layers_max;
    p.validate().map_err(py_err)?;
    Ok(p)
}

fn to_cvec(x: Vec<Complex64>, taps: usize) -> PyResult<CVec> {
    if x.len() != taps {
        return Err(py_err(MrlsError::Dimension {
            expected: taps,
            found: x.len(),
        }));
    }
    Ok(CVec::from_vec(x))
}

/// Classic exponentially weighted RLS.
#[pyclass(name = "Rls")]
struct PyRls {
    inner: mrls::estimators::RlsEstimator,
    taps: usize,
}

#[pymethods]
impl PyRls {
    #[new]
    #[pyo3(signature = (taps, lam=None, delta=0.01))]
    fn new(taps: usize, lam: Option<f64>, delta: f64) -> PyResult<Self> {
        let p = filter_params(taps, lam, delta, 1.0 / 32.0, 1, 0.0)?;
        Ok(PyRls {
            inner: mrls::estimators::RlsEstimator::new(&p).map_err(py_err)?,
            taps,
        })
    }

    /// Consumes one regressor and desired sample; returns the a priori error.
    fn step(&mut self, x: Vec<Complex64>, d: Complex64) -> PyResult<Complex64> {
        let x = to_cvec(x, self.taps)?;
        self.inner.step(&x, d).map_err(py_err)
    }

    fn estimate(&self) -> Vec<Complex64> {
        self.inner.estimate().iter().copied().collect()
    }
}

/// Multi-layered RLS with online layer-count selection.
#[pyclass(name = "MRls")]
struct PyMRls {
    inner: mrls::estimators::MRlsEstimator,
    taps: usize,
}

#[pymethods]
impl PyMRls {
    #[new]
    #[pyo3(signature = (taps, lam=None, delta=0.01, z=1.0/32.0, layers_max=5, noise_variance=0.01))]
    fn new(
        taps: usize,
        lam: Option<f64>,
        delta: f64,
        z: f64,
        layers_max: usize,
        noise_variance: f64,
    ) -> PyResult<Self> {
        let p = filter_params(taps, lam, delta, z, layers_max, noise_variance)?;
        Ok(PyMRls {
            inner: mrls::estimators::MRlsEstimator::new(&p).map_err(py_err)?,
            taps,
        })
    }

    /// Consumes one sample; returns the selected layer count.
    fn step(&mut self, x: Vec<Complex64>, d: Complex64) -> PyResult<usize> {
        let x = to_cvec(x, self.taps)?;
        self.inner.step(&x, d).map_err(py_err)
    }

    fn estimate(&self) -> Vec<Complex64> {
        self.inner.estimate().iter().copied().collect()
    }

    #[getter]
    fn l_opt(&self) -> usize {
        self.inner.l_opt()
    }

    /// Per-layer estimates `ĥ_(l)`.
    fn layer_estimates(&self) -> Vec<Vec<Complex64>> {
        self.inner
            .layers()
            .iter()
            .map(|l| l.h_hat.iter().copied().collect())
            .collect()
    }

    fn residuals(&self) -> Vec<Complex64> {
        self.inner.residuals().collect()
    }

    fn pis(&self) -> Vec<f64> {
        self.inner.pis()
    }

    fn offsets(&self) -> Vec<f64> {
        self.inner.offsets().to_vec()
    }
}

/// Time-varying channel with input and noise; yields `(h, x, d)` per sample.
#[pyclass(name = "SystemSimulator")]
struct PySystemSimulator {
    inner: mrls::channel::SystemSimulator,
}

#[pymethods]
impl PySystemSimulator {
    #[new]
    #[pyo3(signature = (taps, coherence, snr_db=20.0, seed=1, pdp_decay=0.1, input="bpsk", impulse_at=None, impulse_gain=-1.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        taps: usize,
        coherence: f64,
        snr_db: f64,
        seed: u64,
        pdp_decay: f64,
        input: &str,
        impulse_at: Option<usize>,
        impulse_gain: f64,
    ) -> PyResult<Self> {
        let mut spec = ChannelSpec::new(
            taps,
            coherence,
            pdp_decay,
            harness::noise_variance_for_snr(snr_db),
        )
        .map_err(py_err)?;
        spec.input = match input {
            "bpsk" => InputKind::Bpsk,
            "gauss" => InputKind::Gauss,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown input kind {other:?}"
                )))
            }
        };
        spec.impulse = impulse_at.map(|time| Impulse {
            time,
            gain: impulse_gain,
        });
        Ok(PySystemSimulator {
            inner: mrls::channel::SystemSimulator::new(&spec, seed).map_err(py_err)?,
        })
    }

    #[allow(clippy::type_complexity)]
    fn next(&mut self) -> (Vec<Complex64>, Vec<Complex64>, Complex64) {
        let obs = self.inner.next_observation();
        (
            obs.h.iter().copied().collect(),
            obs.x.iter().copied().collect(),
            obs.d,
        )
    }
}

#[pyfunction]
fn derived_constants<'py>(py: Python<'py>, taps: usize, lam: f64) -> PyResult<Bound<'py, PyDict>> {
    let c = DerivedConstants::new(taps, lam);
    let d = PyDict::new(py);
    d.set_item("epsilon", c.epsilon)?;
    d.set_item("rho", c.rho)?;
    d.set_item("psi", c.psi)?;
    d.set_item("g", c.g)?;
    Ok(d)
}

/// Predicted steady-state RLS MSE.
#[pyfunction]
fn rls_mse(taps: usize, lam: f64, coherence: f64, noise_variance: f64) -> PyResult<f64> {
    let p = filter_params(taps, Some(lam), 0.01, 1.0 / 32.0, 1, noise_variance)?;
    theory::rls_mse(&p, coherence).map_err(py_err)
}

/// Predicted m-RLS MSE for the given per-layer coherence lengths.
#[pyfunction]
fn mrls_mse_predict(
    taps: usize,
    lam: f64,
    coherences: Vec<f64>,
    noise_variance: f64,
) -> PyResult<f64> {
    let p = filter_params(
        taps,
        Some(lam),
        0.01,
        1.0 / 32.0,
        coherences.len().max(1),
        noise_variance,
    )?;
    theory::mrls_mse_predict(&p, &coherences).map_err(py_err)
}

/// Coherence lengths of the effective IRs of layers 2..=layers+1.
#[pyfunction]
#[pyo3(signature = (coherence, taps, lam, layers=5, max_lag=None))]
fn coherence_chain(
    coherence: usize,
    taps: usize,
    lam: f64,
    layers: usize,
    max_lag: Option<usize>,
) -> PyResult<Vec<usize>> {
    let c = DerivedConstants::new(taps, lam);
    theory::coherence_chain(coherence, &c, layers, max_lag.unwrap_or(8 * coherence)).map_err(py_err)
}

#[pyfunction]
fn coherence_recursion(coherence: usize, taps: usize, lam: f64) -> usize {
    theory::coherence_recursion(coherence, &DerivedConstants::new(taps, lam))
}

#[pyfunction]
#[pyo3(signature = (taps, layers_max, l_opt, implementation="classic", dcd_iterations=4))]
fn complexity_counts<'py>(
    py: Python<'py>,
    taps: u64,
    layers_max: u64,
    l_opt: u64,
    implementation: &str,
    dcd_iterations: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let imp = match implementation {
        "classic" => Implementation::Classic,
        "dcd" => Implementation::Dcd,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown implementation {other:?}"
            )))
        }
    };
    if l_opt < 1 || l_opt > layers_max {
        return Err(PyValueError::new_err("need 1 <= l_opt <= layers_max"));
    }
    let c = theory::complexity_counts(taps, layers_max, l_opt, imp, dcd_iterations);
    let d = PyDict::new(py);
    d.set_item("mult", c.mult)?;
    d.set_item("add", c.add)?;
    d.set_item("div", c.div)?;
    Ok(d)
}

/// Round-averaged RLS and m-RLS tracking run; MSE values are linear.
#[pyfunction]
#[pyo3(signature = (taps=50, coherence=200.0, snr_db=20.0, rounds=200, samples=3000, seed=1, layers_max=5))]
#[allow(clippy::too_many_arguments)]
fn run_tracking<'py>(
    py: Python<'py>,
    taps: usize,
    coherence: f64,
    snr_db: f64,
    rounds: usize,
    samples: usize,
    seed: u64,
    layers_max: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = RunConfig::standard();
    cfg.set_taps(taps).map_err(py_err)?;
    cfg.channel.coherence = coherence;
    cfg.set_snr_db(snr_db);
    cfg.rounds = rounds;
    cfg.n_samples = samples;
    cfg.base_seed = seed;
    cfg.filter.layers_max = layers_max;
    let s = py.detach(|| harness::run_tracking(&cfg)).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("mse_rls", s.mse_rls)?;
    d.set_item("mse_mrls", s.mse_mrls)?;
    d.set_item("lopt_bar", s.lopt_bar)?;
    d.set_item("steady_mse_rls_db", s.steady.mse_rls_db)?;
    d.set_item("steady_mse_mrls_db", s.steady.mse_mrls_db)?;
    d.set_item("steady_lopt_bar", s.steady.lopt_bar)?;
    d.set_item("rounds_used", s.rounds_used)?;
    Ok(d)
}

#[pymodule]
fn pymrls(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRls>()?;
    m.add_class::<PyMRls>()?;
    m.add_class::<PySystemSimulator>()?;
    m.add_function(wrap_pyfunction!(derived_constants, m)?)?;
    m.add_function(wrap_pyfunction!(rls_mse, m)?)?;
    m.add_function(wrap_pyfunction!(mrls_mse_predict, m)?)?;
    m.add_function(wrap_pyfunction!(coherence_chain, m)?)?;
    m.add_function(wrap_pyfunction!(coherence_recursion, m)?)?;
    m.add_function(wrap_pyfunction!(complexity_counts, m)?)?;
    m.add_function(wrap_pyfunction!(run_tracking, m)?)?;
    Ok(())
}
