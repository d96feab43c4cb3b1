//! Python bindings for the channel model, optimizers and sweep harness.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use swan_core::baseline::optimize_pass as core_optimize_pass;
use swan_core::harness::{run_sweep as core_run_sweep, ExperimentSpec};
use swan_core::opt_sa::{optimize_sa as core_optimize_sa, refine_ps_tdma_sa, AoOptions};
use swan_core::opt_ss::{optimize_ss as core_optimize_ss, SsOptions};
use swan_core::{rates, Placement, Protocol, Scheme, SwanError, User, UserSet};

fn py_err(e: SwanError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_scheme(s: &str) -> PyResult<Scheme> {
    s.parse().map_err(py_err)
}

/// Users as `(x, y, power_w)` tuples.
fn user_set(users: Vec<(f64, f64, f64)>) -> PyResult<UserSet> {
    let users = users
        .into_iter()
        .map(|(x, y, p)| User::new(x, y, p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(py_err)?;
    UserSet::new(users).map_err(py_err)
}

#[pyclass(name = "SystemConfig", frozen)]
struct PySystemConfig(swan_core::SystemConfig);

#[pymethods]
impl PySystemConfig {
    #[new]
    #[pyo3(signature = (carrier_frequency=28e9, n_eff=1.4, min_spacing=None, height=3.0, kappa=0.0, noise_dbm=-90.0))]
    fn new(
        carrier_frequency: f64,
        n_eff: f64,
        min_spacing: Option<f64>,
        height: f64,
        kappa: f64,
        noise_dbm: f64,
    ) -> PyResult<Self> {
        let spacing = min_spacing.unwrap_or(swan_core::model::SPEED_OF_LIGHT / carrier_frequency / 2.0);
        swan_core::SystemConfig::new(
            carrier_frequency,
            n_eff,
            spacing,
            height,
            kappa,
            swan_core::dbm_to_watts(noise_dbm),
        )
        .map(Self)
        .map_err(py_err)
    }

    #[getter]
    fn wavelength(&self) -> f64 {
        self.0.wavelength()
    }

    #[getter]
    fn guided_wavelength(&self) -> f64 {
        self.0.guided_wavelength()
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.0.eta()
    }

    #[getter]
    fn min_spacing(&self) -> f64 {
        self.0.min_spacing()
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.0.attenuation_db_per_m()
    }

    #[getter]
    fn noise_power(&self) -> f64 {
        self.0.noise_power()
    }

    fn with_attenuation(&self, kappa: f64) -> PyResult<Self> {
        self.0.with_attenuation(kappa).map(Self).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "SystemConfig(f_c={}, n_eff={}, spacing={}, height={}, kappa={}, noise_w={})",
            self.0.carrier_frequency(),
            self.0.n_eff(),
            self.0.min_spacing(),
            self.0.deploy_height(),
            self.0.attenuation_db_per_m(),
            self.0.noise_power()
        )
    }
}

#[pyclass(name = "WaveguideLayout", frozen)]
struct PyWaveguideLayout(swan_core::WaveguideLayout);

#[pymethods]
impl PyWaveguideLayout {
    #[new]
    fn new(num_segments: usize, segment_length: f64, first_feed: f64) -> PyResult<Self> {
        swan_core::WaveguideLayout::new(num_segments, segment_length, first_feed)
            .map(Self)
            .map_err(py_err)
    }

    /// Layout of `num_segments` equal segments centered on the origin.
    #[staticmethod]
    fn centered(num_segments: usize, span: f64) -> PyResult<Self> {
        swan_core::WaveguideLayout::centered(num_segments, span)
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn num_segments(&self) -> usize {
        self.0.num_segments()
    }

    #[getter]
    fn segment_length(&self) -> f64 {
        self.0.segment_length()
    }

    #[getter]
    fn feeds(&self) -> Vec<f64> {
        self.0.feeds()
    }

    #[getter]
    fn span(&self) -> f64 {
        self.0.span()
    }

    fn segment_of(&self, x: f64) -> usize {
        self.0.segment_of(x)
    }

    fn __repr__(&self) -> String {
        format!(
            "WaveguideLayout(num_segments={}, segment_length={}, first_feed={})",
            self.0.num_segments(),
            self.0.segment_length(),
            self.0.first_feed()
        )
    }
}

#[pyclass(name = "RateReport", frozen)]
struct PyRateReport(swan_core::RateReport);

#[pymethods]
impl PyRateReport {
    #[getter]
    fn scheme(&self) -> &'static str {
        self.0.scheme.label()
    }

    #[getter]
    fn protocol(&self) -> &'static str {
        self.0.protocol.label()
    }

    #[getter]
    fn sum_rate(&self) -> f64 {
        self.0.sum_rate
    }

    #[getter]
    fn per_user_snr(&self) -> Vec<f64> {
        self.0.per_user_snr.clone()
    }

    #[getter]
    fn trace(&self) -> Option<Vec<f64>> {
        self.0.trace.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "RateReport(protocol={}, scheme={}, sum_rate={})",
            self.0.protocol, self.0.scheme, self.0.sum_rate
        )
    }
}

fn placement_dict<'py>(py: Python<'py>, p: &Placement) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    match p {
        Placement::Ss { segment, position } => {
            d.set_item("protocol", "ss")?;
            d.set_item("segment", segment)?;
            d.set_item("position", position)?;
        }
        Placement::Sa { positions } => {
            d.set_item("protocol", "sa")?;
            d.set_item("positions", positions.clone())?;
        }
    }
    Ok(d)
}

type Solved<'py> = (PyRateReport, Vec<Bound<'py, PyDict>>);

fn solved<'py>(py: Python<'py>, report: swan_core::RateReport, placements: &[Placement]) -> PyResult<Solved<'py>> {
    let dicts = placements
        .iter()
        .map(|p| placement_dict(py, p))
        .collect::<PyResult<Vec<_>>>()?;
    Ok((PyRateReport(report), dicts))
}

#[pyfunction]
fn dbm_to_watts(dbm: f64) -> f64 {
    swan_core::dbm_to_watts(dbm)
}

#[pyfunction]
fn tdma_sum_rate(snrs: Vec<f64>) -> PyResult<f64> {
    rates::tdma_sum_rate(&snrs).map_err(py_err)
}

#[pyfunction]
fn noma_sum_rate(snrs: Vec<f64>) -> PyResult<f64> {
    rates::noma_sum_rate(&snrs).map_err(py_err)
}

/// Segment-selection placement; returns `(report, placements)`.
#[pyfunction]
#[pyo3(signature = (users, layout, cfg, scheme, grid_points=10_000))]
fn optimize_ss<'py>(
    py: Python<'py>,
    users: Vec<(f64, f64, f64)>,
    layout: &PyWaveguideLayout,
    cfg: &PySystemConfig,
    scheme: &str,
    grid_points: usize,
) -> PyResult<Solved<'py>> {
    let users = user_set(users)?;
    let scheme = parse_scheme(scheme)?;
    let opts = SsOptions {
        grid_points,
        newton: false,
    };
    let sol = py
        .detach(|| core_optimize_ss(&users, &layout.0, &cfg.0, scheme, &opts))
        .map_err(py_err)?;
    solved(py, sol.report, &sol.placements)
}

/// Segment-aggregation placement; returns `(report, placements)`.
#[pyfunction]
#[pyo3(signature = (users, layout, cfg, scheme, grid_points=10_000, tolerance=1e-4, max_iters=50))]
#[allow(clippy::too_many_arguments)]
fn optimize_sa<'py>(
    py: Python<'py>,
    users: Vec<(f64, f64, f64)>,
    layout: &PyWaveguideLayout,
    cfg: &PySystemConfig,
    scheme: &str,
    grid_points: usize,
    tolerance: f64,
    max_iters: usize,
) -> PyResult<Solved<'py>> {
    let users = user_set(users)?;
    let scheme = parse_scheme(scheme)?;
    let opts = AoOptions {
        grid_points,
        tolerance,
        max_iters,
    };
    let sol = py
        .detach(|| core_optimize_sa(&users, &layout.0, &cfg.0, scheme, &opts))
        .map_err(py_err)?;
    solved(py, sol.report, &sol.placements)
}

/// Conventional single-waveguide baseline fed at `feed` and spanning `span`.
#[pyfunction]
#[pyo3(signature = (users, cfg, feed, span, scheme, grid_points=10_000))]
fn optimize_pass<'py>(
    py: Python<'py>,
    users: Vec<(f64, f64, f64)>,
    cfg: &PySystemConfig,
    feed: f64,
    span: f64,
    scheme: &str,
    grid_points: usize,
) -> PyResult<(PyRateReport, Vec<f64>)> {
    let users = user_set(users)?;
    let scheme = parse_scheme(scheme)?;
    let sol = py
        .detach(|| core_optimize_pass(&users, &cfg.0, feed, span, scheme, grid_points))
        .map_err(py_err)?;
    debug_assert_eq!(sol.report.protocol, Protocol::Pass);
    Ok((PyRateReport(sol.report), sol.positions))
}

/// Phase-aligned single-user SA positions, one per segment.
#[pyfunction]
fn refine_sa(user: (f64, f64, f64), layout: &PyWaveguideLayout, cfg: &PySystemConfig) -> PyResult<Vec<f64>> {
    let user = User::new(user.0, user.1, user.2).map_err(py_err)?;
    Ok(refine_ps_tdma_sa(&user, &layout.0, &cfg.0).positions)
}

/// Runs an experiment spec given as JSON text and returns the CSV.
#[pyfunction]
fn run_sweep(py: Python<'_>, spec_json: &str) -> PyResult<String> {
    let spec = ExperimentSpec::from_json(spec_json).map_err(py_err)?;
    py.detach(|| core_run_sweep(&spec))
        .map(|r| r.to_csv())
        .map_err(py_err)
}

#[pymodule]
fn swan_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemConfig>()?;
    m.add_class::<PyWaveguideLayout>()?;
    m.add_class::<PyRateReport>()?;
    m.add_function(wrap_pyfunction!(dbm_to_watts, m)?)?;
    m.add_function(wrap_pyfunction!(tdma_sum_rate, m)?)?;
    m.add_function(wrap_pyfunction!(noma_sum_rate, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_ss, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_sa, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_pass, m)?)?;
    m.add_function(wrap_pyfunction!(refine_sa, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
