//! Python bindings: `import pysgwave`.

use pyo3::exceptions::{PyOverflowError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sgwave::oracles;
use sgwave::pde_sim::{self, SimDomain};

fn to_py(e: sgwave::Error) -> PyErr {
    match e {
        sgwave::Error::Domain(_) | sgwave::Error::PoleProximity { .. } => PyValueError::new_err(e.to_string()),
        sgwave::Error::NoConvergence { .. } => PyRuntimeError::new_err(e.to_string()),
        sgwave::Error::BlowUp { .. } => PyOverflowError::new_err(e.to_string()),
    }
}

/// Damping `alpha > 0` and forcing `gamma`.
#[pyclass(name = "ModelParams", module = "pysgwave", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyModelParams(sgwave::ModelParams);

#[pymethods]
impl PyModelParams {
    #[new]
    fn new(alpha: f64, gamma: f64) -> PyResult<Self> {
        sgwave::ModelParams::new(alpha, gamma).map(Self).map_err(to_py)
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha()
    }

    /// `|gamma|`; see `flipped`.
    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    #[getter]
    fn flipped(&self) -> bool {
        self.0.flipped()
    }

    /// `"subcritical"`, `"critical"` or `"supercritical"`.
    fn regime(&self) -> &'static str {
        match sgwave::classify(&self.0).regime {
            sgwave::Regime::Subcritical => "subcritical",
            sgwave::Regime::Critical => "critical",
            sgwave::Regime::Supercritical => "supercritical",
        }
    }

    /// `(phi_s, phi_u)`, NaN when `gamma > 1`.
    fn constant_solutions(&self) -> (f64, f64) {
        let c = sgwave::constant_solutions(&self.0);
        (c.phi_s, c.phi_u)
    }

    fn period(&self) -> PyResult<f64> {
        sgwave::xi_period(&self.0).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("ModelParams(alpha={}, gamma={})", self.0.alpha(), self.0.gamma())
    }
}

/// A closed-form unit-velocity travelling wave.
#[pyclass(name = "TravellingWave", module = "pysgwave", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyTravellingWave(sgwave::TravellingWave);

#[pymethods]
impl PyTravellingWave {
    /// `branch` is one of `branches()`; `chirality` is `+1` or `-1`.
    #[new]
    #[pyo3(signature = (params, branch, xi0 = 0.0, chirality = 1))]
    fn new(params: PyModelParams, branch: &str, xi0: f64, chirality: i64) -> PyResult<Self> {
        let branch: sgwave::WaveBranch = branch.parse().map_err(to_py)?;
        let chirality = sgwave::Chirality::from_sign(chirality).map_err(to_py)?;
        sgwave::TravellingWave::new(params.0, branch, xi0, chirality)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn params(&self) -> PyModelParams {
        PyModelParams(*self.0.params())
    }

    #[getter]
    fn branch(&self) -> &'static str {
        self.0.branch().name()
    }

    #[getter]
    fn xi0(&self) -> f64 {
        self.0.xi0()
    }

    #[getter]
    fn chirality(&self) -> i64 {
        self.0.chirality().sign() as i64
    }

    fn y(&self, xi: f64) -> f64 {
        self.0.y(xi)
    }

    fn g(&self, xi: f64) -> f64 {
        self.0.g(xi)
    }

    fn g_prime(&self, xi: f64) -> f64 {
        self.0.g_prime(xi)
    }

    fn phi(&self, x: f64, t: f64) -> f64 {
        self.0.phi(x, t)
    }

    /// `(g(-inf), g(+inf))`.
    fn g_limits(&self) -> PyResult<(f64, f64)> {
        self.0.g_limits().map_err(to_py)
    }

    fn phi_limits(&self) -> PyResult<(f64, f64)> {
        self.0.phi_limits().map_err(to_py)
    }

    fn poles_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.0.poles_in(lo, hi)
    }

    /// Finite-difference residual of the field equation at `(x, t)`.
    #[pyo3(signature = (x, t, h = 1e-3))]
    fn pde_residual(&self, x: f64, t: f64, h: f64) -> PyResult<f64> {
        oracles::pde_residual(&self.0, x, t, h).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "TravellingWave({}, alpha={}, gamma={}, xi0={}, chirality={})",
            self.0.branch(),
            self.0.params().alpha(),
            self.0.params().gamma(),
            self.0.xi0(),
            self.chirality()
        )
    }
}

/// Field on a grid, advanced by the leapfrog scheme.
#[pyclass(name = "FieldState", module = "pysgwave")]
struct PyFieldState {
    state: pde_sim::FieldState,
    params: sgwave::ModelParams,
}

#[pymethods]
impl PyFieldState {
    /// Samples `wave` on a circle of `m` periods (`domain="circle"`) or on
    /// `[lo, hi]` (`domain="segment"`) with `dt = cfl*dx`.
    #[new]
    #[pyo3(signature = (wave, n, domain = "circle", m = 1, lo = None, hi = None, cfl = 0.9))]
    fn new(
        wave: PyTravellingWave,
        n: usize,
        domain: &str,
        m: u32,
        lo: Option<f64>,
        hi: Option<f64>,
        cfl: f64,
    ) -> PyResult<Self> {
        let spec = match domain {
            "circle" => SimDomain::Circle { winding: m },
            "segment" => match (lo, hi) {
                (Some(lo), Some(hi)) => SimDomain::Segment { lo, hi },
                _ => return Err(PyValueError::new_err("segment needs lo and hi")),
            },
            other => return Err(PyValueError::new_err(format!("unknown domain {other:?}"))),
        };
        let dx = pde_sim::init_from_wave(&wave.0, n, spec, 1.0).map_err(to_py)?.dx;
        let state = pde_sim::init_from_wave(&wave.0, n, spec, cfl * dx).map_err(to_py)?;
        Ok(Self {
            state,
            params: *wave.0.params(),
        })
    }

    #[getter]
    fn t(&self) -> f64 {
        self.state.t
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.state.dt
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.state.dx
    }

    #[getter]
    fn x(&self) -> Vec<f64> {
        (0..self.state.n()).map(|i| self.state.x(i)).collect()
    }

    #[getter]
    fn phi(&self) -> Vec<f64> {
        self.state.phi.clone()
    }

    fn advance(&mut self, steps: usize) -> PyResult<()> {
        for _ in 0..steps {
            pde_sim::advance(&mut self.state, &self.params).map_err(to_py)?;
        }
        Ok(())
    }

    fn perturb(&mut self, amplitude: f64, mode: u32) {
        pde_sim::Perturbation { amplitude, mode }.apply(&mut self.state);
    }

    fn energy(&self) -> f64 {
        pde_sim::total_energy(&self.state, &self.params)
    }

    fn winding(&self) -> f64 {
        self.state.winding_observable()
    }

    /// `(deviation, shift)` against `reference`.
    fn deviation(&self, reference: PyTravellingWave) -> (f64, f64) {
        pde_sim::comoving_deviation(&self.state, &reference.0)
    }

    /// Runs to `t_end` past the current time and returns the recorded
    /// observables as a dict of lists.
    #[pyo3(signature = (t_end, reference = None, record_every = 10, probe = false))]
    fn evolve<'py>(
        &mut self,
        py: Python<'py>,
        t_end: f64,
        reference: Option<PyTravellingWave>,
        record_every: usize,
        probe: bool,
    ) -> PyResult<Bound<'py, PyDict>> {
        let mut config = pde_sim::SimConfig::new(self.state.dt, t_end);
        config.record_every = record_every;
        config.probe = probe;
        let reference = reference.map(|w| w.0);
        let report = pde_sim::evolve(&mut self.state, &self.params, &config, reference.as_ref()).map_err(to_py)?;
        let out = PyDict::new(py);
        out.set_item("times", report.times)?;
        out.set_item("deviation", report.deviation)?;
        out.set_item("best_shift", report.best_shift)?;
        out.set_item("winding", report.winding)?;
        out.set_item("diverged_at", report.diverged_at)?;
        Ok(out)
    }
}

/// Names accepted as `branch`.
#[pyfunction]
fn branches() -> Vec<&'static str> {
    sgwave::WaveBranch::ALL.iter().map(|b| b.name()).collect()
}

#[pyfunction]
fn f_map(y: f64) -> f64 {
    sgwave::f_map(y)
}

#[pyfunction]
fn theta(gamma: f64) -> PyResult<f64> {
    sgwave::theta(gamma).map_err(to_py)
}

/// `(y_plus, y_minus)` of the Riccati equation.
#[pyfunction]
fn y_fixed_points(params: PyModelParams) -> PyResult<(f64, f64)> {
    sgwave::y_fixed_points(&params.0)
        .map(|f| (f.y_plus, f.y_minus))
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (params, tol = oracles::DEFAULT_QUAD_TOL))]
fn quad_period(params: PyModelParams, tol: f64) -> PyResult<f64> {
    oracles::quad_period(&params.0, tol).map_err(to_py)
}

/// `(xs, gs)` from the RK4 oracle for `alpha g' = gamma - sin g`.
#[pyfunction]
#[pyo3(signature = (params, g0, lo, hi, tol = oracles::DEFAULT_ODE_TOL))]
fn ode_solve_g(params: PyModelParams, g0: f64, lo: f64, hi: f64, tol: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let sol = oracles::ode_solve_g(&params.0, g0, (lo, hi), tol).map_err(to_py)?;
    Ok((sol.xs, sol.ys))
}

/// `(xs, ys, pole_events)` from the Riccati oracle.
#[pyfunction]
#[pyo3(signature = (params, y0, lo, hi, tol = oracles::DEFAULT_ODE_TOL))]
fn ode_solve_y(
    params: PyModelParams,
    y0: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let sol = oracles::ode_solve_y(&params.0, y0, (lo, hi), tol).map_err(to_py)?;
    Ok((sol.xs, sol.ys, sol.pole_events))
}

/// Residual of each algebraic identity at `gamma`, keyed by name.
#[pyfunction]
fn identities_check<'py>(py: Python<'py>, gamma: f64) -> PyResult<Bound<'py, PyDict>> {
    let report = oracles::identities_check(gamma).map_err(to_py)?;
    let out = PyDict::new(py);
    for (name, value) in report.residuals {
        out.set_item(name, value)?;
    }
    Ok(out)
}

#[pymodule]
pub fn pysgwave(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyTravellingWave>()?;
    m.add_class::<PyFieldState>()?;
    m.add_function(wrap_pyfunction!(branches, m)?)?;
    m.add_function(wrap_pyfunction!(f_map, m)?)?;
    m.add_function(wrap_pyfunction!(theta, m)?)?;
    m.add_function(wrap_pyfunction!(y_fixed_points, m)?)?;
    m.add_function(wrap_pyfunction!(quad_period, m)?)?;
    m.add_function(wrap_pyfunction!(ode_solve_g, m)?)?;
    m.add_function(wrap_pyfunction!(ode_solve_y, m)?)?;
    m.add_function(wrap_pyfunction!(identities_check, m)?)?;
    Ok(())
}
