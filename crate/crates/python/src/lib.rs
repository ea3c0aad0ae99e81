use std::path::PathBuf;

use cogmimo_core as core;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: core::Error) -> PyErr {
    match e {
        core::Error::Config { .. } | core::Error::Domain(_) | core::Error::Precondition(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// System parameters, all linear and normalised to the noise floor.
#[pyclass(name = "SystemConfig", module = "cogmimo", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySystemConfig(core::SystemConfig);

#[pymethods]
impl PySystemConfig {
    #[new]
    #[pyo3(signature = (m, n, l_t, l_r, p_p, p_max, q, gamma_th, n0 = 1.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(m: u32, n: u32, l_t: u32, l_r: u32, p_p: f64, p_max: f64, q: f64, gamma_th: f64, n0: f64) -> PyResult<Self> {
        let cfg = core::SystemConfig {
            m,
            n,
            l_t,
            l_r,
            p_p,
            p_max,
            q,
            n0,
            gamma_th,
        };
        cfg.validate().map_err(err)?;
        Ok(PySystemConfig(cfg))
    }

    /// Same as the constructor but with `p_p`, `p_max`, `q`, `gamma_th`
    /// and `n0` in dB.
    #[staticmethod]
    #[pyo3(signature = (m, n, l_t, l_r, p_p_db, p_max_db, q_db, gamma_th_db, n0_db = 0.0))]
    #[allow(clippy::too_many_arguments)]
    fn from_db(
        m: u32,
        n: u32,
        l_t: u32,
        l_r: u32,
        p_p_db: f64,
        p_max_db: f64,
        q_db: f64,
        gamma_th_db: f64,
        n0_db: f64,
    ) -> PyResult<Self> {
        let lin = core::scenario::db_to_linear;
        Self::new(m, n, l_t, l_r, lin(p_p_db), lin(p_max_db), lin(q_db), lin(gamma_th_db), lin(n0_db))
    }

    #[getter]
    fn m(&self) -> u32 {
        self.0.m
    }
    #[getter]
    fn n(&self) -> u32 {
        self.0.n
    }
    #[getter]
    fn l_t(&self) -> u32 {
        self.0.l_t
    }
    #[getter]
    fn l_r(&self) -> u32 {
        self.0.l_r
    }
    #[getter]
    fn p_p(&self) -> f64 {
        self.0.p_p
    }
    #[getter]
    fn p_max(&self) -> f64 {
        self.0.p_max
    }
    #[getter]
    fn q(&self) -> f64 {
        self.0.q
    }
    #[getter]
    fn n0(&self) -> f64 {
        self.0.n0
    }
    #[getter]
    fn gamma_th(&self) -> f64 {
        self.0.gamma_th
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "LinkStats", module = "cogmimo", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLinkStats(core::LinkStats);

#[pymethods]
impl PyLinkStats {
    #[new]
    fn new(mean_x: f64, mean_y_per_pr: Vec<f64>, mean_z_per_pt: Vec<f64>) -> PyResult<Self> {
        core::LinkStats::new(mean_x, mean_y_per_pr, mean_z_per_pt)
            .map(PyLinkStats)
            .map_err(err)
    }

    /// Means from distances in meters and the law `(d/d_ref)^{−alpha}`.
    #[staticmethod]
    #[pyo3(signature = (d_st_sr, d_pt_sr, d_st_pr, d_ref = 100.0, alpha = 4.0))]
    fn from_geometry(d_st_sr: f64, d_pt_sr: Vec<f64>, d_st_pr: Vec<f64>, d_ref: f64, alpha: f64) -> PyResult<Self> {
        let geo = core::Geometry {
            d_st_sr,
            d_pt_sr,
            d_st_pr,
            d_ref,
            alpha,
        };
        core::LinkStats::from_geometry(&geo).map(PyLinkStats).map_err(err)
    }

    #[getter]
    fn mean_x(&self) -> f64 {
        self.0.mean_x
    }
    #[getter]
    fn mean_y(&self) -> f64 {
        self.0.mean_y()
    }
    #[getter]
    fn mean_z(&self) -> f64 {
        self.0.mean_z()
    }
    #[getter]
    fn mean_y_per_pr(&self) -> Vec<f64> {
        self.0.mean_y_per_pr.clone()
    }
    #[getter]
    fn mean_z_per_pt(&self) -> Vec<f64> {
        self.0.mean_z_per_pt.clone()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "PowerSolution", module = "cogmimo", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPowerSolution(core::PowerSolution);

#[pymethods]
impl PyPowerSolution {
    #[getter]
    fn lambda_(&self) -> f64 {
        self.0.lambda
    }
    #[getter]
    fn c_threshold(&self) -> f64 {
        self.0.c_threshold
    }
    #[getter]
    fn target_mean_power(&self) -> f64 {
        self.0.target_mean_power
    }
    #[getter]
    fn slope(&self) -> f64 {
        self.0.slope
    }
    #[getter]
    fn offset(&self) -> f64 {
        self.0.offset
    }

    /// `p*(x)` for one realized ZF gain.
    fn power(&self, x: f64) -> f64 {
        core::powalloc::optimal_power(x, &self.0)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyfunction]
fn solve_lambda(config: &PySystemConfig, stats: &PyLinkStats) -> PyResult<PyPowerSolution> {
    core::solve_lambda(&config.0, &stats.0).map(PyPowerSolution).map_err(err)
}

#[pyfunction]
fn conventional_power(config: &PySystemConfig, stats: &PyLinkStats) -> f64 {
    core::powalloc::conventional_power(&config.0, &stats.0)
}

/// Closed-form outage under the optimal rule; the branch is picked
/// automatically. Returns `(p_out, branch_name)`.
#[pyfunction]
fn outage_probability(
    config: &PySystemConfig,
    stats: &PyLinkStats,
    solution: &PyPowerSolution,
) -> PyResult<(f64, String)> {
    let r = core::outage::outage_probability(&config.0, &stats.0, &solution.0).map_err(err)?;
    let branch = match r.branch {
        core::OutageBranch::General => "general",
        core::OutageBranch::EqualAntennas => "equal_antennas",
        core::OutageBranch::IidPts => "iid_pts",
        core::OutageBranch::IidPtsEqualAntennas => "iid_pts_equal_antennas",
    };
    Ok((r.p_out, branch.to_owned()))
}

#[pyfunction]
fn outage_conventional(config: &PySystemConfig, stats: &PyLinkStats) -> PyResult<f64> {
    core::outage::outage_conventional(&config.0, &stats.0).map_err(err)
}

#[pyfunction]
fn ergodic_capacity(config: &PySystemConfig, stats: &PyLinkStats, solution: &PyPowerSolution) -> PyResult<f64> {
    core::outage::ergodic_capacity(&config.0, &stats.0, &solution.0).map_err(err)
}

#[pyfunction]
fn leakage_probability(powers: Vec<f64>, mean_y_per_pr: Vec<f64>, q: f64) -> PyResult<f64> {
    core::leakage_probability(&powers, &mean_y_per_pr, q).map_err(err)
}

/// Runs the antenna switch-off loop on one gain vector. Returns
/// `(m_effective, suspended, steps)` with `steps` as `(count, leakage)`.
#[pyfunction]
fn reduce_antennas(
    x_gains: Vec<f64>,
    solution: &PyPowerSolution,
    config: &PySystemConfig,
    stats: &PyLinkStats,
    t_g: f64,
) -> PyResult<(usize, bool, Vec<(usize, f64)>)> {
    let r = core::reduce_antennas(&x_gains, &solution.0, &config.0, &stats.0, t_g).map_err(err)?;
    Ok((r.m_effective, r.suspended, r.steps))
}

/// Returns `(pmf, mean_active, std_error)`.
#[pyfunction]
#[pyo3(signature = (config, stats, solution, t_g, trials = 100_000, seed = 1))]
fn antenna_pmf(
    py: Python<'_>,
    config: &PySystemConfig,
    stats: &PyLinkStats,
    solution: &PyPowerSolution,
    t_g: f64,
    trials: u64,
    seed: u64,
) -> PyResult<(Vec<f64>, f64, f64)> {
    let (c, s, sol) = (config.0, stats.0.clone(), solution.0);
    let r = py
        .detach(|| core::antenna_pmf(&c, &s, &sol, t_g, trials, seed))
        .map_err(err)?;
    Ok((r.pmf, r.mean_active, r.std_error))
}

/// Monte-Carlo outage with full ZF detection. Returns `(value, std_error)`.
#[pyfunction]
#[pyo3(signature = (config, stats, solution, trials = 100_000, seed = 1))]
fn empirical_outage(
    py: Python<'_>,
    config: &PySystemConfig,
    stats: &PyLinkStats,
    solution: &PyPowerSolution,
    trials: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let (c, s, sol) = (config.0, stats.0.clone(), solution.0);
    let r = py
        .detach(|| core::mcharness::empirical_outage(&c, &s, &sol, trials, seed))
        .map_err(err)?;
    Ok((r.value, r.std_error))
}

/// Evaluates a scenario file the way the command-line tool does.
/// `command` is one of `outage`, `antennas`, `rate`, `power`; the table
/// comes back as CSV text.
#[pyfunction]
fn run_scenario(py: Python<'_>, path: PathBuf, command: &str) -> PyResult<String> {
    let scenario = core::scenario::Scenario::from_path(&path).map_err(err)?;
    let run = match command {
        "outage" => core::commands::cmd_outage,
        "antennas" => core::commands::cmd_antennas,
        "rate" => core::commands::cmd_rate,
        "power" => core::commands::cmd_power,
        other => return Err(PyValueError::new_err(format!("unknown command `{other}`"))),
    };
    let table = py.detach(|| run(&scenario)).map_err(err)?;
    Ok(table.to_csv())
}

#[pymodule]
fn cogmimo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemConfig>()?;
    m.add_class::<PyLinkStats>()?;
    m.add_class::<PyPowerSolution>()?;
    m.add_function(wrap_pyfunction!(solve_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(conventional_power, m)?)?;
    m.add_function(wrap_pyfunction!(outage_probability, m)?)?;
    m.add_function(wrap_pyfunction!(outage_conventional, m)?)?;
    m.add_function(wrap_pyfunction!(ergodic_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(leakage_probability, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_antennas, m)?)?;
    m.add_function(wrap_pyfunction!(antenna_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_outage, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
