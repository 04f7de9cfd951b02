//! Python module `pctcoef_py`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pctcoef::bootstrap::{self as bs, BootstrapConfig};
use pctcoef::cli::{run_config, RunConfig};
use pctcoef::dataset::{Column, Dataset, Role, Values, VariableSpec};
use pctcoef::percentize::{self as pz, build_design_matrix, DesignMatrix};
use pctcoef::regression as rg;
use pctcoef::report;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(pctcoef_py, PctcoefError, PyValueError);

fn err(e: pctcoef::Error) -> PyErr {
    PctcoefError::new_err(format!("{e} (exit code {})", e.exit_code()))
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "pctcoef_py")]
#[derive(Clone)]
pub struct OlsFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
}

#[pymethods]
impl OlsFit {
    fn __repr__(&self) -> String {
        format!(
            "OlsFit(intercept={}, coefficients={:?}, r_squared={})",
            self.intercept, self.coefficients, self.r_squared
        )
    }
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "pctcoef_py")]
#[derive(Clone)]
pub struct Coefficients {
    pub name: String,
    pub b_w: f64,
    pub beta: f64,
    pub b_p: f64,
}

#[pymethods]
impl Coefficients {
    fn __repr__(&self) -> String {
        format!(
            "Coefficients(name={:?}, b_w={}, beta={}, b_p={})",
            self.name, self.b_w, self.beta, self.b_p
        )
    }
}

impl From<&rg::IvCoefficients> for Coefficients {
    fn from(c: &rg::IvCoefficients) -> Self {
        Coefficients {
            name: c.name.clone(),
            b_w: c.b_w,
            beta: c.beta,
            b_p: c.b_p,
        }
    }
}

#[pyclass(frozen, get_all, module = "pctcoef_py")]
pub struct Fit {
    pub intercept_raw: f64,
    pub intercept_p: f64,
    pub coefficients: Vec<Coefficients>,
    pub r_squared: f64,
    pub r_squared_p: f64,
    pub n_used: usize,
}

#[pymethods]
impl Fit {
    /// Coefficients of the named predictor.
    fn get(&self, name: &str) -> Option<Coefficients> {
        self.coefficients.iter().find(|c| c.name == name).cloned()
    }
}

impl From<rg::FitResult> for Fit {
    fn from(f: rg::FitResult) -> Self {
        Fit {
            intercept_raw: f.intercept_raw,
            intercept_p: f.intercept_p,
            coefficients: f.coefficients.iter().map(Coefficients::from).collect(),
            r_squared: f.r_squared,
            r_squared_p: f.r_squared_p,
            n_used: f.n_used,
        }
    }
}

#[pyclass(frozen, get_all, module = "pctcoef_py")]
pub struct Distribution {
    pub statistic_name: String,
    pub replicates: Vec<f64>,
    pub point_estimate: f64,
    pub mean: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
}

#[pymethods]
impl Distribution {
    fn p_display(&self) -> String {
        self.core().p_display()
    }

    fn __repr__(&self) -> String {
        format!(
            "Distribution({}: estimate={}, se={}, ci=[{}, {}], p={})",
            self.statistic_name, self.point_estimate, self.se, self.ci_low, self.ci_high, self.p_value
        )
    }
}

impl Distribution {
    fn core(&self) -> bs::BootstrapDistribution {
        bs::BootstrapDistribution {
            statistic_name: self.statistic_name.clone(),
            replicates: self.replicates.clone(),
            point_estimate: self.point_estimate,
            mean: self.mean,
            se: self.se,
            ci_low: self.ci_low,
            ci_high: self.ci_high,
            p_value: self.p_value,
        }
    }
}

impl From<&bs::BootstrapDistribution> for Distribution {
    fn from(d: &bs::BootstrapDistribution) -> Self {
        Distribution {
            statistic_name: d.statistic_name.clone(),
            replicates: d.replicates.clone(),
            point_estimate: d.point_estimate,
            mean: d.mean,
            se: d.se,
            ci_low: d.ci_low,
            ci_high: d.ci_high,
            p_value: d.p_value,
        }
    }
}

#[pyclass(frozen, get_all, module = "pctcoef_py")]
pub struct NominalSummary {
    pub variable: String,
    pub reference: String,
    pub pairs: Vec<(String, String, f64)>,
    pub largest_pair: (String, String),
    pub largest_gap: f64,
    pub mean_abs_pairwise: f64,
    pub pair_count: usize,
}

#[pyclass(frozen, get_all, module = "pctcoef_py")]
pub struct RunResult {
    pub files: Vec<String>,
    pub n_used: usize,
    pub r_squared: f64,
    pub redraws: usize,
    /// Bootstrap p-values of the scalar comparisons, keyed `(i, j)`.
    pub scalar_p: BTreeMap<(String, String), f64>,
}

#[pyfunction]
fn percentize_value(value: f64, c_n: f64, c_x: f64) -> PyResult<f64> {
    pz::percentize_value(value, c_n, c_x).map_err(err)
}

#[pyfunction]
fn percent_value_100(value: f64, m_n: f64, m_x: f64) -> PyResult<f64> {
    pz::percent_value_100(value, m_n, m_x).map_err(err)
}

#[pyfunction]
fn minmax_value(value: f64, min_o: f64, max_o: f64, min_n: f64, max_n: f64) -> PyResult<f64> {
    pz::minmax_value(value, min_o, max_o, min_n, max_n).map_err(err)
}

/// OLS of `y` on the columns `xs` with an intercept.
#[pyfunction]
fn fit_ols(y: Vec<f64>, xs: Vec<Vec<f64>>) -> PyResult<OlsFit> {
    let f = rg::fit_ols(&y, &xs).map_err(err)?;
    Ok(OlsFit {
        intercept: f.intercept,
        coefficients: f.coefficients,
        r_squared: f.r_squared,
    })
}

#[pyfunction]
fn standardized_beta(b_w: f64, sd_x: f64, sd_y: f64) -> PyResult<f64> {
    rg::standardized_beta(b_w, sd_x, sd_y).map_err(err)
}

#[pyfunction]
fn p_value(replicates: Vec<f64>) -> PyResult<f64> {
    if replicates.is_empty() {
        return Err(PctcoefError::new_err("no replicates"));
    }
    Ok(bs::p_value(&replicates))
}

/// Numeric-only design matrix; predictors default to `x1`, `x2`, ...
pub fn numeric_design(
    y: Vec<f64>,
    xs: Vec<Vec<f64>>,
    y_anchors: (f64, f64),
    x_anchors: Vec<(f64, f64)>,
    names: Option<Vec<String>>,
) -> pctcoef::Result<DesignMatrix> {
    if x_anchors.len() != xs.len() {
        return Err(pctcoef::Error::Config(format!(
            "{} predictors but {} anchor pairs",
            xs.len(),
            x_anchors.len()
        )));
    }
    let names = names.unwrap_or_else(|| (1..=xs.len()).map(|i| format!("x{i}")).collect());
    if names.len() != xs.len() {
        return Err(pctcoef::Error::Config(format!(
            "{} predictors but {} names",
            xs.len(),
            names.len()
        )));
    }
    let real = |v: Vec<f64>| Values::Real(v.into_iter().map(Some).collect());
    let mut cols = vec![Column::new(
        VariableSpec::numeric("y", Role::Dependent, y_anchors.0, y_anchors.1),
        real(y),
    )];
    for ((x, (lo, hi)), name) in xs.into_iter().zip(x_anchors).zip(names) {
        cols.push(Column::new(
            VariableSpec::numeric(&name, Role::Independent, lo, hi),
            real(x),
        ));
    }
    build_design_matrix(&Dataset::new(cols)?, false)
}

/// Raw, standardized and percentage coefficients of one model.
#[pyfunction]
#[pyo3(signature = (y, xs, y_anchors, x_anchors, names=None))]
fn fit(
    y: Vec<f64>,
    xs: Vec<Vec<f64>>,
    y_anchors: (f64, f64),
    x_anchors: Vec<(f64, f64)>,
    names: Option<Vec<String>>,
) -> PyResult<Fit> {
    let dm = numeric_design(y, xs, y_anchors, x_anchors, names).map_err(err)?;
    Ok(rg::fit_three_ways(&dm).map_err(err)?.into())
}

/// Bootstrap distributions keyed `b_w[x]`, `beta[x]`, `b_p[x]`, intercepts
/// and `r_squared`.
#[pyfunction]
#[pyo3(signature = (y, xs, y_anchors, x_anchors, names=None, n_bootstrap=1000, seed=0, ci_level=0.95))]
#[allow(clippy::too_many_arguments)]
fn bootstrap(
    py: Python<'_>,
    y: Vec<f64>,
    xs: Vec<Vec<f64>>,
    y_anchors: (f64, f64),
    x_anchors: Vec<(f64, f64)>,
    names: Option<Vec<String>>,
    n_bootstrap: usize,
    seed: u64,
    ci_level: f64,
) -> PyResult<BTreeMap<String, Distribution>> {
    let cfg = BootstrapConfig {
        n_bootstrap,
        seed,
        ci_level,
        ..Default::default()
    };
    cfg.validate().map_err(err)?;
    let dm = numeric_design(y, xs, y_anchors, x_anchors, names).map_err(err)?;
    let inference = py
        .detach(|| {
            let full = rg::fit_three_ways(&dm)?;
            let run = bs::bootstrap_fits(&dm, &cfg)?;
            bs::coefficient_inference(&run.fits, &full, &cfg)
        })
        .map_err(err)?;
    Ok(inference
        .distributions
        .iter()
        .map(|d| (d.statistic_name.clone(), Distribution::from(d)))
        .collect())
}

/// Pairwise gaps among the groups of a nominal variable; the reference
/// group enters with coefficient 0.
#[pyfunction]
fn nominal_pairwise(variable: &str, groups: Vec<(String, f64)>) -> PyResult<NominalSummary> {
    let s = report::nominal_pairwise_values(variable, &groups).map_err(err)?;
    Ok(NominalSummary {
        variable: s.variable,
        reference: s.reference,
        pairs: s.pairs,
        largest_pair: s.largest_pair,
        largest_gap: s.largest_gap,
        mean_abs_pairwise: s.mean_abs_pairwise,
        pair_count: s.pair_count,
    })
}

/// Runs the full pipeline from a JSON config and writes the report files.
#[pyfunction]
#[pyo3(signature = (config, out=None, n_bootstrap=None, seed=None, threads=0))]
fn run(
    py: Python<'_>,
    config: PathBuf,
    out: Option<PathBuf>,
    n_bootstrap: Option<usize>,
    seed: Option<u64>,
    threads: usize,
) -> PyResult<RunResult> {
    let mut cfg = RunConfig::from_file(&config).map_err(err)?;
    if let Some(o) = out {
        cfg.output_dir = o;
    }
    if let Some(n) = n_bootstrap {
        cfg.bootstrap.n_bootstrap = n;
    }
    if let Some(s) = seed {
        cfg.bootstrap.seed = s;
    }
    let res = py.detach(|| run_config(&cfg, threads)).map_err(err)?;
    let m = &res.bundle.scalar_matrix;
    let mut scalar_p = BTreeMap::new();
    for (a, i) in m.iv_names.iter().enumerate() {
        for (b, j) in m.iv_names.iter().enumerate() {
            if let Some(c) = &m.cells[a][b] {
                scalar_p.insert((i.clone(), j.clone()), c.p_value);
            }
        }
    }
    Ok(RunResult {
        files: res.files.iter().map(|p| p.display().to_string()).collect(),
        n_used: res.bundle.n_used,
        r_squared: res.bundle.r_squared.estimate,
        redraws: res.redraws,
        scalar_p,
    })
}

#[pymodule]
fn pctcoef_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PctcoefError", m.py().get_type::<PctcoefError>())?;
    m.add_class::<OlsFit>()?;
    m.add_class::<Coefficients>()?;
    m.add_class::<Fit>()?;
    m.add_class::<Distribution>()?;
    m.add_class::<NominalSummary>()?;
    m.add_class::<RunResult>()?;
    m.add_function(wrap_pyfunction!(percentize_value, m)?)?;
    m.add_function(wrap_pyfunction!(percent_value_100, m)?)?;
    m.add_function(wrap_pyfunction!(minmax_value, m)?)?;
    m.add_function(wrap_pyfunction!(fit_ols, m)?)?;
    m.add_function(wrap_pyfunction!(standardized_beta, m)?)?;
    m.add_function(wrap_pyfunction!(p_value, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(bootstrap, m)?)?;
    m.add_function(wrap_pyfunction!(nominal_pairwise, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
