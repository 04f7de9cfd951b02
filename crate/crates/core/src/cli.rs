//! Batch pipeline: config → load → missing data → design matrix → fits →
//! bootstrap → report files.

use std::path::{Path, PathBuf};

use clap::Parser;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{
    bootstrap_fits, coefficient_inference, comparison_matrices, BootstrapConfig, ComparisonKind,
    ComparisonMatrix,
};
use crate::dataset::{apply_missing_policy, load_csv, Role, VariableSpec};
use crate::error::{Error, Result};
use crate::percentize::build_design_matrix;
use crate::regression::fit_three_ways;
use crate::report::{render, Format, ReportBundle};

/// Environment variable consulted when `--threads` is not given.
pub const THREADS_ENV: &str = "PCTCOEF_THREADS";

/// One analysis run, as stored in the JSON config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// CSV input; relative paths resolve against the config file's directory.
    #[serde(alias = "data")]
    pub data_path: PathBuf,
    pub variables: Vec<VariableSpec>,
    #[serde(default)]
    pub bootstrap: BootstrapConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_formats")]
    pub output_formats: Vec<String>,
    #[serde(default)]
    pub strict_anchors: bool,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<String> {
    vec!["md".into(), "csv".into()]
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        if cfg.data_path.is_relative() {
            cfg.data_path = base.join(&cfg.data_path);
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    pub fn formats(&self) -> Result<Vec<Format>> {
        if self.output_formats.is_empty() {
            return Err(Error::Config("no output formats requested".into()));
        }
        self.output_formats.iter().map(|f| f.parse()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let dependents: Vec<&str> = self
            .variables
            .iter()
            .filter(|v| v.role == Role::Dependent)
            .map(|v| v.name.as_str())
            .collect();
        match dependents.len() {
            1 => {}
            0 => return Err(Error::Config("no dependent variable declared".into())),
            _ => {
                return Err(Error::Config(format!(
                    "exactly one dependent variable allowed, found {}",
                    dependents.join(", ")
                )))
            }
        }
        if !self.variables.iter().any(|v| v.role == Role::Independent) {
            return Err(Error::Config("at least one independent variable is required".into()));
        }
        for v in &self.variables {
            v.validate()?;
        }
        self.bootstrap.validate()?;
        self.formats()?;
        Ok(())
    }
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "pctcoef",
    version,
    about = "Raw, standardized and percentage regression coefficients with bootstrap comparisons"
)]
pub struct Args {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// CSV data file (overrides the config).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of bootstrap replicates.
    #[arg(long)]
    pub bootstrap: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Confidence level of the percentile intervals.
    #[arg(long)]
    pub ci: Option<f64>,
    /// Comma-separated output formats: md, csv.
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<String>>,
    /// Reject values outside the conceptual anchors.
    #[arg(long)]
    pub strict_anchors: bool,
    /// Worker threads for the bootstrap (default: PCTCOEF_THREADS, else all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Args {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(d) = &self.data {
            cfg.data_path = d.clone();
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.clone();
        }
        if let Some(n) = self.bootstrap {
            cfg.bootstrap.n_bootstrap = n;
        }
        if let Some(s) = self.seed {
            cfg.bootstrap.seed = s;
        }
        if let Some(c) = self.ci {
            cfg.bootstrap.ci_level = c;
        }
        if let Some(f) = &self.format {
            cfg.output_formats = f.clone();
        }
        if self.strict_anchors {
            cfg.strict_anchors = true;
        }
    }

    fn thread_count(&self) -> Result<usize> {
        if let Some(t) = self.threads {
            return Ok(t);
        }
        match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{THREADS_ENV}=`{v}` is not a thread count"))),
            Err(_) => Ok(0),
        }
    }
}

/// Outcome of a successful run.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub bundle: ReportBundle,
    pub redraws: usize,
}

fn empty_matrix(kind: ComparisonKind, names: Vec<String>) -> ComparisonMatrix {
    let g = names.len();
    ComparisonMatrix {
        kind,
        iv_names: names,
        cells: vec![vec![None; g]; g],
    }
}

/// Runs the whole pipeline for an already loaded config.
pub fn run_config(cfg: &RunConfig, threads: usize) -> Result<RunOutput> {
    cfg.validate()?;
    let formats = cfg.formats()?;

    let data = load_csv(&cfg.data_path, &cfg.variables)?;
    let (data, missing) = apply_missing_policy(&data)?;
    log::info!("missing data:\n{missing}");
    let dm = build_design_matrix(&data, cfg.strict_anchors)?;
    let fit = fit_three_ways(&dm)?;
    log::info!(
        "full-sample fit: n = {}, {} predictors, r² = {:.4}",
        fit.n_used,
        fit.coefficients.len(),
        fit.r_squared
    );

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let run = pool.install(|| bootstrap_fits(&dm, &cfg.bootstrap))?;
    log::info!(
        "bootstrap: {} replicates, {} redraws, seed {}",
        cfg.bootstrap.n_bootstrap,
        run.redraws,
        cfg.bootstrap.seed
    );

    let inference = coefficient_inference(&run.fits, &fit, &cfg.bootstrap)?;
    let (scalar, directional) = if fit.coefficients.len() >= 2 {
        comparison_matrices(&run.fits, &fit, &cfg.bootstrap)?
    } else {
        let names: Vec<String> = fit.coefficients.iter().map(|c| c.name.clone()).collect();
        (
            empty_matrix(ComparisonKind::Scalar, names.clone()),
            empty_matrix(ComparisonKind::Directional, names),
        )
    };
    let bundle = ReportBundle::assemble(&dm, &fit, &inference, scalar, directional, &cfg.bootstrap)?;
    let files = render(&bundle, &formats, &cfg.output_dir)?;
    for f in &files {
        log::info!("wrote {}", f.display());
    }
    Ok(RunOutput {
        files,
        bundle,
        redraws: run.redraws,
    })
}

/// Loads the config named by `args`, applies flag overrides and runs.
pub fn run(args: &Args) -> Result<RunOutput> {
    let mut cfg = RunConfig::from_file(&args.config)?;
    args.apply(&mut cfg);
    run_config(&cfg, args.thread_count()?)
}

/// Command-line entry point; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&args) {
        Ok(_) => 0,
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
