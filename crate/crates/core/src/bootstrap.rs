//! Case-resampling percentile bootstrap for the coefficients and for the
//! pairwise differences between percentage coefficients.
//!
//! Replicate `k` draws its rows from a ChaCha stream keyed by `(seed, k)`, so
//! results do not depend on how replicates are scheduled across threads.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::percentize::DesignMatrix;
use crate::regression::{fit_three_ways, sample_sd, FitResult};

/// A replicate is redrawn when its resample is rank deficient; the whole run
/// fails once total draws exceed this multiple of the replicate count.
pub const MAX_DRAWS_PER_REPLICATE: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapConfig {
    pub n_bootstrap: usize,
    pub seed: u64,
    pub ci_level: f64,
    /// Significance thresholds, strictly decreasing; each one passed adds a star.
    pub alpha_levels: Vec<f64>,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            n_bootstrap: 10_000,
            seed: 0,
            ci_level: 0.95,
            alpha_levels: vec![0.05, 0.01, 0.001],
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_bootstrap < 1 {
            return Err(Error::Config("n_bootstrap must be at least 1".into()));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::Config(format!(
                "ci_level must lie strictly between 0 and 1, got {}",
                self.ci_level
            )));
        }
        if self.alpha_levels.iter().any(|a| !(*a > 0.0 && *a < 1.0))
            || self.alpha_levels.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::Config(format!(
                "alpha_levels must be strictly decreasing fractions, got {:?}",
                self.alpha_levels
            )));
        }
        Ok(())
    }

    /// Number of thresholds `p` falls below.
    pub fn stars(&self, p: f64) -> u8 {
        self.alpha_levels.iter().filter(|&&a| p < a).count() as u8
    }
}

/// Two-sided bootstrap p-value: twice the smaller of the shares of replicates
/// at or below zero and at or above zero, capped at 1. Exact zeros count on
/// both sides.
pub fn p_value(replicates: &[f64]) -> f64 {
    if replicates.is_empty() {
        return f64::NAN;
    }
    let n = replicates.len() as f64;
    let le = replicates.iter().filter(|&&x| x <= 0.0).count() as f64 / n;
    let ge = replicates.iter().filter(|&&x| x >= 0.0).count() as f64 / n;
    (2.0 * le.min(ge)).min(1.0)
}

/// Nearest-rank percentile of ascending `sorted`, `q` in `[0, 1]`.
pub fn percentile_nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let rank = (q * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapDistribution {
    pub statistic_name: String,
    pub replicates: Vec<f64>,
    /// Value from the full-sample fit.
    pub point_estimate: f64,
    pub mean: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
}

impl BootstrapDistribution {
    pub fn from_replicates(
        statistic_name: impl Into<String>,
        replicates: Vec<f64>,
        point_estimate: f64,
        ci_level: f64,
    ) -> Self {
        let mut sorted = replicates.clone();
        sorted.sort_by(f64::total_cmp);
        let tail = (1.0 - ci_level) / 2.0;
        let mean = replicates.iter().sum::<f64>() / replicates.len() as f64;
        BootstrapDistribution {
            statistic_name: statistic_name.into(),
            point_estimate,
            mean,
            se: sample_sd(&replicates),
            ci_low: percentile_nearest_rank(&sorted, tail),
            ci_high: percentile_nearest_rank(&sorted, 1.0 - tail),
            p_value: p_value(&replicates),
            replicates,
        }
    }

    /// True when no replicate fell on the far side of zero, so the p-value is
    /// only known to be below the resolution `2 / n`.
    pub fn p_below_resolution(&self) -> bool {
        self.p_value == 0.0
    }

    /// `p` as text; a zero p-value is shown as `< 2/n`.
    pub fn p_display(&self) -> String {
        if self.p_below_resolution() {
            format!("< {}", 2.0 / self.replicates.len() as f64)
        } else {
            format!("{}", self.p_value)
        }
    }
}

/// Coefficient flavor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Raw,
    Standardized,
    Percentage,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::Raw, Flavor::Standardized, Flavor::Percentage];

    pub fn key(self, iv: &str) -> String {
        let prefix = match self {
            Flavor::Raw => "b_w",
            Flavor::Standardized => "beta",
            Flavor::Percentage => "b_p",
        };
        format!("{prefix}[{iv}]")
    }
}

pub const INTERCEPT_RAW: &str = "intercept_raw";
pub const INTERCEPT_P: &str = "intercept_p";
pub const R_SQUARED: &str = "r_squared";

/// Replicate fits of one bootstrap run.
#[derive(Clone, Debug)]
pub struct BootstrapRun {
    pub fits: Vec<FitResult>,
    /// Resamples discarded as rank deficient.
    pub redraws: usize,
}

fn replicate_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

/// Refits the model on `n_bootstrap` row resamples (with replacement, size n).
///
/// Runs on the current rayon pool.
pub fn bootstrap_fits(dm: &DesignMatrix, cfg: &BootstrapConfig) -> Result<BootstrapRun> {
    cfg.validate()?;
    let n = dm.n_rows();
    if n == 0 {
        return Err(Error::InsufficientData {
            observations: 0,
            parameters: dm.ivs.len() + 1,
        });
    }
    let limit = MAX_DRAWS_PER_REPLICATE * cfg.n_bootstrap;
    let draws = AtomicUsize::new(0);
    let fits = (0..cfg.n_bootstrap)
        .into_par_iter()
        .map(|k| {
            let mut rng = replicate_rng(cfg.seed, k);
            let mut rows = vec![0usize; n];
            loop {
                let total = draws.fetch_add(1, Ordering::Relaxed) + 1;
                if total > limit {
                    return Err(Error::TooManyRedraws { draws: limit });
                }
                rows.iter_mut().for_each(|r| *r = rng.random_range(0..n));
                match fit_three_ways(&dm.select_rows(&rows)) {
                    Ok(fit) => return Ok(fit),
                    Err(Error::Collinearity(_) | Error::Degenerate(..)) => continue,
                    Err(e) => return Err(e),
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let redraws = draws.load(Ordering::Relaxed) - cfg.n_bootstrap;
    if redraws > 0 {
        log::info!("bootstrap: {redraws} rank-deficient resample(s) redrawn");
    }
    Ok(BootstrapRun { fits, redraws })
}

/// Bootstrap distributions of every coefficient (all three flavors), both
/// intercepts and r², in a fixed order.
#[derive(Clone, Debug)]
pub struct CoefficientInference {
    pub distributions: Vec<BootstrapDistribution>,
}

impl CoefficientInference {
    pub fn get(&self, name: &str) -> Option<&BootstrapDistribution> {
        self.distributions.iter().find(|d| d.statistic_name == name)
    }

    pub fn coefficient(&self, flavor: Flavor, iv: &str) -> Option<&BootstrapDistribution> {
        self.get(&flavor.key(iv))
    }
}

fn check_shape(replicates: &[FitResult], full: &FitResult) -> Result<()> {
    if replicates.is_empty() {
        return Err(Error::Data("no bootstrap replicates".into()));
    }
    if replicates
        .iter()
        .any(|r| r.coefficients.len() != full.coefficients.len())
    {
        return Err(Error::Data("replicate fits do not match the full-sample model".into()));
    }
    Ok(())
}

pub fn coefficient_inference(
    replicates: &[FitResult],
    full: &FitResult,
    cfg: &BootstrapConfig,
) -> Result<CoefficientInference> {
    check_shape(replicates, full)?;
    let dist = |name: String, f: &dyn Fn(&FitResult) -> f64| {
        BootstrapDistribution::from_replicates(
            name,
            replicates.iter().map(f).collect(),
            f(full),
            cfg.ci_level,
        )
    };
    let mut distributions = vec![
        dist(INTERCEPT_RAW.into(), &|f| f.intercept_raw),
        dist(INTERCEPT_P.into(), &|f| f.intercept_p),
    ];
    for (idx, c) in full.coefficients.iter().enumerate() {
        for flavor in Flavor::ALL {
            let value = move |f: &FitResult| {
                let c = &f.coefficients[idx];
                match flavor {
                    Flavor::Raw => c.b_w,
                    Flavor::Standardized => c.beta,
                    Flavor::Percentage => c.b_p,
                }
            };
            distributions.push(dist(flavor.key(&c.name), &value));
        }
    }
    distributions.push(dist(R_SQUARED.into(), &|f| f.r_squared));
    Ok(CoefficientInference { distributions })
}

fn scalar_difference(a: f64, b: f64) -> f64 {
    a.abs() - b.abs()
}

fn directional_difference(a: f64, b: f64) -> f64 {
    a - b
}

/// Bootstrap distributions of the scalar difference `|b_p(i)| − |b_p(j)|` and
/// the directional difference `b_p(i) − b_p(j)`.
pub fn pairwise_differences(
    replicates: &[FitResult],
    full: &FitResult,
    i: &str,
    j: &str,
    cfg: &BootstrapConfig,
) -> Result<(BootstrapDistribution, BootstrapDistribution)> {
    check_shape(replicates, full)?;
    let index = |name: &str| {
        full.coefficients
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::Lookup(name.to_string()))
    };
    let (a, b) = (index(i)?, index(j)?);
    if a == b {
        return Err(Error::Config(format!("cannot compare `{i}` with itself")));
    }
    let build = |label: &str, op: fn(f64, f64) -> f64| {
        let reps = replicates
            .iter()
            .map(|f| op(f.coefficients[a].b_p, f.coefficients[b].b_p))
            .collect();
        let point = op(full.coefficients[a].b_p, full.coefficients[b].b_p);
        BootstrapDistribution::from_replicates(format!("{label}[{i},{j}]"), reps, point, cfg.ci_level)
    };
    Ok((
        build("d_s", scalar_difference),
        build("d_d", directional_difference),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComparisonKind {
    /// `|b_p(i)| − |b_p(j)|`
    Scalar,
    /// `b_p(i) − b_p(j)`
    Directional,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonCell {
    pub estimate: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
    pub p_below_resolution: bool,
    pub stars: u8,
}

/// Square matrix of pairwise differences; `cells[i][j]` holds the difference
/// of predictor `i` against predictor `j`. The diagonal is empty.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonMatrix {
    pub kind: ComparisonKind,
    pub iv_names: Vec<String>,
    pub cells: Vec<Vec<Option<ComparisonCell>>>,
}

impl ComparisonMatrix {
    pub fn cell(&self, i: &str, j: &str) -> Option<&ComparisonCell> {
        let a = self.iv_names.iter().position(|n| n == i)?;
        let b = self.iv_names.iter().position(|n| n == j)?;
        self.cells[a][b].as_ref()
    }

    pub fn filled(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.is_some()).count()
    }
}

fn cell(d: &BootstrapDistribution, cfg: &BootstrapConfig) -> ComparisonCell {
    ComparisonCell {
        estimate: d.point_estimate,
        se: d.se,
        ci_low: d.ci_low,
        ci_high: d.ci_high,
        p_value: d.p_value,
        p_below_resolution: d.p_below_resolution(),
        stars: cfg.stars(d.p_value),
    }
}

/// Scalar and directional comparison matrices over all ordered predictor pairs.
pub fn comparison_matrices(
    replicates: &[FitResult],
    full: &FitResult,
    cfg: &BootstrapConfig,
) -> Result<(ComparisonMatrix, ComparisonMatrix)> {
    let names: Vec<String> = full.coefficients.iter().map(|c| c.name.clone()).collect();
    if names.len() < 2 {
        return Err(Error::Config("comparisons need at least two predictors".into()));
    }
    let g = names.len();
    let mut scalar = vec![vec![None; g]; g];
    let mut directional = vec![vec![None; g]; g];
    for a in 0..g {
        for b in 0..g {
            if a == b {
                continue;
            }
            let (ds, dd) = pairwise_differences(replicates, full, &names[a], &names[b], cfg)?;
            scalar[a][b] = Some(cell(&ds, cfg));
            directional[a][b] = Some(cell(&dd, cfg));
        }
    }
    Ok((
        ComparisonMatrix {
            kind: ComparisonKind::Scalar,
            iv_names: names.clone(),
            cells: scalar,
        },
        ComparisonMatrix {
            kind: ComparisonKind::Directional,
            iv_names: names,
            cells: directional,
        },
    ))
}
