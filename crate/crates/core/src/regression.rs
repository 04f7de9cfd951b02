//! Least-squares fits reporting raw (b_w), standardized (β) and percentage
//! (b_p) coefficients of one model.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::percentize::DesignMatrix;

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct OlsFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
}

enum OlsFailure {
    TooFewRows,
    /// Positions of columns taking part in a linear dependency.
    Collinear(Vec<usize>),
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation (n − 1 denominator).
pub fn sample_sd(v: &[f64]) -> f64 {
    if v.len() < 2 || v.iter().all(|&x| x == v[0]) {
        return 0.0;
    }
    let m = mean(v);
    let ss: f64 = v.iter().map(|x| (x - m).powi(2)).sum();
    (ss / (v.len() - 1) as f64).sqrt()
}

fn solve(y: &[f64], xs: &[Vec<f64>]) -> std::result::Result<OlsFit, OlsFailure> {
    let n = y.len();
    let p = xs.len();
    if n <= p + 1 || xs.iter().any(|x| x.len() != n) {
        return Err(OlsFailure::TooFewRows);
    }
    let y_mean = mean(y);
    if y.iter().all(|&v| v == y[0]) {
        log::warn!("dependent variable has zero variance; r² set to 0");
        return Ok(OlsFit {
            intercept: y[0],
            coefficients: vec![0.0; p],
            r_squared: 0.0,
        });
    }
    let x_means: Vec<f64> = xs.iter().map(|x| mean(x)).collect();
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));
    let tss = yc.norm_squared();
    if p == 0 {
        return Ok(OlsFit {
            intercept: y_mean,
            coefficients: Vec::new(),
            r_squared: 0.0,
        });
    }

    // Centering absorbs the intercept; QR reduces the problem to the p×p
    // triangular factor, whose SVD gives the rank test and the solve.
    let xc = DMatrix::from_fn(n, p, |r, c| xs[c][r] - x_means[c]);
    let qr = xc.clone().qr();
    let r = qr.r();
    let mut qty = yc.clone();
    qr.q_tr_mul(&mut qty);
    let qty = qty.rows(0, p).into_owned();

    let svd = r.svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let s_max = svd.singular_values.max();
    if let Some(k) = svd
        .singular_values
        .iter()
        .position(|&s| !(s > RANK_TOLERANCE * s_max))
    {
        let null = v_t.row(k);
        let scale = null.amax();
        let cols = (0..p).filter(|&j| null[j].abs() > 1e-6 * scale).collect();
        return Err(OlsFailure::Collinear(cols));
    }

    let ut_b = u.transpose() * qty;
    let scaled = DVector::from_iterator(
        p,
        ut_b.iter().zip(svd.singular_values.iter()).map(|(b, s)| b / s),
    );
    let beta = v_t.transpose() * scaled;

    let resid = &yc - &xc * &beta;
    let rss = resid.norm_squared();
    let r_squared = (1.0 - rss / tss).clamp(0.0, 1.0);
    let intercept = y_mean - beta.iter().zip(&x_means).map(|(b, m)| b * m).sum::<f64>();
    Ok(OlsFit {
        intercept,
        coefficients: beta.iter().copied().collect(),
        r_squared,
    })
}

/// Ordinary least squares of `y` on the columns `xs` plus an intercept.
///
/// Collinearity errors name columns by 1-based position (`x1`, `x2`, ...).
pub fn fit_ols(y: &[f64], xs: &[Vec<f64>]) -> Result<OlsFit> {
    let names: Vec<String> = (1..=xs.len()).map(|i| format!("x{i}")).collect();
    fit_ols_named(y, xs, &names)
}

/// [`fit_ols`] with column names used in collinearity errors.
pub fn fit_ols_named(y: &[f64], xs: &[Vec<f64>], names: &[String]) -> Result<OlsFit> {
    solve(y, xs).map_err(|e| match e {
        OlsFailure::TooFewRows => Error::InsufficientData {
            observations: y.len(),
            parameters: xs.len() + 1,
        },
        OlsFailure::Collinear(cols) => {
            Error::Collinearity(cols.into_iter().map(|j| names[j].clone()).collect())
        }
    })
}

/// Standardized coefficient: `b_w · sd_x / sd_y`.
pub fn standardized_beta(b_w: f64, sd_x: f64, sd_y: f64) -> Result<f64> {
    if !(sd_x > 0.0) || !(sd_y > 0.0) {
        return Err(Error::Degenerate(
            "standard deviation".into(),
            format!("sd_x = {sd_x}, sd_y = {sd_y}; both must be positive"),
        ));
    }
    Ok(b_w * sd_x / sd_y)
}

/// The three coefficient flavors of one predictor.
#[derive(Clone, Debug, PartialEq)]
pub struct IvCoefficients {
    pub name: String,
    /// DV units per IV unit, original scales.
    pub b_w: f64,
    /// SDs of DV per SD of IV.
    pub beta: f64,
    /// Fraction of the DV scale per whole IV scale.
    pub b_p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub intercept_raw: f64,
    pub intercept_p: f64,
    pub coefficients: Vec<IvCoefficients>,
    /// r² of the raw-scale fit.
    pub r_squared: f64,
    /// r² of the percentage-scale fit; equal to `r_squared` up to rounding.
    pub r_squared_p: f64,
    pub n_used: usize,
}

impl FitResult {
    pub fn get(&self, name: &str) -> Option<&IvCoefficients> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

/// Fits the model once on raw scales and once on percentage scales. β is
/// derived from the raw fit with sample standard deviations.
pub fn fit_three_ways(dm: &DesignMatrix) -> Result<FitResult> {
    let names: Vec<String> = dm.ivs.iter().map(|c| c.name.clone()).collect();
    let raw = fit_ols_named(&dm.raw_dv, &dm.raw_ivs, &names)?;
    let pct_ivs: Vec<Vec<f64>> = dm.ivs.iter().map(|c| c.values.clone()).collect();
    let pct = fit_ols_named(&dm.dv.values, &pct_ivs, &names)?;

    let sd_y = sample_sd(&dm.raw_dv);
    let coefficients = names
        .into_iter()
        .zip(&dm.raw_ivs)
        .zip(raw.coefficients.iter().zip(&pct.coefficients))
        .map(|((name, x), (&b_w, &b_p))| {
            let beta = if sd_y > 0.0 {
                standardized_beta(b_w, sample_sd(x), sd_y)?
            } else {
                0.0
            };
            Ok(IvCoefficients { name, b_w, beta, b_p })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FitResult {
        intercept_raw: raw.intercept,
        intercept_p: pct.intercept,
        coefficients,
        r_squared: raw.r_squared,
        r_squared_p: pct.r_squared,
        n_used: dm.n_rows(),
    })
}
