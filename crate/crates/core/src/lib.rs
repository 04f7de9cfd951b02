//! Percentage coefficients for linear regression.
//!
//! A percentage coefficient `b_p` is the regression coefficient obtained when
//! the dependent and every independent variable sit on 0–1 scales spanned by
//! their conceptual minimum and maximum. It reads as the share of the DV scale
//! gained or lost per whole-scale increase of the IV. This crate reports it
//! next to the raw coefficient `b_w` and the standardized `β`, and compares
//! coefficients pairwise with a percentile bootstrap.
//!
//! Pipeline:
//!
//! - [`dataset`]: variable declarations, CSV loading, missing-data policy
//! - [`percentize`]: scale transforms, dummy coding, design matrix
//! - [`regression`]: least-squares fits in raw and percentage units
//! - [`bootstrap`]: case-resampling inference and comparison matrices
//! - [`report`]: row ordering, summaries and Markdown/CSV output
//! - [`cli`]: the `pctcoef` batch command
//!
//! ```
//! use pctcoef::percentize::percentize_value;
//!
//! // an 18-year-old on a 0–100 age scale
//! assert!((percentize_value(18.0, 0.0, 100.0).unwrap() - 0.18).abs() < 1e-12);
//! ```

pub mod bootstrap;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod percentize;
pub mod regression;
pub mod report;

pub use bootstrap::{
    BootstrapConfig, BootstrapDistribution, ComparisonKind, ComparisonMatrix, Flavor,
};
pub use dataset::{Dataset, Kind, MissingPolicy, MissingReport, ReferenceRule, Role, VariableSpec};
pub use error::{Error, Result};
pub use percentize::{DesignMatrix, PercentizedColumn};
pub use regression::{FitResult, IvCoefficients};
pub use report::ReportBundle;
