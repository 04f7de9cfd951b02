//! Scale transforms onto conceptual percentage scales and the assembly of the
//! design matrix used by the three regression fits.

use std::collections::BTreeMap;

use crate::dataset::{Dataset, Kind, ReferenceRule, Role, VariableSpec};
use crate::error::{Error, Result};

fn check_anchors(min: f64, max: f64) -> Result<()> {
    if max > min && min.is_finite() && max.is_finite() {
        Ok(())
    } else {
        Err(Error::Anchor { min, max })
    }
}

/// Maps an original-scale value onto the 0–1 percentage scale spanned by the
/// conceptual anchors `c_n` and `c_x`.
///
/// Values beyond the anchors map outside `[0, 1]`; an age of 110 on a 0–100
/// scale becomes 1.1.
pub fn percentize_value(value: f64, c_n: f64, c_x: f64) -> Result<f64> {
    check_anchors(c_n, c_x)?;
    Ok((value - c_n) / (c_x - c_n))
}

/// Same as [`percentize_value`] on a 0–100 scale.
pub fn percent_value_100(value: f64, m_n: f64, m_x: f64) -> Result<f64> {
    check_anchors(m_n, m_x)?;
    Ok((value - m_n) / (m_x - m_n) * 100.0)
}

/// General min-max normalization of `value` from `[min_o, max_o]` onto
/// `[min_n, max_n]`.
pub fn minmax_value(value: f64, min_o: f64, max_o: f64, min_n: f64, max_n: f64) -> Result<f64> {
    check_anchors(min_o, max_o)?;
    if !(max_n >= min_n) {
        return Err(Error::Anchor {
            min: min_n,
            max: max_n,
        });
    }
    Ok((value - min_o) / (max_o - min_o) * (max_n - min_n) + min_n)
}

/// One design-matrix column on its percentage scale.
#[derive(Clone, Debug, PartialEq)]
pub struct PercentizedColumn {
    pub name: String,
    pub values: Vec<f64>,
    pub source_spec: VariableSpec,
    /// Conceptual anchors of the original scale; `(0, 1)` for binaries and dummies.
    pub anchors: (f64, f64),
    pub observed_min: f64,
    pub observed_max: f64,
}

impl PercentizedColumn {
    fn new(name: String, values: Vec<f64>, source_spec: VariableSpec, anchors: (f64, f64)) -> Self {
        let (observed_min, observed_max) = min_max(&values);
        PercentizedColumn {
            name,
            values,
            source_spec,
            anchors,
            observed_min,
            observed_max,
        }
    }

    /// Width of the conceptual range, in original units.
    pub fn range(&self) -> f64 {
        self.anchors.1 - self.anchors.0
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// Presentation batch of a predictor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BatchTag {
    /// Numeric, ordinal or binary predictor. Missing-data indicators carry
    /// the name of the variable they flag.
    NumericBinary { indicator_of: Option<String> },
    /// Dummy for `group` of nominal `variable`.
    Nominal { variable: String, group: String },
}

/// Dummy coding of one nominal variable.
#[derive(Clone, Debug, PartialEq)]
pub struct NominalExpansion {
    pub variable: String,
    pub reference: String,
    /// Non-reference groups, in the order of `dummies`.
    pub groups: Vec<String>,
    /// Mean of the dependent variable per group, sorted by group label.
    pub dv_means: BTreeMap<String, f64>,
    pub dummies: Vec<PercentizedColumn>,
}

/// Expands a nominal column into G−1 0/1 dummies, omitting the reference group.
///
/// Ties between candidate reference groups go to the lexicographically
/// smallest label.
pub fn expand_nominal(column: &[String], dv: &[f64], spec: &VariableSpec) -> Result<NominalExpansion> {
    if column.len() != dv.len() {
        return Err(Error::Data(format!(
            "`{}` has {} rows but the dependent variable has {}",
            spec.name,
            column.len(),
            dv.len()
        )));
    }
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for (label, &y) in column.iter().zip(dv) {
        let e = sums.entry(label.clone()).or_insert((0.0, 0));
        e.0 += y;
        e.1 += 1;
    }
    if sums.len() < 2 {
        return Err(Error::Degenerate(
            spec.name.clone(),
            format!("needs at least 2 categories, found {}", sums.len()),
        ));
    }
    let dv_means: BTreeMap<String, f64> = sums
        .into_iter()
        .map(|(k, (s, n))| (k, s / n as f64))
        .collect();

    let pick = |better: fn(f64, f64) -> bool| {
        let mut it = dv_means.iter();
        let (mut best, mut best_mean) = it.next().expect("at least two groups");
        for (label, mean) in it {
            // strict comparison keeps the smallest label on ties
            if better(*mean, *best_mean) {
                best = label;
                best_mean = mean;
            }
        }
        best.clone()
    };
    let reference = match spec.effective_reference_rule() {
        ReferenceRule::HighestDvMean => pick(|a, b| a > b),
        ReferenceRule::LowestDvMean => pick(|a, b| a < b),
        ReferenceRule::Explicit => {
            let group = spec.reference_group.clone().ok_or_else(|| {
                Error::Config(format!("`{}`: explicit reference rule without a group", spec.name))
            })?;
            if !dv_means.contains_key(&group) {
                return Err(Error::Config(format!(
                    "reference group `{group}` of `{}` does not occur in the data",
                    spec.name
                )));
            }
            group
        }
    };

    let groups: Vec<String> = dv_means.keys().filter(|g| **g != reference).cloned().collect();
    let dummies = groups
        .iter()
        .map(|g| {
            let values = column.iter().map(|c| if c == g { 1.0 } else { 0.0 }).collect();
            PercentizedColumn::new(dummy_name(&spec.name, g), values, spec.clone(), (0.0, 1.0))
        })
        .collect();
    Ok(NominalExpansion {
        variable: spec.name.clone(),
        reference,
        groups,
        dv_means,
        dummies,
    })
}

/// Column name of the dummy for `group` of nominal `variable`.
pub fn dummy_name(variable: &str, group: &str) -> String {
    format!("{variable}_{group}")
}

/// Fully percentized, dummy-expanded predictors plus the raw-scale copies
/// used for the raw-coefficient fit.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    pub dv: PercentizedColumn,
    pub ivs: Vec<PercentizedColumn>,
    pub raw_dv: Vec<f64>,
    pub raw_ivs: Vec<Vec<f64>>,
    pub batch_tags: Vec<BatchTag>,
    pub nominals: Vec<NominalExpansion>,
}

impl DesignMatrix {
    pub fn n_rows(&self) -> usize {
        self.raw_dv.len()
    }

    pub fn iv_names(&self) -> Vec<&str> {
        self.ivs.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn iv_index(&self, name: &str) -> Option<usize> {
        self.ivs.iter().position(|c| c.name == name)
    }

    /// Copy restricted to (possibly repeated) `rows`, in the given order.
    /// Nominal metadata is kept as is.
    pub fn select_rows(&self, rows: &[usize]) -> DesignMatrix {
        let take = |v: &[f64]| rows.iter().map(|&r| v[r]).collect::<Vec<_>>();
        let column = |c: &PercentizedColumn| PercentizedColumn::new(
            c.name.clone(),
            take(&c.values),
            c.source_spec.clone(),
            c.anchors,
        );
        DesignMatrix {
            dv: column(&self.dv),
            ivs: self.ivs.iter().map(column).collect(),
            raw_dv: take(&self.raw_dv),
            raw_ivs: self.raw_ivs.iter().map(|v| take(v)).collect(),
            batch_tags: self.batch_tags.clone(),
            nominals: self.nominals.clone(),
        }
    }
}

fn percentize_column(spec: &VariableSpec, raw: &[f64], strict: bool) -> Result<PercentizedColumn> {
    let (c_n, c_x) = spec.anchors()?;
    check_anchors(c_n, c_x)?;
    if spec.kind == Kind::Binary {
        if let Some(v) = raw.iter().find(|&&v| v != 0.0 && v != 1.0) {
            return Err(Error::Data(format!(
                "binary variable `{}` contains value {v}",
                spec.name
            )));
        }
    }
    let outside = raw.iter().filter(|&&v| v < c_n || v > c_x).count();
    if outside > 0 {
        let msg = format!(
            "{outside} value(s) of `{}` fall outside the conceptual range [{c_n}, {c_x}]",
            spec.name
        );
        if strict {
            return Err(Error::Data(msg));
        }
        log::warn!("{msg}");
    }
    let values = raw
        .iter()
        .map(|&v| percentize_value(v, c_n, c_x))
        .collect::<Result<Vec<_>>>()?;
    Ok(PercentizedColumn::new(spec.name.clone(), values, spec.clone(), (c_n, c_x)))
}

/// Builds the design matrix from a dataset whose missing values are resolved.
///
/// Numeric and ordinal variables are percentized with their conceptual anchors,
/// binaries pass through and nominal variables are dummy-expanded. With
/// `strict_anchors`, values beyond the conceptual anchors are rejected instead
/// of producing a warning.
pub fn build_design_matrix(d: &Dataset, strict_anchors: bool) -> Result<DesignMatrix> {
    if d.has_missing() {
        return Err(Error::Data(
            "dataset still contains missing values; apply the missing-data policy first".into(),
        ));
    }
    let dependents: Vec<_> = d
        .columns()
        .iter()
        .filter(|c| c.spec.role == Role::Dependent)
        .collect();
    let dv_col = match dependents.as_slice() {
        [one] => *one,
        [] => return Err(Error::Config("no dependent variable declared".into())),
        many => {
            let names: Vec<_> = many.iter().map(|c| c.name()).collect();
            return Err(Error::Config(format!(
                "exactly one dependent variable allowed, found {}",
                names.join(", ")
            )));
        }
    };
    let raw_dv = dv_col.reals()?;
    let dv = percentize_column(&dv_col.spec, &raw_dv, strict_anchors)?;

    let mut ivs = Vec::new();
    let mut raw_ivs = Vec::new();
    let mut batch_tags = Vec::new();
    let mut nominals = Vec::new();
    for col in d.columns().iter().filter(|c| c.spec.role != Role::Dependent) {
        if col.spec.kind == Kind::Nominal {
            let exp = expand_nominal(&col.categories()?, &raw_dv, &col.spec)?;
            log::info!(
                "`{}`: reference group `{}` ({:?})",
                exp.variable,
                exp.reference,
                col.spec.effective_reference_rule()
            );
            for (dummy, group) in exp.dummies.iter().zip(&exp.groups) {
                raw_ivs.push(dummy.values.clone());
                ivs.push(dummy.clone());
                batch_tags.push(BatchTag::Nominal {
                    variable: exp.variable.clone(),
                    group: group.clone(),
                });
            }
            nominals.push(exp);
        } else {
            let raw = col.reals()?;
            let pc = percentize_column(&col.spec, &raw, strict_anchors)?;
            if pc.observed_min == pc.observed_max {
                return Err(Error::Degenerate(
                    col.name().to_string(),
                    "constant predictor".into(),
                ));
            }
            raw_ivs.push(raw);
            ivs.push(pc);
            batch_tags.push(BatchTag::NumericBinary {
                indicator_of: col.indicator_of.clone(),
            });
        }
    }
    if ivs.is_empty() {
        return Err(Error::Config("no independent variables declared".into()));
    }
    for a in 0..ivs.len() {
        for b in a + 1..ivs.len() {
            if ivs[a].values == ivs[b].values {
                return Err(Error::Collinearity(vec![ivs[a].name.clone(), ivs[b].name.clone()]));
            }
        }
    }
    Ok(DesignMatrix {
        dv,
        ivs,
        raw_dv,
        raw_ivs,
        batch_tags,
        nominals,
    })
}
