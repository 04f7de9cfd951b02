//! Tabular input: variable declarations, CSV ingestion and missing-data handling.
//!
//! A [`Dataset`] is a set of equally long columns, each tied to the
//! [`VariableSpec`] that declares its role, its kind and the conceptual anchors
//! of its scale. Anchors are conceptual (the theoretical endpoints of the
//! measurement scale), not the observed extremes of the data.

use std::collections::HashSet;
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cell contents treated as missing. Matching is exact and case-sensitive.
pub const MISSING_MARKERS: [&str; 3] = ["", "NA", "."];

/// Suffix of the indicator column created by dummy-variable adjustment.
pub const MISSING_INDICATOR_SUFFIX: &str = "_mis";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Dependent,
    Independent,
    Control,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Numeric,
    Binary,
    Ordinal,
    Nominal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    #[default]
    DropRow,
    DummyAdjust,
    Forbid,
}

/// How the omitted (reference) category of a nominal variable is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceRule {
    #[default]
    HighestDvMean,
    LowestDvMean,
    Explicit,
}

/// Declaration of one input column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSpec {
    pub name: String,
    pub role: Role,
    pub kind: Kind,
    /// Conceptual minimum on the original scale. Required for numeric and
    /// ordinal variables; binary variables default to 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conceptual_min: Option<f64>,
    /// Conceptual maximum on the original scale.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conceptual_max: Option<f64>,
    #[serde(default)]
    pub missing_policy: MissingPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_rule: Option<ReferenceRule>,
    /// Nominal only: category that absorbs missing cells. Without it, rows
    /// with a missing category are dropped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub missing_category: Option<String>,
}

impl VariableSpec {
    fn bare(name: &str, role: Role, kind: Kind) -> Self {
        VariableSpec {
            name: name.to_string(),
            role,
            kind,
            conceptual_min: None,
            conceptual_max: None,
            missing_policy: MissingPolicy::default(),
            reference_group: None,
            reference_rule: None,
            missing_category: None,
        }
    }

    pub fn numeric(name: &str, role: Role, conceptual_min: f64, conceptual_max: f64) -> Self {
        VariableSpec {
            conceptual_min: Some(conceptual_min),
            conceptual_max: Some(conceptual_max),
            ..Self::bare(name, role, Kind::Numeric)
        }
    }

    pub fn ordinal(name: &str, role: Role, conceptual_min: f64, conceptual_max: f64) -> Self {
        VariableSpec {
            kind: Kind::Ordinal,
            ..Self::numeric(name, role, conceptual_min, conceptual_max)
        }
    }

    pub fn binary(name: &str, role: Role) -> Self {
        VariableSpec {
            conceptual_min: Some(0.0),
            conceptual_max: Some(1.0),
            ..Self::bare(name, role, Kind::Binary)
        }
    }

    pub fn nominal(name: &str, role: Role) -> Self {
        Self::bare(name, role, Kind::Nominal)
    }

    pub fn with_missing_policy(mut self, policy: MissingPolicy) -> Self {
        self.missing_policy = policy;
        self
    }

    pub fn with_reference_rule(mut self, rule: ReferenceRule) -> Self {
        self.reference_rule = Some(rule);
        self
    }

    pub fn with_reference_group(mut self, group: &str) -> Self {
        self.reference_rule = Some(ReferenceRule::Explicit);
        self.reference_group = Some(group.to_string());
        self
    }

    pub fn with_missing_category(mut self, category: &str) -> Self {
        self.missing_category = Some(category.to_string());
        self
    }

    /// Conceptual anchors `(c_n, c_x)`.
    pub fn anchors(&self) -> Result<(f64, f64)> {
        match self.kind {
            Kind::Binary => Ok((
                self.conceptual_min.unwrap_or(0.0),
                self.conceptual_max.unwrap_or(1.0),
            )),
            Kind::Numeric | Kind::Ordinal => match (self.conceptual_min, self.conceptual_max) {
                (Some(min), Some(max)) => Ok((min, max)),
                _ => Err(Error::Config(format!(
                    "variable `{}` needs both conceptual_min and conceptual_max",
                    self.name
                ))),
            },
            Kind::Nominal => Err(Error::Config(format!(
                "nominal variable `{}` has no scale anchors",
                self.name
            ))),
        }
    }

    /// Reference rule for a nominal variable. An explicit reference group
    /// without a rule implies [`ReferenceRule::Explicit`].
    pub fn effective_reference_rule(&self) -> ReferenceRule {
        match (self.reference_rule, &self.reference_group) {
            (Some(rule), _) => rule,
            (None, Some(_)) => ReferenceRule::Explicit,
            (None, None) => ReferenceRule::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(format!("variable `{}`: {msg}", self.name)));
        if self.name.trim().is_empty() {
            return Err(Error::Config("variable with empty name".into()));
        }
        match self.kind {
            Kind::Numeric | Kind::Ordinal => {
                let (min, max) = self.anchors()?;
                if !(min.is_finite() && max.is_finite()) || max <= min {
                    return Err(Error::Anchor { min, max });
                }
            }
            Kind::Binary => {
                if self.anchors()? != (0.0, 1.0) {
                    return fail("binary variables must have anchors 0 and 1".into());
                }
                if self.missing_policy == MissingPolicy::DummyAdjust {
                    return fail("dummy_adjust would impute non-binary values".into());
                }
            }
            Kind::Nominal => {
                if self.conceptual_min.is_some() || self.conceptual_max.is_some() {
                    return fail("nominal variables take no conceptual anchors".into());
                }
                if self.missing_policy == MissingPolicy::DummyAdjust {
                    return fail("dummy_adjust applies to numeric variables only".into());
                }
                if self.role == Role::Dependent {
                    return fail("the dependent variable cannot be nominal".into());
                }
                match (self.effective_reference_rule(), &self.reference_group) {
                    (ReferenceRule::Explicit, None) => {
                        return fail("reference_rule `explicit` needs reference_group".into())
                    }
                    (ReferenceRule::HighestDvMean | ReferenceRule::LowestDvMean, Some(_)) => {
                        return fail("reference_group is only used with reference_rule `explicit`".into())
                    }
                    _ => {}
                }
            }
        }
        if self.kind != Kind::Nominal
            && (self.reference_group.is_some()
                || self.reference_rule.is_some()
                || self.missing_category.is_some())
        {
            return fail("reference and category settings apply to nominal variables only".into());
        }
        if self.role == Role::Dependent && self.missing_policy == MissingPolicy::DummyAdjust {
            return fail("the dependent variable cannot be imputed".into());
        }
        Ok(())
    }
}

/// Column contents; `None` marks a missing cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Values {
    Real(Vec<Option<f64>>),
    Category(Vec<Option<String>>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Real(v) => v.len(),
            Values::Category(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match self {
            Values::Real(v) => v[row].is_none(),
            Values::Category(v) => v[row].is_none(),
        }
    }

    pub fn missing_rows(&self) -> Vec<usize> {
        (0..self.len()).filter(|&r| self.is_missing(r)).collect()
    }

    fn retain_rows(&self, keep: &[bool]) -> Values {
        fn pick<T: Clone>(v: &[T], keep: &[bool]) -> Vec<T> {
            v.iter()
                .zip(keep)
                .filter(|(_, &k)| k)
                .map(|(x, _)| x.clone())
                .collect()
        }
        match self {
            Values::Real(v) => Values::Real(pick(v, keep)),
            Values::Category(v) => Values::Category(pick(v, keep)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub spec: VariableSpec,
    pub values: Values,
    /// Set on missing-data indicators: the variable whose missingness they flag.
    pub indicator_of: Option<String>,
}

impl Column {
    pub fn new(spec: VariableSpec, values: Values) -> Self {
        Column {
            spec,
            values,
            indicator_of: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    /// Real values, failing if any cell is missing or the column is categorical.
    pub fn reals(&self) -> Result<Vec<f64>> {
        match &self.values {
            Values::Real(v) => v
                .iter()
                .map(|x| {
                    x.ok_or_else(|| {
                        Error::Data(format!("variable `{}` still has missing values", self.name()))
                    })
                })
                .collect(),
            Values::Category(_) => Err(Error::Data(format!(
                "variable `{}` is categorical",
                self.name()
            ))),
        }
    }

    pub fn categories(&self) -> Result<Vec<String>> {
        match &self.values {
            Values::Category(v) => v
                .iter()
                .map(|x| {
                    x.clone().ok_or_else(|| {
                        Error::Data(format!("variable `{}` still has missing values", self.name()))
                    })
                })
                .collect(),
            Values::Real(_) => Err(Error::Data(format!("variable `{}` is not nominal", self.name()))),
        }
    }
}

/// Validated collection of equally long, uniquely named columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    columns: Vec<Column>,
    n_rows: usize,
}

impl Dataset {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, |c| c.values.len());
        let mut seen = HashSet::new();
        for c in &columns {
            c.spec.validate()?;
            if !seen.insert(c.name().to_string()) {
                return Err(Error::Schema(format!("duplicate variable `{}`", c.name())));
            }
            if c.values.len() != n_rows {
                return Err(Error::Schema(format!(
                    "column `{}` has {} rows, expected {n_rows}",
                    c.name(),
                    c.values.len()
                )));
            }
            let categorical = matches!(c.values, Values::Category(_));
            if categorical != (c.spec.kind == Kind::Nominal) {
                return Err(Error::Schema(format!(
                    "column `{}` storage does not match its kind {:?}",
                    c.name(),
                    c.spec.kind
                )));
            }
        }
        Ok(Dataset { columns, n_rows })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name() == name)
    }

    pub fn has_missing(&self) -> bool {
        self.columns
            .iter()
            .any(|c| (0..self.n_rows).any(|r| c.values.is_missing(r)))
    }
}

fn is_missing_marker(cell: &str) -> bool {
    MISSING_MARKERS.contains(&cell)
}

/// Loads a CSV file (header row first) into a [`Dataset`] holding the columns
/// named by `specs`, in spec order. Unlisted columns are ignored.
pub fn load_csv(path: impl AsRef<Path>, specs: &[VariableSpec]) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, specs)
}

/// Same as [`load_csv`] over any reader.
pub fn read_csv<R: Read>(reader: R, specs: &[VariableSpec]) -> Result<Dataset> {
    let mut names = HashSet::new();
    for s in specs {
        if !names.insert(s.name.as_str()) {
            return Err(Error::Schema(format!("variable `{}` declared twice", s.name)));
        }
    }

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::Input("file is empty".into()));
    }

    let positions = specs
        .iter()
        .map(|s| {
            header
                .iter()
                .position(|h| h == s.name)
                .ok_or_else(|| Error::MissingColumn(s.name.clone()))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); specs.len()];
    for record in rdr.records() {
        let record = record?;
        for (slot, &pos) in raw.iter_mut().zip(&positions) {
            slot.push(record.get(pos).unwrap_or("").to_string());
        }
    }
    if raw.first().is_none_or(|c| c.is_empty()) && !specs.is_empty() {
        return Err(Error::Input("file has a header but no data rows".into()));
    }

    let columns = specs
        .iter()
        .zip(raw)
        .map(|(spec, cells)| {
            let values = if spec.kind == Kind::Nominal {
                Values::Category(
                    cells
                        .into_iter()
                        .map(|c| (!is_missing_marker(&c)).then_some(c))
                        .collect(),
                )
            } else {
                let mut unparsed = 0usize;
                let v = cells
                    .iter()
                    .map(|c| {
                        if is_missing_marker(c) {
                            return None;
                        }
                        let parsed = c.parse::<f64>().ok().filter(|x| x.is_finite());
                        if parsed.is_none() {
                            unparsed += 1;
                        }
                        parsed
                    })
                    .collect();
                if unparsed > 0 {
                    log::warn!(
                        "{unparsed} unparseable cell(s) in `{}` treated as missing",
                        spec.name
                    );
                }
                Values::Real(v)
            };
            Column::new(spec.clone(), values)
        })
        .collect();
    Dataset::new(columns)
}

/// What was done about one variable's missing cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolution {
    NoneMissing,
    RowsDropped,
    /// Mean-imputed with an indicator column of this name.
    Indicator(String),
    /// Mean-imputed; no indicator because nothing was missing.
    Imputed,
    /// Missing cells folded into this nominal category.
    Category(String),
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::NoneMissing => write!(f, "no missing values"),
            Resolution::RowsDropped => write!(f, "rows dropped"),
            Resolution::Indicator(name) => write!(f, "mean-imputed, indicator `{name}` added"),
            Resolution::Imputed => write!(f, "mean-imputed"),
            Resolution::Category(c) => write!(f, "assigned to category `{c}`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MissingEntry {
    pub variable: String,
    pub missing: usize,
    pub resolution: Resolution,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MissingReport {
    pub rows_before: usize,
    pub rows_after: usize,
    pub entries: Vec<MissingEntry>,
}

impl MissingReport {
    pub fn entry(&self, variable: &str) -> Option<&MissingEntry> {
        self.entries.iter().find(|e| e.variable == variable)
    }
}

impl fmt::Display for MissingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rows: {} -> {}", self.rows_before, self.rows_after)?;
        for e in &self.entries {
            writeln!(f, "  {}: {} missing, {}", e.variable, e.missing, e.resolution)?;
        }
        Ok(())
    }
}

/// Resolves every missing cell according to each variable's policy.
///
/// Listwise deletion runs first; dummy adjustment then fills the remaining
/// gaps of `dummy_adjust` variables with the mean of their observed cells and
/// appends a `<name>_mis` 0/1 indicator right after the source column.
pub fn apply_missing_policy(d: &Dataset) -> Result<(Dataset, MissingReport)> {
    let n = d.n_rows();

    for c in d.columns() {
        if c.spec.missing_policy == MissingPolicy::Forbid {
            let rows = c.values.missing_rows();
            if !rows.is_empty() {
                return Err(Error::ForbiddenMissing {
                    variable: c.name().to_string(),
                    rows,
                });
            }
        }
    }

    let mut keep = vec![true; n];
    let mut entries = Vec::with_capacity(d.columns().len());
    for c in d.columns() {
        let rows = c.values.missing_rows();
        let resolution = if rows.is_empty() {
            Resolution::NoneMissing
        } else if let (Kind::Nominal, Some(cat)) = (c.spec.kind, &c.spec.missing_category) {
            Resolution::Category(cat.clone())
        } else if c.spec.missing_policy == MissingPolicy::DummyAdjust {
            // filled in below, once the retained rows are known
            Resolution::Imputed
        } else {
            for &r in &rows {
                keep[r] = false;
            }
            Resolution::RowsDropped
        };
        entries.push(MissingEntry {
            variable: c.name().to_string(),
            missing: rows.len(),
            resolution,
        });
    }

    let rows_after = keep.iter().filter(|&&k| k).count();
    let mut columns = Vec::with_capacity(d.columns().len() + 1);
    let mut taken: HashSet<String> = d.columns().iter().map(|c| c.name().to_string()).collect();

    for (c, entry) in d.columns().iter().zip(entries.iter_mut()) {
        let values = c.values.retain_rows(&keep);
        match (&values, &entry.resolution) {
            (Values::Category(v), Resolution::Category(cat)) => {
                let filled = v
                    .iter()
                    .map(|x| Some(x.clone().unwrap_or_else(|| cat.clone())))
                    .collect();
                columns.push(Column {
                    values: Values::Category(filled),
                    ..c.clone()
                });
            }
            (Values::Real(v), Resolution::Imputed) => {
                let observed: Vec<f64> = v.iter().flatten().copied().collect();
                let still_missing = v.len() - observed.len();
                if observed.is_empty() {
                    return Err(Error::Degenerate(
                        c.name().to_string(),
                        "no observed values to impute from".into(),
                    ));
                }
                let mean = observed.iter().sum::<f64>() / observed.len() as f64;
                let filled = v.iter().map(|x| Some(x.unwrap_or(mean))).collect();
                columns.push(Column {
                    values: Values::Real(filled),
                    ..c.clone()
                });
                if still_missing == 0 {
                    // every missing row was removed by listwise deletion
                    entry.resolution = Resolution::RowsDropped;
                    continue;
                }
                let indicator = format!("{}{MISSING_INDICATOR_SUFFIX}", c.name());
                if !taken.insert(indicator.clone()) {
                    return Err(Error::Schema(format!(
                        "indicator column `{indicator}` collides with an existing variable"
                    )));
                }
                let flags = v
                    .iter()
                    .map(|x| Some(if x.is_none() { 1.0 } else { 0.0 }))
                    .collect();
                let mut spec = VariableSpec::binary(&indicator, c.spec.role);
                spec.missing_policy = MissingPolicy::Forbid;
                log::info!(
                    "`{}`: {still_missing} missing value(s) imputed at mean {mean}, indicator `{indicator}` added",
                    c.name()
                );
                columns.push(Column {
                    spec,
                    values: Values::Real(flags),
                    indicator_of: Some(c.name().to_string()),
                });
                entry.resolution = Resolution::Indicator(indicator);
            }
            _ => columns.push(Column {
                values,
                ..c.clone()
            }),
        }
    }

    let report = MissingReport {
        rows_before: n,
        rows_after,
        entries,
    };
    Ok((Dataset::new(columns)?, report))
}
