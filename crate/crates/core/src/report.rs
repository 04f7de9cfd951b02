//! Publication-style tables: the coefficient table with its presentation
//! order, the two comparison matrices, nominal-group summaries and ratio notes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::bootstrap::{
    BootstrapConfig, BootstrapDistribution, CoefficientInference, ComparisonCell, ComparisonKind,
    ComparisonMatrix, Flavor, INTERCEPT_P, INTERCEPT_RAW, R_SQUARED,
};
use crate::error::{Error, Result};
use crate::percentize::{dummy_name, BatchTag, DesignMatrix, NominalExpansion};
use crate::regression::FitResult;

/// Position in the coefficient table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RowSlot {
    /// Index into `FitResult::coefficients`.
    Coefficient(usize),
    /// Omitted reference group of a nominal variable.
    Reference { variable: String, group: String },
}

fn by_abs_bp_desc(fit: &FitResult, idx: &mut [usize]) {
    // stable: ties keep declaration order
    idx.sort_by(|&a, &b| {
        fit.coefficients[b]
            .b_p
            .abs()
            .total_cmp(&fit.coefficients[a].b_p.abs())
    });
}

/// Orders the table rows.
///
/// Numeric and binary predictors come first, then one block per nominal
/// variable led by its reference line. Within a block rows run from the
/// largest to the smallest `|b_p|`, except that a missing-data indicator
/// always follows its source variable.
pub fn order_rows(fit: &FitResult, batch_tags: &[BatchTag], nominals: &[NominalExpansion]) -> Vec<RowSlot> {
    let names: Vec<&str> = fit.coefficients.iter().map(|c| c.name.as_str()).collect();
    let numeric: Vec<usize> = (0..batch_tags.len())
        .filter(|&i| matches!(batch_tags[i], BatchTag::NumericBinary { .. }))
        .collect();
    let pinned_to = |i: usize| match &batch_tags[i] {
        BatchTag::NumericBinary {
            indicator_of: Some(src),
        } => numeric
            .iter()
            .any(|&j| names[j] == src.as_str())
            .then_some(src.as_str()),
        _ => None,
    };

    let mut heads: Vec<usize> = numeric.iter().copied().filter(|&i| pinned_to(i).is_none()).collect();
    by_abs_bp_desc(fit, &mut heads);
    let mut rows = Vec::with_capacity(batch_tags.len() + nominals.len());
    for h in heads {
        rows.push(RowSlot::Coefficient(h));
        rows.extend(
            numeric
                .iter()
                .filter(|&&i| pinned_to(i) == Some(names[h]))
                .map(|&i| RowSlot::Coefficient(i)),
        );
    }

    let mut variables: Vec<&str> = Vec::new();
    for tag in batch_tags {
        if let BatchTag::Nominal { variable, .. } = tag {
            if !variables.contains(&variable.as_str()) {
                variables.push(variable);
            }
        }
    }
    for var in variables {
        let reference = nominals
            .iter()
            .find(|n| n.variable == var)
            .map(|n| n.reference.clone())
            .unwrap_or_default();
        rows.push(RowSlot::Reference {
            variable: var.to_string(),
            group: reference,
        });
        let mut members: Vec<usize> = (0..batch_tags.len())
            .filter(|&i| matches!(&batch_tags[i], BatchTag::Nominal { variable, .. } if variable == var))
            .collect();
        by_abs_bp_desc(fit, &mut members);
        rows.extend(members.into_iter().map(RowSlot::Coefficient));
    }
    rows
}

/// All pairwise gaps between the groups of one nominal variable.
#[derive(Clone, Debug, PartialEq)]
pub struct NominalSummary {
    pub variable: String,
    pub reference: String,
    /// `(a, b, b_p(a) − b_p(b))` for every unordered group pair.
    pub pairs: Vec<(String, String, f64)>,
    pub largest_pair: (String, String),
    pub largest_gap: f64,
    pub mean_abs_pairwise: f64,
    pub pair_count: usize,
}

/// Pairwise gaps among `groups`, given as `(label, b_p)` with the reference
/// group's coefficient as 0. Pairs are `(later, earlier)` in input order.
pub fn nominal_pairwise_values(variable: &str, groups: &[(String, f64)]) -> Result<NominalSummary> {
    if groups.len() < 2 {
        return Err(Error::Degenerate(
            variable.to_string(),
            "needs at least 2 groups".into(),
        ));
    }
    let mut pairs = Vec::with_capacity(groups.len() * (groups.len() - 1) / 2);
    for a in 1..groups.len() {
        for b in 0..a {
            pairs.push((
                groups[a].0.clone(),
                groups[b].0.clone(),
                groups[a].1 - groups[b].1,
            ));
        }
    }
    let mut largest = 0;
    for (k, p) in pairs.iter().enumerate() {
        if p.2.abs() > pairs[largest].2.abs() {
            largest = k;
        }
    }
    let mean_abs_pairwise = pairs.iter().map(|p| p.2.abs()).sum::<f64>() / pairs.len() as f64;
    Ok(NominalSummary {
        variable: variable.to_string(),
        reference: groups[0].0.clone(),
        largest_pair: (pairs[largest].0.clone(), pairs[largest].1.clone()),
        largest_gap: pairs[largest].2,
        mean_abs_pairwise,
        pair_count: pairs.len(),
        pairs,
    })
}

/// Pairwise group gaps of a fitted nominal variable; the reference group
/// enters with coefficient 0.
pub fn nominal_pairwise(fit: &FitResult, nominal: &NominalExpansion) -> Result<NominalSummary> {
    let mut groups = vec![(nominal.reference.clone(), 0.0)];
    for g in &nominal.groups {
        let name = dummy_name(&nominal.variable, g);
        let c = fit.get(&name).ok_or(Error::Lookup(name))?;
        groups.push((g.clone(), c.b_p));
    }
    nominal_pairwise_values(&nominal.variable, &groups)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatioKind {
    /// `|b_p(i)| − |b_p(j)|`
    Differential,
    /// `(|b_p(i)| − |b_p(j)|) / |b_p(j)|`
    Proportional,
    /// `|b_p(i)| / |b_p(j)|`
    Multiple,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioNote {
    pub kind: RatioKind,
    pub operands: (String, String),
    pub value: f64,
}

/// Differential and proportional comparisons of two coefficients, given as
/// `(name, b_p)`. Proportional notes are dropped when `|b_p(j)|` is 0.
pub fn ratio_notes_values(i: (&str, f64), j: (&str, f64)) -> Vec<RatioNote> {
    let operands = (i.0.to_string(), j.0.to_string());
    let diff = i.1.abs() - j.1.abs();
    let mut notes = vec![RatioNote {
        kind: RatioKind::Differential,
        operands: operands.clone(),
        value: diff,
    }];
    let denom = j.1.abs();
    if denom == 0.0 {
        log::warn!("ratio of `{}` to `{}` skipped: zero denominator", i.0, j.0);
        return notes;
    }
    notes.push(RatioNote {
        kind: RatioKind::Proportional,
        operands: operands.clone(),
        value: diff / denom,
    });
    notes.push(RatioNote {
        kind: RatioKind::Multiple,
        operands,
        value: i.1.abs() / denom,
    });
    notes
}

pub fn ratio_notes(fit: &FitResult, pairs: &[(String, String)]) -> Result<Vec<RatioNote>> {
    let mut out = Vec::new();
    for (i, j) in pairs {
        let a = fit.get(i).ok_or_else(|| Error::Lookup(i.clone()))?;
        let b = fit.get(j).ok_or_else(|| Error::Lookup(j.clone()))?;
        out.extend(ratio_notes_values((i, a.b_p), (j, b.b_p)));
    }
    Ok(out)
}

/// Estimate with percentile CI and significance, as shown in a table cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefCell {
    pub estimate: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
    pub stars: u8,
}

impl CoefCell {
    fn from_distribution(d: &BootstrapDistribution, cfg: &BootstrapConfig) -> Self {
        CoefCell {
            estimate: d.point_estimate,
            se: d.se,
            ci_low: d.ci_low,
            ci_high: d.ci_high,
            p_value: d.p_value,
            stars: cfg.stars(d.p_value),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TableRow {
    Intercept { b_w: CoefCell, b_p: CoefCell },
    Coefficient { label: String, b_w: CoefCell, beta: CoefCell, b_p: CoefCell },
    Reference { variable: String, group: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportBundle {
    pub dv_name: String,
    pub n_used: usize,
    pub n_bootstrap: usize,
    pub ci_level: f64,
    pub alpha_levels: Vec<f64>,
    /// Mean of the dependent variable on its percentage scale.
    pub dv_percent_mean: f64,
    pub coefficient_table: Vec<TableRow>,
    pub r_squared: CoefCell,
    pub scalar_matrix: ComparisonMatrix,
    pub directional_matrix: ComparisonMatrix,
    pub nominal_summaries: Vec<NominalSummary>,
    pub ratio_notes: Vec<RatioNote>,
}

impl ReportBundle {
    /// Assembles the report from a full-sample fit and its bootstrap results.
    pub fn assemble(
        dm: &DesignMatrix,
        fit: &FitResult,
        inference: &CoefficientInference,
        scalar_matrix: ComparisonMatrix,
        directional_matrix: ComparisonMatrix,
        cfg: &BootstrapConfig,
    ) -> Result<Self> {
        if fit.coefficients.is_empty() {
            return Err(Error::Config("no predictors to report".into()));
        }
        let cell = |name: &str| {
            inference
                .get(name)
                .map(|d| CoefCell::from_distribution(d, cfg))
                .ok_or_else(|| Error::Lookup(name.to_string()))
        };
        let mut table = vec![TableRow::Intercept {
            b_w: cell(INTERCEPT_RAW)?,
            b_p: cell(INTERCEPT_P)?,
        }];
        let order = order_rows(fit, &dm.batch_tags, &dm.nominals);
        for slot in &order {
            table.push(match slot {
                RowSlot::Coefficient(i) => {
                    let name = &fit.coefficients[*i].name;
                    TableRow::Coefficient {
                        label: name.clone(),
                        b_w: cell(&Flavor::Raw.key(name))?,
                        beta: cell(&Flavor::Standardized.key(name))?,
                        b_p: cell(&Flavor::Percentage.key(name))?,
                    }
                }
                RowSlot::Reference { variable, group } => TableRow::Reference {
                    variable: variable.clone(),
                    group: group.clone(),
                },
            });
        }

        let nominal_summaries = dm
            .nominals
            .iter()
            .map(|n| nominal_pairwise(fit, n))
            .collect::<Result<Vec<_>>>()?;

        // every pair of table rows, larger |b_p| first
        let ranked: Vec<&str> = order
            .iter()
            .filter_map(|s| match s {
                RowSlot::Coefficient(i) => Some(fit.coefficients[*i].name.as_str()),
                RowSlot::Reference { .. } => None,
            })
            .collect();
        let mut pairs = Vec::new();
        for a in 0..ranked.len() {
            for b in a + 1..ranked.len() {
                let (x, y) = (fit.get(ranked[a]).unwrap(), fit.get(ranked[b]).unwrap());
                if x.b_p.abs() >= y.b_p.abs() {
                    pairs.push((x.name.clone(), y.name.clone()));
                } else {
                    pairs.push((y.name.clone(), x.name.clone()));
                }
            }
        }

        Ok(ReportBundle {
            dv_name: dm.dv.name.clone(),
            n_used: fit.n_used,
            n_bootstrap: cfg.n_bootstrap,
            ci_level: cfg.ci_level,
            alpha_levels: cfg.alpha_levels.clone(),
            dv_percent_mean: dm.dv.mean(),
            coefficient_table: table,
            r_squared: cell(R_SQUARED)?,
            scalar_matrix,
            directional_matrix,
            nominal_summaries,
            ratio_notes: ratio_notes(fit, &pairs)?,
        })
    }
}

/// Output format.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "md" | "markdown" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

/// Three decimals, `-0.000` folded to `0.000`.
pub fn fmt_fixed(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Three decimals without the leading zero of values below 1 (`.034`, `-.008`).
pub fn fmt_coef(x: f64) -> String {
    let s = fmt_fixed(x);
    if let Some(rest) = s.strip_prefix("0.") {
        format!(".{rest}")
    } else if let Some(rest) = s.strip_prefix("-0.") {
        format!("-.{rest}")
    } else {
        s
    }
}

fn stars(n: u8) -> &'static str {
    ["", "*", "**", "***", "****", "*****"][usize::from(n).min(5)]
}

const DASH: &str = "—";

fn md_cell(c: &CoefCell) -> String {
    let mut s = format!("{} [{}, {}]", fmt_coef(c.estimate), fmt_fixed(c.ci_low), fmt_fixed(c.ci_high));
    if c.stars > 0 {
        s.push(' ');
        s.push_str(stars(c.stars));
    }
    s
}

fn star_legend(alpha: &[f64]) -> String {
    alpha
        .iter()
        .enumerate()
        .map(|(k, a)| format!("{} p < {a}", stars(k as u8 + 1)))
        .collect::<Vec<_>>()
        .join("; ")
}

fn reference_label(variable: &str, group: &str) -> String {
    format!("{} (reference)", dummy_name(variable, group))
}

pub fn render_coefficients_md(b: &ReportBundle) -> String {
    let mut out = String::new();
    let ci = (b.ci_level * 100.0).round();
    let _ = writeln!(out, "# Coefficients: {}", b.dv_name);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "n = {}; {} bootstrap replicates; {ci}% percentile intervals.",
        b.n_used, b.n_bootstrap
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "| | raw b (b_w) | standardized beta (β) | percentage coefficient (b_p) |");
    let _ = writeln!(out, "|---|---|---|---|");
    for row in &b.coefficient_table {
        let _ = match row {
            TableRow::Intercept { b_w, b_p } => {
                writeln!(out, "| Intercept | {} | {DASH} | {} |", md_cell(b_w), md_cell(b_p))
            }
            TableRow::Coefficient { label, b_w, beta, b_p } => writeln!(
                out,
                "| {label} | {} | {} | {} |",
                md_cell(b_w),
                md_cell(beta),
                md_cell(b_p)
            ),
            TableRow::Reference { variable, group } => writeln!(
                out,
                "| {} | {DASH} | {DASH} | {DASH} |",
                reference_label(variable, group)
            ),
        };
    }
    let r2 = format!(
        "{} [{}, {}]",
        fmt_coef(b.r_squared.estimate),
        fmt_fixed(b.r_squared.ci_low),
        fmt_fixed(b.r_squared.ci_high)
    );
    let _ = writeln!(out, "| Total r² | {r2} | {r2} | {r2} |");
    let _ = writeln!(out);
    let _ = writeln!(out, "{}", star_legend(&b.alpha_levels));
    out
}

pub fn render_coefficients_csv(b: &ReportBundle) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["label".to_string(), "row".to_string()];
    for f in ["b_w", "beta", "b_p"] {
        for suffix in ["", "_se", "_ci_low", "_ci_high", "_p"] {
            header.push(format!("{f}{suffix}"));
        }
    }
    w.write_record(&header)?;
    let cells = |c: Option<&CoefCell>| -> Vec<String> {
        match c {
            Some(c) => vec![
                c.estimate.to_string(),
                c.se.to_string(),
                c.ci_low.to_string(),
                c.ci_high.to_string(),
                c.p_value.to_string(),
            ],
            None => vec![String::new(); 5],
        }
    };
    for row in &b.coefficient_table {
        let mut rec = match row {
            TableRow::Intercept { .. } => vec!["Intercept".to_string(), "intercept".into()],
            TableRow::Coefficient { label, .. } => vec![label.clone(), "coefficient".into()],
            TableRow::Reference { variable, group } => {
                vec![reference_label(variable, group), "reference".into()]
            }
        };
        match row {
            TableRow::Intercept { b_w, b_p } => {
                rec.extend(cells(Some(b_w)));
                rec.extend(cells(None));
                rec.extend(cells(Some(b_p)));
            }
            TableRow::Coefficient { b_w, beta, b_p, .. } => {
                rec.extend(cells(Some(b_w)));
                rec.extend(cells(Some(beta)));
                rec.extend(cells(Some(b_p)));
            }
            TableRow::Reference { .. } => (0..3).for_each(|_| rec.extend(cells(None))),
        }
        w.write_record(&rec)?;
    }
    let mut rec = vec!["r_squared".to_string(), "fit".into()];
    (0..3).for_each(|_| rec.extend(cells(Some(&b.r_squared))));
    w.write_record(&rec)?;
    let bytes = w.into_inner().map_err(|e| Error::Data(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn matrix_title(m: &ComparisonMatrix) -> (&'static str, &'static str) {
    match m.kind {
        ComparisonKind::Scalar => (
            "Scalar comparison of efficiencies",
            "d_s = |b_p(i)| − |b_p(j)|",
        ),
        ComparisonKind::Directional => (
            "Directional comparison of efficiencies",
            "d_d = b_p(i) − b_p(j)",
        ),
    }
}

fn matrix_cell(c: &ComparisonCell) -> String {
    format!("{}{}", fmt_fixed(c.estimate), stars(c.stars))
}

/// Square layout: predictor `i` across the columns, `j` down the rows.
pub fn render_matrix_md(m: &ComparisonMatrix, alpha_levels: &[f64]) -> String {
    let (title, formula) = matrix_title(m);
    let mut out = String::new();
    let _ = writeln!(out, "# {title}, {formula}");
    let _ = writeln!(out);
    let _ = write!(out, "| j \\ i |");
    for name in &m.iv_names {
        let _ = write!(out, " {name} |");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "|---|{}", "---|".repeat(m.iv_names.len()));
    for (j, row_name) in m.iv_names.iter().enumerate() {
        let _ = write!(out, "| {row_name} |");
        for i in 0..m.iv_names.len() {
            let text = m.cells[i][j].as_ref().map_or("--".to_string(), matrix_cell);
            let _ = write!(out, " {text} |");
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "Cells: {formula}, with i the column and j the row.");
    let _ = writeln!(out);
    let _ = writeln!(out, "{}", star_legend(alpha_levels));
    out
}

/// Long layout, one line per ordered pair, full precision.
pub fn render_matrix_csv(m: &ComparisonMatrix) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "i",
        "j",
        "estimate",
        "se",
        "ci_low",
        "ci_high",
        "p_value",
        "p_below_resolution",
        "stars",
    ])?;
    for (i, a) in m.iv_names.iter().enumerate() {
        for (j, b) in m.iv_names.iter().enumerate() {
            if let Some(c) = &m.cells[i][j] {
                w.write_record([
                    a.clone(),
                    b.clone(),
                    c.estimate.to_string(),
                    c.se.to_string(),
                    c.ci_low.to_string(),
                    c.ci_high.to_string(),
                    c.p_value.to_string(),
                    c.p_below_resolution.to_string(),
                    c.stars.to_string(),
                ])?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Data(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render_summary_md(b: &ReportBundle) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Summary: {}", b.dv_name);
    let _ = writeln!(out);
    let _ = writeln!(out, "- observations: {}", b.n_used);
    let _ = writeln!(out, "- bootstrap replicates: {}", b.n_bootstrap);
    let _ = writeln!(
        out,
        "- p-values of 0 mean no replicate crossed zero; they are below {}",
        2.0 / b.n_bootstrap as f64
    );
    let _ = writeln!(
        out,
        "- mean of {} on its percentage scale: {}",
        b.dv_name,
        fmt_fixed(b.dv_percent_mean)
    );
    let _ = writeln!(out, "- r²: {}", fmt_coef(b.r_squared.estimate));

    for s in &b.nominal_summaries {
        let _ = writeln!(out);
        let _ = writeln!(out, "## Nominal variable {}", s.variable);
        let _ = writeln!(out);
        let _ = writeln!(out, "- reference group: {}", s.reference);
        let _ = writeln!(out, "- pairwise differences: {}", s.pair_count);
        let _ = writeln!(
            out,
            "- largest difference: {} vs {}, b_p = {}",
            s.largest_pair.0,
            s.largest_pair.1,
            fmt_coef(s.largest_gap)
        );
        let _ = writeln!(out, "- mean absolute difference: {:.4}", s.mean_abs_pairwise);
        if b.dv_percent_mean != 0.0 {
            let _ = writeln!(
                out,
                "- largest difference relative to the mean of {}: {:.2}%",
                b.dv_name,
                s.largest_gap.abs() / b.dv_percent_mean * 100.0
            );
            let _ = writeln!(
                out,
                "- mean absolute difference relative to the mean of {}: {:.2}%",
                b.dv_name,
                s.mean_abs_pairwise / b.dv_percent_mean * 100.0
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "| group a | group b | b_p(a) − b_p(b) |");
        let _ = writeln!(out, "|---|---|---|");
        for (a, c, gap) in &s.pairs {
            let _ = writeln!(out, "| {a} | {c} | {} |", fmt_coef(*gap));
        }
    }

    let _ = writeln!(out);
    let _ = writeln!(out, "## Efficiency ratios");
    let _ = writeln!(out);
    let _ = writeln!(out, "| i | j | abs(b_p(i)) − abs(b_p(j)) | proportional | multiple |");
    let _ = writeln!(out, "|---|---|---|---|---|");
    let mut k = 0;
    while k < b.ratio_notes.len() {
        let head = &b.ratio_notes[k];
        let mut row = [fmt_fixed(head.value), DASH.to_string(), DASH.to_string()];
        k += 1;
        while k < b.ratio_notes.len() && b.ratio_notes[k].kind != RatioKind::Differential {
            let n = &b.ratio_notes[k];
            let slot = if n.kind == RatioKind::Proportional { 1 } else { 2 };
            row[slot] = fmt_fixed(n.value);
            k += 1;
        }
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} |",
            head.operands.0, head.operands.1, row[0], row[1], row[2]
        );
    }
    out
}

/// Writes the requested renderings into `out_dir`, returning the paths written.
pub fn render(bundle: &ReportBundle, formats: &[Format], out_dir: &Path) -> Result<Vec<PathBuf>> {
    if !bundle
        .coefficient_table
        .iter()
        .any(|r| matches!(r, TableRow::Coefficient { .. }))
    {
        return Err(Error::Config("no predictors to report".into()));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut files: Vec<(&str, String)> = Vec::new();
    if formats.contains(&Format::Markdown) {
        files.push(("coefficients.md", render_coefficients_md(bundle)));
        files.push((
            "scalar_matrix.md",
            render_matrix_md(&bundle.scalar_matrix, &bundle.alpha_levels),
        ));
        files.push((
            "directional_matrix.md",
            render_matrix_md(&bundle.directional_matrix, &bundle.alpha_levels),
        ));
        files.push(("summary.md", render_summary_md(bundle)));
    }
    if formats.contains(&Format::Csv) {
        files.push(("coefficients.csv", render_coefficients_csv(bundle)?));
        files.push(("scalar_matrix.csv", render_matrix_csv(&bundle.scalar_matrix)?));
        files.push((
            "directional_matrix.csv",
            render_matrix_csv(&bundle.directional_matrix)?,
        ));
    }
    let mut written = Vec::with_capacity(files.len());
    for (name, text) in files {
        let path = out_dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
