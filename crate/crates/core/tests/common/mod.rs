#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use pctcoef::dataset::{Column, Dataset, Role, Values, VariableSpec};
use pctcoef::percentize::{build_design_matrix, DesignMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Least squares with intercept through the normal equations, solved by
/// Gaussian elimination with partial pivoting. Returns `(intercept, slopes, r²)`.
pub fn normal_equations(y: &[f64], xs: &[Vec<f64>]) -> (f64, Vec<f64>, f64) {
    let n = y.len();
    let k = xs.len() + 1;
    let col = |j: usize, r: usize| if j == 0 { 1.0 } else { xs[j - 1][r] };
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = (0..n).map(|r| col(i, r) * col(j, r)).sum();
        }
        a[i][k] = (0..n).map(|r| col(i, r) * y[r]).sum();
    }
    for p in 0..k {
        let piv = (p..k)
            .max_by(|&u, &v| a[u][p].abs().total_cmp(&a[v][p].abs()))
            .unwrap();
        a.swap(p, piv);
        for r in p + 1..k {
            let f = a[r][p] / a[p][p];
            for c in p..=k {
                a[r][c] -= f * a[p][c];
            }
        }
    }
    let mut b = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| a[i][j] * b[j]).sum();
        b[i] = (a[i][k] - s) / a[i][i];
    }
    let my = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let rss: f64 = (0..n)
        .map(|r| {
            let fit: f64 = (0..k).map(|j| b[j] * col(j, r)).sum();
            (y[r] - fit).powi(2)
        })
        .sum();
    (b[0], b[1..].to_vec(), 1.0 - rss / tss)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A numeric variable with anchors and raw values.
pub struct Var {
    pub name: String,
    pub anchors: (f64, f64),
    pub values: Vec<f64>,
}

pub fn column(spec: VariableSpec, v: &[f64]) -> Column {
    Column::new(spec, Values::Real(v.iter().map(|&x| Some(x)).collect()))
}

/// Design matrix from numeric variables only.
pub fn numeric_design(dv: &Var, ivs: &[Var]) -> DesignMatrix {
    let mut cols = vec![column(
        VariableSpec::numeric(&dv.name, Role::Dependent, dv.anchors.0, dv.anchors.1),
        &dv.values,
    )];
    for v in ivs {
        cols.push(column(
            VariableSpec::numeric(&v.name, Role::Independent, v.anchors.0, v.anchors.1),
            &v.values,
        ));
    }
    build_design_matrix(&Dataset::new(cols).unwrap(), false).unwrap()
}

/// Random regression: `p` predictors on random anchors, linear DV plus noise.
pub fn random_regression(r: &mut ChaCha8Rng, n: usize, p: usize, noise: f64) -> (Var, Vec<Var>) {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut ivs = Vec::with_capacity(p);
    for j in 0..p {
        let lo = r.random_range(-50.0..50.0);
        let width = r.random_range(1.0..100.0);
        let values = (0..n)
            .map(|_| lo + width * r.random_range(0.0..1.0))
            .collect();
        ivs.push(Var {
            name: format!("x{j}"),
            anchors: (lo, lo + width),
            values,
        });
    }
    let slopes: Vec<f64> = (0..p).map(|_| r.random_range(-2.0..2.0)).collect();
    let intercept = r.random_range(-5.0..5.0);
    let y: Vec<f64> = (0..n)
        .map(|i| {
            intercept
                + ivs.iter().zip(&slopes).map(|(v, b)| b * v.values[i]).sum::<f64>()
                + noise * normal.sample(r)
        })
        .collect();
    let lo = r.random_range(-10.0..10.0);
    let width = r.random_range(1.0..50.0);
    (
        Var {
            name: "y".into(),
            anchors: (lo, lo + width),
            values: y,
        },
        ivs,
    )
}

/// Writes a survey-shaped CSV and a matching JSON config into `dir`.
///
/// Columns: PSD (1–4 DV), AGE (0–100), INC (1–9, about 10% missing,
/// dummy-adjusted), EDU (1–7), GEN (0/1), RAC (five groups, "Others" highest).
pub fn write_survey(dir: &Path, n: usize, seed: u64, n_bootstrap: usize) -> (PathBuf, PathBuf) {
    let mut r = rng(seed);
    let normal = Normal::new(0.0, 0.45).unwrap();
    let races = [
        ("White", 0.55, -0.22),
        ("Black", 0.12, -0.21),
        ("Hispanic", 0.15, -0.14),
        ("Asian", 0.05, -0.09),
        ("Others", 0.13, 0.0),
    ];
    let mut csv = String::from("id,PSD,AGE,INC,EDU,GEN,RAC\n");
    for i in 0..n {
        let age = r.random_range(18..=95) as f64;
        let inc = r.random_range(1..=9) as f64;
        let edu = r.random_range(1..=7) as f64;
        let gen = if r.random_bool(0.57) { 1.0 } else { 0.0 };
        let u: f64 = r.random_range(0.0..1.0);
        let mut acc = 0.0;
        let mut race = races[4];
        for g in races {
            acc += g.1;
            if u < acc {
                race = g;
                break;
            }
        }
        let psd = (2.45 - 0.008 * age - 0.06 * inc - 0.018 * edu + 0.1 * gen + race.2
            + normal.sample(&mut r))
        .clamp(1.0, 4.0);
        let inc_cell = if r.random_bool(0.1) {
            String::new()
        } else {
            format!("{inc}")
        };
        let _ = writeln!(csv, "{i},{psd:.4},{age},{inc_cell},{edu},{gen},{}", race.0);
    }
    let data = dir.join("survey.csv");
    std::fs::write(&data, csv).unwrap();
    let config = serde_json::json!({
        "data_path": "survey.csv",
        "variables": [
            {"name": "PSD", "role": "dependent", "kind": "numeric", "conceptual_min": 1, "conceptual_max": 4},
            {"name": "AGE", "role": "independent", "kind": "numeric", "conceptual_min": 0, "conceptual_max": 100},
            {"name": "INC", "role": "independent", "kind": "ordinal", "conceptual_min": 1, "conceptual_max": 9,
             "missing_policy": "dummy_adjust"},
            {"name": "EDU", "role": "independent", "kind": "ordinal", "conceptual_min": 1, "conceptual_max": 7},
            {"name": "GEN", "role": "independent", "kind": "binary"},
            {"name": "RAC", "role": "independent", "kind": "nominal", "reference_rule": "highest_dv_mean"}
        ],
        "bootstrap": {"n_bootstrap": n_bootstrap, "seed": 42},
        "output_dir": "out",
        "output_formats": ["md", "csv"]
    });
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    (data, cfg)
}

/// Relative path → file bytes for every file under `dir`, sorted.
pub fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}
